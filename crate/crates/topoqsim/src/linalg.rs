//! Small dense complex matrices.
//!
//! Everything here targets verification work on spaces of dimension at most a
//! few thousand; no attempt is made at cache blocking or BLAS dispatch.

use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product, `self` acting on the most significant factor.
    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.dim;
        let m = rhs.dim;
        let mut out = CMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to `rhs` minimized over a global phase. The optimal
    /// phase `u = tr(B^dag A)/|tr(B^dag A)|` is applied and the residual taken
    /// elementwise, which stays accurate near zero.
    pub fn phase_aligned_distance(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        let overlap: Complex64 = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        let u = if overlap.norm() > 1e-300 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a * u.conj() - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        let mut s = 0.0;
        for (a, b) in self.data.iter().zip(rhs.data.iter()) {
            s += (a - b).norm_sqr();
        }
        s.sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// exp(A) by scaling-and-squaring over the plain Taylor series.
    /// Adequate for the anti-Hermitian generators used here.
    pub fn expm(&self) -> CMatrix {
        let norm = self.norm();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(1.0 / f64::powi(2.0, squarings as i32), 0.0));
        let mut term = CMatrix::identity(self.dim);
        let mut sum = CMatrix::identity(self.dim);
        for k in 1..64 {
            term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.norm() < 1e-300 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .mul(self)
            .distance(&CMatrix::identity(self.dim))
            < tol
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which pipeline produced a unitary. Carried through so reports can say
/// whether a gate came out of braiding, a collision phase, or a compiled
/// measurement-setting sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Braid,
    Collision,
    Compiled,
}

/// A unitary matrix tagged with its provenance.
#[derive(Debug, Clone)]
pub struct Unitary {
    pub matrix: CMatrix,
    pub provenance: Provenance,
}

impl Unitary {
    pub fn braid(matrix: CMatrix) -> Self {
        Unitary {
            matrix,
            provenance: Provenance::Braid,
        }
    }

    pub fn collision(matrix: CMatrix) -> Self {
        Unitary {
            matrix,
            provenance: Provenance::Collision,
        }
    }

    pub fn compiled(matrix: CMatrix) -> Self {
        Unitary {
            matrix,
            provenance: Provenance::Compiled,
        }
    }
}

impl std::ops::Deref for Unitary {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        &self.matrix
    }
}

/// 2x2 Pauli matrices and friends, used throughout the logical-level checks.
pub mod qubit {
    use super::{c, CMatrix};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn hadamard() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_rows(&[&[c(s, 0.0), c(s, 0.0)], &[c(s, 0.0), c(-s, 0.0)]])
    }

    /// diag(1, e^{i phi})
    pub fn phase(phi: f64) -> CMatrix {
        CMatrix::from_rows(&[
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(phi.cos(), phi.sin())],
        ])
    }

    /// -i sigma_x: the spin-flip produced by a double inter-pair exchange.
    pub fn spin_flip() -> CMatrix {
        sigma_x().scale(c(0.0, -1.0))
    }
}
