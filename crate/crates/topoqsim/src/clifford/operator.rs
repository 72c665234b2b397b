//! Hermitian parity observables built from Majorana products.

use super::space::{gamma_action, StateVector};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A +/-1-valued observable: either a pair parity `-i g_i g_j` or a
/// four-Majorana parity `g_a g_b g_c g_d`. Both square to the identity and
/// are Hermitian provided the indices are distinct; constructors insist on
/// strictly ascending order so each observable has one canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityObservable {
    Pair([usize; 2]),
    Quad([usize; 4]),
}

impl ParityObservable {
    pub fn pair(i: usize, j: usize) -> Result<Self> {
        if i == 0 || i >= j {
            return Err(Error::InvalidExchange(i, j));
        }
        Ok(ParityObservable::Pair([i, j]))
    }

    pub fn quad(ks: [usize; 4]) -> Result<Self> {
        if ks[0] == 0 || !ks.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidExchange(ks[0], ks[3]));
        }
        Ok(ParityObservable::Quad(ks))
    }

    pub fn majoranas(&self) -> &[usize] {
        match self {
            ParityObservable::Pair(ks) => ks,
            ParityObservable::Quad(ks) => ks,
        }
    }

    pub fn max_majorana(&self) -> usize {
        *self.majoranas().last().unwrap()
    }

    /// Image of basis state `b` under the observable: `O |b> = coef |b2>`.
    pub fn basis_action(&self, b: usize) -> (usize, Complex64) {
        match self {
            ParityObservable::Pair([i, j]) => {
                // -i g_i g_j: g_j acts first.
                let (b1, c1) = gamma_action(*j, b);
                let (b2, c2) = gamma_action(*i, b1);
                (b2, Complex64::new(0.0, -1.0) * c1 * c2)
            }
            ParityObservable::Quad(ks) => {
                let mut cur = b;
                let mut coef = Complex64::new(1.0, 0.0);
                for &k in ks.iter().rev() {
                    let (nb, c) = gamma_action(k, cur);
                    cur = nb;
                    coef *= c;
                }
                (cur, coef)
            }
        }
    }

    /// `O |psi>` as a fresh vector of amplitudes.
    pub fn apply(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        psi.space().check_majorana(self.max_majorana())?;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
        for (b, &a) in psi.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (b2, coef) = self.basis_action(b);
            out[b2] += coef * a;
        }
        Ok(out)
    }

    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let image = self.apply(psi)?;
        let val: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(image.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(val.re)
    }
}
