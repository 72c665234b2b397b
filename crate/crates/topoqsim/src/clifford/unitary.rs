//! Vortex exchanges (braid generators) and braid words.
//!
//! A single counterclockwise exchange of the vortices carrying Majoranas
//! `i` and `j` acts as `B = exp(s pi g_j g_i / 4) = (1 + s g_j g_i)/sqrt(2)`,
//! with `s = +1` for one chirality of the exchange and `-1` for the other.
//! `B^4 = -1` and `B^8 = 1`: the group generated is a double cover of the
//! permutation action.

use super::space::{FockSpace, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Unitary};
use num_complex::Complex64;
use std::fmt;

/// One exchange of two Majoranas. Indices are kept in ascending order;
/// constructing with swapped indices flips the sign, since
/// `g_i g_j = -g_j g_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exchange {
    i: usize,
    j: usize,
    sign: i8,
}

impl Exchange {
    pub fn new(i: usize, j: usize, sign: i8) -> Result<Self> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::InvalidExchange(i, j));
        }
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        if i < j {
            Ok(Exchange { i, j, sign })
        } else {
            Ok(Exchange {
                i: j,
                j: i,
                sign: -sign,
            })
        }
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn inverse(&self) -> Exchange {
        Exchange {
            i: self.i,
            j: self.j,
            sign: -self.sign,
        }
    }
}

impl fmt::Display for Exchange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "B {} {} {}",
            self.i,
            self.j,
            if self.sign > 0 { '+' } else { '-' }
        )
    }
}

impl StateVector {
    /// Apply one exchange in place: `psi <- (psi + s g_j g_i psi)/sqrt(2)`.
    pub fn apply_exchange(&mut self, ex: &Exchange) -> Result<()> {
        self.space().check_majorana(ex.j)?;
        let s = f64::from(ex.sign);
        let mut out = self.amplitudes().to_vec();
        for (b, &a) in self.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (b1, c1) = super::space::gamma_action(ex.i, b);
            let (b2, c2) = super::space::gamma_action(ex.j, b1);
            out[b2] += s * c1 * c2 * a;
        }
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        *self = StateVector::raw(self.space(), out);
        self.scale(inv_sqrt2);
        Ok(())
    }

    pub fn apply_word(&mut self, word: &BraidWord) -> Result<()> {
        for ex in word.exchanges() {
            self.apply_exchange(ex)?;
        }
        Ok(())
    }
}

/// Dense matrix of one exchange on the full Fock space. Verification only;
/// protocol code applies exchanges directly to states.
pub fn braid_unitary(space: FockSpace, ex: &Exchange) -> Result<Unitary> {
    space.check_majorana(ex.j)?;
    let dim = space.dim();
    let mut m = CMatrix::zeros(dim);
    let s = f64::from(ex.sign);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for b in 0..dim {
        m[(b, b)] += Complex64::new(inv_sqrt2, 0.0);
        let (b1, c1) = super::space::gamma_action(ex.i, b);
        let (b2, c2) = super::space::gamma_action(ex.j, b1);
        m[(b2, b)] += s * c1 * c2 * inv_sqrt2;
    }
    Ok(Unitary::braid(m))
}

/// An ordered sequence of exchanges; the first entry acts on the state first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BraidWord {
    exchanges: Vec<Exchange>,
}

impl BraidWord {
    pub fn new(exchanges: Vec<Exchange>) -> Self {
        BraidWord { exchanges }
    }

    pub fn empty() -> Self {
        BraidWord::default()
    }

    pub fn exchanges(&self) -> &[Exchange] {
        &self.exchanges
    }

    pub fn len(&self) -> usize {
        self.exchanges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exchanges.is_empty()
    }

    pub fn push(&mut self, ex: Exchange) {
        self.exchanges.push(ex);
    }

    pub fn then(mut self, other: &BraidWord) -> BraidWord {
        self.exchanges.extend_from_slice(other.exchanges());
        self
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            exchanges: self.exchanges.iter().rev().map(Exchange::inverse).collect(),
        }
    }

    /// Rewrite every Majorana index through `map` (e.g. to retarget a word
    /// synthesized on indices 1..=4 onto another vortex group).
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Result<BraidWord> {
        let mut out = Vec::with_capacity(self.exchanges.len());
        for ex in &self.exchanges {
            out.push(Exchange::new(map(ex.i), map(ex.j), ex.sign)?);
        }
        Ok(BraidWord { exchanges: out })
    }

    /// Dense unitary of the whole word (first exchange rightmost).
    pub fn unitary(&self, space: FockSpace) -> Result<Unitary> {
        let mut m = CMatrix::identity(space.dim());
        for ex in &self.exchanges {
            m = braid_unitary(space, ex)?.mul(&m);
        }
        Ok(Unitary::braid(m))
    }

    /// Parse the level schedule format: one exchange per line,
    /// `B <i> <j> <+|->`. Blank lines and `#` comments are skipped.
    pub fn parse_schedule(text: &str) -> Result<BraidWord> {
        let mut exchanges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "B" {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("expected `B <i> <j> <+|->`, got `{line}`"),
                });
            }
            let parse_idx = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::Config {
                    line: line_no,
                    message: format!("invalid Majorana index `{s}`"),
                })
            };
            let i = parse_idx(fields[1])?;
            let j = parse_idx(fields[2])?;
            let sign = match fields[3] {
                "+" => 1,
                "-" => -1,
                other => {
                    return Err(Error::Config {
                        line: line_no,
                        message: format!("invalid sign `{other}`, expected + or -"),
                    })
                }
            };
            exchanges.push(Exchange::new(i, j, sign).map_err(|e| Error::Config {
                line: line_no,
                message: e.to_string(),
            })?);
        }
        Ok(BraidWord { exchanges })
    }

    pub fn to_schedule(&self) -> String {
        let mut s = String::new();
        for ex in &self.exchanges {
            s.push_str(&ex.to_string());
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn exchange_normalizes_index_order() {
        let a = Exchange::new(4, 2, 1).unwrap();
        assert_eq!(a.indices(), (2, 4));
        assert_eq!(a.sign(), -1);
        assert!(Exchange::new(3, 3, 1).is_err());
    }

    #[test]
    fn braid_matches_matrix_exponential() {
        // B = exp(s pi g_j g_i / 4), checked against a Taylor-series expm of
        // the generator built as a dense matrix.
        let space = FockSpace::new(2).unwrap();
        for (i, j, s) in [(1, 2, 1i8), (2, 3, -1i8), (1, 4, 1i8)] {
            let b = braid_unitary(space, &Exchange::new(i, j, s).unwrap()).unwrap();
            // generator: s * pi/4 * g_j g_i
            let mut gen = CMatrix::zeros(space.dim());
            for col in 0..space.dim() {
                let (b1, c1) = crate::clifford::space::gamma_action(i, col);
                let (b2, c2) = crate::clifford::space::gamma_action(j, b1);
                gen[(b2, col)] = c1 * c2 * c(f64::from(s) * std::f64::consts::FRAC_PI_4, 0.0);
            }
            let want = gen.expm();
            assert!(b.distance(&want) < 1e-12, "exchange ({i},{j},{s})");
            assert!(b.is_unitary(1e-12));
        }
    }

    #[test]
    fn braid_period_eight() {
        let space = FockSpace::new(2).unwrap();
        let ex = Exchange::new(2, 3, 1).unwrap();
        let b = braid_unitary(space, &ex).unwrap();
        let mut acc = CMatrix::identity(space.dim());
        for _ in 0..4 {
            acc = b.mul(&acc);
        }
        // B^4 = -1
        assert!(acc.distance(&CMatrix::identity(space.dim()).scale(c(-1.0, 0.0))) < 1e-12);
        let b8 = acc.mul(&acc);
        assert!(b8.distance(&CMatrix::identity(space.dim())) < 1e-12);
    }

    #[test]
    fn word_inverse_cancels() {
        let space = FockSpace::new(3).unwrap();
        let word = BraidWord::parse_schedule("B 1 2 +\nB 2 3 -\nB 3 4 +\n").unwrap();
        let mut psi = StateVector::basis_state(space, 0b101).unwrap();
        let orig = psi.clone();
        psi.apply_word(&word).unwrap();
        psi.apply_word(&word.inverse()).unwrap();
        assert!(psi.phase_aligned_distance(&orig) < 1e-12);
        assert!((psi.inner(&orig).re - 1.0).abs() < 1e-12); // exact inverse, not just up to phase
    }

    #[test]
    fn schedule_round_trip_and_errors() {
        let text = "# comment\nB 1 2 +\n\nB 2 3 -\n";
        let word = BraidWord::parse_schedule(text).unwrap();
        assert_eq!(word.len(), 2);
        assert_eq!(word.to_schedule(), "B 1 2 +\nB 2 3 -\n");

        let err = BraidWord::parse_schedule("B 1 2 +\nX 2 3 -\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = BraidWord::parse_schedule("B 1 one +\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn apply_matches_dense_unitary() {
        let space = FockSpace::new(3).unwrap();
        let word = BraidWord::parse_schedule("B 1 3 +\nB 4 5 -\nB 2 6 +\n").unwrap();
        let dense = word.unitary(space).unwrap();
        for b in [0usize, 3, 7, 0b101] {
            let mut psi = StateVector::basis_state(space, b).unwrap();
            psi.apply_word(&word).unwrap();
            let mut want = vec![c(0.0, 0.0); space.dim()];
            for r in 0..space.dim() {
                want[r] = dense[(r, b)];
            }
            for (got, want) in psi.amplitudes().iter().zip(want.iter()) {
                assert!((got - want).norm() < 1e-12);
            }
        }
    }
}
