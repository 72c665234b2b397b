//! Qubit encodings on top of the Fock space.
//!
//! A register is laid out as, from the least significant mode up:
//! vortex qubits (two modes / four Majoranas each, logical states
//! `|0> = |00>`, `|1> = |11>` in the even-parity sector), then single-mode
//! ancilla pairs, then flying qubits.
//!
//! Flying qubits are not fermionic: they are bare two-level systems (atomic
//! states of the incident atoms) that happen to be stored as the highest
//! modes of the same amplitude vector. All vortex/ancilla Majorana strings
//! extend only over lower modes, and operators on the flying registers are
//! plain occupancy-basis qubit maps, so the tensor factorization between the
//! fermionic register and the flying register is exact.

use crate::clifford::space::{FockSpace, StateVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Leakage weight above which a claimed logical operation is rejected.
pub const LEAKAGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n_vortex: usize,
    n_ancilla_pairs: usize,
    n_flying: usize,
}

impl RegisterLayout {
    pub fn new(n_vortex: usize, n_ancilla_pairs: usize, n_flying: usize) -> Result<Self> {
        let layout = RegisterLayout {
            n_vortex,
            n_ancilla_pairs,
            n_flying,
        };
        layout.space()?; // fails when the mode budget is exceeded
        Ok(layout)
    }

    pub fn n_vortex(&self) -> usize {
        self.n_vortex
    }

    pub fn n_ancilla_pairs(&self) -> usize {
        self.n_ancilla_pairs
    }

    pub fn n_flying(&self) -> usize {
        self.n_flying
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_vortex + self.n_ancilla_pairs + self.n_flying
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.n_modes())
    }

    /// The two modes of vortex qubit `q` (1-based).
    pub fn vortex_modes(&self, q: usize) -> Result<(usize, usize)> {
        self.check_vortex(q)?;
        Ok((2 * q - 1, 2 * q))
    }

    /// The four Majoranas of vortex qubit `q`, in vortex order v1..v4.
    pub fn vortex_majoranas(&self, q: usize) -> Result<[usize; 4]> {
        self.check_vortex(q)?;
        let base = 4 * (q - 1);
        Ok([base + 1, base + 2, base + 3, base + 4])
    }

    pub fn ancilla_mode(&self, a: usize) -> Result<usize> {
        self.check_ancilla(a)?;
        Ok(2 * self.n_vortex + a)
    }

    pub fn ancilla_majoranas(&self, a: usize) -> Result<(usize, usize)> {
        let m = self.ancilla_mode(a)?;
        Ok((2 * m - 1, 2 * m))
    }

    pub fn flying_mode(&self, f: usize) -> Result<usize> {
        self.check_flying(f)?;
        Ok(2 * self.n_vortex + self.n_ancilla_pairs + f)
    }

    fn check_vortex(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n_vortex {
            return Err(Error::IndexOutOfRange {
                what: "vortex qubit",
                index: q,
                limit: self.n_vortex,
            });
        }
        Ok(())
    }

    fn check_ancilla(&self, a: usize) -> Result<()> {
        if a == 0 || a > self.n_ancilla_pairs {
            return Err(Error::IndexOutOfRange {
                what: "ancilla pair",
                index: a,
                limit: self.n_ancilla_pairs,
            });
        }
        Ok(())
    }

    fn check_flying(&self, f: usize) -> Result<()> {
        if f == 0 || f > self.n_flying {
            return Err(Error::IndexOutOfRange {
                what: "flying qubit",
                index: f,
                limit: self.n_flying,
            });
        }
        Ok(())
    }
}

/// A logical qubit within a layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterRef {
    Vortex(usize),
    Flying(usize),
}

/// Logical content of a state over a chosen subset of registers.
#[derive(Debug, Clone)]
pub struct LogicalExtract {
    /// 2^k amplitudes; the first listed register is the most significant bit.
    pub amplitudes: Vec<Complex64>,
    /// Probability weight outside the encoded subspace (vortex parity
    /// violations, occupied unlisted registers).
    pub leakage: f64,
}

fn check_distinct(regs: &[RegisterRef]) -> Result<()> {
    for (n, r) in regs.iter().enumerate() {
        if regs[..n].contains(r) {
            let idx = match r {
                RegisterRef::Vortex(q) => *q,
                RegisterRef::Flying(f) => *f,
            };
            return Err(Error::OverlappingAssignment(idx));
        }
    }
    Ok(())
}

/// Basis-state classification used by [`extract_logical`]: either a logical
/// bit or a violation of the encoding.
fn classify_register(layout: &RegisterLayout, reg: RegisterRef, b: usize) -> Result<Option<usize>> {
    match reg {
        RegisterRef::Vortex(q) => {
            let (m1, m2) = layout.vortex_modes(q)?;
            let b1 = (b >> (m1 - 1)) & 1;
            let b2 = (b >> (m2 - 1)) & 1;
            if b1 == b2 {
                Ok(Some(b1))
            } else {
                Ok(None) // odd-parity configuration: outside the qubit space
            }
        }
        RegisterRef::Flying(f) => {
            let m = layout.flying_mode(f)?;
            Ok(Some((b >> (m - 1)) & 1))
        }
    }
}

/// Project the state onto the logical basis of `regs` (first listed register
/// = most significant bit). Every register not listed, and every ancilla
/// pair, must sit in its reference (empty) state; weight violating that, or
/// violating a vortex qubit's even parity, is reported as leakage.
pub fn extract_logical(
    psi: &StateVector,
    layout: &RegisterLayout,
    regs: &[RegisterRef],
) -> Result<LogicalExtract> {
    check_distinct(regs)?;
    let space = layout.space()?;
    if space != psi.space() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: psi.dim(),
        });
    }

    let k = regs.len();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << k];
    let mut leakage = 0.0;

    'basis: for (b, &a) in psi.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let mut idx = 0usize;
        for (pos, reg) in regs.iter().enumerate() {
            match classify_register(layout, *reg, b)? {
                Some(bit) => idx |= bit << (k - 1 - pos),
                None => {
                    leakage += a.norm_sqr();
                    continue 'basis;
                }
            }
        }
        // Unlisted registers must be in their reference state.
        for q in 1..=layout.n_vortex {
            if regs.contains(&RegisterRef::Vortex(q)) {
                continue;
            }
            let (m1, m2) = layout.vortex_modes(q)?;
            if b & ((1 << (m1 - 1)) | (1 << (m2 - 1))) != 0 {
                leakage += a.norm_sqr();
                continue 'basis;
            }
        }
        for anc in 1..=layout.n_ancilla_pairs {
            let m = layout.ancilla_mode(anc)?;
            if b & (1 << (m - 1)) != 0 {
                leakage += a.norm_sqr();
                continue 'basis;
            }
        }
        for f in 1..=layout.n_flying {
            if regs.contains(&RegisterRef::Flying(f)) {
                continue;
            }
            let m = layout.flying_mode(f)?;
            if b & (1 << (m - 1)) != 0 {
                leakage += a.norm_sqr();
                continue 'basis;
            }
        }
        amplitudes[idx] += a;
    }

    Ok(LogicalExtract {
        amplitudes,
        leakage,
    })
}

/// Physical state encoding logical basis state `bits` on `regs` (first listed
/// = most significant bit); everything else in its reference state.
pub fn prepare_logical(
    layout: &RegisterLayout,
    regs: &[RegisterRef],
    bits: usize,
) -> Result<StateVector> {
    check_distinct(regs)?;
    let k = regs.len();
    if bits >= (1 << k) {
        return Err(Error::IndexOutOfRange {
            what: "logical basis state",
            index: bits,
            limit: (1 << k) - 1,
        });
    }
    let mut b = 0usize;
    for (pos, reg) in regs.iter().enumerate() {
        if (bits >> (k - 1 - pos)) & 1 == 0 {
            continue;
        }
        match reg {
            RegisterRef::Vortex(q) => {
                let (m1, m2) = layout.vortex_modes(*q)?;
                b |= (1 << (m1 - 1)) | (1 << (m2 - 1));
            }
            RegisterRef::Flying(f) => {
                let m = layout.flying_mode(*f)?;
                b |= 1 << (m - 1);
            }
        }
    }
    StateVector::basis_state(layout.space()?, b)
}

/// Physical state carrying an arbitrary logical superposition: `amps` has
/// 2^k entries over the listed registers (first listed = most significant
/// bit). The amplitudes must already be normalized.
pub fn prepare_logical_superposition(
    layout: &RegisterLayout,
    regs: &[RegisterRef],
    amps: &[Complex64],
) -> Result<StateVector> {
    let k = regs.len();
    if amps.len() != (1 << k) {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            got: amps.len(),
        });
    }
    let space = layout.space()?;
    let mut physical = vec![Complex64::new(0.0, 0.0); space.dim()];
    for (bits, a) in amps.iter().enumerate() {
        let basis = prepare_logical(layout, regs, bits)?;
        for (p, b) in physical.iter_mut().zip(basis.amplitudes()) {
            *p += a * b;
        }
    }
    StateVector::from_amplitudes(space, physical)
}

/// Singular values (descending) of the 2x2 amplitude matrix of a
/// two-register logical state (first register = rows). The second value
/// vanishes exactly when the state is a product. It is computed as
/// |det| / sigma_1, which keeps full precision for near-products where the
/// eigenvalue subtraction would cancel.
pub fn schmidt_values(amps: &[Complex64]) -> (f64, f64) {
    assert_eq!(amps.len(), 4, "two-register logical state expected");
    let t: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let det = amps[0] * amps[3] - amps[1] * amps[2];
    let disc = (t * t - 4.0 * det.norm_sqr()).max(0.0).sqrt();
    let s1 = ((t + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { det.norm() / s1 } else { 0.0 };
    (s1, s2)
}

/// Logical matrix of a physical operation over `regs`, column by column,
/// plus the worst off-block (leaked) norm over all columns.
/// Errors if any column leaks out of the encoded subspace.
pub fn logical_gate_report(
    layout: &RegisterLayout,
    regs: &[RegisterRef],
    mut op: impl FnMut(&mut StateVector) -> Result<()>,
) -> Result<(CMatrix, f64)> {
    let k = regs.len();
    let dim = 1 << k;
    let mut m = CMatrix::zeros(dim);
    let mut off_block: f64 = 0.0;
    for col in 0..dim {
        let mut psi = prepare_logical(layout, regs, col)?;
        op(&mut psi)?;
        let ex = extract_logical(&psi, layout, regs)?;
        if ex.leakage > LEAKAGE_TOL {
            return Err(Error::Leakage(ex.leakage));
        }
        off_block = off_block.max(ex.leakage.max(0.0).sqrt());
        for row in 0..dim {
            m[(row, col)] = ex.amplitudes[row];
        }
    }
    Ok((m, off_block))
}

/// Logical matrix of a physical operation over `regs`; see
/// [`logical_gate_report`] for the off-block certificate.
pub fn logical_gate_of(
    layout: &RegisterLayout,
    regs: &[RegisterRef],
    op: impl FnMut(&mut StateVector) -> Result<()>,
) -> Result<CMatrix> {
    logical_gate_report(layout, regs, op).map(|(m, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::unitary::Exchange;
    use crate::linalg::{c, qubit};

    #[test]
    fn layout_mode_assignment() {
        let layout = RegisterLayout::new(2, 1, 2).unwrap();
        assert_eq!(layout.n_modes(), 7);
        assert_eq!(layout.vortex_modes(1).unwrap(), (1, 2));
        assert_eq!(layout.vortex_modes(2).unwrap(), (3, 4));
        assert_eq!(layout.vortex_majoranas(2).unwrap(), [5, 6, 7, 8]);
        assert_eq!(layout.ancilla_mode(1).unwrap(), 5);
        assert_eq!(layout.ancilla_majoranas(1).unwrap(), (9, 10));
        assert_eq!(layout.flying_mode(1).unwrap(), 6);
        assert_eq!(layout.flying_mode(2).unwrap(), 7);
        assert!(layout.vortex_modes(3).is_err());
        assert!(RegisterLayout::new(6, 1, 1).is_err()); // 14 modes > 12
    }

    #[test]
    fn prepare_extract_round_trip() {
        let layout = RegisterLayout::new(2, 0, 1).unwrap();
        let regs = [
            RegisterRef::Vortex(1),
            RegisterRef::Flying(1),
            RegisterRef::Vortex(2),
        ];
        for bits in 0..8usize {
            let psi = prepare_logical(&layout, &regs, bits).unwrap();
            let ex = extract_logical(&psi, &layout, &regs).unwrap();
            assert!(ex.leakage < 1e-15);
            for (idx, a) in ex.amplitudes.iter().enumerate() {
                let want = if idx == bits { 1.0 } else { 0.0 };
                assert!((a - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn intra_pair_braid_is_logical_phase_gate() {
        // Exchanging v1, v2 of a vortex qubit acts as diag(1, i) on the
        // logical basis, up to global phase.
        let layout = RegisterLayout::new(1, 0, 0).unwrap();
        let regs = [RegisterRef::Vortex(1)];
        let ex = Exchange::new(1, 2, 1).unwrap();
        let gate = logical_gate_of(&layout, &regs, |psi| psi.apply_exchange(&ex)).unwrap();
        assert!(gate.phase_aligned_distance(&qubit::phase(std::f64::consts::FRAC_PI_2)) < 1e-12);
        let minus = Exchange::new(1, 2, -1).unwrap();
        let gate = logical_gate_of(&layout, &regs, |psi| psi.apply_exchange(&minus)).unwrap();
        assert!(gate.phase_aligned_distance(&qubit::phase(-std::f64::consts::FRAC_PI_2)) < 1e-12);
    }

    #[test]
    fn double_inter_pair_braid_is_spin_flip() {
        // (B_{23})^2 = g3 g2 acts on the logical qubit exactly as -i sigma_x.
        let layout = RegisterLayout::new(1, 0, 0).unwrap();
        let regs = [RegisterRef::Vortex(1)];
        let ex = Exchange::new(2, 3, 1).unwrap();
        let gate = logical_gate_of(&layout, &regs, |psi| {
            psi.apply_exchange(&ex)?;
            psi.apply_exchange(&ex)
        })
        .unwrap();
        assert!(gate.distance(&qubit::spin_flip()) < 1e-12); // exact, including phase
    }

    #[test]
    fn single_inter_pair_braid_stays_logical() {
        // One B_{23} keeps total parity even, so on a single vortex qubit it
        // is a valid logical gate: (1 - i sigma_x)/sqrt(2) exactly.
        let layout = RegisterLayout::new(1, 0, 0).unwrap();
        let regs = [RegisterRef::Vortex(1)];
        let ex = Exchange::new(2, 3, 1).unwrap();
        let gate = logical_gate_of(&layout, &regs, |psi| psi.apply_exchange(&ex)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = CMatrix::identity(2)
            .scale(c(s, 0.0))
            .add(&qubit::sigma_x().scale(c(0.0, -s)));
        assert!(gate.distance(&want) < 1e-12);
    }

    #[test]
    fn single_inter_qubit_braid_leaks() {
        // One exchange linking two different vortex qubits puts each qubit
        // into an odd-parity configuration: full leakage.
        let layout = RegisterLayout::new(2, 0, 0).unwrap();
        let regs = [RegisterRef::Vortex(1), RegisterRef::Vortex(2)];
        let ex = Exchange::new(4, 5, 1).unwrap();
        let err = logical_gate_of(&layout, &regs, |psi| psi.apply_exchange(&ex)).unwrap_err();
        assert!(matches!(err, Error::Leakage(_)));
    }

    #[test]
    fn controlled_phase_couples_flying_to_vortex() {
        // CP(pi) between the flying mode and the first vortex mode acts
        // logically as diag(1, 1, 1, -1).
        let layout = RegisterLayout::new(1, 0, 1).unwrap();
        let regs = [RegisterRef::Flying(1), RegisterRef::Vortex(1)];
        let (m1, _) = layout.vortex_modes(1).unwrap();
        let fm = layout.flying_mode(1).unwrap();
        let gate = logical_gate_of(&layout, &regs, |psi| {
            psi.apply_controlled_phase(fm, m1, std::f64::consts::PI)
        })
        .unwrap();
        let mut want = CMatrix::identity(4);
        want[(3, 3)] = c(-1.0, 0.0);
        assert!(gate.distance(&want) < 1e-12);
    }

    #[test]
    fn unlisted_registers_must_be_reset() {
        let layout = RegisterLayout::new(2, 1, 0).unwrap();
        let regs = [RegisterRef::Vortex(1)];
        // Occupied second vortex qubit counts as leakage for this view.
        let psi = prepare_logical(
            &layout,
            &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
            0b01,
        )
        .unwrap();
        let ex = extract_logical(&psi, &layout, &regs).unwrap();
        assert!((ex.leakage - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_registers_rejected() {
        let layout = RegisterLayout::new(1, 0, 1).unwrap();
        let regs = [RegisterRef::Vortex(1), RegisterRef::Vortex(1)];
        assert!(matches!(
            prepare_logical(&layout, &regs, 0),
            Err(Error::OverlappingAssignment(1))
        ));
    }
}
