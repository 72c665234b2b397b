//! Probabilistic entanglement generation between two vortex qubits.
//!
//! Two flying atoms are each split into a superposition of "collides" and
//! "misses", fly past one vortex qubit each, picking up a conditional
//! collision phase, and are then merged on a common detector that counts
//! atoms but cannot tell which arm they came from. Counting exactly one atom
//! erases the which-path record and projects the two vortex qubits onto a
//! Bell state (after a deterministic braid correction); counting zero or two
//! leaves a product state and the attempt is discarded.
//!
//! Branch bookkeeping, exact on the 6-mode register:
//! count 0 with probability 1/4 (vortex state |00>), count 2 with 1/4
//! (|11>), count 1 with 1/2, split evenly between a symmetric and an
//! antisymmetric detector combination.

use super::{cached_gates, qubit_word, ProtocolTrace};
use crate::clifford::measure::{OutcomePicker, MIN_BRANCH_PROB};
use crate::clifford::space::StateVector;
use crate::encoding::{extract_logical, RegisterLayout, RegisterRef};
use crate::error::{Error, Result};
use crate::linalg::c;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

/// Register for one EG attempt: two vortex qubits and two flying atoms.
pub fn eg_layout() -> RegisterLayout {
    RegisterLayout::new(2, 0, 2).expect("6 modes fit")
}

/// What the merge detector does with the which-path information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeModel {
    /// The detector counts atoms without resolving the arm: single counts
    /// project onto the symmetric or antisymmetric arm combination.
    WhichPathErasure,
    /// Control model: the arm is resolved (equivalently, leaks to the
    /// environment), so a single count dephases the pair instead of
    /// entangling it.
    BareDephasing,
}

impl fmt::Display for MergeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergeModel::WhichPathErasure => "which_path_erasure",
            MergeModel::BareDephasing => "bare_dephasing",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityBranch {
    Symmetric,
    Antisymmetric,
}

impl fmt::Display for ParityBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityBranch::Symmetric => "symmetric",
            ParityBranch::Antisymmetric => "antisymmetric",
        })
    }
}

/// Outcome of one merge, and hence of one EG attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgOutcome {
    /// Atoms counted by the merge detector: 0, 1 or 2.
    pub atom_count: usize,
    /// Which single-count branch was taken (erasure model only).
    pub parity_branch: Option<ParityBranch>,
    /// An attempt succeeds exactly when one atom is counted.
    pub success: bool,
}

/// Split a flying atom into (|0> + |1>)/sqrt(2): the beam splitter in front
/// of the vortex array.
pub fn split_flying(
    state: &mut StateVector,
    layout: &RegisterLayout,
    f: usize,
    trace: &mut ProtocolTrace,
) -> Result<()> {
    let m = layout.flying_mode(f)?;
    let s = FRAC_1_SQRT_2;
    let h = [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]];
    state.apply_mode_unitary(m, &h)?;
    trace.gate(format!("split(F{f})"));
    Ok(())
}

/// Entangle flying atom `f` with vortex qubit `v`: Hadamard on the vortex
/// (braid word), collision phase `theta` conditioned on the atom taking the
/// collision arm and the qubit's first mode being occupied, Hadamard again.
/// With `theta = pi` this maps |+>_F |0>_V to the Bell state
/// (|00> + |11>)/sqrt(2) on (F, v); with `theta = 0` it is the identity.
pub fn entangle_flying_vortex(
    state: &mut StateVector,
    layout: &RegisterLayout,
    f: usize,
    v: usize,
    theta: f64,
    trace: &mut ProtocolTrace,
) -> Result<()> {
    let h = qubit_word(layout, v, &cached_gates().hadamard)?;
    let f_mode = layout.flying_mode(f)?;
    let (v_m1, _) = layout.vortex_modes(v)?;

    state.apply_word(&h)?;
    trace.gate(format!("braid_hadamard(V{v})"));
    state.apply_controlled_phase(f_mode, v_m1, theta)?;
    trace.gate(format!("collision_phase(F{f},V{v},theta={theta:.12})"));
    state.apply_word(&h)?;
    trace.gate(format!("braid_hadamard(V{v})"));
    Ok(())
}

/// Merge the two flying arms on the counting detector and project. Flying
/// modes are discarded (reset empty) in every branch afterwards.
pub fn merge_and_count(
    state: &mut StateVector,
    layout: &RegisterLayout,
    model: MergeModel,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<EgOutcome> {
    let f1 = layout.flying_mode(1)?;
    let f2 = layout.flying_mode(2)?;
    let count = state.measure_total_occupancy(&[f1, f2], picker)?;
    trace.measure(format!("merge_count(n={})", count.n), count.probability);

    let mut parity_branch = None;
    if count.n == 1 {
        match model {
            MergeModel::WhichPathErasure => {
                parity_branch = Some(project_erased_arm(state, f1, f2, picker, trace)?);
            }
            MergeModel::BareDephasing => {
                // The arm is resolved: a projective which-path measurement.
                let arm = state.measure_total_occupancy(&[f1], picker)?;
                trace.measure(format!("which_path(f1={})", arm.n), arm.probability);
            }
        }
    }

    state.reset_mode(f1)?;
    state.reset_mode(f2)?;
    trace.correct("discard_flying");

    Ok(EgOutcome {
        atom_count: count.n,
        parity_branch,
        success: count.n == 1,
    })
}

/// Project the single-atom flying sector onto (|01> +/- |10>)/sqrt(2) and
/// drop the flying factor. The two branch probabilities add to 1 within the
/// single-count sector.
fn project_erased_arm(
    state: &mut StateVector,
    f1: usize,
    f2: usize,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<ParityBranch> {
    let bit1 = 1usize << (f1 - 1);
    let bit2 = 1usize << (f2 - 1);
    let s = FRAC_1_SQRT_2;

    let dim = state.dim();
    let mut sym = vec![Complex64::new(0.0, 0.0); dim];
    let mut anti = vec![Complex64::new(0.0, 0.0); dim];
    let mut p_sym = 0.0;
    let mut p_anti = 0.0;
    for r in 0..dim {
        if r & (bit1 | bit2) != 0 {
            continue;
        }
        let a01 = state.amp(r | bit2); // atom in arm 2
        let a10 = state.amp(r | bit1); // atom in arm 1
        let cs = (a01 + a10) * s;
        let ca = (a01 - a10) * s;
        p_sym += cs.norm_sqr();
        p_anti += ca.norm_sqr();
        sym[r] = cs;
        anti[r] = ca;
    }

    let idx = picker.pick(&[p_sym, p_anti]);
    let (branch, prob, amps) = if idx == 0 {
        (ParityBranch::Symmetric, p_sym, sym)
    } else {
        (ParityBranch::Antisymmetric, p_anti, anti)
    };
    if prob < MIN_BRANCH_PROB {
        return Err(Error::ZeroProbabilityBranch { prob });
    }
    let scale = c(1.0 / prob.sqrt(), 0.0);
    let amps = amps.into_iter().map(|a| a * scale).collect();
    *state = StateVector::raw(state.space(), amps);
    trace.measure(format!("erasure({branch})"), prob);
    Ok(branch)
}

/// Deterministic correction bringing a successful attempt to
/// (|00> + |11>)/sqrt(2): a spin flip on the first qubit, plus a pi phase
/// gate when the antisymmetric branch was taken. Under the dephasing control
/// the same flip is applied (the experimenter cannot see the difference).
pub fn apply_success_correction(
    state: &mut StateVector,
    layout: &RegisterLayout,
    branch: Option<ParityBranch>,
    trace: &mut ProtocolTrace,
) -> Result<()> {
    let gates = cached_gates();
    let flip = qubit_word(layout, 1, &gates.spin_flip)?;
    state.apply_word(&flip)?;
    trace.correct("spin_flip(V1)");
    if branch == Some(ParityBranch::Antisymmetric) {
        let quarter = qubit_word(layout, 1, &gates.phase_plus)?;
        state.apply_word(&quarter)?;
        state.apply_word(&quarter)?;
        trace.correct("phase_pi(V1)");
    }
    Ok(())
}

/// One full EG attempt from the vacuum.
#[derive(Debug, Clone)]
pub struct EgRun {
    pub outcome: EgOutcome,
    pub state: StateVector,
    pub trace: ProtocolTrace,
}

/// Run one attempt of the entanglement-generation protocol with collision
/// phase `theta` (the protocol proper uses `theta = pi`).
pub fn entanglement_generation(
    theta: f64,
    model: MergeModel,
    picker: &mut dyn OutcomePicker,
) -> Result<EgRun> {
    let layout = eg_layout();
    let mut state = StateVector::vacuum(layout.space()?);
    let mut trace = ProtocolTrace::new();

    for (f, v) in [(1usize, 1usize), (2, 2)] {
        split_flying(&mut state, &layout, f, &mut trace)?;
        entangle_flying_vortex(&mut state, &layout, f, v, theta, &mut trace)?;
    }
    let outcome = merge_and_count(&mut state, &layout, model, picker, &mut trace)?;
    if outcome.success {
        apply_success_correction(&mut state, &layout, outcome.parity_branch, &mut trace)?;
    }

    Ok(EgRun {
        outcome,
        state,
        trace,
    })
}

/// |<Bell|psi>|^2 of the logical content of two vortex qubits against
/// (|00> + |11>)/sqrt(2). Errors if the state has leaked out of the encoding.
pub fn bell_state_fidelity(
    state: &StateVector,
    layout: &RegisterLayout,
    a: usize,
    b: usize,
) -> Result<f64> {
    let ex = extract_logical(
        state,
        layout,
        &[RegisterRef::Vortex(a), RegisterRef::Vortex(b)],
    )?;
    if ex.leakage > crate::encoding::LEAKAGE_TOL {
        return Err(Error::Leakage(ex.leakage));
    }
    let overlap = (ex.amplitudes[0] + ex.amplitudes[3]) * FRAC_1_SQRT_2;
    Ok(overlap.norm_sqr())
}

/// The collision phase used by the protocol proper.
pub const EG_THETA: f64 = PI;

/// Exact merge-count distribution of a fresh attempt, read off the state
/// just before the detector collapses it: [1/4, 1/2, 1/4] at `theta = pi`.
pub fn merge_count_distribution(theta: f64) -> Result<Vec<f64>> {
    let layout = eg_layout();
    let mut state = StateVector::vacuum(layout.space()?);
    let mut trace = ProtocolTrace::new();
    for (f, v) in [(1usize, 1usize), (2, 2)] {
        split_flying(&mut state, &layout, f, &mut trace)?;
        entangle_flying_vortex(&mut state, &layout, f, v, theta, &mut trace)?;
    }
    state.occupancy_distribution(&[layout.flying_mode(1)?, layout.flying_mode(2)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::measure::{BornSampler, ForcedOutcomes};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_arm_produces_flying_vortex_bell_pair() {
        let layout = eg_layout();
        let mut state = StateVector::vacuum(layout.space().unwrap());
        let mut trace = ProtocolTrace::new();
        split_flying(&mut state, &layout, 1, &mut trace).unwrap();
        entangle_flying_vortex(&mut state, &layout, 1, 1, PI, &mut trace).unwrap();

        let ex = extract_logical(
            &state,
            &layout,
            &[RegisterRef::Flying(1), RegisterRef::Vortex(1)],
        )
        .unwrap();
        assert!(ex.leakage < 1e-12);
        // (|00> + |11>)/sqrt(2) up to a global phase
        let s = FRAC_1_SQRT_2;
        let overlap =
            (ex.amplitudes[0].conj() * c(s, 0.0) + ex.amplitudes[3].conj() * c(s, 0.0)).norm();
        assert!((overlap - 1.0).abs() < 1e-12, "overlap {overlap}");
        assert!(ex.amplitudes[1].norm() < 1e-12);
        assert!(ex.amplitudes[2].norm() < 1e-12);
    }

    #[test]
    fn zero_collision_phase_leaves_a_product() {
        let layout = eg_layout();
        let mut state = StateVector::vacuum(layout.space().unwrap());
        let mut trace = ProtocolTrace::new();
        split_flying(&mut state, &layout, 1, &mut trace).unwrap();
        entangle_flying_vortex(&mut state, &layout, 1, 1, 0.0, &mut trace).unwrap();
        let ex = extract_logical(
            &state,
            &layout,
            &[RegisterRef::Flying(1), RegisterRef::Vortex(1)],
        )
        .unwrap();
        assert!(ex.leakage < 1e-12);
        // |+>_F |0>_V: vortex untouched
        let s = FRAC_1_SQRT_2;
        assert!((ex.amplitudes[0].norm() - s).abs() < 1e-12);
        assert!((ex.amplitudes[2].norm() - s).abs() < 1e-12);
        assert!(ex.amplitudes[1].norm() < 1e-12);
        assert!(ex.amplitudes[3].norm() < 1e-12);
    }

    #[test]
    fn merge_branch_probabilities_are_quarter_half_quarter() {
        for (n, want_p) in [(0usize, 0.25), (1, 0.5), (2, 0.25)] {
            let mut picker = if n == 1 {
                ForcedOutcomes::new([n, 0])
            } else {
                ForcedOutcomes::new([n])
            };
            let run =
                entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
            assert_eq!(run.outcome.atom_count, n);
            assert_eq!(run.outcome.success, n == 1);
            let merge = run
                .trace
                .records()
                .iter()
                .find(|r| r.detail.starts_with("merge_count"))
                .unwrap();
            assert_eq!(merge.step, 9); // eight gates, then the count
            assert!((merge.prob - want_p).abs() < 1e-12, "n={n}: {}", merge.prob);
        }
    }

    #[test]
    fn failed_attempts_leave_definite_products() {
        let layout = eg_layout();
        for (n, want_bits) in [(0usize, 0b00usize), (2, 0b11)] {
            let mut picker = ForcedOutcomes::new([n]);
            let run =
                entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
            let ex = extract_logical(
                &run.state,
                &layout,
                &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
            )
            .unwrap();
            assert!(ex.leakage < 1e-12);
            for (idx, a) in ex.amplitudes.iter().enumerate() {
                let want = if idx == want_bits { 1.0 } else { 0.0 };
                assert!((a.norm() - want).abs() < 1e-12, "n={n} idx={idx}");
            }
        }
    }

    #[test]
    fn both_success_branches_end_in_the_bell_state() {
        let layout = eg_layout();
        for branch in [0usize, 1] {
            let mut picker = ForcedOutcomes::new([1, branch]);
            let run =
                entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
            assert!(run.outcome.success);
            let want = if branch == 0 {
                Some(ParityBranch::Symmetric)
            } else {
                Some(ParityBranch::Antisymmetric)
            };
            assert_eq!(run.outcome.parity_branch, want);
            // Each success path: 1/2 (count) * 1/2 (erasure branch)
            assert!((run.trace.path_probability() - 0.25).abs() < 1e-12);
            let fid = bell_state_fidelity(&run.state, &layout, 1, 2).unwrap();
            assert!((fid - 1.0).abs() < 1e-12, "branch {branch}: fidelity {fid}");
        }
    }

    #[test]
    fn erasure_branches_split_evenly() {
        for branch in [0usize, 1] {
            let mut picker = ForcedOutcomes::new([1, branch]);
            let run =
                entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
            let erasure = run
                .trace
                .records()
                .iter()
                .find(|r| r.detail.starts_with("erasure"))
                .unwrap();
            assert!((erasure.prob - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dephasing_control_yields_classical_correlations() {
        let layout = eg_layout();
        for arm in [0usize, 1] {
            // count = 1, then the which-path record picks the arm
            let mut picker = ForcedOutcomes::new([1, arm]);
            let run = entanglement_generation(PI, MergeModel::BareDephasing, &mut picker).unwrap();
            assert!(run.outcome.success);
            assert_eq!(run.outcome.parity_branch, None);
            let ex = extract_logical(
                &run.state,
                &layout,
                &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
            )
            .unwrap();
            assert!(ex.leakage < 1e-12);
            // A definite |00> or |11> depending on the resolved arm: perfectly
            // correlated but never entangled.
            let weights: Vec<f64> = ex.amplitudes.iter().map(|a| a.norm_sqr()).collect();
            assert!(weights[1] < 1e-24 && weights[2] < 1e-24);
            assert!((weights[0] + weights[3] - 1.0).abs() < 1e-12);
            assert!(weights[0] < 1e-24 || weights[3] < 1e-24);
        }
    }

    #[test]
    fn sampled_success_fraction_matches_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 4000;
        let mut successes = 0usize;
        for _ in 0..trials {
            let mut picker = BornSampler::new(&mut rng);
            let run =
                entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
            if run.outcome.success {
                successes += 1;
            }
        }
        let frac = successes as f64 / trials as f64;
        // 5 sigma at 4000 trials
        assert!(
            (frac - 0.5).abs() < 5.0 * 0.5 / (trials as f64).sqrt(),
            "{frac}"
        );
    }

    #[test]
    fn trace_probabilities_multiply_along_the_path() {
        let mut picker = ForcedOutcomes::new([1, 1]);
        let run = entanglement_generation(PI, MergeModel::WhichPathErasure, &mut picker).unwrap();
        let manual: f64 = run
            .trace
            .records()
            .iter()
            .filter(|r| r.kind == super::super::StepKind::Measure)
            .map(|r| r.prob)
            .product();
        assert!((run.trace.path_probability() - manual).abs() < 1e-15);
        for r in run.trace.records() {
            assert!(r.prob > 0.0 && r.prob <= 1.0);
        }
    }
}
