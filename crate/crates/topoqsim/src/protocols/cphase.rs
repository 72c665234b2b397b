//! Deterministic two-qubit controlled phase from parity measurements.
//!
//! Two vortex qubits G (Majoranas 1..=4) and Q (5..=8) plus one ancilla pair
//! W (9, 10), prepared empty — the protocol checks that availability on
//! entry and restores it on exit. The four-Majorana parity of
//! (G1, G2, Q2, W1) is measured first (outcome nu), then the two-Majorana
//! parity of (Q1, W1) (outcome mu); both are fair coins on any W-empty
//! state. A recovery exchange on (Q1, W2) with chirality mu — plus one
//! double twist on each of G and Q when mu != nu — makes every branch act as
//! the same entangling gate exp(i pi gG1 gG2 gQ1 gQ2 / 4), and a final
//! quarter-phase braid word on each qubit turns that into
//! diag(1, 1, 1, -1) = CZ on the logical basis, up to a global phase.
//!
//! The pair parity can be measured projectively or through fusion: first
//! rotate W2 into the (Q1, W1) plane with one exchange, fuse the W pair,
//! recreate it empty, flip it back to the fused occupancy, and undo the
//! exchange. The two routes agree branch by branch, in probability and in
//! post-state, exactly.

use super::eg::merge_count_distribution;
use super::{cached_gates, qubit_word, ProtocolTrace};
use crate::clifford::decomposition::PairLayout;
use crate::clifford::measure::{ForcedOutcomes, MeasurementOutcome, OutcomePicker};
use crate::clifford::space::StateVector;
use crate::clifford::unitary::Exchange;
use crate::collision::{tunneling_phase_gate, TunnelingProfile, HBAR};
use crate::encoding::{logical_gate_of, RegisterLayout, RegisterRef};
use crate::error::{Error, Result};
use crate::linalg::{c, qubit, CMatrix};
use std::f64::consts::{FRAC_PI_4, PI};

/// How the two-Majorana parity is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMeasurementMode {
    /// Direct projective measurement of -i gQ1 gW1.
    Projective,
    /// Exchange (Q1, W2), fuse the W pair, recreate and flip, undo the
    /// exchange: the only parity probe available to a fusion detector.
    BasisTransform,
}

/// Register and pair labels for the two-qubit gate.
#[derive(Debug, Clone, Copy)]
pub struct CphaseLayout {
    pub registers: RegisterLayout,
    pub pairs: PairLayout,
}

pub fn cphase_layout() -> CphaseLayout {
    CphaseLayout {
        registers: RegisterLayout::new(2, 1, 0).expect("5 modes fit"),
        pairs: PairLayout::two_qubit(),
    }
}

/// Measure the four-Majorana parity gG1 gG2 gQ2 gW1 projectively.
pub fn quad_parity_projective(
    state: &mut StateVector,
    pairs: &PairLayout,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<MeasurementOutcome> {
    let out = state.measure_parity(&pairs.o4()?, picker)?;
    trace.measure(format!("quad_parity(nu={:+})", out.value), out.probability);
    Ok(out)
}

/// Measure the pair parity -i gQ1 gW1 projectively.
pub fn pair_parity_projective(
    state: &mut StateVector,
    pairs: &PairLayout,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<MeasurementOutcome> {
    let out = state.measure_parity(&pairs.o2()?, picker)?;
    trace.measure(format!("pair_parity(mu={:+})", out.value), out.probability);
    Ok(out)
}

/// Measure the same pair parity through fusion of the W pair. The exchange
/// V = exp(pi gQ1 gW2 / 4) rotates the W-pair parity onto -i gQ1 gW1, so
/// fusing W after V and undoing V afterwards is the identical measurement
/// channel: same outcome distribution, same post-state, branch by branch.
pub fn pair_parity_by_fusion(
    state: &mut StateVector,
    pairs: &PairLayout,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<MeasurementOutcome> {
    // exp(pi gQ1 gW2 / 4); Exchange stores exp(s pi g_j g_i / 4) with i < j,
    // so s = -1 here.
    let v = Exchange::new(pairs.q.0, pairs.w.1, -1)?;
    state.apply_exchange(&v)?;
    trace.gate("exchange(Q1,W2,-)");

    let fused = state.fuse(pairs.w.0, pairs.w.1, picker)?;
    trace.measure(
        format!("fuse_ancilla(n={})", usize::from(fused.value < 0)),
        fused.probability,
    );

    // The fused pair is discarded and a fresh one nucleated empty ...
    state.reset_mode(pairs.w_mode())?;
    trace.correct("recreate_ancilla");
    // ... and flipped back to the recorded occupancy, so the inverse
    // exchange reconstructs the projected state exactly.
    if fused.value < 0 {
        state.set_mode(pairs.w_mode())?;
        trace.correct("flip_ancilla");
    }

    state.apply_exchange(&v.inverse())?;
    trace.gate("exchange(Q1,W2,+)");
    Ok(fused)
}

/// Record of one controlled-phase run.
#[derive(Debug, Clone)]
pub struct CphaseRecord {
    /// Four-Majorana parity outcome (first measurement).
    pub quad: MeasurementOutcome,
    /// Pair parity outcome (second measurement).
    pub pair: MeasurementOutcome,
    pub recovery: Vec<Exchange>,
}

/// Run the full measurement-based gate on `state`: measurements, recovery,
/// and the final quarter-phase words. Every branch realizes
/// diag(1, 1, 1, -1) on the (G, Q) logical basis up to a global phase, and
/// the ancilla ends empty. The W pair must be available (empty) on entry —
/// its parity with half of Q is what the EG-style fusion hardware measures.
pub fn controlled_phase_sigma_z(
    state: &mut StateVector,
    cl: &CphaseLayout,
    mode: PairMeasurementMode,
    picker: &mut dyn OutcomePicker,
    trace: &mut ProtocolTrace,
) -> Result<CphaseRecord> {
    cl.pairs.validate()?;
    let w_occ = state.mean_occupancy(cl.pairs.w_mode())?;
    if w_occ > 1e-9 {
        return Err(Error::AncillaNotReset(w_occ));
    }

    // Four-Majorana parity first: measured second it would leave a W-flip
    // term no single exchange can cancel, branch independence is the
    // arbiter here.
    let quad = quad_parity_projective(state, &cl.pairs, picker, trace)?;
    let pair = match mode {
        PairMeasurementMode::Projective => pair_parity_projective(state, &cl.pairs, picker, trace)?,
        PairMeasurementMode::BasisTransform => {
            pair_parity_by_fusion(state, &cl.pairs, picker, trace)?
        }
    };

    let nu = quad.value;
    let mu = pair.value;
    let mut recovery = Vec::new();
    // (1 + mu gQ1 gW2)/sqrt(2), stored sign -mu for the same reason as in
    // pair_parity_by_fusion.
    let fix = Exchange::new(cl.pairs.q.0, cl.pairs.w.1, -mu)?;
    state.apply_exchange(&fix)?;
    trace.correct(format!(
        "exchange(Q1,W2,{})",
        if mu > 0 { '-' } else { '+' }
    ));
    recovery.push(fix);
    if mu != nu {
        for (pair_maj, label) in [(cl.pairs.g, "G"), (cl.pairs.q, "Q")] {
            let tw = Exchange::new(pair_maj.0, pair_maj.1, 1)?;
            state.apply_exchange(&tw)?;
            state.apply_exchange(&tw)?;
            trace.correct(format!("double_twist({label})"));
            recovery.push(tw);
            recovery.push(tw);
        }
    }

    // Local quarter phases turn exp(i pi Gamma / 4) into CZ (mod phase).
    let minus = &cached_gates().phase_minus;
    for q in [1usize, 2] {
        state.apply_word(&qubit_word(&cl.registers, q, minus)?)?;
        trace.gate(format!("braid_quarter_phase(V{q},-)"));
    }

    let w_residual = state.mean_occupancy(cl.pairs.w_mode())?;
    if w_residual > 1e-9 {
        return Err(Error::AncillaNotReset(w_residual));
    }

    Ok(CphaseRecord {
        quad,
        pair,
        recovery,
    })
}

/// Logical action of one forced (nu, mu) branch on the two-qubit basis.
pub fn logical_controlled_phase(mode: PairMeasurementMode, nu: i8, mu: i8) -> Result<CMatrix> {
    let cl = cphase_layout();
    logical_gate_of(
        &cl.registers,
        &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
        |psi| {
            let mut picker = ForcedOutcomes::from_signs([nu, mu]);
            let mut trace = ProtocolTrace::new();
            controlled_phase_sigma_z(psi, &cl, mode, &mut picker, &mut trace).map(|_| ())
        },
    )
}

/// The logical target: diag(1, 1, 1, -1).
pub fn cz_matrix() -> CMatrix {
    let mut m = CMatrix::identity(4);
    m[(3, 3)] = c(-1.0, 0.0);
    m
}

/// Residuals certifying the universal gate set: the braided Hadamard, the
/// tunneling-calibrated eighth phase, and the measurement-based controlled
/// phase, plus the exact EG resource statistics the pipeline relies on.
#[derive(Debug, Clone, Copy)]
pub struct UniversalSetReport {
    /// Braid-word Hadamard vs the exact gate (mod phase).
    pub hadamard_residual: f64,
    /// Tunneling gate at the quarter-pi working point vs diag(1, e^{i pi/4}).
    pub eighth_phase_residual: f64,
    /// Eighth power of the tunneling gate vs the identity (mod phase).
    pub eighth_phase_period_residual: f64,
    /// Worst branch of the controlled phase vs CZ (mod phase), over both
    /// pair-measurement routes.
    pub controlled_phase_residual: f64,
    /// Worst commutator norm of a controlled-phase branch with sigma_z x I
    /// and I x sigma_z.
    pub pauli_commutation_residual: f64,
    /// Exact single-count probability of one EG attempt.
    pub eg_success_probability: f64,
}

pub fn universal_set_report() -> Result<UniversalSetReport> {
    let layout1 = RegisterLayout::new(1, 0, 0)?;
    let h_word = qubit_word(&layout1, 1, &cached_gates().hadamard)?;
    let h = logical_gate_of(&layout1, &[RegisterRef::Vortex(1)], |psi| {
        psi.apply_word(&h_word)
    })?;
    let hadamard_residual = h.phase_aligned_distance(&qubit::hadamard());

    // Tunneling gate at the closed-form working point.
    let t_p = 1e-3;
    let profile = TunnelingProfile::Constant {
        energy: HBAR * PI / (8.0 * t_p),
    };
    let (u, _) = tunneling_phase_gate(&profile, t_p, 1e-10)?;
    let eighth_phase_residual = u.phase_aligned_distance(&qubit::phase(FRAC_PI_4));
    let mut period = CMatrix::identity(2);
    for _ in 0..8 {
        period = u.mul(&period);
    }
    let eighth_phase_period_residual = period.phase_aligned_distance(&CMatrix::identity(2));

    let target = cz_matrix();
    let paulis = [
        qubit::sigma_z().kron(&qubit::identity()),
        qubit::identity().kron(&qubit::sigma_z()),
    ];
    let mut controlled_phase_residual: f64 = 0.0;
    let mut pauli_commutation_residual: f64 = 0.0;
    for mode in [
        PairMeasurementMode::Projective,
        PairMeasurementMode::BasisTransform,
    ] {
        for nu in [1i8, -1] {
            for mu in [1i8, -1] {
                let m = logical_controlled_phase(mode, nu, mu)?;
                controlled_phase_residual =
                    controlled_phase_residual.max(m.phase_aligned_distance(&target));
                for p in &paulis {
                    let comm = m.mul(p).add(&p.mul(&m).scale(c(-1.0, 0.0)));
                    pauli_commutation_residual = pauli_commutation_residual.max(comm.norm());
                }
            }
        }
    }

    let eg_success_probability = merge_count_distribution(PI)?[1];

    Ok(UniversalSetReport {
        hadamard_residual,
        eighth_phase_residual,
        eighth_phase_period_residual,
        controlled_phase_residual,
        pauli_commutation_residual,
        eg_success_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::measure::BornSampler;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_logical_state(seed: u64) -> StateVector {
        let cl = cphase_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        let mut norm = 0.0;
        for a in amps.iter_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            norm += a.norm_sqr();
        }
        let norm = norm.sqrt();
        let space = cl.registers.space().unwrap();
        let mut full = vec![Complex64::new(0.0, 0.0); space.dim()];
        for (bits, a) in amps.iter().enumerate() {
            // logical (G, Q) -> physical modes (1,2) and (3,4)
            let mut b = 0usize;
            if bits & 0b10 != 0 {
                b |= 0b0011;
            }
            if bits & 0b01 != 0 {
                b |= 0b1100;
            }
            full[b] = a / norm;
        }
        StateVector::from_amplitudes(space, full).unwrap()
    }

    #[test]
    fn layout_labels_agree() {
        let cl = cphase_layout();
        let vm1 = cl.registers.vortex_majoranas(1).unwrap();
        let vm2 = cl.registers.vortex_majoranas(2).unwrap();
        assert_eq!(cl.pairs.g, (vm1[0], vm1[1]));
        assert_eq!(cl.pairs.q, (vm2[0], vm2[1]));
        assert_eq!(cl.pairs.w, cl.registers.ancilla_majoranas(1).unwrap());
    }

    #[test]
    fn fusion_route_equals_projective_route_branch_by_branch() {
        let cl = cphase_layout();
        for seed in 0..8u64 {
            let psi = random_logical_state(seed);
            for mu in [1i8, -1] {
                let mut a = psi.clone();
                let mut ta = ProtocolTrace::new();
                let mut pa = ForcedOutcomes::from_signs([mu]);
                let oa = pair_parity_projective(&mut a, &cl.pairs, &mut pa, &mut ta).unwrap();

                let mut b = psi.clone();
                let mut tb = ProtocolTrace::new();
                let mut pb = ForcedOutcomes::from_signs([mu]);
                let ob = pair_parity_by_fusion(&mut b, &cl.pairs, &mut pb, &mut tb).unwrap();

                assert_eq!(oa.value, ob.value);
                assert!((oa.probability - ob.probability).abs() < 1e-12);
                // identical post-states, not just mod phase
                let dist: f64 = a
                    .amplitudes()
                    .iter()
                    .zip(b.amplitudes())
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(dist < 1e-12, "seed {seed} mu {mu}: {dist}");
            }
        }
    }

    #[test]
    fn fusion_route_records_the_narrative_steps() {
        let cl = cphase_layout();
        let psi = random_logical_state(3);
        // occupied branch: fuse finds the pair occupied, so the flip appears
        let mut b = psi.clone();
        let mut trace = ProtocolTrace::new();
        let mut picker = ForcedOutcomes::from_signs([-1]);
        pair_parity_by_fusion(&mut b, &cl.pairs, &mut picker, &mut trace).unwrap();
        let details: Vec<&str> = trace.records().iter().map(|r| r.detail.as_str()).collect();
        assert_eq!(
            details,
            [
                "exchange(Q1,W2,-)",
                "fuse_ancilla(n=1)",
                "recreate_ancilla",
                "flip_ancilla",
                "exchange(Q1,W2,+)"
            ]
        );
    }

    #[test]
    fn every_branch_realizes_cz_mod_phase() {
        let target = cz_matrix();
        for mode in [
            PairMeasurementMode::Projective,
            PairMeasurementMode::BasisTransform,
        ] {
            for nu in [1i8, -1] {
                for mu in [1i8, -1] {
                    let m = logical_controlled_phase(mode, nu, mu).unwrap();
                    let d = m.phase_aligned_distance(&target);
                    assert!(d < 1e-10, "mode {mode:?} branch ({nu},{mu}): {d}");
                }
            }
        }
    }

    #[test]
    fn branches_are_fair_coins_on_logical_inputs() {
        let cl = cphase_layout();
        for seed in 0..4u64 {
            let psi = random_logical_state(seed);
            for nu in [1i8, -1] {
                for mu in [1i8, -1] {
                    let mut state = psi.clone();
                    let mut trace = ProtocolTrace::new();
                    let mut picker = ForcedOutcomes::from_signs([nu, mu]);
                    let rec = controlled_phase_sigma_z(
                        &mut state,
                        &cl,
                        PairMeasurementMode::Projective,
                        &mut picker,
                        &mut trace,
                    )
                    .unwrap();
                    assert!((rec.quad.probability - 0.5).abs() < 1e-12);
                    assert!((rec.pair.probability - 0.5).abs() < 1e-12);
                    assert!((trace.path_probability() - 0.25).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampled_runs_agree_with_direct_cz() {
        let cl = cphase_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..6u64 {
            let psi = random_logical_state(seed);
            // direct CZ on the logical amplitudes
            let mut want = psi.clone();
            let (m1, _) = cl.registers.vortex_modes(1).unwrap();
            let (m2, _) = cl.registers.vortex_modes(2).unwrap();
            want.apply_controlled_phase(m1, m2, PI).unwrap();

            let mut got = psi.clone();
            let mut picker = BornSampler::new(&mut rng);
            let mut trace = ProtocolTrace::new();
            controlled_phase_sigma_z(
                &mut got,
                &cl,
                PairMeasurementMode::BasisTransform,
                &mut picker,
                &mut trace,
            )
            .unwrap();
            let d = got.phase_aligned_distance(&want);
            assert!(d < 1e-10, "seed {seed}: {d}");
        }
    }

    #[test]
    fn rejects_an_unavailable_ancilla() {
        let cl = cphase_layout();
        let space = cl.registers.space().unwrap();
        let mut psi = StateVector::basis_state(space, 0b10000).unwrap();
        let mut picker = ForcedOutcomes::from_signs([1, 1]);
        let mut trace = ProtocolTrace::new();
        let err = controlled_phase_sigma_z(
            &mut psi,
            &cl,
            PairMeasurementMode::Projective,
            &mut picker,
            &mut trace,
        )
        .unwrap_err();
        assert!(matches!(err, Error::AncillaNotReset(_)));
    }

    #[test]
    fn universal_report_certifies_the_gate_set() {
        let rep = universal_set_report().unwrap();
        assert!(rep.hadamard_residual < 1e-12, "{}", rep.hadamard_residual);
        assert!(rep.eighth_phase_residual < 1e-9);
        assert!(rep.eighth_phase_period_residual < 1e-9);
        assert!(rep.controlled_phase_residual < 1e-10);
        assert!(rep.pauli_commutation_residual < 1e-10);
        assert!((rep.eg_success_probability - 0.5).abs() < 1e-12);
    }
}
