//! Negative controls: braiding alone never entangles two vortex qubits.
//!
//! Exchanges conjugate Majoranas to signed Majoranas, so any braid word that
//! maps the two-qubit code space to itself acts there as a (possibly
//! swapping) product of single-qubit gates — on a product logical input the
//! output stays a product, Schmidt rank 1. Words that leave the code space
//! are excluded by the leakage filter, not counted as evidence. The
//! entanglement in this machine has to come from somewhere else: the
//! collision phase (EG) or the parity measurements (the controlled phase).

use crate::clifford::space::StateVector;
use crate::clifford::unitary::{BraidWord, Exchange};
use crate::encoding::{extract_logical, schmidt_values, RegisterLayout, RegisterRef, LEAKAGE_TOL};
use crate::error::Result;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniformly random braid word: each letter exchanges a random Majorana
/// pair out of `n_majoranas` with random chirality.
pub fn random_braid_word(rng: &mut impl Rng, len: usize, n_majoranas: usize) -> BraidWord {
    let mut word = BraidWord::empty();
    for _ in 0..len {
        let i = rng.gen_range(1..=n_majoranas);
        let j = loop {
            let j = rng.gen_range(1..=n_majoranas);
            if j != i {
                break j;
            }
        };
        let sign = if rng.gen::<bool>() { 1 } else { -1 };
        word.push(Exchange::new(i, j, sign).expect("distinct indices"));
    }
    word
}

/// A balanced inter-qubit composite: two squared cross-qubit exchanges.
/// Each square flips both qubit parities, so the pair restores them — the
/// word is guaranteed logical, and acts as a Pauli product.
pub fn balanced_inter_qubit_word(rng: &mut impl Rng) -> BraidWord {
    let mut word = BraidWord::empty();
    for _ in 0..2 {
        let i = rng.gen_range(1..=4);
        let j = rng.gen_range(5..=8);
        let sign = if rng.gen::<bool>() { 1 } else { -1 };
        let ex = Exchange::new(i, j, sign).expect("distinct indices");
        word.push(ex);
        word.push(ex);
    }
    word
}

/// Haar-ish random product state |a> x |b> on two vortex qubits.
pub fn random_product_logical_state(
    rng: &mut impl Rng,
    layout: &RegisterLayout,
) -> Result<StateVector> {
    let mut coeff = || {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        loop {
            let mut n = 0.0;
            for a in v.iter_mut() {
                *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                n += a.norm_sqr();
            }
            if n > 1e-4 {
                let n = n.sqrt();
                for a in v.iter_mut() {
                    *a /= n;
                }
                return v;
            }
        }
    };
    let a = coeff();
    let b = coeff();
    let space = layout.space()?;
    let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
    for v1 in 0..2usize {
        for v2 in 0..2usize {
            let mut bits = 0usize;
            if v1 == 1 {
                bits |= 0b0011;
            }
            if v2 == 1 {
                bits |= 0b1100;
            }
            amps[bits] = a[v1] * b[v2];
        }
    }
    StateVector::from_amplitudes(space, amps)
}

#[derive(Debug, Clone, Copy)]
pub struct NoEntanglementReport {
    /// Words that stayed in the code space and were checked.
    pub words_checked: usize,
    /// Words excluded by the leakage filter.
    pub words_leaky: usize,
    /// Largest second Schmidt coefficient seen over all checked words.
    pub max_second_singular_value: f64,
    /// Largest leakage seen among the checked (non-excluded) words.
    pub max_leakage: f64,
}

/// Apply random braid words (length <= `max_len`, all 8 Majoranas fair game)
/// to random product logical states and measure the entanglement of every
/// run that stays in the code space.
pub fn braiding_only_schmidt_check(
    n_words: usize,
    max_len: usize,
    seed: u64,
) -> Result<NoEntanglementReport> {
    let layout = RegisterLayout::new(2, 0, 0)?;
    let n_majoranas = layout.space()?.n_majoranas();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = NoEntanglementReport {
        words_checked: 0,
        words_leaky: 0,
        max_second_singular_value: 0.0,
        max_leakage: 0.0,
    };
    for _ in 0..n_words {
        let len = rng.gen_range(1..=max_len);
        let word = random_braid_word(&mut rng, len, n_majoranas);
        let mut psi = random_product_logical_state(&mut rng, &layout)?;
        psi.apply_word(&word)?;
        let ex = extract_logical(
            &psi,
            &layout,
            &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
        )?;
        if ex.leakage > LEAKAGE_TOL {
            report.words_leaky += 1;
            continue;
        }
        let (_, s2) = schmidt_values(&ex.amplitudes);
        report.words_checked += 1;
        report.max_second_singular_value = report.max_second_singular_value.max(s2);
        report.max_leakage = report.max_leakage.max(ex.leakage);
    }
    Ok(report)
}

/// Same check restricted to constructed balanced composites, which are
/// logical by construction: nothing may be excluded here.
pub fn balanced_composite_schmidt_check(n_words: usize, seed: u64) -> Result<NoEntanglementReport> {
    let layout = RegisterLayout::new(2, 0, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = NoEntanglementReport {
        words_checked: 0,
        words_leaky: 0,
        max_second_singular_value: 0.0,
        max_leakage: 0.0,
    };
    for _ in 0..n_words {
        let word = balanced_inter_qubit_word(&mut rng);
        let mut psi = random_product_logical_state(&mut rng, &layout)?;
        psi.apply_word(&word)?;
        let ex = extract_logical(
            &psi,
            &layout,
            &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
        )?;
        assert!(
            ex.leakage < LEAKAGE_TOL,
            "balanced composite leaked: {}",
            ex.leakage
        );
        let (_, s2) = schmidt_values(&ex.amplitudes);
        report.words_checked += 1;
        report.max_second_singular_value = report.max_second_singular_value.max(s2);
        report.max_leakage = report.max_leakage.max(ex.leakage);
    }
    Ok(report)
}

/// Entanglement of the logical content of (V1, V2): the second Schmidt
/// coefficient, zero for products.
pub fn second_schmidt_value(state: &StateVector, layout: &RegisterLayout) -> Result<f64> {
    let ex = extract_logical(
        state,
        layout,
        &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
    )?;
    Ok(schmidt_values(&ex.amplitudes).1)
}

/// The positive control: the EG success state is maximally entangled, so the
/// Schmidt machinery itself is verified against both extremes.
pub fn eg_state_schmidt_values() -> Result<(f64, f64)> {
    let mut picker = crate::clifford::measure::ForcedOutcomes::new([1usize, 0]);
    let run = super::eg::entanglement_generation(
        super::eg::EG_THETA,
        super::eg::MergeModel::WhichPathErasure,
        &mut picker,
    )?;
    let ex = extract_logical(
        &run.state,
        &super::eg::eg_layout(),
        &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
    )?;
    Ok(schmidt_values(&ex.amplitudes))
}
