//! Projective measurements with pluggable outcome selection.
//!
//! Every measurement collapses the state in place and reports the branch
//! probability. Outcome selection goes through [`OutcomePicker`] so the same
//! protocol code can run sampled (Born rule) or steered down a chosen branch
//! (for exhaustive verification of every measurement record).

use super::operator::ParityObservable;
use super::space::StateVector;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::collections::VecDeque;

/// Smallest branch probability we are willing to project onto. Below this,
/// forcing the branch is an error rather than a renormalization of noise.
pub(crate) const MIN_BRANCH_PROB: f64 = 1e-14;

pub trait OutcomePicker {
    /// Choose an index into `probs` (entries sum to 1).
    fn pick(&mut self, probs: &[f64]) -> usize;
}

/// Samples measurement outcomes from the Born distribution.
pub struct BornSampler<R: Rng> {
    rng: R,
}

impl<R: Rng> BornSampler<R> {
    pub fn new(rng: R) -> Self {
        BornSampler { rng }
    }
}

impl<R: Rng> OutcomePicker for BornSampler<R> {
    fn pick(&mut self, probs: &[f64]) -> usize {
        let r: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (idx, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return idx;
            }
        }
        probs.len() - 1
    }
}

/// Replays a fixed outcome sequence; used to walk every branch of a protocol.
/// Panics if the queue runs dry — that is a test logic error, not a runtime
/// condition.
#[derive(Debug, Clone, Default)]
pub struct ForcedOutcomes {
    queue: VecDeque<usize>,
}

impl ForcedOutcomes {
    pub fn new(outcomes: impl IntoIterator<Item = usize>) -> Self {
        ForcedOutcomes {
            queue: outcomes.into_iter().collect(),
        }
    }

    /// Convenience for +/-1-valued branches: +1 maps to index 0, -1 to 1.
    pub fn from_signs(signs: impl IntoIterator<Item = i8>) -> Self {
        ForcedOutcomes {
            queue: signs
                .into_iter()
                .map(|s| {
                    assert!(s == 1 || s == -1);
                    usize::from(s < 0)
                })
                .collect(),
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.queue.is_empty()
    }
}

impl OutcomePicker for ForcedOutcomes {
    fn pick(&mut self, probs: &[f64]) -> usize {
        let idx = self
            .queue
            .pop_front()
            .expect("forced outcome queue exhausted");
        assert!(idx < probs.len(), "forced outcome {idx} out of range");
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    /// Measured parity eigenvalue, +1 or -1.
    pub value: i8,
    /// Born probability of the branch that was taken.
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyOutcome {
    /// Total number of particles found in the measured modes.
    pub n: usize,
    /// Born probability of the branch that was taken.
    pub probability: f64,
}

impl StateVector {
    /// Projectively measure a parity observable, collapsing in place.
    pub fn measure_parity(
        &mut self,
        obs: &ParityObservable,
        picker: &mut dyn OutcomePicker,
    ) -> Result<MeasurementOutcome> {
        let image = obs.apply(self)?;
        let mut p_plus = 0.0;
        let mut p_minus = 0.0;
        for (a, o) in self.amplitudes().iter().zip(image.iter()) {
            p_plus += (a + o).norm_sqr() / 4.0;
            p_minus += (a - o).norm_sqr() / 4.0;
        }
        let idx = picker.pick(&[p_plus, p_minus]);
        let (value, prob, sg) = if idx == 0 {
            (1i8, p_plus, 1.0)
        } else {
            (-1i8, p_minus, -1.0)
        };
        if prob < MIN_BRANCH_PROB {
            return Err(Error::ZeroProbabilityBranch { prob });
        }
        let scale = Complex64::new(0.5 / prob.sqrt(), 0.0);
        let amps: Vec<Complex64> = self
            .amplitudes()
            .iter()
            .zip(image.iter())
            .map(|(a, o)| (a + sg * o) * scale)
            .collect();
        *self = StateVector::raw(self.space(), amps);
        Ok(MeasurementOutcome {
            value,
            probability: prob,
        })
    }

    /// Fuse the vortex pair carrying Majoranas `i < j`: a projective
    /// measurement of the pair parity `-i g_i g_j`.
    pub fn fuse(
        &mut self,
        i: usize,
        j: usize,
        picker: &mut dyn OutcomePicker,
    ) -> Result<MeasurementOutcome> {
        self.measure_parity(&ParityObservable::pair(i, j)?, picker)
    }

    /// Born distribution of the total occupancy of the listed modes, without
    /// collapsing.
    pub fn occupancy_distribution(&self, modes: &[usize]) -> Result<Vec<f64>> {
        let mut mask = 0usize;
        for &m in modes {
            self.space().check_mode(m)?;
            mask |= 1 << (m - 1);
        }
        let mut probs = vec![0.0; modes.len() + 1];
        for (b, a) in self.amplitudes().iter().enumerate() {
            probs[(b & mask).count_ones() as usize] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Measure the total occupancy of the listed modes (a number measurement,
    /// outcome 0..=modes.len()), collapsing in place.
    pub fn measure_total_occupancy(
        &mut self,
        modes: &[usize],
        picker: &mut dyn OutcomePicker,
    ) -> Result<OccupancyOutcome> {
        let probs = self.occupancy_distribution(modes)?;
        let mut mask = 0usize;
        for &m in modes {
            mask |= 1 << (m - 1);
        }
        let n = picker.pick(&probs);
        let prob = probs[n];
        if prob < MIN_BRANCH_PROB {
            return Err(Error::ZeroProbabilityBranch { prob });
        }
        let scale = Complex64::new(1.0 / prob.sqrt(), 0.0);
        let amps: Vec<Complex64> = self
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, a)| {
                if (b & mask).count_ones() as usize == n {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        *self = StateVector::raw(self.space(), amps);
        Ok(OccupancyOutcome {
            n,
            probability: prob,
        })
    }

    /// Replace mode `m`, which must already be in a definite occupancy state,
    /// with a fresh empty mode. Models discarding a fused pair and nucleating
    /// a new one; the fresh pair carries no phase memory, so the amplitude
    /// transfer coefficient is exactly 1.
    pub fn reset_mode(&mut self, m: usize) -> Result<()> {
        let mean = self.mean_occupancy(m)?;
        if mean > 1e-9 && mean < 1.0 - 1e-9 {
            return Err(Error::IndefiniteOccupancy(mean));
        }
        if mean > 0.5 {
            let bit = 1usize << (m - 1);
            let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
            for (b, &a) in self.amplitudes().iter().enumerate() {
                if b & bit != 0 {
                    amps[b & !bit] = a;
                }
            }
            *self = StateVector::raw(self.space(), amps);
        }
        Ok(())
    }

    /// Re-prepare a definitely-empty mode as occupied, in the same fresh-pair
    /// gauge as [`StateVector::reset_mode`] (transfer coefficient exactly 1,
    /// no string signs — this is a re-preparation, not an operator). The two
    /// compose to the identity, which is what makes fuse-recreate-flip an
    /// exact reconstruction of the fused branch.
    pub fn set_mode(&mut self, m: usize) -> Result<()> {
        let mean = self.mean_occupancy(m)?;
        if mean > 1e-9 {
            return Err(Error::IndefiniteOccupancy(mean));
        }
        let bit = 1usize << (m - 1);
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (b, &a) in self.amplitudes().iter().enumerate() {
            if b & bit == 0 {
                amps[b | bit] = a;
            }
        }
        *self = StateVector::raw(self.space(), amps);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::space::FockSpace;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parity_measurement_on_eigenstate_is_deterministic() {
        let space = FockSpace::new(2).unwrap();
        let mut psi = StateVector::basis_state(space, 0b01).unwrap();
        let mut picker = BornSampler::new(ChaCha8Rng::seed_from_u64(1));
        let out = psi
            .measure_parity(&ParityObservable::pair(1, 2).unwrap(), &mut picker)
            .unwrap();
        assert_eq!(out.value, -1);
        assert!((out.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forced_zero_probability_branch_errors() {
        let space = FockSpace::new(1).unwrap();
        let mut psi = StateVector::vacuum(space);
        let mut picker = ForcedOutcomes::from_signs([-1]);
        let err = psi
            .measure_parity(&ParityObservable::pair(1, 2).unwrap(), &mut picker)
            .unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityBranch { .. }));
    }

    #[test]
    fn superposition_collapses_with_half_probability() {
        let space = FockSpace::new(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = StateVector::from_amplitudes(space, vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let mut picker = ForcedOutcomes::from_signs([-1]);
        let out = psi
            .measure_parity(&ParityObservable::pair(1, 2).unwrap(), &mut picker)
            .unwrap();
        assert_eq!(out.value, -1);
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert!((psi.amp(1) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn number_measurement_statistics() {
        // (|00> + |01> + |10> + |11>)/2: occupancy totals 0,1,2 with
        // probabilities 1/4, 1/2, 1/4.
        let space = FockSpace::new(2).unwrap();
        let mut psi = StateVector::from_amplitudes(space, vec![c(0.5, 0.0); 4]).unwrap();
        let mut picker = ForcedOutcomes::new([1usize]);
        let out = psi.measure_total_occupancy(&[1, 2], &mut picker).unwrap();
        assert_eq!(out.n, 1);
        assert!((out.probability - 0.5).abs() < 1e-12);
        // post state: (|01> + |10>)/sqrt(2)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amp(0b01) - c(s, 0.0)).norm() < 1e-12);
        assert!((psi.amp(0b10) - c(s, 0.0)).norm() < 1e-12);
        assert!(psi.amp(0b00).norm() < 1e-12);
    }

    #[test]
    fn born_sampler_tracks_distribution() {
        let space = FockSpace::new(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut minus = 0usize;
        let trials = 20_000;
        for _ in 0..trials {
            let mut psi = StateVector::from_amplitudes(space, vec![c(s, 0.0), c(s, 0.0)]).unwrap();
            let mut picker = BornSampler::new(&mut rng);
            let out = psi
                .measure_parity(&ParityObservable::pair(1, 2).unwrap(), &mut picker)
                .unwrap();
            if out.value == -1 {
                minus += 1;
            }
        }
        let frac = minus as f64 / trials as f64;
        // 5 sigma band around 1/2 at 20k trials
        assert!((frac - 0.5).abs() < 5.0 * 0.5 / (trials as f64).sqrt());
    }

    #[test]
    fn reset_mode_requires_definite_occupancy() {
        let space = FockSpace::new(2).unwrap();
        let mut psi = StateVector::basis_state(space, 0b10).unwrap();
        psi.reset_mode(2).unwrap();
        assert!((psi.amp(0) - c(1.0, 0.0)).norm() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut sup = StateVector::from_amplitudes(
            space,
            vec![c(s, 0.0), c(0.0, 0.0), c(s, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            sup.reset_mode(2).unwrap_err(),
            Error::IndefiniteOccupancy(_)
        ));
    }
}
