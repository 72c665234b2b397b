//! Protocol layer: probabilistic entanglement generation between vortex
//! qubits, the Bell test run on the generated pairs, and the deterministic
//! measurement-based controlled-phase gate.
//!
//! Every protocol run appends to a [`ProtocolTrace`]: one record per gate,
//! measurement, or correction, in execution order. Measurement records carry
//! the Born probability of the branch taken, so the product of those
//! probabilities is the path probability of the whole run.

pub mod chsh;
pub mod controls;
pub mod cphase;
pub mod eg;

use crate::clifford::unitary::BraidWord;
use crate::encoding::RegisterLayout;
use crate::error::Result;
use crate::synth::StandardGates;
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Gate,
    Measure,
    Correct,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Gate => "gate",
            StepKind::Measure => "measure",
            StepKind::Correct => "correct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based position in the run.
    pub step: usize,
    pub kind: StepKind,
    /// Single whitespace-free token describing the step.
    pub detail: String,
    /// Branch probability for measurements; exactly 1 for the rest.
    pub prob: f64,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} kind={} detail={} prob={:.12}",
            self.step, self.kind, self.detail, self.prob
        )
    }
}

/// Ordered execution record of one protocol run.
#[derive(Debug, Clone, Default)]
pub struct ProtocolTrace {
    records: Vec<TraceRecord>,
}

impl ProtocolTrace {
    pub fn new() -> Self {
        ProtocolTrace::default()
    }

    fn push(&mut self, kind: StepKind, detail: String, prob: f64) {
        debug_assert!(prob > 0.0 && prob <= 1.0 + 1e-12);
        self.records.push(TraceRecord {
            step: self.records.len() + 1,
            kind,
            detail,
            prob,
        });
    }

    pub fn gate(&mut self, detail: impl Into<String>) {
        self.push(StepKind::Gate, detail.into(), 1.0);
    }

    pub fn measure(&mut self, detail: impl Into<String>, prob: f64) {
        self.push(StepKind::Measure, detail.into(), prob);
    }

    pub fn correct(&mut self, detail: impl Into<String>) {
        self.push(StepKind::Correct, detail.into(), 1.0);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    /// Product of the branch probabilities of every measurement record: the
    /// Born probability of this exact execution path.
    pub fn path_probability(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.kind == StepKind::Measure)
            .map(|r| r.prob)
            .product()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Braid words for the standard gates, synthesized once and shared; the
/// search is deterministic, so every caller sees identical words.
pub(crate) fn cached_gates() -> &'static StandardGates {
    static GATES: OnceLock<StandardGates> = OnceLock::new();
    GATES.get_or_init(|| {
        crate::synth::standard_gates().expect("the braid closure contains the standard gates")
    })
}

/// Retarget a braid word written for Majoranas 1..=4 onto vortex qubit `q`.
pub(crate) fn qubit_word(layout: &RegisterLayout, q: usize, word: &BraidWord) -> Result<BraidWord> {
    let base = layout.vortex_majoranas(q)?[0] - 1;
    word.relabel(|k| k + base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_accumulates_path_probability() {
        let mut t = ProtocolTrace::new();
        t.gate("braid_hadamard(V1)");
        t.measure("merge_count(n=1)", 0.5);
        t.measure("erasure(symmetric)", 0.5);
        t.correct("spin_flip(V1)");
        assert_eq!(t.records().len(), 4);
        assert!((t.path_probability() - 0.25).abs() < 1e-15);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "step=1 kind=gate detail=braid_hadamard(V1) prob=1.000000000000"
        );
        assert_eq!(
            lines[1],
            "step=2 kind=measure detail=merge_count(n=1) prob=0.500000000000"
        );
        assert_eq!(
            lines[3],
            "step=4 kind=correct detail=spin_flip(V1) prob=1.000000000000"
        );
    }

    #[test]
    fn relabeled_word_lands_on_the_second_qubit() {
        let layout = RegisterLayout::new(2, 0, 0).unwrap();
        let word = cached_gates().hadamard.clone();
        let moved = qubit_word(&layout, 2, &word).unwrap();
        assert_eq!(moved.len(), word.len());
        for ex in moved.exchanges() {
            let (i, j) = ex.indices();
            assert!(i >= 5 && j <= 8);
        }
    }
}
