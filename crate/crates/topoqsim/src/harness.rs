//! Config parsing, experiment dispatch and plain-text reports for the
//! `topoqsim` binary.
//!
//! Configs are flat `key = value` lines under `[section]` headers, with
//! full-line `#` comments. Unknown keys and sections are rejected, the
//! first error wins, and every diagnostic carries its line number. Reports
//! are blank-line-separated key=value blocks; two runs with the same
//! resolved config and seed render byte-identical reports except for the
//! final timing block.

use crate::algebra::verify_majorana_algebra_up_to;
use crate::clifford::decomposition::PairLayout;
use crate::clifford::measure::{BornSampler, ForcedOutcomes};
use crate::clifford::space::{FockSpace, StateVector};
use crate::collision::{
    calibrate, collision_integral, collision_phase, CollisionModel, FreeParameter,
    REFERENCE_PHASE_BASELINE,
};
use crate::encoding::{
    logical_gate_of, prepare_logical_superposition, RegisterLayout, RegisterRef,
};
use crate::error::{Error, Result};
use crate::linalg::qubit;
use crate::protocols::chsh::{
    chi_square_statistic, chsh_expectations, chsh_sample, compile_chsh_settings,
    postselected_exact_l, postselected_joint_tables, CompiledSetting, LogicalGate,
};
use crate::protocols::controls::random_product_logical_state;
use crate::protocols::cphase::{
    controlled_phase_sigma_z, cphase_layout, cz_matrix, logical_controlled_phase,
    universal_set_report, PairMeasurementMode,
};
use crate::protocols::eg::{
    bell_state_fidelity, eg_layout, entanglement_generation, merge_count_distribution, MergeModel,
    EG_THETA,
};
use crate::protocols::ProtocolTrace;
use crate::synth::{enumerate_closure, synthesize, SynthOutcome};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

/// Version string stamped into every report.
pub const VERSION: &str = "topoqsim-0.1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    VerifyAlgebra,
    SynthBraids,
    RunEg,
    RunChsh,
    RunCphase,
    CollisionPhase,
    Calibrate,
    UniversalReport,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::VerifyAlgebra,
        Experiment::SynthBraids,
        Experiment::RunEg,
        Experiment::RunChsh,
        Experiment::RunCphase,
        Experiment::CollisionPhase,
        Experiment::Calibrate,
        Experiment::UniversalReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyAlgebra => "verify-algebra",
            Experiment::SynthBraids => "synth-braids",
            Experiment::RunEg => "run-eg",
            Experiment::RunChsh => "run-chsh",
            Experiment::RunCphase => "run-cphase",
            Experiment::CollisionPhase => "collision-phase",
            Experiment::Calibrate => "calibrate",
            Experiment::UniversalReport => "universal-report",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully resolved run parameters. Defaults are the reference lithium-6
/// collision block, the EG working point theta = pi, and modest trial
/// counts; config files override per key.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: u64,
    pub out: Option<PathBuf>,
    /// Largest Fock space the algebra suite runs on.
    pub n_modes: usize,
    /// Collision phase used by the EG protocol.
    pub theta: f64,
    pub merge: MergeModel,
    pub collision: CollisionModel,
    pub free_parameter: FreeParameter,
    pub target_phase: f64,
    /// Absolute quadrature tolerance for the collision integrals.
    pub quadrature_tol: f64,
    /// Absolute tolerance for computed collision phases (>= 1e-12).
    pub phase_tol: f64,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            seed: 42,
            trials: 10_000,
            out: None,
            n_modes: 6,
            theta: EG_THETA,
            merge: MergeModel::WhichPathErasure,
            collision: CollisionModel::reference_li6(),
            free_parameter: FreeParameter::TauR,
            target_phase: PI,
            quadrature_tol: 1e-12,
            phase_tol: 1e-10,
        }
    }

    /// Command-line overrides, applied after the file.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        trials: Option<u64>,
        out: Option<PathBuf>,
    ) -> Result<()> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(t) = trials {
            validate_trials(0, t)?;
            self.trials = t;
        }
        if let Some(o) = out {
            self.out = Some(o);
        }
        Ok(())
    }

    /// Canonical key/value echo, in fixed order, as written into reports.
    /// The output path is plumbing, not physics, and is left out so that
    /// runs differing only in destination stay byte-identical.
    pub fn echo(&self) -> Vec<(String, String)> {
        let free = match self.free_parameter {
            FreeParameter::TauR => "tau_r",
            FreeParameter::Omega => "omega",
        };
        vec![
            ("seed".into(), self.seed.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("n_modes".into(), self.n_modes.to_string()),
            ("theta".into(), fmt_f64(self.theta)),
            ("merge".into(), self.merge.to_string()),
            ("omega".into(), fmt_f64(self.collision.omega)),
            ("a_D".into(), fmt_f64(self.collision.a_d)),
            ("a_V".into(), fmt_f64(self.collision.a_v)),
            ("d0".into(), fmt_f64(self.collision.d0)),
            ("tau_r".into(), fmt_f64(self.collision.tau_r)),
            ("tau_i".into(), fmt_f64(self.collision.tau_i)),
            ("tau".into(), fmt_f64(self.collision.tau)),
            ("free_parameter".into(), free.into()),
            ("target_phase".into(), fmt_f64(self.target_phase)),
            ("quadrature".into(), fmt_f64(self.quadrature_tol)),
            ("phase".into(), fmt_f64(self.phase_tol)),
        ]
    }
}

fn cfg_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| {
        cfg_err(
            line,
            format!("invalid value for `{key}`: expected an unsigned integer"),
        )
    })
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| {
        cfg_err(
            line,
            format!("invalid value for `{key}`: expected a number"),
        )
    })?;
    if !x.is_finite() {
        return Err(cfg_err(
            line,
            format!("invalid value for `{key}`: expected a finite number"),
        ));
    }
    Ok(x)
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(line, key, v)?;
    if !(x > 0.0) {
        return Err(cfg_err(line, format!("{key} must be positive")));
    }
    Ok(x)
}

fn validate_trials(line: usize, t: u64) -> Result<()> {
    if t == 0 {
        return Err(cfg_err(line, "trials must be at least 1"));
    }
    if t >= (1 << 48) {
        return Err(cfg_err(line, "trials must be below 2^48"));
    }
    Ok(())
}

/// Parse a standalone config; the `experiment` key is required.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_impl(text, None)
}

/// Parse a config on behalf of a subcommand: the `experiment` key may be
/// omitted, but if present it must match.
pub fn parse_config_for(text: &str, expected: Experiment) -> Result<ExperimentConfig> {
    parse_config_impl(text, Some(expected))
}

fn parse_config_impl(text: &str, expected: Option<Experiment>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(expected.unwrap_or(Experiment::VerifyAlgebra));
    let mut experiment: Option<Experiment> = None;
    let mut section: Option<&str> = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(cfg_err(line, "malformed section header"));
            }
            let name = &trimmed[1..trimmed.len() - 1];
            section = match name {
                "run" => Some("run"),
                "model" => Some("model"),
                "collision" => Some("collision"),
                "tolerances" => Some("tolerances"),
                _ => return Err(cfg_err(line, format!("unknown section `[{name}]`"))),
            };
            continue;
        }
        let Some((lhs, rhs)) = trimmed.split_once('=') else {
            return Err(cfg_err(line, "expected `key = value`"));
        };
        let key = lhs.trim();
        let value = rhs.trim();
        if key.is_empty() {
            return Err(cfg_err(line, "empty key"));
        }
        if value.is_empty() {
            return Err(cfg_err(line, format!("empty value for `{key}`")));
        }

        let canonical = match section {
            None => key.to_string(),
            Some(s) => format!("{s}.{key}"),
        };
        if seen.contains(&canonical) {
            return Err(cfg_err(line, format!("duplicate key `{key}`")));
        }
        seen.push(canonical);

        match (section, key) {
            (None, "experiment") => {
                let e = Experiment::from_name(value)
                    .ok_or_else(|| cfg_err(line, format!("unknown experiment `{value}`")))?;
                if let Some(want) = expected {
                    if e != want {
                        return Err(cfg_err(
                            line,
                            format!(
                                "config experiment `{}` does not match the `{}` subcommand",
                                e.name(),
                                want.name()
                            ),
                        ));
                    }
                }
                experiment = Some(e);
            }
            (Some("run"), "seed") => cfg.seed = parse_u64(line, key, value)?,
            (Some("run"), "trials") => {
                let t = parse_u64(line, key, value)?;
                validate_trials(line, t)?;
                cfg.trials = t;
            }
            (Some("run"), "out") => cfg.out = Some(PathBuf::from(value)),
            (Some("model"), "n_modes") => {
                let n = parse_u64(line, key, value)? as usize;
                if !(2..=12).contains(&n) {
                    return Err(cfg_err(line, "n_modes must be between 2 and 12"));
                }
                cfg.n_modes = n;
            }
            (Some("model"), "theta") => cfg.theta = parse_f64(line, key, value)?,
            (Some("model"), "merge") => {
                cfg.merge = match value {
                    "which_path_erasure" => MergeModel::WhichPathErasure,
                    "bare_dephasing" => MergeModel::BareDephasing,
                    _ => {
                        return Err(cfg_err(
                            line,
                            format!(
                                "invalid value for `merge`: expected \
                                 `which_path_erasure` or `bare_dephasing`, got `{value}`"
                            ),
                        ))
                    }
                };
            }
            (Some("collision"), "omega") => cfg.collision.omega = parse_f64(line, key, value)?,
            (Some("collision"), "a_D") => cfg.collision.a_d = parse_positive(line, key, value)?,
            (Some("collision"), "a_V") => cfg.collision.a_v = parse_positive(line, key, value)?,
            (Some("collision"), "d0") => cfg.collision.d0 = parse_positive(line, key, value)?,
            (Some("collision"), "tau_r") => cfg.collision.tau_r = parse_positive(line, key, value)?,
            (Some("collision"), "tau_i") => {
                let x = parse_f64(line, key, value)?;
                if x < 0.0 {
                    return Err(cfg_err(line, "tau_i must be nonnegative"));
                }
                cfg.collision.tau_i = x;
            }
            (Some("collision"), "tau") => cfg.collision.tau = parse_positive(line, key, value)?,
            (Some("collision"), "free_parameter") => {
                cfg.free_parameter = value
                    .parse()
                    .map_err(|_| cfg_err(line, "free_parameter must be `tau_r` or `omega`"))?;
            }
            (Some("collision"), "target_phase") => {
                let x = parse_f64(line, key, value)?;
                if x == 0.0 {
                    return Err(cfg_err(line, "target_phase must be nonzero"));
                }
                cfg.target_phase = x;
            }
            (Some("tolerances"), "quadrature") => {
                cfg.quadrature_tol = parse_positive(line, key, value)?
            }
            (Some("tolerances"), "phase") => {
                let x = parse_positive(line, key, value)?;
                if x < 1e-12 {
                    return Err(cfg_err(line, "phase tolerance must be at least 1e-12"));
                }
                cfg.phase_tol = x;
            }
            (None, _) => return Err(cfg_err(line, format!("unknown key `{key}`"))),
            (Some(s), _) => return Err(cfg_err(line, format!("unknown key `{key}` in [{s}]"))),
        }
    }

    cfg.experiment = match (experiment, expected) {
        (Some(e), _) => e,
        (None, Some(e)) => e,
        (None, None) => return Err(cfg_err(0, "missing required key `experiment`")),
    };
    Ok(cfg)
}

/// Decimal formatting used everywhere in reports: shortest round-trip
/// scientific notation, so equal bit patterns render identically.
fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

/// One named check: passes exactly when `value <= tolerance`.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// A titled key=value (or free-form line) block appended after the checks.
#[derive(Debug, Clone)]
pub struct ReportBlock {
    pub header: String,
    pub lines: Vec<String>,
}

impl ReportBlock {
    pub fn new(header: impl Into<String>) -> Self {
        ReportBlock {
            header: header.into(),
            lines: Vec::new(),
        }
    }

    pub fn kv(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub experiment: Experiment,
    pub version: &'static str,
    pub config_echo: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
    pub extras: Vec<ReportBlock>,
    pub duration_ms: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// Full plain-text report. Deterministic for a fixed (config, seed)
    /// except the final `[timing]` block.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("[report]\n");
        s.push_str(&format!("version = {}\n", self.version));
        s.push_str(&format!("experiment = {}\n", self.experiment));
        s.push('\n');
        s.push_str("[config]\n");
        for (k, v) in &self.config_echo {
            s.push_str(&format!("{k} = {v}\n"));
        }
        for check in &self.checks {
            s.push('\n');
            s.push_str("[check]\n");
            s.push_str(&format!("name = {}\n", check.name));
            s.push_str(&format!("value = {}\n", fmt_f64(check.value)));
            s.push_str(&format!("tolerance = {}\n", fmt_f64(check.tolerance)));
            s.push_str(&format!("pass = {}\n", check.pass));
        }
        for block in &self.extras {
            s.push('\n');
            s.push_str(&format!("[{}]\n", block.header));
            for line in &block.lines {
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push('\n');
        s.push_str("[summary]\n");
        s.push_str(&format!("checks = {}\n", self.checks.len()));
        s.push_str(&format!(
            "failures = {}\n",
            self.checks.iter().filter(|c| !c.pass).count()
        ));
        s.push_str(&format!("pass = {}\n", self.passed()));
        s.push('\n');
        s.push_str("[timing]\n");
        s.push_str(&format!("duration_ms = {:.3}\n", self.duration_ms));
        s
    }

    /// Short per-check console summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for check in &self.checks {
            let verdict = if check.pass { "pass" } else { "FAIL" };
            s.push_str(&format!(
                "check {}: {} (value {}, tolerance {})\n",
                check.name,
                verdict,
                fmt_f64(check.value),
                fmt_f64(check.tolerance)
            ));
        }
        match self.first_failure() {
            None => s.push_str("result: pass\n"),
            Some(f) => s.push_str(&format!("result: FAIL (first failing check: {})\n", f.name)),
        }
        s
    }
}

/// Run the experiment the config names and assemble its report.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let (checks, extras) = match cfg.experiment {
        Experiment::VerifyAlgebra => run_verify_algebra(cfg)?,
        Experiment::SynthBraids => run_synth_braids(cfg)?,
        Experiment::RunEg => run_eg(cfg)?,
        Experiment::RunChsh => run_chsh(cfg)?,
        Experiment::RunCphase => run_cphase(cfg)?,
        Experiment::CollisionPhase => run_collision_phase(cfg)?,
        Experiment::Calibrate => run_calibrate(cfg)?,
        Experiment::UniversalReport => run_universal_report(cfg)?,
    };
    Ok(RunReport {
        experiment: cfg.experiment,
        version: VERSION,
        config_echo: cfg.echo(),
        checks,
        extras,
        duration_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

type Outputs = (Vec<CheckResult>, Vec<ReportBlock>);

fn run_verify_algebra(cfg: &ExperimentConfig) -> Result<Outputs> {
    let merged = verify_majorana_algebra_up_to(cfg.n_modes)?;
    let checks = merged
        .iter()
        .map(|c| CheckResult::new(c.name, c.residual, 1e-12))
        .collect();
    let mut data = ReportBlock::new("data");
    data.kv("modes_checked", format!("2..={}", cfg.n_modes.max(2)));
    Ok((checks, vec![data]))
}

fn schedule_line(word: &crate::clifford::BraidWord) -> String {
    word.to_schedule().lines().collect::<Vec<_>>().join("; ")
}

fn run_synth_braids(_cfg: &ExperimentConfig) -> Result<Outputs> {
    let layout = RegisterLayout::new(1, 0, 0)?;
    let regs = [RegisterRef::Vortex(1)];
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    let targets = [
        ("qubit_flip", qubit::spin_flip()),
        ("quarter_phase", qubit::phase(FRAC_PI_2)),
        ("hadamard", qubit::hadamard()),
    ];
    for (name, target) in &targets {
        match synthesize(target)? {
            SynthOutcome::Found(res) => {
                // Residual is re-measured through the encoding, not taken
                // from the search.
                let gate = logical_gate_of(&layout, &regs, |psi| psi.apply_word(&res.word))?;
                let residual = gate.phase_aligned_distance(target);
                checks.push(CheckResult::new(
                    format!("{name}_synthesis_residual"),
                    residual,
                    1e-10,
                ));
                data.kv(&format!("{name}_word"), schedule_line(&res.word));
                data.kv(&format!("{name}_word_length"), res.word.len());
            }
            SynthOutcome::Saturated { .. } => {
                // A standard gate missing from the closure means the
                // convention is broken; record an unconditional failure.
                checks.push(CheckResult::new(
                    format!("{name}_synthesis_residual"),
                    f64::INFINITY,
                    1e-10,
                ));
            }
        }
    }

    let closure = enumerate_closure()?;
    checks.push(CheckResult::new(
        "closure_order_with_phase_deviation",
        (closure.with_phase as f64 - 48.0).abs(),
        0.5,
    ));
    checks.push(CheckResult::new(
        "closure_order_mod_phase_deviation",
        (closure.mod_phase as f64 - 24.0).abs(),
        0.5,
    ));
    data.kv("closure_order_with_phase", closure.with_phase);
    data.kv("closure_order_mod_phase", closure.mod_phase);
    data.kv("closure_depth", closure.depth);

    // The eighth phase must sit outside the braid image: the enumeration is
    // exhaustive over the (finite) closure, so saturation is a proof.
    let eighth = synthesize(&qubit::phase(FRAC_PI_4))?;
    let reachable = match eighth {
        SynthOutcome::Found(_) => 1.0,
        SynthOutcome::Saturated { group_order, depth } => {
            data.kv("eighth_phase_search_group_order", group_order);
            data.kv("eighth_phase_search_depth", depth);
            0.0
        }
    };
    checks.push(CheckResult::new(
        "eighth_phase_reachable_by_braiding",
        reachable,
        0.5,
    ));

    Ok((checks, vec![data]))
}

fn run_eg(cfg: &ExperimentConfig) -> Result<Outputs> {
    let layout = eg_layout();
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    let dist = merge_count_distribution(cfg.theta)?;
    let dist_dev = (dist[0] - 0.25)
        .abs()
        .max((dist[1] - 0.5).abs())
        .max((dist[2] - 0.25).abs());
    checks.push(CheckResult::new(
        "merge_count_distribution_deviation",
        dist_dev,
        1e-12,
    ));
    checks.push(CheckResult::new(
        "success_probability_deviation",
        (dist[1] - 0.5).abs(),
        1e-12,
    ));
    data.kv("p_zero_atoms", fmt_f64(dist[0]));
    data.kv("p_one_atom", fmt_f64(dist[1]));
    data.kv("p_two_atoms", fmt_f64(dist[2]));

    // Both post-selected branches, exactly.
    let mut fidelity_dev: f64 = 0.0;
    let mut prob_dev: f64 = 0.0;
    for branch in [0usize, 1] {
        let mut picker = ForcedOutcomes::new([1, branch]);
        let run = entanglement_generation(cfg.theta, cfg.merge, &mut picker)?;
        let f = bell_state_fidelity(&run.state, &layout, 1, 2)?;
        let dev = match cfg.merge {
            MergeModel::WhichPathErasure => 1.0 - f,
            // Dephased branches are definite products; their overlap with
            // the Bell state is exactly one half.
            MergeModel::BareDephasing => (f - 0.5).abs(),
        };
        fidelity_dev = fidelity_dev.max(dev);
        prob_dev = prob_dev.max((run.trace.path_probability() - 0.25).abs());
        data.kv(&format!("branch_{branch}_bell_fidelity"), fmt_f64(f));
    }
    let fidelity_name = match cfg.merge {
        MergeModel::WhichPathErasure => "success_fidelity_deviation",
        MergeModel::BareDephasing => "dephased_fidelity_half_deviation",
    };
    checks.push(CheckResult::new(fidelity_name, fidelity_dev, 1e-12));
    checks.push(CheckResult::new(
        "branch_path_probability_deviation",
        prob_dev,
        1e-12,
    ));

    // Seeded sample: per-trial counter streams, integer tallies only, so
    // the parallel reduction is order-independent.
    let counts = (0..cfg.trials)
        .into_par_iter()
        .try_fold(
            || [0u64; 3],
            |mut acc, t| -> Result<[u64; 3]> {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(t);
                let mut picker = BornSampler::new(&mut rng);
                let run = entanglement_generation(cfg.theta, cfg.merge, &mut picker)?;
                acc[run.outcome.atom_count.min(2)] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || [0u64; 3],
            |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]),
        )?;
    let n = cfg.trials as f64;
    let fraction = counts[1] as f64 / n;
    checks.push(CheckResult::new(
        "sampled_success_deviation",
        (fraction - 0.5).abs(),
        3.0 * (0.25 / n).sqrt(),
    ));
    data.kv("sampled_zero_atoms", counts[0]);
    data.kv("sampled_one_atom", counts[1]);
    data.kv("sampled_two_atoms", counts[2]);
    data.kv("sampled_success_fraction", fmt_f64(fraction));

    // One deterministic successful run, exported in the trace format.
    let mut picker = ForcedOutcomes::new([1, 0]);
    let run = entanglement_generation(cfg.theta, cfg.merge, &mut picker)?;
    let mut trace = ReportBlock::new("trace");
    for line in run.trace.render().lines() {
        trace.lines.push(line.to_string());
    }

    Ok((checks, vec![data, trace]))
}

fn gate_label(g: &LogicalGate) -> &'static str {
    match g {
        LogicalGate::Hadamard => "hadamard",
        LogicalGate::QuarterPhase(1) => "quarter_phase(+)",
        LogicalGate::QuarterPhase(_) => "quarter_phase(-)",
        LogicalGate::EighthPhase => "eighth_phase",
    }
}

fn setting_lines(data: &mut ReportBlock, label: &str, s: &CompiledSetting) {
    let gates: Vec<&str> = s.gates.iter().map(gate_label).collect();
    data.kv(&format!("{label}_sign"), format!("{:+}", s.sign));
    data.kv(
        &format!("{label}_gates"),
        if gates.is_empty() {
            "none".to_string()
        } else {
            gates.join(", ")
        },
    );
}

fn run_chsh(cfg: &ExperimentConfig) -> Result<Outputs> {
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    let compiled = compile_chsh_settings()?;
    data.kv("op_order", compiled.order);
    data.kv("quarter_phase_power", compiled.quarter_phase_power);
    setting_lines(&mut data, "a1", &compiled.a1);
    setting_lines(&mut data, "a2", &compiled.a2);
    setting_lines(&mut data, "b1", &compiled.b1);
    setting_lines(&mut data, "b2", &compiled.b2);

    let l_exact = postselected_exact_l(cfg.merge)?;
    data.kv("l_exact", fmt_f64(l_exact));
    match cfg.merge {
        MergeModel::WhichPathErasure => {
            checks.push(CheckResult::new(
                "tsirelson_deviation",
                (l_exact.abs() - 2.0 * SQRT_2).abs(),
                1e-12,
            ));
        }
        MergeModel::BareDephasing => {
            checks.push(CheckResult::new(
                "classical_bound_excess",
                (l_exact.abs() - 2.0).max(0.0),
                1e-12,
            ));
        }
    }

    // No product state crosses the classical bound; the stream index is
    // pinned far away from the per-trial streams below.
    let product_layout = RegisterLayout::new(2, 0, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let state = random_product_logical_state(&mut rng, &product_layout)?;
        let e = chsh_expectations(&state, &product_layout, 1, 2)?;
        worst = worst.max(e.l.abs());
    }
    checks.push(CheckResult::new(
        "product_state_bound_excess",
        worst - 2.0,
        1e-10,
    ));
    data.kv("product_state_max_abs_l", fmt_f64(worst));

    let sample = chsh_sample(cfg.trials, cfg.seed, cfg.merge)?;
    checks.push(CheckResult::new(
        "sampled_l_deviation",
        (sample.l_hat - l_exact).abs(),
        5.0 * sample.l_std_error,
    ));
    if cfg.merge == MergeModel::BareDephasing {
        checks.push(CheckResult::new(
            "sampled_classical_bound_excess",
            (sample.l_hat.abs() - 2.0).max(0.0),
            5.0 * sample.l_std_error,
        ));
    }
    let tables = postselected_joint_tables(cfg.merge)?;
    checks.push(CheckResult::new(
        "chi_square_vs_born",
        chi_square_statistic(&sample, &tables),
        60.0,
    ));

    data.kv("l_hat", fmt_f64(sample.l_hat));
    data.kv("l_std_error", fmt_f64(sample.l_std_error));
    for est in &sample.estimates {
        let label = format!("{}{}", est.a, est.b).to_lowercase();
        data.kv(
            &format!("correlator_{label}"),
            format!(
                "{} (stderr {})",
                fmt_f64(est.correlator),
                fmt_f64(est.std_error)
            ),
        );
    }

    Ok((checks, vec![data]))
}

/// Plain (not phase-aligned) distance: the two routes must agree exactly,
/// global phase included.
fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn random_w_empty_state(space: FockSpace, w_mode: usize, rng: &mut impl Rng) -> StateVector {
    let w_bit = 1usize << (w_mode - 1);
    let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
    for (b, a) in amps.iter_mut().enumerate() {
        if b & w_bit == 0 {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    StateVector::from_amplitudes(space, amps).expect("normalized by construction")
}

fn random_two_qubit_logical(layout: &RegisterLayout, rng: &mut impl Rng) -> Result<StateVector> {
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    loop {
        let mut norm = 0.0;
        for a in amps.iter_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            norm += a.norm_sqr();
        }
        if norm > 1e-6 {
            let norm = norm.sqrt();
            for a in amps.iter_mut() {
                *a /= norm;
            }
            break;
        }
    }
    prepare_logical_superposition(
        layout,
        &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
        &amps,
    )
}

fn run_cphase(cfg: &ExperimentConfig) -> Result<Outputs> {
    let cl = cphase_layout();
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    // Matrix certificate: every branch of both measurement routes is CZ up
    // to global phase.
    let target = cz_matrix();
    let mut logical_res: f64 = 0.0;
    for mode in [
        PairMeasurementMode::Projective,
        PairMeasurementMode::BasisTransform,
    ] {
        for nu in [1i8, -1] {
            for mu in [1i8, -1] {
                let gate = logical_controlled_phase(mode, nu, mu)?;
                logical_res = logical_res.max(gate.phase_aligned_distance(&target));
            }
        }
    }
    checks.push(CheckResult::new(
        "logical_branch_residual",
        logical_res,
        1e-10,
    ));

    // Measurement decomposition on the minimal three-pair register, random
    // ancilla-empty inputs.
    let space3 = FockSpace::new(3)?;
    let minimal = PairLayout::minimal();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let mut dec_res: f64 = 0.0;
    let mut dec_prob: f64 = 0.0;
    let mut dec_w: f64 = 0.0;
    for _ in 0..100 {
        let psi = random_w_empty_state(space3, minimal.w_mode(), &mut rng);
        for check in
            crate::clifford::decomposition::verify_measurement_decomposition(&psi, &minimal)?
        {
            dec_res = dec_res.max(check.distance);
            dec_prob = dec_prob
                .max((check.probability_o4 - 0.5).abs())
                .max((check.probability_o2 - 0.5).abs());
            dec_w = dec_w.max(check.w_residual);
        }
    }
    checks.push(CheckResult::new("decomposition_residual", dec_res, 1e-10));
    checks.push(CheckResult::new(
        "decomposition_probability_deviation",
        dec_prob,
        1e-12,
    ));
    checks.push(CheckResult::new(
        "decomposition_ancilla_residual",
        dec_w,
        1e-12,
    ));

    // Fusion-implemented pair measurement against the projective one,
    // branch by branch: identical states and probabilities.
    let mut equiv_res: f64 = 0.0;
    let mut equiv_prob: f64 = 0.0;
    for _ in 0..16 {
        let input = random_two_qubit_logical(&cl.registers, &mut rng)?;
        for nu_idx in 0..2usize {
            for mu_idx in 0..2usize {
                let mut proj = input.clone();
                let mut proj_picker = ForcedOutcomes::new([nu_idx, mu_idx]);
                let mut proj_trace = ProtocolTrace::new();
                controlled_phase_sigma_z(
                    &mut proj,
                    &cl,
                    PairMeasurementMode::Projective,
                    &mut proj_picker,
                    &mut proj_trace,
                )?;
                let mut fused = input.clone();
                let mut fused_picker = ForcedOutcomes::new([nu_idx, mu_idx]);
                let mut fused_trace = ProtocolTrace::new();
                controlled_phase_sigma_z(
                    &mut fused,
                    &cl,
                    PairMeasurementMode::BasisTransform,
                    &mut fused_picker,
                    &mut fused_trace,
                )?;
                equiv_res = equiv_res.max(state_distance(&proj, &fused));
                equiv_prob = equiv_prob
                    .max((proj_trace.path_probability() - fused_trace.path_probability()).abs());
            }
        }
    }
    checks.push(CheckResult::new(
        "pair_measurement_equivalence_residual",
        equiv_res,
        1e-10,
    ));
    checks.push(CheckResult::new(
        "pair_measurement_probability_deviation",
        equiv_prob,
        1e-12,
    ));

    // Full gate on random logical inputs, all four forced branches, against
    // the direct controlled-phase oracle on the same input.
    let mut gate_res: f64 = 0.0;
    let mut gate_prob: f64 = 0.0;
    let mut w_occ: f64 = 0.0;
    for _ in 0..100 {
        let input = random_two_qubit_logical(&cl.registers, &mut rng)?;
        let mut want = input.clone();
        want.apply_controlled_phase(1, 3, PI)?;
        for nu_idx in 0..2usize {
            for mu_idx in 0..2usize {
                let mut state = input.clone();
                let mut picker = ForcedOutcomes::new([nu_idx, mu_idx]);
                let mut trace = ProtocolTrace::new();
                controlled_phase_sigma_z(
                    &mut state,
                    &cl,
                    PairMeasurementMode::Projective,
                    &mut picker,
                    &mut trace,
                )?;
                gate_res = gate_res.max(state.phase_aligned_distance(&want));
                gate_prob = gate_prob.max((trace.path_probability() - 0.25).abs());
                w_occ = w_occ.max(state.mean_occupancy(cl.pairs.w_mode())?);
            }
        }
    }
    checks.push(CheckResult::new(
        "controlled_phase_residual",
        gate_res,
        1e-10,
    ));
    checks.push(CheckResult::new(
        "controlled_phase_probability_deviation",
        gate_prob,
        1e-12,
    ));
    checks.push(CheckResult::new("ancilla_restored_occupancy", w_occ, 1e-12));

    // Born-sampled branches on per-trial streams; the residual against the
    // oracle must not depend on which branch was drawn.
    let sampled = (0..cfg.trials)
        .into_par_iter()
        .try_fold(
            || (0.0f64, [0u64; 4]),
            |mut acc, t| -> Result<(f64, [u64; 4])> {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(t);
                let mut input_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
                input_rng.set_stream(t);
                let input = random_two_qubit_logical(&cl.registers, &mut input_rng)?;
                let mut want = input.clone();
                want.apply_controlled_phase(1, 3, PI)?;
                let mut state = input;
                let mut picker = BornSampler::new(&mut rng);
                let mut trace = ProtocolTrace::new();
                let record = controlled_phase_sigma_z(
                    &mut state,
                    &cl,
                    PairMeasurementMode::Projective,
                    &mut picker,
                    &mut trace,
                )?;
                acc.0 = acc.0.max(state.phase_aligned_distance(&want));
                let idx =
                    2 * usize::from(record.quad.value < 0) + usize::from(record.pair.value < 0);
                acc.1[idx] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || (0.0f64, [0u64; 4]),
            |a, b| {
                Ok((
                    a.0.max(b.0),
                    [
                        a.1[0] + b.1[0],
                        a.1[1] + b.1[1],
                        a.1[2] + b.1[2],
                        a.1[3] + b.1[3],
                    ],
                ))
            },
        )?;
    checks.push(CheckResult::new(
        "sampled_controlled_phase_residual",
        sampled.0,
        1e-10,
    ));
    for (label, count) in
        [("pp", 0usize), ("pm", 1), ("mp", 2), ("mm", 3)].map(|(l, i)| (l, sampled.1[i]))
    {
        data.kv(&format!("sampled_branch_{label}"), count);
    }

    // One deterministic fused-ancilla run on the uniform logical input,
    // exported in the trace format.
    let quarter = Complex64::new(0.5, 0.0);
    let uniform = prepare_logical_superposition(
        &cl.registers,
        &[RegisterRef::Vortex(1), RegisterRef::Vortex(2)],
        &[quarter; 4],
    )?;
    let mut state = uniform;
    let mut picker = ForcedOutcomes::new([0, 0]);
    let mut demo_trace = ProtocolTrace::new();
    controlled_phase_sigma_z(
        &mut state,
        &cl,
        PairMeasurementMode::BasisTransform,
        &mut picker,
        &mut demo_trace,
    )?;
    let mut trace = ReportBlock::new("trace");
    for line in demo_trace.render().lines() {
        trace.lines.push(line.to_string());
    }

    Ok((checks, vec![data, trace]))
}

fn run_collision_phase(cfg: &ExperimentConfig) -> Result<Outputs> {
    let model = cfg.collision;
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    checks.push(CheckResult::new(
        "upsilon_reference_deviation",
        (model.upsilon() - 50.0).abs(),
        1e-12,
    ));
    checks.push(CheckResult::new(
        "eta_reference_deviation",
        (model.eta() - (-1.0f64).exp()).abs(),
        1e-12,
    ));
    checks.push(CheckResult::new(
        "tau_reference_relative_deviation",
        (model.tau - 0.86e-3).abs() / 0.86e-3,
        0.01,
    ));
    data.kv("upsilon", fmt_f64(model.upsilon()));
    data.kv("eta", fmt_f64(model.eta()));
    data.kv("tau_seconds", fmt_f64(model.tau));

    let pair = collision_integral(&model, cfg.quadrature_tol)?;
    checks.push(CheckResult::new(
        "quadrature_agreement",
        (pair.gauss_kronrod - pair.simpson).abs(),
        1e-10,
    ));
    data.kv("integral_gauss_kronrod", fmt_f64(pair.gauss_kronrod));
    data.kv("integral_simpson", fmt_f64(pair.simpson));
    data.kv("integrand_evaluations", pair.evaluations);

    let phase = collision_phase(&model, cfg.phase_tol)?;
    checks.push(CheckResult::new(
        "phase_baseline_deviation",
        (phase.theta - REFERENCE_PHASE_BASELINE).abs(),
        1e-9,
    ));
    data.kv("theta", fmt_f64(phase.theta));
    data.kv(
        "theta_regression_baseline",
        fmt_f64(REFERENCE_PHASE_BASELINE),
    );
    // The quoted working point for this pulse is |theta| = pi; the computed
    // value falls well short, so the computation itself is the baseline and
    // `calibrate` finds the pulse that does reach pi.
    data.kv("quoted_phase_magnitude", fmt_f64(PI));
    data.kv(
        "quoted_phase_relative_deviation",
        fmt_f64((phase.theta - PI).abs() / PI),
    );

    // Linearity and oddness in the drive frequency.
    let mut doubled = model;
    doubled.omega *= 2.0;
    let mut reversed = model;
    reversed.omega = -reversed.omega;
    let theta2 = collision_phase(&doubled, cfg.phase_tol)?.theta;
    let theta_neg = collision_phase(&reversed, cfg.phase_tol)?.theta;
    let linearity = (theta2 - 2.0 * phase.theta)
        .abs()
        .max((theta_neg + phase.theta).abs());
    checks.push(CheckResult::new(
        "phase_linearity_deviation",
        linearity,
        1e-10,
    ));

    Ok((checks, vec![data]))
}

fn run_calibrate(cfg: &ExperimentConfig) -> Result<Outputs> {
    let mut checks = Vec::new();
    let mut data = ReportBlock::new("data");

    let calibrated = calibrate(&cfg.collision, cfg.free_parameter, cfg.target_phase)?;
    let phase = collision_phase(&calibrated, cfg.phase_tol)?;
    checks.push(CheckResult::new(
        "calibrated_phase_deviation",
        (phase.theta - cfg.target_phase).abs(),
        1e-9,
    ));
    // Rescaling either free parameter leaves the pulse geometry alone.
    let shape_dev = (calibrated.upsilon() - cfg.collision.upsilon())
        .abs()
        .max((calibrated.eta() - cfg.collision.eta()).abs());
    checks.push(CheckResult::new("pulse_shape_invariance", shape_dev, 1e-12));

    let free = match cfg.free_parameter {
        FreeParameter::TauR => "tau_r",
        FreeParameter::Omega => "omega",
    };
    data.kv("free_parameter", free);
    data.kv("target_phase", fmt_f64(cfg.target_phase));
    data.kv("calibrated_theta", fmt_f64(phase.theta));
    data.kv("calibrated_omega", fmt_f64(calibrated.omega));
    data.kv("calibrated_tau_r", fmt_f64(calibrated.tau_r));
    data.kv("calibrated_tau", fmt_f64(calibrated.tau));
    data.kv(
        "omega_tau_r_product",
        fmt_f64(calibrated.omega * calibrated.tau_r),
    );
    let scale = match cfg.free_parameter {
        FreeParameter::TauR => calibrated.tau_r / cfg.collision.tau_r,
        FreeParameter::Omega => calibrated.omega / cfg.collision.omega,
    };
    data.kv("scale_factor", fmt_f64(scale));

    Ok((checks, vec![data]))
}

fn run_universal_report(_cfg: &ExperimentConfig) -> Result<Outputs> {
    let report = universal_set_report()?;
    let checks = vec![
        CheckResult::new("hadamard_residual", report.hadamard_residual, 1e-10),
        CheckResult::new("eighth_phase_residual", report.eighth_phase_residual, 1e-9),
        CheckResult::new(
            "eighth_phase_period_residual",
            report.eighth_phase_period_residual,
            1e-9,
        ),
        CheckResult::new(
            "controlled_phase_residual",
            report.controlled_phase_residual,
            1e-10,
        ),
        CheckResult::new(
            "pauli_commutation_residual",
            report.pauli_commutation_residual,
            1e-10,
        ),
        CheckResult::new(
            "eg_success_probability_deviation",
            (report.eg_success_probability - 0.5).abs(),
            1e-12,
        ),
    ];
    let mut data = ReportBlock::new("data");
    data.kv(
        "eg_success_probability",
        fmt_f64(report.eg_success_probability),
    );
    Ok((checks, vec![data]))
}
