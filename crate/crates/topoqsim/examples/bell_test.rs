//! CHSH test on the generated pairs: the exact Tsirelson-bound value, the
//! compiled measurement-basis rotations, and a sampled run.
//!
//!     cargo run --release --example bell_test

use topoqsim::clifford::measure::ForcedOutcomes;
use topoqsim::protocols::chsh::{
    chi_square_statistic, chsh_expectations, chsh_sample, compile_chsh_settings,
    postselected_joint_tables,
};
use topoqsim::protocols::eg::{eg_layout, entanglement_generation, MergeModel, EG_THETA};

fn main() -> Result<(), topoqsim::Error> {
    // Exact correlators on the post-selected state.
    let mut picker = ForcedOutcomes::new([1, 0]);
    let run = entanglement_generation(EG_THETA, MergeModel::WhichPathErasure, &mut picker)?;
    let layout = eg_layout();
    let e = chsh_expectations(&run.state, &layout, 1, 2)?;
    println!("exact correlators on the EG state:");
    println!("  <A1 B1> = {:+.12}", e.e_a1b1);
    println!("  <A2 B2> = {:+.12}", e.e_a2b2);
    println!("  <A2 B1> = {:+.12}", e.e_a2b1);
    println!("  <A1 B2> = {:+.12}", e.e_a1b2);
    println!(
        "  L = {:+.12}  (|L| = 2 sqrt(2) = {:.12})",
        e.l,
        2.0 * std::f64::consts::SQRT_2
    );

    let compiled = compile_chsh_settings()?;
    println!(
        "\ncompiled convention: {} application, quarter-phase power {}",
        compiled.order, compiled.quarter_phase_power
    );

    // Sampled statistics: each trial generates a fresh pair, rotates both
    // qubits into the setting eigenbasis with braids, and fuses.
    let n = 50_000u64;
    let sample = chsh_sample(n, 7, MergeModel::WhichPathErasure)?;
    println!("\nsampled at {n} trials per setting (seed 7):");
    for est in &sample.estimates {
        println!(
            "  <{} {}> = {:+.4} +- {:.4}",
            est.a, est.b, est.correlator, est.std_error
        );
    }
    println!(
        "  L_hat = {:+.4} +- {:.4}",
        sample.l_hat, sample.l_std_error
    );

    let tables = postselected_joint_tables(MergeModel::WhichPathErasure)?;
    println!(
        "  chi-square vs Born probabilities: {:.2} (16 cells)",
        chi_square_statistic(&sample, &tables)
    );
    Ok(())
}
