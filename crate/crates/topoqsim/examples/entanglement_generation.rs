//! One traced entanglement-generation attempt, the exact branch statistics,
//! and a short seeded sample.
//!
//!     cargo run --example entanglement_generation

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topoqsim::clifford::measure::{BornSampler, ForcedOutcomes};
use topoqsim::protocols::eg::{
    bell_state_fidelity, eg_layout, entanglement_generation, merge_count_distribution, MergeModel,
    EG_THETA,
};

fn main() -> Result<(), topoqsim::Error> {
    let dist = merge_count_distribution(EG_THETA)?;
    println!(
        "merge counts: p(0) = {:.12}, p(1) = {:.12}, p(2) = {:.12}",
        dist[0], dist[1], dist[2]
    );

    // Force the successful single-count branch to see the full trace.
    let mut picker = ForcedOutcomes::new([1, 0]);
    let run = entanglement_generation(EG_THETA, MergeModel::WhichPathErasure, &mut picker)?;
    println!("\nforced success (symmetric branch), trace:");
    print!("{}", run.trace.render());
    let layout = eg_layout();
    println!(
        "fidelity with (|00> + |11>)/sqrt(2): {:.15}",
        bell_state_fidelity(&run.state, &layout, 1, 2)?
    );

    // A seeded sample of attempts.
    let trials = 20_000u64;
    let mut counts = [0u64; 3];
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        rng.set_stream(t);
        let mut picker = BornSampler::new(&mut rng);
        let run = entanglement_generation(EG_THETA, MergeModel::WhichPathErasure, &mut picker)?;
        counts[run.outcome.atom_count.min(2)] += 1;
    }
    println!(
        "\n{} attempts: {} zero-atom, {} one-atom (success), {} two-atom",
        trials, counts[0], counts[1], counts[2]
    );
    println!(
        "success fraction {:.4} (expect 0.5 within ~{:.4})",
        counts[1] as f64 / trials as f64,
        3.0 * (0.25 / trials as f64).sqrt()
    );
    Ok(())
}
