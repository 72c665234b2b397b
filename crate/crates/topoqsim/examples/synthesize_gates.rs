//! Brute-force the shortest braid words for the standard single-qubit
//! gates, then show why diag(1, e^{i pi/4}) cannot be one of them: the
//! braid image is a finite group and the enumeration exhausts it.
//!
//!     cargo run --example synthesize_gates

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use topoqsim::linalg::qubit;
use topoqsim::synth::{enumerate_closure, synthesize, SynthOutcome};

fn show(name: &str, target: &topoqsim::linalg::CMatrix) -> Result<(), topoqsim::Error> {
    match synthesize(target)? {
        SynthOutcome::Found(res) => {
            println!(
                "{name}: {} exchange(s), residual {:.3e}",
                res.word.len(),
                res.residual
            );
            for line in res.word.to_schedule().lines() {
                println!("    {line}");
            }
        }
        SynthOutcome::Saturated { group_order, depth } => {
            println!(
                "{name}: NOT reachable -- search saturated a group of order \
                 {group_order} at depth {depth}"
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), topoqsim::Error> {
    show("qubit flip -i sigma_x", &qubit::spin_flip())?;
    show("quarter phase diag(1, i)", &qubit::phase(FRAC_PI_2))?;
    show("Hadamard", &qubit::hadamard())?;
    show("eighth phase diag(1, e^{i pi/4})", &qubit::phase(FRAC_PI_4))?;

    let closure = enumerate_closure()?;
    println!(
        "\nclosure of the braid image: {} elements ({} mod phase), \
         longest shortest word {}",
        closure.with_phase, closure.mod_phase, closure.depth
    );
    Ok(())
}
