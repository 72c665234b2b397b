//! Check the Majorana and braid-group identities on a small dense space.
//!
//!     cargo run --example verify_algebra

use topoqsim::algebra::verify_majorana_algebra;
use topoqsim::synth::verify_braid_relations;

fn main() -> Result<(), topoqsim::Error> {
    let n_modes = 3;
    println!(
        "Majorana algebra on {n_modes} modes ({} Majoranas):",
        2 * n_modes
    );
    for check in verify_majorana_algebra(n_modes)? {
        println!("  {:<40} residual {:.3e}", check.name, check.residual);
    }

    println!("\nBraid relations on the four-vortex register:");
    for check in verify_braid_relations()? {
        println!("  {:<40} residual {:.3e}", check.name, check.residual);
    }
    Ok(())
}
