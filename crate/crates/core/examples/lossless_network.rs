//! Realize a lossy complex network with a purely reactive one of twice the
//! size and check that it produces the same outputs.

use milac::lossless::{build_susceptance, extract_and_verify, permutation_identity_defect, simulate_lossless};
use milac::network::{components_from_y, simulate, MilacNetwork, DEFAULT_Y0};
use milac::numerics::{ComplexMatrix, CostMeter};
use milac::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = 6;
    let y: ComplexMatrix = synth::random_matrix(p, p, &mut rng).scale(DEFAULT_Y0.into());
    for n in [4, p] {
        let u = synth::random_vector(n, &mut rng);
        let net = MilacNetwork::new(n, DEFAULT_Y0, components_from_y(&y)?)?;
        let reference = simulate(&net, &u, &mut CostMeter::new())?;

        let sus = build_susceptance(&y, n, DEFAULT_Y0)?;
        let lifted = simulate_lossless(&sus, &u, DEFAULT_Y0)?;
        let report = extract_and_verify(&sus, &lifted, &reference.v, DEFAULT_Y0, 1e-9);
        println!(
            "N={n} M={}: {} ports, {} components, deviation {:.3e}, lossless {}, asymmetry {:.3e}, identity defect {:.3e}",
            p - n,
            sus.ports(),
            report.component_count,
            report.relative_deviation,
            report.components_lossless,
            report.asymmetry,
            permutation_identity_defect(&sus, &y, DEFAULT_Y0)
        );
        if !report.pass {
            return Err(format!("lossless check failed: {report:?}").into());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
