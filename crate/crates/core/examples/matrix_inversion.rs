//! Invert a matrix one column at a time on a network driven at every port,
//! and compare operation counts with Gaussian elimination.

use milac::costmodel::{inversion_costs, reconcile};
use milac::estimation::invert_via_milac;
use milac::network::DEFAULT_Y0;
use milac::numerics::{gauss_invert, matmul, relative_error, solve_linear, ComplexMatrix, CostMeter};
use milac::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 16u64;
    let p = synth::well_conditioned(n as usize, 1e3, &mut rng);

    let analog = invert_via_milac(&p, DEFAULT_Y0)?;
    let mut digital_meter = CostMeter::new();
    let digital = gauss_invert(&p, &mut digital_meter)?;
    let residual = matmul(&p, &analog.inverse).minus(&ComplexMatrix::identity(n as usize)).frobenius_norm();
    println!("|P P^-1 - I|_F = {residual:.3e}");
    println!("deviation from elimination {:.3e}", relative_error(&analog.inverse, &digital));

    let costs = inversion_costs(n)?;
    let online = reconcile(&analog.meter, costs.milac, 0.1, n, n)?;
    println!("network route: {} ops vs 4N^2 = {} -> pass {}", online.measured, online.formula, online.pass);

    // Elimination with one right-hand side is the 8N^3/3 count; a full
    // inverse needs N right-hand sides.
    let mut single = CostMeter::new();
    solve_linear(&p, &synth::random_vector(n as usize, &mut rng), &mut single)?;
    let one_rhs = reconcile(&single, costs.digital, 0.1, n, n)?;
    let full = reconcile(&digital_meter, costs.digital, 0.1, n, n)?;
    println!("one system: {} ops vs 8N^3/3 = {:.0} -> pass {}", one_rhs.measured, one_rhs.formula, one_rhs.pass);
    println!("full inverse: {} ops vs 8N^3/3 = {:.0} -> pass {}", full.measured, full.formula, full.pass);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
