//! Configure a network for a target system matrix, drive it, and compare the
//! port voltages with the closed-form block expressions.

use milac::network::{components_from_p, simulate, MilacNetwork, DEFAULT_Y0};
use milac::numerics::{relative_error_vec, ComplexMatrix, ComplexVector, CostMeter, C64};
use milac::primitives::{closed_form_outputs, BlockPartition, Route};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ComplexMatrix::from_rows(&[
        vec![C64::new(2.0, 0.5), C64::new(0.3, -0.2), C64::new(0.0, 1.0), C64::new(0.5, 0.0)],
        vec![C64::new(-0.4, 0.1), C64::new(1.5, 0.0), C64::new(0.2, 0.2), C64::new(0.0, -0.3)],
        vec![C64::new(0.1, 0.0), C64::new(0.0, 0.7), C64::new(-1.8, 0.4), C64::new(0.6, 0.1)],
        vec![C64::new(0.0, -0.5), C64::new(0.2, 0.0), C64::new(0.3, -0.1), C64::new(1.2, 0.9)],
    ])?;
    let n = 2;
    let grid = components_from_p(&p, DEFAULT_Y0)?;
    println!("components: {} (reciprocity defect {:.3e})", grid.component_count(), grid.reciprocity_defect());

    let net = MilacNetwork::new(n, DEFAULT_Y0, grid)?;
    let u = ComplexVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, -2.0)])?;
    let mut physics = CostMeter::new();
    let sol = simulate(&net, &u, &mut physics)?;
    println!("v1 = {:?}", sol.v1.as_slice());
    println!("v2 = {:?}", sol.v2.as_slice());
    println!("boundary residual {:.3e}", sol.boundary_residual(&u, DEFAULT_Y0));
    println!("physics meter: {physics}");

    let part = BlockPartition::new(&p, n)?;
    for route in [Route::ViaP11, Route::ViaP22] {
        let (v1, v2) = closed_form_outputs(&part, &u, route, &mut CostMeter::new())?;
        let err = relative_error_vec(&v1, &sol.v1).max(relative_error_vec(&v2, &sol.v2));
        println!("{route:?}: relative deviation from network {err:.3e}");
        if err > 1e-10 {
            return Err(format!("closed form {route:?} disagrees: {err:e}").into());
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
