//! Block inversion of a 2x2 partitioned matrix through either diagonal block.

use milac::numerics::{gauss_invert, relative_error, ComplexMatrix, CostMeter, C64};
use milac::primitives::{prop1_blocks_via_a, prop1_blocks_via_d};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ComplexMatrix::from_fn(5, 5, |i, k| {
        let base = if i == k { 3.0 } else { 0.0 };
        C64::new(base + 0.1 * (i as f64 - k as f64), 0.2 * ((i * k) % 3) as f64)
    });
    let n = 3;
    let (a, b) = (p.block(0, 0, n, n), p.block(0, n, n, 2));
    let (c, d) = (p.block(n, 0, 2, n), p.block(n, n, 2, 2));
    let oracle = gauss_invert(&p, &mut CostMeter::new())?;

    let mut meter_a = CostMeter::new();
    let via_a = prop1_blocks_via_a(&a, &b, &c, &d, &mut meter_a)?.assemble();
    let mut meter_d = CostMeter::new();
    let via_d = prop1_blocks_via_d(&a, &b, &c, &d, &mut meter_d)?.assemble();
    println!("via A: deviation {:.3e}, {} ops", relative_error(&via_a, &oracle), meter_a.total());
    println!("via D: deviation {:.3e}, {} ops", relative_error(&via_d, &oracle), meter_d.total());

    match prop1_blocks_via_a(&ComplexMatrix::zeros(1, 1), &b.block(0, 0, 1, 2), &c.block(0, 0, 2, 1), &d, &mut CostMeter::new()) {
        Err(e) => println!("singular leading block: {e}"),
        Ok(_) => return Err("expected a singular leading block".into()),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
