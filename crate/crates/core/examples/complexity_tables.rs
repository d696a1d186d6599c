//! Operation-count tables for estimation, inversion and filtering, digital
//! against network evaluation.

use milac::costmodel::{parse_sizes, speedup_table, table_csv, to_f64, CostOp};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sizes = parse_sizes("16:8192:x2")?;
    for op in [CostOp::Lmmse, CostOp::Invert, CostOp::Kalman] {
        let rows = speedup_table(op, &sizes)?;
        let last = rows.last().expect("nonempty table");
        println!("{op}: ratio at N={} is {:.2}", last.size, to_f64(last.costs.ratio()));
        if op == CostOp::Invert {
            print!("{}", table_csv(&rows));
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
