//! Closed-form real-operation counts for the digital and network routes,
//! speedup tables and reconciliation against measured meters.
//!
//! Evaluation is exact over `i128` rationals; rendering to decimals only
//! happens when a table is written.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{MilacError, Result};
use crate::numerics::CostMeter;

/// Exact operation count.
pub type Count = Ratio<i128>;

fn int(v: u64) -> Count {
    Count::from_integer(v as i128)
}

/// Digital and network cost of one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostPair {
    pub digital: Count,
    pub milac: Count,
}

impl CostPair {
    pub fn ratio(&self) -> Count {
        self.digital / self.milac
    }
}

/// Largest size argument the exact evaluation accepts.
pub const MAX_SIZE: u64 = 1 << 20;

fn require_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 || v > MAX_SIZE {
        return Err(MilacError::Invalid(format!("{name} must lie in 1..={MAX_SIZE}")));
    }
    Ok(())
}

/// LMMSE estimate: digital `8(XY^2 + X^2 Y + min(X^3, Y^3)/3)`, network `6XY`.
pub fn lmmse_costs(x: u64, y: u64) -> Result<CostPair> {
    require_positive("X", x)?;
    require_positive("Y", y)?;
    let (x, y) = (int(x), int(y));
    let small = if x < y { x } else { y };
    let digital = int(8) * (x * y * y + x * x * y + small * small * small / int(3));
    Ok(CostPair { digital, milac: int(6) * x * y })
}

/// Matrix inversion: digital `8N^3/3`, network `4N^2`.
pub fn inversion_costs(n: u64) -> Result<CostPair> {
    require_positive("N", n)?;
    let n = int(n);
    Ok(CostPair {
        digital: int(8) * n * n * n / int(3),
        milac: int(4) * n * n,
    })
}

/// Kalman step: digital `24X^3 + 16X^2 Y + 8XY^2 + 8Y^3/3`, network
/// `26X^2 + 12XY`.
pub fn kalman_costs(x: u64, y: u64) -> Result<CostPair> {
    require_positive("X", x)?;
    require_positive("Y", y)?;
    let (x, y) = (int(x), int(y));
    Ok(CostPair {
        digital: int(24) * x * x * x + int(16) * x * x * y + int(8) * x * y * y + int(8) * y * y * y / int(3),
        milac: int(26) * x * x + int(12) * x * y,
    })
}

/// Operation whose costs a table compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostOp {
    Lmmse,
    Invert,
    Kalman,
}

impl CostOp {
    /// Costs at square size `n` (`X = Y = N`).
    pub fn square_costs(self, n: u64) -> Result<CostPair> {
        match self {
            CostOp::Lmmse => lmmse_costs(n, n),
            CostOp::Invert => inversion_costs(n),
            CostOp::Kalman => kalman_costs(n, n),
        }
    }
}

impl FromStr for CostOp {
    type Err = MilacError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lmmse" => Ok(CostOp::Lmmse),
            "invert" => Ok(CostOp::Invert),
            "kalman" => Ok(CostOp::Kalman),
            other => Err(MilacError::Invalid(format!("unknown operation '{other}'"))),
        }
    }
}

impl fmt::Display for CostOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostOp::Lmmse => "lmmse",
            CostOp::Invert => "invert",
            CostOp::Kalman => "kalman",
        })
    }
}

/// Named closed-form count over one or two size arguments.
#[derive(Debug, Clone, Copy)]
pub struct CostFormula {
    pub name: &'static str,
    pub arity: usize,
    eval: fn(u64, u64) -> Count,
}

impl CostFormula {
    /// Value at `(a, b)`; single-argument formulas ignore `b`.
    pub fn eval(&self, a: u64, b: u64) -> Count {
        (self.eval)(a, b)
    }
}

/// The formulas used throughout, digital then network for each operation.
pub fn formulas() -> [CostFormula; 6] {
    [
        CostFormula { name: "lmmse_digital", arity: 2, eval: |x, y| lmmse_costs(x.max(1), y.max(1)).unwrap().digital },
        CostFormula { name: "lmmse_milac", arity: 2, eval: |x, y| lmmse_costs(x.max(1), y.max(1)).unwrap().milac },
        CostFormula { name: "invert_digital", arity: 1, eval: |n, _| inversion_costs(n.max(1)).unwrap().digital },
        CostFormula { name: "invert_milac", arity: 1, eval: |n, _| inversion_costs(n.max(1)).unwrap().milac },
        CostFormula { name: "kalman_digital", arity: 2, eval: |x, y| kalman_costs(x.max(1), y.max(1)).unwrap().digital },
        CostFormula { name: "kalman_milac", arity: 2, eval: |x, y| kalman_costs(x.max(1), y.max(1)).unwrap().milac },
    ]
}

/// One row of a speedup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpeedupRow {
    pub size: u64,
    pub costs: CostPair,
}

/// Costs at every size, square instances.
pub fn speedup_table(op: CostOp, sizes: &[u64]) -> Result<Vec<SpeedupRow>> {
    sizes
        .iter()
        .map(|&size| Ok(SpeedupRow { size, costs: op.square_costs(size)? }))
        .collect()
}

/// Converts an exact count to the nearest `f64`.
pub fn to_f64(c: Count) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.5e}");
    let (mantissa, e) = s.split_once('e').expect("exponent format");
    let e: i32 = e.parse().expect("exponent");
    if !(-4..6).contains(&e) {
        let m = trim_zeros(mantissa);
        let sign = if e < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", e.abs())
    } else {
        let decimals = (5 - e).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV with header `size,digital_ops,milac_ops,ratio`.
pub fn table_csv(rows: &[SpeedupRow]) -> String {
    let mut out = String::from("size,digital_ops,milac_ops,ratio\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.size,
            format_sig6(to_f64(row.costs.digital)),
            format_sig6(to_f64(row.costs.milac)),
            format_sig6(to_f64(row.costs.ratio())),
        );
    }
    out
}

/// Parses `start:stop:x<k>` (geometric) or `start:stop:+<k>` (arithmetic);
/// `start:stop` defaults to doubling.
pub fn parse_sizes(spec: &str) -> Result<Vec<u64>> {
    let bad = || MilacError::Invalid(format!("invalid size range '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let start: u64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: u64 = parts[1].trim().parse().map_err(|_| bad())?;
    if start == 0 || stop < start {
        return Err(bad());
    }
    let step = parts.get(2).copied().unwrap_or("x2").trim();
    let mut sizes = Vec::new();
    if let Some(f) = step.strip_prefix('x') {
        let factor: u64 = f.parse().map_err(|_| bad())?;
        if factor < 2 {
            return Err(bad());
        }
        let mut s = start;
        while s <= stop {
            sizes.push(s);
            s = match s.checked_mul(factor) {
                Some(next) => next,
                None => break,
            };
        }
    } else if let Some(k) = step.strip_prefix('+') {
        let inc: u64 = k.parse().map_err(|_| bad())?;
        if inc == 0 {
            return Err(bad());
        }
        let mut s = start;
        while s <= stop {
            sizes.push(s);
            s = match s.checked_add(inc) {
                Some(next) => next,
                None => break,
            };
        }
    } else {
        return Err(bad());
    }
    if sizes.len() > 1 << 20 {
        return Err(MilacError::Invalid(format!("size range '{spec}' has too many entries")));
    }
    Ok(sizes)
}

/// Measured meter against a formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconciliation {
    pub measured: u64,
    pub formula: f64,
    /// `measured - formula`.
    pub gap: f64,
    /// `slack * formula + 16 (X + Y)`.
    pub allowance: f64,
    pub pass: bool,
}

/// Passes when `|measured - formula| <= slack * formula + 16 (x + y)`.
/// `slack` must lie in `(0, 0.25]`.
pub fn reconcile(measured: &CostMeter, formula: Count, slack: f64, x: u64, y: u64) -> Result<Reconciliation> {
    if !(slack > 0.0 && slack <= 0.25) {
        return Err(MilacError::Invalid(format!("slack {slack} outside (0, 0.25]")));
    }
    let formula = to_f64(formula);
    let measured_total = measured.total();
    let gap = measured_total as f64 - formula;
    let allowance = slack * formula + 16.0 * (x + y) as f64;
    Ok(Reconciliation {
        measured: measured_total,
        formula,
        gap,
        allowance,
        pass: gap.abs() <= allowance,
    })
}
