//! Real-operation accounting.
//!
//! Every metered routine books its work here using a fixed convention for
//! complex arithmetic:
//!
//! | complex op            | real muls | real adds | real subs | real divs | total |
//! |-----------------------|-----------|-----------|-----------|-----------|-------|
//! | add                   |           | 2         |           |           | 2     |
//! | sub                   |           |           | 2         |           | 2     |
//! | mul                   | 4         | 2         |           |           | 6     |
//! | div                   | 6         | 2         | 1         | 2         | 11    |
//! | scale by a real value | 2         |           |           |           | 2     |
//!
//! The 3-multiplication (Karatsuba-style) complex product is not used; the
//! six-operation product is the reference convention.

use std::fmt;
use std::ops::{Add, AddAssign};

/// Real cost of one complex division: (muls, adds, subs, divs).
pub const COMPLEX_DIV_COST: (u64, u64, u64, u64) = (6, 2, 1, 2);

/// Tallies of complex-level operations, kept next to the real counters so
/// that complex-operation formulas can be checked directly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ComplexTally {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
}

/// Counter of real additions, subtractions, multiplications and divisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostMeter {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
    pub complex: ComplexTally,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs
    }

    pub fn real_add(&mut self, n: u64) {
        self.adds += n;
    }

    pub fn real_sub(&mut self, n: u64) {
        self.subs += n;
    }

    pub fn real_mul(&mut self, n: u64) {
        self.muls += n;
    }

    pub fn real_div(&mut self, n: u64) {
        self.divs += n;
    }

    pub fn complex_add(&mut self, n: u64) {
        self.adds += 2 * n;
        self.complex.adds += n;
    }

    pub fn complex_sub(&mut self, n: u64) {
        self.subs += 2 * n;
        self.complex.subs += n;
    }

    pub fn complex_mul(&mut self, n: u64) {
        self.muls += 4 * n;
        self.adds += 2 * n;
        self.complex.muls += n;
    }

    pub fn complex_div(&mut self, n: u64) {
        let (m, a, s, d) = COMPLEX_DIV_COST;
        self.muls += m * n;
        self.adds += a * n;
        self.subs += s * n;
        self.divs += d * n;
        self.complex.divs += n;
    }

    /// Complex value times a real scalar.
    pub fn scale_real(&mut self, n: u64) {
        self.muls += 2 * n;
    }

    /// Renders the summary as `key=value` lines.
    pub fn summary_lines(&self) -> String {
        format!(
            "adds={}\nsubs={}\nmuls={}\ndivs={}\ntotal={}\n",
            self.adds,
            self.subs,
            self.muls,
            self.divs,
            self.total()
        )
    }
}

impl AddAssign for CostMeter {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.subs += rhs.subs;
        self.muls += rhs.muls;
        self.divs += rhs.divs;
        self.complex.adds += rhs.complex.adds;
        self.complex.subs += rhs.complex.subs;
        self.complex.muls += rhs.complex.muls;
        self.complex.divs += rhs.complex.divs;
    }
}

impl Add for CostMeter {
    type Output = CostMeter;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl fmt::Display for CostMeter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adds={} subs={} muls={} divs={} total={}",
            self.adds,
            self.subs,
            self.muls,
            self.divs,
            self.total()
        )
    }
}
