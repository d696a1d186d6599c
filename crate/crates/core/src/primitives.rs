//! Block-inverse formulas and the three measurement primitives.
//!
//! `milac1`, `milac2` and `milac3` read the first `N` ports, the last `M`
//! ports, or all ports of a configured network. They evaluate the network
//! physics (a linear solve booked on the caller's physics meter); the
//! closed forms in this module compute the same outputs digitally from the
//! blocks of `P` and serve as the oracle.

use crate::error::{MilacError, Result, SingularSite};
use crate::network::{ComponentGrid, ConfiguredNetwork, MilacNetwork};
use crate::numerics::{gauss_invert, mat_mul, mat_sub, mat_vec, ComplexMatrix, ComplexVector, CostMeter};

/// Blocks of an inverse `[[A', B'], [C', D']]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseBlocks {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl InverseBlocks {
    pub fn assemble(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d).expect("consistent blocks")
    }
}

fn relabel(site: SingularSite) -> impl Fn(MilacError) -> MilacError {
    move |e| {
        if e.is_singular() {
            MilacError::singular(site.clone())
        } else {
            e
        }
    }
}

fn check_blocks(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix) -> Result<()> {
    if !a.is_square() || !d.is_square() {
        return Err(MilacError::dim("block inverse", "square diagonal blocks", format!("A {:?}, D {:?}", a.shape(), d.shape())));
    }
    ComplexMatrix::from_blocks(a, b, c, d).map(|_| ())
}

/// Block inverse through `A^-1` and `S = C A^-1 B - D`:
///
/// ```text
/// A' = A^-1 - A^-1 B S^-1 C A^-1     B' = A^-1 B S^-1
/// C' = S^-1 C A^-1                   D' = -S^-1
/// ```
pub fn prop1_blocks_via_a(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    meter: &mut CostMeter,
) -> Result<InverseBlocks> {
    check_blocks(a, b, c, d)?;
    let a_inv = gauss_invert(a, meter).map_err(relabel(SingularSite::BlockA))?;
    let a_inv_b = mat_mul(&a_inv, b, meter)?;
    let c_a_inv = mat_mul(c, &a_inv, meter)?;
    let schur = mat_sub(&mat_mul(c, &a_inv_b, meter)?, d, meter)?;
    let s_inv = gauss_invert(&schur, meter).map_err(relabel(SingularSite::SchurViaA))?;

    let b_new = mat_mul(&a_inv_b, &s_inv, meter)?;
    let c_new = mat_mul(&s_inv, &c_a_inv, meter)?;
    let a_new = mat_sub(&a_inv, &mat_mul(&b_new, &c_a_inv, meter)?, meter)?;
    Ok(InverseBlocks {
        a: a_new,
        b: b_new,
        c: c_new,
        d: s_inv.neg(),
    })
}

/// Block inverse through `D^-1` and `T = B D^-1 C - A`:
///
/// ```text
/// A' = -T^-1                         B' = T^-1 B D^-1
/// C' = D^-1 C T^-1                   D' = D^-1 - D^-1 C T^-1 B D^-1
/// ```
pub fn prop1_blocks_via_d(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    meter: &mut CostMeter,
) -> Result<InverseBlocks> {
    check_blocks(a, b, c, d)?;
    let d_inv = gauss_invert(d, meter).map_err(relabel(SingularSite::BlockD))?;
    let b_d_inv = mat_mul(b, &d_inv, meter)?;
    let d_inv_c = mat_mul(&d_inv, c, meter)?;
    let schur = mat_sub(&mat_mul(&b_d_inv, c, meter)?, a, meter)?;
    let t_inv = gauss_invert(&schur, meter).map_err(relabel(SingularSite::SchurViaD))?;

    let b_new = mat_mul(&t_inv, &b_d_inv, meter)?;
    let c_new = mat_mul(&d_inv_c, &t_inv, meter)?;
    let d_new = mat_sub(&d_inv, &mat_mul(&c_new, &b_d_inv, meter)?, meter)?;
    Ok(InverseBlocks {
        a: t_inv.neg(),
        b: b_new,
        c: c_new,
        d: d_new,
    })
}

/// A system matrix split after its first `n` rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub p11: ComplexMatrix,
    pub p12: ComplexMatrix,
    pub p21: ComplexMatrix,
    pub p22: ComplexMatrix,
}

impl BlockPartition {
    pub fn new(p: &ComplexMatrix, n: usize) -> Result<Self> {
        if !p.is_square() || n > p.rows() {
            return Err(MilacError::dim("block partition", format!("square matrix with at least {n} rows"), format!("{:?}", p.shape())));
        }
        let m = p.rows() - n;
        Ok(Self {
            p11: p.block(0, 0, n, n),
            p12: p.block(0, n, n, m),
            p21: p.block(n, 0, m, n),
            p22: p.block(n, n, m, m),
        })
    }

    pub fn n(&self) -> usize {
        self.p11.rows()
    }

    pub fn m(&self) -> usize {
        self.p22.rows()
    }

    pub fn assemble(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.p11, &self.p12, &self.p21, &self.p22).expect("consistent blocks")
    }
}

/// Which diagonal block the closed form inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ViaP11,
    ViaP22,
}

/// Closed-form outputs `(v1, v2)` for input `u` on the first `N` ports.
pub fn closed_form_outputs(
    part: &BlockPartition,
    u: &ComplexVector,
    route: Route,
    meter: &mut CostMeter,
) -> Result<(ComplexVector, ComplexVector)> {
    if u.len() != part.n() {
        return Err(MilacError::dim("closed form input", part.n(), u.len()));
    }
    let blocks = match route {
        Route::ViaP11 => prop1_blocks_via_a(&part.p11, &part.p12, &part.p21, &part.p22, meter)?,
        Route::ViaP22 => prop1_blocks_via_d(&part.p11, &part.p12, &part.p21, &part.p22, meter)?,
    };
    Ok((mat_vec(&blocks.a, u, meter)?, mat_vec(&blocks.c, u, meter)?))
}

/// Closed-form outputs through the `P22` route, falling back to `P11` when
/// `P22` is singular (or empty, as with no matched ports).
pub fn closed_form_canonical(
    part: &BlockPartition,
    u: &ComplexVector,
    meter: &mut CostMeter,
) -> Result<(ComplexVector, ComplexVector)> {
    if part.m() > 0 {
        match closed_form_outputs(part, u, Route::ViaP22, meter) {
            Ok(out) => return Ok(out),
            Err(e) if e.is_singular() => {}
            Err(e) => return Err(e),
        }
    }
    closed_form_outputs(part, u, Route::ViaP11, meter)
}

fn configured(grid: &ComponentGrid, y0: f64, n_inputs: usize, physics: &mut CostMeter) -> Result<ConfiguredNetwork> {
    MilacNetwork::new(n_inputs, y0, grid.clone())?.configure(physics)
}

/// Output on the first `N` ports.
pub fn milac1(
    u: &ComplexVector,
    grid: &ComponentGrid,
    y0: f64,
    n_inputs: usize,
    physics: &mut CostMeter,
) -> Result<ComplexVector> {
    Ok(configured(grid, y0, n_inputs, physics)?.measure(u, physics)?.v1)
}

/// Output on the last `M = P - N` ports.
pub fn milac2(
    u: &ComplexVector,
    grid: &ComponentGrid,
    y0: f64,
    n_inputs: usize,
    physics: &mut CostMeter,
) -> Result<ComplexVector> {
    if n_inputs >= grid.size() {
        return Err(MilacError::Invalid("milac2 needs at least one matched port".into()));
    }
    Ok(configured(grid, y0, n_inputs, physics)?.measure(u, physics)?.v2)
}

/// Output on all ports. The number of driven ports is `u.len()`; when it
/// equals the grid size there are no matched ports and the result is
/// `P^-1 u`.
pub fn milac3(u: &ComplexVector, grid: &ComponentGrid, y0: f64, physics: &mut CostMeter) -> Result<ComplexVector> {
    Ok(configured(grid, y0, u.len(), physics)?.measure(u, physics)?.v)
}

/// A network configured once and probed repeatedly, as the column loops of
/// the covariance and inversion algorithms do.
#[derive(Debug, Clone)]
pub struct MilacSession {
    net: ConfiguredNetwork,
}

impl MilacSession {
    pub fn new(grid: &ComponentGrid, y0: f64, n_inputs: usize, physics: &mut CostMeter) -> Result<Self> {
        Ok(Self {
            net: configured(grid, y0, n_inputs, physics)?,
        })
    }

    pub fn milac1(&self, u: &ComplexVector, physics: &mut CostMeter) -> Result<ComplexVector> {
        Ok(self.net.measure(u, physics)?.v1)
    }

    pub fn milac2(&self, u: &ComplexVector, physics: &mut CostMeter) -> Result<ComplexVector> {
        if self.net.n_matched() == 0 {
            return Err(MilacError::Invalid("milac2 needs at least one matched port".into()));
        }
        Ok(self.net.measure(u, physics)?.v2)
    }

    pub fn milac3(&self, u: &ComplexVector, physics: &mut CostMeter) -> Result<ComplexVector> {
        Ok(self.net.measure(u, physics)?.v)
    }
}
