//! Lossless realization of a complex-admittance network.
//!
//! A network with admittance `Y` (`P` ports, `N` driven) is replaced by a
//! purely reactive network `jB̄` with `2P` ports and real susceptance
//! matrix `B̄`. Driving it with `ū = [u; j u]` produces
//! `v̄ = [-j v1; v1; -j v2; v2]`, where `v1`, `v2` are the outputs of the
//! original network.

use crate::error::{MilacError, Result};
use crate::network::components_from_y;
use crate::numerics::{
    solve_linear, ComplexMatrix, ComplexVector, CostMeter, RealMatrix, C64, J, ONE, ZERO,
};

/// Real susceptance matrix of the lifted network, `2P x 2P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptanceMatrix {
    bbar: RealMatrix,
    n_inputs: usize,
    n_matched: usize,
}

impl SusceptanceMatrix {
    pub fn matrix(&self) -> &RealMatrix {
        &self.bbar
    }

    /// Driven ports of the original network.
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Matched ports of the original network.
    pub fn n_matched(&self) -> usize {
        self.n_matched
    }

    /// Ports of the lifted network, `2P`.
    pub fn ports(&self) -> usize {
        self.bbar.rows()
    }

    /// Lossless admittance `jB̄`.
    pub fn admittance(&self) -> ComplexMatrix {
        self.bbar.to_complex().scale(J)
    }

    /// `P̄ = jB̄/Y0 + I`.
    pub fn system_matrix(&self, y0: f64) -> ComplexMatrix {
        let n = self.ports();
        ComplexMatrix::from_fn(n, n, |i, k| {
            let re = if i == k { 1.0 } else { 0.0 };
            C64::new(re, self.bbar[(i, k)] / y0)
        })
    }

    /// `max |B̄ - B̄^T|`; nonzero values mean non-reciprocal elements.
    pub fn asymmetry(&self) -> f64 {
        self.bbar.symmetry_defect()
    }
}

/// `[[Re Z, Im Z], [-Im Z, Re Z]]` written at `(r0, c0)` of `out`, with
/// `Z` of shape `rows x cols` and the second block row/column offset by
/// `(dr, dc)`.
fn write_expansion(out: &mut RealMatrix, z: &ComplexMatrix, r0: usize, c0: usize, dr: usize, dc: usize) {
    for i in 0..z.rows() {
        for k in 0..z.cols() {
            let v = z[(i, k)];
            out[(r0 + i, c0 + k)] = v.re;
            out[(r0 + i, c0 + dc + k)] = v.im;
            out[(r0 + dr + i, c0 + k)] = -v.im;
            out[(r0 + dr + i, c0 + dc + k)] = v.re;
        }
    }
}

/// Adds `y0 [[I, I], [-I, I]]` to the square diagonal block at `offset`
/// whose halves have size `n`.
fn add_port_coupling(out: &mut RealMatrix, offset: usize, n: usize, y0: f64) {
    for i in 0..n {
        out[(offset + i, offset + i)] += y0;
        out[(offset + i, offset + n + i)] += y0;
        out[(offset + n + i, offset + i)] -= y0;
        out[(offset + n + i, offset + n + i)] += y0;
    }
}

fn check_admittance(y: &ComplexMatrix, n_inputs: usize) -> Result<()> {
    if !y.is_square() {
        return Err(MilacError::dim("admittance", "square matrix", format!("{}x{}", y.rows(), y.cols())));
    }
    if n_inputs == 0 || n_inputs > y.rows() {
        return Err(MilacError::Invalid(format!(
            "driven port count {n_inputs} must lie in 1..={}",
            y.rows()
        )));
    }
    if !y.is_finite() {
        return Err(MilacError::Invalid("admittance has non-finite entries".into()));
    }
    Ok(())
}

/// Susceptance matrix for `Y` with `n_inputs` driven ports. Uses the
/// single-block layout when every port is driven.
pub fn build_susceptance(y: &ComplexMatrix, n_inputs: usize, y0: f64) -> Result<SusceptanceMatrix> {
    check_admittance(y, n_inputs)?;
    if n_inputs == y.rows() {
        return build_susceptance_all_driven(y, y0);
    }
    let n = n_inputs;
    let m = y.rows() - n;
    let mut bbar = RealMatrix::zeros(2 * (n + m), 2 * (n + m));
    let blocks = [
        (y.block(0, 0, n, n), 0, 0, n, n),
        (y.block(0, n, n, m), 0, 2 * n, n, m),
        (y.block(n, 0, m, n), 2 * n, 0, m, n),
        (y.block(n, n, m, m), 2 * n, 2 * n, m, m),
    ];
    for (z, r0, c0, dr, dc) in &blocks {
        write_expansion(&mut bbar, z, *r0, *c0, *dr, *dc);
    }
    add_port_coupling(&mut bbar, 0, n, y0);
    add_port_coupling(&mut bbar, 2 * n, m, y0);
    Ok(SusceptanceMatrix { bbar, n_inputs: n, n_matched: m })
}

/// Single-block layout for a network driven on every port.
pub fn build_susceptance_all_driven(y: &ComplexMatrix, y0: f64) -> Result<SusceptanceMatrix> {
    check_admittance(y, y.rows())?;
    let n = y.rows();
    let mut bbar = RealMatrix::zeros(2 * n, 2 * n);
    write_expansion(&mut bbar, y, 0, 0, n, n);
    add_port_coupling(&mut bbar, 0, n, y0);
    Ok(SusceptanceMatrix { bbar, n_inputs: n, n_matched: 0 })
}

/// Input and port voltages of the lifted network.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSignals {
    pub ubar: ComplexVector,
    pub vbar: ComplexVector,
}

/// Drives the lifted network with `[u; j u]` and solves for its port
/// voltages.
pub fn simulate_lossless(sus: &SusceptanceMatrix, u: &ComplexVector, y0: f64) -> Result<LiftedSignals> {
    let n = sus.n_inputs();
    if u.len() != n {
        return Err(MilacError::dim("lossless input", n, u.len()));
    }
    let ubar = u.concat(&u.scale(J));
    let rhs: ComplexVector = ubar.iter().copied().chain(std::iter::repeat_n(ZERO, 2 * sus.n_matched())).collect();
    let vbar = solve_linear(&sus.system_matrix(y0), &rhs, &mut CostMeter::new()).map_err(|e| match e {
        MilacError::Singular { .. } => MilacError::singular(crate::error::SingularSite::Network),
        other => other,
    })?;
    Ok(LiftedSignals { ubar, vbar })
}

/// Source index of each row of `Π`: rows take original blocks 1, 3, 2, 4
/// (sizes `N`, `M`, `N`, `M`).
pub fn permutation_indices(n: usize, m: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(2 * (n + m));
    idx.extend(0..n);
    idx.extend(2 * n..2 * n + m);
    idx.extend(n..2 * n);
    idx.extend(2 * n + m..2 * (n + m));
    idx
}

/// `Π` as an explicit 0/1 matrix.
pub fn permutation_matrix(n: usize, m: usize) -> RealMatrix {
    let idx = permutation_indices(n, m);
    let size = idx.len();
    RealMatrix::from_fn(size, size, |r, c| if idx[r] == c { 1.0 } else { 0.0 })
}

/// `Π v` using the index shortcut.
pub fn permute(v: &ComplexVector, n: usize, m: usize) -> ComplexVector {
    permutation_indices(n, m).into_iter().map(|i| v[i]).collect()
}

fn real_times_complex(a: &RealMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, k| (0..a.cols()).map(|p| b[(p, k)] * a[(i, p)]).sum())
}

/// `[-j v1; v1; -j v2; v2]` from the original port voltages `v`.
pub fn expected_lifted(v: &ComplexVector, n: usize) -> ComplexVector {
    let v1 = v.head(n);
    let v2 = v.tail_from(n);
    let minus_j = -J;
    v1.scale(minus_j).concat(&v1).concat(&v2.scale(minus_j)).concat(&v2)
}

/// Outcome of the lifted-network check.
#[derive(Debug, Clone, PartialEq)]
pub struct LosslessReport {
    /// `‖v̄ - [-j v1; v1; -j v2; v2]‖`.
    pub deviation: f64,
    /// `deviation / ‖v‖`.
    pub relative_deviation: f64,
    /// Largest entrywise difference.
    pub max_abs_deviation: f64,
    /// `Π v̄` equals `[-j v; v]`, with `Π` as a matrix and as an index map.
    pub permuted_structure_ok: bool,
    /// Every entry of `B̄` is a finite real number and `Re P̄ = I` exactly.
    pub susceptance_real: bool,
    /// Every component of the lifted grid is purely imaginary.
    pub components_lossless: bool,
    /// Component count of the lifted grid, `(2P)^2`.
    pub component_count: usize,
    /// `max |B̄ - B̄^T|`, reported only.
    pub asymmetry: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the lifted solution against the original network output `v`.
pub fn extract_and_verify(
    sus: &SusceptanceMatrix,
    lifted: &LiftedSignals,
    reference_v: &ComplexVector,
    y0: f64,
    tol: f64,
) -> LosslessReport {
    let n = sus.n_inputs();
    let m = sus.n_matched();
    let shape_ok = reference_v.len() == n + m && lifted.vbar.len() == 2 * (n + m);
    let (deviation, max_abs, permuted_ok) = if shape_ok {
        let expected = expected_lifted(reference_v, n);
        let diff = lifted.vbar.minus(&expected);

        let stacked = reference_v.scale(-J).concat(reference_v);
        let pi = permutation_matrix(n, m);
        let via_matrix = real_times_complex(&pi, &ComplexMatrix::from_columns(2 * (n + m), std::slice::from_ref(&lifted.vbar)))
            .column(0);
        let via_index = permute(&lifted.vbar, n, m);
        let scale = reference_v.norm().max(f64::MIN_POSITIVE);
        let permuted_ok =
            via_matrix == via_index && via_index.minus(&stacked).norm() <= tol * scale;
        (diff.norm(), diff.max_abs(), permuted_ok)
    } else {
        (f64::INFINITY, f64::INFINITY, false)
    };
    let vnorm = reference_v.norm();
    let relative = if vnorm > 0.0 { deviation / vnorm } else { deviation };

    let pbar = sus.system_matrix(y0);
    let size = sus.ports();
    let susceptance_real = sus.matrix().is_finite()
        && (0..size).all(|i| (0..size).all(|k| pbar[(i, k)].re == if i == k { 1.0 } else { 0.0 }));
    let (components_lossless, component_count) = match components_from_y(&sus.admittance()) {
        Ok(grid) => (grid.values().as_slice().iter().all(|c| c.re == 0.0), grid.component_count()),
        Err(_) => (false, 0),
    };
    let pass = shape_ok && relative <= tol && permuted_ok && susceptance_real && components_lossless;
    LosslessReport {
        deviation,
        relative_deviation: relative,
        max_abs_deviation: max_abs,
        permuted_structure_ok: permuted_ok,
        susceptance_real,
        components_lossless,
        component_count,
        asymmetry: sus.asymmetry(),
        tol,
        pass,
    }
}

/// Largest entrywise gap between `Π P̄ Π^T` and
/// `(j/Y0) [[Re Y, Im Y], [-Im Y, Re Y]] + j [[I, I], [-I, I]] + I`.
pub fn permutation_identity_defect(sus: &SusceptanceMatrix, y: &ComplexMatrix, y0: f64) -> f64 {
    let n = sus.n_inputs();
    let m = sus.n_matched();
    let p = n + m;
    let pi = permutation_matrix(n, m);
    let pbar = sus.system_matrix(y0);
    let conj = real_times_complex(&pi, &real_times_complex(&pi, &pbar.transpose()).transpose());

    let mut expanded = RealMatrix::zeros(2 * p, 2 * p);
    write_expansion(&mut expanded, y, 0, 0, p, p);
    let mut coupling = RealMatrix::zeros(2 * p, 2 * p);
    add_port_coupling(&mut coupling, 0, p, 1.0);
    let target = ComplexMatrix::from_fn(2 * p, 2 * p, |i, k| {
        let id = if i == k { ONE } else { ZERO };
        J * (expanded[(i, k)] / y0) + J * coupling[(i, k)] + id
    });
    let mut worst: f64 = 0.0;
    for i in 0..2 * p {
        for k in 0..2 * p {
            worst = worst.max((conj[(i, k)] - target[(i, k)]).norm());
        }
    }
    worst
}
