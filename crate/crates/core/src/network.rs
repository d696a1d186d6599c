//! Physical network model: tunable components, admittance matrix, system
//! matrix, and the steady-state port solution.
//!
//! Ports `0..N` are driven by voltage sources with series admittance `Y0`;
//! ports `N..N+M` are terminated in matched loads `Y0`. With
//! `P = Y/Y0 + I` and `ũ = [u; 0]`, the port voltages solve `P v = ũ`.

use crate::error::{MilacError, Result, SingularSite};
use crate::numerics::{
    mat_vec, relative_error_vec, ComplexMatrix, ComplexVector, CostMeter, LuFactors, C64, ONE,
    ZERO,
};

/// Reference admittance of a 50 Ω system, in siemens.
pub const DEFAULT_Y0: f64 = 0.02;

/// `P x P` table of tunable admittances (siemens).
///
/// Entry `(k, k)` is the component from port `k` to ground; entry `(i, k)`
/// with `i != k` is the component between ports `i` and `k`. The table is
/// directional: `(i, k)` and `(k, i)` are independent values, so reciprocity
/// is not assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentGrid {
    values: ComplexMatrix,
}

impl ComponentGrid {
    pub fn new(values: ComplexMatrix) -> Result<Self> {
        if !values.is_square() {
            return Err(MilacError::dim(
                "component grid",
                "square table",
                format!("{}x{}", values.rows(), values.cols()),
            ));
        }
        if !values.is_finite() {
            return Err(MilacError::Invalid("component grid has non-finite values".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            values: ComplexMatrix::zeros(size, size),
        }
    }

    pub fn size(&self) -> usize {
        self.values.rows()
    }

    /// Number of tunable components, `P^2`.
    pub fn component_count(&self) -> usize {
        self.size() * self.size()
    }

    pub fn get(&self, i: usize, k: usize) -> C64 {
        self.values[(i, k)]
    }

    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    pub fn into_values(self) -> ComplexMatrix {
        self.values
    }

    /// Largest `|Y_ik - Y_ki|`; zero for a reciprocal network.
    pub fn reciprocity_defect(&self) -> f64 {
        self.values.symmetry_defect()
    }
}

/// `[Y]_ik = -Y_ik` off the diagonal, `[Y]_kk = Σ_p Y_pk`.
pub fn y_from_components(grid: &ComponentGrid) -> ComplexMatrix {
    let p = grid.size();
    let g = grid.values();
    ComplexMatrix::from_fn(p, p, |i, k| {
        if i == k {
            (0..p).fold(ZERO, |acc, r| acc + g[(r, k)])
        } else {
            -g[(i, k)]
        }
    })
}

/// Inverse of [`y_from_components`]: `Y_ik = -[Y]_ik`, `Y_kk = Σ_p [Y]_pk`.
pub fn components_from_y(y: &ComplexMatrix) -> Result<ComponentGrid> {
    if !y.is_square() {
        return Err(MilacError::dim("components_from_y", "square matrix", format!("{}x{}", y.rows(), y.cols())));
    }
    let p = y.rows();
    Ok(ComponentGrid {
        values: ComplexMatrix::from_fn(p, p, |i, k| {
            if i == k {
                (0..p).fold(ZERO, |acc, r| acc + y[(r, k)])
            } else {
                -y[(i, k)]
            }
        }),
    })
}

fn check_y0(y0: f64) -> Result<()> {
    if !y0.is_finite() || y0 <= 0.0 {
        return Err(MilacError::Invalid(format!("reference admittance must be positive, got {y0}")));
    }
    Ok(())
}

/// `P = Y / Y0 + I`.
pub fn p_from_y(y: &ComplexMatrix, y0: f64) -> Result<ComplexMatrix> {
    check_y0(y0)?;
    if !y.is_square() {
        return Err(MilacError::dim("p_from_y", "square matrix", format!("{}x{}", y.rows(), y.cols())));
    }
    Ok(ComplexMatrix::from_fn(y.rows(), y.cols(), |i, k| {
        let z = y[(i, k)] / y0;
        if i == k {
            z + ONE
        } else {
            z
        }
    }))
}

/// `Y = Y0 P - Y0 I`.
pub fn y_from_p(p: &ComplexMatrix, y0: f64) -> Result<ComplexMatrix> {
    check_y0(y0)?;
    if !p.is_square() {
        return Err(MilacError::dim("y_from_p", "square matrix", format!("{}x{}", p.rows(), p.cols())));
    }
    Ok(ComplexMatrix::from_fn(p.rows(), p.cols(), |i, k| {
        let z = p[(i, k)] * y0;
        if i == k {
            z - y0
        } else {
            z
        }
    }))
}

/// Component values realizing a given system matrix:
/// `Y_ik = -Y0 [P]_ik` off the diagonal, `Y_kk = Y0 Σ_p [P]_pk - Y0`.
pub fn components_from_p(p: &ComplexMatrix, y0: f64) -> Result<ComponentGrid> {
    components_from_p_metered(p, y0, &mut CostMeter::new())
}

/// [`components_from_p`] with the digital cost of the component setting
/// booked: two real multiplications per off-diagonal entry, and per column
/// a complex column sum, one real scaling and one real subtraction. For a
/// `P x P` matrix that is `4P^2 - P` real operations.
pub fn components_from_p_metered(p: &ComplexMatrix, y0: f64, meter: &mut CostMeter) -> Result<ComponentGrid> {
    check_y0(y0)?;
    if !p.is_square() {
        return Err(MilacError::dim("components_from_p", "square matrix", format!("{}x{}", p.rows(), p.cols())));
    }
    let n = p.rows();
    let mut values = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut col_sum = ZERO;
        for i in 0..n {
            col_sum += p[(i, k)];
            if i != k {
                values[(i, k)] = p[(i, k)] * (-y0);
                meter.scale_real(1);
            }
        }
        meter.complex_add(n.saturating_sub(1) as u64);
        values[(k, k)] = col_sum * y0 - y0;
        meter.scale_real(1);
        meter.real_sub(1);
    }
    Ok(ComponentGrid { values })
}

/// A configured network: `N` driven ports, `M` matched ports, reference
/// admittance `Y0` and the component grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MilacNetwork {
    n_inputs: usize,
    n_matched: usize,
    y0: f64,
    grid: ComponentGrid,
}

impl MilacNetwork {
    pub fn new(n_inputs: usize, y0: f64, grid: ComponentGrid) -> Result<Self> {
        check_y0(y0)?;
        if n_inputs == 0 || n_inputs > grid.size() {
            return Err(MilacError::Invalid(format!(
                "input port count {n_inputs} must be in 1..={}",
                grid.size()
            )));
        }
        Ok(Self {
            n_inputs,
            n_matched: grid.size() - n_inputs,
            y0,
            grid,
        })
    }

    /// Network realizing the system matrix `p` with `n_inputs` driven ports.
    pub fn from_p(p: &ComplexMatrix, y0: f64, n_inputs: usize) -> Result<Self> {
        Self::new(n_inputs, y0, components_from_p(p, y0)?)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_matched(&self) -> usize {
        self.n_matched
    }

    pub fn ports(&self) -> usize {
        self.n_inputs + self.n_matched
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn grid(&self) -> &ComponentGrid {
        &self.grid
    }

    pub fn admittance(&self) -> ComplexMatrix {
        y_from_components(&self.grid)
    }

    pub fn system_matrix(&self) -> ComplexMatrix {
        p_from_y(&self.admittance(), self.y0).expect("validated y0")
    }

    /// Settles the network once so that several inputs can be applied.
    /// The elimination is booked on `physics`.
    pub fn configure(&self, physics: &mut CostMeter) -> Result<ConfiguredNetwork> {
        let y = self.admittance();
        let p = p_from_y(&y, self.y0)?;
        let lu = LuFactors::factor(&p, physics).map_err(network_singular)?;
        Ok(ConfiguredNetwork {
            n_inputs: self.n_inputs,
            n_matched: self.n_matched,
            y,
            lu,
        })
    }
}

fn network_singular(e: MilacError) -> MilacError {
    if e.is_singular() {
        MilacError::singular(SingularSite::Network)
    } else {
        e
    }
}

/// Network with its operating-point system already factored.
#[derive(Debug, Clone)]
pub struct ConfiguredNetwork {
    n_inputs: usize,
    n_matched: usize,
    y: ComplexMatrix,
    lu: LuFactors,
}

impl ConfiguredNetwork {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_matched(&self) -> usize {
        self.n_matched
    }

    /// Applies source voltages `u` on the driven ports and reads every port.
    pub fn measure(&self, u: &ComplexVector, physics: &mut CostMeter) -> Result<PortSolution> {
        let n = self.n_inputs;
        if u.len() != n {
            return Err(MilacError::dim("simulate input", n, u.len()));
        }
        let u_tilde = u.concat(&ComplexVector::zeros(self.n_matched));
        let v = self.lu.solve(&u_tilde, physics)?;
        let i = mat_vec(&self.y, &v, physics)?;
        Ok(PortSolution {
            v1: v.head(n),
            v2: v.tail_from(n),
            v,
            i,
        })
    }
}

/// Port voltages (volts) and currents (amperes) at the operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSolution {
    pub v: ComplexVector,
    pub v1: ComplexVector,
    pub v2: ComplexVector,
    pub i: ComplexVector,
}

impl PortSolution {
    /// Relative residuals of the terminations: `i1 = Y0 (u - v1)` and
    /// `i2 = -Y0 v2`, combined into one vector norm.
    pub fn boundary_residual(&self, u: &ComplexVector, y0: f64) -> f64 {
        let n = self.v1.len();
        let expected = ComplexVector::from_fn(self.v.len(), |p| {
            if p < n {
                (u[p] - self.v1[p]) * y0
            } else {
                -self.v2[p - n] * y0
            }
        });
        relative_error_vec(&self.i, &expected)
    }
}

/// Solves the network for input `u`; elimination and current evaluation are
/// booked on `physics`.
pub fn simulate(net: &MilacNetwork, u: &ComplexVector, physics: &mut CostMeter) -> Result<PortSolution> {
    net.configure(physics)?.measure(u, physics)
}
