//! LMMSE estimation for `y = H x + n`: digital closed forms and their analog
//! counterparts.
//!
//! The analog algorithms set the network components from a saddle-point
//! system matrix and read the answer off the ports:
//!
//! * estimator: `P = [[±Cn, H], [H^H, ∓Cx^-1]]`, input `y` on the first `Y`
//!   ports, estimate on the last `X` ports;
//! * error covariance: `P = [[Cx^-1, H^H], [H, -Cn]]`, basis inputs on the
//!   first `X` ports, covariance columns read back on the same ports;
//! * inversion: all ports driven, `P^-1` read column by column.
//!
//! Their digital cost is only the component setting. Work that depends on
//! `Cx` and `Cn` alone is precomputed and booked on a separate `offline`
//! meter; the network solve is booked on `physics`.

use rand::Rng;

use crate::error::{MilacError, Result};
use crate::network::{components_from_p_metered, ComponentGrid};
use crate::numerics::{
    cholesky, gauss_invert, mat_add, mat_mul, mat_sub, mat_vec, matvec, solve_linear,
    ComplexMatrix, ComplexVector, CostMeter, LuFactors, ZERO,
};
use crate::primitives::MilacSession;
use crate::synth;

/// Hermitian tolerance for covariance inputs, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Sign choice for the estimator system matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// `[[Cn, H], [H^H, -Cx^-1]]`
    Plus,
    /// `[[-Cn, H], [H^H, Cx^-1]]`
    Minus,
}

/// Which of the two equivalent closed forms to evaluate digitally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Information form, inverts an `X x X` matrix.
    One,
    /// Covariance form, inverts a `Y x Y` matrix.
    Two,
}

pub(crate) fn validate_covariance(c: &ComplexMatrix, what: &'static str) -> Result<()> {
    if !c.is_square() {
        return Err(MilacError::dim(what, "square matrix", format!("{}x{}", c.rows(), c.cols())));
    }
    let scale = c.max_abs().max(1.0);
    if c.hermitian_defect() > HERMITIAN_TOL * scale {
        return Err(MilacError::NotPositiveDefinite { what });
    }
    cholesky(c, what).map(|_| ())
}

/// `y = H x + n` with zero-mean `x`, `n`, covariances `Cx`, `Cn` and no
/// cross-covariance.
#[derive(Debug, Clone)]
pub struct LinearObservationModel {
    h: ComplexMatrix,
    cx: ComplexMatrix,
    cn: ComplexMatrix,
    cx_inv: ComplexMatrix,
    cn_inv: ComplexMatrix,
}

impl LinearObservationModel {
    /// Validates the shapes and Hermitian positive definiteness, then caches
    /// `Cx^-1` and `Cn^-1`.
    pub fn new(h: ComplexMatrix, cx: ComplexMatrix, cn: ComplexMatrix) -> Result<Self> {
        validate_covariance(&cx, "Cx")?;
        validate_covariance(&cn, "Cn")?;
        if h.rows() != cn.rows() || h.cols() != cx.rows() {
            return Err(MilacError::dim(
                "observation model",
                format!("H of shape {}x{}", cn.rows(), cx.rows()),
                format!("{}x{}", h.rows(), h.cols()),
            ));
        }
        let cx_inv = gauss_invert(&cx, &mut CostMeter::new())?;
        let cn_inv = gauss_invert(&cn, &mut CostMeter::new())?;
        Ok(Self { h, cx, cn, cx_inv, cn_inv })
    }

    /// Dimension of the unknown `x`.
    pub fn x_dim(&self) -> usize {
        self.cx.rows()
    }

    /// Dimension of the observation `y`.
    pub fn y_dim(&self) -> usize {
        self.cn.rows()
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn cx(&self) -> &ComplexMatrix {
        &self.cx
    }

    pub fn cn(&self) -> &ComplexMatrix {
        &self.cn
    }

    pub fn cx_inv(&self) -> &ComplexMatrix {
        &self.cx_inv
    }

    pub fn cn_inv(&self) -> &ComplexMatrix {
        &self.cn_inv
    }
}

/// Estimate with the meters of the run that produced it.
#[derive(Debug, Clone)]
pub struct LmmseResult {
    pub xhat: ComplexVector,
    /// Online digital work.
    pub meter: CostMeter,
    /// Precomputation that depends only on the covariances.
    pub offline: CostMeter,
    /// Network solves (zero for digital runs).
    pub physics: CostMeter,
}

/// Error covariance with the meters of the run that produced it.
#[derive(Debug, Clone)]
pub struct CovResult {
    pub ce: ComplexMatrix,
    pub meter: CostMeter,
    pub offline: CostMeter,
    pub physics: CostMeter,
}

/// Inverse computed through the network.
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub inverse: ComplexMatrix,
    pub meter: CostMeter,
    pub physics: CostMeter,
}

fn check_y(model: &LinearObservationModel, y: &ComplexVector) -> Result<()> {
    if y.len() != model.y_dim() {
        return Err(MilacError::dim("observation", model.y_dim(), y.len()));
    }
    Ok(())
}

/// Digital LMMSE estimate. The inverse in either form is applied with one
/// Gauss solve.
pub fn lmmse_digital(model: &LinearObservationModel, y: &ComplexVector, form: Form) -> Result<LmmseResult> {
    check_y(model, y)?;
    let mut meter = CostMeter::new();
    let h = model.h();
    let h_adj = h.adjoint();
    let xhat = match form {
        Form::One => {
            let g = mat_mul(&h_adj, model.cn_inv(), &mut meter)?;
            let info = mat_add(&mat_mul(&g, h, &mut meter)?, model.cx_inv(), &mut meter)?;
            let rhs = mat_vec(&g, y, &mut meter)?;
            solve_linear(&info, &rhs, &mut meter)?
        }
        Form::Two => {
            let g = mat_mul(model.cx(), &h_adj, &mut meter)?;
            let s = mat_add(&mat_mul(h, &g, &mut meter)?, model.cn(), &mut meter)?;
            let z = solve_linear(&s, y, &mut meter)?;
            mat_vec(&g, &z, &mut meter)?
        }
    };
    Ok(LmmseResult {
        xhat,
        meter,
        offline: CostMeter::new(),
        physics: CostMeter::new(),
    })
}

/// Digital error covariance.
///
/// Form one: `Cx - Cx H^H (H Cx H^H + Cn)^-1 H Cx`; form two:
/// `(H^H Cn^-1 H + Cx^-1)^-1`.
pub fn cov_digital(model: &LinearObservationModel, form: Form) -> Result<CovResult> {
    let mut meter = CostMeter::new();
    let h = model.h();
    let h_adj = h.adjoint();
    let ce = match form {
        Form::One => {
            let g = mat_mul(model.cx(), &h_adj, &mut meter)?;
            let s = mat_add(&mat_mul(h, &g, &mut meter)?, model.cn(), &mut meter)?;
            let w = LuFactors::factor(&s, &mut meter)?.solve_columns(&g.adjoint(), &mut meter)?;
            mat_sub(model.cx(), &mat_mul(&g, &w, &mut meter)?, &mut meter)?
        }
        Form::Two => {
            let g = mat_mul(&h_adj, model.cn_inv(), &mut meter)?;
            let info = mat_add(&mat_mul(&g, h, &mut meter)?, model.cx_inv(), &mut meter)?;
            gauss_invert(&info, &mut meter)?
        }
    };
    Ok(CovResult {
        ce,
        meter,
        offline: CostMeter::new(),
        physics: CostMeter::new(),
    })
}

/// `[[±Cn, H], [H^H, ∓Cx^-1]]`.
pub fn build_p_lmmse(model: &LinearObservationModel, sign: Sign) -> ComplexMatrix {
    let (top, bottom) = match sign {
        Sign::Plus => (model.cn().clone(), model.cx_inv().neg()),
        Sign::Minus => (model.cn().neg(), model.cx_inv().clone()),
    };
    ComplexMatrix::from_blocks(&top, model.h(), &model.h().adjoint(), &bottom).expect("validated model")
}

/// `[[Cx^-1, H^H], [H, -Cn]]`.
pub fn build_p_cov(model: &LinearObservationModel) -> ComplexMatrix {
    ComplexMatrix::from_blocks(model.cx_inv(), &model.h().adjoint(), model.h(), &model.cn().neg())
        .expect("validated model")
}

/// Component setting for `P = [[d1, c], [c^H, d2]]`, split between the
/// parts that depend on `c` (booked on `online`) and the diagonal blocks
/// (booked on `offline`).
///
/// Online work: `-Y0 c` once for both coupling blocks (the lower-left block
/// is its conjugate), the coupling contributions to every column sum, and
/// the final scaling of each diagonal component; `6 n1 n2 + 3 (n1 + n2)`
/// real operations.
pub fn saddle_components(
    d1: &ComplexMatrix,
    coupling: &ComplexMatrix,
    d2: &ComplexMatrix,
    y0: f64,
    online: &mut CostMeter,
    offline: &mut CostMeter,
) -> Result<ComponentGrid> {
    let n1 = d1.rows();
    let n2 = d2.rows();
    if !d1.is_square() || !d2.is_square() || coupling.shape() != (n1, n2) {
        return Err(MilacError::dim(
            "saddle components",
            format!("coupling {n1}x{n2}"),
            format!("{}x{}", coupling.rows(), coupling.cols()),
        ));
    }
    let p = n1 + n2;
    let mut values = ComplexMatrix::zeros(p, p);

    // Diagonal blocks: off-diagonal components and partial column sums.
    let mut col_sums = vec![ZERO; p];
    for (offset, block) in [(0, d1), (n1, d2)] {
        let n = block.rows();
        for k in 0..n {
            let mut sum = ZERO;
            for i in 0..n {
                sum += block[(i, k)];
                if i != k {
                    values[(offset + i, offset + k)] = block[(i, k)] * (-y0);
                    offline.scale_real(1);
                }
            }
            offline.complex_add(n.saturating_sub(1) as u64);
            col_sums[offset + k] = sum;
        }
    }

    // Coupling blocks.
    for i in 0..n1 {
        for k in 0..n2 {
            let comp = coupling[(i, k)] * (-y0);
            online.scale_real(1);
            values[(i, n1 + k)] = comp;
            values[(n1 + k, i)] = comp.conj();
        }
    }
    for c in 0..n1 {
        for k in 0..n2 {
            col_sums[c] += coupling[(c, k)].conj();
        }
        online.complex_add(n2 as u64);
    }
    for k in 0..n2 {
        for i in 0..n1 {
            col_sums[n1 + k] += coupling[(i, k)];
        }
        online.complex_add(n1 as u64);
    }
    for (k, sum) in col_sums.into_iter().enumerate() {
        values[(k, k)] = sum * y0 - y0;
        online.scale_real(1);
        online.real_sub(1);
    }
    ComponentGrid::new(values)
}

/// Estimator through the network, from the raw blocks: `h` is `Y x X`,
/// `cx_inv` is `X x X`, `cn` is `Y x Y`, `y` has length `Y`.
pub fn lmmse_analog_blocks(
    y: &ComplexVector,
    h: &ComplexMatrix,
    cx_inv: &ComplexMatrix,
    cn: &ComplexMatrix,
    sign: Sign,
    y0: f64,
) -> Result<LmmseResult> {
    let mut meter = CostMeter::new();
    let mut offline = CostMeter::new();
    let mut physics = CostMeter::new();
    let (top, bottom) = match sign {
        Sign::Plus => (cn.clone(), cx_inv.neg()),
        Sign::Minus => (cn.neg(), cx_inv.clone()),
    };
    let grid = saddle_components(&top, h, &bottom, y0, &mut meter, &mut offline)?;
    let session = MilacSession::new(&grid, y0, cn.rows(), &mut physics)?;
    let xhat = session.milac2(y, &mut physics)?;
    Ok(LmmseResult { xhat, meter, offline, physics })
}

/// Error covariance through the network, from the raw blocks.
pub fn cov_analog_blocks(h: &ComplexMatrix, cx_inv: &ComplexMatrix, cn: &ComplexMatrix, y0: f64) -> Result<CovResult> {
    let mut meter = CostMeter::new();
    let mut offline = CostMeter::new();
    let mut physics = CostMeter::new();
    let grid = saddle_components(cx_inv, &h.adjoint(), &cn.neg(), y0, &mut meter, &mut offline)?;
    let x = cx_inv.rows();
    let session = MilacSession::new(&grid, y0, x, &mut physics)?;
    let mut ce = ComplexMatrix::zeros(x, x);
    for n in 0..x {
        let col = session.milac1(&ComplexVector::basis(x, n), &mut physics)?;
        ce.set_column(n, &col);
    }
    Ok(CovResult { ce, meter, offline, physics })
}

/// Estimator through the network (`Y` driven ports, `X` matched ports).
pub fn lmmse_via_milac(model: &LinearObservationModel, y: &ComplexVector, sign: Sign, y0: f64) -> Result<LmmseResult> {
    check_y(model, y)?;
    lmmse_analog_blocks(y, model.h(), model.cx_inv(), model.cn(), sign, y0)
}

/// Error covariance through the network, one basis input per column.
pub fn cov_via_milac(model: &LinearObservationModel, y0: f64) -> Result<CovResult> {
    cov_analog_blocks(model.h(), model.cx_inv(), model.cn(), y0)
}

/// Matrix inverse through a network driven on every port.
pub fn invert_via_milac(p: &ComplexMatrix, y0: f64) -> Result<InversionResult> {
    let mut meter = CostMeter::new();
    let mut physics = CostMeter::new();
    let grid = components_from_p_metered(p, y0, &mut meter)?;
    let n = p.rows();
    let session = MilacSession::new(&grid, y0, n, &mut physics)?;
    let mut inverse = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let col = session.milac3(&ComplexVector::basis(n, k), &mut physics)?;
        inverse.set_column(k, &col);
    }
    Ok(InversionResult { inverse, meter, physics })
}

/// Empirical mean squared error `E‖x̂ − x‖²` of the LMMSE estimator over
/// `samples` draws of circularly symmetric Gaussian `x` and `n`.
pub fn monte_carlo_mse<R: Rng + ?Sized>(model: &LinearObservationModel, samples: usize, rng: &mut R) -> Result<f64> {
    let lx = cholesky(model.cx(), "Cx")?;
    let ln = cholesky(model.cn(), "Cn")?;
    // Gain W = Cx H^H (H Cx H^H + Cn)^-1, formed once.
    let g = crate::numerics::matmul(model.cx(), &model.h().adjoint());
    let s = crate::numerics::matmul(model.h(), &g).plus(model.cn());
    let s_inv = crate::numerics::inverse(&s)?;
    let w = crate::numerics::matmul(&g, &s_inv);
    let mut total = 0.0;
    for _ in 0..samples {
        let x = synth::circular_gaussian(&lx, rng);
        let n = synth::circular_gaussian(&ln, rng);
        let y = matvec(model.h(), &x).plus(&n);
        let err = matvec(&w, &y).minus(&x);
        total += err.norm().powi(2);
    }
    Ok(total / samples as f64)
}

/// `trace(Ce)`.
pub fn trace_real(c: &ComplexMatrix) -> f64 {
    (0..c.rows().min(c.cols())).map(|i| c[(i, i)].re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{components_from_p, DEFAULT_Y0};
    use crate::numerics::{relative_error, relative_error_vec, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_model(h: f64) -> LinearObservationModel {
        LinearObservationModel::new(
            ComplexMatrix::from_real_rows(&[&[h]]),
            ComplexMatrix::identity(1),
            ComplexMatrix::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn model_validation() {
        let h = ComplexMatrix::zeros(2, 2);
        let not_pd = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let not_herm = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let i2 = ComplexMatrix::identity(2);
        assert!(matches!(
            LinearObservationModel::new(h.clone(), not_pd, i2.clone()),
            Err(MilacError::NotPositiveDefinite { what: "Cx" })
        ));
        assert!(LinearObservationModel::new(h.clone(), i2.clone(), not_herm).is_err());
        assert!(LinearObservationModel::new(ComplexMatrix::zeros(3, 2), i2.clone(), i2.clone()).is_err());
        assert!(LinearObservationModel::new(h, i2.clone(), i2).is_ok());
    }

    #[test]
    fn scalar_estimator_is_half_the_observation() {
        let model = scalar_model(1.0);
        let y = ComplexVector::from_real(&[2.0]);
        for form in [Form::One, Form::Two] {
            let r = lmmse_digital(&model, &y, form).unwrap();
            assert!((r.xhat[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
        for sign in [Sign::Plus, Sign::Minus] {
            let r = lmmse_via_milac(&model, &y, sign, DEFAULT_Y0).unwrap();
            assert!((r.xhat[0] - C64::new(1.0, 0.0)).norm() < 1e-13, "{sign:?}: {:?}", r.xhat);
        }
    }

    #[test]
    fn zero_observation_matrix_carries_no_information() {
        let model = LinearObservationModel::new(
            ComplexMatrix::zeros(2, 3),
            ComplexMatrix::from_real_rows(&[&[2.0, 0.5, 0.0], &[0.5, 1.0, 0.0], &[0.0, 0.0, 3.0]]),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let y = ComplexVector::from_real(&[1.0, -4.0]);
        for form in [Form::One, Form::Two] {
            assert!(lmmse_digital(&model, &y, form).unwrap().xhat.max_abs() < 1e-15);
            assert!(relative_error(&cov_digital(&model, form).unwrap().ce, model.cx()) < 1e-15);
        }
        assert!(lmmse_via_milac(&model, &y, Sign::Plus, DEFAULT_Y0).unwrap().xhat.max_abs() < 1e-12);
        assert!(relative_error(&cov_via_milac(&model, DEFAULT_Y0).unwrap().ce, model.cx()) < 1e-12);
    }

    #[test]
    fn digital_matches_normal_equations() {
        // Independent route: solve (H^H Cn^-1 H + Cx^-1) x = H^H Cn^-1 y with
        // explicit 2x2 arithmetic.
        let h = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.0)],
            vec![C64::new(0.0, 1.0), C64::new(2.0, -1.0)],
        ])
        .unwrap();
        let cx = ComplexMatrix::from_real_rows(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let cn = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
        let model = LinearObservationModel::new(h.clone(), cx.clone(), cn).unwrap();
        let y = ComplexVector::from_vec(vec![C64::new(1.0, 1.0), C64::new(-0.5, 2.0)]).unwrap();

        let cn_inv_diag = [1.0, 2.0];
        let det_cx = 2.0 * 1.0 - 0.25;
        let cx_inv = [[1.0 / det_cx, -0.5 / det_cx], [-0.5 / det_cx, 2.0 / det_cx]];
        let mut f = [[C64::new(0.0, 0.0); 2]; 2];
        let mut r = [C64::new(0.0, 0.0); 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = C64::new(cx_inv[a][b], 0.0);
                for k in 0..2 {
                    acc += h[(k, a)].conj() * cn_inv_diag[k] * h[(k, b)];
                }
                f[a][b] = acc;
            }
            for k in 0..2 {
                r[a] += h[(k, a)].conj() * cn_inv_diag[k] * y[k];
            }
        }
        let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
        let want = ComplexVector::from_vec(vec![
            (f[1][1] * r[0] - f[0][1] * r[1]) / det,
            (f[0][0] * r[1] - f[1][0] * r[0]) / det,
        ])
        .unwrap();

        for form in [Form::One, Form::Two] {
            let got = lmmse_digital(&model, &y, form).unwrap().xhat;
            assert!(relative_error_vec(&got, &want) < 1e-13, "{form:?}");
        }
        let c1 = cov_digital(&model, Form::One).unwrap().ce;
        let c2 = cov_digital(&model, Form::Two).unwrap().ce;
        assert!(relative_error(&c1, &c2) < 1e-13);
        let _ = cx;
    }

    #[test]
    fn scalar_covariance_is_one_half() {
        let model = scalar_model(1.0);
        for form in [Form::One, Form::Two] {
            assert!((cov_digital(&model, form).unwrap().ce[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let ce = cov_via_milac(&model, DEFAULT_Y0).unwrap().ce;
        assert!((ce[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn system_matrix_examples() {
        let model = scalar_model(1.0);
        assert_eq!(build_p_lmmse(&model, Sign::Plus), ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]));
        assert_eq!(build_p_lmmse(&model, Sign::Minus), ComplexMatrix::from_real_rows(&[&[-1.0, 1.0], &[1.0, 1.0]]));
        let zero = scalar_model(0.0);
        assert_eq!(build_p_lmmse(&zero, Sign::Plus), ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]));
        assert_eq!(build_p_cov(&model), ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]));
    }

    #[test]
    fn saddle_components_match_generic_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = synth::observation_model(3, 4, &mut rng);
        for (p, d1, c, d2) in [
            (build_p_lmmse(&model, Sign::Plus), model.cn().clone(), model.h().clone(), model.cx_inv().neg()),
            (build_p_lmmse(&model, Sign::Minus), model.cn().neg(), model.h().clone(), model.cx_inv().clone()),
            (build_p_cov(&model), model.cx_inv().clone(), model.h().adjoint(), model.cn().neg()),
        ] {
            let generic = components_from_p(&p, DEFAULT_Y0).unwrap();
            let mut on = CostMeter::new();
            let mut off = CostMeter::new();
            let saddle = saddle_components(&d1, &c, &d2, DEFAULT_Y0, &mut on, &mut off).unwrap();
            assert!(relative_error(saddle.values(), generic.values()) < 1e-14);
            let (n1, n2) = (d1.rows() as u64, d2.rows() as u64);
            assert_eq!(on.total(), 6 * n1 * n2 + 3 * (n1 + n2));
        }
    }

    #[test]
    fn analog_estimator_matches_digital_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = synth::observation_model(4, 4, &mut rng);
        let y = synth::random_vector(4, &mut rng);
        let digital = lmmse_digital(&model, &y, Form::Two).unwrap().xhat;
        let plus = lmmse_via_milac(&model, &y, Sign::Plus, DEFAULT_Y0).unwrap().xhat;
        let minus = lmmse_via_milac(&model, &y, Sign::Minus, DEFAULT_Y0).unwrap().xhat;
        assert!(relative_error_vec(&plus, &digital) < 1e-9);
        assert!(relative_error_vec(&minus, &plus) < 1e-10);
    }

    #[test]
    fn analog_covariance_matches_digital_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = synth::observation_model(3, 3, &mut rng);
        let digital = cov_digital(&model, Form::One).unwrap().ce;
        let analog = cov_via_milac(&model, DEFAULT_Y0).unwrap().ce;
        assert!(relative_error(&analog, &digital) < 1e-9);
    }

    #[test]
    fn inversion_examples() {
        let id = invert_via_milac(&ComplexMatrix::identity(3), DEFAULT_Y0).unwrap().inverse;
        assert!(relative_error(&id, &ComplexMatrix::identity(3)) < 1e-14);

        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let want = ComplexMatrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]).scale(C64::new(1.0 / 3.0, 0.0));
        assert!(relative_error(&invert_via_milac(&a, DEFAULT_Y0).unwrap().inverse, &want) < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = synth::well_conditioned(8, 1e3, &mut rng);
        let got = invert_via_milac(&p, DEFAULT_Y0).unwrap();
        let oracle = gauss_invert(&p, &mut CostMeter::new()).unwrap();
        assert!(relative_error(&got.inverse, &oracle) < 1e-9);
        assert_eq!(got.meter.total(), 4 * 64 - 8);
    }

    #[test]
    fn analog_meters_follow_component_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = synth::observation_model(5, 7, &mut rng);
        let y = synth::random_vector(7, &mut rng);
        let r = lmmse_via_milac(&model, &y, Sign::Plus, DEFAULT_Y0).unwrap();
        assert_eq!(r.meter.total(), 6 * 35 + 3 * 12);
        assert!(r.physics.total() > 0);
        assert!(r.offline.total() > 0);
        let c = cov_via_milac(&model, DEFAULT_Y0).unwrap();
        assert_eq!(c.meter.total(), 6 * 35 + 3 * 12);
    }
}
