//! Kalman filtering for `x_t = A x_{t-1} + m_t`, `y_t = H x_t + n_t`, with a
//! digital step and a step that routes every matrix inversion through the
//! network.
//!
//! The network step carries `R^-1` from one step to the next. Each step
//! maps onto the estimation algorithms:
//!
//! | quantity            | algorithm     | `H`   | `Cx^-1`        | `Cn`      |
//! |---------------------|---------------|-------|----------------|-----------|
//! | `R_{t|t-1}^-1`      | covariance    | `A^H` | `M`            | `R^-1`    |
//! | `K ȳ`               | estimator     | `H`   | `R_{t|t-1}^-1` | `N`       |
//! | `R_{t|t}`           | covariance    | `H`   | `R_{t|t-1}^-1` | `N`       |
//! | `R_{t|t}^-1`        | inversion     |       |                |           |

use rand::Rng;

use crate::error::{MilacError, Result};
use crate::estimation::{cov_analog_blocks, invert_via_milac, lmmse_analog_blocks, validate_covariance, Sign};
use crate::numerics::{
    cholesky, gauss_invert, mat_add, mat_mul, mat_sub, mat_vec, matvec, vec_add, vec_sub, ComplexMatrix,
    ComplexVector, CostMeter, LuFactors,
};
use crate::synth;

/// Time-invariant linear state-space model.
#[derive(Debug, Clone)]
pub struct DynamicalModel {
    a: ComplexMatrix,
    m: ComplexMatrix,
    h: ComplexMatrix,
    n: ComplexMatrix,
}

impl DynamicalModel {
    /// `a` is `X x X`, `m` the state-noise covariance (`X x X`, may be
    /// singular), `h` is `Y x X`, `n` the observation-noise covariance
    /// (`Y x Y`, positive definite).
    pub fn new(a: ComplexMatrix, m: ComplexMatrix, h: ComplexMatrix, n: ComplexMatrix) -> Result<Self> {
        let x = a.rows();
        if !a.is_square() {
            return Err(MilacError::dim("state transition", "square matrix", format!("{}x{}", a.rows(), a.cols())));
        }
        if m.shape() != (x, x) {
            return Err(MilacError::dim("state noise covariance", format!("{x}x{x}"), format!("{}x{}", m.rows(), m.cols())));
        }
        validate_covariance(&n, "N")?;
        if h.shape() != (n.rows(), x) {
            return Err(MilacError::dim(
                "observation matrix",
                format!("{}x{x}", n.rows()),
                format!("{}x{}", h.rows(), h.cols()),
            ));
        }
        let scale = m.max_abs().max(1.0);
        if m.hermitian_defect() > crate::estimation::HERMITIAN_TOL * scale {
            return Err(MilacError::NotPositiveDefinite { what: "M" });
        }
        // Positive semidefinite check: M + eps I must factor.
        let mut shifted = m.clone();
        for i in 0..x {
            shifted[(i, i)] += 1e-12 * scale;
        }
        cholesky(&shifted, "M")?;
        Ok(Self { a, m, h, n })
    }

    pub fn x_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn y_dim(&self) -> usize {
        self.n.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn m(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn n(&self) -> &ComplexMatrix {
        &self.n
    }
}

/// A posteriori estimate together with its error covariance, its inverse,
/// or both.
#[derive(Debug, Clone)]
pub struct FilterState {
    pub xhat: ComplexVector,
    pub r: Option<ComplexMatrix>,
    pub rinv: Option<ComplexMatrix>,
}

impl FilterState {
    /// State carrying `R` only, as the digital step expects.
    pub fn with_covariance(xhat: ComplexVector, r: ComplexMatrix) -> Self {
        Self { xhat, r: Some(r), rinv: None }
    }

    /// State carrying both `R` and `R^-1`, computed here.
    pub fn with_both(xhat: ComplexVector, r: ComplexMatrix) -> Result<Self> {
        let rinv = gauss_invert(&r, &mut CostMeter::new())?.hermitian_part();
        Ok(Self { xhat, r: Some(r), rinv: Some(rinv) })
    }

    fn require_r(&self) -> Result<&ComplexMatrix> {
        self.r.as_ref().ok_or_else(|| MilacError::Invalid("filter state has no covariance".into()))
    }

    fn require_rinv(&self) -> Result<&ComplexMatrix> {
        self.rinv
            .as_ref()
            .ok_or_else(|| MilacError::Invalid("filter state has no inverse covariance".into()))
    }
}

/// Meters for a network-assisted step or run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KalmanMeters {
    pub algorithmic: CostMeter,
    pub offline: CostMeter,
    pub physics: CostMeter,
}

fn tag<T>(step: u8, r: Result<T>) -> Result<T> {
    r.map_err(|e| MilacError::KalmanStep {
        step,
        source: Box::new(e),
    })
}

fn check_dims(model: &DynamicalModel, state: &FilterState, y: &ComplexVector) -> Result<()> {
    if state.xhat.len() != model.x_dim() {
        return Err(MilacError::dim("filter state", model.x_dim(), state.xhat.len()));
    }
    if y.len() != model.y_dim() {
        return Err(MilacError::dim("observation", model.y_dim(), y.len()));
    }
    Ok(())
}

/// One step of the standard filter.
///
/// The gain is obtained by solving `S^H K^H = (R_{t|t-1} H^H)^H` with
/// `S = H R_{t|t-1} H^H + N`, and the covariance update uses
/// `R_{t|t-1} - K H R_{t|t-1}` with `H R_{t|t-1} = G^H`.
pub fn kalman_step_digital(
    model: &DynamicalModel,
    state: &FilterState,
    y: &ComplexVector,
    meter: &mut CostMeter,
) -> Result<FilterState> {
    check_dims(model, state, y)?;
    let r = state.require_r()?;
    let a = model.a();
    let h = model.h();

    let x_prior = tag(1, mat_vec(a, &state.xhat, meter))?;
    let r_prior = tag(2, (|| {
        let ar = mat_mul(a, r, meter)?;
        mat_add(&mat_mul(&ar, &a.adjoint(), meter)?, model.m(), meter)
    })())?
    .hermitian_part();

    let (gain, g) = tag(3, (|| {
        let g = mat_mul(&r_prior, &h.adjoint(), meter)?;
        let s = mat_add(&mat_mul(h, &g, meter)?, model.n(), meter)?;
        let k_adj = LuFactors::factor(&s.adjoint(), meter)?.solve_columns(&g.adjoint(), meter)?;
        Ok((k_adj.adjoint(), g))
    })())?;

    let xhat = tag(4, (|| {
        let innovation = vec_sub(y, &mat_vec(h, &x_prior, meter)?, meter)?;
        vec_add(&x_prior, &mat_vec(&gain, &innovation, meter)?, meter)
    })())?;

    let r_post = tag(5, (|| mat_sub(&r_prior, &mat_mul(&gain, &g.adjoint(), meter)?, meter))())?.hermitian_part();

    Ok(FilterState::with_covariance(xhat, r_post))
}

/// One step of the network-assisted filter. Needs `R^-1` in the state and
/// returns both `R` and `R^-1`.
pub fn kalman_step_milac(
    model: &DynamicalModel,
    state: &FilterState,
    y: &ComplexVector,
    y0: f64,
    meters: &mut KalmanMeters,
) -> Result<FilterState> {
    check_dims(model, state, y)?;
    let rinv = state.require_rinv()?;
    let a = model.a();
    let h = model.h();

    let x_prior = tag(1, mat_vec(a, &state.xhat, &mut meters.algorithmic))?;

    let step2 = tag(2, cov_analog_blocks(&a.adjoint(), model.m(), rinv, y0))?;
    absorb(meters, &step2.meter, &step2.offline, &step2.physics);
    let rinv_prior = step2.ce.hermitian_part();

    let innovation = tag(3, (|| {
        let hx = mat_vec(h, &x_prior, &mut meters.algorithmic)?;
        vec_sub(y, &hx, &mut meters.algorithmic)
    })())?;

    let step4 = tag(4, lmmse_analog_blocks(&innovation, h, &rinv_prior, model.n(), Sign::Plus, y0))?;
    absorb(meters, &step4.meter, &step4.offline, &step4.physics);

    let xhat = tag(5, vec_add(&step4.xhat, &x_prior, &mut meters.algorithmic))?;

    let step6 = tag(6, cov_analog_blocks(h, &rinv_prior, model.n(), y0))?;
    absorb(meters, &step6.meter, &step6.offline, &step6.physics);
    let r_post = step6.ce.hermitian_part();

    let step7 = tag(7, invert_via_milac(&r_post, y0))?;
    meters.algorithmic += step7.meter;
    meters.physics += step7.physics;

    Ok(FilterState {
        xhat,
        r: Some(r_post),
        rinv: Some(step7.inverse.hermitian_part()),
    })
}

fn absorb(meters: &mut KalmanMeters, online: &CostMeter, offline: &CostMeter, physics: &CostMeter) {
    meters.algorithmic += *online;
    meters.offline += *offline;
    meters.physics += *physics;
}

/// Which step operation a run folds over the observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    Digital,
    Milac,
}

/// Trajectory of a filter run, one state per observation.
#[derive(Debug, Clone)]
pub struct KalmanRun {
    pub states: Vec<FilterState>,
    pub meters: KalmanMeters,
}

/// Runs the filter over `observations`. Step `t` uses
/// `models[min(t, models.len() - 1)]`, so a single model is time-invariant.
pub fn kalman_run(
    models: &[DynamicalModel],
    initial: &FilterState,
    observations: &[ComplexVector],
    mode: FilterMode,
    y0: f64,
) -> Result<KalmanRun> {
    if models.is_empty() {
        return Err(MilacError::Invalid("kalman run needs at least one model".into()));
    }
    let x = models[0].x_dim();
    let y = models[0].y_dim();
    if models.iter().any(|m| m.x_dim() != x || m.y_dim() != y) {
        return Err(MilacError::Invalid("models in the sequence differ in dimension".into()));
    }
    let mut state = match mode {
        FilterMode::Digital => {
            FilterState::with_covariance(initial.xhat.clone(), initial.require_r()?.clone())
        }
        FilterMode::Milac => match (&initial.r, &initial.rinv) {
            (_, Some(_)) => initial.clone(),
            (Some(r), None) => FilterState::with_both(initial.xhat.clone(), r.clone())?,
            (None, None) => return Err(MilacError::Invalid("initial state has no covariance".into())),
        },
    };
    let mut meters = KalmanMeters::default();
    let mut states = Vec::with_capacity(observations.len());
    for (t, obs) in observations.iter().enumerate() {
        let model = &models[t.min(models.len() - 1)];
        let next = match mode {
            FilterMode::Digital => kalman_step_digital(model, &state, obs, &mut meters.algorithmic),
            FilterMode::Milac => kalman_step_milac(model, &state, obs, y0, &mut meters),
        }
        .map_err(|e| MilacError::AtTime { t, source: Box::new(e) })?;
        states.push(next.clone());
        state = next;
    }
    Ok(KalmanRun { states, meters })
}

/// Draws a state trajectory and its observations from the model, starting
/// at `x0`. Returns `(states, observations)`.
pub fn simulate_system<R: Rng + ?Sized>(
    model: &DynamicalModel,
    x0: &ComplexVector,
    steps: usize,
    rng: &mut R,
) -> Result<(Vec<ComplexVector>, Vec<ComplexVector>)> {
    let x = model.x_dim();
    let mut m = model.m().clone();
    let scale = m.max_abs().max(1.0);
    for i in 0..x {
        m[(i, i)] += 1e-14 * scale;
    }
    let lm = cholesky(&m, "M")?;
    let ln = cholesky(model.n(), "N")?;
    let mut states = Vec::with_capacity(steps);
    let mut obs = Vec::with_capacity(steps);
    let mut cur = x0.clone();
    for _ in 0..steps {
        cur = matvec(model.a(), &cur).plus(&synth::circular_gaussian(&lm, rng));
        obs.push(matvec(model.h(), &cur).plus(&synth::circular_gaussian(&ln, rng)));
        states.push(cur.clone());
    }
    Ok((states, obs))
}

/// Largest relative deviation between two trajectories, over estimates
/// and covariances.
pub fn trajectory_deviation(a: &[FilterState], b: &[FilterState]) -> f64 {
    use crate::numerics::{relative_error, relative_error_vec};
    a.iter()
        .zip(b)
        .map(|(s, t)| {
            let dx = relative_error_vec(&s.xhat, &t.xhat);
            let dr = match (&s.r, &t.r) {
                (Some(p), Some(q)) => relative_error(p, q),
                _ => 0.0,
            };
            dx.max(dr)
        })
        .fold(if a.len() == b.len() { 0.0 } else { f64::INFINITY }, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::DEFAULT_Y0;
    use crate::numerics::{inverse, matmul, relative_error, relative_error_vec, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(x: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[x]])
    }

    fn scalar_model() -> DynamicalModel {
        DynamicalModel::new(s(1.0), s(1.0), s(1.0), s(1.0)).unwrap()
    }

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn scalar_hand_trace() {
        let model = scalar_model();
        let init = FilterState::with_both(ComplexVector::zeros(1), s(1.0)).unwrap();
        let y = ComplexVector::from_real(&[2.0]);
        let d = kalman_step_digital(&model, &init, &y, &mut CostMeter::new()).unwrap();
        assert!(close(d.xhat[0], 4.0 / 3.0, 1e-12));
        assert!(close(d.r.unwrap()[(0, 0)], 2.0 / 3.0, 1e-12));
        let m = kalman_step_milac(&model, &init, &y, DEFAULT_Y0, &mut KalmanMeters::default()).unwrap();
        assert!(close(m.xhat[0], 4.0 / 3.0, 1e-12));
        assert!(close(m.r.unwrap()[(0, 0)], 2.0 / 3.0, 1e-12));
        assert!(close(m.rinv.unwrap()[(0, 0)], 1.5, 1e-12));
    }

    #[test]
    fn scalar_three_step_trace() {
        let model = scalar_model();
        let init = FilterState::with_covariance(ComplexVector::zeros(1), s(1.0));
        let obs: Vec<_> = [2.0, 1.0, 0.0].iter().map(|&v| ComplexVector::from_real(&[v])).collect();
        let want = [(4.0 / 3.0, 2.0 / 3.0), (9.0 / 8.0, 5.0 / 8.0), (3.0 / 7.0, 13.0 / 21.0)];
        for mode in [FilterMode::Digital, FilterMode::Milac] {
            let run = kalman_run(std::slice::from_ref(&model), &init, &obs, mode, DEFAULT_Y0).unwrap();
            for (state, (x, r)) in run.states.iter().zip(want) {
                assert!(close(state.xhat[0], x, 1e-12), "{mode:?}");
                assert!(close(state.r.as_ref().unwrap()[(0, 0)], r, 1e-12), "{mode:?}");
            }
        }
    }

    #[test]
    fn large_observation_noise_ignores_measurement() {
        let a = ComplexMatrix::from_real_rows(&[&[0.9, 0.1], &[0.0, 0.8]]);
        let model = DynamicalModel::new(
            a.clone(),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.5]]),
            s(1e6),
        )
        .unwrap();
        let x0 = ComplexVector::from_real(&[1.0, -2.0]);
        let init = FilterState::with_both(x0.clone(), ComplexMatrix::identity(2)).unwrap();
        let y = ComplexVector::from_real(&[1.0]);
        let want = matvec(&a, &x0);
        let d = kalman_step_digital(&model, &init, &y, &mut CostMeter::new()).unwrap();
        assert!(relative_error_vec(&d.xhat, &want) < 1e-5);
        let m = kalman_step_milac(&model, &init, &y, DEFAULT_Y0, &mut KalmanMeters::default()).unwrap();
        assert!(relative_error_vec(&m.xhat, &want) < 1e-5);
    }

    #[test]
    fn matches_textbook_filter() {
        // Independent one-step filter using explicit inverses and (I - KH) R.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let model = synth::dynamical_model(2, 2, &mut rng);
        let r0 = synth::random_hpd(2, &mut rng);
        let x0 = synth::random_vector(2, &mut rng);
        let y = synth::random_vector(2, &mut rng);

        let r_prior = matmul(&matmul(model.a(), &r0), &model.a().adjoint()).plus(model.m());
        let s_mat = matmul(&matmul(model.h(), &r_prior), &model.h().adjoint()).plus(model.n());
        let k = matmul(&matmul(&r_prior, &model.h().adjoint()), &inverse(&s_mat).unwrap());
        let x_prior = matvec(model.a(), &x0);
        let want_x = x_prior.plus(&matvec(&k, &y.minus(&matvec(model.h(), &x_prior))));
        let want_r = matmul(&ComplexMatrix::identity(2).minus(&matmul(&k, model.h())), &r_prior);

        let init = FilterState::with_both(x0, r0).unwrap();
        let d = kalman_step_digital(&model, &init, &y, &mut CostMeter::new()).unwrap();
        assert!(relative_error_vec(&d.xhat, &want_x) < 1e-12);
        assert!(relative_error(d.r.as_ref().unwrap(), &want_r) < 1e-12);
        let m = kalman_step_milac(&model, &init, &y, DEFAULT_Y0, &mut KalmanMeters::default()).unwrap();
        assert!(relative_error_vec(&m.xhat, &d.xhat) < 1e-9);
        assert!(relative_error(m.r.as_ref().unwrap(), d.r.as_ref().unwrap()) < 1e-9);
        let ident = matmul(m.r.as_ref().unwrap(), m.rinv.as_ref().unwrap());
        assert!(relative_error(&ident, &ComplexMatrix::identity(2)) < 1e-9);
    }

    #[test]
    fn joseph_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let model = synth::dynamical_model(3, 2, &mut rng);
        let r0 = synth::random_hpd(3, &mut rng);
        let init = FilterState::with_covariance(synth::random_vector(3, &mut rng), r0.clone());
        let y = synth::random_vector(2, &mut rng);
        let d = kalman_step_digital(&model, &init, &y, &mut CostMeter::new()).unwrap();

        let r_prior = matmul(&matmul(model.a(), &r0), &model.a().adjoint()).plus(model.m());
        let s_mat = matmul(&matmul(model.h(), &r_prior), &model.h().adjoint()).plus(model.n());
        let k = matmul(&matmul(&r_prior, &model.h().adjoint()), &inverse(&s_mat).unwrap());
        let ikh = ComplexMatrix::identity(3).minus(&matmul(&k, model.h()));
        let joseph = matmul(&matmul(&ikh, &r_prior), &ikh.adjoint())
            .plus(&matmul(&matmul(&k, model.n()), &k.adjoint()));
        assert!(relative_error(d.r.as_ref().unwrap(), &joseph) < 1e-8);
    }

    #[test]
    fn pure_prediction_without_information() {
        let a = ComplexMatrix::from_real_rows(&[&[0.5, 0.2], &[-0.1, 0.7]]);
        let m = ComplexMatrix::from_real_rows(&[&[0.3, 0.0], &[0.0, 0.2]]);
        let model = DynamicalModel::new(a.clone(), m.clone(), ComplexMatrix::zeros(1, 2), s(1.0)).unwrap();
        let init = FilterState::with_covariance(ComplexVector::from_real(&[1.0, 1.0]), ComplexMatrix::identity(2));
        let obs = vec![ComplexVector::zeros(1); 4];
        let mut r = ComplexMatrix::identity(2);
        let digital = kalman_run(std::slice::from_ref(&model), &init, &obs, FilterMode::Digital, DEFAULT_Y0).unwrap();
        let analog = kalman_run(&[model], &init, &obs, FilterMode::Milac, DEFAULT_Y0).unwrap();
        for (d, g) in digital.states.iter().zip(&analog.states) {
            r = matmul(&matmul(&a, &r), &a.adjoint()).plus(&m);
            assert!(relative_error(d.r.as_ref().unwrap(), &r) < 1e-13);
            assert!(relative_error(g.r.as_ref().unwrap(), &r) < 1e-9);
        }
    }

    #[test]
    fn modes_agree_over_trajectory() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let model = synth::dynamical_model(4, 3, &mut rng);
        let x0 = synth::random_vector(4, &mut rng);
        let (_, obs) = simulate_system(&model, &x0, 50, &mut rng).unwrap();
        let init = FilterState::with_covariance(ComplexVector::zeros(4), ComplexMatrix::identity(4));
        let d = kalman_run(std::slice::from_ref(&model), &init, &obs, FilterMode::Digital, DEFAULT_Y0).unwrap();
        let m = kalman_run(&[model], &init, &obs, FilterMode::Milac, DEFAULT_Y0).unwrap();
        assert!(trajectory_deviation(&d.states, &m.states) < 1e-6);
    }

    #[test]
    fn errors_carry_step_and_time() {
        let model = scalar_model();
        let init = FilterState::with_covariance(ComplexVector::zeros(1), s(1.0));
        let obs = vec![ComplexVector::from_real(&[1.0]), ComplexVector::zeros(2)];
        let err = kalman_run(std::slice::from_ref(&model), &init, &obs, FilterMode::Digital, DEFAULT_Y0).unwrap_err();
        assert!(matches!(err, MilacError::AtTime { t: 1, .. }), "{err}");

        // Zero transition with zero state noise makes the a priori covariance
        // vanish, so its inverse cannot be formed at step 2.
        let degenerate = DynamicalModel::new(s(0.0), s(0.0), s(1.0), s(1.0)).unwrap();
        let init = FilterState::with_both(ComplexVector::zeros(1), s(1.0)).unwrap();
        let err = kalman_step_milac(&degenerate, &init, &ComplexVector::zeros(1), DEFAULT_Y0, &mut KalmanMeters::default())
            .unwrap_err();
        assert!(matches!(err, MilacError::KalmanStep { step: 2, .. }), "{err}");
        assert!(err.is_singular());
    }

    #[test]
    fn meters_follow_step_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let x = 6u64;
        let model = synth::dynamical_model(6, 6, &mut rng);
        let init = FilterState::with_both(ComplexVector::zeros(6), ComplexMatrix::identity(6)).unwrap();
        let y = synth::random_vector(6, &mut rng);
        let mut meters = KalmanMeters::default();
        kalman_step_milac(&model, &init, &y, DEFAULT_Y0, &mut meters).unwrap();
        // 8X^2-2X, 6X^2+6X, 8X^2, 6X^2+6X, 2X, 6X^2+6X, 4X^2-X
        assert_eq!(meters.algorithmic.total(), 38 * x * x + 17 * x);

        let mut digital = CostMeter::new();
        kalman_step_digital(&model, &init, &y, &mut digital).unwrap();
        let cube = 152.0 / 3.0 * (x * x * x) as f64;
        assert!((digital.total() as f64 - cube).abs() < 0.2 * cube);
    }
}
