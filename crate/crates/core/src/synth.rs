//! Seeded synthetic instances for examples, tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::estimation::LinearObservationModel;
use crate::kalman::DynamicalModel;
use crate::numerics::{inverse, matmul, ComplexMatrix, ComplexVector, C64};

/// Entry drawn uniformly from the unit square `[-1, 1] x [-1, 1] j`.
pub fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_entry(rng))
}

pub fn random_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::from_fn(len, |_| random_entry(rng))
}

/// Standard circularly symmetric complex Gaussian, `E|z|^2 = 1`.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draw from `CN(0, L L^H)` given the lower Cholesky factor `L`.
pub fn circular_gaussian<R: Rng + ?Sized>(chol: &ComplexMatrix, rng: &mut R) -> ComplexVector {
    let n = chol.rows();
    let w: Vec<C64> = (0..n).map(|_| standard_complex_normal(rng)).collect();
    ComplexVector::from_fn(n, |i| (0..=i).map(|k| chol[(i, k)] * w[k]).sum())
}

/// Hermitian positive definite matrix `B B^H / n + I`.
pub fn random_hpd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let b = random_matrix(n, n, rng);
    let mut c = matmul(&b, &b.adjoint()).scale(C64::new(1.0 / n.max(1) as f64, 0.0));
    for i in 0..n {
        c[(i, i)] += C64::new(1.0, 0.0);
    }
    c.hermitian_part()
}

/// `‖A‖_F ‖A^-1‖_F`, infinite for singular input.
pub fn condition_proxy(a: &ComplexMatrix) -> f64 {
    match inverse(a) {
        Ok(inv) => a.frobenius_norm() * inv.frobenius_norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Random square matrix whose condition proxy is below `max_proxy`.
/// Draws are rejected a bounded number of times, after which the diagonal
/// is shifted until the bound holds.
pub fn well_conditioned<R: Rng + ?Sized>(n: usize, max_proxy: f64, rng: &mut R) -> ComplexMatrix {
    let mut a = random_matrix(n, n, rng);
    for _ in 0..32 {
        if condition_proxy(&a) < max_proxy {
            return a;
        }
        a = random_matrix(n, n, rng);
    }
    let mut shift = 1.0;
    loop {
        let mut b = a.clone();
        for i in 0..n {
            b[(i, i)] += C64::new(shift, 0.0);
        }
        if condition_proxy(&b) < max_proxy {
            return b;
        }
        shift *= 2.0;
    }
}

/// Random observation model with `X` unknowns and `Y` observations.
pub fn observation_model<R: Rng + ?Sized>(x: usize, y: usize, rng: &mut R) -> LinearObservationModel {
    let h = random_matrix(y, x, rng);
    let cx = random_hpd(x, rng);
    let cn = random_hpd(y, rng).scale(C64::new(0.1, 0.0));
    LinearObservationModel::new(h, cx, cn).expect("random covariances are positive definite")
}

/// Random time-invariant state-space model with a contractive transition.
pub fn dynamical_model<R: Rng + ?Sized>(x: usize, y: usize, rng: &mut R) -> DynamicalModel {
    let a = random_matrix(x, x, rng);
    let norm = a.frobenius_norm().max(1e-12);
    let a = a.scale(C64::new(0.9 / norm, 0.0));
    let h = random_matrix(y, x, rng);
    let m = random_hpd(x, rng).scale(C64::new(0.05, 0.0));
    let n = random_hpd(y, rng).scale(C64::new(0.1, 0.0));
    DynamicalModel::new(a, m, h, n).expect("random covariances are positive definite")
}
