//! Metered dense kernels: products, Gauss's method, inversion.
//!
//! The counters follow the textbook operation counts exactly: a scalar
//! product of length `N` books `N` complex multiplications and `N - 1`
//! complex additions, products of larger shapes are built from it, and
//! Gauss's method books every division, multiplication and subtraction it
//! executes. Pivot search and row exchanges are not metered.

use crate::error::{MilacError, Result, SingularSite};
use crate::numerics::matrix::{ComplexMatrix, ComplexVector, C64, ZERO};
use crate::numerics::meter::CostMeter;

/// Relative pivot threshold against the largest initial row magnitude.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

pub fn scalar_product(a: &[C64], b: &[C64], meter: &mut CostMeter) -> Result<C64> {
    if a.len() != b.len() {
        return Err(MilacError::dim("scalar_product", a.len(), b.len()));
    }
    let n = a.len() as u64;
    let sum = a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x * y);
    meter.complex_mul(n);
    meter.complex_add(n.saturating_sub(1));
    Ok(sum)
}

pub fn mat_vec(a: &ComplexMatrix, b: &ComplexVector, meter: &mut CostMeter) -> Result<ComplexVector> {
    if a.cols() != b.len() {
        return Err(MilacError::dim("mat_vec", a.cols(), b.len()));
    }
    (0..a.rows())
        .map(|i| scalar_product(a.row(i), b.as_slice(), meter))
        .collect()
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix, meter: &mut CostMeter) -> Result<ComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(MilacError::dim(
            "mat_mul",
            format!("{} inner rows", a.cols()),
            format!("{} inner rows", b.rows()),
        ));
    }
    let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
    for l in 0..b.cols() {
        let col = mat_vec(a, &b.column(l), meter)?;
        out.set_column(l, &col);
    }
    Ok(out)
}

pub fn mat_add(a: &ComplexMatrix, b: &ComplexMatrix, meter: &mut CostMeter) -> Result<ComplexMatrix> {
    if a.shape() != b.shape() {
        return Err(MilacError::dim("mat_add", format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    meter.complex_add((a.rows() * a.cols()) as u64);
    Ok(a.plus(b))
}

pub fn mat_sub(a: &ComplexMatrix, b: &ComplexMatrix, meter: &mut CostMeter) -> Result<ComplexMatrix> {
    if a.shape() != b.shape() {
        return Err(MilacError::dim("mat_sub", format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    meter.complex_sub((a.rows() * a.cols()) as u64);
    Ok(a.minus(b))
}

pub fn vec_add(a: &ComplexVector, b: &ComplexVector, meter: &mut CostMeter) -> Result<ComplexVector> {
    if a.len() != b.len() {
        return Err(MilacError::dim("vec_add", a.len(), b.len()));
    }
    meter.complex_add(a.len() as u64);
    Ok(a.plus(b))
}

pub fn vec_sub(a: &ComplexVector, b: &ComplexVector, meter: &mut CostMeter) -> Result<ComplexVector> {
    if a.len() != b.len() {
        return Err(MilacError::dim("vec_sub", a.len(), b.len()));
    }
    meter.complex_sub(a.len() as u64);
    Ok(a.minus(b))
}

/// Row-permuted LU factors produced by Gauss elimination.
///
/// `lu` holds the unit-lower multipliers below the diagonal and `U` on and
/// above it; row `i` of the factored matrix is row `perm[i]` of the input.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Forward elimination with scaled partial pivoting.
    ///
    /// Books `N(N-1)/2` complex divisions and `(N-1)N(2N-1)/6` complex
    /// multiplications and subtractions.
    pub fn factor(a: &ComplexMatrix, meter: &mut CostMeter) -> Result<Self> {
        if !a.is_square() {
            return Err(MilacError::dim("gauss elimination", "square matrix", format!("{}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut scale: Vec<f64> = (0..n)
            .map(|i| lu.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .collect();
        let largest = scale.iter().cloned().fold(0.0, f64::max);
        let threshold = PIVOT_THRESHOLD * largest;

        for k in 0..n {
            let mut best = k;
            let mut best_ratio = -1.0;
            for i in k..n {
                let ratio = if scale[i] > 0.0 { lu[(i, k)].norm() / scale[i] } else { 0.0 };
                if ratio > best_ratio {
                    best_ratio = ratio;
                    best = i;
                }
            }
            let pivot = lu[(best, k)].norm();
            if pivot.is_nan() || pivot < threshold || pivot == 0.0 {
                return Err(MilacError::singular(SingularSite::Pivot { column: k }));
            }
            if best != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(best, c)];
                    lu[(best, c)] = tmp;
                }
                perm.swap(k, best);
                scale.swap(k, best);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                meter.complex_div(1);
                lu[(i, k)] = l;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                    meter.complex_mul(1);
                    meter.complex_sub(1);
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Forward and back substitution for one right-hand side.
    ///
    /// Books `N` complex divisions and `N(N-1)` complex multiplications and
    /// subtractions.
    pub fn solve(&self, b: &ComplexVector, meter: &mut CostMeter) -> Result<ComplexVector> {
        let n = self.dim();
        if b.len() != n {
            return Err(MilacError::dim("lu solve", n, b.len()));
        }
        let mut x = ComplexVector::from_fn(n, |i| b[self.perm[i]]);
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
                meter.complex_mul(1);
                meter.complex_sub(1);
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
                meter.complex_mul(1);
                meter.complex_sub(1);
            }
            x[i] = acc / self.lu[(i, i)];
            meter.complex_div(1);
        }
        Ok(x)
    }

    /// Solves for every column of `b`.
    pub fn solve_columns(&self, b: &ComplexMatrix, meter: &mut CostMeter) -> Result<ComplexMatrix> {
        if b.rows() != self.dim() {
            return Err(MilacError::dim("lu solve", self.dim(), b.rows()));
        }
        let cols = (0..b.cols())
            .map(|k| self.solve(&b.column(k), meter))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexMatrix::from_columns(b.rows(), &cols))
    }
}

/// Gauss's method for a single system `A x = b`.
///
/// The trace books exactly `N(N+1)/2` complex divisions and
/// `(2N^3 + 3N^2 - 5N)/6` complex multiplications and subtractions.
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexVector, meter: &mut CostMeter) -> Result<ComplexVector> {
    if a.rows() != b.len() {
        return Err(MilacError::dim("solve_linear", a.rows(), b.len()));
    }
    LuFactors::factor(a, meter)?.solve(b, meter)
}

/// Inverse by Gauss elimination followed by one substitution per column.
///
/// The meter reflects the work actually executed: `N(N-1)/2 + N^2` complex
/// divisions and `(N-1)N(2N-1)/6 + N^2(N-1)` complex multiplications and
/// subtractions. These coincide with the single-system counts of
/// [`solve_linear`] only for `N = 1`.
pub fn gauss_invert(a: &ComplexMatrix, meter: &mut CostMeter) -> Result<ComplexMatrix> {
    let lu = LuFactors::factor(a, meter)?;
    let n = a.rows();
    let cols = (0..n)
        .map(|k| lu.solve(&ComplexVector::basis(n, k), meter))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::from_columns(n, &cols))
}

/// Lower-triangular Cholesky factor `L` with `A = L L^H`. Unmetered.
pub fn cholesky(a: &ComplexMatrix, what: &'static str) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(MilacError::dim("cholesky", "square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut d = a[(k, k)].re;
        for j in 0..k {
            d -= l[(k, j)].norm_sqr();
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(MilacError::NotPositiveDefinite { what });
        }
        let dk = d.sqrt();
        l[(k, k)] = C64::new(dk, 0.0);
        for i in k + 1..n {
            let mut s = a[(i, k)];
            for j in 0..k {
                s -= l[(i, j)] * l[(k, j)].conj();
            }
            l[(i, k)] = s / dk;
        }
    }
    Ok(l)
}

/// Unmetered product, for setup code and test oracles.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    mat_mul(a, b, &mut CostMeter::new()).expect("matmul: shape mismatch")
}

/// Unmetered matrix-vector product.
pub fn matvec(a: &ComplexMatrix, b: &ComplexVector) -> ComplexVector {
    mat_vec(a, b, &mut CostMeter::new()).expect("matvec: shape mismatch")
}

/// Unmetered inverse.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    gauss_invert(a, &mut CostMeter::new())
}
