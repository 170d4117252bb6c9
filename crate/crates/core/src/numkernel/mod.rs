//! Shared exact and floating-point kernels.
//!
//! * [`GaussianRational`] / [`ExactMatrix`]: exact arithmetic over `ℚ(i)`,
//!   where rank, kernels, commutators and direct-sum tests are decidable.
//! * [`CMatrix`]: complex double matrices used for transport and holonomy.
//! * [`hermitian_signature`]: inertia of a Hermitian form by cyclic Jacobi
//!   rotations on its realification.
//! * [`ode_transport`]: adaptive Dormand–Prince 5(4) integration of
//!   `X′ = M(t)·X` on `t ∈ [0, 1]`.
//! * [`matrix_exp`]: scaling-and-squaring matrix exponential.

mod exact;
mod gaussian;
mod ode;
mod poly;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub use exact::{
    dot, greedy_independent, in_span, span_dimension, ExactMatrix, ExactVector, RankKernel,
};
pub use gaussian::{
    format_rational, parse_rational, rational_to_f64, GaussianRational, ParseRationalError,
};
pub use ode::{ode_transport, OdeError, OdeOptions, Transport};
pub use poly::{characteristic_polynomial, is_non_resonant, poly_gcd, Polynomial};

/// Dense complex double matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Relative Frobenius tolerance for conjugate symmetry of a [`HermForm`].
pub const HERMITIAN_SYMMETRY_TOL: f64 = 1e-10;

/// Default eigenvalue tolerance of [`hermitian_signature`].
pub const DEFAULT_SIGNATURE_TOL: f64 = 1e-8;

/// Errors raised by the floating-point kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    /// The matrix is not square.
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare {
        /// Row count.
        rows: usize,
        /// Column count.
        cols: usize,
    },
    /// The matrix is not conjugate-symmetric within tolerance.
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian {
        /// `‖F − F*‖ / ‖F‖` in the Frobenius norm.
        asymmetry: f64,
    },
    /// Some entry is NaN or infinite.
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// A Hermitian form, represented by its Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermForm {
    matrix: CMatrix,
}

impl HermForm {
    /// Wraps a conjugate-symmetric matrix (relative Frobenius tolerance 1e−10).
    pub fn new(matrix: CMatrix) -> Result<Self, KernelError> {
        if !matrix.is_square() {
            return Err(KernelError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(KernelError::NonFinite);
        }
        let norm = matrix.norm();
        let asymmetry = if norm == 0.0 {
            0.0
        } else {
            (&matrix - matrix.adjoint()).norm() / norm
        };
        if asymmetry > HERMITIAN_SYMMETRY_TOL {
            return Err(KernelError::NotHermitian { asymmetry });
        }
        Ok(Self { matrix })
    }

    /// Real diagonal form `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// The Gram matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The congruent form `G* F G`.
    pub fn congruent(&self, g: &CMatrix) -> Self {
        let m = g.adjoint() * &self.matrix * g;
        let sym = (&m + m.adjoint()).scale(0.5);
        Self { matrix: sym }
    }
}

/// Inertia of a Hermitian form.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    /// Number of eigenvalues `> tol`.
    pub p: usize,
    /// Number of eigenvalues `< −tol`.
    pub q: usize,
    /// Number of eigenvalues within `±tol`.
    pub kernel_dim: usize,
    /// Eigenvalues in increasing order.
    pub eigenvalues: Vec<f64>,
    /// Set when some `|λ|` lies in `(tol/10, tol·10)`, where the count is
    /// sensitive to the tolerance.
    pub tolerance_ambiguous: bool,
}

/// Signature `(p, q, kernel_dim)` of a Hermitian form.
///
/// The eigenvalues are computed by cyclic Jacobi rotations on the real
/// symmetric `2n × 2n` matrix `[[Re F, −Im F], [Im F, Re F]]`, whose spectrum
/// is that of `F` with every eigenvalue doubled.
pub fn hermitian_signature(form: &HermForm, tol: f64) -> Signature {
    let n = form.dim();
    let f = form.matrix();
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = f[(i, j)];
            s[(i, j)] = z.re;
            s[(i + n, j + n)] = z.re;
            s[(i, j + n)] = -z.im;
            s[(i + n, j)] = z.im;
        }
    }
    let s = (&s + s.transpose()).scale(0.5);
    let mut doubled = jacobi_eigenvalues(s);
    doubled.sort_by(|a, b| a.total_cmp(b));
    let eigenvalues: Vec<f64> = doubled.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    let p = eigenvalues.iter().filter(|&&l| l > tol).count();
    let q = eigenvalues.iter().filter(|&&l| l < -tol).count();
    let tolerance_ambiguous = eigenvalues
        .iter()
        .any(|l| l.abs() > tol / 10.0 && l.abs() < tol * 10.0);
    Signature {
        p,
        q,
        kernel_dim: n - p - q,
        eigenvalues,
        tolerance_ambiguous,
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.
fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let m = a.nrows();
    let total = a.norm();
    if total == 0.0 {
        return vec![0.0; m];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * total {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[(i, i)]).collect()
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
///
/// # Panics
/// Panics if `a` is not square.
pub fn matrix_exp(a: &CMatrix) -> CMatrix {
    assert!(a.is_square(), "matrix_exp requires a square matrix");
    if a.nrows() == 0 {
        return a.clone();
    }
    a.exp()
}

/// Eigenvalues of a general complex square matrix (Schur form).
///
/// Used only for spectrum comparisons of holonomy matrices.
pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let schur = nalgebra::linalg::Schur::new(a.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Singular values (descending) with their right singular vectors.
fn sorted_right_svd(m: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::<f64>::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = nalgebra::linalg::SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigmas = order.iter().map(|&k| svd.singular_values[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| v_t.row(k).iter().copied().collect())
        .collect();
    (sigmas, vectors)
}

/// Singular values (descending) and an orthonormal basis of the numerical null
/// space of a real matrix: right singular vectors with `σ ≤ tol · σ_max`.
pub fn real_null_space(m: &DMatrix<f64>, tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    if m.ncols() == 0 {
        return (Vec::new(), Vec::new());
    }
    let (sigmas, vectors) = sorted_right_svd(m);
    let smax = sigmas[0];
    let basis = sigmas
        .iter()
        .zip(vectors)
        .filter(|(s, _)| smax == 0.0 || **s <= tol * smax)
        .map(|(_, v)| v)
        .collect();
    (sigmas, basis)
}

/// Like [`real_null_space`], but only `σ ≤ tol · σ_max` marks the band of
/// candidates: the null space is cut at the largest ratio `σ_{k−1}/σ_k` with
/// `σ_k` in the band, treating values below `ε · σ_max` as equal.
///
/// A fixed threshold misclassifies when the noise floor is far below `tol`
/// but some genuine singular values are not; the widest gap separates them.
pub fn real_null_space_at_gap(m: &DMatrix<f64>, tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    if m.ncols() == 0 {
        return (Vec::new(), Vec::new());
    }
    let (sigmas, vectors) = sorted_right_svd(m);
    let smax = sigmas[0];
    if smax == 0.0 {
        return (sigmas, vectors);
    }
    let floor = f64::EPSILON * smax;
    let Some(band) = sigmas.iter().position(|&s| s <= tol * smax) else {
        return (sigmas, Vec::new());
    };
    let cut = (band.max(1)..sigmas.len())
        .max_by(|&i, &j| {
            let ratio = |k: usize| sigmas[k - 1].max(floor) / sigmas[k].max(floor);
            ratio(i).total_cmp(&ratio(j)).then(j.cmp(&i))
        })
        .unwrap_or(band);
    let basis = vectors.into_iter().skip(cut).collect();
    (sigmas, basis)
}

/// Singular values (descending) of a complex matrix.
pub fn complex_singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn signature_of_diagonal_forms() {
        let s = hermitian_signature(&HermForm::diagonal(&[1.0, 1.0]), DEFAULT_SIGNATURE_TOL);
        assert_eq!((s.p, s.q, s.kernel_dim), (2, 0, 0));
        let s = hermitian_signature(&HermForm::diagonal(&[1.0, -1.0, 0.0]), 1e-9);
        assert_eq!((s.p, s.q, s.kernel_dim), (1, 1, 1));
        assert!(!s.tolerance_ambiguous);
    }

    #[test]
    fn signature_of_complex_hermitian_form() {
        // [[0, i], [-i, 0]] has eigenvalues ±1.
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let s = hermitian_signature(&HermForm::new(m).unwrap(), 1e-8);
        assert_eq!((s.p, s.q, s.kernel_dim), (1, 1, 0));
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14 && (s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ambiguous_eigenvalue_is_flagged() {
        let s = hermitian_signature(&HermForm::diagonal(&[1.0, 5e-9]), 1e-8);
        assert!(s.tolerance_ambiguous);
    }

    #[test]
    fn non_hermitian_matrix_is_rejected() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermForm::new(m),
            Err(KernelError::NotHermitian { .. })
        ));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(matrix_exp(&z), CMatrix::identity(3, 3));
    }

    #[test]
    fn exp_of_quarter_turn_is_i() {
        let a = CMatrix::from_diagonal_element(2, 2, c(0.0, 2.0 * PI * 0.25));
        let e = matrix_exp(&a);
        assert!((e[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((e[(1, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exp_of_nilpotent_is_truncated_series() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let expected =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((matrix_exp(&a) - expected).norm() < 1e-14);
    }

    #[test]
    fn exp_is_accurate_for_large_normal_matrices() {
        // Unitary conjugate of a diagonal matrix with norm near 50.
        let d = [c(30.0, 20.0), c(-35.0, 10.0), c(0.5, -40.0)];
        let theta: f64 = 0.7;
        let u = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(theta.cos(), 0.0),
                c(0.0, theta.sin()),
                c(0.0, 0.0),
                c(0.0, theta.sin()),
                c(theta.cos(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
            ],
        );
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
        let a = &u * &diag * u.adjoint();
        let exact_diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            d.iter().map(|z| z.exp()),
        ));
        let exact = &u * exact_diag * u.adjoint();
        let rel = (matrix_exp(&a) - &exact).norm() / exact.norm();
        assert!(rel < 1e-12, "relative error {rel}");
    }

    #[test]
    fn eigenvalues_of_triangular_matrix() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 1.0), c(5.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let mut ev = eigenvalues(&a);
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn gap_null_space_separates_noise_from_small_singular_values() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-6, 1e-13]));
        assert_eq!(real_null_space(&m, 1e-4).1.len(), 2);
        let (_, basis) = real_null_space_at_gap(&m, 1e-4);
        assert_eq!(basis.len(), 1);
        assert!((basis[0][2].abs() - 1.0).abs() < 1e-12);
        assert!(real_null_space_at_gap(&m, 1e-14).1.is_empty());
        assert_eq!(
            real_null_space_at_gap(&DMatrix::zeros(3, 3), 1e-8).1.len(),
            3
        );
        let two = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5, 0.0, 0.0]));
        assert_eq!(real_null_space_at_gap(&two, 1e-8).1.len(), 2);
    }

    #[test]
    fn null_space_of_rank_one_matrix() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, -1.0]);
        let (sigmas, basis) = real_null_space(&m, 1e-10);
        assert_eq!(sigmas.len(), 2);
        assert_eq!(basis.len(), 1);
        assert!((basis[0][0] + basis[0][1]).abs() < 1e-12);
    }
}
