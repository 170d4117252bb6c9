//! Adaptive Dormand–Prince 5(4) integration of linear matrix ODEs.

use num_complex::Complex64;
use thiserror::Error;

use super::CMatrix;

/// Smallest admissible step in the path parameter.
pub const MIN_STEP: f64 = 1e-13;

/// Integration failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    /// The step size fell below [`MIN_STEP`], which happens near a pole of the
    /// right-hand side.
    #[error("path too close to singular locus (step underflow at t = {t})")]
    PathTooClose {
        /// Path parameter where the step collapsed.
        t: f64,
    },
    /// The step budget was exhausted.
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps {
        /// Path parameter reached.
        t: f64,
        /// Budget.
        max_steps: usize,
    },
    /// The right-hand side produced a non-finite value.
    #[error("right-hand side is not finite at t = {t}")]
    NonFinite {
        /// Path parameter.
        t: f64,
    },
}

/// Controls for [`ode_transport`].
#[derive(Debug, Clone, PartialEq)]
pub struct OdeOptions {
    /// Relative (and absolute) local error tolerance per step.
    pub tol: f64,
    /// First trial step.
    pub initial_step: f64,
    /// Maximum number of attempted steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            initial_step: 1e-2,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    /// Default options with the given tolerance.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Outcome of a transport.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    /// The solution at `t = 1`.
    pub x: CMatrix,
    /// Accumulated local-error bound (sum of accepted-step error norms).
    pub err_est: f64,
    /// Number of accepted steps.
    pub accepted: usize,
    /// Number of rejected steps.
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (identical to the last row of `A`: first-same-as-last).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Fourth-order embedded weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `X′(t) = M(t)·X(t)` from `t = 0` to `t = 1` with `X(0) = x0`.
///
/// `rhs(t)` returns `M(t)`; the caller guarantees it is finite on `[0, 1]`.
/// A step is rejected when the scaled local error estimate, with absolute and
/// relative tolerance `tol`, exceeds one.
pub fn ode_transport<F>(mut rhs: F, x0: &CMatrix, opts: &OdeOptions) -> Result<Transport, OdeError>
where
    F: FnMut(f64) -> CMatrix,
{
    let mut x = x0.clone();
    let mut t = 0.0_f64;
    let mut h = opts.initial_step.clamp(MIN_STEP, 1.0);
    let mut err_est = 0.0;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);
    let mut m0 = rhs(0.0);
    if !is_finite(&m0) {
        return Err(OdeError::NonFinite { t: 0.0 });
    }
    let mut steps = 0usize;
    while t < 1.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                max_steps: opts.max_steps,
            });
        }
        let last = t + h >= 1.0;
        if last {
            h = 1.0 - t;
        }
        k.clear();
        k.push(&m0 * &x);
        let mut m_end = m0.clone();
        for stage in 1..7 {
            let mut y = x.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    y += kj * Complex64::new(h * a, 0.0);
                }
            }
            let m = rhs(t + C[stage] * h);
            if !is_finite(&m) {
                return Err(OdeError::NonFinite {
                    t: t + C[stage] * h,
                });
            }
            k.push(&m * &y);
            if stage == 6 {
                m_end = m;
            }
        }
        let mut x5 = x.clone();
        let mut diff = CMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..7 {
            if B5[j] != 0.0 {
                x5 += &k[j] * Complex64::new(h * B5[j], 0.0);
            }
            let d = B5[j] - B4[j];
            if d != 0.0 {
                diff += &k[j] * Complex64::new(h * d, 0.0);
            }
        }
        let mut sum = 0.0;
        for ((e, a), b) in diff.iter().zip(x.iter()).zip(x5.iter()) {
            let scale = opts.tol * (1.0 + a.norm().max(b.norm()));
            sum += (e.norm() / scale).powi(2);
        }
        let err = (sum / diff.len().max(1) as f64).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };
        if err <= 1.0 {
            t = if last { 1.0 } else { t + h };
            x = x5;
            m0 = m_end;
            err_est += diff.norm();
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else if err.is_infinite() {
            0.2
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < MIN_STEP && t < 1.0 {
            return Err(OdeError::PathTooClose { t });
        }
    }
    Ok(Transport {
        x,
        err_est,
        accepted,
        rejected,
    })
}

fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scalar(z: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, z)
    }

    #[test]
    fn zero_field_leaves_initial_value_unchanged() {
        let x0 = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let out = ode_transport(|_| CMatrix::zeros(2, 2), &x0, &OdeOptions::default()).unwrap();
        assert_eq!(out.x, x0);
    }

    #[test]
    fn scalar_log_pole_on_unit_circle() {
        // d/dt z(t)^a along z = e^{2πit}: (a/z)·z′ = 2πi·a.
        let a = 0.25;
        let rhs = |t: f64| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * t);
            let dz = Complex64::new(0.0, 2.0 * PI) * z;
            scalar(dz * a / z)
        };
        let out = ode_transport(
            rhs,
            &scalar(Complex64::new(1.0, 0.0)),
            &OdeOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!((out.x[(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn forward_then_reverse_transport_is_identity() {
        let field = |t: f64| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(t.sin(), 1.0),
                    Complex64::new(0.3, -t),
                    Complex64::new(t * t, 0.0),
                    Complex64::new(-1.0, (3.0 * t).cos()),
                ],
            )
        };
        let opts = OdeOptions::with_tol(1e-12);
        let id = CMatrix::identity(2, 2);
        let fwd = ode_transport(field, &id, &opts).unwrap();
        let back = ode_transport(|s| -field(1.0 - s), &id, &opts).unwrap();
        assert!((&back.x * &fwd.x - id).norm() < 1e-8);
    }

    #[test]
    fn collapsing_step_reports_singular_locus() {
        // 1/(t − 1/2)^2 blows up inside the interval.
        let rhs = |t: f64| scalar(Complex64::new(1.0 / ((t - 0.5) * (t - 0.5) + 1e-30), 0.0));
        let err = ode_transport(
            rhs,
            &scalar(Complex64::new(1.0, 0.0)),
            &OdeOptions::with_tol(1e-10),
        );
        assert!(matches!(err, Err(OdeError::PathTooClose { .. })), "{err:?}");
    }
}
