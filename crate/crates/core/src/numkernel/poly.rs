//! Univariate polynomials over `ℚ(i)`, used to decide eigenvalue conditions
//! exactly without computing eigenvalues.

use super::exact::ExactMatrix;
use super::gaussian::GaussianRational;

/// Polynomial with coefficients listed from the constant term upwards.
/// The zero polynomial is the empty list.
pub type Polynomial = Vec<GaussianRational>;

fn trim(mut p: Polynomial) -> Polynomial {
    while p.last().is_some_and(GaussianRational::is_zero) {
        p.pop();
    }
    p
}

fn degree(p: &Polynomial) -> Option<usize> {
    p.len().checked_sub(1)
}

fn monic(p: Polynomial) -> Polynomial {
    let p = trim(p);
    match p.last() {
        None => p,
        Some(lead) => {
            let inv = lead.inv().expect("leading coefficient is nonzero");
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

fn remainder(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let b = trim(b.clone());
    let db = degree(&b).expect("division by the zero polynomial");
    let lead_inv = b[db].inv().expect("leading coefficient is nonzero");
    let mut r = trim(a.clone());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] * &lead_inv;
        let shift = dr - db;
        for (k, c) in b.iter().enumerate() {
            let v = &r[k + shift] - &(&f * c);
            r[k + shift] = v;
        }
        r = trim(r);
    }
    r
}

/// Monic greatest common divisor (the zero polynomial if both inputs vanish).
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut x = trim(a.clone());
    let mut y = trim(b.clone());
    while !y.is_empty() {
        let r = remainder(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// `p(λ + k)` by repeated synthetic Taylor shifts.
fn shift(p: &Polynomial, k: &GaussianRational) -> Polynomial {
    let mut c = p.clone();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let v = &c[j] + &(k * &c[j + 1]);
            c[j] = v;
        }
    }
    c
}

/// Monic characteristic polynomial `det(λ·Id − A)` by the Faddeev–LeVerrier
/// recursion (exact in characteristic zero).
///
/// # Panics
/// Panics if `a` is not square.
pub fn characteristic_polynomial(a: &ExactMatrix) -> Polynomial {
    assert!(
        a.is_square(),
        "characteristic polynomial needs a square matrix"
    );
    let n = a.rows();
    let mut coeffs = vec![GaussianRational::zero(); n + 1];
    coeffs[n] = GaussianRational::one();
    let mut m = ExactMatrix::zeros(n, n);
    for k in 1..=n {
        let am = a * &m;
        m = &am + &ExactMatrix::scalar(n, &coeffs[n + 1 - k]);
        let t = (a * &m).trace();
        coeffs[n - k] = -(&t / &GaussianRational::from_integer(k as i64));
    }
    coeffs
}

/// Whether no two eigenvalues of `a` differ by a nonzero integer.
///
/// Decided exactly: for each integer `k` up to twice a Cauchy bound on the
/// eigenvalue moduli, test whether `χ(λ)` and `χ(λ + k)` share a root.
pub fn is_non_resonant(a: &ExactMatrix) -> bool {
    let chi = characteristic_polynomial(a);
    let bound = 1.0
        + chi
            .iter()
            .take(chi.len().saturating_sub(1))
            .map(|c| c.abs_bound())
            .fold(0.0, f64::max);
    let k_max = (2.0 * bound).ceil() as i64;
    (1..=k_max).all(|k| {
        let shifted = shift(&chi, &GaussianRational::from_integer(k));
        degree(&poly_gcd(&chi, &shifted)).unwrap_or(0) == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn characteristic_polynomial_of_two_by_two() {
        // [[1,2],[3,4]]: λ² − 5λ − 2.
        let a = ExactMatrix::from_integers(&[&[1, 2], &[3, 4]]);
        assert_eq!(characteristic_polynomial(&a), vec![g(-2), g(-5), g(1)]);
    }

    #[test]
    fn gcd_finds_common_root() {
        // (λ−1)(λ−2) and (λ−2)(λ+3).
        let p = vec![g(2), g(-3), g(1)];
        let q = vec![g(-6), g(1), g(1)];
        assert_eq!(poly_gcd(&p, &q), vec![g(-2), g(1)]);
    }

    #[test]
    fn taylor_shift_matches_direct_expansion() {
        // p(λ) = λ², p(λ+3) = λ² + 6λ + 9.
        assert_eq!(
            shift(&vec![g(0), g(0), g(1)], &g(3)),
            vec![g(9), g(6), g(1)]
        );
    }

    #[test]
    fn resonance_detection() {
        assert!(!is_non_resonant(&ExactMatrix::from_integers(&[
            &[2, 0],
            &[0, 0]
        ])));
        assert!(is_non_resonant(&ExactMatrix::from_integers(&[
            &[0, 1],
            &[0, 0]
        ])));
        let half = ExactMatrix::scalar(1, &GaussianRational::from_ratio(1, 2));
        assert!(is_non_resonant(&half));
        let mut m = ExactMatrix::zeros(2, 2);
        m[(0, 0)] = GaussianRational::from_ratio(5, 2);
        m[(1, 1)] = GaussianRational::from_ratio(1, 2);
        assert!(!is_non_resonant(&m));
    }
}
