//! Closed-form criteria for polyhedral-Kähler cone metrics on `𝓐ₙ`.
//!
//! Cone angles `2πα_i` correspond to Lauricella parameters `a_i = 1 − α_i`.
//! A metric exists iff
//!
//! * (N.I.) no `α_i` is an integer,
//! * (P) `α_i + α_j > 1` for all `i < j`, and
//! * (S) `Σ{α_i} < 1` or `Σ{α_i} > n`,
//!
//! where `{x} = x − ⌊x⌋`. The module also evaluates the signature formula of
//! the invariant Hermitian form, local integrability of the volume density,
//! and the total volumes of the Fubini–Study quotient and the link sphere.
//!
//! Float inputs are compared with a strictness tolerance and flag results that
//! fall within it; exact rational inputs are decided without tolerance.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num::{BigRational, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::connection::{weights, ConnectionError, StandardConnection};
use crate::numkernel::{format_rational, rational_to_f64};

/// Default strictness tolerance for float inputs.
pub const DEFAULT_PK_TOL: f64 = 1e-9;

/// Distance within which [`region_geometry`] reports a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Errors of this module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PkError {
    /// `α₀ ≤ 0`: the apex is at infinite distance and volumes are undefined.
    #[error("α₀ = {0} ≤ 0: origin at infinite distance")]
    OriginAtInfiniteDistance(f64),
    /// Some weight is not real.
    #[error("weight at {0} is not real")]
    ComplexWeight(String),
    /// An angle vector needs at least two entries.
    #[error("angle vector has length {0}, expected at least 2")]
    TooShort(usize),
    /// Underlying connection error.
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

/// Fractional part `x − ⌊x⌋ ∈ [0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Exact fractional part.
pub fn frac_exact(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Outcome of a tolerant comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cmp {
    Less,
    Greater,
    /// Within tolerance; `exact` when the values are identical.
    Close {
        exact: bool,
    },
}

/// Scalars the criteria can be evaluated over.
trait Scalar: Clone {
    fn from_i64(n: i64) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    /// Fractional part, snapping values within tolerance of an integer to 0.
    fn frac_tol(&self, tol: f64) -> Self;
    /// `Some(exact)` when within tolerance of an integer.
    fn near_integer(&self, tol: f64) -> Option<bool>;
    fn compare(&self, other: &Self, tol: f64) -> Cmp;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn frac_tol(&self, tol: f64) -> Self {
        if self.near_integer(tol).is_some() {
            0.0
        } else {
            frac(*self)
        }
    }
    fn near_integer(&self, tol: f64) -> Option<bool> {
        let d = (self - self.round()).abs();
        (d <= tol).then_some(d == 0.0)
    }
    fn compare(&self, other: &Self, tol: f64) -> Cmp {
        let d = self - other;
        if d > tol {
            Cmp::Greater
        } else if d < -tol {
            Cmp::Less
        } else {
            Cmp::Close { exact: d == 0.0 }
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn frac_tol(&self, _tol: f64) -> Self {
        frac_exact(self)
    }
    fn near_integer(&self, _tol: f64) -> Option<bool> {
        self.is_integer().then_some(true)
    }
    fn compare(&self, other: &Self, _tol: f64) -> Cmp {
        match self.cmp(other) {
            Ordering::Less => Cmp::Less,
            Ordering::Greater => Cmp::Greater,
            Ordering::Equal => Cmp::Close { exact: true },
        }
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Cone-angle parameters `α₁,…,α_{n+1}` (angles `2πα_i`).
#[derive(Clone, Debug, PartialEq)]
pub enum AngleVector {
    /// Floating-point angles, compared with a tolerance.
    Float(Vec<f64>),
    /// Exact rational angles.
    Exact(Vec<BigRational>),
}

impl AngleVector {
    /// The dimension `n` (one less than the number of angles).
    pub fn n(&self) -> usize {
        self.len() - 1
    }

    /// Number of angles.
    pub fn len(&self) -> usize {
        match self {
            Self::Float(v) => v.len(),
            Self::Exact(v) => v.len(),
        }
    }

    /// Whether there are no angles.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angles as doubles.
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Float(v) => v.clone(),
            Self::Exact(v) => v.iter().map(rational_to_f64).collect(),
        }
    }

    /// Weights `a_i = 1 − α_i` as doubles.
    pub fn weights_f64(&self) -> Vec<f64> {
        self.to_f64().into_iter().map(|x| 1.0 - x).collect()
    }

    /// The sub-vector on the 1-based indices of `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        match self {
            Self::Float(v) => Self::Float(subset.iter().map(|&i| v[i - 1]).collect()),
            Self::Exact(v) => Self::Exact(subset.iter().map(|&i| v[i - 1].clone()).collect()),
        }
    }

    /// `α₀ = Σα_i − n`, the cone angle (over `2π`) at the origin.
    pub fn alpha0(&self) -> f64 {
        self.to_f64().iter().sum::<f64>() - self.n() as f64
    }
}

/// The condition that failed first.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum FailedCondition {
    /// (N.I.): `α_i` is an integer.
    NonInteger {
        /// 1-based index.
        index: usize,
        /// The angle.
        alpha: f64,
    },
    /// (P): `α_i + α_j ≤ 1`.
    Positivity {
        /// First 1-based index.
        i: usize,
        /// Second 1-based index.
        j: usize,
        /// `α_i + α_j`.
        sum: f64,
    },
    /// (S): `1 ≤ Σ{α_i} ≤ n`.
    Signature {
        /// `Σ{α_i}`.
        frac_sum: f64,
        /// The dimension `n`.
        n: usize,
    },
}

impl FailedCondition {
    /// Short name of the condition.
    pub fn name(&self) -> &'static str {
        match self {
            Self::NonInteger { .. } => "non-integer",
            Self::Positivity { .. } => "positivity",
            Self::Signature { .. } => "signature",
        }
    }
}

/// The cone angle along `H_{i,j}`, `2πβ_{i,j}` with `β_{i,j} = α_i + α_j − 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeAngle {
    /// First 1-based index.
    pub i: usize,
    /// Second 1-based index (`n + 1` denotes the hyperplane `z_i = 0`).
    pub j: usize,
    /// `β_{i,j}`.
    pub beta: f64,
}

/// Verdict of [`pk_exists`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceReport {
    /// Whether a metric exists.
    pub exists: bool,
    /// The first failed condition in the order (N.I.), (P), (S).
    pub failed: Option<FailedCondition>,
    /// `β_{i,j}` for all pairs.
    pub cone_angles: Vec<ConeAngle>,
    /// `Σ{α_i}`.
    pub frac_sum: f64,
    /// Set when some comparison was within tolerance without being exact.
    pub tolerance_ambiguous: bool,
}

fn pk_generic<T: Scalar>(alpha: &[T], tol: f64) -> ExistenceReport {
    let n = alpha.len() - 1;
    let mut ambiguous = false;
    let mut failed = None;
    let one = T::from_i64(1);
    for (k, x) in alpha.iter().enumerate() {
        if let Some(exact) = x.near_integer(tol) {
            ambiguous |= !exact;
            failed.get_or_insert(FailedCondition::NonInteger {
                index: k + 1,
                alpha: x.to_f64(),
            });
        }
    }
    let mut cone_angles = Vec::new();
    for i in 0..alpha.len() {
        for j in i + 1..alpha.len() {
            let sum = alpha[i].plus(&alpha[j]);
            cone_angles.push(ConeAngle {
                i: i + 1,
                j: j + 1,
                beta: sum.minus(&one).to_f64(),
            });
            match sum.compare(&one, tol) {
                Cmp::Greater => {}
                cmp => {
                    ambiguous |= cmp == Cmp::Close { exact: false };
                    if failed.is_none() {
                        failed = Some(FailedCondition::Positivity {
                            i: i + 1,
                            j: j + 1,
                            sum: sum.to_f64(),
                        });
                    }
                }
            }
        }
    }
    let s = alpha
        .iter()
        .fold(T::from_i64(0), |acc, x| acc.plus(&x.frac_tol(tol)));
    let below = s.compare(&one, tol);
    let above = s.compare(&T::from_i64(n as i64), tol);
    if below != Cmp::Less && above != Cmp::Greater {
        ambiguous |= below == Cmp::Close { exact: false } || above == Cmp::Close { exact: false };
        if failed.is_none() {
            failed = Some(FailedCondition::Signature {
                frac_sum: s.to_f64(),
                n,
            });
        }
    }
    ExistenceReport {
        exists: failed.is_none(),
        failed,
        cone_angles,
        frac_sum: s.to_f64(),
        tolerance_ambiguous: ambiguous,
    }
}

/// Decides existence of a PK cone metric with the given angles.
pub fn pk_exists(alpha: &AngleVector, tol: f64) -> Result<ExistenceReport, PkError> {
    if alpha.len() < 2 {
        return Err(PkError::TooShort(alpha.len()));
    }
    Ok(match alpha {
        AngleVector::Float(v) => pk_generic(v, tol),
        AngleVector::Exact(v) => pk_generic(v, tol),
    })
}

/// One row of [`subset_diagnostics`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetRow {
    /// 1-based indices.
    pub subset: Vec<usize>,
    /// `Σ_{i∈I} α_i`.
    pub sum: f64,
    /// `Σ_{i∈I} α_i > |I| − 1`.
    pub exceeds: bool,
    /// `Σ_{i∈I} α_i ∉ ℤ`.
    pub non_integer: bool,
}

impl SubsetRow {
    /// Whether both properties hold.
    pub fn passes(&self) -> bool {
        self.exceeds && self.non_integer
    }
}

fn subsets_of_size_at_least_two(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..1 << m)
        .filter(|mask| mask.count_ones() >= 2)
        .map(move |mask| {
            (0..m)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| k + 1)
                .collect()
        })
}

fn subset_generic<T: Scalar>(alpha: &[T], tol: f64) -> Vec<SubsetRow> {
    let mut rows: Vec<SubsetRow> = subsets_of_size_at_least_two(alpha.len())
        .map(|subset| {
            let sum = subset
                .iter()
                .fold(T::from_i64(0), |acc, &i| acc.plus(&alpha[i - 1]));
            let bound = T::from_i64(subset.len() as i64 - 1);
            SubsetRow {
                exceeds: sum.compare(&bound, tol) == Cmp::Greater,
                non_integer: sum.near_integer(tol).is_none(),
                sum: sum.to_f64(),
                subset,
            }
        })
        .collect();
    rows.sort_by(|a, b| (a.subset.len(), &a.subset).cmp(&(b.subset.len(), &b.subset)));
    rows
}

/// For every subset `I` with `|I| ≥ 2`: `Σ_{i∈I} α_i`, whether it exceeds
/// `|I| − 1` and whether it is non-integral. Rows ordered by size, then
/// lexicographically.
pub fn subset_diagnostics(alpha: &AngleVector, tol: f64) -> Vec<SubsetRow> {
    match alpha {
        AngleVector::Float(v) => subset_generic(v, tol),
        AngleVector::Exact(v) => subset_generic(v, tol),
    }
}

/// Region of the parameter cube determined by the signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignatureRegion {
    /// Negative definite (`p = 0`, `{a}` in `T₋`).
    #[serde(rename = "T-")]
    TMinus,
    /// Positive definite (`q = 0`, `{a}` in `T₊`).
    #[serde(rename = "T+")]
    TPlus,
    /// Non-degenerate of mixed signature.
    #[serde(rename = "indefinite")]
    Indefinite,
    /// Nontrivial kernel.
    #[serde(rename = "degenerate")]
    Degenerate,
}

/// Inertia of the invariant Hermitian form of the Lauricella holonomy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureResult {
    /// Positive index.
    pub p: usize,
    /// Negative index.
    pub q: usize,
    /// Kernel dimension.
    pub kernel_dim: usize,
    /// Region.
    pub region: SignatureRegion,
    /// `a_{n+2} = 2 − Σ a_i`.
    pub a_infinity: f64,
}

fn signature_generic<T: Scalar>(a: &[T], tol: f64) -> SignatureResult {
    let total = a.iter().fold(T::from_i64(0), |acc, x| acc.plus(x));
    let a_inf = T::from_i64(2).minus(&total);
    let all: Vec<T> = a
        .iter()
        .cloned()
        .chain(std::iter::once(a_inf.clone()))
        .collect();
    let one = T::from_i64(1);
    // When every a_i is integral the count is n + 2 and the form vanishes
    // identically; the kernel is then the whole space.
    let kernel_dim = all
        .iter()
        .filter(|x| x.near_integer(tol).is_some())
        .count()
        .min(a.len() - 1);
    let sum_p = all
        .iter()
        .fold(T::from_i64(0), |acc, x| acc.plus(&x.frac_tol(tol)));
    let sum_q = all.iter().fold(T::from_i64(0), |acc, x| {
        acc.plus(&one.minus(x).frac_tol(tol))
    });
    let p = (sum_p.to_f64() - 1.0).round().max(0.0) as usize;
    let q = (sum_q.to_f64() - 1.0).round().max(0.0) as usize;
    let region = if kernel_dim > 0 {
        SignatureRegion::Degenerate
    } else if p == 0 {
        SignatureRegion::TMinus
    } else if q == 0 {
        SignatureRegion::TPlus
    } else {
        SignatureRegion::Indefinite
    };
    SignatureResult {
        p,
        q,
        kernel_dim,
        region,
        a_infinity: a_inf.to_f64(),
    }
}

/// `p = −1 + Σ_{i≤n+2} {a_i}`, `q = −1 + Σ_{i≤n+2} {1 − a_i}` and the number of
/// integral `a_i` (`i ≤ n+2`), with `a_{n+2} = 2 − Σ a_i`. Values within
/// [`DEFAULT_PK_TOL`] of an integer count as integers. If every `a_i` is
/// integral the form is zero and `kernel_dim = n`.
pub fn signature_formula(a: &[f64]) -> SignatureResult {
    signature_generic(a, DEFAULT_PK_TOL)
}

/// Exact variant of [`signature_formula`].
pub fn signature_formula_exact(a: &[BigRational]) -> SignatureResult {
    signature_generic(a, 0.0)
}

/// Label of [`region_geometry`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    /// `Σ{a_i} < 1`.
    #[serde(rename = "T-")]
    TMinus,
    /// `Σ{a_i} > n`.
    #[serde(rename = "T+")]
    TPlus,
    /// `1 < Σ{a_i} < n`: the hole between the two simplices (an octahedron for `n = 2`).
    #[serde(rename = "hole")]
    Hole,
    /// Within [`BOUNDARY_TOL`] of `Σ{a_i} = 1` or `Σ{a_i} = n`.
    #[serde(rename = "boundary")]
    Boundary,
}

/// Classifies `{a} ∈ [0,1)^{n+1}` by `s = Σ{a_i}`.
pub fn region_geometry(a: &[f64]) -> RegionLabel {
    let n = a.len().saturating_sub(1) as f64;
    let s: f64 = a.iter().map(|&x| frac(x)).sum();
    if (s - 1.0).abs() <= BOUNDARY_TOL || (s - n).abs() <= BOUNDARY_TOL {
        RegionLabel::Boundary
    } else if s < 1.0 {
        RegionLabel::TMinus
    } else if s > n {
        RegionLabel::TPlus
    } else {
        RegionLabel::Hole
    }
}

/// Verdict of [`local_integrability`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    /// Whether `a_L < 1` on every irreducible flat.
    pub integrable: bool,
    /// Labels and weights of irreducible flats with `a_L ≥ 1`.
    pub witnesses: Vec<(String, String)>,
}

/// Local integrability of the volume density: `a_L < 1` for every irreducible flat.
pub fn local_integrability(c: &StandardConnection) -> Result<IntegrabilityReport, PkError> {
    let table = weights(c)?;
    let one = BigRational::from_integer(1.into());
    let mut witnesses = Vec::new();
    for e in &table.entries {
        if !e.weight.is_real() {
            return Err(PkError::ComplexWeight(e.label.clone()));
        }
        if e.weight.re >= one {
            witnesses.push((e.label.clone(), format_rational(&e.weight.re)));
        }
    }
    Ok(IntegrabilityReport {
        integrable: witnesses.is_empty(),
        witnesses,
    })
}

/// Total volumes of the Fubini–Study quotient and of the unit link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Volumes {
    /// `α₀^{n−1} π^{n−1} / (n−1)!`.
    pub vol_fs: f64,
    /// `α₀^n · 2πⁿ / (n−1)!`.
    pub vol_sphere: f64,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Volumes for cone angle `2πα₀` at the origin in dimension `n ≥ 1`.
pub fn fs_volumes(alpha0: f64, n: usize) -> Result<Volumes, PkError> {
    if alpha0 <= 0.0 || alpha0.is_nan() {
        return Err(PkError::OriginAtInfiniteDistance(alpha0));
    }
    let m = n.saturating_sub(1) as i32;
    let fact = factorial(n.saturating_sub(1));
    Ok(Volumes {
        vol_fs: alpha0.powi(m) * PI.powi(m) / fact,
        vol_sphere: alpha0.powi(n as i32) * 2.0 * PI.powi(n as i32) / fact,
    })
}

/// `α₀ = Σα_i − n` for an angle vector (exact inputs are summed exactly).
pub fn alpha0(alpha: &AngleVector) -> f64 {
    match alpha {
        AngleVector::Float(_) => alpha.alpha0(),
        AngleVector::Exact(v) => {
            let s: BigRational = v.iter().sum();
            rational_to_f64(&(s - BigRational::from_integer((v.len() as i64 - 1).into())))
        }
    }
}

/// Whether an exact angle vector has a positive `α₀`.
pub fn alpha0_positive_exact(alpha: &[BigRational]) -> bool {
    let s: BigRational = alpha.iter().sum();
    let a0 = s - BigRational::from_integer((alpha.len() as i64 - 1).into());
    a0.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lauricella::{reduced_residues, ParameterVector};
    use crate::numkernel::parse_rational;

    fn exact(v: &[&str]) -> AngleVector {
        AngleVector::Exact(v.iter().map(|s| parse_rational(s).unwrap()).collect())
    }

    #[test]
    fn fractional_parts() {
        assert!((frac(0.3) - 0.3).abs() < 1e-15);
        assert!((frac(-0.7) - 0.3).abs() < 1e-15);
        assert_eq!(frac(2.0), 0.0);
        assert_eq!(
            frac_exact(&parse_rational("-7/10").unwrap()),
            parse_rational("3/10").unwrap()
        );
    }

    #[test]
    fn existence_examples() {
        let yes = pk_exists(&AngleVector::Float(vec![0.9, 0.9, 0.9]), DEFAULT_PK_TOL).unwrap();
        assert!(yes.exists && !yes.tolerance_ambiguous);
        assert!(yes.cone_angles.iter().all(|c| (c.beta - 0.8).abs() < 1e-12));
        let no = pk_exists(&exact(&["0.6", "0.6", "0.6"]), DEFAULT_PK_TOL).unwrap();
        assert_eq!(no.failed.unwrap().name(), "signature");
        let ni = pk_exists(&AngleVector::Float(vec![1.0, 0.5, 0.7]), DEFAULT_PK_TOL).unwrap();
        assert_eq!(
            ni.failed,
            Some(FailedCondition::NonInteger {
                index: 1,
                alpha: 1.0
            })
        );
    }

    #[test]
    fn near_integer_is_flagged_ambiguous() {
        let r = pk_exists(
            &AngleVector::Float(vec![1.0 + 1e-11, 0.9, 0.9]),
            DEFAULT_PK_TOL,
        )
        .unwrap();
        assert!(!r.exists && r.tolerance_ambiguous);
    }

    #[test]
    fn positivity_failure_names_pair() {
        let r = pk_exists(&exact(&["0.3", "0.5", "0.9"]), DEFAULT_PK_TOL).unwrap();
        assert_eq!(
            r.failed,
            Some(FailedCondition::Positivity {
                i: 1,
                j: 2,
                sum: 0.8
            })
        );
    }

    #[test]
    fn subset_table_example() {
        let rows = subset_diagnostics(&exact(&["0.9", "0.9", "0.9"]), DEFAULT_PK_TOL);
        assert_eq!(rows.len(), 4);
        let full = rows.last().unwrap();
        assert_eq!(full.subset, vec![1, 2, 3]);
        assert!(full.passes());
    }

    #[test]
    fn signature_examples() {
        let s = signature_formula(&[0.1, 0.1, 0.1]);
        assert_eq!(
            (s.p, s.q, s.kernel_dim, s.region),
            (0, 2, 0, SignatureRegion::TMinus)
        );
        let s = signature_formula(&[0.9, 0.9, 0.9]);
        assert_eq!((s.p, s.q, s.region), (2, 0, SignatureRegion::TPlus));
        let s = signature_formula(&[1.0, 0.3, 0.2]);
        assert!(s.kernel_dim >= 1);
        assert_eq!(s.region, SignatureRegion::Degenerate);
        assert_eq!(s.p + s.q + s.kernel_dim, 2);
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_geometry(&[0.1, 0.1, 0.1]), RegionLabel::TMinus);
        assert_eq!(region_geometry(&[0.9, 0.9, 0.9]), RegionLabel::TPlus);
        assert_eq!(region_geometry(&[0.5, 0.5, 0.5]), RegionLabel::Hole);
        assert_eq!(region_geometry(&[0.5, 0.25, 0.25]), RegionLabel::Boundary);
    }

    #[test]
    fn integrability_examples() {
        let bad = ParameterVector::from_ratios(&[(4, 10), (4, 10), (4, 10)]).unwrap();
        let r = local_integrability(&reduced_residues(&bad)).unwrap();
        assert!(!r.integrable);
        assert_eq!(r.witnesses[0].0, "{H_1_2,H_1_3,H_2_3}");
        let good = ParameterVector::from_ratios(&[(2, 10), (2, 10), (2, 10)]).unwrap();
        assert!(
            local_integrability(&reduced_residues(&good))
                .unwrap()
                .integrable
        );
    }

    #[test]
    fn volume_examples() {
        assert_eq!(fs_volumes(1.0, 2).unwrap().vol_fs, PI);
        let a = AngleVector::Float(vec![0.9, 0.9, 0.9]);
        let v = fs_volumes(alpha0(&a), 2).unwrap();
        assert!((v.vol_fs - 0.7 * PI).abs() < 1e-12);
        assert!((fs_volumes(0.5, 3).unwrap().vol_fs - 0.25 * PI * PI / 2.0).abs() < 1e-12);
        assert!(matches!(
            fs_volumes(0.0, 2),
            Err(PkError::OriginAtInfiniteDistance(_))
        ));
    }
}
