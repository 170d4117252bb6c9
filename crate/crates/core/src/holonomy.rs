//! Numerical holonomy of standard connections.
//!
//! Parallel transport along a loop `γ` solves `X′ = Ω(γ)(γ′)·X` with
//! `X(0) = Id` and `Ω = Σ_H A_H dh/h`, so that the flat sections of
//! `∇ = d − Ω` are transported; a counter-clockwise loop around `z = 0` for the
//! one-dimensional connection `d − a dz/z` has holonomy `e^{2πia}`.
//!
//! Loops are composites of straight segments and circular arcs whose distance
//! to every hyperplane is computed in closed form. Generators of the
//! fundamental group are meridians drawn in a generic complex line through the
//! basepoint, each a straight tail, a counter-clockwise circle around the
//! puncture and the tail back; by the Zariski–Lefschetz theorem these generate
//! the fundamental group of the complement.
//!
//! From the generator matrices the module computes the invariant Hermitian
//! forms, a Burnside irreducibility test, central-loop spectra and residue
//! limits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arrangement::{Arrangement, Flat};
use crate::connection::{
    decomposition_at_flat, flat_label, localization_connection, residue_at_flat, ConnectionError,
    StandardConnection,
};
use crate::numkernel::{
    eigenvalues, hermitian_signature, matrix_exp, ode_transport, real_null_space_at_gap, CMatrix,
    HermForm, OdeError, OdeOptions, Signature,
};

/// Complex column vector.
pub type CVector = DVector<Complex64>;

/// Distance below which a point counts as lying on a hyperplane.
pub const POLE_TOL: f64 = 1e-14;
/// Default ODE tolerance for transports.
pub const DEFAULT_ODE_TOL: f64 = 1e-12;
/// Default relative tolerance of the invariant-form solve.
pub const DEFAULT_FORM_TOL: f64 = 1e-8;
/// Default tolerance of the Burnside rank test.
pub const DEFAULT_BURNSIDE_TOL: f64 = 1e-6;
/// Default tolerance for signatures of normalized invariant forms.
pub const DEFAULT_FORM_SIGNATURE_TOL: f64 = 1e-6;
/// Maximal number of random draws for basepoints and directions.
pub const MAX_DRAWS: usize = 1000;

/// Errors of holonomy computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolonomyError {
    /// The evaluation point lies on a hyperplane.
    #[error("point lies on hyperplane `{0}` (|h(z)| < {POLE_TOL:e})")]
    Pole(String),
    /// A loop touches the arrangement.
    #[error("loop `{label}` has clearance {clearance:e}, too close to the arrangement")]
    PathTooClose {
        /// Loop label.
        label: String,
        /// Its clearance.
        clearance: f64,
    },
    /// The integrator failed.
    #[error("transport along `{label}` failed: {source}")]
    Ode {
        /// Loop label.
        label: String,
        /// Underlying failure.
        source: OdeError,
    },
    /// No generic basepoint found.
    #[error("no generic basepoint found after {MAX_DRAWS} draws")]
    BasepointSearch,
    /// No generic line direction found.
    #[error("no generic line direction found after {MAX_DRAWS} draws")]
    DirectionSearch,
    /// The arrangement has no hyperplanes.
    #[error("arrangement is empty")]
    EmptyArrangement,
    /// Vector length does not match the dimension.
    #[error("expected a vector of length {expected}, found {found}")]
    DimensionMismatch {
        /// Ambient dimension.
        expected: usize,
        /// Length given.
        found: usize,
    },
    /// Index out of range.
    #[error("hyperplane index {0} out of range")]
    IndexOutOfRange(usize),
    /// Underlying connection error.
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `h(x) = Σ h_i x_i` (no conjugation).
fn apply(h: &CVector, x: &CVector) -> Complex64 {
    h.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

/// One piece of a loop, parametrized over `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    /// `start + t·(end − start)`.
    Line {
        /// Start point.
        start: CVector,
        /// End point.
        end: CVector,
    },
    /// `center + e^{2πi·turns·t}·radial` (counter-clockwise for positive turns).
    Arc {
        /// Fixed part.
        center: CVector,
        /// Rotating part.
        radial: CVector,
        /// Number of turns (negative for clockwise).
        turns: f64,
    },
}

impl Segment {
    /// The point at parameter `t`.
    pub fn point(&self, t: f64) -> CVector {
        match self {
            Self::Line { start, end } => start + (end - start) * real(t),
            Self::Arc {
                center,
                radial,
                turns,
            } => center + radial * Complex64::from_polar(1.0, 2.0 * PI * turns * t),
        }
    }

    /// The velocity at parameter `t`.
    pub fn velocity(&self, t: f64) -> CVector {
        match self {
            Self::Line { start, end } => end - start,
            Self::Arc { radial, turns, .. } => {
                radial
                    * (Complex64::new(0.0, 2.0 * PI * turns)
                        * Complex64::from_polar(1.0, 2.0 * PI * turns * t))
            }
        }
    }

    /// The segment traversed backwards.
    pub fn reversed(&self) -> Self {
        match self {
            Self::Line { start, end } => Self::Line {
                start: end.clone(),
                end: start.clone(),
            },
            Self::Arc {
                center,
                radial,
                turns,
            } => Self::Arc {
                center: center.clone(),
                radial: radial * Complex64::from_polar(1.0, 2.0 * PI * turns),
                turns: -turns,
            },
        }
    }

    /// Euclidean length.
    pub fn length(&self) -> f64 {
        match self {
            Self::Line { start, end } => (end - start).norm(),
            Self::Arc { radial, turns, .. } => 2.0 * PI * turns.abs() * radial.norm(),
        }
    }

    /// `min_t |h(γ(t))|`, computed in closed form.
    pub fn min_abs_form(&self, h: &CVector) -> f64 {
        match self {
            Self::Line { start, end } => {
                let a = apply(h, start);
                let b = apply(h, &(end - start));
                let bb = b.norm_sqr();
                let t = if bb == 0.0 {
                    0.0
                } else {
                    (-(a * b.conj()).re / bb).clamp(0.0, 1.0)
                };
                (a + b * t).norm()
            }
            Self::Arc {
                center,
                radial,
                turns,
            } => {
                let a = apply(h, center);
                let b = apply(h, radial);
                let full = (a.norm() - b.norm()).abs();
                let sweep = 2.0 * PI * turns;
                if sweep.abs() >= 2.0 * PI || a.norm() == 0.0 || b.norm() == 0.0 {
                    return full;
                }
                // |a + e^{iθ} b| is smallest where e^{iθ} b points along −a.
                let target = (-a).arg() - b.arg();
                let (lo, hi) = if sweep >= 0.0 {
                    (0.0, sweep)
                } else {
                    (sweep, 0.0)
                };
                let k = ((lo - target) / (2.0 * PI)).ceil();
                if target + 2.0 * PI * k <= hi {
                    return full;
                }
                let at = |th: f64| (a + b * Complex64::from_polar(1.0, th)).norm();
                at(lo).min(at(hi))
            }
        }
    }
}

/// A closed path in the complement, with its clearance from the arrangement.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    /// Human-readable label.
    pub label: String,
    /// Start and end point.
    pub basepoint: CVector,
    /// Pieces in traversal order.
    pub segments: Vec<Segment>,
    /// Minimal Euclidean distance from the path to the hyperplanes.
    pub clearance: f64,
}

/// Euclidean distance data for the hyperplanes of an arrangement.
fn float_forms(arrangement: &Arrangement) -> Vec<CVector> {
    arrangement
        .hyperplanes()
        .iter()
        .map(|h| CVector::from_iterator(h.form.len(), h.form.iter().map(|x| x.to_complex64())))
        .collect()
}

fn clearance_of(segments: &[Segment], forms: &[CVector]) -> f64 {
    forms
        .iter()
        .flat_map(|h| {
            let norm = h.norm();
            segments.iter().map(move |s| s.min_abs_form(h) / norm)
        })
        .fold(f64::INFINITY, f64::min)
}

impl LoopPath {
    /// Builds a loop and computes its clearance from the arrangement.
    pub fn new(
        label: impl Into<String>,
        segments: Vec<Segment>,
        arrangement: &Arrangement,
    ) -> Self {
        let basepoint = segments
            .first()
            .map(|s| s.point(0.0))
            .unwrap_or_else(|| CVector::zeros(arrangement.dimension()));
        let clearance = clearance_of(&segments, &float_forms(arrangement));
        Self {
            label: label.into(),
            basepoint,
            segments,
            clearance,
        }
    }

    /// `‖γ(1) − γ(0)‖` plus the gaps between consecutive pieces.
    pub fn closure_residual(&self) -> f64 {
        let mut res = 0.0;
        let mut cur = self.basepoint.clone();
        for s in &self.segments {
            res += (s.point(0.0) - &cur).norm();
            cur = s.point(1.0);
        }
        res + (cur - &self.basepoint).norm()
    }

    /// The loop traversed backwards.
    pub fn reversed(&self) -> Self {
        Self {
            label: format!("{}⁻¹", self.label),
            basepoint: self.basepoint.clone(),
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            clearance: self.clearance,
        }
    }

    /// `self` followed by `other` (both based at the same point).
    pub fn then(&self, other: &Self) -> Self {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Self {
            label: format!("{}·{}", self.label, other.label),
            basepoint: self.basepoint.clone(),
            segments,
            clearance: self.clearance.min(other.clearance),
        }
    }

    /// Total Euclidean length.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }
}

/// Float residues and forms, ready for evaluating `Ω`.
#[derive(Clone, Debug)]
pub struct ConnectionField {
    ids: Vec<String>,
    forms: Vec<CVector>,
    residues: Vec<CMatrix>,
    n: usize,
}

impl ConnectionField {
    /// Coerces the connection to float mode.
    pub fn new(c: &StandardConnection) -> Self {
        Self {
            ids: c.arrangement().ids(),
            forms: float_forms(c.arrangement()),
            residues: c.float_residues(),
            n: c.dimension(),
        }
    }

    /// Ambient dimension.
    pub fn dimension(&self) -> usize {
        self.n
    }

    fn eval_unchecked(&self, z: &CVector, v: &CVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for (h, a) in self.forms.iter().zip(&self.residues) {
            let hv = apply(h, v);
            if hv != Complex64::new(0.0, 0.0) {
                out += a * (hv / apply(h, z));
            }
        }
        out
    }

    /// `Ω(z)(v) = Σ_H A_H·h(v)/h(z)`.
    pub fn eval(&self, z: &CVector, v: &CVector) -> Result<CMatrix, HolonomyError> {
        for x in [z, v] {
            if x.len() != self.n {
                return Err(HolonomyError::DimensionMismatch {
                    expected: self.n,
                    found: x.len(),
                });
            }
        }
        for (h, id) in self.forms.iter().zip(&self.ids) {
            if apply(h, z).norm() < POLE_TOL {
                return Err(HolonomyError::Pole(id.clone()));
            }
        }
        Ok(self.eval_unchecked(z, v))
    }
}

/// `Ω(z)(v) = Σ_H A_H·h(v)/h(z)` for a connection (exact residues are coerced).
pub fn connection_form(
    c: &StandardConnection,
    z: &CVector,
    v: &CVector,
) -> Result<CMatrix, HolonomyError> {
    ConnectionField::new(c).eval(z, v)
}

/// Transport matrix and accumulated error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult {
    /// `X(1)` with `X(0) = Id`.
    pub matrix: CMatrix,
    /// Sum of the stepper's error estimates.
    pub err: f64,
}

/// Parallel transport around a loop in the coordinate frame at its basepoint.
pub fn holonomy(
    c: &StandardConnection,
    path: &LoopPath,
    tol: f64,
) -> Result<HolonomyResult, HolonomyError> {
    transport(&ConnectionField::new(c), path, tol)
}

fn transport(
    field: &ConnectionField,
    path: &LoopPath,
    tol: f64,
) -> Result<HolonomyResult, HolonomyError> {
    let n = field.dimension();
    if path.basepoint.len() != n {
        return Err(HolonomyError::DimensionMismatch {
            expected: n,
            found: path.basepoint.len(),
        });
    }
    let scale = path.basepoint.norm().max(1.0);
    if path.clearance <= 1e3 * POLE_TOL * scale {
        return Err(HolonomyError::PathTooClose {
            label: path.label.clone(),
            clearance: path.clearance,
        });
    }
    let mut x = CMatrix::identity(n, n);
    let mut err = 0.0;
    for seg in &path.segments {
        let length = seg.length();
        if length == 0.0 {
            continue;
        }
        // Start with steps comparable to the clearance relative to the length.
        let initial_step = (0.1 * path.clearance / length).clamp(1e-6, 1e-2);
        let opts = OdeOptions {
            tol,
            initial_step,
            ..OdeOptions::default()
        };
        let out = ode_transport(
            |t| field.eval_unchecked(&seg.point(t), &seg.velocity(t)),
            &x,
            &opts,
        )
        .map_err(|source| HolonomyError::Ode {
            label: path.label.clone(),
            source,
        })?;
        x = out.x;
        err += out.err_est;
    }
    Ok(HolonomyResult { matrix: x, err })
}

/// Draws a real basepoint with coordinates `k/64`, `|k| ≤ 256`, whose distance
/// to every hyperplane exceeds `0.05·‖p‖`.
pub fn generic_basepoint(
    arrangement: &Arrangement,
    rng: &mut ChaCha8Rng,
) -> Result<CVector, HolonomyError> {
    let n = arrangement.dimension();
    let forms = float_forms(arrangement);
    for _ in 0..MAX_DRAWS {
        let p = CVector::from_fn(n, |_, _| {
            real(rng.random_range(-256i32..=256) as f64 / 64.0)
        });
        let norm = p.norm();
        if norm == 0.0 {
            continue;
        }
        if forms
            .iter()
            .all(|h| apply(h, &p).norm() / h.norm() > 0.05 * norm)
        {
            return Ok(p);
        }
    }
    Err(HolonomyError::BasepointSearch)
}

/// Meridians and the scalar central loop at a common basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorLoops {
    /// Basepoint `p` (real).
    pub basepoint: CVector,
    /// Direction `w` of the generic line `p + λw`.
    pub direction: CVector,
    /// Punctures `λ_H = −h(p)/h(w)`, in hyperplane order.
    pub punctures: Vec<Complex64>,
    /// One meridian per hyperplane, in hyperplane order.
    pub meridians: Vec<LoopPath>,
    /// The scalar central loop `t ↦ e^{2πit}·p`.
    pub central: LoopPath,
}

fn point_segment_distance(q: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let dd = d.norm_sqr();
    let t = if dd == 0.0 {
        0.0
    } else {
        (((q - a) * d.conj()).re / dd).clamp(0.0, 1.0)
    };
    (q - (a + d * t)).norm()
}

/// Generator loops with radius fraction `⅓`.
pub fn generator_loops(
    arrangement: &Arrangement,
    seed: u64,
) -> Result<GeneratorLoops, HolonomyError> {
    generator_loops_with(arrangement, seed, 1.0 / 3.0)
}

/// Generator loops: a generic real basepoint `p` and a generic complex line
/// `p + λw`; the meridian of `H` circles `λ_H` counter-clockwise with radius
/// `radius_fraction · min_{K≠H} |λ_H − λ_K|`, reached by a straight tail from
/// `λ = 0`. Tails stay clear of the other circles.
pub fn generator_loops_with(
    arrangement: &Arrangement,
    seed: u64,
    radius_fraction: f64,
) -> Result<GeneratorLoops, HolonomyError> {
    if arrangement.is_empty() {
        return Err(HolonomyError::EmptyArrangement);
    }
    let n = arrangement.dimension();
    let forms = float_forms(arrangement);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = generic_basepoint(arrangement, &mut rng)?;
    let m = forms.len();
    'draw: for _ in 0..MAX_DRAWS {
        let w = CVector::from_fn(n, |_, _| {
            Complex64::new(
                rng.random_range(-64i32..=64) as f64,
                rng.random_range(-64i32..=64) as f64,
            ) / 64.0
        });
        if w.norm() == 0.0 {
            continue;
        }
        let mut punctures = Vec::with_capacity(m);
        for h in &forms {
            let hw = apply(h, &w);
            if hw.norm() <= 1e-3 * h.norm() * w.norm() {
                continue 'draw;
            }
            punctures.push(-apply(h, &p) / hw);
        }
        let scale = punctures.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let radii: Vec<f64> = (0..m)
            .map(|i| {
                let nearest = (0..m)
                    .filter(|&j| j != i)
                    .map(|j| (punctures[i] - punctures[j]).norm())
                    .fold(f64::INFINITY, f64::min);
                radius_fraction * nearest.min(punctures[i].norm())
            })
            .collect();
        if radii.iter().any(|&r| r <= 1e-3 * scale) {
            continue;
        }
        let approach: Vec<Complex64> = (0..m)
            .map(|i| punctures[i] - punctures[i] / punctures[i].norm() * radii[i])
            .collect();
        for i in 0..m {
            for j in (0..m).filter(|&j| j != i) {
                if point_segment_distance(punctures[j], Complex64::new(0.0, 0.0), approach[i])
                    <= 1.5 * radii[j]
                {
                    continue 'draw;
                }
            }
        }
        let meridians = (0..m)
            .map(|i| {
                let tail_end = &p + &w * approach[i];
                let segments = vec![
                    Segment::Line {
                        start: p.clone(),
                        end: tail_end.clone(),
                    },
                    Segment::Arc {
                        center: &p + &w * punctures[i],
                        radial: &w * (approach[i] - punctures[i]),
                        turns: 1.0,
                    },
                    Segment::Line {
                        start: tail_end,
                        end: p.clone(),
                    },
                ];
                LoopPath::new(
                    format!("meridian {}", arrangement.hyperplane(i).id),
                    segments,
                    arrangement,
                )
            })
            .collect();
        let central = scalar_central_loop(&p, arrangement);
        return Ok(GeneratorLoops {
            basepoint: p,
            direction: w,
            punctures,
            meridians,
            central,
        });
    }
    Err(HolonomyError::DirectionSearch)
}

/// The loop `t ↦ e^{2πit}·p`.
pub fn scalar_central_loop(p: &CVector, arrangement: &Arrangement) -> LoopPath {
    let seg = Segment::Arc {
        center: CVector::zeros(p.len()),
        radial: p.clone(),
        turns: 1.0,
    };
    LoopPath::new("central c_0", vec![seg], arrangement)
}

/// Central loops of a flat `L` in the localized model.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralLoops {
    /// Label of the flat.
    pub flat: String,
    /// Basepoint, generic for the localization.
    pub basepoint: CVector,
    /// `dim L`.
    pub flat_dim: usize,
    /// `t ↦ e^{2πit}·p`.
    pub scalar: LoopPath,
    /// Per component `L_j`: the loop `t ↦ p − p_j + e^{2πit}·p_j`, the weight
    /// `a_{L_j}` and `dim L_j^⊥`.
    pub components: Vec<(LoopPath, Complex64, usize)>,
}

/// Builds the central loops of `L` using the decomposition `p = p_L + Σ p_j`
/// along `V = L ⊕ L_1^⊥ ⊕ … ⊕ L_k^⊥`. Clearances refer to the localization.
pub fn central_loops(
    c: &StandardConnection,
    flat: &Flat,
    seed: u64,
) -> Result<CentralLoops, HolonomyError> {
    let local = localization_connection(c, flat)?;
    let arrangement = local.arrangement();
    if arrangement.is_empty() {
        return Err(HolonomyError::EmptyArrangement);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = generic_basepoint(arrangement, &mut rng)?;
    let n = c.dimension();
    let report = decomposition_at_flat(c, flat)?;
    let mut columns: Vec<CVector> = flat.kernel_basis().iter().map(|v| to_cvector(v)).collect();
    let mut ranges = Vec::new();
    for comp in &report.components {
        let start = columns.len();
        columns.extend(comp.perp.iter().map(|v| to_cvector(v)));
        ranges.push(start..columns.len());
    }
    let basis = CMatrix::from_columns(&columns);
    let coeffs = basis
        .clone()
        .lu()
        .solve(&p)
        .ok_or(HolonomyError::Connection(ConnectionError::ZeroWeight {
            flat: report.label.clone(),
        }))?;
    let components = report
        .components
        .iter()
        .zip(ranges)
        .map(|(comp, range)| {
            let mut pj = CVector::zeros(n);
            for k in range.clone() {
                pj += basis.column(k) * coeffs[k];
            }
            let seg = Segment::Arc {
                center: &p - &pj,
                radial: pj,
                turns: 1.0,
            };
            let path = LoopPath::new(format!("central {}", comp.label), vec![seg], arrangement);
            (path, comp.weight.to_complex64(), range.len())
        })
        .collect();
    Ok(CentralLoops {
        flat: report.label,
        flat_dim: flat.dim(),
        scalar: scalar_central_loop(&p, arrangement),
        basepoint: p,
        components,
    })
}

fn to_cvector(v: &[crate::numkernel::GaussianRational]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|x| x.to_complex64()))
}

/// Largest distance in a greedy nearest-neighbour matching of two multisets.
fn match_multisets(expected: &[Complex64], computed: &[Complex64]) -> f64 {
    let mut unused: Vec<Complex64> = computed.to_vec();
    let mut worst: f64 = 0.0;
    for e in expected {
        let Some((k, d)) = unused
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            return f64::INFINITY;
        };
        worst = worst.max(d);
        unused.swap_remove(k);
    }
    if unused.is_empty() {
        worst
    } else {
        f64::INFINITY
    }
}

/// Spectrum comparison for one loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    /// Loop label.
    pub label: String,
    /// Expected eigenvalues.
    pub expected: Vec<Complex64>,
    /// Eigenvalues of the transported matrix.
    pub computed: Vec<Complex64>,
    /// Largest matching distance.
    pub max_deviation: f64,
    /// Transport error estimate.
    pub err: f64,
    /// `max_deviation ≤ tol`.
    pub pass: bool,
}

/// Result of [`central_loop_spectrum_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Label of the flat.
    pub flat: String,
    /// One entry per loop: the scalar loop first, then each component.
    pub entries: Vec<SpectrumEntry>,
    /// Whether every entry passes.
    pub pass: bool,
}

fn unit(a: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * a).exp()
}

/// Checks the eigenvalues of central-loop holonomies of the localization at
/// `L`: the loop `e^{2πit}p` has `e^{2πi a_{L_j}}` with multiplicity
/// `dim L_j^⊥` and `1` with multiplicity `dim L`; the loop of component `j`
/// has `e^{2πi a_{L_j}}` on `L_j^⊥` and `1` elsewhere. When `A_L = 0` every
/// eigenvalue is `1`.
pub fn central_loop_spectrum_check(
    c: &StandardConnection,
    flat: &Flat,
    tol: f64,
    seed: u64,
) -> Result<SpectrumReport, HolonomyError> {
    let local = localization_connection(c, flat)?;
    let field = ConnectionField::new(&local);
    let n = c.dimension();
    let one = Complex64::new(1.0, 0.0);
    let mut loops: Vec<(LoopPath, Vec<Complex64>)> = Vec::new();
    let label;
    if residue_at_flat(c, flat)?.is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = generic_basepoint(local.arrangement(), &mut rng)?;
        label = flat_label(c.arrangement(), flat);
        loops.push((scalar_central_loop(&p, local.arrangement()), vec![one; n]));
    } else {
        let cl = central_loops(c, flat, seed)?;
        label = cl.flat.clone();
        let mut scalar_expected = vec![one; cl.flat_dim];
        for (path, weight, dim) in &cl.components {
            scalar_expected.extend(std::iter::repeat_n(unit(*weight), *dim));
            let mut expected = vec![unit(*weight); *dim];
            expected.extend(std::iter::repeat_n(one, n - dim));
            loops.push((path.clone(), expected));
        }
        loops.insert(0, (cl.scalar.clone(), scalar_expected));
    }
    let mut entries = Vec::new();
    for (path, expected) in loops {
        let t = transport(&field, &path, DEFAULT_ODE_TOL)?;
        let computed = eigenvalues(&t.matrix);
        let max_deviation = match_multisets(&expected, &computed);
        entries.push(SpectrumEntry {
            label: path.label.clone(),
            pass: max_deviation <= tol,
            expected,
            computed,
            max_deviation,
            err: t.err,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(SpectrumReport {
        flat: label,
        entries,
        pass,
    })
}

/// Result of [`residue_limit_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueLimitReport {
    /// Hyperplane id.
    pub hyperplane: String,
    /// `exp(2πi A_H)`.
    pub limit: CMatrix,
    /// `(radius, ‖T_r − exp(2πi A_H)‖)` in the order given.
    pub errors: Vec<(f64, f64)>,
    /// Whether the errors strictly decrease along the list.
    pub decreasing: bool,
}

/// Compares small-circle holonomies around `H` with `exp(2πi A_H)`.
///
/// The circles are `x₀ + r·e^{2πit}·ν` with `ν = h̄/‖h‖` and `x₀ ∈ H` a generic
/// point at distance one from the other hyperplanes; holonomies are taken in
/// the coordinate frame at the starting point, without tails.
pub fn residue_limit_check(
    c: &StandardConnection,
    h_index: usize,
    radii: &[f64],
    seed: u64,
) -> Result<ResidueLimitReport, HolonomyError> {
    let a = c.arrangement();
    if h_index >= a.len() {
        return Err(HolonomyError::IndexOutOfRange(h_index));
    }
    let forms = float_forms(a);
    let h = &forms[h_index];
    let hn = h.norm();
    let nu = h.map(|z| z.conj()) / real(hn);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x0 = None;
    for _ in 0..MAX_DRAWS {
        let p = CVector::from_fn(a.dimension(), |_, _| {
            real(rng.random_range(-256i32..=256) as f64 / 64.0)
        });
        let q = &p - &nu * (apply(h, &p) / real(hn));
        let others = (0..forms.len())
            .filter(|&k| k != h_index)
            .map(|k| apply(&forms[k], &q).norm() / forms[k].norm())
            .fold(f64::INFINITY, f64::min);
        if others.is_infinite() {
            let norm = q.norm();
            x0 = Some(if norm > 0.0 { q / real(norm) } else { q });
            break;
        }
        if others > 0.05 * q.norm() {
            x0 = Some(q / real(others));
            break;
        }
    }
    let x0 = x0.ok_or(HolonomyError::BasepointSearch)?;
    let field = ConnectionField::new(c);
    let residue = &c.float_residues()[h_index];
    let limit = matrix_exp(&(residue * Complex64::new(0.0, 2.0 * PI)));
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        let seg = Segment::Arc {
            center: x0.clone(),
            radial: &nu * real(r),
            turns: 1.0,
        };
        let path = LoopPath::new(format!("circle r={r}"), vec![seg], a);
        let t = transport(&field, &path, DEFAULT_ODE_TOL)?;
        errors.push((r, (t.matrix - &limit).norm()));
    }
    let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(ResidueLimitReport {
        hyperplane: a.hyperplane(h_index).id.clone(),
        limit,
        errors,
        decreasing,
    })
}

/// Basis of the Hermitian matrices: `E_kk`, `E_kl + E_lk`, `i(E_kl − E_lk)`.
fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(k, k)] = real(1.0);
        basis.push(m);
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(k, l)] = real(1.0);
            m[(l, k)] = real(1.0);
            basis.push(m);
            let mut m = CMatrix::zeros(n, n);
            m[(k, l)] = Complex64::new(0.0, 1.0);
            m[(l, k)] = Complex64::new(0.0, -1.0);
            basis.push(m);
        }
    }
    basis
}

/// A basis of the Hermitian forms `X` with `T*XT = X` for every generator,
/// from the real null space of the `n²`-unknown linear system, cut at the
/// widest singular-value gap among those below `tol · σ_max`. Forms are normalized to unit Frobenius norm.
pub fn invariant_forms(generators: &[CMatrix], tol: f64) -> Vec<HermForm> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let n = first.nrows();
    let basis = hermitian_basis(n);
    let rows = 2 * n * n * generators.len();
    let mut system = DMatrix::<f64>::zeros(rows.max(1), basis.len());
    for (b, x) in basis.iter().enumerate() {
        for (g, t) in generators.iter().enumerate() {
            let e = t.adjoint() * x * t - x;
            for (k, z) in e.iter().enumerate() {
                let r = 2 * (g * n * n + k);
                system[(r, b)] = z.re;
                system[(r + 1, b)] = z.im;
            }
        }
    }
    let (_, null) = real_null_space_at_gap(&system, tol);
    null.into_iter()
        .map(|coeffs| {
            let mut m = CMatrix::zeros(n, n);
            for (cf, b) in coeffs.iter().zip(&basis) {
                m += b * real(*cf);
            }
            let m = (&m + m.adjoint()) * real(0.5);
            let norm = m.norm();
            HermForm::new(m / real(norm)).expect("Hermitian by construction")
        })
        .collect()
}

/// Verdict of the Burnside test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// The generated algebra is all of `M_n(ℂ)`.
    Irreducible,
    /// The generated algebra is a proper subalgebra.
    Reducible,
    /// A rank decision fell within the tolerance band, or the word cap was hit.
    Ambiguous,
}

/// Result of [`irreducibility`].
#[derive(Clone, Debug, PartialEq)]
pub struct IrreducibilityReport {
    /// The verdict.
    pub verdict: Irreducibility,
    /// Complex dimension of the span of the words examined.
    pub algebra_dim: usize,
    /// Longest word length examined.
    pub word_length: usize,
    /// A common eigenvector (largest entry scaled to 1), when reducible and one is found.
    pub invariant_line: Option<CVector>,
}

/// Burnside test: the span of words of length `≤ word_cap` (default `2n`,
/// doubled once if needed) in the generators and their inverses has complex
/// dimension `n²` iff the representation is irreducible.
pub fn irreducibility(
    generators: &[CMatrix],
    word_cap: Option<usize>,
    tol: f64,
) -> IrreducibilityReport {
    let Some(first) = generators.first() else {
        return IrreducibilityReport {
            verdict: Irreducibility::Ambiguous,
            algebra_dim: 0,
            word_length: 0,
            invariant_line: None,
        };
    };
    let n = first.nrows();
    let target = n * n;
    let mut letters: Vec<CMatrix> = generators.to_vec();
    letters.extend(generators.iter().filter_map(|g| g.clone().try_inverse()));
    let mut basis: Vec<CVector> = Vec::new();
    let mut ambiguous = false;
    let add = |m: &CMatrix, basis: &mut Vec<CVector>, ambiguous: &mut bool| -> bool {
        let norm = m.norm();
        if norm == 0.0 {
            return false;
        }
        let mut v = CVector::from_iterator(target, m.iter().map(|z| z / norm));
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let r = v.norm();
        if r > tol / 10.0 && r < tol * 10.0 {
            *ambiguous = true;
        }
        if r > tol {
            basis.push(v / real(r));
            true
        } else {
            false
        }
    };
    let id = CMatrix::identity(n, n);
    add(&id, &mut basis, &mut ambiguous);
    let mut frontier = vec![id];
    let cap = word_cap.unwrap_or(2 * n).max(1);
    let mut length = 0;
    for limit in [cap, 2 * cap] {
        while length < limit && basis.len() < target && !frontier.is_empty() {
            length += 1;
            let mut next = Vec::new();
            for f in &frontier {
                for g in &letters {
                    let m = g * f;
                    if add(&m, &mut basis, &mut ambiguous) {
                        let norm = m.norm();
                        next.push(m / real(norm));
                    }
                }
            }
            frontier = next;
        }
        if basis.len() == target || frontier.is_empty() {
            break;
        }
    }
    let verdict = if ambiguous {
        Irreducibility::Ambiguous
    } else if basis.len() == target {
        Irreducibility::Irreducible
    } else if frontier.is_empty() {
        Irreducibility::Reducible
    } else {
        Irreducibility::Ambiguous
    };
    let invariant_line = (verdict != Irreducibility::Irreducible)
        .then(|| common_eigenvector(generators, 1e3 * tol.max(1e-9)))
        .flatten();
    IrreducibilityReport {
        verdict,
        algebra_dim: basis.len(),
        word_length: length,
        invariant_line,
    }
}

/// Searches the one-dimensional eigenspaces of each generator for a vector
/// that every generator maps to a multiple of itself.
fn common_eigenvector(generators: &[CMatrix], tol: f64) -> Option<CVector> {
    let n = generators.first()?.nrows();
    for g in generators {
        for lambda in eigenvalues(g) {
            let shifted = g - CMatrix::identity(n, n) * lambda;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t?;
            let (k, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))?;
            let v: CVector = v_t.row(k).adjoint();
            let invariant = generators.iter().all(|t| {
                let tv = t * &v;
                let mu = v.dotc(&tv);
                (tv - &v * mu).norm() <= tol * t.norm()
            });
            if invariant {
                let (_, lead) = v
                    .iter()
                    .map(|z| (z.norm(), *z))
                    .max_by(|a, b| a.0.total_cmp(&b.0))?;
                return Some(v / lead);
            }
        }
    }
    None
}

/// Options for [`holonomy_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyOptions {
    /// ODE tolerance.
    pub ode_tol: f64,
    /// Seed for basepoints and line directions.
    pub seed: u64,
    /// Relative tolerance of the invariant-form solve.
    pub form_tol: f64,
    /// Tolerance for the signature of the (normalized) invariant form.
    pub signature_tol: f64,
    /// Tolerance of the Burnside rank test.
    pub burnside_tol: f64,
    /// Burnside word cap (default `2n`).
    pub word_cap: Option<usize>,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        Self {
            ode_tol: DEFAULT_ODE_TOL,
            seed: 0,
            form_tol: DEFAULT_FORM_TOL,
            signature_tol: DEFAULT_FORM_SIGNATURE_TOL,
            burnside_tol: DEFAULT_BURNSIDE_TOL,
            word_cap: None,
        }
    }
}

/// Holonomy of one generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorHolonomy {
    /// Loop label.
    pub label: String,
    /// Hyperplane id for meridians.
    pub hyperplane: Option<String>,
    /// Transport matrix.
    pub matrix: CMatrix,
    /// Error estimate.
    pub err: f64,
    /// Loop clearance.
    pub clearance: f64,
}

/// Summary of the holonomy representation.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyReport {
    /// Basepoint.
    pub basepoint: CVector,
    /// Meridian holonomies in hyperplane order.
    pub meridians: Vec<GeneratorHolonomy>,
    /// Holonomy of the scalar central loop.
    pub central: GeneratorHolonomy,
    /// Basis of the invariant Hermitian forms.
    pub invariant_forms: Vec<HermForm>,
    /// Signature of the invariant form when the space is one-dimensional
    /// (defined up to overall sign).
    pub signature: Option<Signature>,
    /// Burnside verdict.
    pub irreducibility: IrreducibilityReport,
    /// Largest transport error estimate.
    pub max_err: f64,
}

/// Meridian and central holonomies, invariant forms, signature and irreducibility.
pub fn holonomy_report(
    c: &StandardConnection,
    opts: &HolonomyOptions,
) -> Result<HolonomyReport, HolonomyError> {
    let loops = generator_loops(c.arrangement(), opts.seed)?;
    let field = ConnectionField::new(c);
    let run =
        |path: &LoopPath, hyperplane: Option<String>| -> Result<GeneratorHolonomy, HolonomyError> {
            let t = transport(&field, path, opts.ode_tol)?;
            Ok(GeneratorHolonomy {
                label: path.label.clone(),
                hyperplane,
                matrix: t.matrix,
                err: t.err,
                clearance: path.clearance,
            })
        };
    let meridians = loops
        .meridians
        .iter()
        .zip(c.arrangement().hyperplanes())
        .map(|(path, h)| run(path, Some(h.id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let central = run(&loops.central, None)?;
    let max_err = meridians
        .iter()
        .chain(std::iter::once(&central))
        .map(|g| g.err)
        .fold(0.0, f64::max);
    let generators: Vec<CMatrix> = meridians.iter().map(|g| g.matrix.clone()).collect();
    let forms = invariant_forms(&generators, opts.form_tol.max(100.0 * max_err));
    let signature = (forms.len() == 1).then(|| hermitian_signature(&forms[0], opts.signature_tol));
    let irreducibility = irreducibility(&generators, opts.word_cap, opts.burnside_tol);
    Ok(HolonomyReport {
        basepoint: loops.basepoint,
        meridians,
        central,
        invariant_forms: forms,
        signature,
        irreducibility,
        max_err,
    })
}
