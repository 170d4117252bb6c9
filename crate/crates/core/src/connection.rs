//! Standard logarithmic connections `∇ = d − Σ_H A_H dh/h`.
//!
//! A [`StandardConnection`] attaches a constant residue matrix `A_H` to every
//! hyperplane of an arrangement. In exact mode the classical criteria are
//! decided exactly over `ℚ(i)`:
//!
//! * torsion-free ⇔ `H ⊂ ker A_H` for every hyperplane;
//! * flat ⇔ `[A_L, A_H] = 0` for every codimension-two flat `L` and `H ⊇ L`,
//!   where `A_L = Σ_{H ⊇ L} A_H` is the residue at `L`;
//! * the weight of an irreducible flat is `a_L = tr A_L / codim L`.
//!
//! For flat torsion-free connections with nonzero weights every residue has
//! rank one, `A_H(x) = h(x)·n_H`, and the normals give the orthogonal-type
//! complements `L^⊥ = span{n_H : H ⊇ L}` used by the decomposition, Euler
//! field, quotient and induced constructions. Derived connections store the
//! change of basis they used, so comparisons stay exact.
//!
//! Float mode only carries residues for holonomy evaluation; every exact
//! criterion refuses it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arrangement::{
    center_rank_essential, irreducible_components, irreducible_decomposition, is_irreducible,
    is_irreducible_flat, localization, restriction, Arrangement, ArrangementError, Flat,
    Hyperplane, Restriction,
};
use crate::numkernel::{
    greedy_independent, in_span, is_non_resonant, span_dimension, CMatrix, ExactMatrix,
    ExactVector, GaussianRational,
};

/// Errors from connection construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    /// Residue count does not match the hyperplane count.
    #[error("expected {expected} residues, found {found}")]
    ResidueCount {
        /// Hyperplane count.
        expected: usize,
        /// Residues supplied.
        found: usize,
    },
    /// A residue is not `n × n`.
    #[error("residue of `{id}` is {rows}×{cols}, expected {n}×{n}")]
    ResidueShape {
        /// Hyperplane id.
        id: String,
        /// Rows.
        rows: usize,
        /// Columns.
        cols: usize,
        /// Ambient dimension.
        n: usize,
    },
    /// A residue map lacks an entry.
    #[error("no residue given for hyperplane `{0}`")]
    MissingResidue(String),
    /// A residue map names an unknown hyperplane.
    #[error("residue given for unknown hyperplane `{0}`")]
    UnknownHyperplane(String),
    /// An exact criterion was asked of a float-mode connection.
    #[error("exact criterion refused in float mode")]
    FloatMode,
    /// Underlying arrangement error.
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    /// A residue does not have rank one.
    #[error("residue of `{id}` has rank {rank}, expected 1")]
    ResidueRank {
        /// Hyperplane id.
        id: String,
        /// Its rank.
        rank: usize,
    },
    /// A rank-one residue is nilpotent (`n_H ∈ H`).
    #[error("residue of `{id}` is nilpotent (its normal lies in the hyperplane)")]
    NilpotentResidue {
        /// Hyperplane id.
        id: String,
    },
    /// A weight needed for the construction vanishes.
    #[error("weight zero at flat {flat}")]
    ZeroWeight {
        /// Label of the flat.
        flat: String,
    },
    /// Some `α_i = 1 − a_{T_i}` vanishes.
    #[error("Euler field undefined: 1 − a = 0 on the factor {factor}")]
    EulerUndefined {
        /// Label of the factor.
        factor: String,
    },
    /// `A_{H0} = 0`, so `TH₀` is not parallel.
    #[error("residue of `{0}` is zero: the hyperplane is not parallel, no induced connection")]
    ZeroResidue(String),
    /// A residue does not preserve the subspace it must preserve.
    #[error(
        "residue at {flat} does not preserve `{hyperplane}` (connection not flat torsion-free?)"
    )]
    NotInvariant {
        /// Label of the flat.
        flat: String,
        /// Hyperplane id.
        hyperplane: String,
    },
    /// The arrangement is not essential and irreducible.
    #[error("arrangement is not essential and irreducible")]
    NotEssentialIrreducible,
    /// No hyperplane has an essential irreducible restriction.
    #[error("no essential-irreducible restriction")]
    NoValidH0,
    /// The given flat is not a flat of the arrangement or out of range.
    #[error("hyperplane index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Residue storage.
#[derive(Clone, Debug, PartialEq)]
pub enum Residues {
    /// Exact residues over `ℚ(i)`.
    Exact(Vec<ExactMatrix>),
    /// Complex double residues (holonomy carrier only).
    Float(Vec<CMatrix>),
}

/// Arithmetic mode of a connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact `ℚ(i)` residues.
    Exact,
    /// Complex double residues.
    Float,
}

/// A standard connection: an arrangement with one `n × n` residue per hyperplane.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardConnection {
    arrangement: Arrangement,
    residues: Residues,
}

impl StandardConnection {
    /// Exact connection with residues listed in hyperplane order.
    pub fn new_exact(
        arrangement: Arrangement,
        residues: Vec<ExactMatrix>,
    ) -> Result<Self, ConnectionError> {
        check_shapes(&arrangement, residues.iter().map(|m| (m.rows(), m.cols())))?;
        Ok(Self {
            arrangement,
            residues: Residues::Exact(residues),
        })
    }

    /// Float connection with residues listed in hyperplane order.
    pub fn new_float(
        arrangement: Arrangement,
        residues: Vec<CMatrix>,
    ) -> Result<Self, ConnectionError> {
        check_shapes(
            &arrangement,
            residues.iter().map(|m| (m.nrows(), m.ncols())),
        )?;
        Ok(Self {
            arrangement,
            residues: Residues::Float(residues),
        })
    }

    /// Exact connection from a map hyperplane id → residue.
    pub fn from_residue_map(
        arrangement: Arrangement,
        mut map: BTreeMap<String, ExactMatrix>,
    ) -> Result<Self, ConnectionError> {
        let mut residues = Vec::with_capacity(arrangement.len());
        for h in arrangement.hyperplanes() {
            residues.push(
                map.remove(&h.id)
                    .ok_or_else(|| ConnectionError::MissingResidue(h.id.clone()))?,
            );
        }
        if let Some(extra) = map.into_keys().next() {
            return Err(ConnectionError::UnknownHyperplane(extra));
        }
        Self::new_exact(arrangement, residues)
    }

    /// The zero connection `d` on an arrangement.
    pub fn zero(arrangement: Arrangement) -> Self {
        let n = arrangement.dimension();
        let residues = vec![ExactMatrix::zeros(n, n); arrangement.len()];
        Self {
            arrangement,
            residues: Residues::Exact(residues),
        }
    }

    /// The arrangement.
    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    /// Ambient dimension.
    pub fn dimension(&self) -> usize {
        self.arrangement.dimension()
    }

    /// Arithmetic mode.
    pub fn mode(&self) -> Mode {
        match self.residues {
            Residues::Exact(_) => Mode::Exact,
            Residues::Float(_) => Mode::Float,
        }
    }

    /// Residue storage.
    pub fn residues(&self) -> &Residues {
        &self.residues
    }

    /// Exact residues in hyperplane order, refusing float mode.
    pub fn exact_residues(&self) -> Result<&[ExactMatrix], ConnectionError> {
        match &self.residues {
            Residues::Exact(r) => Ok(r),
            Residues::Float(_) => Err(ConnectionError::FloatMode),
        }
    }

    /// Exact residue of the hyperplane with the given id.
    pub fn residue(&self, id: &str) -> Option<&ExactMatrix> {
        let k = self.arrangement.index_of(id)?;
        match &self.residues {
            Residues::Exact(r) => Some(&r[k]),
            Residues::Float(_) => None,
        }
    }

    /// Residues as complex doubles (exact residues are coerced).
    pub fn float_residues(&self) -> Vec<CMatrix> {
        match &self.residues {
            Residues::Exact(r) => r.iter().map(ExactMatrix::to_cmatrix).collect(),
            Residues::Float(r) => r.clone(),
        }
    }

    /// The same connection in float mode.
    pub fn to_float(&self) -> Self {
        Self {
            arrangement: self.arrangement.clone(),
            residues: Residues::Float(self.float_residues()),
        }
    }

    /// The connection in new linear coordinates `y = Φ·x`: forms become
    /// `h·Φ⁻¹` and residues `Φ·A_H·Φ⁻¹`. Returns `None` if `Φ` is singular.
    pub fn change_coordinates(&self, phi: &ExactMatrix) -> Option<Result<Self, ConnectionError>> {
        let inv = phi.inverse()?;
        let residues = match self.exact_residues() {
            Ok(r) => r,
            Err(e) => return Some(Err(e)),
        };
        let hyperplanes = self
            .arrangement
            .hyperplanes()
            .iter()
            .map(|h| {
                Hyperplane::new(
                    h.id.clone(),
                    (&ExactMatrix::from_rows(vec![h.form.clone()]) * &inv).row(0),
                )
            })
            .collect();
        let arrangement = Arrangement::new(self.dimension(), hyperplanes)
            .expect("invertible change keeps validity");
        let residues = residues.iter().map(|a| &(phi * a) * &inv).collect();
        Some(Self::new_exact(arrangement, residues))
    }
}

fn check_shapes(
    arrangement: &Arrangement,
    shapes: impl ExactSizeIterator<Item = (usize, usize)>,
) -> Result<(), ConnectionError> {
    if shapes.len() != arrangement.len() {
        return Err(ConnectionError::ResidueCount {
            expected: arrangement.len(),
            found: shapes.len(),
        });
    }
    let n = arrangement.dimension();
    for ((rows, cols), h) in shapes.zip(arrangement.hyperplanes()) {
        if rows != n || cols != n {
            return Err(ConnectionError::ResidueShape {
                id: h.id.clone(),
                rows,
                cols,
                n,
            });
        }
    }
    Ok(())
}

/// Human-readable label of a flat: the ids of its containing hyperplanes.
pub fn flat_label(arrangement: &Arrangement, flat: &Flat) -> String {
    if flat.is_ambient() {
        return "{ambient}".to_string();
    }
    let ids: Vec<&str> = flat
        .containing_set()
        .iter()
        .map(|&k| arrangement.hyperplane(k).id.as_str())
        .collect();
    format!("{{{}}}", ids.join(","))
}

/// Verdict of [`check_torsion_free`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionFreeReport {
    /// Whether every `A_H` kills `H`.
    pub torsion_free: bool,
    /// Ids of violating hyperplanes.
    pub violators: Vec<String>,
}

/// Exact torsion-freeness: `A_H·v = 0` for every basis vector `v` of every `H`.
pub fn check_torsion_free(c: &StandardConnection) -> Result<TorsionFreeReport, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let violators: Vec<String> = (0..a.len())
        .filter(|&k| {
            a.hyperplane_flat(k)
                .kernel_basis()
                .iter()
                .any(|v| residues[k].mul_vec(v).iter().any(|x| !x.is_zero()))
        })
        .map(|k| a.hyperplane(k).id.clone())
        .collect();
    Ok(TorsionFreeReport {
        torsion_free: violators.is_empty(),
        violators,
    })
}

/// A non-commuting pair found by [`check_flat`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessViolation {
    /// The codimension-two flat `L`.
    pub flat: Flat,
    /// Its label.
    pub flat_label: String,
    /// The hyperplane `H ⊇ L` with `[A_L, A_H] ≠ 0`.
    pub hyperplane: String,
}

/// Verdict of [`check_flat`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    /// Whether all commutators vanish.
    pub flat: bool,
    /// Violations in lattice order.
    pub violations: Vec<FlatnessViolation>,
}

/// Exact flatness: `[A_L, A_H] = 0` for every codimension-two flat `L` and every `H ⊇ L`.
pub fn check_flat(c: &StandardConnection) -> Result<FlatnessReport, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let lattice = a.lattice()?;
    let mut violations = Vec::new();
    for flat in lattice.of_codim(2) {
        let a_l = sum_residues(a.dimension(), residues, flat.containing_set());
        for &k in flat.containing_set() {
            if !a_l.commutator(&residues[k]).is_zero() {
                violations.push(FlatnessViolation {
                    flat: flat.clone(),
                    flat_label: flat_label(a, flat),
                    hyperplane: a.hyperplane(k).id.clone(),
                });
            }
        }
    }
    Ok(FlatnessReport {
        flat: violations.is_empty(),
        violations,
    })
}

fn sum_residues(n: usize, residues: &[ExactMatrix], indices: &[usize]) -> ExactMatrix {
    indices
        .iter()
        .fold(ExactMatrix::zeros(n, n), |acc, &k| &acc + &residues[k])
}

/// The residue `A_L = Σ_{H ⊇ L} A_H` at a flat.
pub fn residue_at_flat(
    c: &StandardConnection,
    flat: &Flat,
) -> Result<ExactMatrix, ConnectionError> {
    let residues = c.exact_residues()?;
    c.arrangement().validate_flat(flat)?;
    Ok(sum_residues(c.dimension(), residues, flat.containing_set()))
}

/// Weight of one irreducible flat.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEntry {
    /// The flat.
    pub flat: Flat,
    /// Its label.
    pub label: String,
    /// `a_L = tr A_L / codim L`.
    pub weight: GaussianRational,
}

/// Weights of all irreducible flats, in lattice order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    /// One entry per irreducible flat.
    pub entries: Vec<WeightEntry>,
    /// Labels of flats with zero weight.
    pub zero_weight: Vec<String>,
    /// Whether every weight is nonzero.
    pub nonzero_weights: bool,
}

impl WeightTable {
    /// The weight of a flat, if it is irreducible.
    pub fn weight_of(&self, flat: &Flat) -> Option<&GaussianRational> {
        self.entries
            .iter()
            .find(|e| e.flat.containing_set() == flat.containing_set())
            .map(|e| &e.weight)
    }
}

fn weight_of_flat(n: usize, residues: &[ExactMatrix], flat: &Flat) -> GaussianRational {
    let tr = sum_residues(n, residues, flat.containing_set()).trace();
    &tr / &GaussianRational::from_integer(flat.codim() as i64)
}

/// Weights of all irreducible flats and the nonzero-weights verdict.
pub fn weights(c: &StandardConnection) -> Result<WeightTable, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let traces: Vec<GaussianRational> = residues.iter().map(ExactMatrix::trace).collect();
    let mut entries = Vec::new();
    for (flat, _) in a
        .lattice()?
        .flats()
        .iter()
        .zip(a.irreducible_mask()?)
        .filter(|(_, &irr)| irr)
    {
        let tr = flat
            .containing_set()
            .iter()
            .fold(GaussianRational::zero(), |acc, &k| &acc + &traces[k]);
        entries.push(WeightEntry {
            flat: flat.clone(),
            label: flat_label(a, flat),
            weight: &tr / &GaussianRational::from_integer(flat.codim() as i64),
        });
    }
    let zero_weight: Vec<String> = entries
        .iter()
        .filter(|e| e.weight.is_zero())
        .map(|e| e.label.clone())
        .collect();
    Ok(WeightTable {
        nonzero_weights: zero_weight.is_empty(),
        zero_weight,
        entries,
    })
}

/// Normal vectors of rank-one residues and the spans `L^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFrame {
    /// `n_H` per hyperplane, in hyperplane order.
    pub normals: Vec<ExactVector>,
    /// `L^⊥` bases for every irreducible flat, in lattice order.
    pub perps: Vec<(Flat, Vec<ExactVector>)>,
}

impl NormalFrame {
    /// A basis of `L^⊥ = span{n_H : H ⊇ L}` for any flat, chosen greedily
    /// among the normals in hyperplane order.
    pub fn perp(&self, flat: &Flat) -> Vec<ExactVector> {
        let vs: Vec<ExactVector> = flat
            .containing_set()
            .iter()
            .map(|&k| self.normals[k].clone())
            .collect();
        greedy_independent(&vs)
            .into_iter()
            .map(|i| vs[i].clone())
            .collect()
    }
}

/// Normal vector of a single residue: `n_H = A_H(u)` for `u` with `h(u) = 1`,
/// after checking `A_H` has rank one, `A_H = h(·)·n_H`, and `n_H ∉ H`.
fn normal_of(h: &Hyperplane, residue: &ExactMatrix) -> Result<ExactVector, ConnectionError> {
    let rank = residue.rank();
    if rank != 1 {
        return Err(ConnectionError::ResidueRank {
            id: h.id.clone(),
            rank,
        });
    }
    let n = h.form.len();
    let k = h
        .form
        .iter()
        .position(|x| !x.is_zero())
        .expect("nonzero form");
    let mut u = vec![GaussianRational::zero(); n];
    u[k] = h.form[k].inv().expect("nonzero coefficient");
    let normal = residue.mul_vec(&u);
    let rebuilt = ExactMatrix::from_columns(n, &[normal.clone()]);
    let rebuilt = &rebuilt * &ExactMatrix::from_rows(vec![h.form.clone()]);
    if &rebuilt != residue {
        // Rank one but the kernel is not H: not of the form h(·)·n.
        return Err(ConnectionError::ResidueRank {
            id: h.id.clone(),
            rank,
        });
    }
    if h.eval(&normal).is_zero() {
        return Err(ConnectionError::NilpotentResidue { id: h.id.clone() });
    }
    Ok(normal)
}

/// Normal data of all residues and `L^⊥` spans of irreducible flats.
pub fn normal_data(c: &StandardConnection) -> Result<NormalFrame, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let normals = a
        .hyperplanes()
        .iter()
        .zip(residues)
        .map(|(h, r)| normal_of(h, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut frame = NormalFrame {
        normals,
        perps: Vec::new(),
    };
    let lattice = a.lattice()?;
    let perps = lattice
        .flats()
        .iter()
        .filter(|f| is_irreducible_flat(a, f))
        .map(|f| (f.clone(), frame.perp(f)))
        .collect();
    frame.perps = perps;
    Ok(frame)
}

fn local_normals(c: &StandardConnection, flat: &Flat) -> Result<NormalFrame, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let mut normals = vec![Vec::new(); a.len()];
    for &k in flat.containing_set() {
        normals[k] = normal_of(a.hyperplane(k), &residues[k])?;
    }
    Ok(NormalFrame {
        normals,
        perps: Vec::new(),
    })
}

/// One irreducible component in a [`DecompositionReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentData {
    /// The component `L_i`.
    pub flat: Flat,
    /// Its label.
    pub label: String,
    /// Its weight `a_{L_i}`.
    pub weight: GaussianRational,
    /// A basis of `L_i^⊥`.
    pub perp: Vec<ExactVector>,
}

/// Exact verification of the direct-sum structure at a flat.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    /// Label of the flat.
    pub label: String,
    /// A basis of `L^⊥`.
    pub perp: Vec<ExactVector>,
    /// Irreducible components ordered by smallest hyperplane index.
    pub components: Vec<ComponentData>,
    /// (i) `V = L ⊕ L^⊥`.
    pub direct_sum: bool,
    /// (i) `ker A_L = L`.
    pub kernel_is_flat: bool,
    /// (i) `img A_L = L^⊥`.
    pub image_is_perp: bool,
    /// (ii) `L^⊥ = ⊕ L_i^⊥`.
    pub perp_splits: bool,
    /// (ii) `A_L` acts on `L_i^⊥` as multiplication by `a_{L_i}`.
    pub component_action: bool,
    /// (iii) `L_i = L ⊕ (⊕_{j≠i} L_j^⊥)`.
    pub component_complements: bool,
}

impl DecompositionReport {
    /// Whether item (i) passes.
    pub fn item_i(&self) -> bool {
        self.direct_sum && self.kernel_is_flat && self.image_is_perp
    }

    /// Whether item (ii) passes.
    pub fn item_ii(&self) -> bool {
        self.perp_splits && self.component_action
    }

    /// Whether item (iii) passes.
    pub fn item_iii(&self) -> bool {
        self.component_complements
    }

    /// Whether all items pass.
    pub fn all_pass(&self) -> bool {
        self.item_i() && self.item_ii() && self.item_iii()
    }
}

/// Verifies `V = L ⊕ L^⊥`, `ker A_L = L`, `img A_L = L^⊥`,
/// `L^⊥ = ⊕ L_i^⊥` with `A_L|_{L_i^⊥} = a_{L_i}`, and
/// `L_i = L ⊕ (⊕_{j≠i} L_j^⊥)`, all exactly.
pub fn decomposition_at_flat(
    c: &StandardConnection,
    flat: &Flat,
) -> Result<DecompositionReport, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    a.validate_flat(flat)?;
    let n = a.dimension();
    let frame = local_normals(c, flat)?;
    let a_l = sum_residues(n, residues, flat.containing_set());
    let perp = frame.perp(flat);
    let l_basis = flat.kernel_basis().to_vec();

    let mut both = l_basis.clone();
    both.extend(perp.iter().cloned());
    let direct_sum = l_basis.len() + perp.len() == n && span_dimension(&both) == n;
    let rank_a_l = a_l.rank();
    let kernel_is_flat = l_basis
        .iter()
        .all(|v| a_l.mul_vec(v).iter().all(GaussianRational::is_zero))
        && rank_a_l == flat.codim();
    let image_is_perp =
        rank_a_l == perp.len() && a_l.columns().iter().all(|col| in_span(&perp, col));

    let mut components = Vec::new();
    for comp in irreducible_components(a, flat)? {
        components.push(ComponentData {
            label: flat_label(a, &comp),
            weight: weight_of_flat(n, residues, &comp),
            perp: frame.perp(&comp),
            flat: comp,
        });
    }
    let all_comp_perp: Vec<ExactVector> = components
        .iter()
        .flat_map(|d| d.perp.iter().cloned())
        .collect();
    let perp_splits =
        all_comp_perp.len() == perp.len() && span_dimension(&all_comp_perp) == perp.len();
    let component_action = components.iter().all(|d| {
        d.perp
            .iter()
            .all(|v| a_l.mul_vec(v) == v.iter().map(|x| x * &d.weight).collect::<Vec<_>>())
    });
    let component_complements = components.iter().enumerate().all(|(i, d)| {
        let mut vs = l_basis.clone();
        for (j, other) in components.iter().enumerate() {
            if j != i {
                vs.extend(other.perp.iter().cloned());
            }
        }
        let inside = vs.iter().all(|v| {
            d.flat
                .containing_set()
                .iter()
                .all(|&k| a.hyperplane(k).eval(v).is_zero())
        });
        inside && vs.len() == d.flat.dim() && span_dimension(&vs) == d.flat.dim()
    });

    Ok(DecompositionReport {
        label: flat_label(a, flat),
        perp,
        components,
        direct_sum,
        kernel_is_flat,
        image_is_perp,
        perp_splits,
        component_action,
        component_complements,
    })
}

/// One factor `T_i^⊥` of the Euler field.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerFactor {
    /// Hyperplane ids of the irreducible block `𝓗_i`.
    pub block: Vec<String>,
    /// Weight `a_{T_i}` of its center.
    pub weight: GaussianRational,
    /// `α_i = 1 − a_{T_i}`.
    pub alpha: GaussianRational,
    /// Coefficient `α_i⁻¹` of `e_{T_i^⊥}`.
    pub coefficient: GaussianRational,
    /// A basis of `T_i^⊥`.
    pub perp: Vec<ExactVector>,
    /// Whether `Σ_{H∈𝓗_i} A_H = a_{T_i}·Id` on `T_i^⊥` holds exactly.
    pub identity_holds: bool,
}

/// The Euler vector field `e = e_T + Σ α_i⁻¹ e_{T_i^⊥}` of a connection.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerField {
    /// Matrix `E` with `e(z) = E·z` in standard coordinates.
    pub matrix: ExactMatrix,
    /// Adapted basis: columns span `T`, then each `T_i^⊥` in factor order.
    pub adapted_basis: ExactMatrix,
    /// Diagonal coefficients of `E` in the adapted basis.
    pub coefficients: Vec<GaussianRational>,
    /// Dimension of the center `T`.
    pub center_dim: usize,
    /// One entry per irreducible block, ordered by smallest hyperplane index.
    pub factors: Vec<EulerFactor>,
    /// Whether `E − Σ α_i⁻¹ A_{T_i} = Id` and `h∘E = α_i⁻¹·h` for `H ∈ 𝓗_i`
    /// hold exactly, i.e. `∇e = Id`.
    pub nabla_e_is_identity: bool,
    /// All verifications pass.
    pub verified: bool,
}

/// Computes the Euler field and verifies it exactly.
pub fn euler_field(c: &StandardConnection) -> Result<EulerField, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let n = a.dimension();
    let all: Vec<usize> = (0..a.len()).collect();
    let center = center_rank_essential(a).center;
    let frame = local_normals(c, &a.flat_of(&all))?;

    let mut columns: Vec<ExactVector> = center.kernel_basis().to_vec();
    let mut coefficients = vec![GaussianRational::one(); columns.len()];
    let mut factors = Vec::new();
    let mut sum_scaled = ExactMatrix::zeros(n, n);
    let mut form_scaling = true;
    let blocks = irreducible_decomposition(a);
    let mut block_coeffs = Vec::new();
    for block in &blocks {
        let t_i = a.flat_of(block);
        let weight = weight_of_flat(n, residues, &t_i);
        let alpha = &GaussianRational::one() - &weight;
        let label = flat_label(a, &t_i);
        let coefficient = alpha
            .inv()
            .ok_or(ConnectionError::EulerUndefined { factor: label })?;
        let perp = frame.perp(&t_i);
        let a_t = sum_residues(n, residues, t_i.containing_set());
        let identity_holds = perp
            .iter()
            .all(|v| a_t.mul_vec(v) == v.iter().map(|x| x * &weight).collect::<Vec<_>>());
        sum_scaled = &sum_scaled + &a_t.scale(&coefficient);
        columns.extend(perp.iter().cloned());
        coefficients.extend(std::iter::repeat_n(coefficient.clone(), perp.len()));
        block_coeffs.push((t_i.containing_set().to_vec(), coefficient.clone()));
        factors.push(EulerFactor {
            block: block.iter().map(|&k| a.hyperplane(k).id.clone()).collect(),
            weight,
            alpha,
            coefficient,
            perp,
            identity_holds,
        });
    }
    if columns.len() != n {
        return Err(ConnectionError::ZeroWeight {
            flat: flat_label(a, &center),
        });
    }
    let adapted_basis = ExactMatrix::from_columns(n, &columns);
    let inv = adapted_basis
        .inverse()
        .ok_or_else(|| ConnectionError::ZeroWeight {
            flat: flat_label(a, &center),
        })?;
    let mut diag = ExactMatrix::zeros(n, n);
    for (i, cf) in coefficients.iter().enumerate() {
        diag[(i, i)] = cf.clone();
    }
    let matrix = &(&adapted_basis * &diag) * &inv;

    for (members, coefficient) in &block_coeffs {
        for &k in members {
            let h = ExactMatrix::from_rows(vec![a.hyperplane(k).form.clone()]);
            if &h * &matrix != h.scale(coefficient) {
                form_scaling = false;
            }
        }
    }
    let nabla_e_is_identity = form_scaling && &matrix - &sum_scaled == ExactMatrix::identity(n);
    let verified = nabla_e_is_identity && factors.iter().all(|f| f.identity_holds);
    Ok(EulerField {
        matrix,
        adapted_basis,
        coefficients,
        center_dim: center.dim(),
        factors,
        nabla_e_is_identity,
        verified,
    })
}

/// The localization `∇^L`: same residues on the hyperplanes containing `L`.
pub fn localization_connection(
    c: &StandardConnection,
    flat: &Flat,
) -> Result<StandardConnection, ConnectionError> {
    let arrangement = localization(c.arrangement(), flat)?;
    let residues = match c.residues() {
        Residues::Exact(r) => Residues::Exact(
            flat.containing_set()
                .iter()
                .map(|&k| r[k].clone())
                .collect(),
        ),
        Residues::Float(r) => Residues::Float(
            flat.containing_set()
                .iter()
                .map(|&k| r[k].clone())
                .collect(),
        ),
    };
    Ok(StandardConnection {
        arrangement,
        residues,
    })
}

/// The quotient connection on `V/L ≅ L^⊥` with its coordinate change.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientConnection {
    /// The connection on `ℂ^{codim L}`.
    pub connection: StandardConnection,
    /// `n × codim L` matrix `U` whose columns are the chosen basis of `L^⊥`.
    pub basis: ExactMatrix,
    /// `codim L × n` matrix `F` of quotient coordinates (`F·U = Id`, `F` kills `L`).
    pub coordinates: ExactMatrix,
}

/// The quotient connection `∇^{V/L}`.
///
/// Quotient coordinates are the forms of a greedy basis of `{h : H ⊇ L}`
/// (hyperplane order); the basis of `L^⊥` is dual to them. Residues are
/// `F·A_H·U` and forms `h·U`.
pub fn quotient_connection(
    c: &StandardConnection,
    flat: &Flat,
) -> Result<QuotientConnection, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    a.validate_flat(flat)?;
    let n = a.dimension();
    for comp in irreducible_components(a, flat)? {
        if weight_of_flat(n, residues, &comp).is_zero() {
            return Err(ConnectionError::ZeroWeight {
                flat: flat_label(a, &comp),
            });
        }
    }
    let frame = local_normals(c, flat)?;
    let perp = frame.perp(flat);
    let local_forms: Vec<ExactVector> = flat
        .containing_set()
        .iter()
        .map(|&k| a.hyperplane(k).form.clone())
        .collect();
    let chosen = greedy_independent(&local_forms);
    let f = ExactMatrix::from_rows(chosen.iter().map(|&i| local_forms[i].clone()).collect());
    let c_dim = flat.codim();
    if c_dim == 0 {
        let empty = Arrangement::empty(0);
        return Ok(QuotientConnection {
            connection: StandardConnection::new_exact(empty, Vec::new())?,
            basis: ExactMatrix::zeros(n, 0),
            coordinates: ExactMatrix::zeros(0, n),
        });
    }
    let n_mat = ExactMatrix::from_columns(n, &perp);
    let y = (&f * &n_mat)
        .inverse()
        .ok_or_else(|| ConnectionError::ZeroWeight {
            flat: flat_label(a, flat),
        })?;
    let u = &n_mat * &y;
    let hyperplanes = flat
        .containing_set()
        .iter()
        .map(|&k| {
            let h = a.hyperplane(k);
            Hyperplane::new(
                h.id.clone(),
                (&ExactMatrix::from_rows(vec![h.form.clone()]) * &u).row(0),
            )
        })
        .collect();
    let arrangement = Arrangement::new(c_dim, hyperplanes)?;
    let q_res = flat
        .containing_set()
        .iter()
        .map(|&k| &(&f * &residues[k]) * &u)
        .collect();
    Ok(QuotientConnection {
        connection: StandardConnection::new_exact(arrangement, q_res)?,
        basis: u,
        coordinates: f,
    })
}

/// The connection induced on a hyperplane `H₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedConnection {
    /// The connection on `H₀ ≅ ℂ^{n−1}` (coordinates of the restriction frame).
    pub connection: StandardConnection,
    /// The restriction of the arrangement to `H₀`, including its frame and projection.
    pub restriction: Restriction,
}

/// The induced connection `∇″` on `H₀`: the arrangement is the restriction to
/// `H₀`, and the residue at a trace `H″` is the restriction to `H₀` of the
/// full residue `A_{H″}` at the codimension-two flat `H″`.
pub fn induced_connection(
    c: &StandardConnection,
    h0: usize,
) -> Result<InducedConnection, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    if h0 >= a.len() {
        return Err(ConnectionError::IndexOutOfRange(h0));
    }
    if residues[h0].is_zero() {
        return Err(ConnectionError::ZeroResidue(a.hyperplane(h0).id.clone()));
    }
    let restr = restriction(a, &a.hyperplane_flat(h0))?;
    let b = &restr.basis;
    let mut induced = Vec::with_capacity(restr.arrangement.len());
    for t in 0..restr.arrangement.len() {
        let first = restr.fiber(t)[0];
        let l = a.flat_of(&[first, h0]);
        let a_l = sum_residues(a.dimension(), residues, l.containing_set());
        let r = b
            .solve(&(&a_l * b))
            .ok_or_else(|| ConnectionError::NotInvariant {
                flat: flat_label(a, &l),
                hyperplane: a.hyperplane(h0).id.clone(),
            })?;
        induced.push(r);
    }
    Ok(InducedConnection {
        connection: StandardConnection::new_exact(restr.arrangement.clone(), induced)?,
        restriction: restr,
    })
}

/// One evaluation of the linear weight constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConstraintEntry {
    /// Id of `H₀`.
    pub h0: String,
    /// `(1/n) Σ_H a_H`.
    pub lhs: GaussianRational,
    /// `(1/(n−1)) (Σ_{H⋔H₀} a_H + Σ_{L ⊂ H₀ irreducible, codim 2} a_L)`.
    pub rhs: GaussianRational,
    /// `lhs − rhs`.
    pub residual: GaussianRational,
}

/// Evaluations of the linear weight constraint at every admissible `H₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConstraintReport {
    /// One entry per hyperplane whose restriction is essential and irreducible.
    pub entries: Vec<WeightConstraintEntry>,
    /// Whether every residual vanishes exactly.
    pub all_zero: bool,
}

/// Evaluates `(1/n)Σ a_H = (1/(n−1))(Σ_{H⋔H₀} a_H + Σ_{codim-2 irr L⊂H₀} a_L)`
/// at every hyperplane `H₀` whose restriction is essential and irreducible.
/// A nonzero residual is a diagnostic (the identity holds for flat
/// torsion-free connections).
pub fn check_weight_constraints(
    c: &StandardConnection,
) -> Result<WeightConstraintReport, ConnectionError> {
    let residues = c.exact_residues()?;
    let a = c.arrangement();
    let n = a.dimension();
    if n < 2 || !center_rank_essential(a).essential || !is_irreducible(a) {
        return Err(ConnectionError::NotEssentialIrreducible);
    }
    let lattice = a.lattice()?;
    let total: GaussianRational = residues.iter().map(ExactMatrix::trace).sum();
    let lhs = &total / &GaussianRational::from_integer(n as i64);
    let mut entries = Vec::new();
    for h0 in 0..a.len() {
        let restr = restriction(a, &a.hyperplane_flat(h0))?;
        let r = &restr.arrangement;
        if r.is_empty() || !center_rank_essential(r).essential || !is_irreducible(r) {
            continue;
        }
        let mut sum = GaussianRational::zero();
        for flat in lattice.of_codim(2).filter(|f| f.lies_in(h0)) {
            if flat.containing_set().len() == 2 {
                let other = flat
                    .containing_set()
                    .iter()
                    .copied()
                    .find(|&k| k != h0)
                    .expect("two members");
                sum += &residues[other].trace();
            } else {
                sum += &weight_of_flat(n, residues, flat);
            }
        }
        let rhs = &sum / &GaussianRational::from_integer(n as i64 - 1);
        entries.push(WeightConstraintEntry {
            h0: a.hyperplane(h0).id.clone(),
            residual: &lhs - &rhs,
            lhs: lhs.clone(),
            rhs,
        });
    }
    if entries.is_empty() {
        return Err(ConnectionError::NoValidH0);
    }
    let all_zero = entries.iter().all(|e| e.residual.is_zero());
    Ok(WeightConstraintReport { entries, all_zero })
}

/// Non-resonance of each residue: no two eigenvalues differ by a nonzero
/// integer. Returns `(id, non_resonant)` in hyperplane order.
pub fn non_resonance(c: &StandardConnection) -> Result<Vec<(String, bool)>, ConnectionError> {
    let residues = c.exact_residues()?;
    Ok(c.arrangement()
        .ids()
        .into_iter()
        .zip(residues.iter().map(is_non_resonant))
        .collect())
}
