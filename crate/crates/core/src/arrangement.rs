//! Central hyperplane arrangements over `ℚ(i)`.
//!
//! An [`Arrangement`] is an ordered list of hyperplanes `H = {h = 0}` in `ℂⁿ`,
//! each given by a nonzero linear form with Gaussian-rational coefficients.
//! Its intersection lattice consists of [`Flat`]s, identified by the full set
//! of hyperplanes containing them (their closure), so two different generating
//! subsets of the same subspace give the same flat.
//!
//! Irreducibility is linear-matroid connectivity of the forms: the blocks of
//! [`irreducible_decomposition`] are the connected components of the
//! fundamental-circuit hypergraph of a greedy basis, and the result is
//! certified afterwards by exact rank additivity.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::numkernel::{dot, greedy_independent, ExactMatrix, ExactVector, GaussianRational};

/// Default upper bound on the number of hyperplanes accepted by lattice construction.
pub const DEFAULT_LATTICE_CAP: usize = 20;

/// Environment variable overriding [`DEFAULT_LATTICE_CAP`].
pub const LATTICE_CAP_ENV: &str = "ARRCONN_CAP";

/// The lattice cap in effect: `ARRCONN_CAP` if set to a valid integer,
/// otherwise [`DEFAULT_LATTICE_CAP`].
pub fn default_cap() -> usize {
    std::env::var(LATTICE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_LATTICE_CAP)
}

/// Errors from arrangement construction and queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    /// A form has the wrong length.
    #[error("hyperplane `{id}` has a form of length {found}, expected {expected}")]
    DimensionMismatch {
        /// Hyperplane id.
        id: String,
        /// Ambient dimension.
        expected: usize,
        /// Form length.
        found: usize,
    },
    /// A form is identically zero.
    #[error("hyperplane `{id}` has a zero form")]
    ZeroForm {
        /// Hyperplane id.
        id: String,
    },
    /// Two forms define the same hyperplane.
    #[error("hyperplanes `{first}` and `{second}` have proportional forms")]
    ProportionalForms {
        /// First id.
        first: String,
        /// Second id.
        second: String,
    },
    /// Two hyperplanes share an id.
    #[error("duplicate hyperplane id `{0}`")]
    DuplicateId(String),
    /// Too many hyperplanes for lattice construction.
    #[error("{hyperplanes} hyperplanes exceed the lattice cap {cap} (lattice may have up to {estimate} flats)")]
    CapExceeded {
        /// Number of hyperplanes.
        hyperplanes: usize,
        /// Cap in effect.
        cap: usize,
        /// Upper bound `Σ_{k ≤ n} C(m, k)` on the number of flats.
        estimate: u128,
    },
    /// The given flat is not an element of this arrangement's lattice.
    #[error("not a flat of this arrangement: {0}")]
    NotAFlat(String),
    /// Restriction to a zero-dimensional flat.
    #[error("restriction to a point undefined")]
    RestrictionToPoint,
    /// A hyperplane index is out of range.
    #[error("hyperplane index {0} out of range")]
    IndexOutOfRange(usize),
}

/// A linear hyperplane `{h = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    /// Identifier, unique within its arrangement.
    pub id: String,
    /// Coefficients of the defining form `h`.
    pub form: ExactVector,
}

impl Hyperplane {
    /// Builds a hyperplane.
    pub fn new(id: impl Into<String>, form: ExactVector) -> Self {
        Self {
            id: id.into(),
            form,
        }
    }

    /// Builds a hyperplane from integer coefficients.
    pub fn from_integers(id: impl Into<String>, coeffs: &[i64]) -> Self {
        Self::new(
            id,
            coeffs
                .iter()
                .map(|&c| GaussianRational::from_integer(c))
                .collect(),
        )
    }

    /// Evaluates the form on a vector.
    pub fn eval(&self, v: &[GaussianRational]) -> GaussianRational {
        dot(&self.form, v)
    }
}

/// A finite ordered set of linear hyperplanes in `ℂⁿ` with a lazily built,
/// cached intersection lattice.
#[derive(Clone, Debug)]
pub struct Arrangement {
    dimension: usize,
    hyperplanes: Vec<Hyperplane>,
    // Shared between clones: the hyperplanes never change after construction.
    lattice: Arc<OnceLock<Lattice>>,
    irreducible: Arc<OnceLock<Vec<bool>>>,
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.hyperplanes == other.hyperplanes
    }
}

impl Eq for Arrangement {}

fn proportional(a: &[GaussianRational], b: &[GaussianRational]) -> bool {
    ExactMatrix::from_rows(vec![a.to_vec(), b.to_vec()]).rank() < 2
}

impl Arrangement {
    /// Validates and builds an arrangement: forms of length `dimension`,
    /// nonzero, pairwise non-proportional, with unique ids.
    pub fn new(dimension: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, ArrangementError> {
        let mut seen = HashMap::new();
        for (k, h) in hyperplanes.iter().enumerate() {
            if h.form.len() != dimension {
                return Err(ArrangementError::DimensionMismatch {
                    id: h.id.clone(),
                    expected: dimension,
                    found: h.form.len(),
                });
            }
            if h.form.iter().all(GaussianRational::is_zero) {
                return Err(ArrangementError::ZeroForm { id: h.id.clone() });
            }
            if seen.insert(h.id.clone(), k).is_some() {
                return Err(ArrangementError::DuplicateId(h.id.clone()));
            }
            for other in &hyperplanes[..k] {
                if proportional(&other.form, &h.form) {
                    return Err(ArrangementError::ProportionalForms {
                        first: other.id.clone(),
                        second: h.id.clone(),
                    });
                }
            }
        }
        Ok(Self {
            dimension,
            hyperplanes,
            lattice: Arc::default(),
            irreducible: Arc::default(),
        })
    }

    /// The empty arrangement in `ℂⁿ`.
    pub fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            hyperplanes: Vec::new(),
            lattice: Arc::default(),
            irreducible: Arc::default(),
        }
    }

    /// Ambient dimension `n`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The hyperplanes in order.
    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    /// Hyperplane by index.
    pub fn hyperplane(&self, index: usize) -> &Hyperplane {
        &self.hyperplanes[index]
    }

    /// Number of hyperplanes.
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    /// Whether there are no hyperplanes.
    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    /// Index of the hyperplane with the given id.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.hyperplanes.iter().position(|h| h.id == id)
    }

    /// Hyperplane ids in order.
    pub fn ids(&self) -> Vec<String> {
        self.hyperplanes.iter().map(|h| h.id.clone()).collect()
    }

    /// The sub-arrangement formed by the given indices, in the given order.
    pub fn sub_arrangement(&self, indices: &[usize]) -> Arrangement {
        Arrangement {
            dimension: self.dimension,
            hyperplanes: indices
                .iter()
                .map(|&i| self.hyperplanes[i].clone())
                .collect(),
            lattice: Arc::default(),
            irreducible: Arc::default(),
        }
    }

    /// Matrix whose rows are the forms of the given hyperplanes.
    pub fn form_matrix(&self, indices: &[usize]) -> ExactMatrix {
        if indices.is_empty() {
            return ExactMatrix::zeros(0, self.dimension);
        }
        ExactMatrix::from_rows(
            indices
                .iter()
                .map(|&i| self.hyperplanes[i].form.clone())
                .collect(),
        )
    }

    /// Indices of all hyperplanes containing the span of `basis`.
    pub fn closure_of(&self, basis: &[ExactVector]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| basis.iter().all(|v| self.hyperplanes[i].eval(v).is_zero()))
            .collect()
    }

    /// The flat `⋂_{i ∈ indices} Hᵢ` (the ambient space for no indices).
    pub fn flat_of(&self, indices: &[usize]) -> Flat {
        let basis = if indices.is_empty() {
            ExactMatrix::identity(self.dimension).columns()
        } else {
            self.form_matrix(indices).rank_kernel().kernel_basis
        };
        self.flat_with_basis(basis)
    }

    fn flat_with_basis(&self, kernel_basis: Vec<ExactVector>) -> Flat {
        let containing_set = self.closure_of(&kernel_basis);
        let kernel_basis = if containing_set.is_empty() {
            ExactMatrix::identity(self.dimension).columns()
        } else {
            self.form_matrix(&containing_set).rank_kernel().kernel_basis
        };
        Flat {
            codim: self.dimension - kernel_basis.len(),
            containing_set,
            kernel_basis,
        }
    }

    /// The ambient space `ℂⁿ` as a flat.
    pub fn ambient_flat(&self) -> Flat {
        self.flat_of(&[])
    }

    /// The flat `{h = 0}` of hyperplane `index`.
    pub fn hyperplane_flat(&self, index: usize) -> Flat {
        self.flat_of(&[index])
    }

    /// Checks that `flat` is an element of this arrangement's lattice.
    pub fn validate_flat(&self, flat: &Flat) -> Result<(), ArrangementError> {
        let bad = |why: &str| Err(ArrangementError::NotAFlat(why.to_string()));
        if flat.containing_set.iter().any(|&i| i >= self.len()) {
            return bad("hyperplane index out of range");
        }
        if flat.kernel_basis.iter().any(|v| v.len() != self.dimension) {
            return bad("basis vector of wrong length");
        }
        if self.closure_of(&flat.kernel_basis) != flat.containing_set {
            return bad("containing set is not the closure of the subspace");
        }
        let expected = self.flat_of(&flat.containing_set);
        if expected.kernel_basis.len() != flat.kernel_basis.len()
            || crate::numkernel::span_dimension(&flat.kernel_basis) != flat.kernel_basis.len()
        {
            return bad("subspace is not the intersection of its containing hyperplanes");
        }
        Ok(())
    }

    /// The cached intersection lattice, built on first use with [`default_cap`].
    pub fn lattice(&self) -> Result<&Lattice, ArrangementError> {
        if let Some(l) = self.lattice.get() {
            return Ok(l);
        }
        let built = build_lattice(self)?;
        Ok(self.lattice.get_or_init(|| built))
    }

    /// For each flat of [`Arrangement::lattice`], in the same order, whether
    /// it is irreducible.
    pub fn irreducible_mask(&self) -> Result<&[bool], ArrangementError> {
        if let Some(m) = self.irreducible.get() {
            return Ok(m);
        }
        let mask = self
            .lattice()?
            .flats()
            .iter()
            .map(|f| is_irreducible_flat(self, f))
            .collect();
        Ok(self.irreducible.get_or_init(|| mask))
    }
}

/// An element of the intersection lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flat {
    containing_set: Vec<usize>,
    kernel_basis: Vec<ExactVector>,
    codim: usize,
}

impl Flat {
    /// Sorted indices of all hyperplanes containing the flat.
    pub fn containing_set(&self) -> &[usize] {
        &self.containing_set
    }

    /// A basis of the subspace (canonical: the kernel basis of the stacked
    /// forms of the containing set).
    pub fn kernel_basis(&self) -> &[ExactVector] {
        &self.kernel_basis
    }

    /// Codimension in `ℂⁿ`.
    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// Whether this is the whole space.
    pub fn is_ambient(&self) -> bool {
        self.containing_set.is_empty()
    }

    /// Whether the hyperplane with the given index contains this flat.
    pub fn lies_in(&self, hyperplane: usize) -> bool {
        self.containing_set.binary_search(&hyperplane).is_ok()
    }

    /// The `n × dim` matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self, n: usize) -> ExactMatrix {
        ExactMatrix::from_columns(n, &self.kernel_basis)
    }

    /// Whether this flat contains `other` as a subspace.
    pub fn contains(&self, other: &Flat) -> bool {
        self.containing_set
            .iter()
            .all(|i| other.containing_set.binary_search(i).is_ok())
    }
}

/// The intersection lattice: all flats, ordered by codimension and then by
/// containing set, with the ambient space first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    flats: Vec<Flat>,
    index: HashMap<Vec<usize>, usize>,
}

impl Lattice {
    /// All flats.
    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    /// Number of flats.
    pub fn len(&self) -> usize {
        self.flats.len()
    }

    /// Always false: the ambient space is a flat.
    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Flat by position.
    pub fn flat(&self, i: usize) -> &Flat {
        &self.flats[i]
    }

    /// Position of the flat with the given containing set.
    pub fn position(&self, containing_set: &[usize]) -> Option<usize> {
        self.index.get(containing_set).copied()
    }

    /// Flats of the given codimension.
    pub fn of_codim(&self, codim: usize) -> impl Iterator<Item = &Flat> {
        self.flats.iter().filter(move |f| f.codim == codim)
    }

    /// Order relation as subspaces: whether flat `i` contains flat `j`
    /// (equivalently `i ≤ j` in reverse inclusion).
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.flats[i].contains(&self.flats[j])
    }
}

fn binomial(m: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i as u128 + 1))
}

/// Builds the intersection lattice with the [`default_cap`].
pub fn build_lattice(arrangement: &Arrangement) -> Result<Lattice, ArrangementError> {
    build_lattice_with_cap(arrangement, default_cap())
}

/// Builds the intersection lattice by breadth-first intersection of known
/// flats with hyperplanes, deduplicating by containing set.
pub fn build_lattice_with_cap(
    arrangement: &Arrangement,
    cap: usize,
) -> Result<Lattice, ArrangementError> {
    let m = arrangement.len();
    if m > cap {
        let n = arrangement.dimension();
        let estimate = (0..=n.min(m)).map(|k| binomial(m, k)).sum();
        return Err(ArrangementError::CapExceeded {
            hyperplanes: m,
            cap,
            estimate,
        });
    }
    let n = arrangement.dimension();
    let ambient = arrangement.ambient_flat();
    let mut found: BTreeMap<Vec<usize>, Flat> = BTreeMap::new();
    let mut queue = VecDeque::new();
    found.insert(ambient.containing_set.clone(), ambient.clone());
    queue.push_back(ambient);
    while let Some(flat) = queue.pop_front() {
        let basis = flat.basis_matrix(n);
        for (k, h) in arrangement.hyperplanes().iter().enumerate() {
            if flat.lies_in(k) {
                continue;
            }
            let trace = ExactMatrix::from_rows(vec![h.form.clone()]);
            let local = (&trace * &basis).rank_kernel().kernel_basis;
            let vectors: Vec<ExactVector> = local.iter().map(|w| basis.mul_vec(w)).collect();
            let closure = arrangement.closure_of(&vectors);
            if !found.contains_key(&closure) {
                let new_flat = arrangement.flat_of(&closure);
                debug_assert_eq!(new_flat.containing_set, closure);
                found.insert(closure, new_flat.clone());
                queue.push_back(new_flat);
            }
        }
    }
    let mut flats: Vec<Flat> = found.into_values().collect();
    flats.sort_by(|a, b| (a.codim, &a.containing_set).cmp(&(b.codim, &b.containing_set)));
    let index = flats
        .iter()
        .enumerate()
        .map(|(i, f)| (f.containing_set.clone(), i))
        .collect();
    Ok(Lattice { flats, index })
}

/// The localization `𝓗_L`: hyperplanes containing `L`, in ambient coordinates.
pub fn localization(
    arrangement: &Arrangement,
    flat: &Flat,
) -> Result<Arrangement, ArrangementError> {
    arrangement.validate_flat(flat)?;
    Ok(arrangement.sub_arrangement(&flat.containing_set))
}

/// The restriction `𝓗^L` together with its coordinate frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    /// Arrangement on `L` in the coordinates of `basis`.
    pub arrangement: Arrangement,
    /// `n × dim L` matrix whose columns are the frame of `L`.
    pub basis: ExactMatrix,
    /// For each original hyperplane, the index of its trace in `arrangement`,
    /// or `None` if it contains `L`. Merged traces share an index (the fibers
    /// of the projection).
    pub projection: Vec<Option<usize>>,
}

impl Restriction {
    /// The original hyperplanes whose trace is the given restricted hyperplane.
    pub fn fiber(&self, trace: usize) -> Vec<usize> {
        (0..self.projection.len())
            .filter(|&k| self.projection[k] == Some(trace))
            .collect()
    }
}

/// Normalizes a nonzero vector so its first nonzero entry is one.
fn normalized(v: &[GaussianRational]) -> ExactVector {
    let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero vector");
    let inv = lead.inv().expect("nonzero lead");
    v.iter().map(|x| x * &inv).collect()
}

/// Restricts the arrangement to a flat `L` of positive dimension, in the
/// coordinates given by the flat's kernel basis. Proportional traces are
/// merged; the merged hyperplane keeps the id of its first member.
pub fn restriction(
    arrangement: &Arrangement,
    flat: &Flat,
) -> Result<Restriction, ArrangementError> {
    arrangement.validate_flat(flat)?;
    if flat.dim() == 0 {
        return Err(ArrangementError::RestrictionToPoint);
    }
    let n = arrangement.dimension();
    let basis = flat.basis_matrix(n);
    let mut keys: HashMap<ExactVector, usize> = HashMap::new();
    let mut hyperplanes = Vec::new();
    let mut projection = Vec::with_capacity(arrangement.len());
    for (k, h) in arrangement.hyperplanes().iter().enumerate() {
        if flat.lies_in(k) {
            projection.push(None);
            continue;
        }
        let trace = (&ExactMatrix::from_rows(vec![h.form.clone()]) * &basis).row(0);
        let key = normalized(&trace);
        let idx = *keys.entry(key).or_insert_with(|| {
            hyperplanes.push(Hyperplane::new(h.id.clone(), trace.clone()));
            hyperplanes.len() - 1
        });
        projection.push(Some(idx));
    }
    let restricted = Arrangement::new(flat.dim(), hyperplanes).expect("merged traces are valid");
    Ok(Restriction {
        arrangement: restricted,
        basis,
        projection,
    })
}

/// Center, rank and essentiality of an arrangement.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterRank {
    /// Intersection of all hyperplanes.
    pub center: Flat,
    /// Codimension of the center.
    pub rank: usize,
    /// Whether the center is the origin.
    pub essential: bool,
}

/// Center `T(𝓗)`, rank and essentiality.
pub fn center_rank_essential(arrangement: &Arrangement) -> CenterRank {
    let all: Vec<usize> = (0..arrangement.len()).collect();
    let center = arrangement.flat_of(&all);
    let rank = center.codim;
    CenterRank {
        essential: rank == arrangement.dimension(),
        center,
        rank,
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Connected components of the linear matroid of `forms`, via fundamental
/// circuits of a greedy basis.
fn matroid_components(forms: &[ExactVector]) -> Vec<Vec<usize>> {
    let m = forms.len();
    if m == 0 {
        return Vec::new();
    }
    let basis = greedy_independent(forms);
    let n = forms[0].len();
    let basis_cols = ExactMatrix::from_columns(
        n,
        &basis.iter().map(|&b| forms[b].clone()).collect::<Vec<_>>(),
    );
    let mut parent: Vec<usize> = (0..m).collect();
    for e in (0..m).filter(|e| !basis.contains(e)) {
        let rhs = ExactMatrix::from_columns(n, &[forms[e].clone()]);
        let coeffs = basis_cols
            .solve(&rhs)
            .expect("non-basis form lies in the span of the basis");
        for (pos, &b) in basis.iter().enumerate() {
            if !coeffs[(pos, 0)].is_zero() {
                let (ra, rb) = (find(&mut parent, e), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..m {
        let r = find(&mut parent, e);
        blocks.entry(r).or_default().push(e);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort_by_key(|b| b[0]);
    out
}

/// The finest decomposition `𝓗 = 𝓗₁ ⊎ … ⊎ 𝓗ₖ` with `W(𝓗) = ⊕ W(𝓗ᵢ)`, as
/// blocks of hyperplane indices ordered by their smallest index.
///
/// The result is certified: ranks add up exactly and every block is
/// re-tested to be connected. A failed certification is an internal error
/// and panics. The empty arrangement has no blocks.
pub fn irreducible_decomposition(arrangement: &Arrangement) -> Vec<Vec<usize>> {
    let forms: Vec<ExactVector> = arrangement
        .hyperplanes()
        .iter()
        .map(|h| h.form.clone())
        .collect();
    let blocks = matroid_components(&forms);
    let total = if forms.is_empty() {
        0
    } else {
        arrangement
            .form_matrix(&(0..forms.len()).collect::<Vec<_>>())
            .rank()
    };
    let sum: usize = blocks
        .iter()
        .map(|b| arrangement.form_matrix(b).rank())
        .sum();
    assert_eq!(
        total, sum,
        "internal error: irreducible blocks violate rank additivity"
    );
    for b in &blocks {
        let sub: Vec<ExactVector> = b.iter().map(|&i| forms[i].clone()).collect();
        assert_eq!(
            matroid_components(&sub).len(),
            1,
            "internal error: decomposition block is reducible"
        );
    }
    blocks
}

/// Whether the arrangement is non-empty and irreducible.
pub fn is_irreducible(arrangement: &Arrangement) -> bool {
    irreducible_decomposition(arrangement).len() == 1
}

/// Whether `flat` is an irreducible flat (non-ambient with irreducible localization).
pub fn is_irreducible_flat(arrangement: &Arrangement, flat: &Flat) -> bool {
    !flat.is_ambient() && is_irreducible(&arrangement.sub_arrangement(&flat.containing_set))
}

/// Irreducible components of a flat: the centers of the blocks of the
/// localization's irreducible decomposition, as flats of the arrangement,
/// ordered by smallest hyperplane index. The ambient space has none.
pub fn irreducible_components(
    arrangement: &Arrangement,
    flat: &Flat,
) -> Result<Vec<Flat>, ArrangementError> {
    let local = localization(arrangement, flat)?;
    Ok(irreducible_decomposition(&local)
        .into_iter()
        .map(|block| {
            let global: Vec<usize> = block.iter().map(|&i| flat.containing_set[i]).collect();
            arrangement.flat_of(&global)
        })
        .collect())
}

/// The deletion–restriction triple with respect to a hyperplane `H₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeletionRestriction {
    /// Index of `H₀`.
    pub h0: usize,
    /// `𝓗′ = 𝓗 ∖ {H₀}`.
    pub deleted: Arrangement,
    /// `𝓗″`: traces on `H₀`, with the projection `π` from `𝓗`.
    pub restricted: Restriction,
    /// Whether `H₀` is a separator, i.e. the center of `𝓗′` is not contained in `H₀`.
    pub separator: bool,
}

/// Deletion–restriction at hyperplane index `h0`.
pub fn deletion_restriction(
    arrangement: &Arrangement,
    h0: usize,
) -> Result<DeletionRestriction, ArrangementError> {
    if h0 >= arrangement.len() {
        return Err(ArrangementError::IndexOutOfRange(h0));
    }
    let rest: Vec<usize> = (0..arrangement.len()).filter(|&k| k != h0).collect();
    let deleted = arrangement.sub_arrangement(&rest);
    let restricted = restriction(arrangement, &arrangement.hyperplane_flat(h0))?;
    let center = center_rank_essential(&deleted).center;
    let form = &arrangement.hyperplane(h0).form;
    let separator = center.kernel_basis.iter().any(|v| !dot(form, v).is_zero());
    Ok(DeletionRestriction {
        h0,
        deleted,
        restricted,
        separator,
    })
}
