//! The braid arrangement `𝓐ₙ` and the Lauricella family of connections.
//!
//! `𝓐ₙ ⊂ ℂⁿ` consists of the hyperplanes `H_{i,j} = {z_i = z_j}` for
//! `1 ≤ i < j ≤ n` and `H_{i,n+1} = {z_i = 0}`. The reduced Jordan–Pochhammer
//! residues with parameters `a = (a₁,…,a_{n+1})` define a flat torsion-free
//! connection whose weight on the flat of a subset `I` is `Σ_{i∈I} a_i`.
//! Conversely every such connection on `𝓐ₙ` (`n ≥ 2`) comes from a unique
//! parameter vector, which [`recover_parameters`] computes from the traces.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementError, Flat, Hyperplane};
use crate::connection::{
    check_flat, check_torsion_free, weights, ConnectionError, StandardConnection,
};
use crate::numkernel::{ExactMatrix, GaussianRational};

/// Errors of the Lauricella module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LauricellaError {
    /// The dimension must be at least one.
    #[error("the braid arrangement needs n ≥ 1")]
    InvalidDimension,
    /// A parameter vector must have at least two entries.
    #[error("parameter vector has length {0}, expected at least 2")]
    InvalidParameterLength(usize),
    /// The arrangement is not `𝓐ₙ` up to scaling and order of the forms.
    #[error("arrangement is not a braid arrangement: {0}")]
    NotBraidArrangement(String),
    /// The partition is malformed.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    /// A precondition of recovery failed.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    /// The trace table violates `b_{i,j} = a_i + a_j`.
    #[error("traces not of Lauricella form: b_{{{i},{j}}} = {found}, expected {expected}")]
    TracesNotLauricella {
        /// First index (1-based).
        i: usize,
        /// Second index (1-based).
        j: usize,
        /// Trace found.
        found: GaussianRational,
        /// Value predicted by the solved parameters.
        expected: GaussianRational,
    },
    /// Traces fit, but a residue differs from the Jordan–Pochhammer matrix.
    #[error("non-Lauricella residues at `{0}`")]
    NonLauricella(String),
    /// Underlying connection error.
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    /// Underlying arrangement error.
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// Hyperplane id of `H_{i,j}` (1-based indices, `i < j ≤ n+1`).
pub fn an_id(i: usize, j: usize) -> String {
    format!("H_{i}_{j}")
}

/// All index pairs `(i, j)`, `1 ≤ i < j ≤ n+1`, in lexicographic order; this
/// is the hyperplane order of [`build_an`].
pub fn an_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n + 1)
        .flat_map(|i| (i + 1..=n + 1).map(move |j| (i, j)))
        .collect()
}

/// The braid arrangement `𝓐ₙ` with ids `H_i_j` in lexicographic order.
pub fn build_an(n: usize) -> Result<Arrangement, LauricellaError> {
    if n == 0 {
        return Err(LauricellaError::InvalidDimension);
    }
    // Memoised so that every connection on 𝓐ₙ shares one lattice computation.
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arrangement>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Mutex::default);
    if let Some(a) = cache.lock().expect("cache lock").get(&n) {
        return Ok(a.clone());
    }
    let hyperplanes = an_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut form = vec![GaussianRational::zero(); n];
            form[i - 1] = GaussianRational::one();
            if j <= n {
                form[j - 1] = GaussianRational::from_integer(-1);
            }
            Hyperplane::new(an_id(i, j), form)
        })
        .collect();
    let a = Arrangement::new(n, hyperplanes)?;
    cache.lock().expect("cache lock").insert(n, a.clone());
    Ok(a)
}

/// Parameters `a = (a₁,…,a_{n+1})` of a Lauricella connection on `𝓐ₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParameterVector {
    a: Vec<GaussianRational>,
}

impl ParameterVector {
    /// Parameters for `𝓐_{len−1}`; at least two entries.
    pub fn new(a: Vec<GaussianRational>) -> Result<Self, LauricellaError> {
        if a.len() < 2 {
            return Err(LauricellaError::InvalidParameterLength(a.len()));
        }
        Ok(Self { a })
    }

    /// Parameters from integer ratios `(p, q)`.
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self, LauricellaError> {
        Self::new(
            ratios
                .iter()
                .map(|&(p, q)| GaussianRational::from_ratio(p, q))
                .collect(),
        )
    }

    /// The entries `a₁,…,a_{n+1}`.
    pub fn values(&self) -> &[GaussianRational] {
        &self.a
    }

    /// `a_i`, 1-based.
    pub fn get(&self, i: usize) -> &GaussianRational {
        &self.a[i - 1]
    }

    /// The dimension `n` of the arrangement `𝓐ₙ` these parameters live on.
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// `a_∞ = a_{n+2} = 2 − Σ a_i`, always recomputed.
    pub fn a_infinity(&self) -> GaussianRational {
        &GaussianRational::from_integer(2) - &self.a.iter().cloned().sum::<GaussianRational>()
    }

    /// `Σ_{i∈I} a_i` for a set of 1-based indices.
    pub fn subset_sum(&self, subset: &[usize]) -> GaussianRational {
        subset.iter().map(|&i| self.a[i - 1].clone()).sum()
    }

    /// Whether every subset of size ≥ 2 (including the full set) has a nonzero sum,
    /// i.e. the Lauricella connection has nonzero weights.
    pub fn has_nonzero_subset_sums(&self) -> bool {
        let m = self.a.len();
        (1u64..1 << m)
            .filter(|mask| mask.count_ones() >= 2)
            .all(|mask| {
                let subset: Vec<usize> = (0..m)
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| k + 1)
                    .collect();
                !self.subset_sum(&subset).is_zero()
            })
    }

    /// Entries as complex doubles.
    pub fn to_complex(&self) -> Vec<num_complex::Complex64> {
        self.a.iter().map(GaussianRational::to_complex64).collect()
    }
}

impl fmt::Display for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The reduced Jordan–Pochhammer matrices, in the hyperplane order of [`build_an`].
pub fn reduced_residue_matrices(a: &ParameterVector) -> Vec<ExactMatrix> {
    let n = a.n();
    an_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut m = ExactMatrix::zeros(n, n);
            let (ai, aj) = (a.get(i).clone(), a.get(j).clone());
            if j <= n {
                let (i, j) = (i - 1, j - 1);
                m[(i, j)] = -aj.clone();
                m[(j, i)] = -ai.clone();
                m[(i, i)] = aj;
                m[(j, j)] = ai;
            } else {
                for r in 0..n {
                    m[(r, i - 1)] = ai.clone();
                }
                m[(i - 1, i - 1)] = &ai + &aj;
            }
            m
        })
        .collect()
}

/// The reduced Lauricella connection on `𝓐ₙ`.
pub fn reduced_residues(a: &ParameterVector) -> StandardConnection {
    let arrangement = build_an(a.n()).expect("n ≥ 1");
    StandardConnection::new_exact(arrangement, reduced_residue_matrices(a)).expect("shapes match")
}

/// The full Jordan–Pochhammer matrices on `ℂ^{n+1}`, one per pair `(i, j)` in
/// the order of [`an_pairs`], with entries `a_j, −a_j, −a_i, a_i` at
/// `(i,i), (i,j), (j,i), (j,j)`.
pub fn full_residues(a: &ParameterVector) -> Vec<ExactMatrix> {
    let m = a.a.len();
    an_pairs(a.n())
        .into_iter()
        .map(|(i, j)| {
            let mut r = ExactMatrix::zeros(m, m);
            let (i0, j0) = (i - 1, j - 1);
            r[(i0, i0)] = a.get(j).clone();
            r[(i0, j0)] = -a.get(j).clone();
            r[(j0, i0)] = -a.get(i).clone();
            r[(j0, j0)] = a.get(i).clone();
            r
        })
        .collect()
}

/// Identifies each hyperplane of an arrangement with a pair `(i, j)` of `𝓐ₙ`,
/// allowing rescaled forms and any order. Returns the pair per hyperplane.
pub fn braid_pairs(arrangement: &Arrangement) -> Result<Vec<(usize, usize)>, LauricellaError> {
    let n = arrangement.dimension();
    let not = |why: String| LauricellaError::NotBraidArrangement(why);
    if n == 0 {
        return Err(not("dimension 0".into()));
    }
    let mut pairs = Vec::with_capacity(arrangement.len());
    for h in arrangement.hyperplanes() {
        let support: Vec<usize> = (0..n).filter(|&k| !h.form[k].is_zero()).collect();
        let pair = match support.as_slice() {
            [i] => (i + 1, n + 1),
            [i, j] if (&h.form[*i] + &h.form[*j]).is_zero() => (i + 1, j + 1),
            _ => return Err(not(format!("form of `{}` is not z_i − z_j or z_i", h.id))),
        };
        pairs.push(pair);
    }
    let expected = n * (n + 1) / 2;
    let mut sorted = pairs.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if pairs.len() != expected || sorted.len() != expected {
        return Err(not(format!(
            "expected {expected} distinct hyperplanes, found {}",
            pairs.len()
        )));
    }
    Ok(pairs)
}

/// A set partition of `{1,…,n+1}` describing a flat of `𝓐ₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionFlat {
    blocks: Vec<Vec<usize>>,
}

impl PartitionFlat {
    /// Validates and canonicalizes (blocks sorted, ordered by smallest element).
    pub fn new(size: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, LauricellaError> {
        let mut seen = vec![false; size + 1];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(LauricellaError::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e == 0 || e > size {
                    return Err(LauricellaError::InvalidPartition(format!(
                        "element {e} outside 1..={size}"
                    )));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(LauricellaError::InvalidPartition(format!(
                        "element {e} repeated"
                    )));
                }
            }
        }
        if let Some(missing) = (1..=size).find(|&e| !seen[e]) {
            return Err(LauricellaError::InvalidPartition(format!(
                "element {missing} not covered"
            )));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { blocks })
    }

    /// The blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Size of the underlying set (`n + 1`).
    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Blocks with at least two elements.
    pub fn nontrivial_blocks(&self) -> Vec<&Vec<usize>> {
        self.blocks.iter().filter(|b| b.len() >= 2).collect()
    }

    /// Whether the flat is irreducible: exactly one block has size ≥ 2.
    pub fn is_irreducible(&self) -> bool {
        self.nontrivial_blocks().len() == 1
    }

    /// Codimension of the flat: `n + 1 − #blocks`.
    pub fn codim(&self) -> usize {
        self.size() - self.blocks.len()
    }
}

impl fmt::Display for PartitionFlat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let parts: Vec<String> = b.iter().map(ToString::to_string).collect();
            write!(f, "{{{}}}", parts.join(","))?;
        }
        Ok(())
    }
}

/// The partition generated by `i ∼ j` whenever `L ⊂ H_{i,j}`.
pub fn flat_to_partition(
    arrangement: &Arrangement,
    flat: &Flat,
) -> Result<PartitionFlat, LauricellaError> {
    let pairs = braid_pairs(arrangement)?;
    arrangement.validate_flat(flat)?;
    let size = arrangement.dimension() + 1;
    let mut parent: Vec<usize> = (0..=size).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &k in flat.containing_set() {
        let (i, j) = pairs[k];
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri.max(rj)] = ri.min(rj);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 1..=size {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().push(e);
    }
    PartitionFlat::new(size, groups.into_values().collect())
}

/// The flat `{z : z_i = z_j for i ∼ j}` (with `z_{n+1} = 0`) of a partition.
pub fn partition_to_flat(
    arrangement: &Arrangement,
    partition: &PartitionFlat,
) -> Result<Flat, LauricellaError> {
    let pairs = braid_pairs(arrangement)?;
    if partition.size() != arrangement.dimension() + 1 {
        return Err(LauricellaError::InvalidPartition(format!(
            "partition of {} elements for 𝓐_{}",
            partition.size(),
            arrangement.dimension()
        )));
    }
    let mut block_of = vec![0usize; partition.size() + 1];
    for (b, block) in partition.blocks().iter().enumerate() {
        for &e in block {
            block_of[e] = b;
        }
    }
    let members: Vec<usize> = (0..pairs.len())
        .filter(|&k| block_of[pairs[k].0] == block_of[pairs[k].1])
        .collect();
    Ok(arrangement.flat_of(&members))
}

/// The flat of the subset `I` (the partition with the single nontrivial block `I`).
pub fn subset_flat(arrangement: &Arrangement, subset: &[usize]) -> Result<Flat, LauricellaError> {
    let size = arrangement.dimension() + 1;
    let mut blocks = vec![subset.to_vec()];
    blocks.extend((1..=size).filter(|e| !subset.contains(e)).map(|e| vec![e]));
    partition_to_flat(arrangement, &PartitionFlat::new(size, blocks)?)
}

/// Outcome of parameter recovery.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    /// The recovered parameters. For `n = 1` only `a₁ + a₂` is determined; it
    /// is reported as `(a₁ + a₂, 0)`.
    pub parameters: ParameterVector,
    /// Set when the split is not determined (`n = 1`).
    pub ambiguous: bool,
}

/// Solves `b_{i,j} = a_i + a_j` for a trace table indexed by 1-based pairs.
///
/// Each `a_i` is `½(b_{i,j} + b_{i,k} − b_{j,k})` with `j < k` the two smallest
/// indices other than `i`; every remaining equation is then verified exactly,
/// which is equivalent to the compatibility relations
/// `b_{i,j} + b_{k,l} = b_{i,k} + b_{j,l}`.
pub fn solve_traces(
    n: usize,
    traces: &BTreeMap<(usize, usize), GaussianRational>,
) -> Result<ParameterVector, LauricellaError> {
    if n < 2 {
        return Err(LauricellaError::PreconditionFailed(
            "trace solving needs n ≥ 2".into(),
        ));
    }
    let b = |i: usize, j: usize| -> Result<&GaussianRational, LauricellaError> {
        traces.get(&(i.min(j), i.max(j))).ok_or_else(|| {
            LauricellaError::PreconditionFailed(format!("missing trace for pair ({i},{j})"))
        })
    };
    let half = GaussianRational::from_ratio(1, 2);
    let mut a = Vec::with_capacity(n + 1);
    for i in 1..=n + 1 {
        let mut others = (1..=n + 1).filter(|&x| x != i);
        let (j, k) = (others.next().expect("n ≥ 2"), others.next().expect("n ≥ 2"));
        a.push(&(&(b(i, j)? + b(i, k)?) - b(j, k)?) * &half);
    }
    for (i, j) in an_pairs(n) {
        let expected = &a[i - 1] + &a[j - 1];
        let found = b(i, j)?;
        if *found != expected {
            return Err(LauricellaError::TracesNotLauricella {
                i,
                j,
                found: found.clone(),
                expected,
            });
        }
    }
    ParameterVector::new(a)
}

/// Recovers `a` from a connection on `𝓐ₙ` after verifying torsion-freeness,
/// flatness and nonzero weights.
pub fn recover_parameters(c: &StandardConnection) -> Result<Recovery, LauricellaError> {
    braid_pairs(c.arrangement())?;
    let tf = check_torsion_free(c)?;
    if !tf.torsion_free {
        return Err(LauricellaError::PreconditionFailed(format!(
            "not torsion-free at {}",
            tf.violators.join(", ")
        )));
    }
    let flat = check_flat(c)?;
    if let Some(v) = flat.violations.first() {
        return Err(LauricellaError::PreconditionFailed(format!(
            "not flat: [A_L, A_H] ≠ 0 at L = {}, H = {}",
            v.flat_label, v.hyperplane
        )));
    }
    let w = weights(c)?;
    if !w.nonzero_weights {
        return Err(LauricellaError::PreconditionFailed(format!(
            "zero weight at {}",
            w.zero_weight.join(", ")
        )));
    }
    recover_parameters_unverified(c)
}

/// Recovery without the precondition checks: solves the trace equations, then
/// compares every residue with the reduced Jordan–Pochhammer matrix.
pub fn recover_parameters_unverified(c: &StandardConnection) -> Result<Recovery, LauricellaError> {
    let pairs = braid_pairs(c.arrangement())?;
    let residues = c.exact_residues()?;
    let n = c.dimension();
    if n == 1 {
        let trace = residues[0].trace();
        let parameters = ParameterVector::new(vec![trace, GaussianRational::zero()])?;
        return Ok(Recovery {
            parameters,
            ambiguous: true,
        });
    }
    let traces: BTreeMap<(usize, usize), GaussianRational> = pairs
        .iter()
        .zip(residues)
        .map(|(&p, r)| (p, r.trace()))
        .collect();
    let parameters = solve_traces(n, &traces)?;
    let reference = reduced_residue_matrices(&parameters);
    let order = an_pairs(n);
    for (k, pair) in pairs.iter().enumerate() {
        let pos = order.iter().position(|p| p == pair).expect("pair of 𝓐ₙ");
        if residues[k] != reference[pos] {
            return Err(LauricellaError::NonLauricella(
                c.arrangement().hyperplane(k).id.clone(),
            ));
        }
    }
    Ok(Recovery {
        parameters,
        ambiguous: false,
    })
}
