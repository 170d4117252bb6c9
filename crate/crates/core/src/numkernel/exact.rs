//! Dense matrices over the Gaussian rationals with exact elimination.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::gaussian::GaussianRational;
use super::CMatrix;

/// A column vector over `ℚ(i)`.
pub type ExactVector = Vec<GaussianRational>;

/// A dense `rows × cols` matrix over `ℚ(i)`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

/// Result of exact Gaussian elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernel {
    /// Rank of the matrix.
    pub rank: usize,
    /// A basis of the right kernel; `rank + kernel_basis.len() == cols`.
    pub kernel_basis: Vec<ExactVector>,
}

impl ExactMatrix {
    /// The zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GaussianRational::one();
        }
        m
    }

    /// `c · Id`.
    pub fn scalar(n: usize, c: &GaussianRational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    /// Builds a matrix from row vectors.
    ///
    /// # Panics
    /// Panics if rows have differing lengths.
    pub fn from_rows(rows: Vec<ExactVector>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n_rows = rows.len();
        Self {
            rows: n_rows,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a `rows × columns.len()` matrix whose columns are the given vectors.
    ///
    /// # Panics
    /// Panics if a column does not have length `rows`.
    pub fn from_columns(rows: usize, columns: &[ExactVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Builds a matrix from integer entries (test and builder convenience).
    pub fn from_integers(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| GaussianRational::from_integer(x))
                        .collect()
                })
                .collect(),
        )
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> ExactVector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> ExactVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// All columns.
    pub fn columns(&self) -> Vec<ExactVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Whether every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GaussianRational::is_zero)
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> GaussianRational {
        (0..self.rows.min(self.cols)).map(|i| &self[(i, i)]).sum()
    }

    /// Entrywise multiple `c · self`.
    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[GaussianRational]) -> ExactVector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = GaussianRational::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// The commutator `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Coerces to complex doubles.
    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex64())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank and a kernel basis by exact elimination.
    ///
    /// Kernel vectors are indexed by the free columns: the vector for free
    /// column `f` has a `1` in position `f` and zeros in the other free
    /// positions.
    pub fn rank_kernel(&self) -> RankKernel {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let kernel_basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![GaussianRational::zero(); self.cols];
                v[f] = GaussianRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(row, f)];
                }
                v
            })
            .collect();
        RankKernel {
            rank: pivots.len(),
            kernel_basis,
        }
    }

    /// Rank by exact elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solves `self · X = rhs` exactly, returning `None` when inconsistent.
    /// When the solution is not unique the free variables are set to zero.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "dimension mismatch in solve");
        let mut aug = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                aug[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() || self.rank() != self.rows {
            return None;
        }
        self.solve(&Self::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

/// Selects, in order, the vectors that are linearly independent of the ones
/// selected before them. Returns their indices.
pub fn greedy_independent(vectors: &[ExactVector]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for (k, _) in vectors.iter().enumerate() {
        let mut trial: Vec<ExactVector> = chosen.iter().map(|&c| vectors[c].clone()).collect();
        trial.push(vectors[k].clone());
        let r = ExactMatrix::from_rows(trial).rank();
        if r > rank {
            rank = r;
            chosen.push(k);
        }
    }
    chosen
}

/// Dimension of the span of the given vectors.
pub fn span_dimension(vectors: &[ExactVector]) -> usize {
    if vectors.is_empty() {
        0
    } else {
        ExactMatrix::from_rows(vectors.to_vec()).rank()
    }
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[ExactVector], v: &[GaussianRational]) -> bool {
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    span_dimension(&all) == span_dimension(basis)
}

/// Exact dot product `Σ aᵢ bᵢ` (no conjugation): a linear form applied to a vector.
pub fn dot(a: &[GaussianRational], b: &[GaussianRational]) -> GaussianRational {
    assert_eq!(a.len(), b.len(), "dimension mismatch in dot");
    let mut acc = GaussianRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussianRational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in add"
        );
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in sub"
        );
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank_and_empty_kernel() {
        let rk = ExactMatrix::identity(2).rank_kernel();
        assert_eq!(rk.rank, 2);
        assert!(rk.kernel_basis.is_empty());
    }

    #[test]
    fn difference_form_has_diagonal_kernel() {
        let rk = ExactMatrix::from_integers(&[&[1, -1]]).rank_kernel();
        assert_eq!(rk.rank, 1);
        assert_eq!(
            rk.kernel_basis,
            vec![vec![GaussianRational::one(), GaussianRational::one()]]
        );
    }

    #[test]
    fn braid_residue_with_parameters_one_two_has_diagonal_kernel() {
        // ((a2, -a2), (-a1, a1)) with a1 = 1, a2 = 2.
        let m = ExactMatrix::from_integers(&[&[2, -2], &[-1, 1]]);
        let rk = m.rank_kernel();
        assert_eq!(rk.rank, 1);
        assert_eq!(
            rk.kernel_basis,
            vec![vec![GaussianRational::one(), GaussianRational::one()]]
        );
    }

    #[test]
    fn solve_and_inverse_are_exact() {
        let m = ExactMatrix::from_integers(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, ExactMatrix::identity(2));
        let singular = ExactMatrix::from_integers(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        let rhs = ExactMatrix::from_integers(&[&[1], &[3]]);
        assert!(singular.solve(&rhs).is_none());
    }

    #[test]
    fn greedy_independent_keeps_first_occurrences() {
        let v = |a: i64, b: i64| {
            vec![
                GaussianRational::from_integer(a),
                GaussianRational::from_integer(b),
            ]
        };
        let picked = greedy_independent(&[v(1, 1), v(2, 2), v(0, 1), v(3, 4)]);
        assert_eq!(picked, vec![0, 2]);
    }
}
