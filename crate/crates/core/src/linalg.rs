//! Exact linear algebra over ℚ.
//!
//! Everything funnels through [`Echelon`], an incremental sparse row-echelon
//! builder: rows are reduced against existing pivots on insertion and the
//! full reduced form is produced once at the end. Pivot selection is fixed
//! (leftmost nonzero column), so reduced bases are reproducible bit for bit.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;
pub type SparseVec = BTreeMap<usize, Scalar>;

pub fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vector {
    let mut out = vec![Scalar::zero(); n];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

/// `row -= factor * other`
fn sub_scaled(row: &mut SparseVec, factor: &Scalar, other: &SparseVec) {
    for (j, v) in other {
        let delta = factor * v;
        match row.get_mut(j) {
            Some(c) => {
                *c -= delta;
                if c.is_zero() {
                    row.remove(j);
                }
            }
            None => {
                row.insert(*j, -delta);
            }
        }
    }
}

/// Incremental row echelon form over a fixed number of columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current pivots; the remainder has no entry
    /// in any pivot column.
    pub fn reduce(&self, mut row: SparseVec) -> SparseVec {
        let mut cursor = 0;
        loop {
            let next = row
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.pivots.contains_key(c));
            let Some(col) = next else { break };
            let factor = row[&col].clone();
            sub_scaled(&mut row, &factor, &self.rows[self.pivots[&col]]);
            cursor = col + 1;
        }
        row
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        debug_assert!(row.keys().all(|c| *c < self.cols));
        let mut row = self.reduce(row);
        let Some((&lead, lead_val)) = row.iter().next() else {
            return false;
        };
        if !lead_val.is_one() {
            let inv = lead_val.recip();
            for v in row.values_mut() {
                *v *= &inv;
            }
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(row);
        true
    }

    pub fn contains(&self, row: &SparseVec) -> bool {
        self.reduce(row.clone()).is_empty()
    }

    /// Reduced row echelon rows, ordered by pivot column, and the pivots.
    pub fn into_rref(mut self) -> (Vec<SparseVec>, Vec<usize>) {
        let order: Vec<(usize, usize)> = self.pivots.iter().map(|(c, r)| (*c, *r)).collect();
        for &(col, r) in order.iter().rev() {
            let pivot_row = std::mem::take(&mut self.rows[r]);
            for (i, other) in self.rows.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                if let Some(factor) = other.get(&col).cloned() {
                    sub_scaled(other, &factor, &pivot_row);
                }
            }
            self.rows[r] = pivot_row;
        }
        let pivots: Vec<usize> = order.iter().map(|(c, _)| *c).collect();
        let rows = order
            .iter()
            .map(|(_, r)| std::mem::take(&mut self.rows[*r]))
            .collect();
        (rows, pivots)
    }

    /// Echelonized basis of `{v : row · v = 0 for every inserted row}`.
    pub fn nullspace(self) -> Vec<SparseVec> {
        let cols = self.cols;
        let (rows, pivots) = self.into_rref();
        let mut free: BTreeMap<usize, SparseVec> = (0..cols)
            .filter(|c| pivots.binary_search(c).is_err())
            .map(|c| (c, SparseVec::from([(c, Scalar::one())])))
            .collect();
        for (row, &p) in rows.iter().zip(&pivots) {
            for (c, v) in row {
                if *c != p {
                    free.get_mut(c).expect("non-pivot column").insert(p, -v.clone());
                }
            }
        }
        echelonize_sparse(cols, free.into_values())
    }
}

/// Nullspace of the rows, eliminating columns in the order given by `rank`
/// (`rank[c]` is the elimination position of column `c`). The result is the
/// canonical echelonized basis in the original column order, whatever the
/// elimination order; a good order only keeps fill-in down.
pub fn nullspace_ordered(cols: usize, rows: impl IntoIterator<Item = SparseVec>, rank: &[usize]) -> Vec<SparseVec> {
    debug_assert_eq!(rank.len(), cols);
    let mut inverse = vec![0; cols];
    for (c, &r) in rank.iter().enumerate() {
        inverse[r] = c;
    }
    let mut ech = Echelon::new(cols);
    for row in rows {
        ech.insert(row.into_iter().map(|(c, v)| (rank[c], v)).collect());
    }
    let null = ech.nullspace();
    echelonize_sparse(
        cols,
        null.into_iter()
            .map(|v| v.into_iter().map(|(c, x)| (inverse[c], x)).collect()),
    )
}

/// Reduced echelon basis of the span of `vectors`.
pub fn echelonize_sparse(cols: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut ech = Echelon::new(cols);
    for v in vectors {
        ech.insert(v);
    }
    ech.into_rref().0
}

/// A rational matrix stored as sparse rows, with optional column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    cols: usize,
    rows: Vec<SparseVec>,
    labels: Option<Vec<String>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![SparseVec::new(); rows],
            labels: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].insert(i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(cols, bad.len()));
        }
        Ok(Self {
            cols,
            rows: rows.iter().map(|r| to_sparse(r)).collect(),
            labels: None,
        })
    }

    pub fn from_sparse(cols: usize, rows: Vec<SparseVec>) -> Result<Self> {
        for r in &rows {
            if let Some((&c, _)) = r.iter().next_back() {
                if c >= cols {
                    return Err(Error::DimensionMismatch(cols, c + 1));
                }
            }
        }
        Ok(Self {
            cols,
            rows,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if labels.len() != self.cols || sorted.len() != labels.len() {
            return Err(Error::BadLabels);
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    fn bounds(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows.len() || col >= self.cols {
            return Err(Error::OutOfBounds {
                row,
                col,
                rows: self.rows.len(),
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Result<Scalar> {
        self.bounds(row, col)?;
        Ok(self.rows[row].get(&col).cloned().unwrap_or_else(Scalar::zero))
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) -> Result<()> {
        self.bounds(row, col)?;
        if value.is_zero() {
            self.rows[row].remove(&col);
        } else {
            self.rows[row].insert(col, value);
        }
        Ok(())
    }

    pub fn push_row(&mut self, row: SparseVec) -> Result<()> {
        if let Some((&c, _)) = row.iter().next_back() {
            if c >= self.cols {
                return Err(Error::DimensionMismatch(self.cols, c + 1));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn sparse_rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vector> {
        self.rows.iter().map(|r| to_dense(r, self.cols)).collect()
    }

    /// `M · v`
    pub fn apply(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(self.cols, v.len()));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().fold(Scalar::zero(), |acc, (c, x)| acc + x * &v[*c]))
            .collect())
    }

    fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.cols);
        for r in &self.rows {
            ech.insert(r.clone());
        }
        ech
    }
}

/// Reduced row echelon form (zero rows at the bottom) and the pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let (mut rows, pivots) = m.echelon().into_rref();
    rows.resize(m.nrows(), SparseVec::new());
    (
        RatMatrix {
            cols: m.cols,
            rows,
            labels: m.labels.clone(),
        },
        pivots,
    )
}

pub fn rank(m: &RatMatrix) -> usize {
    m.echelon().rank()
}

/// Echelonized basis of `{v : M v = 0}`.
pub fn nullspace(m: &RatMatrix) -> Vec<Vector> {
    m.echelon()
        .nullspace()
        .iter()
        .map(|v| to_dense(v, m.cols))
        .collect()
}

fn ambient(vectors: &[Vector]) -> Result<Option<usize>> {
    let n = vectors.first().map(Vec::len);
    if let Some(n) = n {
        if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(n, bad.len()));
        }
    }
    Ok(n)
}

/// Reduced echelon basis of the span.
pub fn echelonize(vectors: &[Vector]) -> Result<Vec<Vector>> {
    let Some(n) = ambient(vectors)? else {
        return Ok(Vec::new());
    };
    Ok(echelonize_sparse(n, vectors.iter().map(|v| to_sparse(v)))
        .iter()
        .map(|v| to_dense(v, n))
        .collect())
}

/// Whether the two lists span the same subspace.
pub fn subspace_equal(a: &[Vector], b: &[Vector]) -> Result<bool> {
    if let (Some(n), Some(m)) = (ambient(a)?, ambient(b)?) {
        if n != m {
            return Err(Error::DimensionMismatch(n, m));
        }
    }
    Ok(echelonize(a)? == echelonize(b)?)
}

/// Whether every vector of `inner` lies in the span of `outer`.
pub fn subspace_contains(outer: &[Vector], inner: &[Vector]) -> Result<bool> {
    let n = match (ambient(outer)?, ambient(inner)?) {
        (_, None) => return Ok(true),
        (None, Some(_)) => return Ok(inner.iter().all(|v| v.iter().all(Zero::is_zero))),
        (Some(n), Some(m)) if n != m => return Err(Error::DimensionMismatch(n, m)),
        (Some(n), Some(_)) => n,
    };
    let mut ech = Echelon::new(n);
    for v in outer {
        ech.insert(to_sparse(v));
    }
    Ok(inner.iter().all(|v| ech.contains(&to_sparse(v))))
}

/// Basis of the functionals vanishing on `span(vectors)` inside ℚⁿ.
pub fn annihilating_functionals(vectors: &[Vector], n: usize) -> Result<Vec<Vector>> {
    let mut ech = Echelon::new(n);
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch(n, v.len()));
        }
        ech.insert(to_sparse(v));
    }
    Ok(ech.nullspace().iter().map(|v| to_dense(v, n)).collect())
}

/// Solutions of `M x = rhs`: a particular solution (free variables zero) and
/// the homogeneous nullspace, or `None` when inconsistent.
pub fn solve(m: &RatMatrix, rhs: &[Scalar]) -> Result<Option<(Vector, Vec<Vector>)>> {
    if rhs.len() != m.nrows() {
        return Err(Error::DimensionMismatch(m.nrows(), rhs.len()));
    }
    let n = m.cols;
    let mut ech = Echelon::new(n + 1);
    for (row, b) in m.rows.iter().zip(rhs) {
        let mut r = row.clone();
        if !b.is_zero() {
            r.insert(n, b.clone());
        }
        ech.insert(r);
    }
    let homogeneous = m.echelon().nullspace();
    let (rows, pivots) = ech.into_rref();
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut particular = vec![Scalar::zero(); n];
    for (row, p) in rows.iter().zip(pivots) {
        if let Some(v) = row.get(&n) {
            particular[p] = v.clone();
        }
    }
    Ok(Some((
        particular,
        homogeneous.iter().map(|v| to_dense(v, n)).collect(),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        let rows: Vec<Vector> = rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect();
        RatMatrix::from_rows(&rows).unwrap()
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vector> {
        rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect()
    }

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&mat(&[&[2, 4], &[1, 2]]));
        assert_eq!(r, mat(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
        let (r, p) = rref(&RatMatrix::identity(3));
        assert_eq!(r, RatMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = rref(&mat(&[&[1, 2], &[3, 4]]));
        assert_eq!(r, RatMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&RatMatrix::zeros(3, 3)).len(), 3);
        assert!(nullspace(&RatMatrix::identity(4)).is_empty());
        let ns = nullspace(&mat(&[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(ns, vecs(&[&[1, -1, 0]]));
    }

    #[test]
    fn subspace_equality_examples() {
        assert!(subspace_equal(&vecs(&[&[1, 0]]), &vecs(&[&[2, 0]])).unwrap());
        assert!(!subspace_equal(&vecs(&[&[1, 0]]), &vecs(&[&[1, 1]])).unwrap());
        assert!(subspace_equal(&vecs(&[&[1, 1], &[1, -1]]), &vecs(&[&[1, 0], &[0, 1]])).unwrap());
        assert!(matches!(
            subspace_equal(&vecs(&[&[1, 0]]), &vecs(&[&[1, 0, 0]])),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn annihilator_examples() {
        assert_eq!(annihilating_functionals(&vecs(&[&[1, 0, 0]]), 3).unwrap().len(), 2);
        assert!(annihilating_functionals(&vecs(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 3)
            .unwrap()
            .is_empty());
        let ann = annihilating_functionals(&vecs(&[&[1, 0, 3]]), 3).unwrap();
        assert!(subspace_equal(&ann, &vecs(&[&[3, 0, -1], &[0, 1, 0]])).unwrap());
        assert_eq!(ann[0], vec![int(1), int(0), frac(-1, 3)]);
    }

    #[test]
    fn out_of_bounds_and_labels() {
        let m = RatMatrix::zeros(2, 2);
        assert!(matches!(m.get(2, 0), Err(Error::OutOfBounds { .. })));
        assert!(m.clone().with_labels(vec!["a".into(), "a".into()]).is_err());
        assert!(m.with_labels(vec!["a".into(), "b".into()]).is_ok());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = mat(&[&[1, 1], &[0, 0]]);
        let (x, ns) = solve(&m, &[int(3), int(0)]).unwrap().unwrap();
        assert_eq!(m.apply(&x).unwrap(), vec![int(3), int(0)]);
        assert_eq!(ns.len(), 1);
        assert!(solve(&m, &[int(3), int(1)]).unwrap().is_none());
    }
}
