use std::collections::BTreeMap;

use super::field::Field;

/// Sparse vector: `(index, value)` pairs sorted by index, values nonzero.
pub type SparseVec<E> = Vec<(usize, E)>;

/// Row-major sparse matrix. Rows are generators of the source space; a vector
/// `x` maps to `x * M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec<E>>,
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are
    /// summed and zeros dropped.
    pub fn from_triplets<F, I>(field: &F, rows: usize, cols: usize, triplets: I) -> Self
    where
        F: Field<Elem = E>,
        I: IntoIterator<Item = (usize, usize, E)>,
    {
        let mut acc: Vec<BTreeMap<usize, E>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r}, {c}) out of range {rows}x{cols}");
            let slot = acc[r].entry(c).or_insert_with(|| field.zero());
            *slot = field.add(slot, &v);
        }
        let data = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| !field.is_zero(v)).collect())
            .collect();
        SparseMatrix { rows, cols, data }
    }

    /// Builds a matrix from already sorted, zero-free rows.
    pub fn from_rows(cols: usize, data: Vec<SparseVec<E>>) -> Self {
        debug_assert!(data
            .iter()
            .all(|r| r.windows(2).all(|w| w[0].0 < w[1].0) && r.last().map_or(true, |e| e.0 < cols)));
        SparseMatrix { rows: data.len(), cols, data }
    }

    pub fn from_dense<F: Field<Elem = E>>(field: &F, dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let triplets = dense.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, &v)| (r, c, field.from_i64(v)))
        });
        SparseMatrix::from_triplets(field, rows, cols, triplets.collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, E)] {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[SparseVec<E>] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&E> {
        let row = &self.data[r];
        row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut out: Vec<SparseVec<E>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[*c].push((r, v.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data: out }
    }

    /// `self * other` in the row-vector convention (apply `self`, then `other`).
    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, E> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        let slot = acc.entry(*c).or_insert_with(|| field.zero());
                        *slot = field.add(slot, &field.mul(a, b));
                    }
                }
                acc.into_iter().filter(|(_, v)| !field.is_zero(v)).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// Submatrix on the given row and column index lists (in that order).
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.cols];
        for (new, &old) in col_idx.iter().enumerate() {
            col_map[old] = new;
        }
        let data = row_idx
            .iter()
            .map(|&r| {
                let mut row: SparseVec<E> = self.data[r]
                    .iter()
                    .filter(|(c, _)| col_map[*c] != usize::MAX)
                    .map(|(c, v)| (col_map[*c], v.clone()))
                    .collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        SparseMatrix { rows: row_idx.len(), cols: col_idx.len(), data }
    }

    pub fn to_dense<F: Field<Elem = E>>(&self, field: &F) -> Vec<Vec<E>> {
        let mut out = vec![vec![field.zero(); self.cols]; self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }
}

/// `a + coef * b` for sorted sparse vectors.
pub(crate) fn axpy<F: Field>(
    field: &F,
    a: &[(usize, F::Elem)],
    coef: &F::Elem,
    b: &[(usize, F::Elem)],
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, field.mul(coef, &b[j].1)));
            j += 1;
        } else {
            let v = field.add(&a[i].1, &field.mul(coef, &b[j].1));
            if !field.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub(crate) fn scale<F: Field>(field: &F, v: &[(usize, F::Elem)], coef: &F::Elem) -> SparseVec<F::Elem> {
    v.iter().map(|(i, x)| (*i, field.mul(coef, x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, Rationals};

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let f = Rationals;
        let m = SparseMatrix::from_triplets(
            &f,
            2,
            3,
            vec![(0, 1, f.from_i64(1)), (0, 1, f.from_i64(-1)), (1, 2, f.from_i64(5))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 2), Some(&f.from_i64(5)));
        assert_eq!(m.get(0, 1), None);
    }

    #[test]
    fn product_and_transpose() {
        let f = PrimeField::new(7).unwrap();
        let a = SparseMatrix::from_dense(&f, &[vec![1, 2], vec![0, 3]]);
        let b = SparseMatrix::from_dense(&f, &[vec![4, 0, 1], vec![1, 1, 0]]);
        let ab = a.mul(&f, &b);
        assert_eq!(ab.to_dense(&f), vec![vec![6, 2, 1], vec![3, 3, 0]]);
        assert_eq!(ab.transpose().transpose(), ab);
        assert_eq!(a.transpose().to_dense(&f), vec![vec![1, 0], vec![2, 3]]);
    }

    #[test]
    fn submatrix_picks_in_order() {
        let f = Rationals;
        let m = SparseMatrix::from_dense(&f, &[vec![1, 2, 3], vec![4, 5, 6]]);
        let s = m.submatrix(&[1], &[2, 0]);
        assert_eq!(s.to_dense(&f), vec![vec![f.from_i64(6), f.from_i64(4)]]);
    }
}
