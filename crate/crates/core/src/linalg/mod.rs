//! Exact linear algebra over a [`Field`]: rank, left kernels and quotient
//! representatives, all by sparse Gaussian elimination with lowest-index
//! pivots.

mod field;
mod sparse;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

pub use field::{Field, FieldChoice, PrimeField, Rationals};
pub use sparse::{SparseMatrix, SparseVec};

use sparse::{axpy, scale};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u32),
    #[error("unknown field `{0}` (expected q, gf2 or gfp:<p>)")]
    UnknownField(String),
    #[error("image vector {0} does not lie in the span of the kernel")]
    ImageNotInKernel(usize),
}

/// Row echelon basis with normalized (leading coefficient one) rows.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    pivots: HashMap<usize, usize>,
    rows: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Echelon { field, pivots: HashMap::new(), rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<F::Elem>] {
        &self.rows
    }

    /// Cancels leading terms until the leading index has no pivot.
    pub fn reduce_leading(&self, mut v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        while let Some((lead, val)) = v.first() {
            let Some(&r) = self.pivots.get(lead) else { break };
            let coef = self.field.neg(val);
            v = axpy(&self.field, &v, &coef, &self.rows[r]);
        }
        v
    }

    /// Cancels every entry sitting on a pivot column.
    pub fn reduce_full(&self, mut v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let mut pos = 0;
        while pos < v.len() {
            let (col, val) = &v[pos];
            match self.pivots.get(col) {
                Some(&r) => {
                    let coef = self.field.neg(val);
                    v = axpy(&self.field, &v, &coef, &self.rows[r]);
                    // entries before `pos` are untouched: pivot rows start at their pivot
                }
                None => pos += 1,
            }
        }
        v
    }

    /// Adds `v` to the span; returns false when it was already there.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> bool {
        let v = self.reduce_leading(v);
        self.push_reduced(v)
    }

    fn push_reduced(&mut self, v: SparseVec<F::Elem>) -> bool {
        let Some((lead, val)) = v.first() else { return false };
        let lead = *lead;
        let inv = self.field.inv(val);
        let v = scale(&self.field, &v, &inv);
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(v);
        true
    }

    /// Back-substitutes so every pivot column is zero outside its own row.
    fn into_reduced(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.rows[r][0].0));
        for &r in &order {
            let row = std::mem::take(&mut self.rows[r]);
            let lead = row[0].clone();
            let tail = self.reduce_full(row[1..].to_vec());
            let mut full = Vec::with_capacity(tail.len() + 1);
            full.push(lead);
            full.extend(tail);
            self.rows[r] = full;
        }
        self
    }

    fn pivot_of_row(&self, r: usize) -> usize {
        self.rows[r][0].0
    }
}

/// Rank by sparse elimination with Markowitz-style pivoting: the pivot row
/// is the shortest live row, the pivot column its entry with the fewest
/// (possibly stale) column references. Singleton rows and columns, which
/// dominate cube differentials, then cause no fill-in at all.
pub fn rank<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    let mut rows: Vec<SparseVec<F::Elem>> = m.row_vectors().to_vec();
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); m.cols()];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            cols[*c].push(r);
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(i, r)| Reverse((r.len(), i))).collect();
    let mut rank = 0;
    while let Some(Reverse((len, r))) = heap.pop() {
        if !alive[r] || rows[r].len() != len {
            continue;
        }
        alive[r] = false;
        if len == 0 {
            continue;
        }
        rank += 1;
        let pivot_row = std::mem::take(&mut rows[r]);
        let (pc, pv) = pivot_row.iter().min_by_key(|(c, _)| cols[*c].len()).expect("nonempty row").clone();
        let inv = field.inv(&pv);
        let others = std::mem::take(&mut cols[pc]);
        for r2 in others {
            if !alive[r2] {
                continue;
            }
            let Ok(at) = rows[r2].binary_search_by_key(&pc, |e| e.0) else { continue };
            let coef = field.neg(&field.mul(&rows[r2][at].1, &inv));
            let before = std::mem::take(&mut rows[r2]);
            let after = axpy(field, &before, &coef, &pivot_row);
            // register r2 in the columns it newly touches
            let mut i = 0;
            for (c, _) in &after {
                while i < before.len() && before[i].0 < *c {
                    i += 1;
                }
                if i == before.len() || before[i].0 != *c {
                    cols[*c].push(r2);
                }
            }
            heap.push(Reverse((after.len(), r2)));
            rows[r2] = after;
        }
    }
    rank
}

/// Basis of the left kernel `{x : x M = 0}`, one vector per non-pivot row
/// index, in increasing order of that index. Each vector has coefficient one
/// at its own free index and zero at all other free indices.
pub fn kernel_basis<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    let t = m.transpose();
    let mut ech = Echelon::new(field.clone());
    for r in 0..t.rows() {
        ech.insert(t.row(r).to_vec());
    }
    let ech = ech.into_reduced();
    let mut is_pivot = vec![false; m.rows()];
    for r in 0..ech.rank() {
        is_pivot[ech.pivot_of_row(r)] = true;
    }
    let mut kernel: Vec<SparseVec<F::Elem>> = vec![Vec::new(); m.rows()];
    for r in 0..ech.rank() {
        let pivot = ech.pivot_of_row(r);
        for (c, v) in &ech.rows()[r][1..] {
            if !is_pivot[*c] {
                kernel[*c].push((pivot, field.neg(v)));
            }
        }
    }
    (0..m.rows())
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = std::mem::take(&mut kernel[f]);
            v.push((f, field.one()));
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}

/// Representatives of `span(kernel) / span(image)`: kernel vectors that are
/// independent modulo the image, each fully reduced against the image
/// echelon basis (and the representatives chosen before it).
pub fn quotient_representatives<F: Field>(
    field: &F,
    kernel: &[SparseVec<F::Elem>],
    image: &[SparseVec<F::Elem>],
) -> Result<Vec<SparseVec<F::Elem>>, LinalgError> {
    let mut ker = Echelon::new(field.clone());
    for v in kernel {
        ker.insert(v.clone());
    }
    let mut ech = Echelon::new(field.clone());
    for (i, v) in image.iter().enumerate() {
        if !ker.reduce_leading(v.clone()).is_empty() {
            return Err(LinalgError::ImageNotInKernel(i));
        }
        ech.insert(v.clone());
    }
    let mut reps = Vec::new();
    for v in kernel {
        let reduced = ech.reduce_full(v.clone());
        if let Some((_, lead)) = reduced.first() {
            let inv = field.inv(lead);
            let normalized = scale(field, &reduced, &inv);
            ech.push_reduced(normalized.clone());
            reps.push(normalized);
        }
    }
    Ok(reps)
}

/// Densifies a sparse vector of the given length.
pub fn to_dense<F: Field>(field: &F, v: &[(usize, F::Elem)], len: usize) -> Vec<F::Elem> {
    let mut out = vec![field.zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}
