//! The q-graded cochain complex of a tangle diagram and its bigraded
//! homology.
//!
//! Height `k` collects the states of weight `ℓ = k + n₋`. A basis vector `x`
//! over a state of weight `ℓ` has quantum degree
//! `q = k + n₊ − n₋ + θ(x) = ℓ + n − 3n₋ + θ(x)`, and every differential
//! preserves it, so homology is computed one `(k, q)` block at a time.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{SignType, TangleDiagram};
use crate::cube::{classify_resolved, CubeError, Generator, Layout};
use crate::laurent::Laurent;
use crate::linalg::{self, Field, FieldChoice, LinalgError, PrimeField, Rationals, SparseMatrix, SparseVec};
use crate::resolution::{enumerate_states, resolve, ResolutionError, ResolvedDiagram, SmoothingState, DEFAULT_MAX_CROSSINGS};

/// Homology dimensions keyed by `(k, q)`; zero entries are omitted.
pub type BigradedTable = BTreeMap<(i64, i64), usize>;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("sign-type shift mismatch: expected {expected:?}, computed {got:?}")]
    ShiftMismatch { expected: BigradedTable, got: BigradedTable },
    #[error("disjoint union mismatch: expected {expected:?}, computed {got:?}")]
    ConvolutionMismatch { expected: BigradedTable, got: BigradedTable },
}

/// `q` from the height: `k + n₊ − n₋ + θ`.
pub fn quantum_degree(k: i64, n_plus: usize, n_minus: usize, theta: i64) -> i64 {
    k + n_plus as i64 - n_minus as i64 + theta
}

/// `q` from the state weight: `ℓ + n − 3n₋ + θ`.
pub fn quantum_degree_from_weight(weight: usize, n: usize, n_minus: usize, theta: i64) -> i64 {
    weight as i64 + n as i64 - 3 * n_minus as i64 + theta
}

#[derive(Clone, Debug)]
pub struct ComplexOptions {
    pub max_crossings: usize,
    /// Multiply consecutive differentials and check the products vanish.
    pub check_d_squared: bool,
}

impl Default for ComplexOptions {
    fn default() -> Self {
        ComplexOptions { max_crossings: DEFAULT_MAX_CROSSINGS, check_d_squared: true }
    }
}

#[derive(Clone, Debug)]
pub struct CochainComplex<F: Field> {
    field: F,
    n: usize,
    n_plus: usize,
    n_minus: usize,
    // everything below is indexed by state weight ℓ = k + n₋
    groups: Vec<Vec<SmoothingState>>,
    layouts: Vec<Vec<Layout>>,
    offsets: Vec<Vec<usize>>,
    dims: Vec<usize>,
    q_degrees: Vec<Vec<i64>>,
    differentials: Vec<SparseMatrix<F::Elem>>,
}

pub fn build_complex<F: Field>(
    diagram: &TangleDiagram,
    field: F,
    options: &ComplexOptions,
) -> Result<CochainComplex<F>, HomologyError> {
    let groups = enumerate_states(diagram, options.max_crossings)?;
    let n = diagram.crossing_count();
    let (n_plus, n_minus) = (diagram.n_plus(), diagram.n_minus());
    let resolved: Vec<ResolvedDiagram> = (0..1u64 << n)
        .into_par_iter()
        .map(|m| resolve(diagram, SmoothingState::new(m, n)))
        .collect::<Result<_, _>>()?;
    let free = diagram.free();

    let mut position = vec![0usize; 1 << n];
    let mut layouts = Vec::with_capacity(n + 1);
    let mut offsets = Vec::with_capacity(n + 1);
    let mut dims = Vec::with_capacity(n + 1);
    let mut q_degrees = Vec::with_capacity(n + 1);
    for (weight, group) in groups.iter().enumerate() {
        let mut lay = Vec::with_capacity(group.len());
        let mut off = Vec::with_capacity(group.len());
        let mut qs = Vec::new();
        for (i, s) in group.iter().enumerate() {
            position[s.mask() as usize] = i;
            let layout = Layout::new(&resolved[s.mask() as usize], free);
            off.push(qs.len());
            qs.extend((0..layout.dimension()).map(|x| quantum_degree_from_weight(weight, n, n_minus, layout.theta(x))));
            lay.push(layout);
        }
        dims.push(qs.len());
        layouts.push(lay);
        offsets.push(off);
        q_degrees.push(qs);
    }

    let mut differentials = Vec::with_capacity(n);
    for weight in 0..n {
        let rows: Vec<Vec<SparseVec<F::Elem>>> = groups[weight]
            .par_iter()
            .map(|s| {
                let source = &resolved[s.mask() as usize];
                let mut targets = Vec::new();
                for j in (0..n).filter(|&j| !s.bit(j)) {
                    let t = s.with_bit(j, true);
                    let edge = classify_resolved(diagram, source, &resolved[t.mask() as usize])?;
                    let coefficient = field.from_i64(edge.sign);
                    targets.push((edge, offsets[weight + 1][position[t.mask() as usize]], coefficient));
                }
                let dim = layouts[weight][position[s.mask() as usize]].dimension();
                Ok((0..dim)
                    .map(|x| {
                        let mut row: SparseVec<F::Elem> = Vec::new();
                        for (edge, offset, coefficient) in &targets {
                            row.extend(edge.apply_index(x).into_iter().map(|y| (offset + y, coefficient.clone())));
                        }
                        row.sort_by_key(|e| e.0);
                        row
                    })
                    .collect())
            })
            .collect::<Result<_, CubeError>>()?;
        differentials.push(SparseMatrix::from_rows(dims[weight + 1], rows.concat()));
    }

    let complex = CochainComplex { field, n, n_plus, n_minus, groups, layouts, offsets, dims, q_degrees, differentials };
    complex.check_homogeneous()?;
    if options.check_d_squared {
        complex.check_d_squared()?;
    }
    Ok(complex)
}

impl<F: Field> CochainComplex<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn crossing_count(&self) -> usize {
        self.n
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    /// `−n₋ ..= n₊`.
    pub fn heights(&self) -> RangeInclusive<i64> {
        -(self.n_minus as i64)..=self.n_plus as i64
    }

    fn weight(&self, k: i64) -> Option<usize> {
        let w = k + self.n_minus as i64;
        (0..=self.n as i64).contains(&w).then_some(w as usize)
    }

    /// Dimension of the chain group at height `k`.
    pub fn dim(&self, k: i64) -> usize {
        self.weight(k).map_or(0, |w| self.dims[w])
    }

    /// Differential from height `k` to `k + 1`, acting on row vectors.
    pub fn differential(&self, k: i64) -> Option<&SparseMatrix<F::Elem>> {
        self.weight(k).and_then(|w| self.differentials.get(w))
    }

    pub fn quantum_degrees(&self, k: i64) -> &[i64] {
        self.weight(k).map_or(&[], |w| &self.q_degrees[w])
    }

    /// Basis vector `index` of the chain group at height `k`.
    pub fn generator(&self, k: i64, index: usize) -> Generator {
        let w = self.weight(k).expect("height in range");
        let i = self.offsets[w].partition_point(|&o| o <= index) - 1;
        Generator {
            state: self.groups[w][i],
            labeling: self.layouts[w][i].labeling(index - self.offsets[w][i]),
        }
    }

    /// Basis indices at height `k` grouped by quantum degree.
    pub fn blocks(&self, k: i64) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, q) in self.quantum_degrees(k).iter().enumerate() {
            out.entry(*q).or_default().push(i);
        }
        out
    }

    fn check_homogeneous(&self) -> Result<(), HomologyError> {
        for (w, d) in self.differentials.iter().enumerate() {
            for (r, row) in d.row_vectors().iter().enumerate() {
                if let Some((c, _)) = row.iter().find(|(c, _)| self.q_degrees[w + 1][*c] != self.q_degrees[w][r]) {
                    return Err(HomologyError::InternalInconsistency(format!(
                        "differential at weight {w} joins q={} to q={}",
                        self.q_degrees[w][r],
                        self.q_degrees[w + 1][*c]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that every composite `d^{k+1} ∘ d^k` is zero.
    pub fn check_d_squared(&self) -> Result<(), HomologyError> {
        let bad = (1..self.differentials.len())
            .into_par_iter()
            .find_first(|&w| !self.differentials[w - 1].mul(&self.field, &self.differentials[w]).is_zero());
        match bad {
            Some(w) => Err(HomologyError::InternalInconsistency(format!(
                "d∘d is nonzero out of height {}",
                w as i64 - 1 - self.n_minus as i64
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct HomologyOptions {
    /// Also compute a representative cocycle for every class.
    pub representatives: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub n: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub field: String,
}

/// A cocycle as a formal sum; coefficients are printed field elements.
pub type Representative = Vec<(Generator, String)>;

#[derive(Clone, Debug, PartialEq)]
pub struct HomologySummary {
    pub table: BigradedTable,
    pub representatives: BTreeMap<(i64, i64), Vec<Representative>>,
    pub metadata: Metadata,
}

impl HomologySummary {
    pub fn heights(&self) -> RangeInclusive<i64> {
        -(self.metadata.n_minus as i64)..=self.metadata.n_plus as i64
    }

    /// Total dimension at every height, zeros included.
    pub fn by_height(&self) -> BTreeMap<i64, usize> {
        let mut out: BTreeMap<i64, usize> = self.heights().map(|k| (k, 0)).collect();
        for ((k, _), d) in &self.table {
            *out.entry(*k).or_default() += d;
        }
        out
    }

    /// `Σ (−1)^k dim H^{k,q} q^q`.
    pub fn euler(&self) -> Laurent {
        euler_of_table(&self.table)
    }

    /// One `(k, q)` entry per basis class, in `(k, q)` order.
    pub fn classes(&self) -> Vec<(i64, i64)> {
        self.table.iter().flat_map(|(kq, d)| std::iter::repeat(*kq).take(*d)).collect()
    }

    /// Shifts every quantum degree so the smallest one is zero.
    pub fn normalized_min_zero(&self) -> HomologySummary {
        let shift = self.table.keys().map(|(_, q)| *q).min().unwrap_or(0);
        let mut out = self.clone();
        out.table = self.table.iter().map(|((k, q), d)| ((*k, q - shift), *d)).collect();
        out.representatives = std::mem::take(&mut out.representatives)
            .into_iter()
            .map(|((k, q), r)| ((k, q - shift), r))
            .collect();
        out
    }
}

pub fn euler_of_table(table: &BigradedTable) -> Laurent {
    let mut p = Laurent::zero();
    for ((k, q), d) in table {
        p.add_term(if k % 2 == 0 { *d as i64 } else { -(*d as i64) }, *q);
    }
    p
}

pub fn compute_homology<F: Field>(
    complex: &CochainComplex<F>,
    options: &HomologyOptions,
) -> Result<HomologySummary, HomologyError> {
    let field = &complex.field;
    let blocks: BTreeMap<i64, BTreeMap<i64, Vec<usize>>> = complex.heights().map(|k| (k, complex.blocks(k))).collect();
    // position of every basis vector inside its quantum-degree block
    let local: BTreeMap<i64, Vec<usize>> = blocks
        .iter()
        .map(|(k, b)| {
            let mut pos = vec![0; complex.dim(*k)];
            for indices in b.values() {
                for (i, &g) in indices.iter().enumerate() {
                    pos[g] = i;
                }
            }
            (*k, pos)
        })
        .collect();
    // the differential is homogeneous, so a block's rows only reach the
    // block of equal q one height up
    let block_of = |k: i64, q: i64| -> Option<SparseMatrix<F::Elem>> {
        let d = complex.differential(k)?;
        let rows = blocks.get(&k)?.get(&q)?;
        let cols = blocks.get(&(k + 1)).and_then(|b| b.get(&q)).map_or(0, Vec::len);
        let pos = local.get(&(k + 1))?;
        let data = rows.iter().map(|&r| d.row(r).iter().map(|(c, v)| (pos[*c], v.clone())).collect()).collect();
        Some(SparseMatrix::from_rows(cols, data))
    };
    let tasks: Vec<(i64, i64)> = blocks.iter().flat_map(|(k, b)| b.keys().map(move |q| (*k, *q))).collect();
    let ranks: HashMap<(i64, i64), usize> = tasks
        .par_iter()
        .map(|&(k, q)| ((k, q), block_of(k, q).map_or(0, |m| linalg::rank(field, &m))))
        .collect();

    let results: Vec<((i64, i64), usize, Vec<Representative>)> = tasks
        .par_iter()
        .map(|&(k, q)| {
            let rows = &blocks[&k][&q];
            let rank_out = ranks[&(k, q)];
            let rank_in = ranks.get(&(k - 1, q)).copied().unwrap_or(0);
            let dim = rows
                .len()
                .checked_sub(rank_out + rank_in)
                .ok_or_else(|| HomologyError::InternalInconsistency(format!("negative homology at ({k},{q})")))?;
            let mut reps = Vec::new();
            if options.representatives && dim > 0 {
                let kernel = match block_of(k, q) {
                    Some(m) => linalg::kernel_basis(field, &m),
                    None => (0..rows.len()).map(|i| vec![(i, field.one())]).collect(),
                };
                let image: Vec<SparseVec<F::Elem>> =
                    block_of(k - 1, q).map_or_else(Vec::new, |m| m.row_vectors().to_vec());
                let vectors = linalg::quotient_representatives(field, &kernel, &image)?;
                if vectors.len() != dim {
                    return Err(HomologyError::InternalInconsistency(format!(
                        "({k},{q}): {} representatives for dimension {dim}",
                        vectors.len()
                    )));
                }
                reps = vectors
                    .into_iter()
                    .map(|v| v.into_iter().map(|(i, c)| (complex.generator(k, rows[i]), c.to_string())).collect())
                    .collect();
            }
            Ok(((k, q), dim, reps))
        })
        .collect::<Result<_, HomologyError>>()?;

    let mut table = BigradedTable::new();
    let mut representatives = BTreeMap::new();
    for (kq, dim, reps) in results {
        if dim > 0 {
            table.insert(kq, dim);
            if options.representatives {
                representatives.insert(kq, reps);
            }
        }
    }
    Ok(HomologySummary {
        table,
        representatives,
        metadata: Metadata {
            n: complex.n,
            n_plus: complex.n_plus,
            n_minus: complex.n_minus,
            field: field.name(),
        },
    })
}

/// Builds the complex over the chosen field and computes its homology.
pub fn homology(
    diagram: &TangleDiagram,
    field: FieldChoice,
    complex_options: &ComplexOptions,
    options: &HomologyOptions,
) -> Result<HomologySummary, HomologyError> {
    match field {
        FieldChoice::Rational => compute_homology(&build_complex(diagram, Rationals, complex_options)?, options),
        FieldChoice::Prime(p) => {
            compute_homology(&build_complex(diagram, PrimeField::new(p)?, complex_options)?, options)
        }
    }
}

/// Bigraded table with default options.
pub fn homology_table(diagram: &TangleDiagram, field: FieldChoice) -> Result<BigradedTable, HomologyError> {
    Ok(homology(diagram, field, &ComplexOptions::default(), &HomologyOptions::default())?.table)
}

/// A class found by the weighted-average grading.
#[derive(Clone, Debug, PartialEq)]
pub struct LegacyClass {
    pub k: i64,
    pub q: f64,
}

/// Homology per height with each class graded by the coefficient-weighted
/// mean of the quantum degrees in its representative. Agrees with the exact
/// grading whenever representatives are homogeneous.
pub fn legacy_grading<F: Field>(complex: &CochainComplex<F>) -> Result<Vec<LegacyClass>, HomologyError> {
    let field = &complex.field;
    let mut out = Vec::new();
    for k in complex.heights() {
        let dim = complex.dim(k);
        let kernel = match complex.differential(k) {
            Some(d) => linalg::kernel_basis(field, d),
            None => (0..dim).map(|i| vec![(i, field.one())]).collect(),
        };
        let image = complex.differential(k - 1).map_or_else(Vec::new, |d| d.row_vectors().to_vec());
        let qs = complex.quantum_degrees(k);
        for rep in linalg::quotient_representatives(field, &kernel, &image)? {
            let (num, den) = rep.iter().fold((0.0, 0.0), |(num, den), (i, c)| {
                let w = field.magnitude(c);
                (num + w * qs[*i] as f64, den + w)
            });
            out.push(LegacyClass { k, q: num / den });
        }
    }
    Ok(out)
}

pub fn legacy_homology(
    diagram: &TangleDiagram,
    field: FieldChoice,
    complex_options: &ComplexOptions,
) -> Result<Vec<LegacyClass>, HomologyError> {
    match field {
        FieldChoice::Rational => legacy_grading(&build_complex(diagram, Rationals, complex_options)?),
        FieldChoice::Prime(p) => legacy_grading(&build_complex(diagram, PrimeField::new(p)?, complex_options)?),
    }
}

/// State sum `Σ_s (−1)^{ℓ−n₋} q^{ℓ+n₊−2n₋} (q+q⁻¹)^{r(s)} q^{−t(s)}`,
/// free components included.
pub fn graded_euler_characteristic(diagram: &TangleDiagram, max_crossings: usize) -> Result<Laurent, HomologyError> {
    enumerate_states(diagram, max_crossings)?;
    let n = diagram.crossing_count();
    let free = diagram.free();
    let counts: HashMap<(usize, usize, usize), i64> = (0..1u64 << n)
        .into_par_iter()
        .map(|m| {
            let s = SmoothingState::new(m, n);
            let r = resolve(diagram, s).expect("state length matches");
            (s.weight(), r.circles + free.circles, r.arcs + free.arcs)
        })
        .fold(HashMap::new, |mut acc, key| {
            *acc.entry(key).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_insert(0) += c;
            }
            a
        });
    let (n_plus, n_minus) = (diagram.n_plus() as i64, diagram.n_minus() as i64);
    let mut total = Laurent::zero();
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    for ((weight, r, t), count) in keys {
        let w = weight as i64;
        let sign = if (w - n_minus).rem_euclid(2) == 0 { count } else { -count };
        let term = Laurent::circle().pow(r as u32).shift(w + n_plus - 2 * n_minus - t as i64);
        total = &total + &(&term * &Laurent::monomial(sign, 0));
    }
    Ok(total)
}

pub fn shift_table(table: &BigradedTable, dk: i64, dq: i64) -> BigradedTable {
    table.iter().map(|((k, q), d)| ((k + dk, q + dq), *d)).collect()
}

/// `(k, q) ↦ (k₁ + k₂, q₁ + q₂)` convolution of two tables.
pub fn convolve(a: &BigradedTable, b: &BigradedTable) -> BigradedTable {
    let mut out = BigradedTable::new();
    for ((k1, q1), d1) in a {
        for ((k2, q2), d2) in b {
            *out.entry((k1 + k2, q1 + q2)).or_insert(0) += d1 * d2;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftReport {
    pub dk: i64,
    pub dq: i64,
    pub sigma: BigradedTable,
    pub tau: BigradedTable,
}

/// Recomputes homology under `tau` and checks it against the `sigma` table
/// moved by `k ↦ k + n₋(σ) − n₋(τ)`, `q ↦ q + 3n₋(σ) − 3n₋(τ)`.
pub fn verify_sign_type_shift(
    diagram: &TangleDiagram,
    sigma: &SignType,
    tau: &SignType,
    field: FieldChoice,
) -> Result<ShiftReport, HomologyError> {
    let with_sigma = diagram.with_signs(sigma.clone()).map_err(|e| HomologyError::InternalInconsistency(e.to_string()))?;
    let with_tau = diagram.with_signs(tau.clone()).map_err(|e| HomologyError::InternalInconsistency(e.to_string()))?;
    let a = homology_table(&with_sigma, field)?;
    let b = homology_table(&with_tau, field)?;
    let dk = sigma.n_minus() as i64 - tau.n_minus() as i64;
    let dq = 3 * dk;
    let expected = shift_table(&a, dk, dq);
    if expected != b {
        return Err(HomologyError::ShiftMismatch { expected, got: b });
    }
    Ok(ShiftReport { dk, dq, sigma: a, tau: b })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionReport {
    pub left: BigradedTable,
    pub right: BigradedTable,
    pub union: BigradedTable,
}

/// Checks that the table of `left ⊔ right` is the convolution of theirs.
pub fn verify_disjoint_union(
    left: &TangleDiagram,
    right: &TangleDiagram,
    field: FieldChoice,
) -> Result<UnionReport, HomologyError> {
    let a = homology_table(left, field)?;
    let b = homology_table(right, field)?;
    let union = homology_table(&left.disjoint_union(right), field)?;
    let expected = convolve(&a, &b);
    if expected != union {
        return Err(HomologyError::ConvolutionMismatch { expected, got: union });
    }
    Ok(UnionReport { left: a, right: b, union })
}
