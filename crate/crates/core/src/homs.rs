//! Normal-form generators of `Hom(0, k)` and Gram-rank dimension counts.
//!
//! A generator is `(id_{x} ⊗ α ⊗ id_{y} ⊗ β ⊗ …) η^{(p)}`: the `p` strands
//! created by `η^{(p)}` are split into strictly positive gaps, and the children
//! `α, β, …` (themselves generators) are inserted after each gap from left to
//! right. Either every gap is followed by a child or the last gap is not.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagram::{catalan, STABILITY_TOLS};
use crate::error::{Error, Result};
use crate::linalg::{matmul, rank_from_singular_values, singular_values};
use crate::multimatrix::AlgebraShape;
use crate::tensor::{StructureMaps, TensorMap};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_K: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalFormArrow {
    pub p: usize,
    pub gaps: Vec<usize>,
    pub children: Vec<NormalFormArrow>,
}

impl NormalFormArrow {
    /// `η`, the only generator of `Hom(0, 1)`.
    pub fn unit() -> Self {
        Self {
            p: 1,
            gaps: vec![1],
            children: Vec::new(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.p == 1 && self.children.is_empty()
    }

    /// Number of output strands.
    pub fn size(&self) -> usize {
        self.p + self.children.iter().map(Self::size).sum::<usize>()
    }

    /// Structural validity: positive gaps summing to `p`, alternation of gaps
    /// and children, and valid children.
    pub fn is_valid(&self) -> bool {
        let r = self.gaps.len();
        let t = self.children.len();
        self.p >= 1
            && r >= 1
            && self.gaps.iter().all(|&g| g > 0)
            && self.gaps.iter().sum::<usize>() == self.p
            && (t == r || t + 1 == r)
            && self.children.iter().all(Self::is_valid)
    }
}

/// Ordered compositions of `total` into `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if total < parts {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The generator sets `X_1, …, X_k`, indexed by size (entry 0 is empty).
pub fn enumerate_xk_up_to(k: usize) -> Vec<Vec<NormalFormArrow>> {
    let mut sets: Vec<Vec<NormalFormArrow>> = vec![Vec::new()];
    for size in 1..=k {
        let mut current = Vec::new();
        for p in 1..=size {
            let rest = size - p;
            for r in 1..=p {
                for gaps in compositions(p, r) {
                    for t in [r - 1, r] {
                        for child_sizes in compositions(rest, t) {
                            let mut partial: Vec<Vec<NormalFormArrow>> = vec![Vec::new()];
                            for &cs in &child_sizes {
                                partial = partial
                                    .into_iter()
                                    .flat_map(|prefix| {
                                        sets[cs].iter().map(move |child| {
                                            let mut v = prefix.clone();
                                            v.push(child.clone());
                                            v
                                        })
                                    })
                                    .collect();
                            }
                            current.extend(partial.into_iter().map(|children| NormalFormArrow {
                                p,
                                gaps: gaps.clone(),
                                children,
                            }));
                        }
                    }
                }
            }
        }
        sets.push(current);
    }
    sets
}

/// `X_k`.
pub fn enumerate_xk(k: usize) -> Result<Vec<NormalFormArrow>> {
    if k == 0 {
        return Err(Error::InvalidArgument("X_k is defined for k >= 1".into()));
    }
    Ok(enumerate_xk_up_to(k).pop().expect("k >= 1 entries"))
}

/// Inserts `v` (with `a` legs) at leg position `pos` of `x`, which has `legs`
/// legs: `out[l, c, r] = x[l, r] v[c]`.
fn insert_vector(x: &[Complex64], n: usize, legs: usize, pos: usize, v: &[Complex64]) -> Vec<Complex64> {
    let left = n.pow(pos as u32);
    let right = n.pow((legs - pos) as u32);
    debug_assert_eq!(x.len(), left * right);
    let mut out = Vec::with_capacity(x.len() * v.len());
    for l in 0..left {
        let row = &x[l * right..(l + 1) * right];
        for c in v {
            out.extend(row.iter().map(|z| z * c));
        }
    }
    out
}

/// Evaluates normal-form arrows as vectors of `B^{⊗k}`, caching subtrees.
#[derive(Debug)]
pub struct ArrowRealizer {
    maps: StructureMaps,
    units: Vec<Vec<Complex64>>,
    cache: HashMap<NormalFormArrow, Vec<Complex64>>,
}

impl ArrowRealizer {
    pub fn new(shape: &AlgebraShape) -> Self {
        Self {
            maps: StructureMaps::canonical(shape),
            units: Vec::new(),
            cache: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.maps.dim()
    }

    fn iterated_unit(&mut self, p: usize) -> &[Complex64] {
        while self.units.len() < p {
            let next = self.units.len() + 1;
            let v = self
                .maps
                .iterated_unit(next)
                .expect("p >= 1")
                .into_matrix()
                .as_slice()
                .to_vec();
            self.units.push(v);
        }
        &self.units[p - 1]
    }

    pub fn realize(&mut self, arrow: &NormalFormArrow) -> Vec<Complex64> {
        if let Some(v) = self.cache.get(arrow) {
            return v.clone();
        }
        let n = self.dim();
        let mut acc = self.iterated_unit(arrow.p).to_vec();
        let mut legs = arrow.p;
        let mut pos = 0;
        for (i, &gap) in arrow.gaps.iter().enumerate() {
            pos += gap;
            if let Some(child) = arrow.children.get(i) {
                let cv = self.realize(child);
                acc = insert_vector(&acc, n, legs, pos, &cv);
                let size = child.size();
                legs += size;
                pos += size;
            }
        }
        self.cache.insert(arrow.clone(), acc.clone());
        acc
    }

    pub fn realize_map(&mut self, arrow: &NormalFormArrow) -> TensorMap {
        let v = self.realize(arrow);
        TensorMap::from_vector(self.dim(), arrow.size(), DVector::from_vec(v))
            .expect("realized vector has n^k entries")
    }
}

/// Vector of `B^{⊗k}` realizing a normal-form arrow.
pub fn realize_arrow(shape: &AlgebraShape, arrow: &NormalFormArrow) -> TensorMap {
    ArrowRealizer::new(shape).realize_map(arrow)
}

fn stack_columns(vectors: &[&[Complex64]]) -> DMatrix<Complex64> {
    let len = vectors.first().map_or(0, |v| v.len());
    let mut m = DMatrix::zeros(len, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.column_mut(j).copy_from_slice(v);
    }
    m
}

fn gram_of_columns(vectors: &[&[Complex64]]) -> DMatrix<Complex64> {
    let v = stack_columns(vectors);
    matmul(&v.adjoint(), &v)
}

/// `G[i][j] = <v_j, v_i>` for vectors given as maps out of the scalars.
pub fn gram_matrix(vectors: &[TensorMap]) -> Result<DMatrix<Complex64>> {
    let Some(first) = vectors.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let power = first.codomain_power();
    let cols = vectors
        .iter()
        .map(|v| {
            if v.codomain_power() != power || v.dim() != first.dim() {
                return Err(Error::PowerMismatch {
                    expected: power,
                    found: v.codomain_power(),
                });
            }
            v.as_vector()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gram_of_columns(&cols))
}

/// Rank at a relative threshold and at one hundredth of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NumericRank {
    pub rank: usize,
    pub rank_fine: usize,
    pub stable: bool,
}

/// Singular values above `tol_rel · σ_max`, cross-checked at `tol_rel / 100`.
pub fn numeric_rank(matrix: &DMatrix<Complex64>, tol_rel: f64) -> NumericRank {
    let sv = singular_values(matrix);
    let rank = rank_from_singular_values(&sv, tol_rel);
    let rank_fine = rank_from_singular_values(&sv, tol_rel / 100.0);
    NumericRank {
        rank,
        rank_fine,
        stable: rank == rank_fine,
    }
}

/// Rank computation of a Gram matrix, with the data needed to judge it.
#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub k: usize,
    pub num_vectors: usize,
    #[serde(skip)]
    pub gram: DMatrix<Complex64>,
    pub rank: usize,
    pub expected: u128,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Smallest singular value counted in the rank, relative to the largest.
    pub smallest_kept_rel: f64,
    /// Largest singular value not counted, relative to the largest (0 if none).
    pub largest_dropped_rel: f64,
    pub tolerances: Vec<f64>,
    pub ranks: Vec<usize>,
    pub rank_stable: bool,
    /// Rank of the bent `End(l)` matrices, for `End` computations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bent_rank: Option<usize>,
}

impl GramReport {
    fn from_gram(k: usize, gram: DMatrix<Complex64>, tol_rel: f64, expected: u128) -> Self {
        let sv = singular_values(&gram);
        let mut tolerances = vec![tol_rel];
        tolerances.extend(STABILITY_TOLS);
        let ranks: Vec<usize> = tolerances
            .iter()
            .map(|&t| rank_from_singular_values(&sv, t))
            .collect();
        let rank = ranks[0];
        let sigma_max = sv.first().copied().unwrap_or(0.0);
        let rel = |s: f64| if sigma_max > 0.0 { s / sigma_max } else { 0.0 };
        Self {
            k,
            num_vectors: gram.nrows(),
            rank,
            expected,
            sigma_max,
            sigma_min: sv.last().copied().unwrap_or(0.0),
            smallest_kept_rel: rank.checked_sub(1).map_or(0.0, |i| rel(sv[i])),
            largest_dropped_rel: sv.get(rank).map_or(0.0, |&s| rel(s)),
            rank_stable: ranks.iter().all(|&r| r == rank),
            tolerances,
            ranks,
            gram,
            bent_rank: None,
        }
    }

    pub fn matches_expected(&self) -> bool {
        self.rank_stable && self.rank as u128 == self.expected && self.bent_rank.is_none_or(|b| b == self.rank)
    }

    fn ensure_stable(self) -> Result<Self> {
        if self.rank_stable {
            Ok(self)
        } else {
            Err(Error::RankInstability {
                ranks: self.ranks,
                tolerances: self.tolerances,
            })
        }
    }
}

/// Realized vectors of `X_k`; for `k = 0` the single scalar `1`.
pub fn realized_generators(shape: &AlgebraShape, k: usize) -> Vec<Vec<Complex64>> {
    if k == 0 {
        return vec![vec![Complex64::new(1.0, 0.0)]];
    }
    let mut realizer = ArrowRealizer::new(shape);
    enumerate_xk(k)
        .expect("k >= 1")
        .iter()
        .map(|a| realizer.realize(a))
        .collect()
}

/// Gram report of `X_k` without the rank-stability requirement.
pub fn gram_report(shape: &AlgebraShape, k: usize, tol_rel: f64) -> GramReport {
    let vectors = realized_generators(shape, k);
    let cols: Vec<&[Complex64]> = vectors.iter().map(Vec::as_slice).collect();
    GramReport::from_gram(k, gram_of_columns(&cols), tol_rel, catalan(k))
}

/// `dim Hom(0, k)` as the Gram rank of the realized generators `X_k`,
/// expected to be `C_k` when `n >= 4`.
pub fn hom_dimension(shape: &AlgebraShape, k: usize, tol_rel: f64) -> Result<GramReport> {
    hom_dimension_bounded(shape, k, tol_rel, DEFAULT_MAX_K)
}

pub fn hom_dimension_bounded(shape: &AlgebraShape, k: usize, tol_rel: f64, max_k: usize) -> Result<GramReport> {
    if k > max_k {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the configured maximum {max_k}"
        )));
    }
    gram_report(shape, k, tol_rel).ensure_stable()
}

/// Matrices `B^{⊗l} → B^{⊗l}` obtained from the vectors of `X_{2l}` by bending
/// the last `l` legs down with nested copies of the cup `t = μ*η`:
/// `T_v(x) = (id_l ⊗ t*_{nested})(v ⊗ x)`.
pub fn bent_generators(shape: &AlgebraShape, l: usize) -> Result<Vec<DMatrix<Complex64>>> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    let n = shape.total_dim();
    let side = n.pow(l as u32);
    let cup = StructureMaps::canonical(shape).duality_vector();
    let t = cup.as_vector()?;
    // caps[J, K] = Π_i conj(t[j_{l+1-i}, k_i])
    let caps = DMatrix::from_fn(side, side, |row, col| {
        let mut j = digits(row, n, l);
        j.reverse();
        let kd = digits(col, n, l);
        j.iter()
            .zip(&kd)
            .map(|(&a, &b)| t[a * n + b].conj())
            .product::<Complex64>()
    });
    Ok(realized_generators(shape, 2 * l)
        .into_iter()
        .map(|v| {
            // Row-major (I, J) data read as a column-major matrix is its transpose.
            let v = DMatrix::from_column_slice(side, side, &v).transpose();
            matmul(&v, &caps)
        })
        .collect())
}

/// Base-`n` digits of `x`, most significant first.
fn digits(mut x: usize, n: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = x % n;
        x /= n;
    }
    d
}

/// `dim End(l)` through Frobenius reciprocity `End(l) ≅ Hom(0, 2l)`: the rank
/// of the bent matrices must agree with the Gram rank of `X_{2l}`.
pub fn end_dimension(shape: &AlgebraShape, l: usize, tol_rel: f64) -> Result<GramReport> {
    if l > 3 {
        return Err(Error::InvalidArgument(format!("l = {l} exceeds 3")));
    }
    let mut report = hom_dimension(shape, 2 * l, tol_rel)?;
    let bent = bent_generators(shape, l)?;
    let cols: Vec<&[Complex64]> = bent.iter().map(|m| m.as_slice()).collect();
    let bent_report = GramReport::from_gram(l, gram_of_columns(&cols), tol_rel, report.expected);
    let bent_report = bent_report.ensure_stable()?;
    report.k = l;
    report.bent_rank = Some(bent_report.rank);
    if bent_report.rank != report.rank {
        return Err(Error::BendMismatch {
            bent: bent_report.rank,
            gram: report.rank,
        });
    }
    Ok(report)
}

/// Whether the realized `X_k` are linearly independent.
pub fn verify_independence(shape: &AlgebraShape, k: usize, tol_rel: f64) -> Result<bool> {
    let report = gram_report(shape, k, tol_rel).ensure_stable()?;
    Ok(report.rank == report.num_vectors)
}
