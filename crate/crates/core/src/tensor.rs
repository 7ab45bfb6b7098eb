//! Linear maps `B^{⊗a} → B^{⊗b}` in orthonormal coordinates.
//!
//! Index convention: the leftmost tensor factor is the most significant index,
//! so `tensor(S, T)` is the Kronecker product `S ⊗ T` and maps act on column
//! vectors. `B^{⊗0}` is the scalars.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{matmul, max_abs_diff};
use crate::multimatrix::{
    canonical_trace_weights, orthonormal_basis_for_weights, AlgebraShape, TraceWeights,
};

/// Default absolute tolerance for relation checks.
pub const DEFAULT_RELATION_TOL: f64 = 1e-10;

/// Dense matrix of a map `B^{⊗domain} → B^{⊗codomain}` where `dim B = dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMap {
    dim: usize,
    domain: usize,
    codomain: usize,
    matrix: DMatrix<Complex64>,
}

fn pow(n: usize, k: usize) -> usize {
    n.checked_pow(k as u32).expect("tensor power overflows usize")
}

impl TensorMap {
    pub fn new(dim: usize, domain: usize, codomain: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = (pow(dim, codomain), pow(dim, domain));
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, expected {rows}x{cols} for {domain} -> {codomain} over dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            dim,
            domain,
            codomain,
            matrix,
        })
    }

    /// A vector in `B^{⊗power}` viewed as a map from the scalars.
    pub fn from_vector(dim: usize, power: usize, v: DVector<Complex64>) -> Result<Self> {
        let len = v.len();
        Self::new(dim, 0, power, DMatrix::from_column_slice(len, 1, v.as_slice()))
    }

    pub fn identity(shape: &AlgebraShape, m: usize) -> Self {
        Self::identity_on(shape.total_dim(), m)
    }

    pub fn identity_on(dim: usize, m: usize) -> Self {
        let size = pow(dim, m);
        Self {
            dim,
            domain: m,
            codomain: m,
            matrix: DMatrix::identity(size, size),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_power(&self) -> usize {
        self.domain
    }

    pub fn codomain_power(&self) -> usize {
        self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Column of a map out of the scalars.
    pub fn as_vector(&self) -> Result<&[Complex64]> {
        if self.domain != 0 {
            return Err(Error::PowerMismatch {
                expected: 0,
                found: self.domain,
            });
        }
        Ok(self.matrix.as_slice())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            domain: self.codomain,
            codomain: self.domain,
            matrix: self.matrix.adjoint(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "maps over dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_dim(inner)?;
        if self.domain != inner.codomain {
            return Err(Error::PowerMismatch {
                expected: self.domain,
                found: inner.codomain,
            });
        }
        Ok(Self {
            dim: self.dim,
            domain: inner.domain,
            codomain: self.codomain,
            matrix: matmul(&self.matrix, &inner.matrix),
        })
    }

    /// `self ⊗ right`.
    pub fn tensor(&self, right: &Self) -> Result<Self> {
        self.check_dim(right)?;
        Ok(Self {
            dim: self.dim,
            domain: self.domain + right.domain,
            codomain: self.codomain + right.codomain,
            matrix: self.matrix.kronecker(&right.matrix),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(c, 0.0),
            ..self.clone()
        }
    }

    /// Largest entrywise deviation from another map with the same powers.
    pub fn deviation(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::ShapeMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.domain, self.codomain, other.domain, other.codomain
            )));
        }
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    /// `(id_before ⊗ self ⊗ id_after)` applied to every column of `x`, without
    /// forming the Kronecker product.
    pub fn apply_local(&self, before: usize, after: usize, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let n = self.dim;
        let (outer, inner) = (pow(n, before), pow(n, after));
        let (din, dout) = (pow(n, self.domain), pow(n, self.codomain));
        if x.nrows() != outer * din * inner {
            return Err(Error::ShapeMismatch(format!(
                "input has {} rows, expected {}",
                x.nrows(),
                outer * din * inner
            )));
        }
        let op_t = self.matrix.transpose();
        let mut out = DMatrix::zeros(outer * dout * inner, x.ncols());
        for col in 0..x.ncols() {
            let src = x.column(col);
            let src = src.as_slice();
            let mut dst = out.column_mut(col);
            let dst = dst.as_mut_slice();
            for o in 0..outer {
                // The row-major (mid, inner) block is a column-major inner × mid matrix.
                let block = DMatrix::from_column_slice(inner, din, &src[o * din * inner..(o + 1) * din * inner]);
                let res = matmul(&block, &op_t);
                dst[o * dout * inner..(o + 1) * dout * inner].copy_from_slice(res.as_slice());
            }
        }
        Ok(out)
    }

    /// `(id_before ⊗ self ⊗ id_after) ∘ inner`.
    pub fn compose_local(&self, before: usize, after: usize, inner: &Self) -> Result<Self> {
        self.check_dim(inner)?;
        let expected = before + self.domain + after;
        if inner.codomain != expected {
            return Err(Error::PowerMismatch {
                expected,
                found: inner.codomain,
            });
        }
        Ok(Self {
            dim: self.dim,
            domain: inner.domain,
            codomain: before + self.codomain + after,
            matrix: self.apply_local(before, after, &inner.matrix)?,
        })
    }
}

/// The structure maps `μ, η` of `B` and their adjoints for a given trace.
#[derive(Debug, Clone)]
pub struct StructureMaps {
    shape: AlgebraShape,
    weights: TraceWeights,
    pub mu: TensorMap,
    pub mu_star: TensorMap,
    pub eta: TensorMap,
    pub eta_star: TensorMap,
}

impl StructureMaps {
    pub fn canonical(shape: &AlgebraShape) -> Self {
        Self::with_weights(shape, &canonical_trace_weights(shape))
            .expect("canonical weights match the shape")
    }

    /// Structure maps in the orthonormal basis of an arbitrary faithful trace;
    /// only the adjoints (and the coordinates) depend on the trace.
    pub fn with_weights(shape: &AlgebraShape, weights: &TraceWeights) -> Result<Self> {
        let basis = orthonormal_basis_for_weights(shape, weights)?;
        let n = shape.total_dim();
        let mut mu = DMatrix::zeros(n, n * n);
        for (a, fa) in basis.elements().iter().enumerate() {
            for (b, fb) in basis.elements().iter().enumerate() {
                let prod = fa.element.multiply(&fb.element)?;
                if prod.is_zero() {
                    continue;
                }
                let coords = basis.coordinates(&prod)?;
                mu.column_mut(a * n + b).copy_from(&coords);
            }
        }
        let unit = crate::multimatrix::AlgebraElement::unit(shape);
        let eta = basis.coordinates(&unit)?;
        let mu = TensorMap::new(n, 2, 1, mu)?;
        let eta = TensorMap::from_vector(n, 1, eta)?;
        Ok(Self {
            shape: shape.clone(),
            weights: weights.clone(),
            mu_star: mu.adjoint(),
            eta_star: eta.adjoint(),
            mu,
            eta,
        })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn weights(&self) -> &TraceWeights {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    /// `(μ*)^{(p)} = (id_{p-1}⊗μ*)(id_{p-2}⊗μ*)…(id⊗μ*)μ*`, with `(μ*)^{(0)} = id_1`.
    pub fn iterated_comultiplication(&self, p: usize) -> TensorMap {
        self.comultiply_onto(p, TensorMap::identity(&self.shape, 1))
    }

    /// `η^{(p)} = (μ*)^{(p-1)} η`.
    pub fn iterated_unit(&self, p: usize) -> Result<TensorMap> {
        if p == 0 {
            return Err(Error::InvalidArgument("iterated unit needs p >= 1".into()));
        }
        Ok(self.comultiply_onto(p - 1, self.eta.clone()))
    }

    fn comultiply_onto(&self, p: usize, start: TensorMap) -> TensorMap {
        (0..p).fold(start, |acc, step| {
            self.mu_star
                .compose_local(step, 0, &acc)
                .expect("powers line up by construction")
        })
    }

    /// The cup `t = μ*η ∈ B ⊗ B`.
    pub fn duality_vector(&self) -> TensorMap {
        self.iterated_unit(2).expect("p = 2")
    }

    /// `P = n^{-1} μ*μ` on `B ⊗ B` and `Q = ηη*` on `B`.
    pub fn jones_projections(&self) -> (TensorMap, TensorMap) {
        let n = self.dim() as f64;
        let p = self
            .mu_star
            .compose(&self.mu)
            .expect("μ*μ is composable")
            .scaled(1.0 / n);
        let q = self.eta.compose(&self.eta_star).expect("ηη* is composable");
        (p, q)
    }
}

pub fn build_mu(shape: &AlgebraShape) -> TensorMap {
    StructureMaps::canonical(shape).mu
}

pub fn build_eta(shape: &AlgebraShape) -> TensorMap {
    StructureMaps::canonical(shape).eta
}

pub fn iterated_comultiplication(shape: &AlgebraShape, p: usize) -> TensorMap {
    StructureMaps::canonical(shape).iterated_comultiplication(p)
}

pub fn iterated_unit(shape: &AlgebraShape, p: usize) -> Result<TensorMap> {
    StructureMaps::canonical(shape).iterated_unit(p)
}

pub fn duality_vector(shape: &AlgebraShape) -> TensorMap {
    StructureMaps::canonical(shape).duality_vector()
}

pub fn jones_projections(shape: &AlgebraShape) -> (TensorMap, TensorMap) {
    StructureMaps::canonical(shape).jones_projections()
}

/// Outcome of checking one identity between maps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RelationReport {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
            // NaN deviations fail.
            pass: deviation <= tolerance,
        }
    }
}

fn relation(name: &str, lhs: &TensorMap, rhs: &TensorMap, tol: f64) -> RelationReport {
    let deviation = lhs.deviation(rhs).unwrap_or(f64::INFINITY);
    RelationReport::new(name, deviation, tol)
}

/// Checks the Frobenius-algebra relations of `(B, μ, η)` for the canonical trace.
pub fn verify_frobenius(shape: &AlgebraShape, tol: f64) -> Vec<RelationReport> {
    frobenius_reports(&StructureMaps::canonical(shape), tol)
}

/// Same as [`verify_frobenius`] with `μ*` and `η*` taken with respect to the
/// trace of the given weights.
pub fn verify_frobenius_with_weights(
    shape: &AlgebraShape,
    weights: &TraceWeights,
    tol: f64,
) -> Result<Vec<RelationReport>> {
    Ok(frobenius_reports(&StructureMaps::with_weights(shape, weights)?, tol))
}

fn frobenius_reports(maps: &StructureMaps, tol: f64) -> Vec<RelationReport> {
    let n = maps.dim();
    let id1 = TensorMap::identity_on(n, 1);
    let id0 = TensorMap::identity_on(n, 0);
    let StructureMaps {
        mu,
        mu_star,
        eta,
        eta_star,
        ..
    } = maps;
    let ok = "powers line up by construction";

    let mu_mu_star = mu.compose(mu_star).expect(ok);
    let eta_star_eta = eta_star.compose(eta).expect(ok);
    let mu_star_mu = mu_star.compose(mu).expect(ok);
    // (μ⊗id)(id⊗μ*)
    let left = mu
        .compose_local(0, 1, &mu_star.compose_local(1, 0, &TensorMap::identity_on(n, 2)).expect(ok))
        .expect(ok);
    // (id⊗μ)(μ*⊗id)
    let right = mu
        .compose_local(1, 0, &mu_star.compose_local(0, 1, &TensorMap::identity_on(n, 2)).expect(ok))
        .expect(ok);
    let id3 = TensorMap::identity_on(n, 3);
    let assoc_left = mu.compose(&mu.compose_local(0, 1, &id3).expect(ok)).expect(ok);
    let assoc_right = mu.compose(&mu.compose_local(1, 0, &id3).expect(ok)).expect(ok);
    let unit_right = mu.compose(&id1.tensor(eta).expect(ok)).expect(ok);
    let unit_left = mu.compose(&eta.tensor(&id1).expect(ok)).expect(ok);

    vec![
        relation("μμ* = n·id", &mu_mu_star, &id1.scaled(n as f64), tol),
        relation("η*η = id", &eta_star_eta, &id0, tol),
        relation("(μ⊗id)(id⊗μ*) = μ*μ", &left, &mu_star_mu, tol),
        relation("(id⊗μ)(μ*⊗id) = μ*μ", &right, &mu_star_mu, tol),
        relation("μ(μ⊗id) = μ(id⊗μ)", &assoc_left, &assoc_right, tol),
        relation("μ(id⊗η) = id", &unit_right, &id1, tol),
        relation("μ(η⊗id) = id", &unit_left, &id1, tol),
    ]
}

/// Checks the Jones-projection relations for `P = n^{-1}μ*μ` and `Q = ηη*`.
pub fn verify_jones_relations(shape: &AlgebraShape, tol: f64) -> Vec<RelationReport> {
    let maps = StructureMaps::canonical(shape);
    let n = maps.dim();
    let nf = n as f64;
    let (p, q) = maps.jones_projections();
    let id1 = TensorMap::identity_on(n, 1);
    let ok = "powers line up by construction";

    let q_id = q.tensor(&id1).expect(ok);
    let id_q = id1.tensor(&q).expect(ok);
    let sandwich = |outer: &TensorMap, inner: &TensorMap| {
        outer
            .compose(inner)
            .and_then(|m| m.compose(outer))
            .expect(ok)
            .scaled(nf)
    };

    // (P⊗id)(id⊗P) = n^{-2}(μ*⊗id)[(μ⊗id)(id⊗μ*)](id⊗μ); grouping through
    // B⊗B keeps the cost at O(n^8) instead of a dense n^3 × n^3 product chain.
    let id2 = TensorMap::identity_on(n, 2);
    let mid_left = maps
        .mu
        .compose_local(0, 1, &maps.mu_star.compose_local(1, 0, &id2).expect(ok))
        .expect(ok);
    let mid_right = maps
        .mu
        .compose_local(1, 0, &maps.mu_star.compose_local(0, 1, &id2).expect(ok))
        .expect(ok);
    let mu_star_id = maps.mu_star.tensor(&id1).expect(ok);
    let id_mu_star = id1.tensor(&maps.mu_star).expect(ok);
    let mu_id = maps.mu.tensor(&id1).expect(ok);
    let id_mu = id1.tensor(&maps.mu).expect(ok);
    let pp_left = mu_star_id
        .compose(&mid_left.compose(&id_mu).expect(ok))
        .expect(ok)
        .scaled(1.0 / (nf * nf));
    let pp_right = id_mu_star
        .compose(&mid_right.compose(&mu_id).expect(ok))
        .expect(ok)
        .scaled(1.0 / (nf * nf));

    vec![
        relation("n(Q⊗id)P(Q⊗id) = Q⊗id", &sandwich(&q_id, &p), &q_id, tol),
        relation("n(id⊗Q)P(id⊗Q) = id⊗Q", &sandwich(&id_q, &p), &id_q, tol),
        relation("nP(id⊗Q)P = P", &sandwich(&p, &id_q), &p, tol),
        relation("nP(Q⊗id)P = P", &sandwich(&p, &q_id), &p, tol),
        relation("(P⊗id)(id⊗P) = (id⊗P)(P⊗id)", &pp_left, &pp_right, tol),
    ]
}
