//! Finite-dimensional C*-algebras as multimatrix algebras `M_{m_1} ⊕ ... ⊕ M_{m_s}`.
//!
//! Block weights of traces are exact rationals; element entries are `f64` complex.
//! Every algebra carries the Hilbert-space structure `<x, y> = tr(y* x)` induced
//! by a faithful trace, and by default that trace is the canonical one with
//! weights `m_γ² / n`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block sizes of a multimatrix algebra together with its dimension `n = Σ m_γ²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeSpec", into = "ShapeSpec")]
pub struct AlgebraShape {
    blocks: Vec<usize>,
    total_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct ShapeSpec {
    blocks: Vec<usize>,
}

impl TryFrom<ShapeSpec> for AlgebraShape {
    type Error = Error;

    fn try_from(spec: ShapeSpec) -> Result<Self> {
        AlgebraShape::new(spec.blocks)
    }
}

impl From<AlgebraShape> for ShapeSpec {
    fn from(shape: AlgebraShape) -> Self {
        ShapeSpec {
            blocks: shape.blocks,
        }
    }
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if let Some(pos) = blocks.iter().position(|&m| m == 0) {
            return Err(Error::InvalidShape(format!(
                "block {} has size 0",
                pos + 1
            )));
        }
        let total_dim = blocks.iter().map(|m| m * m).sum();
        Ok(Self { blocks, total_dim })
    }

    /// Parses either `"2,1,1"` or `{"blocks":[2,1,1]}`.
    pub fn parse(spec: &str) -> Result<Self> {
        let trimmed = spec.trim();
        if trimmed.starts_with('{') {
            return serde_json::from_str(trimmed)
                .map_err(|e| Error::InvalidShape(format!("{trimmed:?}: {e}")));
        }
        let blocks = trimmed
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidShape(format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `n = dim B`.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Offset of block `gamma` in the row-major basis ordering.
    pub fn block_offset(&self, gamma: usize) -> usize {
        self.blocks[..gamma].iter().map(|m| m * m).sum()
    }

    /// Position of the matrix unit `e_{ij}^γ` (0-based) in the fixed basis ordering.
    pub fn basis_index(&self, gamma: usize, i: usize, j: usize) -> usize {
        self.block_offset(gamma) + i * self.blocks[gamma] + j
    }

    /// Inverse of [`AlgebraShape::basis_index`].
    pub fn basis_label(&self, index: usize) -> (usize, usize, usize) {
        let mut rest = index;
        for (gamma, &m) in self.blocks.iter().enumerate() {
            if rest < m * m {
                return (gamma, rest / m, rest % m);
            }
            rest -= m * m;
        }
        panic!("basis index {index} out of range for dimension {}", self.total_dim)
    }

    /// All shapes (as non-increasing block lists) with `n <= max_dim`.
    pub fn enumerate_up_to(max_dim: usize) -> Vec<AlgebraShape> {
        fn rec(remaining: usize, max_block: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            for m in (1..=max_block).rev() {
                if m * m <= remaining {
                    cur.push(m);
                    rec(remaining - m * m, m, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        let max_block = (1..).take_while(|m| m * m <= max_dim).last().unwrap_or(0);
        rec(max_dim, max_block, &mut Vec::new(), &mut out);
        out.sort_by_key(|b| (b.iter().map(|m| m * m).sum::<usize>(), b.clone()));
        out.into_iter()
            .map(|b| AlgebraShape::new(b).expect("enumerated blocks are positive"))
            .collect()
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for AlgebraShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Weights `λ_γ = tr(1_γ)` of a faithful normalized trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceWeights {
    weights: Vec<Rational64>,
}

impl TraceWeights {
    pub fn new(weights: Vec<Rational64>) -> Result<Self> {
        if weights.iter().any(|w| *w <= Rational64::zero()) {
            return Err(Error::InvalidArgument(
                "trace weights must be strictly positive".into(),
            ));
        }
        let sum: Rational64 = weights.iter().copied().sum();
        if !sum.is_one() {
            return Err(Error::InvalidArgument(format!(
                "trace weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.to_f64().expect("small rational"))
            .collect()
    }

    fn check_shape(&self, shape: &AlgebraShape) -> Result<()> {
        if self.weights.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} blocks",
                self.weights.len(),
                shape.num_blocks()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for TraceWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `λ_γ = m_γ² / n`.
pub fn canonical_trace_weights(shape: &AlgebraShape) -> TraceWeights {
    let n = shape.total_dim() as i64;
    let weights = shape
        .blocks()
        .iter()
        .map(|&m| Rational64::new((m * m) as i64, n))
        .collect();
    TraceWeights::new(weights).expect("canonical weights are positive and normalized")
}

/// Weights obtained by restricting the normalized trace of `L(B)` along the
/// left regular representation.
///
/// For each block the left-multiplication operator of the minimal projection
/// `e_{11}^γ` is built as an exact integer matrix on the basis of matrix units;
/// its normalized trace is the trace of a minimal projection, and the block
/// unit is a sum of `m_γ` of them.
pub fn regular_rep_trace(shape: &AlgebraShape) -> TraceWeights {
    let n = shape.total_dim();
    let weights = (0..shape.num_blocks())
        .map(|gamma| {
            let op = left_multiplication_of_unit(shape, gamma, 0, 0);
            let matrix_trace: i64 = (0..n).map(|d| op[d * n + d]).sum();
            Rational64::new(matrix_trace * shape.blocks()[gamma] as i64, n as i64)
        })
        .collect();
    TraceWeights::new(weights).expect("regular representation trace is a state")
}

/// Row-major `n × n` integer matrix of `x ↦ e_{ij}^γ x` on the matrix-unit basis.
fn left_multiplication_of_unit(shape: &AlgebraShape, gamma: usize, i: usize, j: usize) -> Vec<i64> {
    let n = shape.total_dim();
    let mut op = vec![0i64; n * n];
    for col in 0..n {
        let (delta, k, l) = shape.basis_label(col);
        // e_{ij}^γ e_{kl}^δ = δ_{γδ} δ_{jk} e_{il}^γ
        if delta == gamma && k == j {
            let row = shape.basis_index(gamma, i, l);
            op[row * n + col] += 1;
        }
    }
    op
}

/// An element of `⊕_γ M_{m_γ}(ℂ)`, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<DMatrix<Complex64>>,
}

impl AlgebraElement {
    pub fn from_blocks(shape: &AlgebraShape, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks given for shape {shape}",
                blocks.len()
            )));
        }
        for (gamma, (b, &m)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if b.nrows() != m || b.ncols() != m {
                return Err(Error::ShapeMismatch(format!(
                    "block {gamma} is {}x{}, expected {m}x{m}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.blocks().iter().map(|&m| DMatrix::zeros(m, m)).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn unit(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .blocks()
            .iter()
            .map(|&m| DMatrix::identity(m, m))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Matrix unit `e_{ij}^γ` with 0-based indices.
    pub fn matrix_unit(shape: &AlgebraShape, gamma: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zero(shape);
        x.blocks[gamma][(i, j)] = Complex64::new(1.0, 0.0);
        x
    }

    /// Element whose coordinates on the matrix units `e_{ij}^γ` are `coeffs`
    /// (in the fixed basis ordering).
    pub fn from_unit_coordinates(shape: &AlgebraShape, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for dimension {}",
                coeffs.len(),
                shape.total_dim()
            )));
        }
        let mut x = Self::zero(shape);
        for (idx, c) in coeffs.iter().enumerate() {
            let (gamma, i, j) = shape.basis_label(idx);
            x.blocks[gamma][(i, j)] = *c;
        }
        Ok(x)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn block(&self, gamma: usize) -> &DMatrix<Complex64> {
        &self.blocks[gamma]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{} vs {}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| z.norm() == 0.0))
    }

    /// `Σ_γ λ_γ m_γ^{-1} Tr(x_γ)`.
    pub fn trace(&self, weights: &TraceWeights) -> Result<Complex64> {
        weights.check_shape(&self.shape)?;
        let w = weights.to_f64();
        Ok(self
            .blocks
            .iter()
            .zip(self.shape.blocks())
            .zip(w)
            .map(|((b, &m), lambda)| b.trace() * (lambda / m as f64))
            .sum())
    }

    /// `<x, y> = tr(y* x)` for the trace with the given weights.
    pub fn inner_product_with(&self, other: &Self, weights: &TraceWeights) -> Result<Complex64> {
        other.adjoint().multiply(self)?.trace(weights)
    }

    /// `<x, y> = tr(y* x)` for the canonical trace.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.inner_product_with(other, &canonical_trace_weights(&self.shape))
    }
}

/// One element `f_{ij}^γ` of an orthonormal basis, with its labels.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub element: AlgebraElement,
}

/// The basis `f_{ij}^γ = (m_γ / λ_γ)^{1/2} e_{ij}^γ`, blocks in declaration
/// order and matrix units row-major within a block.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    shape: AlgebraShape,
    weights: TraceWeights,
    scales: Vec<f64>,
    elements: Vec<BasisElement>,
}

impl OrthonormalBasis {
    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn weights(&self) -> &TraceWeights {
        &self.weights
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Scale factor `(m_γ / λ_γ)^{1/2}` of block `gamma`.
    pub fn scale(&self, gamma: usize) -> f64 {
        self.scales[gamma]
    }

    /// Coordinates `<x, f_a>` of `x` in this basis.
    pub fn coordinates(&self, x: &AlgebraElement) -> Result<DVector<Complex64>> {
        let coords = self
            .elements
            .iter()
            .map(|f| x.inner_product_with(&f.element, &self.weights))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(coords))
    }

    /// Matrix of pairwise inner products `<f_b, f_a>` at `(a, b)`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |a, b| {
            self.elements[b]
                .element
                .inner_product_with(&self.elements[a].element, &self.weights)
                .expect("basis elements share a shape")
        })
    }
}

/// Orthonormal basis for the canonical trace.
pub fn orthonormal_basis(shape: &AlgebraShape) -> OrthonormalBasis {
    orthonormal_basis_for_weights(shape, &canonical_trace_weights(shape))
        .expect("canonical weights match the shape")
}

/// Orthonormal basis for an arbitrary faithful trace.
pub fn orthonormal_basis_for_weights(
    shape: &AlgebraShape,
    weights: &TraceWeights,
) -> Result<OrthonormalBasis> {
    weights.check_shape(shape)?;
    let scales: Vec<f64> = shape
        .blocks()
        .iter()
        .zip(weights.to_f64())
        .map(|(&m, lambda)| (m as f64 / lambda).sqrt())
        .collect();
    let elements = (0..shape.total_dim())
        .map(|idx| {
            let (gamma, i, j) = shape.basis_label(idx);
            BasisElement {
                block: gamma,
                row: i,
                col: j,
                element: AlgebraElement::matrix_unit(shape, gamma, i, j)
                    .scale(Complex64::new(scales[gamma], 0.0)),
            }
        })
        .collect();
    Ok(OrthonormalBasis {
        shape: shape.clone(),
        weights: weights.clone(),
        scales,
        elements,
    })
}
