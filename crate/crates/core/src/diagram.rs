//! Temperley-Lieb diagrams, the algebra `A_{β,m}`, and its representation on
//! tensor powers of `B` through the Jones projections.
//!
//! Boundary points are labelled `1..=m` along the top (left to right) and
//! `m+1..=2m` along the bottom (right to left). With this cyclic labelling a
//! pairing is planar exactly when it nests like balanced parentheses.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SpanBuilder;
use crate::multimatrix::AlgebraShape;
use crate::tensor::{RelationReport, StructureMaps, TensorMap};

/// `C_k = (2k)! / (k! (k+1)!)`, exact for `k <= 30` and well beyond.
pub fn catalan(k: usize) -> u128 {
    // binom(k+i, i) stays exact at every step.
    let mut binom: u128 = 1;
    for i in 1..=k as u128 {
        binom = binom * (k as u128 + i) / i;
    }
    binom / (k as u128 + 1)
}

/// Catalan numbers from `E_0 = 1`, `E_s = Σ_{x+y=s-1} E_x E_y`.
pub fn catalan_by_recursion(max: usize) -> Vec<u128> {
    let mut e = vec![1u128];
    for s in 1..=max {
        let next = (0..s).map(|x| e[x] * e[s - 1 - x]).sum();
        e.push(next);
    }
    e
}

/// Index `β > 0` of `A_{β,m}`. A closed loop evaluates to `δ = β^{1/2}` and
/// `e_i = δ^{-1} U_i`, so that `e_i² = e_i` and `βe_ie_{i±1}e_i = e_i`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LoopParameter(f64);

impl LoopParameter {
    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidArgument(format!(
                "loop parameter must be positive, got {beta}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `δ = β^{1/2}`.
    pub fn loop_value(self) -> f64 {
        self.0.sqrt()
    }
}

/// A planar perfect pairing of `m` top and `m` bottom boundary points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<[usize; 2]>", into = "Vec<[usize; 2]>")]
pub struct TLDiagram {
    m: usize,
    /// `partner[a]` for 0-based cyclic labels.
    partner: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Top,
    Bottom,
}

impl TLDiagram {
    /// Builds a diagram from 1-based label pairs.
    pub fn from_pairs(m: usize, pairs: &[[usize; 2]]) -> Result<Self> {
        if pairs.len() != m {
            return Err(Error::InvalidArgument(format!(
                "{} pairs for {m} strands",
                pairs.len()
            )));
        }
        let mut partner = vec![usize::MAX; 2 * m];
        for &[a, b] in pairs {
            if a == b || a == 0 || b == 0 || a > 2 * m || b > 2 * m {
                return Err(Error::InvalidArgument(format!("bad pair [{a},{b}]")));
            }
            let (a, b) = (a - 1, b - 1);
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidArgument(format!(
                    "point used twice in [{},{}]",
                    a + 1,
                    b + 1
                )));
            }
            partner[a] = b;
            partner[b] = a;
        }
        let d = Self { m, partner };
        if !d.is_planar() {
            return Err(Error::InvalidArgument("pairing is not planar".into()));
        }
        Ok(d)
    }

    fn from_partner(m: usize, partner: Vec<usize>) -> Self {
        debug_assert_eq!(partner.len(), 2 * m);
        Self { m, partner }
    }

    pub fn identity(m: usize) -> Self {
        let partner = (0..2 * m).map(|a| 2 * m - 1 - a).collect();
        Self::from_partner(m, partner)
    }

    /// `U_i`: top points `i, i+1` joined, bottom points `i, i+1` joined,
    /// all other strands vertical (1-based `i`).
    pub fn cup_cap(m: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= m {
            return Err(Error::InvalidArgument(format!(
                "cup-cap position {i} out of range 1..{m}"
            )));
        }
        let mut d = Self::identity(m);
        let (t0, t1) = (i - 1, i);
        let (b0, b1) = (d.label(Side::Bottom, i - 1), d.label(Side::Bottom, i));
        d.partner[t0] = t1;
        d.partner[t1] = t0;
        d.partner[b0] = b1;
        d.partner[b1] = b0;
        Ok(d)
    }

    pub fn strands(&self) -> usize {
        self.m
    }

    fn label(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::Top => pos,
            Side::Bottom => 2 * self.m - 1 - pos,
        }
    }

    fn locate(&self, label: usize) -> (Side, usize) {
        if label < self.m {
            (Side::Top, label)
        } else {
            (Side::Bottom, 2 * self.m - 1 - label)
        }
    }

    fn partner_of(&self, side: Side, pos: usize) -> (Side, usize) {
        self.locate(self.partner[self.label(side, pos)])
    }

    fn is_planar(&self) -> bool {
        let mut stack = Vec::new();
        for a in 0..2 * self.m {
            let b = self.partner[a];
            if b > a {
                stack.push(a);
            } else if stack.pop() != Some(b) {
                return false;
            }
        }
        stack.is_empty()
    }

    /// Sorted 1-based pairs.
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        (0..2 * self.m)
            .filter(|&a| self.partner[a] > a)
            .map(|a| [a + 1, self.partner[a] + 1])
            .collect()
    }

    /// Number of strands joining top to bottom.
    pub fn through_strands(&self) -> usize {
        (0..self.m).filter(|&a| self.partner[a] >= self.m).count()
    }

    /// Vertical flip.
    pub fn star(&self) -> Self {
        let m = self.m;
        let mut partner = vec![0; 2 * m];
        for a in 0..2 * m {
            let (side, pos) = self.locate(a);
            let flip = |s: Side| match s {
                Side::Top => Side::Bottom,
                Side::Bottom => Side::Top,
            };
            let (ps, pp) = self.locate(self.partner[a]);
            partner[self.label(flip(side), pos)] = self.label(flip(ps), pp);
        }
        Self::from_partner(m, partner)
    }

    /// Stacks `self` on top of `below`: the bottom of `self` is glued to the
    /// top of `below`. Returns the resulting diagram and the number of closed
    /// loops removed.
    pub fn stack(&self, below: &Self) -> Result<(Self, usize)> {
        if self.m != below.m {
            return Err(Error::StrandMismatch {
                left: self.m,
                right: below.m,
            });
        }
        let m = self.m;
        let mut seen_mid = vec![false; m];
        let mut partner = vec![usize::MAX; 2 * m];

        // Walk from an outer endpoint through the middle layer until another
        // outer endpoint is reached. `in_upper` says which diagram we are in.
        let walk = |start_upper: bool, side: Side, pos: usize, seen: &mut Vec<bool>| -> (bool, Side, usize) {
            let mut upper = start_upper;
            let (mut s, mut p) = (side, pos);
            loop {
                let d = if upper { self } else { below };
                let (ns, np) = d.partner_of(s, p);
                let exits = (upper && ns == Side::Top) || (!upper && ns == Side::Bottom);
                if exits {
                    return (upper, ns, np);
                }
                seen[np] = true;
                upper = !upper;
                s = if upper { Side::Bottom } else { Side::Top };
                p = np;
            }
        };

        let outer_label = |upper: bool, side: Side, pos: usize| -> usize {
            match (upper, side) {
                (true, Side::Top) => pos,
                (false, Side::Bottom) => 2 * m - 1 - pos,
                _ => unreachable!("outer endpoints are top of upper or bottom of lower"),
            }
        };

        for pos in 0..m {
            for (upper, side) in [(true, Side::Top), (false, Side::Bottom)] {
                let a = outer_label(upper, side, pos);
                if partner[a] != usize::MAX {
                    continue;
                }
                let (eu, es, ep) = walk(upper, side, pos, &mut seen_mid);
                let b = outer_label(eu, es, ep);
                partner[a] = b;
                partner[b] = a;
            }
        }

        let mut loops = 0;
        for start in 0..m {
            if seen_mid[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            let mut upper = true;
            loop {
                seen_mid[p] = true;
                let d = if upper { self } else { below };
                let side = if upper { Side::Bottom } else { Side::Top };
                let (_, np) = d.partner_of(side, p);
                // The partner of a middle point inside a loop is a middle point.
                seen_mid[np] = true;
                upper = !upper;
                p = np;
                if p == start && upper {
                    break;
                }
            }
        }
        Ok((Self::from_partner(m, partner), loops))
    }
}

impl TryFrom<Vec<[usize; 2]>> for TLDiagram {
    type Error = Error;

    fn try_from(pairs: Vec<[usize; 2]>) -> Result<Self> {
        Self::from_pairs(pairs.len(), &pairs)
    }
}

impl From<TLDiagram> for Vec<[usize; 2]> {
    fn from(d: TLDiagram) -> Self {
        d.pairs()
    }
}

impl fmt::Display for TLDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|[a, b]| format!("[{a},{b}]")).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All `C_m` planar pairings on `m` strands, in a fixed order.
pub fn enumerate_diagrams(m: usize) -> Vec<TLDiagram> {
    fn matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if points.is_empty() {
            return vec![Vec::new()];
        }
        let first = points[0];
        let mut out = Vec::new();
        for j in (1..points.len()).step_by(2) {
            let inside = &points[1..j];
            let outside = &points[j + 1..];
            for a in matchings(inside) {
                for b in matchings(outside) {
                    let mut pairs = vec![(first, points[j])];
                    pairs.extend(a.iter().copied());
                    pairs.extend(b.iter().copied());
                    out.push(pairs);
                }
            }
        }
        out
    }
    let points: Vec<usize> = (0..2 * m).collect();
    matchings(&points)
        .into_iter()
        .map(|pairs| {
            let mut partner = vec![0; 2 * m];
            for (a, b) in pairs {
                partner[a] = b;
                partner[b] = a;
            }
            TLDiagram::from_partner(m, partner)
        })
        .collect()
}

/// Formal linear combination of diagrams with a common strand count.
#[derive(Debug, Clone, PartialEq)]
pub struct TLElement {
    m: usize,
    terms: BTreeMap<TLDiagram, Complex64>,
}

impl TLElement {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_diagram(d: TLDiagram, coeff: Complex64) -> Self {
        let mut x = Self::zero(d.strands());
        x.add_term(d, coeff);
        x
    }

    pub fn identity(m: usize) -> Self {
        Self::from_diagram(TLDiagram::identity(m), Complex64::new(1.0, 0.0))
    }

    pub fn strands(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TLDiagram, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, d: &TLDiagram) -> Complex64 {
        self.terms.get(d).copied().unwrap_or_default()
    }

    fn add_term(&mut self, d: TLDiagram, c: Complex64) {
        let entry = self.terms.entry(d).or_default();
        *entry += c;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::StrandMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(d, x)| (d.clone(), x * c)).collect(),
        }
    }

    /// Bilinear extension of stacking, each closed loop contributing `β^{1/2}`.
    pub fn multiply(&self, other: &Self, beta: LoopParameter) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.m);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                let (d, loops) = d1.stack(d2)?;
                out.add_term(d, c1 * c2 * beta.loop_value().powi(loops as i32));
            }
        }
        Ok(out)
    }

    /// Vertical flip with conjugated coefficients.
    pub fn star(&self) -> Self {
        Self {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.star(), c.conj()))
                .collect(),
        }
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)))?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

/// `stack(d1, d2)` as an algebra element: `β^{loops/2}` times a single diagram.
pub fn compose_diagrams(d1: &TLDiagram, d2: &TLDiagram, beta: LoopParameter) -> Result<TLElement> {
    let (d, loops) = d1.stack(d2)?;
    Ok(TLElement::from_diagram(
        d,
        Complex64::new(beta.loop_value().powi(loops as i32), 0.0),
    ))
}

/// `e_i = β^{-1/2} U_i` in `A_{β,m}`, for `1 <= i <= m-1`.
pub fn jones_generator(m: usize, i: usize, beta: LoopParameter) -> Result<TLElement> {
    let u = TLDiagram::cup_cap(m, i)?;
    Ok(TLElement::from_diagram(u, Complex64::new(1.0 / beta.loop_value(), 0.0)))
}

/// Images of `e_1, …, e_{2k-1} ∈ A_{n,2k}` on `B^{⊗k}`:
/// `e_{2s} ↦ id_{s-1}⊗P⊗id_{k-s-1}` and `e_{2s+1} ↦ id_s⊗Q⊗id_{k-s-1}`.
pub fn represent_generators(shape: &AlgebraShape, k: usize) -> Result<Vec<TensorMap>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let maps = StructureMaps::canonical(shape);
    let (p, q) = maps.jones_projections();
    let n = shape.total_dim();
    let place = |before: usize, x: &TensorMap, after: usize| {
        TensorMap::identity_on(n, before)
            .tensor(x)
            .and_then(|t| t.tensor(&TensorMap::identity_on(n, after)))
            .expect("same base dimension")
    };
    let mut images = Vec::with_capacity(2 * k - 1);
    for i in 1..2 * k {
        let s = i / 2;
        if i % 2 == 0 {
            images.push(place(s - 1, &p, k - s - 1));
        } else {
            images.push(place(s, &q, k - s - 1));
        }
    }
    Ok(images)
}

/// Jones relations for a list of operators `E_1, E_2, …` with index `β`:
/// idempotent, self-adjoint, commuting at distance ≥ 2, `βE_iE_jE_i = E_i` at
/// distance 1. One report per family with the worst deviation.
pub fn verify_represented_jones(images: &[TensorMap], beta: f64, tol: f64) -> Vec<RelationReport> {
    let ok = "generators share powers";
    let mut proj: f64 = 0.0;
    let mut selfadj: f64 = 0.0;
    let mut commute: f64 = 0.0;
    let mut braid: f64 = 0.0;
    for (i, e) in images.iter().enumerate() {
        proj = proj.max(e.compose(e).expect(ok).deviation(e).expect(ok));
        selfadj = selfadj.max(e.adjoint().deviation(e).expect(ok));
        for (j, f) in images.iter().enumerate() {
            let dist = i.abs_diff(j);
            if dist >= 2 {
                let ef = e.compose(f).expect(ok);
                let fe = f.compose(e).expect(ok);
                commute = commute.max(ef.deviation(&fe).expect(ok));
            } else if dist == 1 {
                let efe = e.compose(f).and_then(|x| x.compose(e)).expect(ok).scaled(beta);
                braid = braid.max(efe.deviation(e).expect(ok));
            }
        }
    }
    vec![
        RelationReport::new("E_i² = E_i", proj, tol),
        RelationReport::new("E_i* = E_i", selfadj, tol),
        RelationReport::new("E_iE_j = E_jE_i (|i-j| ≥ 2)", commute, tol),
        RelationReport::new("βE_iE_jE_i = E_i (|i-j| = 1)", braid, tol),
    ]
}

/// Relative tolerances used for the rank-stability cross-check.
pub const STABILITY_TOLS: [f64; 2] = [1e-6, 1e-10];

/// Spanning set of the unital algebra generated by `images`, by span growth:
/// starting from the identity, products `g·x` with generators are kept while
/// they enlarge the span. The returned maps are linearly independent at `tol_rel`.
pub fn generated_algebra_spanning_set(images: &[TensorMap], tol_rel: f64) -> Vec<TensorMap> {
    let Some(first) = images.first() else {
        return Vec::new();
    };
    let ok = "generators share powers";
    let id = TensorMap::identity_on(first.dim(), first.domain_power());
    let mut span = SpanBuilder::new(tol_rel);
    let flat = |t: &TensorMap| nalgebra::DVector::from_column_slice(t.matrix().as_slice());
    span.insert(&flat(&id));
    let mut kept = vec![id.clone()];
    let mut queue = std::collections::VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in images {
            let y = g.compose(&x).expect(ok);
            if span.insert(&flat(&y)).is_some() {
                kept.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    kept
}

/// Dimension of the unital algebra generated by `images`.
pub fn generated_algebra_dimension(images: &[TensorMap], tol_rel: f64) -> usize {
    if images.is_empty() {
        return 1;
    }
    generated_algebra_spanning_set(images, tol_rel).len()
}

/// Dimension of `π_k(A_{n,2k}) ⊂ L(B^{⊗k})`; equals `C_{2k}` when `n >= 4`.
///
/// The dimension is computed at `tol_rel` and at each of [`STABILITY_TOLS`];
/// any disagreement is reported as [`Error::RankInstability`].
pub fn image_algebra_dimension(shape: &AlgebraShape, k: usize, tol_rel: f64) -> Result<usize> {
    if shape.total_dim() < 4 {
        return Err(Error::InvalidArgument(format!(
            "image algebra dimension needs n >= 4, shape {shape} has n = {}",
            shape.total_dim()
        )));
    }
    let images = represent_generators(shape, k)?;
    let mut tolerances = vec![tol_rel];
    tolerances.extend(STABILITY_TOLS);
    let ranks: Vec<usize> = tolerances
        .iter()
        .map(|&t| generated_algebra_dimension(&images, t))
        .collect();
    if ranks.iter().any(|&r| r != ranks[0]) {
        return Err(Error::RankInstability { ranks, tolerances });
    }
    Ok(ranks[0])
}
