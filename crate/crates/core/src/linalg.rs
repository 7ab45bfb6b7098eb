//! Dense complex helpers shared by the tensor, Hom-space and span-growth code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn split(m: &DMatrix<Complex64>) -> (DMatrix<f64>, Option<DMatrix<f64>>) {
    let re = m.map(|z| z.re);
    let im = if m.iter().any(|z| z.im != 0.0) {
        Some(m.map(|z| z.im))
    } else {
        None
    };
    (re, im)
}

fn join(re: DMatrix<f64>, im: Option<DMatrix<f64>>) -> DMatrix<Complex64> {
    match im {
        Some(im) => re.zip_map(&im, Complex64::new),
        None => re.map(|x| Complex64::new(x, 0.0)),
    }
}

/// Complex matrix product computed as real products of the real and imaginary
/// parts, so that the real GEMM kernel does the work.
pub fn matmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = match (&ai, &bi) {
        (Some(ai), Some(bi)) => &ar * &br - ai * bi,
        _ => &ar * &br,
    };
    let im = match (&ai, &bi) {
        (Some(ai), Some(bi)) => Some(&ar * bi + ai * &br),
        (Some(ai), None) => Some(ai * &br),
        (None, Some(bi)) => Some(&ar * bi),
        (None, None) => None,
    };
    join(re, im)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff dimension mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `Σ conj(u_i) v_i`.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Number of singular values strictly above `tol_rel` times the largest one.
pub fn rank_from_singular_values(sv: &[f64], tol_rel: f64) -> usize {
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol_rel * top).count(),
        _ => 0,
    }
}

/// Incrementally built orthonormal set, used to measure the dimension of a span.
///
/// A candidate is accepted when the norm of its component orthogonal to the
/// current span exceeds `tol_rel` times its own norm (two passes of classical
/// Gram-Schmidt).
#[derive(Debug, Clone)]
pub struct SpanBuilder {
    tol_rel: f64,
    basis: Vec<DVector<Complex64>>,
}

impl SpanBuilder {
    pub fn new(tol_rel: f64) -> Self {
        Self {
            tol_rel,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DVector<Complex64>] {
        &self.basis
    }

    /// Returns the orthonormalized residual if the vector enlarged the span.
    pub fn insert(&mut self, v: &DVector<Complex64>) -> Option<&DVector<Complex64>> {
        let scale = v.norm();
        if scale == 0.0 {
            return None;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dotc(&r);
                r.axpy(-c, b, Complex64::new(1.0, 0.0));
            }
        }
        let res = r.norm();
        if res > self.tol_rel * scale {
            r.unscale_mut(res);
            self.basis.push(r);
            self.basis.last()
        } else {
            None
        }
    }
}
