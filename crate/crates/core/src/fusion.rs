//! Exact fusion semirings of SO(3) type (`p_k ⊗ p_s = p_{|k-s|} + … + p_{k+s}`)
//! and SU(2) type (`q_k ⊗ q_s = q_{|k-s|} + q_{|k-s|+2} + … + q_{k+s}`).
//!
//! Multiplicities and dimensions are `u128` with checked arithmetic; products
//! never truncate silently.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    So3,
    Su2,
}

/// Finitely supported non-negative combination of irreducible labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionVector {
    ring: Ring,
    mult: BTreeMap<usize, u128>,
}

impl FusionVector {
    pub fn zero(ring: Ring) -> Self {
        Self {
            ring,
            mult: BTreeMap::new(),
        }
    }

    /// The irreducible with label `k`.
    pub fn basis(ring: Ring, k: usize) -> Self {
        Self::from_multiplicities(ring, [(k, 1)])
    }

    pub fn from_multiplicities(ring: Ring, entries: impl IntoIterator<Item = (usize, u128)>) -> Self {
        let mut v = Self::zero(ring);
        for (k, m) in entries {
            v.add_multiplicity(k, m);
        }
        v
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn multiplicity(&self, k: usize) -> u128 {
        self.mult.get(&k).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &BTreeMap<usize, u128> {
        &self.mult
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    /// Largest label in the support.
    pub fn top_label(&self) -> Option<usize> {
        self.mult.keys().next_back().copied()
    }

    fn add_multiplicity(&mut self, k: usize, m: u128) {
        if m == 0 {
            return;
        }
        *self.mult.entry(k).or_insert(0) += m;
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (&k, &m) in &other.mult {
            let slot = out.mult.entry(k).or_insert(0);
            *slot = slot.checked_add(m).ok_or(Error::Overflow("fusion sum"))?;
        }
        Ok(out)
    }

    /// `self - other`, failing if a multiplicity would become negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.ring != other.ring {
            return None;
        }
        let mut out = self.clone();
        for (&k, &m) in &other.mult {
            let cur = out.multiplicity(k).checked_sub(m)?;
            if cur == 0 {
                out.mult.remove(&k);
            } else {
                out.mult.insert(k, cur);
            }
        }
        Some(out)
    }

    /// `Σ_k mult_k · dims[k]`.
    pub fn dimension(&self, dims: &DimensionFunction) -> Result<u128> {
        self.mult.iter().try_fold(0u128, |acc, (&k, &m)| {
            let d = dims
                .get(k)
                .ok_or_else(|| Error::InvalidArgument(format!("no dimension for label {k}")))?;
            m.checked_mul(d)
                .and_then(|x| acc.checked_add(x))
                .ok_or(Error::Overflow("fusion dimension"))
        })
    }

    /// `p_k ↦ q_{2k}`.
    pub fn so3_to_su2_even(&self) -> Result<Self> {
        if self.ring != Ring::So3 {
            return Err(Error::RingMismatch("expected an SO(3)-type vector".into()));
        }
        Ok(Self {
            ring: Ring::Su2,
            mult: self.mult.iter().map(|(&k, &m)| (2 * k, m)).collect(),
        })
    }
}

impl fmt::Display for FusionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.ring {
            Ring::So3 => "p",
            Ring::Su2 => "q",
        };
        if self.mult.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .mult
            .iter()
            .map(|(k, m)| {
                if *m == 1 {
                    format!("{sym}_{k}")
                } else {
                    format!("{m}·{sym}_{k}")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn product(a: &FusionVector, b: &FusionVector, level: usize, ring: Ring) -> Result<FusionVector> {
    if a.ring != ring || b.ring != ring {
        return Err(Error::RingMismatch(format!(
            "{:?} product of {:?} and {:?} vectors",
            ring, a.ring, b.ring
        )));
    }
    let (Some(ta), Some(tb)) = (a.top_label(), b.top_label()) else {
        return Ok(FusionVector::zero(ring));
    };
    let required = ta + tb;
    if required > level {
        return Err(Error::TruncationOverflow { required, level });
    }
    let step = match ring {
        Ring::So3 => 1,
        Ring::Su2 => 2,
    };
    let mut out = FusionVector::zero(ring);
    for (&k, &x) in &a.mult {
        for (&s, &y) in &b.mult {
            let c = x.checked_mul(y).ok_or(Error::Overflow("fusion product"))?;
            for label in (k.abs_diff(s)..=k + s).step_by(step) {
                let slot = out.mult.entry(label).or_insert(0);
                *slot = slot.checked_add(c).ok_or(Error::Overflow("fusion product"))?;
            }
        }
    }
    Ok(out)
}

/// Bilinear extension of `p_k ⊗ p_s = p_{|k-s|} + p_{|k-s|+1} + … + p_{k+s}`.
pub fn so3_product(a: &FusionVector, b: &FusionVector, level: usize) -> Result<FusionVector> {
    product(a, b, level, Ring::So3)
}

/// Bilinear extension of the Clebsch-Gordan rule `q_k ⊗ q_s = q_{|k-s|} + q_{|k-s|+2} + … + q_{k+s}`.
pub fn su2_product(a: &FusionVector, b: &FusionVector, level: usize) -> Result<FusionVector> {
    product(a, b, level, Ring::Su2)
}

/// `(p_0 + p_1)^{⊗k}`: the fundamental object `u = 1 + p_1` raised to the `k`-th power.
pub fn fundamental_power(k: usize, level: usize) -> Result<FusionVector> {
    if level < k {
        return Err(Error::TruncationOverflow { required: k, level });
    }
    let u = FusionVector::from_multiplicities(Ring::So3, [(0, 1), (1, 1)]);
    (0..k).try_fold(FusionVector::basis(Ring::So3, 0), |acc, _| {
        so3_product(&acc, &u, level)
    })
}

/// Multiplicity of `p_0` in `(p_0 + p_1)^{⊗k}`.
pub fn trivial_multiplicity(k: usize) -> Result<u128> {
    Ok(fundamental_power(k, k)?.multiplicity(0))
}

pub const MIN_QUADRATURE_POINTS: usize = 1000;
pub const MAX_MOMENT: usize = 20;

/// `∫_0^π (1 + χ_1(θ))^k (1 - cos θ)/π dθ` with `χ_1(θ) = 1 + 2cos θ`, by the
/// trapezoid rule on `points` equispaced nodes. The integrand is an even
/// trigonometric polynomial of degree `k + 1`, for which the rule is exact up
/// to rounding once `points > k + 2`.
pub fn so3_moment_integral(k: usize, points: usize) -> Result<f64> {
    if k > MAX_MOMENT {
        return Err(Error::InvalidArgument(format!(
            "moment order {k} exceeds {MAX_MOMENT}"
        )));
    }
    if points < MIN_QUADRATURE_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_QUADRATURE_POINTS} quadrature points, got {points}"
        )));
    }
    let intervals = points - 1;
    let h = PI / intervals as f64;
    let f = |theta: f64| {
        let c = theta.cos();
        (2.0 + 2.0 * c).powi(k as i32) * (1.0 - c) / PI
    };
    let interior: f64 = (1..intervals).map(|i| f(i as f64 * h)).sum();
    Ok(h * (interior + 0.5 * (f(0.0) + f(PI))))
}

/// Dimensions `d_0 = 1`, `d_1 = n - 1`, `d_k = d_{k-1} d_1 - d_{k-2} - d_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionFunction {
    n: u128,
    dims: Vec<u128>,
}

impl DimensionFunction {
    pub fn n(&self) -> u128 {
        self.n
    }

    pub fn get(&self, k: usize) -> Option<u128> {
        self.dims.get(k).copied()
    }

    pub fn as_slice(&self) -> &[u128] {
        &self.dims
    }

    pub fn level(&self) -> usize {
        self.dims.len() - 1
    }
}

pub fn dimension_sequence(n: usize, level: usize) -> Result<DimensionFunction> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "dimension function needs n >= 4, got {n}"
        )));
    }
    let n = n as u128;
    let d1 = n - 1;
    let mut dims = vec![1u128, d1];
    while dims.len() <= level {
        let k = dims.len();
        let next = dims[k - 1]
            .checked_mul(d1)
            .and_then(|x| x.checked_sub(dims[k - 2]))
            .and_then(|x| x.checked_sub(dims[k - 1]))
            .ok_or(Error::Overflow("dimension recursion"))?;
        dims.push(next);
    }
    dims.truncate(level + 1);
    Ok(DimensionFunction { n, dims })
}

/// Smallest `k` where the dimension function departs from `2k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmenabilityWitness {
    pub k: usize,
    pub dimension: u128,
    pub classical: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmenabilityVerdict {
    pub amenable: bool,
    pub witness: Option<AmenabilityWitness>,
}

/// Dimension-preserving criterion: `d_k(n) = 2k + 1` for all `k <= level`.
pub fn amenability_check(n: usize, level: usize) -> Result<AmenabilityVerdict> {
    let dims = dimension_sequence(n, level)?;
    let witness = dims
        .as_slice()
        .iter()
        .enumerate()
        .find(|(k, &d)| d != 2 * *k as u128 + 1)
        .map(|(k, &d)| AmenabilityWitness {
            k,
            dimension: d,
            classical: 2 * k as u128 + 1,
        });
    Ok(AmenabilityVerdict {
        amenable: witness.is_none(),
        witness,
    })
}

/// Checks that `p_k ↦ q_{2k}` is a fusion-semiring embedding on labels up to
/// `level`, and that the trivial multiplicities of `(q_1 ⊗ q_1)^{⊗k}` agree
/// with those of `(p_0 + p_1)^{⊗k}`.
pub fn su2_even_embedding_check(level: usize) -> Result<bool> {
    if level < 2 {
        return Err(Error::InvalidArgument("level must be at least 2".into()));
    }
    for k in 0..=level {
        for s in 0..=level {
            let so3 = so3_product(
                &FusionVector::basis(Ring::So3, k),
                &FusionVector::basis(Ring::So3, s),
                2 * level,
            )?;
            let su2 = su2_product(
                &FusionVector::basis(Ring::Su2, 2 * k),
                &FusionVector::basis(Ring::Su2, 2 * s),
                4 * level,
            )?;
            if so3.so3_to_su2_even()? != su2 {
                return Ok(false);
            }
        }
    }
    let q1 = FusionVector::basis(Ring::Su2, 1);
    let v2 = su2_product(&q1, &q1, 2)?;
    let mut power = FusionVector::basis(Ring::Su2, 0);
    for k in 0..=level {
        if power.multiplicity(0) != trivial_multiplicity(k)? {
            return Ok(false);
        }
        power = su2_product(&power, &v2, 2 * (k + 1))?;
    }
    Ok(true)
}

/// One step of the inductive construction of the irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Irreducible {
    pub label: usize,
    pub dimension: u128,
}

/// Builds `p_0 = 1`, `p_1 = u - 1` and `p_k = p_{k-1} ⊗ p_1 - p_{k-2} - p_{k-1}`
/// inside the SO(3)-type ring, checking at every step that the subtraction
/// stays non-negative and leaves a single new irreducible. Dimensions follow
/// the same subtraction applied to the dimension function of `n`.
pub fn build_irreducibles(n: usize, level: usize) -> Result<Vec<Irreducible>> {
    let dims = dimension_sequence(n, level)?;
    let u = fundamental_power(1, level.max(1))?;
    let one = FusionVector::basis(Ring::So3, 0);
    let p1 = u.checked_sub(&one).ok_or(Error::NegativeMultiplicity { step: 1, label: 0 })?;
    let mut objects = vec![one, p1];
    let mut out = vec![
        Irreducible {
            label: 0,
            dimension: objects[0].dimension(&dims)?,
        },
        Irreducible {
            label: 1,
            dimension: (n - 1) as u128,
        },
    ];
    for k in 2..=level {
        let prod = so3_product(&objects[k - 1], &objects[1], level)?;
        let mut rest = prod.clone();
        for sub in [&objects[k - 2], &objects[k - 1]] {
            rest = rest.checked_sub(sub).ok_or_else(|| {
                let label = sub
                    .multiplicities()
                    .keys()
                    .find(|&&l| prod.multiplicity(l) < sub.multiplicity(l))
                    .copied()
                    .unwrap_or(0);
                Error::NegativeMultiplicity { step: k, label }
            })?;
        }
        if rest != FusionVector::basis(Ring::So3, k) {
            return Err(Error::InvalidArgument(format!(
                "step {k} left {rest}, not a single new irreducible"
            )));
        }
        let dim_prod = out[k - 1]
            .dimension
            .checked_mul(out[1].dimension)
            .ok_or(Error::Overflow("irreducible dimension"))?;
        let dimension = dim_prod
            .checked_sub(out[k - 2].dimension + out[k - 1].dimension)
            .ok_or(Error::NegativeMultiplicity { step: k, label: k })?;
        out.push(Irreducible { label: k, dimension });
        objects.push(rest);
    }
    out.truncate(level + 1);
    Ok(out)
}
