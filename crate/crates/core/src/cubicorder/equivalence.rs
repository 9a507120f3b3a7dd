//! Ideal-class equivalence by exhaustive witness search.
//!
//! If `λJ = I` then `λ ∈ (I : J)` and `|N(λ)| = N(I)/N(J)`. Multiplying
//! `λ` by a power product of the units `θ` and `θ − 1` keeps it a witness
//! and moves its log-embedding into a fundamental parallelogram of the
//! unit lattice they span, so some witness (if any exists) has
//! `|σ_i(λ)| ≤ t^{1/3}·exp(½ Σ_j |log|σ_i(u_j)||)` at every place. That
//! region is enumerated in an LLL-reduced basis of `(I : J)`; each
//! candidate is confirmed exactly. Exhausting the region proves the two
//! classes differ.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::embedding::Embedding;
use super::lattice::{enumerate, lll, Vec3};
use super::{colon, is_invertible, multiplier_ring, Coords, OrderIdeal};
use crate::error::Result;

/// Starting coefficient bound for witness enumeration.
pub const DEFAULT_BOUND: u64 = 32;
/// Largest bound reached by [`is_equivalent_escalating`].
pub const DEFAULT_BOUND_CAP: u64 = 4096;

const SLACK: f64 = 1e-6;

/// Why two ideals were proven inequivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Separator {
    /// One ideal is invertible and the other is not.
    Invertibility,
    /// The multiplier rings `(I : I)` differ.
    MultiplierRing,
    /// No witness in the unit-reduced region.
    WitnessRegionExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassVerdict {
    /// `(num/den)·J = I`.
    Equivalent {
        num: Coords,
        den: BigInt,
    },
    NotEquivalent(Separator),
    /// The search was clipped at this coefficient bound.
    Inconclusive {
        bound: u64,
    },
}

impl ClassVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, ClassVerdict::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, ClassVerdict::NotEquivalent(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, ClassVerdict::Inconclusive { .. })
    }
}

/// An ideal together with its class invariants, computed once.
#[derive(Debug, Clone)]
pub struct ClassData {
    pub ideal: OrderIdeal,
    pub multiplier_ring: OrderIdeal,
    pub invertible: bool,
}

impl ClassData {
    pub fn new(ideal: OrderIdeal) -> Self {
        let multiplier_ring = multiplier_ring(&ideal);
        let invertible = is_invertible(&ideal);
        Self { ideal, multiplier_ring, invertible }
    }

    /// Compares classes: invariants first, then the witness search.
    pub fn compare(&self, other: &ClassData, bound: u64) -> Result<ClassVerdict> {
        if self.invertible != other.invertible {
            return Ok(ClassVerdict::NotEquivalent(Separator::Invertibility));
        }
        if self.multiplier_ring != other.multiplier_ring {
            return Ok(ClassVerdict::NotEquivalent(Separator::MultiplierRing));
        }
        search_witness(&self.ideal, &other.ideal, bound)
    }

    pub fn compare_escalating(&self, other: &ClassData, cap: u64) -> Result<ClassVerdict> {
        let mut bound = DEFAULT_BOUND.min(cap.max(1));
        loop {
            let v = self.compare(other, bound)?;
            if !v.is_inconclusive() || bound >= cap {
                return Ok(v);
            }
            bound = (bound * 2).min(cap);
        }
    }
}

/// Decides whether `I` and `J` lie in the same ideal class, with a
/// checkable witness `λ` (`λJ = I`) on success.
pub fn is_equivalent(i: &OrderIdeal, j: &OrderIdeal, bound: u64) -> Result<ClassVerdict> {
    i.check_same_order(j)?;
    ClassData::new(i.clone()).compare(&ClassData::new(j.clone()), bound)
}

/// [`is_equivalent`] with the bound doubling from [`DEFAULT_BOUND`] up to
/// `cap` while the answer is inconclusive.
pub fn is_equivalent_escalating(i: &OrderIdeal, j: &OrderIdeal, cap: u64) -> Result<ClassVerdict> {
    i.check_same_order(j)?;
    ClassData::new(i.clone()).compare_escalating(&ClassData::new(j.clone()), cap)
}

/// Equivalence with the unit ideal; the witness generates `I`.
pub fn is_principal(i: &OrderIdeal, bound: u64) -> Result<ClassVerdict> {
    is_equivalent(i, &i.order().unit_ideal(), bound)
}

fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Per-place spread `½ Σ_j |log|σ_i(u_j)||` over a reduced basis of the
/// log-lattice spanned by `θ` and `θ − 1`; `None` if the units are too
/// degenerate to cover the trace-zero space.
fn unit_spread(e: &Embedding) -> Option<Vec<f64>> {
    let theta = e.log_vector([0.0, 1.0, 0.0]);
    let theta_m1 = e.log_vector([-1.0, 1.0, 0.0]);
    let places = e.places();
    let mut basis: Vec<Vec<f64>> = match places {
        3 => {
            let (mut a, mut b) = (theta, theta_m1);
            // Gauss reduction of the planar log-lattice
            let n2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
            let d2 = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
            for _ in 0..64 {
                if n2(&a) > n2(&b) {
                    std::mem::swap(&mut a, &mut b);
                }
                let q = (d2(&a, &b) / n2(&a)).round();
                if q == 0.0 {
                    break;
                }
                for k in 0..3 {
                    b[k] -= q * a[k];
                }
            }
            let det = a[0] * b[1] - a[1] * b[0];
            if !(det.abs() > 1e-9) {
                return None;
            }
            vec![a, b]
        }
        _ => {
            let pick = if theta[0].abs() >= theta_m1[0].abs() { theta } else { theta_m1 };
            if !(pick[0].abs() > 1e-9) {
                return None;
            }
            vec![pick]
        }
    };
    if basis.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    let spread = (0..places).map(|i| 0.5 * basis.iter_mut().map(|v| v[i].abs()).sum::<f64>()).collect();
    Some(spread)
}

fn search_witness(i: &OrderIdeal, j: &OrderIdeal, bound: u64) -> Result<ClassVerdict> {
    let inconclusive = Ok(ClassVerdict::Inconclusive { bound });
    let order = i.order();
    let Some(emb) = Embedding::new(order.trace()) else {
        return inconclusive;
    };
    let Some(spread) = unit_spread(&emb) else {
        return inconclusive;
    };
    // target |N(λ)| = N(I)/N(J) = tn/td
    let (ni, di) = i.norm();
    let (nj, dj) = j.norm();
    let tn = &ni * &dj;
    let td = &di * &nj;
    let t = to_f64(&tn) / to_f64(&td);
    let cube = t.cbrt();
    let bounds: Vec<f64> = spread.iter().map(|s| cube * s.exp() * (1.0 + SLACK)).collect();

    let c = colon(i, j)?;
    let den_f = to_f64(c.den());
    let rows: Vec<Coords> = (0..3).map(|k| super::coords(c.basis().row(k))).collect();
    let weighted = |x: [f64; 3]| -> Vec3 {
        let y = emb.coordinates(x);
        match emb {
            Embedding::TotallyReal(_) => [y[0] / bounds[0], y[1] / bounds[1], y[2] / bounds[2]],
            Embedding::Mixed { .. } => [y[0] / bounds[0], y[1] / bounds[1], y[2] / bounds[1]],
        }
    };
    let mut vecs = [[0.0; 3]; 3];
    for (k, r) in rows.iter().enumerate() {
        vecs[k] = weighted([to_f64(&r[0]) / den_f, to_f64(&r[1]) / den_f, to_f64(&r[2]) / den_f]);
    }
    if vecs.iter().flatten().any(|v| !v.is_finite()) {
        return inconclusive;
    }
    let (u, w) = lll(&vecs);
    let reduced: Vec<Coords> = (0..3)
        .map(|a| {
            let mut out: Coords = Default::default();
            for b in 0..3 {
                if u[a][b] != 0 {
                    let f = BigInt::from(u[a][b]);
                    for k in 0..3 {
                        out[k] += &f * &rows[b][k];
                    }
                }
            }
            out
        })
        .collect();
    let radius_sq = emb.places() as f64 * (1.0 + SLACK);
    let den_cubed = c.den().pow(3);
    let bound_i = bound.min(i64::MAX as u64) as i64;
    let mut witness: Option<Coords> = None;
    let (found, complete) = enumerate(&w, radius_sq, bound_i, |x| {
        let mut num: Coords = Default::default();
        for a in 0..3 {
            if x[a] != 0 {
                let f = BigInt::from(x[a]);
                for k in 0..3 {
                    num[k] += &f * &reduced[a][k];
                }
            }
        }
        let abs = emb.abs_values([to_f64(&num[0]) / den_f, to_f64(&num[1]) / den_f, to_f64(&num[2]) / den_f]);
        if abs.iter().zip(&bounds).any(|(v, b)| *v > b * (1.0 + SLACK)) {
            return false;
        }
        // exact: |N(num)|·td = tn·den³
        let norm = order.norm(&num).abs();
        if norm * &td != &tn * &den_cubed {
            return false;
        }
        match j.scale_by(&num, c.den()) {
            Ok(img) if &img == i => {
                witness = Some(num);
                true
            }
            _ => false,
        }
    });
    if found {
        let num = witness.expect("witness recorded");
        return Ok(ClassVerdict::Equivalent { num, den: c.den().clone() });
    }
    if complete {
        Ok(ClassVerdict::NotEquivalent(Separator::WitnessRegionExhausted))
    } else {
        inconclusive
    }
}

/// Checks a claimed witness exactly.
pub fn verify_witness(i: &OrderIdeal, j: &OrderIdeal, num: &Coords, den: &BigInt) -> bool {
    if den.is_zero() || num.iter().all(Zero::is_zero) {
        return false;
    }
    matches!(j.scale_by(num, den), Ok(img) if &img == i)
}
