//! The order `Z[θₙ]`, its fractional ideals as HNF lattices, and the
//! invertibility and equivalence oracles behind the LMT correspondence.
//!
//! Elements are coordinate vectors in the fixed basis `(1, θ, θ²)` with
//! `θ³ = nθ² − (n−1)θ + 1`. A fractional ideal is `(1/den)·L` where `L` is
//! an integer lattice stored in row-style Hermite normal form, so two
//! ideals are equal exactly when their `(den, basis)` pairs are.

mod embedding;
mod equivalence;
mod lattice;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cstriple::{trace_poly, trace_poly_derivative, CsTriple};
use crate::error::{Error, Result};
use crate::intarith::{factorize, hnf, IntMatrix};

pub use embedding::Embedding;
pub use equivalence::{
    is_equivalent, is_equivalent_escalating, is_principal, verify_witness, ClassData, ClassVerdict, Separator,
    DEFAULT_BOUND, DEFAULT_BOUND_CAP,
};

pub type Coords = [BigInt; 3];

/// `Z[θₙ]` for a fixed trace `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubicOrder {
    n: BigInt,
}

impl CubicOrder {
    pub fn new(n: impl Into<BigInt>) -> Self {
        Self { n: n.into() }
    }

    pub fn trace(&self) -> &BigInt {
        &self.n
    }

    pub fn one() -> Coords {
        [BigInt::one(), BigInt::zero(), BigInt::zero()]
    }

    pub fn theta() -> Coords {
        [BigInt::zero(), BigInt::one(), BigInt::zero()]
    }

    /// θ·v.
    pub fn mul_theta(&self, v: &Coords) -> Coords {
        let n = &self.n;
        [v[2].clone(), &v[0] - (n - 1) * &v[2], &v[1] + n * &v[2]]
    }

    pub fn mul(&self, a: &Coords, b: &Coords) -> Coords {
        let mut c: [BigInt; 5] = Default::default();
        for i in 0..3 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                c[i + j] += &a[i] * &b[j];
            }
        }
        let n = &self.n;
        let nm1 = n - 1;
        // θ⁴ = nθ³ − (n−1)θ² + θ, θ³ = nθ² − (n−1)θ + 1
        let c4 = std::mem::take(&mut c[4]);
        c[3] += n * &c4;
        c[2] -= &nm1 * &c4;
        c[1] += &c4;
        let c3 = std::mem::take(&mut c[3]);
        c[2] += n * &c3;
        c[1] -= &nm1 * &c3;
        c[0] += &c3;
        let [c0, c1, c2, _, _] = c;
        [c0, c1, c2]
    }

    /// Rows are `a·1, a·θ, a·θ²`, so `x·M` are the coordinates of `x·a`.
    pub fn mul_matrix(&self, a: &Coords) -> IntMatrix {
        let r1 = self.mul_theta(a);
        let r2 = self.mul_theta(&r1);
        IntMatrix::from_rows(vec![a.to_vec(), r1.to_vec(), r2.to_vec()])
    }

    /// Norm of an integral element: `det` of its multiplication matrix.
    pub fn norm(&self, a: &Coords) -> BigInt {
        self.mul_matrix(a).det()
    }

    pub fn unit_ideal(&self) -> OrderIdeal {
        OrderIdeal { n: self.n.clone(), den: BigInt::one(), basis: IntMatrix::identity(3) }
    }
}

fn coords(row: &[BigInt]) -> Coords {
    [row[0].clone(), row[1].clone(), row[2].clone()]
}

/// A fractional ideal `(1/den)·rowspan(basis)` of `Z[θₙ]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderIdeal {
    n: BigInt,
    den: BigInt,
    basis: IntMatrix,
}

impl OrderIdeal {
    /// Normalises generators (integer coordinates over `den`) into canonical
    /// form. The rows must already span an `R`-module.
    pub fn from_generators(n: &BigInt, den: BigInt, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::RankDeficient);
        }
        let mut basis = hnf(&IntMatrix::from_rows(rows))?;
        let mut den = den;
        if den.is_negative() {
            den = -den;
        }
        let g = basis.content().gcd(&den);
        if !g.is_one() {
            basis = IntMatrix::from_rows(
                basis.row_vecs().into_iter().map(|r| r.into_iter().map(|v| v / &g).collect()).collect(),
            );
            den /= &g;
        }
        Ok(Self { n: n.clone(), den, basis })
    }

    pub fn order(&self) -> CubicOrder {
        CubicOrder::new(self.n.clone())
    }

    pub fn trace(&self) -> &BigInt {
        &self.n
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// `[R : I]` as a reduced fraction `(num, den)`; for an integral ideal
    /// this is the index of the lattice.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let num = self.basis.det();
        let den = self.den.pow(3);
        let g = num.gcd(&den);
        (num / &g, den / g)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.den.is_one() && self.basis == IntMatrix::identity(3)
    }

    /// Every basis row times θ stays in the lattice.
    pub fn is_theta_closed(&self) -> bool {
        let order = self.order();
        (0..3).all(|i| self.contains_numerator(&order.mul_theta(&coords(self.basis.row(i)))))
    }

    /// Membership of `v/den` (i.e. of the numerator vector in the lattice).
    fn contains_numerator(&self, v: &Coords) -> bool {
        let mut r = v.clone();
        for j in 0..3 {
            let p = &self.basis[(j, j)];
            if !(&r[j] % p).is_zero() {
                return false;
            }
            let q = &r[j] / p;
            for k in j..3 {
                r[k] -= &q * &self.basis[(j, k)];
            }
        }
        r.iter().all(Zero::is_zero)
    }

    /// Whether the element `num/den` lies in this ideal.
    pub fn contains(&self, num: &Coords, den: &BigInt) -> bool {
        // num/den ∈ (1/D)L  <=>  num·D/den ∈ L
        let scaled: Vec<BigInt> = num.iter().map(|v| v * &self.den).collect();
        if scaled.iter().any(|v| !(v % den).is_zero()) {
            return false;
        }
        self.contains_numerator(&[&scaled[0] / den, &scaled[1] / den, &scaled[2] / den])
    }

    fn check_same_order(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n.clone(), other.n.clone()));
        }
        Ok(())
    }

    /// Principal ideal `(num/den)·J`.
    pub fn scale_by(&self, num: &Coords, den: &BigInt) -> Result<Self> {
        let order = self.order();
        let rows = (0..3).map(|i| order.mul(num, &coords(self.basis.row(i))).to_vec()).collect();
        Self::from_generators(&self.n, den * &self.den, rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(IdealJson::from(self)).expect("ideal serialises")
    }
}

impl fmt::Display for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.basis)
        } else {
            write!(f, "(1/{})·{}", self.den, self.basis)
        }
    }
}

/// Wire form `{"n", "den", "basis": [9 entries, row-major]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealJson {
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub den: BigInt,
    #[serde(with = "crate::serde_int::vec")]
    pub basis: Vec<BigInt>,
}

impl From<&OrderIdeal> for IdealJson {
    fn from(i: &OrderIdeal) -> Self {
        IdealJson { n: i.n.clone(), den: i.den.clone(), basis: i.basis.entries().to_vec() }
    }
}

impl TryFrom<IdealJson> for OrderIdeal {
    type Error = Error;
    fn try_from(j: IdealJson) -> Result<Self> {
        if j.basis.len() != 9 {
            return Err(Error::Parse("ideal basis must have 9 entries".into()));
        }
        let rows = j.basis.chunks(3).map(<[BigInt]>::to_vec).collect();
        let ideal = OrderIdeal::from_generators(&j.n, j.den, rows)?;
        if !ideal.is_theta_closed() {
            return Err(Error::Parse("lattice is not closed under multiplication by θ".into()));
        }
        Ok(ideal)
    }
}

/// `⟨θ − c, d⟩`: the HNF of `d·{1,θ,θ²}` and `(θ−c)·{1,θ,θ²}`.
pub fn ideal_from_triple(t: &CsTriple) -> OrderIdeal {
    let order = CubicOrder::new(t.n().clone());
    let d = t.d().abs();
    let z = BigInt::zero;
    let g0: Coords = [-t.c(), BigInt::one(), z()];
    let g1 = order.mul_theta(&g0);
    let g2 = order.mul_theta(&g1);
    let rows = vec![
        vec![d.clone(), z(), z()],
        vec![z(), d.clone(), z()],
        vec![z(), z(), d],
        g0.to_vec(),
        g1.to_vec(),
        g2.to_vec(),
    ];
    OrderIdeal::from_generators(t.n(), BigInt::one(), rows).expect("⟨θ−c, d⟩ has full rank")
}

/// `I·J`: HNF of the nine pairwise basis products.
pub fn mul(i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
    i.check_same_order(j)?;
    let order = i.order();
    let mut rows = Vec::with_capacity(9);
    for a in 0..3 {
        let x = coords(i.basis.row(a));
        for b in 0..3 {
            rows.push(order.mul(&x, &coords(j.basis.row(b))).to_vec());
        }
    }
    OrderIdeal::from_generators(&i.n, &i.den * &j.den, rows)
}

/// `(I : J) = {x ∈ K : xJ ⊆ I}`.
///
/// With `I = A/dI`, `J = B/dJ` this is `(dJ/dI)·(A : B)`, and `(A : B)` is
/// `D·S*` where `D = det A` and `S` is spanned by the columns of
/// `M_b·adj(A)` over the basis rows `b` of `B`.
pub fn colon(i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
    i.check_same_order(j)?;
    let order = i.order();
    let adj = i.basis.adjugate3();
    let det_a = i.basis.det();
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(9);
    for k in 0..3 {
        let t = order.mul_matrix(&coords(j.basis.row(k))).mul(&adj);
        cols.extend(t.transpose().row_vecs());
    }
    let h = hnf(&IntMatrix::from_rows(cols))?;
    let det_h = h.det();
    let num = h.adjugate3().transpose().scale(&(det_a * &j.den));
    OrderIdeal::from_generators(&i.n, &i.den * det_h, num.row_vecs())
}

/// Decisive test `I·(R : I) = R`.
pub fn is_invertible(i: &OrderIdeal) -> bool {
    let r = i.order().unit_ideal();
    let inv = colon(&r, i).expect("same order");
    mul(i, &inv).expect("same order").is_unit_ideal()
}

/// The multiplier ring `(I : I)`, an overorder of `R`.
pub fn multiplier_ring(i: &OrderIdeal) -> OrderIdeal {
    colon(i, i).expect("same order")
}

/// Invertibility of `⟨θ − c, d⟩` from the prime factorization of `d`.
///
/// Per prime power `p^e ∥ d`: invertible when `c` is a simple root of `f_n`
/// mod `p`, or `p² ∤ f_n(c)`, or `p^{e+1} ∤ f_n(c)`. When `e = 1` and the
/// first two fail the ideal is not invertible. Remaining prime powers are
/// settled by [`is_invertible`] on `⟨θ − c, p^e⟩`.
pub fn is_invertible_fast(t: &CsTriple) -> bool {
    let d = t.d().abs();
    if d.is_one() {
        return true;
    }
    let fc = trace_poly(t.n(), t.c());
    let dfc = trace_poly_derivative(t.n(), t.c());
    let factors = factorize(&d).expect("d is nonzero");
    factors.into_iter().all(|(p, e)| {
        if !(&dfc % &p).is_zero() {
            return true;
        }
        let p2 = &p * &p;
        if !(&fc % &p2).is_zero() {
            return true;
        }
        if e == 1 {
            return false;
        }
        if !(&fc % p.pow(e + 1)).is_zero() {
            return true;
        }
        let sub = CsTriple::new(t.c().clone(), p.pow(e), t.n().clone()).expect("p^e divides d");
        is_invertible(&ideal_from_triple(&sub))
    })
}
