//! Dense univariate polynomials over `Z/mZ` with word-sized moduli.
//!
//! Root finding is `gcd(x^p − x, f)` followed by Cantor–Zassenhaus
//! splitting of the product of linear factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::prime::{is_prime_u64, mul_mod};
use crate::error::{Error, Result};

/// Largest modulus accepted; products are formed in `u128`.
pub const MAX_MODULUS: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    modulus: u64,
    /// Low degree first, no trailing zeros.
    coeffs: Vec<u64>,
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

impl ModPoly {
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&modulus) {
            return Err(Error::ModulusOutOfRange(modulus.into()));
        }
        let coeffs = coeffs.into_iter().map(|c| c % modulus).collect();
        Ok(Self::trimmed(modulus, coeffs))
    }

    pub fn from_i64(modulus: u64, coeffs: &[i64]) -> Result<Self> {
        let m = modulus as i128;
        Self::new(modulus, coeffs.iter().map(|&c| (c as i128).rem_euclid(m) as u64).collect())
    }

    pub fn from_bigint(modulus: &BigInt, coeffs: &[BigInt]) -> Result<Self> {
        let m = modulus
            .to_u64()
            .filter(|m| (2..=MAX_MODULUS).contains(m))
            .ok_or_else(|| Error::ModulusOutOfRange(modulus.clone()))?;
        let mb = BigInt::from(m);
        Self::new(m, coeffs.iter().map(|c| c.mod_floor(&mb).to_u64().expect("residue fits")).collect())
    }

    fn trimmed(modulus: u64, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { modulus, coeffs }
    }

    fn raw(&self, coeffs: Vec<u64>) -> Self {
        Self::trimmed(self.modulus, coeffs)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        let x = x % m;
        self.coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, m) + c) % m)
    }

    pub fn derivative(&self) -> Self {
        let m = self.modulus;
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % m, m)).collect();
        self.raw(coeffs)
    }

    fn sub(&self, other: &Self) -> Self {
        let m = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + m - b) % m
            })
            .collect();
        self.raw(coeffs)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return self.raw(Vec::new());
        }
        let m = self.modulus;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, m)) % m;
            }
        }
        self.raw(out)
    }

    /// Remainder of division by `d`, whose leading coefficient must be a unit.
    fn rem(&self, d: &Self) -> Self {
        let m = self.modulus;
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = inv_mod(d.coeffs[dd], m).expect("leading coefficient must be a unit");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let q = mul_mod(r[top], lc_inv, m);
            if q != 0 {
                for (k, &dc) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + k;
                    r[idx] = (r[idx] + m - mul_mod(q, dc, m)) % m;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        self.raw(r)
    }

    fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.modulus).expect("leading coefficient must be a unit");
                let coeffs = self.coeffs.iter().map(|&c| mul_mod(c, inv, self.modulus)).collect();
                self.raw(coeffs)
            }
        }
    }

    /// Monic gcd; valid for prime moduli.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `base^exp mod self`.
    fn pow_mod(&self, base: &Self, mut exp: u64) -> Self {
        let mut acc = self.raw(vec![1]).rem(self);
        let mut b = base.rem(self);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&b).rem(self);
            }
            b = b.mul(&b).rem(self);
            exp >>= 1;
        }
        acc
    }
}

/// Splits a monic squarefree product of distinct linear factors.
fn split_linear(g: &ModPoly, out: &mut Vec<u64>) {
    let p = g.modulus;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            // x + a  ->  root −a
            out.push((p - g.coeffs[0]) % p);
        }
        Some(_) => {
            if p == 2 {
                // only x(x+1) can occur
                for r in 0..2 {
                    if g.eval(r) == 0 {
                        out.push(r);
                    }
                }
                return;
            }
            let one = g.raw(vec![1]);
            for shift in 0..p {
                let probe = g.raw(vec![shift, 1]);
                let h = g.pow_mod(&probe, (p - 1) / 2).sub(&one).gcd(g);
                let dh = h.degree().unwrap_or(0);
                if dh > 0 && Some(dh) != g.degree() {
                    let (q, _) = div_exact(g, &h);
                    split_linear(&h, out);
                    split_linear(&q, out);
                    return;
                }
            }
            unreachable!("a squarefree split product always separates for some shift");
        }
    }
}

/// Exact division `a / b` for monic `b`; returns (quotient, remainder).
fn div_exact(a: &ModPoly, b: &ModPoly) -> (ModPoly, ModPoly) {
    let m = a.modulus;
    let db = b.degree().expect("nonzero divisor");
    let mut r = a.coeffs.clone();
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let top = r.len() - 1;
        let c = r[top];
        q[top - db] = c;
        for (k, &bc) in b.coeffs.iter().enumerate() {
            let idx = top - db + k;
            r[idx] = (r[idx] + m - mul_mod(c, bc, m)) % m;
        }
        r.pop();
    }
    (a.raw(q), a.raw(r))
}

/// Roots without the primality check; caller guarantees `f.modulus()` is prime.
pub(crate) fn roots_mod_prime_unchecked(f: &ModPoly) -> Vec<u64> {
    let p = f.modulus;
    let f = f.monic();
    let Some(deg) = f.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    if p <= 2 * deg as u64 + 3 {
        return (0..p).filter(|&r| f.eval(r) == 0).collect();
    }
    let x = f.raw(vec![0, 1]);
    let xp = f.pow_mod(&x, p);
    let g = xp.sub(&x).gcd(&f);
    let mut out = Vec::with_capacity(g.degree().unwrap_or(0));
    split_linear(&g, &mut out);
    out.sort_unstable();
    out
}

/// All residues `r ∈ [0, p)` with `f(r) ≡ 0 (mod p)`, sorted.
pub fn poly_roots_mod_p(f: &ModPoly) -> Result<Vec<u64>> {
    if !is_prime_u64(f.modulus) {
        return Err(Error::CompositeModulus(f.modulus.into()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial(f.modulus.into()));
    }
    Ok(roots_mod_prime_unchecked(f))
}

/// Roots of `gcd(f, f′)` modulo the prime `f.modulus()`.
pub fn multiple_roots_mod_p(f: &ModPoly) -> Result<Vec<u64>> {
    if !is_prime_u64(f.modulus) {
        return Err(Error::CompositeModulus(f.modulus.into()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial(f.modulus.into()));
    }
    let g = f.gcd(&f.derivative());
    Ok(roots_mod_prime_unchecked(&g))
}
