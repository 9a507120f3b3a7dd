use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Least nonnegative residue of `a` modulo `|m|`.
pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(&m.abs())
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let m = m.abs();
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(&m).extended_gcd(&m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(&m))
    } else {
        None
    }
}

/// Solves `a·x ≡ b (mod m)`.
///
/// Returns `(x, m / gcd(a, m))` with `x` reduced into `[0, m / gcd)`, or
/// `None` when `gcd(a, m)` does not divide `b`.
pub fn solve_linear_congruence(a: &BigInt, b: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    assert!(m.is_positive(), "modulus must be positive");
    let a = a.mod_floor(m);
    let b = b.mod_floor(m);
    let g = a.gcd(m);
    if !(&b % &g).is_zero() {
        return None;
    }
    let m2 = m / &g;
    let a2 = &a / &g;
    let b2 = &b / &g;
    let inv = mod_inverse(&a2, &m2)?;
    Some(((b2 * inv).mod_floor(&m2), m2))
}
