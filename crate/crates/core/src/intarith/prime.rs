//! Primality, sieving and factorization.
//!
//! Miller–Rabin is deterministic below 341 550 071 728 321 (bases 2..17)
//! and probabilistic with 40 rounds above, using a ChaCha stream seeded
//! from the candidate itself so results are reproducible.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const DETERMINISTIC_LIMIT: u64 = 341_550_071_728_321;
const SMALL_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
const RANDOM_ROUNDS: usize = 40;
const TRIAL_LIMIT: u32 = 1_000_000;

/// All primes `<= limit`, by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::with_capacity(n / 10 + 16);
    let mut i = 2usize;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            if let Some(start) = i.checked_mul(i) {
                let mut j = start;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        i += 1;
    }
    out
}

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT as u64))
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn mr_round_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    if n < DETERMINISTIC_LIMIT {
        return SMALL_BASES.iter().all(|&a| mr_round_u64(n, d, s, a));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(n);
    SMALL_BASES.iter().all(|&a| mr_round_u64(n, d, s, a))
        && (0..RANDOM_ROUNDS).all(|_| {
            let a = 2 + rand::Rng::gen_range(&mut rng, 0..n - 3);
            mr_round_u64(n, d, s, a)
        })
}

fn mr_round_big(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let mut x = a.modpow(d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Primality of `|n|`.
pub fn is_prime(n: &BigInt) -> bool {
    let m = n.magnitude();
    if let Some(v) = m.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &SMALL_BASES {
        if (m % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = m - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let seed = (m % u64::MAX).to_u64().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    SMALL_BASES.iter().all(|&a| mr_round_big(m, &d, s, &BigUint::from(a)))
        && (0..RANDOM_ROUNDS).all(|_| {
            let a = rng.gen_biguint_range(&two, &nm1);
            mr_round_big(m, &d, s, &a)
        })
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn rho_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        let mut q = one.clone();
        let mut steps = 0u64;
        let mut saved = (x.clone(), y.clone());
        while g == one {
            if steps.is_multiple_of(64) {
                saved = (x.clone(), y.clone());
            }
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            q = (q * diff) % n;
            steps += 1;
            if steps.is_multiple_of(64) {
                g = q.gcd(n);
            }
        }
        if &g == n {
            // back up and step one at a time
            let (mut x, mut y) = saved;
            loop {
                x = f(&x);
                y = f(&f(&y));
                let diff = if x > y { &x - &y } else { &y - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn push_factor(out: &mut Vec<(BigInt, u32)>, p: BigInt, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

fn split_big(n: BigUint, out: &mut Vec<(BigInt, u32)>) {
    if n.is_one() {
        return;
    }
    let signed = BigInt::from_biguint(Sign::Plus, n.clone());
    if let Some(v) = n.to_u64() {
        if is_prime_u64(v) {
            push_factor(out, signed, 1);
        } else {
            let f = rho_u64(v);
            split_big(BigUint::from(f), out);
            split_big(BigUint::from(v / f), out);
        }
        return;
    }
    if is_prime(&signed) {
        push_factor(out, signed, 1);
        return;
    }
    let f = rho_big(&n);
    let cof = &n / &f;
    split_big(f, out);
    split_big(cof, out);
}

/// Complete factorization of `|n|` as `(prime, exponent)` pairs sorted by
/// prime. Trial division up to 10⁶, then Pollard rho on what is left.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::FactorZero);
    }
    let mut out = Vec::new();
    let mut rest = n.magnitude().clone();
    if let Some(mut v) = rest.to_u64() {
        for &p in trial_primes() {
            if p * p > v {
                break;
            }
            if v % p == 0 {
                let mut e = 0;
                while v % p == 0 {
                    v /= p;
                    e += 1;
                }
                out.push((BigInt::from(p), e));
            }
        }
        rest = BigUint::from(v);
    } else {
        for &p in trial_primes() {
            let p32 = p as u32;
            if (&rest % p32).is_zero() {
                let mut e = 0;
                while (&rest % p32).is_zero() {
                    rest /= p32;
                    e += 1;
                }
                out.push((BigInt::from(p), e));
            }
            if rest.is_one() {
                break;
            }
        }
    }
    if !rest.is_one() {
        split_big(rest, &mut out);
    }
    out.sort();
    Ok(out)
}
