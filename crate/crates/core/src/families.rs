//! Non-group detection for `C(Z[θₙ])` and the infinite families
//! `(c, p, p²k + n₀)` of non-invertible triples.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cancel::{cancelled, CancelToken};
use crate::cstriple::{trace_poly, trace_poly_derivative, trace_poly_discriminant, CsTriple};
use crate::cubicorder::{ideal_from_triple, is_invertible, is_invertible_fast, CubicOrder};
use crate::error::{Error, Result};
use crate::intarith::poly::roots_mod_prime_unchecked;
use crate::intarith::{factorize, is_prime_u64, mod_floor, multiple_roots_mod_p, primes_up_to, ModPoly};

/// Coefficients of `c⁴ − 2c³ + c² + 2c − 1`, lowest degree first.
pub const ELIMINATION_QUARTIC: [i64; 5] = [-1, 2, 1, -2, 1];

/// Traces for which every class is known to be Gompf-equivalent to `(1,1,2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvedTraceSet(BTreeSet<i64>);

impl Default for SolvedTraceSet {
    /// `[−64, 69] ∪ {−73, −69, −67, −66, 71, 72, 74, 78}`.
    fn default() -> Self {
        let mut s: BTreeSet<i64> = (-64..=69).collect();
        s.extend([-73, -69, -67, -66, 71, 72, 74, 78]);
        Self(s)
    }
}

impl FromIterator<i64> for SolvedTraceSet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl SolvedTraceSet {
    pub fn contains(&self, n: &BigInt) -> bool {
        n.to_i64().is_some_and(|n| self.0.contains(&n))
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The solved trace `n′ ≡ r (mod m)` of least absolute value, if any.
    pub fn witness_mod(&self, r: &BigInt, m: &BigInt) -> Option<i64> {
        if let (Some(r), Some(m)) = (r.to_i128(), m.to_i128()) {
            let r = r.rem_euclid(m);
            return self.iter().filter(|&s| (s as i128).rem_euclid(m) == r).min_by_key(|s| (s.abs(), *s));
        }
        let r = mod_floor(r, m);
        self.iter().filter(|&s| mod_floor(&BigInt::from(s), m) == r).min_by_key(|s| (s.abs(), *s))
    }

    /// Members `s` with `5 − s` outside the set.
    pub fn asymmetric(&self) -> Vec<i64> {
        self.iter().filter(|s| !self.0.contains(&(5 - s))).collect()
    }
}

/// The elimination quartic modulo `p`.
pub fn elimination_quartic(p: u64) -> Result<ModPoly> {
    ModPoly::from_i64(p, &ELIMINATION_QUARTIC)
}

/// One solution `(c, p, n₀)` of the family congruences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySolution {
    pub c: u64,
    pub p: u64,
    /// Canonical residue mod `p²`.
    #[serde(with = "crate::serde_int")]
    pub n0: BigInt,
    pub solved_witness: Option<i64>,
    /// 1-based position in the sorted scan output.
    pub index: usize,
}

impl FamilySolution {
    /// The triple `(c, p, n₀ + p²k)`, if valid.
    pub fn triple(&self, k: i64) -> Result<CsTriple> {
        let p = BigInt::from(self.p);
        CsTriple::new(self.c, p.clone(), &self.n0 + &p * &p * k)
    }

    pub fn to_tsv(&self) -> String {
        let w = self.solved_witness.map_or_else(|| "-".to_string(), |w| w.to_string());
        format!("{}\t{}\t{}\t{}\t{}", self.c, self.p, self.n0, w, self.index)
    }

    /// Both congruences and `p² | f_{n₀}(c)`.
    pub fn satisfies_congruences(&self) -> bool {
        congruences_hold(&BigInt::from(self.c), &BigInt::from(self.p), &self.n0)
    }
}

impl fmt::Display for FamilySolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.c, self.p, self.n0)
    }
}

fn congruences_hold(c: &BigInt, p: &BigInt, n: &BigInt) -> bool {
    let p2 = p * p;
    let first: BigInt = (BigInt::from(2) * c - 1) * n - (BigInt::from(3) * c * c - 1);
    let second: BigInt = (c * c - c) * n - (c * c * c - c - 1);
    first.is_multiple_of(p) && second.is_multiple_of(&p2) && trace_poly(n, c).is_multiple_of(&p2)
}

fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

/// `n₀ mod p` from `(2c − 1)n ≡ 3c² − 1 (mod p)`.
fn first_residue(c: u64, p: u64) -> u64 {
    let p128 = p as u128;
    let c128 = c as u128;
    let a = ((2 * c128 + p128 - 1) % p128) as u64;
    let inv = inv_mod_u64(a, p).expect("2c − 1 is a unit at a quartic root");
    let b = (3 * (c128 * c128 % p128) + p128 - 1) % p128;
    (b * inv as u128 % p128) as u64
}

/// Lift `n₀ mod p` to the unique `n mod p²` with `(c² − c)n ≡ c³ − c − 1`.
fn lift(c: u64, p: u64, r: u64) -> Option<BigInt> {
    let (cb, pb, rb) = (BigInt::from(c), BigInt::from(p), BigInt::from(r));
    let n_big: BigInt = &cb * &cb * &cb - &cb - 1 - &rb * (&cb * &cb - &cb);
    assert!(n_big.is_multiple_of(&pb), "p divides c³ − c − 1 − n₀(c² − c) at a quartic root");
    let a = mod_floor(&(&cb * &cb - &cb), &pb).to_u64().expect("residue");
    let inv = inv_mod_u64(a, p).expect("c² − c is a unit at a quartic root");
    let rhs = mod_floor(&(n_big / &pb), &pb);
    let n1 = rhs * inv % &pb;
    let n = n1 * &pb + rb;
    let n = mod_floor(&n, &(&pb * &pb));
    congruences_hold(&cb, &pb, &n).then_some(n)
}

/// Every `(c, n₀ mod p²)` solving both congruences for the prime `p`.
pub fn solve_for_prime(p: u64) -> Result<Vec<(u64, BigInt)>> {
    if !is_prime_u64(p) {
        return Err(Error::CompositeModulus(p.into()));
    }
    Ok(solve_unchecked(p, |_| true))
}

fn solve_unchecked(p: u64, keep: impl Fn(u64) -> bool) -> Vec<(u64, BigInt)> {
    let q = elimination_quartic(p).expect("p ≥ 2");
    let mut out = Vec::new();
    for c in roots_mod_prime_unchecked(&q) {
        let r = first_residue(c, p);
        if !keep(r) {
            continue;
        }
        if let Some(n0) = lift(c, p, r) {
            out.push((c, n0));
        }
    }
    out
}

/// The early-exit filter: roots are visited in descending order and the
/// first one whose residue is unsolved ends the prime.
fn solve_early_exit(p: u64, keep: impl Fn(u64) -> bool) -> Vec<(u64, BigInt)> {
    let q = elimination_quartic(p).expect("p ≥ 2");
    let mut out = Vec::new();
    for c in roots_mod_prime_unchecked(&q).into_iter().rev() {
        let r = first_residue(c, p);
        if !keep(r) {
            break;
        }
        if let Some(n0) = lift(c, p, r) {
            out.push((c, n0));
        }
    }
    out
}

/// Which solutions a family scan keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FamilyFilter {
    /// Every solution.
    All,
    /// Solutions with `n₀ ≡ n′ (mod p)` for a solved trace `n′`.
    #[default]
    Membership,
    /// As [`FamilyFilter::Membership`], but a prime is abandoned at the
    /// first unsolved root, taking roots from largest to smallest. This
    /// reproduces the published 146-entry list, which omits solutions the
    /// membership test keeps.
    EarlyExit,
}

#[derive(Debug, Clone)]
pub struct FamilyScanOptions {
    pub p_max: u64,
    pub filter: FamilyFilter,
    /// Worker threads; `1` scans on the calling thread.
    pub parallelism: usize,
    pub cancel: Option<CancelToken>,
}

impl FamilyScanOptions {
    pub fn new(p_max: u64) -> Self {
        Self { p_max, filter: FamilyFilter::Membership, parallelism: 1, cancel: None }
    }
}

/// Solutions for primes `p ≤ p_max` whose `n₀` is congruent mod `p` to a
/// solved trace, sorted by `(p, n₀)`.
pub fn scan_families(p_max: u64, solved: &SolvedTraceSet) -> Vec<FamilySolution> {
    scan_families_with(&FamilyScanOptions::new(p_max), solved)
}

pub fn scan_families_with(opts: &FamilyScanOptions, solved: &SolvedTraceSet) -> Vec<FamilySolution> {
    let primes = primes_up_to(opts.p_max);
    let cancel = opts.cancel.as_ref();
    let filter = opts.filter;
    let per_prime = |&p: &u64| -> Vec<FamilySolution> {
        if cancelled(cancel) {
            return Vec::new();
        }
        let pb = BigInt::from(p);
        let witness = |r: u64| solved.witness_mod(&BigInt::from(r), &pb);
        match filter {
            FamilyFilter::All => solve_unchecked(p, |_| true),
            FamilyFilter::Membership => solve_unchecked(p, |r| witness(r).is_some()),
            FamilyFilter::EarlyExit => solve_early_exit(p, |r| witness(r).is_some()),
        }
        .into_iter()
        .map(|(c, n0)| FamilySolution { c, p, solved_witness: solved.witness_mod(&n0, &pb), n0, index: 0 })
        .collect()
    };
    let mut out: Vec<FamilySolution> = if opts.parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.parallelism).build().expect("thread pool");
        pool.install(|| primes.par_iter().flat_map_iter(per_prime).collect())
    } else {
        primes.iter().flat_map(per_prime).collect()
    };
    out.sort_by(|a, b| (a.p, &a.n0).cmp(&(b.p, &b.n0)));
    for (i, s) in out.iter_mut().enumerate() {
        s.index = i + 1;
    }
    out
}

/// A prime `p` and residue `c` with `c` a multiple root of `f_n` mod `p`
/// and `p² | f_n(c)`; such a pair exists iff `C(Z[θₙ])` is not a group.
pub fn not_group_witness(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let disc = trace_poly_discriminant(n);
    let factors = factorize(&disc).expect("disc(f_n) is never zero");
    let coeffs = [-BigInt::one(), n - 1, -n.clone(), BigInt::one()];
    for (p, _) in factors {
        let p2 = &p * &p;
        let cs: Vec<BigInt> = match p.to_u64().filter(|&q| q < crate::intarith::poly::MAX_MODULUS) {
            Some(_) => {
                let f = ModPoly::from_bigint(&p, &coeffs).expect("modulus fits");
                multiple_roots_mod_p(&f).expect("prime modulus").into_iter().map(BigInt::from).collect()
            }
            None => large_prime_multiple_roots(n, &p),
        };
        for c in cs {
            if trace_poly(n, &c).is_multiple_of(&p2) {
                return Some((c, p));
            }
        }
    }
    None
}

/// Multiple roots of `f_n` modulo a prime `p ≥ 2⁶³`.
///
/// For `p > 3` a double root `c` satisfies `f_n(c) ≡ f_n′(c) ≡ 0`; reducing
/// `f_n` by `f_n′` leaves a linear remainder whose root is `c`.
fn large_prime_multiple_roots(n: &BigInt, p: &BigInt) -> Vec<BigInt> {
    use crate::intarith::mod_inverse;
    // 9·f = (3x − n)·f′ + r1·x + r0 with
    // r1 = 6(n − 1) − 2n², r0 = n(n − 1) − 9.
    let r1 = mod_floor(&(BigInt::from(6) * (n - 1) - BigInt::from(2) * n * n), p);
    let r0 = mod_floor(&(n * (n - 1) - 9), p);
    let c = if r1.is_zero() {
        // Both remainders vanish only at a triple root n/3.
        mod_floor(&(n * mod_inverse(&BigInt::from(3), p).expect("p > 3")), p)
    } else {
        mod_floor(&(-r0 * mod_inverse(&r1, p).expect("p prime")), p)
    };
    let f = mod_floor(&trace_poly(n, &c), p);
    let df = mod_floor(&trace_poly_derivative(n, &c), p);
    if f.is_zero() && df.is_zero() {
        vec![c]
    } else {
        Vec::new()
    }
}

/// `C(Z[θₙ])` is not a group.
pub fn is_not_group(n: &BigInt) -> bool {
    not_group_witness(n).is_some()
}

/// Traces in `[n_min, n_max]` for which `C(Z[θₙ])` is not a group, ascending.
pub fn scan_not_group(n_min: i64, n_max: i64) -> Vec<i64> {
    scan_not_group_with(n_min, n_max, 1, None)
}

pub fn scan_not_group_with(n_min: i64, n_max: i64, parallelism: usize, cancel: Option<&CancelToken>) -> Vec<i64> {
    if n_min > n_max {
        return Vec::new();
    }
    let test = |n: i64| !cancelled(cancel) && is_not_group(&BigInt::from(n));
    if parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(parallelism).build().expect("thread pool");
        let mut v: Vec<i64> = pool.install(|| (n_min..=n_max).into_par_iter().filter(|&n| test(n)).collect());
        v.sort_unstable();
        v
    } else {
        (n_min..=n_max).filter(|&n| test(n)).collect()
    }
}

/// Why a family failed certification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyFailure {
    pub k: i64,
    pub reason: String,
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k = {}: {}", self.k, self.reason)
    }
}

/// Checks for every `k` that `(c, p, n₀ + p²k)` is valid, its ideal is not
/// invertible (both tests agree) and the unit ideal is invertible, so the
/// matrix is not similar to any `Aₙ`.
pub fn certify_family(sol: &FamilySolution, ks: RangeInclusive<i64>) -> std::result::Result<(), CertifyFailure> {
    for k in ks {
        let fail = |reason: &str| CertifyFailure { k, reason: reason.to_string() };
        let t = sol.triple(k).map_err(|_| fail("triple is not valid"))?;
        let ideal = ideal_from_triple(&t);
        if is_invertible(&ideal) {
            return Err(fail("ideal is invertible"));
        }
        if is_invertible_fast(&t) {
            return Err(fail("local invertibility test disagrees"));
        }
        if !is_invertible(&CubicOrder::new(t.n().clone()).unit_ideal()) {
            return Err(fail("unit ideal is not invertible"));
        }
    }
    Ok(())
}

/// Parses `c p n0` rows (tab or space separated, `#` comments).
pub fn parse_family_fixture(text: &str) -> Result<Vec<(u64, u64, BigInt)>> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 3 {
            return Err(Error::Parse(format!("expected c p n0: {line:?}")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let n0 = f[2].parse::<BigInt>().map_err(|e| Error::Parse(format!("{:?}: {e}", f[2])))?;
        out.push((num(f[0])?, num(f[1])?, n0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn quartic_is_the_elimination_resultant() {
        // −[(c³−c−1)(2c−1) − (3c²−1)(c²−c)] expanded by hand.
        for c in -20i64..=20 {
            let lhs = c.pow(4) - 2 * c.pow(3) + c * c + 2 * c - 1;
            let rhs = -((c.pow(3) - c - 1) * (2 * c - 1) - (3 * c * c - 1) * (c * c - c));
            assert_eq!(lhs, rhs);
        }
        let q = elimination_quartic(7).unwrap();
        assert_eq!(q.eval(2), 0);
        assert_eq!(elimination_quartic(101).unwrap().eval(0), 100);
        assert_eq!(elimination_quartic(101).unwrap().eval(1), 1);
    }

    #[test]
    fn small_primes() {
        assert_eq!(solve_for_prime(7).unwrap(), vec![(2, b(27))]);
        let mut s17 = solve_for_prime(17).unwrap();
        s17.sort();
        assert_eq!(s17, vec![(11, b(167)), (13, b(127))]);
        assert!(solve_for_prime(2).unwrap().is_empty());
        assert!(solve_for_prime(3).unwrap().is_empty());
        assert!(solve_for_prime(15).is_err());
    }

    #[test]
    fn scan_small() {
        let s = SolvedTraceSet::default();
        let v = scan_families(7, &s);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].c, v[0].p, v[0].n0.clone()), (2, 7, b(27)));
        assert_eq!(v[0].index, 1);
        assert!(scan_families(3, &s).is_empty());
        let v47 = scan_families(47, &s);
        assert_eq!(v47.len(), 13);
        let opts = FamilyScanOptions { parallelism: 2, ..FamilyScanOptions::new(47) };
        assert_eq!(scan_families_with(&opts, &s), v47);
        let all = FamilyScanOptions { filter: FamilyFilter::All, ..FamilyScanOptions::new(47) };
        assert_eq!(scan_families_with(&all, &s).len(), 13);
    }

    #[test]
    fn early_exit_drops_later_roots() {
        let s = SolvedTraceSet::default();
        let member = scan_families(359, &s);
        let early = scan_families_with(
            &FamilyScanOptions { filter: FamilyFilter::EarlyExit, ..FamilyScanOptions::new(359) },
            &s,
        );
        assert!(early.iter().all(|e| member.iter().any(|m| (m.c, m.p, &m.n0) == (e.c, e.p, &e.n0))));
        assert!(member.iter().any(|m| m.p == 359) && !early.iter().any(|e| e.p == 359));
    }

    #[test]
    fn solved_set() {
        let s = SolvedTraceSet::default();
        assert_eq!(s.len(), 134 + 8);
        assert!(s.contains(&b(78)) && !s.contains(&b(70)) && !s.contains(&b(-65)));
        assert_eq!(s.witness_mod(&b(27), &b(7)), Some(-1));
        assert_eq!(s.witness_mod(&b(78), &b(151)), Some(-73));
        assert_eq!(s.witness_mod(&b(77), &b(151)), None);
        assert_eq!(s.witness_mod(&b(100), &b(1000)), None);
    }

    #[test]
    fn not_group_small() {
        let v = scan_not_group(0, 200);
        assert_eq!(v, vec![27, 76, 94, 125, 127, 159, 167, 174]);
        assert!(scan_not_group(28, 75).is_empty());
        for k in 0..=5 {
            assert!(is_not_group(&b(27 + 49 * k)));
        }
        assert_eq!(not_group_witness(&b(27)), Some((b(2), b(7))));
    }

    #[test]
    fn large_prime_double_root() {
        // f_27 has the double root 2 mod 7; the reduction formula must find it.
        assert_eq!(large_prime_multiple_roots(&b(27), &b(7)), vec![b(2)]);
    }

    #[test]
    fn certify() {
        let sol = FamilySolution { c: 2, p: 7, n0: b(27), solved_witness: Some(-1), index: 1 };
        assert!(certify_family(&sol, -2..=2).is_ok());
        let sol = FamilySolution { c: 13, p: 17, n0: b(127), solved_witness: None, index: 2 };
        assert!(certify_family(&sol, -1..=1).is_ok());
        let bad = FamilySolution { c: 3, p: 7, n0: b(27), solved_witness: None, index: 0 };
        let e = certify_family(&bad, -2..=2).unwrap_err();
        assert_eq!(e.k, -2);
    }

    #[test]
    fn fixture_parses() {
        let rows = parse_family_fixture("# c p n0\n2\t7\t27\n13 17 127\n").unwrap();
        assert_eq!(rows, vec![(2, 7, b(27)), (13, 17, b(127))]);
        assert!(parse_family_fixture("1 2").is_err());
    }
}
