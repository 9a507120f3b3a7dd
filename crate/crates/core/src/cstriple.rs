//! CS triples `(c, d, n)`, the standard matrices they name, and the
//! elementary moves between them.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::IntMatrix;

/// `f_n(x) = x³ − n x² + (n−1) x − 1`.
pub fn trace_poly(n: &BigInt, x: &BigInt) -> BigInt {
    ((x - n) * x + (n - 1)) * x - 1
}

/// `f_n′(x) = 3x² − 2n x + (n−1)`.
pub fn trace_poly_derivative(n: &BigInt, x: &BigInt) -> BigInt {
    (BigInt::from(3) * x - BigInt::from(2) * n) * x + (n - 1)
}

/// `p_n(c) = c² + (1−n) c + 1`, the first-row map of the trace duality.
pub fn dual_poly(n: &BigInt, c: &BigInt) -> BigInt {
    (c + 1 - n) * c + 1
}

/// Discriminant of `f_n`: `n⁴ − 10n³ + 31n² − 30n − 23`.
pub fn trace_poly_discriminant(n: &BigInt) -> BigInt {
    let n2 = n * n;
    &n2 * &n2 - BigInt::from(10) * &n2 * n + BigInt::from(31) * &n2 - BigInt::from(30) * n - 23
}

pub fn is_valid_triple(c: &BigInt, d: &BigInt, n: &BigInt) -> bool {
    !d.is_zero() && (trace_poly(n, c) % d).is_zero()
}

/// A validated `(c, d, n)` with `d ≠ 0` and `d | f_n(c)`.
///
/// Fields are stored as given; equality, ordering and hashing go through
/// [`CsTriple::canonical`], which makes `d > 0` and `1 ≤ c ≤ d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct CsTriple {
    c: BigInt,
    d: BigInt,
    n: BigInt,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    #[serde(with = "crate::serde_int")]
    c: BigInt,
    #[serde(with = "crate::serde_int")]
    d: BigInt,
    #[serde(with = "crate::serde_int")]
    n: BigInt,
}

impl TryFrom<RawTriple> for CsTriple {
    type Error = Error;
    fn try_from(r: RawTriple) -> Result<Self> {
        CsTriple::new(r.c, r.d, r.n)
    }
}

impl From<CsTriple> for RawTriple {
    fn from(t: CsTriple) -> Self {
        RawTriple { c: t.c, d: t.d, n: t.n }
    }
}

impl CsTriple {
    pub fn new(c: impl Into<BigInt>, d: impl Into<BigInt>, n: impl Into<BigInt>) -> Result<Self> {
        let (c, d, n) = (c.into(), d.into(), n.into());
        if is_valid_triple(&c, &d, &n) {
            Ok(Self { c, d, n })
        } else {
            Err(Error::InvalidTriple { c, d, n })
        }
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    /// `d > 0` and `c` reduced into `[1, d]`.
    pub fn canonical(&self) -> CsTriple {
        let d = self.d.abs();
        let mut c = self.c.mod_floor(&d);
        if c.is_zero() {
            c = d.clone();
        }
        CsTriple { c, d, n: self.n.clone() }
    }

    pub fn is_canonical(&self) -> bool {
        self.d.is_positive() && self.c.is_positive() && self.c <= self.d
    }

    /// `A_{n−2} = X_{1,1,n}`, the unit class at trace `n`.
    pub fn base(n: impl Into<BigInt>) -> Self {
        Self { c: BigInt::one(), d: BigInt::one(), n: n.into() }
    }

    /// `f_n(c)`.
    pub fn trace_value(&self) -> BigInt {
        trace_poly(&self.n, &self.c)
    }

    fn key(&self) -> (BigInt, BigInt, BigInt) {
        let t = self.canonical();
        (t.n, t.d, t.c)
    }
}

impl PartialEq for CsTriple {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for CsTriple {}

impl Hash for CsTriple {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for CsTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trace first, then the minimal-representative order `(d, c)`.
impl Ord for CsTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for CsTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.c, self.d, self.n)
    }
}

impl FromStr for CsTriple {
    type Err = Error;

    /// Accepts `(c,d,n)`, `c,d,n` or whitespace-separated `c d n`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let parts: Vec<&str> =
            inner.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|p| !p.is_empty()).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three integers, got {s:?}")));
        }
        let parse = |p: &str| p.parse::<BigInt>().map_err(|e| Error::Parse(format!("{p:?}: {e}")));
        CsTriple::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}

/// `X_{c,d,n} = [[0,a,b],[0,c,d],[1,0,n−c]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardCsMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub n: BigInt,
}

impl StandardCsMatrix {
    pub fn matrix(&self) -> IntMatrix {
        let z = BigInt::zero;
        IntMatrix::from_rows(vec![
            vec![z(), self.a.clone(), self.b.clone()],
            vec![z(), self.c.clone(), self.d.clone()],
            vec![BigInt::one(), z(), &self.n - &self.c],
        ])
    }
}

/// Builds `X_{c,d,n}` with `a = −f_n(c)/d` and `b = (c−1)(n−c−1)`, checking
/// `det X = 1` and `det(X − I) = 1`.
pub fn make_standard_matrix(t: &CsTriple) -> Result<StandardCsMatrix> {
    let a = -t.trace_value() / &t.d;
    let b = (&t.c - 1) * (&t.n - &t.c - 1);
    let x = StandardCsMatrix { a, b, c: t.c.clone(), d: t.d.clone(), n: t.n.clone() };
    let m = x.matrix();
    let fail = |what: &str| Error::Postcondition { triple: t.clone(), what: what.to_string() };
    if !m.det().is_one() {
        return Err(fail("det X != 1"));
    }
    if !m.sub(&IntMatrix::identity(3)).det().is_one() {
        return Err(fail("det(X - I) != 1"));
    }
    Ok(x)
}

/// `Δ = [[1,−1,0],[0,1,0],[0,1,1]]`.
pub fn delta_matrix() -> IntMatrix {
    delta_power(&BigInt::one())
}

/// `Δ^k = I + k·N` with `N² = 0`, for any integer `k`.
pub fn delta_power(k: &BigInt) -> IntMatrix {
    let mut m = IntMatrix::identity(3);
    m[(0, 1)] = -k;
    m[(2, 1)] = k.clone();
    m
}

/// `(c, d, n + k·d)`.
pub fn gompf_shift(t: &CsTriple, k: &BigInt) -> CsTriple {
    CsTriple { c: t.c.clone(), d: t.d.clone(), n: &t.n + k * &t.d }
}

/// `(c + k·d, d, n)`; the ideal `⟨θ − c, d⟩` is unchanged.
pub fn c_shift(t: &CsTriple, k: &BigInt) -> CsTriple {
    CsTriple { c: &t.c + k * &t.d, d: t.d.clone(), n: t.n.clone() }
}

/// The trace duality `(c, d, n) ↦ (p_n(c), d, 5 − n)`, canonicalised.
pub fn dual(t: &CsTriple) -> Result<CsTriple> {
    let t = t.canonical();
    let c_star = dual_poly(&t.n, &t.c);
    let n_star = BigInt::from(5) - &t.n;
    let out = CsTriple::new(c_star, t.d.clone(), n_star)
        .map_err(|_| Error::Postcondition { triple: t.clone(), what: "dual triple is not a CS triple".into() })?;
    Ok(out.canonical())
}

/// `X_{c,d,n} · Δ^k`, checked to have characteristic polynomial `f_{n+kd}`.
pub fn delta_twist(t: &CsTriple, k: &BigInt) -> Result<IntMatrix> {
    let x = make_standard_matrix(t)?.matrix();
    let out = x.mul(&delta_power(k));
    let m = &t.n + k * &t.d;
    if out.charpoly3() != [m.clone(), &m - 1, BigInt::one()] {
        return Err(Error::Postcondition {
            triple: t.clone(),
            what: format!("X·Δ^{k} does not have characteristic polynomial f_{m}"),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn t(c: i64, d: i64, n: i64) -> CsTriple {
        CsTriple::new(c, d, n).unwrap()
    }

    #[test]
    fn validity() {
        for n in -20..20 {
            assert!(is_valid_triple(&bi(1), &bi(1), &bi(n)));
        }
        assert_eq!(trace_poly(&bi(27), &bi(2)), bi(-49));
        assert!(is_valid_triple(&bi(2), &bi(7), &bi(27)));
        assert!(!is_valid_triple(&bi(2), &bi(0), &bi(27)));
        assert!(CsTriple::new(3, 7, 27).is_err());
    }

    #[test]
    fn standard_matrices() {
        let x = make_standard_matrix(&t(1, 1, 2)).unwrap();
        assert_eq!(x.matrix(), IntMatrix::from_i64(&[&[0, 1, 0], &[0, 1, 1], &[1, 0, 1]]));
        for n in -5..5 {
            let x = make_standard_matrix(&CsTriple::base(n + 2)).unwrap();
            assert_eq!((x.a, x.b), (bi(1), bi(0)));
        }
        let x = make_standard_matrix(&t(2, 7, 27)).unwrap();
        assert_eq!((x.a.clone(), x.b.clone()), (bi(7), bi(24)));
        // cofactor expansion along the first column: det = a·d − b·c
        assert_eq!(&x.a * &x.d - &x.b * &x.c, bi(1));
    }

    #[test]
    fn shifts() {
        assert_eq!(gompf_shift(&t(2, 7, 27), &bi(7)).n(), &bi(76));
        let g = gompf_shift(&t(149, 177, 70), &bi(-1));
        assert_eq!((g.c(), g.d(), g.n()), (&bi(149), &bi(177), &bi(-107)));
        let s = c_shift(&t(2, 7, 27), &bi(1));
        assert_eq!(s.c(), &bi(9));
        let canon = s.canonical();
        assert_eq!((canon.c(), canon.d(), canon.n()), (&bi(2), &bi(7), &bi(27)));
        assert_eq!(gompf_shift(&t(2, 7, 27), &bi(0)).n(), &bi(27));
        assert_eq!(c_shift(&t(2, 7, 27), &bi(0)).c(), &bi(2));
    }

    #[test]
    fn negative_d_canonicalises() {
        let a = t(-5, -7, 27);
        assert!(!a.is_canonical());
        let c = a.canonical();
        assert_eq!((c.c(), c.d()), (&bi(2), &bi(7)));
        assert_eq!(a, t(2, 7, 27));
    }

    #[test]
    fn duals() {
        assert_eq!(dual(&t(1, 1, 2)).unwrap(), t(1, 1, 3));
        assert_eq!(dual_poly(&bi(27), &bi(2)), bi(-47));
        let d = dual(&t(2, 7, 27)).unwrap();
        assert_eq!((d.c(), d.d(), d.n()), (&bi(2), &bi(7), &bi(-22)));
        assert_eq!(trace_poly(&bi(-22), &bi(2)), bi(49));
        assert_eq!(dual(&d).unwrap(), t(2, 7, 27));
    }

    #[test]
    fn dual_involution_identity() {
        // p_{5−n}(p_n(c)) − c = (c + 2 − n)·f_n(c) as polynomials
        for n in -30..30 {
            for c in -30..30 {
                let (n, c) = (bi(n), bi(c));
                let lhs = dual_poly(&(bi(5) - &n), &dual_poly(&n, &c)) - &c;
                assert_eq!(lhs, (&c + 2 - &n) * trace_poly(&n, &c));
            }
        }
    }

    #[test]
    fn delta_twists() {
        assert_eq!(delta_matrix(), IntMatrix::from_i64(&[&[1, -1, 0], &[0, 1, 0], &[0, 1, 1]]));
        assert_eq!(delta_matrix().det(), bi(1));
        assert_eq!(delta_power(&bi(3)), delta_matrix().mul(&delta_matrix()).mul(&delta_matrix()));
        assert_eq!(delta_power(&bi(-1)).mul(&delta_matrix()), IntMatrix::identity(3));
        let x = make_standard_matrix(&t(2, 7, 27)).unwrap().matrix();
        assert_eq!(delta_twist(&t(2, 7, 27), &bi(0)).unwrap(), x);
        // X_{1,1,2}·Δ = [[0,1,0],[0,2,1],[1,0,1]]: trace 3, minors 2, det 1
        let m = delta_twist(&t(1, 1, 2), &bi(1)).unwrap();
        assert_eq!(m, IntMatrix::from_i64(&[&[0, 1, 0], &[0, 2, 1], &[1, 0, 1]]));
        assert_eq!(m.charpoly3(), [bi(3), bi(2), bi(1)]);
        assert_eq!(delta_twist(&t(2, 7, 27), &bi(-1)).unwrap().charpoly3(), [bi(20), bi(19), bi(1)]);
    }

    #[test]
    fn discriminant_matches_resultant_form() {
        // disc(f) = −Res(f, f′) for monic cubics; Res via the Sylvester
        // determinant of f_n and f_n′.
        for n in -40..40 {
            let nn = bi(n);
            let f = [bi(1), -nn.clone(), &nn - 1, bi(-1)];
            let g = [bi(3), bi(-2) * &nn, &nn - 1];
            let z = BigInt::zero;
            let syl = IntMatrix::from_rows(vec![
                vec![f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone(), z()],
                vec![z(), f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone()],
                vec![g[0].clone(), g[1].clone(), g[2].clone(), z(), z()],
                vec![z(), g[0].clone(), g[1].clone(), g[2].clone(), z()],
                vec![z(), z(), g[0].clone(), g[1].clone(), g[2].clone()],
            ]);
            assert_eq!(trace_poly_discriminant(&nn), -syl.det(), "n = {n}");
        }
    }

    #[test]
    fn text_and_json_forms() {
        let a: CsTriple = "(2,7,27)".parse().unwrap();
        assert_eq!(a.to_string(), "(2,7,27)");
        assert_eq!("2 7 27".parse::<CsTriple>().unwrap(), a);
        assert!("(3,7,27)".parse::<CsTriple>().is_err());
        assert!("(1,2)".parse::<CsTriple>().is_err());
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"c":2,"d":7,"n":27}"#);
        let back: CsTriple = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
        let big: CsTriple = serde_json::from_str(r#"{"c":27833855,"d":32455777,"n":"673075952458623"}"#).unwrap();
        assert_eq!(big.n(), &bi(673_075_952_458_623));
        assert!(serde_json::from_str::<CsTriple>(r#"{"c":3,"d":7,"n":27}"#).is_err());
    }
}
