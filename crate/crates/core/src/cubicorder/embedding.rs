//! Floating-point Minkowski embedding of `Q(θₙ)`.
//!
//! Only used to steer the witness search; every candidate it proposes is
//! re-checked in exact arithmetic.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cstriple::trace_poly_discriminant;

#[derive(Debug, Clone)]
pub enum Embedding {
    /// Three real places.
    TotallyReal([f64; 3]),
    /// One real place and one complex pair `re ± i·im` (`im > 0`).
    Mixed { real: f64, re: f64, im: f64 },
}

fn eval(n: f64, x: f64) -> f64 {
    ((x - n) * x + (n - 1.0)) * x - 1.0
}

/// Root of `f_n` in `[lo, hi]` where `f_n` changes sign.
fn bisect(n: f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = eval(n, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (eval(n, mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Embedding {
    /// Roots of `f_n`; `None` when `n` is too large for double precision.
    pub fn new(n: &BigInt) -> Option<Self> {
        let nf = n.to_f64().filter(|v| v.abs() < 1e6)?;
        let disc = trace_poly_discriminant(n);
        let span = nf.abs() + 4.0;
        if disc > BigInt::from(0) {
            // critical points of f_n split the three real roots
            let s = (4.0 * nf * nf - 12.0 * (nf - 1.0)).sqrt();
            let lo_crit = (2.0 * nf - s) / 6.0;
            let hi_crit = (2.0 * nf + s) / 6.0;
            let r0 = bisect(nf, -span, lo_crit);
            let r1 = bisect(nf, lo_crit, hi_crit);
            let r2 = bisect(nf, hi_crit, span);
            Some(Embedding::TotallyReal([r0, r1, r2]))
        } else {
            let real = bisect(nf, -span, span);
            // f_n = (x − r)(x² + b x + c)
            let b = real - nf;
            let c = real * real - nf * real + nf - 1.0;
            let im = (4.0 * c - b * b).max(0.0).sqrt() / 2.0;
            Some(Embedding::Mixed { real, re: -b / 2.0, im })
        }
    }

    /// Number of archimedean places (3 or 2).
    pub fn places(&self) -> usize {
        match self {
            Embedding::TotallyReal(_) => 3,
            Embedding::Mixed { .. } => 2,
        }
    }

    /// Degree of each place (1 real, 2 complex).
    pub fn place_degree(&self, i: usize) -> f64 {
        match self {
            Embedding::TotallyReal(_) => 1.0,
            Embedding::Mixed { .. } => {
                if i == 0 {
                    1.0
                } else {
                    2.0
                }
            }
        }
    }

    /// Real coordinates of `x0 + x1θ + x2θ²`: three reals, or
    /// `(σ₁, Re σ₂, Im σ₂)`.
    pub fn coordinates(&self, x: [f64; 3]) -> [f64; 3] {
        match *self {
            Embedding::TotallyReal(r) => r.map(|t| x[0] + x[1] * t + x[2] * t * t),
            Embedding::Mixed { real, re, im } => {
                let s1 = x[0] + x[1] * real + x[2] * real * real;
                // (re + i im)² = re² − im² + 2 i re im
                let sq_re = re * re - im * im;
                let sq_im = 2.0 * re * im;
                [s1, x[0] + x[1] * re + x[2] * sq_re, x[1] * im + x[2] * sq_im]
            }
        }
    }

    /// Absolute value at each place.
    pub fn abs_values(&self, x: [f64; 3]) -> Vec<f64> {
        let y = self.coordinates(x);
        match self {
            Embedding::TotallyReal(_) => y.iter().map(|v| v.abs()).collect(),
            Embedding::Mixed { .. } => vec![y[0].abs(), y[1].hypot(y[2])],
        }
    }

    /// `log |σ_i(u)|` per place.
    pub fn log_vector(&self, x: [f64; 3]) -> Vec<f64> {
        self.abs_values(x).into_iter().map(f64::ln).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_roots() {
        for n in [-145i64, -107, -3, 2, 5, 27, 70, 78, 122] {
            let e = Embedding::new(&BigInt::from(n)).unwrap();
            match e {
                Embedding::TotallyReal(r) => {
                    for t in r {
                        assert!(eval(n as f64, t).abs() < 1e-6 * (1.0 + (n as f64).powi(2)), "n={n}");
                    }
                    assert!(((r[0] + r[1] + r[2]) - n as f64).abs() < 1e-9 * (1.0 + n.abs() as f64));
                    assert!((r[0] * r[1] * r[2] - 1.0).abs() < 1e-8);
                }
                Embedding::Mixed { real, re, im } => {
                    assert!(im > 0.0);
                    assert!((real + 2.0 * re - n as f64).abs() < 1e-9);
                    assert!((real * (re * re + im * im) - 1.0).abs() < 1e-9);
                }
            }
        }
        // disc(f_2) = −23
        assert!(matches!(Embedding::new(&BigInt::from(2)).unwrap(), Embedding::Mixed { .. }));
    }
}
