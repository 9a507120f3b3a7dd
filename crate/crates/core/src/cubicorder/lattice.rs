//! LLL reduction and Fincke–Pohst enumeration for rank-3 lattices given by
//! real coordinate vectors. Transforms are exact integer matrices; only the
//! decisions are made in floating point.

pub(crate) type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// LLL-reduces the rows of `v` (δ = 0.99). Returns `(u, w)` with `w = u·v`
/// and `u` unimodular.
pub(crate) fn lll(v: &[Vec3; 3]) -> ([[i64; 3]; 3], [Vec3; 3]) {
    let mut b = *v;
    let mut u = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 10_000 {
        guard += 1;
        // Gram–Schmidt of the current basis
        let mut bstar = b;
        let mut mu = [[0.0f64; 3]; 3];
        let mut norms = [0.0f64; 3];
        for i in 0..3 {
            for j in 0..i {
                mu[i][j] = dot(&b[i], &bstar[j]) / norms[j];
                for t in 0..3 {
                    bstar[i][t] -= mu[i][j] * bstar[j][t];
                }
            }
            norms[i] = dot(&bstar[i], &bstar[i]);
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 && q.is_finite() {
                let qi = q as i64;
                for t in 0..3 {
                    b[k][t] -= q * b[j][t];
                    u[k][t] -= qi * u[j][t];
                }
                for l in 0..=j {
                    mu[k][l] -= q * if l == j { 1.0 } else { mu[j][l] };
                }
            }
        }
        let lhs = norms[k];
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (u, b)
}

/// Calls `visit` on every nonzero integer `x` with `‖x·w‖² ≤ radius_sq` and
/// `|x_i| ≤ bound`; stops early when `visit` returns `true`.
///
/// Returns `(found, complete)`: `complete` is false when some coordinate
/// range had to be clipped to `bound`.
pub(crate) fn enumerate(
    w: &[Vec3; 3],
    radius_sq: f64,
    bound: i64,
    mut visit: impl FnMut([i64; 3]) -> bool,
) -> (bool, bool) {
    let mut g = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = dot(&w[i], &w[j]);
        }
    }
    // Q(x) = Σ q[i][i]·(x_i + Σ_{j>i} q[i][j] x_j)²
    let mut q = [[0.0f64; 3]; 3];
    for i in 0..3 {
        let mut d = g[i][i];
        for k in 0..i {
            d -= q[k][k] * q[k][i] * q[k][i];
        }
        q[i][i] = d;
        for j in i + 1..3 {
            let mut s = g[i][j];
            for k in 0..i {
                s -= q[k][k] * q[k][i] * q[k][j];
            }
            q[i][j] = s / d;
        }
    }
    if q.iter().enumerate().any(|(i, r)| !(r[i] > 0.0) || !r[i].is_finite()) {
        return (false, false);
    }
    let mut complete = true;
    let mut x = [0i64; 3];
    let found = descend(&q, radius_sq, bound, 2, &mut x, &mut complete, &mut visit);
    (found, complete)
}

fn descend(
    q: &[[f64; 3]; 3],
    remaining: f64,
    bound: i64,
    i: usize,
    x: &mut [i64; 3],
    complete: &mut bool,
    visit: &mut impl FnMut([i64; 3]) -> bool,
) -> bool {
    let center: f64 = -(i + 1..3).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let half = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo_f = (center - half).ceil();
    let hi_f = (center + half).floor();
    if lo_f > hi_f {
        return false;
    }
    let lo = if lo_f < -(bound as f64) {
        *complete = false;
        -bound
    } else {
        lo_f as i64
    };
    let hi = if hi_f > bound as f64 {
        *complete = false;
        bound
    } else {
        hi_f as i64
    };
    for xi in lo..=hi {
        x[i] = xi;
        let diff = xi as f64 - center;
        let rest = remaining - q[i][i] * diff * diff;
        if rest < 0.0 {
            continue;
        }
        if i == 0 {
            if x.iter().any(|&v| v != 0) && visit(*x) {
                return true;
            }
        } else if descend(q, rest, bound, i - 1, x, complete, visit) {
            return true;
        }
    }
    x[i] = 0;
    false
}
