//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Angle between two frames via the clamped arc cosine of their cosine.
pub fn angle(u: &[f64], v: &[f64]) -> f64 {
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    match (nu == 0.0, nv == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => std::f64::consts::FRAC_PI_2,
        _ => {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            (dot / (nu * nv)).clamp(-1.0, 1.0).acos()
        }
    }
}

/// Enumerates every monotone path from (0, 0) to (n-1, m-1) and keeps the
/// lowest summed cost, ties going to the shorter path. Returns sum / length.
pub fn brute_dtw(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    fn walk(i: usize, j: usize, sum: f64, len: usize, a: &[Vec<f64>], b: &[Vec<f64>], best: &mut (f64, usize)) {
        let sum = sum + angle(&a[i], &b[j]);
        let len = len + 1;
        if i + 1 == a.len() && j + 1 == b.len() {
            if sum < best.0 || (sum == best.0 && len < best.1) {
                *best = (sum, len);
            }
            return;
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(i + 1, j + 1, sum, len, a, b, best);
        }
        if i + 1 < a.len() {
            walk(i + 1, j, sum, len, a, b, best);
        }
        if j + 1 < b.len() {
            walk(i, j + 1, sum, len, a, b, best);
        }
    }
    let mut best = (f64::INFINITY, usize::MAX);
    walk(0, 0, 0.0, 0, a, b, &mut best);
    best.0 / best.1 as f64
}

/// Lists every (x, a, b) triplet with x and a distinct members of one
/// category and b from the other, crediting 1 when d(x, a) < d(x, b) and 0.5
/// on a tie. Returns `None` when there is no triplet.
pub fn brute_abx(a: &[usize], b: &[usize], d: impl Fn(usize, usize) -> f64) -> Option<f64> {
    let mut credit = 0.0;
    let mut count = 0usize;
    for (same, other) in [(a, b), (b, a)] {
        for &x in same {
            for &s in same {
                if s == x {
                    continue;
                }
                for &o in other {
                    let (ds, dother) = (d(x, s), d(x, o));
                    credit += if ds < dother {
                        1.0
                    } else if ds == dother {
                        0.5
                    } else {
                        0.0
                    };
                    count += 1;
                }
            }
        }
    }
    (count > 0).then(|| credit / count as f64)
}

/// Levenshtein distance by plain recursion with a full memo table.
pub fn brute_edit(x: &[u32], y: &[u32]) -> usize {
    fn go(i: usize, j: usize, x: &[u32], y: &[u32], memo: &mut Vec<Vec<Option<usize>>>) -> usize {
        if let Some(v) = memo[i][j] {
            return v;
        }
        let v = if i == 0 {
            j
        } else if j == 0 {
            i
        } else {
            let sub = go(i - 1, j - 1, x, y, memo) + usize::from(x[i - 1] != y[j - 1]);
            let del = go(i - 1, j, x, y, memo) + 1;
            let ins = go(i, j - 1, x, y, memo) + 1;
            sub.min(del).min(ins)
        };
        memo[i][j] = Some(v);
        v
    }
    let mut memo = vec![vec![None; y.len() + 1]; x.len() + 1];
    go(x.len(), y.len(), x, y, &mut memo)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on [a, b].
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Two-sided Student p-value by quadrature. With x = sqrt(df) tan(theta) the
/// density becomes proportional to cos(theta)^(df-1) on [0, pi/2), so the
/// tail mass is a ratio of two smooth integrals and needs no gamma function.
pub fn student_p(t: f64, df: f64) -> f64 {
    let f = move |theta: f64| theta.cos().powf(df - 1.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta0 = (t.abs() / df.sqrt()).atan();
    integrate(&f, theta0, half_pi, 1e-15) / integrate(&f, 0.0, half_pi, 1e-15)
}

/// Random frames with entries in [-1, 1].
pub fn random_frames(rng: &mut ChaCha8Rng, len: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("tok{i}")).collect()
}
