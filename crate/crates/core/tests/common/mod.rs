//! Independent oracles shared by the integration tests. Nothing here calls the library's
//! solvers; every quantity is recomputed from first principles.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha20Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Labor demand from the first-order condition, written out directly.
pub fn demand_oracle(zeta_hat: f64, alpha: f64, m: f64, sigma: f64, w: f64) -> f64 {
    let e = (alpha * m + 0.5 * alpha * alpha * sigma * sigma).exp();
    (e * zeta_hat / w).powf(1.0 / (1.0 - zeta_hat * alpha))
}

/// Plain bisection on a log-wage grid for L(w) = target.
pub fn wage_oracle(zeta: &[f64], alpha: f64, m: &[f64], sigma: &[f64], target: f64) -> f64 {
    let total = |w: f64| -> f64 {
        (0..zeta.len()).map(|i| demand_oracle(zeta[i], alpha, m[i], sigma[i], w)).sum()
    };
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if total(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Grid maximizer of a log-posterior on [lo, hi] with the given step.
pub fn grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = (lo, f(lo));
    for k in 1..=n {
        let x = lo + k as f64 * step;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

/// Inverse by solving against unit vectors.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            gauss_solve(a, &e).expect("invertible")
        })
        .collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

pub fn quad(h: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    let n = b.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            q += 0.5 * x[i] * h[i][j] * x[j];
        }
        q -= b[i] * x[i];
    }
    q
}

/// Minimizer of 1/2 x'Hx - b'x over x >= 0 by checking the KKT conditions of every subset.
pub fn kkt_enumeration(h: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut x = vec![0.0; n];
        if !idx.is_empty() {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| h[i][j]).collect()).collect();
            let rhs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
            let Some(sol) = gauss_solve(&a, &rhs) else { continue };
            if sol.iter().any(|v| *v <= 0.0) {
                continue;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] = sol[k];
            }
        }
        // dual feasibility off the support: gradient >= 0
        let ok = (0..n).filter(|i| mask >> i & 1 == 0).all(|i| {
            let g: f64 = (0..n).map(|j| h[i][j] * x[j]).sum::<f64>() - b[i];
            g >= -1e-9
        });
        if ok {
            let v = quad(h, b, &x);
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
    }
    best.expect("a KKT point exists for positive definite H").1
}

/// Projected coordinate descent for 1/2 x'Hx - b'x over x >= 0.
pub fn coordinate_descent(h: &[Vec<f64>], b: &[f64], sweeps: usize) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for _ in 0..sweeps {
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| h[i][j] * x[j]).sum();
            x[i] = ((b[i] - off) / h[i][i]).max(0.0);
        }
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
