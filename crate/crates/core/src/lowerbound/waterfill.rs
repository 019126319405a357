//! Maximizing `Σ y_j/(y_j+1)` subject to `Σ y_j j^{2k} = R`.

use crate::error::{Error, Result};

fn power_sums(n: usize, k: u32) -> (f64, f64) {
    (1..=n).fold((0.0, 0.0), |(a, b), j| {
        let jk = (j as f64).powi(k as i32);
        (a + jk, b + jk * jk)
    })
}

/// `τ̄(y) = y/(y+1)`.
pub fn tau_bar(y: f64) -> f64 {
    y / (y + 1.0)
}

/// Smallest `R` keeping every `y*_j ≥ 0`: `N^k Σ j^k − Σ j^{2k}`.
pub fn minimal_budget(n: usize, k: u32) -> f64 {
    let (sk, s2k) = power_sums(n, k);
    (n as f64).powi(k as i32) * sk - s2k
}

/// `y*_j = (R + Σ j^{2k}) j^{−k} / Σ j^k − 1`, `j = 1..=N`.
pub fn waterfill(n: usize, k: u32, budget: f64) -> Result<Vec<f64>> {
    if n == 0 || k == 0 {
        return Err(crate::error::invalid("waterfill", "need N ≥ 1 and k ≥ 1"));
    }
    let minimal = minimal_budget(n, k);
    // Relative slack so the boundary case itself is accepted.
    if !(budget >= minimal - 1e-12 * minimal.abs().max(1.0)) {
        return Err(Error::InfeasibleBudget { budget, minimal });
    }
    let (sk, s2k) = power_sums(n, k);
    Ok((1..=n)
        .map(|j| ((budget + s2k) / ((j as f64).powi(k as i32) * sk) - 1.0).max(0.0))
        .collect())
}

/// `J*_N(R) = N − (Σ j^k)² / (R + Σ j^{2k})`.
pub fn waterfill_value(n: usize, k: u32, budget: f64) -> f64 {
    let (sk, s2k) = power_sums(n, k);
    n as f64 - sk * sk / (budget + s2k)
}

/// `Σ y_j j^{2k}`.
pub fn budget_used(y: &[f64], k: u32) -> f64 {
    y.iter()
        .enumerate()
        .map(|(i, v)| v * ((i + 1) as f64).powi(2 * k as i32))
        .sum()
}

/// The same maximization solved numerically by exact pairwise budget
/// transfers, starting from an even split. Independent of the closed form.
pub fn waterfill_numeric(n: usize, k: u32, budget: f64) -> Vec<f64> {
    let cost: Vec<f64> = (1..=n).map(|j| (j as f64).powi(2 * k as i32)).collect();
    let mut y: Vec<f64> = cost.iter().map(|c| budget / (n as f64 * c)).collect();
    let slope = |v: f64| 1.0 / ((v + 1.0) * (v + 1.0));
    for _ in 0..20_000 {
        let mut moved = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                // Budget δ moves from b to a; the objective is concave in δ.
                let (ya, yb, ca, cb) = (y[a], y[b], cost[a], cost[b]);
                let grad = |d: f64| slope(ya + d / ca) / ca - slope(yb - d / cb) / cb;
                let (mut lo, mut hi) = (-ya * ca, yb * cb);
                if grad(hi) >= 0.0 {
                    lo = hi;
                } else if grad(lo) <= 0.0 {
                    hi = lo;
                } else {
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if grad(mid) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= 1e-16 * (1.0 + hi.abs()) {
                            break;
                        }
                    }
                }
                let d = 0.5 * (lo + hi);
                y[a] = (ya + d / ca).max(0.0);
                y[b] = (yb - d / cb).max(0.0);
                moved = moved.max(d.abs());
            }
        }
        if moved < 1e-13 * budget.max(1.0) {
            break;
        }
    }
    y
}
