//! The finite family of Pinsker-type shrinkage weights.
//!
//! For `n` observations set `ε = 1/ln n`, `k* = ⌊1/√ε⌋`, `m = ⌊1/ε²⌋`.
//! Each index `α = (β, t)` with `1 ≤ β ≤ k*`, `t ∈ {ε, 2ε, ..., mε}` yields
//!
//! ```text
//! λ_α(j) = 1                  for 1 ≤ j ≤ j₀
//!        = 1 − (j/ω(α))^β     for j₀ < j ≤ ω(α)
//!        = 0                  otherwise
//! ```
//!
//! with `ω(α) = (A_β t n)^{1/(2β+1)}`, `j₀ = ⌊ω(α)/ln n⌋` and
//! `A_β = (β+1)(2β+1)/(π^{2β} β)`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Upper bound on `|A_ε|`.
pub const GRID_CAP: usize = 1_000_000;

/// `α = (β, t)` with `t = step·ε`.
#[derive(Clone, Copy, Debug)]
pub struct WeightIndex {
    pub beta: u32,
    pub step: u32,
    pub epsilon: f64,
}

impl WeightIndex {
    pub fn new(beta: u32, step: u32, epsilon: f64) -> Result<Self> {
        if beta == 0 {
            return Err(invalid("beta", "must be at least 1"));
        }
        if step == 0 {
            return Err(invalid("step", "t must be a positive multiple of epsilon"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(
                "epsilon",
                format!("must be positive, got {epsilon}"),
            ));
        }
        Ok(Self {
            beta,
            step,
            epsilon,
        })
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.epsilon
    }
}

// Ordering is lexicographic in (β, t); within one grid ε is shared so the
// integer step orders t exactly.
impl PartialEq for WeightIndex {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for WeightIndex {}

impl PartialOrd for WeightIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WeightIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.beta
            .cmp(&other.beta)
            .then_with(|| self.t().total_cmp(&other.t()))
            .then_with(|| self.step.cmp(&other.step))
    }
}

impl std::fmt::Display for WeightIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "beta={},t={:.6}", self.beta, self.t())
    }
}

/// `ε = 1/ln n`.
pub fn grid_epsilon(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSampleCount(n));
    }
    Ok(1.0 / (n as f64).ln())
}

/// `A_β = (β+1)(2β+1)/(π^{2β} β)`.
pub fn a_beta(beta: u32) -> Result<f64> {
    if beta == 0 {
        return Err(invalid("beta", "A_beta is undefined at beta = 0"));
    }
    let b = beta as f64;
    Ok((b + 1.0) * (2.0 * b + 1.0) / (PI.powi(2 * beta as i32) * b))
}

/// `ω(α) = (A_β t n)^{1/(2β+1)}`.
pub fn omega(alpha: &WeightIndex, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSampleCount(n));
    }
    let a = a_beta(alpha.beta)?;
    Ok((a * alpha.t() * n as f64).powf(1.0 / (2.0 * alpha.beta as f64 + 1.0)))
}

/// Dimensions `(k*, m)` of the grid for `n`.
pub fn grid_shape(n: usize) -> Result<(u32, u32)> {
    let eps = grid_epsilon(n)?;
    let k_star = (1.0 / eps.sqrt()).floor() as u32;
    let m = (1.0 / (eps * eps)).floor() as u32;
    Ok((k_star, m))
}

/// All `α ∈ A_ε`, ordered lexicographically in `(β, t)`.
pub fn weight_grid(n: usize) -> Result<Vec<WeightIndex>> {
    let eps = grid_epsilon(n)?;
    let (k_star, m) = grid_shape(n)?;
    let size = k_star as usize * m as usize;
    if size > GRID_CAP {
        return Err(Error::GridTooLarge {
            n,
            size,
            cap: GRID_CAP,
        });
    }
    let mut out = Vec::with_capacity(size);
    for beta in 1..=k_star {
        for step in 1..=m {
            out.push(WeightIndex {
                beta,
                step,
                epsilon: eps,
            });
        }
    }
    Ok(out)
}

/// A weight vector `λ_α ∈ [0,1]^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    index: WeightIndex,
    omega: f64,
    j0: usize,
}

impl WeightVector {
    /// `values[j-1] = λ(j)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self) -> WeightIndex {
        self.index
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of leading entries that can be nonzero.
    pub fn support(&self) -> usize {
        self.values
            .iter()
            .rposition(|v| *v != 0.0)
            .map_or(0, |p| p + 1)
    }

    /// `|λ|² = Σ_j λ(j)²`.
    pub fn squared_norm(&self) -> f64 {
        self.values[..self.support()].iter().map(|v| v * v).sum()
    }
}

/// Builds `λ_α` of length `n`.
pub fn weight_vector(alpha: &WeightIndex, n: usize) -> Result<WeightVector> {
    let w = omega(alpha, n)?;
    let ln_n = (n as f64).ln();
    let j0_raw = (w / ln_n).floor() as usize;
    let top = (w.floor() as usize).min(n);
    let j0 = j0_raw.min(top);
    let beta = alpha.beta as i32;
    let mut values = vec![0.0; n];
    for (i, slot) in values.iter_mut().enumerate().take(top) {
        let j = i + 1;
        *slot = if j <= j0 {
            1.0
        } else {
            (1.0 - (j as f64 / w).powi(beta)).clamp(0.0, 1.0)
        };
    }
    Ok(WeightVector {
        values,
        index: *alpha,
        omega: w,
        j0,
    })
}

/// Every `λ_α` for `α ∈ weight_grid(n)`, in grid order.
pub fn weight_family(n: usize) -> Result<Vec<WeightVector>> {
    weight_grid(n)?
        .iter()
        .map(|a| weight_vector(a, n))
        .collect()
}

/// A hand-built weight vector; used for indicator-style estimators that are
/// not members of the family.
pub fn custom_weights(values: Vec<f64>, index: WeightIndex) -> Result<WeightVector> {
    if let Some(p) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(invalid(
            "weights",
            format!("entry {} outside [0, 1]", p + 1),
        ));
    }
    let support = values.iter().rposition(|v| *v != 0.0).map_or(0, |p| p + 1);
    Ok(WeightVector {
        values,
        index,
        omega: support as f64,
        j0: 0,
    })
}
