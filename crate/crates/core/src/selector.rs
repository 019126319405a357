//! Data-driven choice of the shrinkage weights.
//!
//! With `θ̂_j` the discrete Fourier coefficients of `y`, the procedure
//! minimizes over the weight family
//!
//! ```text
//! J_n(λ) = Σ_j λ²(j) θ̂²_j − 2 Σ_j λ(j) θ̃_j + ρ P̂_n(λ)
//! θ̃_j    = θ̂²_j − ζ̂_n/n
//! ζ̂_n    = Σ_{j > l_n} θ̂²_j,    l_n = ⌊n^{1/3} + 1⌋
//! P̂_n(λ) = |λ|² ζ̂_n / n,        ρ = 1/(3 + ln^γ n)
//! ```
//!
//! Ties are broken toward the lexicographically smallest `(β, t)`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::basis::{fourier_transform, DesignGrid, FourierCoeffs};
use crate::error::{invalid, Error, Result};
use crate::models::ModelSpec;
use crate::weights::{
    grid_epsilon, grid_shape, weight_family, weight_vector, WeightIndex, WeightVector,
};

/// Default exponent in `ρ = 1/(3 + ln^γ n)`.
pub const DEFAULT_GAMMA: f64 = 2.0;

/// `l_n = ⌊n^{1/3}⌋ + 1`, using an exact integer cube root.
pub fn low_cutoff(n: usize) -> usize {
    let mut c = (n as f64).cbrt().round() as usize;
    while c * c * c > n {
        c -= 1;
    }
    while (c + 1) * (c + 1) * (c + 1) <= n {
        c += 1;
    }
    c + 1
}

/// `ζ̂_n = Σ_{j=l_n+1}^n θ̂²_j`.
pub fn zeta_hat(coeffs: &FourierCoeffs) -> Result<f64> {
    let n = coeffs.n();
    let l_n = low_cutoff(n);
    if l_n >= n {
        return Err(Error::TooFewCoefficients { n, l_n });
    }
    Ok(coeffs.values()[l_n..].iter().map(|v| v * v).sum())
}

/// `ρ = 1/(3 + ln^γ n)`.
pub fn rho(n: usize, gamma: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSampleCount(n));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(
            "estimator.gamma",
            format!("must be positive, got {gamma}"),
        ));
    }
    Ok(1.0 / (3.0 + (n as f64).ln().powf(gamma)))
}

/// `P̂_n(λ) = |λ|² ζ̂_n / n`.
pub fn penalty(lambda: &WeightVector, zeta_hat: f64, n: usize) -> f64 {
    lambda.squared_norm() * zeta_hat / n as f64
}

/// `J_n(λ)`.
pub fn cost(lambda: &WeightVector, coeffs: &FourierCoeffs, zeta_hat: f64, rho: f64) -> Result<f64> {
    if lambda.len() != coeffs.n() {
        return Err(Error::LengthMismatch {
            expected: coeffs.n(),
            actual: lambda.len(),
        });
    }
    let sq: Vec<f64> = coeffs.values().iter().map(|v| v * v).collect();
    Ok(cost_from_parts(
        lambda,
        &sq,
        zeta_hat / coeffs.n() as f64,
        rho,
    ))
}

/// `J_n(λ)` from precomputed `θ̂²` and `ζ̂_n/n`, one pass over the support.
pub fn cost_from_parts(lambda: &WeightVector, theta_sq: &[f64], zeta_over_n: f64, rho: f64) -> f64 {
    let support = lambda.support();
    lambda.values()[..support]
        .iter()
        .zip(&theta_sq[..support])
        .map(|(l, t2)| l * l * (t2 + rho * zeta_over_n) - 2.0 * l * (t2 - zeta_over_n))
        .sum()
}

/// Outcome of the argmin over the weight family.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub chosen: WeightIndex,
    pub cost: f64,
    pub zeta_hat: f64,
    pub rho: f64,
    pub all_costs: BTreeMap<WeightIndex, f64>,
}

/// Shrunken coefficients and the fitted values on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub weight: WeightVector,
}

/// `Ŝ_λ = Σ_j λ(j) θ̂_j φ_j` on the grid.
pub fn reconstruct(lambda: &WeightVector, coeffs: &FourierCoeffs) -> Result<Estimate> {
    if lambda.len() != coeffs.n() {
        return Err(Error::LengthMismatch {
            expected: coeffs.n(),
            actual: lambda.len(),
        });
    }
    let coefficients: Vec<f64> = lambda
        .values()
        .iter()
        .zip(coeffs.values())
        .map(|(l, t)| l * t)
        .collect();
    let fitted = coeffs.grid().synthesize(&coefficients)?;
    Ok(Estimate {
        coefficients,
        fitted,
        weight: lambda.clone(),
    })
}

/// Argmin of `J_n` over a precomputed family, returning the winner's
/// position in `family` together with the full result.
pub fn select_from_family(
    coeffs: &FourierCoeffs,
    family: &[WeightVector],
    gamma: f64,
) -> Result<(usize, SelectionResult)> {
    let n = coeffs.n();
    if family.is_empty() {
        return Err(invalid("weights", "empty weight family"));
    }
    if let Some(p) = coeffs.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(p + 1));
    }
    let z = zeta_hat(coeffs)?;
    let r = rho(n, gamma)?;
    let theta_sq: Vec<f64> = coeffs.values().iter().map(|v| v * v).collect();
    let zn = z / n as f64;
    let costs: Vec<f64> = family
        .par_iter()
        .map(|lambda| cost_from_parts(lambda, &theta_sq, zn, r))
        .collect();

    // Ordered scan after all costs are in: strict `<` keeps the first
    // minimum, and callers pass the family in (β, t) order.
    let mut best = 0;
    for (i, c) in costs.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::NonFinite(i + 1));
        }
        if *c < costs[best] || (*c == costs[best] && family[i].index() < family[best].index()) {
            best = i;
        }
    }
    let all_costs = family
        .iter()
        .map(|l| l.index())
        .zip(costs.iter().copied())
        .collect();
    Ok((
        best,
        SelectionResult {
            chosen: family[best].index(),
            cost: costs[best],
            zeta_hat: z,
            rho: r,
            all_costs,
        },
    ))
}

/// The adaptive estimate `Ŝ_*` from raw observations.
pub fn select(y: &[f64], grid: &DesignGrid, gamma: f64) -> Result<(SelectionResult, Estimate)> {
    if let Some(p) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(p + 1));
    }
    let coeffs = fourier_transform(y, grid)?;
    let family = weight_family(grid.n())?;
    let (best, result) = select_from_family(&coeffs, &family, gamma)?;
    let estimate = reconstruct(&family[best], &coeffs)?;
    Ok((result, estimate))
}

/// The oracle tuning `α̃ = (k, l̃ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceIndex {
    pub index: WeightIndex,
    /// `r̄(S) = r/ς(S)`.
    pub r_bar: f64,
    /// Set when `r̄(S) > mε` and the step was clamped at `m`.
    pub clamped: bool,
}

/// `l̃ = inf{i ≥ 1 : iε ≥ r̄} ∧ m`.
pub fn reference_index(n: usize, k: u32, r_bar: f64) -> Result<ReferenceIndex> {
    if !(r_bar > 0.0 && r_bar.is_finite()) {
        return Err(invalid("r_bar", format!("must be positive, got {r_bar}")));
    }
    let eps = grid_epsilon(n)?;
    let (_, m) = grid_shape(n)?;
    let mut step = (r_bar / eps).ceil().max(1.0);
    // Guard the ceiling against rounding in the division.
    if (step - 1.0) * eps >= r_bar && step > 1.0 {
        step -= 1.0;
    }
    let clamped = step > m as f64;
    let step = if clamped { m } else { step as u32 };
    Ok(ReferenceIndex {
        index: WeightIndex::new(k, step, eps)?,
        r_bar,
        clamped,
    })
}

/// `S̃ = Ŝ_{λ̃}`, which needs the true `k`, `r` and `ς(S)`.
pub fn reference_estimator(
    spec: &ModelSpec,
    coeffs: &FourierCoeffs,
) -> Result<(Estimate, ReferenceIndex)> {
    let varsigma = spec.varsigma();
    if !(varsigma > 0.0) {
        return Err(invalid(
            "model.scale",
            "reference tuning needs a positive noise level",
        ));
    }
    let choice = reference_index(coeffs.n(), spec.ball.k, spec.ball.r / varsigma)?;
    let lambda = weight_vector(&choice.index, coeffs.n())?;
    Ok((reconstruct(&lambda, coeffs)?, choice))
}

/// `κ(ρ) = (6ρ − 2ρ²)/(1 − 3ρ)` on `0 < ρ < 1/3`.
pub fn kappa(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0 / 3.0) {
        return Err(invalid("rho", format!("must lie in (0, 1/3), got {rho}")));
    }
    Ok((6.0 * rho - 2.0 * rho * rho) / (1.0 - 3.0 * rho))
}
