//! Monte Carlo quadratic risk `sup_p E‖Ŝ − S‖²_n` over a finite noise
//! family, Pinsker constants and efficiency ratios.
//!
//! Replication `i` under density `p` at sample size `n` always reads the
//! random stream keyed by `(seed, n, p, i)`, so different estimators see the
//! same data (common random numbers) and the result does not depend on the
//! worker count. Losses are computed in coefficient space, which equals the
//! grid norm by orthonormality.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::basis::{fourier_transform, DesignGrid, FourierCoeffs, SobolevBall};
use crate::error::{invalid, Error, Result};
use crate::models::{ModelSpec, NoiseDensity, NoiseFamily};
use crate::rng::StreamKey;
use crate::selector::{kappa, reference_index, rho, select_from_family};
use crate::weights::{custom_weights, weight_family, weight_vector, WeightIndex, WeightVector};

/// Which estimator a risk run evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimator {
    /// The data-driven `Ŝ_*` with exponent `γ` in `ρ`.
    Adaptive { gamma: f64 },
    /// A single member `λ_α`; `α.t()` is used as is.
    Fixed(WeightIndex),
    /// The oracle-tuned `S̃`.
    Reference,
    /// Keep the first `count` coefficients.
    Projection(usize),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Adaptive { .. } => write!(f, "adaptive"),
            Self::Fixed(a) => write!(f, "fixed(beta={},t={})", a.beta, a.t()),
            Self::Reference => write!(f, "reference"),
            Self::Projection(c) => write!(f, "projection({c})"),
        }
    }
}

enum Prepared {
    Family {
        family: Vec<WeightVector>,
        gamma: f64,
    },
    Single(WeightVector),
}

impl Prepared {
    fn new(estimator: &Estimator, spec: &ModelSpec, n: usize) -> Result<Self> {
        Ok(match *estimator {
            Estimator::Adaptive { gamma } => {
                rho(n, gamma)?;
                Self::Family {
                    family: weight_family(n)?,
                    gamma,
                }
            }
            Estimator::Fixed(alpha) => Self::Single(weight_vector(&alpha, n)?),
            Estimator::Reference => {
                let vs = spec.varsigma();
                if !(vs > 0.0) {
                    return Err(invalid(
                        "model.scale",
                        "reference tuning needs a positive noise level",
                    ));
                }
                let choice = reference_index(n, spec.ball.k, spec.ball.r / vs)?;
                Self::Single(weight_vector(&choice.index, n)?)
            }
            Estimator::Projection(count) => {
                if count == 0 || count > n {
                    return Err(invalid(
                        "estimator.count",
                        format!("must lie in 1..={n}, got {count}"),
                    ));
                }
                let mut v = vec![0.0; n];
                v[..count].fill(1.0);
                let idx = WeightIndex::new(1, 1, 1.0)?;
                Self::Single(custom_weights(v, idx)?)
            }
        })
    }

    fn weights<'a>(&'a self, coeffs: &FourierCoeffs) -> Result<&'a WeightVector> {
        match self {
            Self::Family { family, gamma } => {
                let (best, _) = select_from_family(coeffs, family, *gamma)?;
                Ok(&family[best])
            }
            Self::Single(w) => Ok(w),
        }
    }
}

/// `Σ_j (λ_j θ̂_j − θ_j)² = ‖Ŝ_λ − S‖²_n`.
fn coefficient_loss(lambda: &WeightVector, estimate: &[f64], truth: &[f64]) -> f64 {
    lambda
        .values()
        .iter()
        .zip(estimate)
        .zip(truth)
        .map(|((l, e), t)| (l * e - t).powi(2))
        .sum()
}

/// `‖f‖²_n = n⁻¹ Σ f(x_l)²`.
pub fn empirical_sq_norm(f: &[f64], grid: &DesignGrid) -> Result<f64> {
    if f.len() != grid.n() {
        return Err(Error::LengthMismatch {
            expected: grid.n(),
            actual: f.len(),
        });
    }
    Ok(f.iter().map(|v| v * v).sum::<f64>() / grid.n() as f64)
}

/// Mean and standard error of the loss under one density.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityRisk {
    pub density: NoiseDensity,
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo risk of one estimator at one sample size.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskReport {
    pub estimator: String,
    pub n: usize,
    pub replications: usize,
    pub per_density: Vec<DensityRisk>,
    /// Largest per-density mean.
    pub risk: f64,
}

impl RiskReport {
    /// Entry attaining the sup (first on ties).
    pub fn worst(&self) -> &DensityRisk {
        let mut best = &self.per_density[0];
        for d in &self.per_density[1..] {
            if d.mean > best.mean {
                best = d;
            }
        }
        best
    }
}

/// `(mean, stderr)` with the `M − 1` variance.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn check_run(n: usize, replications: usize) -> Result<DesignGrid> {
    if replications < 2 {
        return Err(invalid(
            "run.reps",
            format!("need at least 2 replications, got {replications}"),
        ));
    }
    DesignGrid::new(n)
}

/// Runs `eval` on every replication under `density`, in parallel, keeping
/// replication order. `eval` gets the noisy and true coefficients.
fn replicate<T, F>(
    spec: &ModelSpec,
    density: &NoiseDensity,
    grid: &DesignGrid,
    replications: usize,
    seed: u64,
    eval: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&FourierCoeffs, &[f64]) -> Result<T> + Sync,
{
    let n = grid.n();
    let profile = spec.profile(grid);
    let truth = fourier_transform(&profile.s, grid)?;
    let stream = StreamKey::new(seed, &[n as u64, density.stream_id()]);
    (0..replications)
        .into_par_iter()
        .map(|i| {
            let wrap = |e: Error| Error::Replication {
                replication: i,
                source: Box::new(e),
            };
            let mut rng = stream.child(&[i as u64]).rng();
            let y = profile.draw(density, &mut rng);
            let coeffs = fourier_transform(&y, grid).map_err(wrap)?;
            eval(&coeffs, truth.values()).map_err(wrap)
        })
        .collect()
}

/// `sup_{p ∈ family} E_p ‖Ŝ − S‖²_n`, estimated from `replications` draws per density.
pub fn mc_risk(
    estimator: &Estimator,
    spec: &ModelSpec,
    noise: &NoiseFamily,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<RiskReport> {
    let grid = check_run(n, replications)?;
    let prepared = Prepared::new(estimator, spec, n)?;
    let mut per_density = Vec::with_capacity(noise.densities().len());
    for density in noise.densities() {
        let losses = replicate(spec, density, &grid, replications, seed, |c, truth| {
            let w = prepared.weights(c)?;
            Ok(coefficient_loss(w, c.values(), truth))
        })?;
        let (mean, stderr) = mean_stderr(&losses);
        per_density.push(DensityRisk {
            density: *density,
            mean,
            stderr,
        });
    }
    let risk = per_density
        .iter()
        .map(|d| d.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RiskReport {
        estimator: estimator.to_string(),
        n,
        replications,
        per_density,
        risk,
    })
}

/// `Γ*_k = (2k+1)^{1/(2k+1)} (k/(π(k+1)))^{2k/(2k+1)}`.
pub fn gamma_star(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "smoothness must be at least 1"));
    }
    let k = k as f64;
    let p = 2.0 * k + 1.0;
    Ok(p.powf(1.0 / p) * (k / (PI * (k + 1.0))).powf(2.0 * k / p))
}

/// Pinsker constant `γ_k(S) = Γ*_k r^{1/(2k+1)} ς(S)^{2k/(2k+1)}`.
pub fn gamma_k(ball: &SobolevBall, varsigma: f64) -> Result<f64> {
    if !(varsigma > 0.0 && varsigma.is_finite()) {
        return Err(invalid(
            "varsigma",
            format!("must be positive, got {varsigma}"),
        ));
    }
    let p = 2.0 * ball.k as f64 + 1.0;
    Ok(gamma_star(ball.k)? * ball.r.powf(1.0 / p) * varsigma.powf(2.0 * ball.k as f64 / p))
}

/// `n^{2k/(2k+1)}`.
pub fn rate(n: usize, k: u32) -> f64 {
    let k = k as f64;
    (n as f64).powf(2.0 * k / (2.0 * k + 1.0))
}

/// Normalized risk at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyRecord {
    pub n: usize,
    /// `n^{2k/(2k+1)} R̂ / γ_k(S)`.
    pub ratio: f64,
    /// Standard error of `ratio` at the worst density.
    pub stderr: f64,
    pub gamma: f64,
    pub report: RiskReport,
}

/// Efficiency ratios across `ns`.
pub fn efficiency_curve(
    estimator: &Estimator,
    spec: &ModelSpec,
    noise: &NoiseFamily,
    ns: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<EfficiencyRecord>> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(
            "run.ns",
            "sample sizes must be strictly increasing",
        ));
    }
    let gamma = gamma_k(&spec.ball, spec.varsigma())?;
    ns.iter()
        .map(|&n| {
            let report = mc_risk(estimator, spec, noise, n, replications, seed)?;
            let scale = rate(n, spec.ball.k) / gamma;
            Ok(EfficiencyRecord {
                n,
                ratio: scale * report.risk,
                stderr: scale * report.worst().stderr,
                gamma,
                report,
            })
        })
        .collect()
}

/// Risk of one fixed candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateRisk {
    pub index: WeightIndex,
    pub per_density: Vec<DensityRisk>,
    pub risk: f64,
}

/// Both sides of the oracle inequality at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleGap {
    pub n: usize,
    pub replications: usize,
    pub selector: RiskReport,
    pub candidates: Vec<CandidateRisk>,
    /// Position of the best candidate in `candidates`.
    pub best: usize,
    pub best_candidate_risk: f64,
    /// `selector_risk / best_candidate_risk`.
    pub ratio: f64,
    pub rho: f64,
    pub kappa: f64,
    /// `selector_risk − (1+κ)·best_candidate_risk`; may be negative.
    pub residual: f64,
}

impl OracleGap {
    pub fn selector_risk(&self) -> f64 {
        self.selector.risk
    }
}

/// Selector risk and the risk of every `λ ∈ Λ` on common random numbers.
pub fn oracle_gap(
    spec: &ModelSpec,
    noise: &NoiseFamily,
    n: usize,
    replications: usize,
    seed: u64,
    gamma: f64,
) -> Result<OracleGap> {
    let grid = check_run(n, replications)?;
    let r = rho(n, gamma)?;
    let family = weight_family(n)?;
    let size = family.len();
    let mut sel = Vec::new();
    let mut cand: Vec<Vec<DensityRisk>> = vec![Vec::new(); size];
    for density in noise.densities() {
        // Column 0 holds the selector, columns 1.. the candidates.
        let rows = replicate(spec, density, &grid, replications, seed, |c, truth| {
            let (best, _) = select_from_family(c, &family, gamma)?;
            let mut out = Vec::with_capacity(size + 1);
            out.push(coefficient_loss(&family[best], c.values(), truth));
            out.extend(
                family
                    .iter()
                    .map(|w| coefficient_loss(w, c.values(), truth)),
            );
            Ok(out)
        })?;
        let column = |i: usize| -> Vec<f64> { rows.iter().map(|r| r[i]).collect() };
        let (mean, stderr) = mean_stderr(&column(0));
        sel.push(DensityRisk {
            density: *density,
            mean,
            stderr,
        });
        for (i, slot) in cand.iter_mut().enumerate() {
            let (mean, stderr) = mean_stderr(&column(i + 1));
            slot.push(DensityRisk {
                density: *density,
                mean,
                stderr,
            });
        }
    }
    let sup = |v: &[DensityRisk]| v.iter().map(|d| d.mean).fold(f64::NEG_INFINITY, f64::max);
    let selector = RiskReport {
        estimator: Estimator::Adaptive { gamma }.to_string(),
        n,
        replications,
        risk: sup(&sel),
        per_density: sel,
    };
    let candidates: Vec<CandidateRisk> = family
        .iter()
        .zip(cand)
        .map(|(w, per_density)| CandidateRisk {
            index: w.index(),
            risk: sup(&per_density),
            per_density,
        })
        .collect();
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.risk < candidates[best].risk {
            best = i;
        }
    }
    let best_risk = candidates[best].risk;
    let k = kappa(r)?;
    Ok(OracleGap {
        n,
        replications,
        ratio: selector.risk / best_risk,
        residual: selector.risk - (1.0 + k) * best_risk,
        selector,
        candidates,
        best,
        best_candidate_risk: best_risk,
        rho: r,
        kappa: k,
    })
}

/// One CSV row: `n, density, estimator, mean, stderr, ratio, gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskRow {
    pub n: usize,
    pub density: String,
    pub estimator: String,
    pub mean: f64,
    pub stderr: f64,
    pub ratio: Option<f64>,
    pub gamma: Option<f64>,
}

impl RiskReport {
    /// One row per density plus a `sup` row.
    pub fn rows(&self, ratio_scale: Option<f64>, gamma: Option<f64>) -> Vec<RiskRow> {
        let mut out: Vec<RiskRow> = self
            .per_density
            .iter()
            .map(|d| RiskRow {
                n: self.n,
                density: d.density.tag(),
                estimator: self.estimator.clone(),
                mean: d.mean,
                stderr: d.stderr,
                ratio: ratio_scale.map(|s| s * d.mean),
                gamma,
            })
            .collect();
        let w = self.worst();
        out.push(RiskRow {
            n: self.n,
            density: "sup".into(),
            estimator: self.estimator.clone(),
            mean: self.risk,
            stderr: w.stderr,
            ratio: ratio_scale.map(|s| s * self.risk),
            gamma,
        });
        out
    }
}
