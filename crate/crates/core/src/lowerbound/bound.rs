//! Van Trees type bound and its ingredients for the kernel prior.

use rayon::prelude::*;

use crate::basis::SobolevBall;
use crate::error::{invalid, Result};
use crate::models::ScaleFamily;
use crate::risk::{gamma_k, rate};
use crate::rng::StreamKey;

use super::design::PriorDesign;
use super::kernel::{e_bar, e_basis, KernelProfile};
use super::prior::{locate, prior_draw, PriorSampling};
use super::waterfill::tau_bar;

const CHUNK: usize = 8;

/// `Λ² / (F + B + I)`.
pub fn van_trees_bound(lambda: f64, f: f64, b: f64, i_prior: f64) -> Result<f64> {
    let den = f + b + i_prior;
    if !(den > 0.0 && den.is_finite()) {
        return Err(invalid(
            "van_trees.denominator",
            format!("F + B + I must be positive, got {den}"),
        ));
    }
    Ok(lambda * lambda / den)
}

/// `F_{m,j}`, `B_{m,j}` and the prior information for every block and harmonic.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundComponents {
    pub f: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    /// `t_{m,j}^{−2}`.
    pub fisher_prior: Vec<Vec<f64>>,
    /// `√h ē_j(I_η)`.
    pub lambda_grad: Vec<f64>,
    /// `ē_j(I²_η)`.
    pub e_bar_sq: Vec<f64>,
    /// `F_{m,j}/(nh)`.
    pub f_ratio: Vec<Vec<f64>>,
    /// `B_{m,j}/(nh)`.
    pub b_ratio: Vec<Vec<f64>>,
    /// Share of prior draws inside the truncation event.
    pub xi_fraction: f64,
    pub draws: usize,
}

impl BoundComponents {
    /// `max_{m,j} |F_{m,j}/(nh) − ē_j(I²) g₀^{−2}(x̃_m)|` relative to the limit.
    pub fn f_ratio_deviation(&self, design: &PriorDesign) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, row) in self.f_ratio.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = self.e_bar_sq[j] / design.g0_sq[m];
                worst = worst.max((v / target - 1.0).abs());
            }
        }
        worst
    }

    pub fn b_ratio_max(&self) -> f64 {
        self.b_ratio
            .iter()
            .flatten()
            .fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// Design points `x_i = i/n` that fall inside a block, with `D_{m,j}(x_i)`.
struct BlockTable {
    /// Per block: indices `i` (1-based) of the points it covers.
    points: Vec<Vec<usize>>,
    /// Per block: `D_{m,j}(x_i)` laid out point-major.
    values: Vec<Vec<f64>>,
}

fn block_table(design: &PriorDesign, profile: &KernelProfile) -> BlockTable {
    let nh = design.harmonics;
    let mut points = vec![Vec::new(); design.blocks];
    let mut values = vec![Vec::new(); design.blocks];
    for i in 1..=design.n {
        let x = i as f64 / design.n as f64;
        if let Some((m, v)) = locate(x, design.h, design.blocks) {
            let w = profile.eval(v);
            if w > 0.0 {
                points[m].push(i);
                values[m].extend((1..=nh).map(|j| e_basis(j, v).expect("j ≥ 1") * w));
            }
        }
    }
    BlockTable { points, values }
}

struct Partial {
    /// `Σ_draws g^{−2}(x_i)` over block points, block-major.
    inv_g2: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    inside: usize,
}

impl Partial {
    fn zero(table: &BlockTable, blocks: usize, harmonics: usize) -> Self {
        Self {
            inv_g2: table.points.iter().map(|p| vec![0.0; p.len()]).collect(),
            b: vec![vec![0.0; harmonics]; blocks],
            inside: 0,
        }
    }

    fn add(&mut self, other: &Partial) {
        for (a, b) in self.inv_g2.iter_mut().zip(&other.inv_g2) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.b.iter_mut().zip(&other.b) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.inside += other.inside;
    }
}

/// Estimates `F_{m,j} = Σ_i D²_{m,j}(x_i) E g^{−2}(x_i, S)` and
/// `B_{m,j} = ½ Σ_i E(L̃_{m,j}(x_i, S)/g²(x_i, S))²` from `draws` prior draws.
///
/// `L̃_{m,j}(x, S) = G_y(x, S(x)) D_{m,j}(x) + ∫ V̇(S) D_{m,j}`, the integral
/// taken as a Riemann sum on the design points. Draw `r` uses stream
/// `key.child(&[r])`; partial sums are formed over fixed chunks of draws and
/// combined in order, so the result does not depend on the thread count.
pub fn bound_components(
    design: &PriorDesign,
    profile: &KernelProfile,
    scale: &ScaleFamily,
    draws: usize,
    sampling: PriorSampling,
    key: StreamKey,
) -> Result<BoundComponents> {
    if draws == 0 {
        return Err(invalid("lowerbound.draws", "need at least one prior draw"));
    }
    let (blocks, harmonics) = (design.blocks, design.harmonics);
    let n = design.n;
    let nf = n as f64;
    let table = block_table(design, profile);
    let general = scale.as_general();
    let s_dependent = !scale.is_s_independent();
    let has_v = general.v_prime_star != 0.0;

    let run_chunk = |c: usize| -> Partial {
        let mut acc = Partial::zero(&table, blocks, harmonics);
        let mut s = vec![0.0; n + 1];
        for r in c * CHUNK..((c + 1) * CHUNK).min(draws) {
            let mut rng = key.child(&[r as u64]).rng();
            let draw = prior_draw(design, profile, sampling, &mut rng);
            acc.inside += draw.in_truncation_event as usize;
            s.iter_mut().for_each(|v| *v = 0.0);
            for m in 0..blocks {
                for (p, &i) in table.points[m].iter().enumerate() {
                    let d = &table.values[m][p * harmonics..(p + 1) * harmonics];
                    s[i] = draw.theta[m].iter().zip(d).map(|(t, d)| t * d).sum();
                }
            }
            let int_v = if has_v {
                (1..=n).map(|i| (general.v)(s[i])).sum::<f64>() / nf
            } else {
                0.0
            };
            let g2 = |i: usize| (general.g)(i as f64 / nf, s[i]) + int_v;
            for m in 0..blocks {
                for (p, &i) in table.points[m].iter().enumerate() {
                    acc.inv_g2[m][p] += 1.0 / g2(i);
                }
            }
            if !s_dependent {
                continue;
            }
            let w: Vec<f64> = (0..=n)
                .map(|i| if i == 0 { 0.0 } else { g2(i).powi(-2) })
                .collect();
            let w_total: f64 = w.iter().sum();
            for m in 0..blocks {
                let pts = &table.points[m];
                let w_block: f64 = pts.iter().map(|&i| w[i]).sum();
                for j in 0..harmonics {
                    let dj = |p: usize| table.values[m][p * harmonics + j];
                    let c = if has_v {
                        pts.iter()
                            .enumerate()
                            .map(|(p, &i)| (general.v_dot)(s[i]) * dj(p))
                            .sum::<f64>()
                            / nf
                    } else {
                        0.0
                    };
                    let local: f64 = pts
                        .iter()
                        .enumerate()
                        .map(|(p, &i)| {
                            let l = (general.g_y)(i as f64 / nf, s[i]) * dj(p) + c;
                            l * l * w[i]
                        })
                        .sum();
                    acc.b[m][j] += 0.5 * (local + c * c * (w_total - w_block));
                }
            }
        }
        acc
    };

    let chunks = draws.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks).into_par_iter().map(run_chunk).collect();
    let mut total = Partial::zero(&table, blocks, harmonics);
    for p in &partials {
        total.add(p);
    }

    let df = draws as f64;
    let nh = nf * design.h;
    let f: Vec<Vec<f64>> = (0..blocks)
        .map(|m| {
            (0..harmonics)
                .map(|j| table.inv_g2_weighted(m, j, harmonics, &total.inv_g2[m]) / df)
                .collect()
        })
        .collect();
    let b: Vec<Vec<f64>> = total
        .b
        .iter()
        .map(|row| row.iter().map(|v| v / df).collect())
        .collect();
    let fisher_prior = design
        .t
        .iter()
        .map(|row| row.iter().map(|t| t.powi(-2)).collect())
        .collect();
    let i_fn = |v: f64| profile.eval(v);
    let lambda_grad = (1..=harmonics)
        .map(|j| Ok(design.h.sqrt() * e_bar(j, i_fn)?))
        .collect::<Result<Vec<f64>>>()?;
    let e_bar_sq = (1..=harmonics)
        .map(|j| e_bar(j, |v| i_fn(v).powi(2)))
        .collect::<Result<Vec<f64>>>()?;
    let ratio = |mat: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        mat.iter()
            .map(|row| row.iter().map(|v| v / nh).collect())
            .collect()
    };
    Ok(BoundComponents {
        f_ratio: ratio(&f),
        b_ratio: ratio(&b),
        f,
        b,
        fisher_prior,
        lambda_grad,
        e_bar_sq,
        xi_fraction: total.inside as f64 / df,
        draws,
    })
}

impl BlockTable {
    fn inv_g2_weighted(&self, m: usize, j: usize, harmonics: usize, inv_g2: &[f64]) -> f64 {
        inv_g2
            .iter()
            .enumerate()
            .map(|(p, w)| self.values[m][p * harmonics + j].powi(2) * w)
            .sum()
    }
}

/// The Bayes risk bound in both forms.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBound {
    pub n: usize,
    /// `Σ_m Σ_j h ē²_j(I_η) / (F_{m,j} + B_{m,j} + t^{−2}_{m,j})`.
    pub double_sum: f64,
    /// `n^{2k/(2k+1)} · double_sum / target`.
    pub normalized: f64,
    /// `n^{−1/(2k+1)} Σ_m g₀²(x̃_m) Σ_j τ̄(κ²_{m,j})`.
    pub tau_form: f64,
    /// `tau_form / target`.
    pub tau_normalized: f64,
    /// `(1−ε)^{1/(2k+1)} γ_k(S₀)`.
    pub target: f64,
    /// `n^{2k/(2k+1)} · double_sum / tau_form`.
    pub form_ratio: f64,
}

pub fn bayes_lower_bound(design: &PriorDesign, components: &BoundComponents) -> Result<LowerBound> {
    let mut double_sum = 0.0;
    for m in 0..design.blocks {
        for j in 0..design.harmonics {
            let lam = components.lambda_grad[j];
            double_sum += van_trees_bound(
                lam,
                components.f[m][j],
                components.b[m][j],
                components.fisher_prior[m][j],
            )?;
        }
    }
    let p = 2.0 * design.k as f64 + 1.0;
    let nf = design.n as f64;
    let tau_sum: f64 = (0..design.blocks)
        .map(|m| {
            let inner: f64 = (0..design.harmonics)
                .map(|j| tau_bar(design.kappa_sq(m, j)))
                .sum();
            design.g0_sq[m] * inner
        })
        .sum();
    let tau_form = nf.powf(-1.0 / p) * tau_sum;
    let ball = SobolevBall::new(design.k, design.r)?;
    let target = (1.0 - design.epsilon).powf(1.0 / p) * gamma_k(&ball, design.varsigma0)?;
    let scaled = rate(design.n, design.k) * double_sum;
    Ok(LowerBound {
        n: design.n,
        double_sum,
        normalized: scaled / target,
        tau_form,
        tau_normalized: tau_form / target,
        target,
        form_ratio: if tau_form > 0.0 {
            scaled / tau_form
        } else {
            f64::NAN
        },
    })
}

/// Range of `ē²_j(I)(y+1)/(ē_j(I²)y+1)` over `y ≥ 0` and `j ≤ harmonics`:
/// the per-term factor between the double sum with exact components and the
/// `τ̄` form.
pub fn distortion_interval(profile: &KernelProfile, harmonics: usize) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 1..=harmonics {
        let a = e_bar(j, |v| profile.eval(v))?.powi(2);
        let b = e_bar(j, |v| profile.eval(v).powi(2))?;
        lo = lo.min(a * (1.0f64).min(1.0 / b));
        hi = hi.max(a * (1.0f64).max(1.0 / b));
    }
    Ok((lo, hi))
}
