//! Random functions `S_{ϑ,n}(x) = Σ_m Σ_j ϑ_{m,j} e_j(v_m(x)) I_η(v_m(x))`.

use rand::Rng;
use rand_distr::StandardNormal;

use super::design::PriorDesign;
use super::kernel::{e_basis, KernelProfile};

/// Law of the multipliers `ζ_{m,j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorSampling {
    Gaussian,
    /// Gaussian conditioned on `ζ² ≤ d_n`, by rejection.
    Truncated,
}

/// One draw of the prior.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorDraw {
    /// `ϑ_{m,j} = t_{m,j} ζ_{m,j}`.
    pub theta: Vec<Vec<f64>>,
    pub h: f64,
    pub profile: KernelProfile,
    /// Whether every `ζ²_{m,j} ≤ d_n`.
    pub in_truncation_event: bool,
}

/// Block `m` (0-based) and local coordinate `v_m(x)` for `x`, if `x` falls
/// in a block window `|v_m(x)| ≤ 1`.
pub fn locate(x: f64, h: f64, blocks: usize) -> Option<(usize, f64)> {
    let m = (x / (2.0 * h)).round();
    if m < 1.0 || m > blocks as f64 {
        return None;
    }
    let v = (x - 2.0 * m * h) / h;
    (v.abs() <= 1.0).then_some((m as usize - 1, v))
}

impl PriorDraw {
    pub fn blocks(&self) -> usize {
        self.theta.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match locate(x, self.h, self.blocks()) {
            None => 0.0,
            Some((m, v)) => {
                let i = self.profile.eval(v);
                if i == 0.0 {
                    return 0.0;
                }
                let q: f64 = self.theta[m]
                    .iter()
                    .enumerate()
                    .map(|(j, th)| th * e_basis(j + 1, v).expect("j ≥ 1"))
                    .sum();
                q * i
            }
        }
    }

    /// `sup_x |S(x)|` over `xs`.
    pub fn sup_norm_on(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|x| self.eval(*x).abs()).fold(0.0, f64::max)
    }
}

fn draw_zeta<R: Rng + ?Sized>(sampling: PriorSampling, limit: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if sampling == PriorSampling::Gaussian || z * z <= limit {
            return z;
        }
    }
}

/// Draws `ζ` row by row and returns the resulting function.
pub fn prior_draw<R: Rng + ?Sized>(
    design: &PriorDesign,
    profile: &KernelProfile,
    sampling: PriorSampling,
    rng: &mut R,
) -> PriorDraw {
    let mut inside = true;
    let theta = design
        .t
        .iter()
        .map(|row| {
            row.iter()
                .map(|t| {
                    let z = draw_zeta(sampling, design.d, rng);
                    inside &= z * z <= design.d;
                    t * z
                })
                .collect()
        })
        .collect();
    PriorDraw {
        theta,
        h: design.h,
        profile: *profile,
        in_truncation_event: inside,
    }
}
