use crate::error::Result;
use crate::models::ScaleFamily;
use crate::rng::StreamKey;

use super::bound::{bayes_lower_bound, bound_components};
use super::design::{build_design, conditions_check, NRule};
use super::kernel::KernelProfile;
use super::prior::PriorSampling;

/// Settings for a lower-bound ladder over several `n`.
#[derive(Clone, Debug)]
pub struct LadderConfig {
    pub k: u32,
    pub r: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub rule: NRule,
    pub scale: ScaleFamily,
    pub ns: Vec<usize>,
    pub draws: usize,
    pub sampling: PriorSampling,
    pub eps0: f64,
    pub seed: u64,
}

impl LadderConfig {
    /// `k = 1`, `r = 1`, `ε = 0.1`, `η = 0.05`, constant `g ≡ 1`, 200 draws.
    pub fn standard(ns: Vec<usize>, seed: u64) -> Self {
        Self {
            k: 1,
            r: 1.0,
            epsilon: 0.1,
            eta: 0.05,
            rule: NRule::desk(),
            scale: ScaleFamily::constant(1.0).expect("positive constant"),
            ns,
            draws: 200,
            sampling: PriorSampling::Gaussian,
            eps0: 0.5,
            seed,
        }
    }
}

/// One `(n, quantity, value)` record.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderRow {
    pub n: usize,
    pub quantity: &'static str,
    pub value: f64,
}

/// Builds the design, its condition diagnostics, the bound components and
/// the Bayes bound at every `n` of the config.
pub fn ladder(config: &LadderConfig) -> Result<Vec<LadderRow>> {
    let profile = KernelProfile::new(config.eta)?;
    let mut rows = Vec::new();
    for &n in &config.ns {
        let design = build_design(
            config.k,
            config.r,
            config.epsilon,
            n,
            &config.rule,
            &config.scale,
        )?;
        let cond = conditions_check(&design, config.eps0);
        let key = StreamKey::new(config.seed, &[n as u64]);
        let comp = bound_components(
            &design,
            &profile,
            &config.scale,
            config.draws,
            config.sampling,
            key,
        )?;
        let lb = bayes_lower_bound(&design, &comp)?;
        let values: [(&'static str, f64); 19] = [
            ("harmonics", design.harmonics as f64),
            ("bandwidth", design.h),
            ("blocks", design.blocks as f64),
            ("budget", design.budget),
            ("t_star", design.t_star),
            ("a2_sum", cond.a2_sum),
            ("a2_sup", cond.a2_sup),
            ("a3_sum", cond.a3_sum),
            ("a3_target", cond.a3_target),
            ("a3_pass", cond.a3_pass as u8 as f64),
            ("a4_sum", cond.a4_sum),
            ("f_ratio_deviation", comp.f_ratio_deviation(&design)),
            ("b_ratio_max", comp.b_ratio_max()),
            ("xi_fraction", comp.xi_fraction),
            ("double_sum", lb.double_sum),
            ("normalized_bound", lb.normalized),
            ("tau_form", lb.tau_form),
            ("tau_normalized", lb.tau_normalized),
            ("target", lb.target),
        ];
        rows.extend(
            values
                .into_iter()
                .map(|(quantity, value)| LadderRow { n, quantity, value }),
        );
    }
    Ok(rows)
}
