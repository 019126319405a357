//! The prior design: bandwidth, block count, water-filled prior scales and
//! the finite-n condition diagnostics.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::models::{varsigma, ScaleFamily};

use super::waterfill::waterfill;

/// How the number of harmonics per block `N_n` grows with `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NRule {
    Fixed(usize),
    /// `N = ⌈scale · ln^power n⌉ + offset`.
    LogPower {
        power: f64,
        scale: f64,
        offset: usize,
    },
}

impl NRule {
    /// `⌈ln⁴ n⌉ + 1`. Leaves no room for a single block below astronomically
    /// large `n`.
    pub fn asymptotic() -> Self {
        Self::LogPower {
            power: 4.0,
            scale: 1.0,
            offset: 1,
        }
    }

    /// `⌈ln n / 3⌉`: 3 at `n = 10³`, 4 at `10⁴` and `10⁵`.
    pub fn desk() -> Self {
        Self::LogPower {
            power: 1.0,
            scale: 1.0 / 3.0,
            offset: 0,
        }
    }

    pub fn count(&self, n: usize) -> usize {
        match *self {
            Self::Fixed(c) => c,
            Self::LogPower {
                power,
                scale,
                offset,
            } => (scale * (n as f64).ln().powf(power)).ceil().max(0.0) as usize + offset,
        }
    }

    /// `asymptotic`, `desk`, `fixed:N` or `log:power,scale,offset`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || invalid("lowerbound.n_rule", format!("cannot parse `{text}`"));
        match t {
            "asymptotic" => return Ok(Self::asymptotic()),
            "desk" => return Ok(Self::desk()),
            _ => {}
        }
        if let Some(v) = t.strip_prefix("fixed:") {
            let c: usize = v.trim().parse().map_err(|_| bad())?;
            if c == 0 {
                return Err(invalid("lowerbound.n_rule", "N must be at least 1"));
            }
            return Ok(Self::Fixed(c));
        }
        if let Some(v) = t.strip_prefix("log:") {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let power: f64 = parts[0].parse().map_err(|_| bad())?;
            let scale: f64 = parts[1].parse().map_err(|_| bad())?;
            let offset: usize = parts[2].parse().map_err(|_| bad())?;
            if !(power >= 0.0 && scale > 0.0) {
                return Err(bad());
            }
            return Ok(Self::LogPower {
                power,
                scale,
                offset,
            });
        }
        Err(bad())
    }
}

impl fmt::Display for NRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(c) => write!(f, "fixed:{c}"),
            Self::LogPower {
                power,
                scale,
                offset,
            } => write!(f, "log:{power},{scale},{offset}"),
        }
    }
}

/// `(c*_ε, v*_ε, h_*)` for smoothness `k`, radius `r` and `ς(S₀)`.
pub fn design_constants(k: u32, r: f64, epsilon: f64, varsigma0: f64) -> (f64, f64, f64) {
    let kf = k as f64;
    let p = 2.0 * kf + 1.0;
    let c = 2f64.powf(p) * (1.0 - epsilon) * r / (PI.powi(2 * k as i32) * varsigma0);
    let v = kf / (c * (kf + 1.0) * p);
    (c, v, v.powf(1.0 / p))
}

/// `R*_n = 2^{2k+1}(1−ε) r n h^{2k+1} / (π^{2k} ĝ₀)`.
pub fn budget_for(k: u32, r: f64, epsilon: f64, n: usize, h: f64, g0_hat: f64) -> f64 {
    let p = 2.0 * k as f64 + 1.0;
    2f64.powf(p) * (1.0 - epsilon) * r * n as f64 * h.powf(p) / (PI.powi(2 * k as i32) * g0_hat)
}

/// The full prior construction at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorDesign {
    pub k: u32,
    pub r: f64,
    pub epsilon: f64,
    pub n: usize,
    /// `N_n`.
    pub harmonics: usize,
    /// `h_n = h_* n^{−1/(2k+1)} N_n`.
    pub h: f64,
    pub h_star: f64,
    pub c_star: f64,
    pub v_star: f64,
    /// `M_n = ⌊1/(2h_n)⌋ − 1`.
    pub blocks: usize,
    /// `x̃_m = 2mh_n`, `m = 1..=M_n`.
    pub centers: Vec<f64>,
    /// `g₀²(x̃_m)`.
    pub g0_sq: Vec<f64>,
    /// `ĝ₀ = 2h_n Σ_m g₀²(x̃_m)`.
    pub g0_hat: f64,
    /// `ς(S₀)`.
    pub varsigma0: f64,
    /// `R*_n`.
    pub budget: f64,
    /// `y*_j(R*_n)`.
    pub y_star: Vec<f64>,
    /// `t[m][j] = g₀(x̃_m) √(y*_j / (n h_n))`.
    pub t: Vec<Vec<f64>>,
    /// `d_n = √N_n`.
    pub d: f64,
    /// `t*_n = max_m Σ_j t_{m,j}`.
    pub t_star: f64,
}

impl PriorDesign {
    /// `κ²_{m,j} = n h g₀^{−2}(x̃_m) t²_{m,j}`.
    pub fn kappa_sq(&self, m: usize, j: usize) -> f64 {
        self.n as f64 * self.h * self.t[m][j].powi(2) / self.g0_sq[m]
    }

    /// Recomputes `t*_n` after `t` was edited by hand.
    pub fn refresh_t_star(&mut self) {
        self.t_star = self
            .t
            .iter()
            .map(|row| row.iter().sum::<f64>())
            .fold(0.0, f64::max);
    }
}

/// Builds the design with `N_n` from `rule` and `g₀ = g(·, 0)` from `scale`.
pub fn build_design(
    k: u32,
    r: f64,
    epsilon: f64,
    n: usize,
    rule: &NRule,
    scale: &ScaleFamily,
) -> Result<PriorDesign> {
    if k == 0 {
        return Err(invalid("lowerbound.k", "must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(
            "lowerbound.r",
            format!("must be positive, got {r}"),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(
            "lowerbound.epsilon",
            format!("must lie in (0, 1), got {epsilon}"),
        ));
    }
    if n < 3 {
        return Err(Error::InvalidSampleCount(n));
    }
    let harmonics = rule.count(n);
    if harmonics == 0 {
        return Err(invalid(
            "lowerbound.n_rule",
            format!("gives N = 0 at n = {n}"),
        ));
    }
    let zero = |_: f64| 0.0;
    let varsigma0 = varsigma(scale, &zero);
    let (c_star, v_star, h_star) = design_constants(k, r, epsilon, varsigma0);
    let p = 2.0 * k as f64 + 1.0;
    let h = h_star * (n as f64).powf(-1.0 / p) * harmonics as f64;
    let raw_blocks = (1.0 / (2.0 * h)).floor() as i64 - 1;
    if raw_blocks < 1 {
        return Err(Error::EmptyDesign {
            blocks: raw_blocks,
            bandwidth: h,
        });
    }
    let blocks = raw_blocks as usize;
    let bound = scale.bind(&zero);
    let centers: Vec<f64> = (1..=blocks).map(|m| 2.0 * m as f64 * h).collect();
    let g0_sq: Vec<f64> = centers.iter().map(|x| bound.g2(*x)).collect();
    let g0_hat = 2.0 * h * g0_sq.iter().sum::<f64>();
    let budget = budget_for(k, r, epsilon, n, h, g0_hat);
    let y_star = waterfill(harmonics, k, budget)?;
    let t: Vec<Vec<f64>> = g0_sq
        .iter()
        .map(|g2| {
            y_star
                .iter()
                .map(|y| (g2 * y / (n as f64 * h)).sqrt())
                .collect()
        })
        .collect();
    let mut design = PriorDesign {
        k,
        r,
        epsilon,
        n,
        harmonics,
        h,
        h_star,
        c_star,
        v_star,
        blocks,
        centers,
        g0_sq,
        g0_hat,
        varsigma0,
        budget,
        y_star,
        t,
        d: (harmonics as f64).sqrt(),
        t_star: 0.0,
    };
    design.refresh_t_star();
    Ok(design)
}

/// Finite-n values of the quantities in conditions A₂–A₄.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditions {
    /// `d_n h^{1−2k} ΣΣ t² j^{2(k−1)}`.
    pub a2_sum: f64,
    /// `√d_n t*_n`.
    pub a2_sup: f64,
    /// `h^{1−2k} ΣΣ t² j^{2k}`.
    pub a3_sum: f64,
    /// `(1−ε) r (2/π)^{2k}`.
    pub a3_target: f64,
    /// `a3_sum ≤ a3_target·(1 + 10⁻²)`.
    pub a3_pass: bool,
    /// `h^{−(4k−2+ε₀)} ΣΣ t⁴ j^{4k}`.
    pub a4_sum: f64,
    pub eps0: f64,
}

pub fn conditions_check(design: &PriorDesign, eps0: f64) -> Conditions {
    let k = design.k as i32;
    let h = design.h;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for row in &design.t {
        for (i, t) in row.iter().enumerate() {
            let j = (i + 1) as f64;
            let t2 = t * t;
            s2 += t2 * j.powi(2 * (k - 1));
            s3 += t2 * j.powi(2 * k);
            s4 += t2 * t2 * j.powi(4 * k);
        }
    }
    let a3_sum = s3 / h.powi(2 * k - 1);
    let a3_target = (1.0 - design.epsilon) * design.r * (2.0 / PI).powi(2 * k);
    Conditions {
        a2_sum: design.d * s2 / h.powi(2 * k - 1),
        a2_sup: design.d.sqrt() * design.t_star,
        a3_sum,
        a3_target,
        a3_pass: a3_sum <= a3_target * (1.0 + 1e-2),
        a4_sum: s4 / h.powf(4.0 * k as f64 - 2.0 + eps0),
        eps0,
    }
}

/// `F(x) = 1/x − (2k+1)/((k+1)²(c*(2k+1)x^{2k+2} + x))`.
pub fn f_profile(x: f64, k: u32, c_star: f64) -> f64 {
    let kf = k as f64;
    let p = 2.0 * kf + 1.0;
    1.0 / x - p / ((kf + 1.0).powi(2) * (c_star * p * x.powf(p + 1.0) + x))
}

/// `F'(x) = −(c*(2k+1)(k+1)x^{2k+1} − k)² / ((k+1)²(c*(2k+1)x^{2k+2} + x)²)`.
pub fn f_profile_derivative(x: f64, k: u32, c_star: f64) -> f64 {
    let kf = k as f64;
    let p = 2.0 * kf + 1.0;
    let num = (c_star * p * (kf + 1.0) * x.powf(p) - kf).powi(2);
    let den = ((kf + 1.0) * (c_star * p * x.powf(p + 1.0) + x)).powi(2);
    -num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SobolevBall;
    use crate::risk::gamma_k;

    fn unit() -> ScaleFamily {
        ScaleFamily::constant(1.0).unwrap()
    }

    #[test]
    fn worked_constants() {
        let (c, v, h) = design_constants(1, 1.0, 0.5, 1.0);
        assert!((c - 0.405_284_734_569_351_1).abs() < 1e-15);
        assert!((v - 0.411_233_516_712_056_6).abs() < 1e-15);
        assert!((h - 0.743_640_158_150_237_2).abs() < 1e-15);
        let (c, v, h) = design_constants(1, 1.0, 0.1, 1.0);
        assert!((c - 0.729_512_522_224_832).abs() < 1e-15);
        assert!((v - 0.228_463_064_840_031_4).abs() < 1e-15);
        assert!((h - 0.611_324_778_995_711_8).abs() < 1e-15);
    }

    #[test]
    fn n_rules() {
        let desk = NRule::desk();
        assert_eq!([1000, 10_000, 100_000].map(|n| desk.count(n)), [3, 4, 4]);
        assert_eq!(NRule::asymptotic().count(10_000), 7198);
        assert_eq!(NRule::parse("fixed:5").unwrap(), NRule::Fixed(5));
        assert_eq!(
            NRule::parse(&NRule::desk().to_string()).unwrap(),
            NRule::desk()
        );
        assert!(NRule::parse("fixed:0").is_err());
        assert!(NRule::parse("cubic").is_err());
    }

    #[test]
    fn asymptotic_rule_has_no_blocks_at_desk_scale() {
        let err = build_design(1, 1.0, 0.1, 100_000, &NRule::asymptotic(), &unit()).unwrap_err();
        assert!(matches!(err, Error::EmptyDesign { .. }));
    }

    #[test]
    fn a3_identity_holds() {
        for n in [1000, 10_000, 100_000] {
            let d = build_design(1, 1.0, 0.1, n, &NRule::desk(), &unit()).unwrap();
            let c = conditions_check(&d, 0.5);
            assert!((c.a3_sum / c.a3_target - 1.0).abs() < 1e-10, "n={n}");
            assert!(c.a3_pass);
            assert_eq!(d.t.len(), d.blocks);
            assert!(d
                .t
                .iter()
                .all(|row| row.len() == d.harmonics && row.iter().all(|v| *v > 0.0)));
            assert!(d.h > 0.0 && d.h < 0.5);
        }
        let gq = ScaleFamily::goldfeld_quandt(1.0, 2.0, 0.3).unwrap();
        let d = build_design(2, 3.0, 0.3, 1_000_000, &NRule::Fixed(2), &gq).unwrap();
        let c = conditions_check(&d, 0.5);
        assert!((c.a3_sum / c.a3_target - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sup_term_decreases_along_the_ladder() {
        let sups: Vec<f64> = [1000, 10_000, 100_000]
            .iter()
            .map(|&n| {
                let d = build_design(1, 1.0, 0.1, n, &NRule::desk(), &unit()).unwrap();
                conditions_check(&d, 0.5).a2_sup
            })
            .collect();
        assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
    }

    #[test]
    fn larger_epsilon_shrinks_the_budget() {
        let d = build_design(1, 1.0, 0.1, 10_000, &NRule::Fixed(4), &unit()).unwrap();
        assert!(
            (budget_for(1, 1.0, 0.1, 10_000, d.h, d.g0_hat) - d.budget).abs() < 1e-12 * d.budget
        );
        let seq: Vec<f64> = [0.1, 0.3, 0.5, 0.9]
            .iter()
            .map(|&e| budget_for(1, 1.0, e, 10_000, d.h, d.g0_hat))
            .collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn zero_design_passes_trivially() {
        let mut d = build_design(1, 1.0, 0.1, 10_000, &NRule::desk(), &unit()).unwrap();
        for row in &mut d.t {
            row.fill(0.0);
        }
        d.refresh_t_star();
        let c = conditions_check(&d, 0.5);
        assert_eq!(
            (c.a2_sum, c.a2_sup, c.a3_sum, c.a4_sum),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(c.a3_pass);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_design(1, 1.0, 1.0, 10_000, &NRule::desk(), &unit()).is_err());
        assert!(build_design(0, 1.0, 0.1, 10_000, &NRule::desk(), &unit()).is_err());
        assert!(build_design(1, 1.0, 0.1, 10, &NRule::Fixed(50), &unit()).is_err());
    }

    #[test]
    fn profile_is_decreasing_and_peaks_at_h_star() {
        for k in 1..=3u32 {
            for eps in [0.1, 0.5] {
                let (c, _, h_star) = design_constants(k, 1.0, eps, 1.0);
                let xs: Vec<f64> = (0..400)
                    .map(|i| h_star * (1.0 + i as f64 / 100.0))
                    .collect();
                for x in &xs {
                    let fd = (f_profile(x + 1e-6, k, c) - f_profile(x - 1e-6, k, c)) / 2e-6;
                    assert!(fd <= 1e-6);
                    assert!((fd - f_profile_derivative(*x, k, c)).abs() < 1e-5 * (1.0 + fd.abs()));
                }
                let top = f_profile(h_star, k, c);
                assert!(xs.iter().all(|x| f_profile(*x, k, c) <= top + 1e-12));
                let kf = k as f64;
                let (_, v, _) = design_constants(k, 1.0, eps, 1.0);
                assert!((top - kf / (kf + 1.0) * v.powf(-1.0 / (2.0 * kf + 1.0))).abs() < 1e-12);
                // ς/2 · F(h_*) = (1−ε)^{1/(2k+1)} γ_k(S₀).
                let ball = SobolevBall::new(k, 1.0).unwrap();
                let target =
                    (1.0 - eps).powf(1.0 / (2.0 * kf + 1.0)) * gamma_k(&ball, 1.0).unwrap();
                assert!((0.5 * top - target).abs() < 1e-12, "k={k} eps={eps}");
            }
        }
    }
}
