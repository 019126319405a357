//! Scale functions `g²(x, S) = G(x, S(x)) + ∫₀¹ V(S(t)) dt`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::quadrature;

type Surface = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The general family with `G ≥ c₀ > 0` and `V ≥ 0`.
#[derive(Clone)]
pub struct GeneralScale {
    pub name: String,
    pub g: Surface,
    /// `∂G/∂y`.
    pub g_y: Surface,
    pub v: Curve,
    /// `V̇`.
    pub v_dot: Curve,
    /// `G'_* = sup |G_y(x,y)|/|y|`.
    pub g_prime_star: f64,
    /// `v'_* = sup |V̇(y)|/(1+|y|)`.
    pub v_prime_star: f64,
    /// Lower bound `c₀` of `G`.
    pub floor: f64,
}

impl fmt::Debug for GeneralScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralScale")
            .field("name", &self.name)
            .field("g_prime_star", &self.g_prime_star)
            .field("v_prime_star", &self.v_prime_star)
            .finish()
    }
}

impl GeneralScale {
    /// `G(x,y) = c₀ + c₁x + c₂y²`, `V(y) = c₃y²`.
    pub fn polynomial(c0: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if !(c0 > 0.0) {
            return Err(invalid(
                "model.scale.c0",
                format!("must be positive, got {c0}"),
            ));
        }
        for (name, c) in [
            ("model.scale.c1", c1),
            ("model.scale.c2", c2),
            ("model.scale.c3", c3),
        ] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(invalid(name, format!("must be non-negative, got {c}")));
            }
        }
        Ok(Self {
            name: format!("poly({c0},{c1},{c2},{c3})"),
            g: Arc::new(move |x, y| c0 + c1 * x + c2 * y * y),
            g_y: Arc::new(move |_, y| 2.0 * c2 * y),
            v: Arc::new(move |y| c3 * y * y),
            v_dot: Arc::new(move |y| 2.0 * c3 * y),
            g_prime_star: 2.0 * c2,
            v_prime_star: 2.0 * c3,
            floor: c0,
        })
    }
}

/// Scale family for the noise level `σ_j = g(x_j, S)`.
#[derive(Clone, Debug)]
pub enum ScaleFamily {
    /// `g² = c₀ + c₁x + c₂S²(x)`.
    GoldfeldQuandt {
        c0: f64,
        c1: f64,
        c2: f64,
    },
    General(GeneralScale),
}

impl ScaleFamily {
    pub fn goldfeld_quandt(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        GeneralScale::polynomial(c0, c1, c2, 0.0)?;
        Ok(Self::GoldfeldQuandt { c0, c1, c2 })
    }

    pub fn constant(c0: f64) -> Result<Self> {
        Self::goldfeld_quandt(c0, 0.0, 0.0)
    }

    /// The general representation; Goldfeld-Quandt maps to `c₃ = 0`.
    pub fn as_general(&self) -> GeneralScale {
        match self {
            Self::GoldfeldQuandt { c0, c1, c2 } => {
                GeneralScale::polynomial(*c0, *c1, *c2, 0.0).expect("validated at construction")
            }
            Self::General(g) => g.clone(),
        }
    }

    /// True when `g²` ignores `S`.
    pub fn is_s_independent(&self) -> bool {
        match self {
            Self::GoldfeldQuandt { c2, .. } => *c2 == 0.0,
            Self::General(g) => g.g_prime_star == 0.0 && g.v_prime_star == 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::GoldfeldQuandt { c0, c1, c2 } => format!("gq({c0},{c1},{c2})"),
            Self::General(g) => g.name.clone(),
        }
    }

    /// `C* = G'_* + v'_*`.
    pub fn h3_constant(&self) -> f64 {
        let g = self.as_general();
        g.g_prime_star + g.v_prime_star
    }

    /// `g²` with the global integral term precomputed for `s`.
    pub fn bind<'a>(&self, s: &'a (dyn Fn(f64) -> f64 + Sync)) -> BoundScale<'a> {
        let general = self.as_general();
        let v = general.v.clone();
        let integral_v = quadrature::integrate(|t| v(s(t)), 0.0, 1.0);
        BoundScale {
            general,
            s,
            integral_v,
        }
    }
}

/// `g²(·, S)` for one fixed `S`.
pub struct BoundScale<'a> {
    general: GeneralScale,
    s: &'a (dyn Fn(f64) -> f64 + Sync),
    integral_v: f64,
}

impl BoundScale<'_> {
    pub fn g2(&self, x: f64) -> f64 {
        (self.general.g)(x, (self.s)(x)) + self.integral_v
    }

    pub fn g(&self, x: f64) -> f64 {
        self.g2(x).sqrt()
    }
}

/// `g(x, S)`.
pub fn scale_value(family: &ScaleFamily, x: f64, s: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    family.bind(s).g(x)
}

/// `ς(S) = ∫₀¹ g²(x, S) dx`.
pub fn varsigma(family: &ScaleFamily, s: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    let bound = family.bind(s);
    quadrature::integrate(|x| bound.g2(x), 0.0, 1.0)
}

/// `|n⁻¹ Σ_j g²(x_j, S) − ς(S)|`.
pub fn riemann_gap(family: &ScaleFamily, s: &(dyn Fn(f64) -> f64 + Sync), n: usize) -> f64 {
    let bound = family.bind(s);
    let mean = (1..=n).map(|j| bound.g2(j as f64 / n as f64)).sum::<f64>() / n as f64;
    let integral = quadrature::integrate(|x| bound.g2(x), 0.0, 1.0);
    (mean - integral).abs()
}

/// Fréchet derivative of `g²(x, ·)` at `S` in direction `f`:
/// `G_y(x, S(x)) f(x) + ∫₀¹ V̇(S(t)) f(t) dt`.
pub fn frechet_l(
    family: &ScaleFamily,
    x: f64,
    s: &(dyn Fn(f64) -> f64 + Sync),
    f: &(dyn Fn(f64) -> f64 + Sync),
) -> f64 {
    let g = family.as_general();
    let local = (g.g_y)(x, s(x)) * f(x);
    if g.v_prime_star == 0.0 {
        return local;
    }
    local + quadrature::integrate(|t| (g.v_dot)(s(t)) * f(t), 0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::phi;
    use crate::basis::SobolevBall;
    use crate::models::functions::{LibraryFunction, RegressionFunction};
    use rand::Rng;

    fn lib() -> Vec<RegressionFunction> {
        let ball = SobolevBall::new(1, 5.0).unwrap();
        LibraryFunction::ALL
            .iter()
            .map(|l| l.build(&ball, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn scale_value_examples() {
        let c = ScaleFamily::goldfeld_quandt(1.0, 0.0, 0.0).unwrap();
        assert_eq!(scale_value(&c, 0.3, &|x| 10.0 * x), 1.0);

        let gq = ScaleFamily::goldfeld_quandt(1.0, 1.0, 1.0).unwrap();
        let v = scale_value(&gq, 0.5, &|_| 2.0);
        assert!((v - 5.5f64.sqrt()).abs() < 1e-15);

        let gen = ScaleFamily::General(GeneralScale::polynomial(1.0, 2.0, 3.0, 4.0).unwrap());
        let v = scale_value(&gen, 0.25, &|_| 0.0);
        assert!((v - 1.5f64.sqrt()).abs() < 1e-15);

        assert!(ScaleFamily::goldfeld_quandt(0.0, 1.0, 1.0).is_err());
        assert!(ScaleFamily::goldfeld_quandt(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn varsigma_examples() {
        let c = ScaleFamily::constant(2.5).unwrap();
        assert!((varsigma(&c, &|x| x) - 2.5).abs() < 1e-14);
        let gq = ScaleFamily::goldfeld_quandt(1.0, 2.0, 0.0).unwrap();
        assert!((varsigma(&gq, &|_| 0.0) - 2.0).abs() < 1e-14);
        let gq = ScaleFamily::goldfeld_quandt(1.0, 0.0, 1.0).unwrap();
        assert!((varsigma(&gq, &|x| phi(2, x).unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn riemann_gap_behaviour() {
        let c = ScaleFamily::constant(1.7).unwrap();
        assert!(riemann_gap(&c, &|x| x, 101) < 1e-13);

        let gq = ScaleFamily::goldfeld_quandt(1.0, 1.0, 0.5).unwrap();
        for f in lib() {
            let s = |x: f64| f.eval(x);
            assert!(riemann_gap(&gq, &s, 1001) <= 10.0 / 1001.0);
            let scaled: Vec<f64> = [101usize, 301, 1001]
                .iter()
                .map(|&n| riemann_gap(&gq, &s, n) * n as f64)
                .collect();
            assert!(scaled.iter().all(|v| *v < 2.0), "{scaled:?}");
        }
    }

    #[test]
    fn frechet_examples() {
        let gq = ScaleFamily::goldfeld_quandt(1.0, 0.3, 0.7).unwrap();
        let s = |x: f64| (3.0 * x).sin();
        let f = |x: f64| x * x + 1.0;
        let l = frechet_l(&gq, 0.4, &s, &f);
        assert!((l - 2.0 * 0.7 * s(0.4) * f(0.4)).abs() < 1e-15);
        assert_eq!(frechet_l(&gq, 0.4, &s, &|_| 0.0), 0.0);

        let gen = ScaleFamily::General(GeneralScale::polynomial(1.0, 0.0, 0.0, 2.0).unwrap());
        assert_eq!(frechet_l(&gen, 0.4, &|_| 0.0, &f), 0.0);
    }

    #[test]
    fn frechet_matches_directional_derivative() {
        let gen = ScaleFamily::General(GeneralScale::polynomial(1.0, 0.5, 0.8, 1.3).unwrap());
        let s = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
        let f = |x: f64| x - 0.3;
        let d = 1e-6;
        let plus = |x: f64| s(x) + d * f(x);
        let minus = |x: f64| s(x) - d * f(x);
        let x = 0.6;
        let fd = (gen.bind(&plus).g2(x) - gen.bind(&minus).g2(x)) / (2.0 * d);
        assert!((fd - frechet_l(&gen, x, &s, &f)).abs() < 1e-6);
    }

    #[test]
    fn positivity_and_boundedness_over_library() {
        let families = [
            ScaleFamily::goldfeld_quandt(1.0, 1.0, 0.5).unwrap(),
            ScaleFamily::General(GeneralScale::polynomial(0.5, 0.2, 1.0, 0.4).unwrap()),
        ];
        for fam in &families {
            let mut worst = f64::INFINITY;
            let mut sup = 0.0f64;
            for f in lib() {
                let s = |x: f64| f.eval(x);
                let bound = fam.bind(&s);
                for i in 0..=1000 {
                    worst = worst.min(bound.g2(i as f64 / 1000.0));
                }
                sup = sup.max(varsigma(fam, &s));
            }
            assert!(worst > 0.0);
            assert!(sup.is_finite());
        }
    }

    #[test]
    fn h3_bound_on_random_triples() {
        let fam = ScaleFamily::General(GeneralScale::polynomial(1.0, 0.5, 0.9, 0.6).unwrap());
        let c_star = fam.h3_constant();
        let funcs = lib();
        let mut rng = crate::rng::StreamKey::new(3, &[]).rng();
        for _ in 0..200 {
            let s = &funcs[rng.random_range(0..funcs.len())];
            let f = &funcs[rng.random_range(0..funcs.len())];
            let scale: f64 = rng.random_range(-2.0..2.0);
            let x: f64 = rng.random();
            let sf = |t: f64| s.eval(t);
            let ff = |t: f64| scale * f.eval(t);
            let l = frechet_l(&fam, x, &sf, &ff);
            let abs1 = quadrature::integrate(|t| ff(t).abs(), 0.0, 1.0);
            let rhs = c_star
                * ((sf(x) * ff(x)).abs()
                    + abs1
                    + s.l2_norm_sq().sqrt() * scale.abs() * f.l2_norm_sq().sqrt());
            assert!(l.abs() <= rhs + 1e-12);
        }
    }

    #[test]
    fn continuity_at_zero_function() {
        let fam = ScaleFamily::General(GeneralScale::polynomial(1.0, 0.5, 0.9, 0.6).unwrap());
        let zero = |_: f64| 0.0;
        let base = fam.bind(&zero);
        for f in lib() {
            let sups: Vec<f64> = [0.1, 0.01, 0.001]
                .iter()
                .map(|&d| {
                    let s = |x: f64| d * f.eval(x);
                    let b = fam.bind(&s);
                    (0..=500)
                        .map(|i| {
                            let x = i as f64 / 500.0;
                            (b.g2(x) - base.g2(x)).abs()
                        })
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(sups[1] < sups[0] && sups[2] < sups[1], "{sups:?}");
        }
    }
}
