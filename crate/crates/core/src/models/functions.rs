use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::basis::{self, SobolevBall};
use crate::error::{invalid, Result};
use crate::rng::StreamKey;

/// `cos_coef·cos(2πfx) + sin_coef·sin(2πfx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub freq: u32,
    pub cos_coef: f64,
    pub sin_coef: f64,
}

/// A 1-periodic trigonometric polynomial.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPolynomial {
    pub constant: f64,
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, t| {
            let a = 2.0 * PI * t.freq as f64 * x;
            acc + t.cos_coef * a.cos() + t.sin_coef * a.sin()
        })
    }

    /// `order`-th derivative at `x`.
    pub fn derivative(&self, order: u32, x: f64) -> f64 {
        if order == 0 {
            return self.eval(x);
        }
        self.terms
            .iter()
            .map(|t| {
                let w = 2.0 * PI * t.freq as f64;
                let a = w * x;
                // d^p/dx^p of (c cos + s sin) rotates the phase by p·π/2.
                let (c, s) = (a.cos(), a.sin());
                let scale = w.powi(order as i32);
                let v = match order % 4 {
                    0 => t.cos_coef * c + t.sin_coef * s,
                    1 => -t.cos_coef * s + t.sin_coef * c,
                    2 => -t.cos_coef * c - t.sin_coef * s,
                    _ => t.cos_coef * s - t.sin_coef * c,
                };
                scale * v
            })
            .sum()
    }

    /// `Σ_{i=0}^k ‖f^{(i)}‖²`, exact.
    pub fn sobolev_value(&self, k: u32) -> f64 {
        let tail: f64 = self
            .terms
            .iter()
            .map(|t| {
                let w2 = (2.0 * PI * t.freq as f64).powi(2);
                let energy = 0.5 * (t.cos_coef.powi(2) + t.sin_coef.powi(2));
                let weight: f64 = (0..=k).map(|i| w2.powi(i as i32)).sum();
                energy * weight
            })
            .sum();
        self.constant.powi(2) + tail
    }

    /// Coefficients in the `φ_j` basis, `out[j-1] = ϑ_j`, up to `count` entries.
    pub fn basis_coefficients(&self, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        if count > 0 {
            out[0] = self.constant;
        }
        for t in &self.terms {
            let j_cos = 2 * t.freq as usize;
            if j_cos <= count {
                out[j_cos - 1] += t.cos_coef / SQRT_2;
            }
            if j_cos < count {
                out[j_cos] += t.sin_coef / SQRT_2;
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            constant: self.constant * factor,
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm {
                    freq: t.freq,
                    cos_coef: t.cos_coef * factor,
                    sin_coef: t.sin_coef * factor,
                })
                .collect(),
        }
    }

    pub fn max_freq(&self) -> u32 {
        self.terms.iter().map(|t| t.freq).max().unwrap_or(0)
    }
}

/// A regression function `S`.
#[derive(Clone)]
pub enum RegressionFunction {
    Trig {
        name: String,
        poly: TrigPolynomial,
    },
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for RegressionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trig { name, poly } => f
                .debug_struct("Trig")
                .field("name", name)
                .field("poly", poly)
                .finish(),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl RegressionFunction {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn trig(name: impl Into<String>, poly: TrigPolynomial) -> Self {
        Self::Trig {
            name: name.into(),
            poly,
        }
    }

    pub fn zero() -> Self {
        Self::trig("zero", TrigPolynomial::default())
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Trig { name, .. } | Self::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Trig { poly, .. } => poly.eval(x),
            Self::Custom { f, .. } => f(x),
        }
    }

    /// Ellipsoid value `Σ a_j ϑ_j²`: exact for trigonometric polynomials,
    /// otherwise from the first 512 quadrature coefficients.
    pub fn sobolev_value(&self, k: u32) -> f64 {
        match self {
            Self::Trig { poly, .. } => poly.sobolev_value(k),
            Self::Custom { f, .. } => {
                let coeffs = basis::l2_coefficients(|x| f(x), 512);
                let ball = SobolevBall {
                    k,
                    r: f64::INFINITY,
                };
                basis::ellipsoid_membership(&coeffs, &ball).value
            }
        }
    }

    /// `‖S‖² = ∫₀¹ S²`.
    pub fn l2_norm_sq(&self) -> f64 {
        crate::quadrature::integrate(|x| self.eval(x).powi(2), 0.0, 1.0)
    }
}

/// The test-function library.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LibraryFunction {
    /// `A sin(2πx)`.
    S1,
    /// `A (sin 2πx + ½ cos 4πx)`.
    S2,
    /// A fixed random Fourier series with `a_j`-weighted decay.
    S3,
}

const S3_FREQS: u32 = 24;
const S3_SEED: u64 = 0x5_3000;

impl LibraryFunction {
    pub const ALL: [LibraryFunction; 3] = [Self::S1, Self::S2, Self::S3];

    pub fn parse(id: &str) -> Result<Self> {
        match id.to_ascii_lowercase().as_str() {
            "s1" => Ok(Self::S1),
            "s2" => Ok(Self::S2),
            "s3" => Ok(Self::S3),
            other => Err(invalid(
                "model.function",
                format!("unknown function id `{other}`"),
            )),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S3 => "s3",
        }
    }

    /// Shape before amplitude scaling.
    pub fn shape(&self, k: u32) -> TrigPolynomial {
        match self {
            Self::S1 => TrigPolynomial {
                constant: 0.0,
                terms: vec![TrigTerm {
                    freq: 1,
                    cos_coef: 0.0,
                    sin_coef: 1.0,
                }],
            },
            Self::S2 => TrigPolynomial {
                constant: 0.0,
                terms: vec![
                    TrigTerm {
                        freq: 1,
                        cos_coef: 0.0,
                        sin_coef: 1.0,
                    },
                    TrigTerm {
                        freq: 2,
                        cos_coef: 0.5,
                        sin_coef: 0.0,
                    },
                ],
            },
            Self::S3 => {
                // Energy a_j ϑ_j² ∝ f^{-1.1} at frequency f, random signs.
                let mut rng = StreamKey::new(S3_SEED, &[]).rng();
                let terms = (1..=S3_FREQS)
                    .map(|f| {
                        let w2 = (2.0 * PI * f as f64).powi(2);
                        let a: f64 = (0..=k).map(|i| w2.powi(i as i32)).sum();
                        let amp = ((f as f64).powf(-1.1) / a).sqrt();
                        let sc: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        let ss: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        TrigTerm {
                            freq: f,
                            cos_coef: sc * amp,
                            sin_coef: ss * amp,
                        }
                    })
                    .collect();
                TrigPolynomial {
                    constant: 0.0,
                    terms,
                }
            }
        }
    }

    /// The shape scaled so its ellipsoid value equals `fill·r`.
    pub fn build(&self, ball: &SobolevBall, fill: f64) -> Result<RegressionFunction> {
        if !(fill > 0.0 && fill <= 1.0) {
            return Err(invalid(
                "model.fill",
                format!("must lie in (0, 1], got {fill}"),
            ));
        }
        let shape = self.shape(ball.k);
        let amplitude = (fill * ball.r / shape.sobolev_value(ball.k)).sqrt();
        Ok(RegressionFunction::trig(self.id(), shape.scaled(amplitude)))
    }
}
