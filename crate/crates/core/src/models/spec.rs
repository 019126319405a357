use rand::Rng;

use crate::basis::{DesignGrid, SobolevBall};
use crate::error::{invalid, Result};

use super::functions::RegressionFunction;
use super::noise::{sample_noise, NoiseDensity};
use super::scale::{varsigma, ScaleFamily};

/// Everything needed to generate `y_j = S(x_j) + σ_j ξ_j`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub function: RegressionFunction,
    pub scale: ScaleFamily,
    pub noise: NoiseDensity,
    pub ball: SobolevBall,
    /// Multiplies every `σ_j`; `0` gives noiseless data.
    pub noise_multiplier: f64,
}

impl ModelSpec {
    /// Rejects functions whose ellipsoid value exceeds `r`.
    pub fn new(
        function: RegressionFunction,
        scale: ScaleFamily,
        noise: NoiseDensity,
        ball: SobolevBall,
    ) -> Result<Self> {
        let value = function.sobolev_value(ball.k);
        if value > ball.r * (1.0 + 1e-12) {
            return Err(invalid(
                "model.function",
                format!(
                    "`{}` has ellipsoid value {value} above r = {} for k = {}",
                    function.name(),
                    ball.r,
                    ball.k
                ),
            ));
        }
        Ok(Self {
            function,
            scale,
            noise,
            ball,
            noise_multiplier: 1.0,
        })
    }

    pub fn with_noise(&self, noise: NoiseDensity) -> Self {
        Self {
            noise,
            ..self.clone()
        }
    }

    pub fn with_noise_multiplier(mut self, factor: f64) -> Self {
        self.noise_multiplier = factor;
        self
    }

    /// `ς(S)`, including the noise multiplier.
    pub fn varsigma(&self) -> f64 {
        let f = &self.function;
        self.noise_multiplier.powi(2) * varsigma(&self.scale, &|x| f.eval(x))
    }

    /// `S(x_l)` and `σ_l` on the grid.
    pub fn profile(&self, grid: &DesignGrid) -> GridProfile {
        let f = &self.function;
        let s_of = |x: f64| f.eval(x);
        let bound = self.scale.bind(&s_of);
        let s = grid.sample(s_of);
        let sigma = grid
            .points()
            .into_iter()
            .map(|x| self.noise_multiplier * bound.g(x))
            .collect();
        GridProfile { s, sigma }
    }
}

/// Signal and noise level on the design points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridProfile {
    pub s: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl GridProfile {
    pub fn draw<R: Rng + ?Sized>(&self, noise: &NoiseDensity, rng: &mut R) -> Vec<f64> {
        let xi = sample_noise(noise, self.s.len(), rng);
        self.s
            .iter()
            .zip(&self.sigma)
            .zip(xi)
            .map(|((s, g), e)| s + g * e)
            .collect()
    }
}

/// `σ_l = g(x_l, S)` on the grid.
pub fn sigma_on_grid(spec: &ModelSpec, grid: &DesignGrid) -> Vec<f64> {
    spec.profile(grid).sigma
}

/// One sample of the observations.
pub fn simulate<R: Rng + ?Sized>(spec: &ModelSpec, grid: &DesignGrid, rng: &mut R) -> Vec<f64> {
    spec.profile(grid).draw(&spec.noise, rng)
}
