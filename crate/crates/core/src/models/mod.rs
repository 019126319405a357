//! Regression functions, scale families, noise laws and the data generator.

pub mod functions;
pub mod noise;
pub mod scale;
pub mod spec;

pub use functions::{LibraryFunction, RegressionFunction, TrigPolynomial, TrigTerm};
pub use noise::{sample_noise, NoiseDensity, NoiseFamily};
pub use scale::{
    frechet_l, riemann_gap, scale_value, varsigma, BoundScale, GeneralScale, ScaleFamily,
};
pub use spec::{sigma_on_grid, simulate, GridProfile, ModelSpec};
