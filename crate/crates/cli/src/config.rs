//! Flat `section.key = value` experiment files.
//!
//! Blank lines and lines starting with `#` are skipped. Every key must be
//! known and may appear once; anything missing takes the default below.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use pinsker_core::basis::SobolevBall;
use pinsker_core::lowerbound::{LadderConfig, NRule, PriorSampling};
use pinsker_core::models::{
    GeneralScale, LibraryFunction, ModelSpec, NoiseDensity, NoiseFamily, ScaleFamily,
};
use pinsker_core::risk::Estimator;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "model.function",
    "model.k",
    "model.r",
    "model.fill",
    "model.scale",
    "model.scale.c0",
    "model.scale.c1",
    "model.scale.c2",
    "model.scale.c3",
    "model.noise",
    "model.noise_multiplier",
    "estimator.gamma",
    "estimator.xi_star",
    "run.ns",
    "run.reps",
    "run.seed",
    "run.estimators",
    "lowerbound.k",
    "lowerbound.r",
    "lowerbound.epsilon",
    "lowerbound.eta",
    "lowerbound.n_rule",
    "lowerbound.draws",
    "lowerbound.sampling",
    "lowerbound.eps0",
    "lowerbound.ns",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleKind {
    GoldfeldQuandt,
    Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimatorChoice {
    Adaptive,
    Reference,
}

impl fmt::Display for EstimatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Adaptive => "adaptive",
            Self::Reference => "reference",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub function: LibraryFunction,
    pub k: u32,
    pub r: f64,
    pub fill: f64,
    pub scale_kind: ScaleKind,
    pub c: [f64; 4],
    pub noise: Vec<NoiseDensity>,
    pub noise_multiplier: f64,
    pub gamma: f64,
    pub xi_star: f64,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorChoice>,
    pub lb_k: u32,
    pub lb_r: f64,
    pub lb_epsilon: f64,
    pub lb_eta: f64,
    pub lb_rule: NRule,
    pub lb_draws: usize,
    pub lb_sampling: PriorSampling,
    pub lb_eps0: f64,
    pub lb_ns: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            function: LibraryFunction::S1,
            k: 1,
            r: 5.0,
            fill: 1.0,
            scale_kind: ScaleKind::GoldfeldQuandt,
            c: [1.0, 1.0, 0.5, 0.0],
            noise: vec![NoiseDensity::Gaussian, NoiseDensity::ScaledUniform],
            noise_multiplier: 1.0,
            gamma: 2.0,
            xi_star: 3.0,
            ns: vec![101, 301, 1001],
            reps: 200,
            seed: 20240601,
            estimators: vec![EstimatorChoice::Adaptive],
            lb_k: 1,
            lb_r: 1.0,
            lb_epsilon: 0.1,
            lb_eta: 0.05,
            lb_rule: NRule::desk(),
            lb_draws: 200,
            lb_sampling: PriorSampling::Gaussian,
            lb_eps0: 0.5,
            lb_ns: vec![1_000, 10_000, 100_000],
        }
    }
}

fn bad(key: &str, value: &str, what: &str) -> CliError {
    CliError::config(key, format!("expected {what}, got `{value}`"))
}

fn real(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(key, v, "a finite number"))
}

fn count<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| bad(key, v, "a non-negative integer"))
}

fn list(v: &str) -> Vec<&str> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_noise(key: &str, v: &str) -> CliResult<Vec<NoiseDensity>> {
    // Student t tags contain no commas, so a plain split is enough.
    list(v)
        .into_iter()
        .map(|tag| NoiseDensity::parse(tag).map_err(|e| CliError::config(key, e.to_string())))
        .collect()
}

pub fn parse_ns(key: &str, v: &str) -> CliResult<Vec<usize>> {
    list(v).into_iter().map(|s| count(key, s)).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", no + 1))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::config(key, "unknown key"));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::config(key, "set more than once"));
            }
        }
        let mut cfg = Self::default();
        for (key, v) in &entries {
            cfg.set(key, v)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> CliResult<()> {
        match key {
            "model.function" => {
                self.function =
                    LibraryFunction::parse(v).map_err(|e| CliError::config(key, e.to_string()))?
            }
            "model.k" => self.k = count(key, v)?,
            "model.r" => self.r = real(key, v)?,
            "model.fill" => self.fill = real(key, v)?,
            "model.scale" => {
                self.scale_kind = match v {
                    "gq" | "goldfeld_quandt" => ScaleKind::GoldfeldQuandt,
                    "poly" | "polynomial" => ScaleKind::Polynomial,
                    _ => return Err(bad(key, v, "`gq` or `poly`")),
                }
            }
            "model.scale.c0" => self.c[0] = real(key, v)?,
            "model.scale.c1" => self.c[1] = real(key, v)?,
            "model.scale.c2" => self.c[2] = real(key, v)?,
            "model.scale.c3" => self.c[3] = real(key, v)?,
            "model.noise" => self.noise = parse_noise(key, v)?,
            "model.noise_multiplier" => self.noise_multiplier = real(key, v)?,
            "estimator.gamma" => self.gamma = real(key, v)?,
            "estimator.xi_star" => self.xi_star = real(key, v)?,
            "run.ns" => self.ns = parse_ns(key, v)?,
            "run.reps" => self.reps = count(key, v)?,
            "run.seed" => self.seed = count(key, v)?,
            "run.estimators" => {
                self.estimators = list(v)
                    .into_iter()
                    .map(|s| match s {
                        "adaptive" => Ok(EstimatorChoice::Adaptive),
                        "reference" => Ok(EstimatorChoice::Reference),
                        _ => Err(bad(key, s, "`adaptive` or `reference`")),
                    })
                    .collect::<CliResult<_>>()?
            }
            "lowerbound.k" => self.lb_k = count(key, v)?,
            "lowerbound.r" => self.lb_r = real(key, v)?,
            "lowerbound.epsilon" => self.lb_epsilon = real(key, v)?,
            "lowerbound.eta" => self.lb_eta = real(key, v)?,
            "lowerbound.n_rule" => {
                self.lb_rule = NRule::parse(v).map_err(|e| CliError::config(key, e.to_string()))?
            }
            "lowerbound.draws" => self.lb_draws = count(key, v)?,
            "lowerbound.sampling" => {
                self.lb_sampling = match v {
                    "gaussian" => PriorSampling::Gaussian,
                    "truncated" => PriorSampling::Truncated,
                    _ => return Err(bad(key, v, "`gaussian` or `truncated`")),
                }
            }
            "lowerbound.eps0" => self.lb_eps0 = real(key, v)?,
            "lowerbound.ns" => self.lb_ns = parse_ns(key, v)?,
            _ => unreachable!("keys are checked against KEYS"),
        }
        Ok(())
    }

    /// Checks the run section; model and lower-bound settings are checked
    /// when they are built.
    pub fn validate(&self) -> CliResult<()> {
        if self.ns.is_empty() {
            return Err(CliError::config("run.ns", "needs at least one sample size"));
        }
        if let Some(n) = self.ns.iter().find(|n| **n < 3 || *n % 2 == 0) {
            return Err(CliError::config(
                "run.ns",
                format!("sample sizes must be odd and at least 3, got {n}"),
            ));
        }
        if self.reps < 2 {
            return Err(CliError::config(
                "run.reps",
                format!("must be at least 2, got {}", self.reps),
            ));
        }
        if self.estimators.is_empty() {
            return Err(CliError::config(
                "run.estimators",
                "needs at least one estimator",
            ));
        }
        if self.lb_ns.is_empty() {
            return Err(CliError::config(
                "lowerbound.ns",
                "needs at least one sample size",
            ));
        }
        Ok(())
    }

    pub fn ball(&self) -> CliResult<SobolevBall> {
        SobolevBall::new(self.k, self.r).map_err(|e| CliError::config("model.k", e.to_string()))
    }

    pub fn scale(&self) -> CliResult<ScaleFamily> {
        let [c0, c1, c2, c3] = self.c;
        let field = |e: pinsker_core::Error| CliError::from(e);
        match self.scale_kind {
            ScaleKind::GoldfeldQuandt => {
                if c3 != 0.0 {
                    return Err(CliError::config(
                        "model.scale.c3",
                        "only used with `model.scale = poly`",
                    ));
                }
                ScaleFamily::goldfeld_quandt(c0, c1, c2).map_err(field)
            }
            ScaleKind::Polynomial => Ok(ScaleFamily::General(
                GeneralScale::polynomial(c0, c1, c2, c3).map_err(field)?,
            )),
        }
    }

    pub fn noise_family(&self) -> CliResult<NoiseFamily> {
        NoiseFamily::new(self.noise.clone(), self.xi_star).map_err(CliError::from)
    }

    pub fn model(&self) -> CliResult<ModelSpec> {
        if !(self.noise_multiplier >= 0.0) {
            return Err(CliError::config(
                "model.noise_multiplier",
                "must be non-negative",
            ));
        }
        let ball = self.ball()?;
        let f = self.function.build(&ball, self.fill)?;
        let first = *self
            .noise
            .first()
            .ok_or_else(|| CliError::config("model.noise", "needs at least one density"))?;
        Ok(ModelSpec::new(f, self.scale()?, first, ball)?
            .with_noise_multiplier(self.noise_multiplier))
    }

    pub fn estimator(&self, choice: EstimatorChoice) -> Estimator {
        match choice {
            EstimatorChoice::Adaptive => Estimator::Adaptive { gamma: self.gamma },
            EstimatorChoice::Reference => Estimator::Reference,
        }
    }

    pub fn ladder(&self) -> CliResult<LadderConfig> {
        if self.lb_draws == 0 {
            return Err(CliError::config("lowerbound.draws", "must be at least 1"));
        }
        Ok(LadderConfig {
            k: self.lb_k,
            r: self.lb_r,
            epsilon: self.lb_epsilon,
            eta: self.lb_eta,
            rule: self.lb_rule,
            scale: self.scale()?,
            ns: self.lb_ns.clone(),
            draws: self.lb_draws,
            sampling: self.lb_sampling,
            eps0: self.lb_eps0,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        cfg.validate().unwrap();
        cfg.model().unwrap();
        cfg.ladder().unwrap();
    }

    #[test]
    fn parses_every_section() {
        let text = "\
# comment
model.function = s3
model.k = 2
model.r = 7.5
model.scale = poly
model.scale.c3 = 0.25
model.noise = gaussian, student_t(6)
estimator.xi_star = 6
run.ns = 51, 101
run.reps = 10
run.seed = 9
run.estimators = adaptive, reference
lowerbound.n_rule = fixed:3
lowerbound.sampling = truncated
lowerbound.ns = 5000
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.function, LibraryFunction::S3);
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.scale_kind, ScaleKind::Polynomial);
        assert_eq!(cfg.c, [1.0, 1.0, 0.5, 0.25]);
        assert_eq!(cfg.noise[1], NoiseDensity::student_t(6.0).unwrap());
        assert_eq!(cfg.ns, vec![51, 101]);
        assert_eq!(cfg.estimators.len(), 2);
        assert_eq!(cfg.lb_rule, NRule::Fixed(3));
        assert_eq!(cfg.lb_sampling, PriorSampling::Truncated);
        cfg.validate().unwrap();
        cfg.noise_family().unwrap();
        cfg.model().unwrap();
    }

    fn field_of(text: &str) -> String {
        let cfg = ExperimentConfig::parse(text);
        let err = match cfg {
            Err(e) => e,
            Ok(c) => c
                .validate()
                .and_then(|_| c.model().map(|_| ()))
                .unwrap_err(),
        };
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of("model.colour = red"), "model.colour");
        assert_eq!(field_of("model.r = 1\nmodel.r = 2"), "model.r");
        assert_eq!(field_of("run.ns = 100"), "run.ns");
        assert_eq!(field_of("run.reps = 1"), "run.reps");
        assert_eq!(field_of("model.r = abc"), "model.r");
        assert_eq!(field_of("model.fill = 2"), "model.fill");
        assert_eq!(field_of("model.noise = cauchy"), "model.noise");
        assert_eq!(field_of("model.scale.c0 = -1"), "model.scale.c0");
        assert!(matches!(
            ExperimentConfig::parse("just words"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn xi_star_limits_the_family() {
        let cfg = ExperimentConfig::parse("model.noise = student_t(6)").unwrap();
        assert!(cfg.noise_family().is_err());
    }
}
