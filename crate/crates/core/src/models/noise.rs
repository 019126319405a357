use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::error::{invalid, Result};

/// Standardized noise laws: mean 0, variance 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseDensity {
    Gaussian,
    /// Uniform on `[−√3, √3]`.
    ScaledUniform,
    /// Student t with `nu ≥ 5` degrees of freedom, rescaled to unit variance.
    ScaledStudentT {
        nu: f64,
    },
}

impl NoiseDensity {
    pub fn student_t(nu: f64) -> Result<Self> {
        if !(nu >= 5.0 && nu.is_finite()) {
            return Err(invalid(
                "noise.nu",
                format!("Student t needs nu >= 5 for a controlled fourth moment, got {nu}"),
            ));
        }
        Ok(Self::ScaledStudentT { nu })
    }

    pub fn parse(tag: &str) -> Result<Self> {
        let t = tag.trim().to_ascii_lowercase();
        match t.as_str() {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::ScaledUniform),
            _ => {
                let nu = t
                    .strip_prefix("student_t(")
                    .or_else(|| t.strip_prefix("t("))
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| invalid("noise", format!("unknown noise tag `{tag}`")))?;
                Self::student_t(nu)
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Gaussian => "gaussian".into(),
            Self::ScaledUniform => "uniform".into(),
            Self::ScaledStudentT { nu } => format!("student_t({nu})"),
        }
    }

    /// `E ξ⁴`.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            Self::Gaussian => 3.0,
            Self::ScaledUniform => 9.0 / 5.0,
            Self::ScaledStudentT { nu } => 3.0 * (nu - 2.0) / (nu - 4.0),
        }
    }

    /// Stable small integer used to key random streams.
    pub(crate) fn stream_id(&self) -> u64 {
        match self {
            Self::Gaussian => 1,
            Self::ScaledUniform => 2,
            Self::ScaledStudentT { nu } => 3 ^ (nu.to_bits() << 2),
        }
    }
}

/// `count` i.i.d. draws from `density`.
pub fn sample_noise<R: Rng + ?Sized>(
    density: &NoiseDensity,
    count: usize,
    rng: &mut R,
) -> Vec<f64> {
    match *density {
        NoiseDensity::Gaussian => (0..count).map(|_| rng.sample(StandardNormal)).collect(),
        NoiseDensity::ScaledUniform => {
            let a = 3f64.sqrt();
            (0..count).map(|_| rng.random_range(-a..=a)).collect()
        }
        NoiseDensity::ScaledStudentT { nu } => {
            let t = StudentT::new(nu).expect("nu validated at construction");
            let scale = ((nu - 2.0) / nu).sqrt();
            (0..count).map(|_| scale * t.sample(rng)).collect()
        }
    }
}

/// A finite stand-in for the class of admissible noise laws.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseFamily {
    densities: Vec<NoiseDensity>,
    xi_star: f64,
}

impl NoiseFamily {
    pub fn new(densities: Vec<NoiseDensity>, xi_star: f64) -> Result<Self> {
        if densities.is_empty() {
            return Err(invalid("noise", "the noise family is empty"));
        }
        if !(xi_star >= 3.0) {
            return Err(invalid(
                "estimator.xi_star",
                format!("must be at least 3, got {xi_star}"),
            ));
        }
        if let Some(d) = densities.iter().find(|d| d.fourth_moment() > xi_star) {
            return Err(invalid(
                "estimator.xi_star",
                format!(
                    "{} has fourth moment {} above xi_star = {xi_star}",
                    d.tag(),
                    d.fourth_moment()
                ),
            ));
        }
        Ok(Self { densities, xi_star })
    }

    /// Gaussian and scaled uniform with `ξ* = 3`.
    pub fn standard() -> Self {
        Self::new(
            vec![NoiseDensity::Gaussian, NoiseDensity::ScaledUniform],
            3.0,
        )
        .expect("both moments are at most 3")
    }

    pub fn densities(&self) -> &[NoiseDensity] {
        &self.densities
    }

    pub fn xi_star(&self) -> f64 {
        self.xi_star
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn moments(d: NoiseDensity, count: usize) -> (f64, f64, f64) {
        let xs = sample_noise(&d, count, &mut StreamKey::new(11, &[d.stream_id()]).rng());
        let n = count as f64;
        let m1 = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / n;
        (m1, m2, m4)
    }

    #[test]
    fn standardized_moments() {
        for d in [
            NoiseDensity::Gaussian,
            NoiseDensity::ScaledUniform,
            NoiseDensity::student_t(8.0).unwrap(),
        ] {
            let (m1, m2, m4) = moments(d, 1_000_000);
            assert!(m1.abs() < 0.01, "{d:?} mean {m1}");
            assert!((m2 - 1.0).abs() < 0.01, "{d:?} var {m2}");
            if d != NoiseDensity::student_t(8.0).unwrap() {
                assert!((m4 / d.fourth_moment() - 1.0).abs() < 0.02, "{d:?} m4 {m4}");
            }
        }
    }

    #[test]
    fn fourth_moment_values() {
        assert_eq!(NoiseDensity::Gaussian.fourth_moment(), 3.0);
        assert!((NoiseDensity::ScaledUniform.fourth_moment() - 1.8).abs() < 1e-15);
        assert_eq!(NoiseDensity::student_t(5.0).unwrap().fourth_moment(), 9.0);
        assert!(NoiseDensity::student_t(4.5).is_err());
    }

    #[test]
    fn uniform_support() {
        let xs = sample_noise(
            &NoiseDensity::ScaledUniform,
            10_000,
            &mut StreamKey::new(1, &[]).rng(),
        );
        assert!(xs.iter().all(|x| x.abs() <= 3f64.sqrt()));
    }

    #[test]
    fn draws_are_reproducible() {
        let key = StreamKey::new(42, &[9, 1]);
        let a = sample_noise(&NoiseDensity::Gaussian, 64, &mut key.rng());
        let b = sample_noise(&NoiseDensity::Gaussian, 64, &mut key.rng());
        assert_eq!(a, b);
    }

    #[test]
    fn tags_round_trip() {
        for d in [
            NoiseDensity::Gaussian,
            NoiseDensity::ScaledUniform,
            NoiseDensity::student_t(7.0).unwrap(),
        ] {
            assert_eq!(NoiseDensity::parse(&d.tag()).unwrap(), d);
        }
        assert!(NoiseDensity::parse("cauchy").is_err());
    }

    #[test]
    fn family_enforces_xi_star() {
        assert!(NoiseFamily::new(vec![NoiseDensity::student_t(6.0).unwrap()], 3.0).is_err());
        assert!(NoiseFamily::new(vec![NoiseDensity::student_t(6.0).unwrap()], 6.0).is_ok());
        assert!(NoiseFamily::new(vec![], 3.0).is_err());
        assert!(NoiseFamily::new(vec![NoiseDensity::Gaussian], 2.0).is_err());
    }
}
