//! Trigonometric basis on `[0, 1]`, the design sieve `x_l = l/n`, the discrete
//! Fourier transform on that sieve and Sobolev-ellipsoid coefficients.
//!
//! Basis indexing is 1-based throughout: `φ_1 ≡ 1`, and for `j ≥ 2`
//! `φ_j(x) = √2 cos(2π⌊j/2⌋x)` for even `j`, `√2 sin(2π⌊j/2⌋x)` for odd `j`.
//! For odd `n` the first `n` basis vectors sampled on the sieve are orthonormal
//! under the empirical inner product, which is why even `n` is rejected.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// The sieve `x_l = l/n`, `l = 1..=n`, for odd `n ≥ 3`.
///
/// Holds `cos(2πk/n)` and `sin(2πk/n)` tables so that basis values on the grid
/// are looked up through exact integer phase reduction `(f·l) mod n`.
#[derive(Clone)]
pub struct DesignGrid {
    n: usize,
    cos: Arc<[f64]>,
    sin: Arc<[f64]>,
}

impl std::fmt::Debug for DesignGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DesignGrid").field("n", &self.n).finish()
    }
}

impl PartialEq for DesignGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl DesignGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidSampleCount(n));
        }
        let step = 2.0 * PI / n as f64;
        let cos = (0..n).map(|k| (step * k as f64).cos()).collect();
        let sin = (0..n).map(|k| (step * k as f64).sin()).collect();
        Ok(Self { n, cos, sin })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `x_l = l/n` for `l` in `1..=n`.
    pub fn point(&self, l: usize) -> f64 {
        l as f64 / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (1..=self.n).map(|l| self.point(l)).collect()
    }

    /// Samples `f` at every design point.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (1..=self.n).map(|l| f(self.point(l))).collect()
    }

    /// `φ_j(x_l)` through the phase tables. `j ≥ 1`, `1 ≤ l ≤ n`.
    pub fn basis_at(&self, j: usize, l: usize) -> f64 {
        debug_assert!(j >= 1 && (1..=self.n).contains(&l));
        if j == 1 {
            return 1.0;
        }
        let idx = ((j / 2) % self.n) * (l % self.n) % self.n;
        if j.is_multiple_of(2) {
            SQRT_2 * self.cos[idx]
        } else {
            SQRT_2 * self.sin[idx]
        }
    }

    /// `(φ_j(x_1), ..., φ_j(x_n))`.
    pub fn sample_basis(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 {
            return Err(Error::InvalidBasisIndex(j));
        }
        Ok((1..=self.n).map(|l| self.basis_at(j, l)).collect())
    }

    /// `Σ_j c_j φ_j(x_l)` for every `l`; `coeffs[j-1]` multiplies `φ_j`.
    /// Trailing zero coefficients are skipped.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() > self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: coeffs.len(),
            });
        }
        let support = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |p| p + 1);
        let mut out = vec![0.0; self.n];
        if support == 0 {
            return Ok(out);
        }
        for (l, slot) in out.iter_mut().enumerate() {
            let l = l + 1;
            let mut acc = coeffs[0];
            let mut j = 2;
            while j <= support {
                let idx = (j / 2) * l % self.n;
                acc += coeffs[j - 1] * SQRT_2 * self.cos[idx];
                if j < support {
                    acc += coeffs[j] * SQRT_2 * self.sin[idx];
                }
                j += 2;
            }
            *slot = acc;
        }
        Ok(out)
    }
}

/// `φ_j(x)` at an arbitrary point.
pub fn phi(j: usize, x: f64) -> Result<f64> {
    match j {
        0 => Err(Error::InvalidBasisIndex(0)),
        1 => Ok(1.0),
        _ => {
            let arg = 2.0 * PI * (j / 2) as f64 * x;
            Ok(if j.is_multiple_of(2) {
                SQRT_2 * arg.cos()
            } else {
                SQRT_2 * arg.sin()
            })
        }
    }
}

/// `(f, g)_n = n⁻¹ Σ_l f(x_l) g(x_l)`.
pub fn empirical_inner(f: &[f64], g: &[f64], grid: &DesignGrid) -> Result<f64> {
    check_len(f, grid.n())?;
    check_len(g, grid.n())?;
    let s: f64 = f.iter().zip(g).map(|(a, b)| a * b).sum();
    Ok(s / grid.n() as f64)
}

fn check_len(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    Ok(())
}

/// Discrete Fourier coefficients `θ̂_j = (y, φ_j)_n`, `j = 1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs {
    values: Vec<f64>,
    grid: DesignGrid,
}

impl FourierCoeffs {
    pub fn new(values: Vec<f64>, grid: DesignGrid) -> Result<Self> {
        check_len(&values, grid.n())?;
        Ok(Self { values, grid })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficient of `φ_j`, 1-based.
    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    pub fn grid(&self) -> &DesignGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Basis synthesis back onto the design points.
    pub fn synthesize(&self) -> Vec<f64> {
        self.grid
            .synthesize(&self.values)
            .expect("coefficient length equals n")
    }
}

/// Direct O(n²) discrete Fourier transform on the sieve.
pub fn fourier_transform(y: &[f64], grid: &DesignGrid) -> Result<FourierCoeffs> {
    let n = grid.n();
    check_len(y, n)?;
    let inv_n = 1.0 / n as f64;
    let mut values = vec![0.0; n];
    values[0] = y.iter().sum::<f64>() * inv_n;
    for f in 1..=(n - 1) / 2 {
        let (mut c, mut s) = (0.0, 0.0);
        let mut idx = 0usize;
        for &yl in y {
            idx += f;
            if idx >= n {
                idx -= n;
            }
            c += yl * grid.cos[idx];
            s += yl * grid.sin[idx];
        }
        values[2 * f - 1] = SQRT_2 * c * inv_n;
        values[2 * f] = SQRT_2 * s * inv_n;
    }
    Ok(FourierCoeffs {
        values,
        grid: grid.clone(),
    })
}

/// Smoothness `k ≥ 1` and radius `r > 0` of the periodic Sobolev ball `W_r^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevBall {
    pub k: u32,
    pub r: f64,
}

impl SobolevBall {
    pub fn new(k: u32, r: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k", "smoothness must be at least 1"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("radius must be positive, got {r}")));
        }
        Ok(Self { k, r })
    }
}

/// `a_j = Σ_{i=0}^k (2π⌊j/2⌋)^{2i}` with `0⁰ = 1`.
pub fn sobolev_coeff(j: usize, k: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidBasisIndex(0));
    }
    if k == 0 {
        return Err(invalid("k", "smoothness must be at least 1"));
    }
    let w2 = (2.0 * PI * (j / 2) as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for _ in 0..k {
        term *= w2;
        sum += term;
    }
    Ok(sum)
}

/// Result of [`ellipsoid_membership`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipsoidCheck {
    pub value: f64,
    pub inside: bool,
}

/// `Σ_j a_j ϑ_j²` over the supplied coefficients (`coeffs[j-1]` is `ϑ_j`);
/// coefficients beyond the slice are taken as zero.
pub fn ellipsoid_membership(coeffs: &[f64], ball: &SobolevBall) -> EllipsoidCheck {
    let value = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| sobolev_coeff(i + 1, ball.k).expect("j ≥ 1, k ≥ 1") * c * c)
        .sum::<f64>();
    EllipsoidCheck {
        value,
        inside: value <= ball.r,
    }
}

/// `L₂[0,1]` Fourier coefficients `ϑ_j = ∫₀¹ f φ_j`, `j = 1..=count`, by
/// composite Simpson quadrature.
pub fn l2_coefficients<F: Fn(f64) -> f64>(f: F, count: usize) -> Vec<f64> {
    let nodes = quadrature::SIMPSON_NODES;
    let h = 1.0 / (nodes - 1) as f64;
    let samples: Vec<f64> = (0..nodes).map(|i| f(i as f64 * h)).collect();
    (1..=count)
        .map(|j| {
            let mut acc = 0.0;
            for (i, s) in samples.iter().enumerate() {
                let w = if i == 0 || i == nodes - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * s * phi(j, i as f64 * h).expect("j ≥ 1");
            }
            acc * h / 3.0
        })
        .collect()
}
