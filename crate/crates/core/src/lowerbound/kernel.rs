//! The smooth plateau `I_η` and the trigonometric basis of `L₂[−1, 1]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre8;

const CDF_CELLS: usize = 2048;
const PANELS: usize = 1024;

fn bump_raw(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

struct BumpCdf {
    norm: f64,
    values: Vec<f64>,
}

fn table() -> &'static BumpCdf {
    static TABLE: OnceLock<BumpCdf> = OnceLock::new();
    TABLE.get_or_init(|| {
        let width = 2.0 / CDF_CELLS as f64;
        let mut values = Vec::with_capacity(CDF_CELLS + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for c in 0..CDF_CELLS {
            let a = -1.0 + c as f64 * width;
            acc += gauss_legendre8(bump_raw, a, a + width);
            values.push(acc);
        }
        let norm = acc;
        for v in &mut values {
            *v /= norm;
        }
        BumpCdf { norm, values }
    })
}

/// Normalized bump `V(u) ∝ exp(−1/(1−u²))` on `(−1, 1)`.
pub fn bump(u: f64) -> f64 {
    bump_raw(u) / table().norm
}

/// `∫_{−1}^w V`, by cubic Hermite interpolation of a tabulated integral.
pub fn bump_cdf(w: f64) -> f64 {
    if w <= -1.0 {
        return 0.0;
    }
    if w >= 1.0 {
        return 1.0;
    }
    let t = table();
    let width = 2.0 / CDF_CELLS as f64;
    let pos = (w + 1.0) / width;
    let c = (pos.floor() as usize).min(CDF_CELLS - 1);
    let s = pos - c as f64;
    let u0 = -1.0 + c as f64 * width;
    let (p0, p1) = (t.values[c], t.values[c + 1]);
    let (m0, m1) = (bump(u0), bump(u0 + width));
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * width * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * width * m1
}

/// Plateau function `I_η(x) = η⁻¹ ∫ 1{|u| ≤ 1−η} V((u−x)/η) du`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelProfile {
    eta: f64,
}

impl KernelProfile {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.5) {
            return Err(invalid(
                "lowerbound.eta",
                format!("must lie in (0, 1/2), got {eta}"),
            ));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = self.eta;
        let a = ((-(1.0 - e) - x) / e).max(-1.0);
        let b = (((1.0 - e) - x) / e).min(1.0);
        if b <= a {
            return 0.0;
        }
        (bump_cdf(b) - bump_cdf(a)).clamp(0.0, 1.0)
    }
}

/// `I_η(x)`.
pub fn kernel_i(profile: &KernelProfile, x: f64) -> f64 {
    profile.eval(x)
}

/// `e_1 = 1/√2`, `e_j(x) = cos(π⌊j/2⌋x)` for even `j`, `sin(π⌊j/2⌋x)` for odd `j ≥ 3`.
pub fn e_basis(j: usize, x: f64) -> Result<f64> {
    match j {
        0 => Err(Error::InvalidBasisIndex(0)),
        1 => Ok(FRAC_1_SQRT_2),
        _ => {
            let a = PI * (j / 2) as f64 * x;
            Ok(if j.is_multiple_of(2) {
                a.cos()
            } else {
                a.sin()
            })
        }
    }
}

/// `∫_{−1}^1 f`, composite 8-point Gauss-Legendre.
pub fn integrate_pm1<F: Fn(f64) -> f64>(f: F) -> f64 {
    let w = 2.0 / PANELS as f64;
    (0..PANELS)
        .map(|p| {
            let a = -1.0 + p as f64 * w;
            gauss_legendre8(&f, a, a + w)
        })
        .sum()
}

/// `ē_j(f) = ∫_{−1}^1 e_j²(v) f(v) dv`.
pub fn e_bar<F: Fn(f64) -> f64>(j: usize, f: F) -> Result<f64> {
    e_basis(j, 0.0)?;
    Ok(integrate_pm1(|v| e_basis(j, v).unwrap().powi(2) * f(v)))
}
