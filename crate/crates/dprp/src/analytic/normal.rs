//! Standard normal pdf/cdf helpers.
//!
//! The cdf is evaluated through `erfc` so the lower tail keeps full relative
//! precision; calibration residuals down to 1e-12 depend on this. The
//! erf/erfc backend is the fdlibm rational approximation (~1 ulp), well
//! inside the 1e-12 absolute error the callers assume.

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal cdf, `Phi(x) = erfc(-x / sqrt(2)) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `erf(x)`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `2 Phi(x) - 1 = erf(x / sqrt(2))`, the cdf of `|N(0,1)|` for x >= 0.
pub fn two_phi_minus_one(x: f64) -> f64 {
    libm::erf(x / SQRT_2)
}

/// `log(2 Phi(x) - 1)`, stable for large x via `ln_1p(-erfc)`.
pub fn ln_two_phi_minus_one(x: f64) -> f64 {
    let c = libm::erfc(x / SQRT_2);
    if c < 0.5 {
        (-c).ln_1p()
    } else {
        libm::erf(x / SQRT_2).ln()
    }
}

/// `log Phi(x)`, finite far into the lower tail where `erfc` underflows
/// (switches to the asymptotic expansion of the Mills ratio).
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x > -1.0 {
        return normal_cdf(x).ln();
    }
    let c = libm::erfc(-x / SQRT_2);
    if c > 0.0 {
        return std::f64::consts::LN_2.mul_add(-1.0, c.ln());
    }
    // Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4) for x << 0.
    let x2 = x * x;
    -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
        + (-1.0 / x2 + 3.0 / (x2 * x2)).ln_1p()
}
