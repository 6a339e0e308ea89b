//! Composite Gauss-Legendre quadrature with panel-doubling refinement.

use crate::error::{Error, Result};

const GL_ORDER: usize = 20;

// Nodes/weights for the GL_ORDER-point rule on [-1, 1], computed once by
// Newton iteration on the Legendre polynomial.
fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    use std::sync::OnceLock;
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            // Chebyshev-based initial guess for the i-th root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.push((x, w));
        }
        rule
    })
}

fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre_rule();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for &(x, w) in rule {
            acc += w * f(mid + half * x);
        }
        total += half * acc;
    }
    total
}

/// Integrates `f` over `[a, b]`, doubling the panel count until two
/// successive composite evaluations agree within `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let f: &dyn Fn(f64) -> f64 = &f;
    let mut panels = 4;
    let mut prev = composite(f, a, b, panels);
    for _ in 0..12 {
        panels *= 2;
        let next = composite(f, a, b, panels);
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Integration(format!(
        "quadrature residual above {tol} after {panels} panels"
    )))
}
