use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::numeric::adaptive_simpson;

/// Failure probability `ε` of ignoring total energies outside `[−E*, E*]`
/// and the inverse temperatures `β ∓ γE*` at the window edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBudget {
    pub epsilon: f64,
    pub e_star: f64,
    /// `(β − γE*, β + γE*)`.
    pub beta_window: (f64, f64),
}

impl EpsilonBudget {
    pub fn from_epsilon(beta: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let e_star = estar_of_epsilon(gamma, epsilon)?;
        Ok(Self::with(beta, gamma, epsilon, e_star))
    }

    pub fn from_estar(beta: f64, gamma: f64, e_star: f64) -> Result<Self> {
        let epsilon = epsilon_of_estar(gamma, e_star)?;
        Ok(Self::with(beta, gamma, epsilon, e_star))
    }

    fn with(beta: f64, gamma: f64, epsilon: f64, e_star: f64) -> Self {
        Self {
            epsilon,
            e_star,
            beta_window: (beta - gamma * e_star, beta + gamma * e_star),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        domain(format!("gamma must be positive and finite, got {gamma}"))
    }
}

/// `ε = 2∫_{E*}^∞ √(γ/2π) e^{−γE²/2} dE`, the two-sided tail of a Gaussian
/// of variance `1/γ`.
///
/// With `E = E* + u` the integrand is `e^{−γE*²/2}` times
/// `e^{−γu(u + 2E*)/2}`, which is integrated by adaptive Simpson on a range
/// where it decays below `e^{−60}`.
pub fn epsilon_of_estar(gamma: f64, e_star: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(e_star >= 0.0 && e_star.is_finite()) {
        return domain(format!("E* must be non-negative and finite, got {e_star}"));
    }
    let g = |u: f64| (-0.5 * gamma * u * (u + 2.0 * e_star)).exp();
    // smallest u with γu(u + 2E*)/2 = 60
    let c = 120.0 / gamma;
    let upper = c / (e_star + (e_star * e_star + c).sqrt());
    // split at the decay length so both pieces are resolved
    let knee = upper.min(1.0 / (gamma * e_star.max(gamma.sqrt().recip())));
    let tail = adaptive_simpson(&g, 0.0, knee, 1e-15 * knee) + adaptive_simpson(&g, knee, upper, 1e-15 * knee);
    Ok(2.0 * (gamma / (2.0 * PI)).sqrt() * (-0.5 * gamma * e_star * e_star).exp() * tail)
}

/// Inverse of [`epsilon_of_estar`] by Newton steps on `ln ε`, falling back
/// to bisection whenever a step leaves the bracket.
pub fn estar_of_epsilon(gamma: f64, epsilon: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let target = epsilon.ln();
    let (mut lo, mut hi) = (0.0, gamma.sqrt().recip());
    while epsilon_of_estar(gamma, hi)? > epsilon {
        lo = hi;
        hi *= 2.0;
    }
    let density = 2.0 * (gamma / (2.0 * PI)).sqrt();
    let mut e = 0.5 * (lo + hi);
    for _ in 0..200 {
        let eps = epsilon_of_estar(gamma, e)?;
        let f = eps.ln() - target;
        if f > 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        // d ln ε / dE* = −2√(γ/2π) e^{−γE*²/2} / ε
        let slope = -density * (-0.5 * gamma * e * e).exp() / eps;
        let mut next = e - f / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - e).abs() <= 1e-14 * (1.0 + e) {
            return Ok(next);
        }
        e = next;
    }
    Err(crate::FinbathError::Internal("E* inversion did not converge".into()))
}

/// Large-`E*` estimate as commonly quoted:
/// `ε ≈ 2^{3/2} e^{−γE*²/2} / (√(πγ) E*)`.
pub fn epsilon_asymptotic(gamma: f64, e_star: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(e_star > 0.0) {
        return domain(format!("E* must be positive, got {e_star}"));
    }
    Ok(2f64.powf(1.5) * (-0.5 * gamma * e_star * e_star).exp() / ((PI * gamma).sqrt() * e_star))
}

/// Leading term of the complementary error function expansion of the
/// exact tail, `√2 e^{−γE*²/2} / (√(πγ) E*)`. It is half of
/// [`epsilon_asymptotic`].
pub fn epsilon_leading_order(gamma: f64, e_star: f64) -> Result<f64> {
    Ok(epsilon_asymptotic(gamma, e_star)? / 2.0)
}
