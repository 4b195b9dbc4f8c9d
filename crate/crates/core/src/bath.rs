//! Finite heat baths described by temperature and heat capacity.
//!
//! An extensive entropy density `f(u)` is reduced at its saddle point to the
//! pair `(β, C)`; around the mean energy the density of states is then
//! `Ω(E) ∝ exp(βE − γE²/2)` with `γ = β²/C`. [`BathGrid`] discretizes that
//! density on a uniform symmetric grid, with `Ω(0) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, FinbathError, Result};
use crate::numeric::{bisect, log_sum_exp};

/// Analytic family of concave entropy densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EntropyFamily {
    /// `f(u) = a·u^ν` with `a > 0`, `0 < ν < 1`.
    PowerLaw { a: f64, nu: f64 },
}

/// Extensive entropy `S(E) = V·f(E/V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyModel {
    pub family: EntropyFamily,
    pub volume: f64,
}

impl EntropyModel {
    pub fn power_law(a: f64, nu: f64, volume: f64) -> Result<Self> {
        let m = Self {
            family: EntropyFamily::PowerLaw { a, nu },
            volume,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.volume > 0.0 && self.volume.is_finite()) {
            return domain(format!("volume must be positive, got {}", self.volume));
        }
        match self.family {
            EntropyFamily::PowerLaw { a, nu } => {
                if !(a > 0.0 && a.is_finite()) {
                    return domain(format!("power-law prefactor must be positive, got {a}"));
                }
                if !(nu > 0.0 && nu < 1.0) {
                    return domain(format!("power-law exponent must lie in (0, 1), got {nu}"));
                }
            }
        }
        Ok(())
    }

    /// Entropy density `f(u)`.
    pub fn f(&self, u: f64) -> f64 {
        match self.family {
            EntropyFamily::PowerLaw { a, nu } => a * u.powf(nu),
        }
    }

    /// `f'(u)`.
    pub fn df(&self, u: f64) -> f64 {
        match self.family {
            EntropyFamily::PowerLaw { a, nu } => a * nu * u.powf(nu - 1.0),
        }
    }

    /// `f''(u)`.
    pub fn d2f(&self, u: f64) -> f64 {
        match self.family {
            EntropyFamily::PowerLaw { a, nu } => a * nu * (nu - 1.0) * u.powf(nu - 2.0),
        }
    }
}

/// Energy density `u_β` maximizing `f(u) − βu`, i.e. the root of `f'(u) = β`.
pub fn solve_saddle_point(model: &EntropyModel, beta: f64) -> Result<f64> {
    model.validate()?;
    if !(beta > 0.0 && beta.is_finite()) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    let g = |u: f64| model.df(u) - beta;

    // f' is decreasing for concave f: expand geometrically from u = 1 until
    // the bracket [lo, hi] straddles the root.
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut found = false;
    for _ in 0..2000 {
        let (glo, ghi) = (g(lo), g(hi));
        if glo >= 0.0 && ghi <= 0.0 {
            found = true;
            break;
        }
        if glo < 0.0 {
            lo *= 0.5;
        }
        if ghi > 0.0 {
            hi *= 2.0;
        }
        if lo < f64::MIN_POSITIVE || !hi.is_finite() {
            break;
        }
    }
    if !found {
        return domain(format!("no saddle point for beta = {beta} in any bracket"));
    }
    // Bisect in log u so that relative precision is uniform across scales.
    let root = bisect(|x| g(x.exp()), lo.ln(), hi.ln(), 1e-16, 400)
        .ok_or_else(|| FinbathError::Domain("saddle-point bracket lost its sign change".into()))?;
    let u = root.exp();
    if model.d2f(u) >= 0.0 {
        return Err(FinbathError::Model(format!("f''(u_beta) = {} is not negative", model.d2f(u))));
    }
    Ok(u)
}

/// Heat capacity `C = −V·β²/f''(u_β)`.
pub fn heat_capacity_from_model(model: &EntropyModel, beta: f64) -> Result<f64> {
    let u = solve_saddle_point(model, beta)?;
    let curv = model.d2f(u);
    if curv >= 0.0 {
        return Err(FinbathError::Model(format!("f''(u_beta) = {curv} is not negative")));
    }
    Ok(-model.volume * beta * beta / curv)
}

/// `γ = β²/C`; zero for an infinite bath.
pub fn gamma_from(beta: f64, heat_capacity: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    if heat_capacity.is_nan() || heat_capacity <= 0.0 {
        return domain(format!("heat capacity must be positive, got {heat_capacity}"));
    }
    if heat_capacity == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(beta * beta / heat_capacity)
}

/// Bath parameters: inverse temperature, heat capacity and derived `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub beta: f64,
    pub heat_capacity: f64,
    pub gamma: f64,
}

impl BathSpec {
    pub fn new(beta: f64, heat_capacity: f64) -> Result<Self> {
        let gamma = gamma_from(beta, heat_capacity)?;
        Ok(Self {
            beta,
            heat_capacity,
            gamma,
        })
    }

    pub fn infinite(beta: f64) -> Result<Self> {
        Self::new(beta, f64::INFINITY)
    }

    pub fn from_model(model: &EntropyModel, beta: f64) -> Result<Self> {
        Self::new(beta, heat_capacity_from_model(model, beta)?)
    }

    pub fn is_infinite(&self) -> bool {
        self.gamma == 0.0
    }

    /// Standard deviation of the bath energy, `γ^{-1/2}`.
    pub fn sigma(&self) -> f64 {
        if self.gamma > 0.0 {
            self.gamma.sqrt().recip()
        } else {
            f64::INFINITY
        }
    }

    pub fn temperature(&self) -> f64 {
        self.beta.recip()
    }
}

/// `ln Ω(E) = βE − γE²/2`, normalized so that `Ω(0) = 1`.
pub fn log_density_of_states(spec: &BathSpec, energy: f64) -> f64 {
    spec.beta * energy - 0.5 * spec.gamma * energy * energy
}

/// Discretized bath: energies, log-degeneracies and Gibbs probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BathGrid {
    pub beta: f64,
    pub gamma: f64,
    pub energies: Vec<f64>,
    pub log_degeneracy: Vec<f64>,
    pub gibbs_prob: Vec<f64>,
    pub spacing: f64,
}

impl BathGrid {
    /// Uniform grid over `[−kσ, kσ]` with `σ = γ^{-1/2}`.
    pub fn discretize(spec: &BathSpec, n_levels: usize, span_sigmas: f64) -> Result<Self> {
        check_levels(n_levels)?;
        if !(span_sigmas > 0.0 && span_sigmas.is_finite()) {
            return Err(FinbathError::Argument(format!("span_sigmas must be positive, got {span_sigmas}")));
        }
        if spec.is_infinite() {
            return Err(FinbathError::Argument(
                "an infinite bath has no intrinsic width; use BathGrid::window".into(),
            ));
        }
        Self::window(spec, n_levels, span_sigmas * spec.sigma())
    }

    /// Uniform grid over `[−half_width, half_width]`. For `γ = 0` the Gibbs
    /// weights are flat.
    pub fn window(spec: &BathSpec, n_levels: usize, half_width: f64) -> Result<Self> {
        check_levels(n_levels)?;
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(FinbathError::Argument(format!("half width must be positive, got {half_width}")));
        }
        let half = (n_levels / 2) as i64;
        let spacing = half_width / half as f64;
        let energies: Vec<f64> = (-half..=half).map(|k| k as f64 * spacing).collect();
        Ok(Self::from_energies(spec, energies, spacing))
    }

    /// Degenerate one-level bath at `E = 0`.
    pub fn single_level(spec: &BathSpec) -> Self {
        Self::from_energies(spec, vec![0.0], 0.0)
    }

    fn from_energies(spec: &BathSpec, energies: Vec<f64>, spacing: f64) -> Self {
        let log_degeneracy: Vec<f64> = energies.iter().map(|&e| log_density_of_states(spec, e)).collect();
        // ln p_G ∝ ln Ω(E) − βE = −γE²/2
        let log_w: Vec<f64> = energies.iter().map(|&e| -0.5 * spec.gamma * e * e).collect();
        let lz = log_sum_exp(&log_w);
        let gibbs_prob = log_w.iter().map(|&l| (l - lz).exp()).collect();
        Self {
            beta: spec.beta,
            gamma: spec.gamma,
            energies,
            log_degeneracy,
            gibbs_prob,
            spacing,
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.energies.last().copied().unwrap_or(0.0)
    }

    /// `Ω(E_i)/Ω(E_j)`, formed from the log-degeneracy difference.
    pub fn degeneracy_ratio(&self, i: usize, j: usize) -> f64 {
        (self.log_degeneracy[i] - self.log_degeneracy[j]).exp()
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().zip(&self.gibbs_prob).map(|(e, p)| e * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.energies.iter().zip(&self.gibbs_prob).map(|(e, p)| e * e * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }

    /// Index of the grid level nearest to `energy`, if it lies within half a
    /// spacing of the grid.
    pub fn nearest_index(&self, energy: f64) -> Option<usize> {
        if self.len() == 1 {
            return (energy.abs() <= f64::EPSILON).then_some(0);
        }
        let k = ((energy - self.energies[0]) / self.spacing).round();
        if k < 0.0 || k >= self.len() as f64 {
            None
        } else {
            Some(k as usize)
        }
    }
}

fn check_levels(n_levels: usize) -> Result<()> {
    if n_levels < 3 || n_levels.is_multiple_of(2) {
        return Err(FinbathError::Argument(format!(
            "n_levels must be odd and at least 3 so that E = 0 is a grid point, got {n_levels}"
        )));
    }
    Ok(())
}
