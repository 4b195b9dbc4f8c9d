use log::warn;

use super::budget::{estar_of_epsilon, EpsilonBudget};
use crate::error::{domain, FinbathError, Result};
use crate::flucwork::Direction;
use crate::numeric::{bisect, log_sum_exp};
use crate::system::{log_partition_function, DiagonalState, SystemSpec};

/// Default number of total energies scanned across `[−E*, E*]`.
pub const DEFAULT_ENERGY_GRID: usize = 33;

/// Largest dimension for the exhaustive subset search in [`smoothed_w`].
pub const MAX_SUBSET_DIM: usize = 20;

/// Below this ratio of bath width `γ^{−1/2}` to `‖H‖` the Gaussian
/// total-energy approximation is flagged.
pub const GAUSSIAN_RATIO_MIN: f64 = 10.0;

fn log_support_weight(support: &[bool], spec: &SystemSpec, beta_eff: f64) -> Result<f64> {
    let terms: Vec<f64> = spec
        .energies
        .iter()
        .zip(support)
        .filter(|(_, &on)| on)
        .map(|(e, _)| -beta_eff * e)
        .collect();
    if terms.is_empty() {
        return domain("state has empty support");
    }
    Ok(log_sum_exp(&terms))
}

fn support_of(state: &DiagonalState) -> Vec<bool> {
    state.probs.iter().map(|&p| p > 0.0).collect()
}

fn support_f_min(support: &[bool], spec: &SystemSpec, beta_eff: f64) -> Result<f64> {
    if beta_eff == 0.0 || !beta_eff.is_finite() {
        return domain(format!("effective inverse temperature must be finite and nonzero, got {beta_eff}"));
    }
    let lw = log_support_weight(support, spec, beta_eff)?;
    Ok((log_partition_function(spec, beta_eff) - lw) / beta_eff)
}

/// `(1/β′)[ln Z_{β′} − ln Σ_{s∈supp P} e^{−β′ε_s}]`.
pub fn f_min(state: &DiagonalState, spec: &SystemSpec, beta_eff: f64) -> Result<f64> {
    support_f_min(&support_of(state), spec, beta_eff)
}

/// `max_s ln(P(s)e^{βε_s})`.
fn log_max_key(state: &DiagonalState, spec: &SystemSpec, beta: f64) -> f64 {
    state
        .probs
        .iter()
        .zip(&spec.energies)
        .filter(|(&p, _)| p > 0.0)
        .map(|(p, e)| p.ln() + beta * e)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(1/β) ln max_s P(s)e^{βε_s}`.
pub fn f_max(state: &DiagonalState, spec: &SystemSpec, beta: f64) -> f64 {
    log_max_key(state, spec, beta) / beta
}

fn subspace_beta(beta: f64, gamma: f64, e_tot: f64) -> Result<f64> {
    let b = beta - gamma * e_tot;
    if b > 0.0 {
        Ok(b)
    } else {
        domain(format!(
            "beta - gamma*E = {b} is not positive at E = {e_tot}; the energy window is too wide for gamma = {gamma}"
        ))
    }
}

/// Work extractable in the total-energy subspace `E_tot`, from equal ranks
/// of the initial and final curves.
pub fn w_ext_subspace(state: &DiagonalState, spec: &SystemSpec, beta: f64, gamma: f64, e_tot: f64) -> Result<f64> {
    f_min(state, spec, subspace_beta(beta, gamma, e_tot)?)
}

/// Work needed to form `state` in the subspace `E_tot`, from equal slopes
/// of the first curve segments.
pub fn w_form_subspace(state: &DiagonalState, spec: &SystemSpec, beta: f64, gamma: f64, e_tot: f64) -> Result<f64> {
    let b = subspace_beta(beta, gamma, e_tot)?;
    let tilted: Vec<f64> = state
        .probs
        .iter()
        .zip(&spec.energies)
        .filter(|(&p, _)| p > 0.0)
        .map(|(p, e)| p.ln() + gamma * e_tot * e)
        .collect();
    if tilted.is_empty() {
        return domain("state has empty support");
    }
    Ok((log_partition_function(spec, b) + log_max_key(state, spec, beta) - log_sum_exp(&tilted)) / b)
}

/// How the per-subspace work varies across the scanned energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl Monotonicity {
    pub fn of(values: &[f64]) -> Self {
        let tol = 1e-12 * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let up = values.windows(2).all(|w| w[1] >= w[0] - tol);
        let down = values.windows(2).all(|w| w[1] <= w[0] + tol);
        match (up, down) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            (false, false) => Monotonicity::NonMonotone,
        }
    }

    pub fn is_monotone(self) -> bool {
        self != Monotonicity::NonMonotone
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicWork {
    pub work: f64,
    /// Total energy at which the extremum is attained.
    pub extremizer: f64,
    pub budget: EpsilonBudget,
    pub monotonicity: Monotonicity,
    /// `(E_tot, W(E_tot))` in ascending energy.
    pub samples: Vec<(f64, f64)>,
    /// `γ^{−1/2}/‖H‖`; infinite for a zero Hamiltonian.
    pub gaussian_ratio: f64,
}

/// `n` evenly spaced energies on `[−E*, E*]`, with `0` added if missing.
pub fn energy_grid(e_star: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut grid: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { e_star } else { -e_star + 2.0 * e_star * k as f64 / (n - 1) as f64 })
        .collect();
    if !grid.contains(&0.0) {
        let at = grid.partition_point(|&e| e < 0.0);
        grid.insert(at, 0.0);
    }
    grid
}

fn check_window(beta: f64, gamma: f64, e_star: f64) -> Result<()> {
    if beta - gamma * e_star <= 0.0 {
        return domain(format!(
            "beta - gamma*E* = {} is not positive; lower gamma or raise epsilon",
            beta - gamma * e_star
        ));
    }
    Ok(())
}

fn gaussian_ratio(spec: &SystemSpec, gamma: f64) -> f64 {
    let ratio = gamma.sqrt().recip() / spec.norm();
    if ratio < GAUSSIAN_RATIO_MIN {
        warn!("bath width over system norm is {ratio:.3}, below {GAUSSIAN_RATIO_MIN}; the Gaussian total-energy approximation is poor");
    }
    ratio
}

/// `(E_tot, work)` pairs in ascending energy.
type Samples = Vec<(f64, f64)>;

/// Extremum over `E_tot` of `f`, taking the first extremizer in ascending
/// energy.
fn extremize(grid: &[f64], direction: Direction, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64, Samples)> {
    let samples = grid.iter().map(|&e| Ok((e, f(e)?))).collect::<Result<Vec<_>>>()?;
    let better = |a: f64, b: f64| match direction {
        Direction::Extraction => a < b,
        Direction::Formation => a > b,
    };
    let (e, w) = samples
        .iter()
        .copied()
        .reduce(|best, s| if better(s.1, best.1) { s } else { best })
        .ok_or_else(|| FinbathError::Internal("empty energy grid".into()))?;
    Ok((w, e, samples))
}

/// Deterministic work over the window `[−E*, E*]` fixed by `epsilon`:
/// extraction takes the minimum of [`w_ext_subspace`], formation the
/// maximum of [`w_form_subspace`].
pub fn w_deterministic(
    state: &DiagonalState,
    spec: &SystemSpec,
    beta: f64,
    gamma: f64,
    epsilon: f64,
    direction: Direction,
    n_grid: usize,
) -> Result<DeterministicWork> {
    let budget = EpsilonBudget::from_epsilon(beta, gamma, epsilon)?;
    check_window(beta, gamma, budget.e_star)?;
    let grid = energy_grid(budget.e_star, n_grid);
    let (work, extremizer, samples) = extremize(&grid, direction, |e| match direction {
        Direction::Extraction => w_ext_subspace(state, spec, beta, gamma, e),
        Direction::Formation => w_form_subspace(state, spec, beta, gamma, e),
    })?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(DeterministicWork {
        work,
        extremizer,
        budget,
        monotonicity: Monotonicity::of(&values),
        samples,
        gaussian_ratio: gaussian_ratio(spec, gamma),
    })
}

/// Deterministic work optimized over diagonal states within total-variation
/// distance `epsilon_prime` of `state`.
///
/// Extraction zeroes a set of levels of total mass at most `epsilon_prime`,
/// searching all subsets. Formation lowers the largest keys `P(s)e^{βε_s}`
/// to a common cap and pours the removed mass onto the smallest keys.
#[allow(clippy::too_many_arguments)]
pub fn smoothed_w(
    state: &DiagonalState,
    spec: &SystemSpec,
    beta: f64,
    gamma: f64,
    epsilon: f64,
    epsilon_prime: f64,
    direction: Direction,
    n_grid: usize,
) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon_prime) {
        return domain(format!("epsilon_prime must lie in [0, 1), got {epsilon_prime}"));
    }
    match direction {
        Direction::Extraction => smoothed_extraction(state, spec, beta, gamma, epsilon, epsilon_prime, n_grid),
        Direction::Formation => {
            let poured = water_pour(state, spec, beta, epsilon_prime)?;
            Ok(w_deterministic(&poured, spec, beta, gamma, epsilon, direction, n_grid)?.work)
        }
    }
}

fn smoothed_extraction(
    state: &DiagonalState,
    spec: &SystemSpec,
    beta: f64,
    gamma: f64,
    epsilon: f64,
    epsilon_prime: f64,
    n_grid: usize,
) -> Result<f64> {
    let d = state.dim();
    if d > MAX_SUBSET_DIM {
        return Err(FinbathError::Size(format!(
            "exhaustive smoothing supports at most {MAX_SUBSET_DIM} levels, got {d}"
        )));
    }
    let e_star = estar_of_epsilon(gamma, epsilon)?;
    check_window(beta, gamma, e_star)?;
    let grid = energy_grid(e_star, n_grid);
    let betas: Vec<f64> = grid.iter().map(|e| beta - gamma * e).collect();
    let base = support_of(state);
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << d) {
        let removed: f64 = (0..d).filter(|&s| mask >> s & 1 == 1).map(|s| state.probs[s]).sum();
        if removed > epsilon_prime {
            continue;
        }
        let support: Vec<bool> = (0..d).map(|s| base[s] && mask >> s & 1 == 0).collect();
        if !support.contains(&true) {
            continue;
        }
        let mut w = f64::INFINITY;
        for &b in &betas {
            w = w.min(support_f_min(&support, spec, b)?);
        }
        best = best.max(w);
    }
    Ok(best)
}

/// Caps the keys `P(s)e^{βε_s}` at the smallest `λ ≥ 1/Z_β` reachable by
/// moving at most `budget` mass, and raises the smallest keys to a floor `μ`
/// with the mass removed.
pub fn water_pour(state: &DiagonalState, spec: &SystemSpec, beta: f64, budget: f64) -> Result<DiagonalState> {
    let w: Vec<f64> = spec.energies.iter().map(|e| (-beta * e).exp()).collect();
    let keys: Vec<f64> = state.probs.iter().zip(&w).map(|(p, w)| p / w).collect();
    let excess = |lam: f64| -> f64 { state.probs.iter().zip(&w).map(|(p, w)| (p - lam * w).max(0.0)).sum() };
    let deficit = |mu: f64| -> f64 { state.probs.iter().zip(&w).map(|(p, w)| (mu * w - p).max(0.0)).sum() };
    let floor = (-log_partition_function(spec, beta)).exp();
    let top = keys.iter().fold(0.0f64, |m, &k| m.max(k));
    if budget <= 0.0 || top <= floor {
        return Ok(state.clone());
    }
    let lam = if excess(floor) <= budget {
        floor
    } else {
        bisect(|l| excess(l) - budget, floor, top, 1e-15, 400)
            .ok_or_else(|| FinbathError::Internal("water level bisection failed".into()))?
    };
    let moved = excess(lam);
    if moved <= 0.0 {
        return Ok(state.clone());
    }
    // at λ = 1/Z the deficit equals the excess, up to rounding
    let mu = if deficit(lam) <= moved {
        lam
    } else {
        bisect(|m| deficit(m) - moved, 0.0, lam, 1e-15, 400)
            .ok_or_else(|| FinbathError::Internal("fill level bisection failed".into()))?
    };
    let probs: Vec<f64> = state
        .probs
        .iter()
        .zip(&w)
        .map(|(&p, &w)| p.min(lam * w).max(mu * w))
        .collect();
    DiagonalState::normalized(probs)
}
