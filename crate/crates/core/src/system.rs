//! Diagonal system states and their information-theoretic functionals.
//!
//! Entropies are in nats. Zero-probability levels are kept so that
//! support-counting quantities see the declared dimension.

use crate::error::{domain, FinbathError, Result};
use crate::numeric::{log_sum_exp, xlogx};

/// Tolerance on `Σ P(s) = 1` for a valid state.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Energy levels of a system Hamiltonian diagonal in the working basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub energies: Vec<f64>,
}

impl SystemSpec {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return domain("a system needs at least one level");
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return domain("system energies must be finite");
        }
        Ok(Self { energies })
    }

    /// `d` degenerate levels at zero energy.
    pub fn trivial(d: usize) -> Self {
        Self {
            energies: vec![0.0; d.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.energies.iter().all(|&e| e == self.energies[0])
    }

    /// Largest absolute level energy.
    pub fn norm(&self) -> f64 {
        self.energies.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Probability vector of a state diagonal in the energy basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    pub probs: Vec<f64>,
}

impl DiagonalState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return domain("a state needs at least one probability");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return domain("probabilities must be finite and non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self { probs })
    }

    /// Rescale non-negative weights to unit sum.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return domain("weights must be finite and non-negative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return domain("weights sum to zero");
        }
        Ok(Self {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            probs: vec![1.0 / d as f64; d],
        }
    }

    /// All weight on level `index`.
    pub fn pure(d: usize, index: usize) -> Self {
        let mut probs = vec![0.0; d];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i)
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.dim() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= tol)
    }
}

/// A system Hamiltonian together with a state on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Endpoint {
    pub spec: SystemSpec,
    pub state: DiagonalState,
}

impl Endpoint {
    pub fn new(spec: SystemSpec, state: DiagonalState) -> Result<Self> {
        if spec.dim() != state.dim() {
            return Err(FinbathError::Argument(format!(
                "spectrum has {} levels but the state has {}",
                spec.dim(),
                state.dim()
            )));
        }
        Ok(Self { spec, state })
    }

    pub fn stats(&self, beta: f64) -> StateStats {
        state_stats(&self.state, &self.spec, beta)
    }
}

/// Initial and final endpoints; the two Hamiltonians may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub initial: Endpoint,
    pub target: Endpoint,
}

impl Transition {
    pub fn new(initial: Endpoint, target: Endpoint) -> Self {
        Self { initial, target }
    }

    /// Same spectrum on both sides.
    pub fn with_spec(spec: &SystemSpec, initial: DiagonalState, target: DiagonalState) -> Result<Self> {
        Ok(Self {
            initial: Endpoint::new(spec.clone(), initial)?,
            target: Endpoint::new(spec.clone(), target)?,
        })
    }

    pub fn delta_energy(&self, beta: f64) -> f64 {
        self.target.stats(beta).energy - self.initial.stats(beta).energy
    }

    pub fn delta_entropy(&self) -> f64 {
        shannon_entropy(&self.target.state) - shannon_entropy(&self.initial.state)
    }

    /// `ΔF = ΔU − ΔS/β`.
    pub fn delta_free_energy(&self, beta: f64) -> f64 {
        self.target.stats(beta).free_energy - self.initial.stats(beta).free_energy
    }

    pub fn is_identity(&self) -> bool {
        self.initial == self.target
    }
}

/// Energy, entropy, varentropy and free energy of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateStats {
    pub energy: f64,
    pub entropy: f64,
    pub varentropy: f64,
    pub free_energy: f64,
}

pub fn state_stats(state: &DiagonalState, spec: &SystemSpec, beta: f64) -> StateStats {
    let energy = state.probs.iter().zip(&spec.energies).map(|(p, e)| p * e).sum();
    let entropy = shannon_entropy(state);
    StateStats {
        energy,
        entropy,
        varentropy: varentropy(state),
        free_energy: energy - entropy / beta,
    }
}

pub fn shannon_entropy(state: &DiagonalState) -> f64 {
    -state.probs.iter().map(|&p| xlogx(p)).sum::<f64>()
}

/// Variance of the surprise `−ln P(s)`.
pub fn varentropy(state: &DiagonalState) -> f64 {
    let s = shannon_entropy(state);
    state
        .probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let dev = -p.ln() - s;
            p * dev * dev
        })
        .sum()
}

/// `ln Z_β`, valid for any real `β` on a finite spectrum.
pub fn log_partition_function(spec: &SystemSpec, beta: f64) -> f64 {
    let terms: Vec<f64> = spec.energies.iter().map(|e| -beta * e).collect();
    log_sum_exp(&terms)
}

pub fn partition_function(spec: &SystemSpec, beta: f64) -> f64 {
    log_partition_function(spec, beta).exp()
}

/// Gibbs state `e^{−βε_s}/Z_β`.
pub fn thermal_state(spec: &SystemSpec, beta: f64) -> DiagonalState {
    let lz = log_partition_function(spec, beta);
    DiagonalState {
        probs: spec.energies.iter().map(|e| (-beta * e - lz).exp()).collect(),
    }
}

/// `f_s = −ln P(s)/β`; levels outside the support map to `+∞`.
pub fn fine_grained_entropy(state: &DiagonalState, beta: f64) -> Vec<f64> {
    state
        .probs
        .iter()
        .map(|&p| if p > 0.0 { -p.ln() / beta } else { f64::INFINITY })
        .collect()
}

/// `D[p‖q] = Σ p ln(p/q)`; `+∞` when `p` is not supported inside `q`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(FinbathError::Argument(format!(
            "relative entropy of vectors of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += pi * (pi / qi).ln();
        }
    }
    Ok(d.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn uniform_qubit_stats() {
        let s = state_stats(&DiagonalState::uniform(2), &SystemSpec::trivial(2), 1.0);
        assert_eq!(s.energy, 0.0);
        assert_relative_eq!(s.entropy, LN_2, max_relative = 1e-15);
        assert!(s.varentropy.abs() < 1e-15);
        assert_relative_eq!(s.free_energy, -LN_2, max_relative = 1e-15);
    }

    #[test]
    fn biased_qubit_stats() {
        let s = state_stats(&DiagonalState::new(vec![0.75, 0.25]).unwrap(), &SystemSpec::trivial(2), 1.0);
        assert!((s.entropy - 0.562335144618808).abs() < 1e-12);
        assert!((s.varentropy - 0.226302930152359).abs() < 1e-12);
    }

    #[test]
    fn thermal_qubit_varentropy() {
        let spec = SystemSpec::new(vec![0.0, 1.0]).unwrap();
        let th = thermal_state(&spec, 1.0);
        assert!((th.probs[0] - 0.731058578630005).abs() < 1e-12);
        assert!((th.probs[1] - 0.268941421369995).abs() < 1e-12);
        let v = state_stats(&th, &spec, 1.0).varentropy;
        assert!((v - th.probs[0] * th.probs[1]).abs() < 1e-14);
        assert!((v - 0.196611933241482).abs() < 1e-12);
    }

    #[test]
    fn partition_function_examples() {
        assert_relative_eq!(partition_function(&SystemSpec::trivial(4), 3.7), 4.0, max_relative = 1e-14);
        let q = SystemSpec::new(vec![0.0, 1.0]).unwrap();
        assert!((partition_function(&q, 1.0) - 1.367879441171442).abs() < 1e-12);
        let s = SystemSpec::new(vec![-2.0, 0.3, 5.0]).unwrap();
        assert_relative_eq!(partition_function(&s, 0.0), 3.0, max_relative = 1e-14);
        // negative inverse temperatures are allowed on finite spectra
        let naive: f64 = s.energies.iter().map(|e| (0.5 * e).exp()).sum();
        assert_relative_eq!(partition_function(&s, -0.5), naive, max_relative = 1e-14);
    }

    #[test]
    fn thermal_state_limits() {
        let s = SystemSpec::new(vec![-1.0, 0.0, 2.0]).unwrap();
        for p in thermal_state(&s, 0.0).probs {
            assert_relative_eq!(p, 1.0 / 3.0, max_relative = 1e-14);
        }
        for p in thermal_state(&SystemSpec::trivial(5), 9.0).probs {
            assert_relative_eq!(p, 0.2, max_relative = 1e-14);
        }
    }

    #[test]
    fn fine_grained_entropy_examples() {
        let f = fine_grained_entropy(&DiagonalState::uniform(2), 1.0);
        assert_relative_eq!(f[0], LN_2, max_relative = 1e-15);
        assert_relative_eq!(f[1], LN_2, max_relative = 1e-15);
        let f = fine_grained_entropy(&DiagonalState::pure(2, 0), 1.0);
        assert_eq!(f[0], 0.0);
        assert!(f[1].is_infinite());
        let f = fine_grained_entropy(&DiagonalState::new(vec![0.75, 0.25]).unwrap(), 2.0);
        assert!((f[0] - 0.143841036225890).abs() < 1e-12);
        assert!((f[1] - LN_2).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let p = [0.1, 0.2, 0.7];
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        assert_relative_eq!(relative_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), LN_2, max_relative = 1e-15);
        assert!(relative_entropy(&[0.5, 0.5], &[1.0, 0.0]).unwrap().is_infinite());
        assert!(relative_entropy(&[1.0], &[0.5, 0.5]).is_err());
        let p = [0.4, 0.3, 0.2, 0.1];
        let q = [0.25, 0.15, 0.35, 0.25];
        let oracle = 0.4 * (0.4f64 / 0.25).ln()
            + 0.3 * (0.3f64 / 0.15).ln()
            + 0.2 * (0.2f64 / 0.35).ln()
            + 0.1 * (0.1f64 / 0.25).ln();
        assert!((relative_entropy(&p, &q).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        assert!(DiagonalState::new(vec![0.5, 0.6]).is_err());
        assert!(DiagonalState::new(vec![-0.1, 1.1]).is_err());
        assert!(DiagonalState::new(vec![]).is_err());
        assert!(SystemSpec::new(vec![f64::NAN]).is_err());
        let n = DiagonalState::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(n.probs, vec![0.25, 0.75]);
        assert!(Endpoint::new(SystemSpec::trivial(3), DiagonalState::uniform(2)).is_err());
    }
}
