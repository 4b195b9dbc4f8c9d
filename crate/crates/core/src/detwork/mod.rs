//! Single-shot work with a finite bath.
//!
//! Total energy is approximately Gaussian with variance `1/γ`. Within each
//! total-energy subspace `E_tot` the bath acts like an infinite one at
//! `β − γE_tot`, so convertibility reduces to a thermomajorization check on
//! tilted curves. Ignoring energies outside `[−E*, E*]` costs a failure
//! probability `ε`.

mod budget;
mod curve;
mod work;

pub use budget::{epsilon_asymptotic, epsilon_leading_order, epsilon_of_estar, estar_of_epsilon, EpsilonBudget};
pub use curve::{beta_order, dominates, fmt12, thermo_curve, BetaOrdering, ThermoCurve, DOMINANCE_TOL};
pub use work::{
    energy_grid, f_max, f_min, smoothed_w, w_deterministic, w_ext_subspace, w_form_subspace, water_pour,
    DeterministicWork, Monotonicity, DEFAULT_ENERGY_GRID, GAUSSIAN_RATIO_MIN, MAX_SUBSET_DIM,
};

use crate::error::{FinbathError, Result};
use crate::system::Transition;

/// Result of checking every scanned subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionVerdict {
    pub possible: bool,
    /// Lowest scanned energy at which dominance fails.
    pub first_failure: Option<f64>,
    /// `(E_tot, initial curve dominates target curve)` in ascending energy.
    pub checks: Vec<(f64, bool)>,
}

/// Checks dominance of the initial curve over the target curve at `n_checks`
/// energies spanning `[−E*, E*]`, plus `E_tot = 0`.
pub fn transition_possible(
    t: &Transition,
    beta: f64,
    gamma: f64,
    budget: &EpsilonBudget,
    n_checks: usize,
) -> Result<TransitionVerdict> {
    if n_checks < 3 {
        return Err(FinbathError::Argument(format!("need at least 3 checks, got {n_checks}")));
    }
    let checks = energy_grid(budget.e_star, n_checks)
        .into_iter()
        .map(|e| {
            let a = thermo_curve(&t.initial.state, &t.initial.spec, beta, gamma, e);
            let b = thermo_curve(&t.target.state, &t.target.spec, beta, gamma, e);
            Ok((e, dominates(&a, &b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let first_failure = checks.iter().find(|c| !c.1).map(|c| c.0);
    Ok(TransitionVerdict {
        possible: first_failure.is_none(),
        first_failure,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{thermal_state, DiagonalState, SystemSpec};

    #[test]
    fn verdict_examples() {
        let gap = SystemSpec::new(vec![0.0, 1.0]).unwrap();
        let b = EpsilonBudget::from_epsilon(1.0, 0.01, 1e-3).unwrap();
        let p = DiagonalState::new(vec![0.3, 0.7]).unwrap();
        let same = Transition::with_spec(&gap, p.clone(), p).unwrap();
        assert!(transition_possible(&same, 1.0, 0.01, &b, 9).unwrap().possible);

        let pure = DiagonalState::pure(2, 0);
        let th = thermal_state(&gap, 1.0);
        let down = Transition::with_spec(&gap, pure.clone(), th.clone()).unwrap();
        assert!(transition_possible(&down, 1.0, 0.01, &b, 9).unwrap().possible);

        let up = Transition::with_spec(&gap, th, pure).unwrap();
        let v = transition_possible(&up, 1.0, 0.01, &b, 9).unwrap();
        assert!(!v.possible);
        assert!(v.checks.iter().any(|&(e, ok)| e == 0.0 && !ok));
        assert_eq!(v.first_failure, Some(-b.e_star));
        assert!(transition_possible(&up, 1.0, 0.01, &b, 2).is_err());
    }
}
