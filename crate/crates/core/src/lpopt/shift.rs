use super::simplex::{self, CscMatrix, SimplexOptions, SimplexStatus};
use super::{LpStatus, DEFAULT_LOG_COEFFICIENT_CAP};
use crate::error::{FinbathError, Result};
use crate::system::Transition;

/// Optimum of the infinite-bath LP restricted to maps that depend on the
/// bath energy only through a shift, `t(E′s′|Es) = g(k, s′, s)` with
/// `E′ = E − k·spacing`, on an unbounded uniform grid.
///
/// With `γ = 0` the Gibbs weights are translation invariant, so this is the
/// edge-free optimum at a given spacing. Its gap to `−ΔF` isolates the error
/// caused by discretizing the bath energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMapSolution {
    pub optimal_work: f64,
    pub status: LpStatus,
    /// Largest shift index `K`; shifts run over `−K..=K`.
    pub max_shift_index: i64,
    /// `g[(s * d_out + s′) * (2K + 1) + (k + K)]`.
    pub shift_probs: Vec<f64>,
    pub iterations: usize,
}

/// Shifts are limited to `|β·k·spacing| ≤ log_coefficient_cap`, matching the
/// pruning of the grid LP.
pub fn shift_map_optimum(t: &Transition, spacing: f64, beta: f64) -> Result<ShiftMapSolution> {
    shift_map_optimum_with_cap(t, spacing, beta, DEFAULT_LOG_COEFFICIENT_CAP)
}

pub fn shift_map_optimum_with_cap(t: &Transition, spacing: f64, beta: f64, cap: f64) -> Result<ShiftMapSolution> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(FinbathError::Argument(format!("spacing must be positive, got {spacing}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(FinbathError::Domain(format!("beta must be positive, got {beta}")));
    }
    let k_max = (cap / (beta * spacing)).floor() as i64;
    let width = (2 * k_max + 1) as usize;
    let p_in = &t.initial.state.probs;
    let p_out = &t.target.state.probs;
    let (d_in, d_out) = (p_in.len(), p_out.len());
    let eps_in = &t.initial.spec.energies;
    let eps_out = &t.target.spec.energies;

    // rows: marginal s′ < d_out − 1 (the last is implied), stochastic s, reversibility s′
    let n_marg = d_out - 1;
    let mut a = CscMatrix::new(n_marg + d_in + d_out);
    let mut cost = Vec::with_capacity(d_in * d_out * width);
    for si in 0..d_in {
        for so in 0..d_out {
            for k in -k_max..=k_max {
                let shift = k as f64 * spacing;
                let mut col = Vec::with_capacity(3);
                if so < n_marg {
                    col.push((so, p_in[si]));
                }
                col.push((n_marg + si, 1.0));
                col.push((n_marg + d_in + so, (beta * shift).exp()));
                a.push_column(&col);
                // maximize work == minimize -work
                cost.push(-p_in[si] * (shift + eps_in[si] - eps_out[so]));
            }
        }
    }
    let mut b: Vec<f64> = p_out[..n_marg].to_vec();
    b.extend(std::iter::repeat_n(1.0, d_in + d_out));
    let res = simplex::solve(&a, &b, &cost, &SimplexOptions::default());
    let status = match res.status {
        SimplexStatus::Optimal => LpStatus::Optimal,
        SimplexStatus::Infeasible => LpStatus::Infeasible,
        other => {
            return Err(FinbathError::Internal(format!(
                "shift-map simplex terminated with {other:?} after {} iterations",
                res.iterations
            )))
        }
    };
    Ok(ShiftMapSolution {
        optimal_work: if status == LpStatus::Optimal { -res.objective } else { f64::NAN },
        status,
        max_shift_index: k_max,
        shift_probs: res.x,
        iterations: res.iterations,
    })
}
