//! Optimal average work over thermal operations on a discretized bath.
//!
//! The variable is the stochastic map `t(E′s′|Es)` on joint bath-system
//! levels. It must
//!
//! 1. reproduce the target system marginal,
//! 2. be row-stochastic,
//! 3. be non-negative,
//! 4. satisfy microscopic reversibility `Σ_{Es} t(E′s′|Es)·Ω(E)/Ω(E′) = 1`,
//!
//! and the objective is the average work
//! `Σ P(s)p_G(E)t(E′s′|Es)[(E − E′) + (ε_s − ε′_{s′})]`.

mod matrix;
mod problem;
mod shift;
pub mod simplex;

pub use matrix::{induced_joint, validate_map, MapTolerances, TransitionMatrix, ValidationReport, Violation};
pub use problem::{build_lp, LpProblem, RowKind, VarKey, DEFAULT_LOG_COEFFICIENT_CAP};
pub use shift::{shift_map_optimum, shift_map_optimum_with_cap, ShiftMapSolution};

use crate::bath::BathGrid;
use crate::error::{FinbathError, Result};
use crate::system::{fine_grained_entropy, Transition};
use simplex::{SimplexOptions, SimplexStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Solved, but the grid half-width is too small for the free-energy
    /// shifts the optimal map needs.
    SpanLimited,
}

impl LpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::SpanLimited => "span_limited",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub optimal_work: f64,
    pub matrix: TransitionMatrix,
    pub status: LpStatus,
    pub iterations: usize,
    pub duality_gap: f64,
    pub dual_infeasibility: f64,
    pub primal_residual: f64,
}

/// Largest support-restricted shift `|f_{s′} − f_s|` of a transition.
pub fn max_free_energy_shift(t: &Transition, beta: f64) -> f64 {
    let fi = fine_grained_entropy(&t.initial.state, beta);
    let ff = fine_grained_entropy(&t.target.state, beta);
    let mut m = 0.0f64;
    for a in fi.iter().filter(|v| v.is_finite()) {
        for b in ff.iter().filter(|v| v.is_finite()) {
            m = m.max((b - a).abs());
        }
    }
    m
}

/// Solve the work-maximization LP.
///
/// Maps between systems of different dimension are infeasible: weighting
/// the reversibility rows by `Ω(E′)` and the stochastic rows by `Ω(E)` gives
/// `d′·ΣΩ = d·ΣΩ`.
pub fn solve_lp(problem: &LpProblem, opts: &SimplexOptions) -> Result<LpSolution> {
    let d_in = problem.transition.initial.state.dim();
    let d_out = problem.transition.target.state.dim();
    if d_in != d_out {
        return Ok(LpSolution {
            optimal_work: f64::NAN,
            matrix: TransitionMatrix::zeros(problem.grid.len(), d_in, d_out),
            status: LpStatus::Infeasible,
            iterations: 0,
            duality_gap: f64::NAN,
            dual_infeasibility: f64::NAN,
            primal_residual: f64::NAN,
        });
    }
    let keep = problem.independent_rows();
    let a = problem.constraints.select_rows(&keep);
    let b: Vec<f64> = keep.iter().map(|&i| problem.rhs[i]).collect();
    // maximize work == minimize -work
    let cost: Vec<f64> = problem.objective.iter().map(|c| -c).collect();
    let res = simplex::solve(&a, &b, &cost, opts);
    let ax = problem.constraints.mul_vec(&res.x);
    let primal_residual = ax.iter().zip(&problem.rhs).fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    let status = match res.status {
        SimplexStatus::Optimal => {
            if problem.max_shift > 0.5 * problem.grid.half_width() {
                LpStatus::SpanLimited
            } else {
                LpStatus::Optimal
            }
        }
        SimplexStatus::Infeasible => LpStatus::Infeasible,
        other => {
            return Err(FinbathError::Internal(format!(
                "simplex terminated with {other:?} after {} iterations",
                res.iterations
            )))
        }
    };
    let matrix = problem.matrix_from_solution(&res.x);
    let optimal_work = if status == LpStatus::Infeasible {
        f64::NAN
    } else {
        -res.objective
    };
    Ok(LpSolution {
        optimal_work,
        matrix,
        status,
        iterations: res.iterations,
        duality_gap: res.duality_gap,
        dual_infeasibility: res.dual_infeasibility,
        primal_residual,
    })
}

/// Build and solve in one step with default solver options.
pub fn optimize(t: &Transition, grid: &BathGrid, beta: f64) -> Result<LpSolution> {
    let problem = build_lp(t, grid, beta)?;
    solve_lp(&problem, &SimplexOptions::default())
}
