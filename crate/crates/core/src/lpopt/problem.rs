use std::io::{self, Write};

use super::matrix::TransitionMatrix;
use super::max_free_energy_shift;
use super::simplex::CscMatrix;
use crate::bath::BathGrid;
use crate::error::{FinbathError, Result};
use crate::system::Transition;

/// Variables whose reversibility coefficient `Ω(E)/Ω(E′)` lies outside
/// `[exp(−cap), exp(cap)]` are fixed at zero. Above the range a variable
/// could carry at most `exp(−cap)` probability; below it the move raises the
/// bath energy by at least `cap/β`, which no work-optimal map uses. Keeping
/// either kind would spread the basis coefficients over too many decades.
pub const DEFAULT_LOG_COEFFICIENT_CAP: f64 = 18.420680743952367; // ln 1e8

/// Indices of one LP variable `t(E′s′|Es)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarKey {
    pub to_e: usize,
    pub to_s: usize,
    pub from_e: usize,
    pub from_s: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Target marginal for final level `s′`.
    Marginal { to_s: usize },
    /// Row sum of `t(·|Es)`.
    Stochastic { from_e: usize, from_s: usize },
    /// Microscopic reversibility at `(E′, s′)`.
    Reversibility { to_e: usize, to_s: usize },
}

impl RowKind {
    fn label(&self) -> String {
        match *self {
            RowKind::Marginal { to_s } => format!("marginal[s'={to_s}]"),
            RowKind::Stochastic { from_e, from_s } => format!("stochastic[E={from_e},s={from_s}]"),
            RowKind::Reversibility { to_e, to_s } => format!("reversibility[E'={to_e},s'={to_s}]"),
        }
    }
}

/// The assembled LP in equality form (maximization of `objective·x`).
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub transition: Transition,
    pub grid: BathGrid,
    pub beta: f64,
    pub keys: Vec<VarKey>,
    pub constraints: CscMatrix,
    pub rhs: Vec<f64>,
    pub rows: Vec<RowKind>,
    pub objective: Vec<f64>,
    /// `N²·d·d′`, before coefficient-cap pruning.
    pub full_variable_count: usize,
    pub log_coefficient_cap: f64,
    pub max_shift: f64,
}

/// Assemble the LP with the default coefficient cap.
pub fn build_lp(t: &Transition, grid: &BathGrid, beta: f64) -> Result<LpProblem> {
    LpProblem::build(t, grid, beta, DEFAULT_LOG_COEFFICIENT_CAP)
}

impl LpProblem {
    pub fn build(t: &Transition, grid: &BathGrid, beta: f64, log_coefficient_cap: f64) -> Result<Self> {
        if (grid.beta - beta).abs() > 1e-12 * beta.abs().max(1.0) {
            return Err(FinbathError::Consistency(format!(
                "grid was built for beta = {} but the LP uses beta = {beta}",
                grid.beta
            )));
        }
        let n = grid.len();
        let d_in = t.initial.state.dim();
        let d_out = t.target.state.dim();
        let p_in = &t.initial.state.probs;
        let eps_in = &t.initial.spec.energies;
        let eps_out = &t.target.spec.energies;

        let mut rows = Vec::with_capacity(d_out + n * d_in + n * d_out);
        let mut rhs = Vec::with_capacity(rows.capacity());
        for to_s in 0..d_out {
            rows.push(RowKind::Marginal { to_s });
            rhs.push(t.target.state.probs[to_s]);
        }
        for from_e in 0..n {
            for from_s in 0..d_in {
                rows.push(RowKind::Stochastic { from_e, from_s });
                rhs.push(1.0);
            }
        }
        for to_e in 0..n {
            for to_s in 0..d_out {
                rows.push(RowKind::Reversibility { to_e, to_s });
                rhs.push(1.0);
            }
        }
        let stoch_row = |e: usize, s: usize| d_out + e * d_in + s;
        let rev_row = |e: usize, s: usize| d_out + n * d_in + e * d_out + s;

        let mut constraints = CscMatrix::new(rows.len());
        let mut keys = Vec::new();
        let mut objective = Vec::new();
        for from_e in 0..n {
            for from_s in 0..d_in {
                let weight = p_in[from_s] * grid.gibbs_prob[from_e];
                for to_e in 0..n {
                    let log_ratio = grid.log_degeneracy[from_e] - grid.log_degeneracy[to_e];
                    if log_ratio.abs() > log_coefficient_cap {
                        continue;
                    }
                    let omega_ratio = log_ratio.exp();
                    let bath_heat = grid.energies[from_e] - grid.energies[to_e];
                    for to_s in 0..d_out {
                        constraints.push_column(&[
                            (to_s, weight),
                            (stoch_row(from_e, from_s), 1.0),
                            (rev_row(to_e, to_s), omega_ratio),
                        ]);
                        keys.push(VarKey {
                            to_e,
                            to_s,
                            from_e,
                            from_s,
                        });
                        objective.push(weight * (bath_heat + eps_in[from_s] - eps_out[to_s]));
                    }
                }
            }
        }
        Ok(Self {
            transition: t.clone(),
            grid: grid.clone(),
            beta,
            keys,
            constraints,
            rhs,
            rows,
            objective,
            full_variable_count: n * n * d_in * d_out,
            log_coefficient_cap,
            max_shift: max_free_energy_shift(t, beta),
        })
    }

    pub fn variable_count(&self) -> usize {
        self.keys.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    /// Rows left after removing the two exact linear dependencies: the
    /// marginal rows sum to the `P(s)p_G(E)`-weighted stochastic rows, and
    /// when `d = d′` the `Ω(E′)`-weighted reversibility rows sum to the
    /// `Ω(E)`-weighted stochastic rows. The dropped reversibility row is the
    /// one with the largest `Ω(E′)`, so reconstructing it never amplifies
    /// errors.
    pub fn independent_rows(&self) -> Vec<usize> {
        let d_in = self.transition.initial.state.dim();
        let d_out = self.transition.target.state.dim();
        let top = self
            .grid
            .log_degeneracy
            .iter()
            .enumerate()
            .fold(0, |best, (i, &l)| if l >= self.grid.log_degeneracy[best] { i } else { best });
        (0..self.rows.len())
            .filter(|&i| match self.rows[i] {
                RowKind::Marginal { to_s } => to_s + 1 != d_out,
                RowKind::Reversibility { to_e, to_s } => !(d_in == d_out && to_e == top && to_s + 1 == d_out),
                RowKind::Stochastic { .. } => true,
            })
            .collect()
    }

    pub fn matrix_from_solution(&self, x: &[f64]) -> TransitionMatrix {
        let mut m = TransitionMatrix::zeros(
            self.grid.len(),
            self.transition.initial.state.dim(),
            self.transition.target.state.dim(),
        );
        for (k, &v) in self.keys.iter().zip(x) {
            if v != 0.0 {
                m.set(k.to_e, k.to_s, k.from_e, k.from_s, v);
            }
        }
        m
    }

    /// Plain-text dump for cross-checking with external solvers.
    ///
    /// ```text
    /// finbath-lp 1
    /// sense max
    /// variables <n> constraints <m>
    /// var <j> <E' index> <s'> <E index> <s>      (one line per variable)
    /// objective <c_0> <c_1> ... <c_{n-1}>
    /// row <i> <label> rhs <b_i> <j>:<a_ij> ...    (one line per constraint)
    /// ```
    ///
    /// Every real is written in scientific notation with 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "finbath-lp 1")?;
        writeln!(w, "sense max")?;
        writeln!(w, "variables {} constraints {}", self.variable_count(), self.constraint_count())?;
        for (j, k) in self.keys.iter().enumerate() {
            writeln!(w, "var {j} {} {} {} {}", k.to_e, k.to_s, k.from_e, k.from_s)?;
        }
        write!(w, "objective")?;
        for c in &self.objective {
            write!(w, " {}", fmt17(*c))?;
        }
        writeln!(w)?;
        for (i, (row, entries)) in self.rows.iter().zip(self.constraints.rows()).enumerate() {
            write!(w, "row {i} {} rhs {}", row.label(), fmt17(self.rhs[i]))?;
            for (j, v) in entries {
                write!(w, " {j}:{}", fmt17(v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
