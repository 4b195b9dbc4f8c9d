use crate::bath::BathGrid;
use crate::flucwork::JointFinalDistribution;
use crate::system::{DiagonalState, Transition};

/// Dense stochastic map `t(E′s′|Es)` over bath grid × system levels.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub n_bath: usize,
    pub d_in: usize,
    pub d_out: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn zeros(n_bath: usize, d_in: usize, d_out: usize) -> Self {
        Self {
            n_bath,
            d_in,
            d_out,
            entries: vec![0.0; n_bath * n_bath * d_in * d_out],
        }
    }

    /// `t(E′s′|Es) = δ_{EE′}δ_{ss′}`.
    pub fn identity(n_bath: usize, d: usize) -> Self {
        let mut m = Self::zeros(n_bath, d, d);
        for e in 0..n_bath {
            for s in 0..d {
                m.set(e, s, e, s, 1.0);
            }
        }
        m
    }

    #[inline]
    fn index(&self, to_e: usize, to_s: usize, from_e: usize, from_s: usize) -> usize {
        ((from_e * self.d_in + from_s) * self.n_bath + to_e) * self.d_out + to_s
    }

    #[inline]
    pub fn get(&self, to_e: usize, to_s: usize, from_e: usize, from_s: usize) -> f64 {
        self.entries[self.index(to_e, to_s, from_e, from_s)]
    }

    #[inline]
    pub fn set(&mut self, to_e: usize, to_s: usize, from_e: usize, from_s: usize, v: f64) {
        let i = self.index(to_e, to_s, from_e, from_s);
        self.entries[i] = v;
    }

    pub fn add(&mut self, to_e: usize, to_s: usize, from_e: usize, from_s: usize, v: f64) {
        let i = self.index(to_e, to_s, from_e, from_s);
        self.entries[i] += v;
    }

    /// Row `t(·|Es)`, ordered by `(E′, s′)`.
    pub fn row(&self, from_e: usize, from_s: usize) -> &[f64] {
        let start = self.index(0, 0, from_e, from_s);
        &self.entries[start..start + self.n_bath * self.d_out]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Average extracted work of the map.
    pub fn average_work(&self, t: &Transition, grid: &BathGrid) -> f64 {
        let eps_in = &t.initial.spec.energies;
        let eps_out = &t.target.spec.energies;
        let mut w = 0.0;
        for from_e in 0..self.n_bath {
            for from_s in 0..self.d_in {
                let weight = t.initial.state.probs[from_s] * grid.gibbs_prob[from_e];
                if weight == 0.0 {
                    continue;
                }
                let row = self.row(from_e, from_s);
                let mut acc = 0.0;
                for to_e in 0..self.n_bath {
                    let heat = grid.energies[from_e] - grid.energies[to_e];
                    for to_s in 0..self.d_out {
                        let v = row[to_e * self.d_out + to_s];
                        if v != 0.0 {
                            acc += v * (heat + eps_in[from_s] - eps_out[to_s]);
                        }
                    }
                }
                w += weight * acc;
            }
        }
        w
    }
}

/// Acceptance thresholds for [`validate_map`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapTolerances {
    pub marginal: f64,
    pub stochastic: f64,
    pub nonnegative: f64,
    pub reversibility: f64,
    /// Judge reversibility by `p_G(E′)·|Σ − 1|` instead of `|Σ − 1|`.
    pub gibbs_weighted_reversibility: bool,
}

impl Default for MapTolerances {
    fn default() -> Self {
        Self {
            marginal: 1e-9,
            stochastic: 1e-9,
            nonnegative: 0.0,
            reversibility: 1e-8,
            gibbs_weighted_reversibility: false,
        }
    }
}

/// Which constraint failed, by its number in the thermal-operation
/// definition (1 marginal, 2 stochastic, 3 non-negative, 4 reversibility).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub constraint: u8,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub marginal_residual: f64,
    pub stochastic_residual: f64,
    pub min_entry: f64,
    pub reversibility_residual: f64,
    pub reversibility_weighted_residual: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn cites(&self, constraint: u8) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

/// Per-constraint residuals of a candidate thermal operation.
pub fn validate_map(m: &TransitionMatrix, t: &Transition, grid: &BathGrid, tol: &MapTolerances) -> ValidationReport {
    let n = m.n_bath;
    let mut marginal = vec![0.0; m.d_out];
    let mut stochastic_residual = 0.0f64;
    let mut min_entry = f64::INFINITY;
    let mut rev = vec![0.0; n * m.d_out];
    for from_e in 0..n {
        for from_s in 0..m.d_in {
            let weight = t.initial.state.probs[from_s] * grid.gibbs_prob[from_e];
            let row = m.row(from_e, from_s);
            let mut sum = 0.0;
            for to_e in 0..n {
                let ratio = grid.degeneracy_ratio(from_e, to_e);
                for to_s in 0..m.d_out {
                    let v = row[to_e * m.d_out + to_s];
                    min_entry = min_entry.min(v);
                    if v != 0.0 {
                        sum += v;
                        marginal[to_s] += weight * v;
                        rev[to_e * m.d_out + to_s] += v * ratio;
                    }
                }
            }
            stochastic_residual = stochastic_residual.max((sum - 1.0).abs());
        }
    }
    let marginal_residual = marginal
        .iter()
        .zip(&t.target.state.probs)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let mut reversibility_residual = 0.0f64;
    let mut reversibility_weighted_residual = 0.0f64;
    for to_e in 0..n {
        for to_s in 0..m.d_out {
            let r = (rev[to_e * m.d_out + to_s] - 1.0).abs();
            reversibility_residual = reversibility_residual.max(r);
            reversibility_weighted_residual = reversibility_weighted_residual.max(r * grid.gibbs_prob[to_e]);
        }
    }

    let mut violations = Vec::new();
    if marginal_residual > tol.marginal {
        violations.push(Violation {
            constraint: 1,
            residual: marginal_residual,
            tolerance: tol.marginal,
        });
    }
    if stochastic_residual > tol.stochastic {
        violations.push(Violation {
            constraint: 2,
            residual: stochastic_residual,
            tolerance: tol.stochastic,
        });
    }
    if min_entry < -tol.nonnegative {
        violations.push(Violation {
            constraint: 3,
            residual: -min_entry,
            tolerance: tol.nonnegative,
        });
    }
    let rev_res = if tol.gibbs_weighted_reversibility {
        reversibility_weighted_residual
    } else {
        reversibility_residual
    };
    if rev_res > tol.reversibility {
        violations.push(Violation {
            constraint: 4,
            residual: rev_res,
            tolerance: tol.reversibility,
        });
    }
    ValidationReport {
        marginal_residual,
        stochastic_residual,
        min_entry,
        reversibility_residual,
        reversibility_weighted_residual,
        violations,
    }
}

/// Joint final distribution `P(E′s′) = Σ_{Es} P(s)p_G(E)t(E′s′|Es)`.
pub fn induced_joint(m: &TransitionMatrix, initial: &DiagonalState, grid: &BathGrid) -> JointFinalDistribution {
    let n = m.n_bath;
    let mut probs = vec![0.0; n * m.d_out];
    for from_e in 0..n {
        for from_s in 0..m.d_in {
            let weight = initial.probs[from_s] * grid.gibbs_prob[from_e];
            if weight == 0.0 {
                continue;
            }
            for (acc, v) in probs.iter_mut().zip(m.row(from_e, from_s)) {
                *acc += weight * v;
            }
        }
    }
    JointFinalDistribution::from_probs(n, m.d_out, probs)
}
