//! Bounds on average (fluctuating) work with a finite bath.
//!
//! * [`second_law_bound`]: `−ΔF`, the infinite-bath limit.
//! * [`theorem1_bound`]: `−ΔF − D[P(E′s′)‖p_G(E′)P(s′)]/β`, which needs the
//!   joint final bath-system distribution.
//! * [`theorem2_bound`]: `−ΔF − ΔS²/(2βC)`, which only needs the system.
//! * [`theorem3_bound`]: first-order tight values when one endpoint is
//!   maximally mixed on a trivial Hamiltonian.
//!
//! The module also builds the `E`-independent maps `f(E′s′s)·δ(E − E′ −
//! f_{s′} + f_s)` that attain these values, evaluates their first-order
//! work, and splits any map into the `(R, Q)` pair entering the
//! microscopic-reversibility inequality.

use crate::bath::BathGrid;
use crate::error::{domain, FinbathError, Result};
use crate::lpopt::TransitionMatrix;
use crate::system::{fine_grained_entropy, relative_entropy, varentropy, DiagonalState, Transition};

/// Tolerance on the joint's system marginal against the declared final state.
pub const MARGINAL_TOL: f64 = 1e-8;

/// Joint final distribution `P(E′, s′)` over bath levels and final system levels.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFinalDistribution {
    pub n_bath: usize,
    pub d: usize,
    /// Row-major by bath level: `probs[e * d + s]`.
    pub probs: Vec<f64>,
    /// `P(s′) = Σ_{E′} P(E′s′)`.
    pub marginal: Vec<f64>,
}

impl JointFinalDistribution {
    pub fn from_probs(n_bath: usize, d: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), n_bath * d, "joint distribution shape");
        let mut marginal = vec![0.0; d];
        for row in probs.chunks(d) {
            for (m, p) in marginal.iter_mut().zip(row) {
                *m += p;
            }
        }
        Self {
            n_bath,
            d,
            probs,
            marginal,
        }
    }

    /// `p_G(E′)·P(s′)`.
    pub fn product(grid: &BathGrid, state: &DiagonalState) -> Self {
        let d = state.dim();
        let mut probs = Vec::with_capacity(grid.len() * d);
        for pg in &grid.gibbs_prob {
            probs.extend(state.probs.iter().map(|p| pg * p));
        }
        Self::from_probs(grid.len(), d, probs)
    }

    pub fn get(&self, e: usize, s: usize) -> f64 {
        self.probs[e * self.d + s]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Bath marginal `P(E′)`.
    pub fn bath_marginal(&self) -> Vec<f64> {
        self.probs.chunks(self.d).map(|r| r.iter().sum()).collect()
    }

    /// `D[P(E′s′) ‖ p_G(E′)P(s′)]` with `P(s′)` the joint's own marginal.
    pub fn divergence_from_product(&self, grid: &BathGrid) -> Result<f64> {
        if grid.len() != self.n_bath {
            return Err(FinbathError::Consistency(format!(
                "joint has {} bath levels but the grid has {}",
                self.n_bath,
                grid.len()
            )));
        }
        let mut reference = Vec::with_capacity(self.probs.len());
        for pg in &grid.gibbs_prob {
            reference.extend(self.marginal.iter().map(|p| pg * p));
        }
        relative_entropy(&self.probs, &reference)
    }
}

/// `−ΔF = −(ΔU − ΔS/β)`.
pub fn second_law_bound(t: &Transition, beta: f64) -> f64 {
    -t.delta_free_energy(beta)
}

/// `−ΔF − D[P(E′s′)‖p_G(E′)P(s′)]/β`.
pub fn theorem1_bound(t: &Transition, joint: &JointFinalDistribution, grid: &BathGrid, beta: f64) -> Result<f64> {
    if joint.d != t.target.state.dim() {
        return Err(FinbathError::Consistency(format!(
            "joint has {} system levels but the final state has {}",
            joint.d,
            t.target.state.dim()
        )));
    }
    let mismatch = joint
        .marginal
        .iter()
        .zip(&t.target.state.probs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if mismatch > MARGINAL_TOL {
        return Err(FinbathError::Consistency(format!(
            "joint marginal differs from the final state by {mismatch:.3e}"
        )));
    }
    Ok(second_law_bound(t, beta) - joint.divergence_from_product(grid)? / beta)
}

fn finite_bath_factor(beta: f64, heat_capacity: f64) -> Result<f64> {
    if heat_capacity.is_nan() || heat_capacity <= 0.0 {
        return domain(format!("heat capacity must be positive, got {heat_capacity}"));
    }
    if heat_capacity == f64::INFINITY {
        Ok(0.0)
    } else {
        Ok(1.0 / (2.0 * beta * heat_capacity))
    }
}

/// `−ΔF − ΔS²/(2βC)`.
pub fn theorem2_bound(t: &Transition, beta: f64, heat_capacity: f64) -> Result<f64> {
    let ds = t.delta_entropy();
    Ok(second_law_bound(t, beta) - ds * ds * finite_bath_factor(beta, heat_capacity)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Final state maximally mixed on a trivial Hamiltonian.
    Extraction,
    /// Initial state maximally mixed on a trivial Hamiltonian.
    Formation,
}

const UNIFORM_TOL: f64 = 1e-12;

/// Whether the transition qualifies for the closed form in `direction`.
pub fn theorem3_applies(t: &Transition, direction: Direction) -> bool {
    let end = match direction {
        Direction::Extraction => &t.target,
        Direction::Formation => &t.initial,
    };
    end.spec.is_trivial() && end.state.is_uniform(UNIFORM_TOL)
}

/// Extraction: `−ΔF − ΔS²/(2βC)`; formation:
/// `−ΔF − (ΔS² + Var[P(s′)])/(2βC)`. Both hold to first order in `1/C`.
pub fn theorem3_bound(t: &Transition, beta: f64, heat_capacity: f64, direction: Direction) -> Result<f64> {
    if !theorem3_applies(t, direction) {
        let which = match direction {
            Direction::Extraction => "final",
            Direction::Formation => "initial",
        };
        return domain(format!(
            "the closed form needs a maximally mixed {which} state on a trivial Hamiltonian; use theorem2_bound"
        ));
    }
    let k = finite_bath_factor(beta, heat_capacity)?;
    let ds = t.delta_entropy();
    let var = match direction {
        Direction::Extraction => 0.0,
        Direction::Formation => varentropy(&t.target.state),
    };
    Ok(second_law_bound(t, beta) - (ds * ds + var) * k)
}

/// Formation of `target` from the maximally mixed state followed by
/// extraction back, both at their first-order optimum. Returns the summed
/// work, `−(2ΔS² + Var[P′])/(2βC)`.
pub fn reversibility_gap(target: &DiagonalState, beta: f64, heat_capacity: f64) -> Result<f64> {
    let d = target.dim();
    let spec = crate::system::SystemSpec::trivial(d);
    let form = Transition::with_spec(&spec, DiagonalState::uniform(d), target.clone())?;
    let back = Transition::with_spec(&spec, target.clone(), DiagonalState::uniform(d))?;
    Ok(theorem3_bound(&form, beta, heat_capacity, Direction::Formation)?
        + theorem3_bound(&back, beta, heat_capacity, Direction::Extraction)?)
}

/// `f(E′s′s)` of an `E`-shift map, over (bath level, final level, initial level).
#[derive(Debug, Clone, PartialEq)]
pub struct FMap {
    pub n_bath: usize,
    pub d_out: usize,
    pub d_in: usize,
    values: Vec<f64>,
}

impl FMap {
    pub fn from_fn(n_bath: usize, d_out: usize, d_in: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n_bath * d_out * d_in);
        for e in 0..n_bath {
            for so in 0..d_out {
                for si in 0..d_in {
                    values.push(f(e, so, si));
                }
            }
        }
        Self {
            n_bath,
            d_out,
            d_in,
            values,
        }
    }

    /// `f(E′s′s) = P(s′)`. Valid for any transition; this is the optimal
    /// choice for extraction to, and formation from, the maximally mixed state.
    pub fn product(t: &Transition, n_bath: usize) -> Self {
        let p = &t.target.state.probs;
        Self::from_fn(n_bath, p.len(), t.initial.state.dim(), |_, so, _| p[so])
    }

    /// `f(E′s′s) = δ_{ss′}`, for `P = P′` on equal spectra.
    pub fn identity(n_bath: usize, d: usize) -> Self {
        Self::from_fn(n_bath, d, d, |_, so, si| if so == si { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn get(&self, e: usize, s_out: usize, s_in: usize) -> f64 {
        self.values[(e * self.d_out + s_out) * self.d_in + s_in]
    }

    /// Maximum residuals of `0 ≤ f ≤ 1`, the shifted row sums and the
    /// marginal condition.
    pub fn residuals(&self, t: &Transition, grid: &BathGrid, beta: f64) -> FMapResiduals {
        let fi = fine_grained_entropy(&t.initial.state, beta);
        let ff = fine_grained_entropy(&t.target.state, beta);
        let mut bounds = 0.0f64;
        for &v in &self.values {
            bounds = bounds.max(-v).max(v - 1.0);
        }
        let mut row_sum = 0.0f64;
        for si in t.initial.state.support() {
            for e in 0..self.n_bath {
                let mut sum = 0.0;
                let mut complete = true;
                for so in 0..self.d_out {
                    if !ff[so].is_finite() {
                        // P(s′) = 0 forces f = 0 through the marginal condition.
                        continue;
                    }
                    let target = grid.energies[e] - (ff[so] - fi[si]);
                    match shift_index(grid, e, ff[so] - fi[si]) {
                        Some(k) if (grid.energies[k] - target).abs() <= 0.5 * grid.spacing + 1e-12 => {
                            sum += self.get(k, so, si)
                        }
                        _ => complete = false,
                    }
                }
                if complete {
                    row_sum = row_sum.max((sum - 1.0).abs());
                }
            }
        }
        let mut marginal = 0.0f64;
        for e in 0..self.n_bath {
            for so in 0..self.d_out {
                let s: f64 = (0..self.d_in).map(|si| t.initial.state.probs[si] * self.get(e, so, si)).sum();
                marginal = marginal.max((s - t.target.state.probs[so]).abs());
            }
        }
        FMapResiduals {
            bounds,
            row_sum,
            marginal,
        }
    }

    pub fn validate(&self, t: &Transition, grid: &BathGrid, beta: f64, tol: f64) -> Result<()> {
        if self.n_bath != grid.len() || self.d_out != t.target.state.dim() || self.d_in != t.initial.state.dim() {
            return Err(FinbathError::Validation("f-map shape does not match grid and transition".into()));
        }
        let r = self.residuals(t, grid, beta);
        if r.bounds > tol || r.row_sum > tol || r.marginal > tol {
            return Err(FinbathError::Validation(format!(
                "f-map residuals: bounds {:.3e}, shifted row sums {:.3e}, marginal {:.3e}",
                r.bounds, r.row_sum, r.marginal
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FMapResiduals {
    pub bounds: f64,
    pub row_sum: f64,
    pub marginal: f64,
}

/// Grid index of `E_e − shift`, rounded to the nearest level; `None` when
/// it falls outside the grid.
fn shift_index(grid: &BathGrid, e: usize, shift: f64) -> Option<usize> {
    if grid.len() == 1 {
        return Some(0);
    }
    let k = e as i64 - (shift / grid.spacing).round() as i64;
    (k >= 0 && (k as usize) < grid.len()).then_some(k as usize)
}

/// First-order work of an `E`-shift map:
/// `−ΔF − (γ²/2β) Σ_{E′s′} P(s′)p_G(E′)E′² (Σ_s P(s)f(E′s′s)(f_{s′} − f_s)/P(s′))²`.
pub fn first_order_work(fmap: &FMap, t: &Transition, grid: &BathGrid, beta: f64, gamma: f64) -> Result<f64> {
    fmap.validate(t, grid, beta, 1e-9)?;
    let fi = fine_grained_entropy(&t.initial.state, beta);
    let ff = fine_grained_entropy(&t.target.state, beta);
    let p_in = &t.initial.state.probs;
    let p_out = &t.target.state.probs;
    let mut correction = 0.0;
    for e in 0..grid.len() {
        let e2 = grid.energies[e] * grid.energies[e];
        for so in 0..fmap.d_out {
            if p_out[so] <= 0.0 {
                continue;
            }
            let inner: f64 = (0..fmap.d_in)
                .filter(|&si| p_in[si] > 0.0)
                .map(|si| p_in[si] * fmap.get(e, so, si) * (ff[so] - fi[si]))
                .sum::<f64>()
                / p_out[so];
            correction += p_out[so] * grid.gibbs_prob[e] * e2 * inner * inner;
        }
    }
    Ok(second_law_bound(t, beta) - gamma * gamma / (2.0 * beta) * correction)
}

/// `R(E′s′|s)` and `Q(E′s′s)` of a map, with the reversibility left-hand
/// side `Σ_s R(E′s′|s)e^{βQ(E′s′s)}/p_G(E′)` per `(E′, s′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RQDecomposition {
    pub n_bath: usize,
    pub d_out: usize,
    pub d_in: usize,
    /// `r[(e * d_out + s′) * d_in + s]`.
    pub r: Vec<f64>,
    /// Same layout as `r`; `None` where `R = 0` and the heat is undefined.
    pub q: Vec<Option<f64>>,
    /// `lhs[e * d_out + s′]`.
    pub reversibility_lhs: Vec<f64>,
}

impl RQDecomposition {
    pub fn r(&self, e: usize, s_out: usize, s_in: usize) -> f64 {
        self.r[(e * self.d_out + s_out) * self.d_in + s_in]
    }

    pub fn q(&self, e: usize, s_out: usize, s_in: usize) -> Option<f64> {
        self.q[(e * self.d_out + s_out) * self.d_in + s_in]
    }

    pub fn max_lhs(&self) -> f64 {
        self.reversibility_lhs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The inequality holds everywhere within `tol`.
    pub fn reversible(&self, tol: f64) -> bool {
        self.max_lhs() <= 1.0 + tol
    }

    /// `Σ_{E′ss′} P(s)R(E′s′|s)Q(E′s′s)`, the heat part of the average work.
    pub fn average_heat(&self, initial: &DiagonalState) -> f64 {
        let mut w = 0.0;
        for e in 0..self.n_bath {
            for so in 0..self.d_out {
                for si in 0..self.d_in {
                    if let Some(q) = self.q(e, so, si) {
                        w += initial.probs[si] * self.r(e, so, si) * q;
                    }
                }
            }
        }
        w
    }
}

pub fn derive_rq(tmat: &TransitionMatrix, grid: &BathGrid, beta: f64) -> RQDecomposition {
    let n = tmat.n_bath;
    let (d_out, d_in) = (tmat.d_out, tmat.d_in);
    let mut r = vec![0.0; n * d_out * d_in];
    let mut heat = vec![0.0; n * d_out * d_in];
    for from_e in 0..n {
        let pg = grid.gibbs_prob[from_e];
        for si in 0..d_in {
            let row = tmat.row(from_e, si);
            for to_e in 0..n {
                let de = grid.energies[from_e] - grid.energies[to_e];
                for so in 0..d_out {
                    let v = row[to_e * d_out + so];
                    if v != 0.0 {
                        let k = (to_e * d_out + so) * d_in + si;
                        r[k] += pg * v;
                        heat[k] += pg * v * de;
                    }
                }
            }
        }
    }
    let q: Vec<Option<f64>> = r.iter().zip(&heat).map(|(&rv, &h)| (rv > 0.0).then(|| h / rv)).collect();
    let mut lhs = vec![0.0; n * d_out];
    for e in 0..n {
        let lpg = grid.gibbs_prob[e].ln();
        for so in 0..d_out {
            let mut acc = 0.0;
            for si in 0..d_in {
                let k = (e * d_out + so) * d_in + si;
                if let Some(qv) = q[k] {
                    acc += (r[k].ln() + beta * qv - lpg).exp();
                }
            }
            lhs[e * d_out + so] = acc;
        }
    }
    RQDecomposition {
        n_bath: n,
        d_out,
        d_in,
        r,
        q,
        reversibility_lhs: lhs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapPurpose {
    /// Final state maximally mixed.
    Erasure,
    /// Initial state maximally mixed.
    Formation,
    /// Any transition, with `f(E′s′s) = P(s′)`.
    Product,
}

/// Infinite-bath optimal map `t(E′s′|Es) = f(E′s′s)·δ(E − E′ − f_{s′} + f_s)`
/// with `f = P(s′)`, each shift rounded to the nearest grid displacement.
///
/// Targets past the grid edge are clamped to the edge level, so every row
/// stays exactly stochastic. Rows of initial levels outside the support
/// carry no weight and are mapped without a bath shift. A transition with
/// identical endpoints gives the identity map.
pub fn construct_optimal_map(t: &Transition, grid: &BathGrid, beta: f64, purpose: MapPurpose) -> Result<TransitionMatrix> {
    let n = grid.len();
    let d_in = t.initial.state.dim();
    let d_out = t.target.state.dim();
    match purpose {
        MapPurpose::Erasure if !t.target.state.is_uniform(UNIFORM_TOL) => {
            return domain("erasure map needs a maximally mixed final state")
        }
        MapPurpose::Formation if !t.initial.state.is_uniform(UNIFORM_TOL) => {
            return domain("formation map needs a maximally mixed initial state")
        }
        _ => {}
    }
    if t.is_identity() {
        return Ok(TransitionMatrix::identity(n, d_in));
    }
    let fi = fine_grained_entropy(&t.initial.state, beta);
    let ff = fine_grained_entropy(&t.target.state, beta);
    let span = 2.0 * grid.half_width();
    let p_out = &t.target.state.probs;
    let mut m = TransitionMatrix::zeros(n, d_in, d_out);
    for si in 0..d_in {
        for so in 0..d_out {
            if p_out[so] <= 0.0 {
                continue;
            }
            let shift = if fi[si].is_finite() { ff[so] - fi[si] } else { 0.0 };
            if n > 1 && shift.abs() > span {
                return Err(FinbathError::Span {
                    shift,
                    span,
                    required: shift.abs(),
                });
            }
            let k = if n > 1 { (shift / grid.spacing).round() as i64 } else { 0 };
            for e in 0..n {
                let target = (e as i64 - k).clamp(0, n as i64 - 1) as usize;
                m.add(target, so, e, si, p_out[so]);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathSpec;
    use crate::lpopt::{induced_joint, validate_map, MapTolerances};
    use crate::system::SystemSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn qubit(initial: Vec<f64>, target: Vec<f64>) -> Transition {
        Transition::with_spec(
            &SystemSpec::trivial(2),
            DiagonalState::new(initial).unwrap(),
            DiagonalState::new(target).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn second_law_examples() {
        assert_relative_eq!(second_law_bound(&qubit(vec![0.5, 0.5], vec![1.0, 0.0]), 1.0), -LN_2, max_relative = 1e-15);
        assert_relative_eq!(second_law_bound(&qubit(vec![1.0, 0.0], vec![0.5, 0.5]), 1.0), LN_2, max_relative = 1e-15);
        let spec = SystemSpec::new(vec![0.0, 0.7, 1.9]).unwrap();
        let th = crate::system::thermal_state(&spec, 1.3);
        let t = Transition::with_spec(&spec, th.clone(), th).unwrap();
        assert_eq!(second_law_bound(&t, 1.3), 0.0);
    }

    #[test]
    fn theorem1_on_product_and_single_level() {
        let t = qubit(vec![0.9, 0.1], vec![0.3, 0.7]);
        let spec = BathSpec::new(1.0, 30.0).unwrap();
        let grid = BathGrid::discretize(&spec, 41, 6.0).unwrap();
        let joint = JointFinalDistribution::product(&grid, &t.target.state);
        assert_relative_eq!(
            theorem1_bound(&t, &joint, &grid, 1.0).unwrap(),
            second_law_bound(&t, 1.0),
            max_relative = 1e-12
        );
        let one = BathGrid::single_level(&spec);
        let joint = JointFinalDistribution::from_probs(1, 2, vec![0.3, 0.7]);
        assert_relative_eq!(
            theorem1_bound(&t, &joint, &one, 1.0).unwrap(),
            second_law_bound(&t, 1.0),
            max_relative = 1e-12
        );
        let bad = JointFinalDistribution::from_probs(1, 2, vec![0.5, 0.5]);
        assert!(matches!(theorem1_bound(&t, &bad, &one, 1.0), Err(FinbathError::Consistency(_))));
    }

    #[test]
    fn theorem1_strictly_below_for_correlated_joint() {
        let spec = BathSpec::new(1.0, 30.0).unwrap();
        let grid = BathGrid::discretize(&spec, 3, 2.0).unwrap();
        // correlated joint with the right system marginal
        let pg = &grid.gibbs_prob;
        let mut probs = [0.0; 6];
        probs[0] = pg[0];
        probs[3] = pg[1];
        probs[4] = pg[2] * 0.5;
        probs[5] = pg[2] * 0.5;
        let total: f64 = probs.iter().sum();
        let joint = JointFinalDistribution::from_probs(3, 2, probs.iter().map(|p| p / total).collect());
        let m = &joint.marginal;
        let t = qubit(vec![0.5, 0.5], m.clone());
        assert!(theorem1_bound(&t, &joint, &grid, 1.0).unwrap() < second_law_bound(&t, 1.0));
    }

    #[test]
    fn theorem2_examples() {
        let t = qubit(vec![0.5, 0.5], vec![1.0, 0.0]);
        assert!((theorem2_bound(&t, 1.0, 10.0).unwrap() - (-0.717169831255855)).abs() < 1e-12);
        assert_eq!(theorem2_bound(&t, 1.0, f64::INFINITY).unwrap(), second_law_bound(&t, 1.0));
        let swap = qubit(vec![0.3, 0.7], vec![0.7, 0.3]);
        assert_eq!(theorem2_bound(&swap, 1.0, 5.0).unwrap(), second_law_bound(&swap, 1.0));
        assert!(theorem2_bound(&t, 1.0, 0.0).is_err());
    }

    #[test]
    fn theorem3_examples() {
        let ext = qubit(vec![1.0, 0.0], vec![0.5, 0.5]);
        assert!((theorem3_bound(&ext, 1.0, 10.0, Direction::Extraction).unwrap() - 0.669124529864035).abs() < 1e-12);
        let form = qubit(vec![0.5, 0.5], vec![0.75, 0.25]);
        assert!((theorem3_bound(&form, 1.0, 10.0, Direction::Formation).unwrap() - (-0.142982771886108)).abs() < 1e-12);
        let id = qubit(vec![0.5, 0.5], vec![0.5, 0.5]);
        assert_eq!(theorem3_bound(&id, 1.0, 10.0, Direction::Formation).unwrap(), 0.0);
        assert!(theorem3_bound(&form, 1.0, 10.0, Direction::Extraction).is_err());
        assert!(theorem3_bound(&ext, 1.0, 10.0, Direction::Formation).is_err());
        // a non-trivial final Hamiltonian does not qualify either
        let spec = SystemSpec::new(vec![0.0, 1.0]).unwrap();
        let t = Transition::with_spec(&spec, DiagonalState::pure(2, 0), DiagonalState::uniform(2)).unwrap();
        assert!(theorem3_bound(&t, 1.0, 10.0, Direction::Extraction).is_err());
    }

    #[test]
    fn theorem3_extraction_equals_theorem2() {
        for p in [0.1, 0.35, 0.8, 1.0] {
            let t = qubit(vec![p, 1.0 - p], vec![0.5, 0.5]);
            assert_eq!(
                theorem3_bound(&t, 1.3, 17.0, Direction::Extraction).unwrap(),
                theorem2_bound(&t, 1.3, 17.0).unwrap()
            );
        }
    }

    #[test]
    fn erasure_fmap_matches_theorem3() {
        let beta = 1.0;
        let c = 200.0;
        let spec = BathSpec::new(beta, c).unwrap();
        let grid = BathGrid::discretize(&spec, 121, 6.0).unwrap();
        let t = qubit(vec![0.8, 0.2], vec![0.5, 0.5]);
        let f = FMap::product(&t, grid.len());
        let w = first_order_work(&f, &t, &grid, beta, spec.gamma).unwrap();
        let want = theorem3_bound(&t, beta, c, Direction::Extraction).unwrap();
        assert!((w - want).abs() < 1e-6, "{w} vs {want}");
    }

    #[test]
    fn formation_fmap_matches_theorem3() {
        let beta = 0.7;
        let c = 150.0;
        let spec = BathSpec::new(beta, c).unwrap();
        let grid = BathGrid::discretize(&spec, 121, 6.0).unwrap();
        let t = qubit(vec![0.5, 0.5], vec![0.75, 0.25]);
        let f = FMap::product(&t, grid.len());
        let w = first_order_work(&f, &t, &grid, beta, spec.gamma).unwrap();
        let want = theorem3_bound(&t, beta, c, Direction::Formation).unwrap();
        assert!((w - want).abs() < 1e-6, "{w} vs {want}");
    }

    #[test]
    fn identity_fmap_has_no_correction() {
        let spec = BathSpec::new(1.0, 50.0).unwrap();
        let grid = BathGrid::discretize(&spec, 21, 6.0).unwrap();
        let t = qubit(vec![0.6, 0.4], vec![0.6, 0.4]);
        let f = FMap::identity(grid.len(), 2);
        assert_eq!(first_order_work(&f, &t, &grid, 1.0, spec.gamma).unwrap(), 0.0);
    }

    #[test]
    fn invalid_fmap_is_rejected() {
        let spec = BathSpec::new(1.0, 50.0).unwrap();
        let grid = BathGrid::discretize(&spec, 21, 6.0).unwrap();
        let t = qubit(vec![0.6, 0.4], vec![0.5, 0.5]);
        let f = FMap::from_fn(grid.len(), 2, 2, |_, _, _| 0.7);
        assert!(matches!(first_order_work(&f, &t, &grid, 1.0, spec.gamma), Err(FinbathError::Validation(_))));
    }

    #[test]
    fn identity_map_rq() {
        let spec = BathSpec::new(1.0, 40.0).unwrap();
        let grid = BathGrid::discretize(&spec, 15, 4.0).unwrap();
        let m = TransitionMatrix::identity(grid.len(), 2);
        let rq = derive_rq(&m, &grid, 1.0);
        for e in 0..grid.len() {
            for so in 0..2 {
                for si in 0..2 {
                    let want = if so == si { grid.gibbs_prob[e] } else { 0.0 };
                    assert_relative_eq!(rq.r(e, so, si), want, max_relative = 1e-15);
                    if so == si {
                        assert_eq!(rq.q(e, so, si), Some(0.0));
                    } else {
                        assert_eq!(rq.q(e, so, si), None);
                    }
                }
                assert_relative_eq!(rq.reversibility_lhs[e * 2 + so], 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn infinite_bath_map_rq_heat_equals_shift() {
        // spacing chosen so the free-energy shifts are exact grid displacements
        let beta = 1.0;
        let spec = BathSpec::infinite(beta).unwrap();
        let grid = BathGrid::window(&spec, 41, 20.0 * LN_2).unwrap();
        let t = qubit(vec![0.8, 0.2], vec![0.5, 0.5]);
        let fi = fine_grained_entropy(&t.initial.state, beta);
        let ff = fine_grained_entropy(&t.target.state, beta);
        // re-grid so that every shift is a multiple of the spacing
        let h = ((ff[0] - fi[0]).abs()).min((ff[0] - fi[1]).abs());
        let ratio = (ff[0] - fi[0]) / (ff[0] - fi[1]);
        assert!(ratio.is_finite());
        let grid = BathGrid::window(&spec, 41, 20.0 * h).unwrap_or(grid);
        let m = construct_optimal_map(&t, &grid, beta, MapPurpose::Erasure).unwrap();
        let rq = derive_rq(&m, &grid, beta);
        // interior levels: Q equals the rounded shift
        for e in 10..30 {
            for so in 0..2 {
                for si in 0..2 {
                    let k = ((ff[so] - fi[si]) / grid.spacing).round();
                    let q = rq.q(e, so, si).unwrap();
                    assert_relative_eq!(q, k * grid.spacing, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rq_flags_irreversible_map() {
        let spec = BathSpec::new(1.0, 40.0).unwrap();
        let grid = BathGrid::discretize(&spec, 9, 3.0).unwrap();
        // dump everything into the lowest bath level
        let mut m = TransitionMatrix::zeros(grid.len(), 1, 1);
        for e in 0..grid.len() {
            m.set(0, 0, e, 0, 1.0);
        }
        let rq = derive_rq(&m, &grid, 1.0);
        assert!(!rq.reversible(1e-9));
    }

    #[test]
    fn erasure_map_structure() {
        let spec = BathSpec::new(1.0, 100.0).unwrap();
        let grid = BathGrid::discretize(&spec, 61, 6.0).unwrap();
        let t = qubit(vec![0.7, 0.3], vec![0.5, 0.5]);
        let m = construct_optimal_map(&t, &grid, 1.0, MapPurpose::Erasure).unwrap();
        for e in 0..grid.len() {
            for s in 0..2 {
                let nz: Vec<f64> = m.row(e, s).iter().copied().filter(|v| *v != 0.0).collect();
                assert_eq!(nz.len(), 2, "row ({e},{s})");
                assert!(nz.iter().all(|v| *v == 0.5));
            }
        }
        let report = validate_map(&m, &t, &grid, &MapTolerances::default());
        assert!(report.stochastic_residual < 1e-15);
        assert!(report.marginal_residual < 1e-12);
    }

    #[test]
    fn identity_transition_gives_identity_matrix() {
        let spec = BathSpec::new(1.0, 100.0).unwrap();
        let grid = BathGrid::discretize(&spec, 11, 6.0).unwrap();
        let t = qubit(vec![0.5, 0.5], vec![0.5, 0.5]);
        let m = construct_optimal_map(&t, &grid, 1.0, MapPurpose::Erasure).unwrap();
        assert_eq!(m, TransitionMatrix::identity(grid.len(), 2));
        let joint = induced_joint(&m, &t.initial.state, &grid);
        assert!(joint.divergence_from_product(&grid).unwrap() < 1e-15);
    }

    #[test]
    fn constructed_maps_are_valid_in_gibbs_weight() {
        // Reversibility holds up to edge clamping and first-order γ terms;
        // weighted by p_G(E′) the residual is controlled by spacing·β.
        let beta = 1.0;
        let spec = BathSpec::new(beta, 400.0).unwrap();
        let grid = BathGrid::discretize(&spec, 121, 6.0).unwrap();
        for (t, purpose) in [
            (qubit(vec![0.5, 0.5], vec![0.75, 0.25]), MapPurpose::Formation),
            (qubit(vec![0.75, 0.25], vec![0.5, 0.5]), MapPurpose::Erasure),
        ] {
            let m = construct_optimal_map(&t, &grid, beta, purpose).unwrap();
            let tol = MapTolerances {
                reversibility: grid.spacing * beta,
                gibbs_weighted_reversibility: true,
                ..Default::default()
            };
            let report = validate_map(&m, &t, &grid, &tol);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn span_error_for_narrow_grid() {
        let spec = BathSpec::new(1.0, 1e4).unwrap();
        let grid = BathGrid::window(&spec, 5, 0.1).unwrap();
        let t = qubit(vec![0.99, 0.01], vec![0.5, 0.5]);
        assert!(matches!(
            construct_optimal_map(&t, &grid, 1.0, MapPurpose::Erasure),
            Err(FinbathError::Span { .. })
        ));
        let form = qubit(vec![0.99, 0.01], vec![0.5, 0.5]);
        assert!(construct_optimal_map(&form, &grid, 1.0, MapPurpose::Formation).is_err());
    }

    #[test]
    fn reversibility_gap_identity() {
        let p = DiagonalState::new(vec![0.6, 0.3, 0.1]).unwrap();
        let ds = (3f64).ln() - crate::system::shannon_entropy(&p);
        let var = varentropy(&p);
        let got = reversibility_gap(&p, 1.2, 33.0).unwrap();
        let want = -(2.0 * ds * ds + var) / (2.0 * 1.2 * 33.0);
        assert!((got - want).abs() < 1e-12);
        assert!(got < 0.0);
    }
}
