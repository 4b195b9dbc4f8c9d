use std::io::{self, Write};

use crate::error::{domain, Result};
use crate::system::{DiagonalState, SystemSpec};

/// Slack allowed when one curve must lie on or above another.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Resolution of β-key comparisons in log space. Keys closer than this are
/// ties and fall back to the level index.
const KEY_RESOLUTION: f64 = 1e-10;

/// Levels sorted by `P(s)e^{βε_s}` descending, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaOrdering {
    pub permutation: Vec<usize>,
}

pub fn beta_order(state: &DiagonalState, spec: &SystemSpec, beta: f64) -> BetaOrdering {
    // log-key quantized so that ties are exact and the order is total
    let key = |s: usize| -> i64 {
        let p = state.probs[s];
        if p <= 0.0 {
            i64::MIN
        } else {
            ((p.ln() + beta * spec.energies[s]) / KEY_RESOLUTION).round() as i64
        }
    };
    let mut permutation: Vec<usize> = (0..state.dim()).collect();
    permutation.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
    BetaOrdering { permutation }
}

/// Thermomajorization curve in the total-energy subspace `E_tot`.
///
/// Vertex `k` sits at `x_k = Σ_{j≤k} e^{−(β−γE_tot)ε_j}` and
/// `y_k = Σ_{j≤k} P(j)e^{γE_tot ε_j} / Σ_l P(l)e^{γE_tot ε_l}`, levels taken
/// in β-order. The first vertex is the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoCurve {
    pub beta: f64,
    pub gamma: f64,
    pub e_tot: f64,
    pub order: Vec<usize>,
    pub vertices: Vec<(f64, f64)>,
}

pub fn thermo_curve(state: &DiagonalState, spec: &SystemSpec, beta: f64, gamma: f64, e_tot: f64) -> ThermoCurve {
    let order = beta_order(state, spec, beta).permutation;
    let beta_eff = beta - gamma * e_tot;
    let weights: Vec<f64> = (0..state.dim())
        .map(|s| state.probs[s] * (gamma * e_tot * spec.energies[s]).exp())
        .collect();
    let norm: f64 = weights.iter().sum();
    let mut vertices = Vec::with_capacity(order.len() + 1);
    vertices.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for &s in &order {
        x += (-beta_eff * spec.energies[s]).exp();
        y += weights[s] / norm;
        vertices.push((x, y));
    }
    if let Some(last) = vertices.last_mut() {
        last.1 = 1.0;
    }
    ThermoCurve {
        beta,
        gamma,
        e_tot,
        order,
        vertices,
    }
}

impl ThermoCurve {
    pub fn width(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.0)
    }

    /// `y(x)` by linear interpolation, `1` beyond the last vertex.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        for w in self.vertices.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x <= x1 {
                if x1 == x0 {
                    return y1;
                }
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        1.0
    }

    /// Segment slopes in curve order. Zero-width segments are skipped.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// CSV rows `x,y,level_index,E_tot,beta,gamma`; the origin has an empty
    /// level index. Reals carry 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> io::Result<()> {
        if header {
            writeln!(w, "x,y,level_index,E_tot,beta,gamma")?;
        }
        for (k, &(x, y)) in self.vertices.iter().enumerate() {
            let level = if k == 0 { String::new() } else { self.order[k - 1].to_string() };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt12(x),
                fmt12(y),
                level,
                fmt12(self.e_tot),
                fmt12(self.beta),
                fmt12(self.gamma)
            )?;
        }
        Ok(())
    }
}

/// Shortest decimal form of `v` rounded to 12 significant digits.
pub fn fmt12(v: f64) -> String {
    let r = crate::numeric::round_sig(v, 12);
    if r == 0.0 {
        // normalizes -0
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// Whether `a` lies on or above `b` (within [`DOMINANCE_TOL`]) on
/// `[0, min(width_a, width_b)]`, checked at every vertex abscissa of either
/// curve. Both are piecewise linear, so the vertices suffice.
pub fn dominates(a: &ThermoCurve, b: &ThermoCurve) -> Result<bool> {
    let same = |u: f64, v: f64| (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0);
    if !(same(a.beta, b.beta) && same(a.gamma, b.gamma) && same(a.e_tot, b.e_tot)) {
        return domain(format!(
            "curves differ in (beta, gamma, E_tot): ({}, {}, {}) vs ({}, {}, {})",
            a.beta, a.gamma, a.e_tot, b.beta, b.gamma, b.e_tot
        ));
    }
    let end = a.width().min(b.width());
    let ok = a
        .vertices
        .iter()
        .chain(&b.vertices)
        .map(|v| v.0)
        .chain(std::iter::once(end))
        .filter(|&x| x <= end)
        .all(|x| a.eval(x) >= b.eval(x) - DOMINANCE_TOL);
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::thermal_state;
    use approx::assert_relative_eq;

    #[test]
    fn thermal_keys_tie_to_identity() {
        let spec = SystemSpec::new(vec![0.0, 0.3, 1.7, 2.2]).unwrap();
        let th = thermal_state(&spec, 1.4);
        assert_eq!(beta_order(&th, &spec, 1.4).permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn order_examples() {
        let p = DiagonalState::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(beta_order(&p, &SystemSpec::trivial(3), 1.0).permutation, vec![1, 2, 0]);
        let q = DiagonalState::new(vec![0.4, 0.6]).unwrap();
        let gap = SystemSpec::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(beta_order(&q, &gap, 1.0).permutation, vec![1, 0]);
        // zero-probability levels go last, by index
        let z = DiagonalState::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(beta_order(&z, &SystemSpec::trivial(3), 1.0).permutation, vec![1, 0, 2]);
    }

    #[test]
    fn trivial_hamiltonian_gives_lorenz_curve() {
        let p = DiagonalState::new(vec![0.1, 0.6, 0.3]).unwrap();
        let c = thermo_curve(&p, &SystemSpec::trivial(3), 1.0, 0.02, 7.0);
        let want = [(0.0, 0.0), (1.0, 0.6), (2.0, 0.9), (3.0, 1.0)];
        for (v, w) in c.vertices.iter().zip(want) {
            assert_relative_eq!(v.0, w.0, max_relative = 1e-15);
            assert_relative_eq!(v.1, w.1, max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_energy_subspace_is_standard_diagram() {
        let spec = SystemSpec::new(vec![0.0, 1.0, 2.5]).unwrap();
        let p = DiagonalState::new(vec![0.2, 0.5, 0.3]).unwrap();
        let c = thermo_curve(&p, &spec, 0.8, 0.05, 0.0);
        // keys 0.2, 0.5e^0.8, 0.3e^2.0 -> order 2, 1, 0
        assert_eq!(c.order, vec![2, 1, 0]);
        let x1 = (-0.8f64 * 2.5).exp();
        assert_relative_eq!(c.vertices[1].0, x1, max_relative = 1e-15);
        assert_relative_eq!(c.vertices[1].1, 0.3, max_relative = 1e-15);
        assert_relative_eq!(c.width(), crate::system::partition_function(&spec, 0.8), max_relative = 1e-14);
    }

    #[test]
    fn dominance_basics() {
        let spec = SystemSpec::new(vec![0.0, 0.5, 1.5]).unwrap();
        let p = DiagonalState::new(vec![0.2, 0.5, 0.3]).unwrap();
        let c = thermo_curve(&p, &spec, 1.0, 0.01, 0.0);
        assert!(dominates(&c, &c).unwrap());
        let th = thermo_curve(&thermal_state(&spec, 1.0), &spec, 1.0, 0.01, 0.0);
        assert!(dominates(&c, &th).unwrap());
        assert!(!dominates(&th, &c).unwrap());
        let other = thermo_curve(&p, &spec, 1.0, 0.01, 1.0);
        assert!(dominates(&c, &other).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = DiagonalState::new(vec![0.25, 0.75]).unwrap();
        let c = thermo_curve(&p, &SystemSpec::trivial(2), 1.0, 0.0, 0.0);
        let mut out = Vec::new();
        c.write_csv(&mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "x,y,level_index,E_tot,beta,gamma\n0,0,,0,1,0\n1,0.75,1,0,1,0\n2,1,0,0,1,0\n"
        );
    }
}
