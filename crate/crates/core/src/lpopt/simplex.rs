//! Dense revised simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! The constraint matrix is held column-sparse; the basis inverse is dense
//! and updated in product form, with a full refactorization every
//! `refactor_every` pivots. Every choice (entering column, leaving row,
//! tie-breaks) is a pure function of the current iterate, so identical
//! inputs replay bit-identically.

use log::debug;

/// Column-compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub n_rows: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn new(n_rows: usize) -> Self {
        Self {
            n_rows,
            col_ptr: vec![0],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Append a column given as `(row, value)` pairs.
    pub fn push_column(&mut self, entries: &[(usize, f64)]) {
        for &(r, v) in entries {
            debug_assert!(r < self.n_rows);
            if v != 0.0 {
                self.row_idx.push(r);
                self.values.push(v);
            }
        }
        self.col_ptr.push(self.row_idx.len());
    }

    pub fn n_cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        self.row_idx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (r, v) in self.column(j) {
                    out[r] += v * xj;
                }
            }
        }
        out
    }

    /// The submatrix made of the rows in `keep`, renumbered in that order.
    pub fn select_rows(&self, keep: &[usize]) -> CscMatrix {
        let mut map = vec![usize::MAX; self.n_rows];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut out = CscMatrix::new(keep.len());
        for j in 0..self.n_cols() {
            let col: Vec<(usize, f64)> = self
                .column(j)
                .filter(|(r, _)| map[*r] != usize::MAX)
                .map(|(r, v)| (map[r], v))
                .collect();
            out.push_column(&col);
        }
        out
    }

    /// Row-major view of the matrix: for each row, its `(column, value)` pairs.
    pub fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.n_rows];
        for j in 0..self.n_cols() {
            for (r, v) in self.column(j) {
                rows[r].push((j, v));
            }
        }
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables. Never cycles, but slow.
    Bland,
    /// Most negative reduced cost.
    Dantzig,
    /// Dantzig pricing that falls back to Bland's rule after a run of
    /// degenerate pivots and returns to Dantzig on the next strict improvement.
    DantzigWithBlandFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub rule: PivotRule,
    /// Primal feasibility tolerance.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance, relative to the largest objective coefficient.
    pub optimality_tol: f64,
    /// Smallest acceptable pivot magnitude.
    pub pivot_tol: f64,
    pub refactor_every: usize,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots that trigger the Bland fallback.
    pub degenerate_run: usize,
    /// Equilibrate rows and columns before solving.
    pub scale: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            rule: PivotRule::DantzigWithBlandFallback,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            refactor_every: 64,
            max_iterations: 2_000_000,
            degenerate_run: 200,
            scale: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The basis became numerically singular.
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub status: SimplexStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y` with `cᵀx = bᵀy` at optimality (in the caller's row signs).
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// `max |Ax − b|`.
    pub primal_residual: f64,
    /// `max(0, −min_j (c_j − yᵀA_j))` over structural columns.
    pub dual_infeasibility: f64,
    /// `|cᵀx − bᵀy| / max(1, |cᵀx|)`.
    pub duality_gap: f64,
}

struct Tableau<'a> {
    a: &'a CscMatrix,
    b: Vec<f64>,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    opts: SimplexOptions,
    iterations: usize,
}

impl<'a> Tableau<'a> {
    fn new(a: &'a CscMatrix, b: Vec<f64>, opts: SimplexOptions) -> Self {
        let m = a.n_rows;
        let n = a.n_cols();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut is_basic = vec![false; n + m];
        for flag in is_basic.iter_mut().skip(n) {
            *flag = true;
        }
        Self {
            a,
            xb: b.clone(),
            b,
            m,
            n,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
            opts,
            iterations: 0,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    /// Entries of column `j` of `[A | I]`.
    fn col(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.a.column(j).collect()
        } else {
            vec![(j - self.n, 1.0)]
        }
    }

    fn ftran(&self, col: &[(usize, f64)]) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(r, v) in col {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[i * m + r] * v;
            }
        }
        alpha
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yj, &bij) in y.iter_mut().zip(row) {
                    *yj += cb * bij;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        let mut d = cost[j];
        if j < self.n {
            for (r, v) in self.a.column(j) {
                d -= y[r] * v;
            }
        } else {
            d -= y[j - self.n];
        }
        d
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let theta = self.xb[r] / piv;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
                if self.xb[i] < 0.0 && self.xb[i] > -self.opts.feasibility_tol {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v / piv).collect();
        for i in 0..m {
            let f = alpha[i];
            if i != r && f != 0.0 {
                let row = &mut self.binv[i * m..(i + 1) * m];
                for (bij, &rj) in row.iter_mut().zip(&row_r) {
                    *bij -= f * rj;
                }
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&row_r);
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        if self.iterations.is_multiple_of(self.opts.refactor_every) {
            self.refactor();
        }
    }

    /// Rebuild `B⁻¹` by Gauss-Jordan elimination with partial pivoting.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut bmat = vec![0.0; m * m];
        for (k, &bv) in self.basis.iter().enumerate() {
            for (r, v) in self.col(bv) {
                bmat[r * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut best = c;
            let mut best_val = bmat[c * m + c].abs();
            for r in c + 1..m {
                let v = bmat[r * m + c].abs();
                if v > best_val {
                    best = r;
                    best_val = v;
                }
            }
            if best_val < 1e-14 {
                return false;
            }
            if best != c {
                for k in 0..m {
                    bmat.swap(c * m + k, best * m + k);
                    inv.swap(c * m + k, best * m + k);
                }
            }
            let p = bmat[c * m + c];
            for k in 0..m {
                bmat[c * m + k] /= p;
                inv[c * m + k] /= p;
            }
            for r in 0..m {
                if r != c {
                    let f = bmat[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            bmat[r * m + k] -= f * bmat[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        let mut xb = vec![0.0; m];
        for (i, x) in xb.iter_mut().enumerate() {
            let row = &self.binv[i * m..(i + 1) * m];
            *x = row.iter().zip(&self.b).map(|(a, b)| a * b).sum();
            if *x < 0.0 && *x > -self.opts.feasibility_tol {
                *x = 0.0;
            }
        }
        self.xb = xb;
        true
    }

    /// Run simplex iterations with `cost` until optimal. Artificial columns
    /// may enter only when `allow_artificial` is set.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> SimplexStatus {
        let scale = cost.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
        let opt_tol = self.opts.optimality_tol * scale;
        let mut degenerate = 0usize;
        let mut bland = self.opts.rule == PivotRule::Bland;
        let total = if allow_artificial { self.n + self.m } else { self.n };
        loop {
            if self.iterations >= self.opts.max_iterations {
                return SimplexStatus::IterationLimit;
            }
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = -opt_tol;
            for j in 0..total {
                if self.is_basic[j] {
                    continue;
                }
                let d = self.reduced_cost(j, cost, &y);
                if d < -opt_tol {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if d < best {
                        best = d;
                        entering = Some(j);
                    }
                }
            }
            let Some(q) = entering else {
                return SimplexStatus::Optimal;
            };
            let alpha = self.ftran(&self.col(q));
            let Some(r) = self.ratio_test(&alpha, bland) else {
                return SimplexStatus::Unbounded;
            };
            let step = self.xb[r] / alpha[r];
            self.pivot(r, q, &alpha);
            if step <= self.opts.feasibility_tol {
                degenerate += 1;
                if self.opts.rule == PivotRule::DantzigWithBlandFallback && degenerate >= self.opts.degenerate_run {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = self.opts.rule == PivotRule::Bland;
            }
        }
    }

    fn ratio_test(&self, alpha: &[f64], bland: bool) -> Option<usize> {
        let largest = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let tol = self.opts.pivot_tol * largest.max(1.0);
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if a > tol {
                    let t = self.xb[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, t)),
                        Some((bi, bt)) => {
                            if t < bt || (t == bt && self.basis[i] < self.basis[bi]) {
                                Some((i, t))
                            } else {
                                Some((bi, bt))
                            }
                        }
                    };
                }
            }
            return best.map(|(i, _)| i);
        }
        // Harris two-pass: relaxed bound first, then the largest pivot under it.
        let ftol = self.opts.feasibility_tol;
        let mut bound = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > tol {
                bound = bound.min((self.xb[i].max(0.0) + ftol) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut pick: Option<usize> = None;
        for (i, &a) in alpha.iter().enumerate() {
            if a > tol && self.xb[i].max(0.0) / a <= bound {
                pick = match pick {
                    None => Some(i),
                    Some(p) if a > alpha[p] => Some(i),
                    other => other,
                };
            }
        }
        pick
    }

    /// Replace the basis and refactor. Fails on a singular basis.
    fn install_basis(&mut self, basis: &[usize]) -> bool {
        if basis.len() != self.m || basis.iter().any(|&j| j >= self.n + self.m) {
            return false;
        }
        self.is_basic.iter_mut().for_each(|f| *f = false);
        for &j in basis {
            if self.is_basic[j] {
                return false;
            }
            self.is_basic[j] = true;
        }
        self.basis = basis.to_vec();
        self.refactor()
    }

    /// Basic values are non-negative and basic artificials vanish, within `tol`.
    fn is_primal_feasible(&self, tol: f64) -> bool {
        self.xb.iter().all(|&v| v >= -tol) && self.artificial_mass() <= tol * (self.m as f64).sqrt()
    }

    fn artificial_mass(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&bv, _)| bv >= self.n)
            .map(|(_, &x)| x.abs())
            .sum()
    }

    /// Pivot basic artificials out on any structural column with a usable
    /// entry in their row. Rows where none exists are redundant.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.is_basic[j] {
                    continue;
                }
                let v: f64 = self.a.column(j).map(|(i, a)| row[i] * a).sum();
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let alpha = self.ftran(&self.col(q));
                self.pivot(r, q, &alpha);
            }
        }
    }
}

/// Solve `min cᵀx  s.t.  Ax = b, x ≥ 0` by the two-phase method.
///
/// With `opts.scale` the rows and columns are first equilibrated by powers
/// of two (geometric-mean passes). The scaled optimum's basis then seeds a
/// clean-up run on the original problem, so optimality and feasibility are
/// judged in the caller's units.
pub fn solve(a: &CscMatrix, b: &[f64], c: &[f64], opts: &SimplexOptions) -> SimplexResult {
    if !opts.scale {
        return solve_from(a, b, c, opts, None).0;
    }
    let (row_scale, col_scale) = geometric_scaling(a, 6);
    let mut scaled = a.clone();
    for j in 0..scaled.n_cols() {
        for k in scaled.col_ptr[j]..scaled.col_ptr[j + 1] {
            scaled.values[k] *= row_scale[scaled.row_idx[k]] * col_scale[j];
        }
    }
    let sb: Vec<f64> = b.iter().zip(&row_scale).map(|(v, r)| v * r).collect();
    let sc: Vec<f64> = c.iter().zip(&col_scale).map(|(v, s)| v * s).collect();
    let (first, basis) = solve_from(&scaled, &sb, &sc, opts, None);
    if first.status != SimplexStatus::Optimal {
        debug!("scaled solve ended with {:?}; solving unscaled from scratch", first.status);
        let (mut res, _) = solve_from(a, b, c, opts, None);
        res.iterations += first.iterations;
        return res;
    }
    let (mut res, _) = solve_from(a, b, c, opts, Some(&basis));
    res.iterations += first.iterations;
    res
}

/// Row and column factors (powers of two) that bring every nonzero of
/// `diag(r)·A·diag(s)` close to one in geometric mean.
pub fn geometric_scaling(a: &CscMatrix, passes: usize) -> (Vec<f64>, Vec<f64>) {
    let m = a.n_rows;
    let n = a.n_cols();
    let mut r = vec![1.0f64; m];
    let mut s = vec![1.0f64; n];
    for _ in 0..passes {
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![0.0f64; m];
        for j in 0..n {
            for (i, v) in a.column(j) {
                let w = (v * r[i] * s[j]).abs();
                lo[i] = lo[i].min(w);
                hi[i] = hi[i].max(w);
            }
        }
        for i in 0..m {
            if hi[i] > 0.0 {
                r[i] /= (lo[i] * hi[i]).sqrt();
            }
        }
        for j in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (i, v) in a.column(j) {
                let w = (v * r[i] * s[j]).abs();
                lo = lo.min(w);
                hi = hi.max(w);
            }
            if hi > 0.0 {
                s[j] /= (lo * hi).sqrt();
            }
        }
    }
    let pow2 = |v: f64| 2f64.powi(v.log2().round() as i32);
    (r.into_iter().map(pow2).collect(), s.into_iter().map(pow2).collect())
}

/// Two-phase solve, optionally starting from `warm` (column indices into
/// `[A | I]`). A warm basis that is singular or not primal feasible falls
/// back to the artificial start. Returns the final basis alongside.
fn solve_from(
    a: &CscMatrix,
    b: &[f64],
    c: &[f64],
    opts: &SimplexOptions,
    warm: Option<&[usize]>,
) -> (SimplexResult, Vec<usize>) {
    let m = a.n_rows;
    let n = a.n_cols();
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(c.len(), n, "cost length");

    // Flip rows so that b ≥ 0; the artificial basis is then feasible.
    let signs: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let flipped;
    let a_eff = if signs.iter().any(|&s| s < 0.0) {
        let mut f = a.clone();
        for (k, r) in f.row_idx.iter().enumerate() {
            f.values[k] *= signs[*r];
        }
        flipped = f;
        &flipped
    } else {
        a
    };
    let b_eff: Vec<f64> = b.iter().zip(&signs).map(|(v, s)| v * s).collect();
    let b_scale = b_eff.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let feas = opts.feasibility_tol * b_scale;

    let mut tab = Tableau::new(a_eff, b_eff.clone(), *opts);
    let mut status = SimplexStatus::Optimal;
    let mut warm_ok = false;
    if let Some(basis) = warm {
        warm_ok = tab.install_basis(basis) && tab.is_primal_feasible(feas);
        debug!("warm start {}", if warm_ok { "accepted" } else { "rejected" });
        if !warm_ok {
            tab = Tableau::new(a_eff, b_eff.clone(), *opts);
        }
    }
    if !warm_ok {
        let mut phase1 = vec![0.0; n + m];
        for v in phase1.iter_mut().skip(n) {
            *v = 1.0;
        }
        status = tab.optimize(&phase1, true);
        let infeas = tab.artificial_mass();
        debug!("phase 1: {:?} after {} pivots, infeasibility {:.3e}", status, tab.iterations, infeas);
        if status == SimplexStatus::Optimal && infeas > feas {
            status = SimplexStatus::Infeasible;
        }
        if status == SimplexStatus::Optimal {
            tab.drive_out_artificials();
            if !tab.refactor() {
                status = SimplexStatus::Singular;
            }
        }
    }
    let mut phase2 = vec![0.0; n + m];
    phase2[..n].copy_from_slice(c);
    if status == SimplexStatus::Optimal {
        status = tab.optimize(&phase2, false);
        debug!("phase 2: {:?} after {} pivots total", status, tab.iterations);
        if !tab.refactor() {
            status = SimplexStatus::Singular;
        }
        if status == SimplexStatus::Optimal && !tab.is_primal_feasible(feas * 1e3) {
            debug!("final basis is not primal feasible");
            status = SimplexStatus::Singular;
        }
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.xb[i].max(0.0);
        }
    }
    let objective: f64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    let y_eff = tab.duals(&phase2);
    let mut dual_infeasibility = 0.0f64;
    for j in 0..n {
        if !tab.is_basic[j] {
            dual_infeasibility = dual_infeasibility.max(-tab.reduced_cost(j, &phase2, &y_eff));
        }
    }
    let duals: Vec<f64> = y_eff.iter().zip(&signs).map(|(y, s)| y * s).collect();
    let dual_obj: f64 = duals.iter().zip(b).map(|(y, b)| y * b).sum();
    let ax = a.mul_vec(&x);
    let primal_residual = ax.iter().zip(b).fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    let basis = tab.basis.clone();
    (
        SimplexResult {
            status,
            objective,
            duality_gap: (objective - dual_obj).abs() / objective.abs().max(1.0),
            x,
            duals,
            iterations: tab.iterations,
            primal_residual,
            dual_infeasibility,
        },
        basis,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> CscMatrix {
        let m = rows.len();
        let n = rows[0].len();
        let mut a = CscMatrix::new(m);
        for j in 0..n {
            let col: Vec<(usize, f64)> = (0..m).map(|i| (i, rows[i][j])).collect();
            a.push_column(&col);
        }
        a
    }

    #[test]
    fn small_textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> (2, 6), value 36
        let a = dense(&[
            &[1.0, 0.0, 1.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 1.0, 0.0],
            &[3.0, 2.0, 0.0, 0.0, 1.0],
        ]);
        for rule in [PivotRule::Bland, PivotRule::Dantzig, PivotRule::DantzigWithBlandFallback] {
            let opts = SimplexOptions { rule, ..Default::default() };
            let r = solve(&a, &[4.0, 12.0, 18.0], &[-3.0, -5.0, 0.0, 0.0, 0.0], &opts);
            assert_eq!(r.status, SimplexStatus::Optimal);
            assert!((r.objective + 36.0).abs() < 1e-10);
            assert!((r.x[0] - 2.0).abs() < 1e-10 && (r.x[1] - 6.0).abs() < 1e-10);
            assert!(r.duality_gap < 1e-12);
        }
    }

    #[test]
    fn detects_infeasible() {
        // x + y = 1 and x + y = 2
        let a = dense(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let r = solve(&a, &[1.0, 2.0], &[0.0, 0.0], &SimplexOptions::default());
        assert_eq!(r.status, SimplexStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x s.t. x - y = 0
        let a = dense(&[&[1.0, -1.0]]);
        let r = solve(&a, &[0.0], &[-1.0, 0.0], &SimplexOptions::default());
        assert_eq!(r.status, SimplexStatus::Unbounded);
    }

    #[test]
    fn handles_redundant_rows_and_negative_rhs() {
        // x + y + z = 1 (twice), -x = -0.25, min z - y
        let a = dense(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[-1.0, 0.0, 0.0]]);
        let r = solve(&a, &[1.0, 1.0, -0.25], &[0.0, -1.0, 1.0], &SimplexOptions::default());
        assert_eq!(r.status, SimplexStatus::Optimal);
        assert!((r.objective + 0.75).abs() < 1e-12);
        assert!(r.primal_residual < 1e-12);
        assert!(r.duality_gap < 1e-12);
    }
}
