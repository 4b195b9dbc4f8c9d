use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::Value;

use super::config::{CommandName, DirectionChoice, Energies, HeatCapacity, RunConfig, SweepParameter};
use super::report::{num, nums, object, sourced, Artifact, Plot, Report};
use crate::bath::BathGrid;
use crate::detwork::{
    self, estar_of_epsilon, epsilon_asymptotic, epsilon_leading_order, epsilon_of_estar, f_max, f_min, smoothed_w,
    thermo_curve, transition_possible, w_deterministic, w_form_subspace, EpsilonBudget, DEFAULT_ENERGY_GRID,
};
use crate::error::{FinbathError, Result};
use crate::flucwork::{
    reversibility_gap, second_law_bound, theorem1_bound, theorem2_bound, theorem3_applies, theorem3_bound, Direction,
};
use crate::lpopt::{build_lp, induced_joint, simplex::SimplexOptions, solve_lp, validate_map, LpStatus, MapTolerances};
use crate::system::{log_partition_function, Transition};

/// Largest acceptable LP residual before a report is marked invalid.
pub const RESIDUAL_TOL: f64 = 1e-8;

pub fn run(cmd: CommandName, cfg: &RunConfig, warnings: &[String]) -> Result<Report> {
    let mut report = match cmd {
        CommandName::Bound => cmd_bound(cfg)?,
        CommandName::Optimize => cmd_optimize(cfg)?,
        CommandName::Detwork => cmd_detwork(cfg)?,
        CommandName::Epsilon => cmd_epsilon(cfg)?,
        CommandName::Curve => cmd_curve(cfg)?,
    };
    finish(&mut report, cmd.as_str(), cfg, warnings);
    Ok(report)
}

fn finish(report: &mut Report, command: &str, cfg: &RunConfig, warnings: &[String]) {
    if let Value::Object(m) = &mut report.body {
        m.insert("command".into(), Value::String(command.into()));
        m.insert("input".into(), serde_json::to_value(cfg).unwrap_or(Value::Null));
        m.insert("warnings".into(), Value::Array(warnings.iter().map(|w| Value::String(w.clone())).collect()));
        m.insert("valid".into(), Value::Bool(report.valid));
        m.insert(
            "files".into(),
            Value::Array(report.artifacts.iter().map(|a| Value::String(a.name.clone())).collect()),
        );
    }
}

fn heat_capacity_value(cfg: &RunConfig) -> Value {
    num(cfg.heat_capacity.value())
}

fn bath_parameters(cfg: &RunConfig) -> Result<Vec<(&'static str, Value)>> {
    let bath = cfg.bath()?;
    Ok(vec![
        ("beta", num(bath.beta)),
        ("gamma", num(bath.gamma)),
        ("heat_capacity", heat_capacity_value(cfg)),
    ])
}

fn base(parameters: Vec<(&str, Value)>, results: Vec<(&str, Value)>, diagnostics: Vec<(&str, Value)>) -> Value {
    object([
        ("parameters", object(parameters)),
        ("results", object(results)),
        ("diagnostics", object(diagnostics)),
    ])
}

/// Closed-form average-work bounds.
pub fn cmd_bound(cfg: &RunConfig) -> Result<Report> {
    let t = cfg.transition()?;
    let (beta, c) = (cfg.beta, cfg.heat_capacity.value());
    let mut results = vec![
        ("second_law", sourced(second_law_bound(&t, beta), "flucwork::second_law_bound")),
        ("theorem2", sourced(theorem2_bound(&t, beta, c)?, "flucwork::theorem2_bound")),
        ("delta_entropy", sourced(t.delta_entropy(), "system::Transition::delta_entropy")),
        (
            "reversibility_gap",
            sourced(reversibility_gap(&t.target.state, beta, c)?, "flucwork::reversibility_gap"),
        ),
    ];
    if theorem3_applies(&t, Direction::Extraction) {
        results.push((
            "theorem3_extraction",
            sourced(theorem3_bound(&t, beta, c, Direction::Extraction)?, "flucwork::theorem3_bound"),
        ));
    }
    if theorem3_applies(&t, Direction::Formation) {
        results.push((
            "theorem3_formation",
            sourced(theorem3_bound(&t, beta, c, Direction::Formation)?, "flucwork::theorem3_bound"),
        ));
    }
    Ok(Report {
        body: base(bath_parameters(cfg)?, results, vec![]),
        artifacts: vec![],
        valid: true,
    })
}

/// Exact LP optimum on the configured grid.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<Report> {
    let t = cfg.transition()?;
    let grid = cfg.bath_grid()?;
    let beta = cfg.beta;
    let c = cfg.heat_capacity.value();
    let problem = build_lp(&t, &grid, beta)?;
    let sol = solve_lp(&problem, &SimplexOptions::default())?;
    let mut params = bath_parameters(cfg)?;
    params.push(("grid_levels", Value::from(grid.len())));
    params.push(("grid_half_width", num(grid.half_width())));
    params.push(("grid_spacing", num(grid.spacing)));

    let theorem2 = theorem2_bound(&t, beta, c)?;
    let mut results = vec![
        ("optimal_work", sourced(sol.optimal_work, "lpopt::solve_lp")),
        ("second_law", sourced(second_law_bound(&t, beta), "flucwork::second_law_bound")),
        ("theorem2", sourced(theorem2, "flucwork::theorem2_bound")),
        ("gap_to_theorem2", sourced(theorem2 - sol.optimal_work, "lpopt::solve_lp")),
    ];
    let mut diagnostics = vec![
        ("status", Value::String(sol.status.as_str().into())),
        ("iterations", Value::from(sol.iterations)),
        ("primal_residual", num(sol.primal_residual)),
        ("duality_gap", num(sol.duality_gap)),
        ("dual_infeasibility", num(sol.dual_infeasibility)),
        ("variables", Value::from(problem.variable_count())),
        ("constraints", Value::from(problem.constraint_count())),
        ("residual_tolerance", num(RESIDUAL_TOL)),
    ];
    let mut valid = sol.status != LpStatus::Infeasible;
    let mut artifacts = vec![];
    if sol.status == LpStatus::SpanLimited {
        diagnostics.push((
            "hint",
            Value::String("the optimal map shifts the bath by more than half the grid; raise grid.span_sigmas or grid.half_width".into()),
        ));
    }
    if sol.status != LpStatus::Infeasible {
        let tol = MapTolerances::default();
        let v = validate_map(&sol.matrix, &t, &grid, &tol);
        valid &= v.passed() && sol.primal_residual <= RESIDUAL_TOL;
        diagnostics.push((
            "validation",
            object([
                ("passed", Value::Bool(v.passed())),
                ("marginal_residual", num(v.marginal_residual)),
                ("stochastic_residual", num(v.stochastic_residual)),
                ("min_entry", num(v.min_entry)),
                ("reversibility_residual", num(v.reversibility_residual)),
                (
                    "violated_constraints",
                    Value::Array(v.violations.iter().map(|x| Value::from(x.constraint)).collect()),
                ),
            ]),
        ));
        let joint = induced_joint(&sol.matrix, &t.initial.state, &grid);
        match theorem1_bound(&t, &joint, &grid, beta) {
            Ok(b) => results.push(("theorem1", sourced(b, "flucwork::theorem1_bound"))),
            Err(e) => {
                valid = false;
                diagnostics.push(("theorem1_error", Value::String(e.to_string())));
            }
        }
        results.push((
            "bath_divergence",
            sourced(joint.divergence_from_product(&grid)?, "flucwork::JointFinalDistribution::divergence_from_product"),
        ));
        if let Some(err) = grid_error_estimate(&t, &grid, cfg, sol.optimal_work)? {
            results.push(("grid_error_estimate", sourced(err, "lpopt::solve_lp")));
        }
        let mut dump = Vec::new();
        problem
            .write_dump(&mut dump)
            .map_err(|e| FinbathError::Internal(format!("LP dump: {e}")))?;
        artifacts.push(Artifact {
            name: "lp.txt".into(),
            contents: String::from_utf8_lossy(&dump).into_owned(),
            plot: None,
        });
        artifacts.push(Artifact {
            name: "map.csv".into(),
            contents: map_csv(&sol.matrix, &grid),
            plot: None,
        });
    }
    Ok(Report {
        body: base(params, results, diagnostics),
        artifacts,
        valid,
    })
}

/// Richardson estimate `W_∞ − W_N ≈ W_N − W_{N/2}` from the same window at
/// twice the spacing.
fn grid_error_estimate(t: &Transition, grid: &BathGrid, cfg: &RunConfig, work: f64) -> Result<Option<f64>> {
    let half = grid.len() / 2;
    if half < 4 || !half.is_multiple_of(2) {
        return Ok(None);
    }
    let coarse = BathGrid::window(&cfg.bath()?, half + 1, grid.half_width())?;
    let sol = solve_lp(&build_lp(t, &coarse, cfg.beta)?, &SimplexOptions::default())?;
    Ok((sol.status != LpStatus::Infeasible).then_some(work - sol.optimal_work))
}

fn map_csv(m: &crate::lpopt::TransitionMatrix, grid: &BathGrid) -> String {
    let mut s = String::from("to_E,to_s,from_E,from_s,probability\n");
    for fe in 0..m.n_bath {
        for fs in 0..m.d_in {
            for te in 0..m.n_bath {
                for ts in 0..m.d_out {
                    let v = m.get(te, ts, fe, fs);
                    if v > 0.0 {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            detwork::fmt12(grid.energies[te]),
                            ts,
                            detwork::fmt12(grid.energies[fe]),
                            fs,
                            detwork::fmt12(v)
                        ));
                    }
                }
            }
        }
    }
    s
}

fn directions(cfg: &RunConfig) -> Vec<Direction> {
    match cfg.direction.unwrap_or(DirectionChoice::Both) {
        DirectionChoice::Extract => vec![Direction::Extraction],
        DirectionChoice::Form => vec![Direction::Formation],
        DirectionChoice::Both => vec![Direction::Extraction, Direction::Formation],
    }
}

fn direction_key(d: Direction) -> &'static str {
    match d {
        Direction::Extraction => "extract",
        Direction::Formation => "form",
    }
}

/// Single-shot work of the configured state over the `epsilon` window.
pub fn cmd_detwork(cfg: &RunConfig) -> Result<Report> {
    let epsilon = cfg.require_epsilon()?;
    let bath = cfg.bath()?;
    let start = cfg.initial()?;
    let (state, spec) = (&start.state, &start.spec);
    let (beta, gamma) = (bath.beta, bath.gamma);
    let budget = EpsilonBudget::from_epsilon(beta, gamma, epsilon)?;
    let mut params = bath_parameters(cfg)?;
    params.extend([
        ("epsilon", num(budget.epsilon)),
        ("e_star", num(budget.e_star)),
        ("beta_window", nums(&[budget.beta_window.0, budget.beta_window.1])),
    ]);
    let mut results = vec![
        ("f_min", sourced(f_min(state, spec, beta)?, "detwork::f_min")),
        ("f_max", sourced(f_max(state, spec, beta), "detwork::f_max")),
        (
            "w_form_subspace_at_zero",
            sourced(w_form_subspace(state, spec, beta, gamma, 0.0)?, "detwork::w_form_subspace"),
        ),
        ("ln_z_over_beta", sourced(log_partition_function(spec, beta) / beta, "system::log_partition_function")),
    ];
    let mut artifacts = vec![];
    let mut ratio = f64::NAN;
    for d in directions(cfg) {
        let key = direction_key(d);
        let r = w_deterministic(state, spec, beta, gamma, epsilon, d, DEFAULT_ENERGY_GRID)?;
        let mut entry = vec![
            ("work", sourced(r.work, "detwork::w_deterministic")),
            ("extremizer", num(r.extremizer)),
            ("monotonicity", Value::String(format!("{:?}", r.monotonicity).to_lowercase())),
        ];
        if let Some(ep) = cfg.epsilon_prime {
            entry.push((
                "smoothed_work",
                sourced(smoothed_w(state, spec, beta, gamma, epsilon, ep, d, DEFAULT_ENERGY_GRID)?, "detwork::smoothed_w"),
            ));
        }
        results.push((key, object(entry)));
        ratio = r.gaussian_ratio;
        let mut csv = String::from("E_tot,work\n");
        for &(e, w) in &r.samples {
            csv.push_str(&format!("{},{}\n", detwork::fmt12(e), detwork::fmt12(w)));
        }
        artifacts.push(Artifact {
            name: format!("work_{key}.csv"),
            contents: csv,
            plot: Some(Plot {
                title: format!("{key} work per total-energy subspace"),
                x_label: "E_tot".into(),
                y_label: "W".into(),
                points: r.samples.clone(),
            }),
        });
    }
    let diagnostics = vec![("gaussian_ratio", num(ratio))];
    if cfg.final_state.is_some() {
        let t = cfg.transition()?;
        let v = transition_possible(&t, beta, gamma, &budget, cfg.n_checks.unwrap_or(DEFAULT_ENERGY_GRID))?;
        results.push((
            "transition_possible",
            object([
                ("possible", Value::Bool(v.possible)),
                ("first_failure", v.first_failure.map_or(Value::Null, num)),
                ("checked", Value::from(v.checks.len())),
                ("source", Value::String("detwork::transition_possible".into())),
            ]),
        ));
    }
    Ok(Report {
        body: base(params, results, diagnostics),
        artifacts,
        valid: true,
    })
}

/// Failure probability of the energy window, exact and asymptotic.
pub fn cmd_epsilon(cfg: &RunConfig) -> Result<Report> {
    let bath = cfg.bath()?;
    let gamma = bath.gamma;
    let e_star = match (cfg.e_star, cfg.epsilon) {
        (Some(e), _) => e,
        (None, Some(eps)) => estar_of_epsilon(gamma, eps)?,
        (None, None) => {
            return Err(FinbathError::Argument("config needs `e_star` or `epsilon` for this command".into()))
        }
    };
    let exact = epsilon_of_estar(gamma, e_star)?;
    let asym = epsilon_asymptotic(gamma, e_star)?;
    let back = estar_of_epsilon(gamma, exact)?;
    let mut params = bath_parameters(cfg)?;
    params.push(("e_star", num(e_star)));
    params.push(("beta_window", nums(&[bath.beta - gamma * e_star, bath.beta + gamma * e_star])));
    let results = vec![
        ("epsilon_exact", sourced(exact, "detwork::epsilon_of_estar")),
        ("epsilon_asymptotic", sourced(asym, "detwork::epsilon_asymptotic")),
        ("epsilon_leading_order", sourced(epsilon_leading_order(gamma, e_star)?, "detwork::epsilon_leading_order")),
        ("relative_gap", sourced(asym / exact - 1.0, "detwork::epsilon_asymptotic")),
        ("round_trip_e_star", sourced(back, "detwork::estar_of_epsilon")),
    ];
    let diagnostics = vec![("round_trip_error", num((back - e_star).abs()))];
    Ok(Report {
        body: base(params, results, diagnostics),
        artifacts: vec![],
        valid: true,
    })
}

/// Thermomajorization curves per total energy.
pub fn cmd_curve(cfg: &RunConfig) -> Result<Report> {
    let bath = cfg.bath()?;
    let start = cfg.initial()?;
    let end = match &cfg.final_state {
        Some(_) => Some(cfg.transition()?.target),
        None => None,
    };
    let energies = cfg.e_tot.clone().unwrap_or(Energies::One(0.0)).to_vec();
    let mut artifacts = vec![];
    let mut curves = vec![];
    for (i, &e) in energies.iter().enumerate() {
        let a = thermo_curve(&start.state, &start.spec, bath.beta, bath.gamma, e);
        let mut entry = vec![
            ("E_tot", num(e)),
            ("initial", Value::Array(a.vertices.iter().map(|v| nums(&[v.0, v.1])).collect())),
        ];
        artifacts.push(curve_artifact(&a, &format!("curve_initial_{i}.csv"), "initial")?);
        if let Some(end) = &end {
            let b = thermo_curve(&end.state, &end.spec, bath.beta, bath.gamma, e);
            entry.push(("final", Value::Array(b.vertices.iter().map(|v| nums(&[v.0, v.1])).collect())));
            entry.push(("initial_dominates_final", Value::Bool(detwork::dominates(&a, &b)?)));
            artifacts.push(curve_artifact(&b, &format!("curve_final_{i}.csv"), "final")?);
        }
        curves.push(object(entry));
    }
    Ok(Report {
        body: base(
            bath_parameters(cfg)?,
            vec![
                ("curves", Value::Array(curves)),
                ("source", Value::String("detwork::thermo_curve".into())),
            ],
            vec![],
        ),
        artifacts,
        valid: true,
    })
}

fn curve_artifact(c: &detwork::ThermoCurve, name: &str, which: &str) -> Result<Artifact> {
    let mut buf = Vec::new();
    c.write_csv(&mut buf, true)
        .map_err(|e| FinbathError::Internal(format!("curve CSV: {e}")))?;
    Ok(Artifact {
        name: name.into(),
        contents: String::from_utf8_lossy(&buf).into_owned(),
        plot: Some(Plot {
            title: format!("{which} curve at E_tot = {}", detwork::fmt12(c.e_tot)),
            x_label: "width".into(),
            y_label: "probability".into(),
            points: c.vertices.clone(),
        }),
    })
}

fn apply_sweep(cfg: &mut RunConfig, parameter: SweepParameter, value: f64) -> Result<()> {
    match parameter {
        SweepParameter::C => cfg.heat_capacity = HeatCapacity::Finite(value),
        SweepParameter::Epsilon => cfg.epsilon = Some(value),
        SweepParameter::ETot => cfg.e_tot = Some(Energies::One(value)),
        SweepParameter::N => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(FinbathError::Argument(format!("sweep over N needs positive integers, got {value}")));
            }
            cfg.grid
                .as_mut()
                .ok_or_else(|| FinbathError::Argument("sweep over N needs a `grid` section".into()))?
                .levels = value as usize;
        }
    }
    Ok(())
}

/// Runs the sweep command at every value on `jobs` threads. Points keep
/// their input order.
pub fn cmd_sweep(cfg: &RunConfig, warnings: &[String], jobs: usize) -> Result<Report> {
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| FinbathError::Argument("config field `sweep` is required for this command".into()))?;
    let inner = sweep.command();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| FinbathError::Internal(format!("thread pool: {e}")))?;
    let points: Vec<(f64, Result<Report>)> = pool.install(|| {
        sweep
            .values
            .par_iter()
            .map(|&v| {
                let mut c = cfg.clone();
                c.sweep = None;
                let r = apply_sweep(&mut c, sweep.parameter, v).and_then(|_| run(inner, &c, &[]));
                (v, r)
            })
            .collect()
    });

    let mut valid = true;
    let mut artifacts = vec![];
    let mut entries = vec![];
    let mut rows = vec![];
    for (i, (v, r)) in points.into_iter().enumerate() {
        match r {
            Ok(rep) => {
                valid &= rep.valid;
                let results = rep.body.get("results").cloned().unwrap_or(Value::Null);
                let mut flat = vec![];
                flatten("", &results, &mut flat);
                rows.push((v, flat));
                entries.push(object([
                    ("value", num(v)),
                    ("valid", Value::Bool(rep.valid)),
                    ("results", results),
                    ("diagnostics", rep.body.get("diagnostics").cloned().unwrap_or(Value::Null)),
                ]));
                artifacts.extend(rep.artifacts.into_iter().map(|mut a| {
                    a.name = format!("point{i}_{}", a.name);
                    a
                }));
            }
            Err(e) => {
                valid = false;
                rows.push((v, vec![]));
                entries.push(object([
                    ("value", num(v)),
                    ("valid", Value::Bool(false)),
                    ("error", Value::String(e.to_string())),
                ]));
            }
        }
    }
    artifacts.insert(
        0,
        Artifact {
            name: "sweep.csv".into(),
            contents: sweep_csv(parameter_name(sweep.parameter), &rows),
            plot: None,
        },
    );
    let mut report = Report {
        body: object([
            ("parameters", object(bath_parameters(cfg)?)),
            (
                "sweep",
                object([
                    ("parameter", Value::String(parameter_name(sweep.parameter).into())),
                    ("command", Value::String(inner.as_str().into())),
                ]),
            ),
            ("points", Value::Array(entries)),
        ]),
        artifacts,
        valid,
    };
    finish(&mut report, "sweep", cfg, warnings);
    Ok(report)
}

fn parameter_name(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::C => "C",
        SweepParameter::Epsilon => "epsilon",
        SweepParameter::ETot => "E_tot",
        SweepParameter::N => "N",
    }
}

/// Scalar leaves of a results tree keyed by dotted path. A `{source, value}`
/// pair contributes its value under the parent path.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if m.contains_key("source") && m.contains_key("value") && m.len() == 2 => {
            flatten(prefix, &m["value"], out)
        }
        Value::Object(m) => {
            for (k, x) in m {
                if k != "source" {
                    flatten(&join(k), x, out);
                }
            }
        }
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null | Value::Array(_) => {}
    }
}

fn sweep_csv(parameter: &str, rows: &[(f64, Vec<(String, String)>)]) -> String {
    let columns: BTreeSet<&str> = rows.iter().flat_map(|r| r.1.iter().map(|c| c.0.as_str())).collect();
    let mut s = String::from(parameter);
    for c in &columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for (v, cells) in rows {
        s.push_str(&detwork::fmt12(*v));
        for c in &columns {
            s.push(',');
            if let Some((_, x)) = cells.iter().find(|x| x.0 == *c) {
                s.push_str(x);
            }
        }
        s.push('\n');
    }
    s
}
