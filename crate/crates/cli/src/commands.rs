//! The five experiments behind the subcommands.

use bjj_lgi::analytic::{analytic_correlators, analytic_matrix, tau0};
use bjj_lgi::dynamics::{clamp_probability, occupation_probabilities};
use bjj_lgi::lgi::{violation_window, LgEvaluator, VIOLATION_THRESHOLD};
use bjj_lgi::measurement::{conditional_matrix, q3_disturbance};
use bjj_lgi::model::expectation_imbalance;
use bjj_lgi::rabi::{rabi_summary_with, two_level_population, Edge, RabiSummary};
use bjj_lgi::{
    build_hamiltonian, diagonalize, fock_state, LgPoint64, ModelParams64, ScanAxis, ScanGrid64, Spectrum64,
    UncollapsedModel,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Model, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Sink, Table};

const DEFAULT_RABI_STEPS: usize = 600;

/// Evaluates `cell(state, row, col)` over a `rows × cols` grid, row-major.
/// Row states are built `workers` at a time so that at most that many
/// spectra are alive at once.
fn grid_map<S, R>(
    rows: usize,
    cols: usize,
    workers: usize,
    setup: impl Fn(usize) -> CliResult<S> + Sync,
    cell: impl Fn(&S, usize, usize) -> CliResult<R> + Sync,
) -> CliResult<Vec<R>>
where
    S: Send + Sync,
    R: Send,
{
    let mut out = Vec::with_capacity(rows * cols);
    for start in (0..rows).step_by(workers.max(1)) {
        let end = rows.min(start + workers.max(1));
        let states: Vec<S> = (start..end).into_par_iter().map(&setup).collect::<CliResult<_>>()?;
        let cells: Vec<R> = (0..(end - start) * cols)
            .into_par_iter()
            .map(|i| cell(&states[i / cols], start + i / cols, i % cols))
            .collect::<CliResult<_>>()?;
        out.extend(cells);
    }
    Ok(out)
}

fn spectrum(n: usize, hopping: f64, lambda: f64) -> CliResult<Spectrum64> {
    let params = ModelParams64::with_hopping_and_lambda(n, hopping, lambda)?;
    Ok(diagonalize(&build_hamiltonian(&params))?)
}

fn single_lambda(cfg: &RunConfig) -> CliResult<f64> {
    if cfg.has_lambda_grid() {
        return Err(CliError::usage("this command takes a single --lambda"));
    }
    Ok(cfg.lambdas()?[0])
}

fn single_initial(cfg: &RunConfig, n: usize) -> CliResult<usize> {
    match cfg.initials(n)?.as_slice() {
        &[l] => Ok(l),
        _ => Err(CliError::usage("this command takes a single --init-left")),
    }
}

fn lg_cells(p: &LgPoint64) -> [Cell; 4] {
    [p.c12.into(), p.c23.into(), p.c13.into(), p.lg.into()]
}

pub fn evolve(cfg: &RunConfig, sink: &Sink, workers: usize) -> CliResult<Value> {
    let n = cfg.size()?;
    let lambda = single_lambda(cfg)?;
    let init = single_initial(cfg, n)?;
    let (j, unit) = (cfg.hopping()?, cfg.unit());
    let times = cfg.times()?;
    let spec = spectrum(n, j, lambda)?;
    let psi0 = fock_state(init, n)?;
    let states = grid_map(1, times.len(), workers, |_| Ok(()), |_, _, k| {
        let psi = spec.evolve(&psi0, unit.to_jt(times[k]) / j)?;
        Ok((occupation_probabilities(&psi), expectation_imbalance(&psi)))
    })?;

    let t_col = unit.column("t");
    let mut dist = Table::new("distribution", std::iter::once(t_col.clone()).chain((0..=n).map(|k| format!("p_{k}"))).collect());
    let mut imbalance = Table::new("imbalance", vec![t_col, "z".into()]);
    for (&x, (probs, z)) in times.iter().zip(&states) {
        dist.push(std::iter::once(x.into()).chain(probs.iter().map(|&p| clamp_probability(p).into())).collect());
        imbalance.push(vec![x.into(), (*z).into()]);
    }
    sink.primary(&dist)?;
    sink.secondary(&imbalance)?;
    Ok(json!({}))
}

pub fn lg_scan(cfg: &RunConfig, sink: &Sink, workers: usize) -> CliResult<Value> {
    let n = cfg.size()?;
    let (j, unit) = (cfg.hopping()?, cfg.unit());
    let taus = cfg.taus()?;
    let model = cfg.model.unwrap_or(Model::Collapsed);
    let axis = if cfg.has_init_grid() { ScanAxis::InitialLeft } else { ScanAxis::Lambda };
    let (lambdas, initials) = match axis {
        ScanAxis::Lambda => (cfg.lambdas()?, vec![single_initial(cfg, n)?]),
        ScanAxis::InitialLeft => (vec![single_lambda(cfg)?], cfg.initials(n)?),
    };
    let rows = lambdas.len().max(initials.len());
    let shared = match axis {
        ScanAxis::InitialLeft => Some(spectrum(n, j, lambdas[0])?),
        ScanAxis::Lambda => None,
    };

    let cells = grid_map(
        rows,
        taus.len(),
        workers,
        |r| match &shared {
            Some(s) => Ok(std::borrow::Cow::Borrowed(s)),
            None => spectrum(n, j, lambdas[r]).map(std::borrow::Cow::Owned),
        },
        |spec, r, c| {
            let init = initials[if initials.len() == 1 { 0 } else { r }];
            let eval = LgEvaluator::new(spec.as_ref(), init)?;
            let t = unit.to_jt(taus[c]) / j;
            let p = match model {
                Model::Collapsed => eval.point(t)?,
                Model::Factorized => eval.uncollapsed(t, UncollapsedModel::Factorized)?,
                Model::Symmetrized => eval.uncollapsed(t, UncollapsedModel::Symmetrized)?,
            };
            Ok(p)
        },
    )?;
    let values: Vec<f64> = match axis {
        ScanAxis::Lambda => lambdas.clone(),
        ScanAxis::InitialLeft => initials.iter().map(|&l| l as f64).collect(),
    };
    let grid = ScanGrid64 { n, axis, taus: taus.clone(), values, cells };

    let axis_col = match axis {
        ScanAxis::Lambda => "lambda",
        ScanAxis::InitialLeft => "init_left",
    };
    let axis_cell = |r: usize| match axis {
        ScanAxis::Lambda => Cell::from(lambdas[r]),
        ScanAxis::InitialLeft => Cell::from(initials[r]),
    };
    let mut table = Table::new(
        "lg_scan",
        vec![unit.column("tau"), axis_col.into(), "C12".into(), "C23".into(), "C13".into(), "LG".into()],
    );
    let mut summary = Vec::with_capacity(rows);
    for r in 0..rows {
        for (c, p) in grid.row(r).iter().enumerate() {
            let mut row = vec![taus[c].into(), axis_cell(r)];
            row.extend(lg_cells(p));
            table.push(row);
        }
        let window = violation_window(grid.row(r));
        let to_file = |t: f64| unit.jt_to_file(t * j);
        summary.push(json!({
            axis_col: axis_cell(r),
            "max_lg": grid.max_lg(r),
            "first_violation": window.map(|w| to_file(w.0)),
            "violation_end": window.and_then(|w| w.1).map(to_file),
        }));
    }
    sink.primary(&table)?;
    Ok(json!({
        "axis": axis_col,
        "violation_threshold": VIOLATION_THRESHOLD,
        "violation_region": grid.violation_region(),
        "rows": summary,
    }))
}

pub fn measurement_effect(cfg: &RunConfig, sink: &Sink, workers: usize) -> CliResult<Value> {
    let ns = cfg.sizes()?;
    let lambda = single_lambda(cfg)?;
    let (j, unit) = (cfg.hopping()?, cfg.unit());
    let taus = cfg.taus()?;
    if cfg.has_init_grid() {
        return Err(CliError::usage("measurement-effect takes a single --init-left"));
    }
    if let Some(l) = cfg.init_left {
        if let Some(&n) = ns.iter().find(|&&n| l > n) {
            return Err(CliError::usage(format!("initial occupation {l} exceeds N = {n}")));
        }
    }
    let results = grid_map(
        ns.len(),
        taus.len(),
        workers,
        |r| {
            let n = ns[r];
            Ok((spectrum(n, j, lambda)?, fock_state(cfg.init_left.unwrap_or(n), n)?))
        },
        |(spec, psi0), _, c| Ok(q3_disturbance(spec, psi0, unit.to_jt(taus[c]) / j)?),
    )?;

    let mut table = Table::new(
        "measurement_effect",
        vec!["n".into(), unit.column("tau"), "mean_q3_measured".into(), "mean_q3_unmeasured".into(), "diff".into()],
    );
    let mut peaks = Vec::with_capacity(ns.len());
    for (r, &n) in ns.iter().enumerate() {
        let row = &results[r * taus.len()..(r + 1) * taus.len()];
        for (&x, d) in taus.iter().zip(row) {
            table.push(vec![n.into(), x.into(), d.measured.into(), d.unmeasured.into(), d.diff.into()]);
        }
        peaks.push(json!({ "n": n, "max_diff": row.iter().map(|d| d.diff).fold(0.0, f64::max) }));
    }
    sink.primary(&table)?;
    Ok(json!({ "max_diff": peaks }))
}

struct RabiRow {
    lambda: f64,
    summary: RabiSummary<f64>,
    oscillation: Vec<(f64, f64, f64, LgPoint64)>,
}

fn rabi_row(n: usize, j: f64, lambda: f64, steps: usize) -> CliResult<RabiRow> {
    let spec = spectrum(n, j, lambda)?;
    let summary = rabi_summary_with(&spec, Edge::for_lambda(lambda), steps)?;
    let mut oscillation = Vec::new();
    if let Some(period) = summary.period {
        let psi0 = fock_state(n, n)?;
        let eval = LgEvaluator::new(&spec, n)?;
        for k in 0..=steps {
            let t = period * k as f64 / steps as f64;
            let full = occupation_probabilities(&spec.evolve(&psi0, t)?)[n];
            oscillation.push((t, full, two_level_population(summary.omega1, t), eval.point(t)?));
        }
    }
    Ok(RabiRow { lambda, summary, oscillation })
}

pub fn rabi(cfg: &RunConfig, sink: &Sink) -> CliResult<Value> {
    let n = cfg.size()?;
    let lambdas = cfg.lambdas()?;
    let (j, unit) = (cfg.hopping()?, cfg.unit());
    let steps = cfg.rabi_steps.unwrap_or(DEFAULT_RABI_STEPS);
    if steps == 0 {
        return Err(CliError::usage("--rabi-steps must be at least 1"));
    }
    let rows: Vec<RabiRow> =
        lambdas.par_iter().map(|&l| rabi_row(n, j, l, steps)).collect::<CliResult<_>>()?;
    let to_file = |t: f64| unit.jt_to_file(t * j);

    let mut overlap = Table::new(
        "rabi_overlap",
        [
            "lambda",
            "overlap_n0",
            "overlap_0n",
            "bonding",
            "gap_over_j",
            "resolved",
            "accessible",
            "omega1_over_j",
            &unit.column("period"),
            "lg_max",
            &unit.column("tau_at_max"),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    let mut oscillation = Table::new(
        "rabi_oscillation",
        vec![
            "lambda".into(),
            unit.column("tau"),
            "p_n0".into(),
            "p_n0_two_level".into(),
            "C12".into(),
            "C23".into(),
            "C13".into(),
            "LG".into(),
        ],
    );
    let mut summaries = Vec::with_capacity(rows.len());
    for row in &rows {
        let s = &row.summary;
        let o = &s.overlaps;
        overlap.push(vec![
            row.lambda.into(),
            o.overlap0.into(),
            o.overlap_n.into(),
            o.bonding.into(),
            (o.gap / j).into(),
            o.resolved.into(),
            s.accessible.into(),
            (s.omega1 / j).into(),
            s.period.map(to_file).into(),
            s.lg_max.into(),
            s.tau_at_max.map(to_file).into(),
        ]);
        for (t, full, two, p) in &row.oscillation {
            let mut cells = vec![row.lambda.into(), to_file(*t).into(), (*full).into(), (*two).into()];
            cells.extend(lg_cells(p));
            oscillation.push(cells);
        }
        summaries.push(json!({
            "lambda": row.lambda,
            "omega1_over_j": s.omega1 / j,
            "period": s.period.map(to_file),
            "overlaps": o,
            "accessible": s.accessible,
            "lg_max": s.lg_max,
            "tau_at_max": s.tau_at_max.map(to_file),
        }));
    }
    sink.primary(&overlap)?;
    sink.secondary(&oscillation)?;
    Ok(json!({ "summaries": summaries }))
}

pub fn analytic_check(cfg: &RunConfig, sink: &Sink, workers: usize) -> CliResult<Value> {
    let ns = cfg.sizes()?;
    if cfg.has_lambda_grid() || cfg.lambda.is_some_and(|l| l != 0.0) {
        return Err(CliError::usage("analytic-check compares against the non-interacting case; drop --lambda"));
    }
    let (j, unit) = (cfg.hopping()?, cfg.unit());
    let taus = cfg.taus()?;
    let deviations = grid_map(
        ns.len(),
        taus.len(),
        workers,
        |r| spectrum(ns[r], j, 0.0),
        |spec, r, c| {
            let n = ns[r];
            let jt = unit.to_jt(taus[c]);
            let exact = analytic_matrix(n, jt)?;
            let numeric = conditional_matrix(spec, jt / j)?;
            let d = n + 1;
            let mut worst: f64 = 0.0;
            for nr in 0..d {
                for l in 0..d {
                    worst = worst.max((exact[nr * d + l] - numeric.get(n - nr, n - l)).abs());
                }
            }
            let lg = (analytic_correlators(n, jt)?.lg - LgEvaluator::new(spec, n)?.point(jt / j)?.lg).abs();
            Ok((worst, lg))
        },
    )?;

    let mut table =
        Table::new("analytic_check", vec!["n".into(), unit.column("tau"), "max_deviation".into(), "lg_deviation".into()]);
    for (r, &n) in ns.iter().enumerate() {
        for (c, &x) in taus.iter().enumerate() {
            let (worst, lg) = deviations[r * taus.len() + c];
            table.push(vec![n.into(), x.into(), worst.into(), lg.into()]);
        }
    }
    let mut tau0_table = Table::new("tau0", vec!["n".into(), unit.column("tau0")]);
    let mut tau0s = Vec::with_capacity(ns.len());
    for &n in &ns {
        let x = unit.jt_to_file(tau0::<f64>(n)?);
        tau0_table.push(vec![n.into(), x.into()]);
        tau0s.push(json!({ "n": n, "tau0": x }));
    }
    sink.primary(&table)?;
    sink.secondary(&tau0_table)?;
    let worst = deviations.iter().map(|d| d.0).fold(0.0, f64::max);
    Ok(json!({ "max_deviation": worst, "tau0": tau0s }))
}
