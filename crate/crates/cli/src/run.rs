//! Experiment runners producing result tables.

use std::path::Path;

use nonideal::bell::{aspect_corners, build_bell, quad_labels, ChshReport, QuadrivariateBell};
use nonideal::infometrics::{martens_bound, martens_check, row_entropy};
use nonideal::sampler::{empirical_chsh, sample, EventLog};
use nonideal::whichway::{build_whichway, WhichWayConfig, WHICHWAY_LABELS};

use crate::error::{CliError, Result};
use crate::eventlog::{config_hash, write_event_log_file, LogHeader};
use crate::spec::{
    AspectParams, BellParams, Experiment, ExperimentSpec, SampleParams, SampleTarget, SweepParams, WhichwayParams,
};
use crate::table::{Cell, Table};

/// `"+-"` → `"pm"`, `"+-,-+"` → `"pm_mp"`; CSV-safe outcome names.
pub fn label_slug(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            '+' => 'p',
            '-' => 'm',
            ',' => '_',
            other => other,
        })
        .collect()
}

pub const CORRELATION_COLUMNS: [&str; 4] = ["e_d1_d2", "e_d1_d2p", "e_d1p_d2", "e_d1p_d2p"];

fn chsh_cells(r: &ChshReport) -> Vec<Cell> {
    let mut cells: Vec<Cell> = r.correlations.iter().map(|&e| e.into()).collect();
    cells.extend([r.s_value.into(), r.s_max.into(), r.violates.into()]);
    cells
}

fn chsh_columns() -> Vec<String> {
    CORRELATION_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(["s", "s_max", "violates"].map(String::from))
        .collect()
}

pub fn run_whichway(p: &WhichwayParams) -> Result<Table> {
    let (cfg, state) = p.whichway_config("params")?;
    let ww = build_whichway(cfg)?;
    let joint = ww.joint_distribution(&state)?;
    let d = ww.theta_marginal(&state)?;
    let dp = ww.theta_prime_marginal(&state)?;
    let (lambda, mu) = ww.marginals_and_nonideality()?;
    let report = martens_check(&ww);

    let mut columns: Vec<String> = ["gamma", "theta_deg", "theta_prime_deg"].map(String::from).to_vec();
    columns.extend(WHICHWAY_LABELS.iter().map(|l| format!("p_{}", label_slug(l))));
    columns.extend(["d_click", "d_no_click", "dprime_click", "dprime_no_click"].map(String::from));
    columns.extend(["lambda_11", "lambda_12", "lambda_21", "lambda_22"].map(String::from));
    columns.extend(["mu_11", "mu_12", "mu_21", "mu_22"].map(String::from));
    columns.extend(["j_lambda", "j_mu", "bound", "slack", "martens_satisfied"].map(String::from));

    let mut row: Vec<Cell> = vec![
        cfg.gamma().into(),
        cfg.theta().degrees().into(),
        cfg.theta_prime().degrees().into(),
    ];
    row.extend(joint.probs().iter().map(|&x| Cell::from(x)));
    row.extend([d[0], d[1], dp[0], dp[1]].map(Cell::from));
    row.extend(lambda.entries().iter().chain(mu.entries()).map(|&x| Cell::from(x)));
    row.extend([
        report.j_lambda.value().into(),
        report.j_mu.value().into(),
        report.bound.into(),
        report.slack.into(),
        report.satisfied.into(),
    ]);
    let mut table = Table::new(columns);
    table.push(row);
    Ok(table)
}

/// Data behind the parametric `J_λ` versus `J_μ` curve.
pub fn run_martens_sweep(p: &SweepParams) -> Result<Table> {
    let grid = p.grid("params")?;
    let (theta, theta_prime) = p.angles("params")?;
    let bound = martens_bound(theta, theta_prime);
    let mut table = Table::new(["gamma", "j_lambda", "j_mu", "bound", "slack"]);
    for gamma in grid {
        let ww = build_whichway(WhichWayConfig::new(gamma, theta, theta_prime)?)?;
        let (lambda, mu) = ww.nonideality_matrices();
        let (jl, jm) = (row_entropy(&lambda).value(), row_entropy(&mu).value());
        table.push(vec![
            gamma.into(),
            jl.into(),
            jm.into(),
            bound.into(),
            (jl + jm - bound).into(),
        ]);
    }
    Ok(table)
}

/// Single generalized run: 16-outcome distribution, correlations, CHSH.
pub fn run_bell(p: &BellParams) -> Result<Table> {
    let bell = build_bell(p.bell_config("params")?)?;
    let dist = bell.quad_distribution()?;
    let report = bell.chsh_single_run()?;
    let mut columns: Vec<String> = vec!["gamma1".into(), "gamma2".into()];
    columns.extend(dist.labels().iter().map(|l| format!("p_{}", label_slug(l))));
    columns.extend(chsh_columns());
    let cfg = bell.config();
    let mut row: Vec<Cell> = vec![cfg.arm1.gamma().into(), cfg.arm2.gamma().into()];
    row.extend(dist.probs().iter().map(|&x| Cell::from(x)));
    row.extend(chsh_cells(&report));
    let mut table = Table::new(columns);
    table.push(row);
    Ok(table)
}

/// The four Aspect corner runs, one row each, followed by the pooled CHSH row.
pub fn run_aspect(p: &AspectParams) -> Result<Table> {
    let (state, angles) = p.resolve("params")?;
    let corners = aspect_corners(&state, angles)?;
    let mut table = Table::new(
        ["run", "gamma1", "gamma2", "pair", "correlation"]
            .into_iter()
            .map(String::from)
            .chain(chsh_columns()),
    );
    let mut correlations = [0.0; 4];
    for (k, corner) in corners.iter().enumerate() {
        correlations[k] = corner.correlation;
        let mut row: Vec<Cell> = vec![
            format!("corner{}{}", corner.gammas.0, corner.gammas.1).into(),
            corner.gammas.0.into(),
            corner.gammas.1.into(),
            corner.pair.to_string().into(),
            corner.correlation.into(),
        ];
        row.extend(std::iter::repeat_with(|| Cell::Text(String::new())).take(7));
        table.push(row);
    }
    let report = ChshReport::from_correlations(correlations);
    let mut row: Vec<Cell> = vec![
        "combined".into(),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
        Cell::Text(String::new()),
    ];
    row.extend(chsh_cells(&report));
    table.push(row);
    Ok(table)
}

/// Outcome of a sampling run: the log plus the empirical-vs-analytic summary.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub log: EventLog,
    pub header: LogHeader,
    pub summary: Table,
}

/// Draws the events for a sample spec (with `n_events` and `seed` resolved).
pub fn run_sample(spec: &ExperimentSpec) -> Result<SampleOutcome> {
    let Experiment::Sample(p) = &spec.experiment else {
        return Err(CliError::config("kind", "expected a sample experiment"));
    };
    let SampleParams { target, n_events, seed } = p;
    let n = n_events.ok_or_else(|| CliError::config("params.n_events", "missing event count (config or --n)"))?;
    let seed = seed.ok_or_else(|| CliError::config("params.seed", "missing seed (config or --seed)"))?;
    let n = usize::try_from(n).map_err(|_| CliError::config("params.n_events", "event count too large"))?;

    let mut canonical = spec.clone();
    canonical.output = None;
    let config = serde_json::to_string(&canonical.to_json_value()).expect("JSON value serializes");
    let header = LogHeader {
        kind: match target {
            SampleTarget::Whichway(_) => "whichway".into(),
            SampleTarget::Bell(_) => "bell".into(),
        },
        config_sha256: config_hash(&config),
        config,
    };

    let mut summary = Table::new(["quantity", "empirical", "analytic"]);
    let log = match target {
        SampleTarget::Whichway(w) => {
            let (cfg, state) = w.whichway_config("params.target.params")?;
            let ww = build_whichway(cfg)?;
            let exact = ww.joint_distribution(&state)?;
            let log = sample(ww.povm(), &state, n, seed)?;
            push_frequencies(&mut summary, &log, exact.probs());
            log
        }
        SampleTarget::Bell(b) => {
            let bell = build_bell(b.bell_config("params.target.params")?)?;
            let exact = bell.quad_distribution()?;
            let log = sample(bell.povm(), &bell.config().state, n, seed)?;
            push_frequencies(&mut summary, &log, exact.probs());
            if log.count() > 0 {
                push_chsh(&mut summary, &bell, &empirical_chsh(&log)?)?;
            }
            log
        }
    };
    Ok(SampleOutcome {
        log: log.with_descriptor(header.config_sha256.clone()),
        header,
        summary,
    })
}

fn push_frequencies(summary: &mut Table, log: &EventLog, exact: &[f64]) {
    summary.push(vec![
        "n".into(),
        (log.count() as u64).into(),
        (log.count() as u64).into(),
    ]);
    for ((label, f), p) in log.labels().iter().zip(log.frequencies()).zip(exact) {
        summary.push(vec![format!("p_{}", label_slug(label)).into(), f.into(), (*p).into()]);
    }
}

fn push_chsh(summary: &mut Table, bell: &QuadrivariateBell, empirical: &ChshReport) -> Result<()> {
    let analytic = bell.chsh_single_run()?;
    for ((name, emp), ana) in CORRELATION_COLUMNS
        .iter()
        .zip(empirical.correlations)
        .zip(analytic.correlations)
    {
        summary.push(vec![(*name).into(), emp.into(), ana.into()]);
    }
    summary.push(vec!["s".into(), empirical.s_value.into(), analytic.s_value.into()]);
    summary.push(vec!["s_max".into(), empirical.s_max.into(), analytic.s_max.into()]);
    Ok(())
}

/// Runs a sample spec and writes its event log to `path`.
pub fn run_sample_to_file(spec: &ExperimentSpec, path: &Path) -> Result<SampleOutcome> {
    let outcome = run_sample(spec)?;
    write_event_log_file(path, &outcome.log, &outcome.header)?;
    Ok(outcome)
}

/// The 16 quadrivariate labels as CSV-safe column suffixes.
pub fn quad_slugs() -> Vec<String> {
    quad_labels().iter().map(|l| label_slug(l)).collect()
}
