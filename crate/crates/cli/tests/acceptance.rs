//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p nonideal-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_4, LN_2, PI, SQRT_2};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nonideal::bell::{build_bell, chsh_aspect, quad_label, Arm, AspectAngles, BellConfig, QuadrivariateBell};
use nonideal::infometrics::{heisenberg_check, martens_check};
use nonideal::measurement::{born_probabilities, polarization_pvm};
use nonideal::qcore::{pauli, ComplexMatrix, PolarizationAngle, StateDescriptor};
use nonideal::random;
use nonideal::whichway::{build_whichway, BivariateWhichWay, WhichWayConfig};
use nonideal::Complex64;
use nonideal_cli::run::{run_martens_sweep, run_sample};
use nonideal_cli::spec::{ExperimentSpec, SweepParams};
use nonideal_cli::{execute, Command, Options};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Independent oracle: `[[cos², cs], [cs, sin²]]`.
fn projector(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real(2, 2, &[c * c, c * s, c * s, s * s]).unwrap()
}

/// Independent oracle for the four which-way effects, in `++, +-, -+, --` order.
fn whichway_effects(gamma: f64, theta: f64, theta_prime: f64) -> [ComplexMatrix; 4] {
    let a = projector(theta).scale(gamma);
    let b = projector(theta_prime).scale(1.0 - gamma);
    let rest = ComplexMatrix::identity(2).sub(&a).unwrap().sub(&b).unwrap();
    [ComplexMatrix::zeros(2, 2), a, b, rest]
}

/// The 101 × 33 `(γ, Δ)` grid, θ = 0, Δ = jπ/32.
fn grid() -> impl Iterator<Item = (f64, f64)> {
    (0..=100).flat_map(|i| (0..=32).map(move |j| (i as f64 / 100.0, j as f64 * PI / 32.0)))
}

fn whichway(gamma: f64, theta: f64, theta_prime: f64) -> Result<BivariateWhichWay, String> {
    build_whichway(WhichWayConfig::from_radians(gamma, theta, theta_prime).map_err(e)?).map_err(e)
}

fn c1_povm_validity() -> Outcome {
    let mut worst_completeness = 0.0f64;
    let mut worst_eigen = f64::INFINITY;
    let mut worst_oracle = 0.0f64;
    let mut count = 0;
    for (g, delta) in grid() {
        let ww = whichway(g, 0.0, delta)?;
        let mut sum = ComplexMatrix::zeros(2, 2);
        let oracle = whichway_effects(g, 0.0, delta);
        for (effect, expected) in ww.povm().effects().iter().zip(&oracle) {
            let m = effect.matrix();
            sum = sum.add(m).unwrap();
            worst_oracle = worst_oracle.max(m.max_abs_diff(expected).unwrap());
            let eig = m.hermitian_eigenvalues().map_err(e)?;
            worst_eigen = worst_eigen.min(eig[0]);
        }
        worst_completeness = worst_completeness.max(sum.max_abs_diff(&ComplexMatrix::identity(2)).unwrap());
        count += 1;
    }
    ensure(count == 101 * 33, || format!("grid has {count} points"))?;
    ensure(worst_completeness <= 1e-12, || {
        format!("completeness deviation {worst_completeness:e}")
    })?;
    ensure(worst_eigen >= -1e-10, || format!("min eigenvalue {worst_eigen:e}"))?;
    ensure(worst_oracle <= 1e-12, || {
        format!("effects differ from closed form by {worst_oracle:e}")
    })?;
    Ok(format!(
        "{count} configs; max |ΣM−I| = {worst_completeness:.1e}, min eigenvalue = {worst_eigen:.1e}"
    ))
}

fn c2_marginal_identity() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (g, t, tp) = (r.random::<f64>(), r.random::<f64>() * PI, r.random::<f64>() * PI);
        let ww = whichway(g, t, tp)?;
        let (lambda, mu) = ww.marginals_and_nonideality().map_err(e)?;
        let ideal_t = polarization_pvm(PolarizationAngle::new(t).map_err(e)?);
        let ideal_tp = polarization_pvm(PolarizationAngle::new(tp).map_err(e)?);
        for _ in 0..50 {
            let state = random::state(2, &mut r);
            let p = ww.joint_distribution(&state).map_err(e)?;
            let p = p.probs();
            let measured_d = [p[0] + p[1], p[2] + p[3]];
            let measured_dp = [p[0] + p[2], p[1] + p[3]];
            let pred_d = lambda
                .apply(born_probabilities(&state, &ideal_t).map_err(e)?.probs())
                .map_err(e)?;
            let pred_dp = mu
                .apply(born_probabilities(&state, &ideal_tp).map_err(e)?.probs())
                .map_err(e)?;
            for k in 0..2 {
                worst = worst.max((measured_d[k] - pred_d[k]).abs());
                worst = worst.max((measured_dp[k] - pred_dp[k]).abs());
            }
            worst = worst.max(ww.marginal_identity_deviation(&state).map_err(e)?);
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("50 states × 20 configs; max deviation = {worst:.1e}"))
}

fn c3_certainty() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (t, tp) = (r.random::<f64>() * PI, r.random::<f64>() * PI);
        let ww = whichway(1.0, t, tp)?;
        let state = random::state(2, &mut r);
        let p = ww.joint_distribution(&state).map_err(e)?;
        let sum_minus = p.get("+-").unwrap() + p.get("--").unwrap();
        worst = worst.max((sum_minus - 1.0).abs());
        worst = worst.max((ww.certainty_check(&state).map_err(e)? - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("max |Σ p_m− − 1| = {worst:e}"))?;
    Ok(format!("50 states; max |Σ p_m− − 1| = {worst:.1e}"))
}

fn c4_martens() -> Outcome {
    let mut min_slack = f64::INFINITY;
    for (g, delta) in grid() {
        let report = martens_check(&whichway(g, 0.0, delta)?);
        let slack = report.j_lambda.value() + report.j_mu.value() - report.bound;
        ensure(report.satisfied, || format!("reported unsatisfied at γ={g}, Δ={delta}"))?;
        min_slack = min_slack.min(slack);
    }
    ensure(min_slack >= -1e-10, || format!("min slack {min_slack:e}"))?;
    let mut endpoint_slack = 0.0f64;
    for g in [0.0, 1.0] {
        let report = martens_check(&whichway(g, 0.0, FRAC_PI_4)?);
        let lhs = report.j_lambda.value() + report.j_mu.value();
        ensure((lhs - LN_2).abs() <= 1e-10, || format!("γ={g}: J sum {lhs} ≠ ln 2"))?;
        ensure((report.bound - LN_2).abs() <= 1e-10, || {
            format!("γ={g}: bound {} ≠ ln 2", report.bound)
        })?;
        endpoint_slack = endpoint_slack.max(report.slack.abs());
    }
    ensure(endpoint_slack <= 1e-10, || format!("endpoint slack {endpoint_slack:e}"))?;
    Ok(format!(
        "grid min slack = {min_slack:.3e}; endpoint slack = {endpoint_slack:.1e}"
    ))
}

fn c5_sweep_curve() -> Outcome {
    let params = SweepParams {
        gammas: None,
        points: Some(101),
        delta_deg: 45.0,
        theta_deg: Some(0.0),
    };
    let table = run_martens_sweep(&params).map_err(e)?;
    ensure(table.rows.len() == 101, || format!("{} rows", table.rows.len()))?;
    let col = |name: &str| -> Vec<f64> {
        (0..table.rows.len())
            .map(|i| table.get(i, name).and_then(|c| c.as_f64()).unwrap())
            .collect()
    };
    let (gamma, jl, jm, bound) = (col("gamma"), col("j_lambda"), col("j_mu"), col("bound"));
    for w in 0..100 {
        ensure(gamma[w + 1] > gamma[w], || format!("γ not increasing at row {w}"))?;
        ensure(jl[w + 1] <= jl[w] + 1e-12, || format!("J_λ increases at row {w}"))?;
        ensure(jm[w + 1] >= jm[w] - 1e-12, || format!("J_μ decreases at row {w}"))?;
    }
    for i in 0..101 {
        ensure(jl[i] + jm[i] >= bound[i] - 1e-10, || {
            format!("row {i} lies in the forbidden region")
        })?;
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    ensure(close(jl[0], LN_2) && close(jm[0], 0.0), || {
        format!("γ=0 endpoint ({}, {})", jl[0], jm[0])
    })?;
    ensure(close(jl[100], 0.0) && close(jm[100], LN_2), || {
        format!("γ=1 endpoint ({}, {})", jl[100], jm[100])
    })?;

    // The same curve through the CLI, re-read from CSV.
    let dir = tempfile::tempdir().map_err(e)?;
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"kind":"sweep-martens","params":{"points":101,"delta_deg":45}}"#,
    )
    .map_err(e)?;
    let mut out = Vec::new();
    let opts = Options {
        config,
        ..Default::default()
    };
    execute(Command::MartensSweep, &opts, &mut out).map_err(e)?;
    let mut reader = csv::Reader::from_reader(out.as_slice());
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(e)?;
        let x: f64 = record[1].parse().map_err(e)?;
        let y: f64 = record[2].parse().map_err(e)?;
        ensure(x == jl[i] && y == jm[i], || format!("CSV row {i} does not round-trip"))?;
        rows += 1;
    }
    ensure(rows == 101, || format!("CSV has {rows} rows"))?;
    Ok("101 points, monotone, endpoints (ln 2, 0) and (0, ln 2), none forbidden".into())
}

fn c6_heisenberg() -> Outcome {
    let mut r = rng(6);
    let mut min_gap = f64::INFINITY;
    for i in 0..1000 {
        let d = 2 + i % 3;
        let state = random::state(d, &mut r);
        let a = random::hermitian(d, &mut r);
        let b = random::hermitian(d, &mut r);
        let report = heisenberg_check(&state, &a, &b).map_err(e)?;
        ensure(report.satisfied, || format!("violated at triple {i}: {report:?}"))?;
        min_gap = min_gap.min(report.lhs - report.rhs);
    }
    let [sx, sy, _] = pauli();
    let zero = StateDescriptor::from_real(&[1.0, 0.0]).map_err(e)?;
    let eq = heisenberg_check(&zero, &sx, &sy).map_err(e)?;
    ensure((eq.lhs - 1.0).abs() <= 1e-12 && (eq.rhs - 1.0).abs() <= 1e-12, || {
        format!("σx/σy/|0⟩ gives lhs={}, rhs={}", eq.lhs, eq.rhs)
    })?;
    Ok(format!(
        "1000 triples, min lhs−rhs = {min_gap:.2e}; equality case lhs = rhs = 1"
    ))
}

/// Brute-force oracle: `⟨ψ|(P_a − P_a⊥) ⊗ (P_b − P_b⊥)|ψ⟩`.
fn correlation_oracle(state: &StateDescriptor, a: f64, b: f64) -> f64 {
    let sign = |t: f64| {
        let p = projector(t);
        p.sub(&ComplexMatrix::identity(2).sub(&p).unwrap()).unwrap()
    };
    state.expectation(&sign(a).kron(&sign(b))).unwrap().re
}

fn c7_aspect() -> Outcome {
    let singlet = StateDescriptor::singlet();
    let angles = AspectAngles::from_degrees(0.0, 45.0, 22.5, 67.5).map_err(e)?;
    let report = chsh_aspect(&singlet, angles).map_err(e)?;
    let (t1, t1p, t2, t2p) = (0.0, FRAC_PI_4, PI / 8.0, 3.0 * PI / 8.0);
    let brute = [
        correlation_oracle(&singlet, t1, t2),
        correlation_oracle(&singlet, t1, t2p),
        correlation_oracle(&singlet, t1p, t2),
        correlation_oracle(&singlet, t1p, t2p),
    ];
    let cosine = [(t1, t2), (t1, t2p), (t1p, t2), (t1p, t2p)].map(|(a, b)| -(2.0 * (a - b)).cos());
    for k in 0..4 {
        ensure((report.correlations[k] - brute[k]).abs() <= 1e-12, || {
            format!("E[{k}] = {} vs matrix oracle {}", report.correlations[k], brute[k])
        })?;
        ensure((brute[k] - cosine[k]).abs() <= 1e-12, || {
            format!("matrix oracle disagrees with −cos 2Δ at {k}")
        })?;
    }
    let s_oracle = brute[0] - brute[1] + brute[2] + brute[3];
    let target = 2.0 * SQRT_2;
    ensure((report.s_value.abs() - target).abs() <= 1e-9, || {
        format!("|S| = {}", report.s_value.abs())
    })?;
    ensure((report.s_value - s_oracle).abs() <= 1e-12, || {
        format!("S differs from oracle {s_oracle}")
    })?;
    ensure(report.violates, || "violation not flagged".into())?;
    Ok(format!("|S| = {:.12}", report.s_value.abs()))
}

fn random_bell(r: &mut ChaCha8Rng) -> Result<QuadrivariateBell, String> {
    let arm =
        |r: &mut ChaCha8Rng| WhichWayConfig::from_radians(r.random(), r.random::<f64>() * PI, r.random::<f64>() * PI);
    let a1 = arm(r).map_err(e)?;
    let a2 = arm(r).map_err(e)?;
    build_bell(BellConfig::new(a1, a2, random::state(4, r)).map_err(e)?).map_err(e)
}

fn c8_single_run() -> Outcome {
    let mut r = rng(8);
    let mut max_s = 0.0f64;
    for i in 0..1000 {
        let bell = random_bell(&mut r)?;
        let report = bell.chsh_single_run().map_err(e)?;
        ensure(
            report.s_value.abs() <= 2.0 + 1e-10 && report.s_max <= 2.0 + 1e-10,
            || format!("sample {i}: S = {}, S_max = {}", report.s_value, report.s_max),
        )?;
        ensure(!report.violates, || format!("sample {i} flagged as violating"))?;
        max_s = max_s.max(report.s_max);
    }
    Ok(format!("1000 runs; max over CHSH forms |S| = {max_s:.6}"))
}

fn c9_tensor_structure() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let bell = random_bell(&mut r)?;
        let cfg = bell.config();
        let arm_oracle =
            |c: &WhichWayConfig| whichway_effects(c.gamma(), c.theta().radians(), c.theta_prime().radians());
        let (o1, o2) = (arm_oracle(&cfg.arm1), arm_oracle(&cfg.arm2));
        let effects = bell.povm().effects();
        ensure(effects.len() == 16, || format!("{} effects", effects.len()))?;
        for i in 0..4 {
            for j in 0..4 {
                let effect = &effects[4 * i + j];
                ensure(effect.label() == quad_label(i, j), || {
                    format!("label {} at {i},{j}", effect.label())
                })?;
                worst = worst.max(effect.matrix().max_abs_diff(&o1[i].kron(&o2[j])).unwrap());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 configs × 16 effects; max deviation = {worst:.1e}"))
}

/// Partial trace over arm 2 of a two-qubit density matrix.
fn reduced_first(state: &StateDescriptor) -> StateDescriptor {
    let rho = state.density_matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let v: Complex64 = (0..2).map(|k| rho.get(2 * a + k, 2 * b + k)).sum();
            out.set(a, b, v);
        }
    }
    StateDescriptor::density(out).unwrap()
}

fn c10_no_signaling() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let state = random::state(4, &mut r);
        let arm1 =
            WhichWayConfig::from_radians(r.random(), r.random::<f64>() * PI, r.random::<f64>() * PI).map_err(e)?;
        let marginal = |arm2: WhichWayConfig| -> Result<[f64; 4], String> {
            let bell = build_bell(BellConfig::new(arm1, arm2, state.clone()).map_err(e)?).map_err(e)?;
            bell.arm_marginal(Arm::First).map_err(e)
        };
        let a2 = WhichWayConfig::from_radians(r.random(), r.random::<f64>() * PI, r.random::<f64>() * PI).map_err(e)?;
        let b2 = WhichWayConfig::from_radians(r.random(), r.random::<f64>() * PI, r.random::<f64>() * PI).map_err(e)?;
        let (ma, mb) = (marginal(a2)?, marginal(b2)?);
        let local = build_whichway(arm1)
            .map_err(e)?
            .joint_distribution(&reduced_first(&state))
            .map_err(e)?;
        for k in 0..4 {
            worst = worst.max((ma[k] - mb[k]).abs());
            worst = worst.max((ma[k] - local.probs()[k]).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("20 paired configs; max deviation = {worst:.1e}"))
}

fn sample_spec(body: &str) -> Result<ExperimentSpec, String> {
    ExperimentSpec::from_json_str(body).map_err(e)
}

fn c11_sampler() -> Outcome {
    let ww = sample_spec(
        r#"{"kind":"sample","params":{"n_events":1000000,"seed":42,
            "target":{"kind":"whichway","params":{"gamma":0.5,"theta_deg":0,"theta_prime_deg":45,"state":"H"}}}}"#,
    )?;
    let outcome = run_sample(&ww).map_err(e)?;
    let freqs = outcome.log.frequencies();
    let expected = [0.0, 0.5, 0.25, 0.25];
    let dev = freqs
        .iter()
        .zip(expected)
        .map(|(f, p)| (f - p).abs())
        .fold(0.0, f64::max);
    ensure(outcome.log.count() == 1_000_000, || {
        format!("{} events", outcome.log.count())
    })?;
    ensure(dev <= 0.005, || format!("frequencies {freqs:?}"))?;

    let bell = sample_spec(
        r#"{"kind":"sample","params":{"n_events":1000000,"seed":42,
            "target":{"kind":"bell","params":{
                "arm1":{"gamma":0.5,"theta_deg":0,"theta_prime_deg":45},
                "arm2":{"gamma":0.5,"theta_deg":22.5,"theta_prime_deg":67.5},
                "state":"singlet"}}}}"#,
    )?;
    let outcome = run_sample(&bell).map_err(e)?;
    let s_row = outcome
        .summary
        .rows
        .iter()
        .position(|row| row[0] == "s".into())
        .ok_or("no S row")?;
    let s_emp = outcome.summary.rows[s_row][1].as_f64().unwrap();
    let s_ana = outcome.summary.rows[s_row][2].as_f64().unwrap();
    ensure((s_emp - s_ana).abs() <= 0.02, || {
        format!("empirical S {s_emp} vs analytic {s_ana}")
    })?;

    let dir = tempfile::tempdir().map_err(e)?;
    let config = dir.path().join("sample.json");
    std::fs::write(&config, ww.to_json_string()).map_err(e)?;
    let mut logs = Vec::new();
    for name in ["a.log", "b.log"] {
        let out = dir.path().join(name);
        let opts = Options {
            config: config.clone(),
            out: Some(out.clone()),
            ..Default::default()
        };
        execute(Command::Sample, &opts, &mut Vec::new()).map_err(e)?;
        logs.push(std::fs::read(out).map_err(e)?);
    }
    ensure(logs[0] == logs[1], || {
        "logs differ between runs with the same seed".into()
    })?;
    Ok(format!(
        "max |f − p| = {dev:.4}; S empirical {s_emp:.4} vs analytic {s_ana:.4}; logs byte-identical ({} bytes)",
        logs[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("POVM validity on the 101×33 grid", c1_povm_validity),
        ("marginal identity", c2_marginal_identity),
        ("certainty at γ = 1", c3_certainty),
        ("Martens inequality", c4_martens),
        ("J_λ/J_μ sweep curve", c5_sweep_curve),
        ("Heisenberg relation", c6_heisenberg),
        ("Aspect CHSH violation", c7_aspect),
        ("single-run CHSH satisfaction", c8_single_run),
        ("tensor structure", c9_tensor_structure),
        ("no-signaling marginal", c10_no_signaling),
        ("sampler fidelity", c11_sampler),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
