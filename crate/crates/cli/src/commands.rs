use rayon::prelude::*;
use serde_json::{json, Map, Value};

use cloneforge::bounds::{self, CloningProblem};
use cloneforge::gates::{self, CircuitDecomposition, GateKind};
use cloneforge::networks::{self, CloneReport, CloningMode};
use cloneforge::verify::{self, Tolerances};

use crate::config::{Format, ModeName, RunConfig};
use crate::output::{fmt_num, json_text, round_floats, Csv};
use crate::CliError;

/// Deviation above which `simulate --strict` fails.
pub const STRICT_TOL: f64 = 1e-8;
pub const DEFAULT_SWEEP_STEPS: usize = 11;

pub const TRADEOFF_HEADER: [&str; 5] = [
    "p_s",
    "f_bound",
    "f_simulated",
    "p_success_simulated",
    "abs_deviation",
];

/// Rendered output plus the exit status it implies.
pub struct Rendered {
    pub text: String,
    pub code: u8,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered { text, code: 0 }
    }
}

fn rounded_json(mut v: Value) -> String {
    round_floats(&mut v);
    json_text(&v)
}

pub fn bounds_record(
    problem: &CloningProblem,
    p_s: Option<f64>,
) -> Result<Map<String, Value>, CliError> {
    let (theta, m, n) = (problem.theta, problem.m_copies, problem.n_copies);
    let overlap_m = problem.overlap_m();
    let mut rec = Map::new();
    let mut put = |k: &str, v: f64| {
        rec.insert(k.to_string(), json!(v));
    };
    put("theta", theta);
    put("eta_plus", problem.eta_plus);
    put("f_max", bounds::fidelity_bound(problem));
    put(
        "helstrom",
        bounds::helstrom_bound(problem.eta_plus, overlap_m)?,
    );
    put("p_exact", bounds::exact_clone_probability(theta, m, n)?);
    put("p_idp", bounds::idp_probability(overlap_m)?);
    put("theta_m", problem.theta_m());
    put("theta_n", problem.theta_n());
    if let Some(p_s) = p_s {
        if !problem.has_equal_priors() {
            return Err(CliError::Config(format!(
                "hybrid bound needs equal priors, got eta_plus = {}",
                problem.eta_plus
            )));
        }
        put("p_s", p_s);
        put(
            "f_hybrid",
            bounds::hybrid_fidelity_bound(theta, m, n, p_s)?.fidelity_bound,
        );
    }
    rec.insert("m".into(), json!(m));
    rec.insert("n".into(), json!(n));
    Ok(rec)
}

pub fn cmd_bounds(config: &RunConfig) -> Result<Rendered, CliError> {
    let problem = config.problem()?;
    let rec = bounds_record(&problem, config.p_s)?;
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Json => rounded_json(Value::Object(rec)),
        Format::Csv => {
            let mut cols = vec![
                "f_max", "helstrom", "p_exact", "p_idp", "theta_m", "theta_n",
            ];
            if config.p_s.is_some() {
                cols.extend(["p_s", "f_hybrid"]);
            }
            let mut csv = Csv::new(&cols);
            csv.row(
                &cols
                    .iter()
                    .map(|c| fmt_num(rec[*c].as_f64().expect("number")))
                    .collect::<Vec<_>>(),
            );
            csv.into_string()
        }
    };
    Ok(Rendered::ok(text))
}

pub fn simulate_report(
    problem: &CloningProblem,
    mode: CloningMode,
    decomposed: bool,
) -> Result<CloneReport, CliError> {
    let report = if decomposed {
        networks::evaluate_cloner_decomposed(problem, mode)?
    } else {
        networks::evaluate_cloner(problem, mode)?
    };
    Ok(report)
}

/// `strict` holds the largest deviation tolerated before exit status 3.
pub fn cmd_simulate(
    config: &RunConfig,
    strict: Option<f64>,
    decomposed: bool,
) -> Result<Rendered, CliError> {
    let problem = config.problem()?;
    let mode = config.mode()?;
    let spec = networks::build_network(&problem, mode)?;
    let report = simulate_report(&problem, mode, decomposed)?;
    let elementary = spec.decomposed()?;
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("serializable");
            v["max_deviation"] = json!(report.max_deviation());
            v["decomposed"] = json!(decomposed);
            v["network"] = json!({
                "n_qubits": spec.n_qubits(),
                "gates": spec.gate_count(),
                "elementary_gates": elementary.gate_count(),
                "cnots": elementary.cnot_count(),
                "measured_qubit": spec.measurement().map(|(q, _)| q),
            });
            rounded_json(v)
        }
        Format::Csv => {
            let mut csv = Csv::new(&[
                "scope",
                "success_probability",
                "fidelity",
                "bound_success_probability",
                "bound_fidelity",
                "success_deviation",
                "fidelity_deviation",
            ]);
            for b in &report.branches {
                let scope = match b.sign {
                    cloneforge::Outcome::Plus => "plus",
                    cloneforge::Outcome::Minus => "minus",
                };
                csv.row(&[
                    scope.into(),
                    fmt_num(b.success_probability),
                    fmt_num(b.fidelity),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
            csv.row(&[
                "average".into(),
                fmt_num(report.success_probability),
                fmt_num(report.fidelity),
                fmt_num(report.bound_success_probability),
                fmt_num(report.bound_fidelity),
                fmt_num(report.success_deviation),
                fmt_num(report.fidelity_deviation),
            ]);
            csv.into_string()
        }
    };
    let code = match strict {
        Some(tol) if report.max_deviation().is_nan() || report.max_deviation() > tol => 3,
        _ => 0,
    };
    Ok(Rendered { text, code })
}

/// One sweep point. The simulated fields are absent when the register is
/// too large to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub p_s: f64,
    pub f_bound: f64,
    pub f_simulated: Option<f64>,
    pub p_success_simulated: Option<f64>,
    pub abs_deviation: Option<f64>,
}

/// Evenly spaced success probabilities; a single step gives `start` alone.
pub fn sweep_points(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

pub fn tradeoff_rows(
    problem: &CloningProblem,
    points: &[f64],
) -> Result<Vec<TradeoffRow>, CliError> {
    let simulable = problem.n_copies < networks::MAX_SIMULATED_QUBITS;
    points
        .par_iter()
        .map(|&p_s| {
            if !simulable {
                let f_bound = bounds::hybrid_fidelity_bound(
                    problem.theta,
                    problem.m_copies,
                    problem.n_copies,
                    p_s,
                )?
                .fidelity_bound;
                return Ok(TradeoffRow {
                    p_s,
                    f_bound,
                    f_simulated: None,
                    p_success_simulated: None,
                    abs_deviation: None,
                });
            }
            let report = networks::evaluate_cloner(problem, CloningMode::Hybrid { p_s })?;
            Ok(TradeoffRow {
                p_s,
                f_bound: report.bound_fidelity,
                f_simulated: Some(report.fidelity),
                p_success_simulated: Some(report.success_probability),
                abs_deviation: Some(report.max_deviation()),
            })
        })
        .collect()
}

pub fn cmd_tradeoff(config: &RunConfig) -> Result<Rendered, CliError> {
    if let Some(mode) = config.mode.filter(|m| *m != ModeName::Hybrid) {
        return Err(CliError::Config(format!(
            "tradeoff sweeps hybrid cloning, not {mode:?}"
        )));
    }
    let problem = config.problem()?;
    if !problem.has_equal_priors() {
        return Err(CliError::Config(format!(
            "tradeoff needs equal priors, got eta_plus = {}",
            problem.eta_plus
        )));
    }
    let sweep = config.sweep.clone();
    if let Some(param) = sweep
        .as_ref()
        .map(|s| s.param.as_str())
        .filter(|p| *p != "p_s")
    {
        return Err(CliError::Config(format!("can only sweep p_s, not {param}")));
    }
    let p_min = bounds::exact_clone_probability(problem.theta, problem.m_copies, problem.n_copies)?;
    let start = sweep.as_ref().and_then(|s| s.start).unwrap_or(p_min);
    let stop = sweep.as_ref().and_then(|s| s.stop).unwrap_or(1.0);
    let steps = sweep
        .as_ref()
        .and_then(|s| s.steps)
        .unwrap_or(DEFAULT_SWEEP_STEPS);
    if steps == 0 {
        return Err(CliError::Config("sweep needs at least one step".into()));
    }
    for (what, v) in [("start", start), ("stop", stop)] {
        if !v.is_finite() || v < p_min - 1e-12 || v > 1.0 + 1e-12 {
            return Err(CliError::Config(format!(
                "sweep {what} = {v} outside [P_MN, 1] = [{p_min}, 1]"
            )));
        }
    }
    let rows = tradeoff_rows(&problem, &sweep_points(start, stop, steps))?;
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&TRADEOFF_HEADER);
            for r in &rows {
                let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
                csv.row(&[
                    fmt_num(r.p_s),
                    fmt_num(r.f_bound),
                    opt(r.f_simulated),
                    opt(r.p_success_simulated),
                    opt(r.abs_deviation),
                ]);
            }
            csv.into_string()
        }
        Format::Json => rounded_json(Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "p_s": r.p_s,
                        "f_bound": r.f_bound,
                        "f_simulated": r.f_simulated,
                        "p_success_simulated": r.p_success_simulated,
                        "abs_deviation": r.abs_deviation,
                    })
                })
                .collect(),
        )),
    };
    Ok(Rendered::ok(text))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GateName {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "S", alias = "s")]
    S,
}

/// JSON form of a decomposition. Matrix entries keep full precision so the
/// circuit can be re-multiplied exactly.
pub fn circuit_json(
    gate: GateName,
    angles: [f64; 2],
    dec: &CircuitDecomposition,
    max_abs_error: f64,
) -> Value {
    let placements: Vec<Value> = dec
        .placements()
        .iter()
        .map(|p| match p.kind {
            GateKind::Cnot => json!({
                "gate": "CNOT",
                "qubits": p.qubits,
                "control_active": "plus",
            }),
            _ => {
                let m = p.gate.matrix();
                let rows: Vec<Vec<[f64; 2]>> = m
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                    .collect();
                json!({
                    "gate": "LU",
                    "qubits": p.qubits,
                    "label": p.label,
                    "matrix": rows,
                })
            }
        })
        .collect();
    let (name, keys) = match gate {
        GateName::D => ("D", ["theta1", "theta2"]),
        GateName::S => ("S", ["theta_in", "theta_out"]),
    };
    json!({
        "gate": name,
        keys[0]: angles[0],
        keys[1]: angles[1],
        "n_qubits": 2,
        "cnot_count": dec.cnot_count(),
        "placements": placements,
        "max_abs_error": max_abs_error,
    })
}

pub fn cmd_decompose(gate: GateName, angles: [f64; 2]) -> Result<Rendered, CliError> {
    let [a, b] = angles;
    let (dec, target) = match gate {
        GateName::D => (
            gates::decompose_transfer(a, b)?,
            gates::transfer_gate(a, b)?,
        ),
        GateName::S => (
            gates::decompose_separation(a, b)?,
            gates::separation_gate(a, b)?,
        ),
    };
    let err = dec.max_abs_error(&target)?;
    Ok(Rendered::ok(json_text(&circuit_json(
        gate, angles, &dec, err,
    ))))
}

/// Runs every verification suite. Without a format the output is a
/// plain-text table, one line per suite.
pub fn cmd_verify(scale: f64, format: Option<Format>) -> Result<Rendered, CliError> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(CliError::Config(format!(
            "tolerance scale {scale} must be finite and non-negative"
        )));
    }
    let report = verify::run_all(&Tolerances::scaled(scale));
    let code = if report.all_passed() { 0 } else { 1 };
    let text = match format {
        Some(Format::Json) => {
            let mut v = serde_json::to_value(&report).expect("serializable");
            v["all_passed"] = json!(report.all_passed());
            rounded_json(v)
        }
        Some(Format::Csv) => {
            let mut csv = Csv::new(&["suite", "checks", "passed", "worst_ratio"]);
            for s in &report.suites {
                csv.row(&[
                    s.name.into(),
                    s.checks.to_string(),
                    s.passed.to_string(),
                    fmt_num(s.worst_ratio),
                ]);
            }
            csv.into_string()
        }
        None => {
            let mut text = String::new();
            for s in &report.suites {
                let status = if s.all_passed() { "ok  " } else { "FAIL" };
                text.push_str(&format!(
                    "{status} {:<20} {:>6}/{:<6} worst/tol {:>9}  {:.3}s\n",
                    s.name,
                    s.passed,
                    s.checks,
                    format!("{:.2e}", s.worst_ratio),
                    s.elapsed.as_secs_f64()
                ));
                if let Some(f) = &s.first_failure {
                    text.push_str(&format!("     first failure: {f}\n"));
                }
            }
            let failed = report.suites.iter().filter(|s| !s.all_passed()).count();
            if failed == 0 {
                text.push_str(&format!(
                    "all {} suites passed ({} checks)\n",
                    report.suites.len(),
                    report.total_checks()
                ));
            } else {
                text.push_str(&format!(
                    "{failed} of {} suites failed\n",
                    report.suites.len()
                ));
            }
            text
        }
    };
    Ok(Rendered { text, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_endpoints_exact() {
        let pts = sweep_points(0.3, 1.0, 4);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], 0.3);
        assert_eq!(pts[3], 1.0);
        assert_eq!(sweep_points(0.4, 1.0, 1), vec![0.4]);
    }

    #[test]
    fn bounds_example() {
        let p = CloningProblem::symmetric(std::f64::consts::FRAC_PI_8, 1, 2).unwrap();
        let rec = bounds_record(&p, None).unwrap();
        assert!((rec["f_max"].as_f64().unwrap() - 0.982963).abs() < 1e-6);
        assert!((rec["p_exact"].as_f64().unwrap() - 0.585786).abs() < 1e-6);
        assert!((rec["p_idp"].as_f64().unwrap() - 0.292893).abs() < 1e-6);
        assert!(rec.get("f_hybrid").is_none());
    }
}
