//! Cloning networks built from transfer, separation and single-qubit gates,
//! and their exact (non-sampled) simulation.
//!
//! System qubits are `0..N`; networks with a separation stage add one
//! ancilla at index `N`, prepared in `|+>` and measured once. Success is
//! the `|+>` outcome.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, CloningProblem, OptimalAngles};
use crate::error::{Error, Result};
use crate::gates::{self, GateKind, GatePlacement};
use crate::linalg::{global_fidelity, Kron, Outcome, StateVector};

/// Largest register [`simulate`] will allocate (system plus ancilla).
pub const MAX_SIMULATED_QUBITS: usize = 20;

#[derive(Debug, Clone)]
pub enum Step {
    Gate(GatePlacement),
    Measure { qubit: usize, success: Outcome },
}

/// An ordered gate sequence with at most one ancilla measurement.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    n_qubits: usize,
    steps: Vec<Step>,
}

impl NetworkSpec {
    /// Checks qubit indices and the measurement rule: at most one
    /// measurement, on the last qubit, after which that qubit is gone.
    pub fn new(n_qubits: usize, steps: Vec<Step>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidNetwork("register must have a qubit".into()));
        }
        let mut live = n_qubits;
        let mut measured = false;
        for step in &steps {
            match step {
                Step::Gate(p) => {
                    if let Some(&q) = p.qubits.iter().find(|&&q| q >= live) {
                        return Err(Error::InvalidNetwork(format!(
                            "'{}' references qubit {q} of a {live}-qubit register",
                            p.label
                        )));
                    }
                }
                Step::Measure { qubit, .. } => {
                    if measured {
                        return Err(Error::InvalidNetwork("more than one measurement".into()));
                    }
                    if *qubit != live - 1 || live < 2 {
                        return Err(Error::InvalidNetwork(format!(
                            "measured qubit {qubit} must be the trailing ancilla"
                        )));
                    }
                    measured = true;
                    live -= 1;
                }
            }
        }
        Ok(NetworkSpec { n_qubits, steps })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        NetworkSpec::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn placements(&self) -> impl Iterator<Item = &GatePlacement> {
        self.steps.iter().filter_map(|s| match s {
            Step::Gate(p) => Some(p),
            Step::Measure { .. } => None,
        })
    }

    pub fn measurement(&self) -> Option<(usize, Outcome)> {
        self.steps.iter().find_map(|s| match s {
            Step::Measure { qubit, success } => Some((*qubit, *success)),
            Step::Gate(_) => None,
        })
    }

    pub fn gate_count(&self) -> usize {
        self.placements().count()
    }

    pub fn cnot_count(&self) -> usize {
        self.placements()
            .filter(|p| p.kind == GateKind::Cnot)
            .count()
    }

    /// The same network with every transfer and separation gate replaced by
    /// its CNOT + single-qubit circuit.
    pub fn decomposed(&self) -> Result<NetworkSpec> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let circuit = match step {
                Step::Gate(p) => match p.kind {
                    GateKind::Transfer { theta1, theta2 } => {
                        Some((gates::decompose_transfer(theta1, theta2)?, &p.qubits))
                    }
                    GateKind::Separation {
                        theta_in,
                        theta_out,
                    } => Some((gates::decompose_separation(theta_in, theta_out)?, &p.qubits)),
                    GateKind::Cnot | GateKind::Local => None,
                },
                Step::Measure { .. } => None,
            };
            match circuit {
                Some((c, qubits)) => {
                    for g in c.placements() {
                        steps.push(Step::Gate(g.remapped(qubits)?));
                    }
                }
                None => steps.push(step.clone()),
            }
        }
        NetworkSpec::new(self.n_qubits, steps)
    }
}

/// Raw outcome of running a network.
#[derive(Debug, Clone)]
pub struct Execution {
    pub success_probability: f64,
    /// Normalized post-selected state; the ancilla is removed if measured.
    pub state: StateVector,
    /// Unnormalized failure branch (ancilla included), if a measurement ran.
    pub failure_branch: Option<StateVector>,
}

/// Applies the steps of `spec` in order to `input`.
pub fn run_network(spec: &NetworkSpec, input: &StateVector) -> Result<Execution> {
    if input.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits,
            actual: input.n_qubits(),
        });
    }
    let mut state = input.clone();
    let mut success_probability = 1.0;
    let mut failure_branch = None;
    for step in &spec.steps {
        match step {
            Step::Gate(p) => state = state.apply(&p.gate, &p.qubits)?,
            Step::Measure { qubit, success } => {
                failure_branch = Some(state.branch(*qubit, success.flip())?);
                let (p, post) = state.project_qubit(*qubit, *success)?;
                let (value, rest) = post.discard_qubit(*qubit)?;
                if value != *success {
                    return Err(Error::Inconsistent(
                        "projected ancilla not in the success state".into(),
                    ));
                }
                success_probability = p;
                state = rest;
            }
        }
    }
    Ok(Execution {
        success_probability,
        state,
        failure_branch,
    })
}

/// `|psi_+->^M |+>^(N-M)`, plus a trailing `|+>` ancilla if requested.
pub fn prepare_input(problem: &CloningProblem, sign: Outcome, with_ancilla: bool) -> StateVector {
    let mut state = StateVector::psi(problem.theta, sign).power(problem.m_copies);
    let neutral = problem.n_copies - problem.m_copies + usize::from(with_ancilla);
    for _ in 0..neutral {
        state = state.kron(&StateVector::plus());
    }
    state
}

/// The ideal output `|psi_+->^N`.
pub fn exact_clones(problem: &CloningProblem, sign: Outcome) -> StateVector {
    StateVector::psi(problem.theta, sign).power(problem.n_copies)
}

fn transfer_step(problem: &CloningProblem, first: usize, k: usize) -> Result<Step> {
    let theta1 = problem.theta;
    let theta2 = bounds::angle_for_copies(problem.theta, k)?;
    let gate = gates::transfer_gate(theta1, theta2)?;
    Ok(Step::Gate(GatePlacement::new(
        gate,
        vec![first, first + 1],
        format!("D(theta_1,theta_{k})@({},{})", first, first + 1),
        GateKind::Transfer { theta1, theta2 },
    )?))
}

fn compression_steps(problem: &CloningProblem) -> Result<Vec<Step>> {
    // qubit pair (j-1, j) receives D(theta_1, theta_{M-j}), for j = M-1 down to 1
    (1..problem.m_copies)
        .rev()
        .map(|j| transfer_step(problem, j - 1, problem.m_copies - j))
        .collect()
}

fn decompression_steps(problem: &CloningProblem) -> Result<Vec<Step>> {
    (1..problem.n_copies)
        .map(|j| transfer_step(problem, j - 1, problem.n_copies - j))
        .collect()
}

fn separation_step(problem: &CloningProblem, theta_in: f64, theta_out: f64) -> Result<Step> {
    let ancilla = problem.n_copies;
    Ok(Step::Gate(GatePlacement::new(
        gates::separation_gate(theta_in, theta_out)?,
        vec![ancilla, 0],
        format!("S({theta_in:.6},{theta_out:.6})@({ancilla},0)"),
        GateKind::Separation {
            theta_in,
            theta_out,
        },
    )?))
}

fn transform_step(theta_in: f64, theta_n: f64, angles: &OptimalAngles) -> Result<Step> {
    let coeffs = bounds::clone_coefficients(angles, theta_n)?;
    let gate = gates::clone_transform_gate(theta_in, theta_n, &coeffs)?;
    Ok(Step::Gate(GatePlacement::local(gate, 0, "T@0")?))
}

/// Moves all distinguishability of the `M` input copies onto qubit 0.
pub fn compression_sequence(problem: &CloningProblem) -> Result<NetworkSpec> {
    NetworkSpec::new(problem.n_copies, compression_steps(problem)?)
}

/// Spreads the distinguishability of qubit 0 evenly over all `N` qubits.
pub fn decompression_sequence(problem: &CloningProblem) -> Result<NetworkSpec> {
    NetworkSpec::new(problem.n_copies, decompression_steps(problem)?)
}

/// Probabilistic exact cloner: compress, separate to `theta_N`, herald,
/// decompress.
pub fn exact_network(problem: &CloningProblem) -> Result<NetworkSpec> {
    if problem.theta <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let mut steps = compression_steps(problem)?;
    steps.push(separation_step(
        problem,
        problem.theta_m(),
        problem.theta_n(),
    )?);
    steps.push(Step::Measure {
        qubit: problem.n_copies,
        success: Outcome::Plus,
    });
    steps.extend(decompression_steps(problem)?);
    NetworkSpec::new(problem.n_copies + 1, steps)
}

/// Deterministic cloner reaching the optimal global fidelity.
pub fn approx_network(problem: &CloningProblem) -> Result<NetworkSpec> {
    let angles = bounds::optimal_phis(problem)?;
    let mut steps = compression_steps(problem)?;
    steps.push(transform_step(
        problem.theta_m(),
        problem.theta_n(),
        &angles,
    )?);
    steps.extend(decompression_steps(problem)?);
    NetworkSpec::new(problem.n_copies, steps)
}

/// Hybrid cloner succeeding with probability `p_s`, between the exact
/// (`p_s = P_MN`) and deterministic (`p_s = 1`) extremes. Equal priors only.
pub fn hybrid_network(problem: &CloningProblem, p_s: f64) -> Result<NetworkSpec> {
    if !problem.has_equal_priors() {
        return Err(Error::UnequalPriors(problem.eta_plus));
    }
    if problem.theta <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let theta_m = problem.theta_m();
    let theta_n = problem.theta_n();
    let theta_sep = bounds::separated_angle(theta_m, theta_n, p_s)?.max(theta_m);
    let angles = OptimalAngles {
        phi_plus: theta_sep,
        phi_minus: -theta_sep,
    };
    let mut steps = compression_steps(problem)?;
    steps.push(separation_step(problem, theta_m, theta_sep)?);
    steps.push(Step::Measure {
        qubit: problem.n_copies,
        success: Outcome::Plus,
    });
    steps.push(transform_step(theta_sep, theta_n, &angles)?);
    steps.extend(decompression_steps(problem)?);
    NetworkSpec::new(problem.n_copies + 1, steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CloningMode {
    Exact,
    Approx,
    Hybrid { p_s: f64 },
}

impl CloningMode {
    pub fn name(&self) -> &'static str {
        match self {
            CloningMode::Exact => "exact",
            CloningMode::Approx => "approx",
            CloningMode::Hybrid { .. } => "hybrid",
        }
    }
}

pub fn build_network(problem: &CloningProblem, mode: CloningMode) -> Result<NetworkSpec> {
    match mode {
        CloningMode::Exact => exact_network(problem),
        CloningMode::Approx => approx_network(problem),
        CloningMode::Hybrid { p_s } => hybrid_network(problem, p_s),
    }
}

/// Result of running one input branch through a cloner.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub input_sign: Outcome,
    pub success_probability: f64,
    pub post_state: StateVector,
    pub failure_branch: Option<StateVector>,
    pub global_fidelity_vs_exact: f64,
}

/// Runs `spec` on the `sign` input of `problem` and scores the
/// post-selected output against the ideal clones.
pub fn simulate(
    problem: &CloningProblem,
    spec: &NetworkSpec,
    sign: Outcome,
) -> Result<SimulationResult> {
    if spec.n_qubits() > MAX_SIMULATED_QUBITS {
        return Err(Error::InvalidProblem(format!(
            "{} qubits exceed the simulation limit of {MAX_SIMULATED_QUBITS}",
            spec.n_qubits()
        )));
    }
    let with_ancilla = match spec.n_qubits() {
        n if n == problem.n_copies => false,
        n if n == problem.n_copies + 1 => true,
        n => {
            return Err(Error::DimensionMismatch {
                expected: problem.n_copies,
                actual: n,
            })
        }
    };
    let input = prepare_input(problem, sign, with_ancilla);
    let run = run_network(spec, &input)?;
    let fidelity = global_fidelity(&exact_clones(problem, sign), &run.state)?;
    Ok(SimulationResult {
        input_sign: sign,
        success_probability: run.success_probability,
        post_state: run.state,
        failure_branch: run.failure_branch,
        global_fidelity_vs_exact: fidelity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub sign: Outcome,
    pub success_probability: f64,
    pub fidelity: f64,
}

/// Prior-weighted simulation of both branches next to the analytic limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneReport {
    pub mode: String,
    pub theta: f64,
    pub m: usize,
    pub n: usize,
    pub eta_plus: f64,
    pub p_s: Option<f64>,
    pub success_probability: f64,
    /// Global fidelity averaged over the post-selected ensemble.
    pub fidelity: f64,
    pub bound_success_probability: f64,
    pub bound_fidelity: f64,
    pub success_deviation: f64,
    pub fidelity_deviation: f64,
    pub branches: Vec<BranchReport>,
}

impl CloneReport {
    pub fn max_deviation(&self) -> f64 {
        self.success_deviation.max(self.fidelity_deviation)
    }
}

/// Analytic `(success probability, fidelity)` for a cloner.
pub fn analytic_limits(problem: &CloningProblem, mode: CloningMode) -> Result<(f64, f64)> {
    let CloningProblem {
        theta,
        m_copies: m,
        n_copies: n,
        ..
    } = *problem;
    match mode {
        CloningMode::Exact => Ok((bounds::exact_clone_probability(theta, m, n)?, 1.0)),
        CloningMode::Approx => Ok((1.0, bounds::fidelity_bound(problem))),
        CloningMode::Hybrid { p_s } => {
            if !problem.has_equal_priors() {
                return Err(Error::UnequalPriors(problem.eta_plus));
            }
            let point = bounds::hybrid_fidelity_bound(theta, m, n, p_s)?;
            Ok((point.p_success, point.fidelity_bound))
        }
    }
}

pub fn evaluate_cloner(problem: &CloningProblem, mode: CloningMode) -> Result<CloneReport> {
    evaluate_network(problem, mode, &build_network(problem, mode)?)
}

/// As [`evaluate_cloner`], with every composite gate expanded into CNOTs
/// and single-qubit unitaries first.
pub fn evaluate_cloner_decomposed(
    problem: &CloningProblem,
    mode: CloningMode,
) -> Result<CloneReport> {
    evaluate_network(problem, mode, &build_network(problem, mode)?.decomposed()?)
}

fn evaluate_network(
    problem: &CloningProblem,
    mode: CloningMode,
    spec: &NetworkSpec,
) -> Result<CloneReport> {
    let mut branches = Vec::with_capacity(2);
    let (mut weight, mut weighted_fidelity) = (0.0, 0.0);
    for (sign, eta) in [
        (Outcome::Plus, problem.eta_plus),
        (Outcome::Minus, problem.eta_minus()),
    ] {
        let r = simulate(problem, spec, sign)?;
        weight += eta * r.success_probability;
        weighted_fidelity += eta * r.success_probability * r.global_fidelity_vs_exact;
        branches.push(BranchReport {
            sign,
            success_probability: r.success_probability,
            fidelity: r.global_fidelity_vs_exact,
        });
    }
    let fidelity = if weight > 0.0 {
        weighted_fidelity / weight
    } else {
        0.0
    };
    let (bound_p, bound_f) = analytic_limits(problem, mode)?;
    Ok(CloneReport {
        mode: mode.name().to_string(),
        theta: problem.theta,
        m: problem.m_copies,
        n: problem.n_copies,
        eta_plus: problem.eta_plus,
        p_s: match mode {
            CloningMode::Hybrid { p_s } => Some(p_s),
            _ => None,
        },
        success_probability: weight,
        fidelity,
        bound_success_probability: bound_p,
        bound_fidelity: bound_f,
        success_deviation: (weight - bound_p).abs(),
        fidelity_deviation: (fidelity - bound_f).abs(),
        branches,
    })
}
