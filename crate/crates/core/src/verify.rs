//! Grid checks over every module, grouped into named suites.
//!
//! Each check compares a deviation against a tolerance; a check whose
//! computation errors counts as failed. Tolerances can be scaled together,
//! which is how a deliberately broken configuration is exercised.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bounds::{self, CloningProblem};
use crate::error::Result;
use crate::gates;
use crate::linalg::{Kron, Matrix, Outcome, StateVector, Unitary, C64};
use crate::networks::{self, CloningMode};

pub const GRID_THETAS: [f64; 4] = [FRAC_PI_8 / 2.0, FRAC_PI_8, 3.0 * FRAC_PI_8 / 2.0, FRAC_PI_4];
pub const GRID_ETAS: [f64; 3] = [0.5, 0.7, 0.9];
pub const MAX_COPIES: usize = 6;
pub const ANGLE_GRID_POINTS: usize = 20;
pub const BRUTE_FORCE_GRID: usize = 2000;
/// Clone count at which the hybrid bound is compared with its limit.
pub const HYBRID_LIMIT_N: usize = 80;
pub const HELSTROM_N: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub gate: f64,
    pub decomposition: f64,
    pub identity: f64,
    pub network: f64,
    pub hybrid_fidelity: f64,
    pub oracle: f64,
    pub helstrom: f64,
    pub hybrid_limit: f64,
    pub decomposed_network: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gate: 1e-12,
            decomposition: 1e-10,
            identity: 1e-12,
            network: 1e-10,
            hybrid_fidelity: 1e-9,
            oracle: 1e-6,
            helstrom: 1e-6,
            hybrid_limit: 1e-8,
            decomposed_network: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn scaled(factor: f64) -> Self {
        let t = Tolerances::default();
        Tolerances {
            gate: t.gate * factor,
            decomposition: t.decomposition * factor,
            identity: t.identity * factor,
            network: t.network * factor,
            hybrid_fidelity: t.hybrid_fidelity * factor,
            oracle: t.oracle * factor,
            helstrom: t.helstrom * factor,
            hybrid_limit: t.hybrid_limit * factor,
            decomposed_network: t.decomposed_network * factor,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub passed: usize,
    /// Largest deviation divided by its tolerance.
    pub worst_ratio: f64,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks == self.passed
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::all_passed)
    }

    pub fn total_checks(&self) -> usize {
        self.suites.iter().map(|s| s.checks).sum()
    }
}

struct Suite {
    report: SuiteReport,
    started: Instant,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            report: SuiteReport {
                name,
                checks: 0,
                passed: 0,
                worst_ratio: 0.0,
                first_failure: None,
                elapsed: Duration::ZERO,
            },
            started: Instant::now(),
        }
    }

    fn check(&mut self, deviation: f64, tol: f64, what: impl FnOnce() -> String) {
        self.report.checks += 1;
        let ratio = deviation / tol;
        if deviation <= tol {
            self.report.passed += 1;
        } else if self.report.first_failure.is_none() {
            self.report.first_failure =
                Some(format!("{}: deviation {deviation:e} > {tol:e}", what()));
        }
        if ratio.is_nan() || ratio > self.report.worst_ratio {
            self.report.worst_ratio = ratio;
        }
    }

    fn check_result(&mut self, deviation: Result<f64>, tol: f64, what: impl FnOnce() -> String) {
        match deviation {
            Ok(d) => self.check(d, tol, what),
            Err(e) => {
                self.report.checks += 1;
                self.report.worst_ratio = f64::INFINITY;
                if self.report.first_failure.is_none() {
                    self.report.first_failure = Some(format!("{}: {e}", what()));
                }
            }
        }
    }

    fn finish(mut self) -> SuiteReport {
        self.report.elapsed = self.started.elapsed();
        self.report
    }
}

/// `n` evenly spaced angles covering `[0.01, pi/4]`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    let lo = 0.01;
    (0..n)
        .map(|i| lo + (FRAC_PI_4 - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Every `(theta, M, N)` with `theta` in [`GRID_THETAS`] and `1 <= M < N <= 6`.
pub fn problem_grid(eta_plus: f64) -> Vec<CloningProblem> {
    let mut out = Vec::new();
    for &theta in &GRID_THETAS {
        for n in 2..=MAX_COPIES {
            for m in 1..n {
                out.push(CloningProblem::new(theta, m, n, eta_plus).expect("grid problem"));
            }
        }
    }
    out
}

/// The three success probabilities `P_MN`, midpoint and 1.
pub fn hybrid_sweep(problem: &CloningProblem) -> Result<[f64; 3]> {
    let p = bounds::exact_clone_probability(problem.theta, problem.m_copies, problem.n_copies)?;
    Ok([p, 0.5 * (p + 1.0), 1.0])
}

fn psi_pair(t1: f64, t2: f64, sign: Outcome) -> StateVector {
    StateVector::psi(t1, sign).kron(&StateVector::psi(t2, sign))
}

/// `|<target|rho|target>|^(1/2)` for a single-qubit density matrix.
pub fn overlap_modulus(rho: &Matrix, target: &StateVector) -> f64 {
    let t = target.amps();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            acc += t[r].conj() * rho.get(r, c) * t[c];
        }
    }
    acc.re.max(0.0).sqrt()
}

/// `1 - Tr rho^2` for a single-qubit density matrix.
pub fn impurity(rho: &Matrix) -> f64 {
    let mut tr = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            tr += (rho.get(r, c) * rho.get(c, r)).re;
        }
    }
    (1.0 - tr).abs()
}

pub fn gate_algebra(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("gate_algebra");
    let grid = angle_grid(ANGLE_GRID_POINTS);
    let id4 = Unitary::identity(4).expect("identity");
    for &t1 in &grid {
        for &t2 in &grid {
            let at = || format!("D({t1:.6},{t2:.6})");
            let d = match gates::transfer_gate(t1, t2) {
                Ok(d) => d,
                Err(e) => {
                    suite.check_result(Err(e), tol.gate, at);
                    continue;
                }
            };
            suite.check(d.matrix().unitarity_deviation(), tol.gate, || {
                format!("{} unitary", at())
            });
            let herm = d.matrix().max_abs_diff(&d.matrix().adjoint());
            suite.check(herm, tol.gate, || format!("{} hermitian", at()));
            let sq = d.then_after(&d).map(|dd| dd.max_abs_diff(&id4));
            suite.check_result(sq, tol.gate, || format!("{} self-inverse", at()));
            let t3 = match bounds::compose_angle(t1, t2) {
                Ok(t) => t,
                Err(e) => {
                    suite.check_result(Err(e), tol.gate, at);
                    continue;
                }
            };
            for sign in [Outcome::Plus, Outcome::Minus] {
                let pair = psi_pair(t1, t2, sign);
                let compressed = StateVector::psi(t3, sign).kron(&StateVector::plus());
                let fwd = pair.apply(&d, &[0, 1]).map(|s| s.max_abs_diff(&compressed));
                suite.check_result(fwd, tol.gate, || format!("{} compress {sign:?}", at()));
                let back = compressed.apply(&d, &[0, 1]).map(|s| s.max_abs_diff(&pair));
                suite.check_result(back, tol.gate, || format!("{} decompress {sign:?}", at()));
            }
        }
    }
    suite.finish()
}

pub fn decomposition(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("decomposition");
    let grid = angle_grid(ANGLE_GRID_POINTS);
    let e = gates::minus_controlled_not();
    let c_ab = gates::cnot();
    for &t1 in &grid {
        for &t2 in &grid {
            let at = || format!("D({t1:.6},{t2:.6})");
            let err = gates::transfer_gate(t1, t2).and_then(|d| {
                let dec = gates::decompose_transfer(t1, t2)?;
                if dec.cnot_count() != 4 {
                    return Ok(f64::INFINITY);
                }
                dec.max_abs_error(&d)
            });
            suite.check_result(err, tol.decomposition, || format!("{} circuit", at()));

            let refl = gates::transfer_gate(t1, t2)
                .and_then(|d| Ok(gates::transfer_gate_via_reflections(t1, t2)?.max_abs_diff(&d)));
            suite.check_result(refl, tol.identity, || {
                format!("{} as two reflections", at())
            });

            let deltas = match gates::delta_angles(t1, t2) {
                Ok(d) => d,
                Err(err) => {
                    suite.check_result(Err(err), tol.identity, at);
                    continue;
                }
            };
            for delta in [deltas.delta1, deltas.delta2 + FRAC_PI_2] {
                let wedge = gates::controlled_reflection(delta);
                let via_e = e
                    .then_after(&wedge)
                    .and_then(|m| m.then_after(&e))
                    .map(|q| q.max_abs_diff(&gates::pair_reflection(delta)));
                suite.check_result(via_e, tol.identity, || format!("Q({delta:.6}) = E ^ E"));

                let a = gates::identity2().kron(&gates::reflection_frame(delta));
                let framed = a
                    .adjoint()
                    .then_after(&c_ab)
                    .and_then(|m| m.then_after(&a))
                    .map(|w| w.max_abs_diff(&wedge));
                suite.check_result(framed, tol.identity, || {
                    format!("^({delta:.6}) from a framed CNOT")
                });
            }
        }
    }
    for (i, &t_in) in grid.iter().enumerate() {
        for &t_out in &grid[i..] {
            let err = gates::separation_gate(t_in, t_out).and_then(|s| {
                let dec = gates::decompose_separation(t_in, t_out)?;
                if dec.cnot_count() != 1 {
                    return Ok(f64::INFINITY);
                }
                dec.max_abs_error(&s)
            });
            suite.check_result(err, tol.decomposition, || {
                format!("S({t_in:.6},{t_out:.6}) circuit")
            });
        }
    }
    suite.finish()
}

pub fn exact_cloning(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("exact_cloning");
    for problem in problem_grid(0.5) {
        let at = problem_label(&problem);
        match networks::evaluate_cloner(&problem, CloningMode::Exact) {
            Ok(r) => {
                for b in &r.branches {
                    suite.check(
                        (b.success_probability - r.bound_success_probability).abs(),
                        tol.network,
                        || format!("{at} {:?} success", b.sign),
                    );
                    suite.check((b.fidelity - 1.0).abs(), tol.network, || {
                        format!("{at} {:?} fidelity", b.sign)
                    });
                }
            }
            Err(e) => suite.check_result(Err(e), tol.network, || at.clone()),
        }
    }
    suite.finish()
}

pub fn approx_cloning(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("approx_cloning");
    for eta in GRID_ETAS {
        for problem in problem_grid(eta) {
            let at = problem_label(&problem);
            let sim = networks::evaluate_cloner(&problem, CloningMode::Approx)
                .map(|r| r.fidelity_deviation);
            suite.check_result(sim, tol.network, || {
                format!("{at} simulated vs closed form")
            });
            let oracle = bounds::brute_force_fidelity(&problem, BRUTE_FORCE_GRID)
                .map(|f| (f - bounds::fidelity_bound(&problem)).abs());
            suite.check_result(oracle, tol.oracle, || {
                format!("{at} closed form vs direct search")
            });
        }
    }
    suite.finish()
}

pub fn hybrid_cloning(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("hybrid_cloning");
    for problem in problem_grid(0.5) {
        let at = problem_label(&problem);
        let sweep = match hybrid_sweep(&problem) {
            Ok(s) => s,
            Err(e) => {
                suite.check_result(Err(e), tol.network, || at.clone());
                continue;
            }
        };
        let mut fidelities = Vec::with_capacity(3);
        for p_s in sweep {
            match networks::evaluate_cloner(&problem, CloningMode::Hybrid { p_s }) {
                Ok(r) => {
                    for b in &r.branches {
                        suite.check((b.success_probability - p_s).abs(), tol.network, || {
                            format!("{at} p_s={p_s:.6} {:?} success", b.sign)
                        });
                    }
                    suite.check(r.fidelity_deviation, tol.hybrid_fidelity, || {
                        format!("{at} p_s={p_s:.6} fidelity vs bound")
                    });
                    fidelities.push(r.fidelity);
                }
                Err(e) => suite.check_result(Err(e), tol.network, || format!("{at} p_s={p_s:.6}")),
            }
        }
        if fidelities.len() == 3 {
            let rise = (fidelities[1] - fidelities[0])
                .max(fidelities[2] - fidelities[1])
                .max(0.0);
            suite.check(rise, tol.identity, || {
                format!("{at} fidelity non-increasing in p_s")
            });
        }
        let endpoints = || -> Result<(f64, f64)> {
            let exact = networks::evaluate_cloner(&problem, CloningMode::Exact)?;
            let approx = networks::evaluate_cloner(&problem, CloningMode::Approx)?;
            let lo = networks::evaluate_cloner(&problem, CloningMode::Hybrid { p_s: sweep[0] })?;
            let hi = networks::evaluate_cloner(&problem, CloningMode::Hybrid { p_s: 1.0 })?;
            let d_lo = (lo.success_probability - exact.success_probability)
                .abs()
                .max((lo.fidelity - exact.fidelity).abs());
            let d_hi = (hi.success_probability - approx.success_probability)
                .abs()
                .max((hi.fidelity - approx.fidelity).abs());
            Ok((d_lo, d_hi))
        };
        match endpoints() {
            Ok((d_lo, d_hi)) => {
                suite.check(d_lo, tol.network, || {
                    format!("{at} p_s = P_MN matches exact cloning")
                });
                suite.check(d_hi, tol.network, || {
                    format!("{at} p_s = 1 matches approximate cloning")
                });
            }
            Err(e) => suite.check_result(Err(e), tol.network, || format!("{at} endpoints")),
        }
    }
    suite.finish()
}

pub fn limits(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("limits");
    for &theta in GRID_THETAS.iter().filter(|&&t| t >= FRAC_PI_8) {
        let s = (2.0 * theta).cos().max(0.0);
        for m in 1..MAX_COPIES {
            for eta in GRID_ETAS {
                let dev = CloningProblem::new(theta, m, HELSTROM_N, eta).and_then(|p| {
                    let h = bounds::helstrom_bound(eta, s.powi(m as i32))?;
                    Ok((bounds::fidelity_bound(&p) - h).abs())
                });
                suite.check_result(dev, tol.helstrom, || {
                    format!("theta={theta:.6} {m}->{HELSTROM_N} eta={eta} vs Helstrom")
                });
            }
            let dev = hybrid_limit_gap(theta, m, HYBRID_LIMIT_N, 11);
            suite.check_result(dev, tol.hybrid_limit, || {
                format!("theta={theta:.6} {m}->{HYBRID_LIMIT_N} trade-off vs its limit")
            });
        }
    }
    suite.finish()
}

/// Largest gap between the finite-`n` trade-off bound and its large-`n`
/// limit over `points` evenly spaced success probabilities in `[P_MN, 1]`.
pub fn hybrid_limit_gap(theta: f64, m: usize, n: usize, points: usize) -> Result<f64> {
    let p_min = bounds::exact_clone_probability(theta, m, n)?;
    let p_idp = bounds::idp_probability((2.0 * theta).cos().max(0.0).powi(m as i32))?;
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let p_s = p_min + (1.0 - p_min) * i as f64 / (points - 1).max(1) as f64;
        let finite = bounds::hybrid_fidelity_bound(theta, m, n, p_s)?.fidelity_bound;
        worst = worst.max((finite - bounds::hybrid_limit(p_s, p_idp)?).abs());
    }
    Ok(worst)
}

/// Per-copy and two-copy fidelity (overlap modulus) of running
/// `D(theta1, theta1)` on `|psi(theta3)>|+>`, `theta3` the compressed angle,
/// plus the impurity of each output qubit.
#[derive(Debug, Clone, Copy)]
pub struct DClonerOutcome {
    pub local_fidelity: [f64; 2],
    pub global_fidelity: f64,
    pub impurity: [f64; 2],
}

pub fn simulate_d_cloner(theta1: f64, sign: Outcome) -> Result<DClonerOutcome> {
    let theta3 = bounds::compose_angle(theta1, theta1)?;
    let d = gates::transfer_gate(theta1, theta1)?;
    let out = StateVector::psi(theta3, sign)
        .kron(&StateVector::plus())
        .apply(&d, &[0, 1])?;
    let ideal = StateVector::psi(theta3, sign);
    let mut local_fidelity = [0.0; 2];
    let mut imp = [0.0; 2];
    for q in 0..2 {
        let rho = out.reduced_density(q)?;
        local_fidelity[q] = overlap_modulus(&rho, &ideal);
        imp[q] = impurity(&rho);
    }
    let global_fidelity = ideal.kron(&ideal).inner(&out)?.norm();
    Ok(DClonerOutcome {
        local_fidelity,
        global_fidelity,
        impurity: imp,
    })
}

pub fn d_cloner(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("d_cloner");
    for theta1 in [FRAC_PI_8 / 2.0, FRAC_PI_8, 3.0 * FRAC_PI_8 / 2.0] {
        for sign in [Outcome::Plus, Outcome::Minus] {
            let at = format!("theta1={theta1:.6} {sign:?}");
            let res = bounds::compose_angle(theta1, theta1).and_then(|theta3| {
                let f_l = bounds::d_cloner_local_fidelity(theta3, theta1)?;
                let f_g = bounds::d_cloner_global_fidelity(theta3, theta1)?;
                let sim = simulate_d_cloner(theta1, sign)?;
                Ok((f_l, f_g, sim))
            });
            match res {
                Ok((f_l, f_g, sim)) => {
                    for q in 0..2 {
                        suite.check(sim.impurity[q], tol.gate, || format!("{at} qubit {q} pure"));
                        suite.check((sim.local_fidelity[q] - f_l).abs(), tol.gate, || {
                            format!("{at} qubit {q} local fidelity")
                        });
                    }
                    suite.check((sim.global_fidelity - f_g).abs(), tol.gate, || {
                        format!("{at} global fidelity")
                    });
                    suite.check((f_g - f_l * f_l).abs(), tol.gate, || {
                        format!("{at} global = local^2")
                    });
                }
                Err(e) => suite.check_result(Err(e), tol.gate, || at.clone()),
            }
        }
    }
    suite.finish()
}

pub fn decomposed_networks(tol: &Tolerances) -> SuiteReport {
    let mut suite = Suite::new("decomposed_networks");
    for problem in problem_grid(0.5) {
        let at = problem_label(&problem);
        let mut modes = vec![CloningMode::Exact, CloningMode::Approx];
        match hybrid_sweep(&problem) {
            Ok(sweep) => modes.extend(sweep.iter().map(|&p_s| CloningMode::Hybrid { p_s })),
            Err(e) => suite.check_result(Err(e), tol.decomposed_network, || at.clone()),
        }
        for mode in modes {
            let dev = report_gap(&problem, mode);
            suite.check_result(dev, tol.decomposed_network, || format!("{at} {mode:?}"));
        }
    }
    suite.finish()
}

/// Largest change in any reported number when gates are decomposed.
pub fn report_gap(problem: &CloningProblem, mode: CloningMode) -> Result<f64> {
    let direct = networks::evaluate_cloner(problem, mode)?;
    let split = networks::evaluate_cloner_decomposed(problem, mode)?;
    let mut gap = (direct.success_probability - split.success_probability)
        .abs()
        .max((direct.fidelity - split.fidelity).abs());
    for (a, b) in direct.branches.iter().zip(&split.branches) {
        gap = gap
            .max((a.success_probability - b.success_probability).abs())
            .max((a.fidelity - b.fidelity).abs());
    }
    Ok(gap)
}

fn problem_label(p: &CloningProblem) -> String {
    format!(
        "theta={:.6} {}->{} eta={}",
        p.theta, p.m_copies, p.n_copies, p.eta_plus
    )
}

pub type SuiteFn = fn(&Tolerances) -> SuiteReport;

pub const SUITES: [(&str, SuiteFn); 8] = [
    ("gate_algebra", gate_algebra),
    ("decomposition", decomposition),
    ("exact_cloning", exact_cloning),
    ("approx_cloning", approx_cloning),
    ("hybrid_cloning", hybrid_cloning),
    ("limits", limits),
    ("d_cloner", d_cloner),
    ("decomposed_networks", decomposed_networks),
];

pub fn run_all(tol: &Tolerances) -> VerifyReport {
    VerifyReport {
        suites: SUITES.iter().map(|(_, f)| f(tol)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = angle_grid(20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.01);
        assert!((g[19] - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(problem_grid(0.5).len(), 4 * 15);
    }

    #[test]
    fn failing_check_is_recorded() {
        let mut s = Suite::new("t");
        s.check(1.0, 2.0, || "ok".into());
        s.check(3.0, 2.0, || "bad".into());
        s.check(f64::NAN, 2.0, || "nan".into());
        let r = s.finish();
        assert_eq!((r.checks, r.passed), (3, 1));
        assert!(r.first_failure.unwrap().starts_with("bad"));
        assert!(r.worst_ratio.is_nan() || r.worst_ratio >= 1.5);
    }

    #[test]
    fn d_cloner_example() {
        let sim = simulate_d_cloner(FRAC_PI_8, Outcome::Plus).unwrap();
        let want = (std::f64::consts::PI / 24.0).cos();
        assert!((sim.local_fidelity[0] - want).abs() < 1e-12);
        assert!((sim.global_fidelity - 0.982962913145).abs() < 1e-11);
    }

    #[test]
    fn fast_suites_pass() {
        let tol = Tolerances::default();
        for suite in [
            gate_algebra(&tol),
            decomposition(&tol),
            d_cloner(&tol),
            limits(&tol),
        ] {
            assert!(suite.all_passed(), "{suite:?}");
        }
    }

    #[test]
    fn tiny_tolerances_fail() {
        let r = gate_algebra(&Tolerances::scaled(0.0));
        assert!(!r.all_passed());
    }
}
