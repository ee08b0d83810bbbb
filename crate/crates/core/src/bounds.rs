//! Closed-form fidelity and probability limits for cloning one of two
//! pure states, plus a direct-search oracle for the fidelity optimum.
//!
//! Single-copy states are `|psi_+-(theta)> = cos(theta)|+> +- sin(theta)|->`
//! with overlap `s = cos(2 theta)`. Holding `k` copies gives overlap `s^k`,
//! which is again of this form with angle `theta_k` (see [`angle_for_copies`]).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on angle and probability ranges before rejecting input.
const RANGE_SLACK: f64 = 1e-12;

fn check_theta(theta: f64) -> Result<()> {
    if !(-RANGE_SLACK..=FRAC_PI_4 + RANGE_SLACK).contains(&theta) {
        return Err(Error::OutOfRange {
            what: "theta",
            value: theta,
            lo: 0.0,
            hi: FRAC_PI_4,
        });
    }
    Ok(())
}

fn check_unit_interval(what: &'static str, value: f64) -> Result<()> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Half-angle of an overlap: the `theta` in `[0, pi/4]` with `cos(2 theta) = s`.
pub fn angle_from_overlap(overlap: f64) -> f64 {
    0.5 * overlap.clamp(-1.0, 1.0).acos()
}

/// A two-state `M -> N` cloning task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloningProblem {
    pub theta: f64,
    pub m_copies: usize,
    pub n_copies: usize,
    pub eta_plus: f64,
}

impl CloningProblem {
    pub fn new(theta: f64, m_copies: usize, n_copies: usize, eta_plus: f64) -> Result<Self> {
        check_theta(theta)?;
        check_unit_interval("eta_plus", eta_plus)?;
        if m_copies < 1 {
            return Err(Error::InvalidProblem("M must be at least 1".into()));
        }
        if n_copies <= m_copies {
            return Err(Error::InvalidProblem(format!(
                "N must exceed M (got M = {m_copies}, N = {n_copies})"
            )));
        }
        Ok(CloningProblem {
            theta: theta.clamp(0.0, FRAC_PI_4),
            m_copies,
            n_copies,
            eta_plus: eta_plus.clamp(0.0, 1.0),
        })
    }

    /// Equal-prior problem.
    pub fn symmetric(theta: f64, m_copies: usize, n_copies: usize) -> Result<Self> {
        CloningProblem::new(theta, m_copies, n_copies, 0.5)
    }

    pub fn eta_minus(&self) -> f64 {
        1.0 - self.eta_plus
    }

    /// Single-copy overlap `cos(2 theta)`.
    pub fn overlap(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    pub fn theta_m(&self) -> f64 {
        angle_for_copies(self.theta, self.m_copies).expect("validated problem")
    }

    pub fn theta_n(&self) -> f64 {
        angle_for_copies(self.theta, self.n_copies).expect("validated problem")
    }

    /// Overlap of the `M`-copy input states.
    pub fn overlap_m(&self) -> f64 {
        self.overlap().powi(self.m_copies as i32)
    }

    /// Overlap of the ideal `N`-copy clone states.
    pub fn overlap_n(&self) -> f64 {
        self.overlap().powi(self.n_copies as i32)
    }

    pub fn has_equal_priors(&self) -> bool {
        (self.eta_plus - 0.5).abs() <= RANGE_SLACK
    }
}

/// Output-state angles `phi_+-` in the basis where the exact clones read
/// `cos(theta_N)|gamma> +- sin(theta_N)|delta>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalAngles {
    pub phi_plus: f64,
    pub phi_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloneCoefficients {
    pub mu_plus: f64,
    pub nu_plus: f64,
    pub mu_minus: f64,
    pub nu_minus: f64,
}

impl CloneCoefficients {
    /// Coefficients `(mu, nu)` for one input branch.
    pub fn for_sign(&self, plus: bool) -> (f64, f64) {
        if plus {
            (self.mu_plus, self.nu_plus)
        } else {
            (self.mu_minus, self.nu_minus)
        }
    }

    /// Squared norm of `mu|a> + nu|b>` where `<a|b> = overlap`, per branch.
    pub fn norms_sqr(&self, overlap: f64) -> (f64, f64) {
        let n = |mu: f64, nu: f64| mu * mu + nu * nu + 2.0 * mu * nu * overlap;
        (
            n(self.mu_plus, self.nu_plus),
            n(self.mu_minus, self.nu_minus),
        )
    }
}

/// A point on the success-probability / post-selected-fidelity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub p_success: f64,
    pub fidelity_bound: f64,
}

/// `(cos 2 theta)^k`.
pub fn overlap_after_copies(theta: f64, k: usize) -> Result<f64> {
    check_theta(theta)?;
    if k < 1 {
        return Err(Error::InvalidProblem(
            "copy count must be at least 1".into(),
        ));
    }
    Ok((2.0 * theta).cos().max(0.0).powi(k as i32))
}

/// Angle `theta_k` in `[0, pi/4]` with `cos(2 theta_k) = (cos 2 theta)^k`.
pub fn angle_for_copies(theta: f64, k: usize) -> Result<f64> {
    if k == 1 {
        check_theta(theta)?;
        return Ok(theta.clamp(0.0, FRAC_PI_4));
    }
    Ok(angle_from_overlap(overlap_after_copies(theta, k)?))
}

/// Angle whose overlap is the product of the two input overlaps.
pub fn compose_angle(theta_a: f64, theta_b: f64) -> Result<f64> {
    check_theta(theta_a)?;
    check_theta(theta_b)?;
    let s = (2.0 * theta_a).cos().max(0.0) * (2.0 * theta_b).cos().max(0.0);
    Ok(angle_from_overlap(s))
}

/// Angles of the fidelity-optimal outputs, with `phi_+ - phi_- = 2 theta_M`.
pub fn optimal_phis(problem: &CloningProblem) -> Result<OptimalAngles> {
    if problem.theta <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let theta_m = problem.theta_m();
    let theta_n = problem.theta_n();
    let diff = 2.0 * theta_m;
    let delta = 2.0 * theta_n - diff;
    let four_eta = 4.0 * problem.eta_plus * problem.eta_minus();

    let cos_sq = delta.cos().powi(2) / (1.0 - four_eta * delta.sin().powi(2));
    let cos_sum = cos_sq.clamp(0.0, 1.0).sqrt();
    let bias = problem.eta_plus - problem.eta_minus();
    let sin_sum = if bias.abs() <= RANGE_SLACK {
        0.0
    } else {
        bias.signum() * (1.0 - cos_sum * cos_sum).max(0.0).sqrt()
    };
    let sum = sin_sum.atan2(cos_sum);
    Ok(OptimalAngles {
        phi_plus: 0.5 * (sum + diff),
        phi_minus: 0.5 * (sum - diff),
    })
}

/// Deterministic global fidelity `eta_+ cos^2(theta_N - phi_+) + eta_- cos^2(theta_N + phi_-)`
/// of the outputs described by `angles`.
pub fn fidelity_at(problem: &CloningProblem, angles: &OptimalAngles) -> f64 {
    let theta_n = problem.theta_n();
    problem.eta_plus * (theta_n - angles.phi_plus).cos().powi(2)
        + problem.eta_minus() * (theta_n + angles.phi_minus).cos().powi(2)
}

/// Maximum deterministic global fidelity for `M -> N` cloning.
pub fn fidelity_bound(problem: &CloningProblem) -> f64 {
    let delta = 2.0 * problem.theta_n() - 2.0 * problem.theta_m();
    let four_eta = 4.0 * problem.eta_plus * problem.eta_minus();
    0.5 * (1.0 + (1.0 - four_eta * delta.sin().powi(2)).max(0.0).sqrt())
}

/// Expansion coefficients of the optimal outputs on the exact clone states.
pub fn clone_coefficients(angles: &OptimalAngles, theta_n: f64) -> Result<CloneCoefficients> {
    let denom = (2.0 * theta_n).sin();
    if denom < 1e-12 {
        return Err(Error::DegenerateSubspace(denom));
    }
    let mu = |phi: f64| (theta_n + phi).sin() / denom;
    let nu = |phi: f64| (theta_n - phi).sin() / denom;
    Ok(CloneCoefficients {
        mu_plus: mu(angles.phi_plus),
        nu_plus: nu(angles.phi_plus),
        mu_minus: mu(angles.phi_minus),
        nu_minus: nu(angles.phi_minus),
    })
}

/// Optimal probability of correctly identifying one of two states.
pub fn helstrom_bound(eta_plus: f64, overlap: f64) -> Result<f64> {
    check_unit_interval("eta_plus", eta_plus)?;
    check_unit_interval("overlap", overlap)?;
    let four_eta = 4.0 * eta_plus * (1.0 - eta_plus);
    Ok(0.5 * (1.0 + (1.0 - four_eta * overlap * overlap).max(0.0).sqrt()))
}

/// Maximum success probability of exact `M -> N` cloning.
pub fn exact_clone_probability(theta: f64, m: usize, n: usize) -> Result<f64> {
    CloningProblem::symmetric(theta, m, n)?;
    if theta <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let s = (2.0 * theta).cos().max(0.0);
    Ok((1.0 - s.powi(m as i32)) / (1.0 - s.powi(n as i32)))
}

/// Upper bound on the probability of reducing an overlap from
/// `overlap_in` to `overlap_out`.
pub fn separation_bound(overlap_in: f64, overlap_out: f64) -> Result<f64> {
    check_unit_interval("overlap_in", overlap_in)?;
    check_unit_interval("overlap_out", overlap_out)?;
    if overlap_out > overlap_in + RANGE_SLACK {
        return Err(Error::NotASeparation {
            overlap_in,
            overlap_out,
        });
    }
    if overlap_out >= overlap_in {
        return Ok(1.0);
    }
    Ok(((1.0 - overlap_in) / (1.0 - overlap_out)).min(1.0))
}

/// Optimal probability of error-free identification.
pub fn idp_probability(overlap: f64) -> Result<f64> {
    check_unit_interval("overlap", overlap)?;
    Ok(1.0 - overlap.clamp(0.0, 1.0))
}

/// Angle reached by separating `|psi(theta_m)>` with success probability
/// `p_s`; lies between `theta_m` and `theta_n`.
pub fn separated_angle(theta_m: f64, theta_n: f64, p_s: f64) -> Result<f64> {
    check_theta(theta_m)?;
    check_theta(theta_n)?;
    let s_m = (2.0 * theta_m).cos();
    let s_n = (2.0 * theta_n).cos();
    let p_min = separation_bound(s_m, s_n)?;
    if !p_s.is_finite() || p_s < p_min - RANGE_SLACK || p_s > 1.0 + RANGE_SLACK {
        return Err(Error::OutOfRange {
            what: "p_s",
            value: p_s,
            lo: p_min,
            hi: 1.0,
        });
    }
    let p_s = p_s.clamp(p_min, 1.0);
    let s = (1.0 - (1.0 - s_m) / p_s).clamp(s_n, s_m);
    Ok(angle_from_overlap(s))
}

/// Optimal post-selected global fidelity of equal-prior hybrid cloning at
/// success probability `p_s`.
pub fn hybrid_fidelity_bound(theta: f64, m: usize, n: usize, p_s: f64) -> Result<TradeoffPoint> {
    let p_min = exact_clone_probability(theta, m, n)?;
    if !p_s.is_finite() || p_s < p_min - RANGE_SLACK || p_s > 1.0 + RANGE_SLACK {
        return Err(Error::OutOfRange {
            what: "p_s",
            value: p_s,
            lo: p_min,
            hi: 1.0,
        });
    }
    let p_s = p_s.clamp(p_min, 1.0);
    let s = (2.0 * theta).cos().max(0.0);
    let s_n = s.powi(n as i32);
    let p_idp = 1.0 - s.powi(m as i32);
    let root = ((1.0 - s_n * s_n) * (p_s * p_s - (p_s - p_idp).powi(2)))
        .max(0.0)
        .sqrt();
    let f = 0.5 * (1.0 + s_n * (1.0 - p_idp / p_s) + root / p_s);
    Ok(TradeoffPoint {
        p_success: p_s,
        fidelity_bound: f.min(1.0),
    })
}

/// Limit of [`hybrid_fidelity_bound`] as the number of clones grows without bound.
pub fn hybrid_limit(p_s: f64, p_idp: f64) -> Result<f64> {
    check_unit_interval("p_idp", p_idp)?;
    if !p_s.is_finite() || p_s < p_idp - RANGE_SLACK || p_s > 1.0 + RANGE_SLACK || p_s <= 0.0 {
        return Err(Error::OutOfRange {
            what: "p_s",
            value: p_s,
            lo: p_idp,
            hi: 1.0,
        });
    }
    let root = (p_s * p_s - (p_s - p_idp).powi(2)).max(0.0).sqrt();
    Ok((0.5 * (1.0 + root / p_s)).min(1.0))
}

/// Per-copy fidelity of the product clones produced by running a
/// distinguishability-transfer gate backwards on `|psi(theta3)>|+>`.
pub fn d_cloner_local_fidelity(theta3: f64, theta1: f64) -> Result<f64> {
    check_theta(theta3)?;
    check_theta(theta1)?;
    Ok((theta3 - theta1).cos())
}

/// Global (two-copy) fidelity of the same product clones.
pub fn d_cloner_global_fidelity(theta3: f64, theta1: f64) -> Result<f64> {
    Ok(d_cloner_local_fidelity(theta3, theta1)?.powi(2))
}

/// Objective in the raw parameterization `phi_+ - phi_- = 2 theta_M`.
fn raw_objective(problem: &CloningProblem, theta_n: f64, theta_m: f64, phi_plus: f64) -> f64 {
    let phi_minus = phi_plus - 2.0 * theta_m;
    problem.eta_plus * (theta_n - phi_plus).cos().powi(2)
        + problem.eta_minus() * (theta_n + phi_minus).cos().powi(2)
}

/// Maximizes the deterministic fidelity by direct search along the
/// constraint line: a uniform scan of `grid_size` points over one period
/// of `phi_+`, then golden-section refinement around the best sample.
///
/// Independent of [`optimal_phis`] and [`fidelity_bound`].
pub fn brute_force_fidelity(problem: &CloningProblem, grid_size: usize) -> Result<f64> {
    if grid_size < 1000 {
        return Err(Error::OutOfRange {
            what: "grid_size",
            value: grid_size as f64,
            lo: 1000.0,
            hi: f64::INFINITY,
        });
    }
    let theta_m = problem.theta_m();
    let theta_n = problem.theta_n();
    let f = |phi: f64| raw_objective(problem, theta_n, theta_m, phi);

    // The objective has period pi in phi_+.
    let (lo, hi) = (-FRAC_PI_2, FRAC_PI_2);
    let step = (hi - lo) / grid_size as f64;
    let best = (0..=grid_size)
        .map(|i| lo + step * i as f64)
        .map(|phi| (phi, f(phi)))
        .fold(
            (lo, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );

    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    Ok(best.1.max(f(0.5 * (a + b))))
}
