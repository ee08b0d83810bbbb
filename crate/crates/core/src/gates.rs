//! Gate constructors for the cloning networks and their reduction to
//! CNOT plus single-qubit unitaries.
//!
//! Two-qubit gates act on an ordered pair `(a, b)`; `a` is the more
//! significant bit, so the local basis order is `|++>, |+->, |-+>, |-->`.
//!
//! **CNOT convention.** [`cnot`] flips the target when the control is `|+>`
//! (bit value 0) and leaves it alone when the control is `|->`. This is the
//! opposite of the textbook active-on-1 gate.
//!
//! Circuits are listed in time order: the first placement acts first.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::bounds::{self, CloneCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{Kron, Matrix, Outcome, StateVector, Unitary};

/// Tolerance for overlap equality when requesting a single-qubit transform.
pub const OVERLAP_MATCH_TOL: f64 = 1e-10;
const UNIT_CIRCLE_TOL: f64 = 1e-12;
/// Output angles this far below the input angle count as no separation.
const SEPARATION_SLACK: f64 = 1e-12;

/// What a placement stands for. Composite gates keep their parameters so a
/// network can later be rewritten in terms of elementary gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// [`cnot`], control is the first listed qubit.
    Cnot,
    /// Arbitrary single-qubit unitary.
    Local,
    /// [`transfer_gate`] with its two angles.
    Transfer { theta1: f64, theta2: f64 },
    /// [`separation_gate`] with its two angles.
    Separation { theta_in: f64, theta_out: f64 },
}

#[derive(Debug, Clone)]
pub struct GatePlacement {
    pub gate: Unitary,
    pub qubits: Vec<usize>,
    pub label: String,
    pub kind: GateKind,
}

impl GatePlacement {
    pub fn new(
        gate: Unitary,
        qubits: Vec<usize>,
        label: impl Into<String>,
        kind: GateKind,
    ) -> Result<Self> {
        if gate.dim() != 1 << qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << qubits.len(),
                actual: gate.dim(),
            });
        }
        Ok(GatePlacement {
            gate,
            qubits,
            label: label.into(),
            kind,
        })
    }

    pub fn local(gate: Unitary, qubit: usize, label: impl Into<String>) -> Result<Self> {
        GatePlacement::new(gate, vec![qubit], label, GateKind::Local)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GatePlacement {
            gate: cnot(),
            qubits: vec![control, target],
            label: format!("CNOT({control}->{target})"),
            kind: GateKind::Cnot,
        }
    }

    /// Same gate with qubit `i` renamed to `mapping[i]`.
    pub fn remapped(&self, mapping: &[usize]) -> Result<Self> {
        let qubits = self
            .qubits
            .iter()
            .map(|&q| {
                mapping.get(q).copied().ok_or(Error::IndexOutOfRange {
                    index: q,
                    n_qubits: mapping.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GatePlacement {
            qubits,
            ..self.clone()
        })
    }
}

/// A two-qubit gate written as CNOTs and single-qubit unitaries.
#[derive(Debug, Clone)]
pub struct CircuitDecomposition {
    placements: Vec<GatePlacement>,
}

impl CircuitDecomposition {
    pub fn new(placements: Vec<GatePlacement>) -> Result<Self> {
        for p in &placements {
            let ok = match p.kind {
                GateKind::Cnot => p.qubits.len() == 2,
                GateKind::Local => p.qubits.len() == 1,
                _ => false,
            };
            if !ok || p.qubits.iter().any(|&q| q > 1) {
                return Err(Error::InvalidNetwork(format!(
                    "placement '{}' is not an elementary gate on qubits 0..2",
                    p.label
                )));
            }
        }
        Ok(CircuitDecomposition { placements })
    }

    pub fn placements(&self) -> &[GatePlacement] {
        &self.placements
    }

    pub fn cnot_count(&self) -> usize {
        self.placements
            .iter()
            .filter(|p| p.kind == GateKind::Cnot)
            .count()
    }

    /// The 4x4 operator realized by the circuit.
    pub fn product(&self) -> Result<Unitary> {
        let mut acc = Matrix::identity(4);
        for p in &self.placements {
            let full = p.gate.matrix().embed(&p.qubits, 2)?;
            acc = full.mul(&acc)?;
        }
        Unitary::new(acc)
    }

    pub fn max_abs_error(&self, target: &Unitary) -> Result<f64> {
        Ok(self.product()?.max_abs_diff(target))
    }
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> Unitary {
    Unitary::from_real([[a, b], [c, d]]).expect("orthogonal 2x2")
}

pub fn identity2() -> Unitary {
    real2(1.0, 0.0, 0.0, 1.0)
}

pub fn sigma_x() -> Unitary {
    real2(0.0, 1.0, 1.0, 0.0)
}

/// `i * sigma_y`, which is real.
fn i_sigma_y() -> Matrix {
    Matrix::from_real([[0.0, 1.0], [-1.0, 0.0]])
}

/// Controlled-NOT on `(control, target)`, active when the control is `|+>`.
pub fn cnot() -> Unitary {
    Unitary::from_real([
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    .expect("permutation")
}

/// `cnot` with the roles of the two qubits exchanged (control = second).
pub fn cnot_reversed() -> Unitary {
    Unitary::new(cnot().matrix().embed(&[1, 0], 2).expect("2 qubits")).expect("permutation")
}

/// Angles of the two reflections making up [`transfer_gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaAngles {
    pub delta1: f64,
    pub delta2: f64,
}

/// `cos d1 = N+ c1 c2, sin d1 = N+ s1 s2; cos d2 = N- c1 s2, sin d2 = N- s1 c2`.
///
/// At `theta1 = theta2 = 0` the `N-` pair is undefined; `delta2` then takes
/// its `theta2 -> 0` limit, `pi/2`.
pub fn delta_angles(theta1: f64, theta2: f64) -> Result<DeltaAngles> {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let unit = |x: f64, y: f64| -> Result<f64> {
        let n = x.hypot(y);
        let (cx, sy) = (x / n, y / n);
        if ((cx * cx + sy * sy) - 1.0).abs() > UNIT_CIRCLE_TOL {
            return Err(Error::Inconsistent(format!(
                "delta pair off the unit circle: ({cx}, {sy})"
            )));
        }
        Ok(sy.atan2(cx))
    };
    let delta1 = unit(c1 * c2, s1 * s2)?;
    let delta2 = if (c1 * s2).hypot(s1 * c2) == 0.0 {
        FRAC_PI_2
    } else {
        unit(c1 * s2, s1 * c2)?
    };
    Ok(DeltaAngles { delta1, delta2 })
}

/// Distinguishability transfer gate.
///
/// Sends `|psi_+-(theta1)>|psi_+-(theta2)>` to `|psi_+-(theta3)>|+>` with
/// `cos 2 theta3 = cos 2 theta1 cos 2 theta2`. It is a reflection on each
/// of `span{|++>, |-->}` and `span{|+->, |-+>}`, hence Hermitian and its
/// own inverse; applied to `|psi(theta3)>|+>` it undoes the compression.
pub fn transfer_gate(theta1: f64, theta2: f64) -> Result<Unitary> {
    check_angle("theta1", theta1)?;
    check_angle("theta2", theta2)?;
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();

    // Normalized images of |++> and |-+> (the N+ and N- vectors).
    let n_plus = 1.0 / (c1 * c2).hypot(s1 * s2);
    let (p0, p3) = (n_plus * c1 * c2, n_plus * s1 * s2);
    let h = (c1 * s2).hypot(s1 * c2);
    let (m1, m2) = if h == 0.0 {
        (0.0, 1.0)
    } else {
        (c1 * s2 / h, s1 * c2 / h)
    };

    // D = |++><v1| + |--><v3| + |-+><v2| + |+-><v4|, with
    // v1 = (p0, 0, 0, p3), v3 = (p3, 0, 0, -p0),
    // v2 = (0, m1, m2, 0), v4 = (0, -m2, m1, 0).
    Unitary::from_real([
        [p0, 0.0, 0.0, p3],
        [0.0, -m2, m1, 0.0],
        [0.0, m1, m2, 0.0],
        [p3, 0.0, 0.0, -p0],
    ])
}

/// State separation gate on `(ancilla, system)`.
///
/// `|+>|psi_+-(theta_in)>  ->  sqrt(P)|+>|psi_+-(theta_out)> + sqrt(1-P)|->|+>`,
/// with `P` the optimal separation probability. The system being `|->`
/// leaves the ancilla untouched.
pub fn separation_gate(theta_in: f64, theta_out: f64) -> Result<Unitary> {
    let p = separation_probability(theta_in, theta_out)?;
    let theta_out = theta_out.max(theta_in);
    let (c_in, c_out) = (theta_in.cos(), theta_out.cos());
    let a = p.sqrt() * c_out / c_in;
    let b = (1.0 - p).sqrt() / c_in;
    Unitary::from_real([
        [a, 0.0, b, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [b, 0.0, -a, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

fn separation_probability(theta_in: f64, theta_out: f64) -> Result<f64> {
    check_angle("theta_in", theta_in)?;
    check_angle("theta_out", theta_out)?;
    if theta_in <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let (s_in, s_out) = ((2.0 * theta_in).cos(), (2.0 * theta_out).cos());
    if theta_in > theta_out + SEPARATION_SLACK {
        return Err(Error::NotASeparation {
            overlap_in: s_in,
            overlap_out: s_out,
        });
    }
    bounds::separation_bound(s_in.clamp(0.0, 1.0), s_out.clamp(0.0, 1.0))
}

/// Single-qubit gate with `T|psi_+-(theta_in)> = mu_+-|psi_+(theta_out)> + nu_+-|psi_-(theta_out)>`,
/// found by solving the linear system in the `|+>, |->` basis.
pub fn clone_transform_gate(
    theta_in: f64,
    theta_out: f64,
    coeffs: &CloneCoefficients,
) -> Result<Unitary> {
    check_angle("theta_in", theta_in)?;
    check_angle("theta_out", theta_out)?;
    if theta_in <= 0.0 {
        return Err(Error::IdenticalStates);
    }
    let (s_out, c_out) = theta_out.sin_cos();
    let image = |mu: f64, nu: f64| [(mu + nu) * c_out, (mu - nu) * s_out];
    let plus = image(coeffs.mu_plus, coeffs.nu_plus);
    let minus = image(coeffs.mu_minus, coeffs.nu_minus);

    let input_overlap = (2.0 * theta_in).cos();
    let output_overlap = plus[0] * minus[0] + plus[1] * minus[1];
    if (input_overlap - output_overlap).abs() > OVERLAP_MATCH_TOL {
        return Err(Error::NonUnitaryRequest {
            input: input_overlap,
            output: output_overlap,
        });
    }

    // In = [[c, c], [s, -s]], In^-1 = [[1/2c, 1/2s], [1/2c, -1/2s]]
    let (s_in, c_in) = theta_in.sin_cos();
    let (u, v) = (0.5 / c_in, 0.5 / s_in);
    let t = |row: usize| [u * (plus[row] + minus[row]), v * (plus[row] - minus[row])];
    let (r0, r1) = (t(0), t(1));
    Unitary::from_real([r0, r1]).map_err(|e| match e {
        Error::NotUnitary { .. } => Error::NonUnitaryRequest {
            input: input_overlap,
            output: output_overlap,
        },
        other => other,
    })
}

/// Reflection on `span{|++>, |-->}`: `|++> -> cos d|++> + sin d|-->`,
/// `|--> -> -cos d|--> + sin d|++>`, identity on `|+->, |-+>`.
pub fn pair_reflection(delta: f64) -> Unitary {
    let (s, c) = delta.sin_cos();
    Unitary::from_real([
        [c, 0.0, 0.0, s],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [s, 0.0, 0.0, -c],
    ])
    .expect("reflection")
}

/// Controlled reflection of the target when the control is `|+>`:
/// `|++> -> cos d|++> + sin d|+->`, `|+-> -> -cos d|+-> + sin d|++>`.
pub fn controlled_reflection(delta: f64) -> Unitary {
    let (s, c) = delta.sin_cos();
    Unitary::from_real([
        [c, s, 0.0, 0.0],
        [s, -c, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    .expect("reflection")
}

/// `(1 x X) C_ba (1 x X)`: flips the first qubit when the second is `|->`.
pub fn minus_controlled_not() -> Unitary {
    let x_b = identity2().kron(&sigma_x());
    x_b.then_after(&cnot_reversed())
        .and_then(|m| m.then_after(&x_b))
        .expect("product of permutations")
}

/// Frame rotation `((1 - i sy) cos(d/2) + (1 + i sy) sin(d/2)) / sqrt 2`.
/// Conjugating a CNOT target by it gives [`controlled_reflection`]`(d)`.
pub fn reflection_frame(delta: f64) -> Unitary {
    let (s, c) = (0.5 * delta).sin_cos();
    let one = Matrix::identity(2);
    let iy = i_sigma_y();
    let mut m = Matrix::zeros(2);
    for r in 0..2 {
        for col in 0..2 {
            let v = (one.get(r, col) - iy.get(r, col)) * c + (one.get(r, col) + iy.get(r, col)) * s;
            m.set(r, col, v * FRAC_1_SQRT_2);
        }
    }
    Unitary::new(m).expect("rotation")
}

/// Rotation angle `gamma` of the separation gate:
/// `cos g = sqrt(P) cos(theta_out)/cos(theta_in)`, `sin g = sqrt(1-P)/cos(theta_in)`.
pub fn separation_angle(theta_in: f64, theta_out: f64) -> Result<f64> {
    let p = separation_probability(theta_in, theta_out)?;
    let theta_out = theta_out.max(theta_in);
    let c_in = theta_in.cos();
    let cos_g = p.sqrt() * theta_out.cos() / c_in;
    let sin_g = (1.0 - p).sqrt() / c_in;
    let dev = (cos_g * cos_g + sin_g * sin_g - 1.0).abs();
    if dev > UNIT_CIRCLE_TOL {
        return Err(Error::Inconsistent(format!(
            "cos^2 + sin^2 of the separation angle deviates from 1 by {dev:e}"
        )));
    }
    Ok(sin_g.atan2(cos_g))
}

/// Frame rotation for the separation gate; same form as [`reflection_frame`].
pub fn separation_frame(theta_in: f64, theta_out: f64) -> Result<Unitary> {
    Ok(reflection_frame(separation_angle(theta_in, theta_out)?))
}

/// [`transfer_gate`] assembled from two pair reflections:
/// `Q(d1) (1 x X) Q(d2 + pi/2) (1 x X)`.
pub fn transfer_gate_via_reflections(theta1: f64, theta2: f64) -> Result<Unitary> {
    check_angle("theta1", theta1)?;
    check_angle("theta2", theta2)?;
    let d = delta_angles(theta1, theta2)?;
    let x_b = identity2().kron(&sigma_x());
    pair_reflection(d.delta1)
        .then_after(&x_b)?
        .then_after(&pair_reflection(d.delta2 + FRAC_PI_2))?
        .then_after(&x_b)
}

fn fuse(chain: &[(&str, &Unitary)]) -> Result<(Unitary, String)> {
    let mut acc = identity2();
    for (_, u) in chain {
        acc = u.then_after(&acc)?;
    }
    let label = chain
        .iter()
        .map(|(n, _)| *n)
        .collect::<Vec<_>>()
        .join(" ; ");
    Ok((acc, label))
}

/// Four-CNOT circuit for [`transfer_gate`] on qubits `(a, b) = (0, 1)`.
///
/// Time order: `X_b, C_ba, [X ; A1]_b, C_ab, X_a, [A1^dag ; X ; A2]_b, C_ab,
/// [A2^dag ; X]_b, C_ba` with `A1 = A(d1)` and `A2 = A(d2 + pi/2)`.
pub fn decompose_transfer(theta1: f64, theta2: f64) -> Result<CircuitDecomposition> {
    check_angle("theta1", theta1)?;
    check_angle("theta2", theta2)?;
    let d = delta_angles(theta1, theta2)?;
    let x = sigma_x();
    let a1 = reflection_frame(d.delta1);
    let a2 = reflection_frame(d.delta2 + FRAC_PI_2);
    let (a1_dag, a2_dag) = (a1.adjoint(), a2.adjoint());

    let lu = |chain: &[(&str, &Unitary)], qubit: usize| -> Result<GatePlacement> {
        let (u, label) = fuse(chain)?;
        GatePlacement::local(u, qubit, format!("LU[{label}]@{qubit}"))
    };
    CircuitDecomposition::new(vec![
        lu(&[("X", &x)], 1)?,
        GatePlacement::cnot(1, 0),
        lu(&[("X", &x), ("A1", &a1)], 1)?,
        GatePlacement::cnot(0, 1),
        lu(&[("X", &x)], 0)?,
        lu(&[("A1^dag", &a1_dag), ("X", &x), ("A2", &a2)], 1)?,
        GatePlacement::cnot(0, 1),
        lu(&[("A2^dag", &a2_dag), ("X", &x)], 1)?,
        GatePlacement::cnot(1, 0),
    ])
}

/// One-CNOT circuit for [`separation_gate`]: `B_a, C_ba, B^dag_a`.
pub fn decompose_separation(theta_in: f64, theta_out: f64) -> Result<CircuitDecomposition> {
    let b = separation_frame(theta_in, theta_out)?;
    CircuitDecomposition::new(vec![
        GatePlacement::local(b.clone(), 0, "LU[B]@0")?,
        GatePlacement::cnot(1, 0),
        GatePlacement::local(b.adjoint(), 0, "LU[B^dag]@0")?,
    ])
}

fn check_angle(what: &'static str, theta: f64) -> Result<()> {
    if !theta.is_finite() || !(-1e-12..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&theta) {
        return Err(Error::OutOfRange {
            what,
            value: theta,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_4,
        });
    }
    Ok(())
}

/// `|psi_+-(theta)>` on each of `k` qubits.
pub fn product_state(theta: f64, sign: Outcome, k: usize) -> StateVector {
    StateVector::psi(theta, sign).power(k)
}
