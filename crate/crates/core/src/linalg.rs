//! Dense complex state vectors and small matrices.
//!
//! Basis convention: the single-qubit states `|+>` and `|->` are bit values
//! 0 and 1, and qubit 0 is the most significant bit of an amplitude index.
//! For two qubits the amplitude order is therefore `|++>, |+->, |-+>, |-->`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `max |U^dag U - I|` accepted at construction.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Tolerance on `sum |amp|^2 - 1` for a normalized state.
pub const NORM_TOL: f64 = 1e-12;
/// Branches with probability below this are treated as impossible.
pub const BRANCH_EPS: f64 = 1e-14;

/// Outcome of a single-qubit measurement in the `|+>, |->` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn bit(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// Tensor product. The left operand indexes the more significant bits.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

fn check_power_of_two(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Bit position (from the least significant end) of `qubit` in an `n`-qubit index.
#[inline]
fn shift_of(qubit: usize, n_qubits: usize) -> usize {
    n_qubits - 1 - qubit
}

fn check_qubits(qubits: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange { index: q, n_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from complex rows. All rows must have the same length
    /// as the number of rows.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_real<const D: usize>(rows: [[f64; D]; D]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Matrix { dim: D, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c];
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M^dag M - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self
            .adjoint()
            .mul(self)
            .expect("adjoint has matching dimension");
        gram.max_abs_diff(&Matrix::identity(self.dim))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Determinant of a 2x2 matrix.
    pub fn det2(&self) -> Option<C64> {
        (self.dim == 2).then(|| self.data[0] * self.data[3] - self.data[1] * self.data[2])
    }

    /// Full `2^n x 2^n` matrix of `self` acting on `qubits` of an `n`-qubit
    /// register, built column by column from basis states.
    pub fn embed(&self, qubits: &[usize], n_qubits: usize) -> Result<Matrix> {
        let gate = Unitary::new(self.clone())?;
        let dim = 1usize << n_qubits;
        let mut out = Matrix::zeros(dim);
        for col in 0..dim {
            let image = StateVector::basis(n_qubits, col)?.apply(&gate, qubits)?;
            for (row, amp) in image.amps().iter().enumerate() {
                out.data[row * dim + col] = *amp;
            }
        }
        Ok(out)
    }
}

impl Kron for Matrix {
    fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Matrix::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let x = self.data[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + (j * b + l)] = x * other.data[k * b + l];
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A unitary matrix of dimension `2^k`, checked at construction.
#[derive(Clone, PartialEq)]
pub struct Unitary(Matrix);

impl Unitary {
    pub fn new(matrix: Matrix) -> Result<Self> {
        check_power_of_two(matrix.dim())?;
        if !all_finite(&matrix.data) {
            return Err(Error::NonFinite("unitary"));
        }
        let deviation = matrix.unitarity_deviation();
        if deviation >= UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary(matrix))
    }

    pub fn from_real<const D: usize>(rows: [[f64; D]; D]) -> Result<Self> {
        Unitary::new(Matrix::from_real(rows))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Unitary::new(Matrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.0.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    /// Operator product `self * rhs` (`rhs` acts first).
    pub fn then_after(&self, rhs: &Unitary) -> Result<Unitary> {
        Unitary::new(self.0.mul(&rhs.0)?)
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

impl Kron for Unitary {
    fn kron(&self, other: &Unitary) -> Unitary {
        Unitary(self.0.kron(&other.0))
    }
}

impl fmt::Debug for Unitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary{:?}", self.0)
    }
}

/// Dense amplitude vector over `n_qubits` qubits.
///
/// States built through [`StateVector::new`] are normalized. Unnormalized
/// projection branches (see [`StateVector::branch`]) carry their branch
/// probability as squared norm and report `is_subnormalized() == true`.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
    subnormalized: bool,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = check_power_of_two(amps.len())?;
        if !all_finite(&amps) {
            return Err(Error::NonFinite("state vector"));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(StateVector {
            n_qubits,
            amps,
            subnormalized: false,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        StateVector::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `index` of an `n_qubits` register.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NotPowerOfTwo(1));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, n_qubits });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amps,
            subnormalized: false,
        })
    }

    pub fn plus() -> Self {
        StateVector::basis(1, 0).expect("valid basis state")
    }

    pub fn minus() -> Self {
        StateVector::basis(1, 1).expect("valid basis state")
    }

    /// `|psi_+-(theta)> = cos(theta)|+> +- sin(theta)|->`.
    pub fn psi(theta: f64, sign: Outcome) -> Self {
        let s = match sign {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        };
        StateVector {
            n_qubits: 1,
            amps: vec![C64::new(theta.cos(), 0.0), C64::new(s * theta.sin(), 0.0)],
            subnormalized: false,
        }
    }

    /// `k`-fold tensor power of a state.
    pub fn power(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.kron(self);
        }
        out
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `gate` to `qubits`. The first listed qubit is the most
    /// significant bit of the gate's local basis.
    pub fn apply(&self, gate: &Unitary, qubits: &[usize]) -> Result<StateVector> {
        let k = qubits.len();
        if k == 0 || gate.dim() != 1 << k {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                actual: gate.dim(),
            });
        }
        check_qubits(qubits, self.n_qubits)?;

        let n = self.n_qubits;
        let local_dim = 1usize << k;
        // offsets[l] = global index bits contributed by local index l
        let offsets: Vec<usize> = (0..local_dim)
            .map(|l| {
                qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| {
                    let bit = (l >> (k - 1 - j)) & 1;
                    acc | (bit << shift_of(q, n))
                })
            })
            .collect();
        let mask = offsets[local_dim - 1];

        let m = gate.matrix();
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut local = vec![C64::new(0.0, 0.0); local_dim];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, amp) in local.iter().enumerate() {
                    acc += m.get(r, c) * amp;
                }
                out[base | off] = acc;
            }
        }
        Ok(StateVector {
            n_qubits: n,
            amps: out,
            subnormalized: self.subnormalized,
        })
    }

    /// Unnormalized branch of `qubit` having value `outcome`; the squared
    /// norm of the result is the branch probability.
    pub fn branch(&self, qubit: usize, outcome: Outcome) -> Result<StateVector> {
        check_qubits(&[qubit], self.n_qubits)?;
        let shift = shift_of(qubit, self.n_qubits);
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i >> shift) & 1 == outcome.bit() {
                    *a
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
            subnormalized: true,
        })
    }

    /// Projects `qubit` onto `outcome`. Returns the outcome probability and
    /// the renormalized post-measurement state.
    pub fn project_qubit(&self, qubit: usize, outcome: Outcome) -> Result<(f64, StateVector)> {
        if self.subnormalized {
            return Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr(),
            });
        }
        let mut branch = self.branch(qubit, outcome)?;
        let probability = branch.norm_sqr();
        if probability <= BRANCH_EPS {
            return Err(Error::ImpossibleBranch { probability });
        }
        let scale = 1.0 / probability.sqrt();
        branch.amps.iter_mut().for_each(|a| *a *= scale);
        branch.subnormalized = false;
        Ok((probability, branch))
    }

    /// Removes `qubit`, which must be in a definite basis state. Returns
    /// that value together with the remaining register.
    pub fn discard_qubit(&self, qubit: usize) -> Result<(Outcome, StateVector)> {
        check_qubits(&[qubit], self.n_qubits)?;
        if self.n_qubits < 2 {
            return Err(Error::InvalidNetwork(
                "cannot discard the only qubit of a register".into(),
            ));
        }
        let shift = shift_of(qubit, self.n_qubits);
        let weight = |bit: usize| -> f64 {
            self.amps
                .iter()
                .enumerate()
                .filter(|(i, _)| (i >> shift) & 1 == bit)
                .map(|(_, a)| a.norm_sqr())
                .sum()
        };
        let (w0, w1) = (weight(0), weight(1));
        let (value, residual) = if w0 >= w1 {
            (Outcome::Plus, w1)
        } else {
            (Outcome::Minus, w0)
        };
        if residual > BRANCH_EPS {
            return Err(Error::NotProductState { qubit, residual });
        }
        let low_mask = (1usize << shift) - 1;
        let amps = (0..self.amps.len() / 2)
            .map(|j| {
                let hi = (j & !low_mask) << 1;
                let idx = hi | (value.bit() << shift) | (j & low_mask);
                self.amps[idx]
            })
            .collect();
        Ok((
            value,
            StateVector {
                n_qubits: self.n_qubits - 1,
                amps,
                subnormalized: self.subnormalized,
            },
        ))
    }

    /// Single-qubit reduced density matrix of `qubit`, in the `|+>, |->` basis.
    pub fn reduced_density(&self, qubit: usize) -> Result<Matrix> {
        check_qubits(&[qubit], self.n_qubits)?;
        let shift = shift_of(qubit, self.n_qubits);
        let mut rho = Matrix::zeros(2);
        for (i, a) in self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift) & 1 == 0)
        {
            let b = self.amps[i | (1 << shift)];
            rho.set(0, 0, rho.get(0, 0) + a * a.conj());
            rho.set(0, 1, rho.get(0, 1) + a * b.conj());
            rho.set(1, 0, rho.get(1, 0) + b * a.conj());
            rho.set(1, 1, rho.get(1, 1) + b * b.conj());
        }
        Ok(rho)
    }
}

impl Kron for StateVector {
    fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
            subnormalized: self.subnormalized || other.subnormalized,
        }
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector[{}q", self.n_qubits)?;
        if self.subnormalized {
            write!(f, ", subnormalized")?;
        }
        write!(f, "](")?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, ")")
    }
}

/// `|<a|b>|^2` for two normalized states.
pub fn global_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    for s in [a, b] {
        if s.is_subnormalized() {
            return Err(Error::NotNormalized {
                norm_sqr: s.norm_sqr(),
            });
        }
    }
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn cnot_plus_control() -> Unitary {
        // control = first local qubit, active on |+> (bit 0)
        Unitary::from_real([
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = Unitary::identity(2).unwrap();
        assert_eq!(
            i2.kron(&i2).max_abs_diff(&Unitary::identity(4).unwrap()),
            0.0
        );

        let pm = StateVector::plus().kron(&StateVector::minus());
        assert_eq!(pm, StateVector::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn kron_psi_pair() {
        let p = StateVector::psi(FRAC_PI_8, Outcome::Plus);
        let pp = p.kron(&p);
        let (c, s) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
        let expected = StateVector::from_real(&[c * c, c * s, s * c, s * s]).unwrap();
        assert!(pp.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn apply_identity_and_cnot() {
        let pp = StateVector::basis(2, 0).unwrap();
        let out = pp.apply(&Unitary::identity(4).unwrap(), &[0, 1]).unwrap();
        assert_eq!(out, pp);

        // |+-> with control on |+> flips the target to |+>
        let pm = StateVector::basis(2, 1).unwrap();
        let out = pm.apply(&cnot_plus_control(), &[0, 1]).unwrap();
        assert_eq!(out, pp);

        // |-+> and |--> untouched
        for idx in [2, 3] {
            let s = StateVector::basis(2, idx).unwrap();
            assert_eq!(s.apply(&cnot_plus_control(), &[0, 1]).unwrap(), s);
        }
    }

    #[test]
    fn apply_matches_embedding_on_three_qubits() {
        let theta: f64 = 0.37;
        let (c, s) = (theta.cos(), theta.sin());
        let g = Unitary::from_real([
            [c, 0.0, 0.0, s],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [s, 0.0, 0.0, -c],
        ])
        .unwrap();
        // oracle: I (x) G for qubits (1,2)
        let full = Matrix::identity(2).kron(g.matrix());
        let amps: Vec<f64> = (0..8).map(|i| (i as f64 + 1.0).sqrt()).collect();
        let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        let amps: Vec<f64> = amps.iter().map(|x| x / norm).collect();
        let state = StateVector::from_real(&amps).unwrap();
        let direct = state.apply(&g, &[1, 2]).unwrap();
        let via_matrix = full.mul_vec(state.amps()).unwrap();
        for (a, b) in direct.amps().iter().zip(&via_matrix) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_reversed_qubit_order_swaps_roles() {
        // CNOT listed on [1, 0]: qubit 1 is control
        let mp = StateVector::basis(2, 0b10).unwrap(); // |-+>
        let out = mp.apply(&cnot_plus_control(), &[1, 0]).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b00).unwrap());
    }

    #[test]
    fn apply_errors() {
        let s = StateVector::basis(2, 0).unwrap();
        let g = cnot_plus_control();
        assert!(matches!(
            s.apply(&g, &[0, 2]),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            s.apply(&g, &[1, 1]),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(matches!(
            s.apply(&g, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inner_products() {
        let p = StateVector::plus();
        assert_eq!(p.inner(&p).unwrap(), C64::new(1.0, 0.0));
        let a = StateVector::psi(FRAC_PI_8, Outcome::Plus);
        let b = StateVector::psi(FRAC_PI_8, Outcome::Minus);
        assert!((a.inner(&b).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        let a = StateVector::psi(FRAC_PI_4, Outcome::Plus);
        let b = StateVector::psi(FRAC_PI_4, Outcome::Minus);
        assert!(a.inner(&b).unwrap().norm() < 1e-15);
        assert!(matches!(
            p.inner(&StateVector::basis(2, 0).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelities() {
        let p = StateVector::plus();
        assert_eq!(global_fidelity(&p, &p).unwrap(), 1.0);
        assert_eq!(global_fidelity(&p, &StateVector::minus()).unwrap(), 0.0);
        let a = StateVector::psi(FRAC_PI_8, Outcome::Plus);
        let b = StateVector::psi(FRAC_PI_8, Outcome::Minus);
        assert!((global_fidelity(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projection() {
        let (p, post) = StateVector::plus().project_qubit(0, Outcome::Plus).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(post, StateVector::plus());

        let sup = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let (p, post) = sup.project_qubit(0, Outcome::Minus).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(post.max_abs_diff(&StateVector::minus()) < 1e-15);

        assert!(matches!(
            StateVector::plus().project_qubit(0, Outcome::Minus),
            Err(Error::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn branch_is_flagged() {
        let sup = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let b = sup.branch(0, Outcome::Minus).unwrap();
        assert!(b.is_subnormalized());
        assert!((b.norm_sqr() - 0.64).abs() < 1e-15);
        assert!(global_fidelity(&b, &sup).is_err());
    }

    #[test]
    fn discard_product_qubit() {
        let a = StateVector::psi(0.3, Outcome::Minus);
        let full = a
            .kron(&StateVector::minus())
            .kron(&StateVector::psi(0.2, Outcome::Plus));
        let (value, rest) = full.discard_qubit(1).unwrap();
        assert_eq!(value, Outcome::Minus);
        let expected = a.kron(&StateVector::psi(0.2, Outcome::Plus));
        assert!(rest.max_abs_diff(&expected) < 1e-15);

        let bell = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!(matches!(
            bell.discard_qubit(0),
            Err(Error::NotProductState { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 0.0, 0.0]),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(StateVector::from_real(&[f64::NAN, 0.0]).is_err());
        assert!(matches!(
            Unitary::from_real([[1.0, 1.0], [0.0, 1.0]]),
            Err(Error::NotUnitary { .. })
        ));
    }
    #[test]
    fn reduced_density_of_product_and_bell() {
        let s = StateVector::psi(0.3, Outcome::Plus).kron(&StateVector::minus());
        let rho = s.reduced_density(0).unwrap();
        let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
        let want = Matrix::from_real([[c * c, c * sn], [sn * c, sn * sn]]);
        assert!(rho.max_abs_diff(&want) < 1e-15);
        let rho1 = s.reduced_density(1).unwrap();
        assert!(rho1.max_abs_diff(&Matrix::from_real([[0.0, 0.0], [0.0, 1.0]])) < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let mixed = Matrix::from_real([[0.5, 0.0], [0.0, 0.5]]);
        for q in 0..2 {
            assert!(bell.reduced_density(q).unwrap().max_abs_diff(&mixed) < 1e-15);
        }
    }
}
