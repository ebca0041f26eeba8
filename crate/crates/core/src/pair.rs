//! Two-particle states and their joint statistics.
//!
//! Amplitudes are ordered `|+z⟩_a|+z⟩_b, |+z⟩_a|−z⟩_b, |−z⟩_a|+z⟩_b,
//! |−z⟩_a|−z⟩_b`. The same storage is reused for photon qubits (u/l slit
//! modes, H/V polarization) where `+z` plays the role of the first basis
//! vector.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::spin::{
    axis_eigenstates, overlap_prob, pauli_component, theta_axis, Axis, Operator2, QubitState, Sign,
};
use crate::{Error, Result, EXACT_TOL};

/// An ordered pair of outcome signs for particles `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointOutcome {
    pub a: Sign,
    pub b: Sign,
}

impl JointOutcome {
    /// Fixed outcome order used for indexing and inverse-CDF sampling.
    pub const ALL: [JointOutcome; 4] = [
        JointOutcome::new(Sign::Plus, Sign::Plus),
        JointOutcome::new(Sign::Plus, Sign::Minus),
        JointOutcome::new(Sign::Minus, Sign::Plus),
        JointOutcome::new(Sign::Minus, Sign::Minus),
    ];

    pub const fn new(a: Sign, b: Sign) -> Self {
        Self { a, b }
    }

    /// Position in [`JointOutcome::ALL`].
    pub fn index(self) -> usize {
        let hi = matches!(self.a, Sign::Minus) as usize;
        let lo = matches!(self.b, Sign::Minus) as usize;
        2 * hi + lo
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    /// `sign(s_a · s_b)`.
    pub fn parity(self) -> f64 {
        (self.a * self.b).value()
    }

    /// Short key such as `pm`.
    pub fn key(self) -> &'static str {
        ["pp", "pm", "mp", "mm"][self.index()]
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a.symbol(), self.b.symbol())
    }
}

/// Which particle of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Particle {
    A,
    B,
}

/// A normalized two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex; 4],
}

impl TwoQubitState {
    pub fn new(amps: [Complex; 4]) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: [Complex; 4]) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amps: amps.map(|a| a / norm),
        })
    }

    pub fn amplitudes(&self) -> [Complex; 4] {
        self.amps
    }

    /// Amplitude on `|s_a z⟩|s_b z⟩`.
    pub fn amplitude(&self, outcome: JointOutcome) -> Complex {
        self.amps[outcome.index()]
    }

    pub fn inner(&self, ket: &TwoQubitState) -> Complex {
        self.amps
            .iter()
            .zip(ket.amps.iter())
            .map(|(b, k)| b.conj() * k)
            .sum()
    }

    pub fn equal_up_to_global_phase(&self, other: &TwoQubitState, tol: f64) -> bool {
        self.inner(other).norm() >= 1.0 - tol
    }

    pub fn with_phase(&self, phi: f64) -> Self {
        let p = Complex::from_polar(1.0, phi);
        Self {
            amps: self.amps.map(|a| a * p),
        }
    }

    /// `(⟨sa| ⊗ ⟨sb|) self` for bra states given in the z basis.
    pub fn project_onto(&self, bra_a: &QubitState, bra_b: &QubitState) -> Complex {
        let a = bra_a.amplitudes();
        let b = bra_b.amplitudes();
        let mut acc = Complex::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc += ai.conj() * bj.conj() * self.amps[2 * i + j];
            }
        }
        acc
    }

    /// Unnormalized state of one particle after projecting the other one onto
    /// `bra`.
    pub fn partial_project(&self, measured: Particle, bra: &QubitState) -> [Complex; 2] {
        let m = bra.amplitudes();
        let a = &self.amps;
        match measured {
            Particle::A => [
                m[0].conj() * a[0] + m[1].conj() * a[2],
                m[0].conj() * a[1] + m[1].conj() * a[3],
            ],
            Particle::B => [
                m[0].conj() * a[0] + m[1].conj() * a[1],
                m[0].conj() * a[2] + m[1].conj() * a[3],
            ],
        }
    }

    /// `⟨ψ| A ⊗ B |ψ⟩`.
    pub fn operator_expectation(&self, op_a: &Operator2, op_b: &Operator2) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += self.amps[2 * i + j].conj()
                            * op_a.m[i][k]
                            * op_b.m[j][l]
                            * self.amps[2 * k + l];
                    }
                }
            }
        }
        acc
    }
}

/// `(|+z⟩_a|−z⟩_b − |−z⟩_a|+z⟩_b)/√2`.
pub fn singlet() -> TwoQubitState {
    let zero = Complex::new(0.0, 0.0);
    TwoQubitState {
        amps: [
            zero,
            Complex::new(FRAC_1_SQRT_2, 0.0),
            Complex::new(-FRAC_1_SQRT_2, 0.0),
            zero,
        ],
    }
}

/// Product state `|a⟩ ⊗ |b⟩`.
pub fn tensor(a: &QubitState, b: &QubitState) -> TwoQubitState {
    let a = a.amplitudes();
    let b = b.amplitudes();
    TwoQubitState {
        amps: [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]],
    }
}

/// Coefficients `d(s_a, s_b) = (⟨s_a n_a| ⊗ ⟨s_b n_b|) ψ`, indexed by
/// [`JointOutcome::index`].
pub fn expand_in_bases(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> [Complex; 4] {
    let (pa, ma) = axis_eigenstates(axis_a);
    let (pb, mb) = axis_eigenstates(axis_b);
    JointOutcome::ALL.map(|o| {
        let ea = if o.a == Sign::Plus { &pa } else { &ma };
        let eb = if o.b == Sign::Plus { &pb } else { &mb };
        state.project_onto(ea, eb)
    })
}

/// Probabilities of the four sign pairs for one pair of measurement axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    probs: [f64; 4],
}

impl JointDistribution {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "probabilities {probs:?} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { probs })
    }

    pub fn prob(&self, outcome: JointOutcome) -> f64 {
        self.probs[outcome.index()]
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn marginal_a(&self, s: Sign) -> f64 {
        self.prob(JointOutcome::new(s, Sign::Plus)) + self.prob(JointOutcome::new(s, Sign::Minus))
    }

    pub fn marginal_b(&self, s: Sign) -> f64 {
        self.prob(JointOutcome::new(Sign::Plus, s)) + self.prob(JointOutcome::new(Sign::Minus, s))
    }

    /// `Σ sign(s_a s_b) P(s_a, s_b)`.
    pub fn parity_expectation(&self) -> f64 {
        JointOutcome::ALL
            .iter()
            .map(|o| o.parity() * self.prob(*o))
            .sum()
    }

    /// Total variation distance `½ Σ |P − Q|`.
    pub fn total_variation(&self, other: &JointDistribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(other.probs.iter())
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Born-rule probabilities `|d(s_a, s_b)|²`.
pub fn joint_probabilities(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> JointDistribution {
    let d = expand_in_bases(state, axis_a, axis_b);
    JointDistribution {
        probs: d.map(|c| c.norm_sqr().clamp(0.0, 1.0)),
    }
}

/// `⟨σ_a σ_b⟩` as the sign-weighted sum over the four final product states.
pub fn joint_expectation(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> f64 {
    joint_probabilities(state, axis_a, axis_b).parity_expectation()
}

/// `⟨ψ|σ_{n_a} ⊗ σ_{n_b}|ψ⟩` evaluated directly with the operators.
pub fn joint_expectation_operator(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> f64 {
    state
        .operator_expectation(&pauli_component(axis_a), &pauli_component(axis_b))
        .re
}

/// Three measurement directions for the three-axis Bell form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellAxes {
    pub axes: [Axis; 3],
}

impl BellAxes {
    pub fn new(first: Axis, second: Axis, third: Axis) -> Self {
        Self {
            axes: [first, second, third],
        }
    }

    /// Coplanar axes in the yz-plane at the given angles from `+z`.
    pub fn coplanar_degrees(angles_deg: [f64; 3]) -> Result<Self> {
        let [a, b, c] = angles_deg;
        Ok(Self::new(
            theta_axis(a.to_radians())?,
            theta_axis(b.to_radians())?,
            theta_axis(c.to_radians())?,
        ))
    }

    /// Index pairs in the order `(1,2), (1,3), (2,3)`.
    pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

    /// Angles `α₁₂, α₁₃, α₂₃` in radians.
    pub fn pair_angles(&self) -> [f64; 3] {
        Self::PAIRS.map(|(i, j)| self.axes[i].angle_to(&self.axes[j]))
    }
}

/// `|E(1,2) − E(1,3)| − E(2,3)` from the three correlation values.
pub fn bell_combination(e12: f64, e13: f64, e23: f64) -> f64 {
    (e12 - e13).abs() - e23
}

pub fn bell_quantity(state: &TwoQubitState, axes: &BellAxes) -> f64 {
    let [e12, e13, e23] =
        BellAxes::PAIRS.map(|(i, j)| joint_expectation(state, axes.axes[i], axes.axes[j]));
    bell_combination(e12, e13, e23)
}

/// A single-qubit density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    op: Operator2,
}

impl DensityMatrix2 {
    /// Validates Hermiticity, unit trace and positivity (each at `1e-12`).
    pub fn new(op: Operator2) -> Result<Self> {
        if !op.is_hermitian(EXACT_TOL) {
            return Err(Error::InvalidArgument(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr}")));
        }
        let rho = Self { op };
        let [low, _] = rho.eigenvalues();
        if low < -EXACT_TOL {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {low}")));
        }
        Ok(rho)
    }

    /// The maximally mixed state `I/2`.
    pub fn maximally_mixed() -> Self {
        Self {
            op: Operator2::identity().scale(Complex::new(0.5, 0.0)),
        }
    }

    pub fn operator(&self) -> &Operator2 {
        &self.op
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.op.m[row][col]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.op.m[0][0].re;
        let d = self.op.m[1][1].re;
        let b = self.op.m[0][1];
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - half_gap, mean + half_gap]
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &Operator2) -> Complex {
        (self.op * *op).trace()
    }

    /// Population `⟨s|ρ|s⟩`.
    pub fn population(&self, state: &QubitState) -> f64 {
        self.op.sandwich(state, state).re.clamp(0.0, 1.0)
    }

    pub fn max_abs_diff(&self, other: &Operator2) -> f64 {
        self.op.max_abs_diff(other)
    }
}

/// Partial trace over the particle not named by `keep`.
pub fn reduce(state: &TwoQubitState, keep: Particle) -> DensityMatrix2 {
    let a = &state.amps;
    let mut m = [[Complex::new(0.0, 0.0); 2]; 2];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = (0..2)
                .map(|k| match keep {
                    Particle::A => a[2 * r + k] * a[2 * c + k].conj(),
                    Particle::B => a[2 * k + r] * a[2 * k + c].conj(),
                })
                .sum();
        }
    }
    DensityMatrix2 {
        op: Operator2::new(m),
    }
}

/// `Tr(ρ σ₁ σ₂)` split into the reported real value and the residual
/// imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductExpectation {
    pub value: f64,
    pub imaginary: f64,
}

pub fn density_product_expectation(
    rho: &DensityMatrix2,
    axis_1: Axis,
    axis_2: Axis,
) -> ProductExpectation {
    let t = rho.expectation(&(pauli_component(axis_1) * pauli_component(axis_2)));
    ProductExpectation {
        value: t.re,
        imaginary: t.im,
    }
}

/// `½ Σ_{s₁,s₂} sign(s₁ s₂) |⟨s₁ n₁|s₂ n₂⟩|²`.
pub fn sign_weighted_overlap_sum(axis_1: Axis, axis_2: Axis) -> f64 {
    let mut acc = 0.0;
    for s1 in Sign::BOTH {
        for s2 in Sign::BOTH {
            let p = overlap_prob(&axis_1.eigenstate(s1), &axis_2.eigenstate(s2));
            acc += (s1 * s2).value() * p;
        }
    }
    0.5 * acc
}

/// Outcome distribution and post-measurement partner state when only one
/// particle is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditional {
    pub prob: f64,
    /// `None` when the outcome is impossible.
    pub partner: Option<QubitState>,
}

/// Measures `measured` along `axis` with outcome `sign` and returns the
/// probability together with the normalized state the partner is left in.
pub fn condition_on(
    state: &TwoQubitState,
    measured: Particle,
    axis: Axis,
    sign: Sign,
) -> Conditional {
    let v = state.partial_project(measured, &axis.eigenstate(sign));
    let prob = v[0].norm_sqr() + v[1].norm_sqr();
    let partner = if prob < crate::spin::IMPOSSIBLE_PROB {
        None
    } else {
        QubitState::normalized(v[0], v[1]).ok()
    };
    Conditional {
        prob: prob.clamp(0.0, 1.0),
        partner,
    }
}
