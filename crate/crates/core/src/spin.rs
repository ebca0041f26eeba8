//! Single-qubit algebra: Bloch axes, axis eigenstates, Pauli components and
//! Born-rule projections.
//!
//! States are stored in the `|+z⟩, |−z⟩` basis exactly as constructed; global
//! phases are never stripped, so comparisons go through
//! [`equal_up_to_global_phase`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, EXACT_TOL};

/// Probability below which a projection is treated as impossible.
pub const IMPOSSIBLE_PROB: f64 = 1e-15;

/// Measurement outcome of a spin component, `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `+` or `-`, as used in channel labels.
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => f.write_str("+1"),
            Sign::Minus => f.write_str("-1"),
        }
    }
}

/// A measurement direction on the Bloch sphere.
///
/// The polar angle lies in `[0, π]` and the azimuth in `[0, 2π)`. At the poles
/// the azimuth carries no physical meaning and is stored as `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    polar: f64,
    azimuth: f64,
}

impl Axis {
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        if !(0.0..=PI).contains(&polar) {
            return Err(Error::PolarOutOfRange(polar));
        }
        let mut azimuth = azimuth.rem_euclid(TAU);
        if azimuth >= TAU {
            azimuth = 0.0;
        }
        if polar == 0.0 || polar == PI {
            azimuth = 0.0;
        }
        Ok(Self { polar, azimuth })
    }

    pub fn from_degrees(polar_deg: f64, azimuth_deg: f64) -> Result<Self> {
        Self::new(polar_deg.to_radians(), azimuth_deg.to_radians())
    }

    /// Axis pointing along a (not necessarily unit) 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let polar = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let azimuth = v[1].atan2(v[0]);
        Self::new(polar, azimuth)
    }

    pub fn z() -> Self {
        Self {
            polar: 0.0,
            azimuth: 0.0,
        }
    }

    pub fn x() -> Self {
        Self {
            polar: FRAC_PI_2,
            azimuth: 0.0,
        }
    }

    pub fn y() -> Self {
        Self {
            polar: FRAC_PI_2,
            azimuth: FRAC_PI_2,
        }
    }

    pub fn polar(&self) -> f64 {
        self.polar
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn polar_deg(&self) -> f64 {
        self.polar.to_degrees()
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth.to_degrees()
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (sp, cp) = self.polar.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        [sp * ca, sp * sa, cp]
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        let u = self.unit_vector();
        let v = other.unit_vector();
        u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
    }

    /// Angle between the two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &Axis) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn eigenstate(&self, sign: Sign) -> QubitState {
        let (plus, minus) = axis_eigenstates(*self);
        match sign {
            Sign::Plus => plus,
            Sign::Minus => minus,
        }
    }
}

/// A normalized single-qubit state `amp_plus_z |+z⟩ + amp_minus_z |−z⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    plus_z: Complex,
    minus_z: Complex,
}

impl QubitState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(plus_z: Complex, minus_z: Complex) -> Result<Self> {
        let norm_sqr = plus_z.norm_sqr() + minus_z.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { plus_z, minus_z })
    }

    /// Builds a state by rescaling arbitrary non-zero amplitudes.
    pub fn normalized(plus_z: Complex, minus_z: Complex) -> Result<Self> {
        let norm = (plus_z.norm_sqr() + minus_z.norm_sqr()).sqrt();
        if !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            plus_z: plus_z / norm,
            minus_z: minus_z / norm,
        })
    }

    pub fn plus_z() -> Self {
        Self {
            plus_z: Complex::new(1.0, 0.0),
            minus_z: Complex::new(0.0, 0.0),
        }
    }

    pub fn minus_z() -> Self {
        Self {
            plus_z: Complex::new(0.0, 0.0),
            minus_z: Complex::new(1.0, 0.0),
        }
    }

    pub fn amp_plus_z(&self) -> Complex {
        self.plus_z
    }

    pub fn amp_minus_z(&self) -> Complex {
        self.minus_z
    }

    pub fn amplitudes(&self) -> [Complex; 2] {
        [self.plus_z, self.minus_z]
    }

    /// The same ray multiplied by `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        let p = Complex::from_polar(1.0, phi);
        Self {
            plus_z: self.plus_z * p,
            minus_z: self.minus_z * p,
        }
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    pub m: [[Complex; 2]; 2],
}

impl Operator2 {
    pub fn new(m: [[Complex; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[Complex::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self::new([[one, zero], [zero, one]])
    }

    pub fn pauli_x() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self::new([[zero, one], [one, zero]])
    }

    pub fn pauli_y() -> Self {
        let i = Complex::new(0.0, 1.0);
        let zero = Complex::new(0.0, 0.0);
        Self::new([[zero, -i], [i, zero]])
    }

    pub fn pauli_z() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self::new([[one, zero], [zero, -one]])
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &QubitState, bra: &QubitState) -> Self {
        let k = ket.amplitudes();
        let b = bra.amplitudes();
        let mut m = [[Complex::new(0.0, 0.0); 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = k[r] * b[c].conj();
            }
        }
        Self::new(m)
    }

    /// Projector `|s⟩⟨s|`.
    pub fn projector(state: &QubitState) -> Self {
        Self::outer(state, state)
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, v: [Complex; 2]) -> [Complex; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `⟨bra| self |ket⟩`.
    pub fn sandwich(&self, bra: &QubitState, ket: &QubitState) -> Complex {
        let w = self.apply(ket.amplitudes());
        let b = bra.amplitudes();
        b[0].conj() * w[0] + b[1].conj() * w[1]
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Add for Operator2 {
    type Output = Operator2;

    fn add(self, rhs: Operator2) -> Operator2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }
}

impl Sub for Operator2 {
    type Output = Operator2;

    fn sub(self, rhs: Operator2) -> Operator2 {
        self + (-rhs)
    }
}

impl Neg for Operator2 {
    type Output = Operator2;

    fn neg(self) -> Operator2 {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Mul for Operator2 {
    type Output = Operator2;

    fn mul(self, rhs: Operator2) -> Operator2 {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[Complex::new(0.0, 0.0); 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Operator2::new(m)
    }
}

/// Eigenstates of `σ_n` for the given axis:
/// `|+n⟩ = cos(α/2)|+z⟩ + sin(α/2)e^{iβ}|−z⟩`,
/// `|−n⟩ = −sin(α/2)e^{−iβ}|+z⟩ + cos(α/2)|−z⟩`.
pub fn axis_eigenstates(axis: Axis) -> (QubitState, QubitState) {
    let (s, c) = (axis.polar / 2.0).sin_cos();
    let phase = Complex::from_polar(1.0, axis.azimuth);
    let plus = QubitState {
        plus_z: Complex::new(c, 0.0),
        minus_z: phase * s,
    };
    let minus = QubitState {
        plus_z: -phase.conj() * s,
        minus_z: Complex::new(c, 0.0),
    };
    (plus, minus)
}

/// Axis at angle `theta` from `+z` inside the yz-plane.
///
/// Non-negative angles (after reduction to `(−π, π]`) lie on the `+y` half
/// (azimuth `π/2`); negative ones on the `−y` half (azimuth `3π/2`) with polar
/// angle `|θ|`. Either way `|+n⟩ = cos(θ/2)|+z⟩ + i sin(θ/2)|−z⟩`.
pub fn theta_axis(theta: f64) -> Result<Axis> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    let mut reduced = (theta + PI).rem_euclid(TAU) - PI;
    if reduced <= -PI {
        reduced = PI;
    }
    if reduced >= 0.0 {
        Axis::new(reduced, FRAC_PI_2)
    } else {
        Axis::new(-reduced, 3.0 * FRAC_PI_2)
    }
}

/// `σ_n = sinα cosβ σ_x + sinα sinβ σ_y + cosα σ_z`.
pub fn pauli_component(axis: Axis) -> Operator2 {
    let [nx, ny, nz] = axis.unit_vector();
    Operator2::pauli_x().scale(Complex::new(nx, 0.0))
        + Operator2::pauli_y().scale(Complex::new(ny, 0.0))
        + Operator2::pauli_z().scale(Complex::new(nz, 0.0))
}

/// `⟨bra|ket⟩`.
pub fn inner(bra: &QubitState, ket: &QubitState) -> Complex {
    bra.plus_z.conj() * ket.plus_z + bra.minus_z.conj() * ket.minus_z
}

/// `|⟨a|b⟩|²`, clamped into `[0, 1]`.
pub fn overlap_prob(a: &QubitState, b: &QubitState) -> f64 {
    inner(a, b).norm_sqr().clamp(0.0, 1.0)
}

pub fn equal_up_to_global_phase(a: &QubitState, b: &QubitState, tol: f64) -> bool {
    inner(a, b).norm() >= 1.0 - tol
}

/// Projects `state` onto `onto`, returning the Born probability and the final
/// state (which is `onto` itself).
pub fn project(state: &QubitState, onto: &QubitState) -> Result<(f64, QubitState)> {
    let prob = overlap_prob(onto, state);
    if prob < IMPOSSIBLE_PROB {
        return Err(Error::ImpossibleOutcome(prob));
    }
    Ok((prob, *onto))
}
