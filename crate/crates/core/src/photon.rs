//! Entangled-photon predictions: double-slit fringe visibility for a
//! TEM01 (upper/lower mode) pair and the angular momentum carried by the
//! signal photon of a polarization-entangled pair.
//!
//! Photon qubits reuse [`TwoQubitState`]: the signal photon is particle `a`,
//! the idler is particle `b`. For slit modes the first basis vector is the
//! upper maximum `u`; for polarization it is `H`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as Complex;
use serde::Serialize;

use crate::measurement::MeasurementModel;
use crate::pair::{reduce, JointOutcome, Particle, TwoQubitState};
use crate::spin::QubitState;
use crate::{Error, Result, EXACT_TOL};

/// Upper or lower intensity maximum of the TEM01 mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Slit {
    #[serde(rename = "u")]
    Upper,
    #[serde(rename = "l")]
    Lower,
}

impl Slit {
    pub fn as_str(self) -> &'static str {
        match self {
            Slit::Upper => "u",
            Slit::Lower => "l",
        }
    }

    fn basis_state(self) -> QubitState {
        match self {
            Slit::Upper => QubitState::plus_z(),
            Slit::Lower => QubitState::minus_z(),
        }
    }
}

impl FromStr for Slit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" | "upper" => Ok(Slit::Upper),
            "l" | "lower" => Ok(Slit::Lower),
            other => Err(Error::InvalidArgument(format!(
                "unknown idler outcome `{other}` (expected `u` or `l`)"
            ))),
        }
    }
}

impl fmt::Display for Slit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The near-field pair state `(|u⟩_s|u⟩_i + e^{iγ}|l⟩_s|l⟩_i)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePairState {
    pub state: TwoQubitState,
    pub gamma: f64,
}

pub fn tem01_state(gamma: f64) -> ModePairState {
    let zero = Complex::new(0.0, 0.0);
    let amps = [
        Complex::new(FRAC_1_SQRT_2, 0.0),
        zero,
        zero,
        Complex::from_polar(FRAC_1_SQRT_2, gamma),
    ];
    ModePairState {
        state: TwoQubitState::new(amps).expect("mode pair amplitudes are normalized"),
        gamma,
    }
}

/// Signal amplitudes at the upper and lower slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitAmplitudes {
    pub a_u: Complex,
    pub a_l: Complex,
}

impl SlitAmplitudes {
    pub fn new(a_u: Complex, a_l: Complex) -> Result<Self> {
        let total = a_u.norm_sqr() + a_l.norm_sqr();
        if !total.is_finite() || total > 1.0 + EXACT_TOL {
            return Err(Error::InvalidArgument(format!(
                "slit amplitudes carry weight {total} > 1"
            )));
        }
        Ok(Self { a_u, a_l })
    }

    pub fn weight(&self) -> f64 {
        self.a_u.norm_sqr() + self.a_l.norm_sqr()
    }
}

/// Signal amplitudes at the double slit once the idler has been detected in
/// `idler` (near field).
///
/// Under collapse the signal is conditioned on the idler outcome. Under the
/// local model the idler detection leaves the signal as it was created, with
/// both maxima occupied and the SPDC phase between them.
pub fn signal_amplitudes_after_idler(
    pair: &ModePairState,
    idler: Slit,
    model: MeasurementModel,
) -> SlitAmplitudes {
    match model {
        MeasurementModel::NonlocalCollapse => {
            let v = pair
                .state
                .partial_project(Particle::B, &idler.basis_state());
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            SlitAmplitudes {
                a_u: v[0] / norm,
                a_l: v[1] / norm,
            }
        }
        MeasurementModel::LocalIndependent => SlitAmplitudes {
            a_u: Complex::new(FRAC_1_SQRT_2, 0.0),
            a_l: Complex::from_polar(FRAC_1_SQRT_2, pair.gamma),
        },
    }
}

/// Point-slit far-field geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitGeometry {
    pub slit_separation: f64,
    pub wavelength: f64,
    /// Far-field mapping length, e.g. the focal length of an f-f lens.
    pub screen_scale: f64,
}

impl SlitGeometry {
    pub fn new(slit_separation: f64, wavelength: f64, screen_scale: f64) -> Result<Self> {
        for (name, v) in [
            ("slit_separation", slit_separation),
            ("wavelength", wavelength),
            ("screen_scale", screen_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            slit_separation,
            wavelength,
            screen_scale,
        })
    }

    /// Fringe period `λF/d` on the screen.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength * self.screen_scale / self.slit_separation
    }
}

impl Default for SlitGeometry {
    /// 1 mm slit separation, 810 nm, 100 mm lens.
    fn default() -> Self {
        Self {
            slit_separation: 1e-3,
            wavelength: 810e-9,
            screen_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringePattern {
    pub positions: Vec<f64>,
    pub intensities: Vec<f64>,
}

impl FringePattern {
    /// Contrast `(Imax − Imin)/(Imax + Imin)` of the sampled pattern.
    pub fn visibility(&self) -> f64 {
        let max = self
            .intensities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self
            .intensities
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if max + min == 0.0 {
            0.0
        } else {
            (max - min) / (max + min)
        }
    }

    /// Trapezoid integral of the intensity over the sampled range.
    pub fn integral(&self) -> f64 {
        self.positions
            .windows(2)
            .zip(self.intensities.windows(2))
            .map(|(x, i)| 0.5 * (x[1] - x[0]) * (i[0] + i[1]))
            .sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x_m", "intensity"])?;
        for (x, i) in self.positions.iter().zip(self.intensities.iter()) {
            w.write_record([x.to_string(), i.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Intensity at screen position `x`:
/// `|a_u e^{iπdx/(λF)} + a_l e^{−iπdx/(λF)}|²`.
pub fn far_field_intensity(amps: &SlitAmplitudes, geom: &SlitGeometry, x: f64) -> f64 {
    let k = PI * geom.slit_separation * x / (geom.wavelength * geom.screen_scale);
    let field = amps.a_u * Complex::from_polar(1.0, k) + amps.a_l * Complex::from_polar(1.0, -k);
    field.norm_sqr()
}

/// Samples the far-field pattern on `n_points` uniformly spaced positions
/// covering `[−span/2, span/2]`.
pub fn far_field_pattern(
    amps: &SlitAmplitudes,
    geom: &SlitGeometry,
    n_points: usize,
    span: f64,
) -> Result<FringePattern> {
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {n_points}"
        )));
    }
    if !(span.is_finite() && span > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "span must be positive, got {span}"
        )));
    }
    let step = span / (n_points - 1) as f64;
    let positions: Vec<f64> = (0..n_points)
        .map(|k| -0.5 * span + k as f64 * step)
        .collect();
    let intensities = positions
        .iter()
        .map(|&x| far_field_intensity(amps, geom, x))
        .collect();
    Ok(FringePattern {
        positions,
        intensities,
    })
}

/// `V = 2|a_u||a_l| / (|a_u|² + |a_l|²)`.
pub fn visibility(amps: &SlitAmplitudes) -> Result<f64> {
    let total = amps.weight();
    if total == 0.0 {
        return Err(Error::InvalidArgument(
            "both slit amplitudes are zero".into(),
        ));
    }
    Ok((2.0 * amps.a_u.norm() * amps.a_l.norm() / total).clamp(0.0, 1.0))
}

/// Largest visibility compatible with the given which-path information,
/// taken as the linear bound `1 − D`.
pub fn visibility_bound(which_path_info: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&which_path_info) {
        return Err(Error::InvalidArgument(format!(
            "which-path information must lie in [0, 1], got {which_path_info}"
        )));
    }
    Ok(1.0 - which_path_info)
}

/// `(|H⟩_s|H⟩_i + |V⟩_s|V⟩_i)/√2`.
pub fn polarization_state() -> TwoQubitState {
    let zero = Complex::new(0.0, 0.0);
    let h = Complex::new(FRAC_1_SQRT_2, 0.0);
    TwoQubitState::new([h, zero, zero, h]).expect("polarization amplitudes are normalized")
}

/// Circular polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Circular {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Circular {
    pub const BOTH: [Circular; 2] = [Circular::Right, Circular::Left];

    /// Angular momentum along the propagation direction, in units of ħ.
    pub fn angular_momentum(self) -> f64 {
        match self {
            Circular::Right => 1.0,
            Circular::Left => -1.0,
        }
    }

    pub fn flip(self) -> Circular {
        match self {
            Circular::Right => Circular::Left,
            Circular::Left => Circular::Right,
        }
    }
}

impl FromStr for Circular {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" | "left" => Ok(Circular::Left),
            "R" | "r" | "right" => Ok(Circular::Right),
            other => Err(Error::InvalidArgument(format!(
                "unknown circular outcome `{other}` (expected `L` or `R`)"
            ))),
        }
    }
}

/// Sign convention for the circular basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CpConvention {
    /// `|L⟩ = (|H⟩ − i|V⟩)/√2`, `|R⟩ = (|H⟩ + i|V⟩)/√2`.
    #[default]
    Standard,
    /// `|L⟩ = (|H⟩ + i|V⟩)/√2`, `|R⟩ = (|H⟩ − i|V⟩)/√2`.
    Swapped,
}

pub fn circular_state(c: Circular, convention: CpConvention) -> QubitState {
    let sign = match (c, convention) {
        (Circular::Left, CpConvention::Standard) | (Circular::Right, CpConvention::Swapped) => -1.0,
        (Circular::Right, CpConvention::Standard) | (Circular::Left, CpConvention::Swapped) => 1.0,
    };
    QubitState::new(
        Complex::new(FRAC_1_SQRT_2, 0.0),
        Complex::new(0.0, sign * FRAC_1_SQRT_2),
    )
    .expect("circular states are normalized")
}

/// Coefficients `⟨c_s c_i|ψ⟩` for `(c_s, c_i)` in the order RR, RL, LR, LL.
pub fn circular_coefficients(state: &TwoQubitState, convention: CpConvention) -> [Complex; 4] {
    let order = [
        (Circular::Right, Circular::Right),
        (Circular::Right, Circular::Left),
        (Circular::Left, Circular::Right),
        (Circular::Left, Circular::Left),
    ];
    order.map(|(s, i)| {
        state.project_onto(
            &circular_state(s, convention),
            &circular_state(i, convention),
        )
    })
}

/// `(|R⟩_s|L⟩_i + |L⟩_s|R⟩_i)/√2`, written back in the H/V basis.
fn cp_target(convention: CpConvention) -> TwoQubitState {
    let r = circular_state(Circular::Right, convention);
    let l = circular_state(Circular::Left, convention);
    let rl = crate::pair::tensor(&r, &l).amplitudes();
    let lr = crate::pair::tensor(&l, &r).amplitudes();
    TwoQubitState::new(std::array::from_fn(|k| (rl[k] + lr[k]) * FRAC_1_SQRT_2))
        .expect("normalized target")
}

/// Whether `state` equals `(|R⟩_s|L⟩_i + |L⟩_s|R⟩_i)/√2` up to global phase.
pub fn cp_rewrite_check_state(state: &TwoQubitState, convention: CpConvention) -> bool {
    state.equal_up_to_global_phase(&cp_target(convention), EXACT_TOL)
}

/// The polarization-entangled pair written in the circular basis.
pub fn cp_rewrite_check() -> bool {
    cp_rewrite_check_state(&polarization_state(), CpConvention::Standard)
}

/// Per-shot angular momentum distribution of the signal photon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularMomentumPrediction {
    /// `(value in ħ, probability)` pairs.
    pub per_shot: Vec<(f64, f64)>,
    /// Mean in units of ħ.
    pub mean: f64,
}

impl AngularMomentumPrediction {
    fn from_populations(p_right: f64, p_left: f64) -> Self {
        let per_shot: Vec<(f64, f64)> = [(Circular::Right, p_right), (Circular::Left, p_left)]
            .into_iter()
            .filter(|(_, p)| *p > EXACT_TOL)
            .map(|(c, p)| (c.angular_momentum(), p))
            .collect();
        let mean = per_shot.iter().map(|(v, p)| v * p).sum();
        Self { per_shot, mean }
    }
}

/// Signal-photon angular momentum once the idler of the polarization pair
/// has been found in `idler`.
///
/// Under collapse the signal is conditioned on the idler outcome; under the
/// local model it keeps its own unconditioned state and its CP outcomes
/// follow its reduced density operator.
pub fn predicted_signal_angular_momentum(
    idler: Circular,
    model: MeasurementModel,
) -> AngularMomentumPrediction {
    let pair = polarization_state();
    let right = circular_state(Circular::Right, CpConvention::Standard);
    let left = circular_state(Circular::Left, CpConvention::Standard);
    match model {
        MeasurementModel::NonlocalCollapse => {
            let v =
                pair.partial_project(Particle::B, &circular_state(idler, CpConvention::Standard));
            let signal =
                QubitState::normalized(v[0], v[1]).expect("every CP idler outcome is possible");
            AngularMomentumPrediction::from_populations(
                crate::spin::overlap_prob(&right, &signal),
                crate::spin::overlap_prob(&left, &signal),
            )
        }
        MeasurementModel::LocalIndependent => {
            let rho = reduce(&pair, Particle::A);
            AngularMomentumPrediction::from_populations(
                rho.population(&right),
                rho.population(&left),
            )
        }
    }
}

/// Near-field coincidence probabilities of a mode pair in the u/l basis,
/// indexed like [`JointOutcome::ALL`] (uu, ul, lu, ll).
pub fn near_field_coincidences(pair: &ModePairState) -> [f64; 4] {
    JointOutcome::ALL.map(|o| pair.state.amplitude(o).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::{reduce, Particle};
    use crate::spin::Operator2;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn balanced(phase: f64) -> SlitAmplitudes {
        SlitAmplitudes::new(
            c(FRAC_1_SQRT_2, 0.0),
            Complex::from_polar(FRAC_1_SQRT_2, phase),
        )
        .unwrap()
    }

    #[test]
    fn tem01_amplitudes_and_statistics() {
        let p = tem01_state(0.0);
        let a = p.state.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a[3] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let cc = near_field_coincidences(&tem01_state(1.3));
        assert!((cc[0] - 0.5).abs() < 1e-12 && (cc[3] - 0.5).abs() < 1e-12);
        assert_eq!(cc[1], 0.0);
        assert_eq!(cc[2], 0.0);
        let rho = reduce(&tem01_state(0.8).state, Particle::A);
        assert!(rho.max_abs_diff(&Operator2::identity().scale(c(0.5, 0.0))) < 1e-12);
    }

    #[test]
    fn signal_after_idler() {
        let pair = tem01_state(0.0);
        let col_l =
            signal_amplitudes_after_idler(&pair, Slit::Lower, MeasurementModel::NonlocalCollapse);
        assert!(col_l.a_u.norm() < 1e-15);
        assert!((col_l.a_l - c(1.0, 0.0)).norm() < 1e-15);
        let col_u =
            signal_amplitudes_after_idler(&pair, Slit::Upper, MeasurementModel::NonlocalCollapse);
        assert!((col_u.a_u - c(1.0, 0.0)).norm() < 1e-15);
        assert!(col_u.a_l.norm() < 1e-15);
        let local =
            signal_amplitudes_after_idler(&pair, Slit::Lower, MeasurementModel::LocalIndependent);
        assert!((local.a_u.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((local.a_l.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pattern_examples() {
        let geom = SlitGeometry::default();
        let amps = balanced(0.0);
        assert!((far_field_intensity(&amps, &geom, 0.0) - 2.0).abs() < 1e-12);
        let period = geom.fringe_period();
        for k in 0..4 {
            let x = period * (2 * k + 1) as f64 / 2.0;
            assert!(far_field_intensity(&amps, &geom, x) < 1e-12, "zero {k}");
        }
        let single = SlitAmplitudes::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let pat = far_field_pattern(&single, &geom, 101, 3.0 * period).unwrap();
        assert!(pat.intensities.iter().all(|i| (i - 1.0).abs() < 1e-12));
        // π phase between slits puts a minimum at the center
        let shifted = balanced(PI);
        assert!(far_field_intensity(&shifted, &geom, 0.0) < 1e-12);
        assert!((far_field_intensity(&shifted, &geom, period / 2.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_grid_is_centered() {
        let geom = SlitGeometry::default();
        let pat = far_field_pattern(&balanced(0.0), &geom, 5, 4.0).unwrap();
        assert_eq!(pat.positions, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(far_field_pattern(&balanced(0.0), &geom, 1, 1.0).is_err());
        assert!(far_field_pattern(&balanced(0.0), &geom, 10, 0.0).is_err());
        assert!(SlitGeometry::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn visibility_examples() {
        assert!((visibility(&balanced(0.3)).unwrap() - 1.0).abs() < 1e-12);
        let single = SlitAmplitudes::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(visibility(&single).unwrap(), 0.0);
        let zero = SlitAmplitudes::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(visibility(&zero).is_err());
        assert!(SlitAmplitudes::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn model_visibilities_for_mode_pair() {
        for gamma in [0.0, 0.7, 2.0, 5.5] {
            let pair = tem01_state(gamma);
            for idler in [Slit::Upper, Slit::Lower] {
                let vl = visibility(&signal_amplitudes_after_idler(
                    &pair,
                    idler,
                    MeasurementModel::LocalIndependent,
                ))
                .unwrap();
                let vc = visibility(&signal_amplitudes_after_idler(
                    &pair,
                    idler,
                    MeasurementModel::NonlocalCollapse,
                ))
                .unwrap();
                assert!((vl - 1.0).abs() < 1e-9);
                assert!(vc.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn visibility_bound_is_linear() {
        assert_eq!(visibility_bound(0.99).unwrap(), 1.0 - 0.99);
        assert!((visibility_bound(0.99).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(visibility_bound(0.0).unwrap(), 1.0);
        assert_eq!(visibility_bound(0.5).unwrap(), 0.5);
        assert!(visibility_bound(1.5).is_err());
        assert!(visibility_bound(-0.1).is_err());
    }

    #[test]
    fn polarization_pair_in_circular_basis() {
        assert!(cp_rewrite_check());
        let probs = circular_coefficients(&polarization_state(), CpConvention::Standard)
            .map(|c| c.norm_sqr());
        assert!(probs[0] < 1e-12 && probs[3] < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12 && (probs[2] - 0.5).abs() < 1e-12);
        let rho = reduce(&polarization_state(), Particle::A);
        assert!(rho.max_abs_diff(&Operator2::identity().scale(c(0.5, 0.0))) < 1e-12);
    }

    #[test]
    fn cp_check_detects_perturbation() {
        let mut a = polarization_state().amplitudes();
        a[0] += c(1e-3, 0.0);
        let perturbed = TwoQubitState::normalized(a).unwrap();
        assert!(!cp_rewrite_check_state(&perturbed, CpConvention::Standard));
    }

    #[test]
    fn cp_check_under_swapped_convention() {
        // Oracle: build the 4×4 basis change H/V → L/R explicitly under the
        // swapped convention and read off the coefficients.
        let s = FRAC_1_SQRT_2;
        // rows: R, L in the swapped convention; columns: H, V
        let u = [[c(s, 0.0), c(0.0, -s)], [c(s, 0.0), c(0.0, s)]];
        let psi = polarization_state().amplitudes();
        let mut coeff = [c(0.0, 0.0); 4];
        for (p, q) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let mut acc = c(0.0, 0.0);
            for h in 0..2 {
                for v in 0..2 {
                    acc += u[p][h].conj() * u[q][v].conj() * psi[2 * h + v];
                }
            }
            coeff[2 * p + q] = acc;
        }
        let got = circular_coefficients(&polarization_state(), CpConvention::Swapped);
        for k in 0..4 {
            assert!((coeff[k] - got[k]).norm() < 1e-12);
        }
        // RL and LR trade places, and the symmetric form survives relabeling.
        assert!((coeff[1].norm_sqr() - 0.5).abs() < 1e-12);
        assert!((coeff[2].norm_sqr() - 0.5).abs() < 1e-12);
        assert!(cp_rewrite_check_state(
            &polarization_state(),
            CpConvention::Swapped
        ));
        assert_eq!(
            circular_state(Circular::Left, CpConvention::Swapped),
            circular_state(Circular::Right, CpConvention::Standard)
        );
    }

    #[test]
    fn angular_momentum_predictions() {
        let col_l =
            predicted_signal_angular_momentum(Circular::Left, MeasurementModel::NonlocalCollapse);
        assert!((col_l.mean - 1.0).abs() < 1e-12);
        assert_eq!(col_l.per_shot.len(), 1);
        assert!((col_l.per_shot[0].1 - 1.0).abs() < 1e-12);
        let col_r =
            predicted_signal_angular_momentum(Circular::Right, MeasurementModel::NonlocalCollapse);
        assert!((col_r.mean + 1.0).abs() < 1e-12);
        for idler in Circular::BOTH {
            let local =
                predicted_signal_angular_momentum(idler, MeasurementModel::LocalIndependent);
            assert!(local.mean.abs() < 1e-12);
            assert_eq!(local.per_shot.len(), 2);
            for (v, p) in &local.per_shot {
                assert!(v.abs() == 1.0 && (p - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pattern_energy_is_phase_independent() {
        let geom = SlitGeometry::default();
        let period = geom.fringe_period();
        let reference = far_field_pattern(&balanced(0.0), &geom, 2001, period)
            .unwrap()
            .integral();
        for phase in [0.4, 1.7, PI, 4.0, TAU - 0.1] {
            let i = far_field_pattern(&balanced(phase), &geom, 2001, period)
                .unwrap()
                .integral();
            assert!(
                (i - reference).abs() < 1e-9 * reference.max(1.0) + 1e-9,
                "{phase}"
            );
        }
    }

    #[test]
    fn extracted_visibility_matches_algebraic() {
        let geom = SlitGeometry::default();
        let period = geom.fringe_period();
        for (u, l, phase) in [
            (0.8f64, 0.6f64, 0.0),
            (0.3, 0.9, 1.0),
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2, 2.2),
        ] {
            let amps = SlitAmplitudes::new(c(u, 0.0), Complex::from_polar(l, phase)).unwrap();
            let pat = far_field_pattern(&amps, &geom, 20_001, 2.0 * period).unwrap();
            let v = visibility(&amps).unwrap();
            assert!(
                (pat.visibility() - v).abs() < 1e-6,
                "{} vs {v}",
                pat.visibility()
            );
        }
    }
}
