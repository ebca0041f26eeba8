//! Coincidence-rate estimators.
//!
//! The channel estimate is the coincidence count normalized by the geometric
//! mean of the two single-detector counts involved,
//! `C(s_a, s_b) / √(N_a(s_a) · N_b(s_b))`. For the singlet both marginals are
//! one half and the estimate converges to `2·|d(s_a, s_b)|²`. For states with
//! biased marginals it converges to something else; that is the estimator as
//! defined, and it is not corrected here.
//!
//! Standard errors use the delta method over the multinomial distribution of
//! the four coincidence cells, with plug-in cell probabilities. Channels
//! whose value is forced by the table (empty cells, or a cell that saturates
//! both of its detectors) get a standard error of exactly zero.

use serde::Serialize;

use super::counts::CountTable;
use crate::pair::JointOutcome;
use crate::spin::Sign;
use crate::{Error, Result};

/// Agreement factor between the replica expectation and the direct mean,
/// in units of their combined standard error.
pub const REPLICA_AGREEMENT_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub value: f64,
    pub std_error: f64,
    pub n_trials: u64,
}

/// Value of a channel estimate and its gradient with respect to the four
/// coincidence cells.
fn channel_with_gradient(table: &CountTable, s_a: Sign, s_b: Sign) -> Result<(f64, [f64; 4])> {
    let channel = JointOutcome::new(s_a, s_b);
    let n_a = table.single_a(s_a);
    let n_b = table.single_b(s_b);
    for (n, detector) in [
        (n_a, format!("a({})", s_a.symbol())),
        (n_b, format!("b({})", s_b.symbol())),
    ] {
        if n == 0 {
            return Err(Error::UndefinedEstimate {
                channel: channel.to_string(),
                detector,
            });
        }
    }
    let x = table.coincidence(channel) as f64;
    let a = n_a as f64;
    let b = n_b as f64;
    let root = (a * b).sqrt();
    let f = x / root;

    let mut grad = [0.0; 4];
    grad[channel.index()] = 1.0 / root - f / (2.0 * a) - f / (2.0 * b);
    // the other cell feeding N_a(s_a), and the other one feeding N_b(s_b)
    grad[JointOutcome::new(s_a, s_b.flip()).index()] = -f / (2.0 * a);
    grad[JointOutcome::new(s_a.flip(), s_b).index()] = -f / (2.0 * b);
    Ok((f, grad))
}

/// Delta-method standard error of a smooth function of multinomial counts.
fn multinomial_std_error(table: &CountTable, grad: &[f64; 4]) -> f64 {
    let n = table.n_trials() as f64;
    let p = table.coincidences().map(|c| c as f64 / n);
    let mean: f64 = grad.iter().zip(p.iter()).map(|(g, p)| g * p).sum();
    let second: f64 = grad.iter().zip(p.iter()).map(|(g, p)| g * g * p).sum();
    (n * (second - mean * mean)).max(0.0).sqrt()
}

/// `C(s_a, s_b) / √(N_a(s_a) N_b(s_b))`.
pub fn coincidence_estimate(table: &CountTable, s_a: Sign, s_b: Sign) -> Result<EstimatorResult> {
    let (value, grad) = channel_with_gradient(table, s_a, s_b)?;
    Ok(EstimatorResult {
        value,
        std_error: multinomial_std_error(table, &grad),
        n_trials: table.n_trials(),
    })
}

/// Local `⟨σ_z^a σ_n^a⟩` reconstructed from the partner's counts:
/// `−½ Σ sign(s_a s_b) · estimate(s_a, s_b)`.
pub fn replica_local_expectation(table: &CountTable) -> Result<EstimatorResult> {
    let mut value = 0.0;
    let mut grad = [0.0; 4];
    for o in JointOutcome::ALL {
        let (f, g) = channel_with_gradient(table, o.a, o.b)?;
        let w = -0.5 * o.parity();
        value += w * f;
        for k in 0..4 {
            grad[k] += w * g[k];
        }
    }
    Ok(EstimatorResult {
        value,
        std_error: multinomial_std_error(table, &grad),
        n_trials: table.n_trials(),
    })
}

/// Empirical mean of `s_a · s_b`.
pub fn correlation_mean(table: &CountTable) -> EstimatorResult {
    let n = table.n_trials() as f64;
    let value: f64 = JointOutcome::ALL
        .iter()
        .map(|o| o.parity() * table.coincidence(*o) as f64)
        .sum::<f64>()
        / n;
    EstimatorResult {
        value,
        std_error: ((1.0 - value * value).max(0.0) / n).sqrt(),
        n_trials: table.n_trials(),
    }
}

/// Comparison of the replica expectation with minus the direct correlation
/// mean computed from the same table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicaCheck {
    pub replica: EstimatorResult,
    pub direct_mean: EstimatorResult,
    /// `replica − (−direct_mean)`
    pub difference: f64,
    pub combined_std_error: f64,
    pub agrees: bool,
}

pub fn replica_agreement(table: &CountTable) -> Result<ReplicaCheck> {
    let replica = replica_local_expectation(table)?;
    let direct_mean = correlation_mean(table);
    let difference = replica.value + direct_mean.value;
    let combined_std_error = replica.std_error.hypot(direct_mean.std_error);
    let agrees =
        difference.abs() <= REPLICA_AGREEMENT_SIGMAS * combined_std_error + crate::EXACT_TOL;
    Ok(ReplicaCheck {
        replica,
        direct_mean,
        difference,
        combined_std_error,
        agrees,
    })
}
