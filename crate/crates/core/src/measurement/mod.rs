//! Seeded Monte Carlo sampling of joint measurements.
//!
//! Two measurement semantics are implemented:
//!
//! * [`MeasurementModel::NonlocalCollapse`] samples `a`'s outcome from its
//!   reduced state, collapses `b` onto the conditional state left by that
//!   outcome, and then samples `b` from the collapsed state.
//! * [`MeasurementModel::LocalIndependent`] never materializes a conditional
//!   state. Each particle is projected only by its own measurement and the
//!   pair outcome is drawn in one step from the Born probabilities of the
//!   final product states.
//!
//! The two produce the same outcome distribution for every state and pair
//! of axes; [`model_total_variation`] computes the distance analytically.

mod counts;
mod estimator;
pub mod rng;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use counts::{chi_square_homogeneity, ChiSquareTest, CountRecord, CountTable};
pub use estimator::{
    coincidence_estimate, correlation_mean, replica_agreement, replica_local_expectation,
    EstimatorResult, ReplicaCheck, REPLICA_AGREEMENT_SIGMAS,
};

use crate::pair::{
    condition_on, joint_probabilities, reduce, JointDistribution, JointOutcome, Particle,
    TwoQubitState,
};
use crate::spin::{overlap_prob, Axis, Sign};
use crate::{Error, Result};

/// Trials per RNG block. Block `k` covers trial indices
/// `k·BLOCK_LEN .. (k+1)·BLOCK_LEN` and uses stream `k` of the run seed.
pub const BLOCK_LEN: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementModel {
    #[serde(rename = "collapse")]
    NonlocalCollapse,
    #[serde(rename = "local")]
    LocalIndependent,
}

impl MeasurementModel {
    pub const BOTH: [MeasurementModel; 2] = [
        MeasurementModel::LocalIndependent,
        MeasurementModel::NonlocalCollapse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementModel::NonlocalCollapse => "collapse",
            MeasurementModel::LocalIndependent => "local",
        }
    }
}

impl fmt::Display for MeasurementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collapse" => Ok(MeasurementModel::NonlocalCollapse),
            "local" => Ok(MeasurementModel::LocalIndependent),
            other => Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (expected `local` or `collapse`)"
            ))),
        }
    }
}

/// Per-(state, axes, model) sampling tables, built once and reused for
/// every trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SamplerKind {
    /// Inverse CDF over [`JointOutcome::ALL`].
    Joint { cdf: [f64; 4], probs: [f64; 4] },
    /// `P(a = +)`, then `P(b = + | a)` indexed by `a`'s outcome.
    Chain {
        a_plus: f64,
        b_plus_given_a: [f64; 2],
    },
}

impl Sampler {
    pub fn new(state: &TwoQubitState, axis_a: Axis, axis_b: Axis, model: MeasurementModel) -> Self {
        let kind = match model {
            MeasurementModel::LocalIndependent => {
                let probs = joint_probabilities(state, axis_a, axis_b).probs();
                let mut cdf = [0.0; 4];
                let mut acc = 0.0;
                for (k, p) in probs.iter().enumerate() {
                    acc += p;
                    cdf[k] = acc;
                }
                SamplerKind::Joint { cdf, probs }
            }
            MeasurementModel::NonlocalCollapse => {
                let chain = CollapseChain::new(state, axis_a, axis_b);
                SamplerKind::Chain {
                    a_plus: chain.a_marginal[0],
                    b_plus_given_a: chain.b_plus_given_a,
                }
            }
        };
        Self { kind }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> JointOutcome {
        match self.kind {
            SamplerKind::Joint { cdf, probs } => {
                let u: f64 = rng.random();
                if let Some(k) = cdf.iter().position(|&c| u < c) {
                    return JointOutcome::from_index(k);
                }
                // u landed in the rounding gap above cdf[3]
                let k = probs.iter().rposition(|&p| p > 0.0).unwrap_or(3);
                JointOutcome::from_index(k)
            }
            SamplerKind::Chain {
                a_plus,
                b_plus_given_a,
            } => {
                let u: f64 = rng.random();
                let a = if u < a_plus { Sign::Plus } else { Sign::Minus };
                let p_b = b_plus_given_a[(a == Sign::Minus) as usize];
                let v: f64 = rng.random();
                let b = if v < p_b { Sign::Plus } else { Sign::Minus };
                JointOutcome::new(a, b)
            }
        }
    }
}

/// Marginal of `a` and conditional probabilities of `b` after collapse.
struct CollapseChain {
    a_marginal: [f64; 2],
    b_plus_given_a: [f64; 2],
}

impl CollapseChain {
    fn new(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> Self {
        let rho_a = reduce(state, Particle::A);
        let b_plus = axis_b.eigenstate(Sign::Plus);
        let mut a_marginal = [0.0; 2];
        let mut b_plus_given_a = [0.5; 2];
        for (k, s) in Sign::BOTH.into_iter().enumerate() {
            a_marginal[k] = rho_a.population(&axis_a.eigenstate(s));
            let cond = condition_on(state, Particle::A, axis_a, s);
            if let Some(partner) = cond.partner {
                b_plus_given_a[k] = overlap_prob(&b_plus, &partner);
            }
        }
        Self {
            a_marginal,
            b_plus_given_a,
        }
    }

    fn joint(&self) -> [f64; 4] {
        JointOutcome::ALL.map(|o| {
            let k = (o.a == Sign::Minus) as usize;
            let pb = match o.b {
                Sign::Plus => self.b_plus_given_a[k],
                Sign::Minus => 1.0 - self.b_plus_given_a[k],
            };
            self.a_marginal[k] * pb
        })
    }
}

/// Joint outcome distribution implied by the collapse chain
/// `P(s_a) · P(s_b | collapsed b)`.
pub fn collapse_distribution(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> [f64; 4] {
    CollapseChain::new(state, axis_a, axis_b).joint()
}

/// `½ Σ |P_collapse − P_local|` over the four outcomes.
pub fn model_total_variation(state: &TwoQubitState, axis_a: Axis, axis_b: Axis) -> f64 {
    let chain = collapse_distribution(state, axis_a, axis_b);
    let local: JointDistribution = joint_probabilities(state, axis_a, axis_b);
    0.5 * chain
        .iter()
        .zip(local.probs().iter())
        .map(|(p, q)| (p - q).abs())
        .sum::<f64>()
}

/// Draws one joint outcome.
pub fn sample_joint<R: Rng + ?Sized>(
    state: &TwoQubitState,
    axis_a: Axis,
    axis_b: Axis,
    model: MeasurementModel,
    rng: &mut R,
) -> JointOutcome {
    Sampler::new(state, axis_a, axis_b, model).sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub n_trials: u64,
    pub model: MeasurementModel,
    pub axis_a: Axis,
    pub axis_b: Axis,
}

impl RunConfig {
    pub fn new(
        seed: u64,
        n_trials: u64,
        model: MeasurementModel,
        axis_a: Axis,
        axis_b: Axis,
    ) -> Result<Self> {
        let cfg = Self {
            seed,
            n_trials,
            model,
            axis_a,
            axis_b,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok(())
    }

    fn blocks(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let n_blocks = self.n_trials.div_ceil(BLOCK_LEN) as usize;
        (0..n_blocks).into_par_iter().map(move |k| {
            let k = k as u64;
            let start = k * BLOCK_LEN;
            (k, (self.n_trials - start).min(BLOCK_LEN))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub outcome: JointOutcome,
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub model: MeasurementModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub config: RunConfig,
    pub records: Vec<TrialRecord>,
    pub table: CountTable,
}

fn block_outcomes(
    sampler: &Sampler,
    seed: u64,
    block: u64,
    len: u64,
) -> impl Iterator<Item = JointOutcome> + '_ {
    let mut rng = rng::stream_rng(seed, block);
    (0..len).map(move |_| sampler.sample(&mut rng))
}

/// Runs the configured trials, keeping every record.
pub fn run_trials(config: &RunConfig, state: &TwoQubitState) -> Result<TrialRun> {
    config.validate()?;
    let sampler = Sampler::new(state, config.axis_a, config.axis_b, config.model);
    let blocks: Vec<Vec<JointOutcome>> = config
        .blocks()
        .map(|(k, len)| block_outcomes(&sampler, config.seed, k, len).collect())
        .collect();
    let mut table = CountTable::empty();
    let mut records = Vec::with_capacity(config.n_trials as usize);
    for (i, outcome) in blocks.into_iter().flatten().enumerate() {
        table.record(outcome);
        records.push(TrialRecord {
            trial_index: i as u64,
            outcome,
            axis_a: config.axis_a,
            axis_b: config.axis_b,
            model: config.model,
        });
    }
    Ok(TrialRun {
        config: *config,
        records,
        table,
    })
}

/// Same trials as [`run_trials`] but only the counts are kept.
pub fn count_trials(config: &RunConfig, state: &TwoQubitState) -> Result<CountTable> {
    config.validate()?;
    let sampler = Sampler::new(state, config.axis_a, config.axis_b, config.model);
    Ok(config
        .blocks()
        .map(|(k, len)| {
            let mut t = CountTable::empty();
            block_outcomes(&sampler, config.seed, k, len).for_each(|o| t.record(o));
            t
        })
        .reduce(CountTable::empty, |a, b| a.merge(&b)))
}

pub const TRIAL_CSV_HEADER: [&str; 9] = [
    "trial",
    "sa",
    "sb",
    "alpha_a_deg",
    "beta_a_deg",
    "alpha_b_deg",
    "beta_b_deg",
    "model",
    "seed",
];

/// Degrees with nine decimals, as used for every serialized angle.
pub fn format_degrees(degrees: f64) -> String {
    format!("{degrees:.9}")
}

pub fn write_trials_csv<W: Write>(
    run: &TrialRun,
    writer: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_CSV_HEADER)?;
    let seed = run.config.seed.to_string();
    for r in &run.records {
        w.write_record([
            r.trial_index.to_string().as_str(),
            &r.outcome.a.to_string(),
            &r.outcome.b.to_string(),
            &format_degrees(r.axis_a.polar_deg()),
            &format_degrees(r.axis_a.azimuth_deg()),
            &format_degrees(r.axis_b.polar_deg()),
            &format_degrees(r.axis_b.azimuth_deg()),
            r.model.as_str(),
            &seed,
        ])?;
    }
    w.flush()?;
    Ok(())
}
