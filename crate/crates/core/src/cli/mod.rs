//! Command-line front end.
//!
//! All state comes from flags (no environment variables), and every
//! command is deterministic for a fixed flag set including `--seed`.

mod output;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub use output::{axis_json, degrees_9, emit, ResultEnvelope};

use crate::measurement::{
    chi_square_homogeneity, coincidence_estimate, correlation_mean, count_trials, format_degrees,
    replica_agreement, rng::stream_seed, run_trials, write_trials_csv, ChiSquareTest, CountRecord,
    CountTable, EstimatorResult, MeasurementModel, ReplicaCheck, RunConfig,
};
use crate::pair::{
    bell_combination, bell_quantity, joint_expectation, joint_expectation_operator,
    joint_probabilities, singlet, tensor, BellAxes, JointOutcome, TwoQubitState,
};
use crate::photon::{
    far_field_pattern, polarization_state, signal_amplitudes_after_idler, tem01_state, visibility,
    visibility_bound, Slit, SlitGeometry,
};
use crate::spin::{Axis, QubitState};

#[derive(Debug, Parser)]
#[command(
    name = "bellsim",
    version,
    about = "Two-qubit measurement-semantics simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic singlet correlation between z and an axis n(alpha, beta).
    Correlate(CorrelateArgs),
    /// Three-axis Bell quantity, analytic and optionally Monte Carlo.
    Bell(BellArgs),
    /// Simulate trials and write the trial CSV and count table JSON.
    Simulate(SimulateArgs),
    /// Coincidence-rate estimates from a count table JSON.
    Estimate(EstimateArgs),
    /// Far-field fringe pattern and visibility for the TEM01 photon pair.
    Fringe(FringeArgs),
    /// Singlet correlation over a range of angles, analytic and Monte Carlo.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Local,
    Collapse,
}

impl From<ModelArg> for MeasurementModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Local => MeasurementModel::LocalIndependent,
            ModelArg::Collapse => MeasurementModel::NonlocalCollapse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    /// (|+z,-z> - |-z,+z>)/sqrt2
    Singlet,
    /// |+z>|+z>
    ProductPp,
    /// (|u,u> + e^{i gamma}|l,l>)/sqrt2
    Tem01,
    /// (|H,H> + |V,V>)/sqrt2
    Polarization,
}

impl StateArg {
    fn name(self) -> &'static str {
        match self {
            StateArg::Singlet => "singlet",
            StateArg::ProductPp => "product-pp",
            StateArg::Tem01 => "tem01",
            StateArg::Polarization => "polarization",
        }
    }

    fn build(self, gamma_deg: f64) -> TwoQubitState {
        match self {
            StateArg::Singlet => singlet(),
            StateArg::ProductPp => tensor(&QubitState::plus_z(), &QubitState::plus_z()),
            StateArg::Tem01 => tem01_state(gamma_deg.to_radians()).state,
            StateArg::Polarization => polarization_state(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdlerArg {
    U,
    L,
}

impl From<IdlerArg> for Slit {
    fn from(i: IdlerArg) -> Self {
        match i {
            IdlerArg::U => Slit::Upper,
            IdlerArg::L => Slit::Lower,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    /// Polar angle of particle b's axis, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Azimuth of particle b's axis, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BellArgs {
    /// Three coplanar axis angles from +z in the yz-plane, degrees.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 45.0, 90.0], allow_hyphen_values = true)]
    pub angles: Vec<f64>,
    /// Monte Carlo trials per axis pair (analytic only when omitted).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModelArg::Local)]
    pub model: ModelArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = StateArg::Singlet)]
    pub state: StateArg,
    /// SPDC phase for `--state tem01`, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_b: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModelArg::Local)]
    pub model: ModelArg,
    /// Trial CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Count table JSON path (defaults to the trial path with a
    /// `.counts.json` extension).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Also run the other model with the same seed and report a chi-square
    /// homogeneity test between the two count tables.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Count table JSON written by `simulate`.
    #[arg(long)]
    pub counts: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FringeArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Local)]
    pub model: ModelArg,
    /// Near-field idler detection: upper (u) or lower (l) maximum.
    #[arg(long, value_enum, default_value_t = IdlerArg::L)]
    pub idler: IdlerArg,
    /// SPDC phase, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Slit separation, meters.
    #[arg(long, default_value_t = 1e-3)]
    pub slit_separation: f64,
    /// Wavelength, meters.
    #[arg(long, default_value_t = 810e-9)]
    pub wavelength: f64,
    /// Far-field mapping length (lens focal length), meters.
    #[arg(long, default_value_t = 0.1)]
    pub screen_scale: f64,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Screen range in meters (defaults to four fringe periods).
    #[arg(long)]
    pub span: Option<f64>,
    /// Which-path information in [0, 1]; adds the visibility bound to the report.
    #[arg(long)]
    pub which_path: Option<f64>,
    /// Fringe pattern CSV path (pattern not written when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Visibility report JSON path (stdout when omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 180.0, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 19)]
    pub steps: usize,
    /// Azimuth of particle b's axis, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModelArg::Local)]
    pub model: ModelArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Outcome of a command that completed without an I/O or input error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Outputs were written but an internal check did not pass.
    ValidationFailed(String),
}

pub fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Correlate(a) => cmd_correlate(&a),
        Command::Bell(a) => cmd_bell(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Fringe(a) => cmd_fringe(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

fn axis_flag(flag_alpha: &str, alpha: f64, beta: f64) -> anyhow::Result<Axis> {
    Axis::from_degrees(alpha, beta).map_err(|e| anyhow!("--{flag_alpha}: {e}"))
}

fn emit_envelope<V: Serialize>(env: &ResultEnvelope<V>, output: &OutputArgs) -> anyhow::Result<()> {
    let text = match output.format {
        Format::Json => env.to_json()?,
        Format::Csv => env.to_csv()?,
    };
    emit(output.out.as_deref(), text.as_bytes())
}

fn probabilities_json(probs: [f64; 4]) -> Value {
    let mut map = serde_json::Map::new();
    for o in JointOutcome::ALL {
        map.insert(o.key().to_string(), json!(probs[o.index()]));
    }
    Value::Object(map)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelateValues {
    pub expectation: f64,
    pub operator_expectation: f64,
    pub closed_form: f64,
    pub angle_deg: f64,
    pub probabilities: Value,
}

pub fn correlate_values(axis_b: Axis) -> CorrelateValues {
    let s = singlet();
    let z = Axis::z();
    CorrelateValues {
        expectation: joint_expectation(&s, z, axis_b),
        operator_expectation: joint_expectation_operator(&s, z, axis_b),
        closed_form: -z.angle_to(&axis_b).cos(),
        angle_deg: degrees_9(z.angle_to(&axis_b).to_degrees()),
        probabilities: probabilities_json(joint_probabilities(&s, z, axis_b).probs()),
    }
}

fn cmd_correlate(args: &CorrelateArgs) -> anyhow::Result<Status> {
    let axis_b = axis_flag("alpha", args.alpha, args.beta)?;
    let params = json!({
        "alpha_deg": args.alpha,
        "beta_deg": args.beta,
        "state": "singlet",
        "axis_a": axis_json(&Axis::z()),
        "axis_b": axis_json(&axis_b),
        "format": format_name(args.output.format),
    });
    let env = ResultEnvelope::new("correlate", params, correlate_values(axis_b));
    emit_envelope(&env, &args.output)?;
    let v = &env.values;
    if (v.expectation - v.operator_expectation).abs() > crate::EXACT_TOL {
        return Ok(Status::ValidationFailed(format!(
            "Born-weighted and operator expectations disagree: {} vs {}",
            v.expectation, v.operator_expectation
        )));
    }
    Ok(Status::Ok)
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn verdict(value: f64) -> &'static str {
    if value > 1.0 + crate::EXACT_TOL {
        "violated"
    } else if (value - 1.0).abs() <= crate::EXACT_TOL {
        "boundary"
    } else {
        "not violated"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEstimate {
    pub pair: &'static str,
    pub angle_deg: f64,
    pub analytic: f64,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellMonteCarlo {
    pub model: &'static str,
    pub trials_per_pair: u64,
    pub pairs: Vec<PairEstimate>,
    pub value: f64,
    pub std_error: f64,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellValues {
    pub analytic: f64,
    pub verdict: &'static str,
    pub correlations: [f64; 3],
    pub pair_angles_deg: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<BellMonteCarlo>,
}

const PAIR_NAMES: [&str; 3] = ["12", "13", "23"];

/// Monte Carlo Bell estimate; pair `j` runs with seed `stream_seed(seed, j)`.
pub fn bell_monte_carlo(
    state: &TwoQubitState,
    axes: &BellAxes,
    n_trials: u64,
    seed: u64,
    model: MeasurementModel,
) -> crate::Result<BellMonteCarlo> {
    let mut pairs = Vec::with_capacity(3);
    for (j, (i, k)) in BellAxes::PAIRS.into_iter().enumerate() {
        let cfg = RunConfig::new(
            stream_seed(seed, j as u64),
            n_trials,
            model,
            axes.axes[i],
            axes.axes[k],
        )?;
        let m = correlation_mean(&count_trials(&cfg, state)?);
        pairs.push(PairEstimate {
            pair: PAIR_NAMES[j],
            angle_deg: degrees_9(axes.axes[i].angle_to(&axes.axes[k]).to_degrees()),
            analytic: joint_expectation(state, axes.axes[i], axes.axes[k]),
            mean: m.value,
            std_error: m.std_error,
        });
    }
    let value = bell_combination(pairs[0].mean, pairs[1].mean, pairs[2].mean);
    let std_error = pairs
        .iter()
        .map(|p| p.std_error * p.std_error)
        .sum::<f64>()
        .sqrt();
    Ok(BellMonteCarlo {
        model: model.as_str(),
        trials_per_pair: n_trials,
        pairs,
        value,
        std_error,
        verdict: if value > 1.0 {
            "violated"
        } else {
            "not violated"
        },
    })
}

pub fn bell_values(
    angles_deg: [f64; 3],
    trials: Option<u64>,
    seed: u64,
    model: MeasurementModel,
) -> anyhow::Result<BellValues> {
    let axes = BellAxes::coplanar_degrees(angles_deg).map_err(|e| anyhow!("--angles: {e}"))?;
    let s = singlet();
    let analytic = bell_quantity(&s, &axes);
    let correlations =
        BellAxes::PAIRS.map(|(i, k)| joint_expectation(&s, axes.axes[i], axes.axes[k]));
    let monte_carlo = match trials {
        Some(0) => bail!("--trials: must be at least 1"),
        Some(n) => Some(bell_monte_carlo(&s, &axes, n, seed, model)?),
        None => None,
    };
    Ok(BellValues {
        analytic,
        verdict: verdict(analytic),
        correlations,
        pair_angles_deg: axes.pair_angles().map(|a| degrees_9(a.to_degrees())),
        monte_carlo,
    })
}

fn cmd_bell(args: &BellArgs) -> anyhow::Result<Status> {
    let angles: [f64; 3] = args
        .angles
        .clone()
        .try_into()
        .map_err(|_| anyhow!("--angles: exactly three values required"))?;
    let model = MeasurementModel::from(args.model);
    let values = bell_values(angles, args.trials, args.seed, model)?;
    let params = json!({
        "angles_deg": angles,
        "trials": args.trials,
        "seed": args.seed,
        "model": model.as_str(),
        "state": "singlet",
        "format": format_name(args.output.format),
    });
    emit_envelope(&ResultEnvelope::new("bell", params, values), &args.output)?;
    Ok(Status::Ok)
}

/// Count table file: the table keys at top level plus the run's parameters.
#[derive(Debug, Clone, Serialize)]
struct CountsFile<'a> {
    command: &'static str,
    tool_version: &'static str,
    parameters: &'a Value,
    #[serde(flatten)]
    counts: CountRecord,
}

fn default_counts_path(out: &Path) -> PathBuf {
    out.with_extension("counts.json")
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub trials_path: String,
    pub counts_path: String,
    pub counts: CountRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ModelComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelComparison {
    pub other_model: &'static str,
    pub other_counts: CountRecord,
    pub chi_square: ChiSquareTest,
    pub analytic_total_variation: f64,
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<Status> {
    let axis_a = axis_flag("alpha-a", args.alpha_a, args.beta_a)?;
    let axis_b = axis_flag("alpha-b", args.alpha_b, args.beta_b)?;
    let model = MeasurementModel::from(args.model);
    let config = RunConfig::new(args.seed, args.trials, model, axis_a, axis_b)
        .map_err(|e| anyhow!("--trials: {e}"))?;
    let state = args.state.build(args.gamma);
    let counts_path = args
        .counts
        .clone()
        .unwrap_or_else(|| default_counts_path(&args.out));

    let params = json!({
        "state": args.state.name(),
        "gamma_deg": args.gamma,
        "axis_a": axis_json(&axis_a),
        "axis_b": axis_json(&axis_b),
        "trials": args.trials,
        "seed": args.seed,
        "model": model.as_str(),
    });

    let run = run_trials(&config, &state)?;
    let mut csv_bytes = Vec::new();
    write_trials_csv(&run, &mut csv_bytes)?;
    emit(Some(&args.out), &csv_bytes)?;

    let file = CountsFile {
        command: "simulate",
        tool_version: crate::TOOL_VERSION,
        parameters: &params,
        counts: run.table.to_record(),
    };
    let mut counts_json = serde_json::to_string_pretty(&file)?;
    counts_json.push('\n');
    emit(Some(&counts_path), counts_json.as_bytes())?;

    let comparison = if args.compare {
        let other = match model {
            MeasurementModel::LocalIndependent => MeasurementModel::NonlocalCollapse,
            MeasurementModel::NonlocalCollapse => MeasurementModel::LocalIndependent,
        };
        let other_cfg = RunConfig {
            model: other,
            ..config
        };
        let other_table = count_trials(&other_cfg, &state)?;
        Some(ModelComparison {
            other_model: other.as_str(),
            other_counts: other_table.to_record(),
            chi_square: chi_square_homogeneity(&run.table, &other_table),
            analytic_total_variation: crate::measurement::model_total_variation(
                &state, axis_a, axis_b,
            ),
        })
    } else {
        None
    };

    let summary = SimulateSummary {
        trials_path: args.out.display().to_string(),
        counts_path: counts_path.display().to_string(),
        counts: run.table.to_record(),
        comparison,
    };
    emit(
        None,
        ResultEnvelope::new("simulate", params, summary)
            .to_json()?
            .as_bytes(),
    )?;
    Ok(Status::Ok)
}

const COUNT_FIELDS: [&str; 9] = [
    "n_trials",
    "n_a_plus",
    "n_a_minus",
    "n_b_plus",
    "n_b_minus",
    "c_pp",
    "c_pm",
    "c_mp",
    "c_mm",
];

/// Parses a count table JSON document, naming the first missing or
/// malformed field.
pub fn parse_count_table(text: &str) -> anyhow::Result<CountTable> {
    let doc: Value = serde_json::from_str(text).context("count table is not valid JSON")?;
    let obj = doc
        .as_object()
        .ok_or_else(|| anyhow!("count table must be a JSON object"))?;
    let mut v = [0u64; 9];
    for (slot, key) in v.iter_mut().zip(COUNT_FIELDS) {
        let field = obj
            .get(key)
            .ok_or_else(|| anyhow!("field `{key}` is missing"))?;
        *slot = field
            .as_u64()
            .ok_or_else(|| anyhow!("field `{key}` must be a non-negative integer, got {field}"))?;
    }
    let rec = CountRecord {
        n_trials: v[0],
        n_a_plus: v[1],
        n_a_minus: v[2],
        n_b_plus: v[3],
        n_b_minus: v[4],
        c_pp: v[5],
        c_pm: v[6],
        c_mp: v[7],
        c_mm: v[8],
    };
    Ok(CountTable::from_record(&rec)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateValues {
    pub counts: CountRecord,
    pub channels: Value,
    pub replica_local_expectation: EstimatorResult,
    pub direct_mean: EstimatorResult,
    pub minus_direct_mean: f64,
    pub difference: f64,
    pub combined_std_error: f64,
    pub agreement_sigmas: f64,
    pub agrees: bool,
}

pub fn estimate_values(table: &CountTable) -> anyhow::Result<EstimateValues> {
    let mut channels = serde_json::Map::new();
    for o in JointOutcome::ALL {
        let e = coincidence_estimate(table, o.a, o.b)?;
        channels.insert(o.key().to_string(), serde_json::to_value(e)?);
    }
    let check: ReplicaCheck = replica_agreement(table)?;
    Ok(EstimateValues {
        counts: table.to_record(),
        channels: Value::Object(channels),
        replica_local_expectation: check.replica,
        direct_mean: check.direct_mean,
        minus_direct_mean: -check.direct_mean.value,
        difference: check.difference,
        combined_std_error: check.combined_std_error,
        agreement_sigmas: crate::measurement::REPLICA_AGREEMENT_SIGMAS,
        agrees: check.agrees,
    })
}

fn cmd_estimate(args: &EstimateArgs) -> anyhow::Result<Status> {
    let text = std::fs::read_to_string(&args.counts)
        .with_context(|| format!("cannot read {}", args.counts.display()))?;
    let table = parse_count_table(&text)
        .with_context(|| format!("invalid count table {}", args.counts.display()))?;
    let values = estimate_values(&table)?;
    let agrees = values.agrees;
    let difference = values.difference;
    let params = json!({
        "counts_path": args.counts.display().to_string(),
        "format": format_name(args.output.format),
    });
    emit_envelope(
        &ResultEnvelope::new("estimate", params, values),
        &args.output,
    )?;
    if !agrees {
        return Ok(Status::ValidationFailed(format!(
            "replica expectation differs from minus the direct mean by {difference}"
        )));
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Serialize)]
pub struct FringeReport {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub parameters: Value,
    pub model: &'static str,
    pub idler_outcome: &'static str,
    pub visibility: f64,
    /// SPDC phase in degrees.
    pub gamma: f64,
    pub pattern_visibility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visibility_bound: Option<f64>,
}

fn cmd_fringe(args: &FringeArgs) -> anyhow::Result<Status> {
    let geom = SlitGeometry::new(args.slit_separation, args.wavelength, args.screen_scale)
        .map_err(|e| anyhow!("geometry flags: {e}"))?;
    let span = args.span.unwrap_or(4.0 * geom.fringe_period());
    let model = MeasurementModel::from(args.model);
    let idler = Slit::from(args.idler);
    let pair = tem01_state(args.gamma.to_radians());
    let amps = signal_amplitudes_after_idler(&pair, idler, model);
    let v = visibility(&amps)?;
    let pattern = far_field_pattern(&amps, &geom, args.points, span)
        .map_err(|e| anyhow!("grid flags: {e}"))?;
    let bound = args
        .which_path
        .map(visibility_bound)
        .transpose()
        .map_err(|e| anyhow!("--which-path: {e}"))?;

    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        pattern.write_csv(&mut buf)?;
        emit(Some(path), &buf)?;
    }
    let report = FringeReport {
        command: "fringe",
        tool_version: crate::TOOL_VERSION,
        parameters: json!({
            "model": model.as_str(),
            "idler": idler.as_str(),
            "gamma_deg": args.gamma,
            "geometry": geom,
            "points": args.points,
            "span_m": span,
            "which_path": args.which_path,
            "pattern_path": args.out.as_ref().map(|p| p.display().to_string()),
        }),
        model: model.as_str(),
        idler_outcome: idler.as_str(),
        visibility: v,
        gamma: args.gamma,
        pattern_visibility: pattern.visibility(),
        visibility_bound: bound,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(args.report.as_deref(), text.as_bytes())?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_deg: f64,
    pub analytic_e: f64,
    pub mc_e: f64,
    pub mc_stderr: f64,
}

/// Singlet correlation between z and `n(α, β)` on the given grid; row `j`
/// runs with seed `stream_seed(seed, j)`.
pub fn correlation_sweep(
    alphas_deg: &[f64],
    beta_deg: f64,
    n_trials: u64,
    seed: u64,
    model: MeasurementModel,
) -> crate::Result<Vec<SweepRow>> {
    let s = singlet();
    alphas_deg
        .par_iter()
        .enumerate()
        .map(|(j, &alpha)| {
            let axis_b = Axis::from_degrees(alpha, beta_deg)?;
            let cfg = RunConfig::new(
                stream_seed(seed, j as u64),
                n_trials,
                model,
                Axis::z(),
                axis_b,
            )?;
            let m = correlation_mean(&count_trials(&cfg, &s)?);
            Ok(SweepRow {
                alpha_deg: alpha,
                analytic_e: joint_expectation(&s, Axis::z(), axis_b),
                mc_e: m.value,
                mc_stderr: m.std_error,
            })
        })
        .collect()
}

/// `steps` evenly spaced angles from `min` to `max` inclusive.
pub fn sweep_grid(min: f64, max: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps < 2 {
        bail!("--steps: at least 2 required, got {steps}");
    }
    if min.is_nan() || max.is_nan() || min >= max {
        bail!("--alpha-min/--alpha-max: need alpha_min < alpha_max, got {min} and {max}");
    }
    if min < 0.0 || max > 180.0 {
        bail!("--alpha-min/--alpha-max: polar angles must lie in [0, 180]");
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                max
            } else {
                min + k as f64 * step
            }
        })
        .collect())
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha_deg", "analytic_E", "mc_E", "mc_stderr"])?;
    for r in rows {
        w.write_record([
            format_degrees(r.alpha_deg),
            r.analytic_e.to_string(),
            r.mc_e.to_string(),
            r.mc_stderr.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<Status> {
    let grid = sweep_grid(args.alpha_min, args.alpha_max, args.steps)?;
    if args.trials == 0 {
        bail!("--trials: must be at least 1");
    }
    let model = MeasurementModel::from(args.model);
    let rows = correlation_sweep(&grid, args.beta, args.trials, args.seed, model)?;
    let bytes = match args.format {
        Format::Csv => write_sweep_csv(&rows)?,
        Format::Json => {
            let params = json!({
                "alpha_min_deg": args.alpha_min,
                "alpha_max_deg": args.alpha_max,
                "steps": args.steps,
                "beta_deg": args.beta,
                "trials": args.trials,
                "seed": args.seed,
                "model": model.as_str(),
                "state": "singlet",
            });
            ResultEnvelope::new("sweep", params, &rows)
                .to_json()?
                .into_bytes()
        }
    };
    emit(args.out.as_deref(), &bytes)?;
    let worst = rows
        .iter()
        .map(|r| (r.analytic_e + (r.alpha_deg.to_radians()).cos()).abs())
        .fold(0.0, f64::max);
    if worst > crate::EXACT_TOL {
        return Ok(Status::ValidationFailed(format!(
            "analytic column deviates from -cos(alpha) by {worst}"
        )));
    }
    Ok(Status::Ok)
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    #[test]
    fn correlate_examples() {
        // −cos α at 60°, 0°, 90°
        assert!(
            (correlate_values(Axis::from_degrees(60.0, 0.0).unwrap()).expectation + 0.5).abs()
                < 1e-12
        );
        assert!((correlate_values(Axis::z()).expectation + 1.0).abs() < 1e-12);
        assert!(
            correlate_values(Axis::from_degrees(90.0, 0.0).unwrap())
                .expectation
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn bell_examples() {
        let v = bell_values(
            [0.0, 45.0, 90.0],
            None,
            0,
            MeasurementModel::LocalIndependent,
        )
        .unwrap();
        assert!((v.analytic - 1.414213562).abs() < 1e-9);
        assert_eq!(v.verdict, "violated");
        let flat =
            bell_values([0.0, 0.0, 0.0], None, 0, MeasurementModel::LocalIndependent).unwrap();
        assert!((flat.analytic - 1.0).abs() < 1e-12);
        assert_eq!(flat.verdict, "boundary");
        let wide = bell_values(
            [0.0, 60.0, 120.0],
            None,
            0,
            MeasurementModel::LocalIndependent,
        )
        .unwrap();
        assert!((wide.analytic - 1.5).abs() < 1e-12);
        assert_eq!(wide.verdict, "violated");
    }

    #[test]
    fn sweep_grid_examples() {
        let g = sweep_grid(0.0, 180.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 45.0, 90.0, 135.0, 180.0]);
        assert!(sweep_grid(30.0, 30.0, 3).is_err());
        assert!(sweep_grid(0.0, 90.0, 1).is_err());
        let rows = correlation_sweep(&g, 0.0, 1000, 1, MeasurementModel::LocalIndependent).unwrap();
        let expected = [-1.0, -0.7071067812, 0.0, 0.7071067812, 1.0];
        for (r, e) in rows.iter().zip(expected) {
            assert!((r.analytic_e - e).abs() < 1e-10);
        }
    }

    #[test]
    fn count_table_parsing_names_fields() {
        let ok = r#"{"n_trials":200,"n_a_plus":100,"n_a_minus":100,"n_b_plus":100,"n_b_minus":100,"c_pp":50,"c_pm":50,"c_mp":50,"c_mm":50}"#;
        assert_eq!(parse_count_table(ok).unwrap().n_trials(), 200);
        let missing = r#"{"n_trials":200}"#;
        assert!(parse_count_table(missing)
            .unwrap_err()
            .to_string()
            .contains("n_a_plus"));
        let bad_type = ok.replace("\"c_mp\":50", "\"c_mp\":\"x\"");
        assert!(parse_count_table(&bad_type)
            .unwrap_err()
            .to_string()
            .contains("c_mp"));
        let negative = ok.replace("\"c_mm\":50", "\"c_mm\":-1");
        assert!(parse_count_table(&negative)
            .unwrap_err()
            .to_string()
            .contains("c_mm"));
        let inconsistent = ok.replace("\"n_b_plus\":100", "\"n_b_plus\":99");
        let msg = format!("{:#}", parse_count_table(&inconsistent).unwrap_err());
        assert!(msg.contains("n_b_plus"), "{msg}");
    }

    #[test]
    fn estimate_hand_table() {
        // N_a(+) = 100, N_b(−) = 100, C(+,−) = 50
        let t = CountTable::from_coincidences([50, 50, 0, 50]).unwrap();
        let v = estimate_values(&t).unwrap();
        assert!((v.channels["pm"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
        let empty = CountTable::from_coincidences([10, 0, 0, 0]).unwrap();
        let err = estimate_values(&empty).unwrap_err().to_string();
        assert!(err.contains("(+,-)"), "{err}");
    }

    #[test]
    fn envelope_csv_flattens_nested_values() {
        let env = ResultEnvelope::new("t", json!({"a": {"b": 1}}), json!({"x": [1.5, "s"]}));
        let csv = env.to_csv().unwrap();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("parameters.a.b,1\n"));
        assert!(csv.contains("values.x.0,1.5\n"));
        assert!(csv.contains("values.x.1,s\n"));
        assert!(csv.contains("command,t\n"));
    }
}
