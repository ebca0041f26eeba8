//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails.

use std::f64::consts::SQRT_2;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bellsim::cli::{bell_monte_carlo, correlation_sweep};
use bellsim::measurement::{
    chi_square_homogeneity, coincidence_estimate, count_trials, model_total_variation,
    replica_agreement, rng::stream_seed, MeasurementModel, RunConfig,
};
use bellsim::pair::{
    bell_quantity, density_product_expectation, expand_in_bases, joint_expectation,
    joint_probabilities, reduce, sign_weighted_overlap_sum, singlet, BellAxes, JointOutcome,
    Particle, TwoQubitState,
};
use bellsim::photon::{
    predicted_signal_angular_momentum, signal_amplitudes_after_idler, tem01_state, visibility,
    visibility_bound, Circular, Slit,
};
use bellsim::spin::{theta_axis, Axis, Operator2};
use bellsim::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const ALPHAS: [f64; 7] = [0.0, 30.0, 45.0, 60.0, 90.0, 120.0, 180.0];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> Axis {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if let Ok(a) = Axis::from_vector(v) {
            return a;
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    let amps = std::array::from_fn(|_| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    TwoQubitState::normalized(amps).unwrap()
}

fn models() -> [MeasurementModel; 2] {
    MeasurementModel::BOTH
}

fn singlet_correlation() -> Outcome {
    let s = singlet();
    let worst_analytic = ALPHAS
        .iter()
        .map(|&a| {
            let e = joint_expectation(&s, Axis::z(), Axis::from_degrees(a, 0.0).unwrap());
            (e + a.to_radians().cos()).abs()
        })
        .fold(0.0, f64::max);
    let n = 100_000u64;
    let bound = 5.0 / (n as f64).sqrt();
    let mut worst_mc: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for (k, model) in models().into_iter().enumerate() {
        let start = Instant::now();
        let rows = correlation_sweep(&ALPHAS, 0.0, n, 100 + k as u64, model).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        for r in rows {
            worst_mc = worst_mc.max((r.mc_e + r.alpha_deg.to_radians().cos()).abs());
        }
    }
    outcome(
        worst_analytic <= 1e-12 && worst_mc <= bound && slowest < 5.0,
        format!("analytic err {worst_analytic:.1e} (<=1e-12), MC err {worst_mc:.4} (<={bound:.4}), slowest sweep {slowest:.2}s (<5s)"),
    )
}

fn bell_violation() -> Outcome {
    let s = singlet();
    let axes = BellAxes::coplanar_degrees([0.0, 45.0, 90.0]).unwrap();
    let analytic = bell_quantity(&s, &axes);
    let mut pass = (analytic - SQRT_2).abs() <= 1e-9;
    let mut detail = format!("analytic {analytic:.12}");
    for (k, model) in models().into_iter().enumerate() {
        let mc = bell_monte_carlo(&s, &axes, 1_000_000, 7 + k as u64, model).unwrap();
        pass &= (mc.value - SQRT_2).abs() <= 0.01 && mc.value > 1.0;
        detail.push_str(&format!(", {} MC {:.5}", model, mc.value));
    }
    outcome(pass, detail)
}

fn locality_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let worst_tv = (0..100)
        .map(|_| {
            let state = random_state(&mut rng);
            model_total_variation(&state, random_axis(&mut rng), random_axis(&mut rng))
        })
        .fold(0.0, f64::max);

    let s = singlet();
    let a = Axis::z();
    let b = Axis::from_degrees(60.0, 0.0).unwrap();
    let mut passing = 0;
    for rep in 0..100u64 {
        let tables = models().map(|m| {
            let seed = stream_seed(
                0xACCE,
                2 * rep + (m == MeasurementModel::NonlocalCollapse) as u64,
            );
            count_trials(&RunConfig::new(seed, 100_000, m, a, b).unwrap(), &s).unwrap()
        });
        if chi_square_homogeneity(&tables[0], &tables[1]).p_value > 0.001 {
            passing += 1;
        }
    }
    outcome(
        worst_tv <= 1e-12 && passing >= 99,
        format!("max TV {worst_tv:.1e} (<=1e-12), chi-square p>0.001 in {passing}/100 (>=99)"),
    )
}

fn density_operator() -> Outcome {
    let rho = reduce(&singlet(), Particle::A);
    let half = Operator2::identity().scale(Complex::new(0.5, 0.0));
    let reduced_err = rho.max_abs_diff(&half);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n1 = random_axis(&mut rng);
        let n2 = random_axis(&mut rng);
        let t = density_product_expectation(&rho, n1, n2);
        let overlap = sign_weighted_overlap_sum(n1, n2);
        worst = worst
            .max((t.value - n1.dot(&n2)).abs())
            .max((t.value - overlap).abs())
            .max(t.imaginary.abs());
    }
    outcome(
        reduced_err <= 1e-12 && worst <= 1e-12,
        format!("reduced-state err {reduced_err:.1e}, max trace/overlap err {worst:.1e} over 200 pairs (<=1e-12)"),
    )
}

fn estimator() -> Outcome {
    let s = singlet();
    let mut worst_sigma: f64 = 0.0;
    let mut replica_ok = 0;
    let mut runs = 0;
    for (k, model) in models().into_iter().enumerate() {
        for (j, &alpha) in ALPHAS.iter().enumerate() {
            let half = (alpha.to_radians() / 2.0).cos().powi(2);
            let seed = stream_seed(500 + k as u64, j as u64);
            let cfg = RunConfig::new(
                seed,
                100_000,
                model,
                Axis::z(),
                Axis::from_degrees(alpha, 0.0).unwrap(),
            )
            .unwrap();
            let table = count_trials(&cfg, &s).unwrap();
            for o in JointOutcome::ALL {
                let expected = if o.a == o.b { 1.0 - half } else { half };
                let e = coincidence_estimate(&table, o.a, o.b).unwrap();
                let dev = (e.value - expected).abs();
                let sigmas = if e.std_error > 0.0 {
                    dev / e.std_error
                } else if dev <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst_sigma = worst_sigma.max(sigmas);
            }
            runs += 1;
            if replica_agreement(&table).unwrap().agrees {
                replica_ok += 1;
            }
        }
    }
    outcome(
        worst_sigma <= 4.0 && replica_ok == runs,
        format!("max channel deviation {worst_sigma:.2} sigma (<=4), replica agrees in {replica_ok}/{runs}"),
    )
}

/// Rodrigues rotation of `v` about the unit vector `k` by `angle`.
fn rotate(v: [f64; 3], k: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    let cross = [
        k[1] * v[2] - k[2] * v[1],
        k[2] * v[0] - k[0] * v[2],
        k[0] * v[1] - k[1] * v[0],
    ];
    std::array::from_fn(|i| v[i] * c + cross[i] * s + k[i] * kv * (1.0 - c))
}

fn rotational_invariance() -> Outcome {
    let s = singlet();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst_anti: f64 = 0.0;
    let mut worst_corr: f64 = 0.0;
    for _ in 0..100 {
        let n = random_axis(&mut rng);
        let d = expand_in_bases(&s, n, n);
        let p = joint_probabilities(&s, n, n).probs();
        for o in JointOutcome::ALL {
            let k = o.index();
            if o.a == o.b {
                worst_corr = worst_corr.max(d[k].norm_sqr()).max(p[k]);
            } else {
                worst_anti = worst_anti
                    .max((d[k].norm_sqr() - 0.5).abs())
                    .max((p[k] - 0.5).abs());
            }
        }
    }

    // Bell quantity and correlations under a common rotation of all axes
    let base = [0.0f64, 45.0, 90.0].map(|d| theta_axis(d.to_radians()).unwrap());
    let reference = bell_quantity(&s, &BellAxes::new(base[0], base[1], base[2]));
    let mut worst_rot: f64 = 0.0;
    for _ in 0..100 {
        let k = random_axis(&mut rng).unit_vector();
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let rotated = base.map(|a| Axis::from_vector(rotate(a.unit_vector(), k, angle)).unwrap());
        let b = bell_quantity(&s, &BellAxes::new(rotated[0], rotated[1], rotated[2]));
        worst_rot = worst_rot.max((b - reference).abs());
        for (i, j) in BellAxes::PAIRS {
            let e = joint_expectation(&s, rotated[i], rotated[j]);
            worst_rot = worst_rot.max((e + rotated[i].dot(&rotated[j])).abs());
        }
    }
    outcome(
        worst_anti <= 1e-12 && worst_corr <= 1e-12 && worst_rot <= 1e-12,
        format!(
            "same-axis anticorrelated |p-1/2| {worst_anti:.1e}, correlated p {worst_corr:.1e} over 100 axes (<=1e-12); rotated Bell/correlation err {worst_rot:.1e}"
        ),
    )
}

fn photon_predictions() -> Outcome {
    let mut worst_v: f64 = 0.0;
    for gamma_deg in [0.0, 37.0, 90.0, 180.0, 289.0] {
        let pair = tem01_state(f64::to_radians(gamma_deg));
        for idler in [Slit::Upper, Slit::Lower] {
            let local = visibility(&signal_amplitudes_after_idler(
                &pair,
                idler,
                MeasurementModel::LocalIndependent,
            ))
            .unwrap();
            let collapse = visibility(&signal_amplitudes_after_idler(
                &pair,
                idler,
                MeasurementModel::NonlocalCollapse,
            ))
            .unwrap();
            worst_v = worst_v.max((local - 1.0).abs()).max(collapse.abs());
        }
    }
    let bound = visibility_bound(0.99).unwrap();
    let collapse_l =
        predicted_signal_angular_momentum(Circular::Left, MeasurementModel::NonlocalCollapse).mean;
    let collapse_r =
        predicted_signal_angular_momentum(Circular::Right, MeasurementModel::NonlocalCollapse).mean;
    let local_l =
        predicted_signal_angular_momentum(Circular::Left, MeasurementModel::LocalIndependent).mean;
    let am_ok = (collapse_l - 1.0).abs() <= 1e-12
        && (collapse_r + 1.0).abs() <= 1e-12
        && local_l.abs() <= 1e-12;
    outcome(
        worst_v <= 1e-9 && (bound - 0.01).abs() <= 1e-12 && am_ok,
        format!(
            "visibility err {worst_v:.1e} (<=1e-9), bound(0.99) {bound:.6}, L_signal collapse {collapse_l:+.3}/{collapse_r:+.3} local {local_l:+.3}"
        ),
    )
}

fn simulate_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.csv"));
        let counts = dir.path().join(format!("{tag}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_bellsim"))
            .args([
                "simulate",
                "--alpha-b",
                "60",
                "--trials",
                "20000",
                "--seed",
                "42",
                "--model",
                "collapse",
            ])
            .arg("--out")
            .arg(&out)
            .arg("--counts")
            .arg(&counts)
            .output()
            .unwrap();
        assert!(status.status.success());
        (
            std::fs::read(out).unwrap(),
            std::fs::read(counts).unwrap(),
            status.stdout,
        )
    };
    let (csv1, json1, stdout1) = run("first");
    let (csv2, json2, stdout2) = run("second");
    let summaries_match = String::from_utf8_lossy(&stdout1).replace("first", "second")
        == String::from_utf8_lossy(&stdout2);
    let pass = csv1 == csv2 && json1 == json2.as_slice() && summaries_match && !csv1.is_empty();
    outcome(
        pass,
        format!(
            "trial CSV {} bytes identical: {}, count JSON identical: {}",
            csv1.len(),
            csv1 == csv2,
            json1 == json2
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 singlet correlation", singlet_correlation),
        ("2 bell violation", bell_violation),
        ("3 locality-loophole equivalence", locality_equivalence),
        ("4 density operator", density_operator),
        ("5 coincidence estimator", estimator),
        ("6 rotational invariance", rotational_invariance),
        ("7 photon predictions", photon_predictions),
        ("8 simulate determinism", simulate_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
