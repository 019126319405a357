//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use pinsker_core::basis::{empirical_inner, fourier_transform, phi, DesignGrid, SobolevBall};
use pinsker_core::lowerbound::{
    bayes_lower_bound, bound_components, budget_used, build_design, conditions_check,
    design_constants, minimal_budget, van_trees_bound, waterfill, waterfill_numeric,
    waterfill_value, KernelProfile, NRule, PriorSampling,
};
use pinsker_core::models::{
    LibraryFunction, ModelSpec, NoiseDensity, NoiseFamily, RegressionFunction, ScaleFamily,
};
use pinsker_core::risk::{efficiency_curve, gamma_k, gamma_star, oracle_gap, Estimator};
use pinsker_core::rng::StreamKey;
use pinsker_core::selector::{kappa, rho};
use pinsker_core::weights::a_beta;

const SEED: u64 = 20240601;

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

fn basis_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [25, 51, 101] {
        let grid = DesignGrid::new(n).unwrap();
        let samples: Vec<Vec<f64>> = (1..=n).map(|j| grid.sample_basis(j).unwrap()).collect();
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                let v = empirical_inner(&samples[i], &samples[j], &grid).unwrap();
                worst = worst.max((v - delta).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max deviation {worst:.2e}"))
}

fn coefficient_bounds() -> Outcome {
    let r = 2.0;
    let ball = SobolevBall::new(1, r).unwrap();
    let mut violations = 0usize;
    let mut checks = 0usize;
    for lib in LibraryFunction::ALL {
        let f = lib.build(&ball, 1.0).unwrap();
        let RegressionFunction::Trig { poly, .. } = &f else {
            unreachable!()
        };
        let exact = poly.basis_coefficients(501);
        for n in [25, 101, 501] {
            let grid = DesignGrid::new(n).unwrap();
            let theta = fourier_transform(&grid.sample(|x| f.eval(x)), &grid).unwrap();
            for j in 1..=n {
                checks += 1;
                let bound = 2.0 * std::f64::consts::PI * r.sqrt() * j as f64 / n as f64;
                violations += ((theta.get(j) - exact[j - 1]).abs() > bound) as usize;
            }
            let mut tail: f64 = theta.values()[1..].iter().map(|t| t * t).sum();
            for m in 1..n {
                checks += 1;
                violations += ((m * m) as f64 * tail > 4.0 * r) as usize;
                tail -= theta.get(m + 1).powi(2);
            }
        }
    }
    for i in 0..1000 {
        let x = i as f64 / 999.0;
        let mut sums = [0.0f64; 3];
        for big_n in 2..=200usize {
            let bar = phi(big_n, x).unwrap().powi(2) - 1.0;
            for (m, s) in sums.iter_mut().enumerate() {
                let w = (big_n as f64).powi(m as i32);
                *s += w * bar;
                checks += 1;
                violations += (s.abs() > 2f64.powi(m as i32) * w + 1e-9) as usize;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in {checks} checks"),
    )
}

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut check =
        |got: f64, want: f64| worst = worst.max((got - want).abs() / want.abs().max(1.0));
    let a = [
        0.607_927_101_854_026_7,
        0.076_994_866_910_132_52,
        0.009_708_173_750_761_289,
        0.001_185_641_906_101_803_7,
        0.000_140_953_285_794_572_26,
    ];
    for (b, want) in a.iter().enumerate() {
        check(a_beta(b as u32 + 1).unwrap(), *want);
    }
    for (r, want) in [
        (0.01, 0.061_649_484_536_082_474),
        (0.1, 0.828_571_428_571_428_6),
        (0.3, 16.2),
    ] {
        check(kappa(r).unwrap(), want);
    }
    let g_star = [
        0.423_565_428_818_709_7,
        0.399_209_709_406_821_1,
        0.386_820_501_333_915_3,
    ];
    let g_k = [
        0.760_145_015_662_008_5,
        0.701_077_826_697_191_9,
        0.673_040_836_142_941_4,
    ];
    for k in 1..=3u32 {
        check(gamma_star(k).unwrap(), g_star[k as usize - 1]);
        let ball = SobolevBall::new(k, 2.0).unwrap();
        check(gamma_k(&ball, 1.7).unwrap(), g_k[k as usize - 1]);
    }
    let (c, v, h) = design_constants(1, 1.0, 0.5, 1.0);
    check(c, 0.405_284_734_569_351_1);
    check(v, 0.411_233_516_712_056_6);
    check(h, 0.743_640_158_150_237_2);
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e}"))
}

fn gq_spec(function: LibraryFunction) -> ModelSpec {
    let ball = SobolevBall::new(1, 5.0).unwrap();
    let f = function.build(&ball, 1.0).unwrap();
    let scale = ScaleFamily::goldfeld_quandt(1.0, 1.0, 0.5).unwrap();
    ModelSpec::new(f, scale, NoiseDensity::Gaussian, ball).unwrap()
}

fn oracle_surrogate() -> Outcome {
    let n = 101;
    let gap = oracle_gap(
        &gq_spec(LibraryFunction::S1),
        &NoiseFamily::standard(),
        n,
        500,
        SEED,
        2.0,
    )
    .unwrap();
    let bound = 1.5 * gap.best_candidate_risk + 10.0 / n as f64;
    let k = kappa(rho(n, 2.0).unwrap()).unwrap();
    outcome(
        gap.selector_risk() <= bound,
        format!(
            "selector {:.4e} <= {:.4e} (ratio {:.3}, 1+kappa {:.3})",
            gap.selector_risk(),
            bound,
            gap.ratio,
            1.0 + k
        ),
    )
}

fn efficiency_trend() -> Outcome {
    let spec = gq_spec(LibraryFunction::S2);
    let recs = efficiency_curve(
        &Estimator::Adaptive { gamma: 2.0 },
        &spec,
        &NoiseFamily::standard(),
        &[101, 301, 1001],
        200,
        SEED,
    )
    .unwrap();
    let finite = recs
        .iter()
        .all(|r| r.ratio.is_finite() && r.stderr.is_finite());
    let trend = recs.windows(2).all(|w| {
        w[1].ratio <= w[0].ratio + 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt()
    });
    let last = recs[2].ratio;
    let shown: Vec<String> = recs
        .iter()
        .map(|r| format!("{:.3}±{:.3}", r.ratio, r.stderr))
        .collect();
    outcome(
        finite && trend && (0.3..=1.5).contains(&last),
        format!("ratios {}", shown.join(", ")),
    )
}

fn waterfilling() -> Outcome {
    let mut rng = StreamKey::new(SEED, &[6]).rng();
    let (mut gap, mut slack): (f64, f64) = (0.0, 0.0);
    for big_n in 1..=10 {
        for k in 1..=2u32 {
            for _ in 0..5 {
                let budget = minimal_budget(big_n, k) * (1.0 + rng.random_range(0.0..4.0))
                    + rng.random_range(0.0..10.0);
                let y = waterfill(big_n, k, budget).unwrap();
                let num = waterfill_numeric(big_n, k, budget);
                gap = gap.max(
                    y.iter()
                        .zip(&num)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                );
                slack = slack.max((budget_used(&y, k) - budget).abs() / budget.max(1.0));
            }
        }
    }
    let worked = waterfill(2, 1, 7.0).unwrap();
    let exact = worked == vec![3.0, 1.0] && waterfill_value(2, 1, 7.0) == 1.25;
    outcome(
        gap <= 1e-6 && slack <= 1e-9 && exact,
        format!("closed vs numeric {gap:.1e}, constraint {slack:.1e}, (2,1,7) -> {worked:?}"),
    )
}

fn van_trees() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1usize, 10, 100, 1000, 10000] {
        for (sigma, t) in [(0.5, 1.0), (1.0, 0.1), (2.0, 3.0), (0.1, 0.01)] {
            let nf = n as f64;
            let exact = 1.0 / (nf / (sigma * sigma) + 1.0 / (t * t));
            let got = van_trees_bound(1.0, nf / (sigma * sigma), 0.0, 1.0 / (t * t)).unwrap();
            worst = worst.max((got - exact).abs());
        }
    }
    outcome(worst <= 1e-8, format!("20 cases, max error {worst:.1e}"))
}

fn lower_bound_lab() -> Outcome {
    let unit = ScaleFamily::constant(1.0).unwrap();
    let profile = KernelProfile::new(0.05).unwrap();
    let key = StreamKey::new(SEED, &[8]);
    let mut notes = Vec::new();
    let mut a3 = true;
    for n in [1_000, 10_000, 100_000] {
        let d = build_design(1, 1.0, 0.1, n, &NRule::desk(), &unit).unwrap();
        let c = conditions_check(&d, 0.5);
        a3 &= (c.a3_sum / c.a3_target - 1.0).abs() <= 0.01;
    }
    notes.push(format!("(a) {}", if a3 { "ok" } else { "off" }));

    let d4 = build_design(1, 1.0, 0.1, 10_000, &NRule::desk(), &unit).unwrap();
    let c4 = bound_components(&d4, &profile, &unit, 200, PriorSampling::Gaussian, key).unwrap();
    let dev = c4.f_ratio_deviation(&d4);
    notes.push(format!("(b) {dev:.1e}"));

    let x_only = ScaleFamily::goldfeld_quandt(1.0, 1.0, 0.0).unwrap();
    let dx = build_design(1, 1.0, 0.1, 10_000, &NRule::desk(), &x_only).unwrap();
    let cx = bound_components(&dx, &profile, &x_only, 200, PriorSampling::Gaussian, key).unwrap();
    let b_zero = c4.b.iter().chain(&cx.b).flatten().all(|b| *b == 0.0);
    notes.push(format!("(c) {}", if b_zero { "B = 0" } else { "B != 0" }));

    let mut range = true;
    let mut vals = Vec::new();
    for n in [10_000, 100_000] {
        let d = build_design(1, 1.0, 0.1, n, &NRule::desk(), &unit).unwrap();
        let c = bound_components(&d, &profile, &unit, 200, PriorSampling::Gaussian, key).unwrap();
        let lb = bayes_lower_bound(&d, &c).unwrap();
        range &= (0.5..=1.0).contains(&lb.normalized);
        vals.push(format!("{:.3}", lb.normalized));
    }
    notes.push(format!("(d) {}", vals.join(", ")));
    outcome(a3 && dev <= 0.02 && b_zero && range, notes.join("; "))
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pinsker"))
        .args(args)
        .current_dir(dir)
        .env("PINSKER_THREADS", threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "\
run.ns = 101, 301
run.reps = 40
run.seed = 77
run.estimators = adaptive, reference
lowerbound.ns = 1000, 10000
lowerbound.draws = 24
";
    std::fs::write(dir.path().join("exp.cfg"), cfg).unwrap();
    run_cli(
        dir.path(),
        2,
        &["simulate", "--config", "exp.cfg", "--out", "data.csv"],
    )
    .unwrap();
    let commands: [(&str, &[&str]); 6] = [
        ("simulate", &["simulate", "--config", "exp.cfg"]),
        ("estimate", &["estimate", "data.csv", "--config", "exp.cfg"]),
        ("risk", &["risk", "--config", "exp.cfg"]),
        ("efficiency", &["efficiency", "--config", "exp.cfg"]),
        ("oracle-gap", &["oracle-gap", "--config", "exp.cfg"]),
        ("lowerbound", &["lowerbound", "--config", "exp.cfg"]),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in commands {
        let mut outputs = Vec::new();
        for (run, threads) in [1usize, 4, 4].into_iter().enumerate() {
            let out = format!("{name}-{run}.csv");
            let mut full = args.to_vec();
            full.extend(["--out", out.as_str()]);
            if let Err(e) = run_cli(dir.path(), threads, &full) {
                return outcome(false, e);
            }
            let mut bytes = std::fs::read(dir.path().join(&out)).unwrap();
            if let Ok(side) = std::fs::read(dir.path().join(format!("{out}.summary"))) {
                bytes.extend(side);
            }
            outputs.push(bytes);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "6 commands x 3 runs (1, 4, 4 workers) byte-identical".to_string()
        } else {
            format!("differs: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        (
            "basis exactness",
            basis_exactness,
            Some(Duration::from_secs(5)),
        ),
        (
            "coefficient bound suite",
            coefficient_bounds,
            Some(Duration::from_secs(30)),
        ),
        ("closed-form constants", closed_forms, None),
        (
            "oracle-gap surrogate",
            oracle_surrogate,
            Some(Duration::from_secs(300)),
        ),
        (
            "efficiency trend",
            efficiency_trend,
            Some(Duration::from_secs(600)),
        ),
        ("water-filling", waterfilling, None),
        ("van Trees sanity", van_trees, None),
        (
            "lower-bound lab ladders",
            lower_bound_lab,
            Some(Duration::from_secs(600)),
        ),
        ("CLI determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = result.pass && in_time;
        failed += !pass as usize;
        println!(
            "criterion {}: {} {name}: {} [{:.2}s{}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            took.as_secs_f64(),
            if in_time { "" } else { ", over time limit" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
