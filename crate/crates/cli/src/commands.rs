use std::path::Path;

use pinsker_core::basis::DesignGrid;
use pinsker_core::lowerbound::ladder;
use pinsker_core::models::sigma_on_grid;
use pinsker_core::risk::{efficiency_curve, gamma_k, mc_risk, oracle_gap, rate, RiskRow};
use pinsker_core::rng::StreamKey;
use pinsker_core::selector::select;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, opt, write_text, Table};

const RISK_HEADER: [&str; 7] = [
    "n",
    "density",
    "estimator",
    "mean",
    "stderr",
    "ratio",
    "gamma",
];

fn risk_row(table: &mut Table, r: &RiskRow) -> CliResult<()> {
    table.row([
        r.n.to_string(),
        r.density.clone(),
        r.estimator.clone(),
        num(r.mean),
        num(r.stderr),
        opt(r.ratio),
        opt(r.gamma),
    ])
}

/// Writes `x,y,s_true,sigma` for one simulated data set.
pub fn simulate(cfg: &ExperimentConfig, n: usize, out: &Path) -> CliResult<()> {
    let spec = cfg.model()?;
    let grid = DesignGrid::new(n)?;
    let profile = spec.profile(&grid);
    let mut rng = StreamKey::new(cfg.seed, &[n as u64]).rng();
    let y = profile.draw(&spec.noise, &mut rng);
    let sigma = sigma_on_grid(&spec, &grid);
    let mut table = Table::create(out, &["x", "y", "s_true", "sigma"])?;
    for l in 0..n {
        table.row([
            num(grid.point(l + 1)),
            num(y[l]),
            num(profile.s[l]),
            num(sigma[l]),
        ])?;
    }
    table.finish()?;
    println!(
        "simulate: n={n} function={} noise={} -> {}",
        spec.function.name(),
        spec.noise.tag(),
        out.display()
    );
    Ok(())
}

fn read_dataset(input: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let fail = |reason: String| CliError::Input {
        path: input.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(input).map_err(|e| fail(e.to_string()))?;
    let header = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if header.len() < 2 || &header[0] != "x" || &header[1] != "y" {
        return Err(fail("header must start with `x,y`".into()));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        let field = |c: usize, name: &str| -> CliResult<f64> {
            rec.get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(format!("row {}: `{name}` is not a finite number", i + 1)))
        };
        xs.push(field(0, "x")?);
        ys.push(field(1, "y")?);
    }
    let n = xs.len();
    if n == 0 {
        return Err(fail("no data rows".into()));
    }
    if n < 3 || n % 2 == 0 {
        return Err(fail(format!(
            "{n} rows; the design needs an odd count of at least 3"
        )));
    }
    if let Some(i) = (0..n).find(|&i| (xs[i] - (i + 1) as f64 / n as f64).abs() > 1e-9) {
        return Err(fail(format!(
            "row {}: x = {} is not on the grid l/n (expected {})",
            i + 1,
            xs[i],
            (i + 1) as f64 / n as f64
        )));
    }
    Ok((xs, ys))
}

/// Fits the adaptive estimator to an `x,y` file.
pub fn estimate(cfg: &ExperimentConfig, input: &Path, out: &Path) -> CliResult<()> {
    let (xs, ys) = read_dataset(input)?;
    let grid = DesignGrid::new(xs.len())?;
    let (sel, est) = select(&ys, &grid, cfg.gamma)?;
    let mut table = Table::create(out, &["x", "y", "fitted"])?;
    for ((x, y), f) in xs.iter().zip(&ys).zip(&est.fitted) {
        table.row([num(*x), num(*y), num(*f)])?;
    }
    table.finish()?;
    let summary = format!(
        "n = {}\nbeta = {}\nt = {}\nomega = {}\nzeta_hat = {}\nrho = {}\ncost = {}\n",
        grid.n(),
        sel.chosen.beta,
        num(sel.chosen.t()),
        num(est.weight.omega()),
        num(sel.zeta_hat),
        num(sel.rho),
        num(sel.cost),
    );
    let mut side = out.as_os_str().to_owned();
    side.push(".summary");
    write_text(Path::new(&side), &summary)?;
    println!(
        "estimate: n={} chose beta={} t={:.6} (omega {:.3}, cost {:.6e})",
        grid.n(),
        sel.chosen.beta,
        sel.chosen.t(),
        est.weight.omega(),
        sel.cost
    );
    Ok(())
}

/// Monte Carlo risk of each configured estimator at each `n`.
pub fn risk(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let spec = cfg.model()?;
    let noise = cfg.noise_family()?;
    let mut table = Table::create(out, &RISK_HEADER)?;
    for &n in &cfg.ns {
        let mut parts = Vec::new();
        for &choice in &cfg.estimators {
            let report = mc_risk(&cfg.estimator(choice), &spec, &noise, n, cfg.reps, cfg.seed)?;
            for r in report.rows(None, None) {
                risk_row(&mut table, &r)?;
            }
            parts.push(format!(
                "{choice} {:.6e} (se {:.2e})",
                report.risk,
                report.worst().stderr
            ));
        }
        println!("risk: n={n} {}", parts.join(", "));
    }
    table.finish()
}

/// Normalized risk `n^{2k/(2k+1)} R / γ_k(S)` across `n`.
pub fn efficiency(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let spec = cfg.model()?;
    let noise = cfg.noise_family()?;
    let gamma = gamma_k(&spec.ball, spec.varsigma())?;
    let curves = cfg
        .estimators
        .iter()
        .map(|&c| {
            efficiency_curve(
                &cfg.estimator(c),
                &spec,
                &noise,
                &cfg.ns,
                cfg.reps,
                cfg.seed,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::create(out, &RISK_HEADER)?;
    for (i, &n) in cfg.ns.iter().enumerate() {
        let scale = rate(n, spec.ball.k) / gamma;
        let mut parts = Vec::new();
        for (curve, choice) in curves.iter().zip(&cfg.estimators) {
            let rec = &curve[i];
            for r in rec.report.rows(Some(scale), Some(gamma)) {
                risk_row(&mut table, &r)?;
            }
            parts.push(format!(
                "{choice} ratio {:.4} (se {:.4})",
                rec.ratio, rec.stderr
            ));
        }
        println!("efficiency: n={n} gamma={gamma:.6} {}", parts.join(", "));
    }
    table.finish()
}

/// Selector risk against every member of the weight family.
pub fn oracle(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let spec = cfg.model()?;
    let noise = cfg.noise_family()?;
    let mut table = Table::create(out, &["n", "estimator", "beta", "t", "risk", "stderr"])?;
    for &n in &cfg.ns {
        let gap = oracle_gap(&spec, &noise, n, cfg.reps, cfg.seed, cfg.gamma)?;
        table.row([
            n.to_string(),
            "selector".into(),
            String::new(),
            String::new(),
            num(gap.selector.risk),
            num(gap.selector.worst().stderr),
        ])?;
        for c in &gap.candidates {
            let worst =
                c.per_density.iter().fold(
                    &c.per_density[0],
                    |a, d| if d.mean > a.mean { d } else { a },
                );
            table.row([
                n.to_string(),
                "candidate".into(),
                c.index.beta.to_string(),
                num(c.index.t()),
                num(c.risk),
                num(worst.stderr),
            ])?;
        }
        println!(
            "oracle-gap: n={n} selector {:.6e} best candidate {:.6e} ratio {:.4} (1+kappa = {:.4}, {} candidates)",
            gap.selector.risk,
            gap.best_candidate_risk,
            gap.ratio,
            1.0 + gap.kappa,
            gap.candidates.len()
        );
    }
    table.finish()
}

/// Lower-bound lab ladder as `n,quantity,value`.
pub fn lowerbound(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let rows = ladder(&cfg.ladder()?)?;
    let mut table = Table::create(out, &["n", "quantity", "value"])?;
    for r in &rows {
        table.row([r.n.to_string(), r.quantity.to_string(), num(r.value)])?;
    }
    table.finish()?;
    for &n in &cfg.lb_ns {
        let get = |q: &str| {
            rows.iter()
                .find(|r| r.n == n && r.quantity == q)
                .map(|r| r.value)
        };
        println!(
            "lowerbound: n={n} normalized bound {:.4} (tau form {:.4}), A3 {}",
            get("normalized_bound").unwrap_or(f64::NAN),
            get("tau_normalized").unwrap_or(f64::NAN),
            if get("a3_pass") == Some(1.0) {
                "holds"
            } else {
                "fails"
            },
        );
    }
    Ok(())
}
