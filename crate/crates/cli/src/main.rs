use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use tsfe_core::bernstein::{BernsteinFunction, BernsteinKind};
use tsfe_core::grid::{write_csv_slice, write_field, SpaceTimeGrid};
use tsfe_core::harness::{self, record_fixtures, ExperimentConfig, ProblemConfig, SuiteId};
use tsfe_core::kernel::{kernel_fourier, kernel_subordination, pointwise_bound_study, verify_l1_bound, KernelRoute};
use tsfe_core::specfun::{mittag_leffler, mittag_leffler_real, Accuracy, MlQuery};

#[derive(Parser)]
#[command(name = "tsfe", version, about = "Time-space fractional equation toolkit")]
struct Cli {
    /// JSON configuration file (solve, verify).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for reports and fields.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mittag-Leffler evaluation.
    Ml {
        #[command(subcommand)]
        op: MlOp,
    },
    /// Bernstein-function diagnostics.
    Bernstein {
        #[command(subcommand)]
        op: BernsteinOp,
    },
    /// Fundamental-solution kernels.
    Kernel {
        #[command(subcommand)]
        op: KernelOp,
    },
    /// Solve the equation for the problem in `--config`.
    Solve,
    /// Run a verification suite; exits with 1 when an assertion fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Baseline to compare measured constants against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Write the baseline when it does not exist.
        #[arg(long)]
        init: bool,
    },
    /// Check (or with `--init` record) every baseline under a fixtures directory.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
        #[arg(long)]
        init: bool,
        /// Only the fixture with this name.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Subcommand)]
enum MlOp {
    /// Prints `E_{alpha,beta}(re + i im)`, one value per line.
    Eval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        re: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
    },
}

#[derive(Subcommand)]
enum BernsteinOp {
    /// Lower scaling exponent estimate as JSON.
    Report {
        #[arg(long, value_enum)]
        kind: PhiKind,
        #[arg(long)]
        beta: Option<f64>,
        /// `x_min,x_max`.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1e-3, 1e6])]
        range: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

#[derive(Args, Clone)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "linear")]
    phi: PhiKind,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: f64,
    /// `alpha`, `1` or `1 + alpha`; defaults to 1.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long = "L", default_value_t = 20.0)]
    l: f64,
    #[arg(long, value_enum, default_value = "fourier")]
    route: Route,
}

#[derive(Subcommand)]
enum KernelOp {
    /// Writes the kernel field and prints its summary.
    Build(KernelArgs),
    /// Prints pointwise and L1 bound reports; exits with 1 on a growth violation.
    Verify(KernelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiKind {
    Linear,
    Power,
    PowerLog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Fourier,
    Subordination,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Specfun,
    Kernel,
    Oscillation,
    Sharp,
    Theorem1,
}

impl From<Suite> for SuiteId {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Specfun => SuiteId::Specfun,
            Suite::Kernel => SuiteId::Kernel,
            Suite::Oscillation => SuiteId::Oscillation,
            Suite::Sharp => SuiteId::Sharp,
            Suite::Theorem1 => SuiteId::Theorem1,
        }
    }
}

fn bernstein(kind: PhiKind, beta: Option<f64>) -> Result<BernsteinFunction> {
    let need = || beta.ok_or_else(|| anyhow!("--beta is required for this --phi/--kind"));
    let kind = match kind {
        PhiKind::Linear => BernsteinKind::Linear,
        PhiKind::Power => BernsteinKind::Power { beta: need()? },
        PhiKind::PowerLog => BernsteinKind::PowerLog { beta: need()? },
    };
    Ok(BernsteinFunction::new(kind)?)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn ml_eval(alpha: f64, beta: f64, re: &[f64], im: f64) -> Result<()> {
    let acc = Accuracy::default();
    for &x in re {
        if im == 0.0 {
            println!("{:.16e}", mittag_leffler_real(alpha, beta, x, &acc)?);
            continue;
        }
        let v = mittag_leffler(&MlQuery::new(alpha, beta, Complex64::new(x, im)), &acc)?;
        if v.im == 0.0 {
            println!("{:.16e}", v.re);
        } else {
            println!("{:.16e}{:+.16e}i", v.re, v.im);
        }
    }
    Ok(())
}

fn kernel_cmd(op: &KernelOp, out_dir: &Path) -> Result<bool> {
    let (KernelOp::Build(a) | KernelOp::Verify(a)) = op;
    let phi = bernstein(a.phi, a.beta)?;
    let gamma = a.gamma.unwrap_or(1.0);
    let grid = SpaceTimeGrid::new(1, a.n, a.l, 1, a.t)?;
    match op {
        KernelOp::Build(_) => {
            let sample = match a.route {
                Route::Fourier => kernel_fourier(&phi, a.alpha, gamma, a.t, &grid)?,
                Route::Subordination => {
                    if (gamma - a.alpha).abs() > 1e-12 {
                        bail!("the subordination route builds the gamma = alpha kernel; pass --gamma {}", a.alpha);
                    }
                    kernel_subordination(&phi, a.alpha, a.t, &grid)?
                }
            };
            std::fs::create_dir_all(out_dir)?;
            let route = if sample.route == KernelRoute::Fourier { "fourier" } else { "subordination" };
            let stem = out_dir.join(format!("kernel_{route}"));
            let (bin, json) = write_field(&sample.field, &stem)?;
            let csv = stem.with_extension("csv");
            write_csv_slice(&sample.field, &csv)?;
            print_json(&serde_json::json!({
                "phi": phi.kind().label(),
                "alpha": a.alpha,
                "gamma": gamma,
                "t": a.t,
                "route": route,
                "mass": sample.mass(),
                "l1_norm": sample.l1_norm(),
                "symbol_at_zero": sample.symbol_at_zero(),
                "alias_warning": sample.alias_warning,
                "files": [bin, json, csv],
            }))?;
            Ok(true)
        }
        KernelOp::Verify(_) => {
            let k0 = pointwise_bound_study(&phi, a.alpha, gamma, a.t, &grid, 0)?;
            let k1 = pointwise_bound_study(&phi, a.alpha, gamma, a.t, &grid, 1)?;
            let times: Vec<f64> = [0.01, 0.1, 1.0, 10.0].iter().map(|s| s * a.t).collect();
            let l1 = verify_l1_bound(&phi, a.alpha, gamma, &times, &grid)?;
            let (lo, hi) = harness::suites::KERNEL_GROWTH_BAND;
            let ok = [&k0, &k1, &l1].iter().all(|r| r.refinement_growth.is_some_and(|g| g >= lo && g <= hi));
            print_json(&serde_json::json!({ "pointwise_k0": k0, "pointwise_k1": k1, "l1": l1, "pass": ok }))?;
            Ok(ok)
        }
    }
}

fn solve_cmd(config: Option<&Path>, out_dir: &Path) -> Result<()> {
    let path = config.ok_or_else(|| anyhow!("solve needs --config <problem.json>"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem = ProblemConfig::from_json(&text).with_context(|| path.display().to_string())?;
    let (w, summary) = problem.solve()?;
    std::fs::create_dir_all(out_dir)?;
    let (bin, json) = write_field(&w, &out_dir.join("solution"))?;
    let mut files = vec![bin, json];
    if w.grid.d == 1 {
        let csv = out_dir.join("solution_final.csv");
        write_csv_slice(&w.time_slice(w.grid.n_time), &csv)?;
        files.push(csv);
    }
    let report = out_dir.join("solve_report.json");
    std::fs::write(&report, serde_json::to_string_pretty(&summary)? + "\n")?;
    files.push(report);
    print_json(&serde_json::json!({ "summary": summary, "files": files }))
}

fn experiment(config: Option<&Path>, suite: Option<Suite>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match (config, suite) {
        (Some(p), s) => {
            let cfg = ExperimentConfig::from_path(p)?;
            if let Some(s) = s {
                if SuiteId::from(s) != cfg.suite {
                    bail!("--suite {} contradicts suite {} in {}", SuiteId::from(s).name(), cfg.suite.name(), p.display());
                }
            }
            cfg
        }
        (None, Some(s)) => {
            let mut cfg = ExperimentConfig::new(s.into());
            if !matches!(cfg.suite, SuiteId::Specfun | SuiteId::Kernel) {
                cfg.alpha = Some(0.5);
            }
            cfg
        }
        (None, None) => bail!("verify needs --suite or --config"),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(report: &harness::RunReport) {
    for c in report.failures() {
        println!("FAIL {}: value {:e}, limit {:e} {}", c.name, c.value, c.limit, c.note);
    }
    for d in &report.fixture_diffs {
        println!("DIFF {}: stored {:e}, measured {:e}, within {} ({})", d.key, d.stored, d.measured, d.within, d.note);
    }
    println!(
        "{} {}: {} checks, {} failed",
        if report.pass { "PASS" } else { "FAIL" },
        report.config.suite.name(),
        report.checks.len(),
        report.failures().len()
    );
}

fn verify_cmd(cli: &Cli, suite: Option<Suite>, baseline: Option<&Path>, init: bool) -> Result<bool> {
    let cfg = experiment(cli.config.as_deref(), suite, cli.seed)?;
    let mut report = harness::run(&cfg)?;
    let drift = match baseline {
        Some(path) => match record_fixtures(&mut report, path, init, harness::oracle_description(cfg.suite)) {
            Ok(_) => None,
            Err(tsfe_core::Error::FixtureDrift(lines)) => Some(lines),
            Err(e) => return Err(e.into()),
        },
        None => None,
    };
    report.write(&cli.out_dir)?;
    summarize(&report);
    if let Some(lines) = drift {
        for l in lines {
            println!("DRIFT {l}");
        }
    }
    Ok(report.pass)
}

fn fixtures_cmd(dir: &Path, init: bool, only: Option<&str>, out_dir: &Path) -> Result<bool> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".config.json")).map(String::from))
        .filter(|n| only.is_none_or(|o| o == n))
        .collect();
    names.sort();
    if names.is_empty() {
        bail!("no *.config.json fixtures in {}", dir.display());
    }
    let mut ok = true;
    for name in names {
        let cfg = ExperimentConfig::from_path(&dir.join(format!("{name}.config.json")))?;
        let mut report = harness::run(&cfg)?;
        let path = dir.join(format!("{name}.baseline.json"));
        let created = !path.exists();
        match record_fixtures(&mut report, &path, init, harness::oracle_description(cfg.suite)) {
            Ok(diffs) => {
                let state = if created { "recorded" } else { "matches" };
                println!("{name}: {state} ({} constants, {} diffs)", report.constants.len(), diffs.len());
                for d in diffs {
                    println!("  {}: stored {:e}, measured {:e} ({})", d.key, d.stored, d.measured, d.note);
                }
            }
            Err(tsfe_core::Error::FixtureDrift(lines)) => {
                ok = false;
                println!("{name}: DRIFT");
                for l in lines {
                    println!("  {l}");
                }
            }
            Err(e) => return Err(e.into()),
        }
        report.write(&out_dir.join(&name))?;
    }
    Ok(ok)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Ml { op: MlOp::Eval { alpha, beta, re, im } } => ml_eval(*alpha, *beta, re, *im).map(|_| true),
        Command::Bernstein { op: BernsteinOp::Report { kind, beta, range, samples } } => {
            let [lo, hi] = range[..] else { bail!("--range takes x_min,x_max") };
            let report = bernstein(*kind, *beta)?.estimate_delta0(lo, hi, *samples)?;
            print_json(&report).map(|_| true)
        }
        Command::Kernel { op } => kernel_cmd(op, &cli.out_dir),
        Command::Solve => solve_cmd(cli.config.as_deref(), &cli.out_dir).map(|_| true),
        Command::Verify { suite, baseline, init } => verify_cmd(cli, *suite, baseline.as_deref(), *init),
        Command::Fixtures { dir, init, only } => fixtures_cmd(dir, *init, only.as_deref(), &cli.out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
