use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use rbfmol::harness::{emit_outputs, result_dir, RunOptions, Series, ALL_FORMATS};
use rbfmol::{make_basis, make_symbol, BasisSpec, ConstantsReport, ExperimentConfig, ReportOptions, SymbolSpec};

#[derive(Parser)]
#[command(name = "study", version, about = "Convergence and saturation studies for cardinal RBF schemes")]
struct Cli {
    /// Output root; results land in <DIR>/<kind>-<hash>.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Allowed gap between fitted and predicted rates.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study and write CSV, JSON and SVG outputs.
    Run { config: PathBuf },
    /// Print the error constants of a basis.
    Constants {
        basis: PathBuf,
        #[arg(long, value_name = "FILE")]
        symbol: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

fn verdict(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "-",
    }
}

fn summarize(s: &Series) -> String {
    let t = s.t.map_or_else(String::new, |t| format!("t={t} "));
    let rate = s.rate.as_ref().and_then(|r| r.slope());
    let bound = if s.predicted_is_lower_bound { ">=" } else { "" };
    let mut line = format!(
        "{t}rate {} predicted {bound}{} [{}]",
        fmt_opt(rate),
        fmt_opt(s.predicted_rate),
        verdict(s.rate_pass)
    );
    if let Some(p) = s.plateau {
        line.push_str(&format!(" plateau {p:.4e} [{}]", verdict(s.plateau_pass)));
    }
    let failed = s.points.iter().filter(|p| p.failure.is_some()).count();
    if failed > 0 {
        line.push_str(&format!(" ({failed} points failed)"));
    }
    line
}

fn run(cli: &Cli, path: &Path) -> Result<ExitCode> {
    let config = load_config(path)?;
    let opts = RunOptions { jobs: cli.jobs, tolerance: cli.tol };
    let (result, info) = rbfmol::run_study(&config, &opts)?;
    let root = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    emit_outputs(&result, &root, &ALL_FORMATS)?;
    println!("{} {}", result.kind.name(), result_dir(&root, &result).display());
    for s in &result.series {
        println!("  {}", summarize(s));
    }
    for r in &result.constants {
        println!("  c={} l_upper {:.6e} rho {:.6e}", fmt_opt(r.basis.c), r.l_upper, r.thresholds.rho);
    }
    eprintln!("{:.1}s on {} threads", info.seconds, info.threads);
    let failed = result
        .series
        .iter()
        .any(|s| s.rate_pass == Some(false) || s.plateau_pass == Some(false));
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn constants(cli: &Cli, basis: &Path, symbol: Option<&Path>) -> Result<ExitCode> {
    let spec: BasisSpec = read_json(basis)?;
    let phi = make_basis(&spec)?;
    let a = match symbol {
        Some(p) => Some(make_symbol(&read_json::<SymbolSpec>(p)?, phi.n)?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    let report = pool.install(|| ConstantsReport::build(&phi, a.as_ref(), &ReportOptions::default()))?;
    let json = report.to_json()?;
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in [("constants.json", &json), ("constants.csv", &report.to_csv())] {
                let path = dir.join(name);
                std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            println!("{}", dir.display());
        }
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(cli: &Cli, path: &Path) -> Result<ExitCode> {
    let mut config = load_config(path)?;
    if let Some(t) = cli.tol {
        config.rate_tolerance = t;
    }
    let resolved = config.validate()?;
    let ladder = config.ladder();
    println!(
        "ok {} {} n={} ladder 2^-{}..2^-{} times {:?}{}",
        config.kind.name(),
        config.hash(),
        resolved.phi.n,
        ladder.start,
        ladder.start as usize + ladder.count - 1,
        config.times,
        if resolved.symbol.is_some() { " with symbol" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Constants { basis, symbol } => constants(&cli, basis, symbol.as_deref()),
        Command::Validate { config } => validate(&cli, config),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
