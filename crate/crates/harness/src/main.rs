use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use glfour_harness::{emit_report, enabled_suites, run, suites, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "verify", about = "Run the verification suites and write a JSON report")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// TOML config; the checked-in default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path.
    #[arg(long, global = true, default_value = "verify-report.json")]
    out: PathBuf,
    /// Restrict `all` to these suites (repeatable).
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(suites::NAMES))]
    suite: Vec<String>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reduced grids.
    #[arg(long, global = true)]
    fast: bool,
    /// Enable the GL2(C) suites.
    #[arg(long, global = true)]
    complex: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Direct 4-D transform against the kernel integrated over s
    KernelOracle,
    /// Kernel-side operators against transforms of differentiated F
    MainTheorem,
    /// Integration-by-parts identities for the kernel
    Lemmas,
    /// Exact brackets of all generator pairs
    Commutators,
    /// Infinitesimal action against finite differences
    LieAction,
    /// Intertwiner symmetry at random group elements
    Intertwiner,
    /// Plancherel density properties
    Densities,
    /// GL2(C) seed operators by randomized QMC
    ComplexSpot,
    /// Every enabled suite (the default)
    All,
}

impl Command {
    fn suite(self) -> Option<&'static str> {
        Some(match self {
            Command::KernelOracle => "kernel-oracle",
            Command::MainTheorem => "main-theorem",
            Command::Lemmas => "lemmas",
            Command::Commutators => "commutators",
            Command::LieAction => "lie-action",
            Command::Intertwiner => "intertwiner",
            Command::Densities => "densities",
            Command::ComplexSpot => "complex-spot",
            Command::All => return None,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> glfour_harness::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => SuiteConfig::load(path)?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.fast {
        cfg = cfg.fast();
    }
    if cli.complex {
        cfg.complex_spot.enabled = true;
        cfg.lie_action.complex = true;
        cfg.validate()?;
    }
    let names: Vec<&str> = match cli.command.unwrap_or(Command::All).suite() {
        Some(one) => vec![one],
        None if !cli.suite.is_empty() => suites::NAMES.into_iter().filter(|n| cli.suite.iter().any(|s| s == n)).collect(),
        None => enabled_suites(&cfg),
    };
    let report = run(&cfg, &names, cli.fast)?;
    for s in &report.suites {
        println!("{}", s.summary_line());
    }
    emit_report(&report, &cli.out)?;
    println!("{} -> {}", if report.ok { "PASS" } else { "FAIL" }, cli.out.display());
    Ok(report.ok)
}
