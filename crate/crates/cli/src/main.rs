use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use widthlab_cli::config::VerifySection;
use widthlab_cli::run::run_verify;
use widthlab_cli::verify::Profile;
use widthlab_cli::{run, CliResult, ExperimentConfig, ExperimentKind};

#[derive(Debug, Parser)]
#[command(
    name = "widthlab",
    version,
    about = "Widths, capacities and Bergman kernels of explicit condensers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Width tables with slope fits and sup-norm bounds.
    Widths(Common),
    /// Toeplitz eigenvalue counts above a threshold.
    ToeplitzScan(Common),
    /// Normalized Bergman kernel diagonals.
    BergmanDensity(Common),
    /// Finite-difference and closed-form capacities.
    Capacity(Common),
    /// Bergman-Weil truncation errors against the explicit bound.
    BwApprox(Common),
    /// The acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Upper bound on worker threads.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Optional; only its [verify] section is read.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Writes verify.json and run.json when given.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// default, strict-slope, or a tag: closed-form, convergence, property.
    #[arg(long, value_name = "NAME", default_value = "default")]
    profile: String,
}

fn experiment(kind: ExperimentKind, args: &Common) -> CliResult<()> {
    let (config, text) = ExperimentConfig::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let artifact = run(kind, &config, &text, base, &args.out, args.jobs)?;
    for f in &artifact.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> CliResult<()> {
    let (section, text) = match &args.config {
        Some(path) => {
            let (config, text) = ExperimentConfig::load(path)?;
            (config.verify.unwrap_or_default(), text)
        }
        None => (VerifySection::default(), String::new()),
    };
    let profile = Profile::named(&args.profile)?.with_overrides(&section)?;
    run_verify(&profile, &text, args.out.as_deref(), args.jobs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Widths(a) => experiment(ExperimentKind::Widths, a),
        Command::ToeplitzScan(a) => experiment(ExperimentKind::ToeplitzScan, a),
        Command::BergmanDensity(a) => experiment(ExperimentKind::BergmanDensity, a),
        Command::Capacity(a) => experiment(ExperimentKind::Capacity, a),
        Command::BwApprox(a) => experiment(ExperimentKind::BwApprox, a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("widthlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
