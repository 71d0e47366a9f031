use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wqed_core::config::{parse_config, Format};
use wqed_core::output::{write_json, Emit};
use wqed_core::par::{self, Execution};
use wqed_core::presets::{self, PRESETS};
use wqed_core::validate::{self, Status};
use wqed_core::{sweep, DispersionModel, Error, PhaseMode, RunConfig};

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "wqed", version, about = "Single-photon transport through three-level emitter chains in a waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-emitter T(ω), R(ω) and optionally dT/dω.
    Spectrum(RunArgs),
    /// N-emitter chain spectrum.
    Chain(RunArgs),
    /// Bloch band table and gap report for each spacing.
    Bands(RunArgs),
    /// Δω_B(J) over a hopping grid and its logarithmic fit.
    Gapfit(RunArgs),
    /// Run the numerical check table; nonzero exit on any failure.
    Validate {
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// List the preset names.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `wqed presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    phase_mode: Option<PhaseModeArg>,
    /// Set γ₂ = γ₃ = 0.
    #[arg(long)]
    lossless: bool,
    #[arg(long, value_enum)]
    dispersion: Option<DispersionArg>,
    /// Hopping rate J (implies the cosine dispersion).
    #[arg(long)]
    hopping: Option<f64>,
    /// Chain length override.
    #[arg(long)]
    emitters: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseModeArg {
    Freq,
    Resonant,
}

#[derive(Clone, Copy, ValueEnum)]
enum DispersionArg {
    Linear,
    Nonlinear,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        EXIT_IO
    } else if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, Error> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => presets::preset(name)
            .ok_or_else(|| Error::Validation { path: "preset".into(), message: format!("unknown preset `{name}`") })?,
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    if args.lossless {
        cfg.make_lossless();
    }
    if let Some(mode) = args.phase_mode {
        cfg.set_phase_mode(match mode {
            PhaseModeArg::Freq => PhaseMode::FrequencyDependent,
            PhaseModeArg::Resonant => PhaseMode::Resonant,
        });
    }
    let hopping = args.hopping.or(cfg.dispersion.hopping()).unwrap_or(2.5);
    match (args.dispersion, args.hopping) {
        (Some(DispersionArg::Linear), Some(_)) => {
            return Err(Error::Validation { path: "--hopping".into(), message: "not used by the linear dispersion".into() })
        }
        (Some(DispersionArg::Linear), None) => cfg.set_dispersion(DispersionModel::linear()),
        (Some(DispersionArg::Nonlinear), _) | (None, Some(_)) => cfg.set_dispersion(DispersionModel::nonlinear(hopping)),
        (None, None) => {}
    }
    if let Some(n) = args.emitters {
        match cfg.lattice.as_mut() {
            Some(l) => l.n_emitters = n,
            None => return Err(Error::Validation { path: "--emitters".into(), message: "config has no lattice".into() }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(args: &RunArgs, cfg: &RunConfig) -> Result<Box<dyn Write>, Error> {
    let path = args.out.clone().or_else(|| cfg.outputs.path.as_ref().map(PathBuf::from));
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn notify(notices: &[String]) {
    for n in notices {
        eprintln!("note: {n}");
    }
}

fn run(command: &Command, args: &RunArgs) -> Result<(), Error> {
    let cfg = load(args)?;
    let exec = Execution::available();
    let format = args.format.map(Format::from).unwrap_or(cfg.outputs.format);
    let result: Box<dyn Emit> = match command {
        Command::Spectrum(_) => {
            if cfg.lattice.is_some() {
                eprintln!("note: single-emitter spectrum; use `wqed chain` for the lattice");
            }
            let run = sweep::run_single(&cfg, exec)?;
            notify(&run.notices);
            Box::new(run)
        }
        Command::Chain(_) => {
            let run = sweep::run_chain(&cfg, exec)?;
            notify(&run.notices);
            Box::new(run)
        }
        Command::Bands(_) => {
            let run = sweep::run_bands(&cfg, exec)?;
            notify(&run.notices);
            for g in &run.gaps {
                if let (Some(gap), Some(ratio)) = (g.gap, g.width_ratio) {
                    eprintln!("spacing {}λ₀: gap [{:.6}, {:.6}], width ratio to linear {ratio:.4}", g.spacing, gap.start, gap.end);
                }
            }
            Box::new(run)
        }
        Command::Gapfit(_) => {
            let report = sweep::run_gapfit(&cfg, exec)?;
            notify(&report.notices);
            eprintln!("b = {:.6}, xi = {:.6}, rms = {:.3e}", report.fit.base_b, report.fit.xi, report.fit.rms_residual);
            Box::new(report)
        }
        Command::Validate { .. } | Command::Presets => unreachable!(),
    };
    let mut out = sink(args, &cfg)?;
    result.emit(format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_validate(format: ReportFormat) -> Result<bool, Error> {
    let checks = validate::run_all(Execution::available());
    let mut out = io::stdout().lock();
    match format {
        ReportFormat::Json => write_json(&checks, &mut out)?,
        ReportFormat::Table => {
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            let fallbacks = checks.iter().filter(|c| c.status == Status::Fallback).count();
            let failed = checks.iter().filter(|c| !c.status.is_ok()).count();
            writeln!(out, "{} checks: {} failed, {fallbacks} passed via fallback", checks.len(), failed)?;
        }
    }
    Ok(checks.iter().all(|c| c.status.is_ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    par::configure_threads_from_env();
    let outcome = match &cli.command {
        Command::Presets => {
            let mut out = io::stdout().lock();
            PRESETS
                .iter()
                .try_for_each(|(name, about)| writeln!(out, "{name:<12} {about}"))
                .map_err(Error::from)
                .map(|_| true)
        }
        Command::Validate { format } => run_validate(*format),
        c @ (Command::Spectrum(a) | Command::Chain(a) | Command::Bands(a) | Command::Gapfit(a)) => run(c, a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
