use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grushin_hardy::cp::find_constant;
use grushin_hardy::geometry::{divergence_check, DEFAULT_EXPONENTS};
use grushin_hardy::verifier::sharpness_probe;
use grushin_hardy::weights::{condition_report, make_pair};
use grushin_hardy::{
    ConstantKind, ConstantSettings, CpObjectiveKind, CubatureSettings, PairId, PairParams,
    SpaceParams,
};
use grushin_hardy_cli::{
    default_suite, export, run, run_suite, CliError, ExportFormat, RunConfig, VerificationReport,
    EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK,
};

#[derive(Parser)]
#[command(
    name = "grushin-hardy",
    version,
    about = "Numerical checks of weighted Hardy identities for the Baouendi–Grushin operator"
)]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Remainder constants c_p, c1, c2, c3.
    Constants {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstantKind,
        #[arg(long)]
        p: f64,
        /// Simplex diameter tolerance of the refinement.
        #[arg(long)]
        tol: Option<f64>,
        /// Print the full estimate as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the checks of a config file, or the pinned suite with --all.
    Verify(VerifyArgs),
    /// Rayleigh ratios of truncated extremals.
    Sharpness {
        #[arg(long)]
        pair: PairId,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_parser = parse_space, default_value = "1,1,1")]
        space: SpaceParams,
    },
    /// Closed-form against finite-difference divergence.
    CheckDivergence {
        #[arg(long, value_parser = parse_space)]
        space: SpaceParams,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampled φ ≥ 0 and analytic against numeric φ.
    Condition {
        #[arg(long)]
        pair: PairId,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_parser = parse_space, default_value = "1,1,1")]
        space: SpaceParams,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convert a JSON report to JSON or CSV.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    config: Option<PathBuf>,
    /// Run the pinned default suite.
    #[arg(long)]
    all: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-check table as CSV.
    #[arg(long)]
    emit_table: Option<PathBuf>,
    /// Overrides for the config file.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_evals: Option<usize>,
}

fn parse_kind(s: &str) -> Result<ConstantKind, String> {
    ConstantKind::from_short(s).map_err(|e| e.to_string())
}

fn parse_space(s: &str) -> Result<SpaceParams, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [m, k, g] = parts[..] else {
        return Err(format!("expected m,k,gamma, got '{s}'"));
    };
    let bad = |e: std::num::ParseIntError| e.to_string();
    let gamma: f64 = g
        .parse()
        .map_err(|e: std::num::ParseFloatError| e.to_string())?;
    SpaceParams::new(m.parse().map_err(bad)?, k.parse().map_err(bad)?, gamma)
        .map_err(|e| e.to_string())
}

fn status(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn emit(report: &VerificationReport, args: &VerifyArgs) -> Result<u8, CliError> {
    match &args.out {
        Some(path) => export(report, ExportFormat::Json, path)?,
        None => print!("{}", report.to_json()?),
    }
    if let Some(path) = &args.emit_table {
        export(report, ExportFormat::Csv, path)?;
    }
    eprintln!(
        "{} passed, {} failed ({:.1} s)",
        report.summary.passed, report.summary.failed, report.wall_clock_seconds
    );
    Ok(status(report.all_passed()))
}

fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let mut configs = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            vec![RunConfig::from_toml(&text)?]
        }
        None => default_suite(),
    };
    for c in &mut configs {
        if let Some(p) = args.p {
            c.p = p;
            if let Some(ckn) = &mut c.ckn {
                ckn.p = p;
            }
        }
        if let Some(s) = args.seed {
            c.seed = s;
        }
        if let Some(t) = args.rel_tol {
            c.quadrature.rel_tol = t;
        }
        if let Some(n) = args.max_evals {
            c.quadrature.max_evals = n;
        }
    }
    let report = if args.all {
        run_suite(&configs)?
    } else {
        run(&configs[0])?
    };
    emit(&report, args)
}

fn execute(cmd: Cmd) -> Result<u8, CliError> {
    match cmd {
        Cmd::Constants { kind, p, tol, json } => {
            let mut settings = ConstantSettings::default();
            if let Some(t) = tol {
                settings.diameter_tol = t;
            }
            let e = find_constant(CpObjectiveKind::new(kind, p)?, &settings)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&e)?);
            } else {
                println!("kind\tp\tvalue\targmin_s\targmin_t\tbracket_lo\tbracket_hi");
                println!(
                    "{}\t{p}\t{:.15}\t{:.6e}\t{:.6e}\t{:.15}\t{:.15}",
                    kind.short_name(),
                    e.value,
                    e.argmin_s,
                    e.argmin_t,
                    e.bracket.0,
                    e.bracket.1
                );
                if let Some(l) = &e.limit {
                    println!("# {l}");
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Verify(args) => verify(&args),
        Cmd::Sharpness {
            pair,
            levels,
            p,
            space,
        } => {
            let pr = make_pair(pair, space, p, PairParams::default_for(pair))?;
            let r = sharpness_probe(&pr, levels, &CubatureSettings::default())?;
            println!("level\tratio\tquadrature_error");
            for l in &r.levels {
                println!(
                    "{}\t{:.10}\t{:.2e}",
                    l.truncation_level, l.rayleigh_ratio, l.quadrature_error
                );
            }
            println!(
                "# sharp constant {:.10}, final gap {:.3}%, monotone {}",
                r.sharp_constant,
                100.0 * r.final_gap,
                r.monotone
            );
            Ok(status(r.passed))
        }
        Cmd::CheckDivergence {
            space,
            samples,
            seed,
        } => {
            if samples == 0 {
                return Err(CliError::Invalid("requires samples > 0".into()));
            }
            let r = divergence_check(&space, &DEFAULT_EXPONENTS, samples, seed)?;
            println!(
                "max relative error {:.3e} over {} points",
                r.max_rel_error,
                samples * DEFAULT_EXPONENTS.len()
            );
            Ok(status(r.passed))
        }
        Cmd::Condition {
            pair,
            samples,
            p,
            space,
            seed,
        } => {
            if samples == 0 {
                return Err(CliError::Invalid("requires samples > 0".into()));
            }
            let pr = make_pair(pair, space, p, PairParams::default_for(pair))?;
            let r = condition_report(&pr, samples, seed)?;
            println!(
                "min φ {:.6e}, max mismatch {:.3e} over {samples} points",
                r.min_phi, r.max_abs_mismatch
            );
            Ok(status(r.passed))
        }
        Cmd::Export { input, format, out } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", input.display())))?;
            let report = VerificationReport::from_json(&text)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            export(&report, format, &out)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    match execute(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
