//! `spectrakit`: spectra, Fredholm classification and essential spectra of
//! weighted composition operators described by JSON system files.
//!
//! Exit status: 0 on success, 1 for invalid or malformed input (and failed
//! verification checks), 2 when the request is outside what the model
//! supports.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spectrakit_core::classifier::classify;
use spectrakit_core::essential::essential_spectra;
use spectrakit_core::io::parse_system;
use spectrakit_core::partition::full_spectrum;
use spectrakit_core::verify::verify_system;
use spectrakit_core::{Lambda, Rational, Scalar, SpectraError, SystemDescription};

#[derive(Parser, Debug)]
#[command(name = "spectrakit", version, about = "Spectral analysis of weighted composition operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a system file and list every violated rule.
    Validate(Common),
    /// Print the spectrum as a spectral-set JSON object.
    Spectrum(Common),
    /// Fredholm report for one spectral parameter.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lambda: LambdaArgs,
    },
    /// Print the five essential spectra, the clopen term and rho_e.
    Essential(Common),
    /// Run the oracle suite (seed from SPECTRAKIT_SEED).
    Verify {
        #[command(flatten)]
        common: Common,
        /// Random spectral parameters per check.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Draw the spectrum and essential spectra.
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// System description (JSON).
    system: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LambdaArgs {
    /// log|lambda|, exact decimal.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["re", "im"])]
    logmod: Option<String>,
    /// arg(lambda) in turns, exact decimal.
    #[arg(long, allow_hyphen_values = true, requires = "logmod")]
    phase: Option<String>,
    /// Real part; converted to log-polar form through f64.
    #[arg(long, allow_hyphen_values = true)]
    re: Option<f64>,
    /// Imaginary part.
    #[arg(long, allow_hyphen_values = true)]
    im: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

enum Failure {
    Invalid(Value),
    Unsupported(Value),
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        match &e {
            SpectraError::Invalid(violations) => Failure::Invalid(json!({
                "error": "invalid",
                "violations": violations.iter().map(|v| json!({
                    "subject": v.subject,
                    "rule": v.rule.name(),
                    "message": v.rule.message(),
                    "detail": v.detail,
                })).collect::<Vec<_>>(),
            })),
            SpectraError::Malformed(msg) => Failure::Invalid(json!({ "error": "malformed", "message": msg })),
            _ if e.is_unsupported() => Failure::Unsupported(json!({ "error": "unsupported", "message": e.to_string() })),
            _ => Failure::Invalid(json!({ "error": "failed", "message": e.to_string() })),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Invalid(json!({ "error": "usage", "message": message.into() }))
}

fn load(path: &PathBuf) -> Result<SystemDescription<Rational>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(json!({ "error": "io", "message": format!("{}: {e}", path.display()) })))?;
    Ok(parse_system(&text)?)
}

fn lambda(args: &LambdaArgs) -> Result<Lambda<Rational>, Failure> {
    let exact = |text: &str, what: &str| {
        Rational::parse_decimal(text).ok_or_else(|| usage(format!("--{what}: cannot parse {text:?}")))
    };
    match (&args.logmod, args.re, args.im) {
        (Some(l), _, _) => {
            let phase = match &args.phase {
                Some(p) => exact(p, "phase")?,
                None => Rational::from_count(0),
            };
            Ok(Lambda::polar(exact(l, "logmod")?, phase))
        }
        (None, None, None) => Err(usage("classify needs --logmod/--phase or --re/--im")),
        (None, re, im) => Lambda::from_cartesian(re.unwrap_or(0.0), im.unwrap_or(0.0))
            .ok_or_else(|| usage("--re/--im must be finite")),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn run(command: &Command) -> Result<(String, bool), Failure> {
    match command {
        Command::Validate(c) => {
            let s = load(&c.system)?;
            Ok((
                pretty(&json!({
                    "valid": true,
                    "blocks": s.blocks().len(),
                    "trajectories": s.trajectories().len(),
                })),
                true,
            ))
        }
        Command::Spectrum(c) => Ok((pretty(&full_spectrum(&load(&c.system)?).to_json()), true)),
        Command::Classify { common, lambda: l } => {
            let s = load(&common.system)?;
            let lambda = lambda(l)?;
            Ok((pretty(&classify(&s, &lambda)?.to_json()), true))
        }
        Command::Essential(c) => Ok((pretty(&essential_spectra(&load(&c.system)?)?.to_json()), true)),
        Command::Verify { common, samples } => {
            let s = load(&common.system)?;
            let seed = match std::env::var("SPECTRAKIT_SEED") {
                Ok(v) => v
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("SPECTRAKIT_SEED must be an unsigned integer, got {v:?}")))?,
                Err(_) => 0,
            };
            let report = verify_system(&s, seed, *samples);
            Ok((report.to_table(), report.passed()))
        }
        Command::Render { common, format } => {
            let s = load(&common.system)?;
            let spectrum = full_spectrum(&s).to_json();
            let essential = essential_spectra(&s)?.to_json();
            let drawn = match format {
                Format::Ascii => render::ascii(&spectrum, &essential),
                Format::Svg => render::svg(&spectrum, &essential),
            };
            Ok((drawn.map_err(usage)?, true))
        }
    }
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Validate(c) | Command::Spectrum(c) | Command::Essential(c) => c.out.as_ref(),
        Command::Classify { common, .. } | Command::Verify { common, .. } | Command::Render { common, .. } => {
            common.out.as_ref()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((text, passed)) => {
            match out_path(&cli.command) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprint!("{}", pretty(&json!({ "error": "io", "message": format!("{}: {e}", path.display()) })));
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Invalid(v)) => {
            // `validate` reports on stdout; other commands treat it as an error.
            if matches!(cli.command, Command::Validate(_)) {
                print!("{}", pretty(&v));
            } else {
                eprint!("{}", pretty(&v));
            }
            ExitCode::from(1)
        }
        Err(Failure::Unsupported(v)) => {
            eprint!("{}", pretty(&v));
            ExitCode::from(2)
        }
    }
}
