use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use radshock::classification::{classify_detailed, rest_point_spectra};
use radshock::equilibria::rest_points;
use radshock::model::{causality_check, CausalityClass};
use radshock::profile::{shoot, ShootOptions};
use radshock::scan::{run_scan, ScanConfig};
use radshock::verify::{run_identity_suite, DEFAULT_SAMPLES, DEFAULT_SEED};
use radshock::Error;

mod emit;

use emit::{fmt17, fmt_complex};

#[derive(Parser)]
#[command(
    name = "radshock",
    version,
    about = "Shock profiles of a dissipative radiation-fluid model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(clap::Args)]
struct Integration {
    /// Initial displacement along the unstable direction, relative to |psi_- - psi_+|.
    #[arg(long, default_value_t = ShootOptions::default().offset)]
    offset: f64,
    #[arg(long, default_value_t = ShootOptions::default().rel_tol)]
    rtol: f64,
    #[arg(long, default_value_t = ShootOptions::default().abs_tol)]
    atol: f64,
}

impl Integration {
    fn options(&self) -> ShootOptions {
        ShootOptions {
            offset: self.offset,
            rel_tol: self.rtol,
            abs_tol: self.atol,
            ..ShootOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Region label, rest points and separatrices at one parameter point.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
    },
    /// Region map over the parameter square.
    Scan {
        /// Grid size as EPSxQ, e.g. 100x100.
        #[arg(long, default_value = "100x100", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also shoot a profile in every cell.
        #[arg(long)]
        shoot: bool,
        #[command(flatten)]
        integration: Integration,
    },
    /// Shoot the profile from psi_- towards psi_+.
    Profile {
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        /// Trajectory file; without it only the summary is printed.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        integration: Integration,
    },
    /// Sampled check of the closed-form identities.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Causality class of the dissipation coefficients.
    Causality {
        #[arg(long, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let m = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if n < 2 || m < 2 {
        return Err("each grid dimension must be at least 2".into());
    }
    Ok((n, m))
}

enum Failure {
    Verify,
    Usage(String),
    Io(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StateOutsideDomain { .. }
            | Error::EpsilonOutOfRange(_)
            | Error::EpsilonAboveHat(_)
            | Error::QOutOfRange(_)
            | Error::ZOutOfRange(_)
            | Error::ParamsOutOfOmega { .. }
            | Error::DegenerateShock(_)
            | Error::NonPositiveParameter { .. }
            | Error::InvalidOptions(_) => Failure::Usage(e.to_string()),
            Error::SingularBsharp { .. }
            | Error::NotASaddle(_)
            | Error::RootFindingFailure { .. }
            | Error::InternalInconsistency { .. }
            | Error::TooFewSamples(_) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn classify_report(eps: f64, q: f64) -> Result<String, Failure> {
    let c = classify_detailed(eps, q)?;
    let pair = rest_points(q)?;
    let (minus, plus) = rest_point_spectra(eps, q)?;
    let mut s = String::new();
    s.push_str(&format!("region = {}\n", c.label));
    s.push_str(&format!("eps = {}\nq_tilde = {}\n", fmt17(eps), fmt17(q)));
    s.push_str(&format!(
        "psi_minus = ({}, {})\npsi_plus = ({}, {})\n",
        fmt17(pair.psi_minus.psi0),
        fmt17(pair.psi_minus.psi1),
        fmt17(pair.psi_plus.psi0),
        fmt17(pair.psi_plus.psi1)
    ));
    s.push_str(&format!(
        "v_minus_sq = {}\nv_plus_sq = {}\n",
        fmt17(pair.v_minus_sq),
        fmt17(pair.v_plus_sq)
    ));
    s.push_str(&format!("discriminant = {}\n", fmt17(c.discriminant)));
    s.push_str(&format!(
        "eigenvalues_minus = {}, {}\neigenvalues_plus = {}, {}\n",
        fmt_complex(minus[0].re, minus[0].im),
        fmt_complex(minus[1].re, minus[1].im),
        fmt_complex(plus[0].re, plus[0].im),
        fmt_complex(plus[1].re, plus[1].im)
    ));
    s.push_str(&format!("q1 = {}\n", fmt17(c.q1)));
    match c.q2 {
        Some(q2) => s.push_str(&format!("q2 = {}\n", fmt17(q2))),
        None => s.push_str("q2 = undefined (eps >= eps_hat)\n"),
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { eps, q } => write_output(None, &classify_report(eps, q)?),
        Command::Scan {
            grid,
            format,
            out,
            shoot,
            integration,
        } => {
            let mut cfg = ScanConfig::full(grid.0, grid.1);
            if shoot {
                cfg.shoot = Some(integration.options());
            }
            let scan = run_scan(&cfg)?;
            let text = match format {
                Format::Csv => emit::scan_csv(&scan),
                Format::Json => emit::scan_json(&scan).to_string() + "\n",
                Format::Svg => emit::scan_svg(&scan),
            };
            write_output(out.as_ref(), &text)
        }
        Command::Profile {
            eps,
            q,
            out,
            format,
            integration,
        } => {
            let result = shoot(eps, q, &integration.options())?;
            if let Some(path) = &out {
                let text = match format {
                    Format::Csv => emit::profile_csv(&result),
                    Format::Json => emit::profile_json(&result).to_string() + "\n",
                    Format::Svg => {
                        return Err(Failure::Usage("profiles are written as csv or json".into()))
                    }
                };
                write_output(Some(path), &text)?;
            }
            write_output(None, &emit::profile_summary(&result))
        }
        Command::Verify { samples, seed } => {
            let report = run_identity_suite(samples, seed)?;
            let mut s = format!("seed = {seed}\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{} {:<56} samples = {:>5}  max_rel_error = {:.3e}  tol = {:.0e}\n",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.samples,
                    c.max_rel_error,
                    c.tolerance
                ));
            }
            write_output(None, &s)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
        Command::Causality { eta, mu, nu } => {
            let v = causality_check(eta, mu, nu)?;
            let class = match v.class {
                CausalityClass::StrictlyCausal => "StrictlyCausal",
                CausalityClass::SharplyCausal => "SharplyCausal",
                CausalityClass::Acausal => "Acausal",
            };
            let mut s = format!("class = {class}\n");
            if let Some(e) = v.epsilon {
                s.push_str(&format!("eps = {}\n", fmt17(e)));
            }
            write_output(None, &s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verify => eprintln!("error: identity check failed"),
                Failure::Usage(m) | Failure::Io(m) | Failure::Numerical(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
