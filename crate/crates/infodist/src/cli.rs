//! Command-line front end.
//!
//! Exit codes: 0 when every checked assertion holds, 2 when an experiment ran
//! and an assertion failed (or the computation itself failed), 1 for usage and
//! input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use infodist_core::MixedDistribution;
use serde::Serialize;

use crate::experiments;
use crate::io::read_distribution;
use crate::table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "infodist", version, about = "Information distances to normality under Gaussian regularization")]
pub struct Cli {
    /// Worker threads for sweeps; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report file; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, entropy power, D and J_st of X + σZ.
    Distances {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
    },
    /// Inequality suite and fitted constants for one pair of laws.
    Pair {
        /// Two distribution files, X then Y.
        #[arg(long, num_args = 2, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Inequality suite on seeded random Gaussian-mixture pairs.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// The cubic-phase counterexample: T²D sweep, decay of D(U−V) and the
    /// sharpness certificate.
    Counterexample {
        #[arg(long = "T", value_delimiter = ',', default_value = "40,80,160")]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
    },
    /// |f_X* f_Y*| / |e^{-t²/2}| on circles in the complex plane.
    Sandwich {
        /// Two distribution files; defaults to X = Y = N(0, 1/2).
        #[arg(long, num_args = 2)]
        input: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Saddle-point inversion against FFT inversion.
    Invert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigma: Vec<f64>,
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Replace the law by 0 outside [-LEVEL, LEVEL] before inverting.
        #[arg(long)]
        truncate: Option<f64>,
    },
}

fn check_sigmas(sigmas: &[f64]) -> Result<()> {
    if sigmas.is_empty() {
        bail!("--sigma needs at least one value");
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && **s <= 2.0)) {
        bail!("sigma {s} outside (0, 2]");
    }
    Ok(())
}

impl Cli {
    /// Flag checks that clap cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        match &self.command {
            Command::Distances { sigma, .. } | Command::Pair { sigma, .. } | Command::Invert { sigma, .. } => {
                check_sigmas(sigma)
            }
            Command::Suite { cases, .. } => {
                if *cases == 0 {
                    bail!("--cases must be at least 1");
                }
                Ok(())
            }
            Command::Counterexample { t, sigma } => {
                check_sigmas(sigma)?;
                if t.is_empty() {
                    bail!("--T needs at least one value");
                }
                if let Some(v) = t.iter().find(|v| !(**v >= 20.0)) {
                    bail!("T = {v} is below 20");
                }
                if t.windows(2).any(|w| !(w[0] < w[1])) {
                    bail!("--T values must be strictly increasing");
                }
                Ok(())
            }
            Command::Sandwich { sigma, samples, .. } => {
                check_sigmas(&[*sigma])?;
                if *samples < 64 {
                    bail!("--samples must be at least 64");
                }
                Ok(())
            }
        }
    }
}

struct Outcome {
    body: String,
    summary: String,
    pass: bool,
}

fn render<T: Serialize + ?Sized>(format: Format, value: &T, csv: impl FnOnce() -> Result<String>) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv(),
    }
}

fn read_pair(paths: &[PathBuf]) -> Result<(MixedDistribution, MixedDistribution)> {
    Ok((read_distribution(&paths[0])?, read_distribution(&paths[1])?))
}

/// Loads every input up front so that bad files count as usage errors.
enum Inputs {
    None,
    One(MixedDistribution),
    Two(MixedDistribution, MixedDistribution),
}

fn load(cmd: &Command) -> Result<Inputs> {
    Ok(match cmd {
        Command::Distances { input, .. } => Inputs::One(read_distribution(input)?),
        Command::Invert { input, truncate, .. } => {
            let m = read_distribution(input)?;
            Inputs::One(match truncate {
                Some(level) => m.truncate(*level)?,
                None => m,
            })
        }
        Command::Pair { input, .. } => {
            let (x, y) = read_pair(input)?;
            Inputs::Two(x, y)
        }
        Command::Sandwich { input, .. } if !input.is_empty() => {
            let (x, y) = read_pair(input)?;
            Inputs::Two(x, y)
        }
        Command::Sandwich { .. } => {
            let half = MixedDistribution::gauss_mixture(&[(1.0, 0.0, std::f64::consts::FRAC_1_SQRT_2)], None)?;
            Inputs::Two(half.clone(), half)
        }
        _ => Inputs::None,
    })
}

fn execute(cli: &Cli, inputs: Inputs) -> Result<Outcome> {
    let f = cli.format;
    let out = match (&cli.command, inputs) {
        (Command::Distances { sigma, .. }, Inputs::One(m)) => {
            let r = experiments::distances(&m, sigma)?;
            let d: Vec<String> = r.iter().filter(|m| m.metric == "D").map(|m| format!("{:e}", m.value)).collect();
            let j: Vec<String> = r.iter().filter(|m| m.metric == "Jst").map(|m| format!("{:e}", m.value)).collect();
            Outcome {
                pass: r.iter().all(|m| m.pass),
                summary: format!("D = [{}], J_st = [{}]", d.join(", "), j.join(", ")),
                body: render(f, &r, || table::distances(&r))?,
            }
        }
        (Command::Pair { sigma, epsilon, .. }, Inputs::Two(x, y)) => {
            let r = experiments::pair(&x, &y, sigma, *epsilon)?;
            let pass = experiments::pair_pass(&r);
            Outcome {
                pass,
                summary: format!("{} sigma value(s), always-true inequalities {}", r.len(), verdict(pass)),
                body: render(f, &r, || table::pair(&r))?,
            }
        }
        (Command::Suite { seed, cases }, _) => {
            let r = experiments::suite(*seed, *cases, cli.jobs)?;
            Outcome {
                pass: r.all_pass(),
                summary: format!("seed {}: {}/{} cases pass", r.seed, r.passed, r.cases),
                body: render(f, &r, || table::suite(&r))?,
            }
        }
        (Command::Counterexample { t, sigma }, _) => {
            let r = experiments::counterexample(sigma, t, cli.jobs)?;
            let scaled: Vec<String> = r
                .iter()
                .flat_map(|c| c.asymptotics.rows.iter().map(|row| format!("{:.5}", row.scaled_d)))
                .collect();
            let pass = r.iter().all(|c| c.pass);
            Outcome {
                pass,
                summary: format!("T^2 D = [{}], {}", scaled.join(", "), verdict(pass)),
                body: render(f, &r, || table::counterexample(&r))?,
            }
        }
        (Command::Sandwich { sigma, epsilon, samples, .. }, Inputs::Two(x, y)) => {
            let r = experiments::sandwich(&x, &y, *sigma, *epsilon, *samples)?;
            Outcome {
                pass: r.report.pass,
                summary: format!(
                    "ratio in [{:.6}, {:.6}] over {} points, {}",
                    r.report.min_ratio,
                    r.report.max_ratio,
                    r.report.ratios.len(),
                    verdict(r.report.pass)
                ),
                body: render(f, &r, || table::sandwich(&r))?,
            }
        }
        (Command::Invert { sigma, points, .. }, Inputs::One(m)) => {
            let r = sigma
                .iter()
                .map(|&s| experiments::invert(&m, s, *points))
                .collect::<Result<Vec<_>>>()?;
            let worst = r.iter().map(|x| x.max_rel_diff).fold(0.0, f64::max);
            let pass = r.iter().all(|x| x.pass);
            Outcome {
                pass,
                summary: format!("max relative saddle/FFT gap {worst:e}, {}", verdict(pass)),
                body: render(f, &r, || table::invert(&r))?,
            }
        }
        _ => unreachable!("inputs are loaded per subcommand"),
    };
    Ok(out)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

/// Parses `args`, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = Cli::command()
        .after_help(table::help_text())
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let inputs = match cli.validate().and_then(|()| load(&cli.command)) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let outcome = match execute(&cli, inputs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_FAILED;
        }
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e:#}");
        return EXIT_USAGE;
    }
    if outcome.pass {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    match &cli.out {
        Some(path) => {
            fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", outcome.summary);
        }
        None => {
            std::io::stdout().write_all(outcome.body.as_bytes())?;
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}
