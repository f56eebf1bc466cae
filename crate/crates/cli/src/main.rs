use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use etas_core::factor_nig::{
    correlation_curve, reproduce_table, round_half_even, time_grid, TableRow, CORRELATED_SCENARIOS,
    INDEPENDENT_SCENARIOS,
};
use etas_core::input::{parse_input, Input, InputError};
use etas_core::montecarlo::{run_model_checks, sample_subordinator_at, sample_y_rho_at, McConfig};
use etas_core::RhoFactorModel;
use serde::Serialize;

/// Smallest sample count accepted by `mc-check`.
const MIN_SAMPLES: usize = 10_000;

#[derive(Parser)]
#[command(name = "etas", version, about = "Tempered stable laws, Sato subordinators and factor NIG models")]
struct Cli {
    /// Seed for Monte Carlo commands
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a distribution, Sato law or model file against its constraints
    Validate { file: PathBuf },
    /// Characteristic function at time t, printed as "re,im"
    Cf {
        file: PathBuf,
        /// Argument vector, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Correlation term structure of one pair
    CorrCurve {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,1")]
        pair: Vec<usize>,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1109.0)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Linear instead of logarithmic spacing
        #[arg(long)]
        linear: bool,
    },
    /// Correlation limits and unit-time values for the correlated and
    /// independent Brownian scenarios
    Tables { file: PathBuf },
    /// Compare Monte Carlo estimates with the closed forms
    McCheck {
        file: PathBuf,
        /// Horizons, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0.25,1,4")]
        t: Vec<f64>,
        /// Number of draws per horizon
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Worker threads; results do not depend on this
        #[arg(long)]
        workers: Option<usize>,
        /// Directory for per-horizon sample CSVs
        #[arg(long)]
        dump_samples: Option<PathBuf>,
    },
    /// Mean and covariance (distribution, Sato law) or per-coordinate
    /// moments (model) at time t
    Moments {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
}

enum Failure {
    /// A check or validation failed (exit 1).
    Check(String),
    /// Statistical checks failed; the full report is still written.
    Report { body: String, summary: String },
    /// Bad input or I/O (exit 2).
    Input(String),
}

type Outcome = Result<String, Failure>;

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn check_error(e: impl std::fmt::Display) -> Failure {
    Failure::Check(e.to_string())
}

fn load(path: &Path) -> Result<Input, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_input(&text).map_err(|e| match e {
        InputError::Parse(msg) => Failure::Input(format!("{}: {msg}", path.display())),
        InputError::Invalid(_, v) => Failure::Check(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")),
    })
}

fn load_model(path: &Path) -> Result<RhoFactorModel, Failure> {
    match load(path)? {
        Input::Model(m) => Ok(m),
        _ => Err(Failure::Input(format!("{}: expected a model file", path.display()))),
    }
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn validate(path: &Path) -> Outcome {
    let kind = match load(path)? {
        Input::Distribution(_) => "distribution",
        Input::Sato(_) => "sato law",
        Input::Model(_) => "model",
    };
    Ok(format!("valid {kind}\n"))
}

fn cf(path: &Path, z: &[f64], t: f64, format: Format) -> Outcome {
    let value = match load(path)? {
        // the Lévy process with unit-time law `dist`
        Input::Distribution(dist) => {
            if z.len() != dist.dim() {
                return Err(input_error(format!("z has {} entries, expected {}", z.len(), dist.dim())));
            }
            if !(t > 0.0 && t.is_finite()) {
                return Err(input_error(format!("t = {t} must be positive")));
            }
            if t == 1.0 {
                dist.char_function(z)
            } else {
                (dist.char_exponent(z) * t).exp()
            }
        }
        Input::Sato(law) => law.cf(t, z).map_err(input_error)?,
        Input::Model(model) => model.cf(t, z).map_err(input_error)?,
    };
    Ok(match format {
        Format::Csv => format!("{},{}\n", value.re, value.im),
        Format::Json => json(&serde_json::json!({ "re": value.re, "im": value.im })),
    })
}

fn corr_curve(path: &Path, pair: &[usize], t_min: f64, t_max: f64, points: usize, linear: bool, format: Format) -> Outcome {
    let model = load_model(path)?;
    let &[h, j] = pair else {
        return Err(input_error("--pair takes two indices, e.g. 0,1"));
    };
    let grid = time_grid(t_min, t_max, points, linear).map_err(input_error)?;
    let curve = correlation_curve(&model, h, j, &grid).map_err(input_error)?;
    Ok(match format {
        Format::Csv => curve.to_csv(),
        Format::Json => json(&curve),
    })
}

#[derive(Serialize)]
struct TableOutput {
    correlated: Vec<TableRow>,
    independent: Vec<TableRow>,
}

fn tables(path: &Path, format: Format) -> Outcome {
    let model = load_model(path)?;
    let [first, second, ..] = model.marginals() else {
        return Err(input_error("tables need at least two marginals"));
    };
    let rounded = |rows: Vec<TableRow>| -> Vec<TableRow> {
        rows.into_iter()
            .map(|r| TableRow {
                limit_zero: round_half_even(r.limit_zero, 4),
                limit_infinity: round_half_even(r.limit_infinity, 4),
                unit_time: round_half_even(r.unit_time, 4),
                ..r
            })
            .collect()
    };
    let out = TableOutput {
        correlated: rounded(reproduce_table(&CORRELATED_SCENARIOS, *first, *second).map_err(check_error)?),
        independent: rounded(reproduce_table(&INDEPENDENT_SCENARIOS, *first, *second).map_err(check_error)?),
    };
    Ok(match format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut s = String::from("table,case,a,rho,q,limit_zero,limit_infinity,rho_1\n");
            for (name, rows) in [("correlated", &out.correlated), ("independent", &out.independent)] {
                for r in rows {
                    writeln!(
                        s,
                        "{name},{},{},{},{},{:.4},{:.4},{:.4}",
                        r.label, r.a, r.rho, r.q, r.limit_zero, r.limit_infinity, r.unit_time
                    )
                    .unwrap();
                }
            }
            s
        }
    })
}

fn mc_check(
    path: &Path,
    times: &[f64],
    samples: usize,
    workers: Option<usize>,
    dump: Option<&Path>,
    seed: u64,
    format: Format,
) -> Outcome {
    if samples < MIN_SAMPLES {
        return Err(input_error(format!("--samples {samples} is below the floor of {MIN_SAMPLES}")));
    }
    let model = load_model(path)?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = McConfig::new(samples, seed, workers).map_err(input_error)?;
    let report = run_model_checks(&model, times, &config).map_err(input_error)?;
    if let Some(dir) = dump {
        fs::create_dir_all(dir).map_err(input_error)?;
        for &t in times {
            let s = sample_subordinator_at(&model, t, &config).map_err(input_error)?;
            fs::write(dir.join(format!("subordinator_t{t}.csv")), s.to_csv()).map_err(input_error)?;
            let y = sample_y_rho_at(&model, t, &config).map_err(input_error)?;
            fs::write(dir.join(format!("returns_t{t}.csv")), y.to_csv()).map_err(input_error)?;
        }
    }
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("name,t,estimate,standard_error,reference,passed\n");
            for c in &report.checks {
                writeln!(s, "{},{},{},{},{},{}", c.name, c.t, c.estimate, c.standard_error, c.reference, c.passed).unwrap();
            }
            s
        }
    };
    let failed: Vec<String> = report
        .failures()
        .map(|c| format!("{} at t={}: {} vs {} (se {})", c.name, c.t, c.estimate, c.reference, c.standard_error))
        .collect();
    let total = report.checks.len();
    if failed.is_empty() {
        eprintln!("PASS: {total}/{total} checks within {} SE", report.se_threshold);
        Ok(body)
    } else {
        Err(Failure::Report {
            body,
            summary: format!(
                "FAIL: {} of {total} checks outside {} SE\n{}",
                failed.len(),
                report.se_threshold,
                failed.join("\n")
            ),
        })
    }
}

#[derive(Serialize)]
struct Coordinate {
    subordinator_mean: f64,
    subordinator_variance: f64,
    return_mean: f64,
    return_variance: f64,
}

fn moments(path: &Path, t: f64, format: Format) -> Outcome {
    let matrix_out = |mean: Vec<f64>, cov: Vec<Vec<f64>>| match format {
        Format::Json => json(&serde_json::json!({ "mean": mean, "covariance": cov })),
        Format::Csv => {
            let mut s = String::from("row,mean,covariance\n");
            for (i, (m, c)) in mean.iter().zip(&cov).enumerate() {
                let c: Vec<String> = c.iter().map(f64::to_string).collect();
                writeln!(s, "{i},{m},{}", c.join(",")).unwrap();
            }
            s
        }
    };
    let (dist, scale) = match load(path)? {
        Input::Model(model) => {
            let s = model.subordinator_moments();
            let y = model.return_moments(t).map_err(input_error)?;
            let tq = t.powf(model.q());
            let rows: Vec<Coordinate> = s
                .total
                .iter()
                .zip(&y)
                .map(|(s, y)| Coordinate {
                    subordinator_mean: tq * s.mean,
                    subordinator_variance: tq * tq * s.variance,
                    return_mean: y.mean,
                    return_variance: y.variance,
                })
                .collect();
            return Ok(match format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut out = String::from("j,subordinator_mean,subordinator_variance,return_mean,return_variance\n");
                    for (j, r) in rows.iter().enumerate() {
                        writeln!(
                            out,
                            "{j},{},{},{},{}",
                            r.subordinator_mean, r.subordinator_variance, r.return_mean, r.return_variance
                        )
                        .unwrap();
                    }
                    out
                }
            });
        }
        Input::Sato(law) => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(input_error(format!("t = {t} must be positive")));
            }
            (law.base().clone(), t.powf(law.q()))
        }
        Input::Distribution(dist) => {
            if t != 1.0 {
                return Err(input_error("--t applies to Sato laws and models only"));
            }
            (dist, 1.0)
        }
    };
    let m = dist.mean_and_covariance().map_err(check_error)?;
    let mean = m.mean.iter().map(|x| x * scale).collect();
    let cov = m.covariance.row_iter().map(|r| r.iter().map(|x| x * scale * scale).collect()).collect();
    Ok(matrix_out(mean, cov))
}

fn emit(body: String, output: Option<&Path>) -> std::io::Result<()> {
    match output {
        Some(path) => fs::write(path, body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Cf { file, z, t } => cf(file, z, *t, format),
        Command::CorrCurve { file, pair, t_min, t_max, points, linear } => {
            corr_curve(file, pair, *t_min, *t_max, *points, *linear, format)
        }
        Command::Tables { file } => tables(file, format),
        Command::McCheck { file, t, samples, workers, dump_samples } => {
            mc_check(file, t, *samples, *workers, dump_samples.as_deref(), cli.seed, format)
        }
        Command::Moments { file, t } => moments(file, *t, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(body) => match emit(body, cli.output.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            1
        }
        Err(Failure::Report { body, summary }) => {
            eprintln!("{summary}");
            match emit(body, cli.output.as_deref()) {
                Ok(()) => 1,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    ExitCode::from(code)
}
