//! Command-line front door: load a game, solve it, classify it, sweep the
//! honeypot fraction, calibrate timing detectors, verify claimed equilibria.
//!
//! JSON goes to stdout with every float printed at 12 significant digits so
//! runs diff cleanly; errors go to stderr as a JSON object. Exit codes:
//! 0 success, 1 validation error, 2 solver failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use sigev_core::analytic::{classify_payoff_region, cb_constants, DEFAULT_BOUNDARY_TOL};
use sigev_core::detector::{rates_from_threshold, threshold_sweep, Threshold, TimingModel};
use sigev_core::fmt::sig12;
use sigev_core::numeric::{
    classify_detector, enumerate_pure_pbe_with_tol, solve_mixed_pbe, verify_pbe, SolveOptions,
    DEFAULT_DEVIATION_TOL,
};
use sigev_core::sweep::{detector_benefit, grid_of, sweep_prior, sweep_to_csv, transition_prior};
use sigev_core::{sort_equilibria, Equilibrium, GameError, GameSpec};

#[derive(Parser)]
#[command(name = "sigev", version, about = "Signaling-game equilibrium solver for honeypot defense with deception detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game: pure-strategy equilibria, optionally mixed ones too
    Solve {
        /// Game spec JSON file
        #[arg(long)]
        game: PathBuf,
        /// Also run the mixed-strategy support-enumeration solver
        #[arg(long)]
        mixed: bool,
        /// Deviation-gain tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Report CB constants, payoff region, transition prior, detector region
    Classify {
        #[arg(long)]
        game: PathBuf,
    },
    /// Equilibrium-utility curve over the prior, as CSV on stdout
    Sweep {
        #[arg(long)]
        game: PathBuf,
        /// Number of evenly spaced grid points over [0, 1]
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Emit the defender's with/without-detector comparison instead
        #[arg(long)]
        compare_no_detector: bool,
    },
    /// Map a Gaussian timing model to (epsilon, delta), or sweep thresholds
    Detector {
        /// Timing model JSON file: { mu0, sigma0, mu1, sigma1, t_d }
        #[arg(long)]
        timing: PathBuf,
        /// ROC sweep over thresholds LO:HI:STEP, as CSV on stdout
        #[arg(long, value_name = "LO:HI:STEP")]
        sweep_thresholds: Option<String>,
    },
    /// Check a claimed equilibrium against the game
    Verify {
        #[arg(long)]
        game: PathBuf,
        /// Equilibrium JSON file (an object or a list, as emitted by solve)
        #[arg(long)]
        equilibrium: PathBuf,
        /// Deviation-gain tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// JSON with every f64 rendered at 12 significant digits.
struct Sig12Formatter;

impl serde_json::ser::Formatter for Sig12Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{}", sig12(value))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig12Formatter);
    value.serialize(&mut ser).expect("value serializes");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

fn read_file(path: &Path) -> Result<String, GameError> {
    std::fs::read_to_string(path)
        .map_err(|e| GameError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<GameSpec, GameError> {
    GameSpec::from_json(&read_file(path)?)
}

#[derive(Deserialize)]
struct TimingFile {
    mu0: f64,
    sigma0: f64,
    mu1: f64,
    sigma1: f64,
    #[serde(default)]
    t_d: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EquilibriumFile {
    One(Box<Equilibrium>),
    Many(Vec<Equilibrium>),
}

fn parse_threshold_range(text: &str) -> Result<Vec<f64>, GameError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || GameError::Validation(format!("expected LO:HI:STEP, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && hi >= lo) {
        return Err(GameError::Validation(format!(
            "threshold range needs hi >= lo and step > 0, got {text:?}"
        )));
    }
    let mut grid = Vec::new();
    let mut t = lo;
    while t <= hi + 1e-9 * step {
        grid.push(t);
        t += step;
    }
    Ok(grid)
}

fn run(cli: Cli) -> Result<(), GameError> {
    let mut stdout = std::io::stdout().lock();
    let emit = |stdout: &mut std::io::StdoutLock<'_>, text: &str| {
        writeln!(stdout, "{text}").map_err(|e| GameError::Validation(format!("stdout: {e}")))
    };
    match cli.command {
        Command::Solve { game, mixed, tol } => {
            let spec = load_game(&game)?;
            let tol = tol.unwrap_or(DEFAULT_DEVIATION_TOL);
            let mut eqs = enumerate_pure_pbe_with_tol(&spec, tol);
            if mixed {
                let opts = SolveOptions {
                    deviation_tol: tol,
                    ..SolveOptions::default()
                };
                eqs.extend(solve_mixed_pbe(&spec, &opts)?);
                eqs = sort_equilibria(eqs);
            }
            emit(&mut stdout, &to_json(&eqs))
        }
        Command::Classify { game } => {
            let spec = load_game(&game)?;
            let (cb0, cb1) = cb_constants(&spec.payoffs);
            let region = classify_payoff_region(&spec, DEFAULT_BOUNDARY_TOL);
            let detector_region = spec
                .detector
                .as_ref()
                .and_then(|d| classify_detector(d, DEFAULT_BOUNDARY_TOL).ok());
            let report = json!({
                "p0": spec.prior.p0(),
                "cb0": cb0,
                "cb1": cb1,
                "payoff_region": region.label,
                "lhs": region.lhs,
                "rhs": region.rhs,
                "p0_star": transition_prior(&spec.payoffs).ok(),
                "detector_region": detector_region,
            });
            emit(&mut stdout, &to_json(&report))
        }
        Command::Sweep {
            game,
            grid,
            compare_no_detector,
        } => {
            if grid < 2 {
                return Err(GameError::Validation(format!(
                    "grid needs at least 2 points, got {grid}"
                )));
            }
            let spec = load_game(&game)?;
            let points = grid_of(grid);
            if compare_no_detector {
                let det = spec.detector.as_ref().ok_or_else(|| {
                    GameError::Validation(
                        "--compare-no-detector requires a detector in the game file".to_string(),
                    )
                })?;
                let rows = detector_benefit(&spec.payoffs, det, &points)?;
                let mut csv = String::from("p0,U_S_with,U_S_without,benefit,ambiguous\n");
                for r in rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        sig12(r.p0),
                        sig12(r.u_s_with),
                        sig12(r.u_s_without),
                        sig12(r.benefit),
                        r.ambiguous
                    ));
                }
                write!(stdout, "{csv}")
                    .map_err(|e| GameError::Validation(format!("stdout: {e}")))
            } else {
                let result = sweep_prior(&spec.payoffs, spec.detector.as_ref(), &points)?;
                write!(stdout, "{}", sweep_to_csv(&result))
                    .map_err(|e| GameError::Validation(format!("stdout: {e}")))
            }
        }
        Command::Detector {
            timing,
            sweep_thresholds,
        } => {
            let file: TimingFile = serde_json::from_str(&read_file(&timing)?)
                .map_err(|e| GameError::Validation(format!("bad timing JSON: {e}")))?;
            let model = TimingModel::new(file.mu0, file.sigma0, file.mu1, file.sigma1)?;
            match sweep_thresholds {
                Some(range) => {
                    let rows = threshold_sweep(&model, &parse_threshold_range(&range)?)?;
                    let mut csv = String::from("t_d,delta,epsilon\n");
                    for (t, d, e) in rows {
                        csv.push_str(&format!("{},{},{}\n", sig12(t), sig12(d), sig12(e)));
                    }
                    write!(stdout, "{csv}")
                        .map_err(|e| GameError::Validation(format!("stdout: {e}")))
                }
                None => {
                    let t_d = file.t_d.ok_or_else(|| {
                        GameError::Validation(
                            "timing JSON needs t_d (or pass --sweep-thresholds)".to_string(),
                        )
                    })?;
                    let (delta, epsilon) = rates_from_threshold(&model, Threshold::new(t_d)?);
                    let det = sigev_core::DetectorModel::symmetric(epsilon, delta)?;
                    let report = json!({
                        "t_d": t_d,
                        "delta": delta,
                        "epsilon": epsilon,
                        "detector_region": classify_detector(&det, DEFAULT_BOUNDARY_TOL).ok(),
                    });
                    emit(&mut stdout, &to_json(&report))
                }
            }
        }
        Command::Verify {
            game,
            equilibrium,
            tol,
        } => {
            let spec = load_game(&game)?;
            let parsed: EquilibriumFile = serde_json::from_str(&read_file(&equilibrium)?)
                .map_err(|e| GameError::Validation(format!("bad equilibrium JSON: {e}")))?;
            let tol = tol.unwrap_or(DEFAULT_DEVIATION_TOL);
            let verdicts: Vec<_> = match parsed {
                EquilibriumFile::One(eq) => vec![verify_pbe(&spec, &eq, tol)],
                EquilibriumFile::Many(eqs) => {
                    eqs.iter().map(|eq| verify_pbe(&spec, eq, tol)).collect()
                }
            };
            emit(&mut stdout, &to_json(&verdicts))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = match &err {
                GameError::SolverFailure(_) => "solver_failure",
                _ => "validation",
            };
            let code = if kind == "solver_failure" { 2 } else { 1 };
            eprintln!(
                "{}",
                json!({ "error": { "kind": kind, "message": err.to_string() } })
            );
            ExitCode::from(code)
        }
    }
}
