use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use dynphase::engine::SolveOutcome;
use dynphase::harness::{self, FuzzSpec, HarnessError};
use dynphase::phase::{PhaseConfig, Scheme, SchedulerKind, SchedulerThresholds};
use dynphase::SolverConfig;

#[derive(Parser)]
#[command(name = "dynphase", version, about = "CDCL SAT solver with dynamic phase selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS file. Exit code 10 = SAT, 20 = UNSAT, 0 = UNKNOWN.
    Solve {
        file: PathBuf,
        /// Print solver statistics as comment lines.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve every .cnf file of a directory and write a CSV.
    Suite {
        dir: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Cross-check the solver against brute force on random 3-CNF.
    Fuzz {
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        min_vars: usize,
        #[arg(long, default_value_t = 20)]
        max_vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run every scheme under the fixed scheduler plus both schedulers,
        /// instead of only the configured solver.
        #[arg(long)]
        all_schemes: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print solved counts and average times of harness CSVs side by side.
    Summary { csv: Vec<PathBuf> },
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "glucose")]
    phase_scheduler: SchedulerKind,
    /// Scheme for `--phase-scheduler fixed`.
    #[arg(long, default_value = "f-all-save")]
    phase_scheme: Scheme,
    /// Multiplies the scheduler's conflict and literal-count thresholds.
    #[arg(long, default_value_t = 1.0)]
    threshold_scale: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=1))]
    oddeven_origin: u32,
    #[arg(long, default_value_t = dynphase::weights::DEFAULT_REFRESH_CONFLICTS)]
    weight_refresh_conflicts: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    conflict_budget: Option<u64>,
    /// Conflicts per unit of the Luby restart sequence.
    #[arg(long, default_value_t = 100)]
    restart_unit: u64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            phase: PhaseConfig {
                scheduler: self.phase_scheduler,
                fixed_scheme: self.phase_scheme,
                thresholds: SchedulerThresholds::scaled(self.threshold_scale),
                oddeven_origin: self.oddeven_origin,
                ..PhaseConfig::default()
            },
            weight_refresh_conflicts: self.weight_refresh_conflicts,
            time_limit: self.timeout.map(Duration::from_secs_f64),
            conflict_budget: self.conflict_budget,
            restart_unit: self.restart_unit,
            ..SolverConfig::default()
        }
    }
}

fn print_model(out: &mut impl Write, model: &[bool]) -> io::Result<()> {
    writeln!(out, "s SATISFIABLE")?;
    let mut line = String::from("v");
    for (i, &value) in model.iter().enumerate() {
        let lit = if value { i as i64 + 1 } else { -(i as i64 + 1) };
        line.push(' ');
        line.push_str(&lit.to_string());
        if line.len() > 70 {
            writeln!(out, "{line}")?;
            line = String::from("v");
        }
    }
    writeln!(out, "{line} 0")
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |source| HarnessError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match cli.command {
        Command::Solve {
            file,
            stats,
            solver,
        } => {
            let result = harness::run_one(&file, &solver.config())?;
            if stats {
                writeln!(out, "{}", result.stats).map_err(io_err)?;
                writeln!(out, "c wall-time-s  {:.6}", result.record.wall_time_s).map_err(io_err)?;
                writeln!(out, "c schemes      {}", result.record.scheme_digest).map_err(io_err)?;
            }
            let code = match &result.outcome {
                SolveOutcome::Sat(model) => {
                    print_model(&mut out, model).map_err(io_err)?;
                    10
                }
                SolveOutcome::Unsat => {
                    writeln!(out, "s UNSATISFIABLE").map_err(io_err)?;
                    20
                }
                SolveOutcome::Unknown(_) => {
                    writeln!(out, "s UNKNOWN").map_err(io_err)?;
                    0
                }
            };
            Ok(ExitCode::from(code))
        }
        Command::Suite {
            dir,
            csv,
            jobs,
            solver,
        } => {
            let report = harness::run_suite(&dir, &solver.config(), jobs)?;
            match csv {
                Some(path) => {
                    let file = File::create(&path).map_err(|source| HarnessError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    harness::write_csv(BufWriter::new(file), &report.records)?;
                }
                None => harness::write_csv(&mut out, &report.records)?,
            }
            eprintln!("{}", report.summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz {
            count,
            min_vars,
            max_vars,
            seed,
            all_schemes,
            solver,
        } => {
            let spec = FuzzSpec {
                count,
                min_vars,
                max_vars,
                seed,
                ..FuzzSpec::default()
            };
            let base = solver.config();
            let configs = if all_schemes {
                fuzz_matrix(&base)
            } else {
                vec![("configured".to_string(), base)]
            };
            let report = harness::fuzz(&spec, &configs)?;
            writeln!(out, "{report}").map_err(io_err)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Summary { csv } => {
            let mut runs = Vec::new();
            for path in &csv {
                let file = File::open(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                runs.push((path.display().to_string(), harness::read_csv(file)?));
            }
            let borrowed: Vec<(&str, &[_])> =
                runs.iter().map(|(l, r)| (l.as_str(), r.as_slice())).collect();
            write!(out, "{}", harness::comparison_table(&borrowed)).map_err(io_err)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn fuzz_matrix(base: &SolverConfig) -> Vec<(String, SolverConfig)> {
    let mut configs: Vec<(String, SolverConfig)> = Scheme::ALL
        .iter()
        .map(|&scheme| {
            let mut config = base.clone();
            config.phase.scheduler = SchedulerKind::Fixed;
            config.phase.fixed_scheme = scheme;
            (scheme.to_string(), config)
        })
        .collect();
    for (name, kind) in [
        ("glucose", SchedulerKind::GlucoseStyle),
        ("lingeling", SchedulerKind::LingelingStyle),
    ] {
        let mut config = base.clone();
        config.phase.scheduler = kind;
        configs.push((name.to_string(), config));
    }
    configs
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err @ HarnessError::ModelVerificationFailed { .. }) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
