//! `epj-sim`: run, compare and sweep jumps of the sprung-joint robot.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use epj_core::config::load_scenario_file;
use epj_core::dynamics::{simulate_aerial, simulate_rigid};
use epj_core::export::{sweep_csv, trajectory_csv};
use epj_core::sweep::{find_zero_crossing, trend_report};
use epj_core::{
    default_reference_scenario, evaluate, run_sweep, DesignParameter, EpjError, ErrorClass,
    Scenario, SweepSpec,
};

use report::{root_csv, root_text, summary_line, trend_text, ComparisonReport};

const THREADS_VAR: &str = "EPJ_SIM_THREADS";

#[derive(Parser)]
#[command(
    name = "epj-sim",
    version,
    about = "Aerial-phase simulator for a jumping robot with a sprung, relatching leg joint"
)]
struct Cli {
    /// Scenario TOML; the built-in reference jump when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Where to write the CSV; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Accepted for scripts; every command is deterministic and uses no RNG.
    #[arg(long, global = true)]
    seedless_deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one jump and write its trajectory.
    Run {
        /// Override the config's joint switch.
        #[arg(long, value_enum)]
        epj: Option<Switch>,
    },
    /// Same launch with and without the joint, side by side.
    Compare,
    /// Evaluate a design parameter over an inclusive grid.
    Sweep {
        #[arg(value_parser = parse_parameter)]
        parameter: DesignParameter,
        /// Lower bound (mm for joint_x/joint_y, N/m for stiffness_k).
        #[arg(allow_negative_numbers = true)]
        lower: f64,
        #[arg(allow_negative_numbers = true)]
        upper: f64,
        points: usize,
    },
    /// Bisect for the parameter value where the robot lands without spinning.
    Optimize {
        #[arg(value_parser = parse_parameter)]
        parameter: DesignParameter,
        #[arg(allow_negative_numbers = true)]
        lower: f64,
        #[arg(allow_negative_numbers = true)]
        upper: f64,
    },
}

fn parse_parameter(s: &str) -> Result<DesignParameter, String> {
    DesignParameter::parse(s).ok_or_else(|| {
        let names: Vec<_> = DesignParameter::ALL.iter().map(|p| p.name()).collect();
        format!(
            "unknown parameter `{s}`, expected one of {}",
            names.join(", ")
        )
    })
}

#[derive(Debug)]
enum Failure {
    Model(EpjError),
    Usage(String),
}

impl From<EpjError> for Failure {
    fn from(e: EpjError) -> Self {
        Failure::Model(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Model(e) => match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Simulation => 3,
                ErrorClass::Bracket => 4,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Model(e) => write!(f, "{e}"),
            Failure::Usage(m) => f.write_str(m),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: Option<&Path>) -> Result<Scenario, Failure> {
    match path {
        Some(p) => Ok(load_scenario_file(p)?),
        None => Ok(default_reference_scenario()),
    }
}

/// Sends the CSV to `out`, or to stdout; reports go to stderr in that case
/// so the CSV stays clean.
struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn csv(&self, body: &str) -> Outcome {
        match &self.path {
            Some(p) => std::fs::write(p, body)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }

    fn report(&self, text: &str) {
        if self.path.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    }
}

fn cmd_run(scenario: Scenario, epj: Option<Switch>, out: &Output) -> Outcome {
    let scenario = match epj {
        Some(Switch::On) => Scenario {
            epj_enabled: true,
            ..scenario
        },
        Some(Switch::Off) => scenario.rigid_baseline(),
        None => scenario,
    };
    let traj = if scenario.epj_enabled {
        simulate_aerial(&scenario)?
    } else {
        simulate_rigid(&scenario)?
    };
    let metrics = evaluate(&scenario)?;
    out.csv(&trajectory_csv(&traj, &scenario)?)?;
    out.report(&format!("{}\n", summary_line(&metrics)));
    Ok(())
}

fn cmd_compare(scenario: Scenario, out: &Output) -> Outcome {
    let with = Scenario {
        epj_enabled: true,
        ..scenario
    };
    let without = with.rigid_baseline();
    let report = ComparisonReport::new(evaluate(&with)?, evaluate(&without)?);
    if out.path.is_some() {
        out.csv(&report.csv(&with, &without))?;
    }
    print!("{}", report.human());
    Ok(())
}

fn to_si(p: DesignParameter, v: f64) -> f64 {
    v / p.display_scale()
}

fn spec(base: Scenario, p: DesignParameter, lower: f64, upper: f64, points: usize) -> SweepSpec {
    SweepSpec {
        parameter: p,
        lower: to_si(p, lower),
        upper: to_si(p, upper),
        num_points: points,
        base: Scenario {
            epj_enabled: true,
            ..base
        },
    }
}

fn cmd_sweep(
    base: Scenario,
    p: DesignParameter,
    lower: f64,
    upper: f64,
    points: usize,
    out: &Output,
) -> Outcome {
    let spec = spec(base, p, lower, upper, points);
    let result = run_sweep(&spec)?;
    out.csv(&sweep_csv(&result))?;
    let mut text = match trend_report(&result) {
        Ok(r) => trend_text(&r),
        Err(e) => format!("no trend verdict: {e}\n"),
    };
    for z in &result.zero_crossings {
        text.push_str(&format!("root: {}\n", root_text(p, z)));
    }
    out.report(&text);
    Ok(())
}

fn cmd_optimize(
    base: Scenario,
    p: DesignParameter,
    lower: f64,
    upper: f64,
    out: &Output,
) -> Outcome {
    let spec = spec(base, p, lower, upper, 2);
    spec.validate()?;
    let z = find_zero_crossing(&spec, (spec.lower, spec.upper)).inspect_err(|e| {
        if let EpjError::Bracket {
            f_lower, f_upper, ..
        } = e
        {
            eprintln!(
                "omega_end is {f_lower} rad/s at {} = {lower} and {f_upper} rad/s at {upper}",
                p.name()
            );
        }
    })?;
    if out.path.is_some() {
        out.csv(&root_csv(p, &z))?;
    }
    println!("{}", root_text(p, &z));
    Ok(())
}

fn configure_threads() -> Outcome {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Failure::Usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Outcome {
    configure_threads()?;
    let scenario = load(cli.config.as_deref())?;
    let out = Output { path: cli.out };
    match cli.command {
        Command::Run { epj } => cmd_run(scenario, epj, &out),
        Command::Compare => cmd_compare(scenario, &out),
        Command::Sweep {
            parameter,
            lower,
            upper,
            points,
        } => cmd_sweep(scenario, parameter, lower, upper, points, &out),
        Command::Optimize {
            parameter,
            lower,
            upper,
        } => cmd_optimize(scenario, parameter, lower, upper, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("epj-sim: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
