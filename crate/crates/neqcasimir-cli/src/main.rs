use clap::{Parser, Subcommand, ValueEnum};
use neqcasimir::cli::{
    self, ampere_force_per_length, find_zeros, parse_output, parse_quantity, weight_per_length, CliError, Scenario,
    Target, CURRENT_UNITS, LENGTH_UNITS,
};
use neqcasimir::materials::MaterialFile;
use neqcasimir::reference::{conductor_equilibrium, dielectric_equilibrium, log_grid, tabulate};
use neqcasimir::tmatrix::ProviderKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "neqcasimir", version, about = "Non-equilibrium Casimir forces between parallel cylinders")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Provider {
    Thin,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum StandIn {
    /// Line-summed retarded + classical pair forces for polar dielectrics.
    Dielectric,
    /// `-C / (d^4 ln(d/R))` calibrated to the classical perfect-conductor force at lambda_T / 2.
    Conductor,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a scenario and write the force breakdown as CSV.
    Run {
        scenario: PathBuf,
        /// Output file; defaults to the scenario's `output` field, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        provider: Option<Provider>,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Locate and classify zero crossings of the net force in a run output.
    Zeros {
        csv: PathBuf,
        /// Cylinder whose net force is analysed (1 or 2).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        cylinder: u8,
    },
    /// Weight of a cylinder per length, optionally against a computed force.
    CompareWeight {
        /// Density in kg/m^3.
        #[arg(long)]
        density: f64,
        /// Radius with unit, e.g. `20nm`.
        #[arg(long)]
        radius: String,
        #[command(flatten)]
        against: Against,
    },
    /// Ampere force between two current-carrying wires, optionally against a computed force.
    CompareAmpere {
        /// Current with unit, e.g. `17uA`.
        #[arg(long)]
        i1: String,
        #[arg(long)]
        i2: String,
        /// Wire separation with unit, e.g. `0.4um`.
        #[arg(long)]
        d: String,
        #[command(flatten)]
        against: Against,
    },
    /// Tabulate a closed-form equilibrium estimate as `d_m,F_eq_N_per_m` CSV.
    StandIn {
        #[arg(long, value_enum)]
        kind: StandIn,
        /// Material file (dielectric estimate only).
        #[arg(long)]
        material: Option<PathBuf>,
        #[arg(long)]
        radius: String,
        /// Temperature in K.
        #[arg(long)]
        temperature: f64,
        #[arg(long)]
        start: String,
        #[arg(long)]
        stop: String,
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Against {
    /// Length over which forces are quoted, e.g. `1um`.
    #[arg(long, default_value = "1um")]
    length: String,
    /// Scenario whose non-equilibrium force on cylinder 1 is compared.
    #[arg(long, requires = "at")]
    scenario: Option<PathBuf>,
    /// Separation at which the scenario is evaluated, e.g. `0.4um`.
    #[arg(long)]
    at: Option<String>,
    /// Case label in the scenario; defaults to the first case.
    #[arg(long)]
    case: Option<String>,
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| io_error(path, e))?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_comparison(label: &str, per_length: f64, against: &Against) -> Result<(), CliError> {
    let length = parse_quantity(&against.length, &LENGTH_UNITS)?;
    println!("{label}_N_per_m,{per_length:.6e}");
    println!("{label}_N_over_length,{:.6e}", per_length * length);
    if let (Some(path), Some(at)) = (&against.scenario, &against.at) {
        let scenario = Scenario::load(path)?;
        let d = parse_quantity(at, &LENGTH_UNITS)?;
        let case = match &against.case {
            Some(label) => scenario
                .case(label)
                .ok_or_else(|| CliError::Field { field: "case".into(), message: format!("no case `{label}`") })?,
            None => &scenario.cases[0],
        };
        let b = scenario.evaluate(case, d)?;
        let noneq = b.total_1 - b.eq;
        println!("nonequilibrium_N_per_m,{noneq:.6e}");
        println!("nonequilibrium_N_over_length,{:.6e}", noneq * length);
        println!("ratio,{:.6e}", noneq.abs() / per_length.abs());
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, out, provider, rel_tol } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(p) = provider {
                s = s.with_provider(match p {
                    Provider::Thin => ProviderKind::Thin,
                    Provider::Full => ProviderKind::Full,
                });
            }
            if let Some(tol) = rel_tol {
                s = s.with_rel_tol(tol)?;
            }
            let rows = cli::run(&s)?;
            let text = cli::to_csv(&s, &rows)?;
            let target = out.or_else(|| s.output.as_ref().map(PathBuf::from));
            write_output(target.as_deref(), &text)
        }
        Command::Zeros { csv, cylinder } => {
            let text = std::fs::read_to_string(&csv).map_err(|e| io_error(&csv, e))?;
            let (scenario, rows) = parse_output(&text, &csv.display().to_string())?;
            let target = if cylinder == 1 { Target::Cylinder1 } else { Target::Cylinder2 };
            let zeros = find_zeros(&scenario, &rows, target)?;
            println!("case,d_m,stability,bracket_low_m,bracket_high_m");
            for z in zeros {
                let stability = match z.stability {
                    cli::Stability::Stable => "stable",
                    cli::Stability::Unstable => "unstable",
                };
                println!("{},{:.6e},{stability},{:.6e},{:.6e}", cli::csv_text(&z.case), z.d, z.bracket.0, z.bracket.1);
            }
            Ok(())
        }
        Command::CompareWeight { density, radius, against } => {
            let r = parse_quantity(&radius, &LENGTH_UNITS)?;
            report_comparison("weight", weight_per_length(density, r)?, &against)
        }
        Command::CompareAmpere { i1, i2, d, against } => {
            let i1 = parse_quantity(&i1, &CURRENT_UNITS)?;
            let i2 = parse_quantity(&i2, &CURRENT_UNITS)?;
            let d = parse_quantity(&d, &LENGTH_UNITS)?;
            report_comparison("ampere", ampere_force_per_length(i1, i2, d)?, &against)
        }
        Command::StandIn { kind, material, radius, temperature, start, stop, points, out } => {
            let r = parse_quantity(&radius, &LENGTH_UNITS)?;
            let grid = log_grid(parse_quantity(&start, &LENGTH_UNITS)?, parse_quantity(&stop, &LENGTH_UNITS)?, points);
            let table = match kind {
                StandIn::Dielectric => {
                    let path = material.ok_or_else(|| CliError::Field {
                        field: "material".into(),
                        message: "required for the dielectric estimate".into(),
                    })?;
                    let model = MaterialFile::load(&path)?.to_model()?;
                    tabulate(&grid, |d| dielectric_equilibrium(r, r, &model, temperature, d))?
                }
                StandIn::Conductor => tabulate(&grid, |d| conductor_equilibrium(r, temperature, d))?,
            };
            write_output(out.as_deref(), &table.to_csv())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,neqcasimir::engine=error")).init();
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
