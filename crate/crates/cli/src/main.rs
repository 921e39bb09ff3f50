use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use hsflow::datum::{demo_atom, demo_cantor, demo_intro};
use hsflow::verify::DEFAULT_CELLS;
use hsflow::Tolerances;
use hsflow_cli::{
    atoms_csv, atoms_path, demo_text, evolve_report, load_datum, samples_csv, semigroup_report,
    semigroup_table, singular_report, singular_table, to_json, verify_report, verify_table,
    write_atomic, Config, Suite, VerifyOptions, DEFAULT_CHECK_TOLERANCE,
};

#[derive(Parser)]
#[command(
    name = "hsflow",
    version,
    about = "Exact conservative Hunter-Saxton evolution"
)]
struct Cli {
    /// Slopes at or below this are treated as flat.
    #[arg(long, global = true)]
    tol_slope: Option<f64>,

    /// Abscissae closer than this are treated as coincident.
    #[arg(long, global = true)]
    tol_x: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Conservation,
    Weak,
    Ode,
    Structure,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Intro,
    Atom,
    Cantor,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a datum to time t and emit u samples and the energy measure.
    Evolve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "time", allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Defaults to stdout. CSV writes atoms next to it as `<stem>.atoms.csv`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the times at which energy concentrates into atoms.
    Singular {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Restart at s and compare with direct evolution to t.
    Semigroup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_CHECK_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run verification suites on a datum.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CELLS)]
        cells: usize,
        /// Time step of the characteristic ODE difference quotient.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_CHECK_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Write one of the built-in data as a datum file.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut tolerances = Tolerances::default();
    if let Some(v) = cli.tol_slope {
        tolerances.tol_slope = v;
    }
    if let Some(v) = cli.tol_x {
        tolerances.tol_x = v;
    }
    let mut config = Config::new(tolerances);

    match cli.command {
        Command::Evolve {
            input,
            t,
            samples,
            format,
            output,
        } => {
            let report = evolve_report(&load_datum(&input)?, &config, t, samples)?;
            match (format, output) {
                (Format::Json, output) => emit(output.as_ref(), &to_json(&report))?,
                (Format::Csv, Some(path)) => {
                    write_atomic(&path, &samples_csv(&report))?;
                    write_atomic(&atoms_path(&path), &atoms_csv(&report))?;
                }
                (Format::Csv, None) => {
                    print!("{}\n{}", samples_csv(&report), atoms_csv(&report));
                }
            }
            Ok(true)
        }
        Command::Singular { input, json } => {
            let report = singular_report(&load_datum(&input)?, &config)?;
            if json {
                print!("{}", to_json(&report));
            } else {
                print!("{}", singular_table(&report));
            }
            Ok(true)
        }
        Command::Semigroup {
            input,
            s,
            t,
            tol,
            seed,
            json,
        } => {
            config.seed = Some(seed);
            let report = semigroup_report(&load_datum(&input)?, &config, s, t, tol)?;
            if json {
                print!("{}", to_json(&report));
            } else {
                print!("{}", semigroup_table(&report));
            }
            if !report.passed {
                eprintln!(
                    "failing check: semigroup (max deviation {:e})",
                    report.max_deviation
                );
            }
            Ok(report.passed)
        }
        Command::Verify {
            input,
            suite,
            seed,
            cells,
            step,
            tol,
            json,
        } => {
            config.seed = Some(seed);
            let suite = match suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Conservation => Suite::Conservation,
                SuiteArg::Weak => Suite::Weak,
                SuiteArg::Ode => Suite::Ode,
                SuiteArg::Structure => Suite::Structure,
                SuiteArg::Oracle => Suite::Oracle,
            };
            let options = VerifyOptions {
                suite,
                cells,
                step,
                tolerance: tol,
            };
            let report = verify_report(&load_datum(&input)?, &config, &options)?;
            if json {
                print!("{}", to_json(&report));
            } else {
                print!("{}", verify_table(&report));
            }
            for c in report.failing() {
                eprintln!(
                    "failing check: {} (max error {:e} > {:e})",
                    c.name, c.max_error, c.tolerance
                );
            }
            Ok(report.passed)
        }
        Command::Demo {
            name,
            mass,
            depth,
            output,
        } => {
            let datum = match name {
                DemoName::Intro => demo_intro(),
                DemoName::Atom => demo_atom(mass)?,
                DemoName::Cantor => demo_cantor(depth)?,
            };
            emit(output.as_ref(), &demo_text(&datum))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
