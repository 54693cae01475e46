use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sosdw::bench::{self, BenchPlan};
use sosdw::report::{compute, error_json, JobConfig};
use sosdw::verify::{run_suite, Suite};
use sosdw::{Route, SosError};

#[derive(Parser)]
#[command(name = "sosdw", version, about = "Partition function of the trigonometric SOS model with domain wall boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Z by every route listed in a JSON job file.
    Compute {
        #[arg(long)]
        config: PathBuf,
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        /// Leave wall times out of the report.
        #[arg(long)]
        no_timings: bool,
    },
    /// Run one seeded identity suite.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long)]
        json: bool,
    },
    /// Time the routes over a range of lattice sizes.
    Bench {
        #[arg(long)]
        lmin: usize,
        #[arg(long)]
        lmax: usize,
        /// Comma-separated route names.
        #[arg(long, value_delimiter = ',', value_parser = parse_route)]
        routes: Vec<Route>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Fixed quadrature node count instead of adaptive doubling.
        #[arg(long)]
        nodes: Option<usize>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite '{s}' (expected one of {})", names.join(", "))
    })
}

fn parse_route(s: &str) -> Result<Route, String> {
    Route::parse(s).filter(|r| *r != Route::Functional).ok_or_else(|| format!("unknown route '{s}'"))
}

const EXIT_NUMERICAL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

fn fail(err: &SosError, json: bool) -> ExitCode {
    if json {
        println!("{}", error_json(err));
    } else {
        eprintln!("error [{}]: {err}", err.kind());
    }
    ExitCode::from(if err.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { config, json, no_timings } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    return fail(&SosError::InvalidArgument(format!("{}: {e}", config.display())), json);
                }
            };
            let report = JobConfig::from_json(&text).and_then(|cfg| compute(&cfg, !no_timings));
            match report {
                Ok(rep) if json => {
                    println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
                    ExitCode::SUCCESS
                }
                Ok(rep) => {
                    print!("{}", rep.to_table());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, json),
            }
        }
        Command::Verify { suite, seed, draws, json } => match run_suite(suite, seed, draws) {
            Ok(rep) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
                } else {
                    print!("{}", rep.to_table());
                }
                if rep.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_NUMERICAL)
                }
            }
            Err(e) => fail(&e, json),
        },
        Command::Bench { lmin, lmax, routes, csv, seed, nodes } => {
            let plan = BenchPlan { lmin, lmax, routes, seed, nodes };
            let rows = match bench::run(&plan) {
                Ok(r) => r,
                Err(e) => return fail(&e, false),
            };
            let written = match &csv {
                Some(path) => fs::File::create(path).and_then(|f| bench::write_csv(&rows, f)),
                None => bench::write_csv(&rows, std::io::stdout().lock()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write CSV: {e}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            if csv.is_some() {
                for r in &rows {
                    println!("{:<12} L={:<2} {:>10} {:>12.3} ms", r.route.name(), r.size, r.nodes_or_terms, r.wall_ms);
                }
            }
            ExitCode::SUCCESS
        }
    }
}
