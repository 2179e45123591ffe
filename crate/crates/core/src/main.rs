use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bvpair::error::Error;
use bvpair::scenario::{self, float_to_rational};

#[derive(Parser)]
#[command(name = "bvpair", about = "Exact pairing calculus scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and execute a scenario file, writing reports.
    Run {
        /// Scenario JSON file.
        file: PathBuf,
        /// Output directory for the text/JSON/CSV reports.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Tolerance override for quadrature checks.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Number of worker threads for independent checks.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse a scenario file without executing any check.
    Validate { file: PathBuf },
    /// List every registered check with its description.
    ListChecks,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

fn classify_error(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        _ => EXIT_UNSUPPORTED,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListChecks => {
            for (name, description) in scenario::registry() {
                println!("{name:<20} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { file } => match read_and_parse(&file) {
            Ok(sc) => {
                println!("ok: {} ({} checks)", sc.name, sc.checks.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(classify_error(&e))
            }
        },
        Command::Run {
            file,
            out,
            tolerance,
            jobs,
        } => {
            let sc = match read_and_parse(&file) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(classify_error(&e));
                }
            };
            let tol = match tolerance.map(float_to_rational).transpose() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_PARSE);
                }
            };
            let outcome = match scenario::run_scenario(&sc, tol.as_ref(), jobs.max(1)) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(classify_error(&e));
                }
            };
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("error: cannot create {}: {e}", out.display());
                return ExitCode::from(EXIT_UNSUPPORTED);
            }
            let text = outcome.text_report();
            print!("{text}");
            let base = out.join(&outcome.scenario);
            let json =
                serde_json::to_string_pretty(&outcome.json_report()).expect("report is json");
            if let Err(e) = std::fs::write(base.with_extension("txt"), &text)
                .and_then(|_| std::fs::write(base.with_extension("json"), json + "\n"))
            {
                eprintln!("error: cannot write reports: {e}");
                return ExitCode::from(EXIT_UNSUPPORTED);
            }
            for s in &outcome.series {
                let path = out.join(format!("{}.csv", s.name));
                if let Err(e) = std::fs::write(path, scenario::series_csv(s)) {
                    eprintln!("error: cannot write series: {e}");
                    return ExitCode::from(EXIT_UNSUPPORTED);
                }
            }
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
    }
}

fn read_and_parse(path: &PathBuf) -> Result<bvpair::scenario::Scenario, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    scenario::parse_scenario(&text)
}
