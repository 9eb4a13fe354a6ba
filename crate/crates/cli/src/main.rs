use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinbath::xcli::{compare_files, exit, list_scenarios, load_scenario, run, OutputKind, RunOptions};

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Spin-bath dynamics scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario file.
    Run {
        /// Registry name or path to a `.scn` file.
        scenario: String,
        /// Comma-separated outputs overriding the scenario's list.
        #[arg(long = "out")]
        outputs: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo trajectory count.
        #[arg(long = "traj")]
        n_traj: Option<usize>,
        /// Output directory; defaults to `out/<scenario>`.
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// Compare two CSV results column by column.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tol: f64,
    },
    /// List built-in scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { 0 });
        }
    };
    ExitCode::from(dispatch(cli.command) as u8)
}

fn dispatch(cmd: Command) -> i32 {
    match cmd {
        Command::List => {
            println!("{:<24} {:<11} {:<24} {:>8}  description", "name", "engine", "molecule", "budget_s");
            for s in list_scenarios() {
                let tag = if s.qualitative { " [qualitative]" } else { "" };
                println!(
                    "{:<24} {:<11} {:<24} {:>8}  {}{tag}",
                    s.name,
                    s.engine.name(),
                    s.molecule,
                    s.budget_s,
                    s.description
                );
            }
            exit::OK
        }
        Command::Compare { a, b, tol } => match compare_files(&a, &b, tol) {
            Ok(report) => {
                print!("{}", report.render());
                if report.passed() {
                    exit::OK
                } else {
                    exit::MISMATCH
                }
            }
            Err(e) => {
                eprintln!("spinbath compare: {e}");
                e.exit_code()
            }
        },
        Command::Run {
            scenario,
            outputs,
            seed,
            n_traj,
            outdir,
        } => {
            let outputs = match outputs.as_deref().map(OutputKind::parse_list).transpose() {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("spinbath run: --out: {e}");
                    return exit::CONFIG;
                }
            };
            let result = load_scenario(&scenario).and_then(|cfg| {
                let dir = outdir.unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
                run(&cfg, &RunOptions { outputs, seed, n_traj }, &dir)
            });
            match result {
                Ok(outcome) => {
                    for note in &outcome.manifest.notes {
                        eprintln!("note: {note}");
                    }
                    println!(
                        "{}: {} files written to {} in {:.2} s",
                        outcome.manifest.scenario,
                        outcome.manifest.files.len(),
                        outcome.outdir.display(),
                        outcome.manifest.elapsed_s
                    );
                    exit::OK
                }
                Err(e) => {
                    eprintln!("spinbath run: {}", e.to_string().replace('\n', " "));
                    e.exit_code()
                }
            }
        }
    }
}
