use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nexus_opt::{cmd_compare, cmd_front_dump, cmd_run, CompareOptions, DumpOptions, ExperimentConfig, Format, HvChoice, Overrides};

#[derive(Parser)]
#[command(name = "nexus-opt", version, about = "Food-energy-water nexus optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every selected variant for the configured number of seeds.
    Run(RunArgs),
    /// Tabulate one or more result directories against each other.
    Compare(CompareArgs),
    /// Print or save the final front of one run.
    FrontDump(DumpArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    runs: Option<usize>,
    #[arg(long, value_name = "N")]
    budget: Option<usize>,
    /// Repeat to select several variants.
    #[arg(long = "variant", value_name = "NAME")]
    variants: Vec<String>,
    #[arg(long, value_enum)]
    hv: Option<HvChoice>,
    #[arg(long, value_name = "N")]
    mc_samples: Option<usize>,
    /// Machine-readable summary written next to summary.md.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(required = true, value_name = "DIR")]
    dirs: Vec<PathBuf>,
    #[arg(long, value_name = "NAME")]
    champion: Option<String>,
    #[arg(long)]
    level: Option<f64>,
    /// Recompute every HV with this method instead of using stored values.
    #[arg(long, value_enum)]
    hv: Option<HvChoice>,
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    mc_samples: usize,
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Also write comparison.md and comparison.<format> here.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(value_name = "DIR")]
    dir: PathBuf,
    #[arg(long, value_name = "NAME")]
    variant: String,
    #[arg(long, value_name = "N", default_value_t = 0)]
    run: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Objectives mapped into [0, 1] by the experiment's reference box.
    #[arg(long)]
    normalized: bool,
    /// Append the decision vectors.
    #[arg(long)]
    decisions: bool,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output", value_name = "FILE")]
    output: Option<PathBuf>,
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let mut config = match &args.config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            Overrides {
                out: args.out,
                seed: args.seed,
                runs: args.runs,
                budget: args.budget,
                variants: args.variants,
                hv: args.hv,
                mc_samples: args.mc_samples,
            }
            .apply(&mut config);
            let report = cmd_run(&config, args.format)?;
            print!("{}", report.table.to_markdown());
            eprintln!("results written to {}", report.out.display());
        }
        Command::Compare(args) => {
            let options = CompareOptions {
                champion: args.champion,
                level: args.level,
                hv: args.hv.map(|h| h.method(args.mc_samples, args.seed)),
                out: args.out,
                format: args.format,
            };
            let report = cmd_compare(&args.dirs, &options)?;
            print!("{}", report.table.to_markdown());
            if report.recomputed {
                eprintln!("HV recomputed from the front files");
            }
        }
        Command::FrontDump(args) => {
            let bytes = cmd_front_dump(
                &args.dir,
                &DumpOptions {
                    variant: args.variant,
                    run: args.run,
                    format: args.format,
                    normalized: args.normalized,
                    decisions: args.decisions,
                },
            )?;
            match &args.output {
                Some(path) => nexus_opt::io::write_atomic(path, &bytes)?,
                None => std::io::stdout()
                    .write_all(&bytes)
                    .context("writing to standard output")?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
