//! Command-line front end.
//!
//! Exit codes: 0 on success or a passing check, 1 when a verification or
//! cross-check fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::design::{design_stats, min_sum, min_sum_upper_bound, ResolvableDesign};
use crate::error::{Error, Result};
use crate::factorization::factorize_even;
use crate::kqs::build_kqs;
use crate::kts::build_kts;
use crate::oracle::cross_check;
use crate::placement::{export_plan, plan_from_design, ChunkCatalog, PlanFormat};
use crate::verify::{kind_name, verify_design};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "kirkman", version, about = "Kirkman systems with maximal min-sum and the storage layouts they induce")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a design and write it as JSON.
    Generate {
        #[arg(value_enum)]
        family: Family,
        /// KTS: order 3^K (K >= 1). KQS: order 4*2^K (K >= 0).
        #[arg(long, allow_negative_numbers = true)]
        exponent: i32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a 1-factorization of the complete graph on an even order.
    Factorize {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check coverage, resolution, admissibility and min-sum optimality.
    Verify {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Human)]
        format: ReportFormat,
    },
    /// Place a chunk catalog onto servers and locations.
    Plan {
        #[arg(long)]
        design: PathBuf,
        /// `id,score` records, higher score = more popular.
        #[arg(long)]
        catalog: PathBuf,
        /// table, csv or structured
        #[arg(long, default_value = "table")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block, class, replication and min-sum statistics.
    Stats {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Human)]
        format: ReportFormat,
    },
    /// Compare naive subset counts with the verifier's tally.
    Oracle {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Kts,
    Kqs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Human,
    Json,
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::PreconditionFailed { report, .. } | Error::PostconditionFailed { report, .. } = &e {
                let _ = write!(err, "{report}");
            }
            EXIT_USAGE
        }
    }
}

fn emit(text: &str, out_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match out_path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_design(path: &Path) -> Result<ResolvableDesign> {
    ResolvableDesign::from_json(&fs::read_to_string(path)?)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Generate {
            family,
            exponent,
            out: path,
        } => {
            let design = match family {
                Family::Kts => build_kts(exponent)?,
                Family::Kqs => build_kqs(exponent)?,
            };
            emit(&design.to_json(), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Factorize { order, out: path } => {
            emit(&factorize_even(order)?.to_json(), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Verify { design, format } => {
            let design = load_design(&design)?;
            let report = verify_design(&design);
            match format {
                ReportFormat::Human => {
                    let sum = min_sum(&design).map_or_else(|_| "-".into(), |m| m.to_string());
                    let bound = min_sum_upper_bound(design.strength(), design.block_size(), design.order())
                        .map_or_else(|_| "-".into(), |b| b.to_string());
                    writeln!(
                        out,
                        "{}({}): {} classes, {} blocks, min_sum {sum} (bound {bound})",
                        kind_name(design.kind()),
                        design.order(),
                        design.classes().len(),
                        design.block_count()
                    )?;
                    write!(out, "{report}")?;
                }
                ReportFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
                }
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Plan {
            design,
            catalog,
            format,
            out: path,
        } => {
            let format: PlanFormat = format.parse()?;
            let design = load_design(&design)?;
            let catalog = ChunkCatalog::from_csv(&fs::read_to_string(catalog)?)?;
            let plan = plan_from_design(&design, &catalog)?;
            emit(&export_plan(&plan, format)?, path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Stats { design, format } => {
            let stats = design_stats(&load_design(&design)?);
            match format {
                ReportFormat::Human => write!(out, "{stats}")?,
                ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?,
            }
            Ok(EXIT_OK)
        }
        Command::Oracle {
            design,
            samples,
            seed,
        } => {
            let design = load_design(&design)?;
            let check = cross_check(&design, samples, seed);
            writeln!(
                out,
                "{} random {}-subsets (seed {seed}): {} disagreements",
                check.samples,
                design.strength(),
                check.disagreements.len()
            )?;
            for d in &check.disagreements {
                writeln!(out, "    {:?}: oracle {} tally {}", d.subset, d.oracle, d.tally)?;
            }
            Ok(if check.agreed() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}
