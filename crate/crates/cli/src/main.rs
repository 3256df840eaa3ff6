use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use conlat_core::campaign::{
    corpus_to_jsonl, generate_corpus, parse_corpus, run_check, run_lattice_theorem,
    run_ring_pipeline, run_ring_theorem, CampaignOptions, CampaignReport, RingItem,
    LATTICE_THEOREMS, PROPERTIES, RING_THEOREMS,
};
use conlat_core::ring::{FiniteRing, RingTableFile};
use conlat_core::urp::DEFAULT_NODE_BUDGET;

#[derive(Parser)]
#[command(name = "conlat", version, about = "Congruence lattices, refinement and regular rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write every lattice up to a size, one JSON object per line.
    GenCorpus {
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check one property on every lattice of a corpus.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PROPERTIES))]
        property: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a theorem campaign, validating every witness it builds.
    VerifyTheorem {
        theorem: String,
        /// Corpus for lattice theorems.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Ring spec like "M(2,2)xM(1,3)" or a JSON table file; repeatable.
        #[arg(long)]
        ring: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Full ideal-lattice pipeline on one ring.
    Ring {
        #[arg(long)]
        ring: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Search node budget per URP instance.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-row wall-clock times.
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn options(&self) -> CampaignOptions {
        CampaignOptions {
            seed: self.seed,
            budget: self.budget,
            timings: self.timings,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn read_corpus(path: &Path) -> Result<Vec<conlat_core::campaign::CorpusItem>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_corpus(&text)?)
}

fn load_ring(arg: &str) -> Result<RingItem> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let file: RingTableFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
        return Ok(RingItem {
            label: arg.to_string(),
            ring: FiniteRing::from_tables(&file)?,
        });
    }
    Ok(RingItem::parse(arg)?)
}

fn report(run: &RunArgs, report: CampaignReport) -> Result<u8> {
    let mut text = report.to_json();
    text.push('\n');
    emit(run.out.as_deref(), &text)?;
    Ok(report.exit_code() as u8)
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::GenCorpus { max_size, out } => {
            let items = generate_corpus(max_size)?;
            emit(out.as_deref(), &corpus_to_jsonl(&items))?;
            Ok(0)
        }
        Command::Check { property, input, run } => {
            let items = read_corpus(&input)?;
            report(&run, run_check(&property, &items, &run.options())?)
        }
        Command::VerifyTheorem {
            theorem,
            input,
            ring,
            run,
        } => {
            if RING_THEOREMS.contains(&theorem.as_str()) {
                let rings = if ring.is_empty() {
                    RingItem::default_rings()
                } else {
                    ring.iter().map(|r| load_ring(r)).collect::<Result<_>>()?
                };
                report(&run, run_ring_theorem(&theorem, &rings, &run.options())?)
            } else if LATTICE_THEOREMS.contains(&theorem.as_str()) {
                let Some(input) = input else {
                    bail!("{theorem} needs a corpus (--in)");
                };
                let items = read_corpus(&input)?;
                report(&run, run_lattice_theorem(&theorem, &items, &run.options())?)
            } else {
                bail!(
                    "unknown theorem {theorem:?}; expected one of {}",
                    [LATTICE_THEOREMS, RING_THEOREMS].concat().join(", ")
                )
            }
        }
        Command::Ring { ring, run } => {
            let item = load_ring(&ring)?;
            report(&run, run_ring_pipeline(&item, &run.options())?)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            // keep 1 and 2 for campaign verdicts
            ExitCode::from(3)
        }
    }
}
