//! `ppcforge` command-line tool.
//!
//! Exit status: 0 success, 1 usage or I/O error, 2 verification failure,
//! 3 search budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ppcforge::bounds::{self, bound_table, packing_number};
use ppcforge::construct::{self, ConstructError, ConstructionWitness};
use ppcforge::design::{ppc_annotations, Design};
use ppcforge::onefactor::{room_square, FactorError, SelectionStrategy};
use ppcforge::oracle::{brute_beta, BetaSearch};
use ppcforge::ppc::{is_ppc, solve_max_ppc};
use ppcforge::sequence::{
    check_sequencing, find_sequencing, perm_from_text, perm_to_text, sufficient_conditions,
    SearchOutcome,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "ppcforge", version, about = "Partial Steiner triple systems with a prescribed maximum partial parallel class")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Budget {
    /// Search node budget
    #[arg(long, env = "PPCFORGE_BUDGET", default_value_t = 50_000_000)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design on V points whose maximum class has size RHO
    Construct {
        #[arg(long)]
        rho: usize,
        #[arg(long)]
        v: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Room)]
        strategy: Strategy,
        /// Override the construction picked from the parity of v - rho
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Exact maximum partial parallel class of a design file
    SolvePpc {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Validate a design file and any `# ppc:` annotations in it
    Verify {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Lower and upper bounds on beta(rho, v)
    Bounds {
        #[arg(long)]
        v: u64,
        #[arg(long)]
        rho_max: Option<u64>,
        /// Replace bounds by published exact values where known
        #[arg(long)]
        with_known: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The bound table for 27 points, rho = 1..9, with known values
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Find or check sequencings
    Sequence {
        #[command(subcommand)]
        action: SequenceCmd,
    },
    /// Print a Room square of the given odd side
    Roomsquare {
        #[arg(long)]
        side: usize,
    },
    /// Exhaustive reference computations for tiny cases
    Oracle {
        #[command(subcommand)]
        action: OracleCmd,
    },
    /// Check the eight sum-zero triples over Z5 x Z5
    CheckSts27,
}

#[derive(Subcommand)]
enum SequenceCmd {
    /// Search for a sequencing of a design
    Find {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Check a permutation file against a design
    Check { file: PathBuf, perm: PathBuf },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact beta(rho, v) by exhaustive search (v <= 8)
    Beta {
        #[arg(long)]
        rho: usize,
        #[arg(long)]
        v: usize,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Room,
    Roundrobin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Adjoin one new point to every edge of each selected one-factor
    Base,
    /// Base plus a maximum packing on the adjoined points
    Packed,
    /// Packed with one graph vertex and its blocks removed
    Trimmed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Rows,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Loads a design; validation failures are reported and mapped to exit 2.
fn load_design(path: &Path) -> Result<Result<(Design, String), u8>> {
    let text = read(path)?;
    Ok(match Design::from_text(&text) {
        Ok(d) => Ok((d, text)),
        Err(e) => {
            println!("invalid design: {e}");
            Err(EXIT_VERIFY)
        }
    })
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Construct {
            rho,
            v,
            strategy,
            variant,
            out,
            budget,
        } => cmd_construct(rho, v, strategy, variant, out, budget.budget),
        Command::SolvePpc { file, budget } => {
            let (d, _) = match load_design(&file)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let start = Instant::now();
            let r = solve_max_ppc(&d, budget.budget);
            eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
            println!("v: {}", d.v());
            println!("b: {}", d.b());
            println!("rho: {}", r.size);
            println!("optimal: {}", r.optimal);
            println!("nodes: {}", r.nodes);
            for b in &r.blocks {
                println!("# ppc: {} {} {}", b[0], b[1], b[2]);
            }
            Ok(if r.optimal { 0 } else { EXIT_BUDGET })
        }
        Command::Verify { file, budget } => cmd_verify(&file, budget.budget),
        Command::Bounds {
            v,
            rho_max,
            with_known,
            format,
        } => cmd_bounds(v, rho_max, with_known, format),
        Command::Table1 { format } => cmd_bounds(27, Some(9), true, format),
        Command::Sequence { action } => match action {
            SequenceCmd::Find { file, budget } => cmd_sequence_find(&file, budget.budget),
            SequenceCmd::Check { file, perm } => {
                let (d, _) = match load_design(&file)? {
                    Ok(x) => x,
                    Err(code) => return Ok(code),
                };
                let perm = perm_from_text(&read(&perm)?)?;
                let s = check_sequencing(&d, &perm)?;
                if s.valid {
                    println!("valid sequencing");
                    Ok(0)
                } else {
                    let (t, start) = s.violation.expect("invalid sequencing has a violation");
                    println!("invalid: positions {}..{} are a union of {t} blocks", start, start + 3 * t);
                    Ok(EXIT_VERIFY)
                }
            }
        },
        Command::Roomsquare { side } => match room_square(side) {
            Ok(sq) => {
                print!("{sq}");
                Ok(0)
            }
            Err(e @ FactorError::Unconstructible(_)) => {
                eprintln!("{e}");
                Ok(EXIT_BUDGET)
            }
            Err(e) => bail!(e),
        },
        Command::Oracle {
            action: OracleCmd::Beta { rho, v, budget },
        } => match brute_beta(rho, v, budget.budget)? {
            BetaSearch::Exact { value, witness } => {
                println!("beta({rho}, {v}) = {value}");
                match witness {
                    Some(w) => print!("{}", w.to_text()),
                    None => println!("no design on {v} points has maximum class {rho}"),
                }
                Ok(0)
            }
            BetaSearch::Unknown => {
                println!("beta({rho}, {v}) unknown: budget exhausted");
                Ok(EXIT_BUDGET)
            }
        },
        Command::CheckSts27 => match construct::check_sts27_triples() {
            Ok(()) => {
                println!("ok: 8 disjoint sum-zero triples, 24 points");
                Ok(0)
            }
            Err(e) => {
                println!("{e}");
                Ok(EXIT_VERIFY)
            }
        },
    }
}

fn cmd_construct(
    rho: usize,
    v: usize,
    strategy: Strategy,
    variant: Option<VariantArg>,
    out: Option<PathBuf>,
    budget: u64,
) -> Result<u8> {
    if rho == 0 || v < 3 * rho {
        bail!("need 1 <= rho and 3 * rho <= v");
    }
    let strategy = match strategy {
        Strategy::Room => SelectionStrategy::Room,
        Strategy::Roundrobin => SelectionStrategy::RoundRobin,
    };
    let variant = variant.unwrap_or(if (v - rho).is_multiple_of(2) {
        VariantArg::Packed
    } else {
        VariantArg::Trimmed
    });
    let built: Result<ConstructionWitness, ConstructError> = match variant {
        VariantArg::Base | VariantArg::Packed if !(v - rho).is_multiple_of(2) => {
            bail!("this variant needs v - rho even")
        }
        VariantArg::Trimmed if (v - rho).is_multiple_of(2) => bail!("the trimmed variant needs v - rho odd"),
        VariantArg::Base => construct::base(rho, v - rho, strategy),
        VariantArg::Packed => construct::packed(rho, v - rho, strategy),
        VariantArg::Trimmed => construct::trimmed(rho, v - rho + 1, strategy),
    };
    let w = built?;

    let start = Instant::now();
    let solved = solve_max_ppc(&w.design, budget);
    eprintln!(
        "solver: {} nodes, {:.3}s",
        solved.nodes,
        start.elapsed().as_secs_f64()
    );
    let mut comments = w.comments();
    let status = if !solved.optimal {
        comments.push(format!("unverified: budget exhausted, found class {}", solved.size));
        EXIT_BUDGET
    } else if solved.size != rho {
        comments.push(format!("FAILED: maximum class has size {}", solved.size));
        EXIT_VERIFY
    } else {
        comments.push(format!("verified: maximum class size {rho}"));
        0
    };
    comments.push(format!("blocks: {}", w.design.b()));
    let text = w.design.to_text_with_comments(&comments);
    match out {
        Some(path) => {
            fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            for c in comments.iter().filter(|c| !c.starts_with("ppc:")) {
                println!("{c}");
            }
            for b in &w.witness_ppc {
                println!("ppc: {} {} {}", b[0], b[1], b[2]);
            }
        }
        None => print!("{text}"),
    }
    Ok(status)
}

fn cmd_verify(file: &Path, budget: u64) -> Result<u8> {
    let (d, text) = match load_design(file)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    let profile = d.degree_profile();
    println!("v: {}", d.v());
    println!("b: {}", d.b());
    println!("max degree: {}", profile.max());
    if d.b() as u64 > packing_number(d.v() as u64) {
        println!("FAILED: more blocks than any packing on {} points allows", d.v());
        return Ok(EXIT_VERIFY);
    }
    let annotated = match ppc_annotations(&text) {
        Ok(a) => a,
        Err(e) => {
            println!("bad annotation: {e}");
            return Ok(EXIT_VERIFY);
        }
    };
    if annotated.is_empty() {
        println!("linear: ok");
        return Ok(0);
    }
    if !is_ppc(&d, &annotated) {
        println!("FAILED: annotated blocks are not a disjoint set of design blocks");
        return Ok(EXIT_VERIFY);
    }
    let r = solve_max_ppc(&d, budget);
    if !r.optimal {
        println!("annotated class of size {} not proven maximum: budget exhausted", annotated.len());
        return Ok(EXIT_BUDGET);
    }
    if r.size != annotated.len() {
        println!(
            "FAILED: annotated class has size {}, maximum is {}",
            annotated.len(),
            r.size
        );
        return Ok(EXIT_VERIFY);
    }
    let rho = r.size as u64;
    if rho > 0 {
        if let Ok(upper) = bounds::beta_upper(rho, d.v() as u64) {
            if d.b() as u64 > upper {
                println!("FAILED: b exceeds the upper bound {upper} for rho={rho}");
                return Ok(EXIT_VERIFY);
            }
        }
    }
    println!("maximum class: {} (verified)", r.size);
    Ok(0)
}

fn cmd_bounds(v: u64, rho_max: Option<u64>, with_known: bool, format: Format) -> Result<u8> {
    let rho_max = rho_max.unwrap_or(v / 3);
    let records = bound_table(v, 1..=rho_max, with_known)?;
    match format {
        Format::Text => print!("{}", bounds::format_table_text(&records)),
        Format::Rows => print!("{}", bounds::format_table_rows(&records)),
    }
    Ok(0)
}

fn cmd_sequence_find(file: &Path, budget: u64) -> Result<u8> {
    let (d, _) = match load_design(file)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    let solved = solve_max_ppc(&d, budget);
    if solved.optimal {
        let conds = sufficient_conditions(d.v(), solved.size);
        println!("# maximum class: {}", solved.size);
        println!("# sufficient conditions met: {conds:?}");
    }
    match find_sequencing(&d, budget) {
        SearchOutcome::Found(s) => {
            let check = check_sequencing(&d, &s.perm)?;
            if !check.valid {
                println!("# FAILED: search result does not recheck");
                return Ok(EXIT_VERIFY);
            }
            print!("{}", perm_to_text(&s.perm));
            Ok(0)
        }
        SearchOutcome::ProvenNonsequenceable => {
            println!("not sequenceable: every order was ruled out");
            Ok(EXIT_VERIFY)
        }
        SearchOutcome::BudgetExhausted => {
            println!("no sequencing found: budget exhausted");
            Ok(EXIT_BUDGET)
        }
    }
}
