use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gael_cli::{
    cmd_cauchy, cmd_dims, cmd_entropy, cmd_info, cmd_verify, dims_csv, entropy_csv, load_graph, seeded_corpus,
    AlgebraKind, InputFormat, LogBase, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "gael", version, about = "Graded dimensions and growth of graph algebras")]
struct Cli {
    /// Graph file format; `auto` picks JSON for `.json` files or a leading `{`.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto, global = true)]
    input_format: FormatArg,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Json,
    Edges,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Path,
    Cohn,
    Leavitt,
    Relative,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Vertex classes, adjacency matrix and nilpotency.
    Info { graph: PathBuf },
    /// Graded dimensions `d_0..d_kmax`.
    Dims {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Leavitt)]
        kind: KindArg,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Growth-rate estimates against the closed form `ln ρ(A)`.
    Entropy {
        graph: PathBuf,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = BaseArg::E)]
        base: BaseArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Runs the property suite on one graph or a seeded random corpus.
    Verify {
        graph: Option<PathBuf>,
        /// `count,seed` for a random corpus.
        #[arg(long, conflicts_with = "graph")]
        corpus: Option<String>,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, default_value_t = 6)]
        oracle_k: usize,
        #[arg(long, hide = true)]
        corrupt_dims: bool,
    },
    /// Reconstructs `A^k` from the resolvent on the circle `|z| = r`.
    Cauchy {
        graph: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Contour radius; defaults to `‖A‖ + 1`.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn parse_corpus(spec: &str) -> Result<(usize, u64)> {
    let (n, seed) = spec.split_once(',').context("--corpus expects count,seed")?;
    Ok((n.trim().parse().context("corpus count")?, seed.trim().parse().context("corpus seed")?))
}

fn run(cli: Cli) -> Result<Outcome> {
    let format = match cli.input_format {
        FormatArg::Auto => None,
        FormatArg::Json => Some(InputFormat::Json),
        FormatArg::Edges => Some(InputFormat::EdgeList),
    };
    let load = |p: &PathBuf| load_graph(p, format);
    match cli.command {
        Command::Info { graph } => {
            emit(&cli.out, &cmd_info(&load(&graph)?).to_json())?;
        }
        Command::Dims { graph, kind, kmax, format: table } => {
            let kind = match kind {
                KindArg::Path => AlgebraKind::Path,
                KindArg::Cohn => AlgebraKind::Cohn,
                KindArg::Leavitt => AlgebraKind::Leavitt,
                KindArg::Relative => AlgebraKind::Relative,
            };
            let (report, seq) = cmd_dims(&load(&graph)?, kind, kmax)?;
            match table {
                TableFormat::Json => emit(&cli.out, &report.to_json())?,
                TableFormat::Csv => emit(&cli.out, &dims_csv(&seq))?,
            }
        }
        Command::Entropy { graph, kmax, tol, base, format: table } => {
            let base = match base {
                BaseArg::E => LogBase::E,
                BaseArg::Two => LogBase::Two,
            };
            let (report, chain) = cmd_entropy(&load(&graph)?, kmax, tol, base)?;
            match table {
                TableFormat::Json => emit(&cli.out, &report.to_json())?,
                TableFormat::Csv => emit(&cli.out, &entropy_csv(&chain, base))?,
            }
            if !chain.chain_ok {
                return Ok(Outcome::Fail);
            }
        }
        Command::Verify { graph, corpus, kmax, tol, oracle_k, corrupt_dims } => {
            if kmax < 30 {
                bail!("--kmax must be at least 30, got {kmax}");
            }
            let graphs = match (graph, corpus) {
                (Some(path), None) => vec![(path.display().to_string(), load(&path)?)],
                (None, Some(spec)) => {
                    let (n, seed) = parse_corpus(&spec)?;
                    seeded_corpus(n, seed)
                }
                _ => bail!("verify needs a graph file or --corpus count,seed"),
            };
            let opts = VerifyOptions { kmax, tol, oracle_k, corrupt_dims, ..VerifyOptions::default() };
            let (report, pass) = cmd_verify(&graphs, &opts);
            emit(&cli.out, &report.to_json())?;
            if !pass {
                return Ok(Outcome::Fail);
            }
        }
        Command::Cauchy { graph, k, r, nodes } => {
            emit(&cli.out, &cmd_cauchy(&load(&graph)?, k, r, nodes)?.to_json())?;
        }
    }
    Ok(Outcome::Pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
