use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crysred::{compute_reduction, Limits, Mode};
use crysred_cli::*;

#[derive(Parser)]
#[command(name = "crysred", version, about = "Mod p reduction of crystalline representations V_{k,a_p}")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the bundled table of examples.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Baseline,
    Subtree,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Baseline => Mode::Baseline,
            ModeArg::Subtree => Mode::Subtree,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// The prime.
    #[arg(long)]
    p: Option<u64>,
    /// The weight, at least 2.
    #[arg(long)]
    k: Option<u64>,
    /// a_p, e.g. "5*sqrt(5)*13*sqrt(7) + 2*5^2".
    #[arg(long)]
    ap: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value = "table")]
    output: Output,
    /// Fixed precision d; the run fails instead of raising it.
    #[arg(long = "d")]
    d: Option<u32>,
    /// Use the other square root for Hensel roots in a_p.
    #[arg(long)]
    conjugate: bool,
    /// Also answer the steps known to vanish.
    #[arg(long)]
    debug_skipped: bool,
    /// Allow p = 2.
    #[arg(long)]
    experimental_p2: bool,
    /// Report wall-clock timings.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Largest tree radius tried.
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    #[arg(long, value_enum, default_value = "subtree")]
    mode: ModeArg,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value = "fast", value_parser = ["fast", "slow", "all"])]
    filter: String,
    /// Corpus file.
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/examples.txt"))]
    file: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global().ok();
    }
}

fn limits(common: &CommonArgs) -> Limits {
    Limits { n_max: common.n_max, mode: common.mode.into(), ..Limits::default() }
}

fn run(args: RunArgs) -> ExitCode {
    let (Some(p), Some(k), Some(ap)) = (args.p, args.k, args.ap.as_deref()) else {
        eprintln!("error: --p, --k and --ap are required (see --help)");
        return ExitCode::from(EXIT_INVALID_INPUT as u8);
    };
    init_threads(args.common.threads);
    let limits = Limits {
        d_override: args.d,
        conjugate: args.conjugate,
        compute_skipped: args.debug_skipped,
        experimental_p2: args.experimental_p2,
        ..limits(&args.common)
    };
    match compute_reduction(p, k, ap, &limits) {
        Ok(red) => {
            match args.output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&reduction_json(&red, args.timings)).expect("json")),
                Output::Table => print!("{}", reduction_table(&red, args.timings)),
            }
            if red.is_determined() {
                ExitCode::SUCCESS
            } else {
                eprintln!("undetermined at n = {}", red.n_used);
                ExitCode::from(EXIT_UNDETERMINED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn corpus(args: CorpusArgs) -> ExitCode {
    init_threads(args.common.threads);
    let filter: Filter = args.filter.parse().expect("validated by clap");
    let rows = match load_corpus(&args.file) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let rows: Vec<CorpusRow> = rows.into_iter().filter(|r| filter.keeps(r)).collect();
    if rows.is_empty() {
        println!("0 rows");
        return ExitCode::SUCCESS;
    }
    let results = run_corpus(&rows, &limits(&args.common));
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass()).count();
    println!("{passed}/{} rows passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH as u8)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::Corpus(a)) => corpus(a),
        None => run(cli.run),
    }
}
