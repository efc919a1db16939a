use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use graphette::{
    estimate, exhaustive_enumerate, sample, Error, Graphette, GraphetteTable, HostGraph, SamplingStrategy,
    DEFAULT_ENUMERATION_BOUND,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_FORMAT: u8 = 4;
const EXIT_BOUND: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "graphette", version, about = "Graphette lookup tables, orbits and sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the lookup table for one order and write it to disk.
    BuildTable(BuildArgs),
    /// List canonical graphettes with their orbit partitions.
    Orbits(OrbitsArgs),
    /// Identify a single graphette.
    Query(QueryArgs),
    /// Estimate graphette and orbit frequencies by sampling.
    Sample(SampleArgs),
    /// Count every k-subset of a small graph exactly.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(short, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..=8))]
    k: u8,
    /// Number of sifting partitions.
    #[arg(short, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Output file. Defaults to `graphettes-k<K>.bin` in the current directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct OrbitsSource {
    /// Compute the listing on the fly (k <= 7).
    #[arg(short, value_parser = clap::value_parser!(u8).range(1..=7))]
    k: Option<u8>,
    /// Read the listing from a table file.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrbitsArgs {
    #[command(flatten)]
    source: OrbitsSource,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct QueryInput {
    /// Lower-triangle bit vector.
    #[arg(long)]
    bits: Option<u64>,
    /// Edge list such as `0-1,1-2`.
    #[arg(long, allow_hyphen_values = true)]
    edges: Option<String>,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    table: PathBuf,
    #[command(flatten)]
    input: QueryInput,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    table: PathBuf,
    /// Host graph as a whitespace-separated edge list.
    #[arg(long)]
    graph: PathBuf,
    /// Number of samples.
    #[arg(short = 'n', long = "samples", value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = SamplingStrategy::Uniform)]
    strategy: SamplingStrategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results depend on the worker count, not on scheduling.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Report file; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Refuse graphs with more k-subsets than this.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    bound: u128,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn default_workers() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            msg: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Io(_) => EXIT_IO,
            Error::Format(_) | Error::Parse { .. } | Error::EmptyGraph => EXIT_FORMAT,
            Error::BoundExceeded { .. } => EXIT_BOUND,
            Error::OrderOutOfRange { .. }
            | Error::BitsOutOfRange { .. }
            | Error::NodeOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            msg: err.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildTable(args) => build_table(args),
        Command::Orbits(args) => orbits(args),
        Command::Query(args) => query(args),
        Command::Sample(args) => run_sample(args),
        Command::Enumerate(args) => enumerate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn build_table(args: BuildArgs) -> CliResult {
    let k = args.k as usize;
    let path = args
        .output
        .unwrap_or_else(|| PathBuf::from(format!("graphettes-k{k}.bin")));
    // fail on an unwritable path before spending time on the build
    let file = File::create(&path).map_err(|e| Failure::io(&path, e))?;
    let start = Instant::now();
    let table = GraphetteTable::build(k, args.m as usize, args.workers as usize)?;
    let mut w = BufWriter::new(file);
    table.write_to(&mut w)?;
    w.flush().map_err(|e| Failure::io(&path, e))?;
    eprintln!(
        "k={k} NC={} orbits={} elapsed={:.2}s wrote {}",
        table.canonical_count(),
        table.total_orbits(),
        start.elapsed().as_secs_f64(),
        path.display()
    );
    Ok(())
}

fn load_table(path: &Path) -> CliResult<GraphetteTable> {
    GraphetteTable::load(path).map_err(|e| match e {
        Error::Io(err) => Failure::io(path, err),
        other => {
            let mut f = Failure::from(other);
            f.msg = format!("{}: {}", path.display(), f.msg);
            f
        }
    })
}

fn load_graph(path: &Path) -> CliResult<HostGraph> {
    HostGraph::load(path).map_err(|e| match e {
        Error::Io(err) => Failure::io(path, err),
        other => {
            let mut f = Failure::from(other);
            f.msg = format!("{}: {}", path.display(), f.msg);
            f
        }
    })
}

fn orbits(args: OrbitsArgs) -> CliResult {
    let table = match (args.source.k, &args.source.table) {
        (Some(k), _) => GraphetteTable::build(k as usize, 1, 1)?,
        (None, Some(path)) => load_table(path)?,
        (None, None) => return Err(Failure::usage("either -k or --table is required")),
    };
    let cat = table.catalog();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io_err = |e| Failure::io(Path::new("<stdout>"), e);
    writeln!(
        out,
        "# k={} NC={} orbits={}",
        table.k(),
        table.canonical_count(),
        table.total_orbits()
    )
    .map_err(io_err)?;
    writeln!(out, "id\tbits\tconnected\tedges\torbits\tglobal_orbits").map_err(io_err)?;
    for (id, part) in cat.orbit_partitions().iter().enumerate() {
        let g = cat.canonical(id);
        let edges: Vec<String> = g.decode().iter().map(|(i, j)| format!("{i}-{j}")).collect();
        let groups: Vec<String> = part
            .orbits()
            .iter()
            .map(|o| {
                let nodes: Vec<String> = o.iter().map(|u| u.to_string()).collect();
                format!("{{{}}}", nodes.join(","))
            })
            .collect();
        let base = table.orbits().base(id);
        let last = base + part.orbit_count() as u32 - 1;
        writeln!(
            out,
            "{id}\t{}\t{}\t{}\t{}\t{base}-{last}",
            g.bits(),
            u8::from(cat.is_connected(id)),
            edges.join(","),
            groups.join(" ")
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

fn parse_edges(k: usize, text: &str) -> CliResult<Graphette> {
    let mut edges = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once('-')
            .ok_or_else(|| Failure::usage(format!("edge {item:?} is not of the form u-v")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("bad node {s:?} in edge {item:?}")))
        };
        edges.push((parse(a)?, parse(b)?));
    }
    Ok(Graphette::encode(k, edges)?)
}

fn query(args: QueryArgs) -> CliResult {
    let table = load_table(&args.table)?;
    let g = match (args.input.bits, &args.input.edges) {
        (Some(bits), _) => Graphette::new(table.k(), bits as u128)?,
        (None, Some(edges)) => parse_edges(table.k(), edges)?,
        (None, None) => return Err(Failure::usage("either --bits or --edges is required")),
    };
    let id = table.query(&g)?;
    let orbits: Vec<String> = table.node_orbits(&g)?.iter().map(|o| o.to_string()).collect();
    println!(
        "canonical_id={} canonical_bits={} witness={} connected={} orbits={}",
        id.canonical_id,
        id.canonical_bits,
        id.witness,
        id.connected,
        orbits.join(",")
    );
    Ok(())
}

fn write_report(report: &graphette::Report, host: &HostGraph, output: Option<&Path>) -> CliResult {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::io(path, e))?;
            let mut w = BufWriter::new(file);
            report.write_tsv(&mut w, host).map_err(|e| Failure::io(path, e))?;
            w.flush().map_err(|e| Failure::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let stdout_path = Path::new("<stdout>");
            report
                .write_tsv(&mut w, host)
                .map_err(|e| Failure::io(stdout_path, e))?;
            w.flush().map_err(|e| Failure::io(stdout_path, e))
        }
    }
}

fn run_sample(args: SampleArgs) -> CliResult {
    let table = load_table(&args.table)?;
    let host = load_graph(&args.graph)?;
    eprintln!(
        "sampling {} {}-node sets from {} nodes / {} edges ({}, seed {}, {} workers)",
        args.samples,
        table.k(),
        host.node_count(),
        host.edge_count(),
        args.strategy,
        args.seed,
        args.workers
    );
    let start = Instant::now();
    let acc = sample(
        &host,
        &table,
        args.strategy,
        args.samples,
        args.seed,
        args.workers as usize,
    )?;
    let report = estimate(&acc, &table)?;
    eprintln!("done in {:.2}s", start.elapsed().as_secs_f64());
    write_report(&report, &host, args.output.as_deref())
}

fn enumerate(args: EnumerateArgs) -> CliResult {
    let table = load_table(&args.table)?;
    let host = load_graph(&args.graph)?;
    let start = Instant::now();
    let acc = exhaustive_enumerate(&host, &table, args.bound)?;
    let report = estimate(&acc, &table)?;
    eprintln!(
        "enumerated {} subsets in {:.2}s",
        acc.samples(),
        start.elapsed().as_secs_f64()
    );
    write_report(&report, &host, args.output.as_deref())
}
