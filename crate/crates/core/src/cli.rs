//! Command-line front end. Every subcommand is callable as a library
//! function writing to caller-supplied streams, which is how the tests
//! drive it.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::MissReport;
use crate::answer::{Answer, EdgeSet};
use crate::bench::{bench_csv, read_queries, run_bench, BenchConfig, BenchQuery};
use crate::datagraph::{DataGraph, KeywordConfig, Query};
use crate::engine::{EngineKind, EngineOptions, RunStats, DEFAULT_QUEUE_CAP};
use crate::error::{Error, Result};
use crate::generate;
use crate::gtf::GtfSearch;
use crate::naive::NaiveSearch;
use crate::oracle;
use crate::report::{self, AnswerRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_QUEUE_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gtf", version, about = "Ranked keyword search over weighted data graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph file and print its size.
    Validate(GraphArgs),
    /// Stream answers as they are found.
    Query(QueryArgs),
    /// Run gtf, naive and the oracle and compare their answer sets.
    Compare(QueryArgs),
    /// Time both engines over a file of queries; writes bench.csv.
    Bench(BenchArgs),
    /// Apply the miss filters to the top answers; writes miss_report.csv.
    Analyze(QueryArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Graph document (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "gen", required_unless_present = "gen")]
    pub graph: Option<PathBuf>,
    /// Generated graph instead of a file: lattice:N or random:N.
    #[arg(long, value_name = "SPEC")]
    pub gen: Option<String>,
    #[arg(long, value_name = "N", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Gtf,
    Naive,
    Both,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Comma-separated keywords.
    #[arg(long, value_name = "CSV", required = true)]
    pub keywords: String,
    /// Stop after N answers (0 = all).
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = EngineChoice::Gtf)]
    pub engine: EngineChoice,
    /// Skip essential cyclic extensions (loses answers on some graphs).
    #[arg(long)]
    pub no_essential: bool,
    /// Write instrumentation events as JSON lines.
    #[arg(long, value_name = "PATH")]
    pub event_log: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_QUEUE_CAP)]
    pub queue_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Queries as `id<TAB>keyword,keyword` lines. Optional with --gen.
    #[arg(long, value_name = "PATH")]
    pub queries: Option<PathBuf>,
    /// One or more top-k limits, comma-separated.
    #[arg(long, value_name = "N", value_delimiter = ',', default_value = "10")]
    pub top: Vec<usize>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    pub engine: EngineChoice,
    /// Measured runs after the warm-up.
    #[arg(long, value_name = "N", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long)]
    pub no_essential: bool,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_QUEUE_CAP)]
    pub queue_cap: usize,
}

/// Where a command writes: answers and reports to `out`, diagnostics to
/// `err`, CSV files into `out_dir`.
pub struct Context<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub out_dir: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, ctx: &mut Context<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(ctx.err, "{text}")
            } else {
                write!(ctx.out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate(args) => cmd_validate(args, ctx),
        Command::Query(args) => cmd_query(args, ctx),
        Command::Compare(args) => cmd_compare(args, ctx),
        Command::Bench(args) => cmd_bench(args, ctx),
        Command::Analyze(args) => cmd_analyze(args, ctx),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QueueCapExceeded { .. } => EXIT_QUEUE_CAP,
        _ => EXIT_INPUT,
    }
}

pub fn load_graph(args: &GraphArgs) -> Result<DataGraph> {
    let graph = match (&args.graph, &args.gen) {
        (Some(path), _) => DataGraph::load(path)?,
        (None, Some(spec)) => return Ok(generate::from_spec(spec, args.seed)?.graph),
        (None, None) => return Err(Error::InvalidGenerator(String::new())),
    };
    Ok(graph.augment_keywords(&KeywordConfig::default()))
}

fn split_keywords(csv: &str) -> Vec<&str> {
    csv.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn engines(choice: EngineChoice) -> Vec<EngineKind> {
    match choice {
        EngineChoice::Gtf => vec![EngineKind::Gtf],
        EngineChoice::Naive => vec![EngineKind::Naive],
        EngineChoice::Both => vec![EngineKind::Gtf, EngineKind::Naive],
        EngineChoice::Oracle => vec![],
    }
}

fn options(args: &QueryArgs) -> EngineOptions {
    EngineOptions {
        top_k: args.top,
        queue_cap: args.queue_cap,
        essential: !args.no_essential,
    }
}

type EventLog = Rc<RefCell<BufWriter<File>>>;

/// Runs one engine, handing each answer to `sink` as it is emitted.
fn run_engine(
    graph: &DataGraph,
    query: &Query,
    engine: EngineKind,
    opts: EngineOptions,
    log: Option<&EventLog>,
    sink: &mut dyn FnMut(&Answer),
) -> Result<RunStats> {
    let observer = log.map(|log| {
        let log = Rc::clone(log);
        Box::new(move |event: &crate::engine::Event| {
            let _ = writeln!(log.borrow_mut(), "{}", report::event_json(graph, engine, event));
        }) as crate::engine::Observer<'_>
    });
    match engine {
        EngineKind::Gtf => {
            let mut search = GtfSearch::new(graph, query, opts)?;
            if let Some(observer) = observer {
                search.set_observer(observer);
            }
            search.run(sink)
        }
        EngineKind::Naive => {
            let mut search = NaiveSearch::new(graph, query, opts);
            if let Some(observer) = observer {
                search.set_observer(observer);
            }
            search.run(sink)
        }
    }
}

pub fn cmd_validate(args: &GraphArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let graph = load_graph(args)?;
    graph.validate()?;
    writeln!(
        ctx.out,
        "ok: {} nodes, {} edges, {} keywords",
        graph.node_count(),
        graph.edge_count(),
        graph.keyword_tokens().count()
    )?;
    Ok(EXIT_OK)
}

struct Printer {
    format: Format,
    tagged: bool,
    header_done: bool,
}

impl Printer {
    fn print(&mut self, out: &mut dyn Write, record: &AnswerRecord) -> std::io::Result<()> {
        if !self.header_done {
            self.header_done = true;
            match self.format {
                Format::Jsonl => {}
                Format::Csv => writeln!(out, "{}", report::CSV_HEADER)?,
                Format::Table => writeln!(out, "{}", report::TABLE_HEADER)?,
            }
        }
        match self.format {
            Format::Jsonl => writeln!(out, "{}", record.to_json()),
            Format::Csv => writeln!(out, "{}", report::csv_row(record)),
            Format::Table => writeln!(out, "{}", report::table_row(record)),
        }
    }
}

pub fn cmd_query(args: &QueryArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let graph = load_graph(&args.graph)?;
    let query = graph.resolve_query(&split_keywords(&args.keywords))?;
    let log = match &args.event_log {
        Some(path) => Some(Rc::new(RefCell::new(BufWriter::new(File::create(path)?)))),
        None => None,
    };
    let mut printer = Printer {
        format: args.format,
        tagged: args.engine == EngineChoice::Both,
        header_done: false,
    };
    if args.engine == EngineChoice::Oracle {
        let report = oracle::enumerate_all_answers(&graph, &query)?;
        let limit = if args.top == 0 { usize::MAX } else { args.top };
        for (i, answer) in report.answers.iter().take(limit).enumerate() {
            let mut answer = answer.clone();
            answer.rank = i + 1;
            printer.print(ctx.out, &AnswerRecord::new(&graph, &answer, None))?;
        }
        writeln!(ctx.err, "oracle: answers={}", report.answers.len().min(limit))?;
        return Ok(EXIT_OK);
    }
    for engine in engines(args.engine) {
        let tag = printer.tagged.then_some(engine);
        let mut io_error = None;
        let out = &mut *ctx.out;
        let result = run_engine(&graph, &query, engine, options(args), log.as_ref(), &mut |answer| {
            if io_error.is_none() {
                if let Err(e) = printer.print(out, &AnswerRecord::new(&graph, answer, tag)) {
                    io_error = Some(e);
                }
            }
        });
        if let Some(e) = io_error {
            return Err(e.into());
        }
        match result {
            Ok(stats) => writeln!(ctx.err, "{engine}: {}", stats.summary())?,
            Err(Error::QueueCapExceeded { cap, stats }) => {
                writeln!(ctx.err, "{engine}: {}", stats.summary())?;
                return Err(Error::QueueCapExceeded { cap, stats });
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(log) = log {
        log.borrow_mut().flush()?;
    }
    Ok(EXIT_OK)
}

fn collect(graph: &DataGraph, query: &Query, engine: EngineKind, opts: EngineOptions) -> Result<(Vec<Answer>, RunStats)> {
    let mut answers = Vec::new();
    let stats = run_engine(graph, query, engine, opts, None, &mut |a| answers.push(a.clone()))?;
    Ok((answers, stats))
}

fn edge_sets(answers: &[Answer]) -> (BTreeSet<EdgeSet>, usize) {
    let mut set = BTreeSet::new();
    let duplicates = answers.iter().filter(|a| !set.insert(a.edge_set())).count();
    (set, duplicates)
}

fn heights_sorted(answers: &[Answer]) -> bool {
    answers.windows(2).all(|w| w[0].height <= w[1].height)
}

pub fn cmd_compare(args: &QueryArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let graph = load_graph(&args.graph)?;
    let query = graph.resolve_query(&split_keywords(&args.keywords))?;
    let expected = oracle::enumerate_all_answers(&graph, &query)?;
    let (truth, _) = edge_sets(&expected.answers);
    let opts = EngineOptions {
        top_k: 0,
        ..options(args)
    };
    let mut pass = true;
    let mut counts = Vec::new();
    let mut lines = Vec::new();
    for engine in [EngineKind::Gtf, EngineKind::Naive] {
        let (answers, stats) = collect(&graph, &query, engine, opts)?;
        let (set, duplicates) = edge_sets(&answers);
        let ok = set == truth && duplicates == 0 && heights_sorted(&answers);
        pass &= ok;
        counts.push(answers.len());
        lines.push(format!(
            "{engine}: {} answers, {} duplicates, {} missing, {} extra; {}",
            answers.len(),
            duplicates,
            truth.difference(&set).count(),
            set.difference(&truth).count(),
            stats.summary()
        ));
    }
    writeln!(
        ctx.out,
        "{} gtf={} naive={} oracle={}",
        if pass { "PASS" } else { "FAIL" },
        counts[0],
        counts[1],
        expected.answers.len()
    )?;
    for line in lines {
        writeln!(ctx.out, "  {line}")?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

pub fn cmd_bench(args: &BenchArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let graph = load_graph(&args.graph)?;
    let queries: Vec<BenchQuery> = match (&args.queries, &args.graph.gen) {
        (Some(path), _) => read_queries(path)?,
        (None, Some(_)) => generate::default_queries(&graph, args.graph.seed)
            .into_iter()
            .map(|(id, tokens)| BenchQuery { id, tokens })
            .collect(),
        (None, None) => return Err(Error::InvalidQueries("--queries is required with --graph".into())),
    };
    let cfg = BenchConfig {
        engines: match args.engine {
            EngineChoice::Oracle => return Err(Error::InvalidQueries("bench does not time the oracle".into())),
            choice => engines(choice),
        },
        top_ks: args.top.clone(),
        repeats: args.repeats as usize,
        queue_cap: args.queue_cap,
        essential: !args.no_essential,
    };
    let rows = run_bench(&graph, &queries, &cfg);
    let csv = bench_csv(&rows)?;
    write_output(ctx, "bench.csv", &csv)?;
    write!(ctx.out, "{csv}")?;
    let mut code = EXIT_OK;
    for row in &rows {
        if let crate::bench::Outcome::Error { message, queue_cap } = &row.outcome {
            writeln!(ctx.err, "{} {} top {}: {message}", row.engine, row.query, row.top_k)?;
            code = code.max(if *queue_cap { EXIT_QUEUE_CAP } else { EXIT_INPUT });
        }
    }
    Ok(code)
}

pub fn cmd_analyze(args: &QueryArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let graph = load_graph(&args.graph)?;
    let query = graph.resolve_query(&split_keywords(&args.keywords))?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["engine", "topk", "distinct_root_miss_pct", "nonminimal_miss_pct", "answers"])?;
    let kinds = match args.engine {
        EngineChoice::Oracle => return Err(Error::InvalidQueries("analyze runs gtf or naive".into())),
        choice => engines(choice),
    };
    for engine in kinds {
        let (answers, _) = collect(&graph, &query, engine, options(args))?;
        let report = MissReport::new(&graph, &answers);
        if report.total == 0 {
            writeln!(ctx.err, "warning: {engine} produced no answers; miss rates reported as 0%")?;
        }
        writer.write_record([
            engine.name().to_string(),
            args.top.to_string(),
            format!("{:.3}", report.distinct_root_pct()),
            format!("{:.3}", report.nonminimal_pct()),
            report.total.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let csv = String::from_utf8(bytes).expect("csv is utf-8");
    write_output(ctx, "miss_report.csv", &csv)?;
    write!(ctx.out, "{csv}")?;
    Ok(EXIT_OK)
}

fn write_output(ctx: &mut Context<'_>, name: &str, contents: &str) -> Result<()> {
    let path: &Path = &ctx.out_dir.join(name);
    fs::write(path, contents)?;
    writeln!(ctx.err, "wrote {}", path.display())?;
    Ok(())
}
