use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use graph_morse::corpus;
use graph_morse::gauge::GaugePotential;
use graph_morse::graph_model::{Edge, Graph, Vertex};
use graph_morse::input::{parse_input, GraphInput, RawGraph};
use graph_morse::pipeline::{
    analyze, verify_invariants, Analysis, AnalysisOptions, InvariantFailure, PipelineError, RunReport, Timing,
};
use graph_morse::trial_fix::TieBreakPolicy;

mod dot;

#[derive(Parser)]
#[command(version, about = "Discrete Morse theory on two-particle configuration spaces of graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one graph and print a JSON report.
    Build {
        #[command(flatten)]
        run: RunArgs,
        /// Include wall-clock timing (makes output non-deterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Check every invariant on seeded random graphs.
    Verify(VerifyArgs),
    /// Print the gauge potential of one graph as JSON.
    Gauge {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Graph file: JSON object or an edge list with one "i j" pair per line.
    input: PathBuf,
    /// Which 1-cell to raise at each repair site.
    #[arg(long, default_value = "min")]
    policy: TieBreakPolicy,
    /// Spanning tree override, e.g. 1-2,2-3,2-4.
    #[arg(long)]
    tree: Option<String>,
    /// Root override; must be a leaf of the tree.
    #[arg(long)]
    root: Option<Vertex>,
    /// Directory for DOT drawings of the graph and the complex.
    #[arg(long)]
    emit_dot: Option<PathBuf>,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest random graph, at most 10.
    #[arg(long, default_value_t = 8)]
    max_vertices: usize,
    #[arg(long, default_value_t = 100)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra named graphs (lasso, bowtie, star, petersen, kN, kA,B, pathN,
    /// cycleN); repeatable.
    #[arg(long)]
    corpus: Vec<String>,
    /// Also compare the Morse boundary against explicit V-path sums.
    #[arg(long)]
    cross_validate: bool,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(anyhow::Error),
    Invariant(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    // Display already carries the source message.
    let msg = anyhow!(e.to_string());
    match e {
        PipelineError::Graph(_) | PipelineError::Complex(_) => Failure::Input(msg),
        _ => Failure::Invariant(msg),
    }
}

fn parse_tree(list: &str) -> Result<Vec<Edge>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| anyhow!("tree edge {pair:?} should look like 1-2"))?;
            let a: Vertex = a.trim().parse().with_context(|| format!("bad vertex in {pair:?}"))?;
            let b: Vertex = b.trim().parse().with_context(|| format!("bad vertex in {pair:?}"))?;
            Edge::try_new(a, b).ok_or_else(|| anyhow!("tree edge {pair:?} is a loop"))
        })
        .collect()
}

fn load(run: &RunArgs) -> Result<(GraphInput, AnalysisOptions)> {
    let text = fs::read_to_string(&run.input).with_context(|| format!("reading {}", run.input.display()))?;
    let input = parse_input(&text).with_context(|| format!("parsing {}", run.input.display()))?;
    let tree = match &run.tree {
        Some(list) => Some(parse_tree(list)?),
        None => input.tree.clone(),
    };
    let options = AnalysisOptions {
        policy: run.policy,
        tree,
        root: run.root.or(input.root),
    };
    Ok((input, options))
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    match out {
        Some(path) => fs::write(path, json).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    Ok(())
}

fn write_dot(dir: &Path, input: &Path, a: &Analysis) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
    fs::write(dir.join(format!("{stem}.graph.dot")), dot::graph_dot(a))?;
    fs::write(dir.join(format!("{stem}.d2.dot")), dot::complex_dot(a))?;
    Ok(())
}

fn report_failures(failures: &[InvariantFailure]) -> Result<(), Failure> {
    if failures.is_empty() {
        return Ok(());
    }
    for f in failures {
        eprintln!("invariant {} failed: {}", f.check, f.detail);
    }
    Err(Failure::Invariant(anyhow!("{} invariant checks failed", failures.len())))
}

fn run_pipeline(run: &RunArgs) -> Result<Analysis, Failure> {
    let (input, options) = load(run)?;
    let a = analyze(&input.graph, &options).map_err(pipeline_failure)?;
    if let Some(dir) = &run.emit_dot {
        write_dot(dir, &run.input, &a)?;
    }
    Ok(a)
}

fn cmd_build(run: &RunArgs, timing: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let a = run_pipeline(run)?;
    let failures = verify_invariants(&a, false);
    let timing = timing.then(|| Timing {
        milliseconds: start.elapsed().as_secs_f64() * 1e3,
    });
    emit(run.out.as_deref(), &RunReport::new(&a, timing))?;
    report_failures(&failures)
}

#[derive(Serialize)]
struct GaugeReport<'a> {
    relabeling: Vec<[Vertex; 2]>,
    perfect: bool,
    #[serde(flatten)]
    potential: &'a GaugePotential,
}

fn cmd_gauge(run: &RunArgs) -> Result<(), Failure> {
    let a = run_pipeline(run)?;
    let failures = verify_invariants(&a, false);
    let report = GaugeReport {
        relabeling: a.relabeling.pairs().map(|(o, n)| [o, n]).collect(),
        perfect: a.perfect(),
        potential: &a.gauge,
    };
    emit(run.out.as_deref(), &report)?;
    report_failures(&failures)
}

struct Sample {
    label: String,
    graph: Graph,
}

struct SampleResult {
    line: String,
    failures: Vec<String>,
}

fn check_sample(s: &Sample, cross: bool) -> SampleResult {
    let mut failures = Vec::new();
    let mut h1 = Vec::new();
    for policy in TieBreakPolicy::ALL {
        let options = AnalysisOptions {
            policy,
            ..Default::default()
        };
        match analyze(&s.graph, &options) {
            Ok(a) => {
                for f in verify_invariants(&a, cross) {
                    failures.push(format!("{policy}: {} ({})", f.check, f.detail));
                }
                h1.push(a.homology);
            }
            Err(e) => failures.push(format!("{policy}: {e}")),
        }
    }
    if h1.len() == 2 && h1[0] != h1[1] {
        failures.push(format!("policies disagree: {:?} vs {:?}", h1[0], h1[1]));
    }
    let g = &s.graph;
    let summary = h1.first().map_or("-".to_string(), |h| h.h1_string());
    let status = if failures.is_empty() { "ok" } else { "FAIL" };
    SampleResult {
        line: format!(
            "{}: v={} e={} H1={summary} {status}",
            s.label,
            g.vertex_count(),
            g.edges().len()
        ),
        failures,
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if !(2..=10).contains(&args.max_vertices) {
        return Err(Failure::Input(anyhow!("--max-vertices must be between 2 and 10")));
    }
    let mut samples: Vec<Sample> = (0..args.samples)
        .map(|i| Sample {
            label: format!("sample {i}"),
            graph: corpus::sample_graph(args.seed, i, 2, args.max_vertices),
        })
        .collect();
    for name in &args.corpus {
        let graph = corpus::named(name).ok_or_else(|| anyhow!("unknown corpus graph {name:?}"))?;
        if graph.vertex_count() < 2 {
            return Err(Failure::Input(anyhow!("corpus graph {name:?} has fewer than 2 vertices")));
        }
        samples.push(Sample {
            label: name.clone(),
            graph,
        });
    }
    let results: Vec<SampleResult> = samples.par_iter().map(|s| check_sample(s, args.cross_validate)).collect();

    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    for (s, r) in samples.iter().zip(&results) {
        writeln!(stdout, "{}", r.line)?;
        for f in &r.failures {
            writeln!(stdout, "  {f}")?;
        }
        if !r.failures.is_empty() {
            if failed == 0 {
                writeln!(stdout, "  reproduce with: {}", RawGraph::from_graph(&s.graph).to_json())?;
            }
            failed += 1;
        }
    }
    writeln!(
        stdout,
        "verify: {} graphs, seed {}, {} failed",
        samples.len(),
        args.seed,
        failed
    )?;
    if failed > 0 {
        return Err(Failure::Invariant(anyhow!("{failed} graphs failed verification")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { run, timing } => cmd_build(run, *timing),
        Command::Verify(args) => cmd_verify(args),
        Command::Gauge { run } => cmd_gauge(run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
