//! Command-line front end.
//!
//! Graph arguments are edge-list files or built-in generators written as
//! `cycle:N`, `lollipop:N`, `theta:K`, `complete:N` or `random:N:M` (the
//! random generator draws from `--seed`).
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 graph not in class S,
//! 3 pop cap exceeded, 4 instance too large for the oracle, 5 unknown
//! experiment, 6 a verification or experiment verdict failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cycle::{sample_dst_with, Digraph, DstConfig};
use crate::error::{Error, Result};
use crate::format;
use crate::graph::{GraphKind, Multigraph};
use crate::harness::checks::{diamond_check, monotonicity_check, random_class_s_subgraph};
use crate::harness::{
    run_experiment, run_uniformity_experiment_at, ExperimentParams, ExperimentReport,
    ScalingFamily, EXPERIMENTS,
};
use crate::oracle::{enumerate_dsts, enumerate_sfos, ChainReport, ChainRule};
use crate::popper::{sample_fast, ChoiceRule, PopperConfig};
use crate::stacks::{derive_seed, StackSource};

#[derive(Debug, Parser)]
#[command(name = "sinkpop", version, about = "Exact uniform sink-free orientations by sink popping")]
pub struct Cli {
    /// Base seed (decimal 64-bit).
    #[arg(long, global = true, env = "SINKPOP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Format for records and reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
    /// Sample sink-free orientations (or directed spanning trees).
    Sample(SampleArgs),
    /// List every sink-free orientation (or directed spanning tree).
    Enumerate(EnumerateArgs),
    /// Check uniformity, rule independence and the subgraph coupling.
    Verify(VerifyArgs),
    /// Run a named experiment and stream its reports.
    Experiment(ExperimentArgs),
    /// Time repeated sampling.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator such as `cycle:8` or `random:6:9`.
    pub graph: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Edge-list file or generator; an arc-list file with `--tree-root`.
    pub graph: String,
    #[arg(long, default_value = "fifo")]
    pub rule: ChoiceRule,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write one file per sample into this directory instead of stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Emit per-replicate statistics to this file (stderr if no path).
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    pub stats: Option<String>,
    /// Abort a run after this many pops.
    #[arg(long)]
    pub max_pops: Option<u64>,
    /// Sample directed spanning trees toward this root.
    #[arg(long)]
    pub tree_root: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub graph: String,
    /// Print the exact chain summary instead of the list.
    #[arg(long)]
    pub chain: bool,
    /// Enumerate directed spanning trees toward this root.
    #[arg(long)]
    pub tree_root: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
    /// Stack realizations for the rule and coupling suites.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of: uniformity, mean-tau, per-vertex-q, conditional-cycle,
    /// equality, extremal, scaling, walk.
    pub name: String,
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub family: Option<ScalingFamily>,
    /// Include wall-clock time in reports.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(required = true)]
    pub graphs: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value = "fifo")]
    pub rule: ChoiceRule,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotInClassS { .. } => 2,
        Error::PopCapExceeded { .. } => 3,
        Error::TooLarge(_) => 4,
        Error::UnknownExperiment(_) => 5,
        _ => 1,
    }
}

/// Parses and runs a command line, writing to `out`. Returns the exit code.
pub fn main_with<I, T, W>(args: I, out: &mut W, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("i/o error: {e}"))
}

/// Built-in generator or edge-list file.
pub fn load_graph(spec: &str, seed: u64) -> Result<Multigraph> {
    match generator(spec, seed)? {
        Some(kind) => kind.build(),
        None => format::parse_edge_list(&read(spec)?),
    }
}

fn load_digraph(spec: &str, seed: u64) -> Result<Digraph> {
    match generator(spec, seed)? {
        Some(kind) => {
            let g = kind.build()?;
            Digraph::bidirected(g.vertex_count(), g.edges().iter().map(|e| (e.a, e.b)))
        }
        None => format::parse_arc_list(&read(spec)?),
    }
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))
}

fn generator(spec: &str, seed: u64) -> Result<Option<GraphKind>> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("");
    let nums: Vec<&str> = parts.collect();
    if nums.is_empty() || Path::new(spec).exists() {
        return Ok(None);
    }
    let num = |i: usize| -> Result<usize> {
        nums.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("bad generator `{spec}`")))
    };
    let kind = match (name, nums.len()) {
        ("cycle", 1) => GraphKind::Cycle(num(0)?),
        ("lollipop", 1) => GraphKind::Lollipop(num(0)?),
        ("theta", 1) => GraphKind::Theta(num(0)?),
        ("complete", 1) => GraphKind::Complete(num(0)?),
        ("random", 2) => GraphKind::Random {
            n: num(0)?,
            m: num(1)?,
            seed,
        },
        _ => return Ok(None),
    };
    Ok(Some(kind))
}

fn run<W: Write>(cli: &Cli, out: &mut W, err: &mut dyn Write) -> Result<i32> {
    let seed = cli.seed;
    let json = cli.format == OutputFormat::Json;
    match &cli.command {
        Command::Generate(a) => {
            let g = match generator(&a.graph, seed)? {
                Some(kind) => kind.build()?,
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "`{}` is not a generator",
                        a.graph
                    )))
                }
            };
            let text = if json {
                let edges: Vec<[usize; 2]> = g.edges().iter().map(|e| [e.a, e.b]).collect();
                format!("{}\n", json!({ "n": g.vertex_count(), "edges": edges }))
            } else {
                format::write_edge_list(&g)
            };
            emit(out, a.output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Sample(a) => sample(a, seed, json, out, err),
        Command::Enumerate(a) => enumerate(a, seed, json, out),
        Command::Verify(a) => verify(a, seed, json, out),
        Command::Experiment(a) => experiment(a, seed, json, out),
        Command::Bench(a) => bench(a, seed, json, out),
    }
}

fn emit<W: Write>(out: &mut W, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn sample<W: Write>(a: &SampleArgs, seed: u64, json: bool, out: &mut W, err: &mut dyn Write) -> Result<i32> {
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file_for = |i: usize| a.out_dir.as_ref().map(|d| d.join(format!("sample-{i}.txt")));
    if let Some(root) = a.tree_root {
        let h = load_digraph(&a.graph, seed)?;
        for i in 0..a.count {
            let src = StackSource::new(derive_seed(seed, i as u64));
            let run = sample_dst_with(&h, root, &src, &DstConfig::default())?;
            let text = if json {
                format!("{}\n", json!({ "replicate": i, "root": root, "parent_arc": run.tree.parent_arc }))
            } else if a.count > 1 && a.out_dir.is_none() {
                format!("# sample {i}\n{}", format::write_tree(&run.tree))
            } else {
                format::write_tree(&run.tree)
            };
            emit(out, file_for(i).as_deref(), &text)?;
        }
        return Ok(0);
    }

    let g = load_graph(&a.graph, seed)?;
    g.require_class_s()?;
    let cfg = PopperConfig {
        max_pops: a.max_pops,
        ..PopperConfig::default()
    };
    let runs = crate::harness::replicate(a.count, seed, |s| sample_fast(&g, s, a.rule, &cfg))?;
    let mut stats = String::new();
    if !json && a.stats.is_some() {
        stats.push_str("replicate,tau,pop_work,q\n");
    }
    for (i, r) in runs.iter().enumerate() {
        let text = if json {
            let arcs: Vec<[usize; 2]> = (0..g.edge_count())
                .map(|e| [r.sfo.tail(&g, e), r.sfo.head(&g, e)])
                .collect();
            format!("{}\n", json!({ "replicate": i, "arcs": arcs }))
        } else if a.count > 1 && a.out_dir.is_none() {
            format!("# sample {i}\n{}", format::write_orientation(&g, &r.sfo))
        } else {
            format::write_orientation(&g, &r.sfo)
        };
        emit(out, file_for(i).as_deref(), &text)?;
        if a.stats.is_some() {
            if json {
                let _ = writeln!(
                    stats,
                    "{}",
                    json!({ "replicate": i, "tau": r.tau, "pop_work": r.pop_work, "q": r.q })
                );
            } else {
                let q: Vec<String> = r.q.iter().map(u64::to_string).collect();
                let _ = writeln!(stats, "{i},{},{},{}", r.tau, r.pop_work, q.join(" "));
            }
        }
    }
    match a.stats.as_deref() {
        Some("-") => err.write_all(stats.as_bytes()).map_err(io)?,
        Some(path) => std::fs::write(path, stats).map_err(io)?,
        None => {}
    }
    Ok(0)
}

fn enumerate<W: Write>(a: &EnumerateArgs, seed: u64, json: bool, out: &mut W) -> Result<i32> {
    let mut text = String::new();
    if let Some(root) = a.tree_root {
        let h = load_digraph(&a.graph, seed)?;
        let trees = enumerate_dsts(&h, root)?;
        if json {
            let list: Vec<_> = trees.iter().map(|t| &t.parent_arc).collect();
            let _ = writeln!(text, "{}", json!({ "count": trees.len(), "trees": list }));
        } else {
            let _ = writeln!(text, "# count {}", trees.len());
            for (i, t) in trees.iter().enumerate() {
                let _ = write!(text, "# tree {i}\n{}", format::write_tree(t));
            }
        }
    } else {
        let g = load_graph(&a.graph, seed)?;
        if a.chain {
            let report = ChainReport::compute(&g, &ChainRule::min_vertex_id(g.vertex_count()))?;
            if json {
                let _ = writeln!(text, "{}", serde_json::to_string(&report).expect("serializable"));
            } else {
                let _ = writeln!(text, "N,expected_tau,uniform,exact_arithmetic");
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    report.sfo_count,
                    report
                        .expected_tau
                        .exact
                        .as_ref()
                        .map_or(report.expected_tau.value.to_string(), |q| q.to_string()),
                    report.distribution.uniform,
                    report.exact_arithmetic
                );
            }
        } else {
            let census = enumerate_sfos(&g)?;
            if json {
                let list: Vec<&[u8]> = census.members.iter().map(|o| o.bits()).collect();
                let _ = writeln!(text, "{}", json!({ "N": census.count, "bits": list }));
            } else {
                let _ = writeln!(text, "# N {}", census.count);
                for (i, o) in census.members.iter().enumerate() {
                    let _ = write!(text, "# sfo {i}\n{}", format::write_orientation(&g, o));
                }
            }
        }
    }
    emit(out, None, &text)?;
    Ok(0)
}

fn verify<W: Write>(a: &VerifyArgs, seed: u64, json: bool, out: &mut W) -> Result<i32> {
    let g = load_graph(&a.graph, seed)?;
    g.require_class_s()?;
    let mut suites = Vec::new();

    let uniformity = run_uniformity_experiment_at(&g, a.samples, derive_seed(seed, 0), a.alpha)?;
    suites.push((
        "uniformity",
        uniformity.verdict.passed(),
        json!({ "sfo_count": uniformity.details["sfo_count"], "chi_square": uniformity.details["chi_square"] }),
    ));

    let diamond = diamond_check(&g, a.trials, derive_seed(seed, 1))?;
    suites.push(("diamond", diamond.pass(), json!(diamond)));

    let mut coupling = Vec::new();
    let mut coupling_ok = true;
    for i in 0..4u64 {
        if let Some(h) = random_class_s_subgraph(&g, derive_seed(seed, 10 + i), 200) {
            let s = monotonicity_check(&g, &h, a.trials, derive_seed(seed, 20 + i))?;
            coupling_ok &= s.pass();
            coupling.push(json!({ "subgraph_edges": h.edge_map, "summary": s }));
        }
    }
    suites.push(("monotonicity", coupling_ok, json!({ "pairs": coupling })));

    let chain = ChainReport::compute(&g, &ChainRule::min_vertex_id(g.vertex_count()))?;
    suites.push((
        "exact",
        chain.distribution.uniform,
        json!({
            "N": chain.sfo_count,
            "expected_tau": chain.expected_tau,
            "exact_arithmetic": chain.exact_arithmetic,
        }),
    ));

    let all = suites.iter().all(|s| s.1);
    let mut text = String::new();
    if json {
        for (name, pass, detail) in &suites {
            let _ = writeln!(text, "{}", json!({ "suite": name, "pass": pass, "detail": detail }));
        }
    } else {
        let _ = writeln!(text, "suite,pass,detail");
        for (name, pass, detail) in &suites {
            let _ = writeln!(text, "{name},{pass},\"{}\"", detail.to_string().replace('"', "\"\""));
        }
    }
    emit(out, None, &text)?;
    Ok(if all { 0 } else { 6 })
}

fn experiment<W: Write>(a: &ExperimentArgs, seed: u64, json: bool, out: &mut W) -> Result<i32> {
    if !EXPERIMENTS.contains(&a.name.as_str()) {
        return Err(Error::UnknownExperiment(a.name.clone()));
    }
    let params = ExperimentParams {
        graph: a.graph.as_deref().map(|g| load_graph(g, seed)).transpose()?,
        n: a.n,
        j: a.j,
        samples: a.samples,
        sizes: a.sizes.clone(),
        family: a.family,
        seed,
    };
    let mut reports = run_experiment(&a.name, &params)?;
    if !a.timing {
        for r in &mut reports {
            r.runtime_secs = None;
        }
    }
    let text = render_reports(&reports, json);
    emit(out, None, &text)?;
    Ok(if reports.iter().all(|r| r.verdict.passed()) { 0 } else { 6 })
}

fn render_reports(reports: &[ExperimentReport], json: bool) -> String {
    let mut text = String::new();
    if json {
        for r in reports {
            let _ = writeln!(text, "{}", serde_json::to_string(r).expect("serializable"));
        }
    } else {
        let _ = writeln!(text, "name,parameters,seed,samples,mean,std_error,reference,verdict");
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for r in reports {
            let _ = writeln!(
                text,
                "{},\"{}\",{},{},{},{},{},{}",
                r.name,
                r.parameters.to_string().replace('"', "\"\""),
                r.seed.map_or(String::new(), |s| s.to_string()),
                r.samples,
                opt(r.mean),
                opt(r.std_error),
                opt(r.reference.as_ref().map(|x| x.value)),
                serde_json::to_value(r.verdict).expect("serializable").as_str().unwrap_or(""),
            );
        }
    }
    text
}

fn bench<W: Write>(a: &BenchArgs, seed: u64, json: bool, out: &mut W) -> Result<i32> {
    let mut text = String::new();
    if !json {
        let _ = writeln!(text, "graph,n,m,samples,mean_tau,mean_pop_work,secs");
    }
    for spec in &a.graphs {
        let g = load_graph(spec, seed)?;
        g.require_class_s()?;
        let start = std::time::Instant::now();
        let runs = crate::harness::replicate(a.samples, seed, |s| {
            sample_fast(&g, s, a.rule, &PopperConfig::default())
        })?;
        let secs = start.elapsed().as_secs_f64();
        let k = runs.len().max(1) as f64;
        let tau = runs.iter().map(|r| r.tau).sum::<u64>() as f64 / k;
        let work = runs.iter().map(|r| r.pop_work).sum::<u64>() as f64 / k;
        if json {
            let _ = writeln!(
                text,
                "{}",
                json!({
                    "graph": spec, "n": g.vertex_count(), "m": g.edge_count(),
                    "samples": a.samples, "mean_tau": tau, "mean_pop_work": work, "secs": secs,
                })
            );
        } else {
            let _ = writeln!(
                text,
                "{spec},{},{},{},{tau},{work},{secs:.6}",
                g.vertex_count(),
                g.edge_count(),
                a.samples
            );
        }
    }
    emit(out, None, &text)?;
    Ok(0)
}

impl clap::ValueEnum for ChoiceRule {
    fn value_variants<'a>() -> &'a [Self] {
        &ChoiceRule::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

impl clap::ValueEnum for ScalingFamily {
    fn value_variants<'a>() -> &'a [Self] {
        &[ScalingFamily::Cycle, ScalingFamily::Complete]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            ScalingFamily::Cycle => "cycle",
            ScalingFamily::Complete => "complete",
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(
            std::iter::once("sinkpop").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn generators() {
        let (code, out, _) = run_cli(&["generate", "lollipop:3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "3 3\n0 1\n1 2\n2 2\n");
        let (code, _, _) = run_cli(&["generate", "nonsense"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn sample_unique_sfo() {
        let (code, out, err) = run_cli(&["sample", "lollipop:4", "--seed", "7", "--stats"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0 1\n1 2\n2 3\n3 3\n");
        assert!(err.starts_with("replicate,tau,pop_work,q\n0,"));
    }

    #[test]
    fn sample_outside_class_s() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k2.txt");
        std::fs::write(&path, "2 1\n0 1\n").unwrap();
        let (code, _, err) = run_cli(&["sample", path.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("{0,1}"), "{err}");
    }

    #[test]
    fn unknown_flag_and_experiment() {
        assert_eq!(run_cli(&["sample", "cycle:3", "--bogus"]).0, 1);
        assert_eq!(run_cli(&["experiment", "nosuch"]).0, 5);
    }
}
