use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdffrag::engine::{combine_components, QueryEngine};
use rdffrag::fragmenter::{Strategy, MANIFEST};
use rdffrag::pipeline::{
    allocation_text, bench_table, load_graph, load_query, load_workload, mine_stage, run_bench, run_offline, Artifacts,
    Config, Offline, PipelineError, FRAGMENTS_DIR,
};
use rdffrag::query::Workload;
use rdffrag::rdf::{property_frequencies, RdfGraph};
use rdffrag::synth::bench_dataset;

#[derive(Parser)]
#[command(name = "rdffrag", version, about = "Workload-driven RDF fragmentation, allocation and query processing")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// key=value settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// N-Triples data graph.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Query workload, one SELECT per block.
    #[arg(long, global = true)]
    workload: Option<PathBuf>,
    /// Hot-property threshold, `N` or `N%` of the workload.
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Minimum pattern support, `N` or `N%` of the workload.
    #[arg(long = "min-sup", global = true)]
    min_sup: Option<String>,
    /// Edge budget for selected patterns.
    #[arg(long, global = true)]
    sc: Option<String>,
    #[arg(long, global = true)]
    sites: Option<String>,
    /// vertical or horizontal.
    #[arg(long, global = true)]
    strategy: Option<String>,
    #[arg(long = "min-acc", global = true)]
    min_acc: Option<String>,
    #[arg(long = "max-pattern-edges", global = true)]
    max_pattern_edges: Option<String>,
    /// Artifact directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    concurrency: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print frequent access patterns: code, acc, edges.
    Mine,
    /// Print the selected patterns and the benefit/cost summary.
    Select,
    /// Run the whole offline pipeline and persist artifacts to --out.
    Partition,
    /// Print the fragment-to-site assignment.
    Allocate,
    /// Answer one query file from --out artifacts, or from --graph/--workload.
    Query { file: PathBuf },
    /// Replay a workload and print a tab-separated report.
    Bench {
        /// Queries to replay instead of the workload.
        #[arg(long)]
        queries: Option<PathBuf>,
        /// Generate a synthetic `TRIPLES:QUERIES` dataset; RDFFRAG_SEED picks the seed.
        #[arg(long)]
        synthetic: Option<String>,
    },
    /// Describe the graph, the hot/cold split and any stored fragments.
    Stats,
}

impl Opts {
    fn config(&self) -> Result<Config, PipelineError> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|source| PipelineError::MissingInput { path: path.clone(), source })?;
            cfg.apply_text(&text)?;
        }
        let flags = [
            ("theta", &self.theta),
            ("min_sup", &self.min_sup),
            ("sc", &self.sc),
            ("sites", &self.sites),
            ("strategy", &self.strategy),
            ("min_acc", &self.min_acc),
            ("max_pattern_edges", &self.max_pattern_edges),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        for (k, v) in [("graph", &self.graph), ("workload", &self.workload), ("out", &self.out)] {
            if let Some(v) = v {
                cfg.set(k, &v.to_string_lossy())?;
            }
        }
        Ok(cfg)
    }
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, PipelineError> {
    p.as_deref().ok_or_else(|| PipelineError::Usage(format!("--{flag} is required")))
}

fn inputs(cfg: &Config) -> Result<(RdfGraph, Workload), PipelineError> {
    let g = load_graph(required(&cfg.graph, "graph")?)?;
    let w = load_workload(required(&cfg.workload, "workload")?)?;
    Ok((g, w))
}

fn offline(cfg: &Config) -> Result<Offline, PipelineError> {
    let (g, w) = inputs(cfg)?;
    run_offline(&g, &w, &cfg.params(w.len()))
}

fn has_artifacts(cfg: &Config) -> bool {
    cfg.out.as_ref().is_some_and(|d| d.join(FRAGMENTS_DIR).join(MANIFEST).is_file())
}

fn mine(cfg: &Config) -> Result<(), PipelineError> {
    let w = load_workload(required(&cfg.workload, "workload")?)?;
    let (_, mined) = mine_stage(&RdfGraph::empty(), &w, &cfg.params(w.len()));
    for fp in mined {
        println!("{}\t{}\t{}", fp.pattern.code(), fp.acc, fp.pattern.edge_count());
    }
    Ok(())
}

fn select(cfg: &Config) -> Result<(), PipelineError> {
    let off = offline(cfg)?;
    for s in &off.selection.selected {
        println!("{}", s.pattern.code());
    }
    let sc = off.params.sc.unwrap_or(2 * off.split.hot.edge_count());
    println!("benefit={} cost={} SC={}", off.selection.benefit, off.selection.total_edge_cost, sc);
    Ok(())
}

fn partition(cfg: &Config) -> Result<(), PipelineError> {
    let off = offline(cfg)?;
    if let Some(dir) = &cfg.out {
        off.persist(dir)?;
    }
    print!("{}", off.summary());
    Ok(())
}

fn allocate(cfg: &Config) -> Result<(), PipelineError> {
    let (frags, alloc) = if cfg.graph.is_none() && has_artifacts(cfg) {
        let a = Artifacts::load(cfg.out.as_deref().unwrap())?;
        (a.fragmentation, a.allocation)
    } else {
        let off = offline(cfg)?;
        (off.fragmentation, off.allocation)
    };
    print!("{}", allocation_text(&alloc));
    println!("skew={}", alloc.skew(&frags));
    Ok(())
}

fn engine(cfg: &Config) -> Result<QueryEngine, PipelineError> {
    if cfg.graph.is_none() && has_artifacts(cfg) {
        Ok(Artifacts::load(cfg.out.as_deref().unwrap())?.engine())
    } else {
        Ok(offline(cfg)?.engine())
    }
}

fn query(cfg: &Config, file: &Path) -> Result<(), PipelineError> {
    let components = load_query(file)?;
    let engine = engine(cfg)?;
    let outcomes = engine.run_components(&components);
    let mut sites = std::collections::BTreeSet::new();
    let (mut shipped, mut cost, mut elapsed) = (0usize, 0u128, 0f64);
    for (i, o) in outcomes.iter().enumerate() {
        let codes: Vec<String> = o.decomposition.subqueries.iter().map(|s| s.kind.to_string()).collect();
        let order: Vec<String> = o.plan.order.iter().map(usize::to_string).collect();
        println!("component {i} decomposition: {}", codes.join(" "));
        let joined: Vec<String> = o.report.join_order.iter().map(usize::to_string).collect();
        println!("component {i} plan: {}", order.join(" "));
        println!("component {i} joined: {}", joined.join(" "));
        sites.extend(o.report.sites_touched.iter().copied());
        shipped += o.report.shipped_bindings;
        cost = cost.saturating_add(o.plan.est_cost);
        elapsed += o.report.elapsed.as_secs_f64() * 1e3;
    }
    print!("{}", combine_components(&outcomes).to_table());
    println!("sites={} shipped={shipped} cost_est={cost} elapsed_ms={elapsed:.3}", sites.len());
    Ok(())
}

fn seed() -> Result<u64, PipelineError> {
    match std::env::var("RDFFRAG_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| PipelineError::Usage(format!("RDFFRAG_SEED `{s}` is not an integer"))),
        Err(_) => Ok(0),
    }
}

fn bench(cli: &Opts, cfg: &Config, queries: Option<&Path>, synthetic: Option<&str>) -> Result<(), PipelineError> {
    let (g, w) = match synthetic {
        Some(sizes) => {
            let parsed = sizes.split_once(':').and_then(|(t, q)| Some((t.parse().ok()?, q.parse().ok()?)));
            let (t, q) = parsed.ok_or_else(|| PipelineError::Usage(format!("--synthetic `{sizes}`: expected TRIPLES:QUERIES")))?;
            bench_dataset(seed()?, t, q)
        }
        None => inputs(cfg)?,
    };
    let replay = match queries {
        Some(path) => load_workload(path)?,
        None => w.clone(),
    };
    let strategies = if cli.strategy.is_some() { vec![cfg.strategy] } else { vec![Strategy::Vertical, Strategy::Horizontal] };
    let mut rows = Vec::new();
    for strategy in strategies {
        let params = rdffrag::pipeline::Params { strategy, ..cfg.params(w.len()) };
        let off = run_offline(&g, &w, &params)?;
        log::info!("{strategy}: redundancy {:.4}", off.summary().redundancy);
        rows.extend(run_bench(&off.engine(), &strategy.to_string(), replay.queries(), cli.concurrency, Some(&g)));
    }
    print!("{}", bench_table(&rows));
    Ok(())
}

fn stats(cfg: &Config) -> Result<(), PipelineError> {
    if let Some(path) = &cfg.graph {
        let g = load_graph(path)?;
        println!("edges={} vertices={} properties={}", g.edge_count(), g.vertex_count(), g.labels().len());
        if let Some(wp) = &cfg.workload {
            let w = load_workload(wp)?;
            let params = cfg.params(w.len());
            let freq = property_frequencies(&w);
            println!("queries={} theta={}", w.len(), params.theta);
            for p in g.labels() {
                let n = freq.get(p).copied().unwrap_or(0);
                let side = if n >= params.theta { "hot" } else { "cold" };
                println!("{p}\t{}\t{n}\t{side}", g.property_count(p));
            }
        }
    }
    if has_artifacts(cfg) {
        let a = Artifacts::load(cfg.out.as_deref().unwrap())?;
        println!("strategy={} fragments={}", a.fragmentation.strategy, a.fragmentation.fragments.len());
        for f in &a.fragmentation.fragments {
            let site = a.allocation.site_of.get(&f.id).map_or("-".to_string(), usize::to_string);
            println!("{}\t{}\t{}\tsite {site}", f.id, f.edge_count(), f.source.descriptor());
        }
    } else if cfg.graph.is_none() {
        return Err(PipelineError::Usage("stats needs --graph or an --out directory with artifacts".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    let cfg = cli.opts.config()?;
    match &cli.command {
        Command::Mine => mine(&cfg),
        Command::Select => select(&cfg),
        Command::Partition => partition(&cfg),
        Command::Allocate => allocate(&cfg),
        Command::Query { file } => query(&cfg, file),
        Command::Bench { queries, synthetic } => bench(&cli.opts, &cfg, queries.as_deref(), synthetic.as_deref()),
        Command::Stats => stats(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rdffrag: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
