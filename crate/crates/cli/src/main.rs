use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;
use zsz_core::code::{CheckType, CssCode};
use zsz_core::distance::{estimate_classical_distance, estimate_distance, search_codes, SearchConfig, SearchSpace};
use zsz_core::graph::{
    ball_growth, cayley_graph, diameter, girth, greedy_coloring, qubit_adjacency, ColoringStrategy, Side,
};
use zsz_core::group::{left_regular, GroupAlgebraElement, GroupSpec};
use zsz_core::harness::{
    parse_csv, run_simulation, threshold_report, to_csv, CodeSelector, ExperimentConfig, HarnessError,
};
use zsz_core::routing::{
    route_left_action, route_right_action, route_se_round, verify_se_round, RouteOptions, RoutingError,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        usage(e)
    }
}

#[derive(Parser)]
#[command(
    name = "zsz",
    version,
    about = "ZSZ quantum LDPC codes: build, analyze, simulate, route"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "ZSZ_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its parameters.
    Build(BuildArgs),
    /// Graph structure: girth, diameter, ball growth, coloring.
    Analyze(AnalyzeArgs),
    /// Upper bound on the code distance by information-set sampling.
    Distance(DistanceArgs),
    /// Random search for codes with given k and distance.
    Search(SearchArgs),
    /// Memory experiments from a key=value config; writes CSV.
    Simulate(SimulateArgs),
    /// Crossing points and ordering from simulation CSV files.
    Threshold(ThresholdArgs),
    /// Compile syndrome extraction into grid-transfer move scripts.
    Route(RouteArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// Named code from the built-in table.
    #[arg(long, conflicts_with_all = ["toric", "l"])]
    fixture: Option<String>,
    /// 4D toric code of linear size L.
    #[arg(long, conflicts_with = "l")]
    toric: Option<usize>,
    /// Order of the cyclic normal subgroup.
    #[arg(long = "l", requires = "a")]
    l: Option<u32>,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Twist exponent; 1 gives the abelian group.
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// First polynomial, e.g. "1+x+x^2*y".
    #[arg(long)]
    a: Option<String>,
    /// Second polynomial; without it the classical code ker L[a] is built.
    #[arg(long)]
    b: Option<String>,
}

enum Built {
    Quantum(Box<CssCode>),
    Classical { spec: GroupSpec, a: GroupAlgebraElement },
}

impl CodeArgs {
    fn build(&self) -> Result<Built, CliError> {
        if let Some(name) = &self.fixture {
            return Ok(Built::Quantum(Box::new(CodeSelector::Fixture(name.clone()).build()?)));
        }
        if let Some(l) = self.toric {
            return Ok(Built::Quantum(Box::new(CodeSelector::Toric4d(l).build()?)));
        }
        let (Some(ell), Some(a)) = (self.l, &self.a) else {
            return Err(usage("choose a code with --fixture, --toric or --l/--m/--q/--a"));
        };
        match &self.b {
            Some(b) => {
                let sel = CodeSelector::Inline {
                    ell,
                    m: self.m,
                    q: self.q,
                    a: a.clone(),
                    b: b.clone(),
                };
                Ok(Built::Quantum(Box::new(sel.build()?)))
            }
            None => {
                let spec = GroupSpec::new(ell, self.m, self.q).map_err(usage)?;
                let a = GroupAlgebraElement::parse(spec, a).map_err(usage)?;
                Ok(Built::Classical { spec, a })
            }
        }
    }

    fn quantum(&self) -> Result<CssCode, CliError> {
        match self.build()? {
            Built::Quantum(code) => Ok(*code),
            Built::Classical { .. } => Err(usage("this command needs a quantum code (give --b)")),
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Information-set trials for a distance bound; 0 skips it.
    #[arg(long, default_value_t = 0)]
    distance_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Check type defining qubit adjacency.
    #[arg(long, default_value = "X")]
    side: CheckType,
    #[arg(long, default_value = "independent_set")]
    strategy: ColoringStrategy,
    /// Largest radius for ball growth.
    #[arg(long, default_value_t = 12)]
    radius: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the qubit adjacency graph as an edge list.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Write the coloring as vertex,color CSV.
    #[arg(long)]
    coloring: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    /// Range such as 7 or 7..15 (inclusive).
    #[arg(long)]
    ell: String,
    #[arg(long, default_value = "1")]
    m: String,
    #[arg(long, default_value = "1")]
    q: String,
    /// Terms per polynomial.
    #[arg(long, default_value_t = 3)]
    weight: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 1)]
    d_min: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_results: Option<usize>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated fixture names or toric4d:L.
    #[arg(long)]
    code: Option<String>,
    /// global or passive.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated physical error rates.
    #[arg(long)]
    p: Option<String>,
    /// Rounds (global) or cycles (passive).
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
    /// Extra key=value overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// CSV files written by `simulate`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// X, Z or both.
    #[arg(long, default_value = "both")]
    side: String,
    /// Allow row-selective transfers for the right action.
    #[arg(long)]
    selective: bool,
    /// Route a single monomial instead of full rounds.
    #[arg(long)]
    monomial: Option<String>,
    /// left or right, with --monomial.
    #[arg(long, default_value = "left")]
    action: String,
    /// Directory for per-monomial and full-round scripts.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn range(text: &str) -> Result<(u32, u32), CliError> {
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| usage(format!("bad range '{text}'")))
    };
    match text.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let v = parse(text)?;
            Ok((v, v))
        }
    }
}

fn weight_text(range: [usize; 2]) -> String {
    if range[0] == range[1] {
        range[0].to_string()
    } else {
        format!("{}-{}", range[0], range[1])
    }
}

/// Exact minimum weight of `ker h` when its dimension is small.
fn classical_distance(h: &zsz_core::BitMatrix) -> Option<usize> {
    let basis = h.nullspace();
    let k = basis.rows();
    if k == 0 || k > 20 {
        return None;
    }
    (1u32..1 << k)
        .map(|mask| {
            let mut v = zsz_core::BitVec::zeros(h.cols());
            for r in (0..k).filter(|r| mask >> r & 1 == 1) {
                v.xor_assign(&basis.row(r));
            }
            v.weight()
        })
        .min()
}

fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    match args.code.build()? {
        Built::Classical { spec, a } => {
            let h = left_regular(&a);
            let n = spec.order();
            let k = n - h.rank();
            let d = match classical_distance(&h) {
                Some(d) => format!("d={d}"),
                None if k == 0 => "d=-".to_string(),
                None => {
                    let est =
                        estimate_classical_distance(&h, args.distance_trials.max(100), args.seed).map_err(usage)?;
                    format!("d<={}", est.weight)
                }
            };
            println!("n={n} k={k} {d}");
            println!("classical group code over {spec}, h = L[{a}]");
        }
        Built::Quantum(code) => {
            let summary = code.summary();
            let adjacency = qubit_adjacency(&code, CheckType::X);
            let g = girth(&adjacency);
            let colors = greedy_coloring(&adjacency, ColoringStrategy::IndependentSet, args.seed).count;
            let d = if args.distance_trials > 0 && code.k() > 0 {
                let x = estimate_distance(&code, CheckType::X, args.distance_trials, args.seed).map_err(usage)?;
                let z = estimate_distance(&code, CheckType::Z, args.distance_trials, args.seed + 1).map_err(usage)?;
                Some(x.weight.min(z.weight))
            } else {
                None
            };
            if args.json {
                let out = json!({ "code": summary, "girth": g, "colors": colors, "distance_bound": d });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
                return Ok(());
            }
            println!("n={} k={}", summary.n, summary.k);
            println!("name={} family={}", summary.name, summary.family);
            if let Some(tb) = &code.two_block {
                println!("group={} a={} b={}", tb.spec, tb.a, tb.b);
            }
            println!(
                "check_weight x={} z={}",
                weight_text(summary.x_check_weight),
                weight_text(summary.z_check_weight)
            );
            println!(
                "qubit_degree x={} z={}",
                weight_text(summary.qubit_x_degree),
                weight_text(summary.qubit_z_degree)
            );
            println!("girth={}", g.map_or("none".to_string(), |g| g.to_string()));
            println!("colors={colors}");
            if let Some(d) = d {
                println!("d<={d}");
            }
        }
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let code = args.code.quantum()?;
    let adjacency = qubit_adjacency(&code, args.side);
    let coloring = greedy_coloring(&adjacency, args.strategy, args.seed);
    if let Some(path) = &args.edges {
        fs::write(path, adjacency.to_edge_list())?;
    }
    if let Some(path) = &args.coloring {
        fs::write(path, coloring.to_csv())?;
    }
    let mut out = json!({
        "code": code.summary(),
        "side": format!("{:?}", args.side),
        "edges": adjacency.edge_count(),
        "max_degree": adjacency.max_degree(),
        "girth": girth(&adjacency),
        "diameter": diameter(&adjacency),
        "ball_growth": ball_growth(&adjacency, 0, args.radius).map_err(usage)?,
        "colors": coloring.count,
    });
    if let Some(tb) = &code.two_block {
        let spec = tb.spec;
        let cayley = cayley_graph(&spec, &[spec.x(), spec.y()], Side::Left).map_err(usage);
        if let Ok(cayley) = cayley {
            out["cayley_diameter"] = json!(diameter(&cayley));
            out["cayley_ball_growth"] = json!(ball_growth(&cayley, 0, args.radius).map_err(usage)?);
        }
    }
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_distance(args: &DistanceArgs) -> Result<(), CliError> {
    let code = args.code.quantum()?;
    let x = estimate_distance(&code, CheckType::X, args.trials, args.seed).map_err(usage)?;
    let z = estimate_distance(&code, CheckType::Z, args.trials, args.seed + 1).map_err(usage)?;
    println!("d<={}", x.weight.min(z.weight));
    let out = json!({ "code": code.name, "x_logical": x, "z_logical": z });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_search(args: &SearchArgs) -> Result<(), CliError> {
    let config = SearchConfig {
        space: SearchSpace {
            ell: range(&args.ell)?,
            m: range(&args.m)?,
            q: range(&args.q)?,
        },
        samples: args.samples,
        k_min: args.k_min,
        d_min: args.d_min,
        trials: args.trials,
        seed: args.seed,
        max_results: args.max_results,
        fixed_a: args.a.clone(),
        fixed_b: args.b.clone(),
    };
    for hit in search_codes(&config, args.weight).map_err(usage)? {
        println!("{}", hit.to_line());
    }
    Ok(())
}

fn simulate_config(args: &SimulateArgs, workers: usize) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::parse(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if workers > 0 {
        cfg.workers = workers;
    }
    let flags = [
        ("code", args.code.clone()),
        ("mode", args.mode.clone()),
        ("p", args.p.clone()),
        ("rounds", args.rounds.map(|v| v.to_string())),
        ("shots", args.shots.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("output", args.output.as_ref().map(|p| p.display().to_string())),
        ("timing", args.timing.then(|| "true".to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("expected KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(args: &SimulateArgs, workers: usize) -> Result<(), CliError> {
    let cfg = simulate_config(args, workers)?;
    let csv = to_csv(&run_simulation(&cfg)?);
    match &cfg.output {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), CliError> {
    let mut curves = Vec::new();
    for path in &args.inputs {
        curves.extend(parse_csv(&fs::read_to_string(path)?)?);
    }
    for (i, c) in curves.iter_mut().enumerate() {
        // Unknown names keep their order of appearance.
        c.size = CodeSelector::parse(&c.code)
            .and_then(|s| s.build())
            .map_or(i, |code| code.n());
    }
    let report = threshold_report(&curves)?;
    for pair in &report.pairs {
        let crossing = pair.crossing.map_or("none".to_string(), |x| format!("{x:.3e}"));
        eprintln!("{} vs {}: crossing {crossing}", pair.smaller, pair.larger);
    }
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn write_script(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn cmd_route(args: &RouteArgs) -> Result<(), CliError> {
    let code = args.code.quantum()?;
    let opts = RouteOptions {
        selective_transfers: args.selective,
    };
    let tb = code
        .two_block
        .as_ref()
        .ok_or_else(|| usage(RoutingError::NotTwoBlock))?;
    if let Some(text) = &args.monomial {
        let g = GroupAlgebraElement::parse(tb.spec, text).map_err(usage)?;
        let [g] = g.monomials() else {
            return Err(usage(format!("'{text}' is not a single monomial")));
        };
        let script = match args.action.as_str() {
            "left" => route_left_action(&tb.spec, g.i(), g.j()),
            "right" => route_right_action(&tb.spec, g.i(), g.j(), opts),
            other => return Err(usage(format!("unknown action '{other}'"))),
        }
        .map_err(usage)?;
        let expected = match args.action.as_str() {
            "left" => zsz_core::group::left_permutation(g),
            _ => zsz_core::group::right_permutation(g),
        };
        let perm = script
            .permutation()
            .map_err(|e| CliError::Verification(e.to_string()))?;
        if perm != expected {
            return Err(CliError::Verification(format!("{} action of {g}", args.action)));
        }
        print!("{}", script.to_text());
        let summary = script.summary().map_err(|e| CliError::Verification(e.to_string()))?;
        println!(
            "{}",
            serde_json::to_string(&json!({ "verified": true, "summary": summary })).unwrap()
        );
        return Ok(());
    }
    let sides = match args.side.to_ascii_uppercase().as_str() {
        "X" => vec![CheckType::X],
        "Z" => vec![CheckType::Z],
        "BOTH" => vec![CheckType::X, CheckType::Z],
        other => return Err(usage(format!("unknown side '{other}'"))),
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut summaries = Vec::new();
    for side in sides {
        let route = route_se_round(&code, side, opts).map_err(usage)?;
        verify_se_round(&code, &route).map_err(|e| CliError::Verification(format!("{side:?} round: {e}")))?;
        let summary = route.summary(true).map_err(|e| CliError::Verification(e.to_string()))?;
        eprintln!(
            "{side:?}: verified, {} monomials, {} moves ({} left, {} right)",
            summary.monomials, summary.total_moves, summary.left_moves, summary.right_moves
        );
        if let Some(dir) = &args.out_dir {
            for (k, step) in route.steps.iter().enumerate() {
                let stem = format!("{side:?}_{k}_{:?}_{:?}", step.sector, step.action).to_lowercase();
                write_script(dir, &format!("{stem}_forward.txt"), &step.forward.to_text())?;
                write_script(dir, &format!("{stem}_back.txt"), &step.back.to_text())?;
            }
            write_script(
                dir,
                &format!("round_{side:?}.txt").to_lowercase(),
                &route.script().to_text(),
            )?;
        }
        summaries.push(summary);
    }
    let out = json!({ "code": code.name, "options": opts, "rounds": summaries });
    let text = serde_json::to_string_pretty(&out).unwrap();
    if let Some(dir) = &args.out_dir {
        write_script(dir, "summary.json", &text)?;
    }
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = cli.workers;
    zsz_core::par::with_workers(workers, move || match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Search(a) => cmd_search(a),
        Command::Simulate(a) => cmd_simulate(a, workers),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Route(a) => cmd_route(a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
