//! Command-line front end: solve single instance pairs, run manifests of
//! instances into CSV, generate random instances, and turn bench CSV into
//! cactus-plot series.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable or unparsable input,
//! 3 budget exhausted (`solve` only).

mod bench;
mod cactus;

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcsplit::{
    erdos_renyi, parse_dimacs, parse_lad, parse_lad_symmetrize, solve, Graph, HybridMode,
    PolicyKind, RlReward, SolverConfig, SplitMix64, Status,
};

pub(crate) const EXIT_OK: i32 = 0;
pub(crate) const EXIT_USAGE: i32 = 1;
pub(crate) const EXIT_PARSE: i32 = 2;
pub(crate) const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(
    name = "mcsplit-bench",
    version,
    about = "Exact maximum common induced subgraph solving and benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one pattern/target pair and print a report.
    Solve(SolveArgs),
    /// Run every instance of a manifest under each policy and emit CSV.
    Bench(BenchArgs),
    /// Generate a random instance pair as two LAD files.
    Gen(GenArgs),
    /// Turn bench CSV into per-policy cactus series (rank,cost lines).
    Cactus(CactusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum PolicyArg {
    Degree,
    Rl,
    Dal,
    Ll,
    Hybrid,
    HybridRand,
    HybridDepth,
}

impl PolicyArg {
    pub(crate) fn mode(self) -> HybridMode {
        match self {
            PolicyArg::Degree => HybridMode::Single(PolicyKind::Degree),
            PolicyArg::Rl => HybridMode::Single(PolicyKind::Rl),
            PolicyArg::Dal => HybridMode::Single(PolicyKind::Dal),
            PolicyArg::Ll => HybridMode::Single(PolicyKind::Ll),
            PolicyArg::Hybrid => HybridMode::Alternate,
            PolicyArg::HybridRand => HybridMode::Random,
            PolicyArg::HybridDepth => HybridMode::Depth,
        }
    }

    pub(crate) fn label(self) -> &'static str {
        match self {
            PolicyArg::Degree => "degree",
            PolicyArg::Rl => "rl",
            PolicyArg::Dal => "dal",
            PolicyArg::Ll => "ll",
            PolicyArg::Hybrid => "hybrid",
            PolicyArg::HybridRand => "hybrid-rand",
            PolicyArg::HybridDepth => "hybrid-depth",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RlRewardArg {
    SumDelta,
    UbDelta,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub(crate) enum FormatArg {
    /// Sniff DIMACS headers, otherwise LAD.
    Auto,
    Lad,
    Dimacs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub(crate) enum MetricArg {
    /// Sort solved instances by elapsed milliseconds.
    Time,
    /// Sort solved instances by recursive calls.
    Calls,
}

/// Solver knobs shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub(crate) struct SolverKnobs {
    /// Match degree-1 neighbors of each matched pair in bulk.
    #[arg(long)]
    lum: bool,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    /// Recursive-call limit per solve.
    #[arg(long, value_name = "N")]
    node_budget: Option<u64>,
    /// Seed for the policy controller.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Vertex score decay threshold.
    #[arg(long = "tv", value_name = "N", default_value_t = 100_000)]
    tv: u64,
    /// Pair score decay threshold.
    #[arg(long = "tvw", value_name = "N", default_value_t = 1_000_000_000)]
    tvw: u64,
    /// Selections between policy swaps; defaults to 2*min(|Vp|,|Vt|),
    /// computed per instance.
    #[arg(long, value_name = "N")]
    max_nb_app: Option<u64>,
    /// Which reward feeds the RL-side tables.
    #[arg(long, value_enum, default_value_t = RlRewardArg::SumDelta)]
    rl_reward: RlRewardArg,
}

impl SolverKnobs {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.timeout.is_some_and(|t| !t.is_finite() || t <= 0.0) {
            return Err("--timeout must be a positive number of seconds".into());
        }
        if self.node_budget == Some(0) {
            return Err("--node-budget must be positive".into());
        }
        if self.tv == 0 || self.tvw == 0 {
            return Err("--tv and --tvw must be positive".into());
        }
        if self.max_nb_app == Some(0) {
            return Err("--max-nb-app must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn config(&self, policy: HybridMode) -> SolverConfig {
        SolverConfig {
            policy,
            t_v: self.tv,
            t_vw: self.tvw,
            max_nb_app: self.max_nb_app,
            lum: self.lum,
            time_budget: self.timeout.map(Duration::from_secs_f64),
            node_budget: self.node_budget,
            seed: self.seed,
            rl_reward: match self.rl_reward {
                RlRewardArg::SumDelta => RlReward::SumDelta,
                RlRewardArg::UbDelta => RlReward::UbDelta,
            },
        }
    }
}

#[derive(Args, Clone, Debug)]
pub(crate) struct InputOpts {
    /// Input format for graph files.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Accept directed LAD listings by symmetrizing them.
    #[arg(long)]
    symmetrize: bool,
}

#[derive(Args)]
struct SolveArgs {
    pattern: PathBuf,
    target: PathBuf,
    /// Branching policy.
    #[arg(long, value_enum, default_value_t = PolicyArg::Hybrid)]
    policy: PolicyArg,
    #[command(flatten)]
    knobs: SolverKnobs,
    #[command(flatten)]
    input: InputOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Manifest file: one `pattern_path target_path` per line.
    manifest: PathBuf,
    /// Branching policy; repeat the flag to bench several (default: hybrid).
    #[arg(long = "policy", value_enum)]
    policies: Vec<PolicyArg>,
    /// Instances solved concurrently (results stay in manifest order).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    knobs: SolverKnobs,
    #[command(flatten)]
    input: InputOpts,
}

#[derive(Args)]
struct GenArgs {
    /// Pattern graph vertex count.
    n_p: usize,
    /// Target graph vertex count.
    n_t: usize,
    /// Edge probability in [0, 1].
    edge_prob: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// File name prefix; defaults to `er-<n_p>x<n_t>-s<seed>`.
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Args)]
struct CactusArgs {
    /// CSV produced by `bench`.
    csv: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Time)]
    metric: MetricArg,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => bench::cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Cactus(args) => cactus::cmd_cactus(&args.csv, args.metric),
    }
}

/// Reads and parses one graph file, picking the format by extension or by
/// sniffing for a DIMACS header.
pub(crate) fn load_graph(path: &Path, input: &InputOpts) -> Result<Graph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let format = match input.format {
        FormatArg::Lad => FormatArg::Lad,
        FormatArg::Dimacs => FormatArg::Dimacs,
        FormatArg::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("lad") => FormatArg::Lad,
            Some("dimacs") | Some("clq") | Some("col") => FormatArg::Dimacs,
            _ => match text.trim_start().chars().next() {
                Some('c') | Some('p') => FormatArg::Dimacs,
                _ => FormatArg::Lad,
            },
        },
    };
    let parsed = match (format, input.symmetrize) {
        (FormatArg::Dimacs, _) => parse_dimacs(&text),
        (_, false) => parse_lad(&text),
        (_, true) => parse_lad_symmetrize(&text),
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_solve(args: SolveArgs) -> i32 {
    if let Err(msg) = args.knobs.validate() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let gp = match load_graph(&args.pattern, &args.input) {
        Ok(g) => g,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_PARSE;
        }
    };
    let gt = match load_graph(&args.target, &args.input) {
        Ok(g) => g,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_PARSE;
        }
    };

    let cfg = args.knobs.config(args.policy.mode());
    let result = solve(&gp, &gt, &cfg);

    println!(
        "pattern: {} ({} vertices, {} edges)",
        args.pattern.display(),
        gp.vertex_count(),
        gp.edge_count()
    );
    println!(
        "target: {} ({} vertices, {} edges)",
        args.target.display(),
        gt.vertex_count(),
        gt.edge_count()
    );
    println!(
        "policy: {} (lum {}, seed {}, max-nb-app {})",
        args.policy.label(),
        if cfg.lum { "on" } else { "off" },
        cfg.seed,
        cfg.max_nb_app_for(&gp, &gt),
    );
    println!("size: {}", result.size);
    let pairs = result
        .best
        .pairs()
        .iter()
        .map(|(v, w)| format!("({v},{w})"))
        .collect::<Vec<_>>()
        .join(" ");
    println!("pairs: {}", if pairs.is_empty() { "(none)" } else { &pairs });
    println!("status: {}", bench::status_token(result.status));
    println!("elapsed_ms: {}", result.elapsed.as_millis());
    println!("recursive_calls: {}", result.recursive_calls);
    println!("policy_switches: {}", result.stats.policy_switches);
    println!("prunes: {}", result.stats.prunes);
    println!("max_depth: {}", result.stats.max_depth);

    match result.status {
        Status::Optimal => EXIT_OK,
        Status::TimedOut | Status::NodeBudgetExhausted => EXIT_BUDGET,
    }
}

fn cmd_gen(args: GenArgs) -> i32 {
    if args.n_p == 0 || args.n_t == 0 {
        eprintln!("error: vertex counts must be at least 1");
        return EXIT_USAGE;
    }
    if !(0.0..=1.0).contains(&args.edge_prob) {
        eprintln!("error: edge probability must lie in [0, 1]");
        return EXIT_USAGE;
    }

    let mut rng = SplitMix64::new(args.seed);
    let gp = erdos_renyi(args.n_p, args.edge_prob, &mut rng);
    let gt = erdos_renyi(args.n_t, args.edge_prob, &mut rng);

    if let Err(e) = std::fs::create_dir_all(&args.out_dir) {
        eprintln!("error: cannot create {}: {e}", args.out_dir.display());
        return EXIT_PARSE;
    }
    let prefix = args
        .prefix
        .unwrap_or_else(|| format!("er-{}x{}-s{}", args.n_p, args.n_t, args.seed));
    let pattern_path = args.out_dir.join(format!("{prefix}-pattern.lad"));
    let target_path = args.out_dir.join(format!("{prefix}-target.lad"));
    for (path, graph) in [(&pattern_path, &gp), (&target_path, &gt)] {
        if let Err(e) = std::fs::write(path, graph.to_lad()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_PARSE;
        }
    }
    println!("{}", pattern_path.display());
    println!("{}", target_path.display());
    EXIT_OK
}
