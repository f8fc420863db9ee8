//! `cat0lab` — audits, iterations and fixed points on CAT(0) model spaces.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cat0lab::commands::{self, ConfigError, EXIT_CONFIG};
use cat0lab::config::{BlendDto, OrderDto, RunConfig};
use cat0lab::dto::{MapDto, PointDto};

#[derive(Parser)]
#[command(
    name = "cat0lab",
    version,
    about = "Geodesic CAT(0) laboratory: inequality audits, two-map iterations, fixed points"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run sampling audits (p_convexity, midpoint_pair, busemann,
    /// convex_structure, uc_modulus, cat0, implication, metric_axioms).
    Audit(AuditArgs),
    /// Run the two-map iterative scheme and audit its certificates.
    Iterate(IterateArgs),
    /// Solve for the fixed points p*, y* and the blends z_t.
    Fixedpoint(FixedpointArgs),
    /// Batch-check the two-map bounds over random tuples.
    Bounds(BoundsArgs),
    /// Suggest the blend weights t keeping the certificate rho <= 1.
    Suggest(SuggestArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Space descriptor: euclidean:N | disk | tree:star3 | tree:path4 | tree:<file>.
    #[arg(long)]
    space: Option<String>,
    /// RNG seed (defaults to $CAT0LAB_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Violation tolerance (defaults to 1e-9, or 1e-7 on the disk).
    #[arg(long)]
    tol: Option<f64>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_order(s: &str) -> Result<OrderDto, String> {
    if s == "inf" || s == "infinity" {
        return Ok(OrderDto::Name("inf".into()));
    }
    s.parse::<f64>()
        .map(OrderDto::Num)
        .map_err(|_| format!("bad order {s:?}; use a number or \"inf\""))
}

fn parse_blend(s: &str) -> Result<BlendDto, String> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(str::trim).map(str::parse).collect();
    let vals = vals.map_err(|_| format!("bad blend list {s:?}"))?;
    Ok(if vals.len() == 1 {
        BlendDto::One(vals[0])
    } else {
        BlendDto::Many(vals)
    })
}

fn parse_point(s: &str) -> Result<PointDto, String> {
    serde_json::from_str(s).map_err(|e| format!("bad point JSON: {e}"))
}

fn parse_map(s: &str) -> Result<MapDto, String> {
    serde_json::from_str(s).map_err(|e| format!("bad map JSON: {e}"))
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Checks to run (repeat or comma-separate).
    #[arg(long = "check", value_delimiter = ',')]
    checks: Vec<String>,
    /// Convexity order p (number or "inf").
    #[arg(long, value_parser = parse_order)]
    p: Option<OrderDto>,
    /// Sample count per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Demand strict inequalities where the definitions do.
    #[arg(long)]
    strict: bool,
    /// Busemann: use the minimum over both endpoint pairings.
    #[arg(long)]
    use_min: bool,
    /// Implication to audit: midpoint_1convex | busemann_midpoint_pconvex | uc_ucp.
    #[arg(long)]
    impl_kind: Option<String>,
    /// Modulus probe separation epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Modulus probe radius r.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args)]
struct IterateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Contraction factor of the default S map (toward the base point).
    #[arg(long)]
    ks: Option<f64>,
    /// Contraction factor of the default T map.
    #[arg(long)]
    kt: Option<f64>,
    /// Override the declared Lipschitz constant of S.
    #[arg(long)]
    ks_declared: Option<f64>,
    /// Override the declared Lipschitz constant of T.
    #[arg(long)]
    kt_declared: Option<f64>,
    /// Full S map descriptor (JSON).
    #[arg(long, value_parser = parse_map)]
    s_map: Option<MapDto>,
    /// Full T map descriptor (JSON).
    #[arg(long, value_parser = parse_map)]
    t_map: Option<MapDto>,
    /// Blend weight t.
    #[arg(long, value_parser = parse_blend)]
    t: Option<BlendDto>,
    /// Number of scheme steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Early-stop threshold on consecutive step distances.
    #[arg(long)]
    stop_tol: Option<f64>,
    /// Initial point x0 (JSON).
    #[arg(long, value_parser = parse_point)]
    x0: Option<PointDto>,
    /// Initial point x1 (JSON).
    #[arg(long, value_parser = parse_point)]
    x1: Option<PointDto>,
}

#[derive(Args)]
struct FixedpointArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    ks: Option<f64>,
    #[arg(long)]
    kt: Option<f64>,
    /// Full S map descriptor (JSON).
    #[arg(long, value_parser = parse_map)]
    s_map: Option<MapDto>,
    /// Full T map descriptor (JSON).
    #[arg(long, value_parser = parse_map)]
    t_map: Option<MapDto>,
    /// Blend weights to report z_t for (comma list; may be empty via "").
    #[arg(long, value_parser = parse_blend)]
    t: Option<BlendDto>,
    /// Fixed-point solve tolerance.
    #[arg(long)]
    stop_tol: Option<f64>,
    /// Iteration cap for the solver.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Accept nonexpansive maps with structurally known fixed points.
    #[arg(long)]
    allow_nonexpansive: bool,
    /// Start point for the S solve (JSON).
    #[arg(long, value_parser = parse_point)]
    x0: Option<PointDto>,
    /// Start point for the T solve (JSON).
    #[arg(long, value_parser = parse_point)]
    x1: Option<PointDto>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which bound to batch: two_map | iterated | decay | slices.
    #[arg(long = "check")]
    check: Option<String>,
    /// Number of random tuples.
    #[arg(long)]
    tuples: Option<usize>,
    #[arg(long)]
    ks: Option<f64>,
    #[arg(long)]
    kt: Option<f64>,
    #[arg(long)]
    ks_declared: Option<f64>,
    #[arg(long)]
    kt_declared: Option<f64>,
    #[arg(long, value_parser = parse_map)]
    s_map: Option<MapDto>,
    #[arg(long, value_parser = parse_map)]
    t_map: Option<MapDto>,
    /// Blend weight t.
    #[arg(long, value_parser = parse_blend)]
    t: Option<BlendDto>,
    /// Iterate count (iterated/slices) or decay horizon shorthand.
    #[arg(long)]
    n: Option<usize>,
    /// Frozen-slot iterate count for slices.
    #[arg(long)]
    m: Option<usize>,
    /// Decay horizon n_max.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct SuggestArgs {
    /// Declared Lipschitz constant of S.
    #[arg(long)]
    ks: Option<f64>,
    /// Declared Lipschitz constant of T.
    #[arg(long)]
    kt: Option<f64>,
    /// Assumed bound on sup theta_n.
    #[arg(long)]
    theta: Option<f64>,
    /// Solve rho < 1 instead of rho <= 1.
    #[arg(long)]
    strict: bool,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn base_config(common: &CommonArgs) -> RunConfig {
    RunConfig {
        space: common.space.clone(),
        seed: common.seed,
        tol: common.tol,
        out: common.out.clone(),
        ..RunConfig::default()
    }
}

/// Loads the config file (when given), overlays flags, and checks that the
/// file's `command` field, if set, matches the invoked subcommand.
fn resolve(
    config: &Option<PathBuf>,
    flags: RunConfig,
    command: &str,
) -> Result<RunConfig, ConfigError> {
    let file = match config {
        Some(path) => RunConfig::load(path).map_err(ConfigError)?,
        None => RunConfig::default(),
    };
    let merged = file.merged_with(flags);
    if let Some(declared) = &merged.command {
        if declared != command {
            return Err(ConfigError(format!(
                "config is for command {declared:?} but {command:?} was invoked"
            )));
        }
    }
    Ok(merged)
}

fn run(cli: Cli) -> Result<i32, ConfigError> {
    match cli.cmd {
        Cmd::Audit(args) => {
            let mut flags = base_config(&args.common);
            if !args.checks.is_empty() {
                flags.checks = Some(args.checks.clone());
            }
            flags.p = args.p;
            flags.samples = args.samples;
            flags.strict = args.strict.then_some(true);
            flags.use_min = args.use_min.then_some(true);
            flags.impl_kind = args.impl_kind;
            flags.epsilon = args.epsilon;
            flags.radius = args.radius;
            commands::cmd_audit(resolve(&args.common.config, flags, "audit")?)
        }
        Cmd::Iterate(args) => {
            let mut flags = base_config(&args.common);
            flags.ks = args.ks;
            flags.kt = args.kt;
            flags.ks_declared = args.ks_declared;
            flags.kt_declared = args.kt_declared;
            flags.s_map = args.s_map;
            flags.t_map = args.t_map;
            flags.t = args.t;
            flags.steps = args.steps;
            flags.stop_tol = args.stop_tol;
            flags.x0 = args.x0;
            flags.x1 = args.x1;
            commands::cmd_iterate(resolve(&args.common.config, flags, "iterate")?)
        }
        Cmd::Fixedpoint(args) => {
            let mut flags = base_config(&args.common);
            flags.ks = args.ks;
            flags.kt = args.kt;
            flags.s_map = args.s_map;
            flags.t_map = args.t_map;
            flags.t = args.t;
            flags.stop_tol = args.stop_tol;
            flags.max_iter = args.max_iter;
            flags.allow_nonexpansive = args.allow_nonexpansive.then_some(true);
            flags.x0 = args.x0;
            flags.x1 = args.x1;
            commands::cmd_fixedpoint(resolve(&args.common.config, flags, "fixedpoint")?)
        }
        Cmd::Bounds(args) => {
            let mut flags = base_config(&args.common);
            flags.checks = args.check.map(|c| vec![c]);
            flags.tuples = args.tuples;
            flags.ks = args.ks;
            flags.kt = args.kt;
            flags.ks_declared = args.ks_declared;
            flags.kt_declared = args.kt_declared;
            flags.s_map = args.s_map;
            flags.t_map = args.t_map;
            flags.t = args.t;
            flags.n = args.n;
            flags.m = args.m;
            flags.n_max = args.n_max;
            commands::cmd_bounds(resolve(&args.common.config, flags, "bounds")?)
        }
        Cmd::Suggest(args) => {
            let flags = RunConfig {
                ks: args.ks,
                kt: args.kt,
                theta: args.theta,
                strict: args.strict.then_some(true),
                out: args.out.clone(),
                ..RunConfig::default()
            };
            commands::cmd_suggest(resolve(&args.config, flags, "suggest")?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
