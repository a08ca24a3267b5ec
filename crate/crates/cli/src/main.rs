//! `bridgenet`: check, transform and solve scheduling models.
//!
//! Exit codes: 0 success, 1 input error, 2 exploration limit reached,
//! 3 no solution within the time bound.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bridgenet::metamodel::{parse_domain_spec, print_domain_spec, validate_domain, DomainSpec};
use bridgenet::pddl::{parse_pddl, print_pddl, PddlModel};
use bridgenet::prtnet::{check_net, parse_lprod, print_lprod, print_prod, PrTNet};
use bridgenet::reach::{build_reach_graph, enumerate_goal_paths, EnumerateOptions, Limits, PathMode, ReachError};
use bridgenet::sexpr::{read_sexprs, SExpr};
use bridgenet::timefilter::{filter_paths, format_verdict};
use bridgenet::transform::{net_to_pddl, tr_j, tr_k, TransformWarning, TrjOptions};
use bridgenet::{export, Milli, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bridgenet", version, about = "Scheduling models as predicate/transition nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model.
    Check(InputArgs),
    /// Lower a model to another language.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        /// Target language.
        #[arg(long, value_enum)]
        to: Target,
        /// Output file; defaults to standard output.
        #[arg(short, long, conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        /// Directory for `<name>.<ext>`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Enumerate goal paths and keep those within the time bound.
    Solve(SolveArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input files; a PDDL domain and problem may be given separately.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Input language; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Do not synthesize the torch when lowering a domain description.
    #[arg(long)]
    no_torch: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Time bound; defaults to the model's own.
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_nodes: u64,
    /// Breadth-first depth limit; also the path length bound in tree mode.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_depth: u64,
    #[arg(long, value_enum, default_value_t = Mode::SimpleGraph)]
    path_mode: Mode,
    /// Drop partial paths already over the bound.
    #[arg(long)]
    prune: bool,
    /// Artifacts to write.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "paths")]
    export: Vec<Export>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Asn,
    Pddl,
    Lprod,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Asn => "asn",
            Kind::Pddl => "pddl",
            Kind::Lprod => "lprod",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Asn,
    Pddl,
    Lprod,
    /// PROD-style text, for reading only.
    Prod,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    SimpleGraph,
    DepthBoundedTree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Export {
    Paths,
    Dot,
    Msc,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl<E: fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn infer_kind(path: &Path) -> Option<Kind> {
    let name = path.file_name()?.to_str()?;
    if name.ends_with(".asn.sexp") {
        Some(Kind::Asn)
    } else if name.ends_with(".lprod.sexp") {
        Some(Kind::Lprod)
    } else if name.ends_with(".pddl") {
        Some(Kind::Pddl)
    } else {
        None
    }
}

struct Source {
    kind: Kind,
    forms: Vec<SExpr>,
    stem: String,
    no_torch: bool,
}

fn read_source(args: &InputArgs) -> Result<Source, Failure> {
    let kind = match args.kind {
        Some(k) => k,
        None => {
            let kinds: Vec<Option<Kind>> = args.inputs.iter().map(|p| infer_kind(p)).collect();
            match kinds.as_slice() {
                [Some(k), rest @ ..] if rest.iter().all(|r| *r == Some(*k)) => *k,
                _ => return Err(input_error("cannot infer the input kind from the file names; pass --kind")),
            }
        }
    };
    let mut forms = Vec::new();
    for path in &args.inputs {
        let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        forms.extend(read_sexprs(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?);
    }
    let name = args.inputs[0].file_name().and_then(|n| n.to_str()).unwrap_or("model");
    let stem = name.split('.').next().unwrap_or(name).to_string();
    Ok(Source { kind, forms, stem, no_torch: args.no_torch })
}

fn warn(warnings: &[TransformWarning]) {
    for w in warnings {
        match w {
            TransformWarning::StaticallyUnsatisfiable { action, arity, movers } => {
                eprintln!("warning: action `{action}` needs {arity} distinct objects but only {movers} exist");
            }
        }
    }
}

fn domain<T: Scalar>(src: &Source) -> Result<DomainSpec<T>, Failure> {
    let d = parse_domain_spec(&src.forms)?;
    let diags = validate_domain(&d);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(input_error(lines.join("\n")));
    }
    Ok(d)
}

fn pddl<T: Scalar>(src: &Source) -> Result<PddlModel<T>, Failure> {
    match src.kind {
        Kind::Asn => {
            let out = tr_j(&domain::<T>(src)?, TrjOptions { torch: !src.no_torch })?;
            warn(&out.warnings);
            Ok(out.model)
        }
        Kind::Pddl => Ok(parse_pddl(&src.forms)?),
        Kind::Lprod => Ok(net_to_pddl(&net::<T>(src)?)?),
    }
}

fn net<T: Scalar>(src: &Source) -> Result<PrTNet<T>, Failure> {
    let net = match src.kind {
        Kind::Lprod => parse_lprod(&src.forms)?,
        _ => tr_k(&pddl::<T>(src)?)?,
    };
    let diags = check_net(&net);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(input_error(lines.join("\n")));
    }
    Ok(net)
}

fn check<T: Scalar>(src: &Source) -> Result<(), Failure> {
    let name = match src.kind {
        Kind::Asn => domain::<T>(src)?.problem_domain,
        Kind::Pddl => pddl::<T>(src)?.problem_name,
        Kind::Lprod => net::<T>(src)?.name,
    };
    println!("ok {} {name}", src.kind);
    Ok(())
}

fn transform<T: Scalar>(src: &Source, to: Target, out: Option<&Path>, out_dir: Option<&Path>) -> Result<(), Failure> {
    let (text, ext) = match to {
        Target::Asn if src.kind == Kind::Asn => (print_domain_spec(&domain::<T>(src)?), "asn.sexp"),
        Target::Asn => return Err(input_error(format!("cannot lift {} back to a domain description", src.kind))),
        Target::Pddl => (print_pddl(&pddl::<T>(src)?), "pddl"),
        Target::Lprod => (print_lprod(&net::<T>(src)?), "lprod.sexp"),
        Target::Prod => (print_prod(&net::<T>(src)?), "net"),
    };
    let path = match (out, out_dir) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{ext}", src.stem))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn solve<T: Scalar>(src: &Source, args: &SolveArgs) -> Result<(), Failure> {
    let net = net::<T>(src)?;
    let goal = net.goal.clone().ok_or_else(|| input_error("the net has no goal"))?;
    let t_max: T = match &args.t_max {
        Some(text) => {
            let v = T::from_str_radix(text, 10).map_err(|_| input_error(format!("bad --t-max `{text}`")))?;
            if v < T::zero() {
                return Err(input_error("--t-max must not be negative"));
            }
            v
        }
        None => goal.time_bound.ok_or_else(|| input_error("the goal has no time bound; pass --t-max"))?,
    };
    let limits = Limits { max_nodes: args.max_nodes as usize, max_depth: args.max_depth as usize };
    let graph = match build_reach_graph(&net, limits) {
        Ok(g) => g,
        Err(ReachError::LimitExceeded(g)) => {
            return Err(Failure {
                code: 2,
                message: format!("exploration limit reached ({} nodes, {} edges)", g.node_count(), g.edge_count()),
            })
        }
        Err(e) => return Err(Failure { code: 2, message: e.to_string() }),
    };
    let mode = match args.path_mode {
        Mode::SimpleGraph => PathMode::SimpleGraph,
        Mode::DepthBoundedTree => PathMode::DepthBoundedTree(limits.max_depth),
    };
    let opts = EnumerateOptions { mode, prune: args.prune.then_some(t_max) };
    let paths =
        enumerate_goal_paths(&net, &graph, &goal, opts).map_err(|e| Failure { code: 2, message: e.to_string() })?;
    let verdicts = filter_paths(&paths, t_max);
    let solutions: Vec<(usize, _)> =
        verdicts.iter().enumerate().filter(|(_, v)| v.within_bound).map(|(i, v)| (i + 1, v)).collect();
    let min = verdicts.iter().map(|v| v.elapsed).min().map_or_else(|| "none".to_string(), |m| m.to_string());

    if !args.export.is_empty() {
        fs::create_dir_all(&args.out_dir)?;
    }
    for kind in &args.export {
        match kind {
            Export::Paths => {
                let blocks: Vec<String> = solutions.iter().map(|(n, v)| format_verdict(&net, *n, v)).collect();
                fs::write(args.out_dir.join("paths.txt"), blocks.join("\n"))?;
            }
            Export::Dot => {
                let chosen: Vec<_> = solutions.iter().map(|(_, v)| v.path.clone()).collect();
                if !chosen.is_empty() {
                    fs::write(args.out_dir.join("solutions.dot"), export::to_efsm_dot(&net, &chosen)?)?;
                }
            }
            Export::Msc => {
                for (n, v) in &solutions {
                    fs::write(args.out_dir.join(format!("path-{n}.msc")), export::to_msc(&net, v.path))?;
                }
            }
        }
    }
    println!("solutions={} total_paths={} t_max={t_max} min_elapsed={min}", solutions.len(), paths.len());
    if solutions.is_empty() {
        return Err(Failure { code: 3, message: "no path meets the time bound".into() });
    }
    Ok(())
}

/// Runs `f` with `i64` unless some input number has a fractional part.
macro_rules! with_scalar {
    ($src:expr, $f:ident ( $($arg:expr),* )) => {
        if $src.forms.iter().any(SExpr::has_fraction) {
            $f::<Milli>($($arg),*)
        } else {
            $f::<i64>($($arg),*)
        }
    };
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Check(input) => {
            let src = read_source(input)?;
            with_scalar!(src, check(&src))
        }
        Command::Transform { input, to, out, out_dir } => {
            let src = read_source(input)?;
            with_scalar!(src, transform(&src, *to, out.as_deref(), out_dir.as_deref()))
        }
        Command::Solve(args) => {
            let src = read_source(&args.input)?;
            let fractional_bound = args.t_max.as_deref().is_some_and(|t| t.contains('.'));
            if fractional_bound {
                solve::<Milli>(&src, args)
            } else {
                with_scalar!(src, solve(&src, args))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
