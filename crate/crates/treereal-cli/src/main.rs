//! Command-line surface for tree attribute realizability: check, solve,
//! reduce, oracle, gen. JSON in, JSON/DOT/CSV out.
//!
//! Exit codes: 0 decided (yes or no), 2 invalid input, 3 budget
//! exhausted, 4 unsupported query.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treereal::checkers::{
    check_depths, check_height_depth_synced, check_heights, check_sizes_subclass,
    realize_sizes_itr, Subclass,
};
use treereal::formats::{Annotations, InstanceFile};
use treereal::oracle::{Oracle, OracleQuery, QueryShape, DEFAULT_CEILING};
use treereal::reductions::{
    kpwt_to_eis, nmts_to_eis, nmts_to_nmtsk, nmtsk_to_eis, nmtsk_to_kpwt, Annotate, Variant,
};
use treereal::solver::{solve_sizes, verify_witness, SizeInstance, SolveOptions, SolveOutcome};
use treereal::tree::{AttributeKind, AttributeRecord, RootedTree};
use treereal::Error;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(name = "treereal", version, about = "Tree realizability from attribute multisets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a polynomial-time checkable query from an instance file.
    Check(CheckArgs),
    /// Decide subtree-size realizability exactly, emitting a witness.
    Solve(SolveArgs),
    /// Transform an instance along the hardness-reduction chain.
    Reduce(ReduceArgs),
    /// Exhaustive small-scale enumeration: census tables or membership.
    Oracle(OracleArgs),
    /// Emit the attribute multiset of a random tree, optionally mutated.
    Gen(GenArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Instance file (JSON, tagged by "kind").
    input: String,
    /// Arity bound; must agree with the file when both are present.
    #[arg(long)]
    k: Option<usize>,
    /// Attribute query; inferred from the file kind when omitted.
    #[arg(long, value_enum)]
    attr: Option<AttrChoice>,
    #[arg(long, value_enum, default_value = "any")]
    subclass: SubclassChoice,
    /// Print the witness as DOT instead of a JSON result.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// A "sizes" instance file.
    input: String,
    #[arg(long)]
    k: Option<usize>,
    /// Seconds before giving up with "unknown".
    #[arg(long, default_value_t = 120)]
    time_budget: u64,
    /// Search nodes before giving up with "unknown".
    #[arg(long, default_value_t = 50_000_000)]
    node_budget: u64,
    /// Constrain every value to its depth annotation.
    #[arg(long)]
    synced_depths: bool,
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct ReduceArgs {
    input: String,
    #[arg(long, value_enum)]
    to: ReduceTarget,
    /// Arity of the generated instances (NMTS sources only).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantChoice,
    #[arg(long, value_enum, default_value = "none")]
    annotate: AnnotateChoice,
    /// Randomizes grandparent block order; deterministic when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum)]
    attr: Option<AttrChoice>,
    /// Emit the full multiset-to-count table as CSV.
    #[arg(long)]
    census: bool,
    /// Decide membership for the instance file.
    #[arg(long)]
    query: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "sizes")]
    attr: GenAttrChoice,
    /// Perturb this many values; output is labeled mutated.
    #[arg(long, default_value_t = 0)]
    mutate: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AttrChoice {
    Sizes,
    Heights,
    Depths,
    HdSync,
    SizeItr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenAttrChoice {
    Sizes,
    Heights,
    Depths,
    HdSync,
    SizeItr,
    HdAsync,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubclassChoice {
    Any,
    Complete,
    Full,
    Degenerate,
}

impl From<SubclassChoice> for Subclass {
    fn from(c: SubclassChoice) -> Subclass {
        match c {
            SubclassChoice::Any => Subclass::Any,
            SubclassChoice::Complete => Subclass::Complete,
            SubclassChoice::Full => Subclass::Full,
            SubclassChoice::Degenerate => Subclass::Degenerate,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum ReduceTarget {
    Nmtsk,
    Kpwt,
    Eis,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantChoice {
    Plain,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnnotateChoice {
    None,
    Depth,
    Height,
    Both,
}

#[derive(Serialize)]
struct CommandResult {
    answer: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
    diagnostics: Vec<String>,
    timing_ms: u128,
}

impl CommandResult {
    fn new(answer: &'static str, started: Instant) -> Self {
        CommandResult {
            answer,
            witness: None,
            diagnostics: Vec::new(),
            timing_ms: started.elapsed().as_millis(),
        }
    }

    fn with_witness(mut self, tree: &RootedTree) -> Self {
        self.witness = Some(serde_json::to_value(tree).expect("tree serializes"));
        self
    }

    fn note(mut self, code: &str) -> Self {
        self.diagnostics.push(code.to_string());
        self
    }

    fn print(&self) {
        println!("{}", serde_json::to_string(self).expect("result serializes"));
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn unsupported(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_UNSUPPORTED,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::InvalidInput(_) | Error::MalformedWitness(_) => EXIT_INVALID,
            Error::UnsupportedQuery(_) | Error::TooLarge(_) => EXIT_UNSUPPORTED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load(path: &str) -> Result<InstanceFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {path}: {e}")))?;
    Ok(InstanceFile::from_json(&text)?)
}

fn file_k(file: &InstanceFile) -> Option<usize> {
    match file {
        InstanceFile::Sizes { k, .. }
        | InstanceFile::Heights { k, .. }
        | InstanceFile::Depths { k, .. }
        | InstanceFile::HdSync { k, .. }
        | InstanceFile::HdAsync { k, .. }
        | InstanceFile::Nmtsk { k, .. }
        | InstanceFile::Kpwt { k, .. } => Some(*k),
        InstanceFile::SizeItr { .. } => Some(2),
        InstanceFile::Nmts { .. } => None,
    }
}

fn resolve_k(file: &InstanceFile, flag: Option<usize>) -> Result<usize, Failure> {
    match (file_k(file), flag) {
        (Some(fk), Some(k)) if fk != k => Err(Failure::invalid(format!(
            "--k {k} contradicts the file's k = {fk}"
        ))),
        (Some(fk), _) => Ok(fk),
        (None, Some(k)) => Ok(k),
        (None, None) => Err(Failure::invalid("arity is neither in the file nor given via --k")),
    }
}

fn inferred_attr(file: &InstanceFile) -> Result<AttrChoice, Failure> {
    Ok(match file {
        InstanceFile::Sizes { .. } => AttrChoice::Sizes,
        InstanceFile::Heights { .. } => AttrChoice::Heights,
        InstanceFile::Depths { .. } => AttrChoice::Depths,
        InstanceFile::HdSync { .. } => AttrChoice::HdSync,
        InstanceFile::SizeItr { .. } => AttrChoice::SizeItr,
        InstanceFile::HdAsync { .. } => {
            return Err(Failure::unsupported(
                "no decision procedure is known for asynchronized heights + depths; \
                 use the oracle for small instances",
            ))
        }
        other => {
            return Err(Failure::invalid(format!(
                "cannot check a {} instance",
                other.kind_name()
            )))
        }
    })
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let started = Instant::now();
    let file = load(&args.input)?;
    let attr = match args.attr {
        Some(a) => {
            let inferred = inferred_attr(&file)?;
            if a != inferred {
                return Err(Failure::invalid("--attr does not match the file kind"));
            }
            a
        }
        None => inferred_attr(&file)?,
    };
    let k = resolve_k(&file, args.k)?;
    let subclass: Subclass = args.subclass.into();

    let (yes, witness): (bool, Option<RootedTree>) = match (attr, &file) {
        (AttrChoice::Depths, InstanceFile::Depths { values, .. }) => {
            (check_depths(values, k, subclass), None)
        }
        (AttrChoice::Heights, InstanceFile::Heights { values, .. }) => {
            (check_heights(values, k, subclass), None)
        }
        (AttrChoice::Sizes, InstanceFile::Sizes { values, .. }) => {
            (check_sizes_subclass(values, k, subclass)?, None)
        }
        (AttrChoice::HdSync, InstanceFile::HdSync { pairs, .. }) => {
            if subclass != Subclass::Any {
                return Err(Failure::unsupported(
                    "synchronized height-depth checking supports subclass any only",
                ));
            }
            (check_height_depth_synced(pairs, k), None)
        }
        (AttrChoice::SizeItr, InstanceFile::SizeItr { pairs, .. }) => {
            if subclass != Subclass::Any {
                return Err(Failure::unsupported(
                    "size + inorder-rank checking supports subclass any only",
                ));
            }
            let tree = realize_sizes_itr(pairs)?;
            (tree.is_some(), tree)
        }
        _ => return Err(Failure::invalid("--attr does not match the file kind")),
    };

    let mut result = CommandResult::new(if yes { "yes" } else { "no" }, started);
    if let Some(tree) = &witness {
        if args.dot {
            print!("{}", tree.to_dot());
            return Ok(EXIT_OK);
        }
        result = result.with_witness(tree);
    }
    result.print();
    Ok(EXIT_OK)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let started = Instant::now();
    let file = load(&args.input)?;
    let k = resolve_k(&file, args.k)?;
    let eis = file.as_eis()?;
    let mut instance = SizeInstance::plain(eis.values.clone(), k);
    if args.synced_depths {
        instance.depths = Some(eis.depths.clone().ok_or_else(|| {
            Failure::invalid("--synced-depths requires depth annotations in the file")
        })?);
    }
    let opts = SolveOptions {
        node_budget: args.node_budget,
        time_budget: Duration::from_secs(args.time_budget),
        ..SolveOptions::default()
    };
    match solve_sizes(&instance, &opts)? {
        SolveOutcome::Tree(witness) => {
            if !verify_witness(&witness, &instance) {
                return Err(Failure::invalid(
                    "internal error: witness failed verification",
                ));
            }
            if args.dot {
                print!("{}", witness.tree.to_dot());
            } else {
                CommandResult::new("yes", started)
                    .with_witness(&witness.tree)
                    .print();
            }
            Ok(EXIT_OK)
        }
        SolveOutcome::NoTree => {
            CommandResult::new("no", started).print();
            Ok(EXIT_OK)
        }
        SolveOutcome::BudgetExhausted => {
            CommandResult::new("unknown", started)
                .note("budget-exhausted")
                .print();
            Ok(EXIT_BUDGET)
        }
    }
}

fn cmd_reduce(args: ReduceArgs) -> Result<u8, Failure> {
    let file = load(&args.input)?;
    let variant = match args.variant {
        VariantChoice::Plain => Variant::Plain,
        VariantChoice::Full => Variant::Full,
    };
    let annotate = match args.annotate {
        AnnotateChoice::None => Annotate::None,
        AnnotateChoice::Depth => Annotate::Depth,
        AnnotateChoice::Height => Annotate::Height,
        AnnotateChoice::Both => Annotate::Both,
    };
    let out: InstanceFile = match (&file, args.to) {
        (InstanceFile::Nmts { .. }, ReduceTarget::Nmtsk) => {
            (&nmts_to_nmtsk(&file.as_nmts()?, args.k)?).into()
        }
        (InstanceFile::Nmts { .. }, ReduceTarget::Kpwt) => {
            let nmtsk = nmts_to_nmtsk(&file.as_nmts()?, args.k)?;
            (&nmtsk_to_kpwt(&nmtsk)?.0).into()
        }
        (InstanceFile::Nmts { .. }, ReduceTarget::Eis) => {
            (&nmts_to_eis(&file.as_nmts()?, args.k, variant, annotate, args.seed)?).into()
        }
        (InstanceFile::Nmtsk { .. }, ReduceTarget::Kpwt) => {
            (&nmtsk_to_kpwt(&file.as_nmtsk()?)?.0).into()
        }
        (InstanceFile::Nmtsk { .. }, ReduceTarget::Eis) => {
            (&nmtsk_to_eis(&file.as_nmtsk()?, variant, annotate, args.seed)?).into()
        }
        (InstanceFile::Kpwt { .. }, ReduceTarget::Eis) => {
            (&kpwt_to_eis(&file.as_kpwt()?, variant, annotate, args.seed)?).into()
        }
        _ => {
            return Err(Failure::unsupported(format!(
                "no reduction from {} to the requested target; the chain runs \
                 nmts -> nmtsk -> kpwt -> eis",
                file.kind_name()
            )))
        }
    };
    print!("{}", out.to_canonical_json());
    Ok(EXIT_OK)
}

fn oracle_from_env() -> Oracle {
    match std::env::var("TREEREAL_ORACLE_CEILING") {
        Ok(text) => Oracle::with_ceiling(text.parse().unwrap_or(DEFAULT_CEILING)),
        Err(_) => Oracle::default(),
    }
}

fn oracle_query(file: &InstanceFile, k: usize) -> Result<OracleQuery, Failure> {
    let shape = match file {
        InstanceFile::Sizes { values, annotations, .. } if annotations.is_empty() => {
            QueryShape::Single {
                kind: AttributeKind::Size,
                values: values.clone(),
            }
        }
        InstanceFile::Sizes { values, annotations, .. } => {
            let records = values
                .iter()
                .enumerate()
                .map(|(i, &v)| AttributeRecord {
                    size: Some(v),
                    height: annotations.heights.as_ref().map(|h| h[i]),
                    depth: annotations.depths.as_ref().map(|d| d[i]),
                    itr: None,
                })
                .collect();
            QueryShape::Synced { records }
        }
        InstanceFile::Heights { values, .. } => QueryShape::Single {
            kind: AttributeKind::Height,
            values: values.clone(),
        },
        InstanceFile::Depths { values, .. } => QueryShape::Single {
            kind: AttributeKind::Depth,
            values: values.clone(),
        },
        InstanceFile::HdSync { pairs, .. } => QueryShape::Synced {
            records: pairs
                .iter()
                .map(|&(h, d)| AttributeRecord {
                    height: Some(h),
                    depth: Some(d),
                    ..AttributeRecord::default()
                })
                .collect(),
        },
        InstanceFile::SizeItr { pairs, .. } => QueryShape::Synced {
            records: pairs
                .iter()
                .map(|&(s, r)| AttributeRecord {
                    size: Some(s),
                    itr: Some(r),
                    ..AttributeRecord::default()
                })
                .collect(),
        },
        InstanceFile::HdAsync {
            heights, depths, ..
        } => QueryShape::Async {
            lists: vec![
                (AttributeKind::Height, heights.clone()),
                (AttributeKind::Depth, depths.clone()),
            ],
        },
        other => {
            return Err(Failure::invalid(format!(
                "cannot query the oracle with a {} instance",
                other.kind_name()
            )))
        }
    };
    Ok(OracleQuery {
        k,
        subclass: Subclass::Any,
        shape,
    })
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let started = Instant::now();
    let oracle = oracle_from_env();
    if let Some(path) = &args.query {
        let file = load(path)?;
        let k = resolve_k(&file, Some(args.k))?;
        let query = oracle_query(&file, k)?;
        let yes = oracle.realizable(&query)?;
        CommandResult::new(if yes { "yes" } else { "no" }, started).print();
        return Ok(EXIT_OK);
    }
    if !args.census {
        return Err(Failure::invalid("expected --census or --query FILE"));
    }
    let n = args
        .n
        .ok_or_else(|| Failure::invalid("--census requires --n"))?;
    let kind = match args.attr {
        Some(AttrChoice::Sizes) | None => AttributeKind::Size,
        Some(AttrChoice::Heights) => AttributeKind::Height,
        Some(AttrChoice::Depths) => AttributeKind::Depth,
        Some(AttrChoice::SizeItr) => AttributeKind::InorderRank,
        Some(AttrChoice::HdSync) => {
            return Err(Failure::invalid("census covers single attributes only"))
        }
    };
    println!("multiset,count");
    for (values, count) in oracle.census(n, args.k, kind)? {
        let joined = values
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        println!("{joined},{count}");
    }
    Ok(EXIT_OK)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    if args.n == 0 || args.k < 2 {
        return Err(Failure::invalid("gen requires --n >= 1 and --k >= 2"));
    }
    if args.attr == GenAttrChoice::SizeItr && args.k != 2 {
        return Err(Failure::invalid("inorder ranks require --k 2"));
    }
    let tree = RootedTree::random(args.n, args.k, args.seed);
    // mutations reuse the seed stream so output stays deterministic
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let mutated = args.mutate > 0;
    let n = args.n as u64;
    fn perturb(
        rng: &mut rand_chacha::ChaCha8Rng,
        values: &mut [u64],
        lo: u64,
        hi: u64,
        count: usize,
    ) {
        for _ in 0..count {
            let i = rng.gen_range(0..values.len());
            values[i] = rng.gen_range(lo..=hi);
        }
        values.sort_unstable();
    }
    let file = match args.attr {
        GenAttrChoice::Sizes => {
            let mut values = tree.sizes();
            perturb(&mut rng, &mut values, 1, n, args.mutate);
            InstanceFile::Sizes {
                k: args.k,
                values,
                annotations: Annotations::default(),
                provenance: None,
                mutated,
            }
        }
        GenAttrChoice::Heights => {
            let mut values = tree.heights();
            perturb(&mut rng, &mut values, 0, n, args.mutate);
            InstanceFile::Heights {
                k: args.k,
                values,
                mutated,
            }
        }
        GenAttrChoice::Depths => {
            let mut values = tree.depths();
            perturb(&mut rng, &mut values, 0, n, args.mutate);
            InstanceFile::Depths {
                k: args.k,
                values,
                mutated,
            }
        }
        GenAttrChoice::HdSync => {
            let mut pairs: Vec<(u64, u64)> =
                tree.heights().into_iter().zip(tree.depths()).collect();
            for _ in 0..args.mutate {
                let i = rng.gen_range(0..pairs.len());
                let v = rng.gen_range(0..n);
                if rng.gen_bool(0.5) {
                    pairs[i].0 = v;
                } else {
                    pairs[i].1 = v;
                }
            }
            InstanceFile::HdSync {
                k: args.k,
                pairs,
                mutated,
            }
        }
        GenAttrChoice::SizeItr => {
            let mut pairs: Vec<(u64, u64)> = tree
                .sizes()
                .into_iter()
                .zip(tree.inorder_ranks()?)
                .collect();
            for _ in 0..args.mutate {
                let i = rng.gen_range(0..pairs.len());
                let v = rng.gen_range(1..=n);
                if rng.gen_bool(0.5) {
                    pairs[i].0 = v;
                } else {
                    pairs[i].1 = v;
                }
            }
            InstanceFile::SizeItr { pairs, mutated }
        }
        GenAttrChoice::HdAsync => {
            let mut heights = tree.heights();
            let mut depths = tree.depths();
            perturb(&mut rng, &mut heights, 0, n, args.mutate);
            perturb(&mut rng, &mut depths, 0, n, args.mutate);
            InstanceFile::HdAsync {
                k: args.k,
                heights,
                depths,
                mutated,
            }
        }
    };
    print!("{}", file.to_canonical_json());
    Ok(EXIT_OK)
}
