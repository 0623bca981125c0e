//! `tcclab` — command-line front end.
//!
//! Every command prints one JSON document (sorted keys, floats at 12
//! significant digits) to stdout. Exit codes: 0 ok, 1 ordering failure,
//! 2 bad input, 3 domain error, 4 resource budget exceeded.

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tcclab_core::corpus::{self, CorpusError};
use tcclab_core::derive::{self, Constraint, Dedupe, EnumError, EnumerationConfig, MergeMode};
use tcclab_core::encoding::{self, EncodingError, Goal, Payload, SymbolSequence};
use tcclab_core::fep::{self, EfeModel, FepError, GenerativeModel, KlModel, VfeModel};
use tcclab_core::report::{self, complexity_value, display2, render, run_report, sha256_hex};
use tcclab_core::tcc::{self, Candidate, TccError};
use tcclab_core::{lz, parse_bracket, print_bracket, LogBase, SchemeRegistry, SyntacticObject};

mod table;

#[derive(Parser)]
#[command(name = "tcclab", version, about = "Compression-based economy judgments for minimalist syntax")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an .sbt file and print its canonical form and JSON term.
    Parse { file: PathBuf },
    /// Normalized LZ complexity of a literal sequence or an encoded structure.
    Complexity(ComplexityArgs),
    /// Compare two structures; the lower complexity is preferred.
    Compare(CompareArgs),
    /// Run every contrast pair in a corpus directory.
    Corpus(CorpusArgs),
    /// Enumerate MERGE derivations.
    Derive(DeriveArgs),
    /// Free-energy quantities for a discrete model.
    Fep {
        #[command(subcommand)]
        which: FepCommand,
    },
    /// Rank encoding schemes against the corpus's reported values.
    Calibrate(CalibrateArgs),
    /// Print the active scheme registry.
    Schemes,
}

#[derive(Args)]
struct EncodeOpts {
    /// Encoding scheme id.
    #[arg(long, default_value = "labels+terminals")]
    scheme: String,
    /// Search goal for step schemes: lower-copy (the default), category:CAT,
    /// features:+F,.., or path:LR..
    #[arg(long, value_parser = parse_goal)]
    goal: Option<Goal>,
    #[arg(long, value_enum, default_value_t = BaseArg::Two)]
    log_base: BaseArg,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Structure file (.sbt).
    #[arg(conflicts_with = "seq", required_unless_present = "seq")]
    file: Option<PathBuf>,
    /// Literal sequence: characters, or whitespace/comma-separated tokens.
    #[arg(long)]
    seq: Option<String>,
    #[command(flatten)]
    enc: EncodeOpts,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    enc: EncodeOpts,
    /// Scheme for the second structure (defaults to --scheme).
    #[arg(long)]
    scheme_b: Option<String>,
    #[arg(long, default_value_t = tcc::DEFAULT_TIE_TOLERANCE)]
    tie_tol: f64,
}

#[derive(Args)]
struct CorpusArgs {
    dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = tcc::DEFAULT_TIE_TOLERANCE)]
    tie_tol: f64,
    #[arg(long, value_enum, default_value_t = BaseArg::Two)]
    log_base: BaseArg,
}

#[derive(Args)]
struct CalibrateArgs {
    dir: PathBuf,
    /// Largest absolute error counted as a match.
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = BaseArg::Two)]
    log_base: BaseArg,
}

#[derive(Args)]
struct DeriveArgs {
    /// JSON array of atoms in bracket syntax, e.g. ["a", "b:N{+Q}"].
    /// Defaults to two bare atoms.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    steps: usize,
    /// Comma-separated subset of ntc, extension, rr.
    #[arg(long, value_delimiter = ',')]
    constraints: Vec<Constraint>,
    #[arg(long, value_enum, default_value_t = ModeArg::Free)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = DedupeArg::Structural)]
    dedupe: DedupeArg,
    /// Allow MERGE(X, X).
    #[arg(long)]
    self_merge: bool,
    /// Byte budget, with optional K/M/G suffix.
    #[arg(long, value_parser = parse_bytes)]
    mem_budget: Option<u64>,
    /// Include wall-clock time (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum FepCommand {
    /// KL divergence D[q‖p].
    Kl {
        #[arg(long)]
        model: PathBuf,
    },
    /// Variational free energy and its four forms.
    Vfe {
        #[arg(long)]
        model: PathBuf,
    },
    /// Expected free energy of a policy.
    Efe {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Two,
    Alphabet,
}

impl From<BaseArg> for LogBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Two => LogBase::Two,
            BaseArg::Alphabet => LogBase::Alphabet,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Free,
    Restricted,
}

#[derive(Clone, Copy, ValueEnum)]
enum DedupeArg {
    Structural,
    None,
}

fn parse_goal(s: &str) -> Result<Goal, String> {
    if s == "lower-copy" {
        return Ok(Goal::LowerCopy);
    }
    match s.split_once(':') {
        Some(("category", c)) => Ok(Goal::Category(c.to_string())),
        Some(("features", f)) => Ok(Goal::Features(f.to_string())),
        Some(("path", p)) => p.parse().map(Goal::Path).map_err(|e| format!("{e}")),
        _ => Err(format!("unknown goal {s:?}")),
    }
}

fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, mult) = match s.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => {
            let m = match c.to_ascii_uppercase() {
                'K' => 1u64 << 10,
                'M' => 1 << 20,
                'G' => 1 << 30,
                'T' => 1 << 40,
                _ => return Err(format!("unknown size suffix in {s:?}")),
            };
            (&s[..i], m)
        }
        _ => (s, 1),
    };
    let n: f64 = num.trim().parse().map_err(|_| format!("bad size {s:?}"))?;
    if !(n > 0.0) {
        return Err(format!("size must be positive: {s:?}"));
    }
    Ok((n * mult as f64) as u64)
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(m: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: m.to_string() }
    }
    fn domain(m: impl std::fmt::Display) -> Self {
        Failure { code: 3, message: m.to_string() }
    }
}

impl From<EncodingError> for Failure {
    fn from(e: EncodingError) -> Self {
        match e {
            EncodingError::UnknownScheme(_) | EncodingError::Manifest(_) | EncodingError::InvalidScheme { .. } => {
                Failure::input(e)
            }
            _ => Failure::domain(e),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::input(e)
    }
}

impl From<TccError> for Failure {
    fn from(e: TccError) -> Self {
        match &e {
            TccError::Encoding { source: EncodingError::UnknownScheme(_), .. } | TccError::MalformedPair { .. } => {
                Failure::input(e)
            }
            TccError::BadTolerance | TccError::TooFewCandidates(_) => Failure::input(e),
            _ => Failure::domain(e),
        }
    }
}

impl From<FepError> for Failure {
    fn from(e: FepError) -> Self {
        Failure::domain(e)
    }
}

/// Output plus exit code (nonzero only for ordering failures and budgets,
/// where the report is still printed).
struct Outcome {
    stdout: String,
    code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_structure(path: &FsPath) -> Result<SyntacticObject, Failure> {
    let text = read(path)?;
    parse_bracket(&text).map_err(|e| Failure::input(format!("{}:{e}", path.display())))
}

fn file_input(path: &FsPath) -> Result<Value, Failure> {
    let text = read(path)?;
    Ok(json!({ "path": path.display().to_string(), "sha256": sha256_hex(text.as_bytes()) }))
}

/// Step schemes need a goal; without one they follow the movement chain.
fn payload(ctx: &Ctx, so: SyntacticObject, goal: &Option<Goal>, scheme: &str) -> Payload {
    let steps = ctx.registry.get(scheme).map(|s| s.uses_steps()).unwrap_or(false);
    match goal {
        Some(g) => Payload::Targeted { structure: so, goal: g.clone() },
        None if steps => Payload::Targeted { structure: so, goal: Goal::LowerCopy },
        None => Payload::Structure(so),
    }
}

fn sequence_value(seq: &SymbolSequence) -> Value {
    json!({
        "tokens": seq.tokens(),
        "symbols": seq.symbols,
        "alphabet_size": seq.alphabet_size,
        "scheme": seq.scheme,
        "provenance": seq.provenance,
    })
}

struct Ctx {
    argv: Vec<String>,
    registry: SchemeRegistry,
}

impl Ctx {
    fn report(&self, inputs: Value, result: Value) -> String {
        render(&run_report(&self.argv, inputs, &self.registry, result))
    }
}

fn cmd_parse(ctx: &Ctx, file: &FsPath) -> Result<Outcome, Failure> {
    let so = load_structure(file)?;
    let result = json!({
        "canonical": print_bracket(&so),
        "term": report::to_value(&so),
        "nodes": so.node_count(),
        "leaves": so.leaf_count(),
        "height": so.height(),
    });
    Ok(Outcome::ok(ctx.report(json!({ "file": file_input(file)? }), result)))
}

fn cmd_complexity(ctx: &Ctx, args: &ComplexityArgs) -> Result<Outcome, Failure> {
    let base = LogBase::from(args.enc.log_base);
    let (inputs, seq) = match (&args.seq, &args.file) {
        (Some(lit), _) => {
            let seq = SymbolSequence::from_tokens(&lz::literal_tokens(lit), "literal", "literal");
            (json!({ "seq": lit }), seq)
        }
        (None, Some(file)) => {
            let so = load_structure(file)?;
            let scheme = ctx.registry.get(&args.enc.scheme)?;
            let seq = payload(ctx, so, &args.enc.goal, &args.enc.scheme).encode(scheme)?;
            (json!({ "file": file_input(file)?, "scheme": args.enc.scheme }), seq)
        }
        (None, None) => return Err(Failure::input("give a file or --seq")),
    };
    let rep = seq.complexity(base).map_err(Failure::domain)?;
    let result = json!({ "complexity": complexity_value(&rep), "sequence": sequence_value(&seq) });
    Ok(Outcome::ok(ctx.report(inputs, result)))
}

fn cmd_compare(ctx: &Ctx, args: &CompareArgs) -> Result<Outcome, Failure> {
    let scheme_b = args.scheme_b.clone().unwrap_or_else(|| args.enc.scheme.clone());
    let cands = vec![
        Candidate {
            id: "a".into(),
            payload: payload(ctx, load_structure(&args.a)?, &args.enc.goal, &args.enc.scheme),
            scheme: args.enc.scheme.clone(),
            gold: None,
        },
        Candidate {
            id: "b".into(),
            payload: payload(ctx, load_structure(&args.b)?, &args.enc.goal, &scheme_b),
            scheme: scheme_b,
            gold: None,
        },
    ];
    let verdict = tcc::compare(&cands, &ctx.registry, args.tie_tol, args.enc.log_base.into())?;
    let mut v = report::to_value(&verdict);
    // Report preferred candidates by file as well as by slot.
    let files: Vec<String> = verdict
        .preferred
        .iter()
        .map(|id| if id == "a" { &args.a } else { &args.b })
        .map(|p| p.display().to_string())
        .collect();
    v["preferred_files"] = json!(files);
    if let Some(reports) = v["reports"].as_array_mut() {
        for (r, rep) in reports.iter_mut().zip(&verdict.reports) {
            r["complexity"] = complexity_value(&rep.complexity);
        }
    }
    let inputs = json!({
        "a": file_input(&args.a)?,
        "b": file_input(&args.b)?,
        "scheme": args.enc.scheme,
        "tie_tol": args.tie_tol,
    });
    Ok(Outcome::ok(ctx.report(inputs, v)))
}

fn cmd_corpus(ctx: &Ctx, args: &CorpusArgs) -> Result<Outcome, Failure> {
    let corpus = corpus::load_corpus(&args.dir)?;
    let rep = tcc::evaluate_corpus(&corpus.pairs, &ctx.registry, args.tie_tol, args.log_base.into())?;
    let code = if rep.all_correct() { 0 } else { 1 };
    let stdout = match args.format {
        Format::Json => {
            let mut v = report::to_value(&rep);
            if let Some(pairs) = v["pairs"].as_array_mut() {
                for (p, o) in pairs.iter_mut().zip(&rep.pairs) {
                    for (m, mo) in p["members"].as_array_mut().into_iter().flatten().zip(&o.members) {
                        m["display"] = json!(display2(mo.value));
                    }
                }
            }
            let inputs = json!({ "dir": args.dir.display().to_string(), "tie_tol": args.tie_tol });
            ctx.report(inputs, v)
        }
        Format::Table => table::aligned(&rep),
        Format::Csv => table::csv(&rep),
    };
    if code != 0 {
        for p in rep.pairs.iter().filter(|p| !p.correct) {
            eprintln!("ordering failure: pair {} preferred {:?}", p.pair, p.preferred);
        }
    }
    Ok(Outcome { stdout, code })
}

fn cmd_calibrate(ctx: &Ctx, args: &CalibrateArgs) -> Result<Outcome, Failure> {
    let corpus = corpus::load_corpus(&args.dir)?;
    let fixtures = corpus.calibration_fixtures();
    let mut families: Vec<String> = fixtures.iter().map(|f| f.family.clone()).collect();
    families.dedup();
    let mut out = serde_json::Map::new();
    for fam in &families {
        let fx: Vec<_> = fixtures.iter().filter(|f| &f.family == fam).cloned().collect();
        let ranked = encoding::calibrate(&fx, &ctx.registry.schemes, args.log_base.into(), args.tolerance)
            .map_err(Failure::input)?;
        let chosen = corpus.pairs.iter().find(|p| &p.id == fam).map(|p| p.scheme.clone());
        out.insert(fam.clone(), json!({ "manifest_scheme": chosen, "best": ranked[0].scheme, "ranking": report::to_value(&ranked) }));
    }
    let inputs = json!({ "dir": args.dir.display().to_string(), "tolerance": args.tolerance });
    Ok(Outcome::ok(ctx.report(inputs, Value::Object(out))))
}

fn load_lexicon(path: &FsPath) -> Result<Vec<tcclab_core::LexicalItem>, Failure> {
    let text = read(path)?;
    let atoms: Vec<String> =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    atoms
        .iter()
        .map(|a| {
            let so = parse_bracket(a).map_err(|e| Failure::input(format!("{}: {a:?}: {e}", path.display())))?;
            so.item().cloned().ok_or_else(|| Failure::input(format!("{}: {a:?} is not an atom", path.display())))
        })
        .collect()
}

fn cmd_derive(ctx: &Ctx, args: &DeriveArgs) -> Result<Outcome, Failure> {
    let (lexicon, lex_input) = match &args.lexicon {
        Some(p) => (load_lexicon(p)?, file_input(p)?),
        None => {
            let ab = ["a", "b"].map(|p| tcclab_core::LexicalItem::new(p, None));
            (ab.to_vec(), json!("default"))
        }
    };
    let mut cfg = EnumerationConfig::new(lexicon, args.steps).with_constraints(args.constraints.iter().copied());
    cfg.mode = match args.mode {
        ModeArg::Free => MergeMode::Free,
        ModeArg::Restricted => MergeMode::Restricted,
    };
    cfg.dedupe = match args.dedupe {
        DedupeArg::Structural => Dedupe::Structural,
        DedupeArg::None => Dedupe::None,
    };
    cfg.self_merge = args.self_merge;
    cfg.mem_budget = args.mem_budget;
    let inputs = json!({ "lexicon": lex_input, "config": report::to_value(&cfg) });
    let strip = |mut r: derive::EnumerationResult| {
        if !args.timing {
            r.wall_time_ms = None;
        }
        r
    };
    match derive::enumerate(&cfg) {
        Ok(r) => Ok(Outcome::ok(ctx.report(inputs, report::to_value(&strip(r))))),
        Err(EnumError::Config(m)) => Err(Failure::input(format!("invalid configuration: {m}"))),
        Err(EnumError::Budget { budget, estimate, step, partial }) => {
            eprintln!("memory budget of {budget} bytes exceeded at step {step} (estimated {estimate}); counts are partial");
            let mut v = report::to_value(&strip(*partial));
            v["budget"] = json!({ "bytes": budget, "estimate": estimate, "stopped_after_step": step });
            Ok(Outcome { stdout: ctx.report(inputs, v), code: 4 })
        }
        Err(e) => Err(Failure::domain(e)),
    }
}

fn model<T: serde::de::DeserializeOwned>(path: &FsPath) -> Result<T, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: invalid model: {e}", path.display())))
}

fn cmd_fep(ctx: &Ctx, which: &FepCommand) -> Result<Outcome, Failure> {
    let (path, result) = match which {
        FepCommand::Kl { model: p } => {
            let m: KlModel = model(p)?;
            let kl = fep::kl_divergence(&m.q, &m.p)?;
            (p, json!({ "kl": kl }))
        }
        FepCommand::Vfe { model: p } => {
            let m: VfeModel = model(p)?;
            let gm = GenerativeModel::new(m.prior, m.likelihood)?;
            let f = fep::variational_free_energy(&gm, &m.q, m.outcome)?;
            let d = fep::free_energy_decompositions(&gm, &m.q, m.outcome)?;
            let post = gm.posterior(m.outcome)?;
            let mut v = json!({
                "F": f,
                "forms": report::to_value(&d),
                "max_residual": d.max_residual(),
                "surprise": -d.log_evidence,
                "posterior": post,
            });
            v["bound_holds"] = json!(f >= -d.log_evidence - 1e-12);
            (p, v)
        }
        FepCommand::Efe { model: p } => {
            let m: EfeModel = model(p)?;
            let r = fep::policy_free_energy(&m.policy)?;
            let max_residual = r.steps.iter().map(|s| s.identity_residual()).fold(0.0, f64::max);
            let mut v = report::to_value(&r);
            v["max_residual"] = json!(max_residual);
            (p, v)
        }
    };
    Ok(Outcome::ok(ctx.report(json!({ "model": file_input(path)? }), result)))
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Parse { file } => cmd_parse(ctx, file),
        Command::Complexity(a) => cmd_complexity(ctx, a),
        Command::Compare(a) => cmd_compare(ctx, a),
        Command::Corpus(a) => cmd_corpus(ctx, a),
        Command::Derive(a) => cmd_derive(ctx, a),
        Command::Fep { which } => cmd_fep(ctx, which),
        Command::Calibrate(a) => cmd_calibrate(ctx, a),
        Command::Schemes => Ok(Outcome::ok(ctx.registry.to_json())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = match SchemeRegistry::from_env() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", encoding::MANIFEST_ENV);
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx { argv: std::env::args().skip(1).collect(), registry };
    match run(&cli, &ctx) {
        Ok(o) => {
            print!("{}", o.stdout);
            ExitCode::from(o.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
