//! `sepmod`: separability checks, submodel builds, Tarski–Vaught
//! verification and the query grid from the command line.
//!
//! Exit codes: 0 true / pass, 1 false / refusal / fail, 2 usage or
//! precondition error, 3 incomplete description.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sepmod_core::hypergraph::Hypergraph;
use sepmod_core::modelbuilder::{build_t0_separator, build_t2_separators, tarski_vaught_verify, BuildError, BuildOptions, TvStatus};
use sepmod_core::separability::criterion;
use sepmod_core::{ClosureKind, Mode, Point, Rational, SeparabilityQuery, StructureHandle, StructureId, SubmodelDescription, ZSpec};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

/// The case file shipped with the crate.
pub const GRID: &str = include_str!("../data/grid.json");

pub type Description = SubmodelDescription<Rational>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "sepmod", version, about = "Separability in hypergraphs of elementary submodels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide separability by the closure criterion.
    Check(QueryArgs),
    /// Build separating submodel descriptions.
    Build(QueryArgs),
    /// Tarski–Vaught verification of a description file.
    Verify(VerifyArgs),
    /// Separability in an explicit finite hypergraph.
    Hypergraph(HypergraphArgs),
    /// Print dcl or acl of a listed set.
    Closure(ClosureArgs),
    /// List isolated 1-types over the empty set.
    Types(TypesArgs),
    /// Run check, build and verify over a case file.
    Grid(GridArgs),
}

#[derive(Args, Debug, Default)]
pub struct QueryArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub structure: Option<StructureId>,
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Literals such as "@{0}" or "@{(2,3)}, @{5:P2}".
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// none | acl-empty | dcl-empty | acl:<literals>
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Keep only the staged trace.
    #[arg(long)]
    pub no_closed_form: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct HypergraphArgs {
    /// JSON object with "X", "Y" and optionally "Z"; atoms are integers or
    /// strings.
    pub input: PathBuf,
    #[arg(long, default_value = "t0")]
    pub mode: Mode,
    /// Comma-separated atoms.
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Acl,
    Dcl,
}

#[derive(Args, Debug)]
pub struct ClosureArgs {
    #[arg(long)]
    pub structure: StructureId,
    #[arg(long)]
    pub of: String,
    #[arg(long, value_enum, default_value_t = KindArg::Acl)]
    pub kind: KindArg,
}

#[derive(Args, Debug)]
pub struct TypesArgs {
    #[arg(long)]
    pub structure: StructureId,
    /// Constants contributing to the listed prefix (EHR).
    #[arg(long, default_value_t = 3)]
    pub prefix: usize,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Case file; the bundled grid when omitted.
    #[arg(long)]
    pub cases: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn default_z() -> String {
    "none".into()
}
fn default_depth() -> usize {
    2
}
fn default_samples() -> usize {
    500
}
fn default_budget() -> usize {
    200
}
fn yes() -> bool {
    true
}

/// Everything a check or build depends on; echoed into the output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub structure: StructureId,
    pub mode: Mode,
    pub a: String,
    pub b: String,
    #[serde(default = "default_z")]
    pub z: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "yes")]
    pub closed_form: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(structure: StructureId, mode: Mode, a: &str, b: &str, z: &str) -> Self {
        RunConfig {
            structure,
            mode,
            a: a.into(),
            b: b.into(),
            z: z.into(),
            seed: 0,
            depth: default_depth(),
            samples: default_samples(),
            budget: default_budget(),
            closed_form: true,
            out: None,
        }
    }

    fn from_args(args: &QueryArgs) -> Result<Self, String> {
        let base: Option<RunConfig> = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                Some(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?)
            }
            None => None,
        };
        let structure = args.structure.or(base.as_ref().map(|c| c.structure)).ok_or("--structure is required")?;
        let mode = args.mode.or(base.as_ref().map(|c| c.mode)).unwrap_or(Mode::T0);
        let pick = |flag: &Option<String>, from: Option<&String>, name: &str| -> Result<String, String> {
            flag.clone().or(from.cloned()).ok_or(format!("--{name} is required"))
        };
        let mut c = RunConfig::new(structure, mode, "", "", "none");
        if let Some(b) = &base {
            c = b.clone();
            c.structure = structure;
            c.mode = mode;
        }
        c.a = pick(&args.a, base.as_ref().map(|c| &c.a), "a")?;
        c.b = pick(&args.b, base.as_ref().map(|c| &c.b), "b")?;
        if let Some(z) = &args.z {
            c.z = z.clone();
        }
        c.seed = args.seed.unwrap_or(c.seed);
        c.depth = args.depth.unwrap_or(c.depth);
        c.samples = args.samples.unwrap_or(c.samples);
        c.budget = args.budget.unwrap_or(c.budget);
        c.closed_form &= !args.no_closed_form;
        if args.out.is_some() {
            c.out = args.out.clone();
        }
        Ok(c)
    }

    pub fn query(&self) -> Result<SeparabilityQuery<Rational>, String> {
        Ok(SeparabilityQuery::new(self.structure, self.mode, points(&self.a)?, points(&self.b)?, parse_z(&self.z)?))
    }
}

fn points(text: &str) -> Result<Vec<Point>, String> {
    Point::parse_list(text).ok_or_else(|| format!("cannot parse element list `{text}`"))
}

pub fn parse_z(text: &str) -> Result<ZSpec<Rational>, String> {
    match text.trim() {
        "none" | "empty" => Ok(ZSpec::Empty),
        "acl-empty" => Ok(ZSpec::AclOf(vec![])),
        "dcl-empty" => Ok(ZSpec::DclEmpty),
        other => match other.strip_prefix("acl:") {
            Some(list) => Ok(ZSpec::AclOf(points(list)?)),
            None => Err(format!("unknown Z `{other}` (expected none, acl-empty, dcl-empty or acl:<literals>)")),
        },
    }
}

/// Result of one command: exit code plus what goes to each stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }

    fn json(code: i32, v: &Value) -> Self {
        Output { code, stdout: pretty(v), stderr: String::new() }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE };
            let text = e.render().to_string();
            return if code == EXIT_TRUE {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let fmt = cli.format;
    match cli.command {
        Command::Check(a) => with_config(&a, |c| cmd_check(c, fmt)),
        Command::Build(a) => with_config(&a, |c| cmd_build(c, fmt)),
        Command::Verify(a) => cmd_verify(&a.input, a.depth, a.samples, a.seed, fmt),
        Command::Hypergraph(a) => cmd_hypergraph(&a),
        Command::Closure(a) => cmd_closure(&a),
        Command::Types(a) => cmd_types(&a),
        Command::Grid(a) => cmd_grid(&a, fmt),
    }
}

fn with_config(args: &QueryArgs, f: impl FnOnce(&RunConfig) -> Output) -> Output {
    match RunConfig::from_args(args) {
        Ok(c) => f(&c),
        Err(e) => Output::usage(e),
    }
}

pub fn cmd_check(c: &RunConfig, fmt: Format) -> Output {
    let q = match c.query() {
        Ok(q) => q,
        Err(e) => return Output::usage(e),
    };
    let v = match criterion(&q) {
        Ok(v) => v,
        Err(e) => return Output::usage(e),
    };
    let code = if v.answer { EXIT_TRUE } else { EXIT_FALSE };
    match fmt {
        Format::Json => Output::json(code, &json!({ "config": c, "verdict": v })),
        Format::Text => {
            let mut s = format!("{}: {} [{}, Z = {}]\n", v.answer, v.criterion, v.mode, v.z);
            for o in &v.certificate.offending {
                let _ = writeln!(s, "  offending {}: {}", o.point, o.from_a);
            }
            for n in &v.notes {
                let _ = writeln!(s, "  note: {n}");
            }
            Output { code, stdout: s, stderr: String::new() }
        }
    }
}

/// The JSON written by `build`: one description for T0, a pair for T2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Built {
    Twin { a: Box<Description>, b: Box<Description> },
    Single(Box<Description>),
}

impl Built {
    pub fn descriptions(&self) -> Vec<&Description> {
        match self {
            Built::Single(d) => vec![d],
            Built::Twin { a, b } => vec![a, b],
        }
    }
}

/// Builds without writing anything: `Ok` with the descriptions, or the
/// exit code and message of a refusal or usage error.
pub fn build(c: &RunConfig) -> Result<Built, Output> {
    let q = c.query().map_err(Output::usage)?;
    let s = StructureHandle::new(c.structure);
    let opts = BuildOptions { budget: c.budget, closed_form: c.closed_form, ..BuildOptions::default() };
    let res = match c.mode {
        Mode::T0 => build_t0_separator(&s, &q.a, &q.b, &q.z, &opts).map(|d| Built::Single(Box::new(d))),
        Mode::T2 => build_t2_separators(&s, &q.a, &q.b, &q.z, &opts).map(|(a, b)| Built::Twin { a: Box::new(a), b: Box::new(b) }),
    };
    res.map_err(|e| match e {
        BuildError::Refused(v) => Output::json(EXIT_FALSE, &json!({ "config": c, "refused": v })),
        BuildError::Failed(e) => Output::usage(e),
    })
}

pub fn cmd_build(c: &RunConfig, fmt: Format) -> Output {
    let built = match build(c) {
        Ok(b) => b,
        Err(out) => return out,
    };
    let text = pretty(&built);
    let Some(path) = &c.out else {
        return Output { code: EXIT_TRUE, stdout: text, stderr: String::new() };
    };
    if let Err(e) = std::fs::write(path, &text) {
        return Output::usage(format!("{}: {e}", path.display()));
    }
    let summary: Vec<Value> = built
        .descriptions()
        .iter()
        .map(|d| {
            json!({
                "role": d.role,
                "status": d.status,
                "closed_form": d.closed_form.as_ref().map(|f| f.text().to_string()),
                "stages": d.stages.len(),
                "witnesses": d.witness_count(),
            })
        })
        .collect();
    match fmt {
        Format::Json => Output::json(EXIT_TRUE, &json!({ "config": c, "out": path, "descriptions": summary })),
        Format::Text => {
            let mut s = String::new();
            for d in built.descriptions() {
                let form = d.closed_form.as_ref().map(|f| f.text()).unwrap_or("(staged only)");
                let _ = writeln!(s, "{:?}: {form}, {} stages, {} witnesses", d.role, d.stages.len(), d.witness_count());
            }
            Output { code: EXIT_TRUE, stdout: s, stderr: String::new() }
        }
    }
}

pub fn read_built(path: &Path) -> Result<Built, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: not a submodel description: {e}", path.display()))
}

/// Worst status wins: fail, then incomplete, then pass.
fn verify_code(statuses: &[TvStatus]) -> i32 {
    if statuses.contains(&TvStatus::Fail) {
        EXIT_FALSE
    } else if statuses.contains(&TvStatus::Incomplete) {
        EXIT_INCOMPLETE
    } else {
        EXIT_TRUE
    }
}

pub fn cmd_verify(input: &Path, depth: usize, samples: usize, seed: u64, fmt: Format) -> Output {
    let built = match read_built(input) {
        Ok(b) => b,
        Err(e) => return Output::usage(e),
    };
    let reports: Vec<_> = built.descriptions().iter().map(|d| tarski_vaught_verify(d, depth, samples, seed)).collect();
    let code = verify_code(&reports.iter().map(|r| r.status).collect::<Vec<_>>());
    match fmt {
        Format::Json => Output::json(code, &json!({ "depth": depth, "samples": samples, "seed": seed, "reports": reports })),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = write!(s, "{:?}: {} formulas, {} satisfiable", r.status, r.checked, r.satisfiable);
                if let Some(f) = &r.failure {
                    let _ = write!(s, ", counterexample {}", serde_json::to_string(f).unwrap_or_default());
                }
                s.push('\n');
            }
            Output { code, stdout: s, stderr: String::new() }
        }
    }
}

/// Hypergraph atoms as they appear in JSON.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Atom {
    Int(i64),
    Name(String),
}

impl Atom {
    fn parse(text: &str) -> Atom {
        let t = text.trim();
        t.parse().map(Atom::Int).unwrap_or_else(|_| Atom::Name(t.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypergraphFile {
    #[serde(rename = "X")]
    x: BTreeSet<Atom>,
    #[serde(rename = "Y")]
    y: Vec<BTreeSet<Atom>>,
    #[serde(rename = "Z", default)]
    z: BTreeSet<Atom>,
}

fn atoms(text: &str) -> BTreeSet<Atom> {
    text.split(',').filter(|t| !t.trim().is_empty()).map(Atom::parse).collect()
}

pub fn cmd_hypergraph(args: &HypergraphArgs) -> Output {
    let file: HypergraphFile = match std::fs::read_to_string(&args.input)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
    {
        Ok(f) => f,
        Err(e) => return Output::usage(format!("{}: {e}", args.input.display())),
    };
    let h = match Hypergraph::new(file.x, file.y) {
        Ok(h) => h,
        Err(e) => return Output::usage(e),
    };
    let (a, b, z) = (atoms(&args.a), atoms(&args.b), file.z);
    let single = |s: &BTreeSet<Atom>| (s.len() == 1).then(|| s.iter().next().unwrap().clone());
    let res = match (args.mode, single(&a), single(&b)) {
        (Mode::T0, Some(x1), Some(x2)) => h.t0_separable(&x1, &x2, &z).map(|r| (r.verdict, json!(r))),
        (Mode::T2, Some(x1), Some(x2)) => h.t2_separable(&x1, &x2, &z).map(|r| (r.verdict, json!(r))),
        (Mode::T0, _, _) => h.set_t0_separable(&a, &b, &z).map(|r| (r.verdict, json!(r))),
        (Mode::T2, _, _) => h.set_t2_separable(&a, &b, &z).map(|r| (r.verdict, json!(r))),
    };
    match res {
        Ok((verdict, v)) => Output::json(if verdict { EXIT_TRUE } else { EXIT_FALSE }, &v),
        Err(e) => Output::usage(e),
    }
}

pub fn cmd_closure(args: &ClosureArgs) -> Output {
    let s = StructureHandle::new(args.structure);
    let pts = match points(&args.of) {
        Ok(p) => p,
        Err(e) => return Output::usage(e),
    };
    if let Some(p) = pts.iter().find(|p| !s.admits(*p)) {
        return Output::usage(format!("{p} is not an element of {}", s.id));
    }
    let c = match args.kind {
        KindArg::Acl => s.acl(&pts),
        KindArg::Dcl => s.dcl(&pts),
    };
    debug_assert!(matches!(c.kind, ClosureKind::Acl | ClosureKind::Dcl));
    Output::json(EXIT_TRUE, &json!(c))
}

pub fn cmd_types(args: &TypesArgs) -> Output {
    let s = StructureHandle::new(args.structure);
    Output::json(EXIT_TRUE, &json!(s.list_isolated_1types::<Rational>(args.prefix)))
}

/// One entry of a case file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub structure: StructureId,
    pub mode: Mode,
    pub a: String,
    pub b: String,
    #[serde(default = "default_z")]
    pub z: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub check: i32,
    pub build: i32,
    /// Verification status per built description.
    pub verify: Vec<TvStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Check and build agree, and every built description passed.
    pub ok: bool,
}

pub fn load_cases(text: &str) -> Result<Vec<Case>, String> {
    serde_json::from_str(text).map_err(|e| format!("case file: {e}"))
}

pub fn run_case(case: &Case, depth: usize, samples: usize, budget: usize, seed: u64) -> CaseResult {
    let mut c = RunConfig::new(case.structure, case.mode, &case.a, &case.b, &case.z);
    c.budget = budget;
    let check = cmd_check(&c, Format::Json).code;
    let (build_code, verify, failure) = match build(&c) {
        Err(out) => (out.code, vec![], None),
        Ok(built) => {
            let reports: Vec<_> = built.descriptions().iter().map(|d| tarski_vaught_verify(d, depth, samples, seed)).collect();
            let failure = reports.iter().find_map(|r| r.failure.as_ref()).map(|f| serde_json::to_string(f).unwrap_or_default());
            (EXIT_TRUE, reports.iter().map(|r| r.status).collect(), failure)
        }
    };
    let ok = check != EXIT_USAGE && check == build_code && verify.iter().all(|s| *s == TvStatus::Pass);
    CaseResult { name: case.name.clone(), check, build: build_code, verify, failure, ok }
}

/// Runs every case, `jobs` at a time; results keep case order.
pub fn run_grid(cases: &[Case], jobs: usize, depth: usize, samples: usize, budget: usize, seed: u64) -> Vec<CaseResult> {
    let jobs = jobs.max(1);
    let chunk = cases.len().div_ceil(jobs).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|c| run_case(c, depth, samples, budget, seed)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("grid worker panicked")).collect()
    })
}

pub fn cmd_grid(args: &GridArgs, fmt: Format) -> Output {
    let text = match &args.cases {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return Output::usage(format!("{}: {e}", p.display())),
        },
        None => GRID.to_string(),
    };
    let cases = match load_cases(&text) {
        Ok(c) => c,
        Err(e) => return Output::usage(e),
    };
    let results = run_grid(&cases, args.jobs, args.depth, args.samples, args.budget, args.seed);
    let passed = results.iter().filter(|r| r.ok).count();
    let code = if passed == results.len() { EXIT_TRUE } else { EXIT_FALSE };
    match fmt {
        Format::Json => Output::json(
            code,
            &json!({
                "depth": args.depth, "samples": args.samples, "budget": args.budget, "seed": args.seed,
                "cases": results.len(), "ok": passed, "results": results,
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                let _ = writeln!(s, "{} {}: check {} build {} verify {:?}", if r.ok { "ok  " } else { "FAIL" }, r.name, r.check, r.build, r.verify);
            }
            let _ = writeln!(s, "{passed}/{} cases coherent", results.len());
            Output { code, stdout: s, stderr: String::new() }
        }
    }
}
