//! The `pbasis` command line. Exit codes: 0 success (p-basis, witness found,
//! experiment consistent), 1 not a p-basis, 2 input error, 3 witness search
//! exhausted, 4 experiment inconsistency.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::basis::{decompose_over_fraction_span, is_p_basis_of_constants, DecomposeVerdict, IndependenceMethod};
use crate::error::Error;
use crate::expr::{parse_instance, Instance, PolyContext};
use crate::freudenburg::{verify_witness, witness_search, SearchOutcome, SubringElem, TheoremWitness, WitnessCase};
use crate::jac::jacobian_report;
use crate::mpoly::MPoly;
use crate::oracle::{equivalence_experiment, ExperimentParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_P_BASIS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

pub const DEFAULT_DEGREE_BOUND: u32 = 2;
pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "pbasis", version, about = "p-bases of rings of constants in positive characteristic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobian, minors, dgcd, p-independence and the p-basis verdict.
    Analyze {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Search for a witness that an irreducible g divides dgcd.
    Witness {
        #[command(flatten)]
        instance: InstanceArgs,
        /// The irreducible divisor to certify.
        #[arg(long, value_name = "EXPR")]
        g: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a target as a combination of the products f^α.
    Decompose {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_name = "EXPR")]
        target: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the equivalence experiment on random tuples.
    Verify {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value = "Fp", value_parser = ["Fp", "Fp[t]"])]
        coeff: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Total degree bound of the random polynomials.
        #[arg(long, default_value_t = 3)]
        deg: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Prepend the identity tuple and the curated non-examples.
        #[arg(long)]
        sentinels: bool,
        /// Write the record stream to this file.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["prime", "vars", "f"])]
    instance: Option<PathBuf>,
    /// Inline instance: the prime.
    #[arg(long = "prime", value_name = "P", requires_all = ["vars", "f"])]
    prime: Option<u32>,
    /// Inline instance: coefficient ring.
    #[arg(long = "ring", value_name = "COEFF", default_value = "Fp", value_parser = ["Fp", "Fp[t]"])]
    ring: String,
    /// Inline instance: comma separated variable names.
    #[arg(long, value_name = "NAMES")]
    vars: Option<String>,
    /// Inline instance: a polynomial; repeat for f1, f2, ...
    #[arg(long = "f", value_name = "EXPR")]
    f: Vec<String>,
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, value_name = "K")]
    degree_bound: Option<u32>,
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Record,
}

/// Effective run settings, printed in every report header.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub degree_bound: u32,
    pub budget: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Settings {
    fn header(&self, command: &str) -> String {
        format!(
            "# pbasis {command} | degree-bound {} | budget {} | trials {} | seed {}",
            self.degree_bound, self.budget, self.trials, self.seed
        )
    }
}

enum InputError {
    Msg(String),
    // The reader went away; stop quietly.
    PipeClosed,
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError::Msg(e.to_string())
    }
}

/// Flags win over `option.*` lines of the instance, which win over defaults.
fn resolve(common: &CommonArgs, instance: Option<&Instance>) -> Result<Settings, InputError> {
    fn opt<T: std::str::FromStr>(inst: Option<&Instance>, key: &str) -> Result<Option<T>, InputError> {
        match inst.and_then(|i| i.options.get(key)) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| InputError::Msg(format!("option.{key}: cannot parse `{v}`"))),
        }
    }
    Ok(Settings {
        degree_bound: match common.degree_bound {
            Some(v) => v,
            None => opt(instance, "degree_bound")?.unwrap_or(DEFAULT_DEGREE_BOUND),
        },
        budget: match common.budget {
            Some(v) => v,
            None => opt(instance, "budget")?.unwrap_or(DEFAULT_BUDGET),
        },
        trials: match common.trials {
            Some(v) => v,
            None => opt(instance, "trials")?.unwrap_or(DEFAULT_TRIALS),
        },
        seed: match common.seed {
            Some(v) => v,
            None => opt(instance, "seed")?.unwrap_or(DEFAULT_SEED),
        },
    })
}

fn load_instance(args: &InstanceArgs) -> Result<Instance, InputError> {
    let text = match (&args.instance, args.prime) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| InputError::Msg(format!("{}: {e}", path.display())))?,
        (None, Some(p)) => {
            let mut s = format!("p: {p}\ncoeff: {}\nvars: {}\n", args.ring, args.vars.as_deref().unwrap_or(""));
            for (k, f) in args.f.iter().enumerate() {
                s.push_str(&format!("f{}: {f}\n", k + 1));
            }
            s
        }
        (None, None) => return Err(InputError::Msg("give --instance <PATH> or an inline instance (--prime, --vars, --f)".into())),
    };
    parse_instance(&text).map_err(|e| InputError::Msg(e.to_string()))
}

fn parse_in(inst: &Instance, what: &str, text: &str) -> Result<MPoly, InputError> {
    inst.context.parse(text).map_err(|e| InputError::Msg(format!("{what}: {e} (at byte {})", e.offset())))
}

/// Runs the command line on `args` (program name first), writing to the
/// given streams, and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze { instance, common } => analyze(instance, common, out),
        Command::Witness { instance, g, common } => witness(instance, g, common, out),
        Command::Decompose { instance, target, common } => decompose(instance, target, common, out),
        Command::Verify { p, coeff, n, m, deg, count, sentinels, report, common } => {
            let params = (*p, coeff.as_str(), *n, *m, *deg, *count, *sentinels);
            verify(params, report.as_ref(), common, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(InputError::Msg(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(InputError::PipeClosed) => EXIT_OK,
    }
}

/// Runs on the process arguments with stdout and stderr.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| match e.kind() {
            std::io::ErrorKind::BrokenPipe => InputError::PipeClosed,
            _ => InputError::Msg(format!("write failed: {e}")),
        })?
    };
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records serialize")
}

#[derive(Serialize)]
struct InstanceRecord {
    p: u32,
    coeff: &'static str,
    vars: Vec<String>,
    fs: Vec<String>,
}

fn instance_record(inst: &Instance) -> InstanceRecord {
    InstanceRecord {
        p: inst.p(),
        coeff: inst.kind().label(),
        vars: inst.context.vars().to_vec(),
        fs: inst.fs.iter().map(|f| inst.context.print(f)).collect(),
    }
}

fn describe(inst: &Instance, out: &mut dyn Write) -> Result<(), InputError> {
    let field = if inst.kind().has_t() { format!("F_{}[t]", inst.p()) } else { format!("F_{}", inst.p()) };
    emit!(out, "ring: {field}[{}]", inst.context.vars().join(", "));
    for (i, f) in inst.fs.iter().enumerate() {
        emit!(out, "f{} = {}", i + 1, inst.context.print(f));
    }
    Ok(())
}

#[derive(Serialize)]
struct MinorRecord {
    cols: Vec<usize>,
    value: String,
}

#[derive(Serialize)]
struct AnalyzeRecord {
    command: &'static str,
    settings: Settings,
    instance: InstanceRecord,
    jacobian: Vec<Vec<String>>,
    minors: Vec<MinorRecord>,
    dgcd: String,
    p_independent: bool,
    independence_method: IndependenceMethod,
    determinant_in_k: Option<bool>,
    p_basis: bool,
}

fn analyze(args: &InstanceArgs, common: &CommonArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let inst = load_instance(args)?;
    let settings = resolve(common, Some(&inst))?;
    let report = jacobian_report(&inst.fs)?;
    let verdict = is_p_basis_of_constants(&inst.fs)?;
    let pr = |f: &MPoly| inst.context.print(f);
    let code = if verdict.is_p_basis { EXIT_OK } else { EXIT_NOT_P_BASIS };
    if common.format == Format::Record {
        let rec = AnalyzeRecord {
            command: "analyze",
            settings,
            instance: instance_record(&inst),
            jacobian: report.matrix.iter().map(|r| r.iter().map(pr).collect()).collect(),
            minors: report
                .minors
                .iter()
                .map(|(c, d)| MinorRecord { cols: c.iter().map(|j| j + 1).collect(), value: pr(d) })
                .collect(),
            dgcd: pr(&report.dgcd),
            p_independent: verdict.independent,
            independence_method: verdict.notes.independence_method,
            determinant_in_k: verdict.notes.determinant_in_k,
            p_basis: verdict.is_p_basis,
        };
        emit!(out, "{}", json(&rec));
        return Ok(code);
    }
    emit!(out, "{}", settings.header("analyze"));
    describe(&inst, out)?;
    emit!(out, "jacobian:");
    for row in &report.matrix {
        let cells: Vec<String> = row.iter().map(pr).collect();
        emit!(out, "  [ {} ]", cells.join(" | "));
    }
    emit!(out, "minors:");
    for (cols, d) in &report.minors {
        let names: Vec<&str> = cols.iter().map(|&j| inst.context.vars()[j].as_str()).collect();
        emit!(out, "  ({}): {}", names.join(", "), pr(d));
    }
    emit!(out, "dgcd: {}", pr(&report.dgcd));
    let method = match verdict.notes.independence_method {
        IndependenceMethod::EvaluationCertificate => "evaluation certificate",
        IndependenceMethod::ExactElimination => "exact elimination",
        IndependenceMethod::DualDerivations => "dual derivations",
    };
    emit!(out, "p-independent: {} ({method})", yes_no(verdict.independent));
    if let Some(d) = verdict.notes.determinant_in_k {
        emit!(out, "jacobian determinant in K \\ {{0}}: {}", yes_no(d));
    }
    emit!(out, "p-basis: {}", yes_no(verdict.is_p_basis));
    Ok(code)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct WitnessOut {
    case: WitnessCase,
    g: String,
    i: usize,
    j: Option<usize>,
    b: Option<String>,
    c: Option<String>,
    b1: Option<String>,
    c1: Option<String>,
    b2: Option<String>,
    c2: Option<String>,
}

#[derive(Serialize)]
struct WitnessRecord {
    command: &'static str,
    settings: Settings,
    instance: InstanceRecord,
    g: String,
    outcome: &'static str,
    witness: Option<WitnessOut>,
    verified: bool,
}

fn witness_out(inst: &Instance, w: &TheoremWitness) -> WitnessOut {
    let e = |x: &Option<SubringElem>| x.as_ref().map(|x| inst.context.print(&x.value));
    WitnessOut {
        case: w.case,
        g: inst.context.print(&w.g),
        i: w.i + 1,
        j: w.j.map(|j| j + 1),
        b: e(&w.b),
        c: e(&w.c),
        b1: e(&w.b1),
        c1: e(&w.c1),
        b2: e(&w.b2),
        c2: e(&w.c2),
    }
}

fn witness(args: &InstanceArgs, g_text: &str, common: &CommonArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let inst = load_instance(args)?;
    let settings = resolve(common, Some(&inst))?;
    let g = parse_in(&inst, "--g", g_text)?;
    let outcome = match witness_search(&inst.fs, &g, settings.degree_bound, settings.budget) {
        Ok(o) => o,
        Err(e @ (Error::NotIrreducible(_) | Error::NotADivisorOfDgcd)) => return Err(InputError::Msg(format!("g = {}: {e}", inst.context.print(&g)))),
        Err(e) => return Err(e.into()),
    };
    let (label, w, code) = match &outcome {
        SearchOutcome::Found(w) => ("found", Some(w.as_ref()), EXIT_OK),
        SearchOutcome::BoundExhausted => ("bound_exhausted", None, EXIT_EXHAUSTED),
        SearchOutcome::BudgetExhausted => ("budget_exhausted", None, EXIT_EXHAUSTED),
    };
    let verified = match w {
        Some(w) => verify_witness(&inst.fs, w)?,
        None => false,
    };
    if common.format == Format::Record {
        let rec = WitnessRecord {
            command: "witness",
            settings,
            instance: instance_record(&inst),
            g: inst.context.print(&g),
            outcome: label,
            witness: w.map(|w| witness_out(&inst, w)),
            verified,
        };
        emit!(out, "{}", json(&rec));
        return Ok(code);
    }
    emit!(out, "{}", settings.header("witness"));
    describe(&inst, out)?;
    emit!(out, "g = {}", inst.context.print(&g));
    match w {
        Some(w) => {
            let wo = witness_out(&inst, w);
            match wo.j {
                Some(j) => emit!(out, "witness: case {}, i = {}, j = {j}", w.case, wo.i),
                None => emit!(out, "witness: case {}, i = {}", w.case, wo.i),
            }
            for (name, v) in [("b", &wo.b), ("c", &wo.c), ("b1", &wo.b1), ("c1", &wo.c1), ("b2", &wo.b2), ("c2", &wo.c2)] {
                if let Some(v) = v {
                    emit!(out, "  {name} = {v}");
                }
            }
            emit!(out, "verified: {}", yes_no(verified));
        }
        None if label == "bound_exhausted" => {
            emit!(out, "bound exhausted: no witness with coefficients of degree <= {}", settings.degree_bound)
        }
        None => emit!(out, "budget exhausted after {} units of work", settings.budget),
    }
    Ok(code)
}

#[derive(Serialize)]
struct CoefficientRecord {
    alpha: Vec<u32>,
    num: String,
    den: Option<String>,
}

#[derive(Serialize)]
struct DecomposeRecord {
    command: &'static str,
    settings: Settings,
    instance: InstanceRecord,
    target: String,
    verdict: &'static str,
    coefficients: Vec<CoefficientRecord>,
}

fn decompose(args: &InstanceArgs, target_text: &str, common: &CommonArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let inst = load_instance(args)?;
    let settings = resolve(common, Some(&inst))?;
    let target = parse_in(&inst, "--target", target_text)?;
    let verdict = match decompose_over_fraction_span(&target, &inst.fs) {
        Ok(v) => v,
        Err(Error::DependentGenerators) => return Err(InputError::Msg("the generators are not p-independent".into())),
        Err(e) => return Err(e.into()),
    };
    let pr = |f: &MPoly| inst.context.print(f);
    let (label, coefficients) = match &verdict {
        DecomposeVerdict::NotInFractionSpan => ("not_in_fraction_span", Vec::new()),
        DecomposeVerdict::InPolynomialSpan(cs) => (
            "in_polynomial_span",
            cs.iter().map(|(a, c)| CoefficientRecord { alpha: a.clone(), num: pr(&c.to_a()), den: None }).collect(),
        ),
        DecomposeVerdict::InFractionSpan(cs) => (
            "in_fraction_span",
            cs.iter()
                .map(|(a, c)| CoefficientRecord { alpha: a.clone(), num: pr(&c.num.to_a()), den: Some(pr(&c.den.to_a())) })
                .collect(),
        ),
    };
    if common.format == Format::Record {
        let rec = DecomposeRecord {
            command: "decompose",
            settings,
            instance: instance_record(&inst),
            target: pr(&target),
            verdict: label,
            coefficients,
        };
        emit!(out, "{}", json(&rec));
        return Ok(EXIT_OK);
    }
    emit!(out, "{}", settings.header("decompose"));
    describe(&inst, out)?;
    emit!(out, "target = {}", pr(&target));
    emit!(out, "verdict: {}", label.replace('_', " "));
    for c in &coefficients {
        let alpha: Vec<String> = c.alpha.iter().map(|k| k.to_string()).collect();
        match &c.den {
            Some(d) if d != "1" => emit!(out, "  alpha ({}): ({}) / ({})", alpha.join(", "), c.num, d),
            _ => emit!(out, "  alpha ({}): {}", alpha.join(", "), c.num),
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    command: &'static str,
    settings: Settings,
    params: &'a ExperimentParams,
    instances: usize,
    dgcd_unit: usize,
    with_witness: usize,
    exhausted: usize,
    candidate_iv: usize,
    inconsistent: Vec<usize>,
}

type VerifyParams<'a> = (u32, &'a str, usize, usize, u32, usize, bool);

fn verify(params: VerifyParams<'_>, report: Option<&PathBuf>, common: &CommonArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let (p, coeff, n, m, deg, count, sentinels) = params;
    let settings = resolve(common, None)?;
    let params = ExperimentParams {
        p,
        with_t: coeff == "Fp[t]",
        n,
        m,
        deg,
        count,
        seed: settings.seed,
        trials: settings.trials,
        degree_bound: settings.degree_bound,
        budget: settings.budget,
        sentinels,
    };
    let reports = equivalence_experiment(&params)?;
    let records: Vec<String> = reports.iter().map(|r| r.record().to_json_line()).collect();
    let bad: Vec<usize> = reports.iter().filter(|r| !r.verdict_consistent).map(|r| r.index).collect();
    let summary = VerifySummary {
        command: "verify",
        settings,
        params: &params,
        instances: reports.len(),
        dgcd_unit: reports.iter().filter(|r| r.dgcd_unit).count(),
        with_witness: reports.iter().filter(|r| !r.witnesses.is_empty()).count(),
        exhausted: reports.iter().filter(|r| r.exhausted).count(),
        candidate_iv: reports.iter().filter(|r| r.candidate_iv).count(),
        inconsistent: bad.clone(),
    };
    if let Some(path) = report {
        let mut text = records.join("\n");
        text.push('\n');
        text.push_str(&json(&summary));
        text.push('\n');
        std::fs::write(path, text).map_err(|e| InputError::Msg(format!("{}: {e}", path.display())))?;
    }
    if common.format == Format::Record {
        for r in &records {
            emit!(out, "{r}");
        }
        emit!(out, "{}", json(&summary));
    } else {
        emit!(out, "{}", settings.header("verify"));
        emit!(
            out,
            "# p {} | coeff {} | n {} | m {} | deg {} | count {} | sentinels {}",
            p,
            coeff,
            n,
            m,
            deg,
            count,
            yes_no(sentinels)
        );
        for r in &reports {
            let fs: Vec<String> = r.fs.iter().map(|f| f.to_string()).collect();
            let verdict = if r.dgcd_unit {
                format!("dgcd 1, {} samples, {} failures", r.cond3.samples, r.cond3.failures.len())
            } else if let Some(w) = r.witnesses.first() {
                format!("dgcd {}, witness case {} for g = {}", r.dgcd, w.case, w.g)
            } else {
                format!("dgcd {}, exhausted", r.dgcd)
            };
            let mark = if r.verdict_consistent { "ok" } else { "INCONSISTENT" };
            emit!(out, "{:>4} {:<10} ({})  {verdict}  {mark}", r.index, r.label, fs.join(", "));
        }
        emit!(
            out,
            "instances {} | dgcd unit {} | with witness {} | exhausted {} | translate-only candidates {} | inconsistent {}",
            summary.instances,
            summary.dgcd_unit,
            summary.with_witness,
            summary.exhausted,
            summary.candidate_iv,
            bad.len()
        );
    }
    if let Some(&first) = bad.first() {
        let r = &reports[first];
        let kind = r.ring().kind();
        let ctx = PolyContext::new(kind, MPoly::default_names(r.ring().arity())).map_err(InputError::Msg)?;
        let inst = Instance::new(ctx, r.fs.clone());
        emit!(out, "minimal reproducer (instance {first}, check seed {}):", r.seed);
        for line in inst.to_text().lines() {
            emit!(out, "  {line}");
        }
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(EXIT_OK)
}
