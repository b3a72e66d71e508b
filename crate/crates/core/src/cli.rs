//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 disagreement, 2 parse or usage error,
//! 3 not enforceable, 4 resource budget exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::classifier::{
    is_enforceable_eq, is_enforceable_eq_nonuniform, is_enforceable_insert,
    is_enforceable_suppress, is_l_renewal, is_l_safety, is_liveness, is_renewal, is_safety,
    Bounds, EquivalenceKind, Verdict,
};
use crate::enforcer::{run_with, EnforcementResult, Strategy};
use crate::error::Error;
use crate::oracle::corpus::{corpus, CorpusSpec};
use crate::oracle::{cross_check_with, ltl_divergences, CheckReport, Classify, InjectedFault, StandardClassifier};
use crate::policy::{load_policy, parse_model, Class, Policy, Possible};
use crate::trace::{parse_trace, Execution, FiniteTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREEMENT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_ENFORCEABLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "partial-enforce", version, about = "Enforceability analysis and runtime enforcement under partial control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Property classes and enforceability verdicts for one policy.
    Classify(ClassifyArgs),
    /// Runs an enforcer on one input trace.
    Enforce(EnforceArgs),
    /// Cross-checks classifier, game and enforcer on policy files (the
    /// shipped corpus when none are given).
    Verify(VerifyArgs),
    /// Cross-checks the shipped corpus.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Bounds as F,S,L: finite length, lasso stem, lasso loop.
    #[arg(long, value_parser = parse_bounds, default_value = "7,3,3")]
    pub bounds: Bounds,
    /// One line of key=value pairs, traces written with commas.
    #[arg(long)]
    pub machine: bool,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    pub policy: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Only this equivalence: syntactic, insert or suppress.
    #[arg(long, value_parser = parse_eq)]
    pub eq: Option<EquivalenceKind>,
    /// Model of the possible executions, overriding the policy's own.
    #[arg(long)]
    pub possible: Option<PathBuf>,
    /// Give every action this class (O, I, D or C).
    #[arg(long, value_parser = parse_class)]
    pub uniform: Option<Class>,
}

#[derive(Args, Debug)]
pub struct EnforceArgs {
    pub policy: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_strategy, default_value = "edit")]
    pub strategy: Strategy,
    /// Defaults to the strategy's own equivalence.
    #[arg(long, value_parser = parse_eq)]
    pub eq: Option<EquivalenceKind>,
    /// Input trace literal, `-` for the empty trace.
    #[arg(long)]
    pub input: String,
    /// Insertions only through the state reached by the action itself.
    #[arg(long)]
    pub stationary: bool,
    #[arg(long)]
    pub possible: Option<PathBuf>,
    #[arg(long, value_parser = parse_class)]
    pub uniform: Option<Class>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub policies: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// Flip the classifier's syntactic verdicts.
    #[arg(long)]
    pub inject_fault: bool,
    /// Compare the enforceability condition with the temporal formula
    /// instead.
    #[arg(long)]
    pub ltl: bool,
    /// Game positions remembered per entry.
    #[arg(long)]
    pub memo_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub inject_fault: bool,
    /// List the checked combinations without running them.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub memo_cap: Option<usize>,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse::<usize>()).collect();
    match nums.as_deref() {
        Ok([f, st, l]) if *l > 0 => Ok(Bounds::new(*f, *st, *l)),
        Ok([_, _, _]) => Err("loop bound must be positive".into()),
        _ => Err(format!("expected F,S,L, got {s:?}")),
    }
}

fn parse_eq(s: &str) -> Result<EquivalenceKind, String> {
    EquivalenceKind::parse(s).ok_or_else(|| format!("unknown equivalence {s:?}"))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::parse(s).ok_or_else(|| format!("unknown strategy {s:?}"))
}

fn parse_class(s: &str) -> Result<Class, String> {
    Class::parse(s).ok_or_else(|| format!("unknown class {s:?}"))
}

/// Ordered key/value report; human mode prints one pair per line.
struct Report {
    machine: bool,
    pairs: Vec<(String, String)>,
}

impl Report {
    fn new(machine: bool) -> Self {
        Report { machine, pairs: Vec::new() }
    }

    fn put(&mut self, k: &str, v: impl ToString) {
        self.pairs.push((k.to_string(), v.to_string()));
    }

    fn exec(&mut self, k: &str, e: &Execution) {
        let v = self.trace_text(&e.to_string());
        self.put(k, v);
    }

    fn trace_text(&self, literal: &str) -> String {
        if self.machine {
            literal.split_whitespace().collect::<Vec<_>>().join(",")
        } else {
            literal.to_string()
        }
    }

    fn verdict(&mut self, k: &str, v: &Verdict) {
        self.put(k, v.label());
        if let (Some(false), Some(w)) = (v.get(), &v.witness) {
            self.exec(&format!("{k}.witness"), w);
        }
    }

    fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        if self.machine {
            let line: Vec<String> = self.pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "{}", line.join(" "))
        } else {
            for (k, v) in &self.pairs {
                writeln!(out, "{k}={v}")?;
            }
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        Error::NotReasonable | Error::Compliance(_) => EXIT_NOT_ENFORCEABLE,
        _ => EXIT_PARSE,
    }
}

fn bounds_text(b: &Bounds) -> String {
    format!("{},{},{}", b.max_finite_len, b.max_stem_len, b.max_loop_len)
}

fn load(path: &Path, possible: Option<&Path>, uniform: Option<Class>) -> Result<Policy, Error> {
    let mut p = load_policy(path)?;
    if let Some(s) = possible {
        let text = std::fs::read_to_string(s).map_err(|e| Error::Io {
            path: s.display().to_string(),
            msg: e.to_string(),
        })?;
        p.possible = Some(Possible {
            path: s.display().to_string(),
            model: parse_model(&text, p.alphabet())?,
        });
    }
    Ok(match uniform {
        Some(c) => p.with_uniform(c),
        None => p,
    })
}

fn policy_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let p = load(&a.policy, a.possible.as_deref(), a.uniform)?;
    let b = &a.common.bounds;
    let mut r = Report::new(a.common.machine);
    r.put("policy", policy_name(&a.policy));
    r.put("lattice", p.lattice.label());
    r.put("bounds", bounds_text(b));
    r.put("reasonable", p.is_reasonable());
    r.verdict("safety", &is_safety(&p.property));
    r.verdict("liveness", &is_liveness(&p.property));
    r.verdict("renewal", &is_renewal(&p.property));
    r.verdict("l_safety", &is_l_safety(&p));
    r.verdict("l_renewal", &is_l_renewal(&p, b));
    let wanted = |eq| a.eq.is_none_or(|x| x == eq);
    if wanted(EquivalenceKind::Syntactic) {
        let v = match &p.possible {
            Some(s) => is_enforceable_eq_nonuniform(&p, &s.model, b),
            None => is_enforceable_eq(&p, b),
        };
        r.verdict("enforceable.syntactic", &v);
    }
    if wanted(EquivalenceKind::SubwordInsert) {
        r.verdict("enforceable.insert", &is_enforceable_insert(&p, false, b));
        r.verdict("enforceable.insert_stationary", &is_enforceable_insert(&p, true, b));
    }
    if wanted(EquivalenceKind::SubwordSuppress) {
        r.verdict("enforceable.suppress", &is_enforceable_suppress(&p, b));
    }
    r.write(out).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        msg: e.to_string(),
    }
}

fn enforce(a: &EnforceArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let p = load(&a.policy, a.possible.as_deref(), a.uniform)?;
    let input: FiniteTrace = parse_trace(&a.input)?;
    let eq = a.eq.unwrap_or(a.strategy.equivalence());
    let res = run_with(&p, a.strategy, eq, a.stationary, &input)?;
    write_result(&res, a.common.machine, out).map_err(io_err)?;
    for d in &res.diagnostics {
        writeln!(err, "note: {d}").map_err(io_err)?;
    }
    if let Some(f) = &res.failure {
        writeln!(err, "stuck: {f}").map_err(io_err)?;
    } else if res.premature {
        writeln!(err, "stuck: aborted on {} although the input could still become valid", res.input)
            .map_err(io_err)?;
    }
    Ok(if res.ok() { EXIT_OK } else { EXIT_NOT_ENFORCEABLE })
}

fn write_result(res: &EnforcementResult, machine: bool, out: &mut dyn Write) -> std::io::Result<()> {
    let mut r = Report::new(machine);
    if machine {
        r.put("output", r.trace_text(&res.output.to_string()));
        let log: Vec<String> = res
            .log
            .iter()
            .map(|e| e.to_string().replace(" on ", " ").replace(' ', ":"))
            .collect();
        r.put("log", if log.is_empty() { "-".into() } else { log.join(",") });
    } else {
        writeln!(out, "{}", res.output)?;
        write!(out, "{}", res.log_text())?;
    }
    r.put("sound", res.sound);
    r.put("transparent", res.transparent);
    r.put("compliant", res.compliant);
    r.put("aborted", res.aborted);
    r.put("premature", res.premature);
    r.write(out)
}

fn spec_for(paths: &[PathBuf], bounds: Bounds, memo_cap: Option<usize>) -> Result<CorpusSpec, Error> {
    let mut spec = if paths.is_empty() {
        let mut s = corpus();
        s.bounds = bounds;
        s
    } else {
        let mut s = CorpusSpec::empty(bounds);
        for path in paths {
            s.policies.push((policy_name(path), load_policy(path)?));
        }
        s
    };
    if let Some(m) = memo_cap {
        spec.memo_cap = m;
    }
    Ok(spec)
}

fn check(
    spec: &CorpusSpec,
    inject_fault: bool,
    machine: bool,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let t = Instant::now();
    let c: &dyn Classify = if inject_fault { &InjectedFault } else { &StandardClassifier };
    let report: CheckReport = cross_check_with(spec, c);
    let dis = report.disagreements().len();
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "bounds={} entries={}", bounds_text(&spec.bounds), report.rows.len())?;
        write!(out, "{report}")?;
        write!(out, "disagreements={dis}")?;
        if !machine {
            write!(out, " elapsed={:.1}s", t.elapsed().as_secs_f64())?;
        }
        writeln!(out)
    };
    w(out).map_err(io_err)?;
    Ok(if report.budget_exceeded() {
        EXIT_BUDGET
    } else if dis > 0 {
        EXIT_DISAGREEMENT
    } else {
        EXIT_OK
    })
}

fn ltl(spec: &CorpusSpec, machine: bool, out: &mut dyn Write) -> Result<i32, Error> {
    let found = ltl_divergences(spec)?;
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        if !machine {
            writeln!(out, "bounds={} divergent_pairs={}", bounds_text(&spec.bounds), found.len())?;
        }
        for d in &found {
            writeln!(out, "{d}")?;
        }
        Ok(())
    };
    w(out).map_err(io_err)?;
    Ok(if found.is_empty() { EXIT_OK } else { EXIT_DISAGREEMENT })
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match &cli.command {
        Command::Classify(a) => classify(a, out),
        Command::Enforce(a) => enforce(a, out, err),
        Command::Verify(a) => {
            let spec = spec_for(&a.policies, a.common.bounds, a.memo_cap)?;
            if a.ltl {
                ltl(&spec, a.common.machine, out)
            } else {
                check(&spec, a.inject_fault, a.common.machine, out)
            }
        }
        Command::Corpus(a) => {
            let spec = spec_for(&[], a.common.bounds, a.memo_cap)?;
            if a.list {
                for e in spec.entries() {
                    writeln!(out, "policy={} lattice={} eq={}", e.name, e.policy.lattice.label(), e.eq_label())
                        .map_err(io_err)?;
                }
                return Ok(EXIT_OK);
            }
            check(&spec, a.inject_fault, a.common.machine, out)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
