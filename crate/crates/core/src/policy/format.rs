//! Line-oriented policy files.
//!
//! ```text
//! alphabet a b
//! lattice C: a
//! lattice D: b
//! states q0 q1 qsink
//! initial q0
//! accept-finite q0 q1
//! accept-infinite buchi q0 q1
//! delta q0 a q1
//! possible other.pol
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::automaton::{InfiniteMode, PropertyAutomaton};
use super::lattice::{ActionLattice, Alphabet, Class};
use super::{Policy, Possible};
use crate::error::{Error, Result};
use crate::trace::{is_token, Action};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Line<'a> {
    no: usize,
    keyword: &'a str,
    rest: Vec<&'a str>,
    raw_rest: &'a str,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                return None;
            }
            let (keyword, raw_rest) = match l.find(char::is_whitespace) {
                Some(p) => (&l[..p], l[p..].trim()),
                None => (l, ""),
            };
            Some(Line {
                no: i + 1,
                keyword,
                rest: raw_rest.split_whitespace().collect(),
                raw_rest,
            })
        })
        .collect()
}

/// Parsed, not yet validated contents of one file.
#[derive(Default)]
struct Raw<'a> {
    alphabet: Option<(usize, Vec<&'a str>)>,
    lattice: Vec<(usize, &'a str, Vec<&'a str>)>,
    states: Option<(usize, Vec<&'a str>)>,
    initial: Option<(usize, &'a str)>,
    accept_finite: Option<(usize, Vec<&'a str>)>,
    accept_infinite: Option<(usize, Vec<&'a str>)>,
    delta: Vec<(usize, &'a str, &'a str, &'a str)>,
    possible: Option<(usize, &'a str)>,
}

fn once<T>(slot: &mut Option<(usize, T)>, no: usize, kw: &str, v: T) -> Result<()> {
    if slot.is_some() {
        return Err(perr(no, format!("duplicate `{kw}` line")));
    }
    *slot = Some((no, v));
    Ok(())
}

fn scan(text: &str) -> Result<Raw<'_>> {
    let mut raw = Raw::default();
    for l in lines(text) {
        match l.keyword {
            "alphabet" => once(&mut raw.alphabet, l.no, "alphabet", l.rest)?,
            "lattice" => {
                let (class, members) = l
                    .raw_rest
                    .split_once(':')
                    .ok_or_else(|| perr(l.no, "expected `lattice <C|I|D|O>: <actions>`"))?;
                raw.lattice
                    .push((l.no, class.trim(), members.split_whitespace().collect()));
            }
            "states" => once(&mut raw.states, l.no, "states", l.rest)?,
            "initial" => match l.rest.as_slice() {
                [q] => once(&mut raw.initial, l.no, "initial", *q)?,
                _ => return Err(perr(l.no, "expected `initial <state>`")),
            },
            "accept-finite" => once(&mut raw.accept_finite, l.no, "accept-finite", l.rest)?,
            "accept-infinite" => once(&mut raw.accept_infinite, l.no, "accept-infinite", l.rest)?,
            "delta" => match l.rest.as_slice() {
                [q, a, r] => raw.delta.push((l.no, *q, *a, *r)),
                _ => return Err(perr(l.no, "expected `delta <state> <action> <state>`")),
            },
            "possible" => {
                if l.raw_rest.is_empty() {
                    return Err(perr(l.no, "expected `possible <path>`"));
                }
                once(&mut raw.possible, l.no, "possible", l.raw_rest)?
            }
            other => return Err(perr(l.no, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(raw)
}

fn build_automaton(raw: &Raw<'_>, alphabet: &Arc<Alphabet>) -> Result<PropertyAutomaton> {
    let (sno, names) = raw
        .states
        .as_ref()
        .ok_or_else(|| Error::Validation("missing `states` line".into()))?;
    for s in names {
        if !is_token(s) {
            return Err(perr(*sno, format!("invalid state name {s:?}")));
        }
    }
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let lookup = |no: usize, s: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| perr(no, format!("unknown state {s:?}")))
    };
    let (ino, init) = raw
        .initial
        .ok_or_else(|| Error::Validation("missing `initial` line".into()))?;
    let initial = lookup(ino, init)?;
    let (fno, fin) = raw
        .accept_finite
        .as_ref()
        .ok_or_else(|| Error::Validation("missing `accept-finite` line".into()))?;
    let mut accept_finite = vec![false; names.len()];
    for s in fin {
        accept_finite[lookup(*fno, s)?] = true;
    }
    let (ano, inf) = raw
        .accept_infinite
        .as_ref()
        .ok_or_else(|| Error::Validation("missing `accept-infinite` line".into()))?;
    let set = |xs: &[&str]| xs.iter().map(|s| lookup(*ano, s)).collect::<Result<Vec<_>>>();
    let infinite = match inf.split_first() {
        Some((&"buchi", xs)) => InfiniteMode::Buchi(set(xs)?),
        Some((&"cobuchi", xs)) => InfiniteMode::CoBuchi(set(xs)?),
        Some((&"none", [])) => InfiniteMode::None,
        Some((&"all", [])) => InfiniteMode::All,
        _ => {
            return Err(perr(
                *ano,
                "expected `accept-infinite buchi <states> | cobuchi <states> | none | all`",
            ))
        }
    };
    let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet.len()]; names.len()];
    for &(no, q, a, r) in &raw.delta {
        let q = lookup(no, q)?;
        let s = alphabet
            .sym_by_name(a)
            .map_err(|_| perr(no, format!("action {a:?} is not in the alphabet")))?;
        let r = lookup(no, r)?;
        if delta[q][s].is_some() {
            return Err(perr(
                no,
                format!("duplicate transition from {} on {a}", names[q]),
            ));
        }
        delta[q][s] = Some(r);
    }
    let mut total = Vec::with_capacity(names.len());
    for (q, row) in delta.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (s, r) in row.into_iter().enumerate() {
            out.push(r.ok_or_else(|| {
                Error::Validation(format!(
                    "delta is not total: no transition from {} on {}",
                    names[q],
                    alphabet.action(s)
                ))
            })?);
        }
        total.push(out);
    }
    PropertyAutomaton::new(
        alphabet.clone(),
        names,
        initial,
        total,
        accept_finite,
        infinite,
    )
}

fn build_alphabet(raw: &Raw<'_>) -> Result<Arc<Alphabet>> {
    let (no, names) = raw
        .alphabet
        .as_ref()
        .ok_or_else(|| Error::Validation("missing `alphabet` line".into()))?;
    let actions = names
        .iter()
        .map(|n| Action::new(n).map_err(|e| perr(*no, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Arc::new(Alphabet::new(actions)?))
}

fn build_lattice(raw: &Raw<'_>, alphabet: &Arc<Alphabet>) -> Result<ActionLattice> {
    let mut pairs = Vec::new();
    for (no, class, members) in &raw.lattice {
        let c = Class::parse(class)
            .ok_or_else(|| perr(*no, format!("unknown capability class {class:?}")))?;
        for m in members {
            let a = Action::new(m).map_err(|e| perr(*no, e.to_string()))?;
            alphabet
                .sym(&a)
                .map_err(|_| perr(*no, format!("action {m:?} is not in the alphabet")))?;
            pairs.push((a, c));
        }
    }
    ActionLattice::from_assignment(alphabet.clone(), &pairs)
}

/// Parses a trace-set model (a policy file whose lattice lines, if any, are
/// ignored) over a known alphabet.
pub fn parse_model(text: &str, alphabet: &Arc<Alphabet>) -> Result<PropertyAutomaton> {
    let raw = scan(text)?;
    let own = build_alphabet(&raw)?;
    if own.actions() != alphabet.actions() {
        return Err(Error::Validation(
            "possible-set alphabet differs from the policy alphabet".into(),
        ));
    }
    if let Some((no, _)) = raw.possible {
        return Err(perr(no, "a possible-set file cannot itself name a possible set"));
    }
    build_automaton(&raw, alphabet)
}

/// Parses a policy; `resolve` maps the path of a `possible` line to the
/// text of that file.
pub fn parse_policy_with(
    text: &str,
    resolve: &dyn Fn(&str) -> Result<String>,
) -> Result<Policy> {
    let raw = scan(text)?;
    let alphabet = build_alphabet(&raw)?;
    let lattice = build_lattice(&raw, &alphabet)?;
    let property = build_automaton(&raw, &alphabet)?;
    let possible = match raw.possible {
        None => None,
        Some((_, path)) => {
            let model = parse_model(&resolve(path)?, &alphabet)?;
            Some(Possible {
                path: path.to_string(),
                model,
            })
        }
    };
    Ok(Policy {
        lattice,
        property,
        possible,
    })
}

/// Parses a policy, resolving `possible` paths against the working
/// directory.
pub fn parse_policy(text: &str) -> Result<Policy> {
    parse_policy_with(text, &|p| read(Path::new(p)))
}

/// Reads a policy file, resolving `possible` paths relative to it.
pub fn load_policy(path: &Path) -> Result<Policy> {
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_policy_with(&text, &|p| read(&base.join(p)))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn serialize_automaton(out: &mut String, p: &PropertyAutomaton) {
    let names = p.state_names();
    let list = |qs: &mut dyn Iterator<Item = usize>| -> String {
        qs.map(|q| format!(" {}", names[q])).collect()
    };
    let _ = writeln!(out, "states {}", names.join(" "));
    let _ = writeln!(out, "initial {}", names[p.initial()]);
    let _ = writeln!(
        out,
        "accept-finite{}",
        list(&mut (0..names.len()).filter(|q| p.accepts_finite_state(*q)))
    );
    let _ = match p.infinite_mode() {
        InfiniteMode::Buchi(f) => writeln!(out, "accept-infinite buchi{}", list(&mut f.iter().copied())),
        InfiniteMode::CoBuchi(f) => {
            writeln!(out, "accept-infinite cobuchi{}", list(&mut f.iter().copied()))
        }
        InfiniteMode::None => writeln!(out, "accept-infinite none"),
        InfiniteMode::All => writeln!(out, "accept-infinite all"),
    };
    for q in 0..names.len() {
        for (s, a) in p.alphabet().actions().iter().enumerate() {
            let _ = writeln!(out, "delta {} {a} {}", names[q], names[p.step(q, s)]);
        }
    }
}

/// Canonical text of a policy. Lattice lines are emitted in the order
/// C, I, D, O, skipping empty classes.
pub fn serialize_policy(policy: &Policy) -> String {
    let mut out = String::new();
    let alphabet = policy.property.alphabet();
    let names: Vec<&str> = alphabet.actions().iter().map(|a| a.name()).collect();
    let _ = writeln!(out, "alphabet {}", names.join(" "));
    for c in [Class::C, Class::I, Class::D, Class::O] {
        let members = policy.lattice.members(c);
        if !members.is_empty() {
            let m: Vec<&str> = members.iter().map(|a| a.name()).collect();
            let _ = writeln!(out, "lattice {c}: {}", m.join(" "));
        }
    }
    serialize_automaton(&mut out, &policy.property);
    if let Some(p) = &policy.possible {
        let _ = writeln!(out, "possible {}", p.path);
    }
    out
}

/// Canonical text of a trace-set model.
pub fn serialize_model(model: &PropertyAutomaton) -> String {
    let mut out = String::new();
    let names: Vec<&str> = model.alphabet().actions().iter().map(|a| a.name()).collect();
    let _ = writeln!(out, "alphabet {}", names.join(" "));
    serialize_automaton(&mut out, model);
    out
}
