//! Three-way agreement between the classifier, the game and the executed
//! enforcer, on finite inputs up to the corpus bound.

use std::fmt;

use rayon::prelude::*;

use super::corpus::{CorpusEntry, CorpusSpec};
use super::enumerate::finite_syms;
use super::game::{game_enforceable, GameSpec};
use crate::classifier::condition::{Analysis, Future};
use crate::classifier::{insert_fixed_point, suppress_fixed_point, EquivalenceKind};
use crate::enforcer::{EnforcerSession, Strategy};
use crate::error::Error;
use crate::policy::{Class, Policy, Sym};
use crate::trace::{FiniteTrace, Trace};

/// A classifier as seen by the cross-check: a verdict for the entry when
/// inputs are limited to length `n`, `None` when it has no opinion.
pub trait Classify: Sync {
    fn classify(&self, entry: &CorpusEntry, n: usize) -> Option<bool>;

    /// Shortest input the verdict blames, if any.
    fn witness(&self, _entry: &CorpusEntry, _n: usize) -> Option<FiniteTrace> {
        None
    }
}

fn analysis(policy: &Policy) -> Analysis<'_> {
    match &policy.possible {
        Some(s) => Analysis::nonuniform(policy, &s.model),
        None => Analysis::uniform(policy),
    }
}

fn possible(policy: &Policy, w: &Trace<Sym>) -> bool {
    policy
        .possible
        .as_ref()
        .is_none_or(|s| s.model.accepts_syms(w))
}

/// First possible input of length at most `n` that is invalid and whose
/// first invalid prefix can still become valid.
fn unsafe_input(policy: &Policy, n: usize) -> Option<Trace<Sym>> {
    let an = analysis(policy);
    let m = an.ext_machine();
    finite_syms(policy.alphabet().len(), n).into_iter().find(|w| {
        if !possible(policy, w) || policy.property.accepts_syms(w) {
            return false;
        }
        let mut e = m.initial;
        for a in w.iter() {
            e = m.step(e, *a);
            if !an.valid_at(e) {
                return *an.future(e) != Future::Dead;
            }
        }
        false
    })
}

/// The shipped decision procedures, restricted to their finite fragment.
pub struct StandardClassifier;

impl Classify for StandardClassifier {
    fn classify(&self, entry: &CorpusEntry, n: usize) -> Option<bool> {
        let p = &entry.policy;
        if !p.is_reasonable() {
            return Some(false);
        }
        match entry.eq {
            EquivalenceKind::Syntactic => Some(analysis(p).first_finite_violation(n).is_none()),
            EquivalenceKind::SubwordInsert => match p.lattice.uniform_class() {
                Some(Class::D) => Some(unsafe_input(p, n).is_none()),
                Some(Class::I) => Some(insert_fixed_point(p, entry.stationary)[p.property.initial()]),
                _ => None,
            },
            EquivalenceKind::SubwordSuppress => p
                .lattice
                .only_classes(&[Class::O, Class::D])
                .then(|| suppress_fixed_point(p)[p.property.initial()]),
        }
    }

    fn witness(&self, entry: &CorpusEntry, n: usize) -> Option<FiniteTrace> {
        let p = &entry.policy;
        let w = match entry.eq {
            EquivalenceKind::Syntactic => analysis(p).first_finite_violation(n),
            EquivalenceKind::SubwordInsert if p.lattice.uniform_class() == Some(Class::D) => {
                unsafe_input(p, n)
            }
            _ => None,
        };
        w.map(|w| p.alphabet().decode(&w))
    }
}

/// Deliberately wrong: flips every syntactic verdict. Used to check that
/// the cross-check notices.
pub struct InjectedFault;

impl Classify for InjectedFault {
    fn classify(&self, entry: &CorpusEntry, n: usize) -> Option<bool> {
        let v = StandardClassifier.classify(entry, n);
        match entry.eq {
            EquivalenceKind::Syntactic => v.map(|b| !b),
            _ => v,
        }
    }
}

/// Shortest possible input of length at most `n` on which the enforcer
/// fails, explored as a tree of sessions.
fn enforcer_failure(entry: &CorpusEntry, n: usize) -> Result<Option<FiniteTrace>, Error> {
    let p = &entry.policy;
    let strategy = Strategy::for_equivalence(entry.eq);
    let root = EnforcerSession::with_mode(p, strategy, entry.eq, entry.stationary)?;
    let mut level = vec![(Vec::<Sym>::new(), root)];
    for len in 0..=n {
        let mut next = Vec::new();
        for (w, s) in level {
            if possible(p, &Trace::from(w.clone())) && !s.clone().finish().ok() {
                return Ok(Some(p.alphabet().decode(&Trace::from(w))));
            }
            if len == n {
                continue;
            }
            for a in 0..p.alphabet().len() {
                let mut t = s.clone();
                match t.step(p.alphabet().action(a)) {
                    Ok(_) | Err(Error::Compliance(_)) => {}
                    Err(e) => return Err(e),
                }
                let mut w2 = w.clone();
                w2.push(a);
                next.push((w2, t));
            }
        }
        level = next;
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct CheckRow {
    pub policy: String,
    pub lattice: String,
    pub eq: String,
    pub classifier: Option<bool>,
    pub game: Option<bool>,
    pub enforcer: Option<bool>,
    pub budget_exceeded: bool,
    /// `(source, input)` pairs explaining a disagreement.
    pub witnesses: Vec<(String, FiniteTrace)>,
}

impl CheckRow {
    pub fn agree(&self) -> bool {
        let vals: Vec<bool> = [self.classifier, self.game, self.enforcer]
            .into_iter()
            .flatten()
            .collect();
        !self.budget_exceeded
            && self.classifier.is_some()
            && self.game.is_some()
            && vals.iter().all(|v| *v == vals[0])
    }
}

fn tf(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "t",
        Some(false) => "f",
        None => "n/a",
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "policy={} lattice={} eq={} classifier={} game={} enforcer={} agree={}",
            self.policy,
            self.lattice,
            self.eq,
            tf(self.classifier),
            tf(self.game),
            tf(self.enforcer),
            if self.agree() { "t" } else { "f" }
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    pub fn disagreements(&self) -> Vec<&CheckRow> {
        self.rows.iter().filter(|r| !r.agree()).collect()
    }

    pub fn budget_exceeded(&self) -> bool {
        self.rows.iter().any(|r| r.budget_exceeded)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        for r in self.disagreements() {
            writeln!(f, "disagreement: policy={} lattice={} eq={}", r.policy, r.lattice, r.eq)?;
            if r.budget_exceeded {
                writeln!(f, "  game search exceeded its memo budget")?;
            }
            for (src, w) in &r.witnesses {
                writeln!(f, "  {src} witness: {w}")?;
            }
        }
        Ok(())
    }
}

fn check_entry(entry: &CorpusEntry, n: usize, spec: &CorpusSpec, c: &dyn Classify) -> CheckRow {
    let classifier = c.classify(entry, n);
    let mut game_spec = GameSpec::new(entry.eq, n);
    game_spec.stationary = entry.stationary;
    game_spec.continuations = spec.bounds;
    game_spec.memo_cap = spec.memo_cap;
    let (game, budget_exceeded) = match game_enforceable(&entry.policy, &game_spec) {
        Ok(v) => (Some(v), false),
        Err(_) => (None, true),
    };
    let (enforcer, fail) = if entry.policy.is_reasonable() {
        match enforcer_failure(entry, n) {
            Ok(w) => (Some(w.is_none()), w),
            Err(_) => (None, None),
        }
    } else {
        // no session can be opened; nothing to run
        (None, None)
    };
    let mut row = CheckRow {
        policy: entry.name.clone(),
        lattice: entry.policy.lattice.label(),
        eq: entry.eq_label(),
        classifier,
        game,
        enforcer,
        budget_exceeded,
        witnesses: Vec::new(),
    };
    if !row.agree() {
        if let Some(w) = c.witness(entry, n) {
            row.witnesses.push(("classifier".into(), w));
        }
        if let Some(w) = fail {
            row.witnesses.push(("enforcer".into(), w));
        }
    }
    row
}

/// Checks every corpus entry with the given classifier.
pub fn cross_check_with(spec: &CorpusSpec, c: &dyn Classify) -> CheckReport {
    let n = spec.bounds.max_finite_len;
    let rows = spec
        .entries()
        .par_iter()
        .map(|e| check_entry(e, n, spec, c))
        .collect();
    CheckReport { rows }
}

pub fn cross_check(spec: &CorpusSpec) -> CheckReport {
    cross_check_with(spec, &StandardClassifier)
}
