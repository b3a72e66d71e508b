//! Trace-level enforcement: an edit automaton, truncation, insertion and
//! suppression, each keeping a log that can be audited against the lattice.

use std::fmt;

use crate::classifier::condition::{Analysis, Future};
use crate::classifier::{insert_fixed_point, suppress_fixed_point, EquivalenceKind};
use crate::error::{Error, Result};
use crate::policy::machine::{Machine, State};
use crate::policy::{Class, Policy, Sym};
use crate::trace::{Action, Execution, FiniteTrace, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Edit,
    Truncate,
    Insert,
    Suppress,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Edit,
        Strategy::Truncate,
        Strategy::Insert,
        Strategy::Suppress,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "edit" => Some(Strategy::Edit),
            "truncate" => Some(Strategy::Truncate),
            "insert" => Some(Strategy::Insert),
            "suppress" => Some(Strategy::Suppress),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Edit => "edit",
            Strategy::Truncate => "truncate",
            Strategy::Insert => "insert",
            Strategy::Suppress => "suppress",
        }
    }

    /// The equivalence this strategy is built for.
    pub fn equivalence(self) -> EquivalenceKind {
        match self {
            Strategy::Edit | Strategy::Truncate => EquivalenceKind::Syntactic,
            Strategy::Insert => EquivalenceKind::SubwordInsert,
            Strategy::Suppress => EquivalenceKind::SubwordSuppress,
        }
    }

    pub fn for_equivalence(eq: EquivalenceKind) -> Self {
        match eq {
            EquivalenceKind::Syntactic => Strategy::Edit,
            EquivalenceKind::SubwordInsert => Strategy::Insert,
            EquivalenceKind::SubwordSuppress => Strategy::Suppress,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Emit,
    /// Held back: released later by an `Emit`, or never output.
    Hold,
    Insert,
    Abort,
    /// Let through although it breaks the policy.
    Pass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditEvent {
    pub kind: EventKind,
    pub action: Option<Action>,
    /// Class of the action, as consulted when choosing the move.
    pub class: Option<Class>,
    /// `Emit` of an action that was held earlier.
    pub from_held: bool,
}

impl fmt::Display for EditEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.action.as_ref().map_or("", |a| a.name());
        match self.kind {
            EventKind::Emit => write!(f, "EMIT {a}"),
            EventKind::Hold => write!(f, "HOLD {a}"),
            EventKind::Insert => write!(f, "INSERT {a}"),
            EventKind::Abort => write!(f, "ABORT on {a}"),
            EventKind::Pass => write!(f, "PASS {a}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnforcementResult {
    pub input: FiniteTrace,
    pub output: FiniteTrace,
    pub log: Vec<EditEvent>,
    pub sound: bool,
    pub transparent: bool,
    pub compliant: bool,
    pub aborted: bool,
    /// Aborted while the input could still become valid.
    pub premature: bool,
    pub failure: Option<String>,
    pub diagnostics: Vec<String>,
}

impl EnforcementResult {
    pub fn ok(&self) -> bool {
        self.sound && self.transparent && self.compliant && !self.premature && self.failure.is_none()
    }

    pub fn log_text(&self) -> String {
        self.log.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Checks a log against the lattice: no released hold of a non-C action,
/// no insertion outside I∪C, no abort on O∪I.
pub fn audit(policy: &Policy, log: &[EditEvent]) -> bool {
    let class = |e: &EditEvent| {
        e.action
            .as_ref()
            .and_then(|a| policy.lattice.class_of(a).ok())
    };
    log.iter().all(|e| match e.kind {
        EventKind::Emit if e.from_held => class(e) == Some(Class::C),
        EventKind::Insert => class(e).is_some_and(|c| c.can_insert()),
        EventKind::Abort => class(e).is_some_and(|c| c.can_suppress()),
        _ => true,
    })
}

#[derive(Clone)]
pub struct EnforcerSession<'p> {
    policy: &'p Policy,
    strategy: Strategy,
    eq: EquivalenceKind,
    an: Analysis<'p>,
    prop: Machine,
    /// Input in the analysis machine (property, possibly with the possible set).
    e: State,
    /// Output state in the property.
    q: State,
    /// Target set for insertion or suppression.
    keep: Vec<bool>,
    stationary: bool,
    input: Vec<Sym>,
    output: Vec<Sym>,
    held: Vec<Sym>,
    log: Vec<EditEvent>,
    aborted: bool,
    premature: bool,
    failure: Option<String>,
    diagnostics: Vec<String>,
}

impl<'p> EnforcerSession<'p> {
    pub fn new(policy: &'p Policy, strategy: Strategy, eq: EquivalenceKind) -> Result<Self> {
        Self::with_mode(policy, strategy, eq, false)
    }

    /// `stationary` only matters for insertion: nothing may be inserted
    /// before the current input action.
    pub fn with_mode(
        policy: &'p Policy,
        strategy: Strategy,
        eq: EquivalenceKind,
        stationary: bool,
    ) -> Result<Self> {
        if strategy.equivalence() != eq {
            return Err(Error::Incompatible {
                strategy: strategy.name().into(),
                eq: eq.name().into(),
            });
        }
        if !policy.is_reasonable() {
            return Err(Error::NotReasonable);
        }
        let an = match &policy.possible {
            Some(s) => Analysis::nonuniform(policy, &s.model),
            None => Analysis::uniform(policy),
        };
        let prop = policy.property.machine();
        let keep = match strategy {
            Strategy::Insert => insert_fixed_point(policy, stationary),
            Strategy::Suppress => suppress_fixed_point(policy),
            _ => prop.accept_finite.clone(),
        };
        let e = an.ext_machine().initial;
        let q = prop.initial;
        Ok(EnforcerSession {
            policy,
            strategy,
            eq,
            an,
            prop,
            e,
            q,
            keep,
            stationary,
            input: Vec::new(),
            output: Vec::new(),
            held: Vec::new(),
            log: Vec::new(),
            aborted: false,
            premature: false,
            failure: None,
            diagnostics: Vec::new(),
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted
    }

    /// Input consumed so far, including anything after an abort.
    pub fn input(&self) -> FiniteTrace {
        self.policy.alphabet().decode(&Trace::from(self.input.clone()))
    }

    /// Output so far (`σ_o`).
    pub fn output(&self) -> FiniteTrace {
        self.policy.alphabet().decode(&Trace::from(self.output.clone()))
    }

    /// Actions held back (`σ_s`).
    pub fn held(&self) -> FiniteTrace {
        self.policy.alphabet().decode(&Trace::from(self.held.clone()))
    }

    fn class(&self, a: Sym) -> Class {
        self.policy.lattice.class_at(a)
    }

    fn event(&self, kind: EventKind, a: Sym, from_held: bool) -> EditEvent {
        EditEvent {
            kind,
            action: Some(self.policy.alphabet().action(a).clone()),
            class: Some(self.class(a)),
            from_held,
        }
    }

    fn put(&mut self, kind: EventKind, a: Sym, out: &mut Vec<EditEvent>) {
        let ev = self.event(kind, a, false);
        if kind != EventKind::Hold && kind != EventKind::Abort {
            self.output.push(a);
            self.q = self.prop.step(self.q, a);
        }
        out.push(ev);
    }

    fn release_held(&mut self, out: &mut Vec<EditEvent>) {
        for a in std::mem::take(&mut self.held) {
            out.push(self.event(EventKind::Emit, a, true));
            self.output.push(a);
            self.q = self.prop.step(self.q, a);
        }
    }

    /// Under suppression an abort is as good as dropping the rest; otherwise
    /// it is premature when the input can still become valid.
    fn abort(&mut self, a: Sym, out: &mut Vec<EditEvent>) {
        if self.eq != EquivalenceKind::SubwordSuppress && *self.an.future(self.e) != Future::Dead {
            self.premature = true;
        }
        self.put(EventKind::Abort, a, out);
        self.aborted = true;
    }

    fn fail(&mut self, a: Sym, why: String, out: &mut Vec<EditEvent>) -> Result<()> {
        self.release_held(out);
        self.put(EventKind::Pass, a, out);
        self.failure = Some(why.clone());
        Err(Error::Compliance(why))
    }

    /// Feeds one input action. After an abort the action is recorded but
    /// has no effect.
    pub fn step(&mut self, action: &Action) -> Result<Vec<EditEvent>> {
        let a = self.policy.alphabet().sym(action)?;
        self.input.push(a);
        if self.aborted {
            self.diagnostics
                .push(format!("input {action} arrived after abort"));
            return Ok(Vec::new());
        }
        if let Some(why) = &self.failure {
            return Err(Error::Compliance(why.clone()));
        }
        self.e = self.an.ext_machine().step(self.e, a);
        let mut out = Vec::new();
        let r = match self.strategy {
            Strategy::Edit => self.step_edit(a, &mut out),
            Strategy::Truncate => self.step_truncate(a, &mut out),
            Strategy::Insert => self.step_insert(a, &mut out),
            Strategy::Suppress => self.step_suppress(a, &mut out),
        };
        self.log.extend(out.iter().cloned());
        r.map(|_| out)
    }

    fn step_edit(&mut self, a: Sym, out: &mut Vec<EditEvent>) -> Result<()> {
        let c = self.class(a);
        if c.can_suppress() {
            if let Some(tail) = self.an.insertable_tail(self.e).cloned() {
                match tail {
                    Execution::Finite(t) => {
                        self.release_held(out);
                        self.put(EventKind::Emit, a, out);
                        for x in t.iter() {
                            self.put(EventKind::Insert, *x, out);
                        }
                        self.put(EventKind::Abort, a, out);
                        self.aborted = true;
                    }
                    Execution::Infinite(l) => {
                        let l = self.policy.alphabet().decode(&Trace::from(
                            l.unroll(l.stem().len() + l.cycle().len()).into_items(),
                        ));
                        self.diagnostics
                            .push(format!("unique continuation is infinite ({l}...); aborting"));
                        self.put(EventKind::Abort, a, out);
                        self.aborted = true;
                    }
                }
                return Ok(());
            }
        }
        if self.an.valid_at(self.e) {
            self.release_held(out);
            self.put(EventKind::Emit, a, out);
        } else if c.can_suppress() && *self.an.future(self.e) == Future::Dead {
            self.put(EventKind::Abort, a, out);
            self.aborted = true;
        } else if c == Class::C {
            self.held.push(a);
            out.push(self.event(EventKind::Hold, a, false));
        } else if c == Class::D {
            self.abort(a, out);
        } else {
            let name = self.policy.alphabet().action(a).clone();
            return self.fail(a, format!("cannot hold back {name} (class {c})"), out);
        }
        Ok(())
    }

    fn step_truncate(&mut self, a: Sym, out: &mut Vec<EditEvent>) -> Result<()> {
        let c = self.class(a);
        if self.prop.accept_finite[self.prop.step(self.q, a)] {
            self.put(EventKind::Emit, a, out);
        } else if c.can_suppress() {
            self.abort(a, out);
        } else {
            let name = self.policy.alphabet().action(a).clone();
            return self.fail(a, format!("cannot truncate on {name} (class {c})"), out);
        }
        Ok(())
    }

    /// Shortest (then least) `w1 a w2` from the output state into the
    /// target set, with `w1`, `w2` insertable.
    fn corrective(&self, a: Sym) -> Option<(Vec<Sym>, Vec<Sym>)> {
        let m = &self.prop;
        let ins = |_: State, x: Sym| self.policy.lattice.class_at(x).can_insert();
        let keep = &self.keep;
        let after = |q1: State| m.shortest_path(m.step(q1, a), &|q| keep[q], &ins);
        let firsts: Vec<(State, Vec<Sym>)> = if self.stationary {
            vec![(self.q, Vec::new())]
        } else {
            (0..m.states())
                .filter_map(|q1| m.shortest_path(self.q, &|q| q == q1, &ins).map(|w| (q1, w)))
                .collect()
        };
        firsts
            .into_iter()
            .filter_map(|(q1, w1)| after(q1).map(|w2| (w1, w2)))
            .min_by(|(a1, b1), (a2, b2)| {
                (a1.len() + b1.len())
                    .cmp(&(a2.len() + b2.len()))
                    .then_with(|| {
                        let x: Vec<Sym> = a1.iter().chain([&a]).chain(b1).copied().collect();
                        let y: Vec<Sym> = a2.iter().chain([&a]).chain(b2).copied().collect();
                        x.cmp(&y)
                    })
            })
    }

    fn step_insert(&mut self, a: Sym, out: &mut Vec<EditEvent>) -> Result<()> {
        let c = self.class(a);
        if let Some((w1, w2)) = self.corrective(a) {
            for x in w1 {
                self.put(EventKind::Insert, x, out);
            }
            self.put(EventKind::Pass, a, out);
            for x in w2 {
                self.put(EventKind::Insert, x, out);
            }
        } else if self.prop.accept_finite[self.prop.step(self.q, a)] {
            self.put(EventKind::Pass, a, out);
        } else if c.can_suppress() {
            self.abort(a, out);
        } else {
            let name = self.policy.alphabet().action(a).clone();
            return self.fail(a, format!("no insertion repairs {name}"), out);
        }
        Ok(())
    }

    fn step_suppress(&mut self, a: Sym, out: &mut Vec<EditEvent>) -> Result<()> {
        let c = self.class(a);
        let next = self.prop.step(self.q, a);
        if self.keep[next] {
            self.put(EventKind::Emit, a, out);
        } else if c.can_suppress() {
            out.push(self.event(EventKind::Hold, a, false));
        } else if self.prop.accept_finite[next] {
            self.put(EventKind::Emit, a, out);
        } else {
            let name = self.policy.alphabet().action(a).clone();
            return self.fail(a, format!("cannot suppress {name} (class {c})"), out);
        }
        Ok(())
    }

    /// Ends the input. Held actions are discarded.
    pub fn finish(self) -> EnforcementResult {
        let alpha = self.policy.alphabet();
        let input = Trace::from(self.input.clone());
        let output = Trace::from(self.output.clone());
        let sound = self.policy.property.accepts_syms(&output);
        let transparent = !self.policy.property.accepts_syms(&input)
            || self.eq.relates(&input, &output);
        let compliant = self.failure.is_none() && audit(self.policy, &self.log);
        EnforcementResult {
            input: alpha.decode(&input),
            output: alpha.decode(&output),
            log: self.log,
            sound,
            transparent,
            compliant,
            aborted: self.aborted,
            premature: self.premature,
            failure: self.failure,
            diagnostics: self.diagnostics,
        }
    }
}

/// Runs a whole input through a fresh session. A compliance failure ends
/// the run and is reported in the result.
pub fn run(
    policy: &Policy,
    strategy: Strategy,
    eq: EquivalenceKind,
    input: &FiniteTrace,
) -> Result<EnforcementResult> {
    run_with(policy, strategy, eq, false, input)
}

pub fn run_with(
    policy: &Policy,
    strategy: Strategy,
    eq: EquivalenceKind,
    stationary: bool,
    input: &FiniteTrace,
) -> Result<EnforcementResult> {
    let mut s = EnforcerSession::with_mode(policy, strategy, eq, stationary)?;
    for a in input.iter() {
        match s.step(a) {
            Ok(_) => {}
            Err(Error::Compliance(_)) => {
                // record the rest of the input without acting on it
                for b in input.items()[s.input.len()..].iter() {
                    s.input.push(policy.alphabet().sym(b)?);
                }
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(s.finish())
}
