//! The per-execution enforceability condition for syntactic equality, its
//! nonuniform variant, and the corner-case helpers built on unique valid
//! extensions.

use rayon::prelude::*;

use super::{decode, encode, Bounds, Method, Verdict};
use crate::error::Result;
use crate::oracle::enumerate::{finite_syms, lasso_syms};
use crate::policy::machine::{Extension, Machine, State};
use crate::policy::{Class, Policy, PropertyAutomaton, Sym};
use crate::trace::{Action, Execution, FiniteTrace, Trace};

/// What a prefix ending in a given state can still become.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Future {
    /// No valid continuation at all.
    Dead,
    /// Exactly one valid continuation.
    Unique(Extension<Sym>),
    Many,
}

/// Precomputed view of a policy (optionally restricted to a set of
/// possible executions) used to evaluate the enforceability condition on
/// individual executions.
#[derive(Clone)]
pub struct Analysis<'p> {
    policy: &'p Policy,
    prop: Machine,
    possible: Option<Machine>,
    /// `prop` or the product with `possible`; futures are computed here.
    ext: Machine,
    futures: Vec<Future>,
}

impl<'p> Analysis<'p> {
    pub fn uniform(policy: &'p Policy) -> Self {
        Self::build(policy, None)
    }

    pub fn nonuniform(policy: &'p Policy, possible: &PropertyAutomaton) -> Self {
        Self::build(policy, Some(possible))
    }

    fn build(policy: &'p Policy, possible: Option<&PropertyAutomaton>) -> Self {
        let prop = policy.property.machine();
        let possible = possible.map(|s| s.machine());
        let ext = match &possible {
            Some(s) => prop.product(s),
            None => prop.clone(),
        };
        let live = ext.live();
        let futures = (0..ext.states())
            .map(|q| {
                if !live[q] {
                    Future::Dead
                } else {
                    match ext.unique_valid_extension(q, &live) {
                        Some(e) => Future::Unique(e),
                        None => Future::Many,
                    }
                }
            })
            .collect();
        Analysis {
            policy,
            prop,
            possible,
            ext,
            futures,
        }
    }

    pub fn policy(&self) -> &Policy {
        self.policy
    }

    fn s_states(&self) -> usize {
        self.possible.as_ref().map_or(1, |s| s.states())
    }

    fn prop_state(&self, e: State) -> State {
        e / self.s_states()
    }

    pub(crate) fn valid_at(&self, e: State) -> bool {
        self.prop.accept_finite[self.prop_state(e)]
    }

    fn class(&self, a: Sym) -> Class {
        self.policy.lattice.class_at(a)
    }

    fn insertable(&self, tail: &Extension<Sym>) -> bool {
        let ok = |w: &Trace<Sym>| w.iter().all(|a| self.class(*a).can_insert());
        match tail {
            Execution::Finite(t) => ok(t),
            Execution::Infinite(l) => ok(l.stem()) && ok(l.cycle()),
        }
    }

    pub(crate) fn future(&self, e: State) -> &Future {
        &self.futures[e]
    }

    pub(crate) fn ext_machine(&self) -> &Machine {
        &self.ext
    }

    /// The prefix ending in ext-state `e` after letter `a` may be ended
    /// right here: by aborting, or by emitting its unique continuation.
    fn terminal(&self, a: Sym, e: State) -> bool {
        self.class(a).can_suppress()
            && match &self.futures[e] {
                Future::Dead => true,
                Future::Unique(t) => self.insertable(t),
                Future::Many => false,
            }
    }

    /// An invalid prefix ending in `a` must end in a controllable action so
    /// it can be held back. Prefixes outside the possible set get no pass:
    /// whatever is emitted there stays in the output of their extensions.
    fn holdable(&self, a: Sym, e: State) -> bool {
        self.valid_at(e) || self.class(a) == Class::C
    }

    /// The enforceability condition for one execution.
    pub fn holds(&self, sigma: &Execution<Sym>) -> bool {
        match sigma {
            Execution::Finite(w) => {
                if let Some(s) = &self.possible {
                    // executions outside the possible set are unconstrained
                    if !s.accepts_finite_from(s.initial, w.items()) {
                        return true;
                    }
                }
                let mut e = self.ext.initial;
                let mut held_ok = true;
                for a in w.iter() {
                    e = self.ext.step(e, *a);
                    if held_ok && self.terminal(*a, e) {
                        return true;
                    }
                    held_ok &= self.holdable(*a, e);
                    if !held_ok {
                        return false;
                    }
                }
                true
            }
            Execution::Infinite(l) => {
                if let Some(s) = &self.possible {
                    if !s.accepts_lasso_from(s.initial, l) {
                        return true;
                    }
                }
                let run = self.ext.lasso_run(self.ext.initial, l);
                let (len, _) = run.window();
                let mut held_ok = true;
                for i in 1..len {
                    let a = *l.at(i - 1);
                    let e = run.state_at(i);
                    if held_ok && self.terminal(a, e) {
                        return true;
                    }
                    held_ok &= self.holdable(a, e);
                }
                if !held_ok {
                    return false;
                }
                let inf_valid = run.inf_states().any(|e| self.valid_at(e));
                let valid = self.prop.accepts_lasso_from(self.prop.initial, l);
                valid == inf_valid
            }
        }
    }

    /// Valid, and some non-empty prefix ending in a suppressible action has
    /// this execution as its unique valid continuation, through insertable
    /// actions only.
    pub fn corner_case(&self, sigma: &Execution<Sym>) -> bool {
        let check = |a: Sym, e: State| {
            self.class(a).can_suppress()
                && matches!(&self.futures[e], Future::Unique(t) if self.insertable(t))
        };
        match sigma {
            Execution::Finite(w) => {
                if !self.prop.accepts_finite_from(self.prop.initial, w.items()) {
                    return false;
                }
                let mut e = self.ext.initial;
                w.iter().any(|a| {
                    e = self.ext.step(e, *a);
                    check(*a, e)
                })
            }
            Execution::Infinite(l) => {
                if !self.prop.accepts_lasso_from(self.prop.initial, l) {
                    return false;
                }
                let run = self.ext.lasso_run(self.ext.initial, l);
                let (len, _) = run.window();
                (1..len).any(|i| check(*l.at(i - 1), run.state_at(i)))
            }
        }
    }

    /// The unique valid continuation of the prefix in ext-state `e`, when
    /// it consists of insertable actions only.
    pub(crate) fn insertable_tail(&self, e: State) -> Option<&Extension<Sym>> {
        match &self.futures[e] {
            Future::Unique(t) if self.insertable(t) => Some(t),
            _ => None,
        }
    }

    pub(crate) fn state_after(&self, w: &[Sym]) -> State {
        self.ext.run(self.ext.initial, w)
    }

    /// First execution within `bounds` violating the condition; finite
    /// words first, then lassos.
    pub fn first_violation(&self, bounds: &Bounds) -> Option<Execution<Sym>> {
        let k = self.policy.alphabet().len();
        let fin = finite_syms(k, bounds.max_finite_len);
        if let Some(w) = fin
            .par_iter()
            .find_first(|w| !self.holds(&Execution::Finite((*w).clone())))
        {
            return Some(Execution::Finite(w.clone()));
        }
        if bounds.max_loop_len == 0 {
            return None;
        }
        let lassos = lasso_syms(k, bounds.max_stem_len, bounds.max_loop_len);
        lassos
            .par_iter()
            .find_first(|l| !self.holds(&Execution::Infinite((*l).clone())))
            .map(|l| Execution::Infinite(l.clone()))
    }

    /// First finite word of length at most `n` violating the condition.
    pub fn first_finite_violation(&self, n: usize) -> Option<Trace<Sym>> {
        finite_syms(self.policy.alphabet().len(), n)
            .into_par_iter()
            .find_first(|w| !self.holds(&Execution::Finite(w.clone())))
    }

    fn verdict(&self, bounds: &Bounds) -> Verdict {
        if !self.policy.is_reasonable() {
            return Verdict::fails(None, Method::Bounded)
                .with_note("policy is not reasonable: the empty execution is invalid");
        }
        match self.first_violation(bounds) {
            Some(w) => Verdict::fails(Some(decode(self.policy.alphabet(), &w)), Method::Bounded),
            None => Verdict::holds(Method::Bounded),
        }
    }
}

/// The enforceability condition for syntactic equality, evaluated on one
/// execution.
pub fn satisfies_condition(policy: &Policy, sigma: &Execution) -> Result<bool> {
    let w = encode(policy.alphabet(), sigma)?;
    Ok(Analysis::uniform(policy).holds(&w))
}

/// Bounded decision of enforceability under syntactic equality, assuming
/// every execution is possible.
pub fn is_enforceable_eq(policy: &Policy, bounds: &Bounds) -> Verdict {
    Analysis::uniform(policy).verdict(bounds)
}

/// As [`is_enforceable_eq`], with every quantified execution restricted
/// to those recognized by `possible`.
pub fn is_enforceable_eq_nonuniform(
    policy: &Policy,
    possible: &PropertyAutomaton,
    bounds: &Bounds,
) -> Verdict {
    Analysis::nonuniform(policy, possible).verdict(bounds)
}

pub fn corner_case_cc(policy: &Policy, sigma: &Execution) -> Result<bool> {
    let w = encode(policy.alphabet(), sigma)?;
    Ok(Analysis::uniform(policy).corner_case(&w))
}

/// The unique valid continuation of `tau` when it uses insertable actions
/// only. An empty tail means `tau` is valid and cannot be extended.
pub fn corner_tail(policy: &Policy, tau: &FiniteTrace) -> Result<Option<Execution>> {
    let w = policy.alphabet().encode(tau)?;
    let an = Analysis::uniform(policy);
    let e = an.state_after(w.items());
    Ok(an.insertable_tail(e).map(|t| decode(policy.alphabet(), t)))
}

/// `Some(a)` when every valid continuation of `tau` is one fixed word
/// `a;rest` whose remaining actions are all insertable.
pub fn gamma(policy: &Policy, tau: &FiniteTrace) -> Result<Option<Action>> {
    let w = policy.alphabet().encode(tau)?;
    let an = Analysis::uniform(policy);
    let e = an.state_after(w.items());
    let ins = |a: &Sym| policy.lattice.class_at(*a).can_insert();
    let first = match an.future(e) {
        Future::Unique(Execution::Finite(t)) if !t.is_empty() => {
            t.items()[1..].iter().all(ins).then(|| t.items()[0])
        }
        Future::Unique(Execution::Infinite(l)) => {
            let rest = l.stem().len() + l.cycle().len();
            (1..=rest).all(|i| ins(l.at(i))).then(|| *l.at(0))
        }
        _ => None,
    };
    Ok(first.map(|a| policy.alphabet().action(a).clone()))
}

/// Every enumerated lasso on which validity and "infinitely many valid
/// prefixes" disagree is handled by a corner case: valid ones are corner
/// cases themselves, invalid ones pass through a prefix that can be
/// terminated (no valid continuation, or a unique insertable one).
pub fn corner_closure(policy: &Policy, bounds: &Bounds) -> Verdict {
    let an = Analysis::uniform(policy);
    let m = &an.prop;
    let k = policy.alphabet().len();
    for l in lasso_syms(k, bounds.max_stem_len, bounds.max_loop_len) {
        let run = m.lasso_run(m.initial, &l);
        let inf_valid = run.inf_states().any(|q| m.accept_finite[q]);
        let valid = m.accepts_lasso_from(m.initial, &l);
        if valid == inf_valid {
            continue;
        }
        let sigma = Execution::Infinite(l.clone());
        let rescued = if valid {
            an.corner_case(&sigma)
        } else {
            let (len, _) = run.window();
            (1..len).any(|i| an.terminal(*l.at(i - 1), run.state_at(i)))
        };
        if !rescued {
            return Verdict::fails(Some(decode(policy.alphabet(), &sigma)), Method::Bounded);
        }
    }
    Verdict::holds(Method::Bounded)
}
