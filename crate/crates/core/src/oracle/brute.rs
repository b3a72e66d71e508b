//! The class definitions evaluated literally, with every quantifier
//! ranging over enumerated executions.

use std::collections::HashMap;

use super::enumerate::{finite_syms, lasso_syms};
use crate::classifier::{Bounds, Method, Verdict};
use crate::policy::{PropertyAutomaton, Sym};
use crate::trace::{Execution, Lasso, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    Safety,
    Liveness,
    Renewal,
}

struct Brute<'a> {
    p: &'a PropertyAutomaton,
    exts: Vec<Execution<Sym>>,
    memo: HashMap<usize, bool>,
}

impl<'a> Brute<'a> {
    fn new(p: &'a PropertyAutomaton, bounds: &Bounds) -> Self {
        let k = p.alphabet().len();
        let mut exts: Vec<Execution<Sym>> = finite_syms(k, bounds.max_finite_len)
            .into_iter()
            .map(Execution::Finite)
            .collect();
        if bounds.max_loop_len > 0 {
            exts.extend(
                lasso_syms(k, bounds.max_stem_len, bounds.max_loop_len)
                    .into_iter()
                    .map(Execution::Infinite),
            );
        }
        Brute {
            p,
            exts,
            memo: HashMap::new(),
        }
    }

    fn valid(&self, e: &Execution<Sym>) -> bool {
        match e {
            Execution::Finite(w) => self.p.accepts_syms(w),
            Execution::Infinite(l) => self
                .p
                .machine()
                .accepts_lasso_from(self.p.initial(), l),
        }
    }

    /// Some enumerated extension of `prefix` (including itself) is valid.
    /// Memoized on the residual, which the prefix's end state determines.
    fn extensible(&mut self, prefix: &Trace<Sym>) -> bool {
        let q = self.p.run_syms(self.p.initial(), prefix.items());
        if let Some(v) = self.memo.get(&q) {
            return *v;
        }
        let v = self
            .exts
            .iter()
            .any(|w| self.valid(&w.concat_onto(prefix)));
        self.memo.insert(q, v);
        v
    }

    fn prefixes(&self, e: &Execution<Sym>) -> Vec<Trace<Sym>> {
        let states = self.p.state_names().len();
        match e {
            Execution::Finite(w) => w.prefixes_upto(w.len()),
            Execution::Infinite(l) => {
                l.prefixes_upto(l.stem().len() + l.cycle().len() * (states + 1))
            }
        }
    }
}

fn samples(p: &PropertyAutomaton, bounds: &Bounds) -> Vec<Execution<Sym>> {
    let k = p.alphabet().len();
    let mut out: Vec<Execution<Sym>> = finite_syms(k, bounds.max_finite_len)
        .into_iter()
        .map(Execution::Finite)
        .collect();
    if bounds.max_loop_len > 0 {
        out.extend(
            lasso_syms(k, bounds.max_stem_len, bounds.max_loop_len)
                .into_iter()
                .map(Execution::Infinite),
        );
    }
    out
}

/// Positions of a lasso that lie in the periodic part of every run: past
/// `states` loop iterations, over another `states` iterations.
fn periodic_positions(l: &Lasso<Sym>, states: usize) -> std::ops::Range<usize> {
    let from = l.stem().len() + states * l.cycle().len();
    from..from + states * l.cycle().len()
}

/// Evaluates the chosen class definition over the bounded enumeration.
pub fn brute_class(p: &PropertyAutomaton, which: ClassKind, bounds: &Bounds) -> Verdict {
    let mut b = Brute::new(p, bounds);
    let fail = |e: Execution<Sym>| {
        Verdict::fails(Some(crate::classifier::decode(p.alphabet(), &e)), Method::Bounded)
    };
    for sigma in samples(p, bounds) {
        let ok = match which {
            ClassKind::Safety => {
                b.valid(&sigma) || b.prefixes(&sigma).iter().any(|pre| !b.extensible(pre))
            }
            ClassKind::Liveness => match &sigma {
                Execution::Finite(w) => b.extensible(w),
                Execution::Infinite(_) => true,
            },
            ClassKind::Renewal => match &sigma {
                Execution::Finite(_) => true,
                Execution::Infinite(l) => {
                    let states = p.state_names().len();
                    let inf_valid = periodic_positions(l, states)
                        .any(|i| p.accepts_syms(&l.unroll(i)));
                    b.valid(&sigma) == inf_valid
                }
            },
        };
        if !ok {
            return fail(sigma);
        }
    }
    Verdict::holds(Method::Bounded)
}
