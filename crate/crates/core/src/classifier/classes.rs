use super::{decode, Bounds, Method, Verdict};
use crate::oracle::enumerate::{finite_syms, lasso_syms};
use crate::policy::machine::{Machine, State};
use crate::policy::{Class, Policy, PropertyAutomaton, Sym};
use crate::trace::{Execution, Lasso, Trace};

fn all_edges(_: State, _: Sym) -> bool {
    true
}

fn finite_witness(p: &PropertyAutomaton, w: Vec<Sym>) -> Option<Execution> {
    Some(decode(p.alphabet(), &Execution::Finite(Trace::from(w))))
}

fn lasso_witness(p: &PropertyAutomaton, l: Lasso<Sym>) -> Option<Execution> {
    Some(decode(p.alphabet(), &Execution::Infinite(l)))
}

/// First cycle witness among `cycles`, as a lasso from the initial state.
fn first_lasso(
    p: &PropertyAutomaton,
    m: &Machine,
    cycles: &[(Vec<State>, Vec<Vec<bool>>)],
    edge_ok: &dyn Fn(State, Sym) -> bool,
) -> Option<Option<Execution>> {
    cycles.iter().find_map(|(scc, must)| {
        m.lasso_into(m.initial, scc, must, edge_ok)
            .map(|l| lasso_witness(p, l))
    })
}

/// Violations are irremediable: every invalid finite word and every
/// rejected lasso passes through a state with no valid continuation.
pub fn is_safety(p: &PropertyAutomaton) -> Verdict {
    let m = p.machine();
    let live = m.live();
    let reach = m.reachable(m.initial, &all_edges);
    if let Some(w) = m.shortest_path(m.initial, &|q| !m.accept_finite[q] && live[q], &all_edges) {
        return Verdict::fails(finite_witness(p, w), Method::Structural);
    }
    let region: Vec<bool> = (0..m.states()).map(|q| reach[q] && live[q]).collect();
    let bad = m.rejecting_cycles(&region, &[], &all_edges);
    match first_lasso(p, &m, &bad, &all_edges) {
        Some(w) => Verdict::fails(w, Method::Structural),
        None => Verdict::holds(Method::Structural),
    }
}

/// Every reachable state can still be continued into a valid execution.
pub fn is_liveness(p: &PropertyAutomaton) -> Verdict {
    let m = p.machine();
    let live = m.live();
    match m.shortest_path(m.initial, &|q| !live[q], &all_edges) {
        Some(w) => Verdict::fails(finite_witness(p, w), Method::Structural),
        None => Verdict::holds(Method::Structural),
    }
}

/// Infinite executions are valid exactly when they have infinitely many
/// valid prefixes. Finite behaviour is unconstrained.
pub fn is_renewal(p: &PropertyAutomaton) -> Verdict {
    let m = p.machine();
    let reach = m.reachable(m.initial, &all_edges);
    let no_af: Vec<bool> = (0..m.states())
        .map(|q| reach[q] && !m.accept_finite[q])
        .collect();
    let mut cycles = m.accepting_cycles(&no_af, &[], &all_edges);
    cycles.extend(m.rejecting_cycles(&reach, std::slice::from_ref(&m.accept_finite), &all_edges));
    match first_lasso(p, &m, &cycles, &all_edges) {
        Some(w) => Verdict::fails(w, Method::Structural),
        None => Verdict::holds(Method::Structural),
    }
}

/// Every invalid execution can be aborted on a suppressible action right
/// after a valid prefix, at a point from which nothing valid is reachable.
pub fn is_l_safety(policy: &Policy) -> Verdict {
    let p = &policy.property;
    let m = p.machine();
    let live = m.live();
    let abort_edge = |q: State, a: Sym| {
        m.accept_finite[q] && policy.lattice.class_at(a).can_suppress() && !live[m.delta[q][a]]
    };
    let keep = |q: State, a: Sym| !abort_edge(q, a);
    if let Some(w) = m.shortest_path(m.initial, &|q| !m.accept_finite[q], &keep) {
        return Verdict::fails(finite_witness(p, w), Method::Structural);
    }
    let reach = m.reachable(m.initial, &keep);
    let bad = m.rejecting_cycles(&reach, &[], &keep);
    match first_lasso(p, &m, &bad, &keep) {
        Some(w) => Verdict::fails(w, Method::Structural),
        None => Verdict::holds(Method::Structural),
    }
}

/// Along a finite word: every prefix reaches a valid prefix (itself or a
/// later one) through invalid prefixes that all end on a controllable
/// action.
fn renewal_rhs_finite(valid: &[bool], ctrl: &[bool]) -> bool {
    // valid[i], ctrl[i] for positions 0..=n; ctrl[0] is unused
    let n = valid.len() - 1;
    let mut ok = valid[n];
    if !ok {
        return false;
    }
    for i in (0..n).rev() {
        ok = valid[i] || (ctrl[i] && ok);
        if !ok {
            return false;
        }
    }
    true
}

/// Same as [`renewal_rhs_finite`] over an ultimately periodic sequence
/// whose positions `len..` repeat `start..len`.
pub(crate) fn renewal_rhs_periodic(valid: &[bool], ctrl: &[bool], start: usize) -> bool {
    let len = valid.len();
    let next = |i: usize| if i + 1 == len { start } else { i + 1 };
    let mut ok = vec![false; len];
    let mut changed = true;
    while changed {
        changed = false;
        for i in (0..len).rev() {
            let v = valid[i] || (ctrl[i] && ok[next(i)]);
            if v && !ok[i] {
                ok[i] = true;
                changed = true;
            }
        }
    }
    ok.iter().all(|x| *x)
}

/// Bounded check of the controllable-renewal biconditional over every
/// enumerated finite word and lasso.
pub fn is_l_renewal(policy: &Policy, bounds: &Bounds) -> Verdict {
    let p = &policy.property;
    let m = p.machine();
    let ctrl = |a: Sym| policy.lattice.class_at(a) == Class::C;
    let k = p.alphabet().len();
    for w in finite_syms(k, bounds.max_finite_len) {
        let mut q = m.initial;
        let mut valid = vec![m.accept_finite[q]];
        let mut c = vec![true];
        for a in w.iter() {
            q = m.step(q, *a);
            valid.push(m.accept_finite[q]);
            c.push(ctrl(*a));
        }
        if valid[w.len()] != renewal_rhs_finite(&valid, &c) {
            return Verdict::fails(finite_witness(p, w.into_items()), Method::Bounded);
        }
    }
    if bounds.max_loop_len > 0 {
        for l in lasso_syms(k, bounds.max_stem_len, bounds.max_loop_len) {
            let run = m.lasso_run(m.initial, &l);
            let (len, back) = run.window();
            let valid: Vec<bool> = (0..len).map(|i| m.accept_finite[run.state_at(i)]).collect();
            let c: Vec<bool> = (0..len).map(|i| i == 0 || ctrl(*l.at(i - 1))).collect();
            let lhs = m.accepts_lasso_from(m.initial, &l);
            if lhs != renewal_rhs_periodic(&valid, &c, back) {
                return Verdict::fails(lasso_witness(p, l), Method::Bounded);
            }
        }
    }
    Verdict::holds(Method::Bounded)
}
