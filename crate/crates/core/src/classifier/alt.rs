//! Enforceability when the monitor may insert actions (output must keep
//! every input action) or suppress them (output keeps a subsequence).

use super::{is_safety, Bounds, Method, Verdict};
use crate::policy::machine::{Machine, State};
use crate::policy::{Class, InfiniteMode, Policy, PropertyAutomaton, Sym};

/// States reachable from each state through insertable actions only
/// (including the state itself).
fn insert_closure(m: &Machine, ins: &dyn Fn(Sym) -> bool) -> Vec<Vec<bool>> {
    (0..m.states())
        .map(|q| m.reachable(q, &|_, a| ins(a)))
        .collect()
}

/// Greatest set `X` of valid states such that for every input action `a`
/// the monitor can insert a word `w1` (only when `stationary` is false),
/// let `a` through, then insert `w2`, and land in `X` again.
pub fn insert_fixed_point(policy: &Policy, stationary: bool) -> Vec<bool> {
    let m = policy.property.machine();
    let ins = |a: Sym| policy.lattice.class_at(a).can_insert();
    let close = insert_closure(&m, &ins);
    let mut x = m.accept_finite.clone();
    loop {
        let mut changed = false;
        for q in 0..m.states() {
            if !x[q] {
                continue;
            }
            let before: Vec<State> = if stationary {
                vec![q]
            } else {
                (0..m.states()).filter(|r| close[q][*r]).collect()
            };
            let ok = (0..m.letters).all(|a| {
                before.iter().any(|q1| {
                    let q2 = m.step(*q1, a);
                    (0..m.states()).any(|q3| close[q2][q3] && x[q3])
                })
            });
            if !ok {
                x[q] = false;
                changed = true;
            }
        }
        if !changed {
            return x;
        }
    }
}

/// Insertion enforceability. Decided for the all-suppressible lattice
/// (where it coincides with safety) and for the all-insertable lattice
/// (fixed point above); other lattices are left undecided.
pub fn is_enforceable_insert(policy: &Policy, stationary: bool, _bounds: &Bounds) -> Verdict {
    if !policy.is_reasonable() {
        return Verdict::fails(None, Method::Structural)
            .with_note("policy is not reasonable: the empty execution is invalid");
    }
    match policy.lattice.uniform_class() {
        Some(Class::D) => is_safety(&policy.property),
        Some(Class::I) => {
            let x = insert_fixed_point(policy, stationary);
            if x[policy.property.initial()] {
                Verdict::holds(Method::Structural)
            } else {
                Verdict::fails(None, Method::Structural)
                    .with_note("initial state is outside the insertion fixed point")
            }
        }
        _ => Verdict::undecided("insertion enforceability is only decided for all-D and all-I lattices"),
    }
}

/// The sub-property kept by an insertion enforcer: same transitions and
/// infinite acceptance, valid finite states restricted to the fixed point.
pub fn sub_automaton(policy: &Policy, stationary: bool) -> Option<PropertyAutomaton> {
    let x = insert_fixed_point(policy, stationary);
    let p = &policy.property;
    if !x[p.initial()] {
        return None;
    }
    let n = p.state_names().len();
    let delta = (0..n)
        .map(|q| (0..p.alphabet().len()).map(|a| p.step(q, a)).collect())
        .collect();
    PropertyAutomaton::new(
        p.alphabet().clone(),
        p.state_names().to_vec(),
        p.initial(),
        delta,
        x,
        match p.infinite_mode() {
            InfiniteMode::Buchi(f) => InfiniteMode::Buchi(f.clone()),
            InfiniteMode::CoBuchi(f) => InfiniteMode::CoBuchi(f.clone()),
            InfiniteMode::None => InfiniteMode::None,
            InfiniteMode::All => InfiniteMode::All,
        },
    )
    .ok()
}

/// Greatest set `Z` of valid states closed under every action the monitor
/// cannot suppress. Dropping suppressible actions keeps the state in `Z`.
pub fn suppress_fixed_point(policy: &Policy) -> Vec<bool> {
    let m = policy.property.machine();
    let forced = |a: Sym| !policy.lattice.class_at(a).can_suppress();
    let mut z = m.accept_finite.clone();
    loop {
        let mut changed = false;
        for q in 0..m.states() {
            if z[q] && (0..m.letters).any(|a| forced(a) && !z[m.step(q, a)]) {
                z[q] = false;
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Suppression enforceability. Decided for lattices made of observable and
/// suppressible actions only; every reasonable policy is enforceable when
/// all actions are suppressible.
pub fn is_enforceable_suppress(policy: &Policy, _bounds: &Bounds) -> Verdict {
    if !policy.is_reasonable() {
        return Verdict::fails(None, Method::Structural)
            .with_note("policy is not reasonable: the empty execution is invalid");
    }
    if !policy.lattice.only_classes(&[Class::O, Class::D]) {
        return Verdict::undecided(
            "suppression enforceability is only decided for lattices over O and D",
        );
    }
    let z = suppress_fixed_point(policy);
    if !z[policy.property.initial()] {
        let m = policy.property.machine();
        let forced = |_: State, a: Sym| policy.lattice.class_at(a) == Class::O;
        let w = m.shortest_path(m.initial, &|q| !z[q] && !m.accept_finite[q], &forced);
        let witness = w.map(|w| {
            crate::trace::Execution::Finite(policy.alphabet().decode(&w.into()))
        });
        return Verdict::fails(witness, Method::Structural);
    }
    // infinite runs over observable actions alone cannot be cut short
    let m = policy.property.machine();
    let forced = |_: State, a: Sym| policy.lattice.class_at(a) == Class::O;
    let reach = m.reachable(m.initial, &forced);
    let bad = m.rejecting_cycles(&reach, &[], &forced);
    match bad
        .iter()
        .find_map(|(scc, must)| m.lasso_into(m.initial, scc, must, &forced))
    {
        Some(l) => Verdict::fails(
            Some(super::decode(policy.alphabet(), &crate::trace::Execution::Infinite(l))),
            Method::Structural,
        ),
        None => Verdict::holds(Method::Structural),
    }
}
