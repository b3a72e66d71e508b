use partial_enforce::classifier::{gamma, is_enforceable_eq, Bounds, EquivalenceKind};
use partial_enforce::enforcer::{audit, run, run_with, EnforcerSession, EventKind, Strategy};
use partial_enforce::oracle::corpus::{corpus, lattices, shipped_policy};
use partial_enforce::oracle::enumerate_finite;
use partial_enforce::policy::{Class, Policy};
use partial_enforce::trace::{parse_trace, Action, FiniteTrace};
use partial_enforce::Error;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn pol(name: &str) -> Policy {
    shipped_policy(name).unwrap()
}

fn tr(s: &str) -> FiniteTrace {
    parse_trace(s).unwrap()
}

fn act(s: &str) -> Action {
    Action::new(s).unwrap()
}

fn log(events: &[partial_enforce::enforcer::EditEvent]) -> Vec<String> {
    events.iter().map(|e| e.to_string()).collect()
}

#[test]
fn edit_holds_then_releases() {
    let p = pol("ends_b.pol");
    let mut s = EnforcerSession::new(&p, Strategy::Edit, EquivalenceKind::Syntactic).unwrap();
    assert_eq!(log(&s.step(&act("a")).unwrap()), ["HOLD a"]);
    assert_eq!(s.held(), tr("a"));
    assert_eq!(log(&s.step(&act("b")).unwrap()), ["EMIT a", "EMIT b"]);
    let r = s.finish();
    assert_eq!(r.output, tr("a b"));
    assert!(r.sound && r.transparent && r.compliant);
}

#[test]
fn edit_discards_held_at_finish() {
    let r = run(&pol("ends_b.pol"), Strategy::Edit, EquivalenceKind::Syntactic, &tr("a")).unwrap();
    assert_eq!(r.output, tr("-"));
    assert!(r.sound && r.ok());
}

#[test]
fn edit_is_transparent_on_valid_input() {
    let p = pol("pnaa.pol");
    let r = run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("a b a b b a")).unwrap();
    assert_eq!(r.output, tr("a b a b b a"));
    assert!(r.transparent);
}

#[test]
fn edit_emits_unique_tail() {
    // valid on ε and "ab" only, both actions controllable
    let text = "alphabet a b\nlattice C: a b\nstates s0 s1 s2 sink\ninitial s0\n\
                accept-finite s0 s2\naccept-infinite none\n\
                delta s0 a s1\ndelta s0 b sink\ndelta s1 a sink\ndelta s1 b s2\n\
                delta s2 a sink\ndelta s2 b sink\ndelta sink a sink\ndelta sink b sink\n";
    let p = partial_enforce::policy::parse_policy(text).unwrap();
    let r = run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("a a")).unwrap();
    assert_eq!(r.log_text(), "EMIT a\nINSERT b\nABORT on a\n");
    assert_eq!(r.output, tr("a b"));
    assert!(r.ok());
}

#[test]
fn insert_adds_filler() {
    let p = pol("pnaa.pol").with_uniform(Class::I);
    let r = run(&p, Strategy::Insert, EquivalenceKind::SubwordInsert, &tr("a a")).unwrap();
    assert_eq!(r.output, tr("a b a"));
    assert!(r.ok());
    let r = run_with(&p, Strategy::Insert, EquivalenceKind::SubwordInsert, true, &tr("a a")).unwrap();
    assert_eq!(r.output, tr("a b a b"));
    assert!(r.ok());
    let os = pol("pos.pol");
    let r = run(&os, Strategy::Insert, EquivalenceKind::SubwordInsert, &tr("write1 write2")).unwrap();
    assert_eq!(r.output, tr("open1 write1 open2 write2"));
    assert!(r.ok());
}

#[test]
fn suppress_drops() {
    let p = pol("pnaa.pol").with_uniform(Class::D);
    let mut s = EnforcerSession::new(&p, Strategy::Suppress, EquivalenceKind::SubwordSuppress).unwrap();
    s.step(&act("a")).unwrap();
    assert_eq!(s.output(), tr("a"));
    assert_eq!(log(&s.step(&act("a")).unwrap()), ["HOLD a"]);
    assert_eq!(s.output(), tr("a"));
    s.step(&act("b")).unwrap();
    let r = s.finish();
    assert_eq!(r.output, tr("a b"));
    assert!(r.ok());
}

#[test]
fn session_errors() {
    let p = pol("pnaa.pol");
    assert!(matches!(
        EnforcerSession::new(&p, Strategy::Insert, EquivalenceKind::Syntactic),
        Err(Error::Incompatible { .. })
    ));
    assert!(matches!(
        EnforcerSession::new(&pol("eventually_a.pol"), Strategy::Edit, EquivalenceKind::Syntactic),
        Err(Error::NotReasonable)
    ));
    assert!(matches!(
        run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("a zz")),
        Err(Error::UnknownAction(_))
    ));
    let r = run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("-")).unwrap();
    assert_eq!(r.output, tr("-"));
    assert!(r.sound);
}

#[test]
fn run_equals_manual_stepping() {
    let p = pol("pnaa.pol");
    let mut s = EnforcerSession::new(&p, Strategy::Edit, EquivalenceKind::Syntactic).unwrap();
    let mut events = Vec::new();
    for a in ["a", "b"] {
        events.extend(s.step(&act(a)).unwrap());
    }
    let manual = s.finish();
    let r = run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("a b")).unwrap();
    assert_eq!(manual.log, events);
    assert_eq!(r.log, manual.log);
    assert_eq!(r.output, manual.output);
}

#[test]
fn observable_violation_is_reported() {
    let p = pol("pnaa.pol").with_uniform(Class::O);
    let r = run(&p, Strategy::Edit, EquivalenceKind::Syntactic, &tr("a a b")).unwrap();
    assert!(!r.ok());
    assert!(r.failure.is_some());
    assert_eq!(r.input, tr("a a b"));
    let last = r.log.last().unwrap();
    assert_eq!(last.kind, EventKind::Pass);
}

/// Invariants on one EDIT run, stepping manually.
fn edit_invariants(p: &Policy, input: &FiniteTrace) {
    let mut s = EnforcerSession::new(p, Strategy::Edit, EquivalenceKind::Syntactic).unwrap();
    for a in input.iter() {
        let before = s.is_aborted();
        s.step(a).unwrap();
        // output is valid after every step
        assert!(p.property.evaluate_finite(&s.output()).unwrap(), "{input}");
        if !before && !s.is_aborted() {
            let prefix = s.input();
            if gamma(p, &prefix).unwrap().is_none() {
                assert_eq!(s.output().concat(&s.held()), prefix, "{input}");
            }
        }
    }
    let r = s.finish();
    assert!(audit(p, &r.log));
    assert!(r.ok(), "{input}: {:?}", r);
}

#[test]
fn edit_invariants_on_enforceable_pairs() {
    let b = Bounds::new(6, 2, 2);
    for (_, base) in corpus().policies {
        if base.possible.is_some() || !base.is_reasonable() {
            continue;
        }
        for l in lattices(&base) {
            let p = base.with_lattice(l);
            if is_enforceable_eq(&p, &b).get() != Some(true) {
                continue;
            }
            for w in enumerate_finite(p.alphabet(), 6) {
                edit_invariants(&p, &w);
            }
        }
    }
}

fn word(p: &Policy) -> impl proptest::strategy::Strategy<Value = FiniteTrace> {
    let acts = p.alphabet().actions().to_vec();
    proptest::collection::vec(proptest::sample::select(acts), 0..14).prop_map(FiniteTrace::from)
}

proptest! {
    #[test]
    fn insert_keeps_input(w in word(&pol("pos.pol"))) {
        let p = pol("pos.pol");
        let r = run(&p, Strategy::Insert, EquivalenceKind::SubwordInsert, &w).unwrap();
        prop_assert!(w.is_subword_of(&r.output));
        prop_assert!(r.ok());
    }

    #[test]
    fn suppress_keeps_subword(w in word(&pol("no_send_after_read.pol"))) {
        for c in [Class::D, Class::O] {
            let p = pol("no_send_after_read.pol");
            let p = if c == Class::D { p.with_uniform(Class::D) } else { p };
            let r = run(&p, Strategy::Suppress, EquivalenceKind::SubwordSuppress, &w).unwrap();
            prop_assert!(r.output.is_subword_of(&w));
            prop_assert!(r.sound);
        }
    }

    #[test]
    fn edit_output_stays_valid(w in word(&pol("pnaa.pol"))) {
        for c in [Class::C, Class::D] {
            edit_invariants(&pol("pnaa.pol").with_uniform(c), &w);
        }
    }
}
