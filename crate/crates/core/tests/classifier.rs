use partial_enforce::classifier::*;
use partial_enforce::oracle::corpus::shipped_policy;
use partial_enforce::policy::{parse_policy, parse_model, Class, Policy};
use partial_enforce::trace::{parse_execution, parse_trace, Action};

fn pol(name: &str) -> Policy {
    shipped_policy(name).unwrap()
}

fn exec(s: &str) -> partial_enforce::trace::Execution {
    parse_execution(s).unwrap()
}

fn b() -> Bounds {
    Bounds::default()
}

/// Valid exactly on ε and "ab".
const EPS_AB: &str = "\
alphabet a b
lattice C: a b
states s0 s1 s2 sink
initial s0
accept-finite s0 s2
accept-infinite none
delta s0 a s1
delta s0 b sink
delta s1 a sink
delta s1 b s2
delta s2 a sink
delta s2 b sink
delta sink a sink
delta sink b sink
";

#[test]
fn safety_examples() {
    assert_eq!(is_safety(&pol("pnaa.pol").property).get(), Some(true));
    assert_eq!(is_safety(&pol("eventually_a.pol").property).get(), Some(false));
    assert_eq!(is_safety(&pol("all.pol").property).get(), Some(true));
}

#[test]
fn liveness_examples() {
    assert_eq!(is_liveness(&pol("eventually_a.pol").property).get(), Some(true));
    let v = is_liveness(&pol("pnaa.pol").property);
    assert_eq!(v.get(), Some(false));
    assert_eq!(v.witness, Some(exec("a a")));
    assert_eq!(is_liveness(&pol("all.pol").property).get(), Some(true));
}

#[test]
fn renewal_examples() {
    // buchi over exactly the valid finite states
    assert_eq!(is_renewal(&pol("pnaa.pol").property).get(), Some(true));
    assert_eq!(is_renewal(&pol("all.pol").property).get(), Some(true));
    // same structure as pnaa, co-buchi accepting the sink loop on "a"
    let text = pol_text("pnaa.pol").replace("accept-infinite buchi q0 q1", "accept-infinite cobuchi qsink");
    let p = parse_policy(&text).unwrap();
    let v = is_renewal(&p.property);
    assert_eq!(v.get(), Some(false));
    let w = v.witness.unwrap();
    assert!(p.property.evaluate(&w).unwrap());
    assert_eq!(w, exec("~ a"));
}

fn pol_text(name: &str) -> String {
    partial_enforce::oracle::corpus::SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap()
        .1
        .to_string()
}

#[test]
fn l_safety_examples() {
    let p = pol("pnaa.pol");
    assert_eq!(is_l_safety(&p.with_uniform(Class::C)).get(), Some(true));
    assert_eq!(is_l_safety(&p.with_uniform(Class::D)).get(), Some(true));
    let a_obs = p
        .lattice
        .promote(&Action::new("a").unwrap(), Class::C, Class::O)
        .unwrap();
    assert_eq!(is_l_safety(&p.with_lattice(a_obs)).get(), Some(false));
    assert_eq!(is_l_safety(&pol("all.pol")).get(), Some(true));
}

#[test]
fn l_renewal_examples() {
    assert_eq!(is_l_renewal(&pol("pnaa.pol").with_uniform(Class::C), &b()).get(), Some(true));
    // ends with b: invalid "a" followed by valid "ab"
    let p = pol("ends_b.pol");
    assert_eq!(is_l_renewal(&p.with_uniform(Class::D), &b()).get(), Some(false));
    assert_eq!(is_l_renewal(&p.with_uniform(Class::O), &b()).get(), Some(false));
    for c in Class::ALL {
        assert_eq!(is_l_renewal(&pol("all.pol").with_uniform(c), &b()).get(), Some(true));
    }
}

#[test]
fn corner_case_examples() {
    let p = parse_policy(EPS_AB).unwrap();
    assert!(corner_case_cc(&p, &exec("a b")).unwrap());
    assert!(!corner_case_cc(&p, &exec("a")).unwrap());
    let all = pol("all.pol");
    assert!(!corner_case_cc(&all, &exec("a b a")).unwrap());
    assert!(!corner_case_cc(&all, &exec("~ a")).unwrap());
}

#[test]
fn gamma_examples() {
    let p = parse_policy(EPS_AB).unwrap();
    assert_eq!(gamma(&p, &parse_trace("a").unwrap()).unwrap(), Some(Action::new("b").unwrap()));
    assert_eq!(gamma(&pol("all.pol"), &parse_trace("a b").unwrap()).unwrap(), None);
    assert_eq!(gamma(&p, &parse_trace("b").unwrap()).unwrap(), None);
    assert_eq!(
        corner_tail(&p, &parse_trace("a").unwrap()).unwrap(),
        Some(exec("b"))
    );
}

#[test]
fn condition_examples() {
    let p = pol("pnaa.pol").with_uniform(Class::D);
    for s in ["-", "a", "a b a", "a a", "a a b", "~ a b", "~ a"] {
        let sigma = exec(s);
        assert!(
            satisfies_condition(&p, &sigma).unwrap(),
            "safety under all-D should satisfy the condition on {s}"
        );
    }
    // ends_b is not a safety property: "a" cannot be aborted
    let e = pol("ends_b.pol").with_uniform(Class::D);
    assert!(!satisfies_condition(&e, &exec("a")).unwrap());
    let c = pol("ends_b.pol").with_uniform(Class::C);
    assert!(satisfies_condition(&c, &exec("a")).unwrap());
    // nothing but the inviolable property survives all-O
    let o = pol("pnaa.pol").with_uniform(Class::O);
    assert!(!satisfies_condition(&o, &exec("a a")).unwrap());
}

#[test]
fn enforceable_examples() {
    let pnaa = pol("pnaa.pol");
    assert_eq!(is_enforceable_eq(&pnaa.with_uniform(Class::D), &b()).get(), Some(true));
    let eps_aa = pol("eps_aa.pol");
    let a = Action::new("a").unwrap();
    let v = is_enforceable_eq(&eps_aa, &b());
    assert_eq!(v.get(), Some(true), "a in C");
    let a_d = eps_aa.lattice.promote(&a, Class::C, Class::D).unwrap();
    let v = is_enforceable_eq(&eps_aa.with_lattice(a_d), &b());
    assert_eq!(v.get(), Some(false));
    assert_eq!(v.witness, Some(exec("a")));
}

#[test]
fn nonuniform_examples() {
    let p = pol("eps_aa_possible.pol");
    let s = &p.possible.as_ref().unwrap().model;
    let uniform = p.without_possible();
    assert_eq!(is_enforceable_eq(&uniform, &b()).get(), Some(false));
    assert_eq!(is_enforceable_eq_nonuniform(&uniform, s, &b()).get(), Some(true));
    // the universal set changes nothing
    let everything = partial_enforce::policy::PropertyAutomaton::universal(p.alphabet().clone());
    for name in ["pnaa.pol", "ends_b.pol", "eps_aa.pol"] {
        let q = pol(name);
        for c in Class::ALL {
            let q = q.with_uniform(c);
            assert_eq!(
                is_enforceable_eq(&q, &b()).get(),
                is_enforceable_eq_nonuniform(&q, &everything, &b()).get()
            );
        }
    }
    // only the empty execution is possible
    let eps = parse_model(
        "alphabet a b\nstates e x\ninitial e\naccept-finite e\naccept-infinite none\n\
         delta e a x\ndelta e b x\ndelta x a x\ndelta x b x\n",
        p.alphabet(),
    )
    .unwrap();
    for name in ["pnaa.pol", "ends_b.pol", "eps_aa.pol", "eventually_a.pol"] {
        let q = pol(name).with_uniform(Class::O);
        assert_eq!(
            is_enforceable_eq_nonuniform(&q, &eps, &b()).get(),
            Some(q.is_reasonable())
        );
    }
}

#[test]
fn insert_examples() {
    let pnaa = pol("pnaa.pol").with_uniform(Class::I);
    assert_eq!(is_enforceable_insert(&pnaa, true, &b()).get(), Some(true));
    assert_eq!(is_enforceable_insert(&pnaa, false, &b()).get(), Some(true));
    let pos = pol("pos.pol");
    assert_eq!(is_enforceable_insert(&pos, false, &b()).get(), Some(true));
    assert_eq!(is_enforceable_insert(&pos, true, &b()).get(), Some(false));
    let ev = pol("eventually_a.pol").with_uniform(Class::D);
    assert_eq!(is_enforceable_insert(&ev, false, &b()).get(), Some(false));
    let mixed = pol("pnaa.pol");
    assert_eq!(is_enforceable_insert(&mixed, false, &b()).get(), None);
}

#[test]
fn insert_sub_automaton_is_renewal_liveness_subset() {
    let p = pol("pnaa.pol").with_uniform(Class::I);
    let sub = sub_automaton(&p, true).unwrap();
    assert_eq!(is_renewal(&sub).get(), Some(true));
    // live as far as an inserting monitor is concerned: after any kept
    // word and any next action, a short insertion gets back in
    let kept = |w: &partial_enforce::trace::FiniteTrace| sub.evaluate_finite(w).unwrap();
    for w in partial_enforce::oracle::enumerate_finite(p.alphabet(), 5) {
        if !kept(&w) {
            continue;
        }
        for a in p.alphabet().actions() {
            let wa = w.appended(a.clone());
            assert!(partial_enforce::oracle::enumerate_finite(p.alphabet(), 2)
                .iter()
                .any(|u| kept(&wa.concat(u))));
        }
    }
    for w in partial_enforce::oracle::enumerate_finite(p.alphabet(), 6) {
        if sub.evaluate_finite(&w).unwrap() {
            assert!(p.property.evaluate_finite(&w).unwrap());
        }
    }
    // "every a immediately followed by a non-a": "a" alone is not kept
    assert!(!sub.evaluate_finite(&parse_trace("a").unwrap()).unwrap());
    assert!(sub.evaluate_finite(&parse_trace("a b").unwrap()).unwrap());
}

#[test]
fn suppress_examples() {
    for name in ["pnaa.pol", "pos.pol", "ends_b.pol", "eps_aa.pol", "persist.pol", "all.pol"] {
        let p = pol(name).with_uniform(Class::D);
        assert_eq!(is_enforceable_suppress(&p, &b()).get(), Some(true), "{name}");
    }
    // no_send_after_read: read and other observable, send suppressible
    assert_eq!(is_enforceable_suppress(&pol("no_send_after_read.pol"), &b()).get(), Some(true));
    // pnaa with a observable: "a a" breaks it with no suppressible action between
    let pnaa = pol("pnaa.pol");
    let l = pnaa
        .lattice
        .promote(&Action::new("a").unwrap(), Class::C, Class::O)
        .unwrap()
        .promote(&Action::new("b").unwrap(), Class::D, Class::D)
        .unwrap();
    let v = is_enforceable_suppress(&pnaa.with_lattice(l), &b());
    assert_eq!(v.get(), Some(false));
    assert_eq!(v.witness, Some(exec("a a")));
    assert_eq!(is_enforceable_suppress(&pnaa, &b()).get(), None);
}

#[test]
fn ltl_examples() {
    let p = pol("pnaa.pol");
    assert!(ltl_check(&p, &exec("a b a b")).unwrap());
    assert!(ltl_check(&p, &exec("-")).unwrap());
}

