//! The shipped policies and the (policy, lattice, equivalence) grid they
//! are checked on.

use crate::classifier::{Bounds, EquivalenceKind};
use crate::error::{Error, Result};
use crate::policy::{parse_policy_with, ActionLattice, Class, Policy};

/// Shipped policy files, by file name.
pub const SHIPPED: &[(&str, &str)] = &[
    ("pnaa.pol", include_str!("../../policies/pnaa.pol")),
    ("pos.pol", include_str!("../../policies/pos.pol")),
    ("eventually_a.pol", include_str!("../../policies/eventually_a.pol")),
    ("begins_a.pol", include_str!("../../policies/begins_a.pol")),
    ("ends_b.pol", include_str!("../../policies/ends_b.pol")),
    ("eps_aa.pol", include_str!("../../policies/eps_aa.pol")),
    ("no_send_after_read.pol", include_str!("../../policies/no_send_after_read.pol")),
    ("all.pol", include_str!("../../policies/all.pol")),
    ("eps_only.pol", include_str!("../../policies/eps_only.pol")),
    ("inf_b.pol", include_str!("../../policies/inf_b.pol")),
    ("persist.pol", include_str!("../../policies/persist.pol")),
    ("eps_aa_possible.pol", include_str!("../../policies/eps_aa_possible.pol")),
    ("no_aa.set", include_str!("../../policies/no_aa.set")),
];

fn shipped_text(name: &str) -> Result<String> {
    SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| Error::Io {
            path: name.to_string(),
            msg: "not a shipped file".into(),
        })
}

/// Parses one shipped policy; `possible` references resolve to other
/// shipped files.
pub fn shipped_policy(name: &str) -> Result<Policy> {
    parse_policy_with(&shipped_text(name)?, &shipped_text)
}

/// The four uniform lattices and six mixed ones. Mixed lattices single out
/// the first action.
pub fn lattices(policy: &Policy) -> Vec<ActionLattice> {
    let alphabet = policy.alphabet().clone();
    let mut out: Vec<ActionLattice> = Class::ALL
        .iter()
        .map(|c| ActionLattice::uniform(alphabet.clone(), *c))
        .collect();
    if alphabet.len() < 2 {
        return out;
    }
    let mixed = [
        (Class::C, Class::D),
        (Class::D, Class::C),
        (Class::O, Class::D),
        (Class::D, Class::O),
        (Class::I, Class::C),
        (Class::C, Class::O),
    ];
    for (first, rest) in mixed {
        let mut classes = vec![rest; alphabet.len()];
        classes[0] = first;
        out.push(ActionLattice::from_classes(alphabet.clone(), classes).expect("sized"));
    }
    out
}

/// One row of the grid.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub policy: Policy,
    pub eq: EquivalenceKind,
    /// Insertion only.
    pub stationary: bool,
}

impl CorpusEntry {
    pub fn eq_label(&self) -> String {
        if self.eq == EquivalenceKind::SubwordInsert && self.stationary {
            "insert/stationary".into()
        } else {
            self.eq.name().into()
        }
    }
}

pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub bounds: Bounds,
    pub policies: Vec<(String, Policy)>,
    /// Game positions remembered per entry before giving up.
    pub memo_cap: usize,
}

impl CorpusSpec {
    pub fn empty(bounds: Bounds) -> Self {
        CorpusSpec {
            bounds,
            policies: Vec::new(),
            memo_cap: DEFAULT_MEMO_CAP,
        }
    }

    pub fn largest_alphabet(&self) -> usize {
        self.policies
            .iter()
            .map(|(_, p)| p.alphabet().len())
            .max()
            .unwrap_or(0)
    }

    pub fn max_states(&self) -> usize {
        self.policies
            .iter()
            .map(|(_, p)| p.property.state_names().len())
            .max()
            .unwrap_or(0)
    }

    /// Every checked combination, in a fixed order: policies as listed,
    /// lattices as in [`lattices`], then syntactic, insert, suppress.
    pub fn entries(&self) -> Vec<CorpusEntry> {
        let mut out = Vec::new();
        for (name, base) in &self.policies {
            for lattice in lattices(base) {
                let policy = base.with_lattice(lattice.clone());
                let mut push = |eq, stationary| {
                    out.push(CorpusEntry {
                        name: name.clone(),
                        policy: policy.clone(),
                        eq,
                        stationary,
                    })
                };
                push(EquivalenceKind::Syntactic, false);
                match lattice.uniform_class() {
                    Some(Class::D) => push(EquivalenceKind::SubwordInsert, false),
                    Some(Class::I) => {
                        push(EquivalenceKind::SubwordInsert, true);
                        push(EquivalenceKind::SubwordInsert, false);
                    }
                    _ => {}
                }
                if lattice.only_classes(&[Class::O, Class::D]) {
                    push(EquivalenceKind::SubwordSuppress, false);
                }
            }
        }
        out
    }
}

/// The twelve shipped policies at default bounds.
pub fn corpus() -> CorpusSpec {
    let policies = SHIPPED
        .iter()
        .filter(|(n, _)| n.ends_with(".pol"))
        .map(|(n, _)| {
            let p = shipped_policy(n).expect("shipped policies parse");
            (n.trim_end_matches(".pol").to_string(), p)
        })
        .collect();
    CorpusSpec {
        bounds: Bounds::default(),
        policies,
        memo_cap: DEFAULT_MEMO_CAP,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let c = corpus();
        assert_eq!(c.policies.len(), 12);
        let s = c.policies.iter().find(|(n, _)| n == "eps_aa_possible").unwrap();
        assert!(s.1.possible.is_some());
        for (_, p) in &c.policies {
            let ls = lattices(p);
            assert_eq!(ls.len(), if p.alphabet().len() < 2 { 4 } else { 10 });
        }
        assert!(CorpusSpec::empty(Bounds::default()).entries().is_empty());
    }
}
