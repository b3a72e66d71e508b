//! Sweep comparing the per-execution condition with the temporal formula.

use std::fmt;

use rayon::prelude::*;

use super::corpus::{lattices, CorpusSpec};
use super::enumerate::{enumerate_finite, enumerate_lassos};
use crate::classifier::{ltl_check, satisfies_condition};
use crate::error::Result;
use crate::policy::Policy;
use crate::trace::Execution;

/// All executions within the corpus bounds, finite words first, each group in
/// shortlex order.
pub fn executions(policy: &Policy, spec: &CorpusSpec) -> Vec<Execution> {
    let b = &spec.bounds;
    let mut out: Vec<Execution> = enumerate_finite(policy.alphabet(), b.max_finite_len)
        .into_iter()
        .map(Execution::Finite)
        .collect();
    out.extend(
        enumerate_lassos(policy.alphabet(), b.max_stem_len, b.max_loop_len)
            .into_iter()
            .map(Execution::Infinite),
    );
    out
}

/// Divergent executions for one policy and lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub policy: String,
    pub lattice: String,
    pub count: usize,
    /// First divergent execution in enumeration order.
    pub witness: Execution,
    pub condition: bool,
    pub formula: bool,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "policy={} lattice={} count={} condition={} formula={} witness={}",
            self.policy, self.lattice, self.count, self.condition, self.formula, self.witness
        )
    }
}

fn sweep_one(name: &str, p: &Policy, spec: &CorpusSpec) -> Result<Option<Divergence>> {
    let mut found: Option<Divergence> = None;
    for s in executions(p, spec) {
        let c = satisfies_condition(p, &s)?;
        let f = ltl_check(p, &s)?;
        if c == f {
            continue;
        }
        match &mut found {
            Some(d) => d.count += 1,
            None => {
                found = Some(Divergence {
                    policy: name.to_string(),
                    lattice: p.lattice.label(),
                    count: 1,
                    witness: s,
                    condition: c,
                    formula: f,
                })
            }
        }
    }
    Ok(found)
}

/// Compares the two evaluators on every corpus policy (possible-set
/// dropped), every corpus lattice and every bounded execution. One entry
/// per diverging pair, in corpus order.
pub fn ltl_divergences(spec: &CorpusSpec) -> Result<Vec<Divergence>> {
    let jobs: Vec<(String, Policy)> = spec
        .policies
        .iter()
        .flat_map(|(name, base)| {
            let base = base.without_possible();
            lattices(&base)
                .into_iter()
                .map(move |l| (name.clone(), base.with_lattice(l)))
                .collect::<Vec<_>>()
        })
        .collect();
    let found: Result<Vec<_>> = jobs
        .par_iter()
        .map(|(name, p)| sweep_one(name, p, spec))
        .collect();
    Ok(found?.into_iter().flatten().collect())
}
