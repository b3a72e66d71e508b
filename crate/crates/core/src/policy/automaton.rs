use std::collections::HashMap;
use std::sync::Arc;

use super::lattice::{Alphabet, Sym};
use super::machine::{Cond, Machine, State};
use crate::error::{Error, Result};
use crate::trace::{Execution, FiniteTrace, LassoWord, Lasso, Trace};

/// Acceptance of infinite runs, judged on the states visited infinitely
/// often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteMode {
    Buchi(Vec<State>),
    CoBuchi(Vec<State>),
    None,
    All,
}

/// Deterministic, total automaton defining finite and infinite validity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyAutomaton {
    alphabet: Arc<Alphabet>,
    states: Vec<String>,
    initial: State,
    delta: Vec<Vec<State>>,
    accept_finite: Vec<bool>,
    infinite: InfiniteMode,
}

impl PropertyAutomaton {
    /// `delta[q][a]` must be given for every state and letter.
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        initial: State,
        delta: Vec<Vec<State>>,
        accept_finite: Vec<bool>,
        infinite: InfiniteMode,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Validation("automaton has no states".into()));
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if seen.insert(s.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate state {s}")));
            }
        }
        if initial >= n {
            return Err(Error::Validation("initial state out of range".into()));
        }
        if delta.len() != n || accept_finite.len() != n {
            return Err(Error::Validation("delta is not total".into()));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() || row.iter().any(|r| *r >= n) {
                return Err(Error::Validation(format!(
                    "delta is not total at state {}",
                    states[q]
                )));
            }
        }
        if let InfiniteMode::Buchi(f) | InfiniteMode::CoBuchi(f) = &infinite {
            if f.iter().any(|q| *q >= n) {
                return Err(Error::Validation("acceptance set out of range".into()));
            }
        }
        Ok(PropertyAutomaton {
            alphabet,
            states,
            initial,
            delta,
            accept_finite,
            infinite,
        })
    }

    /// One-state automaton accepting every finite and infinite word.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        PropertyAutomaton {
            alphabet,
            states: vec!["all".into()],
            initial: 0,
            delta: vec![vec![0; k]],
            accept_finite: vec![true],
            infinite: InfiniteMode::All,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: State) -> &str {
        &self.states[q]
    }

    pub fn state_by_name(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn step(&self, q: State, a: Sym) -> State {
        self.delta[q][a]
    }

    pub fn accepts_finite_state(&self, q: State) -> bool {
        self.accept_finite[q]
    }

    pub fn infinite_mode(&self) -> &InfiniteMode {
        &self.infinite
    }

    pub fn is_reasonable(&self) -> bool {
        self.accept_finite[self.initial]
    }

    pub fn residual_state(&self, tau: &FiniteTrace) -> Result<State> {
        let w = self.alphabet.encode(tau)?;
        Ok(self.run_syms(self.initial, w.items()))
    }

    pub fn run_syms(&self, q: State, w: &[Sym]) -> State {
        w.iter().fold(q, |q, a| self.delta[q][*a])
    }

    pub fn evaluate_finite(&self, tau: &FiniteTrace) -> Result<bool> {
        Ok(self.accept_finite[self.residual_state(tau)?])
    }

    pub fn evaluate_infinite(&self, w: &LassoWord) -> Result<bool> {
        let stem = self.alphabet.encode(w.stem())?;
        let cycle = self.alphabet.encode(w.cycle())?;
        let l = Lasso::new(stem, cycle)?;
        Ok(self.machine().accepts_lasso_from(self.initial, &l))
    }

    pub fn evaluate(&self, e: &Execution) -> Result<bool> {
        match e {
            Execution::Finite(t) => self.evaluate_finite(t),
            Execution::Infinite(l) => self.evaluate_infinite(l),
        }
    }

    pub fn accepts_syms(&self, w: &Trace<Sym>) -> bool {
        self.accept_finite[self.run_syms(self.initial, w.items())]
    }

    /// The analysis view used by the decision procedures.
    pub fn machine(&self) -> Machine {
        let n = self.states.len();
        let set = |f: &[State]| {
            let mut v = vec![false; n];
            for q in f {
                v[*q] = true;
            }
            v
        };
        let cond = match &self.infinite {
            InfiniteMode::Buchi(f) => Cond::Buchi(set(f)),
            InfiniteMode::CoBuchi(f) => Cond::CoBuchi(set(f)),
            InfiniteMode::None => Cond::Never,
            InfiniteMode::All => Cond::Always,
        };
        Machine {
            letters: self.alphabet.len(),
            delta: self.delta.clone(),
            initial: self.initial,
            accept_finite: self.accept_finite.clone(),
            conds: vec![cond],
        }
    }
}
