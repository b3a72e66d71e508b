//! Decision procedures for the property classes and for enforceability
//! under each equivalence.

mod alt;
mod classes;
mod ltl;
pub(crate) mod condition;

use std::fmt;

pub use alt::{
    insert_fixed_point, is_enforceable_insert, is_enforceable_suppress, suppress_fixed_point,
    sub_automaton,
};
pub use classes::{is_l_renewal, is_l_safety, is_liveness, is_renewal, is_safety};
pub use ltl::ltl_check;
pub use condition::{
    corner_case_cc, corner_closure, corner_tail, gamma, is_enforceable_eq,
    is_enforceable_eq_nonuniform, satisfies_condition, Analysis,
};

use crate::error::Result;
use crate::policy::{Alphabet, Sym};
use crate::trace::{Execution, Lasso, Trace};

/// Enumeration limits for bounded quantification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_finite_len: usize,
    pub max_stem_len: usize,
    pub max_loop_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_finite_len: 7,
            max_stem_len: 3,
            max_loop_len: 3,
        }
    }
}

impl Bounds {
    pub fn new(max_finite_len: usize, max_stem_len: usize, max_loop_len: usize) -> Self {
        Bounds {
            max_finite_len,
            max_stem_len,
            max_loop_len,
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            self.max_finite_len, self.max_stem_len, self.max_loop_len
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Structural,
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub decided: bool,
    pub value: bool,
    pub witness: Option<Execution>,
    pub method: Method,
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds(method: Method) -> Self {
        Verdict {
            decided: true,
            value: true,
            witness: None,
            method,
            note: None,
        }
    }

    pub fn fails(witness: Option<Execution>, method: Method) -> Self {
        Verdict {
            decided: true,
            value: false,
            witness,
            method,
            note: None,
        }
    }

    pub fn undecided(note: impl Into<String>) -> Self {
        Verdict {
            decided: false,
            value: false,
            witness: None,
            method: Method::Structural,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `Some(value)` when decided.
    pub fn get(&self) -> Option<bool> {
        self.decided.then_some(self.value)
    }

    /// `true`, `false` or `undecided`.
    pub fn label(&self) -> &'static str {
        match self.get() {
            Some(true) => "true",
            Some(false) => "false",
            None => "undecided",
        }
    }
}

/// How an enforcer's output must relate to a valid input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquivalenceKind {
    /// Output equals the input.
    Syntactic,
    /// Every input action is kept, in order; the monitor may add actions.
    SubwordInsert,
    /// The output keeps a subsequence of the input.
    SubwordSuppress,
}

impl EquivalenceKind {
    pub const ALL: [EquivalenceKind; 3] = [
        EquivalenceKind::Syntactic,
        EquivalenceKind::SubwordInsert,
        EquivalenceKind::SubwordSuppress,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "syntactic" => Some(EquivalenceKind::Syntactic),
            "insert" => Some(EquivalenceKind::SubwordInsert),
            "suppress" => Some(EquivalenceKind::SubwordSuppress),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EquivalenceKind::Syntactic => "syntactic",
            EquivalenceKind::SubwordInsert => "insert",
            EquivalenceKind::SubwordSuppress => "suppress",
        }
    }

    /// Whether `output` is an acceptable rendering of the valid `input`.
    pub fn relates<A: Clone + Eq>(self, input: &Trace<A>, output: &Trace<A>) -> bool {
        match self {
            EquivalenceKind::Syntactic => input == output,
            EquivalenceKind::SubwordInsert => input.is_subword_of(output),
            EquivalenceKind::SubwordSuppress => output.is_subword_of(input),
        }
    }
}

impl fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn encode(alphabet: &Alphabet, e: &Execution) -> Result<Execution<Sym>> {
    Ok(match e {
        Execution::Finite(t) => Execution::Finite(alphabet.encode(t)?),
        Execution::Infinite(l) => Execution::Infinite(Lasso::new(
            alphabet.encode(l.stem())?,
            alphabet.encode(l.cycle())?,
        )?),
    })
}

pub(crate) fn decode(alphabet: &Alphabet, e: &Execution<Sym>) -> Execution {
    match e {
        Execution::Finite(t) => Execution::Finite(alphabet.decode(t)),
        Execution::Infinite(l) => Execution::Infinite(
            Lasso::new(alphabet.decode(l.stem()), alphabet.decode(l.cycle()))
                .expect("non-empty loop"),
        ),
    }
}
