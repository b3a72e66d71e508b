//! Policies: the alphabet with its capability lattice, the property
//! automaton, and an optional model of the possible executions.

mod automaton;
mod format;
mod lattice;
pub(crate) mod machine;

use std::sync::Arc;

pub use automaton::{InfiniteMode, PropertyAutomaton};
pub use format::{
    load_policy, parse_model, parse_policy, parse_policy_with, serialize_model, serialize_policy,
};
pub use lattice::{ActionLattice, Alphabet, Class, Sym};
pub use machine::{Extension, State};

/// The set of possible executions for nonuniform enforcement, with the path
/// it was loaded from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Possible {
    pub path: String,
    pub model: PropertyAutomaton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    pub lattice: ActionLattice,
    pub property: PropertyAutomaton,
    pub possible: Option<Possible>,
}

impl Policy {
    pub fn new(lattice: ActionLattice, property: PropertyAutomaton) -> Self {
        Policy {
            lattice,
            property,
            possible: None,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.property.alphabet()
    }

    pub fn is_reasonable(&self) -> bool {
        self.property.is_reasonable()
    }

    pub fn with_lattice(&self, lattice: ActionLattice) -> Policy {
        Policy {
            lattice,
            ..self.clone()
        }
    }

    pub fn with_uniform(&self, class: Class) -> Policy {
        self.with_lattice(ActionLattice::uniform(self.alphabet().clone(), class))
    }

    pub fn without_possible(&self) -> Policy {
        Policy {
            possible: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::trace::{parse_execution, parse_trace, Execution};

    pub(crate) const PNAA: &str = "\
alphabet a b
lattice C: a
lattice D: b
states q0 q1 qsink
initial q0
accept-finite q0 q1
accept-infinite buchi q0 q1
delta q0 a q1
delta q0 b q0
delta q1 a qsink
delta q1 b q0
delta qsink a qsink
delta qsink b qsink
";

    fn pnaa() -> Policy {
        parse_policy(PNAA).unwrap()
    }

    fn fin(s: &str) -> bool {
        pnaa().property.evaluate_finite(&parse_trace(s).unwrap()).unwrap()
    }

    #[test]
    fn finite_evaluation() {
        assert!(fin("a b a"));
        assert!(!fin("b a a"));
        assert!(fin("-"));
        let bad = parse_trace("a z").unwrap();
        assert!(matches!(
            pnaa().property.evaluate_finite(&bad),
            Err(Error::UnknownAction(_))
        ));
    }

    #[test]
    fn infinite_evaluation() {
        let p = pnaa().property;
        let ev = |s: &str| match parse_execution(s).unwrap() {
            Execution::Infinite(l) => p.evaluate_infinite(&l).unwrap(),
            Execution::Finite(_) => unreachable!(),
        };
        assert!(ev("~ a b"));
        assert!(!ev("~ a"));
        assert!(!ev("a a b ~ b"));
        assert!(ev("a b a ~ b a"));
    }

    #[test]
    fn residuals() {
        let p = pnaa().property;
        let r = |s: &str| p.state_name(p.residual_state(&parse_trace(s).unwrap()).unwrap());
        assert_eq!(r("-"), "q0");
        assert_eq!(r("a"), "q1");
        assert_eq!(r("a a"), "qsink");
        assert!(p.is_reasonable());
    }

    #[test]
    fn round_trip() {
        let p = pnaa();
        assert_eq!(serialize_policy(&p), PNAA);
        assert_eq!(parse_policy(&serialize_policy(&p)).unwrap(), p);
    }

    #[test]
    fn parse_errors() {
        let missing = PNAA.replace("lattice D: b\n", "");
        assert!(matches!(parse_policy(&missing), Err(Error::Validation(_))));
        let dup = format!("{PNAA}delta q0 a q0\n");
        assert!(matches!(
            parse_policy(&dup),
            Err(Error::Parse { line: 14, .. })
        ));
        let partial = PNAA.replace("delta qsink b qsink\n", "");
        assert!(matches!(parse_policy(&partial), Err(Error::Validation(_))));
        let dup_state = PNAA.replace("states q0 q1 qsink", "states q0 q1 q1");
        assert!(parse_policy(&dup_state).is_err());
        let comment = PNAA.replace("initial q0", "initial q0   # start");
        assert_eq!(parse_policy(&comment).unwrap(), pnaa());
    }

    #[test]
    fn possible_set_is_resolved() {
        let text = format!("{PNAA}possible s.pol\n");
        let s_text = "alphabet a b\nstates s\ninitial s\naccept-finite s\naccept-infinite all\ndelta s a s\ndelta s b s\n";
        let p = parse_policy_with(&text, &|path| {
            assert_eq!(path, "s.pol");
            Ok(s_text.to_string())
        })
        .unwrap();
        assert_eq!(p.possible.as_ref().unwrap().model.state_names(), ["s"]);
        assert_eq!(serialize_policy(&p), text);
        assert_eq!(serialize_model(&p.possible.unwrap().model), s_text);
    }
}
