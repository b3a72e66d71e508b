use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::trace::{Action, FiniteTrace, Trace};

/// Dense index of a letter within its [`Alphabet`].
pub type Sym = usize;

/// A finite, explicitly declared set of actions with a fixed order.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    actions: Vec<Action>,
    index: HashMap<Action, Sym>,
}

impl Alphabet {
    pub fn new(actions: Vec<Action>) -> Result<Self> {
        let mut index = HashMap::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate action {a}")));
            }
        }
        Ok(Alphabet { actions, index })
    }

    pub fn from_names(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(|n| Action::new(n)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, s: Sym) -> &Action {
        &self.actions[s]
    }

    pub fn sym(&self, a: &Action) -> Result<Sym> {
        self.index
            .get(a)
            .copied()
            .ok_or_else(|| Error::UnknownAction(a.name().to_string()))
    }

    pub fn sym_by_name(&self, name: &str) -> Result<Sym> {
        self.actions
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn encode(&self, t: &FiniteTrace) -> Result<Trace<Sym>> {
        t.iter().map(|a| self.sym(a)).collect::<Result<Vec<_>>>().map(Trace::from)
    }

    pub fn decode(&self, w: &Trace<Sym>) -> FiniteTrace {
        w.iter().map(|s| self.actions[*s].clone()).collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.actions).finish()
    }
}

/// Capability class of an action.
///
/// `O` observable only, `I` insertable, `D` suppressible, `C` both.
/// Ordered as the lattice O ⊑ I, O ⊑ D, I ⊑ C, D ⊑ C.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    O,
    I,
    D,
    C,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::O, Class::I, Class::D, Class::C];

    /// The covering edges of the capability lattice.
    pub const EDGES: [(Class, Class); 4] = [
        (Class::O, Class::I),
        (Class::O, Class::D),
        (Class::I, Class::C),
        (Class::D, Class::C),
    ];

    pub fn can_insert(self) -> bool {
        matches!(self, Class::I | Class::C)
    }

    pub fn can_suppress(self) -> bool {
        matches!(self, Class::D | Class::C)
    }

    pub fn parse(s: &str) -> Option<Class> {
        match s {
            "O" => Some(Class::O),
            "I" => Some(Class::I),
            "D" => Some(Class::D),
            "C" => Some(Class::C),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Class::O => "O",
            Class::I => "I",
            Class::D => "D",
            Class::C => "C",
        };
        f.write_str(s)
    }
}

/// Total assignment of alphabet actions to capability classes.
#[derive(Clone, PartialEq, Eq)]
pub struct ActionLattice {
    alphabet: Arc<Alphabet>,
    classes: Vec<Class>,
}

impl ActionLattice {
    pub fn uniform(alphabet: Arc<Alphabet>, class: Class) -> Self {
        let classes = vec![class; alphabet.len()];
        ActionLattice { alphabet, classes }
    }

    /// Builds a lattice from explicit per-symbol classes.
    pub fn from_classes(alphabet: Arc<Alphabet>, classes: Vec<Class>) -> Result<Self> {
        if classes.len() != alphabet.len() {
            return Err(Error::Validation(format!(
                "lattice assigns {} classes for {} actions",
                classes.len(),
                alphabet.len()
            )));
        }
        Ok(ActionLattice { alphabet, classes })
    }

    /// Builds a lattice from a partial map; every action must be covered.
    pub fn from_assignment(alphabet: Arc<Alphabet>, pairs: &[(Action, Class)]) -> Result<Self> {
        let mut classes: Vec<Option<Class>> = vec![None; alphabet.len()];
        for (a, c) in pairs {
            let s = alphabet.sym(a)?;
            if let Some(prev) = classes[s] {
                if prev != *c {
                    return Err(Error::Validation(format!(
                        "action {a} assigned to both {prev} and {c}"
                    )));
                }
            }
            classes[s] = Some(*c);
        }
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::Validation(format!(
                        "action {} has no lattice assignment",
                        alphabet.action(i)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ActionLattice { alphabet, classes })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn class_of(&self, a: &Action) -> Result<Class> {
        Ok(self.classes[self.alphabet.sym(a)?])
    }

    pub fn class_at(&self, s: Sym) -> Class {
        self.classes[s]
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    /// Moves `a` from `from` to `to`, leaving every other action in place.
    pub fn promote(&self, a: &Action, from: Class, to: Class) -> Result<ActionLattice> {
        let s = self.alphabet.sym(a)?;
        let actual = self.classes[s];
        if actual != from {
            return Err(Error::ClassMismatch {
                action: a.name().to_string(),
                expected: from,
                actual,
            });
        }
        let mut classes = self.classes.clone();
        classes[s] = to;
        Ok(ActionLattice {
            alphabet: self.alphabet.clone(),
            classes,
        })
    }

    pub fn members(&self, class: Class) -> Vec<&Action> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == class)
            .map(|(i, _)| self.alphabet.action(i))
            .collect()
    }

    /// `Some(c)` when every action is in class `c`.
    pub fn uniform_class(&self) -> Option<Class> {
        let first = *self.classes.first()?;
        self.classes.iter().all(|c| *c == first).then_some(first)
    }

    pub fn only_classes(&self, allowed: &[Class]) -> bool {
        self.classes.iter().all(|c| allowed.contains(c))
    }

    /// Short label: `all-D` for uniform lattices, else `a=C,b=D`.
    pub fn label(&self) -> String {
        match self.uniform_class() {
            Some(c) => format!("all-{c}"),
            None => self
                .classes
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{}={c}", self.alphabet.action(i)))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

impl fmt::Debug for ActionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `⟨O, I, D, C⟩` notation.
impl fmt::Display for ActionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |c: Class| {
            self.members(c)
                .iter()
                .map(|a| a.name().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "<{{{}}},{{{}}},{{{}}},{{{}}}>",
            part(Class::O),
            part(Class::I),
            part(Class::D),
            part(Class::C)
        )
    }
}
