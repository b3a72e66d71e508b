//! The temporal characterization, evaluated over the sequence of prefixes
//! of an execution:
//!
//! `G (C W valid) ∨ (C W valid ∨ X ((D ∨ C) ∧ (G ¬valid ∨ cc)))`
//!
//! Position `i` stands for the prefix of length `i`. Finite executions end
//! at position `|σ|`; lassos are evaluated on the eventually periodic
//! predicate sequence. `X` is strong, `W` and `G` are weak at the end of a
//! finite sequence.

use super::encode;
use super::condition::{Analysis, Future};
use crate::error::Result;
use crate::policy::{Class, Policy, Sym};
use crate::trace::Execution;

/// Positions `0..len`; after `len - 1` comes `back` (periodic) or nothing.
struct Timeline {
    len: usize,
    back: Option<usize>,
}

impl Timeline {
    fn next(&self, i: usize) -> Option<usize> {
        if i + 1 < self.len {
            Some(i + 1)
        } else {
            self.back
        }
    }

    fn not(&self, p: &[bool]) -> Vec<bool> {
        p.iter().map(|x| !x).collect()
    }

    fn and(&self, p: &[bool], q: &[bool]) -> Vec<bool> {
        p.iter().zip(q).map(|(a, b)| *a && *b).collect()
    }

    fn or(&self, p: &[bool], q: &[bool]) -> Vec<bool> {
        p.iter().zip(q).map(|(a, b)| *a || *b).collect()
    }

    fn next_op(&self, p: &[bool]) -> Vec<bool> {
        (0..self.len).map(|i| self.next(i).is_some_and(|j| p[j])).collect()
    }

    /// Greatest solution of `x[i] = now[i] ∨ (keep[i] ∧ x[next(i)])`, with
    /// `x[end] = true` on finite sequences.
    fn gfp(&self, now: &[bool], keep: &[bool]) -> Vec<bool> {
        let mut x = vec![true; self.len];
        loop {
            let mut changed = false;
            for i in (0..self.len).rev() {
                let after = self.next(i).is_none_or(|j| x[j]);
                let v = now[i] || (keep[i] && after);
                if v != x[i] {
                    x[i] = v;
                    changed = true;
                }
            }
            if !changed {
                return x;
            }
        }
    }

    fn weak_until(&self, p: &[bool], q: &[bool]) -> Vec<bool> {
        self.gfp(q, p)
    }

    fn globally(&self, p: &[bool]) -> Vec<bool> {
        self.gfp(&vec![false; self.len], p)
    }
}

struct Atoms {
    valid: Vec<bool>,
    c: Vec<bool>,
    d: Vec<bool>,
    cc: Vec<bool>,
}

fn atoms(an: &Analysis<'_>, len: usize, state: &dyn Fn(usize) -> usize, letter: &dyn Fn(usize) -> Sym) -> Atoms {
    let m = an.ext_machine();
    let lattice = &an.policy().lattice;
    let valid: Vec<bool> = (0..len).map(|i| m.accept_finite[state(i)]).collect();
    let class = |i: usize, c: Class| i > 0 && lattice.class_at(letter(i - 1)) == c;
    let c: Vec<bool> = (0..len).map(|i| class(i, Class::C)).collect();
    let d: Vec<bool> = (0..len).map(|i| class(i, Class::D)).collect();
    // cc(i): valid, and some earlier non-empty prefix j ending in D∪C has the
    // length-i prefix as its unique valid continuation
    let cc = (0..len)
        .map(|i| {
            valid[i]
                && (1..=i).any(|j| {
                    lattice.class_at(letter(j - 1)).can_suppress()
                        && matches!(
                            an.future(state(j)),
                            Future::Unique(Execution::Finite(t)) if j + t.len() == i
                        )
                        && an.insertable_tail(state(j)).is_some()
                })
        })
        .collect();
    Atoms { valid, c, d, cc }
}

fn formula(t: &Timeline, a: &Atoms) -> bool {
    let c_w_valid = t.weak_until(&a.c, &a.valid);
    let first = t.globally(&c_w_valid);
    let never_valid = t.globally(&t.not(&a.valid));
    let term = t.and(&t.or(&a.d, &a.c), &t.or(&never_valid, &a.cc));
    let second = t.or(&c_w_valid, &t.next_op(&term));
    first[0] || second[0]
}

pub(crate) fn ltl_holds(an: &Analysis<'_>, sigma: &Execution<Sym>) -> bool {
    let m = an.ext_machine();
    match sigma {
        Execution::Finite(w) => {
            let mut states = vec![m.initial];
            for a in w.iter() {
                states.push(m.step(*states.last().expect("non-empty"), *a));
            }
            let t = Timeline {
                len: w.len() + 1,
                back: None,
            };
            let at = atoms(an, t.len, &|i| states[i], &|i| w.items()[i]);
            formula(&t, &at)
        }
        Execution::Infinite(l) => {
            let run = m.lasso_run(m.initial, l);
            // cc looks back at most one state-count of positions
            let settle = run.start + m.states() + 1;
            let t = Timeline {
                len: settle + run.period,
                back: Some(settle),
            };
            let at = atoms(an, t.len, &|i| run.state_at(i), &|i| *l.at(i));
            formula(&t, &at)
        }
    }
}

/// Evaluates the temporal characterization on one execution.
pub fn ltl_check(policy: &Policy, sigma: &Execution) -> Result<bool> {
    let w = encode(policy.alphabet(), sigma)?;
    Ok(ltl_holds(&Analysis::uniform(policy), &w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_until_finite_and_periodic() {
        let fin = Timeline { len: 3, back: None };
        assert_eq!(fin.weak_until(&[true, true, true], &[false; 3]), [true; 3]);
        assert_eq!(
            fin.weak_until(&[true, false, false], &[false; 3]),
            [false, false, false]
        );
        let per = Timeline {
            len: 3,
            back: Some(1),
        };
        assert_eq!(per.globally(&[false, true, true]), [false, true, true]);
        assert_eq!(per.next_op(&[true, false, false]), [false, false, false]);
        assert_eq!(fin.next_op(&[false, false, true]), [false, true, false]);
    }
}
