//! Exhaustive search over monitor strategies against an adversary feeding
//! inputs up to a fixed length. Independent of the classifier: it only
//! runs the automata and enumerates continuations.

use std::collections::HashMap;

use super::enumerate::{finite_syms, lasso_syms};
use crate::classifier::{Bounds, EquivalenceKind};
use crate::error::{Error, Result};
use crate::policy::machine::{Machine, State};
use crate::policy::{Class, Policy, Sym};
use crate::trace::{Execution, Trace};

#[derive(Clone, Debug)]
pub struct GameSpec {
    pub eq: EquivalenceKind,
    /// Insertion only: no insertion before the current input action.
    pub stationary: bool,
    /// Longest input the adversary may feed.
    pub horizon: usize,
    /// Continuations tried after the monitor terminates.
    pub continuations: Bounds,
    pub memo_cap: usize,
}

impl GameSpec {
    pub fn new(eq: EquivalenceKind, horizon: usize) -> Self {
        GameSpec {
            eq,
            stationary: false,
            horizon,
            continuations: Bounds::default(),
            memo_cap: super::corpus::DEFAULT_MEMO_CAP,
        }
    }
}

/// Game position. `pi`/`si`: input in the property and in the possible
/// set. `po`: output emitted so far. `pf`: output if the held actions were
/// released now.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    pi: State,
    si: State,
    po: State,
    pf: State,
    held: bool,
}

/// What the valid continuations of an input prefix look like.
#[derive(Clone, Debug)]
struct Tails {
    any_possible: bool,
    any_valid: bool,
    /// The single valid continuation, if there is exactly one.
    unique: Option<Execution<Sym>>,
}

struct Game<'a> {
    policy: &'a Policy,
    spec: &'a GameSpec,
    p: Machine,
    s: Option<Machine>,
    exts: Vec<Execution<Sym>>,
    ins_close: Vec<Vec<bool>>,
    tails: HashMap<(State, State), Tails>,
    memo: HashMap<(Node, usize), bool>,
}

impl<'a> Game<'a> {
    fn new(policy: &'a Policy, spec: &'a GameSpec) -> Self {
        let p = policy.property.machine();
        let s = policy.possible.as_ref().map(|s| s.model.machine());
        let k = policy.alphabet().len();
        let b = &spec.continuations;
        let mut exts: Vec<Execution<Sym>> = finite_syms(k, b.max_finite_len)
            .into_iter()
            .map(Execution::Finite)
            .collect();
        if b.max_loop_len > 0 {
            exts.extend(
                lasso_syms(k, b.max_stem_len, b.max_loop_len)
                    .into_iter()
                    .map(Execution::Infinite),
            );
        }
        let ins_close = (0..p.states())
            .map(|q| p.reachable(q, &|_, a| policy.lattice.class_at(a).can_insert()))
            .collect();
        Game {
            policy,
            spec,
            p,
            s,
            exts,
            ins_close,
            tails: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn class(&self, a: Sym) -> Class {
        self.policy.lattice.class_at(a)
    }

    fn s_init(&self) -> State {
        self.s.as_ref().map_or(0, |s| s.initial)
    }

    fn s_step(&self, q: State, a: Sym) -> State {
        self.s.as_ref().map_or(0, |s| s.step(q, a))
    }

    fn s_accepts_now(&self, q: State) -> bool {
        self.s.as_ref().is_none_or(|s| s.accept_finite[q])
    }

    fn accepts(m: &Machine, q: State, w: &Execution<Sym>) -> bool {
        match w {
            Execution::Finite(t) => m.accepts_finite_from(q, t.items()),
            Execution::Infinite(l) => m.accepts_lasso_from(q, l),
        }
    }

    fn tails(&mut self, pi: State, si: State) -> Tails {
        if let Some(t) = self.tails.get(&(pi, si)) {
            return t.clone();
        }
        let mut any_possible = false;
        let mut valid: Vec<&Execution<Sym>> = Vec::new();
        for w in &self.exts {
            let possible = self.s.as_ref().is_none_or(|s| Self::accepts(s, si, w));
            if !possible {
                continue;
            }
            any_possible = true;
            if Self::accepts(&self.p, pi, w) {
                valid.push(w);
            }
        }
        let unique = match valid.as_slice() {
            [one] => Some((*one).clone()),
            _ => None,
        };
        let t = Tails {
            any_possible,
            any_valid: !valid.is_empty(),
            unique,
        };
        self.tails.insert((pi, si), t.clone());
        t
    }

    /// The adversary may stop the input here.
    fn stop_ok(&self, n: &Node) -> bool {
        if !self.s_accepts_now(n.si) {
            return true;
        }
        if !self.p.accept_finite[n.po] {
            return false;
        }
        let transparent = match self.spec.eq {
            EquivalenceKind::Syntactic | EquivalenceKind::SubwordInsert => !n.held,
            EquivalenceKind::SubwordSuppress => true,
        };
        !self.p.accept_finite[n.pi] || transparent
    }

    /// Abort right after the input reached `(pi, si)`: the emitted output
    /// is final, so no possible continuation may be valid (unless the
    /// output only needs to be a subword of the input).
    fn abort_ok(&mut self, pi: State, si: State, po: State) -> bool {
        let t = self.tails(pi, si);
        if !t.any_possible {
            return true;
        }
        if !self.p.accept_finite[po] {
            return false;
        }
        match self.spec.eq {
            EquivalenceKind::SubwordSuppress => true,
            _ => !t.any_valid,
        }
    }

    /// Emit everything read so far and then the one valid continuation.
    fn corner_ok(&mut self, pi: State, si: State) -> bool {
        let t = self.tails(pi, si);
        if !t.any_possible {
            return true;
        }
        let ins = |w: &Trace<Sym>| w.iter().all(|a| self.class(*a).can_insert());
        match &t.unique {
            Some(Execution::Finite(w)) => ins(w),
            Some(Execution::Infinite(l)) => ins(l.stem()) && ins(l.cycle()),
            None => false,
        }
    }

    /// Successor positions after input action `a`; `Ok(true)` when some
    /// terminating move wins outright.
    fn moves(&mut self, n: Node, a: Sym) -> (bool, Vec<Node>) {
        let pi = self.p.step(n.pi, a);
        let si = self.s_step(n.si, a);
        let c = self.class(a);
        let mut next = Vec::new();
        let mut win = false;
        if c.can_suppress() {
            win |= self.abort_ok(pi, si, n.po);
        }
        match self.spec.eq {
            EquivalenceKind::Syntactic => {
                if !win && c.can_suppress() {
                    win |= self.corner_ok(pi, si);
                }
                next.push(Node { pi, si, po: pi, pf: pi, held: false });
                if c == Class::C {
                    next.push(Node { pi, si, po: n.po, pf: pi, held: true });
                }
            }
            EquivalenceKind::SubwordInsert => {
                let before: Vec<State> = if self.spec.stationary {
                    vec![n.pf]
                } else {
                    (0..self.p.states()).filter(|q| self.ins_close[n.pf][*q]).collect()
                };
                let mut outs = vec![false; self.p.states()];
                for q1 in before {
                    let q2 = self.p.step(q1, a);
                    for (q3, o) in outs.iter_mut().enumerate() {
                        *o |= self.ins_close[q2][q3];
                    }
                }
                for (q3, o) in outs.iter().enumerate() {
                    if *o {
                        next.push(Node { pi, si, po: q3, pf: q3, held: false });
                    }
                }
                if c == Class::C {
                    let pf = self.p.step(n.pf, a);
                    next.push(Node { pi, si, po: n.po, pf, held: true });
                }
            }
            EquivalenceKind::SubwordSuppress => {
                let out = self.p.step(n.pf, a);
                next.push(Node { pi, si, po: out, pf: out, held: false });
                if c.can_suppress() {
                    next.push(Node { pi, si, po: n.po, pf: n.pf, held: n.held });
                }
                if c == Class::C {
                    next.push(Node { pi, si, po: n.po, pf: out, held: true });
                }
            }
        }
        (win, next)
    }

    fn win(&mut self, n: Node, rem: usize) -> Result<bool> {
        if !self.stop_ok(&n) {
            return Ok(false);
        }
        if rem == 0 {
            return Ok(true);
        }
        if let Some(v) = self.memo.get(&(n, rem)) {
            return Ok(*v);
        }
        if self.memo.len() >= self.spec.memo_cap {
            return Err(Error::Budget(format!(
                "game memo exceeded {} positions",
                self.spec.memo_cap
            )));
        }
        let mut all = true;
        for a in 0..self.p.letters {
            let (won, next) = self.moves(n, a);
            let mut ok = won;
            for m in next {
                if ok {
                    break;
                }
                ok = self.win(m, rem - 1)?;
            }
            if !ok {
                all = false;
                break;
            }
        }
        self.memo.insert((n, rem), all);
        Ok(all)
    }
}

/// Whether some monitor wins against every input of length at most
/// `spec.horizon` (restricted to the policy's possible set, if any).
pub fn game_enforceable(policy: &Policy, spec: &GameSpec) -> Result<bool> {
    let mut g = Game::new(policy, spec);
    let q = g.p.initial;
    let start = Node {
        pi: q,
        si: g.s_init(),
        po: q,
        pf: q,
        held: false,
    };
    g.win(start, spec.horizon)
}
