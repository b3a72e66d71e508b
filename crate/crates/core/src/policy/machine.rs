//! Deterministic total automata over letter indices with a conjunction of
//! Büchi/co-Büchi conditions, and the graph analyses the decision
//! procedures are built on: co-reachability of validity, accepting and
//! rejecting cycles, and unique valid extensions.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use super::lattice::Sym;
use crate::trace::{Execution, Lasso, Trace};

pub type State = usize;

/// One infinite-acceptance conjunct, evaluated on the set of states visited
/// infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Buchi(Vec<bool>),
    CoBuchi(Vec<bool>),
    Never,
    Always,
}

#[derive(Clone, Debug)]
pub struct Machine {
    pub(crate) letters: usize,
    pub(crate) delta: Vec<Vec<State>>,
    pub(crate) initial: State,
    pub(crate) accept_finite: Vec<bool>,
    pub(crate) conds: Vec<Cond>,
}

/// The run of a lasso: `states[i]` is the state after the length-`i`
/// prefix; from position `start` the (state, loop phase) pairs repeat with
/// period `period`.
#[derive(Clone, Debug)]
pub struct LassoRun {
    pub states: Vec<State>,
    pub start: usize,
    pub period: usize,
}

impl LassoRun {
    /// States visited infinitely often.
    pub fn inf_states(&self) -> impl Iterator<Item = State> + '_ {
        self.states[self.start..self.start + self.period].iter().copied()
    }

    /// State after the length-`i` prefix, for any `i`.
    pub fn state_at(&self, i: usize) -> State {
        self.states[self.fold(i)]
    }

    /// `(len, back)`: positions `0..len` where position `len` behaves like
    /// `back`, for both the state and the letter read just before it.
    pub fn window(&self) -> (usize, usize) {
        (self.start + self.period + 1, self.start + 1)
    }

    /// Maps a position onto the stored window `0..start+period`.
    pub fn fold(&self, i: usize) -> usize {
        if i < self.start + self.period {
            i
        } else {
            self.start + (i - self.start) % self.period
        }
    }
}

/// A unique valid continuation.
pub type Extension<A> = Execution<A>;

impl Machine {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, q: State, a: Sym) -> State {
        self.delta[q][a]
    }

    pub fn run(&self, q: State, word: &[Sym]) -> State {
        word.iter().fold(q, |q, a| self.delta[q][*a])
    }

    pub fn accepts_finite_from(&self, q: State, word: &[Sym]) -> bool {
        self.accept_finite[self.run(q, word)]
    }

    pub fn inf_accepting(&self, inf: &[bool]) -> bool {
        self.conds.iter().all(|c| match c {
            Cond::Buchi(f) => inf.iter().zip(f).any(|(i, f)| *i && *f),
            Cond::CoBuchi(f) => inf.iter().zip(f).all(|(i, f)| !*i || *f),
            Cond::Never => false,
            Cond::Always => true,
        })
    }

    pub fn lasso_run(&self, q: State, w: &Lasso<Sym>) -> LassoRun {
        let stem = w.stem().len();
        let cyc = w.cycle().len();
        let mut states = vec![q];
        let mut seen: HashMap<(State, usize), usize> = HashMap::new();
        let mut i = 0;
        loop {
            let cur = states[i];
            if i >= stem {
                let key = (cur, (i - stem) % cyc);
                if let Some(&first) = seen.get(&key) {
                    states.truncate(i);
                    return LassoRun {
                        states,
                        start: first,
                        period: i - first,
                    };
                }
                seen.insert(key, i);
            }
            states.push(self.delta[cur][*w.at(i)]);
            i += 1;
        }
    }

    pub fn accepts_lasso_from(&self, q: State, w: &Lasso<Sym>) -> bool {
        let run = self.lasso_run(q, w);
        let mut inf = vec![false; self.states()];
        for s in run.inf_states() {
            inf[s] = true;
        }
        self.inf_accepting(&inf)
    }

    pub fn reachable(&self, from: State, edge_ok: &dyn Fn(State, Sym) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.states()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            for a in 0..self.letters {
                if !edge_ok(q, a) {
                    continue;
                }
                let r = self.delta[q][a];
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    }

    /// Shortest (then letter-order least) word from `from` to a state
    /// satisfying `target`, using only allowed edges.
    pub fn shortest_path(
        &self,
        from: State,
        target: &dyn Fn(State) -> bool,
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Option<Vec<Sym>> {
        let mut parent: Vec<Option<(State, Sym)>> = vec![None; self.states()];
        let mut seen = vec![false; self.states()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            if target(q) {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for a in 0..self.letters {
                if !edge_ok(q, a) {
                    continue;
                }
                let r = self.delta[q][a];
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, a));
                    queue.push_back(r);
                }
            }
        }
        None
    }

    /// Strongly connected components of the subgraph induced by `region`
    /// and the allowed edges that contain at least one edge (so that a run
    /// can stay inside forever).
    fn nontrivial_sccs(
        &self,
        region: &[bool],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Vec<Vec<State>> {
        let mut g: DiGraphMap<State, ()> = DiGraphMap::new();
        let mut self_loop = vec![false; self.states()];
        for q in (0..self.states()).filter(|q| region[*q]) {
            g.add_node(q);
            for a in 0..self.letters {
                let r = self.delta[q][a];
                if edge_ok(q, a) && region[r] {
                    g.add_edge(q, r, ());
                    self_loop[q] |= q == r;
                }
            }
        }
        let mut out: Vec<Vec<State>> = tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.len() > 1 || self_loop[c[0]])
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        out.sort();
        out
    }

    /// Cycles that stay inside `region` and visit every set in `must`,
    /// reported as SCCs of the restricted graph.
    pub fn cycles_visiting(
        &self,
        region: &[bool],
        must: &[Vec<bool>],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Vec<Vec<State>> {
        self.nontrivial_sccs(region, edge_ok)
            .into_iter()
            .filter(|scc| must.iter().all(|m| scc.iter().any(|q| m[*q])))
            .collect()
    }

    /// Cycle regions (within `region`, visiting `extra`) whose runs are
    /// accepted by the infinite condition. Each entry is `(scc, must-sets)`.
    pub fn accepting_cycles(
        &self,
        region: &[bool],
        extra: &[Vec<bool>],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Vec<(Vec<State>, Vec<Vec<bool>>)> {
        let mut region = region.to_vec();
        let mut must: Vec<Vec<bool>> = extra.to_vec();
        for c in &self.conds {
            match c {
                Cond::Never => return Vec::new(),
                Cond::Always => {}
                Cond::Buchi(f) => must.push(f.clone()),
                Cond::CoBuchi(f) => {
                    for (r, f) in region.iter_mut().zip(f) {
                        *r &= *f;
                    }
                }
            }
        }
        self.cycles_visiting(&region, &must, edge_ok)
            .into_iter()
            .map(|scc| (scc, must.clone()))
            .collect()
    }

    /// Cycle regions (within `region`, visiting `extra`) whose runs are
    /// rejected by the infinite condition.
    pub fn rejecting_cycles(
        &self,
        region: &[bool],
        extra: &[Vec<bool>],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Vec<(Vec<State>, Vec<Vec<bool>>)> {
        let mut out = Vec::new();
        for c in &self.conds {
            let (reg, must): (Vec<bool>, Vec<Vec<bool>>) = match c {
                Cond::Always => continue,
                Cond::Never => (region.to_vec(), extra.to_vec()),
                Cond::Buchi(f) => (
                    region.iter().zip(f).map(|(r, f)| *r && !*f).collect(),
                    extra.to_vec(),
                ),
                Cond::CoBuchi(f) => {
                    let mut m = extra.to_vec();
                    m.push(f.iter().map(|x| !*x).collect());
                    (region.to_vec(), m)
                }
            };
            for scc in self.cycles_visiting(&reg, &must, edge_ok) {
                out.push((scc, must.clone()));
            }
        }
        out
    }

    /// A closed walk from `root` inside `scc` that visits a member of every
    /// set in `must`.
    pub fn cycle_through(
        &self,
        scc: &[State],
        must: &[Vec<bool>],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> (State, Vec<Sym>) {
        let mut inside = vec![false; self.states()];
        for q in scc {
            inside[*q] = true;
        }
        let ok = |q: State, a: Sym| edge_ok(q, a) && inside[self.delta[q][a]];
        let root = scc[0];
        let mut word = Vec::new();
        let mut cur = root;
        for m in must {
            let w = self
                .shortest_path(cur, &|q| m[q] && inside[q], &ok)
                .expect("scc member reachable");
            cur = self.run(cur, &w);
            word.extend(w);
        }
        // close the walk; a non-empty step is needed when already at root
        if word.is_empty() || cur != root {
            if cur == root {
                let a = (0..self.letters)
                    .find(|a| ok(root, *a))
                    .expect("nontrivial scc has an edge");
                cur = self.delta[root][a];
                word.push(a);
            }
            let back = self
                .shortest_path(cur, &|q| q == root, &ok)
                .expect("scc is strongly connected");
            word.extend(back);
        }
        (root, word)
    }

    /// A lasso from `from` that ends in a cycle of `scc` visiting `must`.
    pub fn lasso_into(
        &self,
        from: State,
        scc: &[State],
        must: &[Vec<bool>],
        edge_ok: &dyn Fn(State, Sym) -> bool,
    ) -> Option<Lasso<Sym>> {
        let (root, cycle) = self.cycle_through(scc, must, edge_ok);
        let stem = self.shortest_path(from, &|q| q == root, edge_ok)?;
        Lasso::new(Trace::from(stem), Trace::from(cycle)).ok()
    }

    /// States from which some valid finite word or accepted infinite word
    /// can still be produced.
    pub fn live(&self) -> Vec<bool> {
        let all = |_: State, _: Sym| true;
        let everywhere = vec![true; self.states()];
        let mut target = self.accept_finite.clone();
        for (scc, _) in self.accepting_cycles(&everywhere, &[], &all) {
            for q in scc {
                target[q] = true;
            }
        }
        self.co_reach(&target)
    }

    /// States that can reach a finite-accepting state.
    pub fn live_finite(&self) -> Vec<bool> {
        self.co_reach(&self.accept_finite)
    }

    fn co_reach(&self, target: &[bool]) -> Vec<bool> {
        let mut live = target.to_vec();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..self.states() {
                if !live[q] && self.delta[q].iter().any(|r| live[*r]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        live
    }

    /// The single valid continuation from `q`, if exactly one exists.
    pub fn unique_valid_extension(&self, q: State, live: &[bool]) -> Option<Extension<Sym>> {
        if !live[q] {
            return None;
        }
        let mut word = Vec::new();
        let mut visited: HashMap<State, usize> = HashMap::new();
        let mut cur = q;
        loop {
            let live_edges: Vec<Sym> = (0..self.letters)
                .filter(|a| live[self.delta[cur][*a]])
                .collect();
            if self.accept_finite[cur] {
                return live_edges.is_empty().then(|| Execution::Finite(Trace::from(word)));
            }
            if live_edges.len() != 1 {
                return None;
            }
            if let Some(&at) = visited.get(&cur) {
                let stem = Trace::from(word[..at].to_vec());
                let cycle = Trace::from(word[at..].to_vec());
                let l = Lasso::new(stem, cycle).expect("non-empty cycle");
                return Some(Execution::Infinite(l));
            }
            visited.insert(cur, word.len());
            word.push(live_edges[0]);
            cur = self.delta[cur][live_edges[0]];
        }
    }

    /// Synchronous product; acceptance is the conjunction of both sides.
    pub fn product(&self, other: &Machine) -> Machine {
        assert_eq!(self.letters, other.letters, "product over different alphabets");
        let m = other.states();
        let idx = |p: State, q: State| p * m + q;
        let n = self.states() * m;
        let mut delta = vec![vec![0; self.letters]; n];
        let mut accept_finite = vec![false; n];
        for p in 0..self.states() {
            for q in 0..m {
                let s = idx(p, q);
                accept_finite[s] = self.accept_finite[p] && other.accept_finite[q];
                for (a, d) in delta[s].iter_mut().enumerate() {
                    *d = idx(self.delta[p][a], other.delta[q][a]);
                }
            }
        }
        let lift = |c: &Cond, left: bool| -> Cond {
            let pick = |f: &Vec<bool>| -> Vec<bool> {
                (0..n).map(|s| if left { f[s / m] } else { f[s % m] }).collect()
            };
            match c {
                Cond::Buchi(f) => Cond::Buchi(pick(f)),
                Cond::CoBuchi(f) => Cond::CoBuchi(pick(f)),
                Cond::Never => Cond::Never,
                Cond::Always => Cond::Always,
            }
        };
        let conds = self
            .conds
            .iter()
            .map(|c| lift(c, true))
            .chain(other.conds.iter().map(|c| lift(c, false)))
            .collect();
        Machine {
            letters: self.letters,
            delta,
            initial: idx(self.initial, other.initial),
            accept_finite,
            conds,
        }
    }
}
