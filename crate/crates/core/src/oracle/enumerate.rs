use std::collections::HashSet;

use crate::policy::{Alphabet, Sym};
use crate::trace::{FiniteTrace, Lasso, LassoWord, Trace};

/// Every word over `k` letters of length at most `n`, in shortlex order.
pub fn finite_syms(k: usize, n: usize) -> Vec<Trace<Sym>> {
    let mut out = vec![Trace::empty()];
    if k == 0 {
        return out;
    }
    let mut layer = vec![Vec::<Sym>::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for a in 0..k {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Trace::from));
        layer = next;
    }
    out
}

/// Every lasso with `|stem| <= p` and `1 <= |loop| <= q`, one
/// representative per denoted infinite word, in order of first occurrence
/// (loop length, then stem length, then shortlex).
pub fn lasso_syms(k: usize, p: usize, q: usize) -> Vec<Lasso<Sym>> {
    let stems = finite_syms(k, p);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for len in 1..=q {
        for cycle in finite_syms(k, len).into_iter().filter(|c| c.len() == len) {
            for stem in &stems {
                let l = Lasso::new(stem.clone(), cycle.clone()).expect("non-empty loop");
                let c = l.canonical();
                if seen.insert((c.stem().clone(), c.cycle().clone())) {
                    out.push(l);
                }
            }
        }
    }
    out
}

/// All finite traces over `alphabet` of length at most `n`, shortlex.
pub fn enumerate_finite(alphabet: &Alphabet, n: usize) -> Vec<FiniteTrace> {
    finite_syms(alphabet.len(), n)
        .iter()
        .map(|w| alphabet.decode(w))
        .collect()
}

/// All semantically distinct lassos with stem at most `p` and loop
/// between 1 and `q`.
pub fn enumerate_lassos(alphabet: &Alphabet, p: usize, q: usize) -> Vec<LassoWord> {
    lasso_syms(alphabet.len(), p, q)
        .iter()
        .map(|l| {
            Lasso::new(alphabet.decode(l.stem()), alphabet.decode(l.cycle()))
                .expect("non-empty loop")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    #[test]
    fn finite_counts_and_order() {
        let words: Vec<String> = enumerate_finite(&ab(), 2).iter().map(|t| t.to_string()).collect();
        assert_eq!(words, ["-", "a", "b", "a a", "a b", "b a", "b b"]);
        let a = Alphabet::from_names(&["a"]).unwrap();
        assert_eq!(enumerate_finite(&a, 3).len(), 4);
        let none = Alphabet::new(vec![]).unwrap();
        assert_eq!(enumerate_finite(&none, 5).len(), 1);
        for n in 0..6 {
            assert_eq!(finite_syms(3, n).len(), (3usize.pow(n as u32 + 1) - 1) / 2);
        }
    }

    #[test]
    fn lasso_dedup() {
        let a = Alphabet::from_names(&["a"]).unwrap();
        let ls = enumerate_lassos(&a, 0, 1);
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].to_string(), "~ a");
        let ls = enumerate_lassos(&ab(), 0, 2);
        assert!(ls.iter().all(|l| l.to_string() != "~ a a"));
        // a·a^ω and b·b^ω coincide with a^ω and b^ω
        let ls = enumerate_lassos(&ab(), 1, 1);
        assert_eq!(ls.len(), 4);
    }

    #[test]
    fn lassos_are_pairwise_distinct_and_complete() {
        let ls = lasso_syms(2, 2, 3);
        for (i, x) in ls.iter().enumerate() {
            for y in &ls[i + 1..] {
                assert!(!x.same_word(y));
            }
        }
        for stem in finite_syms(2, 2) {
            for cycle in finite_syms(2, 3).into_iter().filter(|c| !c.is_empty()) {
                let l = Lasso::new(stem.clone(), cycle).unwrap();
                assert!(ls.iter().any(|m| m.same_word(&l)));
            }
        }
    }
}
