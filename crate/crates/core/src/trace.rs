//! Finite executions, ultimately periodic infinite executions, and the
//! sequence algebra over them (prefix, left cancellation, subword, ...).
//!
//! Traces are generic over the letter type so the analysis code can work on
//! dense letter indices while the public surface speaks in [`Action`]s.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;

/// An atomic action: a non-empty token over `[A-Za-z0-9_]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Arc<str>);

impl Action {
    pub fn new(name: &str) -> Result<Self, Error> {
        if is_token(name) {
            Ok(Action(Arc::from(name)))
        } else {
            Err(Error::InvalidToken(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl std::str::FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Action::new(s)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite sequence of letters. `Trace::default()` is the empty trace ε.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Trace<A = Action> {
    items: Vec<A>,
}

pub type FiniteTrace = Trace<Action>;

impl<A> Trace<A> {
    pub fn empty() -> Self {
        Trace { items: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[A] {
        &self.items
    }

    pub fn into_items(self) -> Vec<A> {
        self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, A> {
        self.items.iter()
    }

    pub fn push(&mut self, a: A) {
        self.items.push(a);
    }
}

impl<A> From<Vec<A>> for Trace<A> {
    fn from(items: Vec<A>) -> Self {
        Trace { items }
    }
}

impl<A> FromIterator<A> for Trace<A> {
    fn from_iter<I: IntoIterator<Item = A>>(iter: I) -> Self {
        Trace {
            items: iter.into_iter().collect(),
        }
    }
}

impl<'a, A> IntoIterator for &'a Trace<A> {
    type Item = &'a A;
    type IntoIter = std::slice::Iter<'a, A>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

impl<A: Clone + Eq> Trace<A> {
    /// `self;other`
    pub fn concat(&self, other: &Trace<A>) -> Trace<A> {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        Trace { items }
    }

    /// `self;a`
    pub fn appended(&self, a: A) -> Trace<A> {
        let mut items = self.items.clone();
        items.push(a);
        Trace { items }
    }

    /// `self ⪯ other`
    pub fn is_prefix_of(&self, other: &Trace<A>) -> bool {
        other.items.starts_with(&self.items)
    }

    /// Removes the first occurrence of `a`; unchanged when `a` is absent.
    pub fn left_cancel(&self, a: &A) -> Trace<A> {
        let mut items = self.items.clone();
        if let Some(i) = items.iter().position(|x| x == a) {
            items.remove(i);
        }
        Trace { items }
    }

    /// Folds [`Trace::left_cancel`] over the letters of `other`, in order.
    pub fn left_cancel_word(&self, other: &Trace<A>) -> Trace<A> {
        other
            .items
            .iter()
            .fold(self.clone(), |acc, a| acc.left_cancel(a))
    }

    /// `self ◁ other`: the letters of `self` occur in `other` in order.
    pub fn is_subword_of(&self, other: &Trace<A>) -> bool {
        is_subsequence(&self.items, &other.items)
    }

    pub fn last(&self) -> Result<&A, Error> {
        self.items.last().ok_or(Error::EmptyTrace)
    }

    pub fn prefix(&self, len: usize) -> Trace<A> {
        Trace {
            items: self.items[..len.min(self.items.len())].to_vec(),
        }
    }

    /// All prefixes of length `0..=min(n, |self|)`, shortest first.
    pub fn prefixes_upto(&self, n: usize) -> Vec<Trace<A>> {
        (0..=n.min(self.len())).map(|k| self.prefix(k)).collect()
    }
}

impl<A: Clone + Ord> Trace<A> {
    pub fn acts(&self) -> BTreeSet<A> {
        self.items.iter().cloned().collect()
    }
}

pub(crate) fn is_subsequence<A: Eq>(needle: &[A], hay: &[A]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|x| it.any(|y| y == x))
}

/// A longest word that is a subword of both `tau` and `sigma`.
///
/// Among maximum-length candidates the one using the earliest positions of
/// `tau` (lexicographically first position sequence) is returned.
pub fn longest_common_subword<A: Clone + Eq>(tau: &Trace<A>, sigma: &Trace<A>) -> Trace<A> {
    let t = tau.items();
    let s = sigma.items();
    // suffix table: best[i][j] = LCS length of t[i..], s[j..]
    let mut best = vec![vec![0usize; s.len() + 1]; t.len() + 1];
    for i in (0..t.len()).rev() {
        for j in (0..s.len()).rev() {
            best[i][j] = if t[i] == s[j] {
                best[i + 1][j + 1] + 1
            } else {
                best[i + 1][j].max(best[i][j + 1])
            };
        }
    }
    // Greedy over tau positions: take the earliest position of tau that can
    // still complete a maximum-length common subword.
    let mut out = Vec::with_capacity(best[0][0]);
    let (mut i, mut j) = (0, 0);
    let mut remaining = best[0][0];
    while remaining > 0 {
        let next = (i..t.len()).find_map(|ti| {
            let sj = j + s[j..].iter().position(|x| *x == t[ti])?;
            (best[ti + 1][sj + 1] + 1 == remaining).then_some((ti, sj))
        });
        let Some((ti, sj)) = next else {
            debug_assert!(false, "no letter continues the common subword");
            break;
        };
        out.push(t[ti].clone());
        i = ti + 1;
        j = sj + 1;
        remaining -= 1;
    }
    Trace { items: out }
}

/// The ultimately periodic word `stem·cycle^ω`. `cycle` is never empty.
#[derive(Clone, Debug)]
pub struct Lasso<A = Action> {
    stem: Trace<A>,
    cycle: Trace<A>,
}

pub type LassoWord = Lasso<Action>;

impl<A: Clone + Eq> Lasso<A> {
    pub fn new(stem: Trace<A>, cycle: Trace<A>) -> Result<Self, Error> {
        if cycle.is_empty() {
            return Err(Error::EmptyLoop);
        }
        Ok(Lasso { stem, cycle })
    }

    pub fn stem(&self) -> &Trace<A> {
        &self.stem
    }

    pub fn cycle(&self) -> &Trace<A> {
        &self.cycle
    }

    /// Letter at position `i` of the infinite unrolling.
    pub fn at(&self, i: usize) -> &A {
        let s = self.stem.len();
        if i < s {
            &self.stem.items()[i]
        } else {
            &self.cycle.items()[(i - s) % self.cycle.len()]
        }
    }

    pub fn unroll(&self, len: usize) -> Trace<A> {
        (0..len).map(|i| self.at(i).clone()).collect()
    }

    /// `tau;self`
    pub fn prepend(&self, tau: &Trace<A>) -> Lasso<A> {
        Lasso {
            stem: tau.concat(&self.stem),
            cycle: self.cycle.clone(),
        }
    }

    pub fn has_prefix(&self, tau: &Trace<A>) -> bool {
        tau.items().iter().enumerate().all(|(i, a)| self.at(i) == a)
    }

    /// Decided on the unrolling of length `|stem| + |cycle|·(|tau|+1)`.
    pub fn has_subword(&self, tau: &Trace<A>) -> bool {
        let n = self.stem.len() + self.cycle.len() * (tau.len() + 1);
        is_subsequence(tau.items(), self.unroll(n).items())
    }

    /// All prefixes of length `0..=n`, shortest first.
    pub fn prefixes_upto(&self, n: usize) -> Vec<Trace<A>> {
        (0..=n).map(|k| self.unroll(k)).collect()
    }

    /// Semantic equality of the denoted infinite words.
    pub fn same_word(&self, other: &Lasso<A>) -> bool {
        let n = self.stem.len() + other.stem.len() + lcm(self.cycle.len(), other.cycle.len());
        (0..n).all(|i| self.at(i) == other.at(i))
    }

    /// Shortest stem and primitive cycle denoting the same word.
    pub fn canonical(&self) -> Lasso<A> {
        let c = self.cycle.items();
        let p = (1..=c.len())
            .find(|p| c.len().is_multiple_of(*p) && (0..c.len()).all(|i| c[i] == c[i % p]))
            .unwrap_or(c.len());
        let mut stem: Vec<A> = self.stem.items().to_vec();
        let mut cycle: Vec<A> = c[..p].to_vec();
        // rotate the cycle back into the stem while the last stem letter matches
        while let Some(last) = stem.last() {
            if *last == cycle[cycle.len() - 1] {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso {
            stem: stem.into(),
            cycle: cycle.into(),
        }
    }
}

impl<A: Clone + Eq> PartialEq for Lasso<A> {
    fn eq(&self, other: &Self) -> bool {
        self.same_word(other)
    }
}

impl<A: Clone + Eq> Eq for Lasso<A> {}

impl<A: Clone + Ord> Lasso<A> {
    pub fn acts(&self) -> BTreeSet<A> {
        let mut s = self.stem.acts();
        s.extend(self.cycle.acts());
        s
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Either kind of execution.
#[derive(Clone, Debug)]
pub enum Execution<A = Action> {
    Finite(Trace<A>),
    Infinite(Lasso<A>),
}

impl<A: Clone + Eq> PartialEq for Execution<A> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Execution::Finite(a), Execution::Finite(b)) => a == b,
            (Execution::Infinite(a), Execution::Infinite(b)) => a == b,
            _ => false,
        }
    }
}

impl<A: Clone + Eq> Eq for Execution<A> {}

impl<A: Clone + Eq> Execution<A> {
    pub fn concat_onto(&self, tau: &Trace<A>) -> Execution<A> {
        match self {
            Execution::Finite(t) => Execution::Finite(tau.concat(t)),
            Execution::Infinite(l) => Execution::Infinite(l.prepend(tau)),
        }
    }

    pub fn has_prefix(&self, tau: &Trace<A>) -> bool {
        match self {
            Execution::Finite(t) => tau.is_prefix_of(t),
            Execution::Infinite(l) => l.has_prefix(tau),
        }
    }

    pub fn has_subword(&self, tau: &Trace<A>) -> bool {
        match self {
            Execution::Finite(t) => tau.is_subword_of(t),
            Execution::Infinite(l) => l.has_subword(tau),
        }
    }

    pub fn prefixes_upto(&self, n: usize) -> Vec<Trace<A>> {
        match self {
            Execution::Finite(t) => t.prefixes_upto(n),
            Execution::Infinite(l) => l.prefixes_upto(n),
        }
    }
}

impl<A: Clone + Ord> Execution<A> {
    pub fn acts(&self) -> BTreeSet<A> {
        match self {
            Execution::Finite(t) => t.acts(),
            Execution::Infinite(l) => l.acts(),
        }
    }
}

impl<A: fmt::Display> fmt::Display for Trace<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("-");
        }
        for (i, a) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl<A: fmt::Debug> fmt::Debug for Trace<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("\"-\"");
        }
        f.write_str("\"")?;
        for (i, a) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a:?}")?;
        }
        f.write_str("\"")
    }
}

impl<A: fmt::Display> fmt::Display for Lasso<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.stem.items.is_empty() {
            write!(f, "{} ", self.stem)?;
        }
        write!(f, "~ {}", self.cycle)
    }
}

impl<A: fmt::Display> fmt::Display for Execution<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Execution::Finite(t) => t.fmt(f),
            Execution::Infinite(l) => l.fmt(f),
        }
    }
}

/// Parses the trace literal syntax: whitespace-separated tokens, `-` for ε,
/// and `~` separating stem from loop in a lasso (`a b ~ c d`).
pub fn parse_execution(text: &str) -> Result<Execution, Error> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let tilde: Vec<usize> = toks
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == "~")
        .map(|(i, _)| i)
        .collect();
    match tilde.as_slice() {
        [] => Ok(Execution::Finite(parse_tokens(&toks, text)?)),
        [i] => {
            let stem = parse_tokens(&toks[..*i], text)?;
            let cycle = parse_tokens(&toks[*i + 1..], text)?;
            Ok(Execution::Infinite(Lasso::new(stem, cycle)?))
        }
        _ => Err(Error::TraceLiteral(format!("more than one `~` in {text:?}"))),
    }
}

/// Parses a finite trace literal; a lasso literal is rejected.
pub fn parse_trace(text: &str) -> Result<FiniteTrace, Error> {
    match parse_execution(text)? {
        Execution::Finite(t) => Ok(t),
        Execution::Infinite(_) => Err(Error::TraceLiteral(format!(
            "expected a finite trace, got lasso {text:?}"
        ))),
    }
}

fn parse_tokens(toks: &[&str], whole: &str) -> Result<FiniteTrace, Error> {
    match toks {
        [] | ["-"] => Ok(Trace::empty()),
        _ => toks
            .iter()
            .map(|t| {
                if *t == "-" {
                    Err(Error::TraceLiteral(format!(
                        "`-` must stand alone in {whole:?}"
                    )))
                } else {
                    Action::new(t)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Trace::from),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> FiniteTrace {
        parse_trace(s).unwrap()
    }

    fn lasso(stem: &str, cycle: &str) -> LassoWord {
        Lasso::new(t(stem), t(cycle)).unwrap()
    }

    fn act(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    #[test]
    fn concat_cases() {
        assert_eq!(Trace::empty().concat(&t("a b")), t("a b"));
        assert_eq!(t("a").concat(&t("b c")), t("a b c"));
        let l = lasso("b", "c").prepend(&t("a"));
        assert_eq!(l.stem(), &t("a b"));
        assert_eq!(l.cycle(), &t("c"));
    }

    #[test]
    fn prefix_cases() {
        assert!(Trace::empty().is_prefix_of(&t("a b c")));
        assert!(t("a b").is_prefix_of(&t("a b c")));
        // unrolling of a(ba)^ω is a b a b a ...
        let l = lasso("a", "b a");
        assert_eq!(l.unroll(4), t("a b a b"));
        assert!(l.has_prefix(&t("a b a b")));
        assert!(!l.has_prefix(&t("a a")));
    }

    #[test]
    fn left_cancellation() {
        assert_eq!(Trace::empty().left_cancel(&act("a")), Trace::empty());
        assert_eq!(t("a b a").left_cancel(&act("a")), t("b a"));
        assert_eq!(t("b c").left_cancel(&act("a")), t("b c"));
        assert_eq!(t("a b c a d a").left_cancel_word(&t("d a a")), t("b c a"));
        assert_eq!(t("a b").left_cancel_word(&Trace::empty()), t("a b"));
        assert_eq!(t("a b").left_cancel_word(&t("b a")), Trace::empty());
    }

    #[test]
    fn subword_cases() {
        assert!(Trace::empty().is_subword_of(&t("x")));
        assert!(t("a b").is_subword_of(&t("x a x b x")));
        assert!(!t("b a").is_subword_of(&t("a b")));
        assert!(lasso("x", "y a").has_subword(&t("a a a")));
        assert!(!lasso("x", "y").has_subword(&t("a")));
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(longest_common_subword(&t("a b"), &t("a b")), t("a b"));
        assert_eq!(longest_common_subword(&t("a b c"), &t("x y z")), Trace::empty());
        assert_eq!(longest_common_subword(&t("a b c a d a"), &t("d a a")), t("a a"));
        // tie: "a" and "b" both length 1; earliest position in tau wins
        assert_eq!(longest_common_subword(&t("b a"), &t("a b")), t("b"));
    }

    #[test]
    fn acts_and_last() {
        assert!(Trace::<Action>::empty().acts().is_empty());
        assert_eq!(t("a b a b").acts().len(), 2);
        assert_eq!(lasso("a", "b").acts(), t("a b").acts());
        assert_eq!(t("a b").last().unwrap(), &act("b"));
        assert_eq!(t("a").last().unwrap(), &act("a"));
        assert!(matches!(Trace::<Action>::empty().last(), Err(Error::EmptyTrace)));
    }

    #[test]
    fn prefixes() {
        assert_eq!(t("a b").prefixes_upto(5), vec![t("-"), t("a"), t("a b")]);
        assert_eq!(
            lasso("a", "b").prefixes_upto(3),
            vec![t("-"), t("a"), t("a b"), t("a b b")]
        );
        assert_eq!(Trace::<Action>::empty().prefixes_upto(0), vec![t("-")]);
    }

    #[test]
    fn lasso_equality_is_semantic() {
        assert_eq!(lasso("", "a"), lasso("a", "a a"));
        assert_eq!(lasso("a b", "a b"), lasso("", "b a").prepend(&t("a")));
        assert_ne!(lasso("", "a b"), lasso("", "b a"));
        let c = lasso("a b a", "b a b a").canonical();
        assert_eq!(c.stem(), &t("-"));
        assert_eq!(c.cycle(), &t("a b"));
    }

    #[test]
    fn literal_syntax() {
        assert_eq!(parse_execution("-").unwrap(), Execution::Finite(Trace::empty()));
        assert_eq!(
            parse_execution("a b ~ c d").unwrap(),
            Execution::Infinite(lasso("a b", "c d"))
        );
        assert!(parse_execution("a ~").is_err());
        assert!(parse_execution("a ~ b ~ c").is_err());
        assert!(parse_execution("a-b").is_err());
        assert_eq!(t("a b").to_string(), "a b");
        assert_eq!(lasso("", "c").to_string(), "~ c");
    }
}
