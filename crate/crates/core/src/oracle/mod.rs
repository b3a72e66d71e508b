//! Brute-force ground truth: exhaustive enumeration, class definitions
//! evaluated directly, and a monitor-versus-adversary game.

pub mod brute;
pub mod check;
pub mod corpus;
pub mod enumerate;
pub mod game;
pub mod sweep;

pub use brute::{brute_class, ClassKind};
pub use check::{cross_check, cross_check_with, CheckReport, CheckRow, Classify, InjectedFault, StandardClassifier};
pub use corpus::{corpus, CorpusEntry, CorpusSpec};
pub use enumerate::{enumerate_finite, enumerate_lassos};
pub use game::{game_enforceable, GameSpec};
pub use sweep::{executions, ltl_divergences, Divergence};
