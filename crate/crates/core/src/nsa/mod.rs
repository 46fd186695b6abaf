//! Nested stack automata as labelled graphs: machines, computations,
//! acceptance, and the determinism and limited-erasing checks.

mod analysis;
mod machine;
mod run;

use std::fmt;
use std::sync::Arc;

pub use analysis::{check_deterministic, check_limited_erasing, Determinism, Erasing};
pub use machine::{
    parse_machine, Edge, Machine, MachineBuilder, MachineError, ParseError, ParseErrorKind,
    RESERVED_PREFIX,
};
pub use run::{
    accepts, enumerate_accepted, epsilon_closure, run_trace, step, AcceptResult, CapExceeded,
    CapKind, Computation, HaltReason, ResourceCaps, Successor, Trace, TraceError, TraceStep,
    Verdict,
};

use crate::memory_tree::MemoryTree;

/// An input letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(s: &str) -> Self {
        Letter(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Letter {
    fn from(s: &str) -> Self {
        Letter::new(s)
    }
}

pub type Word = Vec<Letter>;

/// Splits a word given on the command line: whitespace-separated tokens if
/// any whitespace is present, otherwise one letter per character.
pub fn word(s: &str) -> Word {
    if s.chars().any(char::is_whitespace) {
        s.split_whitespace().map(Letter::new).collect()
    } else {
        s.chars().map(|c| Letter::new(c.encode_utf8(&mut [0; 4]))).collect()
    }
}

/// Renders a word; letters are concatenated when all are single characters.
pub fn word_to_string(w: &[Letter]) -> String {
    if w.is_empty() {
        return "ε".to_string();
    }
    if w.iter().all(|l| l.as_str().chars().count() == 1) {
        w.iter().map(|l| l.as_str()).collect()
    } else {
        w.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub usize);

/// A machine state paired with a memory tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    pub state: StateId,
    pub tree: MemoryTree,
}

impl Configuration {
    pub fn initial(m: &Machine) -> Self {
        Configuration {
            state: m.initial(),
            tree: MemoryTree::empty(),
        }
    }

    pub fn is_accepting(&self, m: &Machine) -> bool {
        m.is_final(self.state) && self.tree.is_empty()
    }

    /// Name in the `branch-prefix, state, branch-rest` style, e.g. `yxx2`.
    pub fn name(&self, m: &Machine) -> String {
        self.tree.name_with_state(m.state_name(self.state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_splitting() {
        assert_eq!(word("abcd").len(), 4);
        assert_eq!(word("p q").len(), 2);
        assert!(word("").is_empty());
        assert_eq!(word_to_string(&word("ab")), "ab");
        assert_eq!(word_to_string(&word("ab cd")), "ab cd");
    }
}
