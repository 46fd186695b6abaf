//! Bundled example machines. The `.nsa` sources live in `fixtures/`.

use crate::nsa::{parse_machine, Machine};

pub const FIG2: &str = include_str!("../fixtures/fig2.nsa");
pub const ANBN: &str = include_str!("../fixtures/anbn.nsa");
pub const DYCK2: &str = include_str!("../fixtures/dyck2.nsa");
pub const Z_WORD_PROBLEM: &str = include_str!("../fixtures/z.nsa");
pub const F2_WORD_PROBLEM: &str = include_str!("../fixtures/f2.nsa");

fn load(text: &str) -> Machine {
    parse_machine(text).expect("bundled fixture parses")
}

/// Deterministic NSA for `(aⁿbⁿcⁿdⁿ)*`.
pub fn fig2() -> Machine {
    load(FIG2)
}

/// Pushdown automaton for `aⁿbⁿ`.
pub fn anbn() -> Machine {
    load(ANBN)
}

/// Pushdown automaton for balanced words over `()` and `[]`.
pub fn dyck2() -> Machine {
    load(DYCK2)
}

/// Pushdown automaton accepting the word problem of Z on `a`, `A`.
pub fn z_word_problem() -> Machine {
    load(Z_WORD_PROBLEM)
}

/// Pushdown automaton accepting the word problem of the free group on `a`, `b`.
pub fn f2_word_problem() -> Machine {
    load(F2_WORD_PROBLEM)
}

pub fn all() -> Vec<Machine> {
    vec![fig2(), anbn(), dyck2(), z_word_problem(), f2_word_problem()]
}
