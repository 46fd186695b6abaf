//! Nested stack automata and the geometry of their configuration graphs.
//!
//! * [`memory_tree`]: memory trees and the partial-map monoid of stack operations.
//! * [`nsa`]: machines, acceptance, language enumeration, determinism and
//!   limited-erasing checks.
//! * [`hom`]: inverse images under non-erasing homomorphisms.
//! * [`config_graph`]: bounded configuration graphs, their degree and ε-run
//!   properties, path lifting, and projection onto a Cayley diagram.
//! * [`pda`]: the non-erasing equivalence and tree quotient for pushdown automata.
//! * [`group`]: group oracles, Cayley balls, vertex separators, ends and
//!   quasi-isometry sampling.
//!
//! ```
//! use nested_stack::{fixtures, nsa};
//!
//! let m = fixtures::fig2();
//! let r = nsa::accepts(&m, &nsa::word("aabbccdd"), Default::default());
//! assert_eq!(r.verdict, nsa::Verdict::Accepted);
//! ```

pub mod cli;
pub mod config_graph;
pub mod fixtures;
pub mod group;
pub mod hom;
pub mod laws;
pub mod memory_tree;
pub mod nsa;
pub mod pda;
