//! Finitely generated groups given by word-problem oracles, and window-scale
//! geometry on their Cayley graphs: balls, ends, vertex separators and
//! quasi-isometry sampling.
//!
//! Every probe works on a finite window and says so in its report. None of
//! them decides a property of the infinite graph.

mod cayley;
mod oracle;
mod qi;
mod separator;

pub use cayley::{ball, ends_probe, CayleyWindow, EndsReport, DEFAULT_MAX_VERTICES};
pub use oracle::{parse_table, Element, FiniteGroup, FiniteTable, Group, GroupOracle};
pub use qi::{qi_check, qi_density, QiSide, QiViolation};
pub use separator::{
    default_centers, min_separator, narrowness_probe, ProbeCell, ProbeTable, SeparatorReport,
    Trend,
};

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("letter `{0}` is not a generator of the group")]
    UnknownLetter(String),
    #[error("bad group spec: {0}")]
    BadSpec(String),
    #[error("multiplication table, line {line}: {message}")]
    BadTable { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("window exceeds {limit} vertices")]
    WindowTooLarge { limit: usize },
    #[error("window radius {window_r} is too small for radius {r}")]
    WindowTooSmall { r: usize, window_r: usize },
    #[error("balls overlap (centers at distance {distance})")]
    BallsOverlap { distance: usize },
    #[error("balls are adjacent; they must be at distance at least 2")]
    BallsAdjacent,
    #[error("{element} lies outside the window of radius {window_r}")]
    OutsideWindow { element: String, window_r: usize },
}
