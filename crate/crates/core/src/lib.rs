//! Partial Steiner triple systems with a prescribed maximum partial parallel
//! class: constructions, an exact solver, bounds and sequencings.

pub mod bounds;
pub mod construct;
pub mod design;
pub mod onefactor;
pub mod oracle;
pub mod ppc;
pub mod sequence;

pub use design::{Block, Design, DesignError, Point};
