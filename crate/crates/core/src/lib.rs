//! Finite-scale estimators for neutralized packing pressure of finitely
//! generated free semigroup actions.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over immutable inputs: systems and their generator words,
//! Bowen metrics with exponentially shrinking ("neutralized") radii, weighted
//! packings and their critical exponents, finitely supported measures and
//! their local pressures, closed-form oracles on full shifts, and a harness
//! that cross-checks the variational principle at desk scale.
//!
//! File formats, the command line and parallel drivers live in the `packpress`
//! crate.

#![no_std]

extern crate alloc;

pub mod bowen;
pub mod error;
pub mod harness;
pub mod math;
pub mod measures;
pub mod oracles;
pub mod packing;
pub mod pressure;
pub mod properties;
pub mod systems;
pub mod words;

pub use bowen::{BowenIndex, BowenQuery, Closedness};
pub use error::{Error, Result};
pub use measures::SampleMeasure;
pub use packing::{DisjointMode, PackedBall, PackingCollection, PackingProblem};
pub use pressure::{CriticalExponentResult, Scale, Strategy};
pub use systems::{Generator, Point, Potential, SampleSet, Space, System, SystemSpec};
pub use words::{level_size, OrbitTable, Word, WordLevel};
