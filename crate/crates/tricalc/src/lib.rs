//! A calculus engine for trisection diagrams of 4-manifolds: combinatorial
//! curve systems on closed oriented surfaces, Dehn twists, handle slides,
//! (de)stabilization, homological validity checks, and a replayable
//! move-script format with assertions.

pub mod geom;
pub mod surface;
pub mod curves;
pub mod reduce;
pub mod oracle;
pub mod moves;
pub mod trisection;
pub mod tdd;
pub mod catalog;
