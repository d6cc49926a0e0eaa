//! Topological measures on finite models of locally compact spaces.
//!
//! Spaces are finite face posets with the Alexandrov topology ([`space`]).
//! Solid-set functions ([`ssf`]) are extended to topological measures
//! ([`extend`]) by the hull-based three-stage construction, and every axiom
//! is checked by exhaustive enumeration. The [`oracle`] module recomputes
//! everything from definitions for small spaces.

pub mod builders;
pub mod cli;
pub mod demo;
pub mod extend;
pub mod oracle;
pub mod partition;
pub mod region;
pub mod report;
pub mod solid;
pub mod space;
pub mod ssf;
pub mod value;

pub use region::Region;
pub use space::{Cell, Component, FiniteSpace, SpaceError};
pub use value::{Rational, Value};
