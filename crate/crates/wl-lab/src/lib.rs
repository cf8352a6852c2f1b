//! Construction, refinement, classification, and reduction of coherent
//! configurations: the stable objects of the 2-dimensional Weisfeiler-Leman
//! algorithm.
//!
//! The crate is organized around a single universal input type, the complete
//! arc-colored digraph, and provides:
//!
//! * k-WL refinement, coherent closure, individualization, and exhaustive
//!   coherence verification ([`refine`]);
//! * structural algebra of a configuration: fibers, interspaces, quotient
//!   graph, modules, direct sums, max-modules ([`algebra`]);
//! * recognition of named small graphs, an exhaustive census of homogeneous
//!   configurations of order at most 7, interspace templates, and factories
//!   for pattern instances ([`census`]);
//! * interspace-pattern classification between a small fiber and an
//!   arbitrary fiber, equivalence classes, and partition structures
//!   ([`patterns`]);
//! * criticality-style reductions, restorability predicates, and an exact
//!   WL-dimension oracle at desk scale ([`critical`]);
//! * potential accounting, color-valence and fiber-size limiting, treewidth,
//!   local reductions, CFI constructions, and upper-bound certificates
//!   ([`bounds`]).

pub mod algebra;
pub mod bounds;
pub mod census;
pub mod critical;
pub mod errors;
pub mod graph;
pub mod iso;
pub mod patterns;
pub mod refine;
pub mod testgen;
pub mod treewidth;

pub use errors::{Error, Result};
pub use graph::{parse_graph, ColoredDigraph};
pub use refine::{coherent_closure, distinguishes, individualize, verify_coherence, wl_refine, CoherentConfiguration};
