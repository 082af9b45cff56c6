//! Random cutting of labelled trees.
//!
//! The crate bundles the pieces needed to simulate and check cutting
//! procedures on rooted labelled trees:
//!
//! * [`tree`]: parent-array trees, ordered forests, planting, spanned subtrees.
//! * [`samplers`]: uniform Cayley trees, uniform ordered forests and
//!   conditioned Galton-Watson trees, all driven by reproducible [`RngStream`]s.
//! * [`cutting`]: planted and ordered edge cutting, the canonical reordering
//!   of a cutting sequence, and the record-based fast path for vertex cutting.
//! * [`dynamics`]: the Aldous-Broder rewiring step, its pruning variant that
//!   produces a forest and a chained tree, and the reverse transformation.
//! * [`fragmentation`]: event-driven Poisson cutting of a rescaled tree.
//! * [`excursion`]: lattice-path codings and the concatenated cut path.
//! * [`oracle`]: exact rational laws by brute-force enumeration at small sizes.
//! * [`stats`]: Rayleigh and chi reference laws, KS and chi-square checks.
//!
//! Vertices are `usize` indices `0..n` everywhere in the API. The canonical
//! text serialization (see [`tree::RootedTree::to_line`]) uses 1-based labels.

pub mod cutting;
pub mod dynamics;
mod error;
pub mod excursion;
pub mod fragmentation;
pub mod oracle;
pub mod samplers;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use samplers::RngStream;
pub use tree::{OrderedForest, PlantedTree, RootedTree};
