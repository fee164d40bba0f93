//! Discrete Morse theory for two-particle configuration spaces of graphs.
//!
//! The pipeline for a graph is:
//!
//! 1. [`graph_model`]: spanning tree, preorder labels, one-particle Morse function.
//! 2. [`config_complex`]: the two-particle cell complex.
//! 3. [`trial_fix`]: trial function and its repair into a Morse function.
//! 4. [`discrete_morse`]: gradient field and V-paths.
//! 5. [`morse_homology`]: Morse complex, first homology, and a cellular oracle.
//! 6. [`gauge`]: gauge potentials on the 1-skeleton.
//!
//! [`pipeline::analyze`] runs all of it.

pub mod complex;
pub mod config_complex;
pub mod corpus;
pub mod discrete_morse;
pub mod gauge;
pub mod graph_model;
pub mod input;
pub mod integer_matrix;
pub mod morse_homology;
pub mod pipeline;
pub mod trial_fix;

pub use complex::{CellLike, RegularComplex};
pub use config_complex::{build_d2, Cell, TwoParticleComplex};
pub use discrete_morse::{CellFunction, GradientField};
pub use graph_model::{Edge, Graph, RootedSpanningTree, Vertex};
pub use morse_homology::{HomologyResult, MorseComplex};
pub use pipeline::{analyze, verify_invariants, Analysis, AnalysisOptions, PipelineError, RunReport};
pub use trial_fix::TieBreakPolicy;
