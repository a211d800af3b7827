//! Generic rigidity, separators, partial reflections and certificates for
//! d-joined graphs.

pub mod campaign;
pub mod certify;
pub mod chordal;
pub mod cliques;
pub mod connectivity;
pub mod error;
pub mod field;
pub mod framework;
pub mod gluing;
pub mod fixtures;
pub mod graph;
pub mod oracle;
pub mod random;
pub mod reflection;
pub mod rigidity;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Vertex, VertexSet};
