//! Two-round Ramsey games for triangles on binomial random graphs.
//!
//! The crate builds, colours and analyses the small dense structures that
//! decide the game: pattern copies, collages of triangles and `F`-graphs,
//! discharging colourings, and the wedge statistics behind the completion
//! threshold.

pub mod census;
pub mod collage;
pub mod colouring;
pub mod density;
pub mod discharge;
pub mod flow;
pub mod game;
pub mod graph;
pub mod lab;

pub use graph::{Edge, EdgeSubset, Graph, GraphError, RngSpec, Vertex};
