pub mod audit;
pub mod compose;
pub mod error;
pub mod graph;
pub mod hierarchy;
pub mod hopset;
pub mod lowerbound;
pub mod ratio;
pub mod reductions;
pub mod spanner;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, PairSet, Path};
pub use ratio::Ratio;
pub use spanner::{ExactPreserverBuilder, PairwiseBuilder, SpannerBundle};
