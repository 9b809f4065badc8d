//! Planar building-graph reconstruction from detected primitives.
//!
//! Detected corners, an edge confidence map, region masks and region-pair
//! boundaries are turned into a 0-1 integer program whose optimum selects a
//! planar graph. The crate also ships a detection simulator for synthetic
//! experiments and corner / edge / region precision-recall metrics.

pub mod error;
pub mod geom;
pub mod io;
pub mod ipbuild;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod simdet;
pub mod solver;

pub use error::{Error, Result};
