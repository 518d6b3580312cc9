//! Visibility, colored visibility and Voronoi visibility maps of 1.5D
//! terrains seen from several viewpoints, computed exactly.

pub mod colvis;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod geometry;
pub mod intervals;
pub mod io;
pub mod limited;
pub mod oracle;
pub mod render;
pub mod shoot;
pub mod terrain;
pub mod vis;
pub mod vorvis;

pub use error::{Error, Result};
