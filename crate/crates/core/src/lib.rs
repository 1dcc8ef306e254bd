pub mod advantage;
pub mod basis;
pub mod bounds;
pub mod certificate;
pub mod config;
pub mod error;
pub mod exact;
pub mod graph;
pub mod measure;
pub mod models;
pub mod reduction;

pub use error::{Error, Result};
