//! Agent-based spatial economy: families, firms and regional governments
//! on a square, with labor, goods and housing markets.
//!
//! A run is fully determined by its configuration and seed.

pub mod config;
pub mod error;
pub mod firm;
pub mod goods;
pub mod government;
pub mod housing;
pub mod labor;
pub mod rng;
pub mod runner;
pub mod scheduler;
pub mod space;
pub mod stats;
pub mod world;

pub use config::{load_config, Config};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use space::Design;
