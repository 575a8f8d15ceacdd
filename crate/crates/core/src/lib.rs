pub mod asymptotics;
pub mod error;
pub mod model;
pub mod probability;
pub mod propagator;
pub mod tunneling_time;

pub use error::{LzError, Result};
