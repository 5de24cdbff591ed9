pub mod error;
pub mod grassmann;
pub mod lp;
pub mod math;
pub mod norms;
pub mod orbit;
pub mod pos;
pub mod sphere;
pub mod tsp;

pub use error::{OrbitopeError, Result};
