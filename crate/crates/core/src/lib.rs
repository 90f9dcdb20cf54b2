pub mod cohomology;
pub mod cusp;
pub mod error;
pub mod fixtures;
pub mod hlattice;
pub mod linalg;
pub mod local_products;
pub mod qfield;
pub mod verify;
pub mod weil_theta;

pub use error::{Error, Result};
