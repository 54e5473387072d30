//! Concentration-of-measure invariants and intrinsic-dimension functionals
//! of finite metric spaces with probability measures.

pub mod cli;
pub mod concentration;
pub mod covering;
pub mod dimension;
pub mod error;
pub mod experiment;
pub mod features;
pub mod measure;
pub mod mmspace;
pub mod random;
pub mod rng;
pub mod transport;

pub use error::{Error, ErrorKind, Result};
pub use mmspace::MMSpace;
