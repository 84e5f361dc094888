//! Word statistics, RSK shapes and limiting-law samplers for longest weakly
//! increasing subsequences of random words, together with a deterministic
//! Monte Carlo harness that measures convergence rates in Kolmogorov and
//! Wasserstein distance.

pub mod distance;
pub mod error;
pub mod harness;
pub mod lci;
pub mod limits;
pub mod model;
pub mod rng;
pub mod rsk;
pub mod variational;

pub use error::{Error, Result};
