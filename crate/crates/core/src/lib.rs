//! Ortho-homomorphism densities `t(G, d)` of finite graphs in the
//! orthogonality graph of the sphere `S^{d-1}`.

pub mod closed_form;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod mc;
pub mod pirational;
pub mod sampler;
pub mod spectral;
pub mod sphere;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use graph::{Graph, NodeOrdering};
pub use pirational::PiRational;
pub use sphere::UnitVector;
