//! Conjugate points, isotropy and curvature of rank-one normal homogeneous spaces
//! G/H, built from explicit matrix bases of 𝔤.
//!
//! Geodesics through the origin are orbits t ↦ exp(tu)·o, and Jacobi fields solve
//! the constant-coefficient system X″ − T_u X′ + R_u X = 0 on 𝔪 with
//! T_u = −[u,·]_𝔪 and R_u = −ad([u,·]_𝔨 applied to u). Conjugate points come from a
//! singular-value scan of the fundamental solution, and are compared against closed
//! forms for geodesics with an invariant 2-plane.

pub mod algebra;
pub mod catalog;
pub mod closed_form;
pub mod error;
pub mod homogeneous;
pub mod jacobi;
pub mod linalg;
pub mod par;
pub mod pinching;
pub mod report;
pub mod reproduce;
pub mod stiefel;

pub use algebra::{AlgebraElement, ComplexMatrix, GramRule, StructuredAlgebra};
pub use catalog::SpaceDescriptor;
pub use closed_form::{closed_form_times, cross_validate, extract_cp_data, CpData};
pub use error::{Error, Result};
pub use homogeneous::{Part, ReductiveSpace};
pub use jacobi::{ConjugateEvent, JacobiSystem, ScanOptions};
pub use par::Execution;
pub use pinching::{estimate_pinching, PinchingOptions, PinchingReport};
pub use reproduce::{reproduce, Suite};
