//! Batch front-end for the exterior-calculus library: parse a manifold
//! spec, build its objects, run named verification suites, and emit
//! deterministic residual reports.

pub mod report;
pub mod spec_model;
pub mod suites;
