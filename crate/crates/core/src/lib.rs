//! Exterior calculus on a single coordinate chart.
//!
//! The crate provides, bottom up:
//!
//! - [`scalar`]: closed-form scalar fields with exact structural
//!   differentiation and a text DSL ([`parse()`]);
//! - [`multilinear`]: pointwise exterior algebra over R^n (wedge, Plücker
//!   embedding, duality through the top-degree pairing);
//! - [`exterior`]: multivector fields and differential forms with wedge,
//!   pairing, interior products, exterior derivative, Lie derivative along
//!   multivector fields, and the Schouten-Nijenhuis bracket;
//! - [`connection`]: higher affine connections parametrized by a base
//!   affine connection plus twist fields, induced connections, higher
//!   torsion, and covariant derivatives of forms along multivector fields;
//! - [`bilinear`]: associative bilinear forms on the full exterior bundle,
//!   their identification with collections of differential forms, metrics
//!   with symbolic inverses, and the construction of an almost torsion-free
//!   connection making a given form parallel.
//!
//! Identity checking is numerical: claims are evaluated on a [`SamplePlan`]
//! and judged against tolerances, so residuals of exact identities sit at
//! rounding level.
//!
//! ```
//! use hiconn_core::exterior::{snb, MultiVectorField};
//! use hiconn_core::{parse, Chart, SamplePlan};
//!
//! let chart = Chart::standard(2)?;
//! let plan = SamplePlan::default_for(&chart);
//!
//! // [x0 ∂1, ∂0] = -∂1
//! let a = MultiVectorField::coordinate(&chart, 1).scale_field(&parse("x0", &chart)?);
//! let b = MultiVectorField::coordinate(&chart, 0);
//! let bracket = snb(&a, &b)?;
//! let expected = MultiVectorField::coordinate(&chart, 1).neg();
//! assert!(bracket.residual_on(&expected, &plan)? <= 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bilinear;
pub mod chart;
pub mod connection;
pub mod error;
pub mod exterior;
mod linalg;
pub mod multi_index;
pub mod multilinear;
pub mod parse;
pub mod plan;
pub mod random;
pub mod scalar;

pub use chart::Chart;
pub use error::{Error, EvalError, Result};
pub use multi_index::MultiIndex;
pub use parse::parse;
pub use plan::{fields_equal_on, max_abs_on, EqualityReport, SamplePlan};
pub use scalar::ScalarField;
