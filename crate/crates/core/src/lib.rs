//! # hopflax-core
//!
//! Numerical toolkit for Hopf-Lax-Oleinik operators, c-convex analysis, and
//! transport / log-Sobolev inequality machinery on finite metric spaces.
//!
//! The building blocks:
//!
//! - [`space`]: finite metric spaces with validated distances and slope
//!   neighborhoods (matrix, graph shortest-path, and Euclidean grid
//!   constructors).
//! - [`cost`]: convex cost generators `α` with derivatives, Legendre duals,
//!   the `β` function, and growth exponents.
//! - [`hopf_lax`]: the sup/inf convolution operators `P_t`, `Q_t`, general
//!   cost transforms, extremizer sets, and exact one-sided time derivatives.
//! - [`convexity`]: c-convexification, c-subdifferentials, discrete local
//!   slopes, and c-gradients.
//! - [`measure`]: probability measures, entropy functionals, relative
//!   entropy, k-norms, variance.
//! - [`transport`]: exact discrete optimal transport (network simplex) with
//!   dual certificates, a 1-D quantile oracle, and the Bobkov-Götze gap.
//! - [`inequalities`]: evaluators and best-constant estimators for the
//!   modified log-Sobolev, transport-entropy, τ-log-Sobolev, restricted
//!   log-Sobolev, Poincaré, and hypercontractivity inequalities, plus the
//!   scalar constant machinery (`β_p`, `θ_p`, `κ_p`, the `ℓ_p` schedule).
//!
//! All computational objects are immutable after construction and safe to
//! share across threads. Randomized estimators are deterministic for a fixed
//! seed, independent of thread count.

#![forbid(unsafe_code)]

pub mod convexity;
pub mod cost;
pub mod hopf_lax;
pub mod inequalities;
pub mod measure;
pub mod numerics;
pub mod space;
pub mod transport;

pub use convexity::{Subdifferential, SubdifferentialMode};
pub use cost::{CostFunction, CostProfile};
pub use hopf_lax::ExtremizerSet;
pub use measure::ProbMeasure;
pub use space::{MetricSpace, ScalarField, SlopeRadiusPolicy};
pub use transport::TransportPlan;
