//! c-convexification, c-subdifferentials, discrete local slopes, and
//! c-gradients.
//!
//! A field `f` is c-convex for a cost matrix `c` when `P_c Q_c f = f`; the
//! double transform is always `<= f` and acts as a projection. The
//! c-subdifferential at `x` is the contact set of that transform,
//! `∂_c f(x) = { y : f(x) = Q_c f(y) − c(x,y) }` (tolerance-expanded).
//!
//! Local slopes are taken over the per-point slope neighborhoods of the
//! space, one-sided at the boundary (the definition never looks outside the
//! point set).

use crate::cost::CostFunction;
use crate::hopf_lax::{p_transform, q_transform};
use crate::space::{MetricSpace, ScalarField};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error("field is not c-convex: max |P_c Q_c f − f| = {deviation}")]
    NotCConvex { deviation: f64 },
}

/// Default absolute tolerance for the c-convexity fixed-point test.
pub const DEFAULT_CCONVEX_TOL: f64 = 1e-10;

/// How [`subdifferential`] treats fields that fail the c-convexity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdifferentialMode {
    /// Error with the deviation when the field is not c-convex.
    Strict,
    /// Operate on the convexification `P_c Q_c f` and flag the result.
    /// Estimator pipelines always feed convexified fields, so this is the
    /// default.
    Convexify,
}

/// Per-point contact sets of the double transform.
#[derive(Debug, Clone)]
pub struct Subdifferential {
    /// `sets[x]` lists the points of `∂_c f(x)`, ascending.
    pub sets: Vec<Vec<usize>>,
    pub tie_tol: f64,
    /// True when the input failed the c-convexity test and the sets were
    /// computed for the convexification instead.
    pub convexified: bool,
    /// Max deviation `|P_c Q_c f − f|` of the original input.
    pub deviation: f64,
}

impl Subdifferential {
    pub fn max_distance(&self, space: &MetricSpace, x: usize) -> f64 {
        self.sets[x]
            .iter()
            .map(|&y| space.dist(x, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_distance(&self, space: &MetricSpace, x: usize) -> f64 {
        self.sets[x]
            .iter()
            .map(|&y| space.dist(x, y))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The c-convexification `P_c Q_c g`. Idempotent: applying it twice equals
/// applying it once (within floating-point noise).
pub fn c_convexify(space: &MetricSpace, cost_matrix: &[f64], g: &ScalarField) -> ScalarField {
    p_transform(space, cost_matrix, &q_transform(space, cost_matrix, g))
}

/// Tests `max_x |P_c Q_c f(x) − f(x)| <= tol`. The deviation is one-sided:
/// the double transform never exceeds `f`.
pub fn is_c_convex(
    space: &MetricSpace,
    cost_matrix: &[f64],
    f: &ScalarField,
    tol: f64,
) -> (bool, f64) {
    let pq = c_convexify(space, cost_matrix, f);
    let deviation = (0..space.len())
        .map(|x| (pq.get(x) - f.get(x)).abs())
        .fold(0.0, f64::max);
    (deviation <= tol, deviation)
}

/// Per-point c-subdifferentials via the contact-set characterization
/// `∂_c f(x) = { y : f(x) = Q_c f(y) − c(x,y) }`, with `tie_tol` admission.
///
/// For c-convex `f` bounded above every set is nonempty.
pub fn subdifferential(
    space: &MetricSpace,
    cost_matrix: &[f64],
    f: &ScalarField,
    tie_tol: f64,
    mode: SubdifferentialMode,
) -> Result<Subdifferential, ConvexityError> {
    let n = space.len();
    let (convex, deviation) = is_c_convex(space, cost_matrix, f, DEFAULT_CCONVEX_TOL);
    let owned;
    let field: &ScalarField = if convex {
        f
    } else {
        match mode {
            SubdifferentialMode::Strict => return Err(ConvexityError::NotCConvex { deviation }),
            SubdifferentialMode::Convexify => {
                owned = c_convexify(space, cost_matrix, f);
                &owned
            }
        }
    };
    let qc = q_transform(space, cost_matrix, field);
    let sets = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| qc.get(y) - cost_matrix[x * n + y] >= field.get(x) - tie_tol)
                .collect()
        })
        .collect();
    Ok(Subdifferential {
        sets,
        tie_tol,
        convexified: !convex,
        deviation,
    })
}

/// Discrete ascending slope: `max { [f(y) − f(x)]_+ / d(x,y) }` over the
/// slope neighborhood of `x`; 0 when no neighbor exists.
pub fn slope_plus(space: &MetricSpace, f: &ScalarField, x: usize) -> f64 {
    space
        .slope_neighbors(x)
        .map(|y| (f.get(y) - f.get(x)).max(0.0) / space.dist(x, y))
        .fold(0.0, f64::max)
}

/// Discrete descending slope: `max { [f(y) − f(x)]_- / d(x,y) }` over the
/// slope neighborhood of `x`.
pub fn slope_minus(space: &MetricSpace, f: &ScalarField, x: usize) -> f64 {
    space
        .slope_neighbors(x)
        .map(|y| (f.get(x) - f.get(y)).max(0.0) / space.dist(x, y))
        .fold(0.0, f64::max)
}

/// c-gradients of a `K α(d)`-convex field: the scaled derivative of the
/// cost evaluated at the extreme subdifferential distances,
/// `|∇_c^+ f|(x) = K α'(sup_{ȳ ∈ ∂_c f(x)} d(x,ȳ))` and
/// `|∇_c^- f|(x) = K α'(inf_{ȳ ∈ ∂_c f(x)} d(x,ȳ))`.
///
/// For the power cost `K d^p/p` these are `K (dist)^{p-1}`.
#[derive(Debug, Clone)]
pub struct CGradients {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub subdifferential: Subdifferential,
}

pub fn c_gradients(
    space: &MetricSpace,
    cost: &CostFunction,
    k_scale: f64,
    f: &ScalarField,
    tie_tol: f64,
    mode: SubdifferentialMode,
) -> Result<CGradients, ConvexityError> {
    assert!(k_scale > 0.0);
    let matrix = space.cost_matrix(|d| k_scale * cost.alpha(d));
    let sub = subdifferential(space, &matrix, f, tie_tol, mode)?;
    let n = space.len();
    let plus = (0..n)
        .map(|x| k_scale * cost.alpha_prime(sub.max_distance(space, x)))
        .collect();
    let minus = (0..n)
        .map(|x| k_scale * cost.alpha_prime(sub.min_distance(space, x)))
        .collect();
    Ok(CGradients {
        plus,
        minus,
        subdifferential: sub,
    })
}

pub fn c_gradient_plus(
    space: &MetricSpace,
    cost: &CostFunction,
    k_scale: f64,
    f: &ScalarField,
    x: usize,
) -> Result<f64, ConvexityError> {
    c_gradients(
        space,
        cost,
        k_scale,
        f,
        crate::hopf_lax::DEFAULT_TIE_TOL,
        SubdifferentialMode::Strict,
    )
    .map(|g| g.plus[x])
}

pub fn c_gradient_minus(
    space: &MetricSpace,
    cost: &CostFunction,
    k_scale: f64,
    f: &ScalarField,
    x: usize,
) -> Result<f64, ConvexityError> {
    c_gradients(
        space,
        cost,
        k_scale,
        f,
        crate::hopf_lax::DEFAULT_TIE_TOL,
        SubdifferentialMode::Strict,
    )
    .map(|g| g.minus[x])
}
