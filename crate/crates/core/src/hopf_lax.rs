//! Sup and inf convolution operators and their exact one-sided time
//! derivatives.
//!
//! For a field `f` on a finite space, `P_t f(x) = max_y { f(y) − t α(d(x,y)/t) }`
//! and `Q_t f(x) = min_y { f(y) + t α(d(x,y)/t) }`. On a finite space both
//! extrema are attained by direct enumeration, which makes the one-sided time
//! derivatives *exact*: the right derivative of `P_t f` at `x` is
//! `β(max_{ȳ} d(x,ȳ)/t)` over the extremizer set, the left derivative uses the
//! min. The two operators are linked by `Q_t f = −P_t(−f)` bit for bit.

use crate::cost::CostFunction;
use crate::space::{MetricSpace, ScalarField};

/// Points attaining an extremum within `tie_tol` of the best value.
///
/// Floating-point argmax ties are generic on symmetric spaces, so the set is
/// tolerance-expanded; the true extremizer is always a member. Members are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremizerSet {
    pub points: Vec<usize>,
    pub tie_tol: f64,
}

/// Default absolute tolerance for admitting near-ties into extremizer sets.
pub const DEFAULT_TIE_TOL: f64 = 1e-10;

impl ExtremizerSet {
    pub fn max_distance(&self, space: &MetricSpace, x: usize) -> f64 {
        self.points
            .iter()
            .map(|&y| space.dist(x, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_distance(&self, space: &MetricSpace, x: usize) -> f64 {
        self.points
            .iter()
            .map(|&y| space.dist(x, y))
            .fold(f64::INFINITY, f64::min)
    }
}

#[inline]
fn hopf_lax_penalty(cost: &CostFunction, d: f64, t: f64) -> f64 {
    t * cost.alpha(d / t)
}

/// `P_t f(x) = max_y { f(y) − t α(d(x,y)/t) }`, exact over all points.
///
/// The result dominates `f` pointwise (the `y = x` term).
pub fn sup_convolution(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
) -> ScalarField {
    assert!(t > 0.0, "time must be positive");
    debug_assert!(f.check_len(space).is_ok());
    let n = space.len();
    let values = (0..n)
        .map(|x| {
            let mut best = f64::NEG_INFINITY;
            for y in 0..n {
                let v = f.get(y) - hopf_lax_penalty(cost, space.dist(x, y), t);
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect();
    ScalarField::new(values).expect("finite inputs give finite extrema")
}

/// `Q_t f(x) = min_y { f(y) + t α(d(x,y)/t) }`; equals `−P_t(−f)` bit for bit.
pub fn inf_convolution(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
) -> ScalarField {
    assert!(t > 0.0, "time must be positive");
    debug_assert!(f.check_len(space).is_ok());
    let n = space.len();
    let values = (0..n)
        .map(|x| {
            let mut best = f64::INFINITY;
            for y in 0..n {
                let v = f.get(y) + hopf_lax_penalty(cost, space.dist(x, y), t);
                if v < best {
                    best = v;
                }
            }
            best
        })
        .collect();
    ScalarField::new(values).expect("finite inputs give finite extrema")
}

/// `Q^λ f(x) = min_y { f(y) + λ d^p(x,y)/p }`, the inf-convolution against the
/// scaled power cost. For power costs this equals `Q_t` with `t = λ^{-1/(p-1)}`.
pub fn q_lambda(space: &MetricSpace, p: f64, f: &ScalarField, lambda: f64) -> ScalarField {
    assert!(lambda > 0.0, "lambda must be positive");
    assert!(p >= 1.0);
    debug_assert!(f.check_len(space).is_ok());
    let n = space.len();
    let values = (0..n)
        .map(|x| {
            let mut best = f64::INFINITY;
            for y in 0..n {
                let v = f.get(y) + lambda * space.dist(x, y).powf(p) / p;
                if v < best {
                    best = v;
                }
            }
            best
        })
        .collect();
    ScalarField::new(values).expect("finite inputs give finite extrema")
}

/// The set `m(t,x)` of points attaining the supremum defining `P_t f(x)`,
/// tolerance-expanded by `tie_tol` (absolute).
pub fn extremizer_set(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
    x: usize,
    tie_tol: f64,
) -> ExtremizerSet {
    assert!(t > 0.0, "time must be positive");
    debug_assert!(f.check_len(space).is_ok());
    let n = space.len();
    let value = |y: usize| f.get(y) - hopf_lax_penalty(cost, space.dist(x, y), t);
    let best = (0..n).map(value).fold(f64::NEG_INFINITY, f64::max);
    let points = (0..n).filter(|&y| value(y) >= best - tie_tol).collect();
    ExtremizerSet { points, tie_tol }
}

/// Extremizer set for the inf-convolution `Q_t f(x)` (argmin set), via
/// `Q_t f = −P_t(−f)`.
pub fn extremizer_set_inf(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
    x: usize,
    tie_tol: f64,
) -> ExtremizerSet {
    extremizer_set(space, cost, &-f, t, x, tie_tol)
}

/// Right time derivative of `P_t f(x)`: `β(max_{ȳ ∈ m(t,x)} d(x,ȳ)/t)`.
/// Always nonnegative.
pub fn dp_dt_plus(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
    x: usize,
) -> f64 {
    let m = extremizer_set(space, cost, f, t, x, DEFAULT_TIE_TOL);
    cost.beta(m.max_distance(space, x) / t)
}

/// Left time derivative of `P_t f(x)`: `β(min_{ȳ ∈ m(t,x)} d(x,ȳ)/t)`.
pub fn dp_dt_minus(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
    x: usize,
) -> f64 {
    let m = extremizer_set(space, cost, f, t, x, DEFAULT_TIE_TOL);
    cost.beta(m.min_distance(space, x) / t)
}

/// Right time derivative of `Q_t f(x)`, obtained through `Q_t f = −P_t(−f)`:
/// `−β(max_{ȳ} d(x,ȳ)/t)` over the argmin set. Always nonpositive.
pub fn dq_dt_plus(
    space: &MetricSpace,
    cost: &CostFunction,
    f: &ScalarField,
    t: f64,
    x: usize,
) -> f64 {
    -dp_dt_plus(space, cost, &-f, t, x)
}

/// General-cost transforms for an arbitrary finite cost matrix `c` (row-major
/// `n×n`): returns `(P_c f, Q_c f)` where `Q_c f(y) = min_x { f(x) + c(x,y) }`
/// and `P_c g(x) = max_y { g(y) − c(x,y) }`.
pub fn general_transforms(
    space: &MetricSpace,
    cost_matrix: &[f64],
    f: &ScalarField,
) -> (ScalarField, ScalarField) {
    (
        p_transform(space, cost_matrix, f),
        q_transform(space, cost_matrix, f),
    )
}

/// `Q_c f(y) = min_x { f(x) + c(x,y) }`.
pub fn q_transform(space: &MetricSpace, cost_matrix: &[f64], f: &ScalarField) -> ScalarField {
    let n = space.len();
    debug_assert_eq!(cost_matrix.len(), n * n);
    debug_assert!(f.check_len(space).is_ok());
    let values = (0..n)
        .map(|y| {
            let mut best = f64::INFINITY;
            for x in 0..n {
                let v = f.get(x) + cost_matrix[x * n + y];
                if v < best {
                    best = v;
                }
            }
            best
        })
        .collect();
    ScalarField::new(values).expect("finite inputs")
}

/// `P_c g(x) = max_y { g(y) − c(x,y) }`.
pub fn p_transform(space: &MetricSpace, cost_matrix: &[f64], g: &ScalarField) -> ScalarField {
    let n = space.len();
    debug_assert_eq!(cost_matrix.len(), n * n);
    debug_assert!(g.check_len(space).is_ok());
    let values = (0..n)
        .map(|x| {
            let mut best = f64::NEG_INFINITY;
            for y in 0..n {
                let v = g.get(y) - cost_matrix[x * n + y];
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect();
    ScalarField::new(values).expect("finite inputs")
}

/// Argmax set `m(x)` of the transform `P_c g(x)`, tolerance-expanded.
pub fn p_transform_extremizers(
    space: &MetricSpace,
    cost_matrix: &[f64],
    g: &ScalarField,
    x: usize,
    tie_tol: f64,
) -> ExtremizerSet {
    let n = space.len();
    let value = |y: usize| g.get(y) - cost_matrix[x * n + y];
    let best = (0..n).map(value).fold(f64::NEG_INFINITY, f64::max);
    let points = (0..n).filter(|&y| value(y) >= best - tie_tol).collect();
    ExtremizerSet { points, tie_tol }
}

/// Localization radius for argmin sets of `Q_t f`: every extremizer lies
/// within `t α^{-1}(Osc(f)/t)` of the base point.
pub fn localization_radius(cost: &CostFunction, oscillation: f64, t: f64) -> f64 {
    t * cost.alpha_inverse(oscillation / t)
}

/// Uniform bound on `|Q_{t+h} f − Q_t f| / h`: `β(α^{-1}(Osc(f)/t))`.
pub fn time_lipschitz_bound(cost: &CostFunction, oscillation: f64, t: f64) -> f64 {
    cost.beta(cost.alpha_inverse(oscillation / t))
}
