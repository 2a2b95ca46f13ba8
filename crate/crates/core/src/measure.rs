//! Probability measures on finite spaces: entropy functionals, relative
//! entropy, variance, and power-mean norms including the geometric mean.
//!
//! Inequality verdicts downstream hinge on small differences of these
//! quantities, so all sums are compensated. Weights below 1e-300 are treated
//! as exact zeros to avoid log underflow.

use crate::numerics::compensated_sum;
use crate::space::{MetricSpace, ScalarField};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Weights below this are treated as exact zeros.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Tolerance on the normalization `Σ w_i = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("weight at index {index} is invalid: {value}")]
    BadWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("field must be positive on the support: value {value} at index {index}")]
    NonPositiveField { index: usize, value: f64 },
    #[error("measure has {got} weights but the space has {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("empty measure")]
    Empty,
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc", into = "MeasureDoc")]
pub struct ProbMeasure {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    weights: Vec<f64>,
}

impl TryFrom<MeasureDoc> for ProbMeasure {
    type Error = MeasureError;
    fn try_from(doc: MeasureDoc) -> Result<Self, MeasureError> {
        ProbMeasure::new(doc.weights)
    }
}

impl From<ProbMeasure> for MeasureDoc {
    fn from(m: ProbMeasure) -> MeasureDoc {
        MeasureDoc { weights: m.weights }
    }
}

impl ProbMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self, MeasureError> {
        if weights.is_empty() {
            return Err(MeasureError::Empty);
        }
        let mut weights = weights;
        for (index, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(MeasureError::BadWeight {
                    index,
                    value: *w,
                });
            }
            if *w < WEIGHT_FLOOR {
                *w = 0.0;
            }
        }
        let sum = compensated_sum(weights.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(MeasureError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(ProbMeasure { weights })
    }

    pub fn uniform(n: usize) -> Self {
        ProbMeasure {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        ProbMeasure { weights }
    }

    /// Normalizes arbitrary nonnegative masses.
    pub fn from_masses(masses: &[f64]) -> Result<Self, MeasureError> {
        let total = compensated_sum(masses.iter().copied());
        if !(total > 0.0) || !total.is_finite() {
            return Err(MeasureError::NotNormalized {
                sum: total,
                tol: NORMALIZATION_TOL,
            });
        }
        let mut weights: Vec<f64> = masses.iter().map(|&m| m / total).collect();
        // Push rounding residue onto the heaviest coordinate.
        let residue = 1.0 - compensated_sum(weights.iter().copied());
        if residue != 0.0 {
            let imax = (0..weights.len())
                .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
                .expect("nonempty");
            weights[imax] += residue;
        }
        ProbMeasure::new(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.weights[i] > 0.0)
    }

    pub fn check_len(&self, space: &MetricSpace) -> Result<(), MeasureError> {
        if self.len() != space.len() {
            return Err(MeasureError::LengthMismatch {
                got: self.len(),
                expected: space.len(),
            });
        }
        Ok(())
    }

    /// `Σ μ_i f_i` with compensation.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        debug_assert_eq!(self.len(), f.len());
        compensated_sum((0..self.len()).map(|i| self.weights[i] * f.get(i)))
    }
}

/// `Ent_μ(g) = Σ μ_i g_i log(g_i / Σ μ_j g_j)` for positive fields.
/// Nonnegative by Jensen; zero iff `g` is constant on the support.
pub fn entropy_functional(mu: &ProbMeasure, g: &ScalarField) -> Result<f64, MeasureError> {
    debug_assert_eq!(mu.len(), g.len());
    for i in mu.support() {
        if g.get(i) <= 0.0 {
            return Err(MeasureError::NonPositiveField {
                index: i,
                value: g.get(i),
            });
        }
    }
    let mean = compensated_sum(mu.support().map(|i| mu.get(i) * g.get(i)));
    let log_mean = mean.ln();
    Ok(compensated_sum(
        mu.support()
            .map(|i| mu.get(i) * g.get(i) * (g.get(i).ln() - log_mean)),
    ))
}

/// `Ent_μ(e^f) / ∫ e^f dμ`, computed entirely in the log domain so it stays
/// finite for fields far outside the exp-representable range. Equals
/// `Σ ρ_i (f_i − log Z)` for the Gibbs reweighting `ρ_i = μ_i e^{f_i} / Z`.
pub fn normalized_entropy_of_exp(mu: &ProbMeasure, f: &ScalarField) -> f64 {
    let m = mu
        .support()
        .map(|i| f.get(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let z_shift = compensated_sum(mu.support().map(|i| mu.get(i) * (f.get(i) - m).exp()));
    let log_z = m + z_shift.ln();
    compensated_sum(
        mu.support()
            .map(|i| mu.get(i) * (f.get(i) - log_z).exp() * (f.get(i) - log_z)),
    )
    .max(0.0)
}

/// Relative entropy `H(ν|μ) = Σ ν_i log(ν_i/μ_i)`, with `0 log 0 = 0` and
/// `+∞` when `ν` charges a `μ`-null point.
pub fn relative_entropy(nu: &ProbMeasure, mu: &ProbMeasure) -> f64 {
    debug_assert_eq!(nu.len(), mu.len());
    for i in nu.support() {
        if mu.get(i) == 0.0 {
            return f64::INFINITY;
        }
    }
    compensated_sum(
        nu.support()
            .map(|i| nu.get(i) * (nu.get(i) / mu.get(i)).ln()),
    )
    .max(0.0)
}

/// Power mean `(Σ μ |g|^k)^{1/k}` for `k ≠ 0`; geometric mean
/// `exp(Σ μ log g)` at `k = 0`. Continuous in `k` across zero.
pub fn k_norm(mu: &ProbMeasure, g: &ScalarField, k: f64) -> Result<f64, MeasureError> {
    debug_assert_eq!(mu.len(), g.len());
    if k <= 0.0 {
        for i in mu.support() {
            if g.get(i) <= 0.0 {
                return Err(MeasureError::NonPositiveField {
                    index: i,
                    value: g.get(i),
                });
            }
        }
    }
    if k == 0.0 {
        let log_mean = compensated_sum(mu.support().map(|i| mu.get(i) * g.get(i).ln()));
        return Ok(log_mean.exp());
    }
    if k.abs() < 1e-4 {
        // Near k = 0 the direct route loses the digits that separate the
        // power mean from the geometric mean; expand through expm1/ln_1p.
        let s = compensated_sum(
            mu.support()
                .map(|i| mu.get(i) * (k * g.get(i).ln()).exp_m1()),
        );
        return Ok((s.ln_1p() / k).exp());
    }
    let s = compensated_sum(mu.support().map(|i| mu.get(i) * g.get(i).abs().powf(k)));
    Ok(s.powf(1.0 / k))
}

/// Log of the k-norm of `e^f`, evaluated entirely in the log domain:
/// `(1/k) log Σ μ e^{k f}`. Safe for large `|f|`.
pub fn log_k_norm_exp(mu: &ProbMeasure, f: &ScalarField, k: f64) -> f64 {
    if k == 0.0 {
        return mu.integrate(f);
    }
    let m = mu
        .support()
        .map(|i| k * f.get(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let s = compensated_sum(mu.support().map(|i| mu.get(i) * (k * f.get(i) - m).exp()));
    (m + s.ln()) / k
}

/// `Var_μ(f) = Σ μ f² − (Σ μ f)²`, computed against the mean for stability.
pub fn variance(mu: &ProbMeasure, f: &ScalarField) -> f64 {
    debug_assert_eq!(mu.len(), f.len());
    let mean = mu.integrate(f);
    compensated_sum(
        mu.support()
            .map(|i| mu.get(i) * (f.get(i) - mean) * (f.get(i) - mean)),
    )
    .max(0.0)
}
