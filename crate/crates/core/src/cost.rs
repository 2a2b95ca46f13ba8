//! Convex cost generators `α` with derivatives, Legendre duals, the `β`
//! function, and the growth exponents `r_α ≤ p_α` with the Δ2 constant.
//!
//! Every cost is an increasing convex `α: [0,∞) → [0,∞)` with `α(0) = 0`.
//! Three kinds are supported: exact powers `h^p/p`, the linear-capped
//! (Huber-type) cost, and tabulated convex costs interpolated piecewise
//! linearly. Tabulated costs produce *estimated* profiles: the limit slope
//! `ℓ = lim α(h)/h` is truncated at the last tabulated point and flagged.

use crate::numerics::bisect_increasing;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("power exponent must satisfy p >= 1, got {0}")]
    BadExponent(f64),
    #[error("linear cap must be positive, got {0}")]
    BadCap(f64),
    #[error("invalid cost tabulation: {0}")]
    BadSamples(String),
    #[error("legendre dual diverges: u = {u} exceeds limit slope ell = {ell}")]
    DualDiverges { u: f64, ell: f64 },
    #[error("cost fails the doubling condition: sampled ratio {ratio} exceeds 1e12")]
    NotDelta2 { ratio: f64 },
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
}

/// Growth exponents and doubling constant of a cost.
///
/// `r_alpha = inf x α'(x)/α(x)` and `p_alpha = sup x α'(x)/α(x)`. For power
/// costs both equal the exponent exactly; otherwise they are estimated on the
/// logarithmic grid recorded in `grid` and `estimated` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub r_alpha: f64,
    pub p_alpha: f64,
    pub delta2_constant: f64,
    /// `(lo, hi, points)` of the logarithmic sampling grid, if one was used.
    pub grid: Option<(f64, f64, usize)>,
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CostKind {
    Power { p: f64 },
    LinearCapped { cap: f64 },
    Custom { samples: Vec<(f64, f64)> },
}

/// An increasing convex cost `α` with `α(0) = 0`, its derivative, and the
/// limit slope `ℓ = lim_{h→∞} α(h)/h` (`+∞` for superlinear costs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostKind", into = "CostKind")]
pub struct CostFunction {
    kind: CostKind,
    #[serde(skip)]
    ell: f64,
    #[serde(skip)]
    ell_truncated: bool,
    /// Knot slopes for tabulated costs; empty otherwise.
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl TryFrom<CostKind> for CostFunction {
    type Error = CostError;
    fn try_from(kind: CostKind) -> Result<Self, CostError> {
        match kind {
            CostKind::Power { p } => CostFunction::power(p),
            CostKind::LinearCapped { cap } => CostFunction::linear_capped(cap),
            CostKind::Custom { samples } => CostFunction::custom(samples),
        }
    }
}

impl From<CostFunction> for CostKind {
    fn from(c: CostFunction) -> CostKind {
        c.kind
    }
}

impl CostFunction {
    /// `α(h) = h^p / p` for `p >= 1`.
    pub fn power(p: f64) -> Result<Self, CostError> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(CostError::BadExponent(p));
        }
        let ell = if p > 1.0 { f64::INFINITY } else { 1.0 };
        Ok(CostFunction {
            kind: CostKind::Power { p },
            ell,
            ell_truncated: false,
            slopes: Vec::new(),
        })
    }

    /// The quadratic cost `h^2/2`.
    pub fn quadratic() -> Self {
        Self::power(2.0).expect("p = 2 is valid")
    }

    /// Huber-type cost: `h^2/2` for `h <= cap`, linear with slope `cap`
    /// beyond, so `ℓ = cap`.
    pub fn linear_capped(cap: f64) -> Result<Self, CostError> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(CostError::BadCap(cap));
        }
        Ok(CostFunction {
            kind: CostKind::LinearCapped { cap },
            ell: cap,
            ell_truncated: false,
            slopes: Vec::new(),
        })
    }

    /// Tabulated convex cost, interpolated piecewise linearly between knots
    /// and extended linearly beyond the last knot. The tabulation must start
    /// at `(0, 0)` and have nonnegative, nondecreasing secant slopes.
    pub fn custom(samples: Vec<(f64, f64)>) -> Result<Self, CostError> {
        if samples.len() < 2 {
            return Err(CostError::BadSamples(
                "need at least two sample points".into(),
            ));
        }
        if samples[0] != (0.0, 0.0) {
            return Err(CostError::BadSamples("first sample must be (0, 0)".into()));
        }
        let mut slopes = Vec::with_capacity(samples.len() - 1);
        for w in samples.windows(2) {
            let (h0, a0) = w[0];
            let (h1, a1) = w[1];
            if !(h1 > h0) || !h1.is_finite() || !a1.is_finite() {
                return Err(CostError::BadSamples(format!(
                    "sample abscissae must be finite and strictly increasing near h = {h1}"
                )));
            }
            let s = (a1 - a0) / (h1 - h0);
            if s < 0.0 {
                return Err(CostError::BadSamples(format!(
                    "cost must be nondecreasing; negative slope on [{h0}, {h1}]"
                )));
            }
            if let Some(&prev) = slopes.last() {
                if s < prev - 1e-10 {
                    return Err(CostError::BadSamples(format!(
                        "cost must be convex; slope decreases on [{h0}, {h1}]"
                    )));
                }
            }
            slopes.push(s);
        }
        let (h_last, a_last) = *samples.last().expect("nonempty");
        let ell = a_last / h_last;
        Ok(CostFunction {
            kind: CostKind::Custom { samples },
            ell,
            ell_truncated: true,
            slopes,
        })
    }

    /// `lim_{h→∞} α(h)/h`; `+∞` for superlinear costs. For tabulated costs
    /// this is `α(H)/H` at the largest knot `H` (see [`ell_truncated`]).
    ///
    /// [`ell_truncated`]: CostFunction::ell_truncated
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// True when `ell` is a truncated estimate from a finite tabulation.
    pub fn ell_truncated(&self) -> bool {
        self.ell_truncated
    }

    pub fn is_power(&self, p: f64) -> bool {
        matches!(self.kind, CostKind::Power { p: q } if q == p)
    }

    /// `α(h)` for `h >= 0`.
    pub fn alpha(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "alpha argument must be nonnegative");
        match &self.kind {
            CostKind::Power { p } => h.powf(*p) / p,
            CostKind::LinearCapped { cap } => {
                if h <= *cap {
                    0.5 * h * h
                } else {
                    cap * h - 0.5 * cap * cap
                }
            }
            CostKind::Custom { samples } => {
                let (h_last, a_last) = *samples.last().expect("nonempty");
                if h >= h_last {
                    return a_last + self.slopes.last().expect("nonempty") * (h - h_last);
                }
                let i = segment_index(samples, h);
                let (h0, a0) = samples[i];
                a0 + self.slopes[i] * (h - h0)
            }
        }
    }

    /// `α'(h)`, nonnegative and nondecreasing. For tabulated costs this is
    /// the right-continuous piecewise-constant secant slope.
    pub fn alpha_prime(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "alpha_prime argument must be nonnegative");
        match &self.kind {
            CostKind::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else if h == 0.0 {
                    0.0
                } else {
                    h.powf(p - 1.0)
                }
            }
            CostKind::LinearCapped { cap } => h.min(*cap),
            CostKind::Custom { samples } => {
                let (h_last, _) = *samples.last().expect("nonempty");
                if h >= h_last {
                    return *self.slopes.last().expect("nonempty");
                }
                self.slopes[segment_index(samples, h)]
            }
        }
    }

    /// The Legendre dual `α*(u) = sup_{h>=0} { h u − α(h) }`.
    ///
    /// Closed form `u^q/q` (with `1/p + 1/q = 1`) for power costs; ternary
    /// search at relative tolerance 1e-12 otherwise, on a bracket grown until
    /// `α'(H) >= u`.
    pub fn legendre_dual(&self, u: f64) -> Result<f64, CostError> {
        if u < 0.0 {
            return Err(CostError::NegativeArgument(u));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            CostKind::Power { p } => {
                if *p == 1.0 {
                    if u > 1.0 {
                        return Err(CostError::DualDiverges { u, ell: 1.0 });
                    }
                    return Ok(0.0);
                }
                let q = p / (p - 1.0);
                Ok(u.powf(q) / q)
            }
            _ => {
                if u > self.ell {
                    return Err(CostError::DualDiverges { u, ell: self.ell });
                }
                // Grow the bracket until the objective is surely decreasing.
                let mut hi = 1.0f64;
                while self.alpha_prime(hi) < u && hi < 1e300 {
                    hi *= 2.0;
                }
                let g = |h: f64| h * u - self.alpha(h);
                let mut lo = 0.0f64;
                let mut hi = hi;
                while hi - lo > 1e-12 * hi.max(1.0) {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if g(m1) < g(m2) {
                        lo = m1;
                    } else {
                        hi = m2;
                    }
                }
                Ok(g(0.5 * (lo + hi)).max(0.0))
            }
        }
    }

    /// `β(h) = h α'(h) − α(h)`, the one-sided time-derivative profile of the
    /// sup-convolution. Satisfies `β(h) = α*(α'(h))` and is nondecreasing.
    pub fn beta(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "beta argument must be nonnegative");
        match &self.kind {
            // h·h^{p-1} − h^p/p = h^p (1 − 1/p), written to avoid cancellation
            CostKind::Power { p } => h.powf(*p) * (1.0 - 1.0 / p),
            _ => h * self.alpha_prime(h) - self.alpha(h),
        }
    }

    /// `α^{-1}(target)` by bisection at relative tolerance 1e-12 on `[0, H]`,
    /// with `H` doubled until `α(H) >= target`.
    pub fn alpha_inverse(&self, target: f64) -> f64 {
        debug_assert!(target >= 0.0);
        if target == 0.0 {
            return 0.0;
        }
        let mut hi = 1.0f64;
        while self.alpha(hi) < target && hi < 1e300 {
            hi *= 2.0;
        }
        bisect_increasing(0.0, hi, 1e-12, |h| self.alpha(h) - target)
    }

    /// Growth exponents `r_α ≤ p_α` and the Δ2 constant `sup α(2x)/α(x)`.
    ///
    /// Exact for power costs; otherwise estimated on a logarithmic grid of
    /// 10^4 points spanning `[1e-6, 1e6]` (recorded in the profile).
    pub fn exponents(&self) -> Result<CostProfile, CostError> {
        if let CostKind::Power { p } = self.kind {
            return Ok(CostProfile {
                r_alpha: p,
                p_alpha: p,
                delta2_constant: 2.0f64.powf(p),
                grid: None,
                estimated: false,
            });
        }
        let (lo, hi, points) = (1e-6f64, 1e6f64, 10_000usize);
        let log_lo = lo.ln();
        let log_hi = hi.ln();
        let mut r = f64::INFINITY;
        let mut p = 0.0f64;
        let mut delta2 = 1.0f64;
        for i in 0..points {
            let x = (log_lo + (log_hi - log_lo) * i as f64 / (points - 1) as f64).exp();
            let a = self.alpha(x);
            if a <= 0.0 {
                continue;
            }
            let ratio = x * self.alpha_prime(x) / a;
            r = r.min(ratio);
            p = p.max(ratio);
            let doubling = self.alpha(2.0 * x) / a;
            delta2 = delta2.max(doubling);
            if delta2 > 1e12 {
                return Err(CostError::NotDelta2 { ratio: delta2 });
            }
        }
        Ok(CostProfile {
            r_alpha: r,
            p_alpha: p,
            delta2_constant: delta2,
            grid: Some((lo, hi, points)),
            estimated: true,
        })
    }
}

fn segment_index(samples: &[(f64, f64)], h: f64) -> usize {
    // Index i with samples[i].0 <= h < samples[i+1].0.
    match samples.binary_search_by(|&(x, _)| x.total_cmp(&h)) {
        Ok(i) => i.min(samples.len() - 2),
        Err(i) => i.saturating_sub(1).min(samples.len() - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn huber_tabulation() -> Vec<(f64, f64)> {
        // α(h) = h²/2 for h <= 1, h − 1/2 beyond. Knots are log-spaced in the
        // quadratic region so the secant slopes track α' uniformly well.
        let mut samples = vec![(0.0, 0.0)];
        let mut h = 1e-7f64;
        while h < 1.0 {
            samples.push((h, 0.5 * h * h));
            h *= 1.02;
        }
        samples.push((1.0, 0.5));
        for i in 1..=60 {
            let h = 1.0 + i as f64 * 0.5;
            samples.push((h, h - 0.5));
        }
        samples
    }

    #[test]
    fn quadratic_dual_is_self_dual() {
        let c = CostFunction::quadratic();
        assert_eq!(c.legendre_dual(2.0).unwrap(), 2.0);
        assert_eq!(c.legendre_dual(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cubic_dual_closed_form() {
        let c = CostFunction::power(3.0).unwrap();
        // q = 3/2, so α*(1) = 1^{3/2}/(3/2) = 2/3.
        assert!((c.legendre_dual(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn beta_values() {
        let c2 = CostFunction::quadratic();
        assert_eq!(c2.beta(2.0), 2.0);
        assert_eq!(c2.beta(0.0), 0.0);
        let c3 = CostFunction::power(3.0).unwrap();
        assert!((c3.beta(1.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn power_profiles_are_exact() {
        let p2 = CostFunction::quadratic().exponents().unwrap();
        assert_eq!((p2.r_alpha, p2.p_alpha, p2.delta2_constant), (2.0, 2.0, 4.0));
        assert!(!p2.estimated);
        let p35 = CostFunction::power(3.5).unwrap().exponents().unwrap();
        assert_eq!(p35.r_alpha, 3.5);
        assert!((p35.delta2_constant - 2.0f64.powf(3.5)).abs() < 1e-12);
    }

    #[test]
    fn huber_profile_estimates() {
        let c = CostFunction::custom(huber_tabulation()).unwrap();
        let profile = c.exponents().unwrap();
        // x α'(x)/α(x) → 1 from above as x → ∞; the grid tops out at 1e6.
        assert!(profile.r_alpha >= 1.0 - 1e-9 && profile.r_alpha < 1.001);
        assert!((profile.p_alpha - 2.0).abs() < 1e-6);
        assert!(profile.estimated);
        assert!(c.ell_truncated());
        // ell = α(H)/H at the last knot H = 31: (31 − 0.5)/31.
        assert!((c.ell() - 30.5 / 31.0).abs() < 1e-12);
    }

    #[test]
    fn linear_capped_profile() {
        let c = CostFunction::linear_capped(1.0).unwrap();
        let profile = c.exponents().unwrap();
        assert!(profile.r_alpha >= 1.0 - 1e-9 && profile.r_alpha < 1.001);
        assert!((profile.delta2_constant - 4.0).abs() < 1e-9);
        assert_eq!(c.ell(), 1.0);
    }

    #[test]
    fn dual_diverges_past_limit_slope() {
        let c = CostFunction::linear_capped(1.0).unwrap();
        assert!(matches!(
            c.legendre_dual(1.5),
            Err(CostError::DualDiverges { .. })
        ));
        // At u <= ell the dual is finite: sup h·u − α(h).
        assert!((c.legendre_dual(0.5).unwrap() - 0.125).abs() < 1e-9);
    }

    #[test]
    fn custom_dual_matches_quadratic() {
        let mut samples = vec![(0.0, 0.0)];
        for i in 1..=400 {
            let h = i as f64 / 40.0;
            samples.push((h, 0.5 * h * h));
        }
        let c = CostFunction::custom(samples).unwrap();
        for u in [0.3, 1.0, 2.5] {
            let exact = 0.5 * u * u;
            assert!(
                (c.legendre_dual(u).unwrap() - exact).abs() < 2e-3,
                "tabulated dual should approximate u^2/2"
            );
        }
    }

    #[test]
    fn beta_equals_dual_of_derivative() {
        for c in [
            CostFunction::quadratic(),
            CostFunction::power(3.0).unwrap(),
            CostFunction::linear_capped(2.0).unwrap(),
        ] {
            for h in [0.1, 0.7, 1.3, 4.0] {
                let lhs = c.beta(h);
                let rhs = c.legendre_dual(c.alpha_prime(h)).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
                    "beta identity failed at h={h}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn alpha_inverse_round_trips() {
        for c in [
            CostFunction::quadratic(),
            CostFunction::power(3.5).unwrap(),
            CostFunction::linear_capped(1.0).unwrap(),
        ] {
            for target in [0.0, 0.3, 2.0, 50.0] {
                let h = c.alpha_inverse(target);
                assert!((c.alpha(h) - target).abs() <= 1e-9 * target.max(1.0));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c: CostFunction = serde_json::from_str(r#"{"kind":"power","p":2.0}"#).unwrap();
        assert!(c.is_power(2.0));
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"kind":"power","p":2.0}"#);
        let custom: CostFunction =
            serde_json::from_str(r#"{"kind":"custom","samples":[[0.0,0.0],[1.0,0.5],[2.0,1.5]]}"#)
                .unwrap();
        assert!((custom.alpha(1.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonconvex_tabulation() {
        let bad = vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.2)];
        assert!(matches!(
            CostFunction::custom(bad),
            Err(CostError::BadSamples(_))
        ));
    }

    proptest! {
        // Fenchel-Young: h·u <= α(h) + α*(u), tight when u = α'(h).
        #[test]
        fn fenchel_young(h in 0.0..20.0f64, u in 0.0..20.0f64, p in 1.1..4.0f64) {
            let c = CostFunction::power(p).unwrap();
            let dual = c.legendre_dual(u).unwrap();
            prop_assert!(h * u <= c.alpha(h) + dual + 1e-9 * (1.0 + h * u));
            let tight = c.alpha_prime(h);
            let dual_tight = c.legendre_dual(tight).unwrap();
            let gap = c.alpha(h) + dual_tight - h * tight;
            prop_assert!(gap.abs() <= 1e-9 * (1.0 + h * tight));
        }

        // β is nondecreasing.
        #[test]
        fn beta_monotone(a in 0.0..10.0f64, b in 0.0..10.0f64, p in 1.0..4.0f64) {
            let c = CostFunction::power(p).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(c.beta(lo) <= c.beta(hi) + 1e-12);
        }

        // The dual of the dual of a power cost is the cost itself.
        #[test]
        fn dual_involution(h in 0.01..10.0f64, p in 1.2..4.0f64) {
            let c = CostFunction::power(p).unwrap();
            let q = p / (p - 1.0);
            let dual = CostFunction::power(q).unwrap();
            let twice = dual.legendre_dual(h).unwrap();
            // α**(h) should equal α(h); powers round-trip through powf.
            prop_assert!((twice - c.alpha(h)).abs() <= 1e-10 * c.alpha(h).max(1e-30));
        }
    }
}
