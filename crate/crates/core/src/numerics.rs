//! Shared numerical kernels: compensated summation, bracketed bisection, and
//! Gauss-Legendre panel quadrature.

/// Neumaier-compensated sum. Entropy comparisons elsewhere hinge on small
/// differences, so plain `iter().sum()` is not good enough.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Dot product with compensation, `Σ a_i b_i`.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Root of a monotone nondecreasing `f` on `[lo, hi]`, assuming
/// `f(lo) <= 0 <= f(hi)`. Stops when the bracket is below `rel_tol`
/// relative to the midpoint (plus a floor for roots near zero).
pub fn bisect_increasing(mut lo: f64, mut hi: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(1e-300) {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with 64-node Gauss-Legendre panels, bisecting
/// panels adaptively until the total changes by less than `tol`.
pub fn adaptive_panel_quadrature(a: f64, b: f64, tol: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(64);
    let panel = |lo: f64, hi: f64| -> f64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        compensated_sum(rule.iter().map(|&(x, w)| w * f(c + h * x))) * h
    };
    let mut panels = vec![(a, b, panel(a, b))];
    let mut total: f64 = panels.iter().map(|p| p.2).sum();
    for _ in 0..40 {
        let mut next = Vec::with_capacity(panels.len() * 2);
        for &(lo, hi, _) in &panels {
            let mid = 0.5 * (lo + hi);
            next.push((lo, mid, panel(lo, mid)));
            next.push((mid, hi, panel(mid, hi)));
        }
        let refined: f64 = compensated_sum(next.iter().map(|p| p.2));
        let done = (refined - total).abs() <= tol * refined.abs().max(1.0);
        panels = next;
        total = refined;
        if done {
            break;
        }
    }
    total
}
