//! Exact discrete optimal transport.
//!
//! `ot_cost` solves the transportation linear program
//! `min Σ π_ij c_ij` over couplings of two measures by a network simplex on
//! the bipartite supply/demand graph, and exports the optimal dual
//! potentials so callers can audit the duality gap. Entropic regularization
//! is deliberately absent: inequality verdicts downstream need exact costs.
//!
//! `ot_oracle_1d` is an independent verification oracle: on the line with
//! cost `|x−y|^p/p` the quantile (monotone) coupling is optimal, and its cost
//! is computable by a two-pointer sweep with no linear programming at all.

use crate::cost::CostFunction;
use crate::hopf_lax::inf_convolution;
use crate::measure::ProbMeasure;
use crate::numerics::{compensated_dot, compensated_sum};
use crate::space::{MetricSpace, ScalarField};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("marginal masses differ: {sum1} vs {sum2} (tolerance 1e-9)")]
    InfeasibleMarginals { sum1: f64, sum2: f64 },
    #[error("cost matrix has {got} entries, expected {expected}")]
    CostShape { got: usize, expected: usize },
    #[error("non-finite cost at ({i},{j})")]
    NonFiniteCost { i: usize, j: usize },
    #[error("simplex iteration limit reached ({0} pivots)")]
    IterationLimit(usize),
}

/// An optimal coupling with its cost and the dual potentials certifying it.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// Row-major `n×n` coupling; rows marginalize to `ν₁`, columns to `ν₂`.
    pub pi: Vec<f64>,
    pub cost: f64,
    /// Dual potential per source point (zero off the support of `ν₁`).
    pub potential_source: Vec<f64>,
    /// Dual potential per sink point (zero off the support of `ν₂`).
    pub potential_sink: Vec<f64>,
    pub pivots: usize,
}

impl TransportPlan {
    /// Dual objective `Σ u_i ν₁_i + Σ v_j ν₂_j`; matches `cost` at optimality.
    pub fn dual_objective(&self, nu1: &ProbMeasure, nu2: &ProbMeasure) -> f64 {
        compensated_dot(&self.potential_source, nu1.weights())
            + compensated_dot(&self.potential_sink, nu2.weights())
    }

    pub fn duality_gap(&self, nu1: &ProbMeasure, nu2: &ProbMeasure) -> f64 {
        self.cost - self.dual_objective(nu1, nu2)
    }
}

/// Entering-arc selection. Block search is the fast default; the solver
/// switches to Bland's smallest-index rule during degenerate stretches, which
/// restores the classical no-cycling guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    Bland,
    BlockSearch,
}

/// Exact optimum of the transportation LP between `nu1` and `nu2` for the
/// given row-major cost matrix.
///
/// Zero-weight points are dropped before solving and reinserted as zero
/// rows/columns of the plan.
pub fn ot_cost(
    cost_matrix: &[f64],
    nu1: &ProbMeasure,
    nu2: &ProbMeasure,
) -> Result<TransportPlan, TransportError> {
    ot_cost_with_rule(cost_matrix, nu1, nu2, PivotRule::BlockSearch)
}

pub fn ot_cost_with_rule(
    cost_matrix: &[f64],
    nu1: &ProbMeasure,
    nu2: &ProbMeasure,
    rule: PivotRule,
) -> Result<TransportPlan, TransportError> {
    let n = nu1.len();
    if cost_matrix.len() != n * n {
        return Err(TransportError::CostShape {
            got: cost_matrix.len(),
            expected: n * n,
        });
    }
    let sum1 = compensated_sum(nu1.weights().iter().copied());
    let sum2 = compensated_sum(nu2.weights().iter().copied());
    if (sum1 - sum2).abs() > 1e-9 {
        return Err(TransportError::InfeasibleMarginals { sum1, sum2 });
    }
    let sources: Vec<usize> = nu1.support().collect();
    let sinks: Vec<usize> = nu2.support().collect();
    let m = sources.len();
    let k = sinks.len();
    let mut cost = vec![0.0; m * k];
    for (si, &i) in sources.iter().enumerate() {
        for (sj, &j) in sinks.iter().enumerate() {
            let c = cost_matrix[i * n + j];
            if !c.is_finite() {
                return Err(TransportError::NonFiniteCost { i, j });
            }
            cost[si * k + sj] = c;
        }
    }
    let supply: Vec<f64> = sources.iter().map(|&i| nu1.get(i)).collect();
    let demand: Vec<f64> = sinks.iter().map(|&j| nu2.get(j)).collect();

    let mut simplex = Simplex::new(m, k, cost, supply, demand, rule);
    simplex.solve()?;

    let mut pi = vec![0.0; n * n];
    for (si, &i) in sources.iter().enumerate() {
        for (sj, &j) in sinks.iter().enumerate() {
            pi[i * n + j] = simplex.flow[si * k + sj];
        }
    }
    let total_cost = compensated_sum(
        (0..m * k)
            .filter(|&a| simplex.flow[a] != 0.0)
            .map(|a| simplex.flow[a] * simplex.cost[a]),
    );
    let mut potential_source = vec![0.0; n];
    let mut potential_sink = vec![0.0; n];
    for (si, &i) in sources.iter().enumerate() {
        potential_source[i] = simplex.u[si];
    }
    for (sj, &j) in sinks.iter().enumerate() {
        potential_sink[j] = simplex.v[sj];
    }
    Ok(TransportPlan {
        pi,
        cost: total_cost,
        potential_source,
        potential_sink,
        pivots: simplex.pivots,
    })
}

struct Simplex {
    m: usize,
    k: usize,
    cost: Vec<f64>,
    flow: Vec<f64>,
    basic: Vec<bool>,
    // Tree over nodes 0..m (sources) and m..m+k (sinks).
    parent: Vec<usize>,
    parent_arc: Vec<usize>,
    u: Vec<f64>,
    v: Vec<f64>,
    rule: PivotRule,
    pivot_tol: f64,
    pivots: usize,
    scan_start: usize,
    supply: Vec<f64>,
    demand: Vec<f64>,
}

const ROOT: usize = usize::MAX;

impl Simplex {
    fn new(
        m: usize,
        k: usize,
        cost: Vec<f64>,
        supply: Vec<f64>,
        demand: Vec<f64>,
        rule: PivotRule,
    ) -> Self {
        let scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let pivot_tol = 1e-13 * (1.0 + scale);
        let mut s = Simplex {
            m,
            k,
            cost,
            flow: vec![0.0; m * k],
            basic: vec![false; m * k],
            parent: vec![ROOT; m + k],
            parent_arc: vec![usize::MAX; m + k],
            u: vec![0.0; m],
            v: vec![0.0; k],
            rule,
            pivot_tol,
            pivots: 0,
            scan_start: 0,
            supply,
            demand,
        };
        s.northwest_corner();
        s.rebuild_tree();
        s
    }

    fn northwest_corner(&mut self) {
        let mut ra = self.supply.clone();
        let mut rb = self.demand.clone();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let a = i * self.k + j;
            let f = ra[i].min(rb[j]).max(0.0);
            self.basic[a] = true;
            self.flow[a] = f;
            ra[i] -= f;
            rb[j] -= f;
            if i == self.m - 1 && j == self.k - 1 {
                break;
            }
            // Advance exactly one index so the path has m+k−1 cells.
            if ra[i] <= rb[j] && i < self.m - 1 {
                i += 1;
            } else if j < self.k - 1 {
                j += 1;
            } else {
                i += 1;
            }
        }
    }

    fn source_node(&self, i: usize) -> usize {
        i
    }

    fn sink_node(&self, j: usize) -> usize {
        self.m + j
    }

    fn rebuild_tree(&mut self) {
        let nodes = self.m + self.k;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes]; // (neighbor, arc)
        for a in 0..self.m * self.k {
            if self.basic[a] {
                let i = a / self.k;
                let j = a % self.k;
                adj[self.source_node(i)].push((self.sink_node(j), a));
                adj[self.sink_node(j)].push((self.source_node(i), a));
            }
        }
        self.parent.fill(ROOT);
        self.parent_arc.fill(usize::MAX);
        let mut order = Vec::with_capacity(nodes);
        let mut visited = vec![false; nodes];
        visited[0] = true;
        order.push(0usize);
        let mut head = 0;
        while head < order.len() {
            let node = order[head];
            head += 1;
            for &(next, arc) in &adj[node] {
                if !visited[next] {
                    visited[next] = true;
                    self.parent[next] = node;
                    self.parent_arc[next] = arc;
                    order.push(next);
                }
            }
        }
        debug_assert!(visited.iter().all(|&v| v), "basis must span the graph");
        // Potentials: basic arcs satisfy c = u_i + v_j, root u_0 = 0.
        self.u[0] = 0.0;
        for &node in order.iter().skip(1) {
            let arc = self.parent_arc[node];
            let i = arc / self.k;
            let j = arc % self.k;
            if node < self.m {
                self.u[i] = self.cost[arc] - self.v[j];
            } else {
                self.v[j] = self.cost[arc] - self.u[i];
            }
        }
    }

    #[inline]
    fn reduced_cost(&self, a: usize) -> f64 {
        self.cost[a] - self.u[a / self.k] - self.v[a % self.k]
    }

    fn entering_bland(&self) -> Option<usize> {
        (0..self.m * self.k).find(|&a| !self.basic[a] && self.reduced_cost(a) < -self.pivot_tol)
    }

    fn entering_block(&mut self) -> Option<usize> {
        let arcs = self.m * self.k;
        let block = ((arcs as f64).sqrt() as usize).max(64);
        let mut best: Option<(usize, f64)> = None;
        let mut scanned = 0;
        let mut a = self.scan_start % arcs;
        while scanned < arcs {
            let stop = (scanned + block).min(arcs);
            while scanned < stop {
                if !self.basic[a] {
                    let r = self.reduced_cost(a);
                    if r < -self.pivot_tol && best.map_or(true, |(_, br)| r < br) {
                        best = Some((a, r));
                    }
                }
                a = if a + 1 == arcs { 0 } else { a + 1 };
                scanned += 1;
            }
            if let Some((arc, _)) = best {
                self.scan_start = a;
                return Some(arc);
            }
        }
        None
    }

    /// Tree path from `node` to the root as (arc, sign) with signs
    /// alternating −θ, +θ, ... starting at −θ.
    fn path_to_root(&self, mut node: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut sign = -1.0;
        while self.parent[node] != ROOT || node != 0 {
            let arc = self.parent_arc[node];
            if arc == usize::MAX {
                break;
            }
            out.push((arc, sign));
            sign = -sign;
            node = self.parent[node];
        }
        out
    }

    fn pivot(&mut self, entering: usize) -> bool {
        let i = entering / self.k;
        let j = entering % self.k;
        // Paths from both endpoints to the root; the shared tail cancels.
        let path_i = self.path_to_root(self.source_node(i));
        let path_j = self.path_to_root(self.sink_node(j));
        let mut cycle: Vec<(usize, f64)> = Vec::new();
        {
            // Drop the common suffix (arcs above the least common ancestor).
            let mut li = path_i.len();
            let mut lj = path_j.len();
            while li > 0 && lj > 0 && path_i[li - 1].0 == path_j[lj - 1].0 {
                li -= 1;
                lj -= 1;
            }
            cycle.extend_from_slice(&path_i[..li]);
            cycle.extend_from_slice(&path_j[..lj]);
        }
        // Blocking arc: min flow among the decreasing arcs, ties broken by
        // smallest arc id so degenerate pivots cannot cycle.
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for &(arc, sign) in &cycle {
            if sign < 0.0 {
                let fl = self.flow[arc];
                if fl < theta - 1e-18 || (fl <= theta && arc < leaving) {
                    theta = fl;
                    leaving = arc;
                }
            }
        }
        debug_assert!(leaving != usize::MAX, "cycle must contain a decreasing arc");
        let theta = theta.max(0.0);
        self.flow[entering] += theta;
        for &(arc, sign) in &cycle {
            self.flow[arc] += sign * theta;
            if self.flow[arc] < 0.0 {
                self.flow[arc] = 0.0;
            }
        }
        self.basic[leaving] = false;
        self.flow[leaving] = 0.0;
        self.basic[entering] = true;
        self.rebuild_tree();
        self.pivots += 1;
        theta > 0.0
    }

    fn solve(&mut self) -> Result<(), TransportError> {
        let limit = 2000 * (self.m + self.k).max(10);
        let mut degenerate_run = 0usize;
        let degeneracy_switch = 2 * (self.m + self.k);
        loop {
            if self.pivots > limit {
                return Err(TransportError::IterationLimit(self.pivots));
            }
            let use_bland =
                self.rule == PivotRule::Bland || degenerate_run > degeneracy_switch;
            let entering = if use_bland {
                self.entering_bland()
            } else {
                self.entering_block()
            };
            let Some(arc) = entering else {
                return Ok(());
            };
            if self.pivot(arc) {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
    }
}

/// Cost of the quantile (monotone) coupling on the line for the cost
/// `|x−y|^p / p`. Optimal for `p >= 1`; used to validate [`ot_cost`].
pub fn ot_oracle_1d(positions: &[f64], p: f64, nu1: &ProbMeasure, nu2: &ProbMeasure) -> f64 {
    debug_assert!(p >= 1.0);
    debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    debug_assert_eq!(positions.len(), nu1.len());
    let n = positions.len();
    let mut terms = Vec::new();
    let mut i = 0;
    let mut j = 0;
    let mut rem_i = nu1.get(0);
    let mut rem_j = nu2.get(0);
    while i < n && j < n {
        let mass = rem_i.min(rem_j);
        if mass > 0.0 {
            terms.push(mass * (positions[i] - positions[j]).abs().powf(p) / p);
        }
        rem_i -= mass;
        rem_j -= mass;
        if rem_i <= 1e-18 {
            i += 1;
            if i < n {
                rem_i = nu1.get(i);
            }
        }
        if rem_j <= 1e-18 {
            j += 1;
            if j < n {
                rem_j = nu2.get(j);
            }
        }
    }
    compensated_sum(terms)
}

/// The Bobkov-Götze defect `log ∫ e^{C⁻¹ Q₁ f} dμ − C⁻¹ ∫ f dμ`.
///
/// Nonpositivity for every bounded `f` is the dual statement of the
/// transport-entropy inequality at constant `C` for the cost `α(d)`.
pub fn bobkov_gotze_gap(
    space: &MetricSpace,
    cost: &CostFunction,
    mu: &ProbMeasure,
    c_const: f64,
    f: &ScalarField,
) -> f64 {
    assert!(c_const > 0.0);
    let q1 = inf_convolution(space, cost, f, 1.0);
    let inv_c = 1.0 / c_const;
    // logsumexp of C⁻¹ Q₁f against μ.
    let m = mu
        .support()
        .map(|i| inv_c * q1.get(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let s = compensated_sum(
        mu.support()
            .map(|i| mu.get(i) * (inv_c * q1.get(i) - m).exp()),
    );
    m + s.ln() - inv_c * mu.integrate(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SlopeRadiusPolicy;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn line_space(positions: &[f64]) -> MetricSpace {
        let n = positions.len();
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (positions[i] - positions[j]).abs()).collect())
            .collect();
        MetricSpace::from_matrix(&m, SlopeRadiusPolicy::Nearest).unwrap()
    }

    fn power_cost_matrix(space: &MetricSpace, p: f64) -> Vec<f64> {
        space.cost_matrix(|d| d.powf(p) / p)
    }

    #[test]
    fn identical_marginals_cost_zero() {
        let s = line_space(&[0.0, 1.0, 2.0]);
        let c = power_cost_matrix(&s, 2.0);
        let nu = ProbMeasure::new(vec![0.2, 0.5, 0.3]).unwrap();
        let plan = ot_cost(&c, &nu, &nu).unwrap();
        assert!(plan.cost.abs() < 1e-15);
    }

    #[test]
    fn two_point_flip() {
        let s = line_space(&[0.0, 1.0]);
        let c = s.cost_matrix(|d| d);
        let a = ProbMeasure::new(vec![1.0, 0.0]).unwrap();
        let b = ProbMeasure::new(vec![0.0, 1.0]).unwrap();
        let plan = ot_cost(&c, &a, &b).unwrap();
        assert!((plan.cost - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_monotone_shift() {
        // Quantile-coupling oracle by hand: shift each half-mass one site.
        let s = line_space(&[0.0, 1.0, 2.0]);
        let c = power_cost_matrix(&s, 2.0);
        let nu1 = ProbMeasure::new(vec![0.5, 0.5, 0.0]).unwrap();
        let nu2 = ProbMeasure::new(vec![0.0, 0.5, 0.5]).unwrap();
        let plan = ot_cost(&c, &nu1, &nu2).unwrap();
        assert!((plan.cost - 0.5).abs() < 1e-12);
        let oracle = ot_oracle_1d(&[0.0, 1.0, 2.0], 2.0, &nu1, &nu2);
        assert!((oracle - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_two_point_partial_move() {
        // 0.4 mass moves distance 1 at cost 1/2 each: 0.2.
        let nu1 = ProbMeasure::new(vec![0.7, 0.3]).unwrap();
        let nu2 = ProbMeasure::new(vec![0.3, 0.7]).unwrap();
        let oracle = ot_oracle_1d(&[0.0, 1.0], 2.0, &nu1, &nu2);
        assert!((oracle - 0.2).abs() < 1e-15);
        assert_eq!(ot_oracle_1d(&[0.0, 1.0], 2.0, &nu1, &nu1), 0.0);
    }

    #[test]
    fn simplex_matches_1d_oracle_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..60 {
            let n = rng.gen_range(2..=50);
            let mut positions: Vec<f64> = (0..n)
                .map(|i| i as f64 + rng.gen_range(0.0..0.5))
                .collect();
            positions.dedup_by(|a, b| *a <= *b);
            let s = line_space(&positions);
            let p = [1.0, 2.0, 3.0][trial % 3];
            let c = power_cost_matrix(&s, p);
            let nu1 = random_measure(&mut rng, positions.len());
            let nu2 = random_measure(&mut rng, positions.len());
            let plan = ot_cost(&c, &nu1, &nu2).unwrap();
            let oracle = ot_oracle_1d(&positions, p, &nu1, &nu2);
            assert!(
                (plan.cost - oracle).abs() <= 1e-9,
                "trial {trial}: lp={} oracle={}",
                plan.cost,
                oracle
            );
            assert!(plan.duality_gap(&nu1, &nu2).abs() <= 1e-9);
            check_plan(&plan, &c, &nu1, &nu2);
        }
    }

    fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> ProbMeasure {
        // Mix of dense and sparse weights to stress degeneracy handling.
        let masses: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        if masses.iter().all(|&m| m == 0.0) {
            return ProbMeasure::uniform(n);
        }
        ProbMeasure::from_masses(&masses).unwrap()
    }

    fn check_plan(plan: &TransportPlan, c: &[f64], nu1: &ProbMeasure, nu2: &ProbMeasure) {
        let n = nu1.len();
        for i in 0..n {
            let row: f64 = (0..n).map(|j| plan.pi[i * n + j]).sum();
            assert!((row - nu1.get(i)).abs() <= 1e-10, "row sum off at {i}");
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| plan.pi[i * n + j]).sum();
            assert!((col - nu2.get(j)).abs() <= 1e-10, "col sum off at {j}");
        }
        let recomputed: f64 = (0..n * n).map(|a| plan.pi[a] * c[a]).sum();
        assert!((recomputed - plan.cost).abs() <= 1e-10);
        // Dual feasibility: reduced costs nonnegative on the support sets.
        for i in nu1.support() {
            for j in nu2.support() {
                let r = c[i * n + j] - plan.potential_source[i] - plan.potential_sink[j];
                assert!(r >= -1e-9, "reduced cost {r} at ({i},{j})");
            }
        }
    }

    #[test]
    fn bland_and_block_rules_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(3..20);
            let pts: Vec<f64> = (0..n).map(|i| i as f64 * 0.7).collect();
            let s = line_space(&pts);
            let c = power_cost_matrix(&s, 2.0);
            let nu1 = random_measure(&mut rng, n);
            let nu2 = random_measure(&mut rng, n);
            let a = ot_cost_with_rule(&c, &nu1, &nu2, PivotRule::Bland).unwrap();
            let b = ot_cost_with_rule(&c, &nu1, &nu2, PivotRule::BlockSearch).unwrap();
            assert!((a.cost - b.cost).abs() <= 1e-10);
        }
    }

    #[test]
    fn symmetry_for_symmetric_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..15);
            let pts: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(0.0..0.3)).collect();
            let s = line_space(&pts);
            let c = power_cost_matrix(&s, 2.0);
            let nu1 = random_measure(&mut rng, n);
            let nu2 = random_measure(&mut rng, n);
            let fwd = ot_cost(&c, &nu1, &nu2).unwrap().cost;
            let bwd = ot_cost(&c, &nu2, &nu1).unwrap().cost;
            assert!((fwd - bwd).abs() <= 1e-10);
        }
    }

    #[test]
    fn brute_force_small_instances() {
        // Dense grid search over the coupling polytope's free coordinates,
        // with two zoom levels; n <= 3.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..15 {
            let n = rng.gen_range(2..=3);
            let pts: Vec<f64> = (0..n).map(|i| i as f64 * 1.3).collect();
            let s = line_space(&pts);
            let c = power_cost_matrix(&s, 2.0);
            let nu1 = ProbMeasure::from_masses(
                &(0..n).map(|_| rng.gen_range(0.05..1.0)).collect::<Vec<_>>(),
            )
            .unwrap();
            let nu2 = ProbMeasure::from_masses(
                &(0..n).map(|_| rng.gen_range(0.05..1.0)).collect::<Vec<_>>(),
            )
            .unwrap();
            let lp = ot_cost(&c, &nu1, &nu2).unwrap().cost;
            let brute = brute_force_ot(&c, &nu1, &nu2);
            assert!(
                (lp - brute).abs() <= 1e-6,
                "lp={lp} brute={brute} (n={n})"
            );
        }
    }

    fn brute_force_ot(c: &[f64], nu1: &ProbMeasure, nu2: &ProbMeasure) -> f64 {
        let n = nu1.len();
        let eval = |free: &[f64]| -> Option<f64> {
            // Free coordinates are the upper-left (n−1)×(n−1) block; the
            // last row/column are determined by the marginals.
            let mut pi = vec![0.0; n * n];
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    pi[i * n + j] = free[i * (n - 1) + j];
                }
            }
            for i in 0..n - 1 {
                let row: f64 = (0..n - 1).map(|j| pi[i * n + j]).sum();
                let rest = nu1.get(i) - row;
                if rest < -1e-12 {
                    return None;
                }
                pi[i * n + (n - 1)] = rest.max(0.0);
            }
            for j in 0..n {
                let col: f64 = (0..n - 1).map(|i| pi[i * n + j]).sum();
                let rest = nu2.get(j) - col;
                if rest < -1e-12 {
                    return None;
                }
                pi[(n - 1) * n + j] = rest.max(0.0);
            }
            let row_last: f64 = (0..n).map(|j| pi[(n - 1) * n + j]).sum();
            if (row_last - nu1.get(n - 1)).abs() > 1e-9 {
                return None;
            }
            Some((0..n * n).map(|a| pi[a] * c[a]).sum())
        };
        let dims = (n - 1) * (n - 1);
        let mut center = vec![0.25f64; dims];
        let mut radius = 0.5f64;
        let mut best = f64::INFINITY;
        for _level in 0..8 {
            let steps = 12usize;
            let mut grid_best = f64::INFINITY;
            let mut grid_point = center.clone();
            let mut idx = vec![0usize; dims];
            loop {
                let candidate: Vec<f64> = (0..dims)
                    .map(|d| {
                        (center[d] - radius + 2.0 * radius * idx[d] as f64 / steps as f64)
                            .max(0.0)
                    })
                    .collect();
                if let Some(cost) = eval(&candidate) {
                    if cost < grid_best {
                        grid_best = cost;
                        grid_point = candidate;
                    }
                }
                // Odometer increment.
                let mut d = 0;
                while d < dims {
                    idx[d] += 1;
                    if idx[d] <= steps {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == dims {
                    break;
                }
            }
            if grid_best < best {
                best = grid_best;
            }
            center = grid_point;
            radius /= steps as f64 / 2.0;
        }
        best
    }

    #[test]
    fn bobkov_gotze_examples() {
        let s = line_space(&[0.0, 1.0]);
        let cost = CostFunction::quadratic();
        let mu = ProbMeasure::uniform(2);
        // Constant field: Q₁ of a constant is the constant, gap is exactly 0.
        let c0 = ScalarField::constant(2, 3.0);
        assert_eq!(bobkov_gotze_gap(&s, &cost, &mu, 1.0, &c0), 0.0);
        // Large constant weakens the inequality: gap negative.
        let f = ScalarField::new(vec![0.0, 1.0]).unwrap();
        let gap = bobkov_gotze_gap(&s, &cost, &mu, 100.0, &f);
        assert!(gap < 0.0, "gap = {gap}");
    }

    #[test]
    fn degenerate_marginals_are_reinserted() {
        let s = line_space(&[0.0, 1.0, 2.0, 3.0]);
        let c = power_cost_matrix(&s, 2.0);
        let nu1 = ProbMeasure::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let nu2 = ProbMeasure::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let plan = ot_cost(&c, &nu1, &nu2).unwrap();
        check_plan(&plan, &c, &nu1, &nu2);
        // Both halves move one site: 0.5·(1/2) + 0.5·(1/2).
        assert!((plan.cost - 0.5).abs() < 1e-12);
        for j in 0..4 {
            assert_eq!(plan.pi[1 * 4 + j], 0.0);
        }
    }
}
