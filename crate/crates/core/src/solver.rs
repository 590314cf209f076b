//! Solvers for the canonical outcomes of a market instance — socially
//! optimal allocations, Cournot first-order candidates, monopoly
//! outcomes — plus direct equilibrium verification and best-response
//! dynamics.
//!
//! Every search is a deterministic scan-plus-bisection over the box
//! `[0, R]` per supplier (aggregates over `[0, N·R]`): no randomness, no
//! global state.  Quantities are located to `quantity_tol`, first-order
//! conditions are certified against `residual_tol`, and profit
//! improvements are compared against `profit_tol` relative to the profit
//! at stake.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Allocation, MarketInstance};
use crate::numeric::{bisect_leftmost, bisect_sign_change, golden_max};

/// Numeric knobs shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Absolute scale for quantity and marginal-cost-level bisections.
    pub quantity_tol: f64,
    /// Largest first-order residual a solution may carry and still count
    /// as verified.
    pub residual_tol: f64,
    /// Relative profit improvement below which a deviation is a tie.
    pub profit_tol: f64,
    /// Points in the coarse sign-change scan for candidate aggregates.
    pub scan_points: usize,
    /// Points in profit and objective grids (verification, monopoly,
    /// best-response search).
    pub grid_points: usize,
    /// Cap on best-response sweeps.
    pub max_sweeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            quantity_tol: 1e-12,
            residual_tol: 1e-8,
            profit_tol: 1e-6,
            scan_points: 512,
            grid_points: 10_000,
            max_sweeps: 500,
        }
    }
}

/// Default configuration, with `residual_tol` overridden by the
/// `COURNOT_TOL` environment variable when it holds a positive number.
pub fn config_from_env() -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Ok(raw) = std::env::var("COURNOT_TOL") {
        if let Ok(v) = raw.trim().parse::<f64>() {
            if v.is_finite() && v > 0.0 {
                cfg.residual_tol = v;
            }
        }
    }
    cfg
}

/// Which outcome a [`SolveResult`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveRole {
    SocialOptimum,
    CournotCandidate,
    Monopoly,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("degenerate market: the price at zero does not exceed the cheapest marginal cost, so no supplier can profitably produce")]
    Degenerate,
    #[error("the optimality gap is still positive at the aggregate search bound; raise R")]
    SearchBoundTooSmall,
    #[error("the candidate search requires a convex demand curve")]
    NonConvexDemand,
    #[error("no first-order crossing found inside the search range")]
    NoCandidate,
    #[error("every first-order crossing sits at a kink of the demand curve")]
    NoDifferentiableCandidate,
    #[error("the objective is still rising at the search bound; no bounded maximizer")]
    Unbounded,
}

/// One solved outcome: an allocation plus the certificates used to judge
/// it.  `residual` is the largest first-order violation found; `verified`
/// means it stayed within the configured tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub role: SolveRole,
    pub alloc: Allocation,
    pub aggregate: f64,
    pub price: f64,
    pub welfare: f64,
    pub residual: f64,
    pub verified: bool,
}

/// Cheapest way to produce an aggregate quantity: the minimal total cost,
/// a split attaining it, and the marginal-cost level at the split.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCost {
    pub value: f64,
    pub split: Vec<f64>,
    pub level: f64,
}

/// Splits an aggregate quantity across suppliers at minimal total cost,
/// capping each supplier at the search bound.
///
/// Works by bisecting the marginal-cost level `m` until aggregate supply
/// `sum_n sup{x <= R : C'_n(x) <= m}` reaches `x`.  Suppliers whose
/// marginal cost is constant and equal to the level are flat at the
/// margin; the quantity left over after everyone else supplies is split
/// equally among them.
pub fn aggregate_cost(inst: &MarketInstance, x: f64, cfg: &SolverConfig) -> AggregateCost {
    assert!(x.is_finite() && x >= 0.0, "aggregate quantity must be finite and nonnegative");
    let r = inst.search_bound();
    let nr = inst.n() as f64 * r;
    debug_assert!(x <= nr * (1.0 + 1e-6) + 1e-9, "aggregate exceeds the search box");
    let x = x.min(nr);
    if x == 0.0 {
        return AggregateCost {
            value: 0.0,
            split: vec![0.0; inst.n()],
            level: inst.min_marginal_at_zero(),
        };
    }

    let supply = |m: f64| -> f64 { inst.costs().iter().map(|c| c.supply_at(m, r)).sum() };
    let level = if supply(0.0) >= x {
        0.0
    } else {
        let mut hi = inst.min_marginal_at_zero().max(1.0);
        while supply(hi) < x {
            hi *= 2.0;
            assert!(hi.is_finite(), "marginal-cost level search diverged");
        }
        bisect_leftmost(|m| supply(m) >= x, 0.0, hi, cfg.quantity_tol * hi.max(1.0))
    };

    // Flat suppliers sit exactly at the level and can take any quantity;
    // everyone else supplies their unique level-matching amount.
    let flat_tol = 1e-9 * level.max(1.0);
    let mut split = vec![0.0; inst.n()];
    let mut flats = Vec::new();
    for (i, c) in inst.costs().iter().enumerate() {
        match c.constant_marginal() {
            Some(s) if (s - level).abs() <= flat_tol => flats.push(i),
            _ => split[i] = c.supply_at(level, r),
        }
    }
    if !flats.is_empty() {
        let base: f64 = split.iter().sum();
        let each = ((x - base) / flats.len() as f64).clamp(0.0, r);
        for &i in &flats {
            split[i] = each;
        }
    }
    // Absorb bisection drift so the split sums to x exactly.  The crumb
    // goes to a supplier already producing: activating an idle one, even
    // infinitesimally, would put it on the wrong side of its own
    // first-order condition.
    let gap = x - split.iter().sum::<f64>();
    if gap != 0.0 {
        let pick = if gap > 0.0 {
            (0..split.len())
                .filter(|&i| split[i] > 0.0)
                .max_by(|&a, &b| (r - split[a]).total_cmp(&(r - split[b])))
                .or_else(|| {
                    (0..split.len()).max_by(|&a, &b| (r - split[a]).total_cmp(&(r - split[b])))
                })
        } else {
            (0..split.len()).max_by(|&a, &b| split[a].total_cmp(&split[b]))
        };
        if let Some(i) = pick {
            split[i] = (split[i] + gap).clamp(0.0, r);
        }
    }

    let value = inst.costs().iter().zip(&split).map(|(c, &v)| c.cost(v)).sum();
    AggregateCost { value, split, level }
}

fn is_degenerate(inst: &MarketInstance) -> bool {
    !(inst.demand().eval(0.0) > inst.min_marginal_at_zero())
}

/// Largest violation of the per-supplier first-order conditions
/// `C'_n(x_n) + markup * x_n = price` (active) and
/// `C'_n(0) >= price` (inactive).
pub fn first_order_residual(inst: &MarketInstance, split: &[f64], price: f64, markup: f64) -> f64 {
    let mut worst = 0.0f64;
    for (c, &x) in inst.costs().iter().zip(split) {
        let v = if x > 0.0 {
            (c.marginal(x) + markup * x - price).abs()
        } else {
            (price - c.marginal(0.0)).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Finds the allocation maximizing aggregate surplus, taking the smallest
/// aggregate among maximizers when the surplus is flat at the top.
///
/// The aggregate is the leftmost point where the price no longer exceeds
/// the marginal-cost level; the split comes from [`aggregate_cost`].
pub fn solve_social_optimum(
    inst: &MarketInstance,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    if is_degenerate(inst) {
        return Err(SolveError::Degenerate);
    }
    let nr = inst.n() as f64 * inst.search_bound();
    let slack = |x: f64| inst.demand().eval(x) - aggregate_cost(inst, x, cfg).level;
    if slack(nr) > 0.0 {
        return Err(SolveError::SearchBoundTooSmall);
    }
    let xs = bisect_leftmost(|x| slack(x) <= 0.0, 0.0, nr, cfg.quantity_tol * nr.max(1.0));

    let agg = aggregate_cost(inst, xs, cfg);
    let alloc = Allocation::new(agg.split).expect("optimal split is a valid allocation");
    let aggregate = alloc.aggregate();
    let price = inst.demand().eval(aggregate);
    let residual = first_order_residual(inst, alloc.x(), price, 0.0);
    let welfare = inst.welfare(&alloc);
    Ok(SolveResult {
        role: SolveRole::SocialOptimum,
        alloc,
        aggregate,
        price,
        welfare,
        residual,
        verified: residual <= cfg.residual_tol,
    })
}

/// Finds every aggregate `X` where the shares solving
/// `C'_n(x_n) = p(X) + x_n p'(X)` sum back to `X` and the demand curve is
/// differentiable, sorted by aggregate.  Each crossing is located by a
/// geometric scan and bisection; crossings pinned to a kink of the demand
/// curve are discarded.
pub fn solve_cournot_candidates(
    inst: &MarketInstance,
    cfg: &SolverConfig,
) -> Result<Vec<SolveResult>, SolveError> {
    if is_degenerate(inst) {
        return Err(SolveError::Degenerate);
    }
    if !inst.demand().convexity_check() {
        return Err(SolveError::NonConvexDemand);
    }
    let nr = inst.n() as f64 * inst.search_bound();
    let lo = 1e-9 * nr;

    // Excess of the aggregate best-share response over the aggregate
    // itself; a supplier whose share is unbounded pushes it to +inf.
    let gap = |x: f64| -> f64 {
        let p = inst.demand().eval(x);
        let m = (-inst.demand().dplus(x)).max(0.0);
        let mut total = 0.0;
        for c in inst.costs() {
            match c.share_at(p, m) {
                Ok(s) => total += s,
                Err(_) => return f64::INFINITY,
            }
        }
        total - x
    };

    let steps = cfg.scan_points.max(16);
    let ratio = (nr / lo).powf(1.0 / (steps - 1) as f64);
    let xs: Vec<f64> = (0..steps)
        .map(|j| if j + 1 == steps { nr } else { lo * ratio.powi(j as i32) })
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| gap(x)).collect();

    let tol = cfg.quantity_tol * nr.max(1.0);
    let mut crossings = 0usize;
    let mut roots = Vec::new();
    for j in 1..steps {
        let (a, b, ga, gb) = (xs[j - 1], xs[j], gs[j - 1], gs[j]);
        if ga == 0.0 {
            crossings += 1;
            roots.push(a);
        } else if gb != 0.0 && ga.signum() != gb.signum() {
            crossings += 1;
            roots.push(bisect_sign_change(&gap, a, b, tol));
        }
    }
    if gs[steps - 1] == 0.0 {
        crossings += 1;
        roots.push(nr);
    }
    if crossings == 0 {
        return Err(SolveError::NoCandidate);
    }
    roots.dedup_by(|b, a| (*b - *a).abs() <= 1e-7 * nr.max(1.0));

    let mut out = Vec::new();
    for &root in &roots {
        // A crossing straddling a kink is no candidate: the one-sided
        // slopes just around it must agree.
        let d = (1e-9 * root).max(4.0 * tol);
        let sa = inst.demand().dplus((root - d).max(lo * 0.5));
        let sb = inst.demand().dminus(root + d);
        if (sa - sb).abs() > 1e-6 * sa.abs().max(sb.abs()).max(1.0) {
            continue;
        }

        let p = inst.demand().eval(root);
        let m = (-inst.demand().dplus(root)).max(0.0);
        let shares: Result<Vec<f64>, _> = inst.costs().iter().map(|c| c.share_at(p, m)).collect();
        let Ok(shares) = shares else { continue };
        let alloc = Allocation::new(shares).expect("shares are finite and nonnegative");
        let aggregate = alloc.aggregate();
        let price = inst.demand().eval(aggregate);
        let residual =
            (aggregate - root).abs() + first_order_residual(inst, alloc.x(), price, m);
        let welfare = inst.welfare(&alloc);
        out.push(SolveResult {
            role: SolveRole::CournotCandidate,
            alloc,
            aggregate,
            price,
            welfare,
            residual,
            verified: residual <= cfg.residual_tol,
        });
    }
    if out.is_empty() {
        return Err(SolveError::NoDifferentiableCandidate);
    }
    out.sort_by(|u, v| u.aggregate.total_cmp(&v.aggregate));
    Ok(out)
}

/// The candidate with the smallest aggregate, when any exists.
pub fn solve_cournot_candidate(
    inst: &MarketInstance,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    let mut all = solve_cournot_candidates(inst, cfg)?;
    Ok(all.remove(0))
}

/// Best deviation for one supplier against a fixed aggregate of the
/// others: grid scan over `[0, R]`, then golden-section refinement of
/// every strict local maximum (the best few dozen).
fn best_deviation(
    inst: &MarketInstance,
    idx: usize,
    others: f64,
    cfg: &SolverConfig,
) -> (f64, f64) {
    let r = inst.search_bound();
    let cost = &inst.costs()[idx];
    let payoff = |z: f64| -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        z * inst.demand().eval(others + z) - cost.cost(z)
    };

    let g = cfg.grid_points.max(64);
    let step = r / g as f64;
    let vals: Vec<f64> = (0..=g).map(|i| payoff(step * i as f64)).collect();

    let mut best = (0.0, vals[0]);
    for (i, &v) in vals.iter().enumerate() {
        if v > best.1 {
            best = (step * i as f64, v);
        }
    }

    let mut peaks: Vec<usize> = (0..=g)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
            let right = if i == g { f64::NEG_INFINITY } else { vals[i + 1] };
            (vals[i] > left && vals[i] >= right) || (vals[i] >= left && vals[i] > right)
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(32);
    for &i in &peaks {
        let a = step * i.saturating_sub(1) as f64;
        let b = step * (i + 1).min(g) as f64;
        let (z, v) = golden_max(&payoff, a, b, 1e-12 * r.max(1.0));
        if v > best.1 {
            best = (z, v);
        }
    }
    best
}

/// Per-supplier deviation audit of an allocation.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// No supplier found an improvement beyond the profit tolerance.
    pub verified: bool,
    pub max_deficit: f64,
    /// Best profit improvement found per supplier (0 when none).
    pub deficits: Vec<f64>,
    /// Where each supplier would rather produce.
    pub best_responses: Vec<f64>,
    /// Profit of each supplier at the audited allocation.
    pub profits: Vec<f64>,
}

/// Audits an allocation supplier by supplier: does anyone gain from a
/// unilateral move within `[0, R]`?
pub fn verify_equilibrium(
    inst: &MarketInstance,
    alloc: &Allocation,
    cfg: &SolverConfig,
) -> VerifyReport {
    assert_eq!(alloc.len(), inst.n(), "allocation does not match supplier count");
    let n = inst.n();
    let total = alloc.aggregate();
    let mut deficits = vec![0.0; n];
    let mut best_responses = vec![0.0; n];
    let mut profits = vec![0.0; n];
    for i in 0..n {
        let own = alloc.x()[i];
        let here = inst.profit(alloc, i);
        let (z, best) = best_deviation(inst, i, (total - own).max(0.0), cfg);
        profits[i] = here;
        if best > here {
            best_responses[i] = z;
            deficits[i] = best - here;
        } else {
            best_responses[i] = own;
        }
    }
    let max_deficit = deficits.iter().fold(0.0f64, |a, &b| a.max(b));
    let verified = deficits
        .iter()
        .zip(&profits)
        .all(|(d, p)| *d <= cfg.profit_tol * p.abs().max(1.0));
    VerifyReport { verified, max_deficit, deficits, best_responses, profits }
}

/// Maximizes joint profit `X p(X) - min-cost(X)` over the aggregate,
/// splitting production at minimal cost.  Errors with
/// [`SolveError::Unbounded`] when the maximum sits at the edge of the
/// search box.
pub fn solve_monopoly(inst: &MarketInstance, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    if is_degenerate(inst) {
        return Err(SolveError::Degenerate);
    }
    let nr = inst.n() as f64 * inst.search_bound();
    let objective = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        x * inst.demand().eval(x) - aggregate_cost(inst, x, cfg).value
    };

    let g = cfg.grid_points.max(64);
    let step = nr / g as f64;
    let vals: Vec<f64> = (0..=g).map(|i| objective(step * i as f64)).collect();
    let mut best = (0.0, vals[0]);
    for (i, &v) in vals.iter().enumerate() {
        if v > best.1 {
            best = (step * i as f64, v);
        }
    }
    let mut peaks: Vec<usize> = (0..=g)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
            let right = if i == g { f64::NEG_INFINITY } else { vals[i + 1] };
            (vals[i] > left && vals[i] >= right) || (vals[i] >= left && vals[i] > right)
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(32);
    for &i in &peaks {
        let a = step * i.saturating_sub(1) as f64;
        let b = step * (i + 1).min(g) as f64;
        let (z, v) = golden_max(&objective, a, b, 1e-12 * nr.max(1.0));
        if v > best.1 {
            best = (z, v);
        }
    }

    let mut xp = best.0;
    if xp >= nr - 2.0 * step {
        return Err(SolveError::Unbounded);
    }
    debug_assert!(xp > 0.0, "nondegenerate markets have a positive joint optimum");

    // Value comparisons cannot place a smooth maximum more precisely than
    // the square root of float precision, so polish with the stationarity
    // defect, which falls through zero at the maximizer.  Kinks and flat
    // stretches show no clean sign change and keep the refined point.
    let defect = |x: f64| {
        inst.demand().eval(x) + x * inst.demand().dplus(x) - aggregate_cost(inst, x, cfg).level
    };
    let delta = 2.0 * step;
    let (lo, hi) = ((xp - delta).max(0.25 * xp), xp + delta);
    if defect(lo) > 0.0 && defect(hi) < 0.0 {
        xp = bisect_leftmost(|x| defect(x) <= 0.0, lo, hi, 1e-14 * nr.max(1.0));
    }

    let agg = aggregate_cost(inst, xp, cfg);
    let alloc = Allocation::new(agg.split).expect("cost split is a valid allocation");
    let aggregate = alloc.aggregate();
    let price = inst.demand().eval(aggregate);

    // Stationarity certificate: the marginal-revenue interval spanned by
    // the one-sided demand slopes must meet the marginal-cost level just
    // around the solution.
    let mr_a = price + aggregate * inst.demand().dminus(aggregate);
    let mr_b = price + aggregate * inst.demand().dplus(aggregate);
    let (mr_lo, mr_hi) = (mr_a.min(mr_b), mr_a.max(mr_b));
    let h = 1e-7 * aggregate.max(1.0);
    let lv_a = aggregate_cost(inst, (aggregate - h).max(0.0), cfg).level;
    let lv_b = aggregate_cost(inst, (aggregate + h).min(nr), cfg).level;
    let (lv_lo, lv_hi) = (lv_a.min(lv_b), lv_a.max(lv_b));
    let residual = (mr_lo - lv_hi).max(lv_lo - mr_hi).max(0.0);

    let welfare = inst.welfare(&alloc);
    Ok(SolveResult {
        role: SolveRole::Monopoly,
        alloc,
        aggregate,
        price,
        welfare,
        residual,
        verified: residual <= cfg.residual_tol,
    })
}

/// Trace of sequential best-response dynamics.
#[derive(Debug, Clone, Serialize)]
pub struct BrdReport {
    /// Allocation after each sweep, starting point included.
    pub trajectory: Vec<Allocation>,
    pub sweeps: usize,
    /// Whether the sup-change dropped below tolerance before the sweep cap.
    pub converged: bool,
    /// Audit of the final allocation.
    pub verify: VerifyReport,
}

/// Runs sequential best-response sweeps from a starting allocation.
/// A supplier moves only when the improvement clears a relative tie
/// threshold, so exact equilibria are fixed points even on flat profit
/// plateaus.
pub fn best_response_dynamics(
    inst: &MarketInstance,
    start: &Allocation,
    cfg: &SolverConfig,
) -> BrdReport {
    assert_eq!(start.len(), inst.n(), "allocation does not match supplier count");
    let r = inst.search_bound();
    let mut x: Vec<f64> = start.x().to_vec();
    let mut trajectory = vec![start.clone()];
    let mut converged = false;
    let mut sweeps = 0;
    for _ in 0..cfg.max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for i in 0..inst.n() {
            let others = (x.iter().sum::<f64>() - x[i]).max(0.0);
            let here = if x[i] > 0.0 {
                x[i] * inst.demand().eval(others + x[i]) - inst.costs()[i].cost(x[i])
            } else {
                0.0
            };
            let (z, best) = best_deviation(inst, i, others, cfg);
            if best - here > 1e-12 * here.abs().max(1.0) {
                max_change = max_change.max((z - x[i]).abs());
                x[i] = z;
            }
        }
        trajectory.push(Allocation::new(x.clone()).expect("dynamics stay within the box"));
        if max_change < 1e-10 * r.max(1.0) {
            converged = true;
            break;
        }
    }
    let last = trajectory.last().expect("trajectory holds the start").clone();
    let verify = verify_equilibrium(inst, &last, cfg);
    BrdReport { trajectory, sweeps, converged, verify }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostFunction;
    use crate::demand::InverseDemand;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn kinked_two_segment() -> InverseDemand {
        InverseDemand::piecewise_linear(vec![
            [0.0, 4.0],
            [4.0 / 3.0, 8.0 / 3.0],
            [44.0 / 3.0, 0.0],
        ])
        .unwrap()
    }

    fn quad_duopoly_flat_price() -> MarketInstance {
        MarketInstance::new(
            InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap(),
            vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::quadratic(1.0).unwrap()],
            Some(2.0),
        )
        .unwrap()
    }

    fn single_quad() -> MarketInstance {
        MarketInstance::new(
            kinked_two_segment(),
            vec![CostFunction::quadratic(1.0).unwrap()],
            None,
        )
        .unwrap()
    }

    fn single_linear_two() -> MarketInstance {
        MarketInstance::new(kinked_two_segment(), vec![CostFunction::linear(2.0).unwrap()], Some(32.0))
            .unwrap()
    }

    fn flat_tail_duopoly() -> MarketInstance {
        MarketInstance::new(
            InverseDemand::piecewise_linear(vec![[0.0, 2.0], [1.0, 1.0], [3.0, 1.0]]).unwrap(),
            vec![CostFunction::linear(1.0).unwrap(), CostFunction::linear(1.0).unwrap()],
            None,
        )
        .unwrap()
    }

    fn fringe_market(n: usize) -> MarketInstance {
        let mut costs = vec![CostFunction::linear(0.0).unwrap()];
        let slope = 1.0 / 3.0 - 1.0 / (3.0 * (n as f64 - 1.0));
        for _ in 1..n {
            costs.push(CostFunction::linear(slope).unwrap());
        }
        MarketInstance::new(InverseDemand::affine(1.0, 1.0).unwrap(), costs, None).unwrap()
    }

    fn fringe_equilibrium(n: usize) -> Allocation {
        let mut x = vec![1.0 / 3.0];
        x.extend(std::iter::repeat(1.0 / (3.0 * (n as f64 - 1.0))).take(n - 1));
        Allocation::new(x).unwrap()
    }

    #[test]
    fn aggregate_cost_level_and_split() {
        let demand = InverseDemand::affine(1.0, 21.0).unwrap();
        let cheap_dear = MarketInstance::new(
            demand.clone(),
            vec![CostFunction::linear(1.0).unwrap(), CostFunction::linear(2.0).unwrap()],
            Some(3.0),
        )
        .unwrap();
        let agg = aggregate_cost(&cheap_dear, 3.0, &cfg());
        assert!((agg.level - 1.0).abs() < 1e-9);
        assert!((agg.split[0] - 3.0).abs() < 1e-9 && agg.split[1].abs() < 1e-12);
        assert!((agg.value - 3.0).abs() < 1e-9);

        let quads = MarketInstance::new(
            demand.clone(),
            vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::quadratic(1.0).unwrap()],
            Some(10.0),
        )
        .unwrap();
        let agg = aggregate_cost(&quads, 2.0, &cfg());
        assert!((agg.level - 2.0).abs() < 1e-9);
        assert!((agg.split[0] - 1.0).abs() < 1e-9 && (agg.split[1] - 1.0).abs() < 1e-9);
        assert!((agg.value - 2.0).abs() < 1e-9);
        assert!((agg.split[0] + agg.split[1] - 2.0).abs() < 1e-14);

        let mixed = MarketInstance::new(
            demand,
            vec![CostFunction::linear(1.0).unwrap(), CostFunction::quadratic(1.0).unwrap()],
            Some(10.0),
        )
        .unwrap();
        let agg = aggregate_cost(&mixed, 2.0, &cfg());
        assert!((agg.level - 1.0).abs() < 1e-9);
        assert!((agg.split[0] - 1.5).abs() < 1e-9 && (agg.split[1] - 0.5).abs() < 1e-9);
        assert!((agg.value - 1.75).abs() < 1e-9);

        let zero = aggregate_cost(&mixed, 0.0, &cfg());
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.split, vec![0.0, 0.0]);
        // The quadratic's marginal cost starts at zero.
        assert_eq!(zero.level, 0.0);
    }

    #[test]
    fn social_optimum_closed_forms() {
        let opt = solve_social_optimum(&fringe_market(10), &cfg()).unwrap();
        assert!((opt.aggregate - 1.0).abs() < 1e-9);
        assert!((opt.alloc.x()[0] - 1.0).abs() < 1e-9);
        assert!(opt.alloc.x()[1..].iter().all(|&v| v.abs() < 1e-9));
        assert!((opt.welfare - 0.5).abs() < 1e-9);
        assert!(opt.price.abs() < 1e-9);
        assert!(opt.verified && opt.residual <= 1e-8);

        let opt = solve_social_optimum(&single_quad(), &cfg()).unwrap();
        assert!((opt.aggregate - 4.0 / 3.0).abs() < 1e-9);
        assert!((opt.welfare - 8.0 / 3.0).abs() < 1e-9);
        assert!((opt.price - 8.0 / 3.0).abs() < 1e-9);
        assert!(opt.verified);

        // Flat segments: minimal aggregate, equal split among the flat
        // marginal suppliers.
        let opt = solve_social_optimum(&flat_tail_duopoly(), &cfg()).unwrap();
        assert!((opt.aggregate - 1.0).abs() < 1e-9);
        assert!((opt.alloc.x()[0] - 0.5).abs() < 1e-9);
        assert!((opt.alloc.x()[1] - 0.5).abs() < 1e-9);
        assert!((opt.welfare - 0.5).abs() < 1e-9);
        assert!((opt.price - 1.0).abs() < 1e-9);

        let opt = solve_social_optimum(&quad_duopoly_flat_price(), &cfg()).unwrap();
        assert!((opt.aggregate - 1.0).abs() < 1e-9);
        assert!((opt.alloc.x()[0] - 0.5).abs() < 1e-9);
        assert!((opt.welfare - 0.5).abs() < 1e-9);
    }

    #[test]
    fn social_optimum_errors() {
        let degenerate = MarketInstance::new(
            InverseDemand::affine(1.0, 1.0).unwrap(),
            vec![CostFunction::linear(1.5).unwrap()],
            None,
        )
        .unwrap();
        assert_eq!(solve_social_optimum(&degenerate, &cfg()).unwrap_err(), SolveError::Degenerate);

        let cramped = MarketInstance::new(
            InverseDemand::affine(1.0, 1.0).unwrap(),
            vec![CostFunction::linear(0.0).unwrap()],
            Some(0.1),
        )
        .unwrap();
        assert_eq!(
            solve_social_optimum(&cramped, &cfg()).unwrap_err(),
            SolveError::SearchBoundTooSmall
        );
    }

    #[test]
    fn cournot_candidates_single_root() {
        let list = solve_cournot_candidates(&fringe_market(10), &cfg()).unwrap();
        assert_eq!(list.len(), 1);
        let c = &list[0];
        assert!((c.aggregate - 2.0 / 3.0).abs() < 1e-9);
        assert!((c.alloc.x()[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!(c.alloc.x()[1..].iter().all(|&v| (v - 1.0 / 27.0).abs() < 1e-9));
        assert!((c.price - 1.0 / 3.0).abs() < 1e-9);
        assert!(c.verified && c.residual <= 1e-8);

        let list = solve_cournot_candidates(&single_quad(), &cfg()).unwrap();
        assert_eq!(list.len(), 1);
        assert!((list[0].aggregate - 1.0).abs() < 1e-9);
        assert!(list[0].verified);

        // The flat-price region supports no share crossing; only the
        // sloped segment yields one.
        let list = solve_cournot_candidates(&flat_tail_duopoly(), &cfg()).unwrap();
        assert_eq!(list.len(), 1);
        assert!((list[0].aggregate - 2.0 / 3.0).abs() < 1e-9);
        assert!((list[0].alloc.x()[0] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn cournot_candidates_skip_kink_crossings() {
        // With a linear cost the share map jumps upward across the demand
        // kink: the sign change there must be discarded, leaving the two
        // smooth crossings.
        let list = solve_cournot_candidates(&single_linear_two(), &cfg()).unwrap();
        assert_eq!(list.len(), 2);
        assert!((list[0].aggregate - 1.0).abs() < 1e-9);
        assert!((list[1].aggregate - 7.0 / 3.0).abs() < 1e-9);
        assert!(list.iter().all(|c| c.verified && c.residual <= 1e-8));

        let first = solve_cournot_candidate(&single_linear_two(), &cfg()).unwrap();
        assert!((first.aggregate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cournot_candidate_errors() {
        let concave = MarketInstance::new(
            InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0], [1.1, 0.0]]).unwrap(),
            vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::linear(1.0).unwrap()],
            None,
        )
        .unwrap();
        assert_eq!(
            solve_cournot_candidates(&concave, &cfg()).unwrap_err(),
            SolveError::NonConvexDemand
        );

        let degenerate = MarketInstance::new(
            InverseDemand::affine(1.0, 1.0).unwrap(),
            vec![CostFunction::linear(1.5).unwrap()],
            None,
        )
        .unwrap();
        assert_eq!(
            solve_cournot_candidates(&degenerate, &cfg()).unwrap_err(),
            SolveError::Degenerate
        );

        // A cheap quadratic against a flat price wants far more than the
        // box allows: the share gap never crosses zero.
        let runaway = MarketInstance::new(
            InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap(),
            vec![CostFunction::quadratic(0.01).unwrap()],
            Some(2.0),
        )
        .unwrap();
        assert_eq!(
            solve_cournot_candidates(&runaway, &cfg()).unwrap_err(),
            SolveError::NoCandidate
        );
    }

    #[test]
    fn verify_accepts_equilibria_and_finds_deviations() {
        let report = verify_equilibrium(&fringe_market(10), &fringe_equilibrium(10), &cfg());
        assert!(report.verified);
        assert!(report.max_deficit <= 1e-8);

        let report = verify_equilibrium(
            &single_quad(),
            &Allocation::new(vec![1.0]).unwrap(),
            &cfg(),
        );
        assert!(report.verified);

        // Against a linear cost the same point stops being an
        // equilibrium: the profitable move is on the far segment.
        let report = verify_equilibrium(
            &single_linear_two(),
            &Allocation::new(vec![1.0]).unwrap(),
            &cfg(),
        );
        assert!(!report.verified);
        assert!((report.best_responses[0] - 7.0 / 3.0).abs() < 1e-6);
        assert!((report.deficits[0] - 4.0 / 45.0).abs() < 1e-9);
        assert!((report.profits[0] - 1.0).abs() < 1e-12);

        // Flat profit plateau: no strict improvement anywhere.
        let report = verify_equilibrium(
            &flat_tail_duopoly(),
            &Allocation::new(vec![1.0, 1.0]).unwrap(),
            &cfg(),
        );
        assert!(report.verified);
        assert!(report.max_deficit <= 1e-12);
    }

    #[test]
    fn monopoly_outcomes() {
        let mono = solve_monopoly(&fringe_market(10), &cfg()).unwrap();
        assert!((mono.aggregate - 0.5).abs() < 1e-9);
        assert!((mono.alloc.x()[0] - 0.5).abs() < 1e-9);
        assert!((mono.price - 0.5).abs() < 1e-9);
        assert!((mono.welfare - 0.375).abs() < 1e-9);
        assert!(mono.verified);

        // Flat price, two quadratics: joint profit X - X^2/2 peaks at 1.
        let mono = solve_monopoly(&quad_duopoly_flat_price(), &cfg()).unwrap();
        assert!((mono.aggregate - 1.0).abs() < 1e-7);
        assert!((mono.alloc.x()[0] - 0.5).abs() < 1e-7);
        assert!((mono.price - 1.0).abs() < 1e-12);
        assert!(mono.verified);
    }

    #[test]
    fn monopoly_unbounded_and_degenerate() {
        let runaway = MarketInstance::new(
            InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap(),
            vec![CostFunction::linear(0.5).unwrap()],
            Some(4.0),
        )
        .unwrap();
        assert_eq!(solve_monopoly(&runaway, &cfg()).unwrap_err(), SolveError::Unbounded);

        let degenerate = MarketInstance::new(
            InverseDemand::affine(1.0, 1.0).unwrap(),
            vec![CostFunction::linear(1.5).unwrap()],
            None,
        )
        .unwrap();
        assert_eq!(solve_monopoly(&degenerate, &cfg()).unwrap_err(), SolveError::Degenerate);
    }

    #[test]
    fn best_response_dynamics_converges_and_respects_plateaus() {
        let inst = flat_tail_duopoly();
        let report = best_response_dynamics(&inst, &Allocation::zeros(2), &cfg());
        assert!(report.converged);
        assert!(report.verify.verified);
        let last = report.trajectory.last().unwrap();
        assert!((last.x()[0] - 1.0 / 3.0).abs() < 1e-5);
        assert!((last.x()[1] - 1.0 / 3.0).abs() < 1e-5);

        // (1, 1) earns zero profit on a flat plateau; ties keep it fixed.
        let report =
            best_response_dynamics(&inst, &Allocation::new(vec![1.0, 1.0]).unwrap(), &cfg());
        assert!(report.converged);
        assert_eq!(report.sweeps, 1);
        assert_eq!(report.trajectory.last().unwrap().x(), &[1.0, 1.0]);
        assert!(report.verify.verified);
    }

    #[test]
    fn candidate_price_sits_above_optimum_price() {
        let inst = MarketInstance::new(
            InverseDemand::affine(1.0, 1.0).unwrap(),
            vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::quadratic(1.0).unwrap()],
            None,
        )
        .unwrap();
        let cand = solve_cournot_candidate(&inst, &cfg()).unwrap();
        let opt = solve_social_optimum(&inst, &cfg()).unwrap();
        assert!((cand.aggregate - 0.4).abs() < 1e-9);
        assert!((opt.aggregate - 0.5).abs() < 1e-9);
        assert!(cand.price > opt.price);
        assert!(cand.aggregate < opt.aggregate);
    }

    #[test]
    fn env_override_for_residual_tolerance() {
        assert_eq!(config_from_env().residual_tol, 1e-8);
        std::env::set_var("COURNOT_TOL", "1e-5");
        assert_eq!(config_from_env().residual_tol, 1e-5);
        std::env::set_var("COURNOT_TOL", "not-a-number");
        assert_eq!(config_from_env().residual_tol, 1e-8);
        std::env::remove_var("COURNOT_TOL");
        assert_eq!(config_from_env().residual_tol, 1e-8);
    }
}
