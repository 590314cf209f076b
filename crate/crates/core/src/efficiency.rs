//! Efficiency of allocations and the lower bounds that certify it.
//!
//! The realized efficiency `gamma` of an allocation is its aggregate
//! surplus divided by the optimal surplus.  For convex demand curves this
//! module evaluates every closed-form floor on that ratio:
//!
//! - the affine-demand bound `g(beta) = 3*beta^2 - 4*beta + 2`;
//! - the curvature bound `f(cbar)` built from the slope ratio
//!   `cbar = c/d` of the demand curve between an outcome and the optimum;
//! - the joint-profit (monopoly) bound `3/(3 + cbar)`;
//! - ex-ante variants of the curvature bounds that need no solved
//!   outcome: from the endpoint slope ratio `mu`, and from the slope
//!   ratio between two computable quantities `s` and `t` that bracket
//!   every outcome of interest.
//!
//! It also implements the two surplus-reducing instance transforms
//! (cost linearization and the tangent-chord demand swap) used to reduce
//! general instances to worst-case form, and assembles everything into a
//! serializable [`AnalysisReport`].

use serde::Serialize;
use thiserror::Error;

use crate::cost::CostFunction;
use crate::demand::InverseDemand;
use crate::model::{Allocation, AssumptionReport, MarketInstance};
use crate::numeric::bisect_leftmost;
use crate::solver::{
    self, SolveError, SolveResult, SolverConfig, VerifyReport,
};

const REASON_NOT_CONVEX: &str = "demand curve is not convex";
const REASON_NOT_AFFINE: &str = "demand is not affine";
const REASON_EQUAL_PRICES: &str = "prices at the allocation and the optimum coincide";
const REASON_NO_CUTOFF: &str = "the demand curve never reaches zero";
const REASON_STEEP_AT_ZERO: &str = "the demand slope at zero is unbounded";
const REASON_FLAT_LANDING: &str = "the demand curve lands flat at its cutoff";
const REASON_NO_S: &str = "the price never falls to the cheapest marginal cost within the search bound";
const REASON_NO_T: &str = "no marginal-cost crossing within the search bound";
const REASON_FLAT_AT_S: &str = "the demand curve is flat just left of s";

#[derive(Debug, Error, PartialEq)]
pub enum EfficiencyError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("demand is not affine")]
    NotAffine,
    #[error("prices at the allocation and at the optimum coincide; efficiency is 1 and the curvature statistics are undefined")]
    EqualPrices,
    #[error("curvature ratio must be at least 1, got {0}")]
    CurvatureOutOfRange(f64),
    #[error("the allocation is already socially optimal; linearizing its costs would zero out the optimum")]
    SociallyOptimal,
    #[error("the demand curve is not differentiable at the allocation's aggregate")]
    KinkAtAggregate,
}

/// Realized efficiency: surplus of `alloc` over the optimal surplus.
pub fn gamma(
    inst: &MarketInstance,
    alloc: &Allocation,
    cfg: &SolverConfig,
) -> Result<f64, EfficiencyError> {
    let opt = solver::solve_social_optimum(inst, cfg)?;
    Ok(gamma_with_optimum(inst, alloc, &opt))
}

/// Realized efficiency against an already-solved optimum.
pub fn gamma_with_optimum(inst: &MarketInstance, alloc: &Allocation, opt: &SolveResult) -> f64 {
    debug_assert!(opt.welfare > 0.0, "nondegenerate optima have positive surplus");
    inst.welfare(alloc) / opt.welfare
}

/// Normalized aggregate `a*X / (b - min_n C'_n(x_n))` for affine demand
/// `max(0, b - a*q)`.  The denominator uses each supplier's marginal cost
/// at its own quantity, i.e. the slopes a cost linearization would take.
pub fn beta(inst: &MarketInstance, alloc: &Allocation) -> Result<f64, EfficiencyError> {
    let InverseDemand::Affine { a, b } = inst.demand() else {
        return Err(EfficiencyError::NotAffine);
    };
    let floor = inst
        .costs()
        .iter()
        .zip(alloc.x())
        .map(|(c, &x)| c.marginal(x))
        .fold(f64::INFINITY, f64::min);
    if floor >= *b {
        return Err(EfficiencyError::Solve(SolveError::Degenerate));
    }
    Ok(a * alloc.aggregate() / (b - floor))
}

/// Affine-demand efficiency floor `3*beta^2 - 4*beta + 2`, minimized at
/// `beta = 2/3` where it equals `2/3`.
pub fn bound_g(beta: f64) -> f64 {
    3.0 * beta * beta - 4.0 * beta + 2.0
}

/// The auxiliary root of the curvature bound:
/// `max(1, (2 - cbar + sqrt(cbar^2 - 4*cbar + 12)) / 2)`.  The
/// discriminant is positive for every real `cbar`, and the clamp binds
/// exactly when `cbar >= 3`.
pub fn phi(cbar: f64) -> f64 {
    (0.5 * (2.0 - cbar + (cbar * cbar - 4.0 * cbar + 12.0).sqrt())).max(1.0)
}

fn check_cbar(cbar: f64) -> Result<f64, EfficiencyError> {
    if !cbar.is_finite() || cbar < 1.0 - 1e-9 {
        return Err(EfficiencyError::CurvatureOutOfRange(cbar));
    }
    // Roundoff from the slope quotient may land a hair under 1.
    Ok(cbar.max(1.0))
}

/// Curvature efficiency floor `(phi^2 + 2) / (phi^2 + 2*phi + cbar)`,
/// strictly decreasing in `cbar`, equal to `2/3` at 1 and `1/2` at 3.
/// Values within roundoff below 1 are clamped; anything lower errors.
pub fn bound_f(cbar: f64) -> Result<f64, EfficiencyError> {
    let cbar = check_cbar(cbar)?;
    let p = phi(cbar);
    Ok((p * p + 2.0) / (p * p + 2.0 * p + cbar))
}

/// Joint-profit efficiency floor `3 / (3 + cbar)`.  Coincides with
/// [`bound_f`] for `cbar >= 3` and dominates it below.
pub fn bound_mono(cbar: f64) -> Result<f64, EfficiencyError> {
    let cbar = check_cbar(cbar)?;
    Ok(3.0 / (3.0 + cbar))
}

/// Demand slope magnitudes between an outcome and the optimum:
/// `c = |p'(X)|` at the outcome (left slope at kinks), `d` the magnitude
/// of the chord slope from `(X, p(X))` to `(X^S, p(X^S))`, and their
/// ratio `cbar = c/d` (at least 1 for convex demand).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Curvature {
    pub c: f64,
    pub d: f64,
    pub cbar: f64,
}

fn prices_coincide(px: f64, ps: f64) -> bool {
    (px - ps).abs() <= 1e-12 * px.abs().max(ps.abs()).max(1.0)
}

/// Computes the curvature statistics of an allocation against a solved
/// optimum.  Errors when the two prices coincide — then the allocation is
/// already optimal and no curvature is defined.
pub fn curvature(
    inst: &MarketInstance,
    alloc: &Allocation,
    opt: &SolveResult,
) -> Result<Curvature, EfficiencyError> {
    let x = alloc.aggregate();
    let xs = opt.aggregate;
    let px = inst.demand().eval(x);
    let ps = opt.price;
    if prices_coincide(px, ps) || (xs - x).abs() <= 1e-15 * xs.max(1.0) {
        return Err(EfficiencyError::EqualPrices);
    }
    let c = inst.demand().dminus(x).abs();
    let d = ((ps - px) / (xs - x)).abs();
    Ok(Curvature { c, d, cbar: c / d })
}

/// A bound that is either a number or absent for a stated reason.
#[derive(Debug, Clone, Serialize)]
pub struct BoundValue {
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl BoundValue {
    pub fn applicable(v: f64) -> Self {
        BoundValue { value: Some(v), reason: None }
    }

    pub fn inapplicable(reason: &str) -> Self {
        BoundValue { value: None, reason: Some(reason.to_string()) }
    }

    pub fn is_applicable(&self) -> bool {
        self.value.is_some()
    }
}

/// Ex-ante curvature bound from the demand endpoints alone: evaluates
/// `f` at `mu = dplus(0) / dminus(Q)` where `Q` is the quantity at which
/// the price reaches zero.  Absent when the curve never reaches zero,
/// starts vertically, or lands flat.
pub fn bound_mu(inst: &MarketInstance) -> BoundValue {
    if !inst.demand().convexity_check() {
        return BoundValue::inapplicable(REASON_NOT_CONVEX);
    }
    let Some(q) = inst.demand().support_cutoff() else {
        return BoundValue::inapplicable(REASON_NO_CUTOFF);
    };
    let at_zero = inst.demand().dplus(0.0);
    if !at_zero.is_finite() {
        return BoundValue::inapplicable(REASON_STEEP_AT_ZERO);
    }
    let at_cutoff = inst.demand().dminus(q);
    if at_cutoff.abs() <= 1e-15 {
        return BoundValue::inapplicable(REASON_FLAT_LANDING);
    }
    match bound_f(at_zero / at_cutoff) {
        Ok(v) => BoundValue::applicable(v),
        Err(e) => BoundValue::inapplicable(&e.to_string()),
    }
}

/// The two ex-ante quantities bracketing all outcomes of interest:
///
/// - `s`: the smallest quantity where the price has fallen to the
///   cheapest marginal cost at zero (an upper bound on the optimal
///   aggregate);
/// - `t`: the smallest quantity where the cheapest marginal cost weakly
///   exceeds `p(q) + q * dplus(q)` (a lower bound on candidate
///   aggregates).
///
/// Closed forms are used where the family admits them; `t`'s closed
/// forms additionally require the cheapest marginal cost at zero to be
/// attained by a constant-marginal supplier, so that the pointwise
/// cheapest marginal cost is constant.  Either value is `+inf` when no
/// crossing exists within the search bound.
pub fn compute_s_t(
    inst: &MarketInstance,
    cfg: &SolverConfig,
) -> Result<(f64, f64), EfficiencyError> {
    if !(inst.demand().eval(0.0) > inst.min_marginal_at_zero()) {
        return Err(EfficiencyError::Solve(SolveError::Degenerate));
    }
    let c = inst.min_marginal_at_zero();
    let r = inst.search_bound();
    let tol = cfg.quantity_tol * r.max(1.0);

    let s = match inst.demand() {
        InverseDemand::Affine { a, b } => (b - c) / a,
        InverseDemand::Log { alpha, beta } => ((alpha - c) / beta).exp(),
        InverseDemand::Power { alpha, beta, delta } => ((alpha - c) / beta).powf(1.0 / delta),
        InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
            q_zero - (c / alpha).powf(1.0 / beta)
        }
        InverseDemand::PiecewiseLinear { .. } => {
            if inst.demand().eval(r) > c {
                f64::INFINITY
            } else {
                bisect_leftmost(|q| inst.demand().eval(q) <= c, 0.0, r, tol)
            }
        }
    };

    let flat_floor = inst
        .costs()
        .iter()
        .any(|k| k.constant_marginal() == Some(c));
    let t = if flat_floor {
        match inst.demand() {
            InverseDemand::Affine { a, b } => (b - c) / (2.0 * a),
            InverseDemand::Log { alpha, beta } => ((alpha - beta - c) / beta).exp(),
            InverseDemand::Power { alpha, beta, delta } => {
                ((alpha - c) / (beta * (delta + 1.0))).powf(1.0 / delta)
            }
            _ => numeric_t(inst, cfg),
        }
    } else {
        numeric_t(inst, cfg)
    };
    Ok((s, t))
}

/// First crossing of `min_n C'_n(q) - p(q) - q*dplus(q)`: linear scan for
/// a sign change, then leftmost bisection inside the first crossing cell.
fn numeric_t(inst: &MarketInstance, cfg: &SolverConfig) -> f64 {
    let r = inst.search_bound();
    let h = |q: f64| -> f64 {
        let mc = inst
            .costs()
            .iter()
            .map(|k| k.marginal(q))
            .fold(f64::INFINITY, f64::min);
        mc - inst.demand().eval(q) - q * inst.demand().dplus(q)
    };
    let grid = 4096;
    let mut prev = 0.0;
    for i in 1..=grid {
        let q = r * i as f64 / grid as f64;
        if h(q) >= 0.0 {
            return bisect_leftmost(|z| h(z) >= 0.0, prev, q, cfg.quantity_tol * r.max(1.0));
        }
        prev = q;
    }
    f64::INFINITY
}

fn st_ratio(inst: &MarketInstance, cfg: &SolverConfig) -> Result<f64, String> {
    if !inst.demand().convexity_check() {
        return Err(REASON_NOT_CONVEX.to_string());
    }
    let (s, t) = compute_s_t(inst, cfg).map_err(|e| e.to_string())?;
    if !s.is_finite() {
        return Err(REASON_NO_S.to_string());
    }
    if !t.is_finite() {
        return Err(REASON_NO_T.to_string());
    }
    let at_s = inst.demand().dminus(s);
    if at_s.abs() <= 1e-15 {
        return Err(REASON_FLAT_AT_S.to_string());
    }
    Ok(inst.demand().dplus(t) / at_s)
}

/// Ex-ante curvature bound `f(dplus(t)/dminus(s))`, computable without
/// solving for any outcome.
pub fn bound_st(inst: &MarketInstance, cfg: &SolverConfig) -> BoundValue {
    match st_ratio(inst, cfg) {
        Ok(ratio) => match bound_f(ratio) {
            Ok(v) => BoundValue::applicable(v),
            Err(e) => BoundValue::inapplicable(&e.to_string()),
        },
        Err(reason) => BoundValue::inapplicable(&reason),
    }
}

/// Ex-ante joint-profit bound `3/(3 + dplus(t)/dminus(s))`.
pub fn bound_st_mono(inst: &MarketInstance, cfg: &SolverConfig) -> BoundValue {
    match st_ratio(inst, cfg) {
        Ok(ratio) => match bound_mono(ratio) {
            Ok(v) => BoundValue::applicable(v),
            Err(e) => BoundValue::inapplicable(&e.to_string()),
        },
        Err(reason) => BoundValue::inapplicable(&reason),
    }
}

/// Replaces every cost function with the linear cost matching its
/// marginal at the allocation.  The allocation keeps satisfying the same
/// first-order conditions, and its efficiency can only drop.  Refused for
/// (near-)socially-optimal allocations, whose linearized optimum would be
/// worthless as a denominator.
pub fn linearize_costs(
    inst: &MarketInstance,
    alloc: &Allocation,
    cfg: &SolverConfig,
) -> Result<MarketInstance, EfficiencyError> {
    let g = gamma(inst, alloc, cfg)?;
    if g >= 1.0 - 1e-9 {
        return Err(EfficiencyError::SociallyOptimal);
    }
    let costs = inst
        .costs()
        .iter()
        .zip(alloc.x())
        .map(|(c, &x)| CostFunction::linear(c.marginal(x)).expect("marginals are nonnegative"))
        .collect();
    Ok(MarketInstance::new(inst.demand().clone(), costs, Some(inst.search_bound()))
        .expect("linearized costs keep the instance valid"))
}

/// Swaps the demand curve for the piecewise-linear curve that is tangent
/// to it at the allocation's aggregate and chordal from there to the
/// optimum: slope `-c` until `X`, slope `-d` until the price hits zero.
/// The optimum keeps its aggregate and the allocation's efficiency can
/// only drop.  Requires distinct prices and a differentiable point.
pub fn p0_transform(
    inst: &MarketInstance,
    alloc: &Allocation,
    opt: &SolveResult,
) -> Result<MarketInstance, EfficiencyError> {
    let x = alloc.aggregate();
    let px = inst.demand().eval(x);
    if prices_coincide(px, opt.price) {
        return Err(EfficiencyError::EqualPrices);
    }
    let left = inst.demand().dminus(x);
    let right = inst.demand().dplus(x);
    if (left - right).abs() > 1e-9 * left.abs().max(1.0) {
        return Err(EfficiencyError::KinkAtAggregate);
    }
    let c = left.abs();
    let d = ((opt.price - px) / (opt.aggregate - x)).abs();
    let demand = InverseDemand::piecewise_linear(vec![
        [0.0, px + c * x],
        [x, px],
        [x + px / d, 0.0],
    ])
    .expect("tangent-chord prices are valid");
    Ok(
        MarketInstance::new(demand, inst.costs().to_vec(), Some(inst.search_bound()))
            .expect("demand swap keeps the instance valid"),
    )
}

/// Efficiency of one allocation with every applicable bound evaluated.
/// Inapplicable bounds carry the reason instead of a number.
#[derive(Debug, Clone, Serialize)]
pub struct EfficiencyReport {
    pub gamma: f64,
    /// Price at the allocation's aggregate.
    pub price: f64,
    /// Price at the optimal aggregate.
    pub price_optimum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub bound_g: BoundValue,
    pub bound_f: BoundValue,
    pub bound_mono: BoundValue,
    pub bound_mu: BoundValue,
    pub bound_st: BoundValue,
    pub bound_st_mono: BoundValue,
}

/// Evaluates the efficiency of `alloc` against a solved optimum, together
/// with every bound this instance admits.
pub fn efficiency_report(
    inst: &MarketInstance,
    alloc: &Allocation,
    opt: &SolveResult,
    cfg: &SolverConfig,
) -> EfficiencyReport {
    let g = gamma_with_optimum(inst, alloc, opt);
    let price = inst.demand().eval(alloc.aggregate());
    let convex = inst.demand().convexity_check();

    let bound_g_value = match beta(inst, alloc) {
        Ok(b) if !prices_coincide(price, opt.price) => (Some(b), BoundValue::applicable(bound_g(b))),
        Ok(_) => (None, BoundValue::inapplicable(REASON_EQUAL_PRICES)),
        Err(_) => (None, BoundValue::inapplicable(REASON_NOT_AFFINE)),
    };

    let (curve, f_val, mono_val) = if !convex {
        (
            None,
            BoundValue::inapplicable(REASON_NOT_CONVEX),
            BoundValue::inapplicable(REASON_NOT_CONVEX),
        )
    } else {
        match curvature(inst, alloc, opt) {
            Ok(cv) => {
                let f_val = match bound_f(cv.cbar) {
                    Ok(v) => BoundValue::applicable(v),
                    Err(e) => BoundValue::inapplicable(&e.to_string()),
                };
                let m_val = match bound_mono(cv.cbar) {
                    Ok(v) => BoundValue::applicable(v),
                    Err(e) => BoundValue::inapplicable(&e.to_string()),
                };
                (Some(cv), f_val, m_val)
            }
            Err(_) => (
                None,
                BoundValue::inapplicable(REASON_EQUAL_PRICES),
                BoundValue::inapplicable(REASON_EQUAL_PRICES),
            ),
        }
    };

    EfficiencyReport {
        gamma: g,
        price,
        price_optimum: opt.price,
        beta: bound_g_value.0,
        c: curve.map(|cv| cv.c),
        d: curve.map(|cv| cv.d),
        cbar: curve.map(|cv| cv.cbar),
        phi: curve.map(|cv| phi(cv.cbar)),
        bound_g: bound_g_value.1,
        bound_f: f_val,
        bound_mono: mono_val,
        bound_mu: bound_mu(inst),
        bound_st: bound_st(inst, cfg),
        bound_st_mono: bound_st_mono(inst, cfg),
    }
}

/// One Cournot candidate with its equilibrium audit and efficiency.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateReport {
    #[serde(flatten)]
    pub outcome: SolveResult,
    /// Whether the candidate survived the per-supplier deviation audit.
    pub is_equilibrium: bool,
    /// Largest profit improvement any supplier found.
    pub profit_deficit: f64,
    pub audit: VerifyReport,
    pub report: EfficiencyReport,
}

/// Monopoly outcome with its efficiency.
#[derive(Debug, Clone, Serialize)]
pub struct MonopolyReport {
    #[serde(flatten)]
    pub outcome: SolveResult,
    pub report: EfficiencyReport,
}

/// Everything the analyzer can say about one instance.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub assumptions: AssumptionReport,
    pub optimum: SolveResult,
    pub candidates: Vec<CandidateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monopoly: Option<MonopolyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monopoly_error: Option<String>,
    /// Quantity where the price reaches the cheapest marginal cost.
    pub s: Option<f64>,
    /// Quantity where the cheapest marginal cost overtakes marginal value.
    pub t: Option<f64>,
    pub bound_mu: BoundValue,
    pub bound_st: BoundValue,
    pub bound_st_mono: BoundValue,
}

/// Full instance analysis: optimum, all candidates (each audited for
/// equilibrium), monopoly outcome, and the ex-ante bounds.  Errors only
/// when the optimum itself cannot be computed.
pub fn analyze(inst: &MarketInstance, cfg: &SolverConfig) -> Result<AnalysisReport, SolveError> {
    let optimum = solver::solve_social_optimum(inst, cfg)?;

    let (candidates, candidate_error) = match solver::solve_cournot_candidates(inst, cfg) {
        Ok(list) => {
            let reports = list
                .into_iter()
                .map(|outcome| {
                    let audit = solver::verify_equilibrium(inst, &outcome.alloc, cfg);
                    let report = efficiency_report(inst, &outcome.alloc, &optimum, cfg);
                    CandidateReport {
                        is_equilibrium: audit.verified,
                        profit_deficit: audit.max_deficit,
                        audit,
                        report,
                        outcome,
                    }
                })
                .collect();
            (reports, None)
        }
        Err(e) => (Vec::new(), Some(e.to_string())),
    };

    let (monopoly, monopoly_error) = match solver::solve_monopoly(inst, cfg) {
        Ok(outcome) => {
            let report = efficiency_report(inst, &outcome.alloc, &optimum, cfg);
            (Some(MonopolyReport { outcome, report }), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };

    let (s, t) = match compute_s_t(inst, cfg) {
        Ok((s, t)) => (
            s.is_finite().then_some(s),
            t.is_finite().then_some(t),
        ),
        Err(_) => (None, None),
    };

    Ok(AnalysisReport {
        schema: 1,
        assumptions: inst.check_assumptions(),
        optimum,
        candidates,
        candidate_error,
        monopoly,
        monopoly_error,
        s,
        t,
        bound_mu: bound_mu(inst),
        bound_st: bound_st(inst, cfg),
        bound_st_mono: bound_st_mono(inst, cfg),
    })
}

/// Outcome of replaying one instance against every bound invariant.
#[derive(Debug, Default)]
pub struct InvariantReport {
    /// Human-readable description of each violated invariant.
    pub violations: Vec<String>,
    /// Smallest observed `gamma - bound` over all applicable bound checks.
    pub min_margin: Option<f64>,
    /// Candidates examined.
    pub candidates: usize,
    /// Candidates that survived the deviation audit.
    pub equilibria: usize,
    /// Whether a verified monopoly outcome was checked.
    pub monopoly_checked: bool,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn violate(&mut self, msg: String) {
        self.violations.push(msg);
    }

    fn margin(&mut self, m: f64) {
        self.min_margin = Some(self.min_margin.map_or(m, |v: f64| v.min(m)));
    }
}

/// Replays one instance against every efficiency invariant: bound floors
/// for verified equilibria and monopoly outcomes, price/aggregate
/// ordering against the optimum, and monotonicity of both transforms.
/// On non-convex demand the bound and candidate checks are skipped and
/// only efficiency sanity is enforced.
pub fn check_bound_invariants(inst: &MarketInstance, cfg: &SolverConfig) -> InvariantReport {
    let mut rep = InvariantReport::default();
    let convex = inst.demand().convexity_check();
    let opt = match solver::solve_social_optimum(inst, cfg) {
        Ok(o) => o,
        Err(e) => {
            rep.violate(format!("optimum failed to solve: {e}"));
            return rep;
        }
    };
    if !opt.verified {
        rep.violate(format!("optimum residual {} exceeds tolerance", opt.residual));
    }

    let gamma_sane = |rep: &mut InvariantReport, g: f64, what: &str| {
        if !(g > 0.0 && g <= 1.0 + 1e-9) {
            rep.violate(format!("{what} efficiency {g} outside (0, 1]"));
        }
    };

    match solver::solve_cournot_candidates(inst, cfg) {
        Ok(cands) => {
            for cand in &cands {
                rep.candidates += 1;
                let g = gamma_with_optimum(inst, &cand.alloc, &opt);
                gamma_sane(&mut rep, g, "candidate");
                let px = inst.demand().eval(cand.aggregate);
                if px < opt.price - 1e-9 * opt.price.abs().max(1.0) {
                    rep.violate(format!(
                        "candidate price {px} below optimum price {}",
                        opt.price
                    ));
                }
                let equal = prices_coincide(px, opt.price);
                if equal {
                    if inst.demand().dminus(cand.aggregate).abs() > 1e-8 {
                        rep.violate(format!(
                            "equal prices but demand slope {} not flat at X={}",
                            inst.demand().dminus(cand.aggregate),
                            cand.aggregate
                        ));
                    }
                    if (g - 1.0).abs() > 1e-8 {
                        rep.violate(format!("equal prices but efficiency {g} != 1"));
                    }
                } else if cand.aggregate >= opt.aggregate {
                    rep.violate(format!(
                        "candidate aggregate {} not below optimum aggregate {}",
                        cand.aggregate, opt.aggregate
                    ));
                }

                let audit = solver::verify_equilibrium(inst, &cand.alloc, cfg);
                if audit.verified {
                    rep.equilibria += 1;
                    if !equal {
                        match curvature(inst, &cand.alloc, &opt) {
                            Ok(cv) => {
                                if cv.cbar < 1.0 - 1e-9 {
                                    rep.violate(format!(
                                        "slope ratio {} below 1 on convex demand",
                                        cv.cbar
                                    ));
                                }
                                match bound_f(cv.cbar) {
                                    Ok(f) => {
                                        if g < f - 1e-9 {
                                            rep.violate(format!(
                                                "equilibrium efficiency {g} below curvature bound {f}"
                                            ));
                                        }
                                        rep.margin(g - f);
                                    }
                                    Err(e) => rep.violate(format!("curvature bound failed: {e}")),
                                }
                            }
                            Err(e) => rep.violate(format!("curvature failed: {e}")),
                        }
                    }
                    if let Ok(b) = beta(inst, &cand.alloc) {
                        if !(0.5 - 1e-9..1.0).contains(&b) {
                            rep.violate(format!(
                                "equilibrium normalized aggregate {b} outside [1/2, 1)"
                            ));
                        }
                        let gb = bound_g(b);
                        if g < gb - 1e-9 {
                            rep.violate(format!(
                                "equilibrium efficiency {g} below affine bound {gb}"
                            ));
                        }
                        rep.margin(g - gb);
                    }
                }

                match linearize_costs(inst, &cand.alloc, cfg) {
                    Ok(lin) => match gamma(&lin, &cand.alloc, cfg) {
                        Ok(gl) => {
                            if gl > g + 1e-9 {
                                rep.violate(format!(
                                    "cost linearization raised efficiency {g} -> {gl}"
                                ));
                            }
                        }
                        Err(e) => rep.violate(format!("linearized efficiency failed: {e}")),
                    },
                    Err(EfficiencyError::SociallyOptimal) => {}
                    Err(e) => rep.violate(format!("linearization failed: {e}")),
                }
                match p0_transform(inst, &cand.alloc, &opt) {
                    Ok(swapped) => match gamma(&swapped, &cand.alloc, cfg) {
                        Ok(gs) => {
                            if gs > g + 1e-9 {
                                rep.violate(format!(
                                    "demand swap raised efficiency {g} -> {gs}"
                                ));
                            }
                        }
                        Err(e) => rep.violate(format!("swapped efficiency failed: {e}")),
                    },
                    Err(EfficiencyError::EqualPrices | EfficiencyError::KinkAtAggregate) => {}
                    Err(e) => rep.violate(format!("demand swap failed: {e}")),
                }
            }
        }
        Err(e) => {
            if convex {
                rep.violate(format!("candidate solve failed on convex demand: {e}"));
            }
        }
    }

    match solver::solve_monopoly(inst, cfg) {
        Ok(mono) => {
            if !mono.verified {
                rep.violate(format!(
                    "monopoly residual {} exceeds tolerance",
                    mono.residual
                ));
            }
            rep.monopoly_checked = true;
            let g = gamma_with_optimum(inst, &mono.alloc, &opt);
            gamma_sane(&mut rep, g, "monopoly");
            let px = inst.demand().eval(mono.aggregate);
            if convex && !prices_coincide(px, opt.price) {
                match curvature(inst, &mono.alloc, &opt) {
                    Ok(cv) => match bound_mono(cv.cbar) {
                        Ok(m) => {
                            if g < m - 1e-9 {
                                rep.violate(format!(
                                    "monopoly efficiency {g} below joint-profit bound {m}"
                                ));
                            }
                            rep.margin(g - m);
                        }
                        Err(e) => rep.violate(format!("joint-profit bound failed: {e}")),
                    },
                    Err(e) => rep.violate(format!("monopoly curvature failed: {e}")),
                }
            }
        }
        Err(e) => {
            if convex {
                rep.violate(format!("monopoly solve failed: {e}"));
            }
        }
    }

    rep
}
