//! Ready-made market instances with independently known outcomes, plus
//! seeded random generators for property suites.
//!
//! Each entry carries the allocations whose optimality or equilibrium
//! status is known in closed form, together with their exact expected
//! efficiencies where those are rational.  The regression suite replays
//! every entry through the solvers.

use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cost::CostFunction;
use crate::demand::InverseDemand;
use crate::model::{Allocation, MarketInstance};

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("the concave duopoly family requires M > 2, got {0}")]
    BadM(u32),
    #[error("the fringe family requires N >= 2, got {0}")]
    BadN(usize),
    #[error("the tight family requires 1/2 <= beta < 1, got {0}")]
    BadBeta(f64),
    #[error("the tight family requires N >= 2 and N >= beta/(1-beta), got {0}")]
    BadTightN(usize),
    #[error("invalid market parameters: {0}")]
    BadParams(String),
}

/// Exact rational, stored as a numerator/denominator pair so regression
/// assertions do not inherit float drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Ratio { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Expected efficiency of a known allocation: exact where the value is
/// rational, numeric otherwise.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum ExpectedGamma {
    Exact(Ratio),
    Value(f64),
}

impl ExpectedGamma {
    pub fn as_f64(self) -> f64 {
        match self {
            ExpectedGamma::Exact(r) => r.as_f64(),
            ExpectedGamma::Value(v) => v,
        }
    }
}

/// What is known about one allocation of a catalog instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KnownRole {
    /// Passes the per-supplier deviation audit.
    Equilibrium,
    /// Satisfies the first-order conditions but fails the audit.
    Candidate,
    /// Maximizes aggregate surplus.
    Optimum,
    /// Maximizes joint profit.
    Monopoly,
}

#[derive(Debug, Clone, Serialize)]
pub struct KnownAllocation {
    pub role: KnownRole,
    pub alloc: Allocation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ExpectedGamma>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub instance: MarketInstance,
    pub known: Vec<KnownAllocation>,
}

fn known(role: KnownRole, x: Vec<f64>, gamma: Option<ExpectedGamma>) -> KnownAllocation {
    KnownAllocation { role, alloc: Allocation::new(x).expect("catalog allocations are valid"), gamma }
}

fn exact(num: i64, den: i64) -> Option<ExpectedGamma> {
    Some(ExpectedGamma::Exact(Ratio::new(num, den)))
}

/// Flat unit price up to quantity 1 with two quadratic suppliers.  The
/// price never falls below the cheapest marginal cost, so a search bound
/// must be supplied explicitly; equilibrium, optimum, and monopoly all
/// coincide at the split (1/2, 1/2).
pub fn ex1() -> CatalogEntry {
    let instance = MarketInstance::new(
        InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0]]).unwrap(),
        vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::quadratic(1.0).unwrap()],
        Some(2.0),
    )
    .unwrap();
    CatalogEntry {
        name: "ex1".to_string(),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, vec![0.5, 0.5], exact(1, 1)),
            known(KnownRole::Optimum, vec![0.5, 0.5], exact(1, 1)),
            known(KnownRole::Monopoly, vec![0.5, 0.5], exact(1, 1)),
        ],
    }
}

/// Kinked two-segment demand with a single quadratic supplier.  The sole
/// candidate x=1 is a genuine equilibrium with efficiency 15/16.
pub fn ex2() -> CatalogEntry {
    let instance = MarketInstance::new(
        InverseDemand::piecewise_linear(vec![
            [0.0, 4.0],
            [4.0 / 3.0, 8.0 / 3.0],
            [44.0 / 3.0, 0.0],
        ])
        .unwrap(),
        vec![CostFunction::quadratic(1.0).unwrap()],
        None,
    )
    .unwrap();
    CatalogEntry {
        name: "ex2".to_string(),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, vec![1.0], exact(15, 16)),
            known(KnownRole::Optimum, vec![4.0 / 3.0], exact(1, 1)),
            known(KnownRole::Monopoly, vec![1.0], exact(15, 16)),
        ],
    }
}

/// Demand with a flat unit-price stretch and two unit-slope linear
/// suppliers.  Two equilibria with different efficiencies: the fully
/// efficient (1,1) on the flat stretch and the interior (1/3, 1/3).
pub fn ex3() -> CatalogEntry {
    let instance = MarketInstance::new(
        InverseDemand::piecewise_linear(vec![[0.0, 2.0], [1.0, 1.0], [3.0, 1.0]]).unwrap(),
        vec![CostFunction::linear(1.0).unwrap(), CostFunction::linear(1.0).unwrap()],
        None,
    )
    .unwrap();
    CatalogEntry {
        name: "ex3".to_string(),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, vec![1.0, 1.0], exact(1, 1)),
            known(KnownRole::Equilibrium, vec![1.0 / 3.0, 1.0 / 3.0], exact(8, 9)),
            known(KnownRole::Optimum, vec![0.5, 0.5], exact(1, 1)),
            known(KnownRole::Monopoly, vec![0.25, 0.25], exact(3, 4)),
        ],
    }
}

/// Concave demand falling off a unit-price plateau with slope -M, one
/// quadratic and one unit-slope linear supplier.  The equilibrium
/// (1/M, 1-1/M) has efficiency 4(M-1)/M², arbitrarily poor as M grows —
/// the concave cautionary tale.  Requires M > 2.
pub fn ex4(m: u32) -> Result<CatalogEntry, CatalogError> {
    if m <= 2 {
        return Err(CatalogError::BadM(m));
    }
    let mf = m as f64;
    let instance = MarketInstance::new(
        InverseDemand::piecewise_linear(vec![[0.0, 1.0], [1.0, 1.0], [1.0 + 1.0 / mf, 0.0]])
            .unwrap(),
        vec![CostFunction::quadratic(1.0).unwrap(), CostFunction::linear(1.0).unwrap()],
        None,
    )
    .unwrap();
    Ok(CatalogEntry {
        name: format!("ex4(m={m})"),
        instance,
        known: vec![
            known(
                KnownRole::Equilibrium,
                vec![1.0 / mf, 1.0 - 1.0 / mf],
                exact(4 * (m as i64 - 1), (m as i64) * (m as i64)),
            ),
            known(KnownRole::Optimum, vec![0.5, 0.0], exact(1, 1)),
        ],
    })
}

/// Affine demand `max(0, 1-q)` with one free supplier and N-1 identical
/// fringe suppliers priced so the equilibrium is (1/3, 1/(3(N-1)), ...).
/// Equilibrium efficiency (6N-4)/(9N-9); monopoly efficiency 3/4, which
/// beats the equilibrium for every N >= 10.  Requires N >= 2.
pub fn ex8(n: usize) -> Result<CatalogEntry, CatalogError> {
    if n < 2 {
        return Err(CatalogError::BadN(n));
    }
    let nf = n as f64;
    let fringe_slope = 1.0 / 3.0 - 1.0 / (3.0 * (nf - 1.0));
    let mut costs = vec![CostFunction::linear(0.0).unwrap()];
    costs.extend(
        std::iter::repeat(CostFunction::linear(fringe_slope).unwrap()).take(n - 1),
    );
    let instance =
        MarketInstance::new(InverseDemand::affine(1.0, 1.0).unwrap(), costs, None).unwrap();

    let mut eq = vec![1.0 / 3.0];
    eq.extend(std::iter::repeat(1.0 / (3.0 * (nf - 1.0))).take(n - 1));
    let mut optimum = vec![1.0];
    optimum.extend(std::iter::repeat(0.0).take(n - 1));
    let mut monopoly = vec![0.5];
    monopoly.extend(std::iter::repeat(0.0).take(n - 1));

    Ok(CatalogEntry {
        name: format!("ex8(n={n})"),
        instance,
        known: vec![
            known(
                KnownRole::Equilibrium,
                eq,
                exact(6 * n as i64 - 4, 9 * n as i64 - 9),
            ),
            known(KnownRole::Optimum, optimum, exact(1, 1)),
            known(KnownRole::Monopoly, monopoly, exact(3, 4)),
        ],
    })
}

/// Logarithmic demand `alpha - beta*ln(q)` with a single linear supplier
/// of marginal cost `c`.  The sole outcome (equilibrium = monopoly) sits
/// at `exp((alpha-beta-c)/beta)`, the optimum at `exp((alpha-c)/beta)`,
/// and the efficiency is exactly twice their quotient.
pub fn log_market(alpha: f64, beta: f64, c: f64) -> Result<CatalogEntry, CatalogError> {
    let demand = InverseDemand::log(alpha, beta)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let cost = CostFunction::linear(c).map_err(|e| CatalogError::BadParams(e.to_string()))?;
    if c >= alpha {
        return Err(CatalogError::BadParams(format!(
            "marginal cost {c} must stay below the price scale {alpha}"
        )));
    }
    let instance = MarketInstance::new(demand, vec![cost], None)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let t = ((alpha - beta - c) / beta).exp();
    let s = ((alpha - c) / beta).exp();
    Ok(CatalogEntry {
        name: format!("log(alpha={alpha}, beta={beta}, c={c})"),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, vec![t], Some(ExpectedGamma::Value(2.0 * t / s))),
            known(KnownRole::Optimum, vec![s], exact(1, 1)),
            known(KnownRole::Monopoly, vec![t], Some(ExpectedGamma::Value(2.0 * t / s))),
        ],
    })
}

/// Power demand `alpha - beta*q^delta` with a single linear supplier of
/// marginal cost `c`.  Equilibrium at `((alpha-c)/(beta*(delta+1)))^(1/delta)`,
/// optimum at `((alpha-c)/beta)^(1/delta)`, efficiency
/// `(t/s)*(delta+2)/(delta+1)`.
pub fn power_market(
    alpha: f64,
    beta: f64,
    delta: f64,
    c: f64,
) -> Result<CatalogEntry, CatalogError> {
    let demand = InverseDemand::power(alpha, beta, delta)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let cost = CostFunction::linear(c).map_err(|e| CatalogError::BadParams(e.to_string()))?;
    if c >= alpha {
        return Err(CatalogError::BadParams(format!(
            "marginal cost {c} must stay below the choke price {alpha}"
        )));
    }
    let instance = MarketInstance::new(demand, vec![cost], None)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let t = ((alpha - c) / (beta * (delta + 1.0))).powf(1.0 / delta);
    let s = ((alpha - c) / beta).powf(1.0 / delta);
    let gamma = (t / s) * (delta + 2.0) / (delta + 1.0);
    Ok(CatalogEntry {
        name: format!("power(alpha={alpha}, beta={beta}, delta={delta}, c={c})"),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, vec![t], Some(ExpectedGamma::Value(gamma))),
            known(KnownRole::Optimum, vec![s], exact(1, 1)),
            known(KnownRole::Monopoly, vec![t], Some(ExpectedGamma::Value(gamma))),
        ],
    })
}

/// Shifted power demand `alpha*(q_zero - q)^beta` with a single linear
/// supplier of marginal cost `c > 0`.  The optimum sits at
/// `q_zero - (c/alpha)^(1/beta)`; the equilibrium is found numerically.
pub fn shifted_power_market(
    alpha: f64,
    beta: f64,
    q_zero: f64,
    c: f64,
) -> Result<CatalogEntry, CatalogError> {
    let demand = InverseDemand::shifted_power(alpha, beta, q_zero)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let cost = CostFunction::linear(c).map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let p0 = alpha * q_zero.powf(beta);
    if c >= p0 {
        return Err(CatalogError::BadParams(format!(
            "marginal cost {c} must stay below the choke price {p0}"
        )));
    }
    let instance = MarketInstance::new(demand, vec![cost], None)
        .map_err(|e| CatalogError::BadParams(e.to_string()))?;
    let s = q_zero - (c / alpha).powf(1.0 / beta);
    Ok(CatalogEntry {
        name: format!("shifted_power(alpha={alpha}, beta={beta}, q_zero={q_zero}, c={c})"),
        instance,
        known: vec![known(KnownRole::Optimum, vec![s], exact(1, 1))],
    })
}

/// The family showing the affine bound `g(beta)` is tight: affine demand
/// `max(0, 1-q)`, one free supplier producing `1-beta`, and N-1 fringe
/// suppliers each producing `(2*beta-1)/(N-1)` at the linear cost that
/// makes that a best response.  Measured efficiency is exactly
/// `g(beta) + 2*(2*beta-1)^2/(N-1)`, so it approaches `g(beta)` from
/// above as N grows.  Requires `1/2 <= beta < 1` and `N >= beta/(1-beta)`.
pub fn tight_affine_market(beta: f64, n: usize) -> Result<CatalogEntry, CatalogError> {
    if !(0.5..1.0).contains(&beta) {
        return Err(CatalogError::BadBeta(beta));
    }
    let nf = n as f64;
    if n < 2 || nf < beta / (1.0 - beta) {
        return Err(CatalogError::BadTightN(n));
    }
    let fringe_x = (2.0 * beta - 1.0) / (nf - 1.0);
    let fringe_slope = (1.0 - beta) - fringe_x;
    let mut costs = vec![CostFunction::linear(0.0).unwrap()];
    costs.extend(
        std::iter::repeat(CostFunction::linear(fringe_slope).unwrap()).take(n - 1),
    );
    let instance =
        MarketInstance::new(InverseDemand::affine(1.0, 1.0).unwrap(), costs, None).unwrap();

    let mut eq = vec![1.0 - beta];
    eq.extend(std::iter::repeat(fringe_x).take(n - 1));
    let mut optimum = vec![1.0];
    optimum.extend(std::iter::repeat(0.0).take(n - 1));
    let gamma = tightness_gamma(beta, n);

    Ok(CatalogEntry {
        name: format!("tight(beta={beta}, n={n})"),
        instance,
        known: vec![
            known(KnownRole::Equilibrium, eq, Some(ExpectedGamma::Value(gamma))),
            known(KnownRole::Optimum, optimum, exact(1, 1)),
        ],
    })
}

/// Closed-form efficiency of the tight family's equilibrium.
pub fn tightness_gamma(beta: f64, n: usize) -> f64 {
    crate::efficiency::bound_g(beta)
        + 2.0 * (2.0 * beta - 1.0).powi(2) / (n as f64 - 1.0)
}

/// Dispatch for the command-line `catalog export`.  `n` parameterizes the
/// fringe family (default 10), `m` the concave duopoly (default 10).
pub fn by_name(name: &str, n: Option<usize>, m: Option<u32>) -> Result<CatalogEntry, CatalogError> {
    match name {
        "ex1" => Ok(ex1()),
        "ex2" => Ok(ex2()),
        "ex3" => Ok(ex3()),
        "ex4" => ex4(m.unwrap_or(10)),
        "ex8" => ex8(n.unwrap_or(10)),
        "log" => log_market(2.0, 1.0, 0.0),
        "power" => power_market(2.0, 1.0, 1.0, 0.0),
        "shifted_power" => shifted_power_market(1.0, 2.0, 1.0, 0.1),
        other => Err(CatalogError::UnknownName(other.to_string())),
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 8] =
    ["ex1", "ex2", "ex3", "ex4", "ex8", "log", "power", "shifted_power"];

/// Entries replayed by the regression suite.
pub fn regression_entries() -> Vec<CatalogEntry> {
    vec![
        ex1(),
        ex2(),
        ex3(),
        ex4(4).unwrap(),
        ex4(10).unwrap(),
        ex4(100).unwrap(),
        ex8(2).unwrap(),
        ex8(5).unwrap(),
        ex8(10).unwrap(),
        ex8(50).unwrap(),
        log_market(2.0, 1.0, 0.0).unwrap(),
        log_market(3.0, 0.5, 0.25).unwrap(),
        power_market(2.0, 1.0, 1.0, 0.0).unwrap(),
        power_market(3.0, 1.5, 0.5, 0.5).unwrap(),
        shifted_power_market(1.0, 2.0, 1.0, 0.1).unwrap(),
        tight_affine_market(2.0 / 3.0, 10).unwrap(),
        tight_affine_market(0.75, 50).unwrap(),
    ]
}

/// Demand families the random generator can draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFamily {
    Affine,
    Log,
    Power,
    ShiftedPower,
}

impl RandomFamily {
    pub const ALL: [RandomFamily; 4] = [
        RandomFamily::Affine,
        RandomFamily::Log,
        RandomFamily::Power,
        RandomFamily::ShiftedPower,
    ];
}

/// Deterministic random instance: convex demand from the chosen family,
/// each supplier linear or quadratic with equal probability.  Parameters
/// are drawn so the core assumptions hold by construction, with rejection
/// sampling as a safety net.  Identical for identical seeds.
pub fn random_instance(
    seed: u64,
    family: RandomFamily,
    n_range: RangeInclusive<usize>,
) -> MarketInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(n_range.clone());
        let demand = match family {
            RandomFamily::Affine => {
                let b = rng.random_range(0.5..5.0);
                let a = rng.random_range(0.1..2.0);
                InverseDemand::affine(a, b).unwrap()
            }
            RandomFamily::Log => {
                let q_max: f64 = rng.random_range(1.5..8.0);
                let alpha = rng.random_range(0.5..4.0);
                InverseDemand::log(alpha, alpha / q_max.ln()).unwrap()
            }
            RandomFamily::Power => {
                let delta = rng.random_range(0.3..=1.0);
                let q_max: f64 = rng.random_range(0.8..8.0);
                let alpha = rng.random_range(0.5..4.0);
                InverseDemand::power(alpha, alpha / q_max.powf(delta), delta).unwrap()
            }
            RandomFamily::ShiftedPower => {
                let beta = rng.random_range(1.0..3.0);
                let q_zero: f64 = rng.random_range(0.8..8.0);
                let scale = rng.random_range(0.5..4.0);
                InverseDemand::shifted_power(scale / q_zero.powf(beta), beta, q_zero).unwrap()
            }
        };
        // Reference price taken slightly inside the support so that
        // families with an unbounded price at zero still yield a finite
        // cap on linear marginal costs.
        let q_ref = 0.05
            * demand
                .support_cutoff()
                .expect("random families all reach zero price");
        let price_ref = demand.eval(q_ref);
        let costs: Vec<CostFunction> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    CostFunction::linear(rng.random_range(0.0..0.9 * price_ref)).unwrap()
                } else {
                    CostFunction::quadratic(rng.random_range(0.05..2.0)).unwrap()
                }
            })
            .collect();
        if let Ok(instance) = MarketInstance::new(demand, costs, None) {
            let a = instance.check_assumptions();
            if a.all_core() && a.demand_convex {
                return instance;
            }
        }
    }
}

/// Replays one entry against the solvers: stated equilibria must survive
/// the deviation audit, stated candidates the first-order check, and
/// stated optimum/monopoly aggregates and efficiencies must match the
/// solved values.  Returns the first discrepancy as a message.
pub fn replay(entry: &CatalogEntry, cfg: &crate::solver::SolverConfig) -> Result<(), String> {
    use crate::{efficiency, solver};

    let name = &entry.name;
    let inst = &entry.instance;
    let opt = solver::solve_social_optimum(inst, cfg)
        .map_err(|e| format!("{name}: optimum failed: {e}"))?;
    if opt.residual > 1e-10 {
        return Err(format!("{name}: optimum residual {} too large", opt.residual));
    }
    for k in &entry.known {
        match k.role {
            KnownRole::Equilibrium => {
                let audit = solver::verify_equilibrium(inst, &k.alloc, cfg);
                if !audit.verified {
                    return Err(format!(
                        "{name}: stated equilibrium {:?} failed the audit (deficit {})",
                        k.alloc.x(),
                        audit.max_deficit
                    ));
                }
            }
            KnownRole::Candidate => {
                let r = solver::first_order_residual(
                    inst,
                    k.alloc.x(),
                    inst.demand().eval(k.alloc.aggregate()),
                    inst.demand().dplus(k.alloc.aggregate()).abs(),
                );
                if r > 1e-8 {
                    return Err(format!("{name}: candidate residual {r}"));
                }
            }
            KnownRole::Optimum => {
                if (opt.aggregate - k.alloc.aggregate()).abs() > 1e-8 * opt.aggregate.max(1.0) {
                    return Err(format!(
                        "{name}: optimum aggregate {} differs from stated {}",
                        opt.aggregate,
                        k.alloc.aggregate()
                    ));
                }
            }
            KnownRole::Monopoly => {
                let mono = solver::solve_monopoly(inst, cfg)
                    .map_err(|e| format!("{name}: monopoly failed: {e}"))?;
                if (mono.aggregate - k.alloc.aggregate()).abs() > 1e-6 * mono.aggregate.max(1.0) {
                    return Err(format!(
                        "{name}: monopoly aggregate {} differs from stated {}",
                        mono.aggregate,
                        k.alloc.aggregate()
                    ));
                }
            }
        }
        if let Some(expected) = k.gamma {
            let measured = efficiency::gamma_with_optimum(inst, &k.alloc, &opt);
            if (measured - expected.as_f64()).abs() > 1e-9 {
                return Err(format!(
                    "{name}: efficiency {measured} differs from stated {}",
                    expected.as_f64()
                ));
            }
        }
    }
    Ok(())
}
