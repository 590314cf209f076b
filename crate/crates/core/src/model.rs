//! Market instances: an inverse demand curve, one cost function per
//! supplier, and a search bound `R` limiting every solver's scan range.
//!
//! The bound `R` is a quantity beyond which no single supplier would ever
//! produce — formally, a point where the price has dropped to (or below)
//! the cheapest marginal cost at zero.  It can be given explicitly or
//! derived automatically; [`MarketInstance::check_assumptions`] reports
//! whether the stored bound actually has that property, along with the
//! other standing assumptions on the primitives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{CostError, CostFunction};
use crate::demand::{DemandError, InverseDemand};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("a market needs at least one supplier")]
    NoSuppliers,
    #[error("search bound must be positive and finite, got {0}")]
    InvalidSearchBound(f64),
    #[error("could not derive a search bound: the price never falls to the cheapest marginal cost within the scanned range")]
    SearchBoundNotFound,
    #[error("allocation components must be finite and nonnegative, got {0}")]
    InvalidAllocationComponent(f64),
    #[error("allocation must have at least one component")]
    EmptyAllocation,
}

/// A production profile: one nonnegative quantity per supplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Allocation(Vec<f64>);

impl Allocation {
    pub fn new(x: Vec<f64>) -> Result<Self, ModelError> {
        if x.is_empty() {
            return Err(ModelError::EmptyAllocation);
        }
        for &v in &x {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidAllocationComponent(v));
            }
        }
        Ok(Allocation(x))
    }

    /// Zero production for `n` suppliers.
    pub fn zeros(n: usize) -> Self {
        Allocation(vec![0.0; n])
    }

    pub fn x(&self) -> &[f64] {
        &self.0
    }

    /// Aggregate production `X = sum_n x_n`.
    pub fn aggregate(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Allocation {
    type Error = ModelError;
    fn try_from(x: Vec<f64>) -> Result<Self, Self::Error> {
        Allocation::new(x)
    }
}

impl From<Allocation> for Vec<f64> {
    fn from(a: Allocation) -> Vec<f64> {
        a.0
    }
}

/// Verdicts for the standing assumptions, checked on the stored primitives:
///
/// - `costs_valid`: convex, nondecreasing costs with `C(0) = 0`.
/// - `demand_valid`: continuous, nonincreasing, nonnegative price with
///   `p(0) > 0`.
/// - `bound_valid`: `p(R) <= min_n C'_n(0)` for the stored bound `R`.
/// - `nondegenerate`: `p(0) > min_n C'_n(0)`, so producing something
///   beats producing nothing.
/// - `demand_convex`: the demand curve is convex (not an assumption of the
///   model itself, but the efficiency bounds require it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub costs_valid: bool,
    pub demand_valid: bool,
    pub bound_valid: bool,
    pub nondegenerate: bool,
    pub demand_convex: bool,
}

impl AssumptionReport {
    /// True when all four model requirements hold.
    pub fn all_core(&self) -> bool {
        self.costs_valid && self.demand_valid && self.bound_valid && self.nondegenerate
    }
}

/// An oligopoly market: demand, suppliers, and the solver search bound.
///
/// Serialized as `{"demand": {...}, "costs": [...], "R": ...}`; on input,
/// `R` may be omitted and is then derived automatically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct MarketInstance {
    demand: InverseDemand,
    costs: Vec<CostFunction>,
    search_bound: f64,
}

/// Wire format for [`MarketInstance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceRepr {
    demand: InverseDemand,
    costs: Vec<CostFunction>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    search_bound: Option<f64>,
}

impl TryFrom<InstanceRepr> for MarketInstance {
    type Error = ModelError;
    fn try_from(repr: InstanceRepr) -> Result<Self, Self::Error> {
        MarketInstance::new(repr.demand, repr.costs, repr.search_bound)
    }
}

impl From<MarketInstance> for InstanceRepr {
    fn from(inst: MarketInstance) -> InstanceRepr {
        InstanceRepr {
            demand: inst.demand,
            costs: inst.costs,
            search_bound: Some(inst.search_bound),
        }
    }
}

impl MarketInstance {
    /// Builds a market after validating all primitives.  When
    /// `search_bound` is `None`, scans quantities `2^k` for the first one
    /// where the price is at or below the cheapest marginal cost at zero
    /// and doubles it.
    pub fn new(
        demand: InverseDemand,
        costs: Vec<CostFunction>,
        search_bound: Option<f64>,
    ) -> Result<Self, ModelError> {
        demand.validate()?;
        if costs.is_empty() {
            return Err(ModelError::NoSuppliers);
        }
        for c in &costs {
            c.validate()?;
        }
        let bound = match search_bound {
            Some(r) => {
                if !r.is_finite() || r <= 0.0 {
                    return Err(ModelError::InvalidSearchBound(r));
                }
                r
            }
            None => {
                let floor = costs
                    .iter()
                    .map(|c| c.marginal(0.0))
                    .fold(f64::INFINITY, f64::min);
                let mut found = None;
                for k in -20..=60 {
                    let q = 2f64.powi(k);
                    if demand.eval(q) <= floor {
                        found = Some(2.0 * q);
                        break;
                    }
                }
                found.ok_or(ModelError::SearchBoundNotFound)?
            }
        };
        Ok(MarketInstance { demand, costs, search_bound: bound })
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("market instances always serialize")
    }

    pub fn demand(&self) -> &InverseDemand {
        &self.demand
    }

    pub fn costs(&self) -> &[CostFunction] {
        &self.costs
    }

    /// Number of suppliers.
    pub fn n(&self) -> usize {
        self.costs.len()
    }

    /// The per-supplier search bound `R`.
    pub fn search_bound(&self) -> f64 {
        self.search_bound
    }

    /// Cheapest marginal cost at zero production, `min_n C'_n(0)`.
    pub fn min_marginal_at_zero(&self) -> f64 {
        self.costs
            .iter()
            .map(|c| c.marginal(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the standing assumptions on the stored primitives.
    pub fn check_assumptions(&self) -> AssumptionReport {
        let r = self.search_bound;
        let floor = self.min_marginal_at_zero();

        let costs_valid = self.costs.iter().all(|c| {
            if c.cost(0.0) != 0.0 || c.marginal(0.0) < 0.0 {
                return false;
            }
            // Nondecreasing marginal, spot-checked on a spread of scales.
            let xs = [0.0, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, r, 2.0 * r];
            xs.windows(2).all(|w| {
                w[0] > w[1] || c.marginal(w[1]) >= c.marginal(w[0]) - 1e-12
            })
        });

        let p0 = self.demand.eval(0.0);
        let demand_valid = p0 > 0.0 && {
            let hi = self.demand.support_cutoff().unwrap_or(2.0 * r).max(r);
            let mut ok = true;
            let mut prev = p0;
            for k in 1..=64 {
                let q = hi * k as f64 / 64.0;
                let p = self.demand.eval(q);
                if p < 0.0 || p > prev + 1e-12 * prev.abs().max(1.0) {
                    ok = false;
                    break;
                }
                prev = p;
            }
            ok
        };

        AssumptionReport {
            costs_valid,
            demand_valid,
            bound_valid: self.demand.eval(r) <= floor,
            nondegenerate: p0 > floor,
            demand_convex: self.demand.convexity_check(),
        }
    }

    /// Aggregate surplus of an allocation: the exact demand integral up to
    /// the aggregate production minus the sum of production costs.
    ///
    /// # Panics
    /// If the allocation length differs from the number of suppliers.
    pub fn welfare(&self, alloc: &Allocation) -> f64 {
        assert_eq!(alloc.len(), self.n(), "allocation does not match supplier count");
        let total = self.demand.integral(alloc.aggregate());
        let costs: f64 = self
            .costs
            .iter()
            .zip(alloc.x())
            .map(|(c, &x)| c.cost(x))
            .sum();
        total - costs
    }

    /// Profit of supplier `idx` (0-based) under an allocation:
    /// `x_n p(X) - C_n(x_n)`.  A supplier producing nothing earns exactly 0,
    /// even when the price at zero aggregate is infinite.
    ///
    /// # Panics
    /// If `idx` is out of range or the allocation length differs from the
    /// number of suppliers.
    pub fn profit(&self, alloc: &Allocation, idx: usize) -> f64 {
        assert_eq!(alloc.len(), self.n(), "allocation does not match supplier count");
        assert!(idx < self.n(), "supplier index {idx} out of range");
        let x = alloc.x()[idx];
        let revenue = if x > 0.0 {
            x * self.demand.eval(alloc.aggregate())
        } else {
            0.0
        };
        revenue - self.costs[idx].cost(x)
    }
}
