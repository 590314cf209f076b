//! Single-good oligopoly markets: a handful of suppliers with convex costs
//! face a nonincreasing inverse demand curve and choose production
//! quantities.  This crate computes the three canonical outcomes of such a
//! market — the welfare-maximizing allocation, Cournot (quantity-competition)
//! outcomes, and the profit-maximizing monopoly output — and evaluates
//! closed-form lower bounds on the efficiency of the competitive outcomes.
//!
//! Everything is plain `f64` numerics over immutable values: no global
//! state, no interior mutability, and every solve is deterministic, so the
//! whole API is safe to call from concurrent threads.
//!
//! Organization:
//! - [`demand`]: inverse demand families (evaluation, one-sided slopes,
//!   exact integrals, shape checks).
//! - [`cost`]: supplier cost functions and their inverse-marginal helpers.
//! - [`model`]: a market instance (demand + costs + search bound), welfare,
//!   profits, and assumption checks.
//! - [`solver`]: social optimum, Cournot candidates, global equilibrium
//!   verification, monopoly output, best-response dynamics.
//! - [`efficiency`]: the efficiency ratio, the curvature statistics, the
//!   lower-bound formulas, the cost/demand transforms, and report assembly.
//! - [`catalog`]: ready-made worked examples, the tight-instance family,
//!   and seeded random instance generation.

pub mod catalog;
pub mod cost;
pub mod demand;
pub mod efficiency;
pub mod model;
mod numeric;
pub mod solver;

pub use cost::CostFunction;
pub use demand::InverseDemand;
pub use efficiency::{AnalysisReport, EfficiencyReport};
pub use model::{Allocation, AssumptionReport, MarketInstance};
pub use solver::{SolveResult, SolverConfig};
