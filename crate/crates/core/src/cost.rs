//! Supplier cost functions.
//!
//! Every cost function is convex, continuous, and nondecreasing on
//! `[0, inf)` with `C(0) = 0` and a nondecreasing marginal `C'`.  Besides
//! plain evaluation, two inverse-marginal helpers drive the solvers:
//!
//! - [`CostFunction::share_at`] solves `C'(x) + m x = y`, the stationarity
//!   condition of a supplier facing price level `y` and (absolute) demand
//!   slope `m` — the building block of the Cournot fixed-point map.
//! - [`CostFunction::supply_at`] returns the largest production with
//!   marginal cost at most `y`, the building block of aggregate (least-cost)
//!   production splits.

use serde::{Deserialize, Serialize};
use thiserror::Error;


/// Quantity tolerance for the scalar bisections in this module.
pub const QUANTITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
    #[error("unbounded share: constant marginal cost {marginal} stays below price {price} at zero demand slope")]
    UnboundedShare { marginal: f64, price: f64 },
}

/// A single supplier's cost function.
///
/// Serialized with a `kind` tag, e.g. `{"kind":"linear","slope":0.5}`,
/// `{"kind":"quadratic","coef":1.0}`, `{"kind":"power","coef":1.0,"exponent":3.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    /// `C(x) = slope * x`, `slope >= 0`.
    Linear { slope: f64 },
    /// `C(x) = coef * x^2`, `coef > 0`.
    Quadratic { coef: f64 },
    /// `C(x) = coef * x^exponent`, `coef > 0`, `exponent >= 1`.
    Power { coef: f64, exponent: f64 },
}

impl CostFunction {
    pub fn linear(slope: f64) -> Result<Self, CostError> {
        let c = CostFunction::Linear { slope };
        c.validate()?;
        Ok(c)
    }

    pub fn quadratic(coef: f64) -> Result<Self, CostError> {
        let c = CostFunction::Quadratic { coef };
        c.validate()?;
        Ok(c)
    }

    pub fn power(coef: f64, exponent: f64) -> Result<Self, CostError> {
        let c = CostFunction::Power { coef, exponent };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CostError> {
        let bad = |msg: String| Err(CostError::InvalidParameter(msg));
        match self {
            CostFunction::Linear { slope } => {
                if !slope.is_finite() || *slope < 0.0 {
                    return bad(format!("linear requires slope >= 0, got {slope}"));
                }
            }
            CostFunction::Quadratic { coef } => {
                if !coef.is_finite() || *coef <= 0.0 {
                    return bad(format!("quadratic requires coef > 0, got {coef}"));
                }
            }
            CostFunction::Power { coef, exponent } => {
                if !(coef.is_finite() && exponent.is_finite()) || *coef <= 0.0 || *exponent < 1.0 {
                    return bad(format!(
                        "power requires coef > 0 and exponent >= 1, got coef={coef}, exponent={exponent}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// The constant marginal cost, when the marginal is in fact constant
    /// (`Linear`, or `Power` with exponent 1).
    pub fn constant_marginal(&self) -> Option<f64> {
        match self {
            CostFunction::Linear { slope } => Some(*slope),
            CostFunction::Power { coef, exponent } if *exponent == 1.0 => Some(*coef),
            _ => None,
        }
    }

    /// Production cost at `x >= 0`.
    ///
    /// # Panics
    /// If `x < 0` or `x` is NaN.
    pub fn cost(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "cost evaluated at negative quantity {x}");
        match self {
            CostFunction::Linear { slope } => slope * x,
            CostFunction::Quadratic { coef } => coef * x * x,
            CostFunction::Power { coef, exponent } => coef * x.powf(*exponent),
        }
    }

    /// Marginal cost at `x >= 0` (the right derivative at 0).
    ///
    /// # Panics
    /// If `x < 0` or `x` is NaN.
    pub fn marginal(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "marginal cost evaluated at negative quantity {x}");
        match self {
            CostFunction::Linear { slope } => *slope,
            CostFunction::Quadratic { coef } => 2.0 * coef * x,
            CostFunction::Power { coef, exponent } => {
                if *exponent == 1.0 {
                    *coef
                } else if x == 0.0 {
                    0.0
                } else {
                    coef * exponent * x.powf(exponent - 1.0)
                }
            }
        }
    }

    /// Solves the supplier stationarity condition `C'(x) + m x = y` for
    /// `x >= 0`, given a price level `y >= 0` and an absolute demand slope
    /// `m >= 0`.  Returns 0 when `C'(0) >= y` (the supplier stays out).
    ///
    /// # Errors
    /// [`CostError::UnboundedShare`] when `m = 0` and the marginal cost is a
    /// constant below `y`: every production level improves, no finite
    /// solution exists.
    ///
    /// # Panics
    /// If `y < 0`, `m < 0`, or either is NaN.
    pub fn share_at(&self, y: f64, m: f64) -> Result<f64, CostError> {
        assert!(y >= 0.0, "share_at called with negative price {y}");
        assert!(m >= 0.0, "share_at called with negative slope magnitude {m}");
        if self.marginal(0.0) >= y {
            return Ok(0.0);
        }
        if let Some(slope) = self.constant_marginal() {
            if m == 0.0 {
                return Err(CostError::UnboundedShare { marginal: slope, price: y });
            }
            return Ok((y - slope) / m);
        }
        match self {
            CostFunction::Quadratic { coef } => Ok(y / (2.0 * coef + m)),
            CostFunction::Power { coef, exponent } => {
                // C'(x) + m x is continuous and strictly increasing on
                // x > 0; bracket the crossing by doubling, then bisect.
                let g = |x: f64| coef * exponent * x.powf(exponent - 1.0) + m * x;
                let tol = QUANTITY_TOL;
                if g(tol) >= y {
                    // Exponents barely above 1 make the marginal jump to
                    // nearly `coef * exponent` within one quantity-tolerance
                    // step of zero.  When that already covers the price, the
                    // crossing sits below resolution: the supplier stays out.
                    return Ok(0.0);
                }
                let mut hi = 1.0;
                while g(hi) < y {
                    hi *= 2.0;
                    assert!(hi.is_finite(), "share bracket diverged");
                }
                // Bisect geometrically: the marginal's slope is unbounded
                // near zero, so only relative precision on x keeps the
                // stationarity residual small when the crossing is tiny.
                let mut lo = tol;
                for _ in 0..200 {
                    if hi - lo <= f64::EPSILON * hi {
                        break;
                    }
                    let mid = (lo * hi).sqrt();
                    if g(mid) >= y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
            CostFunction::Linear { .. } => unreachable!("handled by constant_marginal"),
        }
    }

    /// Largest production in `[0, cap]` whose marginal cost does not exceed
    /// `y`; 0 when even the first unit is too expensive.
    ///
    /// # Panics
    /// If `y < 0`, `cap <= 0`, or either is NaN.
    pub fn supply_at(&self, y: f64, cap: f64) -> f64 {
        assert!(y >= 0.0, "supply_at called with negative price {y}");
        assert!(cap > 0.0, "supply_at called with nonpositive cap {cap}");
        if let Some(slope) = self.constant_marginal() {
            return if slope <= y { cap } else { 0.0 };
        }
        match self {
            CostFunction::Quadratic { coef } => (y / (2.0 * coef)).min(cap),
            CostFunction::Power { coef, exponent } => {
                // exponent > 1 here (exponent 1 is a constant marginal).
                (y / (coef * exponent)).powf(1.0 / (exponent - 1.0)).min(cap)
            }
            CostFunction::Linear { .. } => unreachable!("handled by constant_marginal"),
        }
    }
}
