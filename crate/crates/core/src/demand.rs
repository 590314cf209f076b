//! Inverse demand curves.
//!
//! An inverse demand curve maps an aggregate quantity `q >= 0` to a market
//! price `p(q)`.  Every family here is continuous, nonnegative and
//! nonincreasing with `p(0) > 0` (infinite for [`InverseDemand::Log`]), and
//! exposes exact one-sided slopes and an exact integral — the solvers and
//! bound formulas lean on those instead of finite differences.
//!
//! Quantities passed to the evaluation methods must be nonnegative (and
//! strictly positive for [`InverseDemand::dminus`]); violating that is a
//! programming error and panics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Construction/validation failure for a demand curve.
#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("invalid demand parameter: {0}")]
    InvalidParameter(String),
}

/// A parametric inverse demand curve.
///
/// The serialized form is tagged by `family`, e.g.
/// `{"family":"affine","a":1.0,"b":1.0}` or
/// `{"family":"piecewise_linear","points":[[0,2],[1,1],[3,1]]} `.
/// Deserialized values should be checked with [`InverseDemand::validate`]
/// (the model constructor does this).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InverseDemand {
    /// `p(q) = max(0, b - a q)` with `a, b > 0`.
    Affine { a: f64, b: f64 },
    /// Linear interpolation through `points = [[q0, p0], ...]` with
    /// `q0 = 0`, strictly increasing quantities, and nonincreasing
    /// nonnegative prices.  Beyond the last point the final slope is
    /// extended until the price reaches zero (a flat final segment extends
    /// flat forever).
    PiecewiseLinear { points: Vec<[f64; 2]> },
    /// `p(q) = max(0, alpha - beta ln q)` with `alpha, beta > 0`.
    /// `p(0)` is positive infinity and the right slope at zero is negative
    /// infinity; the price reaches zero at `exp(alpha/beta)`.
    Log { alpha: f64, beta: f64 },
    /// `p(q) = max(0, alpha - beta q^delta)` with `alpha, beta > 0` and
    /// `0 < delta <= 1`.  For `delta < 1` the right slope at zero is
    /// negative infinity.
    Power { alpha: f64, beta: f64, delta: f64 },
    /// `p(q) = alpha (Q - q)^beta` on `[0, Q]` and zero afterwards, with
    /// `alpha > 0`, `beta >= 1`, `Q > 0`.
    ShiftedPower {
        alpha: f64,
        beta: f64,
        #[serde(rename = "Q")]
        q_zero: f64,
    },
}

/// Piecewise-linear data in normalized form: breakpoints covering every
/// kink, with the price constant (possibly zero) beyond the last one.
struct PwlProfile {
    qs: Vec<f64>,
    ps: Vec<f64>,
}

impl PwlProfile {
    fn new(points: &[[f64; 2]]) -> Self {
        let mut qs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let mut ps: Vec<f64> = points.iter().map(|p| p[1]).collect();
        let k = qs.len();
        let last_slope = (ps[k - 1] - ps[k - 2]) / (qs[k - 1] - qs[k - 2]);
        if ps[k - 1] > 0.0 && last_slope < 0.0 {
            // The extension of the last segment hits zero; make the crossing
            // an explicit breakpoint so every kink is in the list.
            qs.push(qs[k - 1] + ps[k - 1] / (-last_slope));
            ps.push(0.0);
        }
        PwlProfile { qs, ps }
    }

    fn len(&self) -> usize {
        self.qs.len()
    }

    /// Index of the segment containing `q`: the largest `i` with
    /// `qs[i] <= q`, capped at the second-to-last breakpoint.
    fn segment(&self, q: f64) -> usize {
        let n = self.len();
        let mut i = self.qs.partition_point(|&x| x <= q);
        i = i.saturating_sub(1);
        i.min(n - 2)
    }

    fn slope(&self, i: usize) -> f64 {
        (self.ps[i + 1] - self.ps[i]) / (self.qs[i + 1] - self.qs[i])
    }

    fn eval(&self, q: f64) -> f64 {
        let n = self.len();
        if q >= self.qs[n - 1] {
            return self.ps[n - 1];
        }
        let i = self.segment(q);
        (self.ps[i] + self.slope(i) * (q - self.qs[i])).max(0.0)
    }

    fn dplus(&self, q: f64) -> f64 {
        let n = self.len();
        if q >= self.qs[n - 1] {
            return 0.0;
        }
        self.slope(self.segment(q))
    }

    fn dminus(&self, q: f64) -> f64 {
        let n = self.len();
        if q > self.qs[n - 1] {
            return 0.0;
        }
        // At an interior breakpoint the left slope belongs to the previous
        // segment; just inside a segment both slopes agree.
        let i = self.qs.partition_point(|&x| x < q);
        self.slope(i.saturating_sub(1).min(n - 2))
    }

    fn integral(&self, x: f64) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n - 1 {
            if x <= self.qs[i] {
                return acc;
            }
            let hi = x.min(self.qs[i + 1]);
            let p_hi = self.ps[i] + self.slope(i) * (hi - self.qs[i]);
            acc += 0.5 * (self.ps[i] + p_hi) * (hi - self.qs[i]);
        }
        if x > self.qs[n - 1] {
            acc += self.ps[n - 1] * (x - self.qs[n - 1]);
        }
        acc
    }

    /// Effective segment slopes, with the trailing constant extension.
    fn slopes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.len() - 1).map(|i| self.slope(i)).collect();
        v.push(0.0);
        v
    }

    /// Smallest quantity at which the price is zero, if any.
    fn cutoff(&self) -> Option<f64> {
        self.ps
            .iter()
            .position(|&p| p == 0.0)
            .map(|i| self.qs[i])
    }
}

impl InverseDemand {
    pub fn affine(a: f64, b: f64) -> Result<Self, DemandError> {
        let d = InverseDemand::Affine { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn piecewise_linear(points: Vec<[f64; 2]>) -> Result<Self, DemandError> {
        let d = InverseDemand::PiecewiseLinear { points };
        d.validate()?;
        Ok(d)
    }

    pub fn log(alpha: f64, beta: f64) -> Result<Self, DemandError> {
        let d = InverseDemand::Log { alpha, beta };
        d.validate()?;
        Ok(d)
    }

    pub fn power(alpha: f64, beta: f64, delta: f64) -> Result<Self, DemandError> {
        let d = InverseDemand::Power { alpha, beta, delta };
        d.validate()?;
        Ok(d)
    }

    pub fn shifted_power(alpha: f64, beta: f64, q_zero: f64) -> Result<Self, DemandError> {
        let d = InverseDemand::ShiftedPower { alpha, beta, q_zero };
        d.validate()?;
        Ok(d)
    }

    /// Checks the parameter constraints documented on each variant.
    pub fn validate(&self) -> Result<(), DemandError> {
        let bad = |msg: String| Err(DemandError::InvalidParameter(msg));
        match self {
            InverseDemand::Affine { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return bad(format!("affine requires a > 0 and b > 0, got a={a}, b={b}"));
                }
            }
            InverseDemand::PiecewiseLinear { points } => {
                if points.len() < 2 {
                    return bad("piecewise_linear requires at least two points".into());
                }
                if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                    return bad("piecewise_linear points must be finite".into());
                }
                if points[0][0] != 0.0 {
                    return bad("piecewise_linear must start at quantity 0".into());
                }
                if points[0][1] <= 0.0 {
                    return bad("piecewise_linear requires a positive price at 0".into());
                }
                for w in points.windows(2) {
                    if w[1][0] <= w[0][0] {
                        return bad("piecewise_linear quantities must be strictly increasing".into());
                    }
                    if w[1][1] > w[0][1] {
                        return bad("piecewise_linear prices must be nonincreasing".into());
                    }
                }
                if points.iter().any(|p| p[1] < 0.0) {
                    return bad("piecewise_linear prices must be nonnegative".into());
                }
            }
            InverseDemand::Log { alpha, beta } => {
                if !(alpha.is_finite() && beta.is_finite() && *alpha > 0.0 && *beta > 0.0) {
                    return bad(format!("log requires alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}"));
                }
            }
            InverseDemand::Power { alpha, beta, delta } => {
                if !(alpha.is_finite() && beta.is_finite() && delta.is_finite())
                    || *alpha <= 0.0
                    || *beta <= 0.0
                    || *delta <= 0.0
                    || *delta > 1.0
                {
                    return bad(format!(
                        "power requires alpha > 0, beta > 0, 0 < delta <= 1, got alpha={alpha}, beta={beta}, delta={delta}"
                    ));
                }
            }
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                if !(alpha.is_finite() && beta.is_finite() && q_zero.is_finite())
                    || *alpha <= 0.0
                    || *beta < 1.0
                    || *q_zero <= 0.0
                {
                    return bad(format!(
                        "shifted_power requires alpha > 0, beta >= 1, Q > 0, got alpha={alpha}, beta={beta}, Q={q_zero}"
                    ));
                }
            }
        }
        Ok(())
    }

    fn pwl(&self) -> Option<PwlProfile> {
        match self {
            InverseDemand::PiecewiseLinear { points } => Some(PwlProfile::new(points)),
            _ => None,
        }
    }

    /// Price at aggregate quantity `q`.
    ///
    /// `Log` returns positive infinity at `q = 0`.
    ///
    /// # Panics
    /// If `q < 0` or `q` is NaN.
    pub fn eval(&self, q: f64) -> f64 {
        assert!(q >= 0.0, "demand evaluated at negative quantity {q}");
        match self {
            InverseDemand::Affine { a, b } => (b - a * q).max(0.0),
            InverseDemand::PiecewiseLinear { .. } => self.pwl().unwrap().eval(q),
            InverseDemand::Log { alpha, beta } => {
                if q == 0.0 {
                    f64::INFINITY
                } else {
                    (alpha - beta * q.ln()).max(0.0)
                }
            }
            InverseDemand::Power { alpha, beta, delta } => (alpha - beta * q.powf(*delta)).max(0.0),
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                if q >= *q_zero {
                    0.0
                } else {
                    alpha * (q_zero - q).powf(*beta)
                }
            }
        }
    }

    /// Right (one-sided) slope at `q >= 0`.
    ///
    /// Negative infinity where the curve falls off vertically (`Log` at 0,
    /// `Power` with `delta < 1` at 0).
    ///
    /// # Panics
    /// If `q < 0` or `q` is NaN.
    pub fn dplus(&self, q: f64) -> f64 {
        assert!(q >= 0.0, "demand slope requested at negative quantity {q}");
        match self {
            InverseDemand::Affine { a, b } => {
                if q < b / a {
                    -a
                } else {
                    0.0
                }
            }
            InverseDemand::PiecewiseLinear { .. } => self.pwl().unwrap().dplus(q),
            InverseDemand::Log { beta, .. } => {
                if q == 0.0 {
                    f64::NEG_INFINITY
                } else if q < self.support_cutoff().unwrap() {
                    -beta / q
                } else {
                    0.0
                }
            }
            InverseDemand::Power { beta, delta, .. } => {
                if q >= self.support_cutoff().unwrap() {
                    0.0
                } else if q == 0.0 {
                    if *delta < 1.0 {
                        f64::NEG_INFINITY
                    } else {
                        -beta
                    }
                } else {
                    -beta * delta * q.powf(delta - 1.0)
                }
            }
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                if q >= *q_zero {
                    0.0
                } else {
                    -alpha * beta * (q_zero - q).powf(beta - 1.0)
                }
            }
        }
    }

    /// Left (one-sided) slope at `q > 0`.
    ///
    /// # Panics
    /// If `q <= 0` or `q` is NaN.
    pub fn dminus(&self, q: f64) -> f64 {
        assert!(q > 0.0, "left slope requested at nonpositive quantity {q}");
        match self {
            InverseDemand::Affine { a, b } => {
                if q <= b / a {
                    -a
                } else {
                    0.0
                }
            }
            InverseDemand::PiecewiseLinear { .. } => self.pwl().unwrap().dminus(q),
            InverseDemand::Log { beta, .. } => {
                if q <= self.support_cutoff().unwrap() {
                    -beta / q
                } else {
                    0.0
                }
            }
            InverseDemand::Power { beta, delta, .. } => {
                if q <= self.support_cutoff().unwrap() {
                    -beta * delta * q.powf(delta - 1.0)
                } else {
                    0.0
                }
            }
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                if q > *q_zero {
                    0.0
                } else {
                    // For beta > 1 this limit is 0 at q = Q; powf handles it.
                    -alpha * beta * (q_zero - q).powf(beta - 1.0)
                }
            }
        }
    }

    /// Second derivative at `q > 0` where the curve is twice differentiable;
    /// `None` at kinks (piecewise breakpoints, support cutoffs).
    pub fn d2(&self, q: f64) -> Option<f64> {
        assert!(q > 0.0);
        let beyond_cutoff = |cut: Option<f64>| cut.map(|c| q > c).unwrap_or(false);
        let at_cutoff = |cut: Option<f64>| cut.map(|c| q == c).unwrap_or(false);
        let cut = self.support_cutoff();
        if at_cutoff(cut) {
            return None;
        }
        if beyond_cutoff(cut) {
            return Some(0.0);
        }
        match self {
            InverseDemand::Affine { .. } => Some(0.0),
            InverseDemand::PiecewiseLinear { .. } => {
                let prof = self.pwl().unwrap();
                if prof.qs.contains(&q) {
                    None
                } else {
                    Some(0.0)
                }
            }
            InverseDemand::Log { beta, .. } => Some(beta / (q * q)),
            InverseDemand::Power { beta, delta, .. } => {
                Some(-beta * delta * (delta - 1.0) * q.powf(delta - 2.0))
            }
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                if *beta == 1.0 {
                    // Avoid 0 * inf from the (Q - q)^(beta - 2) factor.
                    Some(0.0)
                } else {
                    Some(alpha * beta * (beta - 1.0) * (q_zero - q).powf(beta - 2.0))
                }
            }
        }
    }

    /// Exact value of `∫_0^x p(q) dq`.
    ///
    /// # Panics
    /// If `x < 0` or `x` is NaN.
    pub fn integral(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "demand integral requested on negative range {x}");
        match self {
            InverseDemand::Affine { a, b } => {
                let xc = x.min(b / a);
                b * xc - 0.5 * a * xc * xc
            }
            InverseDemand::PiecewiseLinear { .. } => self.pwl().unwrap().integral(x),
            InverseDemand::Log { alpha, beta } => {
                let xc = x.min(self.support_cutoff().unwrap());
                if xc == 0.0 {
                    0.0
                } else {
                    alpha * xc - beta * (xc * xc.ln() - xc)
                }
            }
            InverseDemand::Power { alpha, beta, delta } => {
                let xc = x.min(self.support_cutoff().unwrap());
                alpha * xc - beta * xc.powf(delta + 1.0) / (delta + 1.0)
            }
            InverseDemand::ShiftedPower { alpha, beta, q_zero } => {
                let xc = x.min(*q_zero);
                alpha / (beta + 1.0) * (q_zero.powf(beta + 1.0) - (q_zero - xc).powf(beta + 1.0))
            }
        }
    }

    /// Smallest quantity at which the price reaches zero, or `None` when the
    /// price stays positive forever (e.g. a flat piecewise tail).
    pub fn support_cutoff(&self) -> Option<f64> {
        match self {
            InverseDemand::Affine { a, b } => Some(b / a),
            InverseDemand::PiecewiseLinear { .. } => self.pwl().unwrap().cutoff(),
            InverseDemand::Log { alpha, beta } => Some((alpha / beta).exp()),
            InverseDemand::Power { alpha, beta, delta } => Some((alpha / beta).powf(1.0 / delta)),
            InverseDemand::ShiftedPower { q_zero, .. } => Some(*q_zero),
        }
    }

    /// True when the curve is convex: one-sided slopes are nondecreasing in
    /// `q`.  Exact for every family (the analytic families are convex by
    /// their parameter constraints; piecewise-linear checks its slopes).
    pub fn convexity_check(&self) -> bool {
        match self.pwl() {
            Some(prof) => {
                let slopes = prof.slopes();
                slopes.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
            }
            None => true,
        }
    }

    /// Grid check of the marginal-revenue slope condition
    /// `p'(q) + q p''(q) <= 0`, which guarantees that a quantity-setting
    /// supplier's marginal revenue is nonincreasing in the aggregate.
    ///
    /// Evaluates a mixed geometric + uniform grid of `resolution` points on
    /// the support, skipping kinks (piecewise-linear segments have zero
    /// second derivative, so only their interiors matter).
    pub fn check_novshek(&self, resolution: usize) -> bool {
        let resolution = resolution.max(16);
        let hi = match self.support_cutoff() {
            Some(c) => c,
            // Flat positive tail: both terms vanish beyond the last kink,
            // so scanning a few multiples of the kink range is enough.
            None => match self {
                InverseDemand::PiecewiseLinear { points } => points.last().unwrap()[0] * 4.0,
                _ => unreachable!("analytic families always have a cutoff"),
            },
        };
        let lo = hi * 1e-9;
        let half = resolution / 2;
        let ratio = (hi / lo).powf(1.0 / half as f64);
        let mut points = Vec::with_capacity(resolution);
        let mut g = lo;
        for _ in 0..half {
            points.push(g);
            g *= ratio;
        }
        for k in 1..=half {
            points.push(hi * k as f64 / (half + 1) as f64);
        }
        for q in points {
            if q <= 0.0 || q >= hi {
                continue;
            }
            let Some(p2) = self.d2(q) else { continue };
            let slope = self.dplus(q);
            if slope == f64::NEG_INFINITY {
                continue;
            }
            let tol = 1e-12 * slope.abs().max(1.0);
            if slope + q * p2 > tol {
                return false;
            }
        }
        true
    }
}
