//! Demand and latency curves.
//!
//! A market is described by two kinds of curve:
//!
//! * a [`DemandCurve`] `P(q)`, the price at which a mass `q` of users is
//!   served, together with its inverse `Q(p)`;
//! * a [`LatencyCurve`] `l(x)`, the congestion cost at load ratio
//!   `x = q / C` on a band of capacity `C`.
//!
//! Both are immutable, cheap to clone (the implementation is shared behind
//! an [`Arc`]) and safe to evaluate from several threads. General curves are
//! supplied by implementing [`DemandFunction`] or [`LatencyFunction`]; every
//! implementation provides the map, its first two derivatives and its inverse.
//!
//! Evaluation through the curve wrappers is domain checked. A point that is
//! outside the domain by more than rounding noise is an error, never clamped.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver;

/// Relative slack tolerated at domain boundaries. Points inside the slack are
/// evaluated at the boundary itself.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A concave decreasing price-versus-quantity map on `[0, q_max]`.
///
/// Implementors may assume arguments already lie inside the domain; the
/// [`DemandCurve`] wrapper checks them.
pub trait DemandFunction: fmt::Debug + Send + Sync {
    /// `P(q)`.
    fn price(&self, q: f64) -> f64;
    /// `P'(q)`, strictly negative.
    fn slope(&self, q: f64) -> f64;
    /// `P''(q)`, non-positive.
    fn curvature(&self, q: f64) -> f64;
    /// `Q(p)`, the inverse of `P` on `[0, p_max]`.
    fn quantity(&self, p: f64) -> f64;
    fn p_max(&self) -> f64;
    fn q_max(&self) -> f64;

    /// Gross utility `∫₀^q P(s) ds`. The default integrates numerically.
    fn gross_utility(&self, q: f64) -> f64 {
        solver::integrate(|s| self.price(s), 0.0, q, 1e-14)
    }

    /// `(p_max, q_max)` when the curve is the linear one.
    fn linear_parameters(&self) -> Option<(f64, f64)> {
        None
    }
}

/// A convex increasing latency map with `l(0) = 0`, defined for `x >= 0`.
pub trait LatencyFunction: fmt::Debug + Send + Sync {
    /// `l(x)`.
    fn latency(&self, x: f64) -> f64;
    /// `l'(x)`.
    fn slope(&self, x: f64) -> f64;
    /// `l''(x)`.
    fn curvature(&self, x: f64) -> f64;
    /// `l⁻¹(y)` for `y >= 0`.
    fn inverse(&self, y: f64) -> f64;

    /// True when `l(x) = x`.
    fn is_identity(&self) -> bool {
        false
    }
}

/// Linear demand `P(q) = p_max (1 - q / q_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearDemand {
    p_max: f64,
    q_max: f64,
}

impl DemandFunction for LinearDemand {
    fn price(&self, q: f64) -> f64 {
        self.p_max * (1.0 - q / self.q_max)
    }

    fn slope(&self, _q: f64) -> f64 {
        -self.p_max / self.q_max
    }

    fn curvature(&self, _q: f64) -> f64 {
        0.0
    }

    fn quantity(&self, p: f64) -> f64 {
        self.q_max * (1.0 - p / self.p_max)
    }

    fn p_max(&self) -> f64 {
        self.p_max
    }

    fn q_max(&self) -> f64 {
        self.q_max
    }

    fn gross_utility(&self, q: f64) -> f64 {
        self.p_max * q * (1.0 - 0.5 * q / self.q_max)
    }

    fn linear_parameters(&self) -> Option<(f64, f64)> {
        Some((self.p_max, self.q_max))
    }
}

/// `l(x) = x`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LinearLatency;

impl LatencyFunction for LinearLatency {
    fn latency(&self, x: f64) -> f64 {
        x
    }

    fn slope(&self, _x: f64) -> f64 {
        1.0
    }

    fn curvature(&self, _x: f64) -> f64 {
        0.0
    }

    fn inverse(&self, y: f64) -> f64 {
        y
    }

    fn is_identity(&self) -> bool {
        true
    }
}

/// `l(x) = x^k` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLatency {
    exponent: f64,
}

impl LatencyFunction for PowerLatency {
    fn latency(&self, x: f64) -> f64 {
        x.powf(self.exponent)
    }

    fn slope(&self, x: f64) -> f64 {
        self.exponent * x.powf(self.exponent - 1.0)
    }

    fn curvature(&self, x: f64) -> f64 {
        let k = self.exponent;
        if k == 1.0 {
            0.0
        } else {
            // infinite at x = 0 when 1 < k < 2
            k * (k - 1.0) * x.powf(k - 2.0)
        }
    }

    fn inverse(&self, y: f64) -> f64 {
        y.powf(self.exponent.recip())
    }

    fn is_identity(&self) -> bool {
        self.exponent == 1.0
    }
}

/// Shared handle on a [`DemandFunction`] with domain-checked evaluation.
#[derive(Clone)]
pub struct DemandCurve {
    inner: Arc<dyn DemandFunction>,
}

impl fmt::Debug for DemandCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

/// Checks `x` against `[lo, hi]`, snapping points within the slack onto the boundary.
fn in_interval(what: &str, x: f64, lo: f64, hi: f64) -> Result<f64> {
    let width = if hi.is_finite() { hi - lo } else { 0.0 };
    let slack = BOUNDARY_SLACK * width.max(1.0);
    if x.is_nan() || x < lo - slack || x > hi + slack {
        return Err(Error::domain(format!("{what} {x} outside [{lo}, {hi}]")));
    }
    Ok(x.clamp(lo, hi))
}

impl DemandCurve {
    pub fn new(curve: impl DemandFunction + 'static) -> Self {
        Self {
            inner: Arc::new(curve),
        }
    }

    /// `P(q) = p_max (1 - q / q_max)`.
    pub fn linear(p_max: f64, q_max: f64) -> Result<Self> {
        Ok(Self::new(LinearDemand {
            p_max: positive("p_max", p_max)?,
            q_max: positive("q_max", q_max)?,
        }))
    }

    /// Linear demand with the usual normalisation `q_max = 1`.
    pub fn linear_unit(p_max: f64) -> Result<Self> {
        Self::linear(p_max, 1.0)
    }

    pub fn p_max(&self) -> f64 {
        self.inner.p_max()
    }

    pub fn q_max(&self) -> f64 {
        self.inner.q_max()
    }

    fn check_quantity(&self, q: f64) -> Result<f64> {
        in_interval("quantity", q, 0.0, self.q_max())
    }

    fn check_price(&self, p: f64) -> Result<f64> {
        in_interval("price", p, 0.0, self.p_max())
    }

    pub fn price(&self, q: f64) -> Result<f64> {
        Ok(self.inner.price(self.check_quantity(q)?))
    }

    pub fn slope(&self, q: f64) -> Result<f64> {
        Ok(self.inner.slope(self.check_quantity(q)?))
    }

    pub fn curvature(&self, q: f64) -> Result<f64> {
        Ok(self.inner.curvature(self.check_quantity(q)?))
    }

    /// Inverse demand `Q(p)`.
    pub fn quantity(&self, p: f64) -> Result<f64> {
        Ok(self.inner.quantity(self.check_price(p)?))
    }

    /// `Q'(p) = 1 / P'(Q(p))`.
    pub fn quantity_slope(&self, p: f64) -> Result<f64> {
        let q = self.quantity(p)?;
        Ok(self.slope(q)?.recip())
    }

    /// `∫₀^q P`.
    pub fn gross_utility(&self, q: f64) -> Result<f64> {
        Ok(self.inner.gross_utility(self.check_quantity(q)?))
    }

    /// Consumer surplus at served quantity `q`: `∫₀^q P - q P(q)`.
    pub fn consumer_surplus(&self, q: f64) -> Result<f64> {
        Ok(self.gross_utility(q)? - q * self.price(q)?)
    }

    /// `p_max` when this is a linear curve with `q_max = 1`.
    pub fn unit_linear_p_max(&self) -> Option<f64> {
        match self.inner.linear_parameters() {
            Some((p_max, 1.0)) => Some(p_max),
            _ => None,
        }
    }
}

/// Shared handle on a [`LatencyFunction`] with domain-checked evaluation.
#[derive(Clone)]
pub struct LatencyCurve {
    inner: Arc<dyn LatencyFunction>,
}

impl fmt::Debug for LatencyCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

impl LatencyCurve {
    pub fn new(curve: impl LatencyFunction + 'static) -> Self {
        Self {
            inner: Arc::new(curve),
        }
    }

    /// `l(x) = x`.
    pub fn linear() -> Self {
        Self::new(LinearLatency)
    }

    /// `l(x) = x^k`; `k < 1` would break convexity.
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(Error::domain(format!(
                "latency exponent must be >= 1, got {exponent}"
            )));
        }
        Ok(Self::new(PowerLatency { exponent }))
    }

    fn check_load(x: f64) -> Result<f64> {
        in_interval("load ratio", x, 0.0, f64::INFINITY)
    }

    pub fn latency(&self, x: f64) -> Result<f64> {
        Ok(self.inner.latency(Self::check_load(x)?))
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        Ok(self.inner.slope(Self::check_load(x)?))
    }

    pub fn curvature(&self, x: f64) -> Result<f64> {
        Ok(self.inner.curvature(Self::check_load(x)?))
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        let y = in_interval("latency level", y, 0.0, f64::INFINITY)?;
        Ok(self.inner.inverse(y))
    }

    /// Marginal latency cost `x l'(x) + l(x)`, strictly increasing in `x`.
    pub fn marginal_cost(&self, x: f64) -> Result<f64> {
        Ok(x * self.slope(x)? + self.latency(x)?)
    }

    pub fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }
}

/// Serializable description of one of the built-in curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveSpec {
    LinearDemand {
        p_max: f64,
        #[serde(default = "unit")]
        q_max: f64,
    },
    LinearLatency,
    PowerLatency {
        exponent: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl CurveSpec {
    pub fn demand(&self) -> Result<DemandCurve> {
        match *self {
            CurveSpec::LinearDemand { p_max, q_max } => DemandCurve::linear(p_max, q_max),
            _ => Err(Error::config(
                "demand",
                format!("{self:?} is not a demand curve"),
            )),
        }
    }

    pub fn latency(&self) -> Result<LatencyCurve> {
        match *self {
            CurveSpec::LinearLatency => Ok(LatencyCurve::linear()),
            CurveSpec::PowerLatency { exponent } => LatencyCurve::power(exponent),
            CurveSpec::LinearDemand { .. } => Err(Error::config(
                "latency",
                "linear-demand is not a latency curve",
            )),
        }
    }
}
