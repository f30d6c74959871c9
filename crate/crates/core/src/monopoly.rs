//! A single revenue-maximizing provider, alone or next to an open-access
//! (whitespace) band.
//!
//! Users pick whichever band has the lowest delivered price `p + l(q/C)`, so
//! for a monopolist the price and the served quantity are tied together by
//! `p = P(q) - l_m(q/C)`. The provider therefore chooses `q` to maximize
//! `q (P(q) - l_m(q/C))`, a strictly concave program whose stationarity
//! condition is
//!
//! ```text
//! q = -(P(q) - l_m(q/C)) / (P'(q) - l_m'(q/C) / C)
//! ```
//!
//! With a whitespace band of capacity `W` the user equilibrium leaves one
//! degree of freedom, taken here to be the whitespace quantity `q_w`:
//!
//! ```text
//! q_m = Q(l_w(q_w/W)) - q_w,    p = l_w(q_w/W) - l_m(q_m/C)
//! ```
//!
//! and the provider maximizes `p q_m` over `q_w ∈ [q̃_w, q̂_w]`, where `q̂_w`
//! is the whitespace load with the licensed band priced out and `q̃_w` the
//! load when the provider charges nothing.

use serde::{Deserialize, Serialize};

use crate::curves::{DemandCurve, LatencyCurve};
use crate::error::{Error, Result};
use crate::outcome::{Channel, ChannelKind, EquilibriumOutcome};
use crate::solver::{self, Bracket, SolverSettings};

pub(crate) fn check_capacity(name: &str, value: f64, allow_zero: bool) -> Result<f64> {
    let ok = value.is_finite() && (value > 0.0 || (allow_zero && value == 0.0));
    if ok {
        Ok(value)
    } else {
        let bound = if allow_zero { ">= 0" } else { "> 0" };
        Err(Error::domain(format!(
            "{name} must be finite and {bound}, got {value}"
        )))
    }
}

#[derive(Clone, Debug)]
pub struct MonopolyScenario {
    pub demand: DemandCurve,
    pub latency: LatencyCurve,
    pub capacity: f64,
}

impl MonopolyScenario {
    pub fn new(demand: DemandCurve, latency: LatencyCurve, capacity: f64) -> Result<Self> {
        Ok(Self {
            demand,
            latency,
            capacity: check_capacity("capacity", capacity, false)?,
        })
    }

    /// Linear demand with `q_max = 1` and `l(x) = x`.
    pub fn linear(p_max: f64, capacity: f64) -> Result<Self> {
        Self::new(
            DemandCurve::linear_unit(p_max)?,
            LatencyCurve::linear(),
            capacity,
        )
    }

    /// Provider price needed to serve `q`: `P(q) - l_m(q/C)`.
    pub fn price_for(&self, q: f64) -> Result<f64> {
        Ok(self.demand.price(q)? - self.latency.latency(q / self.capacity)?)
    }

    /// Revenue `q (P(q) - l_m(q/C))`.
    pub fn revenue_at(&self, q: f64) -> Result<f64> {
        Ok(q * self.price_for(q)?)
    }

    /// `q + (P - l_m) / (P' - l_m'/C)`, zero at the revenue-optimal quantity.
    pub fn fixed_point_residual(&self, q: f64) -> Result<f64> {
        let c = self.capacity;
        let slope = self.demand.slope(q)? - self.latency.slope(q / c)? / c;
        Ok(q + self.price_for(q)? / slope)
    }

    /// Largest servable quantity `q̂_m`, where the price drops to zero.
    pub fn saturation_quantity(&self) -> Result<f64> {
        let bracket = Bracket::new(0.0, self.demand.q_max())?;
        solver::find_root(
            |q| self.price_for(q),
            bracket,
            SolverSettings::equilibrium(),
        )
    }

    fn marginal_revenue(&self, q: f64) -> Result<f64> {
        let c = self.capacity;
        let slope = self.demand.slope(q)? - self.latency.slope(q / c)? / c;
        Ok(self.price_for(q)? + q * slope)
    }
}

/// Revenue-optimal monopoly equilibrium for general curves.
pub fn solve_monopoly(s: &MonopolyScenario) -> Result<EquilibriumOutcome> {
    let q_hat = s.saturation_quantity()?;
    let q = solver::find_root(
        |q| s.marginal_revenue(q),
        Bracket::new(0.0, q_hat)?,
        SolverSettings::equilibrium(),
    )?;
    let latency = s.latency.latency(q / s.capacity)?;
    let price = s.price_for(q)?;
    EquilibriumOutcome::assemble(
        &s.demand,
        vec![Channel::priced(ChannelKind::Monopoly, q, price, latency)],
    )
}

/// The monopoly equilibrium for linear demand (`q_max = 1`) and `l(x) = x`.
pub fn monopoly_closed_form_linear(p_max: f64, capacity: f64) -> Result<EquilibriumOutcome> {
    let s = MonopolyScenario::linear(p_max, capacity)?;
    let cp = capacity * p_max;
    let share = cp / (1.0 + cp);
    let q = 0.5 * share;
    let price = 0.5 * p_max;
    let revenue = 0.25 * p_max * share;
    let surplus = p_max / 8.0 * share * share;
    Ok(EquilibriumOutcome {
        channels: vec![Channel {
            kind: ChannelKind::Monopoly,
            quantity: q,
            price,
            latency: q / s.capacity,
            revenue,
        }],
        delivered_price: p_max * (1.0 - q),
        revenue,
        consumer_surplus: surplus,
        total_welfare: revenue + surplus,
    })
}

/// `∂T_m/∂C` for linear curves.
pub fn monopoly_welfare_slope_linear(p_max: f64, capacity: f64) -> f64 {
    let cp = capacity * p_max;
    p_max / (4.0 * (1.0 + cp).powi(2)) * (1.0 + cp / (1.0 + cp))
}

/// First-order response of the monopoly equilibrium to its capacity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonopolySensitivity {
    /// `∂q_m*/∂C`.
    pub quantity_slope: f64,
    /// `∂p_m*/∂C`.
    pub price_slope: f64,
    /// `∂T/∂C`.
    pub welfare_slope: f64,
    /// Denominator of the implicit-function derivative.
    pub beta: f64,
}

/// Differentiates the stationarity condition implicitly in `C`.
pub fn monopoly_sensitivity(s: &MonopolyScenario) -> Result<MonopolySensitivity> {
    let eq = solve_monopoly(s)?;
    let q = eq.quantity(ChannelKind::Monopoly);
    let c = s.capacity;
    let x = q / c;
    let margin = s.price_for(q)?;
    let (d1, d2) = (s.demand.slope(q)?, s.demand.curvature(q)?);
    let (l1, l2) = (s.latency.slope(x)?, s.latency.curvature(x)?);
    let net_slope = d1 - l1 / c;
    let beta = 2.0 * net_slope * net_slope - margin * (d2 - l2 / (c * c));
    if !(beta > 0.0) {
        return Err(Error::Degenerate(format!("beta = {beta} is not positive")));
    }
    let quantity_slope = margin * (2.0 * l1 / (c * c) + q * l2 / c.powi(3)) / beta;
    let price_slope = quantity_slope * net_slope + q * l1 / (c * c);
    // Capacity enters welfare through the quantity and through -q l(q/C).
    let welfare_slope = -q * d1 * quantity_slope + q * q * l1 / (c * c);
    Ok(MonopolySensitivity {
        quantity_slope,
        price_slope,
        welfare_slope,
        beta,
    })
}

#[derive(Clone, Debug)]
pub struct MonopolyWhitespaceScenario {
    pub demand: DemandCurve,
    pub provider_latency: LatencyCurve,
    pub whitespace_latency: LatencyCurve,
    pub capacity: f64,
    pub whitespace: f64,
}

impl MonopolyWhitespaceScenario {
    pub fn new(
        demand: DemandCurve,
        provider_latency: LatencyCurve,
        whitespace_latency: LatencyCurve,
        capacity: f64,
        whitespace: f64,
    ) -> Result<Self> {
        Ok(Self {
            demand,
            provider_latency,
            whitespace_latency,
            capacity: check_capacity("capacity", capacity, false)?,
            whitespace: check_capacity("whitespace", whitespace, true)?,
        })
    }

    /// Linear demand (`q_max = 1`) and `l(x) = x` on both bands.
    pub fn linear(p_max: f64, capacity: f64, whitespace: f64) -> Result<Self> {
        let l = LatencyCurve::linear();
        Self::new(
            DemandCurve::linear_unit(p_max)?,
            l.clone(),
            l,
            capacity,
            whitespace,
        )
    }

    pub fn without_whitespace(&self) -> MonopolyScenario {
        MonopolyScenario {
            demand: self.demand.clone(),
            latency: self.provider_latency.clone(),
            capacity: self.capacity,
        }
    }

    /// Quantity left to the provider and its price when `q_w` users sit on whitespace.
    pub fn split_at(&self, q_w: f64) -> Result<(f64, f64)> {
        self.split_at_load(q_w / self.whitespace)
    }

    /// As [`split_at`](Self::split_at), with whitespace load ratio `x = q_w / W`.
    fn split_at_load(&self, x: f64) -> Result<(f64, f64)> {
        let level = self.whitespace_latency.latency(x)?;
        // Zero at q̂_w up to rounding.
        let q_m = (self.demand.quantity(level)? - self.whitespace * x).max(0.0);
        let price = level - self.provider_latency.latency(q_m / self.capacity)?;
        Ok((q_m, price))
    }

    /// Provider revenue as a function of the whitespace quantity.
    pub fn revenue_at(&self, q_w: f64) -> Result<f64> {
        let (q_m, price) = self.split_at(q_w)?;
        Ok(q_m * price)
    }

    /// Derivative of revenue in the load ratio `x`.
    fn revenue_slope(&self, x: f64) -> Result<f64> {
        let level = self.whitespace_latency.latency(x)?;
        let (q_m, price) = self.split_at_load(x)?;
        let level_slope = self.whitespace_latency.slope(x)?;
        let q_m_slope = self.demand.quantity_slope(level)? * level_slope - self.whitespace;
        let c = self.capacity;
        let price_slope = level_slope - self.provider_latency.slope(q_m / c)? / c * q_m_slope;
        Ok(price_slope * q_m + price * q_m_slope)
    }

    /// Load-ratio bounds `(x̃, x̂)` matching [`whitespace_bounds`].
    fn load_bounds(&self) -> Result<(f64, f64)> {
        if !(self.whitespace > 0.0) {
            return Err(Error::domain("whitespace bounds need W > 0"));
        }
        let settings = SolverSettings::equilibrium();
        let (d, lw, lm) = (
            &self.demand,
            &self.whitespace_latency,
            &self.provider_latency,
        );
        let upper = solver::find_root(
            |x| Ok(lw.latency(x)? - d.price((self.whitespace * x).min(d.q_max()))?),
            Bracket::new(0.0, lw.inverse(d.p_max())?)?,
            settings,
        )?;
        // Both bands share one latency level y with total load Q(y).
        let level = solver::find_root(
            |y| {
                Ok(d.quantity(y)?
                    - self.whitespace * lw.inverse(y)?
                    - self.capacity * lm.inverse(y)?)
            },
            Bracket::new(0.0, d.p_max())?,
            settings,
        )?;
        Ok((lw.inverse(level)?, upper))
    }
}

/// Feasible whitespace loads `(q̃_w, q̂_w)`: provider price zero, and
/// provider priced out, respectively.
pub fn whitespace_bounds(s: &MonopolyWhitespaceScenario) -> Result<(f64, f64)> {
    let (lo, hi) = s.load_bounds()?;
    Ok((s.whitespace * lo, s.whitespace * hi))
}

/// Revenue-optimal monopoly equilibrium next to a whitespace band.
pub fn solve_monopoly_whitespace(s: &MonopolyWhitespaceScenario) -> Result<EquilibriumOutcome> {
    if s.whitespace == 0.0 {
        return solve_monopoly(&s.without_whitespace());
    }
    let (lo, hi) = s.load_bounds()?;
    let settings = SolverSettings::equilibrium();
    let x = match solver::find_root(|x| s.revenue_slope(x), Bracket::new(lo, hi)?, settings) {
        Ok(x) => x,
        Err(Error::Bracket { .. }) => {
            solver::maximize_concave(|x| s.revenue_at(s.whitespace * x), lo, hi, settings)?.0
        }
        Err(e) => return Err(e),
    };
    let (q_m, price) = s.split_at_load(x)?;
    EquilibriumOutcome::assemble(
        &s.demand,
        vec![
            Channel::priced(
                ChannelKind::Monopoly,
                q_m,
                price,
                s.provider_latency.latency(q_m / s.capacity)?,
            ),
            Channel::whitespace(s.whitespace * x, s.whitespace_latency.latency(x)?),
        ],
    )
}

/// Monopoly-with-whitespace equilibrium for linear curves, in closed form.
pub fn monopoly_whitespace_closed_form_linear(
    p_max: f64,
    capacity: f64,
    whitespace: f64,
) -> Result<EquilibriumOutcome> {
    let s = MonopolyWhitespaceScenario::linear(p_max, capacity, whitespace)?;
    let (cp, wp) = (s.capacity * p_max, s.whitespace * p_max);
    let denom = cp + wp + 1.0;
    let q_w = (0.5 * cp + wp + 1.0) / denom * wp / (wp + 1.0);
    let q_m = 0.5 * cp / denom;
    let price = 0.5 * p_max / (1.0 + wp);
    let revenue = 0.25 * p_max * cp / denom / (1.0 + wp);
    let surplus = 0.5 * p_max * ((wp + cp - cp / (2.0 * (1.0 + wp))) / denom).powi(2);
    let whitespace_load = if whitespace > 0.0 {
        q_w / whitespace
    } else {
        0.0
    };
    Ok(EquilibriumOutcome {
        channels: vec![
            Channel {
                kind: ChannelKind::Monopoly,
                quantity: q_m,
                price,
                latency: q_m / capacity,
                revenue,
            },
            Channel::whitespace(q_w, whitespace_load),
        ],
        delivered_price: p_max * (1.0 - q_m - q_w),
        revenue,
        consumer_surplus: surplus,
        total_welfare: revenue + surplus,
    })
}

/// First-order effect of a vanishing whitespace band on the monopoly market.
///
/// All slopes are derivatives in `W` at `W = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalWhitespaceReport {
    /// Whitespace load ratio `q̂_w = l_w⁻¹(P(q_m*))`; also `∂q_w/∂W`.
    pub whitespace_load: f64,
    pub quantity_slope: f64,
    pub price_slope: f64,
    pub revenue_slope: f64,
    pub surplus_slope: f64,
    pub welfare_slope: f64,
}

impl MarginalWhitespaceReport {
    /// The sign condition under which the welfare slope is guaranteed negative.
    pub fn crowding_term(
        &self,
        s: &MonopolyScenario,
        whitespace_latency: &LatencyCurve,
    ) -> Result<f64> {
        let eq = solve_monopoly(s)?;
        let q = eq.quantity(ChannelKind::Monopoly);
        Ok(self.whitespace_load
            + q * s.demand.slope(q)? / whitespace_latency.slope(self.whitespace_load)?)
    }
}

/// Perturbation expansion of the whitespace equilibrium around `W = 0`.
///
/// With `q = q_m*`, `x̂ = l_w⁻¹(P(q))` and
/// `D = P' - l_m'/C + q (P'' - l_m''/C²) / 2`, which must be negative,
///
/// ```text
/// ∂q_m/∂W = -(x̂ P' + q P'² / l_w'(x̂) + q x̂ P'') / 2D
/// ∂R/∂W   = q x̂ P'
/// ∂T/∂W   = -q P' ∂q_m/∂W
/// ```
pub fn marginal_whitespace(
    s: &MonopolyScenario,
    whitespace_latency: &LatencyCurve,
) -> Result<MarginalWhitespaceReport> {
    let eq = solve_monopoly(s)?;
    let q = eq.quantity(ChannelKind::Monopoly);
    let c = s.capacity;
    let (d1, d2) = (s.demand.slope(q)?, s.demand.curvature(q)?);
    let provider_slope = s.latency.slope(q / c)? / c;
    let provider_curvature = s.latency.curvature(q / c)? / (c * c);
    let load = whitespace_latency.inverse(s.demand.price(q)?)?;
    let lw1 = whitespace_latency.slope(load)?;

    let denom = d1 - provider_slope + 0.5 * q * (d2 - provider_curvature);
    if !(denom < 0.0) {
        return Err(Error::Degenerate(format!(
            "revenue not concave in the provider's quantity: P' - l_m'/C + q (P'' - l_m''/C²)/2 = {denom}"
        )));
    }
    let numer = (load + q * d1 / lw1) * d1 + q * load * d2;
    let quantity_slope = -0.5 * numer / denom;
    let price_slope = quantity_slope * (d1 - provider_slope) + load * d1;
    let revenue_slope = q * load * d1;
    let surplus_slope = -(quantity_slope + load) * q * d1;
    let welfare_slope = 0.5 * numer / denom * q * d1;
    Ok(MarginalWhitespaceReport {
        whitespace_load: load,
        quantity_slope,
        price_slope,
        revenue_slope,
        surplus_slope,
        welfare_slope,
    })
}

/// `∂T_mw/∂W` at `W = 0` for linear curves.
pub fn marginal_whitespace_welfare_linear(p_max: f64, capacity: f64) -> f64 {
    let cp = capacity * p_max;
    -(p_max * p_max / 4.0) * cp * cp / (1.0 + cp).powi(3)
}
