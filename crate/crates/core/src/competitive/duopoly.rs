//! Two price-setting providers with linear demand and `l(x) = x`.
//!
//! The provider game is solved in quantities: given `(q_1, q_2)` the user
//! equilibrium pins down the prices, and each provider's revenue is a
//! concave quadratic in its own quantity. With `u_i = 1/C_i` the best
//! responses without whitespace are
//!
//! ```text
//! q̂_i(q_j) = (p_max / 2) (1 - q_j) / (p_max + u_i)
//! ```
//!
//! and their unique fixed point has the closed form used by
//! [`solve_duopoly`].
//!
//! With a whitespace band of capacity `W` two best-response maps are
//! provided. [`duopoly_best_response`] and the closed forms behind
//! [`solve_duopoly_whitespace`] use
//!
//! ```text
//! q̂_i(q_j) = (p_max / 2) (1 - q_j) / (W p_max + (p_max + u_i)(1 + W p_max)),
//! ```
//!
//! while [`wardrop_best_response`] eliminates the whitespace load directly
//! from the user equilibrium, which gives
//!
//! ```text
//! q̂_i(q_j) = (p_max / 2) (1 - q_j) / (p_max + u_i (1 + W p_max)).
//! ```
//!
//! Both agree at `W = 0` and both yield Wardrop-consistent prices; they
//! differ at first order in `W`.

use serde::{Deserialize, Serialize};

use crate::curves::{DemandCurve, LatencyCurve};
use crate::error::{Error, Result};
use crate::outcome::{Channel, ChannelKind, EquilibriumOutcome};

/// Two licensed providers with capacities `C_1`, `C_2` and optional whitespace `W`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuopolyScenario {
    pub p_max: f64,
    pub capacities: [f64; 2],
    pub whitespace: f64,
}

impl DuopolyScenario {
    pub fn new(p_max: f64, c1: f64, c2: f64, whitespace: f64) -> Result<Self> {
        for (name, v) in [("p_max", p_max), ("capacity_1", c1), ("capacity_2", c2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(whitespace.is_finite() && whitespace >= 0.0) {
            return Err(Error::domain(format!(
                "whitespace must be >= 0, got {whitespace}"
            )));
        }
        Ok(Self {
            p_max,
            capacities: [c1, c2],
            whitespace,
        })
    }

    /// Accepts only linear demand with `q_max = 1` and identity latency.
    pub fn from_curves(
        demand: &DemandCurve,
        latency: &LatencyCurve,
        c1: f64,
        c2: f64,
        whitespace: f64,
    ) -> Result<Self> {
        let p_max = demand.unit_linear_p_max().ok_or_else(|| {
            Error::Unsupported("duopoly markets need linear demand with q_max = 1".into())
        })?;
        if !latency.is_identity() {
            return Err(Error::Unsupported(
                "duopoly markets need the latency l(x) = x".into(),
            ));
        }
        Self::new(p_max, c1, c2, whitespace)
    }

    pub fn demand(&self) -> DemandCurve {
        DemandCurve::linear_unit(self.p_max).expect("p_max validated on construction")
    }

    /// Same market with the provider labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            capacities: [self.capacities[1], self.capacities[0]],
            ..*self
        }
    }

    /// Whitespace load implied by the user equilibrium, `(1 - q_1 - q_2) / (1 + 1/(W p_max))`.
    pub fn whitespace_quantity(&self, q1: f64, q2: f64) -> f64 {
        if self.whitespace == 0.0 {
            return 0.0;
        }
        (1.0 - q1 - q2) / (1.0 + 1.0 / (self.whitespace * self.p_max))
    }

    /// Builds the outcome from provider quantities, pricing every channel
    /// from the user equilibrium.
    pub fn outcome_from_quantities(&self, q: [f64; 2]) -> Result<EquilibriumOutcome> {
        let q_w = self.whitespace_quantity(q[0], q[1]);
        let lambda = self.p_max * (1.0 - q[0] - q[1] - q_w);
        self.outcome_from_parts(q, q_w, |i| lambda - q[i] / self.capacities[i])
    }

    fn outcome_from_parts(
        &self,
        q: [f64; 2],
        q_w: f64,
        price: impl Fn(usize) -> f64,
    ) -> Result<EquilibriumOutcome> {
        let kinds = [ChannelKind::Provider1, ChannelKind::Provider2];
        let mut channels: Vec<Channel> = (0..2)
            .map(|i| Channel::priced(kinds[i], q[i], price(i), q[i] / self.capacities[i]))
            .collect();
        if self.whitespace > 0.0 {
            channels.push(Channel::whitespace(q_w, q_w / self.whitespace));
        }
        EquilibriumOutcome::assemble(&self.demand(), channels)
    }
}

/// Best response of a provider with capacity `capacity` to a rival serving `q_other`.
pub fn duopoly_best_response(q_other: f64, p_max: f64, capacity: f64, whitespace: f64) -> f64 {
    let u = capacity.recip();
    let wp = whitespace * p_max;
    0.5 * p_max * (1.0 - q_other) / (wp + (p_max + u) * (1.0 + wp))
}

/// Best response obtained by substituting the Wardrop whitespace load into
/// the provider's revenue.
pub fn wardrop_best_response(q_other: f64, p_max: f64, capacity: f64, whitespace: f64) -> f64 {
    let u = capacity.recip();
    0.5 * p_max * (1.0 - q_other) / (p_max + u * (1.0 + whitespace * p_max))
}

/// Iterates mutual best responses from `(0, 0)` until successive iterates
/// differ by at most `1e-13`.
pub fn best_response_fixed_point(
    s: &DuopolyScenario,
    response: fn(f64, f64, f64, f64) -> f64,
) -> Result<[f64; 2]> {
    const MAX_ROUNDS: usize = 100_000;
    let mut q = [0.0_f64; 2];
    for _ in 0..MAX_ROUNDS {
        let next = [
            response(q[1], s.p_max, s.capacities[0], s.whitespace),
            response(q[0], s.p_max, s.capacities[1], s.whitespace),
        ];
        let step = (next[0] - q[0]).abs().max((next[1] - q[1]).abs());
        q = next;
        if step <= 1e-13 {
            return Ok(q);
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ROUNDS,
        last: q[0],
    })
}

/// Closed-form subgame-perfect equilibrium without whitespace.
pub fn solve_duopoly(s: &DuopolyScenario) -> Result<EquilibriumOutcome> {
    if s.whitespace != 0.0 {
        return Err(Error::domain(
            "solve_duopoly needs W = 0; use solve_duopoly_whitespace",
        ));
    }
    let p = s.p_max;
    let u = [s.capacities[0].recip(), s.capacities[1].recip()];
    let denom = 3.0 * p * p + 4.0 * p * (u[0] + u[1]) + 4.0 * u[0] * u[1];
    let q = [
        (p * p + 2.0 * p * u[1]) / denom,
        (p * p + 2.0 * p * u[0]) / denom,
    ];
    let price = |i: usize| {
        let j = 1 - i;
        p * (p * p + p * u[i] + 2.0 * p * u[j] + 2.0 * u[0] * u[1]) / denom
    };
    let out = s.outcome_from_parts(q, 0.0, price)?;
    debug_assert!(q.iter().all(|&qi| qi > 0.0));
    Ok(out)
}

/// Whitespace-duopoly denominator `D`.
pub fn duopoly_denominator(p_max: f64, c1: f64, c2: f64, whitespace: f64) -> f64 {
    let p = p_max;
    let (u1, u2) = (c1.recip(), c2.recip());
    let wp = whitespace * p;
    3.0 * p * p
        + 4.0 * p * (u1 + u2)
        + 4.0 * whitespace * p * p * (2.0 + 2.0 * p + (u1 + u2))
        + 4.0 * (u1 + wp * (1.0 + p + u1)) * (u2 + wp * (1.0 + p + u2))
}

/// Closed-form equilibrium next to a whitespace band, `W > 0`.
pub fn solve_duopoly_whitespace(s: &DuopolyScenario) -> Result<EquilibriumOutcome> {
    if !(s.whitespace > 0.0) {
        return Err(Error::domain(
            "solve_duopoly_whitespace needs W > 0; use solve_duopoly",
        ));
    }
    let p = s.p_max;
    let wp = s.whitespace * p;
    let u = [s.capacities[0].recip(), s.capacities[1].recip()];
    let d = duopoly_denominator(p, s.capacities[0], s.capacities[1], s.whitespace);
    let quantity =
        |j: usize| (2.0 * p * u[j] + p * p + 2.0 * s.whitespace * p * p * (1.0 + p + u[j])) / d;
    let q = [quantity(1), quantity(0)];
    let reach = |i: usize| p + 2.0 * u[i] + 2.0 * wp * (1.0 + p + u[i]);
    let q_w = wp / (1.0 + wp) * reach(0) * reach(1) / d;
    let price = |i: usize| {
        let j = 1 - i;
        let own = 2.0 * wp + wp * p + (1.0 + wp) * (p + u[i]);
        let rival = 2.0 * wp + wp * p + (1.0 + wp) * (p + 2.0 * u[j]);
        p * own * rival / ((1.0 + wp) * d)
    };
    s.outcome_from_parts(q, q_w, price)
}

/// Equilibrium under [`wardrop_best_response`], `W >= 0`.
pub fn solve_duopoly_whitespace_wardrop(s: &DuopolyScenario) -> Result<EquilibriumOutcome> {
    // q_i = r_i (1 - q_j) with r_i = A / 2(A + u_i), A = p_max / (1 + W p_max)
    let a = s.p_max / (1.0 + s.whitespace * s.p_max);
    let r = [
        0.5 * a / (a + s.capacities[0].recip()),
        0.5 * a / (a + s.capacities[1].recip()),
    ];
    let det = 1.0 - r[0] * r[1];
    let q = [r[0] * (1.0 - r[1]) / det, r[1] * (1.0 - r[0]) / det];
    s.outcome_from_quantities(q)
}

/// Dispatches on `W`: [`solve_duopoly`] at zero, [`solve_duopoly_whitespace`] otherwise.
pub fn solve_duopoly_market(s: &DuopolyScenario) -> Result<EquilibriumOutcome> {
    if s.whitespace == 0.0 {
        solve_duopoly(s)
    } else {
        solve_duopoly_whitespace(s)
    }
}

/// Pieces of provider `i`'s equilibrium revenue that are affine in `u_i = 1/C_i`.
struct RevenueTerms {
    /// `R = scale · (x0 + x1 u) / (d0 + d1 u)²`
    scale: f64,
    x0: f64,
    x1: f64,
    d0: f64,
    d1: f64,
}

fn revenue_terms(c_other: f64, p_max: f64, whitespace: f64) -> RevenueTerms {
    let p = p_max;
    let wp = whitespace * p;
    let uj = c_other.recip();
    let rival_factor = uj + wp * (1.0 + p + uj);
    let d1 = 4.0 * p + 4.0 * whitespace * p * p + 4.0 * (1.0 + wp) * rival_factor;
    let d0 = 3.0 * p * p
        + 4.0 * p * uj
        + 4.0 * whitespace * p * p * (2.0 + 2.0 * p + uj)
        + 4.0 * wp * (1.0 + p) * rival_factor;
    let numer = 2.0 * p * uj + p * p + 2.0 * whitespace * p * p * (1.0 + p + uj);
    let rival = 2.0 * wp + wp * p + (1.0 + wp) * (p + 2.0 * uj);
    RevenueTerms {
        scale: p * numer * rival / (1.0 + wp),
        x0: 2.0 * wp + wp * p + (1.0 + wp) * p,
        x1: 1.0 + wp,
        d0,
        d1,
    }
}

/// Equilibrium revenue of a provider with capacity `c_own` facing a rival
/// with `c_other`, as produced by [`solve_duopoly_market`].
pub fn duopoly_revenue(c_own: f64, c_other: f64, p_max: f64, whitespace: f64) -> f64 {
    let t = revenue_terms(c_other, p_max, whitespace);
    let u = c_own.recip();
    let d = t.d0 + t.d1 * u;
    t.scale * (t.x0 + t.x1 * u) / (d * d)
}

/// `∂R/∂C_own` of [`duopoly_revenue`].
pub fn duopoly_revenue_gradient(c_own: f64, c_other: f64, p_max: f64, whitespace: f64) -> f64 {
    let t = revenue_terms(c_other, p_max, whitespace);
    let u = c_own.recip();
    let d = t.d0 + t.d1 * u;
    let x = t.x0 + t.x1 * u;
    let d_du = t.scale * (t.x1 * d - 2.0 * t.d1 * x) / d.powi(3);
    -u * u * d_du
}
