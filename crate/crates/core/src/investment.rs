//! Buying extra spectrum before the pricing game is played.
//!
//! Everything here is in the linear setting: `P(q) = p_max (1 - q)` and
//! `l(x) = x`. A monopolist's equilibrium revenue at capacity `C` is
//! `p_max² C / (4 (p_max C + 1))`, whose slope `p_max² / (4 (p_max C + 1)²)`
//! gives both the optimal purchase and the market-clearing unit price. Next
//! to whitespace the same holds with `C` replaced by `C + W`.
//!
//! A duopolist's equilibrium revenue, as a function of its own capacity,
//! factors as
//!
//! ```text
//! R_1(C_1) = p_max k² · a C_1 (a C_1 + b d) / (a C_1 + b)²
//! ```
//!
//! with `u = 1/C_2`, `a = 3p_max² + 4 p_max u`, `b = 4 p_max + 4u`,
//! `d = 1 - p_max/b` and `k = (p_max + 2u)/(3p_max + 4u)`. It is strictly
//! concave, so every best response in the investment game is a scalar
//! concave maximization.

use serde::{Deserialize, Serialize};

use crate::competitive::duopoly::{
    duopoly_revenue, duopoly_revenue_gradient, solve_duopoly_market, DuopolyScenario,
};
use crate::error::{Error, Result};
use crate::monopoly::{check_capacity, monopoly_whitespace_closed_form_linear};
use crate::outcome::EquilibriumOutcome;
use crate::solver::{self, Bracket, SolverSettings};

/// Spectrum released to one buyer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOffer {
    /// Capacity `C_e` on offer.
    pub available: f64,
    /// Price `p_e` per unit of capacity.
    pub unit_price: f64,
}

impl SpectrumOffer {
    pub fn new(available: f64, unit_price: f64) -> Result<Self> {
        check_capacity("available", available, true)?;
        if !(unit_price >= 0.0) {
            return Err(Error::domain(format!(
                "unit_price must be >= 0, got {unit_price}"
            )));
        }
        Ok(Self {
            available,
            unit_price,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvestmentOutcome {
    /// Capacity bought by each buyer.
    pub purchases: Vec<f64>,
    /// Pricing equilibrium after the purchases.
    pub equilibrium: EquilibriumOutcome,
    /// Gross revenue minus spectrum outlay, per buyer.
    pub net_revenues: Vec<f64>,
    /// Every buyer took its whole offer.
    pub clears: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Monopoly revenue `p_max² C / (4 (p_max C + 1))` at effective capacity `C`.
pub fn monopoly_revenue_in_capacity(capacity: f64, p_max: f64) -> f64 {
    p_max * p_max * capacity / (4.0 * (p_max * capacity + 1.0))
}

/// Optimal purchase `min([1/(2√p_e) - 1/p_max - C - W]₊, C_e)` for a
/// monopolist with endowment `C` next to whitespace `W`.
///
/// A free offer is bought in full, since revenue increases in capacity.
pub fn monopoly_purchase(
    endowment: f64,
    whitespace: f64,
    offer: SpectrumOffer,
    p_max: f64,
) -> Result<InvestmentOutcome> {
    check_capacity("capacity", endowment, false)?;
    check_capacity("whitespace", whitespace, true)?;
    let SpectrumOffer {
        available,
        unit_price,
    } = SpectrumOffer::new(offer.available, offer.unit_price)?;
    let (bought, note) = if unit_price == 0.0 {
        (
            available,
            Some("free spectrum: the whole offer is bought".to_string()),
        )
    } else {
        let unconstrained = 1.0 / (2.0 * unit_price.sqrt()) - 1.0 / p_max - endowment - whitespace;
        (unconstrained.max(0.0).min(available), None)
    };
    let equilibrium =
        monopoly_whitespace_closed_form_linear(p_max, endowment + bought, whitespace)?;
    let net = equilibrium.revenue - unit_price * bought;
    Ok(InvestmentOutcome {
        purchases: vec![bought],
        equilibrium,
        net_revenues: vec![net],
        clears: bought == available,
        note,
    })
}

/// Unit price at which the monopolist buys exactly `C_e`:
/// `p_max² / (4 ((C + C_e + W) p_max + 1)²)`.
pub fn monopoly_clearing_price(endowment: f64, available: f64, whitespace: f64, p_max: f64) -> f64 {
    let scale = (endowment + available + whitespace) * p_max + 1.0;
    p_max * p_max / (4.0 * scale * scale)
}

struct Factors {
    a: f64,
    b: f64,
    d: f64,
    k: f64,
}

fn factors(c_other: f64, p_max: f64) -> Factors {
    let p = p_max;
    let u = c_other.recip();
    let b = 4.0 * p + 4.0 * u;
    Factors {
        a: 3.0 * p * p + 4.0 * p * u,
        b,
        d: 1.0 - p / b,
        k: (p + 2.0 * u) / (3.0 * p + 4.0 * u),
    }
}

/// Equilibrium duopoly revenue of a provider with capacity `c_own` against
/// a rival with `c_other`, without whitespace.
pub fn duopoly_revenue_in_capacity(c_own: f64, c_other: f64, p_max: f64) -> f64 {
    let Factors { a, b, d, k } = factors(c_other, p_max);
    let x = a * c_own;
    p_max * k * k * x * (x + b * d) / ((x + b) * (x + b))
}

/// `∂R/∂C_own` of [`duopoly_revenue_in_capacity`]:
/// `p_max k² a b ((2 - d) a C + b d) / (a C + b)³`.
pub fn duopoly_revenue_slope(c_own: f64, c_other: f64, p_max: f64) -> f64 {
    let Factors { a, b, d, k } = factors(c_other, p_max);
    let x = a * c_own;
    p_max * k * k * a * b * ((2.0 - d) * x + b * d) / (x + b).powi(3)
}

/// Unit prices at which duopolists with endowments `C_i` buy exactly `C_e^i`.
pub fn planner_prices(endowments: [f64; 2], allocations: [f64; 2], p_max: f64) -> [f64; 2] {
    let c = [
        endowments[0] + allocations[0],
        endowments[1] + allocations[1],
    ];
    [
        duopoly_revenue_slope(c[0], c[1], p_max),
        duopoly_revenue_slope(c[1], c[0], p_max),
    ]
}

/// Best purchase of a duopolist holding `own` against a rival holding `other`.
fn duopoly_best_purchase(
    own: f64,
    other: f64,
    offer: SpectrumOffer,
    p_max: f64,
    whitespace: f64,
) -> Result<f64> {
    let net_slope =
        |c: f64| duopoly_revenue_gradient(own + c, other, p_max, whitespace) - offer.unit_price;
    if offer.available == 0.0 || net_slope(0.0) <= 0.0 {
        return Ok(0.0);
    }
    if net_slope(offer.available) >= 0.0 {
        return Ok(offer.available);
    }
    solver::find_root(
        |c| Ok(net_slope(c)),
        Bracket::new(0.0, offer.available)?,
        SolverSettings::equilibrium(),
    )
}

/// Iteration cap of [`solve_investment_game`].
pub const INVESTMENT_MAX_ROUNDS: usize = 10_000;

/// Capacity purchases of two duopolists, by iterated best responses.
///
/// Iteration stops once neither purchase moves by more than `1e-12`.
pub fn solve_investment_game(
    endowments: [f64; 2],
    offers: [SpectrumOffer; 2],
    p_max: f64,
    whitespace: f64,
) -> Result<InvestmentOutcome> {
    for (i, &c) in endowments.iter().enumerate() {
        check_capacity(&format!("capacity_{}", i + 1), c, false)?;
    }
    let offers = [
        SpectrumOffer::new(offers[0].available, offers[0].unit_price)?,
        SpectrumOffer::new(offers[1].available, offers[1].unit_price)?,
    ];
    check_capacity("whitespace", whitespace, true)?;
    let mut c = [0.0_f64; 2];
    let mut settled = false;
    for _ in 0..INVESTMENT_MAX_ROUNDS {
        let first = duopoly_best_purchase(
            endowments[0],
            endowments[1] + c[1],
            offers[0],
            p_max,
            whitespace,
        )?;
        let second = duopoly_best_purchase(
            endowments[1],
            endowments[0] + first,
            offers[1],
            p_max,
            whitespace,
        )?;
        let step = (first - c[0]).abs().max((second - c[1]).abs());
        c = [first, second];
        if step <= 1e-12 {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::Convergence {
            iterations: INVESTMENT_MAX_ROUNDS,
            last: c[0],
        });
    }
    let held = [endowments[0] + c[0], endowments[1] + c[1]];
    let scenario = DuopolyScenario::new(p_max, held[0], held[1], whitespace)?;
    let equilibrium = solve_duopoly_market(&scenario)?;
    let net_revenues = (0..2)
        .map(|i| {
            duopoly_revenue(held[i], held[1 - i], p_max, whitespace) - offers[i].unit_price * c[i]
        })
        .collect();
    Ok(InvestmentOutcome {
        clears: (0..2).all(|i| c[i] == offers[i].available),
        purchases: c.to_vec(),
        equilibrium,
        net_revenues,
        note: None,
    })
}
