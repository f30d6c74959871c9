//! The equilibrium record every market solver returns.

use serde::{Deserialize, Serialize};

use crate::curves::DemandCurve;
use crate::error::{Error, Result};

/// Tolerance of the Wardrop and welfare-accounting checks.
pub const INVARIANT_TOLERANCE: f64 = 1e-9;

/// Which band a channel represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// Licensed spectrum held by a single provider.
    Monopoly,
    /// Open-access spectrum, priced at zero.
    Whitespace,
    Provider1,
    Provider2,
    /// Aggregate of a competitive fringe of providers.
    Competitive,
}

impl ChannelKind {
    /// Short suffix used in column names (`q_m`, `p_1`, ...).
    pub fn tag(self) -> &'static str {
        match self {
            ChannelKind::Monopoly => "m",
            ChannelKind::Whitespace => "w",
            ChannelKind::Provider1 => "1",
            ChannelKind::Provider2 => "2",
            ChannelKind::Competitive => "c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub kind: ChannelKind,
    pub quantity: f64,
    /// Access price; always zero on whitespace.
    pub price: f64,
    /// Latency cost `l(q / C)` users experience on this channel.
    pub latency: f64,
    pub revenue: f64,
}

impl Channel {
    pub fn priced(kind: ChannelKind, quantity: f64, price: f64, latency: f64) -> Self {
        Self {
            kind,
            quantity,
            price,
            latency,
            revenue: price * quantity,
        }
    }

    pub fn whitespace(quantity: f64, latency: f64) -> Self {
        Self {
            kind: ChannelKind::Whitespace,
            quantity,
            price: 0.0,
            latency,
            revenue: 0.0,
        }
    }
}

/// Prices, quantities and the welfare split of one user/provider equilibrium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOutcome {
    pub channels: Vec<Channel>,
    /// Common delivered price `λ = P(Σ q)`.
    pub delivered_price: f64,
    /// Sum of provider revenues.
    pub revenue: f64,
    pub consumer_surplus: f64,
    pub total_welfare: f64,
}

impl EquilibriumOutcome {
    /// Builds the welfare accounting from per-channel data.
    ///
    /// Revenue is `Σ pᵢqᵢ`, consumer surplus is `∫₀^Q P - Q P(Q)` and total
    /// welfare is computed separately as `∫₀^Q P - Σ qᵢ lᵢ`, so the identity
    /// `T = R + S` holds only when the channel prices are Wardrop consistent.
    pub fn assemble(demand: &DemandCurve, channels: Vec<Channel>) -> Result<Self> {
        let served: f64 = channels.iter().map(|c| c.quantity).sum();
        let delivered_price = demand.price(served)?;
        let revenue = channels.iter().map(|c| c.revenue).sum();
        let consumer_surplus = demand.consumer_surplus(served)?;
        let latency_cost: f64 = channels.iter().map(|c| c.quantity * c.latency).sum();
        let total_welfare = demand.gross_utility(served)? - latency_cost;
        Ok(Self {
            channels,
            delivered_price,
            revenue,
            consumer_surplus,
            total_welfare,
        })
    }

    pub fn channel(&self, kind: ChannelKind) -> Option<&Channel> {
        self.channels.iter().find(|c| c.kind == kind)
    }

    /// Quantity on `kind`, zero when the channel is absent.
    pub fn quantity(&self, kind: ChannelKind) -> f64 {
        self.channel(kind).map_or(0.0, |c| c.quantity)
    }

    pub fn price(&self, kind: ChannelKind) -> f64 {
        self.channel(kind).map_or(0.0, |c| c.price)
    }

    pub fn revenue_of(&self, kind: ChannelKind) -> f64 {
        self.channel(kind).map_or(0.0, |c| c.revenue)
    }

    pub fn total_quantity(&self) -> f64 {
        self.channels.iter().map(|c| c.quantity).sum()
    }

    /// Checks welfare accounting, the Wardrop condition and feasibility.
    pub fn check_invariants(&self, demand: &DemandCurve) -> Result<()> {
        let tol = INVARIANT_TOLERANCE;
        let gap = self.total_welfare - (self.revenue + self.consumer_surplus);
        if gap.abs() > tol {
            return Err(Error::Invariant(format!("T - (R + S) = {gap:e}")));
        }
        let served = self.total_quantity();
        if served > demand.q_max() * (1.0 + 1e-12) {
            return Err(Error::Invariant(format!(
                "served quantity {served} exceeds q_max"
            )));
        }
        let lambda = demand.price(served)?;
        if (lambda - self.delivered_price).abs() > tol {
            return Err(Error::Invariant(format!(
                "delivered price {} differs from P(Q) = {lambda}",
                self.delivered_price
            )));
        }
        for c in &self.channels {
            if c.quantity < 0.0 || !c.quantity.is_finite() {
                return Err(Error::Invariant(format!(
                    "{:?} quantity {}",
                    c.kind, c.quantity
                )));
            }
            if c.kind == ChannelKind::Whitespace && c.price != 0.0 {
                return Err(Error::Invariant(format!(
                    "whitespace priced at {}",
                    c.price
                )));
            }
            if c.quantity > 0.0 {
                let residual = c.price + c.latency - self.delivered_price;
                if residual.abs() > tol {
                    return Err(Error::Invariant(format!(
                        "{:?}: price + latency - λ = {residual:e}",
                        c.kind
                    )));
                }
            }
        }
        Ok(())
    }
}
