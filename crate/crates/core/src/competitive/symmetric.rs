//! `n` identical providers, each holding `C/n`.
//!
//! The symmetric equilibrium quantity `q` solves
//!
//! ```text
//! P(nq) + q P'(nq) = (nq/C) l'(nq/C) + l(nq/C)
//! ```
//!
//! which is solved in the aggregate `s = nq` so that the bracket `[0, q_max]`
//! does not shrink with `n`. At `n = 1` this is the monopoly condition and
//! as `n → ∞` the aggregate tends to the competitive load `ᾱ C`.

use crate::curves::{DemandCurve, LatencyCurve};
use crate::error::{Error, Result};
use crate::monopoly::check_capacity;
use crate::outcome::{Channel, ChannelKind, EquilibriumOutcome};
use crate::solver::{self, Bracket, SolverSettings};

#[derive(Clone, Debug)]
pub struct SymmetricNScenario {
    pub demand: DemandCurve,
    pub latency: LatencyCurve,
    /// Total capacity shared equally by the providers.
    pub capacity: f64,
    pub providers: u64,
}

impl SymmetricNScenario {
    pub fn new(
        demand: DemandCurve,
        latency: LatencyCurve,
        capacity: f64,
        providers: u64,
    ) -> Result<Self> {
        if providers == 0 {
            return Err(Error::domain("provider count must be at least 1"));
        }
        Ok(Self {
            demand,
            latency,
            capacity: check_capacity("capacity", capacity, false)?,
            providers,
        })
    }

    /// Linear demand with `q_max = 1` and `l(x) = x`.
    pub fn linear(p_max: f64, capacity: f64, providers: u64) -> Result<Self> {
        Self::new(
            DemandCurve::linear_unit(p_max)?,
            LatencyCurve::linear(),
            capacity,
            providers,
        )
    }

    /// Stationarity residual at aggregate quantity `s`.
    pub fn residual(&self, aggregate: f64) -> Result<f64> {
        let n = self.providers as f64;
        let x = aggregate / self.capacity;
        Ok(
            self.demand.price(aggregate)? + aggregate / n * self.demand.slope(aggregate)?
                - self.latency.marginal_cost(x)?,
        )
    }
}

#[derive(Clone, Debug)]
pub struct SymmetricOutcome {
    /// Quantity served by each provider.
    pub per_provider: f64,
    pub aggregate: f64,
    /// All providers are reported as one competitive channel.
    pub equilibrium: EquilibriumOutcome,
}

pub fn solve_symmetric_n(s: &SymmetricNScenario) -> Result<SymmetricOutcome> {
    let aggregate = solver::find_root(
        |q| s.residual(q),
        Bracket::new(0.0, s.demand.q_max())?,
        SolverSettings::equilibrium(),
    )?;
    let latency = s.latency.latency(aggregate / s.capacity)?;
    let price = s.demand.price(aggregate)? - latency;
    let equilibrium = EquilibriumOutcome::assemble(
        &s.demand,
        vec![Channel::priced(
            ChannelKind::Competitive,
            aggregate,
            price,
            latency,
        )],
    )?;
    Ok(SymmetricOutcome {
        per_provider: aggregate / s.providers as f64,
        aggregate,
        equilibrium,
    })
}
