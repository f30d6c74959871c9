//! Comparative-statics sweeps over one scenario parameter.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Market, ScenarioConfig};
use super::emit::Table;
use crate::competitive::{solve_duopoly_market, solve_pc_market, solve_symmetric_n};
use crate::curves::DemandCurve;
use crate::error::{Error, Result};
use crate::monopoly::solve_monopoly_whitespace;
use crate::outcome::{ChannelKind, EquilibriumOutcome};

impl Market {
    pub fn demand(&self) -> DemandCurve {
        match self {
            Market::Monopoly(s) => s.demand.clone(),
            Market::Duopoly(s) => s.demand(),
            Market::Competitive(s) => s.demand.clone(),
            Market::Symmetric(s) => s.demand.clone(),
        }
    }

    pub fn solve(&self) -> Result<EquilibriumOutcome> {
        match self {
            Market::Monopoly(s) => solve_monopoly_whitespace(s),
            Market::Duopoly(s) => solve_duopoly_market(s),
            Market::Competitive(s) => Ok(solve_pc_market(s)?.equilibrium),
            Market::Symmetric(s) => Ok(solve_symmetric_n(s)?.equilibrium),
        }
    }

    /// Solves and checks the outcome's invariants.
    pub fn solve_checked(&self) -> Result<EquilibriumOutcome> {
        let out = self.solve()?;
        out.check_invariants(&self.demand())?;
        Ok(out)
    }
}

/// One grid point of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: EquilibriumOutcome,
}

/// Solves the configured market at every grid point, in grid order.
pub fn run_sweep(config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let variable = config
        .sweep
        .ok_or_else(|| Error::config("sweep", "missing"))?;
    let grid = config.grid()?;
    // Surface configuration errors before fanning out.
    config.market()?;
    grid.values()
        .into_par_iter()
        .map(|value| {
            let outcome = config.shifted(variable, value).market()?.solve_checked()?;
            Ok(SweepRow { value, outcome })
        })
        .collect()
}

const CHANNEL_ORDER: [ChannelKind; 5] = [
    ChannelKind::Monopoly,
    ChannelKind::Provider1,
    ChannelKind::Provider2,
    ChannelKind::Competitive,
    ChannelKind::Whitespace,
];

/// Flattens sweep rows into columns `w, q_*, p_*, lambda, R, S, T`.
///
/// A channel that appears anywhere in the sweep gets columns in every row,
/// with zeros where it is absent.
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let kinds: Vec<ChannelKind> = CHANNEL_ORDER
        .into_iter()
        .filter(|k| rows.iter().any(|r| r.outcome.channel(*k).is_some()))
        .collect();
    let mut columns = vec!["w".to_string()];
    for k in &kinds {
        columns.push(format!("q_{}", k.tag()));
        columns.push(format!("p_{}", k.tag()));
    }
    columns.extend(["lambda", "R", "S", "T"].map(String::from));
    let data = rows
        .iter()
        .map(|r| {
            let o = &r.outcome;
            let mut row = vec![r.value];
            for &k in &kinds {
                row.push(o.quantity(k));
                row.push(o.price(k));
            }
            row.extend([
                o.delivered_price,
                o.revenue,
                o.consumer_surplus,
                o.total_welfare,
            ]);
            row
        })
        .collect();
    Table::new(columns, data)
}
