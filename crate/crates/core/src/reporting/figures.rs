//! Data behind the five comparison figures, all on linear curves with
//! `q_max = 1` and `l(x) = x`, as functions of the extra bandwidth `w`.
//!
//! | id | columns |
//! |----|---------|
//! | 1  | `T` for the six allocation scenarios |
//! | 2  | `T` for giving `w` to the incumbent monopolist or to an entrant |
//! | 3  | `R` for the six allocation scenarios |
//! | 4  | `S` for the six allocation scenarios |
//! | 5  | monopoly clearing price and duopoly planner price for `w` extra units |
//!
//! The six scenarios start from one unit of licensed capacity: a monopolist
//! holding `1 + w`, a monopolist holding 1 next to whitespace `w`, two
//! providers holding `1/2 + w/2` each, two providers holding `1/2` next to
//! whitespace `w`, and a competitive fringe holding `1 + w` or `1` next to
//! whitespace `w`.

use rayon::prelude::*;

use super::config::Grid;
use super::emit::Table;
use crate::competitive::{
    solve_duopoly_market, solve_pc_market, DuopolyScenario, PerfectCompetitionScenario,
};
use crate::error::{Error, Result};
use crate::investment::{monopoly_clearing_price, planner_prices};
use crate::monopoly::{solve_monopoly_whitespace, MonopolyWhitespaceScenario};
use crate::outcome::EquilibriumOutcome;

pub const FIGURE_IDS: [u8; 5] = [1, 2, 3, 4, 5];

/// Stand-in for an entrant with no capacity, which scenarios cannot hold.
pub const ENTRANT_FLOOR: f64 = 1e-8;

type Scenario = fn(f64, f64) -> Result<EquilibriumOutcome>;

const ALLOCATIONS: [(&str, Scenario); 6] = [
    ("monopoly", |w, p| {
        solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(p, 1.0 + w, 0.0)?)
    }),
    ("monopoly_whitespace", |w, p| {
        solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(p, 1.0, w)?)
    }),
    ("duopoly", |w, p| {
        solve_duopoly_market(&DuopolyScenario::new(p, 0.5 + 0.5 * w, 0.5 + 0.5 * w, 0.0)?)
    }),
    ("duopoly_whitespace", |w, p| {
        solve_duopoly_market(&DuopolyScenario::new(p, 0.5, 0.5, w)?)
    }),
    ("competitive", |w, p| {
        Ok(solve_pc_market(&PerfectCompetitionScenario::linear(p, 1.0 + w, 0.0)?)?.equilibrium)
    }),
    ("competitive_whitespace", |w, p| {
        Ok(solve_pc_market(&PerfectCompetitionScenario::linear(p, 1.0, w)?)?.equilibrium)
    }),
];

const ENTRY: [(&str, Scenario); 2] = [
    ("monopoly", |w, p| {
        solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(p, 1.0 + w, 0.0)?)
    }),
    ("duopoly_entrant", |w, p| {
        solve_duopoly_market(&DuopolyScenario::new(p, 1.0, w.max(ENTRANT_FLOOR), 0.0)?)
    }),
];

fn outcome_table(
    grid: &Grid,
    p_max: f64,
    prefix: &str,
    series: &[(&str, Scenario)],
    pick: fn(&EquilibriumOutcome) -> f64,
) -> Result<Table> {
    let mut columns = vec!["w".to_string()];
    columns.extend(series.iter().map(|(name, _)| format!("{prefix}_{name}")));
    let rows = grid
        .values()
        .into_par_iter()
        .map(|w| {
            let mut row = vec![w];
            for (_, solve) in series {
                row.push(pick(&solve(w, p_max)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::new(columns, rows))
}

fn price_table(grid: &Grid, p_max: f64) -> Table {
    let rows = grid
        .values()
        .into_iter()
        .map(|w| {
            let [duopoly, _] = planner_prices([0.5, 0.5], [0.5 * w, 0.5 * w], p_max);
            vec![w, monopoly_clearing_price(1.0, w, 0.0, p_max), duopoly]
        })
        .collect();
    Table::new(
        vec!["w".into(), "p_e_monopoly".into(), "p_e_duopoly".into()],
        rows,
    )
}

/// Columns of figure `id` over `grid`.
pub fn figure_suite(id: u8, p_max: f64, grid: &Grid) -> Result<Table> {
    if !(p_max.is_finite() && p_max > 0.0) {
        return Err(Error::config(
            "p_max",
            format!("must be positive, got {p_max}"),
        ));
    }
    match id {
        1 => outcome_table(grid, p_max, "T", &ALLOCATIONS, |o| o.total_welfare),
        2 => outcome_table(grid, p_max, "T", &ENTRY, |o| o.total_welfare),
        3 => outcome_table(grid, p_max, "R", &ALLOCATIONS, |o| o.revenue),
        4 => outcome_table(grid, p_max, "S", &ALLOCATIONS, |o| o.consumer_surplus),
        5 => Ok(price_table(grid, p_max)),
        _ => Err(Error::config(
            "figure",
            format!("unknown figure {id}; expected 1 to 5"),
        )),
    }
}

/// The grid the figures are drawn on: `w ∈ [0, 2]` in steps of `0.01`.
pub fn default_grid() -> Grid {
    Grid {
        lo: 0.0,
        hi: 2.0,
        steps: 201,
    }
}
