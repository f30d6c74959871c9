//! Markets with more than one licensed provider.

pub mod duopoly;
pub mod perfect;
pub mod symmetric;

pub use duopoly::{
    best_response_fixed_point, duopoly_best_response, duopoly_denominator, duopoly_revenue,
    duopoly_revenue_gradient, solve_duopoly, solve_duopoly_market, solve_duopoly_whitespace,
    solve_duopoly_whitespace_wardrop, wardrop_best_response, DuopolyScenario,
};
pub use perfect::{
    binned_welfare, pc_closed_form_linear, pc_efficiency_check, pc_welfare_capacity_slope,
    pc_welfare_gain, pc_whitespace_closed_form_linear, pc_whitespace_welfare_slope_linear,
    solve_pc_market, solve_pc_whitespace, solve_perfect_competition, CompetitiveOutcome,
    PerfectCompetitionScenario,
};
pub use symmetric::{solve_symmetric_n, SymmetricNScenario, SymmetricOutcome};
