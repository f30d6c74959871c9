//! Scenario files, sweeps, figure data and table output.

pub mod config;
pub mod emit;
pub mod figures;
pub mod sweep;

pub use config::{Grid, Market, MarketKind, OutputFormat, ScenarioConfig, SweepVariable};
pub use emit::{emit, format_significant, render, render_csv, render_json, Table};
pub use figures::{default_grid, figure_suite, FIGURE_IDS};
pub use sweep::{run_sweep, sweep_table, SweepRow};
