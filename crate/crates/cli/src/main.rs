//! `specstat`: solve, sweep and tabulate congestible-spectrum markets.
//!
//! Exit status is 0 on success, 1 when the input is rejected and 2 when a
//! solver fails to converge or produces an inconsistent equilibrium.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use spectrum_statics::investment::{monopoly_purchase, solve_investment_game};
use spectrum_statics::reporting::{
    default_grid, emit, figure_suite, render, run_sweep, sweep_table, Grid, Market, MarketKind,
    OutputFormat, ScenarioConfig, SweepVariable, Table, FIGURE_IDS,
};
use spectrum_statics::Error;

#[derive(Parser)]
#[command(
    name = "specstat",
    version,
    about = "Equilibria and welfare of congestible spectrum markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the equilibrium as JSON.
    Solve(ScenarioArgs),
    /// Sweep one parameter and write the table.
    Sweep(ScenarioArgs),
    /// Write the data behind a comparison figure.
    Figures(FigureArgs),
    /// Solve a spectrum-purchase scenario and print the outcome as JSON.
    Invest(ScenarioArgs),
}

/// Flags mirror the config-file keys and override them.
#[derive(Args)]
struct ScenarioArgs {
    /// Flat TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    market: Option<MarketKind>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    q_max: Option<f64>,
    #[arg(long)]
    latency_exponent: Option<f64>,
    #[arg(long)]
    whitespace_latency_exponent: Option<f64>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    capacity_1: Option<f64>,
    #[arg(long)]
    capacity_2: Option<f64>,
    #[arg(long)]
    whitespace: Option<f64>,
    #[arg(long)]
    providers: Option<u64>,
    #[arg(long)]
    sweep: Option<SweepVariable>,
    #[arg(long)]
    sweep_lo: Option<f64>,
    #[arg(long)]
    sweep_hi: Option<f64>,
    #[arg(long)]
    sweep_steps: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    available: Option<f64>,
    #[arg(long)]
    unit_price: Option<f64>,
    #[arg(long)]
    available_2: Option<f64>,
    #[arg(long)]
    unit_price_2: Option<f64>,
}

impl ScenarioArgs {
    fn resolve(self) -> anyhow::Result<ScenarioConfig> {
        let base = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        let flags = ScenarioConfig {
            market: self.market,
            p_max: self.p_max,
            q_max: self.q_max,
            latency_exponent: self.latency_exponent,
            whitespace_latency_exponent: self.whitespace_latency_exponent,
            capacity: self.capacity,
            capacity_1: self.capacity_1,
            capacity_2: self.capacity_2,
            whitespace: self.whitespace,
            providers: self.providers,
            sweep: self.sweep,
            sweep_lo: self.sweep_lo,
            sweep_hi: self.sweep_hi,
            sweep_steps: self.sweep_steps,
            output: self.output,
            format: self.format,
            available: self.available,
            unit_price: self.unit_price,
            available_2: self.available_2,
            unit_price_2: self.unit_price_2,
        };
        Ok(base.merge(flags))
    }
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number (1 to 5) or `all`.
    figure: String,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long)]
    sweep_lo: Option<f64>,
    #[arg(long)]
    sweep_hi: Option<f64>,
    #[arg(long)]
    sweep_steps: Option<usize>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Directory for `figure-<id>.<format>` files; stdout when absent.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_table(table: &Table, format: OutputFormat, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(path) => emit(table, format, path)?,
        None => std::io::stdout()
            .lock()
            .write_all(render(table, format)?.as_bytes())?,
    }
    Ok(())
}

fn solve(config: ScenarioConfig) -> anyhow::Result<()> {
    let market = config.market()?;
    let outcome = market.solve_checked()?;
    print_json(&json!({ "market": config.market_kind()?, "outcome": outcome }))
}

fn sweep(config: ScenarioConfig) -> anyhow::Result<()> {
    let rows = run_sweep(&config)?;
    write_table(
        &sweep_table(&rows),
        config.format(),
        config.output.as_deref(),
    )
}

fn invest(config: ScenarioConfig) -> anyhow::Result<()> {
    let [first, second] = config.offers()?;
    let outcome = match config.market()? {
        Market::Monopoly(s) => {
            monopoly_purchase(s.capacity, s.whitespace, first, config.demand()?.p_max())?
        }
        Market::Duopoly(s) => {
            solve_investment_game(s.capacities, [first, second], s.p_max, s.whitespace)?
        }
        _ => {
            return Err(
                Error::config("market", "investment needs a monopoly or duopoly market").into(),
            )
        }
    };
    print_json(&json!({ "market": config.market_kind()?, "investment": outcome }))
}

fn figures(args: FigureArgs) -> anyhow::Result<()> {
    let ids: Vec<u8> = if args.figure == "all" {
        FIGURE_IDS.to_vec()
    } else {
        let id = args.figure.parse().map_err(|_| {
            Error::config(
                "figure",
                format!("expected 1 to 5 or `all`, got `{}`", args.figure),
            )
        })?;
        vec![id]
    };
    let fallback = default_grid();
    let grid = Grid::new(
        args.sweep_lo.unwrap_or(fallback.lo),
        args.sweep_hi.unwrap_or(fallback.hi),
        args.sweep_steps.unwrap_or(fallback.steps),
    )?;
    if ids.len() > 1 && args.out_dir.is_none() {
        bail!(Error::config("out_dir", "`figures all` needs --out-dir"));
    }
    let extension = match args.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    for id in ids {
        let table = figure_suite(id, args.p_max, &grid)?;
        let path = args
            .out_dir
            .as_ref()
            .map(|d| d.join(format!("figure-{id}.{extension}")));
        write_table(&table, args.format, path.as_deref())
            .with_context(|| format!("figure {id}"))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve(args) => solve(args.resolve()?),
        Command::Sweep(args) => sweep(args.resolve()?),
        Command::Invest(args) => invest(args.resolve()?),
        Command::Figures(args) => figures(args),
    }
}

fn exit_status(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if !e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_status(&err))
        }
    }
}
