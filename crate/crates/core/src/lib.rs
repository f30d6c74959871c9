//! Equilibria, welfare and comparative statics for markets in which
//! providers sell access to congestible spectrum.
//!
//! Users are nonatomic. Each picks the band with the lowest delivered price
//! `p + l(q/C)`, so in equilibrium every used band has the same delivered
//! price `λ = P(Q)`. Providers anticipate this and set prices (equivalently,
//! quantities) to maximize revenue. Open-access whitespace is a band whose
//! price is fixed at zero.
//!
//! ```
//! use spectrum_statics::monopoly::{solve_monopoly, MonopolyScenario};
//!
//! let market = MonopolyScenario::linear(1.0, 1.0)?;
//! let out = solve_monopoly(&market)?;
//! assert!((out.total_welfare - 0.15625).abs() < 1e-12);
//! # Ok::<(), spectrum_statics::Error>(())
//! ```
//!
//! Modules follow the market structures: [`monopoly`] (with and without a
//! whitespace band), [`competitive`] (duopoly, `n` symmetric providers and a
//! competitive fringe), [`investment`] (buying extra spectrum) and
//! [`reporting`] (sweeps, figure data, CSV/JSON). [`curves`] and [`solver`]
//! hold the demand and latency curves and the scalar numerics they share.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod competitive;
pub mod curves;
pub mod error;
pub mod investment;
pub mod monopoly;
pub mod outcome;
pub mod reporting;
pub mod solver;

pub use curves::{CurveSpec, DemandCurve, DemandFunction, LatencyCurve, LatencyFunction};
pub use error::{Error, Result};
pub use outcome::{Channel, ChannelKind, EquilibriumOutcome};
