//! Flat, one-scenario-per-file configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::value::{Error as ValueError, StrDeserializer};
use serde::de::IntoDeserializer;
use serde::{Deserialize, Serialize};

use crate::competitive::{DuopolyScenario, PerfectCompetitionScenario, SymmetricNScenario};
use crate::curves::{DemandCurve, LatencyCurve};
use crate::error::{Error, Result};
use crate::investment::SpectrumOffer;
use crate::monopoly::MonopolyWhitespaceScenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarketKind {
    Monopoly,
    Duopoly,
    /// Unit mass of price-taking providers.
    Competitive,
    /// `providers` identical strategic providers.
    Symmetric,
}

impl fmt::Display for MarketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarketKind::Monopoly => "monopoly",
            MarketKind::Duopoly => "duopoly",
            MarketKind::Competitive => "competitive",
            MarketKind::Symmetric => "symmetric",
        })
    }
}

/// Scenario parameter a sweep moves. The sweep value is added to the base value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Capacity,
    Capacity1,
    Capacity2,
    /// Adds half of the sweep value to each duopoly capacity.
    CapacitySplit,
    Whitespace,
    PMax,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Parses a config value by its serialized name.
fn parse_name<T: for<'de> Deserialize<'de>>(field: &str, text: &str) -> Result<T> {
    let de: StrDeserializer<'_, ValueError> = text.into_deserializer();
    T::deserialize(de).map_err(|e| Error::config(field, e.to_string()))
}

impl FromStr for MarketKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_name("market", s)
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_name("sweep", s)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_name("format", s)
    }
}

/// Every key is optional so that a file and command-line flags can be merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub market: Option<MarketKind>,
    pub p_max: Option<f64>,
    pub q_max: Option<f64>,
    /// Exponent `k` of the licensed latency `x^k`; 1 when absent.
    pub latency_exponent: Option<f64>,
    /// Exponent of the whitespace latency; defaults to `latency_exponent`.
    pub whitespace_latency_exponent: Option<f64>,
    pub capacity: Option<f64>,
    pub capacity_1: Option<f64>,
    pub capacity_2: Option<f64>,
    pub whitespace: Option<f64>,
    pub providers: Option<u64>,
    pub sweep: Option<SweepVariable>,
    pub sweep_lo: Option<f64>,
    pub sweep_hi: Option<f64>,
    pub sweep_steps: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    /// Spectrum on offer to the monopolist or to provider 1.
    pub available: Option<f64>,
    pub unit_price: Option<f64>,
    pub available_2: Option<f64>,
    pub unit_price_2: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),+ $(,)?) => {
        ScenarioConfig { $($field: $top.$field.or($base.$field)),+ }
    };
}

/// Grid of sweep values, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config(
                "sweep_lo",
                format!("need sweep_lo < sweep_hi, got [{lo}, {hi}]"),
            ));
        }
        if steps < 2 {
            return Err(Error::config(
                "sweep_steps",
                format!("need at least 2 steps, got {steps}"),
            ));
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// A validated market ready to solve.
#[derive(Clone, Debug)]
pub enum Market {
    /// Covers the whitespace case; `whitespace = 0` means none.
    Monopoly(MonopolyWhitespaceScenario),
    Duopoly(DuopolyScenario),
    Competitive(PerfectCompetitionScenario),
    Symmetric(SymmetricNScenario),
}

fn positive(field: &str, value: Option<f64>) -> Result<f64> {
    let v = value.ok_or_else(|| Error::config(field, "missing"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be positive, got {v}")))
    }
}

fn nonnegative(field: &str, value: Option<f64>) -> Result<f64> {
    let v = value.unwrap_or(0.0);
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be >= 0, got {v}")))
    }
}

fn exponent(field: &str, value: Option<f64>) -> Result<LatencyCurve> {
    match value {
        None => Ok(LatencyCurve::linear()),
        Some(k) => LatencyCurve::power(k)
            .map_err(|_| Error::config(field, format!("must be >= 1, got {k}"))),
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Keys set in `overrides` win.
    pub fn merge(self, overrides: ScenarioConfig) -> Self {
        let (base, top) = (self, overrides);
        overlay!(
            base,
            top,
            market,
            p_max,
            q_max,
            latency_exponent,
            whitespace_latency_exponent,
            capacity,
            capacity_1,
            capacity_2,
            whitespace,
            providers,
            sweep,
            sweep_lo,
            sweep_hi,
            sweep_steps,
            output,
            format,
            available,
            unit_price,
            available_2,
            unit_price_2,
        )
    }

    pub fn market_kind(&self) -> Result<MarketKind> {
        self.market
            .ok_or_else(|| Error::config("market", "missing"))
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_default()
    }

    pub fn demand(&self) -> Result<DemandCurve> {
        let p_max = positive("p_max", self.p_max.or(Some(1.0)))?;
        let q_max = positive("q_max", self.q_max.or(Some(1.0)))?;
        DemandCurve::linear(p_max, q_max)
    }

    pub fn latency(&self) -> Result<LatencyCurve> {
        exponent("latency_exponent", self.latency_exponent)
    }

    pub fn whitespace_latency(&self) -> Result<LatencyCurve> {
        exponent(
            "whitespace_latency_exponent",
            self.whitespace_latency_exponent.or(self.latency_exponent),
        )
    }

    /// Validates every key the chosen market needs and builds it.
    pub fn market(&self) -> Result<Market> {
        let demand = self.demand()?;
        let latency = self.latency()?;
        let whitespace = nonnegative("whitespace", self.whitespace)?;
        match self.market_kind()? {
            MarketKind::Monopoly => Ok(Market::Monopoly(MonopolyWhitespaceScenario::new(
                demand,
                latency,
                self.whitespace_latency()?,
                positive("capacity", self.capacity)?,
                whitespace,
            )?)),
            MarketKind::Duopoly => {
                if self.whitespace_latency_exponent.is_some_and(|k| k != 1.0) {
                    return Err(Error::Unsupported(
                        "duopoly markets need the latency l(x) = x".into(),
                    ));
                }
                Ok(Market::Duopoly(DuopolyScenario::from_curves(
                    &demand,
                    &latency,
                    positive("capacity_1", self.capacity_1)?,
                    positive("capacity_2", self.capacity_2)?,
                    whitespace,
                )?))
            }
            MarketKind::Competitive => Ok(Market::Competitive(
                PerfectCompetitionScenario::new(
                    demand,
                    latency,
                    positive("capacity", self.capacity)?,
                )?
                .with_whitespace(self.whitespace_latency()?, whitespace)?,
            )),
            MarketKind::Symmetric => {
                if whitespace > 0.0 {
                    return Err(Error::config(
                        "whitespace",
                        "symmetric markets take no whitespace",
                    ));
                }
                let n = self
                    .providers
                    .ok_or_else(|| Error::config("providers", "missing"))?;
                if n == 0 {
                    return Err(Error::config("providers", "must be at least 1"));
                }
                Ok(Market::Symmetric(SymmetricNScenario::new(
                    demand,
                    latency,
                    positive("capacity", self.capacity)?,
                    n,
                )?))
            }
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let lo = self
            .sweep_lo
            .ok_or_else(|| Error::config("sweep_lo", "missing"))?;
        let hi = self
            .sweep_hi
            .ok_or_else(|| Error::config("sweep_hi", "missing"))?;
        let steps = self
            .sweep_steps
            .ok_or_else(|| Error::config("sweep_steps", "missing"))?;
        Grid::new(lo, hi, steps)
    }

    /// Copy of this config with the swept key moved by `delta`.
    pub fn shifted(&self, variable: SweepVariable, delta: f64) -> Self {
        let mut c = self.clone();
        let bump = |v: Option<f64>, d: f64| Some(v.unwrap_or(0.0) + d);
        match variable {
            SweepVariable::Capacity => c.capacity = bump(c.capacity, delta),
            SweepVariable::Capacity1 => c.capacity_1 = bump(c.capacity_1, delta),
            SweepVariable::Capacity2 => c.capacity_2 = bump(c.capacity_2, delta),
            SweepVariable::CapacitySplit => {
                c.capacity_1 = bump(c.capacity_1, 0.5 * delta);
                c.capacity_2 = bump(c.capacity_2, 0.5 * delta);
            }
            SweepVariable::Whitespace => c.whitespace = bump(c.whitespace, delta),
            SweepVariable::PMax => c.p_max = bump(c.p_max.or(Some(1.0)), delta),
        }
        c
    }

    /// Offer to the monopolist or provider 1, and to provider 2.
    pub fn offers(&self) -> Result<[SpectrumOffer; 2]> {
        let first = SpectrumOffer {
            available: nonnegative("available", self.available)?,
            unit_price: nonnegative("unit_price", self.unit_price)?,
        };
        let second = SpectrumOffer {
            available: nonnegative("available_2", self.available_2.or(self.available))?,
            unit_price: nonnegative("unit_price_2", self.unit_price_2.or(self.unit_price))?,
        };
        if self.available.is_none() {
            return Err(Error::config("available", "missing"));
        }
        if self.unit_price.is_none() {
            return Err(Error::config("unit_price", "missing"));
        }
        Ok([first, second])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_toml() {
        let c = ScenarioConfig::from_toml_str(
            "market = \"monopoly\"\ncapacity = 1.0\nwhitespace = 0.5\nsweep = \"whitespace\"\n",
        )
        .unwrap();
        assert_eq!(c.market, Some(MarketKind::Monopoly));
        assert_eq!(c.sweep, Some(SweepVariable::Whitespace));
        assert!(matches!(c.market().unwrap(), Market::Monopoly(_)));
    }

    #[test]
    fn unknown_keys_and_missing_fields() {
        let err = ScenarioConfig::from_toml_str("capacty = 1.0").unwrap_err();
        assert!(err.to_string().contains("capacty"), "{err}");
        let c = ScenarioConfig::from_toml_str("market = \"duopoly\"\ncapacity_1 = 1.0").unwrap();
        match c.market().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "capacity_2"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!(
            "competitive".parse::<MarketKind>().unwrap(),
            MarketKind::Competitive
        );
        assert_eq!(
            "capacity_split".parse::<SweepVariable>().unwrap(),
            SweepVariable::CapacitySplit
        );
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("oligopoly".parse::<MarketKind>().is_err());
    }

    #[test]
    fn flags_win() {
        let file = ScenarioConfig {
            capacity: Some(1.0),
            p_max: Some(2.0),
            ..Default::default()
        };
        let flags = ScenarioConfig {
            capacity: Some(3.0),
            ..Default::default()
        };
        let merged = file.merge(flags);
        assert_eq!(merged.capacity, Some(3.0));
        assert_eq!(merged.p_max, Some(2.0));
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 2.0, 1).is_err());
        assert!(Grid::new(2.0, 0.0, 5).is_err());
        let g = Grid::new(0.0, 2.0, 201).unwrap();
        assert_eq!(g.value(0), 0.0);
        assert_eq!(g.value(100), 1.0);
        assert_eq!(g.value(200), 2.0);
    }
}
