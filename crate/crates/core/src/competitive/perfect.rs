//! A unit mass of price-taking providers sharing aggregate capacity `C`.
//!
//! Every provider ends up at the same load ratio `ᾱ`, the unique root on
//! `[0, q_max/C]` of
//!
//! ```text
//! P(ᾱ C) = l(ᾱ) + ᾱ l'(ᾱ)
//! ```
//!
//! and charges `ᾱ l'(ᾱ)`. Next to a whitespace band the common load `α_w`
//! instead solves `Q(m(α)) = α C + W l_w⁻¹(m(α))` on `[0, ᾱ]`, where
//! `m(α) = l(α) + α l'(α)` is the marginal latency cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{DemandCurve, LatencyCurve};
use crate::error::{Error, Result};
use crate::monopoly::check_capacity;
use crate::outcome::{Channel, ChannelKind, EquilibriumOutcome};
use crate::solver::{self, Bracket, SolverSettings};

/// Number of equal provider bins the efficiency check resolves.
pub const EFFICIENCY_BINS: usize = 10;
/// Euclidean size of each efficiency-check perturbation.
pub const EFFICIENCY_STEP: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct PerfectCompetitionScenario {
    pub demand: DemandCurve,
    pub latency: LatencyCurve,
    /// Aggregate licensed capacity.
    pub capacity: f64,
    pub whitespace_latency: LatencyCurve,
    /// Zero means no whitespace band.
    pub whitespace: f64,
}

impl PerfectCompetitionScenario {
    pub fn new(demand: DemandCurve, latency: LatencyCurve, capacity: f64) -> Result<Self> {
        Ok(Self {
            demand,
            whitespace_latency: latency.clone(),
            latency,
            capacity: check_capacity("capacity", capacity, false)?,
            whitespace: 0.0,
        })
    }

    pub fn with_whitespace(
        self,
        whitespace_latency: LatencyCurve,
        whitespace: f64,
    ) -> Result<Self> {
        Ok(Self {
            whitespace_latency,
            whitespace: check_capacity("whitespace", whitespace, true)?,
            ..self
        })
    }

    /// Linear demand with `q_max = 1` and `l(x) = x` on every band.
    pub fn linear(p_max: f64, capacity: f64, whitespace: f64) -> Result<Self> {
        Self::new(
            DemandCurve::linear_unit(p_max)?,
            LatencyCurve::linear(),
            capacity,
        )?
        .with_whitespace(LatencyCurve::linear(), whitespace)
    }

    /// Competitive load ratio `ᾱ` without whitespace.
    pub fn competitive_load(&self) -> Result<f64> {
        let c = self.capacity;
        solver::find_root(
            |a| Ok(self.demand.price(a * c)? - self.latency.marginal_cost(a)?),
            Bracket::new(0.0, self.demand.q_max() / c)?,
            SolverSettings::equilibrium(),
        )
    }

    /// Common load ratio `α_w` next to the whitespace band.
    pub fn whitespace_load(&self) -> Result<f64> {
        let upper = self.competitive_load()?;
        solver::find_root(
            |a| {
                let level = self.latency.marginal_cost(a)?;
                Ok(self.demand.quantity(level)?
                    - a * self.capacity
                    - self.whitespace_quantity_at(level)?)
            },
            Bracket::new(0.0, upper)?,
            SolverSettings::equilibrium(),
        )
    }

    fn whitespace_quantity_at(&self, level: f64) -> Result<f64> {
        if self.whitespace == 0.0 {
            return Ok(0.0);
        }
        Ok(self.whitespace * self.whitespace_latency.inverse(level)?)
    }

    fn outcome_at(&self, load: f64) -> Result<EquilibriumOutcome> {
        let price = load * self.latency.slope(load)?;
        let latency = self.latency.latency(load)?;
        let mut channels = vec![Channel::priced(
            ChannelKind::Competitive,
            load * self.capacity,
            price,
            latency,
        )];
        if self.whitespace > 0.0 {
            let q_w = self.whitespace_quantity_at(price + latency)?;
            let l_w = self.whitespace_latency.latency(q_w / self.whitespace)?;
            channels.push(Channel::whitespace(q_w, l_w));
        }
        EquilibriumOutcome::assemble(&self.demand, channels)
    }
}

/// Competitive equilibrium and its common load ratio.
#[derive(Clone, Debug)]
pub struct CompetitiveOutcome {
    /// `ᾱ`, or `α_w` when a whitespace band is present.
    pub load: f64,
    pub equilibrium: EquilibriumOutcome,
}

/// Perfect-competition equilibrium without whitespace.
pub fn solve_perfect_competition(s: &PerfectCompetitionScenario) -> Result<CompetitiveOutcome> {
    if s.whitespace != 0.0 {
        return Err(Error::domain(
            "solve_perfect_competition needs W = 0; use solve_pc_whitespace",
        ));
    }
    let load = s.competitive_load()?;
    Ok(CompetitiveOutcome {
        load,
        equilibrium: s.outcome_at(load)?,
    })
}

/// Perfect-competition equilibrium next to a whitespace band, `W > 0`.
pub fn solve_pc_whitespace(s: &PerfectCompetitionScenario) -> Result<CompetitiveOutcome> {
    if !(s.whitespace > 0.0) {
        return Err(Error::domain(
            "solve_pc_whitespace needs W > 0; use solve_perfect_competition",
        ));
    }
    let load = s.whitespace_load()?;
    Ok(CompetitiveOutcome {
        load,
        equilibrium: s.outcome_at(load)?,
    })
}

/// Dispatches on `W`.
pub fn solve_pc_market(s: &PerfectCompetitionScenario) -> Result<CompetitiveOutcome> {
    if s.whitespace == 0.0 {
        solve_perfect_competition(s)
    } else {
        solve_pc_whitespace(s)
    }
}

/// `∂T/∂C = ᾱ² l'(ᾱ)` without whitespace.
pub fn pc_welfare_capacity_slope(s: &PerfectCompetitionScenario) -> Result<f64> {
    let a = s.competitive_load()?;
    Ok(a * a * s.latency.slope(a)?)
}

/// Closed form for linear demand (`q_max = 1`) and `l(x) = x`: `ᾱ = 1/(C + 2/p_max)`.
pub fn pc_closed_form_linear(p_max: f64, capacity: f64) -> Result<CompetitiveOutcome> {
    pc_whitespace_closed_form_linear(p_max, capacity, 0.0)
}

/// Linear closed form with whitespace: `α_w = 1/(C + 2W + 2/p_max)`.
pub fn pc_whitespace_closed_form_linear(
    p_max: f64,
    capacity: f64,
    whitespace: f64,
) -> Result<CompetitiveOutcome> {
    let s = PerfectCompetitionScenario::linear(p_max, capacity, whitespace)?;
    let a = 1.0 / (capacity + 2.0 * whitespace + 2.0 / p_max);
    let mut channels = vec![Channel::priced(
        ChannelKind::Competitive,
        a * capacity,
        a,
        a,
    )];
    if whitespace > 0.0 {
        channels.push(Channel::whitespace(2.0 * whitespace * a, 2.0 * a));
    }
    Ok(CompetitiveOutcome {
        load: a,
        equilibrium: EquilibriumOutcome::assemble(&s.demand, channels)?,
    })
}

/// `∂T/∂W = 8W/(C + 2W + 2/p_max)³` for the linear whitespace market.
pub fn pc_whitespace_welfare_slope_linear(p_max: f64, capacity: f64, whitespace: f64) -> f64 {
    8.0 * whitespace / (capacity + 2.0 * whitespace + 2.0 / p_max).powi(3)
}

/// Total welfare `∫₀^Q P - Σ qᵢ l(qᵢ/Cᵢ)` of an arbitrary split of the
/// licensed load across provider bins.
pub fn binned_welfare(
    s: &PerfectCompetitionScenario,
    loads: &[f64],
    capacities: &[f64],
) -> Result<f64> {
    if loads.len() != capacities.len() {
        return Err(Error::domain("one capacity per load bin is required"));
    }
    let served: f64 = loads.iter().sum();
    let mut cost = 0.0;
    for (&q, &c) in loads.iter().zip(capacities) {
        cost += q * s.latency.latency(q / c)?;
    }
    Ok(s.demand.gross_utility(served)? - cost)
}

fn equilibrium_bins(s: &PerfectCompetitionScenario) -> Result<(Vec<f64>, Vec<f64>)> {
    let load = s.competitive_load()?;
    let bin = s.capacity / EFFICIENCY_BINS as f64;
    Ok((
        vec![load * bin; EFFICIENCY_BINS],
        vec![bin; EFFICIENCY_BINS],
    ))
}

/// Welfare change when the equilibrium bin loads move by `direction`.
pub fn pc_welfare_gain(
    s: &PerfectCompetitionScenario,
    direction: &[f64; EFFICIENCY_BINS],
) -> Result<f64> {
    let (base, caps) = equilibrium_bins(s)?;
    let moved: Vec<f64> = base.iter().zip(direction).map(|(q, h)| q + h).collect();
    Ok(binned_welfare(s, &moved, &caps)? - binned_welfare(s, &base, &caps)?)
}

/// Largest welfare gain over `count` random feasible perturbations of the
/// equilibrium bin loads, each of Euclidean size [`EFFICIENCY_STEP`].
///
/// Even-numbered perturbations keep the served total fixed. The unperturbed
/// profile is included, so the result is never negative.
pub fn pc_efficiency_check(s: &PerfectCompetitionScenario, count: usize, seed: u64) -> Result<f64> {
    let (base, _) = equilibrium_bins(s)?;
    let served: f64 = base.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for k in 0..count {
        let mut h = [0.0; EFFICIENCY_BINS];
        for v in &mut h {
            *v = rng.gen_range(-1.0..1.0);
        }
        if k % 2 == 0 {
            let mean = h.iter().sum::<f64>() / EFFICIENCY_BINS as f64;
            h.iter_mut().for_each(|v| *v -= mean);
        }
        let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let mut scale = EFFICIENCY_STEP / norm;
        // Shrink until every bin stays nonnegative and demand is not exceeded.
        while base.iter().zip(&h).any(|(q, v)| q + scale * v < 0.0)
            || served + scale * h.iter().sum::<f64>() > s.demand.q_max()
        {
            scale *= 0.5;
        }
        h.iter_mut().for_each(|v| *v *= scale);
        best = best.max(pc_welfare_gain(s, &h)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_unit_market() {
        let s = PerfectCompetitionScenario::linear(1.0, 1.0, 0.0).unwrap();
        let out = solve_perfect_competition(&s).unwrap();
        assert_abs_diff_eq!(out.load, 1.0 / 3.0, epsilon = 1e-12);
        let e = &out.equilibrium;
        assert_abs_diff_eq!(
            e.price(ChannelKind::Competitive),
            1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(e.revenue, 1.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.consumer_surplus, 1.0 / 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.total_welfare, 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            pc_welfare_capacity_slope(&s).unwrap(),
            1.0 / 9.0,
            epsilon = 1e-12
        );
        e.check_invariants(&s.demand).unwrap();
    }

    #[test]
    fn quadratic_latency_load() {
        let s = PerfectCompetitionScenario::new(
            DemandCurve::linear_unit(1.0).unwrap(),
            LatencyCurve::power(2.0).unwrap(),
            1.0,
        )
        .unwrap();
        let a = solve_perfect_competition(&s).unwrap().load;
        assert_abs_diff_eq!(a, (13.0_f64.sqrt() - 1.0) / 6.0, epsilon = 1e-12);
        assert!((1.0 - a - 3.0 * a * a).abs() < 1e-12);
    }

    #[test]
    fn whitespace_market() {
        let s = PerfectCompetitionScenario::linear(1.0, 1.0, 0.5).unwrap();
        let out = solve_pc_whitespace(&s).unwrap();
        assert_abs_diff_eq!(out.load, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(
            out.equilibrium.quantity(ChannelKind::Whitespace),
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            out.equilibrium.price(ChannelKind::Competitive),
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            pc_whitespace_welfare_slope_linear(1.0, 1.0, 0.5),
            1.0 / 16.0,
            epsilon = 1e-15
        );
        let closed = pc_whitespace_closed_form_linear(1.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(
            closed.equilibrium.total_welfare,
            out.equilibrium.total_welfare,
            epsilon = 1e-12
        );
        out.equilibrium.check_invariants(&s.demand).unwrap();
    }

    #[test]
    fn regimes_are_checked() {
        let s = PerfectCompetitionScenario::linear(1.0, 1.0, 0.5).unwrap();
        assert!(solve_perfect_competition(&s).is_err());
        let s = PerfectCompetitionScenario::linear(1.0, 1.0, 0.0).unwrap();
        assert!(solve_pc_whitespace(&s).is_err());
    }

    #[test]
    fn efficiency() {
        let s = PerfectCompetitionScenario::linear(1.0, 1.0, 0.0).unwrap();
        assert_eq!(pc_welfare_gain(&s, &[0.0; EFFICIENCY_BINS]).unwrap(), 0.0);
        assert!(pc_efficiency_check(&s, 100, 7).unwrap() <= 1e-7);
        let mut h = [0.0; EFFICIENCY_BINS];
        h[0] = 1e-3;
        h[1] = -1e-3;
        assert!(pc_welfare_gain(&s, &h).unwrap() < 0.0);
    }
}
