mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use common::{argmax, best_price, linear_welfare, wardrop, Band, Draws};
use proptest::prelude::*;
use spectrum_statics::monopoly::*;
use spectrum_statics::solver::{central_difference, maximize_concave, SolverSettings};
use spectrum_statics::{ChannelKind, DemandCurve, LatencyCurve};

const M: ChannelKind = ChannelKind::Monopoly;
const W: ChannelKind = ChannelKind::Whitespace;

fn welfare(p_max: f64, c: f64) -> f64 {
    solve_monopoly(&MonopolyScenario::linear(p_max, c).unwrap())
        .unwrap()
        .total_welfare
}

fn whitespace_welfare(p_max: f64, c: f64, w: f64) -> f64 {
    solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(p_max, c, w).unwrap())
        .unwrap()
        .total_welfare
}

#[test]
fn unit_market_values() {
    let out = solve_monopoly(&MonopolyScenario::linear(1.0, 1.0).unwrap()).unwrap();
    assert_abs_diff_eq!(out.quantity(M), 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(out.price(M), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(out.revenue, 0.125, epsilon = 1e-12);
    assert_abs_diff_eq!(out.consumer_surplus, 0.03125, epsilon = 1e-12);
    assert_abs_diff_eq!(out.total_welfare, 0.15625, epsilon = 1e-12);
}

#[test]
fn solver_matches_closed_form_on_random_markets() {
    let mut draws = Draws::new(11);
    for _ in 0..50 {
        let (p, c) = (draws.uniform(0.1, 5.0), draws.uniform(0.05, 5.0));
        let solved = solve_monopoly(&MonopolyScenario::linear(p, c).unwrap()).unwrap();
        let closed = monopoly_closed_form_linear(p, c).unwrap();
        assert_abs_diff_eq!(solved.quantity(M), closed.quantity(M), epsilon = 1e-10);
        assert_abs_diff_eq!(solved.price(M), closed.price(M), epsilon = 1e-10);
        assert_abs_diff_eq!(solved.revenue, closed.revenue, epsilon = 1e-10);
        assert_abs_diff_eq!(
            solved.consumer_surplus,
            closed.consumer_surplus,
            epsilon = 1e-10
        );
        assert!(solved.price(M) > 0.0 && solved.quantity(M) > 0.0);
    }
}

#[test]
fn price_search_oracle_agrees_for_power_latency() {
    // The library optimizes over quantity; the oracle optimizes over price.
    for k in [1.0, 1.5, 2.0, 3.0] {
        let demand = DemandCurve::linear(2.0, 1.5).unwrap();
        let latency = LatencyCurve::power(k).unwrap();
        let s = MonopolyScenario::new(demand.clone(), latency.clone(), 0.8).unwrap();
        let out = solve_monopoly(&s).unwrap();
        let bands = [Band {
            price: 0.0,
            latency,
            capacity: 0.8,
        }];
        let p = best_price(&demand, &bands, 0);
        assert_abs_diff_eq!(out.price(M), p, epsilon = 1e-6);
        let mut priced = bands.to_vec();
        priced[0].price = out.price(M);
        let (level, q) = wardrop(&demand, &priced);
        assert_abs_diff_eq!(out.quantity(M), q[0], epsilon = 1e-9);
        assert_abs_diff_eq!(out.delivered_price, level, epsilon = 1e-9);
        out.check_invariants(&demand).unwrap();
    }
}

#[test]
fn fixed_point_residual_vanishes_at_the_optimum() {
    let s = MonopolyScenario::new(
        DemandCurve::linear_unit(1.0).unwrap(),
        LatencyCurve::power(2.0).unwrap(),
        1.3,
    )
    .unwrap();
    let q = solve_monopoly(&s).unwrap().quantity(M);
    assert!(s.fixed_point_residual(q).unwrap().abs() < 1e-12);
    let (q_golden, _) =
        maximize_concave(|q| s.revenue_at(q), 0.0, 1.0, SolverSettings::default()).unwrap();
    assert_abs_diff_eq!(q, q_golden, epsilon = 1e-7);
}

#[test]
fn capacity_sensitivity() {
    let s = MonopolyScenario::linear(1.0, 1.0).unwrap();
    let sens = monopoly_sensitivity(&s).unwrap();
    assert_abs_diff_eq!(sens.welfare_slope, 0.09375, epsilon = 1e-12);
    assert_abs_diff_eq!(
        monopoly_welfare_slope_linear(1.0, 1.0),
        0.09375,
        epsilon = 1e-15
    );
    // Linear demand and latency leave the monopoly price at p_max / 2.
    assert_eq!(sens.price_slope, 0.0);
    let numeric = central_difference(|c| Ok(welfare(1.0, c)), 1.0, 1e-5).unwrap();
    assert_abs_diff_eq!(sens.welfare_slope, numeric, epsilon = 1e-6);
}

#[test]
fn sensitivity_matches_finite_differences_for_power_latency() {
    let demand = DemandCurve::linear(1.5, 1.0).unwrap();
    let latency = LatencyCurve::power(2.0).unwrap();
    let at = |c: f64| {
        solve_monopoly(&MonopolyScenario::new(demand.clone(), latency.clone(), c).unwrap()).unwrap()
    };
    let sens =
        monopoly_sensitivity(&MonopolyScenario::new(demand.clone(), latency.clone(), 0.7).unwrap())
            .unwrap();
    let h = 1e-5;
    let dq = central_difference(|c| Ok(at(c).quantity(M)), 0.7, h).unwrap();
    let dp = central_difference(|c| Ok(at(c).price(M)), 0.7, h).unwrap();
    let dt = central_difference(|c| Ok(at(c).total_welfare), 0.7, h).unwrap();
    assert_relative_eq!(sens.quantity_slope, dq, max_relative = 1e-6);
    assert_relative_eq!(sens.price_slope, dp, max_relative = 1e-6);
    assert_relative_eq!(sens.welfare_slope, dt, max_relative = 1e-6);
    assert!(sens.beta > 0.0);
}

#[test]
fn whitespace_unit_market() {
    let s = MonopolyWhitespaceScenario::linear(1.0, 1.0, 1.0).unwrap();
    let out = solve_monopoly_whitespace(&s).unwrap();
    assert_abs_diff_eq!(out.quantity(M), 1.0 / 6.0, epsilon = 1e-10);
    assert_abs_diff_eq!(out.price(M), 0.25, epsilon = 1e-10);
    assert_abs_diff_eq!(out.quantity(W), 5.0 / 12.0, epsilon = 1e-10);
    assert_eq!(out.price(W), 0.0);
    out.check_invariants(&s.demand).unwrap();
    let d = out.delivered_price;
    assert!((out.price(M) + out.quantity(M) / 1.0 - d).abs() <= 1e-9);
    assert!((out.quantity(W) - d).abs() <= 1e-9);
}

#[test]
fn whitespace_equilibrium_matches_price_search() {
    let demand = DemandCurve::linear_unit(1.0).unwrap();
    for (c, w) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
        let out =
            solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(1.0, c, w).unwrap())
                .unwrap();
        let bands = [Band::linear(0.0, c), Band::linear(0.0, w)];
        let p = best_price(&demand, &bands, 0);
        assert_abs_diff_eq!(out.price(M), p, epsilon = 1e-6);
        let priced = [Band::linear(out.price(M), c), Band::linear(0.0, w)];
        let (_, q) = wardrop(&demand, &priced);
        assert_abs_diff_eq!(out.quantity(M), q[0], epsilon = 1e-9);
        assert_abs_diff_eq!(out.quantity(W), q[1], epsilon = 1e-9);
        let (surplus, total) = linear_welfare(1.0, &priced, &q);
        assert_abs_diff_eq!(out.consumer_surplus, surplus, epsilon = 1e-9);
        assert_abs_diff_eq!(out.total_welfare, total, epsilon = 1e-9);
    }
}

#[test]
fn whitespace_closed_form() {
    let out = monopoly_whitespace_closed_form_linear(1.0, 1.0, 2.0).unwrap();
    assert_abs_diff_eq!(out.total_welfare, 313.0 / 1152.0, epsilon = 1e-12);
    let mut draws = Draws::new(5);
    for _ in 0..50 {
        let (p, c, w) = (
            draws.uniform(0.2, 4.0),
            draws.uniform(0.1, 3.0),
            draws.uniform(0.01, 3.0),
        );
        let solved =
            solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(p, c, w).unwrap())
                .unwrap();
        let closed = monopoly_whitespace_closed_form_linear(p, c, w).unwrap();
        assert_abs_diff_eq!(solved.quantity(M), closed.quantity(M), epsilon = 1e-10);
        assert_abs_diff_eq!(solved.quantity(W), closed.quantity(W), epsilon = 1e-10);
        assert_abs_diff_eq!(solved.price(M), closed.price(M), epsilon = 1e-10);
        assert_abs_diff_eq!(solved.total_welfare, closed.total_welfare, epsilon = 1e-10);
    }
}

#[test]
fn whitespace_bounds_bracket_the_optimum() {
    let s = MonopolyWhitespaceScenario::linear(1.0, 1.0, 1.0).unwrap();
    let (lo, hi) = whitespace_bounds(&s).unwrap();
    assert!(lo < 5.0 / 12.0 && 5.0 / 12.0 < hi);
    // Provider price is zero at the lower bound and demand is met by whitespace alone at the upper.
    assert_abs_diff_eq!(s.split_at(lo).unwrap().1, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s.split_at(hi).unwrap().0, 0.0, epsilon = 1e-12);
    let best = argmax(|q| s.revenue_at(q).unwrap(), lo, hi);
    assert_abs_diff_eq!(best, 5.0 / 12.0, epsilon = 1e-7);
}

#[test]
fn zero_whitespace_reduces_to_monopoly() {
    let a = solve_monopoly_whitespace(&MonopolyWhitespaceScenario::linear(1.0, 1.0, 0.0).unwrap())
        .unwrap();
    let b = solve_monopoly(&MonopolyScenario::linear(1.0, 1.0).unwrap()).unwrap();
    assert_eq!(a.total_welfare, b.total_welfare);
}

#[test]
fn marginal_whitespace_hurts_welfare() {
    let s = MonopolyScenario::linear(1.0, 1.0).unwrap();
    let report = marginal_whitespace(&s, &LatencyCurve::linear()).unwrap();
    assert_abs_diff_eq!(report.welfare_slope, -1.0 / 32.0, epsilon = 1e-12);
    assert_abs_diff_eq!(
        marginal_whitespace_welfare_linear(1.0, 1.0),
        -1.0 / 32.0,
        epsilon = 1e-15
    );
    let h = 1e-5;
    let numeric = (whitespace_welfare(1.0, 1.0, h) - welfare(1.0, 1.0)) / h;
    assert_relative_eq!(numeric, -1.0 / 32.0, max_relative = 1e-4);
}

#[test]
fn marginal_whitespace_slopes_match_finite_differences() {
    let demand = DemandCurve::linear(1.2, 1.0).unwrap();
    let lm = LatencyCurve::power(1.5).unwrap();
    let lw = LatencyCurve::power(2.0).unwrap();
    let s = MonopolyScenario::new(demand.clone(), lm.clone(), 0.9).unwrap();
    let report = marginal_whitespace(&s, &lw).unwrap();
    let at = |w: f64| {
        solve_monopoly_whitespace(
            &MonopolyWhitespaceScenario::new(demand.clone(), lm.clone(), lw.clone(), 0.9, w)
                .unwrap(),
        )
        .unwrap()
    };
    let (h, base) = (1e-6, at(0.0));
    let moved = at(h);
    let slope = |f: fn(&spectrum_statics::EquilibriumOutcome) -> f64| (f(&moved) - f(&base)) / h;
    assert_relative_eq!(
        slope(|o| o.quantity(M)),
        report.quantity_slope,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        slope(|o| o.price(M)),
        report.price_slope,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        slope(|o| o.revenue),
        report.revenue_slope,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        slope(|o| o.consumer_surplus),
        report.surplus_slope,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        slope(|o| o.total_welfare),
        report.welfare_slope,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        slope(|o| o.quantity(W)),
        report.whitespace_load,
        max_relative = 1e-5
    );
}

#[test]
fn marginal_whitespace_slope_is_negative_on_random_linear_markets() {
    let mut draws = Draws::new(3);
    for _ in 0..50 {
        let (p, c) = (draws.uniform(0.1, 5.0), draws.uniform(0.05, 5.0));
        let s = MonopolyScenario::linear(p, c).unwrap();
        let report = marginal_whitespace(&s, &LatencyCurve::linear()).unwrap();
        assert!(report.welfare_slope < 0.0);
        assert_abs_diff_eq!(
            report.welfare_slope,
            marginal_whitespace_welfare_linear(p, c),
            epsilon = 1e-12
        );
        assert!(report.crowding_term(&s, &LatencyCurve::linear()).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monopoly_outcomes_are_consistent(p in 0.1f64..5.0, c in 0.05f64..5.0, k in 1.0f64..3.0) {
        let demand = DemandCurve::linear_unit(p).unwrap();
        let s = MonopolyScenario::new(demand.clone(), LatencyCurve::power(k).unwrap(), c).unwrap();
        let out = solve_monopoly(&s).unwrap();
        prop_assert!(out.check_invariants(&demand).is_ok());
        prop_assert!(out.quantity(M) > 0.0 && out.quantity(M) < s.saturation_quantity().unwrap());
    }

    #[test]
    fn monopoly_welfare_grows_with_capacity(p in 0.1f64..5.0, c in 0.05f64..5.0) {
        prop_assert!(welfare(p, c * 1.1) > welfare(p, c));
    }

    #[test]
    fn whitespace_outcomes_are_consistent(p in 0.1f64..5.0, c in 0.05f64..5.0, w in 0.0f64..5.0) {
        let s = MonopolyWhitespaceScenario::linear(p, c, w).unwrap();
        let out = solve_monopoly_whitespace(&s).unwrap();
        prop_assert!(out.check_invariants(&s.demand).is_ok());
        prop_assert!(out.price(M) >= 0.0);
    }
}
