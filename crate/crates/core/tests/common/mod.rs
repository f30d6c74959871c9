//! Brute-force oracles that work in price space, independent of the
//! library's quantity-space solvers.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectrum_statics::{DemandCurve, LatencyCurve};

/// Plain bisection on a decreasing-then-sign-changing map.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if (v > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization followed by a comparison with the endpoints.
pub fn argmax(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if b - a < 1e-14 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    [lo, hi, mid]
        .into_iter()
        .max_by(|x, y| f(*x).partial_cmp(&f(*y)).unwrap())
        .unwrap()
}

/// A band as users see it: access price, latency curve and capacity.
#[derive(Clone, Debug)]
pub struct Band {
    pub price: f64,
    pub latency: LatencyCurve,
    pub capacity: f64,
}

impl Band {
    pub fn linear(price: f64, capacity: f64) -> Self {
        Self {
            price,
            latency: LatencyCurve::linear(),
            capacity,
        }
    }

    /// Users on this band when the delivered price is `level`.
    fn load_at(&self, level: f64) -> f64 {
        if level <= self.price {
            0.0
        } else {
            self.capacity * self.latency.inverse(level - self.price).unwrap()
        }
    }
}

/// User equilibrium for posted prices: the common delivered price and the
/// quantity on each band.
pub fn wardrop(demand: &DemandCurve, bands: &[Band]) -> (f64, Vec<f64>) {
    let p_max = demand.p_max();
    let excess = |level: f64| {
        let supplied: f64 = bands.iter().map(|b| b.load_at(level)).sum();
        demand.quantity(level).unwrap() - supplied
    };
    let level = if excess(0.0) <= 0.0 {
        0.0
    } else {
        bisect(excess, 0.0, p_max)
    };
    (level, bands.iter().map(|b| b.load_at(level)).collect())
}

/// Revenue of band `i` when it posts `price` and the others keep theirs.
pub fn band_revenue(demand: &DemandCurve, bands: &[Band], i: usize, price: f64) -> f64 {
    let mut bands = bands.to_vec();
    bands[i].price = price;
    let (_, q) = wardrop(demand, &bands);
    price * q[i]
}

/// Revenue-maximizing price for band `i`, others fixed.
pub fn best_price(demand: &DemandCurve, bands: &[Band], i: usize) -> f64 {
    argmax(|p| band_revenue(demand, bands, i, p), 0.0, demand.p_max())
}

/// Consumer surplus and total welfare computed from scratch for linear
/// demand `P(q) = p_max (1 - q)`.
pub fn linear_welfare(p_max: f64, bands: &[Band], quantities: &[f64]) -> (f64, f64) {
    let q: f64 = quantities.iter().sum();
    let gross = p_max * (q - 0.5 * q * q);
    let surplus = gross - q * p_max * (1.0 - q);
    let latency_cost: f64 = bands
        .iter()
        .zip(quantities)
        .map(|(b, &qi)| qi * b.latency.latency(qi / b.capacity).unwrap())
        .sum();
    (surplus, gross - latency_cost)
}

/// Seeded uniform draws for the randomized agreement checks.
pub struct Draws(ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }
}
