#![allow(dead_code)]

use discbound::bounds::{delta1, lipschitz_slope};
use discbound::geometry::{Disc, FundamentalDomain};
use rand::Rng;

/// Piecewise-linear function on a grid of (0, 1], at least `delta1`, whose
/// values satisfy `|f(y) - f(x)| <= pi/(y^2 sqrt3) (y - x)` for every pair
/// of grid points `x < y`.
pub struct SlopeBounded {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl SlopeBounded {
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let lo = rng.gen_range(0.05..0.5);
        let grid: Vec<f64> = (0..n).map(|k| lo + (1.0 - lo) * k as f64 / (n - 1) as f64).collect();
        let slopes: Vec<f64> = (1..n).map(|k| rng.gen_range(-1.0..1.0) * lipschitz_slope(grid[k])).collect();
        let start = delta1() + rng.gen_range(0.0..0.05);
        let mut scale = 1.0;
        loop {
            let mut values = vec![start];
            for (k, s) in slopes.iter().enumerate() {
                let next = values[k] + scale * s * (grid[k + 1] - grid[k]);
                values.push(next);
            }
            let shift = values.iter().cloned().fold(f64::INFINITY, f64::min) - delta1();
            if shift < 0.0 {
                values.iter_mut().for_each(|v| *v -= shift);
            }
            let f = Self { grid: grid.clone(), values };
            if f.obeys_bound() {
                return f;
            }
            scale *= 0.8;
        }
    }

    fn obeys_bound(&self) -> bool {
        let n = self.grid.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let (x, y) = (self.grid[i], self.grid[j]);
                // margin keeps the check meaningful after rounding
                (self.values[j] - self.values[i]).abs() <= lipschitz_slope(y) * (y - x) * (1.0 - 1e-9)
            })
        })
    }
}

/// Random lattice with `p` discs of radius `y` and `q` unit discs. Not a
/// packing in general; only the density bookkeeping is exercised.
pub fn random_domain<R: Rng>(rng: &mut R, p: usize, q: usize, y: f64) -> FundamentalDomain {
    loop {
        let u = [rng.gen_range(0.5..5.0), rng.gen_range(-2.0..2.0)];
        let v = [rng.gen_range(-2.0..2.0), rng.gen_range(0.5..5.0)];
        let mut discs = Vec::new();
        for k in 0..p + q {
            let radius = if k < p { y } else { 1.0 };
            discs.push(Disc::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), radius).unwrap());
        }
        if let Ok(d) = FundamentalDomain::new(u, v, discs) {
            if d.area() > 0.1 {
                return d;
            }
        }
    }
}
