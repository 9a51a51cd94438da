//! Discs, the tangent-disc `stick` construction, and periodic packings given
//! by a fundamental domain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::Interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("no tangent disc exists: {0}")]
    NoSolution(String),
    #[error("invalid disc: {0}")]
    InvalidDisc(String),
    #[error("degenerate lattice: |u x v| = {0}")]
    DegenerateLattice(f64),
}

/// A disc given by its center and radius. Serializes as `[x, y, r]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Disc {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl Disc {
    pub fn new(x: f64, y: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) || !radius.is_finite() || !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::InvalidDisc(format!("({x}, {y}, {radius})")));
        }
        Ok(Self { x, y, radius })
    }

    pub fn center(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn distance_to(&self, other: &Disc) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

impl TryFrom<[f64; 3]> for Disc {
    type Error = GeometryError;
    fn try_from([x, y, r]: [f64; 3]) -> Result<Self, Self::Error> {
        Disc::new(x, y, r)
    }
}

impl From<Disc> for [f64; 3] {
    fn from(d: Disc) -> Self {
        [d.x, d.y, d.radius]
    }
}

// Relative slack allowed when the parent discs are exactly in the collinear
// (or internally tangent) configuration but rounding pushes them just past it.
const STICK_SLACK: f64 = 1e-12;

/// The disc of radius `r3` externally tangent to `d1` and `d2`, lying to the
/// left of the directed segment from `d1`'s center to `d2`'s center.
///
/// When the three centers are collinear the unique on-segment solution is
/// returned.
pub fn stick(d1: &Disc, d2: &Disc, r3: f64) -> Result<Disc, GeometryError> {
    if !(r3 > 0.0) || !r3.is_finite() {
        return Err(GeometryError::InvalidDisc(format!("stick radius {r3}")));
    }
    let (dx, dy) = (d2.x - d1.x, d2.y - d1.y);
    let a = dx.hypot(dy);
    let b = d1.radius + r3;
    let c = d2.radius + r3;
    let slack = STICK_SLACK * (a + b + c);
    if a == 0.0 || a > b + c + slack || a < (b - c).abs() - slack {
        return Err(GeometryError::NoSolution(format!("center distance {a} outside [{}, {}]", (b - c).abs(), b + c)));
    }
    let (ex, ey) = (dx / a, dy / a);
    // foot of the apex on the base, measured from d1
    let t = (a * a + b * b - c * c) / (2.0 * a);
    let h = (b - t) * (b + t);
    let h = if h > 0.0 { h.sqrt() } else { 0.0 };
    Disc::new(d1.x + t * ex - h * ey, d1.y + t * ey + h * ex, r3)
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// A periodic packing: the discs of one cell, repeated along the lattice
/// spanned by `u` and `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct FundamentalDomain {
    u: [f64; 2],
    v: [f64; 2],
    discs: Vec<Disc>,
}

#[derive(Deserialize)]
struct RawDomain {
    u: [f64; 2],
    v: [f64; 2],
    discs: Vec<Disc>,
}

impl TryFrom<RawDomain> for FundamentalDomain {
    type Error = GeometryError;
    fn try_from(r: RawDomain) -> Result<Self, Self::Error> {
        FundamentalDomain::new(r.u, r.v, r.discs)
    }
}

/// A pair of discs closer than the sum of their radii. Disc `j` is taken
/// translated by `m*u + n*v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub m: i64,
    pub n: i64,
    pub distance: f64,
    pub required: f64,
}

impl FundamentalDomain {
    pub fn new(u: [f64; 2], v: [f64; 2], discs: Vec<Disc>) -> Result<Self, GeometryError> {
        let a = cross(u, v);
        if !(a.abs() > 0.0) || !a.is_finite() {
            return Err(GeometryError::DegenerateLattice(a));
        }
        Ok(Self { u, v, discs })
    }

    /// Hexagonal compact packing of discs of radius `radius`, one per cell.
    pub fn hexagonal(radius: f64) -> Self {
        let s = 2.0 * radius;
        Self::new([s, 0.0], [0.5 * s, 0.5 * s * 3f64.sqrt()], vec![Disc::new(0.0, 0.0, radius).unwrap()])
            .expect("non-degenerate")
    }

    pub fn u(&self) -> [f64; 2] {
        self.u
    }

    pub fn v(&self) -> [f64; 2] {
        self.v
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    pub fn area(&self) -> f64 {
        cross(self.u, self.v).abs()
    }

    /// `pi * sum(r_i^2) / |u x v|`.
    pub fn density(&self) -> f64 {
        let covered: f64 = self.discs.iter().map(|d| d.radius * d.radius).sum();
        std::f64::consts::PI * covered / self.area()
    }

    /// Density enclosure from the stored coordinates (themselves taken as
    /// exact).
    pub fn density_interval(&self) -> Interval {
        let p = Interval::point;
        let covered = self.discs.iter().fold(p(0.0), |acc, d| acc + p(d.radius).sqr());
        let area = (p(self.u[0]) * p(self.v[1]) - p(self.u[1]) * p(self.v[0])).abs();
        (Interval::pi() * covered).div(area).expect("non-degenerate lattice")
    }

    /// Count of discs whose radius equals `radius` exactly.
    pub fn count_radius(&self, radius: f64) -> usize {
        self.discs.iter().filter(|d| d.radius == radius).count()
    }

    /// Same packing scaled by `lambda` (lattice and discs).
    pub fn scaled(&self, lambda: f64) -> Result<Self, GeometryError> {
        let discs = self
            .discs
            .iter()
            .map(|d| Disc::new(lambda * d.x, lambda * d.y, lambda * d.radius))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new([lambda * self.u[0], lambda * self.u[1]], [lambda * self.v[0], lambda * self.v[1]], discs)
    }

    /// Replaces every disc of radius exactly `from` by a concentric disc of
    /// radius `to`.
    pub fn with_radius_replaced(&self, from: f64, to: f64) -> Result<Self, GeometryError> {
        let discs = self
            .discs
            .iter()
            .map(|d| if d.radius == from { Disc::new(d.x, d.y, to) } else { Ok(*d) })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.u, self.v, discs)
    }

    /// All overlapping pairs, including overlaps with periodic translates.
    ///
    /// A pair counts as overlapping when the center distance is below
    /// `r_i + r_j - tol`. For each pair the translate range is derived from
    /// the lattice coordinates of the center offset, so no neighbor within
    /// reach is missed whatever the cell shape.
    pub fn validate(&self, tol: f64) -> Vec<Violation> {
        let area = cross(self.u, self.v);
        let (lu, lv) = (norm(self.u), norm(self.v));
        let mut out = Vec::new();
        for (i, di) in self.discs.iter().enumerate() {
            for (j, dj) in self.discs.iter().enumerate().skip(i) {
                let reach = di.radius + dj.radius;
                let d = [di.x - dj.x, di.y - dj.y];
                // lattice coordinates of the offset
                let alpha = cross(d, self.v) / area;
                let beta = cross(self.u, d) / area;
                let sm = reach * lv / area.abs() + 1e-9;
                let sn = reach * lu / area.abs() + 1e-9;
                let (m0, m1) = ((alpha - sm).floor() as i64, (alpha + sm).ceil() as i64);
                let (n0, n1) = ((beta - sn).floor() as i64, (beta + sn).ceil() as i64);
                for m in m0..=m1 {
                    for n in n0..=n1 {
                        if i == j && (m < 0 || (m == 0 && n <= 0)) {
                            // self pairs: count each +-(m, n) once and skip the identity
                            continue;
                        }
                        let tx = dj.x + m as f64 * self.u[0] + n as f64 * self.v[0];
                        let ty = dj.y + m as f64 * self.u[1] + n as f64 * self.v[1];
                        let dist = (di.x - tx).hypot(di.y - ty);
                        if dist < reach - tol {
                            out.push(Violation { i, j, m, n, distance: dist, required: reach });
                        }
                    }
                }
            }
        }
        out
    }
}
