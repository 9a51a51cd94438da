//! Analytic upper bounds on the maximal density and the Lipschitz envelope
//! that extends pointwise bounds to whole ranges of ratios.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{Interval, NumericsError};

/// Smallest ratio for which the heptagon/pentagon bound holds.
pub const BLIND_MIN_RATIO: f64 = 0.6735;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("ratio {r} outside the domain of the {bound} bound")]
    Domain { bound: &'static str, r: f64 },
    #[error("bound {value} at r = {r} is below the hexagonal density; not a valid upper bound")]
    BelowHexagonal { r: f64, value: f64 },
    #[error("bad sample file: {0}")]
    Csv(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Density of the hexagonal compact packing, `pi / (2 sqrt 3)`.
pub fn delta1() -> f64 {
    PI / (2.0 * 3f64.sqrt())
}

pub fn delta1_interval() -> Interval {
    let two_sqrt3 = Interval::point(3.0).sqrt().expect("positive") * 2.0;
    Interval::pi().div(two_sqrt3).expect("nonzero")
}

/// Angles of the triangle joining mutually tangent discs of radii 1, r, r:
/// `alpha` at the unit disc, `beta` at each small disc.
pub fn florian_angles(r: f64) -> (f64, f64) {
    let s = 1.0 + r;
    let cos_alpha = (2.0 * s * s - 4.0 * r * r) / (2.0 * s * s);
    let cos_beta = (s * s + 4.0 * r * r - s * s) / (2.0 * s * 2.0 * r);
    (cos_alpha.clamp(-1.0, 1.0).acos(), cos_beta.clamp(-1.0, 1.0).acos())
}

/// Covered fraction of the (1, r, r) tangent triangle.
pub fn florian_bound(r: f64) -> Result<f64, BoundsError> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(BoundsError::Domain { bound: "Florian", r });
    }
    let (alpha, beta) = florian_angles(r);
    let (a, b, c) = (2.0 * r, 1.0 + r, 1.0 + r);
    let s = 0.5 * (a + b + c);
    let area = (s * (s - a) * (s - b) * (s - c)).sqrt();
    Ok((0.5 * alpha + beta * r * r) / area)
}

/// Interval enclosure of the Florian bound over every ratio in `r`.
///
/// Uses `alpha/2 = asin(r/(1+r))`, `beta = pi/2 - alpha/2` and the triangle
/// area `r sqrt(1+2r)`.
pub fn florian_interval(r: Interval) -> Result<Interval, BoundsError> {
    if !(r.lo() > 0.0 && r.hi() <= 1.0) {
        return Err(BoundsError::Domain { bound: "Florian", r: r.lo() });
    }
    let one = Interval::point(1.0);
    let half_alpha = (one - (one + r).recip()?).asin()?;
    let beta = Interval::pi() * 0.5 - half_alpha;
    let covered = half_alpha + beta * r.sqr();
    let area = r * (one + r * 2.0).sqrt()?;
    Ok(covered.div(area)?)
}

fn tan_pi_over(n: f64) -> Result<Interval, NumericsError> {
    Interval::pi().div(Interval::point(n))?.tan()
}

/// One unit disc in its circumscribed regular heptagon plus one r-disc in its
/// circumscribed regular pentagon.
pub fn blind_bound(r: f64) -> Result<f64, BoundsError> {
    if !(BLIND_MIN_RATIO..=1.0).contains(&r) {
        return Err(BoundsError::Domain { bound: "Blind", r });
    }
    let hept = 7.0 * (PI / 7.0).tan();
    let pent = 5.0 * (PI / 5.0).tan();
    Ok(PI * (1.0 + r * r) / (hept + pent * r * r))
}

/// Interval enclosure of [`blind_bound`] over every ratio in `r`.
///
/// Written as `pi/b * (1 + (b - a)/(a + b r^2))` with `a = 7 tan(pi/7)` and
/// `b = 5 tan(pi/5)`, so `r` occurs once and the enclosure stays tight.
pub fn blind_interval(r: Interval) -> Result<Interval, BoundsError> {
    if r.lo() < BLIND_MIN_RATIO || r.hi() > 1.0 {
        return Err(BoundsError::Domain { bound: "Blind", r: r.lo() });
    }
    let a = tan_pi_over(7.0)? * 7.0;
    let b = tan_pi_over(5.0)? * 5.0;
    let one = Interval::point(1.0);
    let tail = (b - a).div(a + b * r.sqr())?;
    Ok(Interval::pi().div(b)? * (one + tail))
}

/// Ratio above which the Blind bound drops to the hexagonal density, from
/// its closed form.
pub fn r_blind() -> f64 {
    let t = |n: f64| n * (PI / n).tan();
    ((t(7.0) - t(6.0)) / (t(6.0) - t(5.0))).sqrt()
}

/// The same ratio located by bisection on `blind_bound(r) - delta1()`.
pub fn r_blind_by_bisection(tol: f64) -> f64 {
    let f = |r: f64| blind_bound(r).expect("in domain") - delta1();
    let (mut lo, mut hi) = (BLIND_MIN_RATIO, 1.0);
    while hi - lo > tol {
        let m = 0.5 * (lo + hi);
        if f(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Slope bound `pi / (y^2 sqrt 3)` on the maximal density between two ratios
/// whose larger one is `y`.
pub fn lipschitz_slope(y: f64) -> f64 {
    PI / (y * y * 3f64.sqrt())
}

fn lipschitz_slope_interval(y: f64) -> Interval {
    let sqrt3 = Interval::point(3.0).sqrt().expect("positive");
    Interval::pi().div(Interval::point(y).sqr() * sqrt3).expect("y > 0")
}

/// A proven upper bound on the maximal density at one ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSample")]
pub struct BoundSample {
    pub r: f64,
    pub value: f64,
}

#[derive(Deserialize)]
struct RawSample {
    r: f64,
    value: f64,
}

impl TryFrom<RawSample> for BoundSample {
    type Error = BoundsError;
    fn try_from(s: RawSample) -> Result<Self, Self::Error> {
        BoundSample::new(s.r, s.value)
    }
}

impl BoundSample {
    /// Rejects values below the hexagonal density, which no correct upper
    /// bound can take.
    pub fn new(r: f64, value: f64) -> Result<Self, BoundsError> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(BoundsError::Domain { bound: "sample", r });
        }
        if !(value >= delta1_interval().lo()) {
            return Err(BoundsError::BelowHexagonal { r, value });
        }
        Ok(Self { r, value })
    }
}

/// Upper bound at `r` propagated from each sample with the directional
/// Lipschitz slope, minimized over samples. Infinite when `samples` is empty.
pub fn lipschitz_envelope(samples: &[BoundSample], r: f64) -> f64 {
    samples
        .iter()
        .map(|s| {
            let slope = lipschitz_slope_interval(r.max(s.r));
            let gap = Interval::point((r - s.r).abs()) + Interval::point(0.0);
            // |r - r_i| itself is rounded; widen by one ulp
            let gap = gap.inflate(f64::EPSILON * gap.hi());
            (Interval::point(s.value) + slope * gap).hi()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Reads samples from CSV with header `r,value`.
pub fn read_samples_csv<R: Read>(r: R) -> Result<Vec<BoundSample>, BoundsError> {
    csv::Reader::from_reader(r)
        .deserialize::<RawSample>()
        .map(|row| {
            let row = row.map_err(|e| BoundsError::Csv(e.to_string()))?;
            BoundSample::try_from(row)
        })
        .collect()
}

pub fn write_samples_csv<W: Write>(samples: &[BoundSample], w: W) -> Result<(), BoundsError> {
    let err = |e: csv::Error| BoundsError::Csv(e.to_string());
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["r", "value"]).map_err(err)?;
    for s in samples {
        wtr.write_record([format!("{:?}", s.r), format!("{:?}", s.value)]).map_err(err)?;
    }
    wtr.flush().map_err(|e| BoundsError::Csv(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpperSource {
    Florian,
    Blind,
    Envelope,
}

/// Least of the analytic bounds that apply at `r` and the envelope of
/// `samples`. The Blind bound enters as `max(delta1, blind(r))`, since no
/// ratio can do worse than the hexagonal packing of unit discs.
pub fn best_upper(r: f64, samples: &[BoundSample]) -> Result<(f64, UpperSource), BoundsError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::Domain { bound: "best upper", r });
    }
    let mut best = (florian_bound(r)?, UpperSource::Florian);
    if r >= BLIND_MIN_RATIO {
        let b = blind_bound(r)?.max(delta1());
        if b < best.0 {
            best = (b, UpperSource::Blind);
        }
    }
    let e = lipschitz_envelope(samples, r);
    if e < best.0 {
        best = (e, UpperSource::Envelope);
    }
    Ok(best)
}
