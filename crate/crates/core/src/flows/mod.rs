//! One-parameter families of periodic packings ("flows"), their closed-form
//! densities, crossings with a density level, and interstitial packings.

mod curve;
mod eval;
mod interstitial;
mod recipe;

use std::f64::consts::PI;

use thiserror::Error;

use crate::numerics::Interval;

pub use curve::{lower_bound_at, lower_bound_curve, CurveSample, CurveTag, DensityCurve, LowerBound, Registry};
pub use eval::{eval_flow, FlowEvaluator, CONTINUATION_STEP, PACKING_TOL};
pub use interstitial::{interstitial, r8};
pub use recipe::{Census, FlowRecipe, InitialGuess, RadiusSel, RecipeKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("no packing: {0}")]
    NoSolution(String),
    #[error("packing at r = {r} has {overlaps} overlapping pair(s)")]
    InvalidPacking { r: f64, overlaps: usize },
    #[error("r = {r} outside the valid range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bad recipe: {0}")]
    Recipe(String),
    #[error("bad curve: {0}")]
    Curve(String),
}

/// Density of the sequential flow between `r4` and `r1`,
/// `pi (r^2+1)(r+1)^4 / (16 (r+2)^(3/2) r^(3/2))`. NaN for `r <= 0`.
pub fn closed_form_841(r: f64) -> f64 {
    if !(r > 0.0) {
        return f64::NAN;
    }
    PI * (r * r + 1.0) * (r + 1.0).powi(4) / (16.0 * (r + 2.0) * (r + 2.0).sqrt() * r * r.sqrt())
}

/// Density of the constrained flow between `r6` and 1.
pub fn closed_form_r6(r: f64) -> Result<f64, FlowError> {
    let inner = 45.0 * r * r - 6.0 * r - 3.0;
    if !(inner >= 0.0) {
        return Err(FlowError::Domain(format!("45r^2 - 6r - 3 = {inner} < 0 at r = {r}")));
    }
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    let outer =
        47.0 * r4 + 84.0 * r3 + 54.0 * r2 + 12.0 * r + 3.0 - (7.0 * r3 + 13.0 * r2 + 9.0 * r + 3.0) * inner.sqrt();
    if !(outer >= 0.0) {
        return Err(FlowError::Domain(format!("outer radicand {outer} < 0 at r = {r}")));
    }
    Ok(PI * (6.0 * r2 + 1.0) * outer.sqrt() / (6f64.sqrt() * (r4 + 12.0 * r2 + 12.0 * r + 3.0)))
}

/// Grid spacing of the scan in [`find_crossings`].
pub const SCAN_STEP: f64 = 1e-3;

/// Ratios where `f` crosses `level`: a scan on a grid of spacing
/// [`SCAN_STEP`], then bisection of each sign change down to width `tol`.
/// Points where `f` is not finite break the scan. A grid point where `f`
/// equals `level` exactly is returned as a degenerate interval.
pub fn find_crossings(f: impl Fn(f64) -> f64, level: f64, range: Interval, tol: f64) -> Vec<Interval> {
    let sign = |x: f64| {
        let v = f(x) - level;
        if v.is_finite() {
            Some(v.signum() as i8 * (v != 0.0) as i8)
        } else {
            None
        }
    };
    let (lo, hi) = (range.lo(), range.hi());
    let grid = (0..).map(|k| lo + k as f64 * SCAN_STEP).take_while(|&x| x < hi).chain(std::iter::once(hi));

    let mut out = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for x in grid {
        let s = sign(x);
        match (prev, s) {
            (_, Some(0)) => out.push(Interval::point(x)),
            (Some((a, sa)), Some(sb)) if sa != 0 && sa != sb => {
                let (mut a, mut b) = (a, x);
                while b - a > tol {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    match sign(m) {
                        Some(0) => {
                            a = m;
                            b = m;
                        }
                        Some(sm) if sm == sa => a = m,
                        Some(_) => b = m,
                        None => break,
                    }
                }
                out.push(Interval::new(a, b).expect("a <= b"));
            }
            _ => {}
        }
        prev = s.map(|s| (x, s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::delta1;

    #[test]
    fn closed_form_841_values() {
        let r4 = 2f64.sqrt() - 1.0;
        assert!((closed_form_841(r4) - 0.920_151_184_510_61).abs() < 1e-12);
        assert!((closed_form_841(1.0) - 2.0 * PI / (3.0 * 3f64.sqrt())).abs() < 1e-14);
        assert!((closed_form_841(0.4378) - 0.90692).abs() < 1e-4);
        let half = PI * 1.25 * 5.0625 / (16.0 * 2.5f64.powf(1.5) * 0.5f64.powf(1.5));
        assert!((closed_form_841(0.5) - half).abs() < 1e-14);
        assert!(closed_form_841(0.0).is_nan());
    }

    #[test]
    fn closed_form_r6_values() {
        assert!((closed_form_r6(1.0).unwrap() - delta1()).abs() < 1e-14);
        let r6 = 0.349_198_186_208_549_87;
        assert!((closed_form_r6(r6).unwrap() - 0.924_648_910_382_06).abs() < 1e-12);
        assert!(matches!(closed_form_r6(0.3), Err(FlowError::Domain(_))));
    }

    #[test]
    fn a1_crossing() {
        let range = Interval::new(2f64.sqrt() - 1.0, 0.637_555_977_231_945_8).unwrap();
        let c = find_crossings(closed_form_841, delta1(), range, 1e-12);
        // the curve dips below delta1 and comes back before r1; mpmath roots
        // 0.43784124244422 and 0.627460687432223
        assert_eq!(c.len(), 2);
        assert!((c[0].mid() - 0.437_841_242_444_22).abs() < 1e-12);
        assert!((c[1].mid() - 0.627_460_687_432_223).abs() < 1e-12);
        assert!(c.iter().all(|i| i.width() <= 1e-12));
    }

    #[test]
    fn constant_has_no_crossing() {
        let range = Interval::new(0.0, 1.0).unwrap();
        assert!(find_crossings(|_| 0.5, 0.9, range, 1e-9).is_empty());
    }

    #[test]
    fn exact_hit_and_gaps() {
        let range = Interval::new(0.0, 0.5).unwrap();
        let c = find_crossings(|x| x, 0.5, range, 1e-9);
        assert_eq!(c, vec![Interval::point(0.5)]);
        let range = Interval::new(0.0, 1.0).unwrap();
        let c = find_crossings(|x| if x < 0.5 { f64::NAN } else { x }, 0.25, range, 1e-9);
        assert!(c.is_empty());
    }
}
