//! Proof drivers over a pluggable certifier: dichotomy on the density for a
//! fixed ratio interval, and bisection of a ratio interval for a fixed
//! density.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{blind_interval, delta1, florian_interval, BoundSample, BoundsError, BLIND_MIN_RATIO};
use crate::numerics::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proven,
    Unproven,
}

/// A decision procedure for "the maximal density is at most `delta` at every
/// ratio in `r`".
///
/// `Proven` must be rigorous. It must stay `Proven` when `delta` grows or
/// `r` shrinks. `check` must be free of side effects, since sweeps call it
/// from several threads.
pub trait Certifier: Sync {
    fn name(&self) -> String;

    fn check(&self, r: Interval, delta: f64) -> Verdict;

    /// Cheap pre-test run by [`find_delta`] before each `check`; `false`
    /// means `check` would fail and is skipped.
    fn probe(&self, _r: Interval, _delta: f64) -> bool {
        true
    }

    /// True when no subinterval of `r` can be proven at `delta` either, so
    /// bisecting `r` is pointless.
    fn refutes(&self, _r: Interval, _delta: f64) -> bool {
        false
    }
}

/// Certifies with the heptagon/pentagon bound, taken as
/// `max(delta1, blind(r))`, evaluated in interval arithmetic. Unproven
/// wherever `r` reaches below the bound's validity threshold.
#[derive(Clone, Copy, Debug, Default)]
pub struct BlindCertifier;

impl BlindCertifier {
    fn bound(r: Interval) -> Option<Interval> {
        blind_interval(r).ok()
    }
}

impl Certifier for BlindCertifier {
    fn name(&self) -> String {
        "blind".into()
    }

    fn check(&self, r: Interval, delta: f64) -> Verdict {
        match Self::bound(r) {
            Some(b) if b.hi().max(delta1()) <= delta => Verdict::Proven,
            _ => Verdict::Unproven,
        }
    }

    fn refutes(&self, r: Interval, delta: f64) -> bool {
        if delta < delta1() || r.hi() < BLIND_MIN_RATIO {
            return true;
        }
        let clipped = Interval::new(r.lo().max(BLIND_MIN_RATIO), r.hi().min(1.0));
        match clipped.ok().and_then(Self::bound) {
            Some(b) => b.lo() > delta,
            None => false,
        }
    }
}

/// Certifies with the tangent-triangle bound in interval arithmetic.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlorianCertifier;

impl Certifier for FlorianCertifier {
    fn name(&self) -> String {
        "florian".into()
    }

    fn check(&self, r: Interval, delta: f64) -> Verdict {
        match florian_interval(r) {
            Ok(b) if b.hi() <= delta => Verdict::Proven,
            _ => Verdict::Unproven,
        }
    }

    fn refutes(&self, r: Interval, delta: f64) -> bool {
        matches!(florian_interval(r), Ok(b) if b.lo() > delta)
    }
}

/// Test certifier: `Proven` exactly when `delta >= threshold`. Not a proof
/// of anything about packings.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdCertifier {
    pub threshold: f64,
}

impl Certifier for ThresholdCertifier {
    fn name(&self) -> String {
        format!("threshold:{}", self.threshold)
    }

    fn check(&self, _r: Interval, delta: f64) -> Verdict {
        if delta >= self.threshold {
            Verdict::Proven
        } else {
            Verdict::Unproven
        }
    }

    fn refutes(&self, _r: Interval, delta: f64) -> bool {
        delta < self.threshold
    }
}

/// Certifier by name: `blind`, `florian` or `threshold:T`.
pub fn certifier_by_name(name: &str) -> Result<Box<dyn Certifier>, HarnessError> {
    match name {
        "blind" => Ok(Box::new(BlindCertifier)),
        "florian" => Ok(Box::new(FlorianCertifier)),
        _ => match name.strip_prefix("threshold:").map(str::parse::<f64>) {
            Some(Ok(t)) if t.is_finite() => Ok(Box::new(ThresholdCertifier { threshold: t })),
            _ => Err(HarnessError::UnknownCertifier(name.into())),
        },
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("initial bounds invalid: {0}")]
    InitialBoundsInvalid(String),
    #[error("certification failed on {} of {} subintervals", .0.failing_leaves().len(), .0.subintervals)]
    DepthExceeded(Box<ProofTrace>),
    #[error("unknown certifier `{0}`")]
    UnknownCertifier(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Default stopping width of the dichotomy.
pub const DEFAULT_PRECISION: f64 = 1e-4;
/// Offset below the hexagonal density for the default lower start.
pub const DELTA_LO_OFFSET: f64 = 1e-6;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Dichotomy on the density: keeps `delta_lo` unproven and `delta_hi`
/// proven, and halves the gap until it is at most `precision`. Returns the
/// final proven value.
pub fn find_delta(
    c: &dyn Certifier,
    r: Interval,
    precision: f64,
    delta_lo: f64,
    delta_hi: f64,
) -> Result<f64, HarnessError> {
    if !(precision > 0.0) {
        return Err(HarnessError::InvalidInput(format!("precision must be positive, got {precision}")));
    }
    if !(delta_lo < delta_hi) {
        return Err(HarnessError::InitialBoundsInvalid(format!("{delta_lo} >= {delta_hi}")));
    }
    if c.check(r, delta_hi) != Verdict::Proven {
        return Err(HarnessError::InitialBoundsInvalid(format!(
            "{} cannot prove delta_hi = {delta_hi} on {r}",
            c.name()
        )));
    }
    if c.check(r, delta_lo) == Verdict::Proven {
        return Err(HarnessError::InitialBoundsInvalid(format!(
            "{} already proves delta_lo = {delta_lo} on {r}",
            c.name()
        )));
    }
    let (mut lo, mut hi) = (delta_lo, delta_hi);
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if c.probe(r, mid) && c.check(r, mid) == Verdict::Proven {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// [`find_delta`] started from `delta1 - 1e-6` and the Florian bound over
/// the whole of `r`.
pub fn find_delta_default(c: &dyn Certifier, r: Interval, precision: f64) -> Result<f64, HarnessError> {
    let hi = florian_interval(r)?.hi();
    find_delta(c, r, precision, delta1() - DELTA_LO_OFFSET, hi)
}

/// One node of a bisection: the interval, the density tried, the verdict of
/// the certifier on it, and the two halves if it was split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub interval: Interval,
    pub delta: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a TraceNode>) {
        if self.children.is_empty() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }
}

/// Result of [`certify_interval`]. Wall time is kept out of serialized
/// output so traces are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub root: TraceNode,
    pub subintervals: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Serialize, Deserialize)]
struct LeafRow {
    lo: f64,
    hi: f64,
    delta: f64,
    verdict: Verdict,
}

impl ProofTrace {
    pub fn leaves(&self) -> Vec<&TraceNode> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    pub fn failing_leaves(&self) -> Vec<&TraceNode> {
        self.leaves().into_iter().filter(|l| l.verdict != Verdict::Proven).collect()
    }

    pub fn success(&self) -> bool {
        self.failing_leaves().is_empty()
    }

    /// Leaves as CSV with header `lo,hi,delta,verdict`.
    pub fn write_leaves_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        for l in self.leaves() {
            wtr.serialize(LeafRow { lo: l.interval.lo(), hi: l.interval.hi(), delta: l.delta, verdict: l.verdict })?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads leaves written by [`ProofTrace::write_leaves_csv`] as
    /// `(interval, delta, verdict)`.
    pub fn read_leaves_csv<R: std::io::Read>(r: R) -> Result<Vec<(Interval, f64, Verdict)>, csv::Error> {
        csv::Reader::from_reader(r)
            .deserialize::<LeafRow>()
            .map(|row| {
                let row = row?;
                let iv = Interval::new(row.lo, row.hi)
                    .map_err(|e| csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
                Ok((iv, row.delta, row.verdict))
            })
            .collect()
    }
}

/// Proves `delta` on all of `r` by depth-first bisection, left half first.
/// A node is split while it is unproven, shallower than `max_depth` (the
/// root has depth 1), not refuted by the certifier, and of nonzero width.
/// On failure the full trace comes back inside
/// [`HarnessError::DepthExceeded`].
pub fn certify_interval(
    c: &dyn Certifier,
    r: Interval,
    delta: f64,
    max_depth: u32,
) -> Result<ProofTrace, HarnessError> {
    if max_depth < 1 {
        return Err(HarnessError::InvalidInput("max_depth must be at least 1".into()));
    }
    let start = Instant::now();
    let mut count = 0;
    let root = bisect(c, r, delta, 1, max_depth, &mut count);
    let trace = ProofTrace { root, subintervals: count, wall_time: start.elapsed() };
    if trace.success() {
        Ok(trace)
    } else {
        Err(HarnessError::DepthExceeded(Box::new(trace)))
    }
}

fn bisect(c: &dyn Certifier, r: Interval, delta: f64, depth: u32, max_depth: u32, leaves: &mut usize) -> TraceNode {
    let verdict = c.check(r, delta);
    let splittable = r.lo() < r.mid() && r.mid() < r.hi();
    let children = if verdict == Verdict::Proven || depth >= max_depth || !splittable || c.refutes(r, delta) {
        *leaves += 1;
        Vec::new()
    } else {
        let (left, right) = r.bisect();
        vec![
            bisect(c, left, delta, depth + 1, max_depth, leaves),
            bisect(c, right, delta, depth + 1, max_depth, leaves),
        ]
    };
    TraceNode { interval: r, delta, verdict, children }
}

/// Outcome of [`sweep`]: one sample per grid point that could be certified,
/// and the reason for every point that could not.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutcome {
    pub samples: Vec<BoundSample>,
    pub failures: Vec<(f64, String)>,
}

/// [`find_delta_default`] at each degenerate interval `[r, r]` of `grid`,
/// in parallel. Output keeps grid order.
pub fn sweep(c: &dyn Certifier, grid: &[f64], precision: f64) -> SweepOutcome {
    let results: Vec<(f64, Result<BoundSample, String>)> = grid
        .par_iter()
        .map(|&r| {
            let res = Interval::new(r, r)
                .map_err(|e| e.to_string())
                .and_then(|iv| find_delta_default(c, iv, precision).map_err(|e| e.to_string()))
                .and_then(|v| BoundSample::new(r, v).map_err(|e| e.to_string()));
            (r, res)
        })
        .collect();
    let mut out = SweepOutcome::default();
    for (r, res) in results {
        match res {
            Ok(s) => out.samples.push(s),
            Err(e) => out.failures.push((r, e)),
        }
    }
    out
}
