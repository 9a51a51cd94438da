use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{interstitial, r8, FlowError, FlowEvaluator, FlowRecipe};
use crate::geometry::FundamentalDomain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveTag {
    Lower,
    Upper,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub r: f64,
    #[serde(rename = "density")]
    pub value: f64,
    pub tag: CurveTag,
}

/// Samples of a bound on the maximal density, strictly increasing in `r`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CurveSample>", into = "Vec<CurveSample>")]
pub struct DensityCurve {
    samples: Vec<CurveSample>,
}

impl TryFrom<Vec<CurveSample>> for DensityCurve {
    type Error = FlowError;
    fn try_from(samples: Vec<CurveSample>) -> Result<Self, FlowError> {
        Self::new(samples)
    }
}

impl From<DensityCurve> for Vec<CurveSample> {
    fn from(c: DensityCurve) -> Self {
        c.samples
    }
}

impl DensityCurve {
    pub fn new(samples: Vec<CurveSample>) -> Result<Self, FlowError> {
        if let Some(w) = samples.windows(2).find(|w| !(w[0].r < w[1].r)) {
            return Err(FlowError::Curve(format!("r not strictly increasing at {} -> {}", w[0].r, w[1].r)));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with header `r,density,tag`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), FlowError> {
        let err = |e: csv::Error| FlowError::Curve(e.to_string());
        let mut wtr = csv::Writer::from_writer(w);
        for s in &self.samples {
            wtr.serialize(s).map_err(err)?;
        }
        if self.samples.is_empty() {
            wtr.write_record(["r", "density", "tag"]).map_err(err)?;
        }
        wtr.flush().map_err(|e| FlowError::Curve(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, FlowError> {
        let samples = csv::Reader::from_reader(r)
            .deserialize()
            .collect::<Result<Vec<CurveSample>, _>>()
            .map_err(|e| FlowError::Curve(e.to_string()))?;
        Self::new(samples)
    }
}

/// The constructions consulted by [`lower_bound_at`]: the unit hexagonal
/// packing and the interstitial packings are always present, flow recipes
/// are registered here.
pub struct Registry {
    flows: Vec<FlowEvaluator>,
}

impl Registry {
    pub fn empty() -> Self {
        Self { flows: Vec::new() }
    }

    /// Registry holding every built-in recipe.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for name in FlowRecipe::builtin_names() {
            reg.add(FlowRecipe::builtin(name).expect("listed")).expect("built-in recipes compile");
        }
        reg
    }

    pub fn add(&mut self, recipe: FlowRecipe) -> Result<(), FlowError> {
        self.flows.push(FlowEvaluator::new(recipe)?);
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.flows.iter().map(|f| f.name()).collect()
    }

    pub fn flow_mut(&mut self, name: &str) -> Option<&mut FlowEvaluator> {
        self.flows.iter_mut().find(|f| f.name() == name)
    }
}

/// Best known packing at one ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub r: f64,
    pub value: f64,
    pub source: String,
    pub domain: FundamentalDomain,
}

/// Densest of the registered constructions at `r`. Flows that fail at `r`
/// (no solution, overlaps, out of range) are skipped.
pub fn lower_bound_at(r: f64, registry: &mut Registry) -> Result<LowerBound, FlowError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(FlowError::Domain(format!("ratio {r} outside (0, 1)")));
    }
    let hex = FundamentalDomain::hexagonal(1.0);
    let mut best = LowerBound { r, value: hex.density(), source: "hexagonal".into(), domain: hex };
    let mut consider = |value: f64, source: &str, domain: FundamentalDomain| {
        if value > best.value {
            best = LowerBound { r, value, source: source.into(), domain };
        }
    };
    if r <= r8() {
        let (dom, d) = interstitial(r)?;
        consider(d, "interstitial", dom);
    }
    for flow in &mut registry.flows {
        if flow.recipe().valid_range.contains(r) {
            if let Ok((dom, d)) = flow.eval(r) {
                let name = flow.name().to_string();
                consider(d, &name, dom);
            }
        }
    }
    Ok(best)
}

/// [`lower_bound_at`] on every grid point, tagged `lower`.
pub fn lower_bound_curve(grid: &[f64], registry: &mut Registry) -> Result<DensityCurve, FlowError> {
    let samples = grid
        .iter()
        .map(|&r| lower_bound_at(r, registry).map(|b| CurveSample { r, value: b.value, tag: CurveTag::Lower }))
        .collect::<Result<Vec<_>, _>>()?;
    DensityCurve::new(samples)
}
