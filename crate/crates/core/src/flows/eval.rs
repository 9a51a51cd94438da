use super::recipe::{Compiled, FlowRecipe, RecipeKind};
use super::FlowError;
use crate::geometry::{stick, Disc, FundamentalDomain};
use crate::numerics::{newton_solve_with, NewtonOptions};

/// Continuation step in `r` for constrained recipes.
pub const CONTINUATION_STEP: f64 = 1e-3;
const MIN_STEP: f64 = 1e-9;
/// Overlap tolerance for every built packing.
pub const PACKING_TOL: f64 = 1e-9;
const CHECK_TOL: f64 = 1e-9;

/// Evaluates one recipe at any ratio in its valid range.
///
/// Constrained recipes are solved by continuation in `r` from the nearest
/// ratio already solved, starting with the recipe's initial guess. The solved
/// points are cached, so sweeping a grid in order costs one short
/// continuation per grid point. The cache makes evaluation `&mut self`;
/// concurrent sweeps should use one evaluator per r-range.
pub struct FlowEvaluator {
    recipe: FlowRecipe,
    compiled: Compiled,
    cache: Vec<(f64, Vec<f64>)>,
}

impl FlowEvaluator {
    pub fn new(recipe: FlowRecipe) -> Result<Self, FlowError> {
        let compiled = recipe.compile()?;
        let cache = match (&recipe.kind, &compiled.system) {
            (RecipeKind::Constrained { initial_guess, .. }, Some(parts)) => {
                vec![(initial_guess.r, parts.guess.clone())]
            }
            _ => Vec::new(),
        };
        Ok(Self { recipe, compiled, cache })
    }

    pub fn recipe(&self) -> &FlowRecipe {
        &self.recipe
    }

    pub fn name(&self) -> &str {
        &self.recipe.name
    }

    /// Number of solved points kept for continuation.
    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// The packing at ratio `r` and its density. The packing is checked for
    /// overlaps before it is returned.
    pub fn eval(&mut self, r: f64) -> Result<(FundamentalDomain, f64), FlowError> {
        let range = self.recipe.valid_range;
        if !range.contains(r) {
            return Err(FlowError::OutOfRange { r, lo: range.lo(), hi: range.hi() });
        }
        let coords = match &self.recipe.kind {
            RecipeKind::Sequential { seeds, steps } => {
                let mut discs: Vec<Disc> = seeds
                    .iter()
                    .map(|&(x, y, sel)| Disc::new(x, y, sel.radius(r)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| FlowError::NoSolution(e.to_string()))?;
                for &(i, j, sel) in steps {
                    let d = stick(&discs[i], &discs[j], sel.radius(r))
                        .map_err(|e| FlowError::NoSolution(format!("r = {r}: {e}")))?;
                    discs.push(d);
                }
                discs.iter().flat_map(|d| [d.x, d.y]).collect()
            }
            RecipeKind::Constrained { .. } => self.solve(r)?,
        };
        let domain = self.build(&coords, r)?;
        let bad = domain.validate(PACKING_TOL);
        if !bad.is_empty() {
            return Err(FlowError::InvalidPacking { r, overlaps: bad.len() });
        }
        let density = domain.density();
        Ok((domain, density))
    }

    fn build(&self, coords: &[f64], r: f64) -> Result<FundamentalDomain, FlowError> {
        let mut z = coords.to_vec();
        z.push(r);
        let l = &self.compiled.lattice;
        let u = [l[0][0].eval(&z), l[0][1].eval(&z)];
        let v = [l[1][0].eval(&z), l[1][1].eval(&z)];
        let discs = self
            .compiled
            .cell
            .iter()
            .map(|(x, y, sel)| Disc::new(x.eval(&z), y.eval(&z), sel.radius(r)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| FlowError::NoSolution(e.to_string()))?;
        FundamentalDomain::new(u, v, discs).map_err(|e| FlowError::NoSolution(e.to_string()))
    }

    fn solve(&mut self, r: f64) -> Result<Vec<f64>, FlowError> {
        let parts = self.compiled.system.as_ref().expect("constrained recipe");
        let opts = NewtonOptions::default();
        let nearest = self
            .cache
            .iter()
            .min_by(|a, b| (a.0 - r).abs().total_cmp(&(b.0 - r).abs()))
            .expect("cache holds the initial guess")
            .clone();
        if nearest.0 == r {
            return Ok(nearest.1);
        }

        let (mut r0, mut x0) = nearest;
        // previous point on the path, for the secant predictor
        let mut prev: Option<(f64, Vec<f64>)> = None;
        let dir = (r - r0).signum();
        let mut h = CONTINUATION_STEP;
        let mut fresh = Vec::new();
        while r0 != r {
            let r1 = if (r - r0).abs() <= h { r } else { r0 + dir * h };
            let guess: Vec<f64> = match &prev {
                Some((rp, xp)) => {
                    let t = (r1 - r0) / (r0 - rp);
                    x0.iter().zip(xp).map(|(a, b)| a + t * (a - b)).collect()
                }
                None => x0.clone(),
            };
            match newton_solve_with(&parts.system, &[r1], &guess, &opts) {
                Ok(x1) => {
                    prev = Some((r0, std::mem::replace(&mut x0, x1)));
                    r0 = r1;
                    fresh.push((r0, x0.clone()));
                    h = (2.0 * h).min(CONTINUATION_STEP);
                }
                Err(e) => {
                    h *= 0.5;
                    if h < MIN_STEP {
                        remember(&mut self.cache, fresh);
                        return Err(FlowError::NoSolution(format!(
                            "continuation of {} stalled at r = {r0}: {e}",
                            self.recipe.name
                        )));
                    }
                }
            }
        }
        let mut z = x0.clone();
        z.push(r);
        for c in &parts.checks {
            let v = c.eval(&z);
            if !(v.abs() <= CHECK_TOL) {
                return Err(FlowError::NoSolution(format!(
                    "{} at r = {r}: check equation has residual {v:e}",
                    self.recipe.name
                )));
            }
        }
        remember(&mut self.cache, fresh);
        Ok(x0)
    }
}

fn remember(cache: &mut Vec<(f64, Vec<f64>)>, points: Vec<(f64, Vec<f64>)>) {
    for p in points {
        match cache.binary_search_by(|c| c.0.total_cmp(&p.0)) {
            Ok(i) => cache[i] = p,
            Err(i) => cache.insert(i, p),
        }
    }
}

/// One-shot evaluation with a fresh evaluator.
pub fn eval_flow(recipe: &FlowRecipe, r: f64) -> Result<(FundamentalDomain, f64), FlowError> {
    FlowEvaluator::new(recipe.clone())?.eval(r)
}
