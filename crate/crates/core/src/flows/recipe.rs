use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::numerics::{Interval, MultiPoly, PolySystem};

/// Radius of a disc in a recipe: a unit disc or a disc of the running ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusSel {
    One,
    Ratio,
}

impl RadiusSel {
    pub fn radius(self, r: f64) -> f64 {
        match self {
            RadiusSel::One => 1.0,
            RadiusSel::Ratio => r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub unit: usize,
    pub ratio: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialGuess {
    pub r: f64,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RecipeKind {
    /// Discs added one at a time, each tangent to two earlier ones.
    /// Step `(i, j, sel)` is `stick(d_i, d_j, radius(sel))`.
    Sequential { seeds: Vec<(f64, f64, RadiusSel)>, steps: Vec<(usize, usize, RadiusSel)> },
    /// Disc positions given by a square polynomial system in `variables`
    /// with parameter `r`. `checks` must also vanish at every solution.
    Constrained {
        variables: Vec<String>,
        equations: Vec<String>,
        #[serde(default)]
        checks: Vec<String>,
        initial_guess: InitialGuess,
    },
}

/// A one-parameter family of periodic packings.
///
/// The lattice and the cell discs are polynomial expressions in the
/// recipe's coordinates and `r`. For sequential recipes the coordinates of
/// disc `k` are named `xk`, `yk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRecipe {
    pub name: String,
    pub valid_range: Interval,
    #[serde(flatten)]
    pub kind: RecipeKind,
    pub lattice: [[String; 2]; 2],
    pub cell: Vec<(String, String, RadiusSel)>,
    pub census: Census,
}

const BUILTIN: [(&str, &str); 2] = [
    ("flow-841-mid", include_str!("../../recipes/flow-841-mid.json")),
    ("flow-r6-1", include_str!("../../recipes/flow-r6-1.json")),
];

impl FlowRecipe {
    pub fn from_json(text: &str) -> Result<Self, FlowError> {
        let recipe: FlowRecipe = serde_json::from_str(text).map_err(|e| FlowError::Recipe(e.to_string()))?;
        recipe.compile()?;
        Ok(recipe)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recipes serialize")
    }

    pub fn load(path: &Path) -> Result<Self, FlowError> {
        let text = std::fs::read_to_string(path).map_err(|e| FlowError::Recipe(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| FlowError::Recipe(format!("{}: {e}", path.display())))
    }

    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_json(text).expect("built-in recipes are valid"))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    /// Names of the coordinates the lattice and cell expressions may use,
    /// `r` last.
    pub fn coordinate_names(&self) -> Vec<String> {
        let mut names = match &self.kind {
            RecipeKind::Sequential { seeds, steps } => {
                (0..seeds.len() + steps.len()).flat_map(|k| [format!("x{k}"), format!("y{k}")]).collect()
            }
            RecipeKind::Constrained { variables, .. } => variables.clone(),
        };
        names.push("r".into());
        names
    }

    pub(crate) fn compile(&self) -> Result<Compiled, FlowError> {
        let bad = |msg: String| Err(FlowError::Recipe(format!("{}: {msg}", self.name)));
        let names = self.coordinate_names();
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        let parse = |e: &str| {
            MultiPoly::parse(e, &vars).map_err(|err| FlowError::Recipe(format!("{}: `{e}`: {err}", self.name)))
        };

        let system = match &self.kind {
            RecipeKind::Sequential { seeds, steps } => {
                if seeds.is_empty() {
                    return bad("no seed discs".into());
                }
                for (k, &(i, j, _)) in steps.iter().enumerate() {
                    let idx = seeds.len() + k;
                    if i >= idx || j >= idx || i == j {
                        return bad(format!("step {idx} must reference two distinct earlier discs"));
                    }
                }
                None
            }
            RecipeKind::Constrained { variables, equations, checks, initial_guess } => {
                if variables.iter().any(|v| v == "r") {
                    return bad("`r` is the parameter, not a variable".into());
                }
                if equations.len() != variables.len() {
                    return bad(format!(
                        "{} equations in {} variables; the system must be square",
                        equations.len(),
                        variables.len()
                    ));
                }
                for v in variables {
                    if !initial_guess.values.contains_key(v) {
                        return bad(format!("initial guess lacks `{v}`"));
                    }
                }
                let eqs = equations.iter().map(|e| parse(e)).collect::<Result<Vec<_>, _>>()?;
                let checks = checks.iter().map(|e| parse(e)).collect::<Result<Vec<_>, _>>()?;
                let system = PolySystem::from_polys(variables.clone(), vec!["r".into()], eqs);
                let guess = variables.iter().map(|v| initial_guess.values[v]).collect();
                Some(ConstrainedParts { system, checks, guess })
            }
        };

        let lattice = [
            [parse(&self.lattice[0][0])?, parse(&self.lattice[0][1])?],
            [parse(&self.lattice[1][0])?, parse(&self.lattice[1][1])?],
        ];
        let cell = self
            .cell
            .iter()
            .map(|(x, y, sel)| Ok((parse(x)?, parse(y)?, *sel)))
            .collect::<Result<Vec<_>, FlowError>>()?;
        let unit = cell.iter().filter(|c| c.2 == RadiusSel::One).count();
        if (unit, cell.len() - unit) != (self.census.unit, self.census.ratio) {
            return bad(format!(
                "cell has {unit} unit and {} ratio discs, census says {} and {}",
                cell.len() - unit,
                self.census.unit,
                self.census.ratio
            ));
        }

        Ok(Compiled { lattice, cell, system })
    }
}

pub(crate) struct ConstrainedParts {
    pub system: PolySystem,
    pub checks: Vec<MultiPoly>,
    pub guess: Vec<f64>,
}

pub(crate) struct Compiled {
    pub lattice: [[MultiPoly; 2]; 2],
    pub cell: Vec<(MultiPoly, MultiPoly, RadiusSel)>,
    pub system: Option<ConstrainedParts>,
}
