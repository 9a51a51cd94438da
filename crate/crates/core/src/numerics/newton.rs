use nalgebra::{DMatrix, DVector};

use super::{NumericsError, PolySystem};

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    /// Target max-norm of the residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Step halvings tried per iteration before giving up.
    pub max_halvings: u32,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iterations: 100, max_halvings: 40 }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Damped Newton on a square system with the parameters fixed at `params`.
pub fn newton_solve(system: &PolySystem, params: &[f64], guess: &[f64], tol: f64) -> Result<Vec<f64>, NumericsError> {
    newton_solve_with(system, params, guess, &NewtonOptions { tol, ..Default::default() })
}

pub fn newton_solve_with(
    system: &PolySystem,
    params: &[f64],
    guess: &[f64],
    opts: &NewtonOptions,
) -> Result<Vec<f64>, NumericsError> {
    if !system.is_square() {
        return Err(NumericsError::Domain(format!(
            "Newton needs a square system, got {} equations in {} unknowns",
            system.equations().len(),
            system.unknowns().len()
        )));
    }
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut f = system.residual(&x, params);
    let mut norm = max_norm(&f);

    for _ in 0..opts.max_iterations {
        if norm <= opts.tol {
            return Ok(x);
        }
        let rows = system.jacobian(&x, params);
        let jac = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let lu = jac.lu();
        let scale = lu.u().diagonal().amax();
        let pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
        if !(pivot > 1e-14 * scale) {
            return Err(NumericsError::SingularJacobian);
        }
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let step = lu.solve(&rhs).ok_or(NumericsError::SingularJacobian)?;
        if step.iter().any(|s| !s.is_finite()) {
            return Err(NumericsError::SingularJacobian);
        }

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + lambda * si).collect();
            let f_trial = system.residual(&trial, params);
            let n_trial = max_norm(&f_trial);
            if n_trial < norm || n_trial <= opts.tol {
                x = trial;
                f = f_trial;
                norm = n_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= opts.tol {
        Ok(x)
    } else {
        Err(NumericsError::NoConvergence { iterations: opts.max_iterations, residual: norm })
    }
}
