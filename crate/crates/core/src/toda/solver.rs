use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use super::problem::{verify_recession, TodaProblem};
use super::TodaError;
use crate::cone::ConeVerdict;
use crate::rootsys::{CartanVector, Root};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Iterate even when the precheck reports infeasibility.
    pub force_iterate: bool,
    pub cg_max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 200, force_iterate: false, cg_max_iter: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecheckReport {
    pub feasible: bool,
    pub closed_member: bool,
    pub boundary: bool,
    pub margin: f64,
    pub near_boundary: bool,
    pub rationalization_error: f64,
    pub cone: ConeVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub mean_balance: f64,
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    /// Spatial mean of `Ω` after each accepted step.
    pub mean_trace: Vec<Vec<f64>>,
    pub precheck: PrecheckReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recession_direction: Option<CartanVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recession_verified: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A Cartan-valued grid function, coroot coordinates, cell-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaState {
    pub grid: TorusGrid,
    pub dim: usize,
    pub omega: Vec<f64>,
}

impl TodaState {
    pub fn zeros(grid: TorusGrid, dim: usize) -> Self {
        TodaState { grid, dim, omega: vec![0.0; grid.cells() * dim] }
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (i, v) in self.omega.iter().enumerate() {
            m[i % self.dim] += v;
        }
        m.iter().map(|x| x / self.grid.cells() as f64).collect()
    }
}

const BOUNDARY_NOTE: &str = "boundary: mean source is in the closed but not the open cone; existence is undetermined";
const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
/// Largest per-entry change of `Ω` attempted in one step.
const MAX_STEP: f64 = 10.0;

/// Conjugate gradients for `H x = b` in `⟨·,·⟩_B`, on the kernel complement.
fn conjugate_gradient(
    p: &TodaProblem,
    weights: &[Vec<f64>],
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, TodaError> {
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut dir = r.clone();
    let mut rr = p.inner(&r, &r);
    if !rr.is_finite() {
        return Err(TodaError::LinearSolverBreakdown("non-finite right-hand side".into()));
    }
    let target = rel_tol * rel_tol * rr;
    for it in 0..max_iter {
        if rr <= target || rr == 0.0 {
            break;
        }
        let mut hd = p.hessian_with(weights, &dir);
        p.project_out_kernel(&mut hd);
        let curv = p.inner(&dir, &hd);
        if !curv.is_finite() || curv <= 0.0 {
            if it == 0 {
                return Ok(b.to_vec());
            }
            break;
        }
        let a = rr / curv;
        for i in 0..x.len() {
            x[i] += a * dir[i];
            r[i] -= a * hd[i];
        }
        p.project_out_kernel(&mut r);
        let rr_new = p.inner(&r, &r);
        let beta = rr_new / rr;
        for i in 0..dir.len() {
            dir[i] = r[i] + beta * dir[i];
        }
        rr = rr_new;
    }
    Ok(x)
}

/// Damped Newton with Armijo backtracking on the convex energy.
pub fn solve(p: &TodaProblem, opts: &SolveOptions) -> Result<(TodaState, SolveReport), TodaError> {
    solve_from(p, opts, TodaState::zeros(*p.grid(), p.dim()))
}

pub fn solve_from(
    p: &TodaProblem,
    opts: &SolveOptions,
    initial: TodaState,
) -> Result<(TodaState, SolveReport), TodaError> {
    if initial.omega.len() != p.len() {
        return Err(TodaError::StateShape { expected: p.len(), got: initial.omega.len() });
    }
    let pre = p.feasibility_precheck()?;
    let active: Vec<Root> = p.active_roots().cloned().collect();
    let recession_verified = pre
        .recession
        .as_ref()
        .map(|d| verify_recession(p.root_system(), &active, &pre.problem.target, d));
    let precheck = PrecheckReport {
        feasible: pre.feasible(),
        closed_member: pre.closed_member,
        boundary: pre.boundary(),
        margin: pre.margin,
        near_boundary: pre.near_boundary,
        rationalization_error: pre.rationalization_error,
        cone: pre.verdict.clone(),
    };
    let note = pre.boundary().then(|| BOUNDARY_NOTE.to_string());

    let mut state = initial;
    let mut report = SolveReport {
        verdict: Verdict::IterationLimit,
        residual: f64::NAN,
        mean_balance: f64::NAN,
        iterations: 0,
        energy_trace: Vec::new(),
        mean_trace: Vec::new(),
        precheck,
        recession_direction: pre.recession.clone(),
        recession_verified,
        note,
    };

    if !pre.feasible() && !opts.force_iterate {
        report.verdict = Verdict::Infeasible;
        report.residual = p.residual(&state.omega)?;
        report.mean_balance = p.mean_balance_check(&state.omega)?;
        report.energy_trace.push(p.energy(&state.omega)?);
        return Ok((state, report));
    }

    let mut energy = p.energy(&state.omega)?;
    report.energy_trace.push(energy);
    report.mean_trace.push(state.mean());
    loop {
        let grad = p.gradient(&state.omega)?;
        let residual = p.residual(&state.omega)?;
        report.residual = residual;
        if residual <= opts.tol {
            report.verdict = Verdict::Converged;
            break;
        }
        if report.iterations >= opts.max_iter {
            report.verdict = Verdict::IterationLimit;
            break;
        }

        let weights = p.weights(&state.omega)?;
        let mut g_perp = grad.clone();
        p.project_out_kernel(&mut g_perp);
        let g_norm = p.inner(&grad, &grad).sqrt();
        let rel_tol = g_norm.min(0.1).max(1e-12);
        let neg: Vec<f64> = g_perp.iter().map(|v| -v).collect();
        let mut dir = conjugate_gradient(p, &weights, &neg, rel_tol, opts.cg_max_iter)?;
        // The energy is affine along the kernel; descend there by the gradient.
        for i in 0..dir.len() {
            dir[i] -= grad[i] - g_perp[i];
        }
        let mut slope = p.inner(&grad, &dir);
        if !(slope < 0.0) {
            dir = grad.iter().map(|v| -v).collect();
            slope = -p.inner(&grad, &grad);
        }
        let longest = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if longest > MAX_STEP {
            let f = MAX_STEP / longest;
            dir.iter_mut().for_each(|v| *v *= f);
            slope *= f;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = state.omega.iter().zip(&dir).map(|(o, d)| o + t * d).collect();
            if let Ok(e) = p.energy(&trial) {
                if e <= energy + ARMIJO_SLOPE * t * slope {
                    accepted = Some((trial, e));
                    break;
                }
                // At round-off level accept a step that reduces the residual.
                if e <= energy + 1e-12 * energy.abs().max(1.0) {
                    if let Ok(res) = p.residual(&trial) {
                        if res < residual {
                            accepted = Some((trial, e));
                            break;
                        }
                    }
                }
            }
            t *= 0.5;
        }
        let Some((trial, e)) = accepted else {
            report.verdict = Verdict::IterationLimit;
            report.note.get_or_insert_with(|| "line search stalled".to_string());
            break;
        };
        state.omega = trial;
        energy = e;
        report.iterations += 1;
        report.energy_trace.push(energy);
        report.mean_trace.push(state.mean());
    }

    if report.verdict == Verdict::Converged {
        p.project_out_kernel(&mut state.omega);
        report.residual = p.residual(&state.omega)?;
    }
    report.mean_balance = p.mean_balance_check(&state.omega)?;
    Ok((state, report))
}
