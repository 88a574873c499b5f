use std::f64::consts::PI;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::grid::TorusGrid;
use super::{TodaError, EXPONENT_LIMIT};
use crate::cone::{self, Certificate, ConeProblem, ConeVerdict, SeparationMode};
use crate::higgs::{self, DiagonalHiggsDatum};
use crate::rational::{self, Rational};
use crate::rootsys::{CartanVector, Root, RootFunctional, RootSystem, RootSystemSpec};

pub const RATIONALIZE_DENOMINATOR: u64 = 1_000_000;

/// Precheck margins below this are flagged as near the cone boundary.
pub const NEAR_BOUNDARY: f64 = 1e-6;

#[derive(Debug, Clone)]
pub(crate) struct ActiveTerm {
    pub root: Root,
    pub coefficient: Vec<f64>,
    /// `α(h_i)` for the simple coroots.
    pub functional: Vec<f64>,
    /// `h_α` in coroot coordinates.
    pub coroot: Vec<f64>,
    /// `1 / B*(α, α)`.
    pub weight: f64,
}

impl ActiveTerm {
    fn alpha(&self, v: &[f64]) -> f64 {
        self.functional.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone)]
pub struct TodaProblem {
    rs: RootSystem,
    grid: TorusGrid,
    pub(crate) terms: Vec<ActiveTerm>,
    source: Vec<f64>,
    mean_source: Vec<f64>,
    killing: Vec<Vec<f64>>,
    /// Constant kernel directions, orthonormal for `⟨·,·⟩_B` over the torus.
    kernel: Vec<Vec<f64>>,
}

/// Validates shapes and coefficient admissibility and precomputes every
/// root-dependent constant.
pub fn assemble_problem(
    rs: RootSystem,
    active: Vec<(Root, Vec<f64>)>,
    source: Vec<f64>,
    grid: TorusGrid,
) -> Result<TodaProblem, TodaError> {
    grid.validate()?;
    let l = rs.rank();
    let cells = grid.cells();
    let mut terms: Vec<ActiveTerm> = Vec::with_capacity(active.len());
    for (root, coefficient) in active {
        if !rs.is_root(&root.0)? {
            return Err(crate::rootsys::RootSystemError::NotARoot(root).into());
        }
        if terms.iter().any(|t| t.root == root) {
            return Err(TodaError::DuplicateRoot(root));
        }
        if coefficient.len() != cells {
            return Err(TodaError::Shape {
                what: format!("coefficient of {root}"),
                expected: cells,
                got: coefficient.len(),
            });
        }
        if coefficient.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(TodaError::BadCoefficient(root));
        }
        if coefficient.iter().all(|&c| c == 0.0) {
            return Err(TodaError::InadmissibleCoefficient(root));
        }
        let functional = rs.functional(&root)?.0.iter().map(rational::to_f64).collect();
        let coroot = rs.coroot(&root)?.to_f64();
        let weight = 1.0 / rational::to_f64(&rs.root_norm(&root)?);
        terms.push(ActiveTerm { root, coefficient, functional, coroot, weight });
    }
    if source.len() != cells * l {
        return Err(TodaError::Shape { what: "source".into(), expected: cells * l, got: source.len() });
    }
    if source.iter().any(|v| !v.is_finite()) {
        return Err(TodaError::NonFiniteSource);
    }
    let killing: Vec<Vec<f64>> = rs
        .killing_matrix()
        .iter()
        .map(|row| row.iter().map(rational::to_f64).collect())
        .collect();
    let mut mean_source = vec![0.0; l];
    for cell in 0..cells {
        for k in 0..l {
            mean_source[k] += source[cell * l + k];
        }
    }
    for m in mean_source.iter_mut() {
        *m /= cells as f64;
    }

    let mut p = TodaProblem { rs, grid, terms, source, mean_source, killing, kernel: Vec::new() };
    p.kernel = p.kernel_basis();
    Ok(p)
}

impl TodaProblem {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.rs.rank()
    }

    pub fn len(&self) -> usize {
        self.grid.cells() * self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn active_roots(&self) -> impl Iterator<Item = &Root> {
        self.terms.iter().map(|t| &t.root)
    }

    pub fn coefficient(&self, root: &Root) -> Option<&[f64]> {
        self.terms.iter().find(|t| &t.root == root).map(|t| t.coefficient.as_slice())
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// `G = (Σ_cells F · area) / (L_x L_y)`.
    pub fn mean_source(&self) -> &[f64] {
        &self.mean_source
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    /// `B(u, v)` on coroot coordinates.
    pub fn bform(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, ui) in u.iter().enumerate() {
            if *ui == 0.0 {
                continue;
            }
            let row = &self.killing[i];
            s += ui * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
        s
    }

    /// `⟨V, W⟩_B = Σ_cells B(V, W) · area`.
    pub fn inner(&self, v: &[f64], w: &[f64]) -> f64 {
        let l = self.dim();
        let mut s = 0.0;
        for cell in 0..self.grid.cells() {
            s += self.bform(&v[cell * l..(cell + 1) * l], &w[cell * l..(cell + 1) * l]);
        }
        s * self.grid.cell_area()
    }

    fn check_state(&self, omega: &[f64]) -> Result<(), TodaError> {
        if omega.len() != self.len() {
            return Err(TodaError::StateShape { expected: self.len(), got: omega.len() });
        }
        Ok(())
    }

    /// `c_α(p) e^{2α(Ω(p))}` for every term and cell.
    pub(crate) fn weights(&self, omega: &[f64]) -> Result<Vec<Vec<f64>>, TodaError> {
        self.check_state(omega)?;
        let l = self.dim();
        self.terms
            .iter()
            .map(|t| {
                (0..self.grid.cells())
                    .map(|cell| {
                        let c = t.coefficient[cell];
                        let arg = 2.0 * t.alpha(&omega[cell * l..(cell + 1) * l]);
                        if arg.abs() > EXPONENT_LIMIT || !arg.is_finite() {
                            return Err(TodaError::ExponentOverflow { root: t.root.clone(), cell, arg });
                        }
                        Ok(if c == 0.0 { 0.0 } else { c * arg.exp() })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn energy(&self, omega: &[f64]) -> Result<f64, TodaError> {
        let weights = self.weights(omega)?;
        let l = self.dim();
        let mut total = 0.0;
        let mut dx = vec![0.0; l];
        let mut dy = vec![0.0; l];
        for cell in 0..self.grid.cells() {
            for k in 0..l {
                let (a, b) = self.grid.forward_diff(omega, l, cell, k);
                dx[k] = a;
                dy[k] = b;
            }
            let here = &omega[cell * l..(cell + 1) * l];
            let mut e = 0.5 * (self.bform(&dx, &dx) + self.bform(&dy, &dy));
            for (t, w) in self.terms.iter().zip(&weights) {
                e += t.weight * w[cell];
            }
            e -= self.bform(&self.source[cell * l..(cell + 1) * l], here);
            total += e;
        }
        Ok(total * self.grid.cell_area())
    }

    /// `Δ_h Ω + Σ_α c_α e^{2α(Ω)} h_α − F`, the `⟨·,·⟩_B` gradient of the energy.
    pub fn gradient(&self, omega: &[f64]) -> Result<Vec<f64>, TodaError> {
        let weights = self.weights(omega)?;
        let l = self.dim();
        let mut g = self.grid.laplacian(omega, l);
        for cell in 0..self.grid.cells() {
            for (t, w) in self.terms.iter().zip(&weights) {
                let w = w[cell];
                if w != 0.0 {
                    for k in 0..l {
                        g[cell * l + k] += w * t.coroot[k];
                    }
                }
            }
            for k in 0..l {
                g[cell * l + k] -= self.source[cell * l + k];
            }
        }
        Ok(g)
    }

    pub(crate) fn hessian_with(&self, weights: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        let l = self.dim();
        let mut out = self.grid.laplacian(v, l);
        for cell in 0..self.grid.cells() {
            let vc = &v[cell * l..(cell + 1) * l];
            for (t, w) in self.terms.iter().zip(weights) {
                let w = w[cell];
                if w == 0.0 {
                    continue;
                }
                let f = 2.0 * w * t.alpha(vc);
                for k in 0..l {
                    out[cell * l + k] += f * t.coroot[k];
                }
            }
        }
        out
    }

    /// `Δ_h V + Σ_α 2 c_α e^{2α(Ω)} α(V) h_α`.
    pub fn hessian_apply(&self, omega: &[f64], v: &[f64]) -> Result<Vec<f64>, TodaError> {
        self.check_state(v)?;
        let weights = self.weights(omega)?;
        Ok(self.hessian_with(&weights, v))
    }

    fn max_cell_norm(&self, g: &[f64]) -> f64 {
        let l = self.dim();
        (0..self.grid.cells())
            .map(|cell| {
                let c = &g[cell * l..(cell + 1) * l];
                self.bform(c, c).max(0.0).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Max over cells of the B-norm of the discrete equation's defect.
    pub fn residual(&self, omega: &[f64]) -> Result<f64, TodaError> {
        Ok(self.max_cell_norm(&self.gradient(omega)?))
    }

    /// B-norm of `Σ_cells (Σ_α c_α e^{2α(Ω)} h_α − F) · area`.
    pub fn mean_balance_check(&self, omega: &[f64]) -> Result<f64, TodaError> {
        let weights = self.weights(omega)?;
        let l = self.dim();
        let mut sum = vec![0.0; l];
        for cell in 0..self.grid.cells() {
            for (t, w) in self.terms.iter().zip(&weights) {
                for k in 0..l {
                    sum[k] += w[cell] * t.coroot[k];
                }
            }
            for k in 0..l {
                sum[k] -= self.source[cell * l + k];
            }
        }
        for s in sum.iter_mut() {
            *s *= self.grid.cell_area();
        }
        Ok(self.bform(&sum, &sum).max(0.0).sqrt())
    }

    /// Exact basis of `{d : α(d) = 0 ∀ active α}`, B-orthonormalised as constant fields.
    fn kernel_basis(&self) -> Vec<Vec<f64>> {
        let rows: Vec<Vec<Rational>> = self
            .terms
            .iter()
            .map(|t| self.rs.functional(&t.root).expect("validated root").0)
            .collect();
        let exact = rational::nullspace(&rows, self.dim());
        let area = self.grid.area();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in exact {
            let mut v: Vec<f64> = v.iter().map(rational::to_f64).collect();
            for b in &basis {
                let c = self.bform(&v, b) * area;
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            let norm = (self.bform(&v, &v) * area).sqrt();
            basis.push(v.iter().map(|x| x / norm).collect());
        }
        basis
    }

    /// Removes the `⟨·,·⟩_B`-projection of `v` onto the constant kernel.
    pub fn project_out_kernel(&self, v: &mut [f64]) {
        let l = self.dim();
        let cells = self.grid.cells();
        for k in &self.kernel {
            let mut sum = vec![0.0; l];
            for cell in 0..cells {
                for i in 0..l {
                    sum[i] += v[cell * l + i];
                }
            }
            let c = self.bform(&sum, k) * self.grid.cell_area();
            for cell in 0..cells {
                for i in 0..l {
                    v[cell * l + i] -= c * k[i];
                }
            }
        }
    }

    /// Rationalises `G` and tests it against the open cone of active coroots.
    pub fn feasibility_precheck(&self) -> Result<Precheck, TodaError> {
        let mut target = Vec::with_capacity(self.dim());
        let mut err = 0.0f64;
        for &g in &self.mean_source {
            let q = rational::rationalize(g, RATIONALIZE_DENOMINATOR).ok_or(TodaError::Rationalization(g))?;
            err = err.max((rational::to_f64(&q) - g).abs());
            target.push(q);
        }
        let generators: Vec<CartanVector> = self
            .terms
            .iter()
            .map(|t| self.rs.coroot(&t.root))
            .collect::<Result<_, _>>()?;
        let problem = ConeProblem { generators, target: CartanVector(target) };
        let (verdict, depth) = cone::open_cone_member_with_depth(&problem);
        let closed_member = match &verdict.certificate {
            Certificate::Membership(_) => true,
            Certificate::Separation(s) => s.mode == SeparationMode::RefutesOpen,
        };
        let margin = match (&verdict.certificate, &depth) {
            (Certificate::Membership(_), Some(t)) => rational::to_f64(t),
            (Certificate::Separation(s), _) => {
                let norm = s.functional.iter().map(|x| rational::to_f64(x).powi(2)).sum::<f64>().sqrt();
                rational::to_f64(&rational::dot(&s.functional, &problem.target.0)) / norm
            }
            (Certificate::Membership(_), None) => 0.0,
        };
        let recession = match &verdict.certificate {
            Certificate::Separation(s) => Some(
                self.rs
                    .dual_vector(&RootFunctional(s.functional.clone()))?
                    .neg(),
            ),
            Certificate::Membership(_) => None,
        };
        Ok(Precheck {
            near_boundary: margin.abs() < NEAR_BOUNDARY,
            verdict,
            problem,
            closed_member,
            margin,
            rationalization_error: err,
            recession,
        })
    }
}

/// Outcome of [`TodaProblem::feasibility_precheck`].
#[derive(Debug, Clone, Serialize)]
pub struct Precheck {
    pub verdict: ConeVerdict,
    /// Active coroots and the rationalised mean source.
    pub problem: ConeProblem,
    pub closed_member: bool,
    /// Depth `τ*` when feasible, otherwise the normalised pairing `⟨s, G⟩/|s|`.
    pub margin: f64,
    pub near_boundary: bool,
    pub rationalization_error: f64,
    /// `d = −B⁻¹ s` for the separator `s`, when infeasible.
    pub recession: Option<CartanVector>,
}

impl Precheck {
    pub fn feasible(&self) -> bool {
        self.verdict.answer
    }

    /// In the closed cone but not in the open one.
    pub fn boundary(&self) -> bool {
        !self.verdict.answer && self.closed_member
    }
}

/// Checks, exactly, that constants `t·d` do not increase any exponential
/// term, do not increase the source term, and strictly decrease one of them:
/// `α(d) ≤ 0` for all active `α`, `B(G, d) ≥ 0`, and `B(G, d) > 0` or some `α(d) < 0`.
pub fn verify_recession(rs: &RootSystem, active: &[Root], mean_source: &CartanVector, d: &CartanVector) -> bool {
    if d.dim() != rs.rank() || d.is_zero() {
        return false;
    }
    let mut strict = false;
    for a in active {
        let Ok(v) = rs.evaluate(a, d) else { return false };
        if v.is_positive() {
            return false;
        }
        strict |= v.is_negative();
    }
    let Ok(bg) = rs.killing_cartan(mean_source, d) else { return false };
    if bg.is_negative() {
        return false;
    }
    strict || !bg.is_zero()
}

/// Problem for a diagonal Higgs datum: type `A_{r−1}`, one active root per
/// arrow and the constant source `F = 2π(−γ)/(L_x L_y)`.
pub fn from_higgs_datum(
    d: &DiagonalHiggsDatum,
    grid: TorusGrid,
    coefficient: impl Fn(&Root) -> Vec<f64>,
) -> Result<TodaProblem, TodaError> {
    grid.validate()?;
    let r = d.rank();
    let rs = RootSystem::build(&RootSystemSpec::named("A", r - 1))?;
    let active = d
        .arrows()
        .iter()
        .map(|&(i, j)| {
            let root = higgs::arrow_root(i, j, r);
            let c = coefficient(&root);
            (root, c)
        })
        .collect();
    let minus_gamma: Vec<Rational> = higgs::gamma_of(d).neg().0;
    let scale = 2.0 * PI / grid.area();
    let f: Vec<f64> = higgs::diag_to_coroot(&minus_gamma).0.iter().map(|v| rational::to_f64(v) * scale).collect();
    let source: Vec<f64> = (0..grid.cells()).flat_map(|_| f.iter().copied()).collect();
    assemble_problem(rs, active, source, grid)
}
