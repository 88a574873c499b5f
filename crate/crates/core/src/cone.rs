//! Exact membership tests for finitely generated cones, with certificates.
//!
//! * Closed cone `Σ ℚ≥0 g_a`: a nonnegative combination, or a functional
//!   `s` with `⟨s, g_a⟩ ≥ 0` for all `a` and `⟨s, t⟩ < 0`.
//! * Open cone `Σ ℚ>0 g_a` (the relative interior): a strictly positive
//!   combination, or `s` with `⟨s, g_a⟩ ≥ 0`, `⟨s, t⟩ ≤ 0` and at least one of
//!   those inequalities strict.
//!
//! The open test maximises `τ` subject to `Σ x_a g_a = t`, `x_a ≥ τ`,
//! `0 ≤ τ ≤ 1`. An empty generator list spans the cone `{0}` in both modes.
//! Everything runs in exact rationals; [`verify_certificate`] re-checks a
//! verdict without touching the LP code.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, dot, Rational};
use crate::rootsys::CartanVector;
use crate::simplex::{self, LpOutcome, StandardLp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("generator {index} has dimension {got}, target has {expected}")]
    Dimension { index: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeProblem {
    pub generators: Vec<CartanVector>,
    pub target: CartanVector,
}

impl ConeProblem {
    pub fn new(generators: Vec<CartanVector>, target: CartanVector) -> Result<Self, ConeError> {
        let p = ConeProblem { generators, target };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        let expected = self.target.dim();
        for (index, g) in self.generators.iter().enumerate() {
            if g.dim() != expected {
                return Err(ConeError::Dimension { index, expected, got: g.dim() });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    #[serde(with = "rational::serde_qvec")]
    pub coefficients: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationMode {
    RefutesClosed,
    RefutesOpen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    #[serde(with = "rational::serde_qvec")]
    pub functional: Vec<Rational>,
    pub mode: SeparationMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Membership(MembershipCertificate),
    Separation(SeparationCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeVerdict {
    /// `true` for the open cone, `false` for the closed cone.
    pub strict: bool,
    pub answer: bool,
    pub certificate: Certificate,
}

impl ConeVerdict {
    fn member(strict: bool, coefficients: Vec<Rational>) -> Self {
        ConeVerdict {
            strict,
            answer: true,
            certificate: Certificate::Membership(MembershipCertificate { coefficients }),
        }
    }

    fn separated(strict: bool, functional: Vec<Rational>, mode: SeparationMode) -> Self {
        ConeVerdict {
            strict,
            answer: false,
            certificate: Certificate::Separation(SeparationCertificate { functional, mode }),
        }
    }

    pub fn coefficients(&self) -> Option<&[Rational]> {
        match &self.certificate {
            Certificate::Membership(m) => Some(&m.coefficients),
            Certificate::Separation(_) => None,
        }
    }

    pub fn separator(&self) -> Option<&SeparationCertificate> {
        match &self.certificate {
            Certificate::Separation(s) => Some(s),
            Certificate::Membership(_) => None,
        }
    }
}

impl fmt::Display for ConeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.strict { "open" } else { "closed" };
        let join = |v: &[Rational]| v.iter().map(rational::format_rational).collect::<Vec<_>>().join(", ");
        match &self.certificate {
            Certificate::Membership(m) => write!(f, "{kind} member, coefficients [{}]", join(&m.coefficients)),
            Certificate::Separation(s) => write!(f, "{kind} non-member ({:?}), functional [{}]", s.mode, join(&s.functional)),
        }
    }
}

fn neg(v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| -x).collect()
}

fn generator_matrix(p: &ConeProblem) -> Vec<Vec<Rational>> {
    (0..p.dim())
        .map(|i| p.generators.iter().map(|g| g.0[i].clone()).collect())
        .collect()
}

/// Decides `target ∈ Σ ℚ≥0 g_a`.
pub fn closed_cone_member(p: &ConeProblem) -> ConeVerdict {
    let lp = StandardLp {
        a: generator_matrix(p),
        b: p.target.0.clone(),
        c: vec![Rational::zero(); p.generators.len()],
    };
    match simplex::solve(&lp) {
        LpOutcome::Optimal { x, .. } => ConeVerdict::member(false, x),
        // Gᵀy ≤ 0, tᵀy > 0, so s = −y separates.
        LpOutcome::Infeasible { y } => ConeVerdict::separated(false, neg(&y), SeparationMode::RefutesClosed),
        LpOutcome::Unbounded => unreachable!("feasibility problem has zero objective"),
    }
}

/// Decides `target ∈ Σ ℚ>0 g_a`.
pub fn open_cone_member(p: &ConeProblem) -> ConeVerdict {
    open_cone_member_with_depth(p).0
}

/// Like [`open_cone_member`], also returning the optimal depth
/// `τ* = max min_a x_a` (capped at 1) when the target is in the closed cone.
pub fn open_cone_member_with_depth(p: &ConeProblem) -> (ConeVerdict, Option<Rational>) {
    let d = p.dim();
    let k = p.generators.len();
    let sum: Vec<Rational> = (0..d)
        .map(|i| p.generators.iter().fold(Rational::zero(), |acc, g| acc + &g.0[i]))
        .collect();
    // Columns: z_1..z_k, τ, σ.
    let mut a = generator_matrix(p);
    for (i, row) in a.iter_mut().enumerate() {
        row.push(sum[i].clone());
        row.push(Rational::zero());
    }
    let mut cap = vec![Rational::zero(); k + 2];
    cap[k] = Rational::one();
    cap[k + 1] = Rational::one();
    a.push(cap);
    let mut b = p.target.0.clone();
    b.push(Rational::one());
    let mut c = vec![Rational::zero(); k + 2];
    c[k] = -Rational::one();

    match simplex::solve(&StandardLp { a, b, c }) {
        LpOutcome::Infeasible { y } => {
            let s = neg(&y[..d]);
            (ConeVerdict::separated(true, s, SeparationMode::RefutesClosed), None)
        }
        LpOutcome::Optimal { x, y, value } => {
            let tau = -value;
            debug_assert_eq!(tau, x[k]);
            if tau.is_positive() {
                let coeffs = x[..k].iter().map(|z| z + &tau).collect();
                (ConeVerdict::member(true, coeffs), Some(tau))
            } else {
                // σ = 1 is basic, so the cap row carries no dual weight and
                // s = −y satisfies ⟨s, g_a⟩ ≥ 0, Σ_a ⟨s, g_a⟩ ≥ 1, ⟨s, t⟩ = 0.
                let s = neg(&y[..d]);
                (ConeVerdict::separated(true, s, SeparationMode::RefutesOpen), Some(tau))
            }
        }
        LpOutcome::Unbounded => unreachable!("τ is capped"),
    }
}

/// Whether `Σ ℝ>0 g_a` is the whole `dim`-dimensional space.
pub fn cone_is_full(generators: &[CartanVector], dim: usize) -> bool {
    if generators.iter().any(|g| g.dim() != dim) {
        return false;
    }
    let vectors: Vec<Vec<Rational>> = generators.iter().map(|g| g.0.clone()).collect();
    if rational::rank(&vectors) != dim {
        return false;
    }
    let p = ConeProblem { generators: generators.to_vec(), target: CartanVector::zero(dim) };
    open_cone_member(&p).answer
}

/// Independent exact re-check of every certificate condition.
pub fn verify_certificate(p: &ConeProblem, v: &ConeVerdict) -> bool {
    if p.validate().is_err() {
        return false;
    }
    match (&v.certificate, v.answer) {
        (Certificate::Membership(m), true) => {
            if m.coefficients.len() != p.generators.len() {
                return false;
            }
            let sign_ok = m
                .coefficients
                .iter()
                .all(|x| if v.strict { x.is_positive() } else { !x.is_negative() });
            if !sign_ok {
                return false;
            }
            (0..p.dim()).all(|i| {
                let combo = m
                    .coefficients
                    .iter()
                    .zip(&p.generators)
                    .fold(Rational::zero(), |acc, (x, g)| acc + x * &g.0[i]);
                combo == p.target.0[i]
            })
        }
        (Certificate::Separation(s), false) => {
            if s.functional.len() != p.dim() {
                return false;
            }
            let on_gens: Vec<Rational> = p.generators.iter().map(|g| dot(&s.functional, &g.0)).collect();
            if on_gens.iter().any(Signed::is_negative) {
                return false;
            }
            let on_target = dot(&s.functional, &p.target.0);
            let closed_refuted = on_target.is_negative();
            match (s.mode, v.strict) {
                (SeparationMode::RefutesClosed, _) => closed_refuted,
                (SeparationMode::RefutesOpen, true) => {
                    !on_target.is_positive() && (closed_refuted || on_gens.iter().any(Signed::is_positive))
                }
                (SeparationMode::RefutesOpen, false) => false,
            }
        }
        _ => false,
    }
}
