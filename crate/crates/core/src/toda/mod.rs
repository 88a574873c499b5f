//! The reduced Toda-type system
//!
//! ```text
//! Δ_h Ω + Σ_α c_α e^{2α(Ω)} h_α = F
//! ```
//!
//! for a Cartan-valued unknown `Ω` on a periodic grid, where `Δ_h` is the
//! geometric (nonnegative) 5-point Laplacian. It is the Euler–Lagrange
//! equation of the convex energy
//!
//! ```text
//! E(Ω) = Σ_cells [ ½ B(∇Ω, ∇Ω) + Σ_α c_α e^{2α(Ω)} / B*(α, α) − B(F, Ω) ] · area
//! ```
//!
//! and a minimiser exists exactly when the mean source `G` lies in the open
//! cone spanned by the active coroots. Cartan vectors are stored in
//! simple-coroot coordinates, flattened cell-major.

mod grid;
mod input;
mod problem;
mod solver;

pub use grid::{sample_preset, Preset, TorusGrid};
pub use input::{load_problem, FieldSpec, ProblemFile, SourceBasis};
pub use problem::{assemble_problem, from_higgs_datum, verify_recession, Precheck, TodaProblem, NEAR_BOUNDARY, RATIONALIZE_DENOMINATOR};
pub use solver::{solve, solve_from, PrecheckReport, SolveOptions, SolveReport, TodaState, Verdict};

use crate::rootsys::{Root, RootSystemError};

/// Arguments of `exp` beyond this magnitude abort the evaluation.
pub const EXPONENT_LIMIT: f64 = 700.0;

#[derive(Debug, thiserror::Error)]
pub enum TodaError {
    #[error("grid must be at least 4x4, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("grid periods must be finite and positive")]
    BadPeriod,
    #[error("{what}: expected {expected} values, got {got}")]
    Shape { what: String, expected: usize, got: usize },
    #[error("coefficient field of active root {0} vanishes identically")]
    InadmissibleCoefficient(Root),
    #[error("coefficient field of active root {0} has a negative or non-finite entry")]
    BadCoefficient(Root),
    #[error("active root {0} is listed twice")]
    DuplicateRoot(Root),
    #[error("source field has a non-finite entry")]
    NonFiniteSource,
    #[error("source is outside the coroot span: {0}")]
    OutsideCorootSpan(String),
    #[error("exponent 2α(Ω) = {arg:.3e} for root {root} at cell {cell} exceeds ±{EXPONENT_LIMIT}")]
    ExponentOverflow { root: Root, cell: usize, arg: f64 },
    #[error("cannot rationalise mean source component {0}")]
    Rationalization(f64),
    #[error("linear solver breakdown: {0}")]
    LinearSolverBreakdown(String),
    #[error("state has {got} values, problem needs {expected}")]
    StateShape { expected: usize, got: usize },
    #[error("invalid problem file: {0}")]
    Input(String),
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
