//! Existence tests for diagonal harmonic metrics on Higgs data that splits
//! into line bundles.
//!
//! * [`rootsys`]: finite root systems, the invariant form and coroots.
//! * [`cone`]: exact open/closed cone membership with verifiable certificates.
//! * [`higgs`]: degree vectors and arrow sets, coordinate (semi)stability,
//!   the dual character and the orbit criteria.
//! * [`toda`]: the reduced Toda-type equation on a flat torus, solved as a
//!   convex minimisation.
//! * [`cli`]: the `diagmetric` command-line front end.

pub mod rational;
pub mod rootsys;
mod simplex;
pub mod cone;
pub mod higgs;
pub mod scan;
pub mod toda;
pub mod io;
pub mod cli;

pub use cone::{ConeProblem, ConeVerdict};
pub use higgs::{DiagonalHiggsDatum, WeightVector};
pub use rational::Rational;
pub use rootsys::{CartanVector, Root, RootFunctional, RootSystem, RootSystemSpec};
