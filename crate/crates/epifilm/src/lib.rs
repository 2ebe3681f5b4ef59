//! Simulator for locally minimal-energy configurations of an epitaxially
//! strained elastic film containing dislocations.
//!
//! The model couples three ingredients over one period of a free film
//! profile on a rigid substrate:
//!
//! - curl-constrained linear elasticity: the film strain `H` carries a
//!   prescribed curl equal to a mollified dislocation measure, split as
//!   `H = e0*Du + Dv + K` (mismatch equilibrium, corrector, analytic
//!   singular field);
//! - relaxed surface energy: graph length plus vertical walls, with
//!   vertical cuts below the graph counted twice;
//! - dislocation nucleation energy proportional to squared Burgers norms.
//!
//! The crate provides the geometry kernel ([`geometry`]), the dislocation
//! measure and mollifier ([`dislocations`]), a periodic boundary-fitted
//! finite element solver ([`mesh`], [`sparse`], [`elasticity`]), the energy
//! functionals ([`energy`]), an alternating minimizer with dislocation
//! nucleation ([`optimizer`]), corner-singularity exponents ([`corner`]),
//! independent validation oracles ([`validation`]), and a batch experiment
//! driver ([`config`], [`driver`]) behind the `epifilm` binary.
//!
//! All numeric paths are deterministic: no threads, no hash-ordering, no
//! clocks; identical inputs produce byte-identical result files.

pub mod config;
pub mod corner;
pub mod dislocations;
pub mod driver;
pub mod elasticity;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod optimizer;
pub mod sparse;
pub mod validation;

pub use error::{Error, Result};
