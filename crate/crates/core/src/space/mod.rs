//! Grids, sampled fields and the modular / quasi-norm engine.

pub mod field;
pub mod grid;
pub mod norm;

pub use field::{conjugate, ess_bounds, ConjugateExponent, ExponentField, GridFunction, Regime, WeightField};
pub use grid::{build_grid, Endpoint, Grid, Interval, Scheme};
pub use norm::{
    conjugate_norm, indicator_sup_norm, integrate, modular, quasi_norm, DEFAULT_TOL,
};
