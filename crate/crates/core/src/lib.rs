//! Eigenvalue inequalities for Dirichlet and clamped problems of Greiner-type
//! sub-Laplacians, with a lattice discretization to test them numerically.

pub mod couples;
pub mod discretization;
pub mod eigensolver;
pub mod geometry;
pub mod inequalities;
pub mod sparse;
pub mod trials;
