//! Special functions and the radial eigenvalue problems.

pub mod bessel;
pub mod eigen;

pub use bessel::{bessel, i0e, i1e, j0, j1, k0e, k1e, y0, y1, BesselKind};
pub use eigen::{
    characteristic_value, find_eigenvalues, find_eigenvalues_with_step, spectrum, Characteristic,
    DomainCase, EigenProblem, Eigenmode, EigenvalueList,
};
