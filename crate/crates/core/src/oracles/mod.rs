//! Reference solvers that share no code with the series and path-functional
//! solutions: finite differences for the radial heat and viscous equations,
//! an exhaustive path minimiser and a sticky-particle simulator.

mod grid;
pub mod heat;
pub mod paths;
pub mod sticky;
pub mod viscous;

pub use grid::CellGrid;
pub use heat::{fd_heat_solve, HeatConfig, HeatSolution};
pub use paths::{brute_force_q, BruteForceMinimum};
pub use sticky::{sticky_particle_run, Particle, StickyRun};
pub use viscous::{fd_viscous_solve, BoundaryCondition, ViscousConfig};
