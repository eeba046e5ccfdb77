//! Explicit solutions of the radially symmetric zero-pressure gas dynamics
//! system and its viscous (adhesion) regularisation.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Bessel functions and the transcendental eigenvalue problems
//!   of the bounded-domain heat operators.
//! - [`freespace`]: Hopf-Cole velocity and characteristic-traced density in
//!   `R^n`.
//! - [`radial`]: radial fields, the Hopf-Cole linearisation and PDE residuals.
//! - [`bounded`]: Green's-function series on balls and annuli.
//! - [`inviscid`]: the path-functional (Lax-Oleinik type) solution with data
//!   at the origin and a mass condition.
//! - [`shockfront`]: delta-shock detection and Rankine-Hugoniot residuals.
//! - [`oracles`]: independent reference solvers used by the tests.
//! - [`scenario`]: config-driven runs, reports and the bundled gallery.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod bounded;
pub mod error;
pub mod fd;
pub mod freespace;
pub mod inviscid;
pub mod ode;
pub mod oracles;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod radial;
pub mod scenario;
pub mod shockfront;
pub mod specfun;

pub use error::{Error, Result};
pub use profile::ScalarProfile;

/// Surface measure of the unit sphere in `R^n` (`2` for `n = 1`, counting the
/// two points `±1`).
pub fn sphere_measure(dim: u32) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}
