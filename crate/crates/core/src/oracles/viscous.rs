//! Finite-volume solver for the viscous radial system
//! `q_t + (q^2/2)_r = (eps/2)(q_rr + (n-1)/r q_r - (n-1)/r^2 q)`,
//! `p_t + (q p)_r = 0`.
//!
//! Strang splitting: half a Crank-Nicolson diffusion step, a full SSP-RK2
//! step of MUSCL advection (minmod slopes, Godunov flux for `q`, upwind
//! flux for `p`), and another half diffusion step. Mass changes only
//! through the boundary faces, so the discrete flux identity is exact.

use super::grid::CellGrid;
use crate::error::{Error, Result};
use crate::profile::ScalarProfile;
use crate::radial::RadialField;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// Constant velocity on the sphere.
    Velocity(f64),
    /// Velocity given as a function of time.
    Profile(ScalarProfile),
    /// Zero-gradient truncation of a large domain.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscousConfig {
    pub dim: u32,
    /// Zero for a ball (the centre is then a symmetry point with `q = 0`).
    pub r_inner: f64,
    pub r_outer: f64,
    pub epsilon: f64,
    pub cells: usize,
    /// Advective Courant number.
    pub cfl: f64,
    /// Ignored for balls.
    pub inner: BoundaryCondition,
    pub outer: BoundaryCondition,
    /// `p` entering through the inner sphere, as a function of time.
    pub p_inner: Option<ScalarProfile>,
    pub p_outer: Option<ScalarProfile>,
}

impl ViscousConfig {
    pub fn ball(
        dim: u32,
        radius: f64,
        epsilon: f64,
        cells: usize,
        outer: BoundaryCondition,
    ) -> Self {
        Self {
            dim,
            r_inner: 0.0,
            r_outer: radius,
            epsilon,
            cells,
            cfl: 0.4,
            inner: BoundaryCondition::Velocity(0.0),
            outer,
            p_inner: None,
            p_outer: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::Config("epsilon must be non-negative".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!(
                "Courant number {} outside the stable range (0, 0.5] of the MUSCL/SSP-RK2 scheme",
                self.cfl
            )));
        }
        Ok(())
    }
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

fn godunov(ql: f64, qr: f64) -> f64 {
    if ql <= qr {
        if ql > 0.0 {
            0.5 * ql * ql
        } else if qr < 0.0 {
            0.5 * qr * qr
        } else {
            0.0
        }
    } else {
        0.5 * ql.abs().max(qr.abs()).powi(2)
    }
}

struct Solver<'a> {
    cfg: &'a ViscousConfig,
    grid: CellGrid,
}

enum Edge {
    Symmetric,
    Dirichlet(f64),
    Open,
}

impl Solver<'_> {
    fn edge(&self, bc: &BoundaryCondition, t: f64, inner: bool) -> Edge {
        if inner && self.grid.ball {
            return Edge::Symmetric;
        }
        match bc {
            BoundaryCondition::Velocity(v) => Edge::Dirichlet(*v),
            BoundaryCondition::Profile(p) => Edge::Dirichlet(p.eval(t)),
            BoundaryCondition::Open => Edge::Open,
        }
    }

    fn edges(&self, t: f64) -> (Edge, Edge) {
        (
            self.edge(&self.cfg.inner, t, true),
            self.edge(&self.cfg.outer, t, false),
        )
    }

    /// Ghost value `k` cells outside (`k = 1, 2`) mirroring `q[edge_k]`.
    fn ghost(edge: &Edge, mirrored: f64) -> f64 {
        match edge {
            Edge::Symmetric => -mirrored,
            Edge::Dirichlet(v) => 2.0 * v - mirrored,
            Edge::Open => mirrored,
        }
    }

    fn face_velocity(edge: &Edge, interior: f64) -> f64 {
        match edge {
            Edge::Symmetric => 0.0,
            Edge::Dirichlet(v) => *v,
            Edge::Open => interior,
        }
    }

    fn advection_rhs(&self, q: &[f64], p: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = q.len();
        let h = self.grid.dr;
        let (ei, eo) = self.edges(t);
        // extended arrays with two ghosts each side
        let mut qe = Vec::with_capacity(n + 4);
        qe.push(Self::ghost(&ei, q[1]));
        qe.push(Self::ghost(&ei, q[0]));
        qe.extend_from_slice(q);
        qe.push(Self::ghost(&eo, q[n - 1]));
        qe.push(Self::ghost(&eo, q[n - 2]));
        let mut pe = Vec::with_capacity(n + 4);
        pe.extend([p[1], p[0]]);
        pe.extend_from_slice(p);
        pe.extend([p[n - 1], p[n - 2]]);
        let slope = |v: &[f64], j: usize| minmod(v[j] - v[j - 1], v[j + 1] - v[j]);
        // faces 0..=n; face f sits between cells f-1 and f
        let mut fq = vec![0.0; n + 1];
        let mut fp = vec![0.0; n + 1];
        for f in 0..=n {
            let jl = f + 1;
            let jr = f + 2;
            let ql = qe[jl] + 0.5 * slope(&qe, jl);
            let qr = qe[jr] - 0.5 * slope(&qe, jr);
            let pl = pe[jl] + 0.5 * slope(&pe, jl);
            let pr = pe[jr] - 0.5 * slope(&pe, jr);
            if f == 0 {
                let v = Self::face_velocity(&ei, q[0]);
                fq[f] = if matches!(ei, Edge::Open) {
                    godunov(ql, qr)
                } else {
                    0.5 * v * v
                };
                fp[f] = if v > 0.0 {
                    let pin = self.cfg.p_inner.as_ref().ok_or_else(|| {
                        Error::Config("inflow through the inner sphere needs p_inner".into())
                    })?;
                    v * pin.eval(t)
                } else {
                    v * pr
                };
            } else if f == n {
                let v = Self::face_velocity(&eo, q[n - 1]);
                fq[f] = if matches!(eo, Edge::Open) {
                    godunov(ql, qr)
                } else {
                    0.5 * v * v
                };
                fp[f] = if v < 0.0 {
                    let pout = self.cfg.p_outer.as_ref().ok_or_else(|| {
                        Error::Config("inflow through the outer sphere needs p_outer".into())
                    })?;
                    v * pout.eval(t)
                } else {
                    v * pl
                };
            } else {
                fq[f] = godunov(ql, qr);
                let v = 0.5 * (q[f - 1] + q[f]);
                fp[f] = if v >= 0.0 { v * pl } else { v * pr };
            }
        }
        let dq = (0..n).map(|i| -(fq[i + 1] - fq[i]) / h).collect();
        let dp = (0..n).map(|i| -(fp[i + 1] - fp[i]) / h).collect();
        Ok((dq, dp))
    }

    /// Crank-Nicolson step of length `dt` from `t` for the `q` diffusion.
    fn diffuse(&self, q: &[f64], t: f64, dt: f64) -> Vec<f64> {
        let nu = 0.5 * self.cfg.epsilon;
        if nu == 0.0 {
            return q.to_vec();
        }
        let n = q.len();
        let (mut op, gi, go) = self.grid.radial_operator(1.0);
        let constants = |t: f64| -> (f64, f64) {
            let (ei, eo) = self.edges(t);
            let c = |e: &Edge, g: f64| match e {
                Edge::Dirichlet(v) => 2.0 * v * g,
                _ => 0.0,
            };
            (c(&ei, gi), c(&eo, go))
        };
        let (ei, eo) = self.edges(t);
        let fold = |e: &Edge| match e {
            Edge::Symmetric | Edge::Dirichlet(_) => -1.0,
            Edge::Open => 1.0,
        };
        op.diag[0] += gi * fold(&ei);
        op.diag[n - 1] += go * fold(&eo);
        let (c0a, c1a) = constants(t);
        let (c0b, c1b) = constants(t + dt);
        let mut rhs = op.shifted(0.5 * nu * dt).apply(q);
        rhs[0] += 0.5 * nu * dt * (c0a + c0b);
        rhs[n - 1] += 0.5 * nu * dt * (c1a + c1b);
        op.shifted(-0.5 * nu * dt).solve(&rhs)
    }

    fn advect(&self, q: &[f64], p: &[f64], t: f64, dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (dq, dp) = self.advection_rhs(q, p, t)?;
        let q1: Vec<f64> = q.iter().zip(&dq).map(|(a, b)| a + dt * b).collect();
        let p1: Vec<f64> = p.iter().zip(&dp).map(|(a, b)| a + dt * b).collect();
        let (dq1, dp1) = self.advection_rhs(&q1, &p1, t + dt)?;
        let q2 = (0..q.len())
            .map(|i| 0.5 * (q[i] + q1[i] + dt * dq1[i]))
            .collect();
        let p2 = (0..p.len())
            .map(|i| 0.5 * (p[i] + p1[i] + dt * dp1[i]))
            .collect();
        Ok((q2, p2))
    }
}

/// Solves from `t = 0` and records the cell averages at each requested time
/// (which must be increasing and non-negative).
pub fn fd_viscous_solve(
    cfg: &ViscousConfig,
    q0: &ScalarProfile,
    p0: &ScalarProfile,
    times: &[f64],
) -> Result<RadialField> {
    cfg.validate()?;
    let grid = CellGrid::new(cfg.dim, cfg.r_inner, cfg.r_outer, cfg.cells)?;
    let mut field = RadialField::new(cfg.dim, cfg.epsilon, grid.centers.clone(), times.to_vec())?;
    let solver = Solver { cfg, grid };
    let centers = &solver.grid.centers;
    let h = solver.grid.dr;
    // cell averages of the initial data
    let avg = |f: &ScalarProfile, c: f64| f.integral(c - 0.5 * h, c + 0.5 * h) / h;
    let mut q: Vec<f64> = centers.iter().map(|&c| avg(q0, c)).collect();
    let mut p: Vec<f64> = centers.iter().map(|&c| avg(p0, c)).collect();
    let nr = centers.len();
    let mut t = 0.0;
    for (it, &target) in times.iter().enumerate() {
        while t < target {
            let vmax = q.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
            let mut dt = cfg.cfl * h / vmax;
            if t + dt > target {
                dt = target - t;
            }
            let qh = solver.diffuse(&q, t, 0.5 * dt);
            let (qa, pa) = solver.advect(&qh, &p, t, dt)?;
            q = solver.diffuse(&qa, t + 0.5 * dt, 0.5 * dt);
            p = pa;
            t = if t + dt >= target { target } else { t + dt };
            if q.iter().chain(&p).any(|v| !v.is_finite()) {
                return Err(Error::Integration {
                    at: t,
                    reason: "finite-volume solution blew up".into(),
                });
            }
        }
        field.q[it * nr..(it + 1) * nr].copy_from_slice(&q);
        field.p[it * nr..(it + 1) * nr].copy_from_slice(&p);
    }
    Ok(field)
}

/// Linear interpolation of `(q, p)` at radius `r` on time row `it`, clamped
/// to the cell centres.
pub fn interpolate(field: &RadialField, it: usize, r: f64) -> (f64, f64) {
    let nr = field.r.len();
    let k = field.r.partition_point(|&x| x <= r);
    if k == 0 {
        return (field.q_at(it, 0), field.p_at(it, 0));
    }
    if k >= nr {
        return (field.q_at(it, nr - 1), field.p_at(it, nr - 1));
    }
    let w = (r - field.r[k - 1]) / (field.r[k] - field.r[k - 1]);
    (
        field.q_at(it, k - 1) * (1.0 - w) + field.q_at(it, k) * w,
        field.p_at(it, k - 1) * (1.0 - w) + field.p_at(it, k) * w,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn godunov_flux_cases() {
        assert_eq!(godunov(1.0, 2.0), 0.5);
        assert_eq!(godunov(-2.0, -1.0), 0.5);
        assert_eq!(godunov(-1.0, 1.0), 0.0);
        assert_eq!(godunov(2.0, -3.0), 4.5);
        assert_eq!(godunov(2.0, -1.0), 2.0);
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let cfg = ViscousConfig::ball(3, 1.0, 0.1, 64, BoundaryCondition::Velocity(0.0));
        let f = fd_viscous_solve(
            &cfg,
            &ScalarProfile::constant(0.0),
            &ScalarProfile::constant(1.0),
            &[0.5, 1.0],
        )
        .unwrap();
        assert!(f.q.iter().all(|v| *v == 0.0));
        assert!(f.p.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn one_dimensional_linear_flow() {
        // u = x / (1 + t) solves viscous Burgers for every epsilon
        let l = 4.0;
        let cfg = ViscousConfig {
            outer: BoundaryCondition::Profile(
                ScalarProfile::piecewise_linear(
                    crate::radial::linspace(0.0, 3.0, 3001),
                    crate::radial::linspace(0.0, 3.0, 3001)
                        .iter()
                        .map(|t| l / (1.0 + t))
                        .collect(),
                )
                .unwrap(),
            ),
            ..ViscousConfig::ball(1, l, 0.2, 800, BoundaryCondition::Open)
        };
        let q0 = ScalarProfile::polynomial(vec![0.0, 1.0]).unwrap();
        let p0 = ScalarProfile::bump(1.0, 1.0, 1.0, 3).unwrap();
        let f = fd_viscous_solve(&cfg, &q0, &p0, &[1.0, 2.0]).unwrap();
        for (it, &t) in [1.0, 2.0].iter().enumerate() {
            for r in [0.5, 1.5, 3.0] {
                let (q, _) = interpolate(&f, it, r);
                assert!((q - r / (1.0 + t)).abs() < 1e-4, "t={t} r={r}: {q}");
            }
        }
    }

    #[test]
    fn discrete_mass_balance_is_exact() {
        let cfg = ViscousConfig {
            p_outer: Some(ScalarProfile::constant(0.3)),
            ..ViscousConfig::ball(2, 1.0, 0.1, 100, BoundaryCondition::Velocity(-0.2))
        };
        let q0 = ScalarProfile::polynomial(vec![0.0, -0.2]).unwrap();
        let p0 = ScalarProfile::polynomial(vec![0.0, 0.3]).unwrap();
        let f0 = fd_viscous_solve(&cfg, &q0, &p0, &[0.0, 0.5]).unwrap();
        let h = 1.0 / 100.0;
        let m = |it: usize| (0..100).map(|i| f0.p_at(it, i)).sum::<f64>() * h;
        // inflow at constant rate 0.2 * 0.3
        assert!((m(1) - m(0) - 0.5 * 0.2 * 0.3).abs() < 1e-12);
    }
}
