//! Radial viscous solutions on balls and annuli with constant boundary
//! velocities.
//!
//! The Hopf-Cole potential `a` solves the radial heat equation with Robin
//! data `eps a_r + q_i a = 0`; it is expanded in the eigenmodes of
//! [`crate::specfun`], `a = sum c_j A_j phi_j(r) exp(-eps sigma_j t / 2)`,
//! with projections `A_j = int xi^{n-1} phi_j(xi) w(xi) dxi` of the initial
//! datum `w = exp(-(1/eps) int_0^xi q0)`. The mode list includes the zero
//! and growing modes that appear for some boundary signs.
//!
//! Below the time floor `1e-3 * 2 L^2 / eps` the series needs too many
//! terms; there the velocity comes from a Crank-Nicolson solution of the
//! same heat problem.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::oracles::{fd_heat_solve, HeatConfig, HeatSolution};
use crate::profile::ScalarProfile;
use crate::quad::GaussLegendre;
use crate::radial::{HopfColeState, RadialField};
use crate::specfun::{spectrum, DomainCase, EigenProblem, Eigenmode};
use crate::sphere_measure;

/// Boundary-value problem on a ball (`r_inner = 0`) or an annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedProblem {
    pub case: DomainCase,
    pub r_inner: f64,
    pub r_outer: f64,
    pub epsilon: f64,
    pub q0: ScalarProfile,
    pub rho0: ScalarProfile,
    /// Velocity on the inner sphere (unused for balls).
    pub q_inner: f64,
    pub q_outer: f64,
    /// Density entering through the inner sphere, as a function of time;
    /// required exactly when `q_inner > 0`.
    pub rho_inner: Option<ScalarProfile>,
    /// Required exactly when `q_outer < 0`.
    pub rho_outer: Option<ScalarProfile>,
}

/// Which sphere a characteristic came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

impl BoundedProblem {
    pub fn ball(
        dim: u32,
        radius: f64,
        epsilon: f64,
        q0: ScalarProfile,
        rho0: ScalarProfile,
        q_b: f64,
        rho_b: Option<ScalarProfile>,
    ) -> Result<Self> {
        let case = match dim {
            2 => DomainCase::Ball2D,
            3 => DomainCase::Ball3D,
            _ => {
                return Err(Error::Invalid(format!(
                    "ball dimension must be 2 or 3, got {dim}"
                )))
            }
        };
        let p = Self {
            case,
            r_inner: 0.0,
            r_outer: radius,
            epsilon,
            q0,
            rho0,
            q_inner: 0.0,
            q_outer: q_b,
            rho_inner: None,
            rho_outer: rho_b,
        };
        p.validate()?;
        Ok(p)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn annulus(
        dim: u32,
        r1: f64,
        r2: f64,
        epsilon: f64,
        q0: ScalarProfile,
        rho0: ScalarProfile,
        (q1, q2): (f64, f64),
        (rho1, rho2): (Option<ScalarProfile>, Option<ScalarProfile>),
    ) -> Result<Self> {
        let case = match dim {
            2 => DomainCase::Annulus2D,
            3 => DomainCase::Annulus3D,
            _ => {
                return Err(Error::Invalid(format!(
                    "annulus dimension must be 2 or 3, got {dim}"
                )))
            }
        };
        let p = Self {
            case,
            r_inner: r1,
            r_outer: r2,
            epsilon,
            q0,
            rho0,
            q_inner: q1,
            q_outer: q2,
            rho_inner: rho1,
            rho_outer: rho2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> u32 {
        self.case.dim()
    }

    pub fn is_ball(&self) -> bool {
        self.case.is_ball()
    }

    pub fn length(&self) -> f64 {
        self.r_outer - self.r_inner
    }

    pub fn inflow(&self, side: Side) -> bool {
        match side {
            Side::Inner => !self.is_ball() && self.q_inner > 0.0,
            Side::Outer => self.q_outer < 0.0,
        }
    }

    fn boundary_radius(&self, side: Side) -> f64 {
        match side {
            Side::Inner => self.r_inner,
            Side::Outer => self.r_outer,
        }
    }

    fn boundary_velocity(&self, side: Side) -> f64 {
        match side {
            Side::Inner => self.q_inner,
            Side::Outer => self.q_outer,
        }
    }

    fn boundary_density(&self, side: Side) -> Option<&ScalarProfile> {
        match side {
            Side::Inner => self.rho_inner.as_ref(),
            Side::Outer => self.rho_outer.as_ref(),
        }
    }

    fn sides(&self) -> &'static [Side] {
        if self.is_ball() {
            &[Side::Outer]
        } else {
            &[Side::Inner, Side::Outer]
        }
    }

    pub fn eigen_problem(&self) -> Result<EigenProblem> {
        let (k1, k2) = (self.q_inner / self.epsilon, self.q_outer / self.epsilon);
        if self.is_ball() {
            EigenProblem::ball(self.dim(), self.r_outer, k2)
        } else {
            EigenProblem::annulus(self.dim(), self.r_inner, self.r_outer, k1, k2)
        }
    }

    /// Checks geometry, the boundary-density sign rule and first-order
    /// consistency of the data at the corners `(R_i, 0)`.
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        if self.is_ball() {
            if self.r_inner != 0.0 || !(self.r_outer > 0.0) {
                return Err(Error::Invalid("ball needs r_inner = 0 < R".into()));
            }
        } else if !(self.r_inner > 0.0 && self.r_outer > self.r_inner) {
            return Err(Error::Invalid("annulus needs 0 < R1 < R2".into()));
        }
        for &side in self.sides() {
            let name = if side == Side::Inner {
                "inner"
            } else {
                "outer"
            };
            let needs = self.inflow(side);
            let has = self.boundary_density(side).is_some();
            if needs != has {
                return Err(Error::Invalid(format!(
                    "{name} boundary density must be given exactly when mass flows in there (q = {})",
                    self.boundary_velocity(side)
                )));
            }
            let r = self.boundary_radius(side);
            let q = self.boundary_velocity(side);
            let gap = (self.q0.eval_left(r) - q)
                .abs()
                .min((self.q0.eval(r) - q).abs());
            if gap > 1e-8 * q.abs().max(1.0) {
                return Err(Error::Invalid(format!(
                    "initial velocity {} at r = {r} is inconsistent with the boundary velocity {q}",
                    self.q0.eval_left(r)
                )));
            }
            if let Some(rho_b) = self.boundary_density(side) {
                let d = self.rho0.eval_left(r).min(self.rho0.eval(r));
                let gap = (self.rho0.eval_left(r) - rho_b.eval(0.0))
                    .abs()
                    .min((d - rho_b.eval(0.0)).abs());
                if gap > 1e-8 * rho_b.eval(0.0).abs().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "initial density at r = {r} is inconsistent with the boundary density"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `p0 = r^{n-1} rho0`.
    fn p0(&self, r: f64) -> f64 {
        r.powi(self.dim() as i32 - 1) * self.rho0.eval(r)
    }
}

/// Truncated Green's-function series for the Robin heat problem.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    pub problem: EigenProblem,
    pub epsilon: f64,
    modes: Vec<Eigenmode>,
}

impl GreenEvaluator {
    /// All non-positive modes plus `positive_count` positive ones.
    pub fn new(problem: EigenProblem, epsilon: f64, positive_count: usize) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        let modes = spectrum(&problem, positive_count)?;
        Ok(Self {
            problem,
            epsilon,
            modes,
        })
    }

    pub fn modes(&self) -> &[Eigenmode] {
        &self.modes
    }

    fn decay(&self, mode: &Eigenmode, t: f64) -> f64 {
        (-0.5 * self.epsilon * mode.sigma * t).exp()
    }

    /// `G(r, xi, t)` and `dG/dr`, summed until the remaining terms fall
    /// below `1e-16` of the partial sum.
    pub fn green_with_derivative(&self, r: f64, xi: f64, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "Green's function needs t > 0, got {t}"
            )));
        }
        let w = xi.powi(self.problem.dim() as i32 - 1);
        let (mut g, mut gr) = (0.0f64, 0.0f64);
        for (j, m) in self.modes.iter().enumerate() {
            let e = self.decay(m, t);
            let bound = m.coefficient * m.sup * m.sup * w * e * (1.0 + m.sigma.abs().sqrt());
            if m.sigma > 0.0 && bound < 1e-16 * g.abs().max(gr.abs()) {
                break;
            }
            let (v, d) = m.value_and_derivative(r);
            let s = m.coefficient * m.value(xi) * w * e;
            g += s * v;
            gr += s * d;
            if j + 1 == self.modes.len() && bound > 1e-10 * g.abs().max(1e-300) {
                return Err(Error::Truncation {
                    t,
                    suggested: 2 * self.modes.len(),
                });
            }
        }
        Ok((g, gr))
    }

    pub fn green(&self, r: f64, xi: f64, t: f64) -> Result<f64> {
        Ok(self.green_with_derivative(r, xi, t)?.0)
    }
}

/// Numerical parameters of a bounded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedOptions {
    /// Positive modes kept in the series.
    pub terms: usize,
    /// Series floor as a fraction of `2 L^2 / eps`.
    pub floor_fraction: f64,
    pub fd_cells: usize,
    pub fd_steps: usize,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        Self {
            terms: 200,
            floor_fraction: 1e-3,
            fd_cells: 2000,
            fd_steps: 400,
        }
    }
}

/// Where a backward characteristic met the boundary of the space-time
/// domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    pub t0: f64,
    pub r0: f64,
    /// `None` when the foot is on `t = 0`.
    pub side: Option<Side>,
    /// `-int_{t0}^{t} q_r(beta(s), s) ds`.
    pub log_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub mass: f64,
    pub error: f64,
}

/// Series solution with precomputed projections.
#[derive(Debug, Clone)]
pub struct BoundedSolution {
    pub problem: BoundedProblem,
    pub options: BoundedOptions,
    pub green: GreenEvaluator,
    /// `c_j A_j` per mode.
    amplitudes: Vec<f64>,
    sigma0: f64,
    t_floor: f64,
    early: HeatSolution,
}

impl BoundedSolution {
    pub fn new(problem: BoundedProblem, options: BoundedOptions) -> Result<Self> {
        problem.validate()?;
        let eig = problem.eigen_problem()?;
        let green = GreenEvaluator::new(eig, problem.epsilon, options.terms)?;
        let eps = problem.epsilon;
        let (lo, hi) = (problem.r_inner, problem.r_outer);
        let l = problem.length();
        // quadrature nodes resolving the fastest retained mode and the
        // breaks of q0
        let kmax = green.modes().last().map_or(1.0, |m| m.sigma.abs().sqrt());
        let width = (1.0 / kmax).min(l / 64.0);
        let mut cuts = vec![lo];
        cuts.extend(
            problem
                .q0
                .breaks()
                .iter()
                .cloned()
                .filter(|b| *b > lo && *b < hi),
        );
        cuts.push(hi);
        let rule = GaussLegendre::new(12);
        let mut nodes: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let panels = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let a = w[0] + k as f64 * h;
                nodes.extend(rule.mapped(a, a + h));
            }
        }
        let phi: Vec<f64> = nodes
            .iter()
            .map(|(x, _)| problem.q0.integral(0.0, *x))
            .collect();
        let phi_min = phi
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .min(problem.q0.integral(0.0, lo));
        let n1 = problem.dim() as i32 - 1;
        let weights: Vec<f64> = nodes
            .iter()
            .zip(&phi)
            .map(|((x, wq), f)| wq * x.powi(n1) * (-(f - phi_min) / eps).exp())
            .collect();
        let amplitudes: Vec<f64> = green
            .modes()
            .par_iter()
            .map(|m| {
                let a: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|((x, _), w)| w * m.value(*x))
                    .sum();
                m.coefficient * a
            })
            .collect();
        let sigma0 = green.modes()[0].sigma;
        let t_floor = options.floor_fraction * 2.0 * l * l / eps;
        let q0 = problem.q0.clone();
        let early = fd_heat_solve(
            &HeatConfig {
                dim: problem.dim(),
                r_inner: lo,
                r_outer: hi,
                k_inner: problem.q_inner / eps,
                k_outer: problem.q_outer / eps,
                epsilon: eps,
                cells: options.fd_cells,
                steps: options.fd_steps,
            },
            move |r| (-(q0.integral(0.0, r) - phi_min) / eps).exp(),
            t_floor,
        )?;
        Ok(Self {
            problem,
            options,
            green,
            amplitudes,
            sigma0,
            t_floor,
            early,
        })
    }

    /// Time below which the finite-difference field replaces the series.
    pub fn t_floor(&self) -> f64 {
        self.t_floor
    }

    /// `(a, a_r, a_rr)` scaled by `exp(eps sigma_0 t / 2)`.
    fn scaled_sums(&self, r: f64, t: f64) -> Result<[f64; 3]> {
        let eps = self.problem.epsilon;
        let mut s = [0.0f64; 3];
        let modes = self.green.modes();
        for (j, (m, amp)) in modes.iter().zip(&self.amplitudes).enumerate() {
            let e = (-0.5 * eps * (m.sigma - self.sigma0) * t).exp();
            let bound = amp.abs() * m.sup * e * (1.0 + m.sigma.abs());
            if m.sigma > 0.0 && bound < 1e-17 * s[0].abs() {
                break;
            }
            let (v, d) = m.value_and_derivative(r);
            let dd = m.second_derivative(r, v, d);
            s[0] += amp * e * v;
            s[1] += amp * e * d;
            s[2] += amp * e * dd;
            if j + 1 == modes.len() && bound > 1e-10 * s[0].abs() {
                return Err(Error::Truncation {
                    t,
                    suggested: 2 * self.options.terms,
                });
            }
        }
        if !(s[0] > 0.0) {
            return Err(Error::Truncation {
                t,
                suggested: 2 * self.options.terms,
            });
        }
        Ok(s)
    }

    /// Hopf-Cole potential `a(r, t)` from the series (no time scaling).
    pub fn hopf_cole(&self, r: f64, t: f64) -> Result<f64> {
        let s = self.scaled_sums(r, t)?;
        Ok(s[0] * (-0.5 * self.problem.epsilon * self.sigma0 * t).exp())
    }

    /// `a` sampled on a grid, for residual studies.
    pub fn hopf_cole_state(&self, r: Vec<f64>, t: Vec<f64>) -> Result<HopfColeState> {
        HopfColeState::from_fn(self.problem.dim(), self.problem.epsilon, r, t, |r, t| {
            self.hopf_cole(r, t)
        })
    }

    /// `(q, q_r)`; the series is used at and above the time floor.
    pub fn velocity_and_derivative(&self, r: f64, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("velocity needs t > 0, got {t}")));
        }
        if t < self.t_floor {
            return Ok(self.early.velocity(r, t));
        }
        let eps = self.problem.epsilon;
        let [a, ar, arr] = self.scaled_sums(r, t)?;
        let l1 = ar / a;
        Ok((-eps * l1, -eps * (arr / a - l1 * l1)))
    }

    pub fn velocity(&self, r: f64, t: f64) -> Result<f64> {
        Ok(self.velocity_and_derivative(r, t)?.0)
    }

    /// One-mode limit `-eps phi_1'/phi_1` of the lowest mode.
    pub fn large_time_velocity(&self, r: f64) -> f64 {
        let m = &self.green.modes()[0];
        let (v, d) = m.value_and_derivative(r);
        -self.problem.epsilon * d / v
    }

    /// Spectral gap `sigma_2 - sigma_1` of the retained modes.
    pub fn spectral_gap(&self) -> f64 {
        let m = self.green.modes();
        m[1].sigma - m[0].sigma
    }

    /// Backward characteristic from `(r, t)` to the space-time boundary.
    pub fn trace(&self, r: f64, t: f64) -> Result<Foot> {
        let p = &self.problem;
        let (lo, hi) = (p.r_inner, p.r_outer);
        if !(r >= lo && r <= hi) {
            return Err(Error::Domain(format!("r = {r} outside [{lo}, {hi}]")));
        }
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t} is negative")));
        }
        // starting on an inflow sphere: the boundary datum applies directly
        for &side in p.sides() {
            if p.inflow(side) && r == p.boundary_radius(side) && t > 0.0 {
                return Ok(Foot {
                    t0: t,
                    r0: r,
                    side: Some(side),
                    log_factor: 0.0,
                });
            }
        }
        let slack = 1e-12 * hi;
        let ball = p.is_ball();
        let event = move |_s: f64, y: &[f64]| {
            let out = hi + slack - y[0];
            if ball {
                out
            } else {
                out.min(y[0] - (lo - slack))
            }
        };
        let ode = Dopri5 {
            rtol: 1e-9,
            atol: 1e-11,
            ..Default::default()
        };
        let mut state = vec![r, 0.0];
        let mut s = t;
        let segments = if t > self.t_floor {
            vec![self.t_floor, 0.0]
        } else {
            vec![0.0]
        };
        for end in segments {
            let tr = ode.solve_with_event(
                |s, y, d| {
                    let (q, qr) = self.velocity_and_derivative(
                        y[0].clamp(lo.max(1e-300 * hi), hi),
                        s.max(1e-300),
                    )?;
                    d[0] = q;
                    d[1] = qr;
                    Ok(())
                },
                s,
                &state,
                end,
                event,
            )?;
            state = tr.y;
            s = tr.t;
            if tr.event {
                let side = if ball || (state[0] - lo).abs() > (state[0] - hi).abs() {
                    Side::Outer
                } else {
                    Side::Inner
                };
                if !p.inflow(side) {
                    return Err(Error::DataInsufficient { r, t });
                }
                return Ok(Foot {
                    t0: s,
                    r0: p.boundary_radius(side),
                    side: Some(side),
                    log_factor: state[1],
                });
            }
        }
        Ok(Foot {
            t0: 0.0,
            r0: state[0].clamp(lo, hi),
            side: None,
            log_factor: state[1],
        })
    }

    /// `p = r^{n-1} rho` at `(r, t)`.
    pub fn p(&self, r: f64, t: f64) -> Result<f64> {
        let prob = &self.problem;
        if t == 0.0 {
            return Ok(prob.p0(r));
        }
        let foot = self.trace(r, t)?;
        let base = match foot.side {
            None => prob.p0(foot.r0),
            Some(side) => {
                let rb = prob.boundary_radius(side);
                let rho = prob
                    .boundary_density(side)
                    .ok_or(Error::DataInsufficient { r, t })?
                    .eval(foot.t0);
                rb.powi(prob.dim() as i32 - 1) * rho
            }
        };
        Ok(base * foot.log_factor.exp())
    }

    /// Density `rho = r^{-(n-1)} p`; at the centre of a ball the transport
    /// equation `d rho/ds = -n q_r rho` is integrated instead.
    pub fn density(&self, r: f64, t: f64) -> Result<f64> {
        let n1 = self.problem.dim() as i32 - 1;
        if r > 1e-9 * self.problem.r_outer {
            return Ok(self.p(r, t)? / r.powi(n1));
        }
        if t == 0.0 {
            return Ok(self.problem.rho0.eval(0.0));
        }
        let n = self.problem.dim() as f64;
        let tr = Dopri5::default().solve(
            |s, _, d| {
                d[0] = -n * self.velocity_and_derivative(0.0, s.max(1e-300))?.1;
                Ok(())
            },
            0.0,
            &[0.0],
            t,
        )?;
        Ok(self.problem.rho0.eval(0.0) * tr.y[0].exp())
    }

    /// Radius at time `t` of the characteristic leaving the corner
    /// `(R_i, 0)` of an inflow sphere; `p` may have a kink across it.
    fn corner_characteristic(&self, side: Side, t: f64) -> Result<Option<f64>> {
        let p = &self.problem;
        if !p.inflow(side) {
            return Ok(None);
        }
        let (lo, hi) = (p.r_inner, p.r_outer);
        let tr = Dopri5 {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        }
        .solve(
            |s, y, d| {
                d[0] = self.velocity(y[0].clamp(lo, hi), s.max(1e-12 * self.t_floor))?;
                Ok(())
            },
            0.0,
            &[p.boundary_radius(side)],
            t,
        )?;
        Ok(Some(tr.y[0]).filter(|r| *r > lo && *r < hi))
    }

    /// `m(t) = omega int p dr` by composite Gauss-Legendre quadrature, split
    /// at the corner characteristics, with a two-level error estimate.
    pub fn mass(&self, t: f64) -> Result<MassEstimate> {
        let p = &self.problem;
        let mut cuts = vec![p.r_inner, p.r_outer];
        if t > 0.0 {
            for &side in p.sides() {
                if let Some(r) = self.corner_characteristic(side, t)? {
                    cuts.push(r);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let rule = GaussLegendre::new(10);
        let omega = sphere_measure(p.dim());
        let integrate = |panels: usize| -> Result<f64> {
            let mut nodes = Vec::new();
            for w in cuts.windows(2) {
                let h = (w[1] - w[0]) / panels as f64;
                for k in 0..panels {
                    let a = w[0] + k as f64 * h;
                    nodes.extend(rule.mapped(a, a + h));
                }
            }
            let vals: Vec<f64> = nodes
                .par_iter()
                .map(|(r, w)| self.p(*r, t).map(|v| w * v))
                .collect::<Result<_>>()?;
            Ok(omega * vals.iter().sum::<f64>())
        };
        let coarse = integrate(6)?;
        let fine = integrate(12)?;
        Ok(MassEstimate {
            mass: fine,
            error: (fine - coarse).abs(),
        })
    }

    /// Outward flux `omega [q p](R_2) - omega [q p](R_1)`; the mass balance
    /// reads `dm/dt = -flux`.
    pub fn boundary_flux(&self, t: f64) -> Result<f64> {
        let p = &self.problem;
        let omega = sphere_measure(p.dim());
        let mut flux = 0.0;
        for &side in p.sides() {
            let r = p.boundary_radius(side);
            let qp = p.boundary_velocity(side) * self.p(r, t)?;
            flux += match side {
                Side::Outer => omega * qp,
                Side::Inner => -omega * qp,
            };
        }
        Ok(flux)
    }

    /// `max_i |q(R_i, t) - q_i|` from the series.
    pub fn robin_residual(&self, t: f64) -> Result<f64> {
        let p = &self.problem;
        let mut worst = 0.0f64;
        for &side in p.sides() {
            let r = p.boundary_radius(side);
            let q = self.velocity(r, t.max(self.t_floor))?;
            worst = worst.max((q - p.boundary_velocity(side)).abs());
        }
        Ok(worst)
    }

    /// Velocity and `p` on a grid.
    pub fn field(&self, r: Vec<f64>, t: Vec<f64>) -> Result<RadialField> {
        RadialField::from_fn(self.problem.dim(), self.problem.epsilon, r, t, |r, t| {
            let q = if t == 0.0 {
                self.problem.q0.eval(r)
            } else {
                self.velocity(r, t)?
            };
            Ok((q, self.p(r, t)?))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball(dim: u32, q_b: f64) -> BoundedProblem {
        // q0 = q_b r^2 / R^2 matches the boundary velocity at R = 1
        let q0 = ScalarProfile::polynomial(vec![0.0, 0.0, q_b]).unwrap();
        let rho0 = ScalarProfile::constant(1.0);
        let rho_b = (q_b < 0.0).then(|| ScalarProfile::constant(1.0));
        BoundedProblem::ball(dim, 1.0, 0.2, q0, rho0, q_b, rho_b).unwrap()
    }

    fn options() -> BoundedOptions {
        BoundedOptions {
            terms: 60,
            fd_cells: 400,
            fd_steps: 100,
            ..Default::default()
        }
    }

    #[test]
    fn rest_state() {
        let s = BoundedSolution::new(ball(2, 0.0), options()).unwrap();
        for &(r, t) in &[(0.3, 0.1), (0.8, 1.0), (0.5, 1e-4)] {
            assert!(s.velocity(r, t).unwrap().abs() < 1e-12);
            assert_relative_eq!(s.density(r, t).unwrap(), 1.0, epsilon = 1e-9);
        }
        assert_eq!(s.large_time_velocity(0.4), 0.0);
    }

    #[test]
    fn validation_rules() {
        let q0 = ScalarProfile::constant(0.0);
        let rho0 = ScalarProfile::constant(1.0);
        // inflow without a boundary density
        assert!(
            BoundedProblem::ball(2, 1.0, 0.1, q0.clone(), rho0.clone(), -0.0 - 1e-9, None).is_err()
        );
        // boundary density on an outflow sphere
        assert!(BoundedProblem::ball(
            2,
            1.0,
            0.1,
            q0.clone(),
            rho0.clone(),
            0.0,
            Some(rho0.clone())
        )
        .is_err());
        // velocity inconsistent with q0 at the corner
        assert!(BoundedProblem::ball(3, 1.0, 0.1, q0, rho0, 0.5, None).is_err());
    }

    #[test]
    fn green_symmetry_with_weights() {
        let g = GreenEvaluator::new(EigenProblem::ball(3, 1.0, 0.7).unwrap(), 0.3, 80).unwrap();
        let (r, xi, t) = (0.3, 0.7, 0.4);
        let a = g.green(r, xi, t).unwrap() / (xi * xi);
        let b = g.green(xi, r, t).unwrap() / (r * r);
        assert_relative_eq!(a, b, max_relative = 1e-12);
        assert!(g.green(0.2, 0.4, 0.0).is_err());
    }

    #[test]
    fn boundary_velocity_is_attained() {
        for dim in [2, 3] {
            let s = BoundedSolution::new(ball(dim, 0.5), options()).unwrap();
            assert!(s.robin_residual(1.0).unwrap() < 1e-10);
            assert!((s.velocity(1.0 - 1e-7, 1.0).unwrap() - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn series_matches_finite_differences_early_on() {
        let s = BoundedSolution::new(ball(3, 0.3), options()).unwrap();
        let t = 2.0 * s.t_floor();
        let cfg = HeatConfig {
            dim: 3,
            r_inner: 0.0,
            r_outer: 1.0,
            k_inner: 0.0,
            k_outer: 0.3 / 0.2,
            epsilon: 0.2,
            cells: 800,
            steps: 400,
        };
        let q0 = ScalarProfile::polynomial(vec![0.0, 0.0, 0.3]).unwrap();
        let fd = fd_heat_solve(&cfg, |r| (-q0.integral(0.0, r) / 0.2).exp(), t).unwrap();
        for r in [0.2, 0.5, 0.9] {
            let (q_fd, _) = fd.velocity(r, t);
            assert!((s.velocity(r, t).unwrap() - q_fd).abs() < 1e-4);
        }
    }

    #[test]
    fn inflow_density_comes_from_the_boundary() {
        let s = BoundedSolution::new(ball(2, -0.4), options()).unwrap();
        let foot = s.trace(0.99, 1.0).unwrap();
        assert_eq!(foot.side, Some(Side::Outer));
        assert!(foot.t0 > 0.9);
        let foot = s.trace(0.1, 0.5).unwrap();
        assert_eq!(foot.side, None);
        assert!(s.p(0.5, 1.0).unwrap() > 0.0);
    }
}
