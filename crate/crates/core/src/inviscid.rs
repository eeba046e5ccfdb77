//! Radial inviscid solutions on `r > 0` with a velocity prescribed at the
//! origin and a total-mass condition.
//!
//! `Q(r, t)` is the minimum of the path functional over broken lines from
//! `(r0, 0)` to `(r, t)`. Straight lines cost `A = (r - r0)^2 / (2t)`; paths
//! that visit the origin between `t1` and `t2` cost
//! `r0^2/(2 t1) - int_{t1}^{t2} (q_B^+)^2/2 + r^2/(2(t - t2))`.
//!
//! Both branches separate. The straight-line part is a piecewise polynomial
//! in `r0` and is minimised exactly through its critical points. For the
//! boundary part, `h(t1) = min_{r0} [r0^2/(2 t1) + U0(r0)]` is minimised the
//! same way, and the remaining two-variable problem over `t1 <= t2` is
//! seeded on a grid, then refined.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::ScalarProfile;
use crate::radial::fmt_f;
use crate::sphere_measure;

/// Data of the inviscid problem. `p0 = r^{n-1} rho0` must vanish beyond its
/// last break.
#[derive(Debug, Clone, PartialEq)]
pub struct InviscidProblem {
    pub dim: u32,
    pub q0: ScalarProfile,
    pub p0: ScalarProfile,
    /// Radial velocity at the origin, a function of `t`.
    pub q_b: ScalarProfile,
    /// Total mass `omega int_0^inf p dr` imposed while mass flows in.
    pub p_b: ScalarProfile,
    pub omega: f64,
}

impl InviscidProblem {
    pub fn new(
        dim: u32,
        q0: ScalarProfile,
        p0: ScalarProfile,
        q_b: ScalarProfile,
        p_b: ScalarProfile,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Invalid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if !q0.is_bounded() || !q_b.is_bounded() {
            return Err(Error::Invalid(
                "q0 and q_B must be bounded (constant last piece)".into(),
            ));
        }
        let last = p0.pieces().last().unwrap();
        if !last.is_zero() {
            return Err(Error::Invalid(
                "p0 must vanish beyond its last break".into(),
            ));
        }
        let end = *p0.breaks().last().unwrap();
        if end > 0.0 && p0.min_on(0.0, end) < 0.0 {
            return Err(Error::Invalid("p0 must be nonnegative".into()));
        }
        Ok(Self {
            dim,
            q0,
            p0,
            q_b,
            p_b,
            omega: sphere_measure(dim),
        })
    }

    /// `int_0^r0 q0`.
    pub fn potential(&self, r0: f64) -> f64 {
        self.q0.integral(0.0, r0)
    }

    /// `int_0^inf p0`.
    pub fn initial_mass(&self) -> f64 {
        self.p0
            .integral(0.0, self.p0.breaks().last().unwrap().max(0.0))
    }

    /// `sup |q0|` on `[0, inf)`.
    pub fn speed_bound(&self) -> f64 {
        self.q0.sup_abs_all().unwrap_or(0.0)
    }

    /// `(1/2) int_0^tau (q_B^+)^2`.
    fn credit(&self, tau: f64) -> f64 {
        0.5 * self.q_b.positive_square_integral(0.0, tau)
    }

    /// Radius beyond which `P = 0` at time `t`.
    pub fn far_radius(&self, t: f64) -> f64 {
        let qb = self.q_b.max_on(0.0, t.max(0.0)).max(0.0);
        self.p0.breaks().last().unwrap().max(1.0) + t * (self.speed_bound() + qb) + 1.0
    }
}

/// `A = (r - r0)^2 / (2t)`.
pub fn interior_cost(r: f64, r0: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("path cost needs t > 0, got {t}")));
    }
    if r < 0.0 || r0 < 0.0 {
        return Err(Error::Domain("path end points must be nonnegative".into()));
    }
    Ok((r - r0).powi(2) / (2.0 * t))
}

/// Cost of the three-segment path through `(0, t1)` and `(0, t2)`; `+inf` for
/// `r0 > 0, t1 = 0` and for `t2 >= t`.
pub fn boundary_cost(
    r: f64,
    r0: f64,
    t: f64,
    t1: f64,
    t2: f64,
    q_b: &ScalarProfile,
) -> Result<f64> {
    if !(t > 0.0) || r < 0.0 || r0 < 0.0 || t1 < 0.0 || t2 < t1 {
        return Err(Error::Domain(format!(
            "boundary path needs 0 <= t1 <= t2 and t > 0 (t1 = {t1}, t2 = {t2}, t = {t})"
        )));
    }
    if t2 >= t || (r0 > 0.0 && t1 == 0.0) {
        return Ok(f64::INFINITY);
    }
    let first = if r0 == 0.0 { 0.0 } else { r0 * r0 / (2.0 * t1) };
    Ok(first - 0.5 * q_b.positive_square_integral(t1, t2) + r * r / (2.0 * (t - t2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    Interior,
    Boundary { t1: f64, t2: f64 },
}

impl Branch {
    pub fn is_boundary(&self) -> bool {
        matches!(self, Branch::Boundary { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Branch::Interior => "I",
            Branch::Boundary { .. } => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMinimum {
    pub branch: Branch,
    pub r0: f64,
    /// `Q(r, t)`.
    pub value: f64,
    /// Another minimiser within `1e-9` in value gives a velocity differing by
    /// more than `1e-4`.
    pub ambiguous: bool,
}

impl PathMinimum {
    /// Velocity of the last path segment.
    pub fn velocity(&self, r: f64, t: f64) -> f64 {
        match self.branch {
            Branch::Interior => (r - self.r0) / t,
            Branch::Boundary { t2, .. } => r / (t - t2),
        }
    }

    /// Re-evaluates the path functional at the stored minimiser.
    pub fn reevaluate(&self, problem: &InviscidProblem, r: f64, t: f64) -> Result<f64> {
        let cost = match self.branch {
            Branch::Interior => interior_cost(r, self.r0, t)?,
            Branch::Boundary { t1, t2 } => boundary_cost(r, self.r0, t, t1, t2, &problem.q_b)?,
        };
        Ok(cost + problem.potential(self.r0))
    }
}

/// Critical points and ends of `(r - r0)^2/(2t) + U0(r0)` on `[lo, hi]`,
/// with their values, best first (ties towards smaller `r0`).
fn straight_candidates(
    problem: &InviscidProblem,
    r: f64,
    t: f64,
    lo: f64,
    hi: f64,
) -> Vec<(f64, f64)> {
    let q0 = &problem.q0;
    let mut pts = vec![lo, hi];
    for (i, piece) in q0.pieces().iter().enumerate() {
        let (a, b) = q0.piece_interval(i);
        let (a, b) = (a.max(lo), b.min(hi));
        if b < a {
            continue;
        }
        let x0 = q0.breaks()[i];
        if x0 > lo && x0 < hi {
            pts.push(x0);
        }
        // (u + x0 - r)/t + q0_i(u) = 0
        let lin = crate::poly::Polynomial::new(vec![(x0 - r) / t, 1.0 / t]);
        let d = piece + &lin;
        pts.extend(d.roots_in(a - x0, b - x0).into_iter().map(|u| u + x0));
    }
    let mut out: Vec<(f64, f64)> = pts
        .into_iter()
        .map(|r0| (r0, (r - r0).powi(2) / (2.0 * t) + problem.potential(r0)))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    out
}

/// Best straight-line start for `(r, t)`: `(r0, value, ambiguous)`.
fn straight_min(problem: &InviscidProblem, r: f64, t: f64) -> (f64, f64, bool) {
    let reach = t * problem.speed_bound();
    let cands = straight_candidates(problem, r, t, (r - reach).max(0.0), r + reach);
    let (mut r0, v) = cands[0];
    // smallest r0 among the (numerically) tied minimisers
    let tol = 1e-13 * (1.0 + v.abs());
    for &(x, w) in &cands {
        if w <= v + tol && x < r0 {
            r0 = x;
        }
    }
    let ambiguous = cands
        .iter()
        .any(|&(x, w)| w - v < 1e-9 && ((x - r0) / t).abs() > 1e-4);
    (r0, v, ambiguous)
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const G: f64 = 0.618_033_988_749_894_9;
    let mut c = b - G * (b - a);
    let mut d = a + G * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - G * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + G * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    [(a, fa), (b, fb), (c, fc), (d, fd)]
        .into_iter()
        .fold(
            (a, f64::INFINITY),
            |best, x| if x.1 < best.1 { x } else { best },
        )
}

/// Number of seed intervals for the `(t1, t2)` search.
const TIME_SEEDS: usize = 256;

/// Minimum of `g1(t1) + g2(t2)` over `0 <= t1 <= t2 < t`.
fn boundary_min(problem: &InviscidProblem, r: f64, t: f64) -> Option<(f64, f64, f64, f64)> {
    if problem.credit(t) == 0.0 {
        // no credit: every boundary path costs at least (r + r0)^2/(2t)
        return None;
    }
    let h = |tau: f64| -> (f64, f64) {
        if tau <= 0.0 {
            return (0.0, 0.0);
        }
        let (r0, v, _) = straight_min(problem, 0.0, tau);
        (r0, v)
    };
    let g1 = |tau: f64| h(tau).1 + problem.credit(tau);
    let g2 = |tau: f64| {
        if tau >= t {
            f64::INFINITY
        } else {
            r * r / (2.0 * (t - tau)) - problem.credit(tau)
        }
    };
    let mut grid: Vec<f64> = (0..TIME_SEEDS)
        .map(|i| t * i as f64 / TIME_SEEDS as f64)
        .collect();
    grid.extend(
        problem
            .q_b
            .breaks()
            .iter()
            .cloned()
            .filter(|&b| b > 0.0 && b < t),
    );
    grid.extend(problem.q_b.zero_crossings(0.0, t));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let v1: Vec<f64> = grid.iter().map(|&s| g1(s)).collect();
    let v2: Vec<f64> = grid.iter().map(|&s| g2(s)).collect();
    let (mut bi, mut best) = (0, (0, 0, f64::INFINITY));
    for j in 0..grid.len() {
        if v1[j] < v1[bi] {
            bi = j;
        }
        let v = v1[bi] + v2[j];
        if v < best.2 {
            best = (bi, j, v);
        }
    }
    let (i, j, _) = best;
    let n = grid.len();
    let near = |k: usize| -> (f64, f64) {
        (
            grid[k.saturating_sub(1)],
            if k + 1 < n { grid[k + 1] } else { t },
        )
    };
    let (mut t1, mut t2) = (grid[i], grid[j]);
    let mut value = v1[i] + v2[j];
    for _ in 0..8 {
        let (a, b) = near(j);
        let (s2, w2) = golden(g2, a.max(t1), b);
        let (a, b) = near(i);
        let (s1, w1) = golden(g1, a, b.min(s2));
        let (s1, w1) = if g1(0.0) <= w1 {
            (0.0, g1(0.0))
        } else {
            (s1, w1)
        };
        let improved = w1 + w2;
        if improved < value {
            let change = value - improved;
            t1 = s1;
            t2 = s2;
            value = improved;
            if change < 1e-15 * (1.0 + value.abs()) {
                break;
            }
        } else {
            break;
        }
    }
    t2 = polish_exit_time(problem, r, t, t1, t2);
    let (r0, _) = h(t1);
    let value = g1(t1) + g2(t2);
    Some((r0, t1, t2, value))
}

/// Sharpens `t2` with the optimality condition `r = (t - t2) q_B^+(t2)`
/// when a sign change of its residual brackets the golden-section point.
fn polish_exit_time(problem: &InviscidProblem, r: f64, t: f64, t1: f64, t2: f64) -> f64 {
    let d = |s: f64| r - (t - s) * problem.q_b.eval(s).max(0.0);
    let w = 1e-6 * t;
    let (a, b) = ((t2 - w).max(t1), (t2 + w).min(t * (1.0 - 1e-15)));
    let (da, db) = (d(a), d(b));
    if da < 0.0 && db > 0.0 {
        let s = crate::poly::bisect(d, a, b, da);
        let g2 = |tau: f64| r * r / (2.0 * (t - tau)) - problem.credit(tau);
        if g2(s) <= g2(t2) + 1e-14 * (1.0 + g2(t2).abs()) {
            return s;
        }
    }
    t2
}

/// `Q(r, t)` with its minimiser; ties go to the straight line.
pub fn minimize_paths(problem: &InviscidProblem, r: f64, t: f64) -> Result<PathMinimum> {
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::Domain(format!(
            "minimisation needs r >= 0 and t > 0, got ({r}, {t})"
        )));
    }
    let (r0, a, amb) = straight_min(problem, r, t);
    let interior = PathMinimum {
        branch: Branch::Interior,
        r0,
        value: a,
        ambiguous: amb,
    };
    let Some((rb, t1, t2, b)) = boundary_min(problem, r, t) else {
        return Ok(interior);
    };
    let boundary = PathMinimum {
        branch: Branch::Boundary { t1, t2 },
        r0: rb,
        value: b,
        ambiguous: false,
    };
    let tol = 1e-12 * (1.0 + a.abs());
    let gap = (a - b).abs();
    let q_gap = (interior.velocity(r, t) - boundary.velocity(r, t)).abs();
    let mut best = if a <= b + tol { interior } else { boundary };
    best.ambiguous |= gap < 1e-9 && q_gap > 1e-4;
    Ok(best)
}

/// Solution sample: velocity, `P = -int_r^inf p`, `p = dP/dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InviscidPoint {
    pub q: f64,
    pub big_p: f64,
    /// NaN when no smooth side was found.
    pub p: f64,
    pub path: PathMinimum,
    /// One-sided velocities when `(r, t)` sits on a discontinuity.
    pub jump: Option<(f64, f64)>,
}

impl InviscidPoint {
    pub fn rho(&self, r: f64, dim: u32) -> f64 {
        self.p / r.powi(dim as i32 - 1)
    }
}

fn potential_value(problem: &InviscidProblem, m: &PathMinimum) -> f64 {
    match m.branch {
        Branch::Interior => -(problem.initial_mass() - problem.p0.integral(0.0, m.r0)),
        Branch::Boundary { t2, .. } => -problem.p_b.eval(t2) / problem.omega,
    }
}

/// `(q, P)` at `(r, t)`.
pub fn velocity_and_potential(
    problem: &InviscidProblem,
    r: f64,
    t: f64,
) -> Result<(f64, f64, PathMinimum)> {
    let m = minimize_paths(problem, r, t)?;
    Ok((m.velocity(r, t), potential_value(problem, &m), m))
}

/// Velocity, `P` and `p = P_r` (finite differences on the smooth side).
pub fn solution(problem: &InviscidProblem, r: f64, t: f64) -> Result<InviscidPoint> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("solution needs r > 0, got {r}")));
    }
    let (q, big_p, path) = velocity_and_potential(problem, r, t)?;
    let h = 1e-6 * r.max(1e-2);
    let sample = |x: f64| -> Result<Option<(f64, f64)>> {
        if x <= 0.0 {
            return Ok(None);
        }
        let (qx, px, _) = velocity_and_potential(problem, x, t)?;
        Ok(Some((qx, px)))
    };
    let smooth = |a: &Option<(f64, f64)>, dist: f64| match a {
        Some((qa, _)) => (qa - q).abs() <= 1e-4 + 10.0 * dist * (1.0 / t + 1.0),
        None => false,
    };
    let (l1, r1) = (sample(r - h)?, sample(r + h)?);
    let p = match (smooth(&l1, h), smooth(&r1, h)) {
        (true, true) => (r1.unwrap().1 - l1.unwrap().1) / (2.0 * h),
        (false, true) => {
            let r2 = sample(r + 2.0 * h)?;
            if smooth(&r2, 2.0 * h) {
                (-3.0 * big_p + 4.0 * r1.unwrap().1 - r2.unwrap().1) / (2.0 * h)
            } else {
                (r1.unwrap().1 - big_p) / h
            }
        }
        (true, false) => {
            let l2 = sample(r - 2.0 * h)?;
            if smooth(&l2, 2.0 * h) {
                (3.0 * big_p - 4.0 * l1.unwrap().1 + l2.unwrap().1) / (2.0 * h)
            } else {
                (big_p - l1.unwrap().1) / h
            }
        }
        (false, false) => f64::NAN,
    };
    let jump = if path.ambiguous || !smooth(&l1, h) || !smooth(&r1, h) {
        let left = l1.map_or(q, |v| v.0);
        let right = r1.map_or(q, |v| v.0);
        ((left - right).abs() > 1e-4).then_some((left, right))
    } else {
        None
    };
    Ok(InviscidPoint {
        q,
        big_p,
        p,
        path,
        jump,
    })
}

/// Solution on a tensor grid, `points[it * r.len() + ir]`.
#[derive(Debug, Clone)]
pub struct InviscidPanel {
    pub dim: u32,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub points: Vec<InviscidPoint>,
}

impl InviscidPanel {
    pub fn at(&self, it: usize, ir: usize) -> &InviscidPoint {
        &self.points[it * self.r.len() + ir]
    }

    /// Velocity slice at time index `it`.
    pub fn q_row(&self, it: usize) -> Vec<f64> {
        (0..self.r.len()).map(|ir| self.at(it, ir).q).collect()
    }

    pub fn big_p_row(&self, it: usize) -> Vec<f64> {
        (0..self.r.len()).map(|ir| self.at(it, ir).big_p).collect()
    }

    pub fn p_row(&self, it: usize) -> Vec<f64> {
        (0..self.r.len()).map(|ir| self.at(it, ir).p).collect()
    }

    /// Columns `r, t, q, P, p, rho, branch, discontinuity`.
    pub fn write_csv_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# n={}", self.dim)?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "t", "q", "P", "p", "rho", "branch", "discontinuity"])?;
        for (it, &t) in self.t.iter().enumerate() {
            for (ir, &r) in self.r.iter().enumerate() {
                let s = self.at(it, ir);
                wr.write_record([
                    fmt_f(r),
                    fmt_f(t),
                    fmt_f(s.q),
                    fmt_f(s.big_p),
                    fmt_f(s.p),
                    fmt_f(s.rho(r, self.dim)),
                    s.path.branch.tag().to_string(),
                    u8::from(s.jump.is_some()).to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_csv_to(std::fs::File::create(path)?)
    }
}

/// Evaluates [`solution`] on all `(r, t)` pairs in parallel.
pub fn solve_panel(problem: &InviscidProblem, r: Vec<f64>, t: Vec<f64>) -> Result<InviscidPanel> {
    let nr = r.len();
    let points = (0..nr * t.len())
        .into_par_iter()
        .map(|k| solution(problem, r[k % nr], t[k / nr]))
        .collect::<Result<Vec<_>>>()?;
    Ok(InviscidPanel {
        dim: problem.dim,
        r,
        t,
        points,
    })
}

/// One row of the boundary-condition report.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCheck {
    pub t: f64,
    /// `q(0+, t)`.
    pub q_origin: f64,
    pub q_b: f64,
    /// `omega int_0^inf p dr`.
    pub mass: f64,
    pub p_b: f64,
    pub velocity_ok: bool,
    /// Only tested while `q(0+, t) > 0`.
    pub mass_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryCheck>,
}

impl BoundaryReport {
    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !(r.velocity_ok && r.mass_ok))
            .count()
    }
}

/// Checks the weak velocity condition at the origin (either `q(0+) = q_B`,
/// or `q(0+) <= 0` with `q(0+)^2 <= (q_B^+)^2`) and, during inflow, the mass
/// condition to `1e-3` relative.
pub fn weak_boundary_check(problem: &InviscidProblem, times: &[f64]) -> Result<BoundaryReport> {
    let rows = times
        .par_iter()
        .map(|&t| {
            let scale = problem.far_radius(t);
            let r = 1e-7 * scale;
            let (q, p_origin, _) = velocity_and_potential(problem, r, t)?;
            let (_, p_far, _) = velocity_and_potential(problem, problem.far_radius(t), t)?;
            // the trace at time t only sees boundary data on [0, t)
            let q_b = problem.q_b.eval_left(t);
            let tol = 1e-5 * (1.0 + q_b.abs());
            let velocity_ok =
                (q - q_b).abs() <= tol || (q <= tol && q * q <= q_b.max(0.0).powi(2) + tol);
            let mass = problem.omega * (p_far - p_origin);
            let p_b = problem.p_b.eval_left(t);
            let mass_ok = q <= tol || (mass - p_b).abs() <= 1e-3 * p_b.abs().max(1e-12);
            Ok(BoundaryCheck {
                t,
                q_origin: q,
                q_b,
                mass,
                p_b,
                velocity_ok,
                mass_ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn problem(q0: ScalarProfile, q_b: ScalarProfile) -> InviscidProblem {
        let p0 = ScalarProfile::piecewise_constant(vec![0.0, 3.0], vec![1.0, 0.0]).unwrap();
        let mass = 3.0 * sphere_measure(2);
        // p_B grows at the inflow rate omega q_B p(0+) with p(0+) = 1
        let p_b = ScalarProfile::polynomial(vec![mass, sphere_measure(2) * q_b.eval(0.0).max(0.0)])
            .unwrap();
        InviscidProblem::new(2, q0, p0, q_b, p_b).unwrap()
    }

    #[test]
    fn costs() {
        assert_eq!(interior_cost(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(interior_cost(1.0, 0.0, 1.0).unwrap(), 0.5);
        assert_relative_eq!(
            interior_cost(3.0, 1.0, 4.0).unwrap(),
            0.5 * interior_cost(3.0, 1.0, 2.0).unwrap()
        );
        assert!(interior_cost(1.0, 0.0, 0.0).is_err());
        let c = ScalarProfile::constant(2.0);
        assert_relative_eq!(
            boundary_cost(1.0, 0.0, 2.0, 0.0, 1.0, &c).unwrap(),
            -2.0 + 0.5
        );
        assert_eq!(
            boundary_cost(1.0, 0.5, 2.0, 0.0, 1.0, &c).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            boundary_cost(1.0, 0.0, 2.0, 0.0, 2.0, &c).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn rest_state() {
        let p = problem(ScalarProfile::constant(0.0), ScalarProfile::constant(0.0));
        let m = minimize_paths(&p, 1.3, 0.7).unwrap();
        assert_eq!(m.branch, Branch::Interior);
        assert_eq!(m.r0, 1.3);
        assert_eq!(m.value, 0.0);
        let s = solution(&p, 1.3, 0.7).unwrap();
        assert_eq!(s.q, 0.0);
        assert_relative_eq!(s.p, 1.0, epsilon = 1e-8);
        assert_relative_eq!(s.big_p, -(3.0 - 1.3), epsilon = 1e-14);
    }

    #[test]
    fn constant_outflow() {
        let p = problem(ScalarProfile::constant(0.5), ScalarProfile::constant(0.5));
        let s = solution(&p, 2.0, 1.0).unwrap();
        assert_relative_eq!(s.q, 0.5, epsilon = 1e-12);
        assert_relative_eq!(s.path.r0, 1.5, epsilon = 1e-12);
        assert_relative_eq!(s.big_p, -1.5, epsilon = 1e-12);
    }

    #[test]
    fn boundary_branch_for_inflow() {
        let c = 1.0;
        let p = problem(ScalarProfile::constant(0.0), ScalarProfile::constant(c));
        let (r, t) = (0.4, 1.0);
        let m = minimize_paths(&p, r, t).unwrap();
        let Branch::Boundary { t2, .. } = m.branch else {
            panic!("expected the boundary branch");
        };
        assert_relative_eq!(m.value, c * r - c * c * t / 2.0, epsilon = 1e-10);
        assert_relative_eq!(t2, t - r / c, epsilon = 1e-9);
        assert_relative_eq!(m.velocity(r, t), c, epsilon = 1e-8);
        assert!((m.reevaluate(&p, r, t).unwrap() - m.value).abs() < 1e-10);
        let s = solution(&p, r, t).unwrap();
        // p = p_B'(t2) / (c omega) = 1
        assert_relative_eq!(s.p, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn riemann_front_moves_at_mean_speed() {
        let q0 = ScalarProfile::piecewise_constant(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        let p = problem(q0, ScalarProfile::constant(0.0));
        let t = 0.6;
        let front = 1.0 + 0.5 * t;
        assert_relative_eq!(
            solution(&p, front - 1e-3, t).unwrap().q,
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            solution(&p, front + 1e-3, t).unwrap().q,
            0.0,
            epsilon = 1e-12
        );
        let s = solution(&p, front, t).unwrap();
        assert!(s.jump.is_some());
    }

    #[test]
    fn weak_conditions_hold() {
        for (q0, qb) in [(0.0, 1.0), (-0.5, -0.5), (0.0, -1.0)] {
            let p = problem(ScalarProfile::constant(q0), ScalarProfile::constant(qb));
            let rep = weak_boundary_check(&p, &[0.3, 1.0, 2.0]).unwrap();
            assert_eq!(rep.violations(), 0, "{rep:?}");
        }
    }
}
