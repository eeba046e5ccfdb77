//! Discontinuity fronts of the inviscid solution and their jump relations.
//!
//! Brackets are `[f] = f(s+) - f(s-)`, where `s+` is the larger-radius side.
//! With this orientation mass conservation across a front `r = s(t)`
//! carrying `e(t)` (in `p` units) reads
//! `de/dt = -([qp] - [p] ds/dt)`, and the residuals below measure that.

use std::io::Write;

use crate::error::{Error, Result};
use crate::inviscid::{solution, InviscidPanel, InviscidProblem};
use crate::radial::fmt_f;

/// `K = -(n-1)/(2r)` for the sphere of radius `r` in `R^n`.
pub fn mean_curvature(dim: u32, r: f64) -> f64 {
    -(dim as f64 - 1.0) / (2.0 * r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockFront {
    pub dim: u32,
    pub times: Vec<f64>,
    pub s: Vec<f64>,
    /// Delta amplitude in `p` units, the jump of `P` across the front.
    pub e: Vec<f64>,
    pub q_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
}

impl ShockFront {
    fn empty(dim: u32) -> Self {
        Self {
            dim,
            times: Vec::new(),
            s: Vec::new(),
            e: Vec::new(),
            q_plus: Vec::new(),
            q_minus: Vec::new(),
            p_plus: Vec::new(),
            p_minus: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sharpens every sample: bisection on the velocity jump inside
    /// `[s - width, s + width]`, then one-sided traces extrapolated to the
    /// front from two points on each side.
    pub fn refine(&self, problem: &InviscidProblem, width: f64) -> Result<Self> {
        let mut out = Self::empty(self.dim);
        for (k, &t) in self.times.iter().enumerate() {
            let q_at = |r: f64| -> Result<f64> { Ok(solution(problem, r, t)?.q) };
            let (mut a, mut b) = ((self.s[k] - width).max(1e-12), self.s[k] + width);
            let (qa, qb) = (q_at(a)?, q_at(b)?);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let qm = q_at(m)?;
                if (qm - qa).abs() < (qm - qb).abs() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let s = 0.5 * (a + b);
            let d = 1e-4 * s.max(0.1);
            let trace = |side: f64| -> Result<(f64, f64, f64)> {
                let near = solution(problem, s + side * d, t)?;
                let far = solution(problem, s + 2.0 * side * d, t)?;
                let ex = |x: f64, y: f64| 2.0 * x - y;
                Ok((
                    ex(near.q, far.q),
                    ex(near.big_p, far.big_p),
                    ex(near.p, far.p),
                ))
            };
            let (qm, pm_big, pm) = trace(-1.0)?;
            let (qp, pp_big, pp) = trace(1.0)?;
            out.times.push(t);
            out.s.push(s);
            out.e.push(pp_big - pm_big);
            out.q_minus.push(qm);
            out.q_plus.push(qp);
            out.p_minus.push(pm);
            out.p_plus.push(pp);
        }
        Ok(out)
    }

    /// `ds/dt` by second-order differences on the (possibly uneven) samples.
    pub fn speed(&self) -> Vec<f64> {
        derivative(&self.times, &self.s)
    }

    pub fn amplitude_rate(&self) -> Vec<f64> {
        derivative(&self.times, &self.e)
    }

    /// `q- >= ds/dt >= q+` at every sample, with slack `tol`.
    pub fn entropy_ok(&self, tol: f64) -> bool {
        let v = self.speed();
        (0..self.len()).all(|k| self.q_minus[k] + tol >= v[k] && v[k] + tol >= self.q_plus[k])
    }
}

/// Second-order finite-difference derivative on a nonuniform grid;
/// three-point one-sided at the ends.
fn derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let w3 = |x: f64, a: f64, b: f64, c: f64, ya: f64, yb: f64, yc: f64| {
        // derivative at x of the quadratic through (a, ya), (b, yb), (c, yc)
        ya * (2.0 * x - b - c) / ((a - b) * (a - c))
            + yb * (2.0 * x - a - c) / ((b - a) * (b - c))
            + yc * (2.0 * x - a - b) / ((c - a) * (c - b))
    };
    (0..n)
        .map(|k| {
            let j = k.clamp(1, n - 2);
            w3(t[k], t[j - 1], t[j], t[j + 1], y[j - 1], y[j], y[j + 1])
        })
        .collect()
}

/// Fronts found in a panel, with the merges met while linking.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontDetection {
    pub fronts: Vec<ShockFront>,
    /// `(t, merged front indices, new front index)`.
    pub merges: Vec<(f64, Vec<usize>, usize)>,
}

/// Per time slice, cells where `q` drops by more than `threshold` (default
/// `1e-3 sup|q|`) and by more than four times either neighbouring change;
/// linked across slices by nearest neighbours.
pub fn detect_fronts(panel: &InviscidPanel, threshold: Option<f64>) -> FrontDetection {
    let nr = panel.r.len();
    let sup = panel.points.iter().map(|p| p.q.abs()).fold(0.0, f64::max);
    let thr = threshold.unwrap_or(1e-3 * sup).max(1e-14);
    let dr = if nr > 1 {
        (panel.r[nr - 1] - panel.r[0]) / (nr - 1) as f64
    } else {
        1.0
    };
    let mut slices: Vec<Vec<usize>> = Vec::with_capacity(panel.t.len());
    for it in 0..panel.t.len() {
        let q = panel.q_row(it);
        let dq: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
        let mut cells = Vec::new();
        for i in 0..dq.len() {
            let drop = -dq[i];
            let left = if i > 0 { dq[i - 1].abs() } else { 0.0 };
            let right = dq.get(i + 1).map_or(0.0, |v| v.abs());
            if drop > thr && drop > 4.0 * left.max(right) {
                cells.push(i);
            }
        }
        slices.push(cells);
    }
    let mut det = FrontDetection {
        fronts: Vec::new(),
        merges: Vec::new(),
    };
    // front index currently continuing, per open front
    let mut open: Vec<(usize, f64)> = Vec::new();
    for (it, cells) in slices.iter().enumerate() {
        let t = panel.t[it];
        let dt = if it > 0 { t - panel.t[it - 1] } else { 0.0 };
        let reach = (sup + 1.0) * dt + 2.0 * dr;
        let mut claimed: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (k, &(_, s_prev)) in open.iter().enumerate() {
            let best = cells
                .iter()
                .enumerate()
                .map(|(j, &i)| (j, (0.5 * (panel.r[i] + panel.r[i + 1]) - s_prev).abs()))
                .filter(|(_, d)| *d <= reach)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = best {
                claimed[j].push(k);
            }
        }
        let mut next_open = Vec::new();
        for (j, &i) in cells.iter().enumerate() {
            let idx = match claimed[j].len() {
                1 => open[claimed[j][0]].0,
                n => {
                    det.fronts.push(ShockFront::empty(panel.dim));
                    let id = det.fronts.len() - 1;
                    if n > 1 {
                        det.merges
                            .push((t, claimed[j].iter().map(|&k| open[k].0).collect(), id));
                    }
                    id
                }
            };
            let f = &mut det.fronts[idx];
            let (lo, hi) = (panel.at(it, i), panel.at(it, i + 1));
            let s = 0.5 * (panel.r[i] + panel.r[i + 1]);
            f.times.push(t);
            f.s.push(s);
            f.e.push(hi.big_p - lo.big_p);
            f.q_minus.push(lo.q);
            f.q_plus.push(hi.q);
            f.p_minus.push(lo.p);
            f.p_plus.push(hi.p);
            next_open.push((idx, s));
        }
        open = next_open;
    }
    det
}

/// Residuals of the one-dimensional jump relations at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual1d {
    pub t: Vec<f64>,
    /// `ds/dt - (q+ + q-)/2`.
    pub speed: Vec<f64>,
    /// `de/dt + [qp] - [p] ds/dt`.
    pub mass: Vec<f64>,
}

pub fn rh_residual_1d(front: &ShockFront) -> Result<Residual1d> {
    if front.len() < 3 {
        return Err(Error::Invalid(
            "front needs at least three time samples".into(),
        ));
    }
    let v = front.speed();
    let de = front.amplitude_rate();
    let mut out = Residual1d {
        t: front.times.clone(),
        speed: Vec::new(),
        mass: Vec::new(),
    };
    for k in 0..front.len() {
        let jump_qp = front.q_plus[k] * front.p_plus[k] - front.q_minus[k] * front.p_minus[k];
        let jump_p = front.p_plus[k] - front.p_minus[k];
        out.speed
            .push(v[k] - 0.5 * (front.q_plus[k] + front.q_minus[k]));
        out.mass.push(de[k] + jump_qp - jump_p * v[k]);
    }
    Ok(out)
}

/// Residuals of the multi-dimensional relations for `S = r - s(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMultiD {
    pub t: Vec<f64>,
    /// `S_t + u_delta . grad S`.
    pub speed: Vec<f64>,
    /// `d e_hat/dt + div_Gamma(e_hat u_delta) - ([rho u] - [rho] u_delta) . grad S`
    /// in density units, with `e_hat = e / s^{n-1}`.
    pub density: Vec<f64>,
    /// `s^{n-1}` times `density`, comparable with the one-dimensional mass
    /// residual.
    pub density_p_units: Vec<f64>,
}

pub fn rh_residual_multid(front: &ShockFront) -> Result<ResidualMultiD> {
    if front.len() < 3 {
        return Err(Error::Invalid(
            "front needs at least three time samples".into(),
        ));
    }
    let n1 = front.dim as i32 - 1;
    let v = front.speed();
    let de = front.amplitude_rate();
    let mut out = ResidualMultiD {
        t: front.times.clone(),
        speed: Vec::new(),
        density: Vec::new(),
        density_p_units: Vec::new(),
    };
    for k in 0..front.len() {
        let s = front.s[k];
        let w = s.powi(n1);
        let e_hat = front.e[k] / w;
        // the total derivative along the front (the normal-time derivative
        // of a function of t alone), by the product rule
        let de_hat = de[k] / w - n1 as f64 * front.e[k] * v[k] / (w * s);
        let k_mean = mean_curvature(front.dim, s);
        // surface divergence of e_hat u_delta = -2 K G e_hat with G = ds/dt
        let surface = -2.0 * k_mean * v[k] * e_hat;
        let jump_rho_u =
            (front.q_plus[k] * front.p_plus[k] - front.q_minus[k] * front.p_minus[k]) / w;
        let jump_rho = (front.p_plus[k] - front.p_minus[k]) / w;
        // normal flux balance; ds/dt replaces the normal component of
        // u_delta through the first relation
        let flux = -(jump_rho_u - jump_rho * v[k]);
        let res = de_hat + surface - flux;
        out.speed
            .push(-v[k] + 0.5 * (front.q_plus[k] + front.q_minus[k]));
        out.density.push(res);
        out.density_p_units.push(res * w);
    }
    Ok(out)
}

/// Columns `t, s, e, q_plus, q_minus, p_plus, p_minus, res_speed, res_mass,
/// res_multid`; the first line records the bracket orientation.
pub fn write_front_csv<W: Write>(mut w: W, front: &ShockFront) -> Result<()> {
    writeln!(
        w,
        "# [f] = f(s+) - f(s-), s+ on the larger-radius side; n={}",
        front.dim
    )?;
    let r1 = rh_residual_1d(front)?;
    let rm = rh_residual_multid(front)?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "t",
        "s",
        "e",
        "q_plus",
        "q_minus",
        "p_plus",
        "p_minus",
        "res_speed",
        "res_mass",
        "res_multid",
    ])?;
    for k in 0..front.len() {
        wr.write_record([
            fmt_f(front.times[k]),
            fmt_f(front.s[k]),
            fmt_f(front.e[k]),
            fmt_f(front.q_plus[k]),
            fmt_f(front.q_minus[k]),
            fmt_f(front.p_plus[k]),
            fmt_f(front.p_minus[k]),
            fmt_f(r1.speed[k]),
            fmt_f(r1.mass[k]),
            fmt_f(rm.density[k]),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inviscid::solve_panel;
    use crate::profile::ScalarProfile;
    use crate::radial::linspace;

    fn riemann(dim: u32, a: f64, b: f64) -> InviscidProblem {
        let q0 = ScalarProfile::piecewise_constant(vec![0.0, 1.0], vec![a, b]).unwrap();
        let p0 = ScalarProfile::piecewise_constant(vec![0.0, 4.0], vec![1.0, 0.0]).unwrap();
        let zero = ScalarProfile::constant(0.0);
        let mass = ScalarProfile::constant(4.0 * crate::sphere_measure(dim));
        InviscidProblem::new(dim, q0, p0, zero, mass).unwrap()
    }

    fn constant_state(q_minus: f64, q_plus: f64, p: f64, dim: u32) -> ShockFront {
        let times = linspace(0.0, 1.0, 11);
        let v = 0.5 * (q_minus + q_plus);
        let rate = -((q_plus - q_minus) * p);
        ShockFront {
            dim,
            s: times.iter().map(|t| 2.0 + v * t).collect(),
            e: times.iter().map(|t| rate * t).collect(),
            q_plus: vec![q_plus; 11],
            q_minus: vec![q_minus; 11],
            p_plus: vec![p; 11],
            p_minus: vec![p; 11],
            times,
        }
    }

    #[test]
    fn curvature_of_spheres() {
        assert_eq!(mean_curvature(3, 2.0), -0.5);
        assert_eq!(mean_curvature(1, 2.0), 0.0);
    }

    #[test]
    fn colliding_constant_states() {
        let f = constant_state(1.0, -1.0, 1.0, 3);
        // the delta gains mass at rate 2
        assert!((f.amplitude_rate()[4] - 2.0).abs() < 1e-12);
        let r = rh_residual_1d(&f).unwrap();
        assert!(r.speed.iter().chain(&r.mass).all(|v| v.abs() < 1e-12));
        let m = rh_residual_multid(&f).unwrap();
        assert!(m.density.iter().all(|v| v.abs() < 1e-12));
        assert!(f.entropy_ok(1e-12));
    }

    #[test]
    fn one_dimensional_reduction_is_exact() {
        let mut f = constant_state(0.7, 0.1, 0.4, 1);
        f.e.iter_mut()
            .enumerate()
            .for_each(|(k, e)| *e += 0.01 * (k as f64).powi(3));
        let r = rh_residual_1d(&f).unwrap();
        let m = rh_residual_multid(&f).unwrap();
        for k in 0..f.len() {
            assert!((r.mass[k] - m.density[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_panel_has_no_fronts() {
        let p = riemann(2, 0.3, 0.3);
        let panel = solve_panel(&p, linspace(0.05, 3.0, 60), linspace(0.1, 1.0, 5)).unwrap();
        assert!(detect_fronts(&panel, None).fronts.is_empty());
    }

    #[test]
    fn riemann_front_satisfies_the_jump_relations() {
        let p = riemann(3, 1.0, 0.0);
        let panel = solve_panel(&p, linspace(0.05, 3.0, 119), linspace(0.2, 1.0, 9)).unwrap();
        let det = detect_fronts(&panel, None);
        assert_eq!(det.fronts.len(), 1);
        let f = det.fronts[0].refine(&p, 0.05).unwrap();
        for (t, s) in f.times.iter().zip(&f.s) {
            assert!((s - (1.0 + 0.5 * t)).abs() < 1e-9);
        }
        for (t, e) in f.times.iter().zip(&f.e) {
            assert!((e - t).abs() < 1e-6, "e({t}) = {e}");
        }
        let r = rh_residual_1d(&f).unwrap();
        assert!(
            r.speed.iter().chain(&r.mass).all(|v| v.abs() < 1e-6),
            "{r:?}"
        );
        let m = rh_residual_multid(&f).unwrap();
        for k in 0..f.len() {
            assert!(m.density_p_units[k].abs() <= r.mass[k].abs() + 1e-10);
        }
    }
}
