//! Free-space viscous solution in `R^n` through the Hopf-Cole transform.
//!
//! The velocity is the Gaussian-weighted average of the initial gradient,
//! `u = int grad(phi0)(y) W dy / int W dy` with
//! `W = exp(-(|x - y|^2 / (2t) + phi0(y)) / eps)`. For radial potentials the
//! angular integral is done in closed form and the average reduces to a
//! one-dimensional integral in `s = |y|`. Density follows by tracing the
//! characteristic `dX/ds = u(X, s)` back to `s = 0` and multiplying by the
//! Jacobian of the flow map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::poly::Polynomial;
use crate::profile::ScalarProfile;
use crate::quad::{adaptive, GaussLegendre};
use crate::radial::linspace;
use crate::specfun::{i0e, i1e};
use crate::sphere_measure;

pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Potential given by callables, for non-radial data.
#[derive(Clone)]
pub struct GeneralPotential {
    pub value: ScalarFn,
    pub gradient: VectorFn,
    /// Any lower bound of `phi0`; sets the integration window.
    pub lower_bound: f64,
    pub lipschitz: Option<f64>,
}

#[derive(Clone)]
pub enum Potential {
    /// `phi0(x) = int_0^{|x|} q0(s) ds`.
    Radial(ScalarProfile),
    General(GeneralPotential),
}

#[derive(Clone)]
pub enum InitialDensity {
    Radial(ScalarProfile),
    General(ScalarFn),
}

#[derive(Clone)]
pub struct FreespaceProblem {
    pub dim: u32,
    pub epsilon: f64,
    pub potential: Potential,
    pub density: InitialDensity,
    /// Radius of a ball containing the support of `rho0`.
    pub support_radius: f64,
}

impl std::fmt::Debug for FreespaceProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreespaceProblem")
            .field("dim", &self.dim)
            .field("epsilon", &self.epsilon)
            .field("support_radius", &self.support_radius)
            .finish_non_exhaustive()
    }
}

impl FreespaceProblem {
    /// Radial problem with initial velocity profile `q0` and density
    /// profile `rho0` supported in `[0, support_radius]`.
    pub fn radial(
        dim: u32,
        epsilon: f64,
        q0: ScalarProfile,
        rho0: ScalarProfile,
        support_radius: f64,
    ) -> Result<Self> {
        let p = Self {
            dim,
            epsilon,
            potential: Potential::Radial(q0),
            density: InitialDensity::Radial(rho0),
            support_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Invalid(format!(
                "dimension must be 1, 2 or 3, got {}",
                self.dim
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        if !(self.support_radius >= 0.0) {
            return Err(Error::Invalid("support radius must be non-negative".into()));
        }
        if let Potential::General(g) = &self.potential {
            if let Some(l) = g.lipschitz {
                if !l.is_finite() {
                    return Err(Error::NonLipschitz("infinite Lipschitz bound".into()));
                }
            }
        }
        Ok(())
    }

    /// `sup |grad phi0|` when known.
    pub fn lipschitz(&self) -> Option<f64> {
        match &self.potential {
            Potential::Radial(q0) => q0.sup_abs_all(),
            Potential::General(g) => g.lipschitz,
        }
    }

    fn rho0(&self, x: &[f64]) -> f64 {
        match &self.density {
            InitialDensity::Radial(p) => p.eval(norm(x)),
            InitialDensity::General(f) => f(x),
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(log(Lambda) - kappa, Lambda'/Lambda, Lambda''/Lambda)` for the angular
/// average `Lambda_n`: `cosh`, `I_0` and `sinh(k)/k` in 1, 2, 3 dimensions.
fn angular(dim: u32, k: f64) -> (f64, f64, f64) {
    match dim {
        1 => {
            let e = (-2.0 * k).exp();
            ((e).ln_1p() - std::f64::consts::LN_2, k.tanh(), 1.0)
        }
        2 => {
            let i0 = i0e(k);
            if k < 1e-4 {
                let k2 = k * k;
                (i0.ln(), 0.5 * k * (1.0 - k2 / 8.0), 0.5 + k2 / 16.0)
            } else {
                let l1 = i1e(k) / i0;
                (i0.ln(), l1, 1.0 - l1 / k)
            }
        }
        _ => {
            if k < 0.1 {
                let k2 = k * k;
                let l1 =
                    k * (1.0 / 3.0 - k2 / 45.0 + 2.0 * k2 * k2 / 945.0 - k2 * k2 * k2 / 4725.0);
                let l2 = 1.0 / 3.0 + 2.0 * k2 / 45.0 - 4.0 * k2 * k2 / 945.0
                    + 2.0 * k2 * k2 * k2 / 4725.0;
                // log(sinh k / k) - k
                let lg = (k2 / 6.0 - k2 * k2 / 180.0 + k2 * k2 * k2 / 2835.0) - k;
                (lg, l1, l2)
            } else {
                let lg = (-(-2.0 * k).exp_m1() / (2.0 * k)).ln();
                let l1 = 1.0 / k.tanh() - 1.0 / k;
                (lg, l1, 1.0 - 2.0 * l1 / k)
            }
        }
    }
}

/// Cauchy bound on the roots of a polynomial.
fn root_bound(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let lead = c[c.len() - 1];
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|a| (a / lead).abs())
        .fold(0.0, f64::max)
}

/// Radial velocity and its radial derivative at `(r, t)`.
pub fn radial_velocity(
    dim: u32,
    epsilon: f64,
    q0: &ScalarProfile,
    r: f64,
    t: f64,
    with_derivative: bool,
) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("velocity needs t >= 0, got {t}")));
    }
    if t < 1e-13 {
        return Ok((q0.eval(r), q0.derivative(r)));
    }
    let et = epsilon * t;
    // psi(s) = (s - r)^2 / (2t) + int_0^s q0 on each piece meeting [0, inf),
    // as a polynomial in the local variable s - x0
    struct Seg {
        x0: f64,
        lo: f64,
        hi: f64,
        psi: Polynomial,
    }
    let breaks = q0.breaks();
    let quad = Polynomial::new(vec![0.0, 0.0, 0.5 / t]);
    let mut segs: Vec<Seg> = Vec::new();
    for (i, p) in q0.pieces().iter().enumerate() {
        let x0 = breaks[i];
        let lo = if i == 0 { 0.0 } else { x0.max(0.0) };
        let hi = breaks.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if hi <= 0.0 {
            continue;
        }
        let phi = &p.antiderivative() + &Polynomial::constant(q0.integral(0.0, x0));
        let psi = &phi + &quad.shift(x0 - r);
        segs.push(Seg { x0, lo, hi, psi });
    }
    // finite search end for the unbounded last piece
    let far = |seg: &Seg, p: &Polynomial| {
        if seg.hi.is_finite() {
            seg.hi
        } else {
            seg.lo.max(seg.x0) + root_bound(p) + r + 1.0
        }
    };
    let mut crit: Vec<f64> = Vec::new();
    let mut psi_min = f64::INFINITY;
    let mut arg_min = 0.0;
    for seg in &segs {
        let d = seg.psi.derivative();
        let hi = far(seg, &d).max(far(seg, &seg.psi));
        let roots: Vec<f64> = d
            .roots_in(seg.lo - seg.x0, hi - seg.x0)
            .into_iter()
            .map(|u| u + seg.x0)
            .collect();
        let mut cands = vec![seg.lo];
        if seg.hi.is_finite() {
            cands.push(seg.hi);
        }
        cands.extend(&roots);
        crit.extend(roots);
        for s in cands {
            let v = seg.psi.eval(s - seg.x0);
            if v < psi_min {
                psi_min = v;
                arg_min = s;
            }
        }
    }
    if !psi_min.is_finite() {
        return Err(Error::NonLipschitz(
            "potential grows too fast for the Gaussian weight".into(),
        ));
    }
    let level = psi_min + 60.0 * epsilon;
    // sublevel set {psi <= level} as a union of intervals
    let mut pts: Vec<f64> = vec![0.0];
    for seg in &segs {
        let shifted = &seg.psi + &Polynomial::constant(-level);
        let hi = far(seg, &shifted);
        pts.extend(
            shifted
                .roots_in(seg.lo - seg.x0, hi - seg.x0)
                .into_iter()
                .map(|u| u + seg.x0),
        );
        pts.push(hi);
    }
    pts.retain(|v| *v >= 0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let psi_at = |s: f64| {
        let k = segs.partition_point(|g| g.lo <= s).max(1) - 1;
        segs[k].psi.eval(s - segs[k].x0)
    };
    let mut intervals: Vec<Vec<f64>> = Vec::new();
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if psi_at(mid) <= level || (arg_min >= w[0] && arg_min <= w[1]) {
            match intervals.last_mut() {
                Some(last) if *last.last().unwrap() == w[0] => last.push(w[1]),
                _ => intervals.push(vec![w[0], w[1]]),
            }
        }
    }
    if intervals.is_empty() {
        let d = (120.0 * et).sqrt();
        intervals.push(vec![(arg_min - d).max(0.0), arg_min + d]);
    }
    let smax = intervals
        .iter()
        .map(|v| *v.last().unwrap())
        .fold(0.0, f64::max);
    let qscale = q0.sup_abs(0.0, smax).max(1e-300);
    let dscale = smax / et;
    let n1 = (dim - 1) as f64;
    let integrand = |s: f64| -> [f64; 4] {
        if s <= 0.0 && dim > 1 {
            return [0.0; 4];
        }
        let k = r * s / et;
        let (lg, l1, l2) = angular(dim, k);
        // exp(-(psi - psi_min)/eps) with the kinetic part recombined:
        // (s-r)^2/(2t) = (s^2 + r^2)/(2t) - r s / t, and Lambda e^{-kappa}
        let w = (-(psi_at(s) - psi_min) / epsilon + lg + if n1 > 0.0 { n1 * s.ln() } else { 0.0 })
            .exp();
        let q = q0.eval(s);
        let sd = s / et;
        [w, q * l1 * w, sd * l1 * w, q * l2 * sd * w]
    };
    let mut tot = [0.0; 4];
    for iv in &intervals {
        let mut points = iv.clone();
        for &c in &crit {
            if c > iv[0] && c < *iv.last().unwrap() {
                points.push(c);
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let n_comp = if with_derivative { 4 } else { 2 };
        let est = adaptive(
            |s| {
                let mut v = integrand(s);
                if n_comp == 2 {
                    v[2] = 0.0;
                    v[3] = 0.0;
                }
                v
            },
            &points,
            |v| {
                let d = v[0].abs();
                let target = [
                    1e-13 * d,
                    1e-13 * d * qscale,
                    1e-13 * d * dscale,
                    1e-13 * d * dscale * qscale,
                ];
                // rounding in the exponent floors the attainable error
                std::array::from_fn(|k| target[k].max(1e-11 * v[k].abs()))
            },
            20_000,
        );
        for (acc, v) in tot.iter_mut().zip(est.value) {
            *acc += v;
        }
    }
    if !(tot[0] > 0.0) {
        return Err(Error::Underflow { r, t });
    }
    let q = tot[1] / tot[0];
    let q_r = if with_derivative {
        (tot[3] - q * tot[2]) / tot[0]
    } else {
        f64::NAN
    };
    Ok((q, q_r))
}

/// Velocity at a point by tensor Gauss-Legendre quadrature in the scaled
/// variable `y = (x - z) / sqrt(2t)`.
fn general_velocity(
    problem: &FreespaceProblem,
    g: &GeneralPotential,
    x: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    let n = problem.dim as usize;
    let eps = problem.epsilon;
    let phi_x = (g.value)(x);
    if !phi_x.is_finite() {
        return Err(Error::NonLipschitz(format!("phi0 not finite at {x:?}")));
    }
    let half = (phi_x - g.lower_bound + 50.0 * eps).max(0.0).sqrt();
    let c = (2.0 * t).sqrt();
    let order = 8;
    let rule = GaussLegendre::new(order);
    let run = |panels: usize| -> Result<Vec<f64>> {
        let h = 2.0 * half / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = -half + p as f64 * h;
            nodes.extend(rule.mapped(a, a + h));
        }
        let m = nodes.len();
        let total = m.pow(n as u32);
        let mut logs = Vec::with_capacity(total);
        let mut grads = Vec::with_capacity(total);
        let mut z = vec![0.0; n];
        for k in 0..total {
            let mut rem = k;
            let mut ysq = 0.0;
            let mut lw = 0.0;
            for d in 0..n {
                let (y, w) = nodes[rem % m];
                rem /= m;
                z[d] = x[d] - c * y;
                ysq += y * y;
                lw += w.ln();
            }
            let phi = (g.value)(&z);
            let grad = (g.gradient)(&z);
            if !phi.is_finite() || grad.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonLipschitz(format!("gradient not finite at {z:?}")));
            }
            logs.push(lw - (ysq + phi) / eps);
            grads.push(grad);
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut den = 0.0;
        let mut num = vec![0.0; n];
        for (l, gr) in logs.iter().zip(&grads) {
            let w = (l - top).exp();
            den += w;
            for d in 0..n {
                num[d] += w * gr[d];
            }
        }
        Ok(num.into_iter().map(|v| v / den).collect())
    };
    let mut panels = ((2.0 * half) / (0.5 * (0.5 * eps).sqrt())).ceil().max(4.0) as usize;
    let mut prev = run(panels)?;
    let scale = g.lipschitz.unwrap_or(1.0).max(1e-300);
    for _ in 0..3 {
        panels *= 2;
        let next = run(panels)?;
        let diff = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prev = next;
        if diff <= 1e-11 * scale {
            break;
        }
    }
    Ok(prev)
}

/// Velocity `u(x, t)`.
pub fn velocity(problem: &FreespaceProblem, x: &[f64], t: f64) -> Result<Vec<f64>> {
    if x.len() != problem.dim as usize {
        return Err(Error::Invalid(
            "point dimension does not match the problem".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("velocity needs t > 0, got {t}")));
    }
    match &problem.potential {
        Potential::Radial(q0) => {
            let r = norm(x);
            let (q, _) = radial_velocity(problem.dim, problem.epsilon, q0, r, t, false)?;
            Ok(if r == 0.0 {
                vec![0.0; x.len()]
            } else {
                x.iter().map(|v| v / r * q).collect()
            })
        }
        Potential::General(g) => general_velocity(problem, g, x, t),
    }
}

/// Characteristic through `(x, t)` traced back to `s = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristic {
    pub foot: Vec<f64>,
    /// Determinant of the derivative of the backward flow map
    /// `x -> foot(x)`.
    pub jacobian: f64,
}

fn ode() -> Dopri5 {
    Dopri5 {
        rtol: 1e-10,
        atol: 1e-12,
        ..Default::default()
    }
}

/// Backward characteristic and Jacobian. For radial potentials only the
/// radius and `int q_r ds` are integrated; the angular factor
/// `(R0/r)^{n-1}` completes the determinant.
pub fn trace_characteristic(
    problem: &FreespaceProblem,
    x: &[f64],
    t: f64,
) -> Result<Characteristic> {
    if x.len() != problem.dim as usize {
        return Err(Error::Invalid(
            "point dimension does not match the problem".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "characteristics need t > 0, got {t}"
        )));
    }
    let n = problem.dim as usize;
    match &problem.potential {
        Potential::Radial(q0) => {
            let r = norm(x);
            let tr = ode().solve(
                |s, y, d| {
                    let (q, qr) =
                        radial_velocity(problem.dim, problem.epsilon, q0, y[0].max(0.0), s, true)?;
                    d[0] = q;
                    d[1] = qr;
                    Ok(())
                },
                t,
                &[r, 0.0],
                0.0,
            )?;
            let r0 = tr.y[0].max(0.0);
            // tr.y[1] = -int_0^t q_r ds along the path
            let radial_stretch = tr.y[1].exp();
            let jac = if r > 0.0 {
                radial_stretch * (r0 / r).powi(n as i32 - 1)
            } else {
                radial_stretch.powi(n as i32)
            };
            let foot = if r > 0.0 {
                x.iter().map(|v| v / r * r0).collect()
            } else {
                vec![0.0; n]
            };
            Ok(Characteristic {
                foot,
                jacobian: jac,
            })
        }
        Potential::General(_) => {
            // state: position (n) and Y = d(position)/dx (n x n)
            let mut y0 = x.to_vec();
            for i in 0..n {
                for j in 0..n {
                    y0.push(if i == j { 1.0 } else { 0.0 });
                }
            }
            let tr = Dopri5 {
                rtol: 1e-7,
                atol: 1e-9,
                ..Default::default()
            }
            .solve(
                |s, y, d| {
                    let pos = &y[..n];
                    let u = velocity(problem, pos, s.max(1e-12))?;
                    d[..n].copy_from_slice(&u);
                    let h = 1e-5 * (1.0 + norm(pos));
                    let mut grad = vec![vec![0.0; n]; n];
                    for j in 0..n {
                        let mut a = pos.to_vec();
                        let mut b = pos.to_vec();
                        a[j] += h;
                        b[j] -= h;
                        let ua = velocity(problem, &a, s.max(1e-12))?;
                        let ub = velocity(problem, &b, s.max(1e-12))?;
                        for i in 0..n {
                            grad[i][j] = (ua[i] - ub[i]) / (2.0 * h);
                        }
                    }
                    for i in 0..n {
                        for j in 0..n {
                            let mut acc = 0.0;
                            for k in 0..n {
                                acc += grad[i][k] * y[n + k * n + j];
                            }
                            d[n + i * n + j] = acc;
                        }
                    }
                    Ok(())
                },
                t,
                &y0,
                0.0,
            )?;
            let m: Vec<f64> = tr.y[n..].to_vec();
            Ok(Characteristic {
                foot: tr.y[..n].to_vec(),
                jacobian: determinant(&m, n),
            })
        }
    }
}

fn determinant(m: &[f64], n: usize) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
    }
}

/// Density `rho(x, t) = rho0(foot) * jacobian`.
pub fn density(problem: &FreespaceProblem, x: &[f64], t: f64) -> Result<f64> {
    let c = trace_characteristic(problem, x, t)?;
    Ok(problem.rho0(&c.foot) * c.jacobian)
}

/// Radial mass density `p = r^{n-1} rho` at radius `r`.
pub fn radial_p(problem: &FreespaceProblem, r: f64, t: f64) -> Result<f64> {
    let mut x = vec![0.0; problem.dim as usize];
    x[0] = r;
    let rho = density(problem, &x, t)?;
    Ok(r.powi(problem.dim as i32 - 1) * rho)
}

/// Total mass with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub mass: f64,
    pub error: f64,
}

/// `omega_{n-1} int_0^inf r^{n-1} rho dr` for radial problems, by adaptive
/// Gauss-Kronrod quadrature over the transported support with an absolute
/// target of `1e-8` of the initial mass. `error` is the Gauss-Kronrod
/// difference summed over the final panels.
pub fn total_mass(problem: &FreespaceProblem, t: f64) -> Result<MassEstimate> {
    if !matches!(problem.potential, Potential::Radial(_)) {
        return Err(Error::Invalid(
            "total mass is implemented for radial data".into(),
        ));
    }
    let lip = problem
        .lipschitz()
        .ok_or_else(|| Error::NonLipschitz("mass needs a bounded initial velocity".into()))?;
    let rmax = problem.support_radius + lip * t + 1e-9;
    let omega = sphere_measure(problem.dim);
    let m0 = initial_mass(problem)?;
    let mut failure = None;
    let est = adaptive(
        |r| {
            let p = if t == 0.0 {
                Ok(problem.rho0(&[r]) * r.powi(problem.dim as i32 - 1))
            } else {
                radial_p(problem, r, t)
            };
            match p {
                Ok(v) => [v],
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0]
                }
            }
        },
        &linspace(0.0, rmax, 9),
        |_| [1e-8 * m0.abs().max(1e-300) / omega],
        4000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MassEstimate {
        mass: omega * est.value[0],
        error: omega * est.error[0],
    })
}

/// Initial mass `omega int r^{n-1} rho0 dr` by quadrature of the profile.
pub fn initial_mass(problem: &FreespaceProblem) -> Result<f64> {
    let InitialDensity::Radial(rho0) = &problem.density else {
        return Err(Error::Invalid(
            "initial mass is implemented for radial data".into(),
        ));
    };
    let n1 = problem.dim as i32 - 1;
    let rule = GaussLegendre::new(16);
    let mut pts: Vec<f64> = rho0
        .breaks()
        .iter()
        .cloned()
        .filter(|b| *b > 0.0 && *b < problem.support_radius)
        .collect();
    pts.insert(0, 0.0);
    pts.push(problem.support_radius);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += rule.composite(|r| r.powi(n1) * rho0.eval(r), w[0], w[1], 8);
    }
    Ok(sphere_measure(problem.dim) * acc)
}
