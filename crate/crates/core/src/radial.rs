//! Radial fields on tensor grids, the Hopf-Cole state and PDE residuals.
//!
//! A radial solution is stored as `q(r, t)` (radial velocity) and
//! `p(r, t) = r^{n-1} rho(r, t)`; the Cartesian fields are
//! `u(x, t) = x/|x| q(|x|, t)` and `rho(x, t) = p / |x|^{n-1}`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd::derivative_at;

fn check_grid(name: &str, g: &[f64], nonneg: bool) -> Result<()> {
    if g.is_empty() {
        return Err(Error::Invalid(format!("{name} grid is empty")));
    }
    if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    if nonneg && g[0] < 0.0 {
        return Err(Error::Invalid(format!("{name} grid must be non-negative")));
    }
    Ok(())
}

/// Evenly spaced grid including both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub dim: u32,
    pub epsilon: f64,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    /// Row-major by time: `q[it * r.len() + ir]`.
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl RadialField {
    pub fn new(dim: u32, epsilon: f64, r: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Invalid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::Invalid("epsilon must be non-negative".into()));
        }
        check_grid("r", &r, true)?;
        check_grid("t", &t, true)?;
        let n = r.len() * t.len();
        Ok(Self {
            dim,
            epsilon,
            r,
            t,
            q: vec![0.0; n],
            p: vec![0.0; n],
        })
    }

    /// Fill the grid from a pointwise solver, in parallel.
    pub fn from_fn(
        dim: u32,
        epsilon: f64,
        r: Vec<f64>,
        t: Vec<f64>,
        f: impl Fn(f64, f64) -> Result<(f64, f64)> + Sync,
    ) -> Result<Self> {
        let mut out = Self::new(dim, epsilon, r, t)?;
        let nr = out.r.len();
        let vals: Vec<(f64, f64)> = (0..out.q.len())
            .into_par_iter()
            .map(|k| f(out.r[k % nr], out.t[k / nr]))
            .collect::<Result<_>>()?;
        for (k, (q, p)) in vals.into_iter().enumerate() {
            out.q[k] = q;
            out.p[k] = p;
        }
        Ok(out)
    }

    pub fn idx(&self, it: usize, ir: usize) -> usize {
        it * self.r.len() + ir
    }

    pub fn q_at(&self, it: usize, ir: usize) -> f64 {
        self.q[self.idx(it, ir)]
    }

    pub fn p_at(&self, it: usize, ir: usize) -> f64 {
        self.p[self.idx(it, ir)]
    }

    pub fn rho_at(&self, it: usize, ir: usize) -> f64 {
        let r = self.r[ir];
        let p = self.p_at(it, ir);
        if self.dim == 1 {
            p
        } else if r == 0.0 {
            f64::NAN
        } else {
            p / r.powi(self.dim as i32 - 1)
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv_to(std::io::BufWriter::new(f), &[])
    }

    /// CSV with a `# n=.. epsilon=..` comment line, then `r,t,q,p,rho` and
    /// any extra named columns (one value per grid point, same order).
    pub fn write_csv_to<W: Write>(&self, mut w: W, extra: &[(&str, Vec<String>)]) -> Result<()> {
        writeln!(w, "# n={} epsilon={}", self.dim, fmt_f(self.epsilon))?;
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["r", "t", "q", "p", "rho"];
        header.extend(extra.iter().map(|(n, _)| *n));
        wr.write_record(&header)?;
        for it in 0..self.t.len() {
            for ir in 0..self.r.len() {
                let k = self.idx(it, ir);
                let mut row = vec![
                    fmt_f(self.r[ir]),
                    fmt_f(self.t[it]),
                    fmt_f(self.q[k]),
                    fmt_f(self.p[k]),
                    fmt_f(self.rho_at(it, ir)),
                ];
                row.extend(extra.iter().map(|(_, v)| v[k].clone()));
                wr.write_record(&row)?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Whitespace-separated columns for plotting tools.
    pub fn write_dat<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# r t q p rho")?;
        for it in 0..self.t.len() {
            for ir in 0..self.r.len() {
                let k = self.idx(it, ir);
                writeln!(
                    w,
                    "{} {} {} {} {}",
                    fmt_f(self.r[ir]),
                    fmt_f(self.t[it]),
                    fmt_f(self.q[k]),
                    fmt_f(self.p[k]),
                    fmt_f(self.rho_at(it, ir))
                )?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Velocity and density of the Cartesian lift at `x` (bilinear in `r`
    /// and `t`); `x` must lie inside the grid's radial and time range.
    pub fn lift_to_vector(&self, x: &[f64], t: f64) -> Result<(Vec<f64>, f64)> {
        if x.len() != self.dim as usize {
            return Err(Error::Invalid(
                "point dimension does not match the field".into(),
            ));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (ir, wr) = bracket(&self.r, r)?;
        let (it, wt) = bracket(&self.t, t)?;
        let interp = |v: &[f64]| {
            let a = v[self.idx(it, ir)] * (1.0 - wr) + v[self.idx(it, ir + 1)] * wr;
            let b = v[self.idx(it + 1, ir)] * (1.0 - wr) + v[self.idx(it + 1, ir + 1)] * wr;
            a * (1.0 - wt) + b * wt
        };
        let q = interp(&self.q);
        let p = interp(&self.p);
        let u = if r == 0.0 {
            vec![0.0; x.len()]
        } else {
            x.iter().map(|v| v / r * q).collect()
        };
        let rho = if self.dim == 1 {
            p
        } else {
            p / r.powi(self.dim as i32 - 1)
        };
        Ok((u, rho))
    }
}

/// Floats in the output files: round-trip exact, fixed layout.
pub fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn bracket(g: &[f64], x: f64) -> Result<(usize, f64)> {
    if g.len() < 2 {
        return Err(Error::Invalid(
            "interpolation needs at least two grid points".into(),
        ));
    }
    if x < g[0] || x > *g.last().unwrap() {
        return Err(Error::Domain(format!(
            "{x} outside grid [{}, {}]",
            g[0],
            g.last().unwrap()
        )));
    }
    let i = (g.partition_point(|&v| v <= x).max(1) - 1).min(g.len() - 2);
    Ok((i, (x - g[i]) / (g[i + 1] - g[i])))
}

/// Hopf-Cole state `a(r, t) > 0` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfColeState {
    pub dim: u32,
    pub epsilon: f64,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub a: Vec<f64>,
}

impl HopfColeState {
    pub fn from_fn(
        dim: u32,
        epsilon: f64,
        r: Vec<f64>,
        t: Vec<f64>,
        f: impl Fn(f64, f64) -> Result<f64> + Sync,
    ) -> Result<Self> {
        check_grid("r", &r, true)?;
        check_grid("t", &t, true)?;
        let nr = r.len();
        let a: Vec<f64> = (0..nr * t.len())
            .into_par_iter()
            .map(|k| f(r[k % nr], t[k / nr]))
            .collect::<Result<_>>()?;
        if let Some(k) = a.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::Positivity(format!(
                "a = {} at r = {}, t = {}",
                a[k],
                r[k % nr],
                t[k / nr]
            )));
        }
        Ok(Self {
            dim,
            epsilon,
            r,
            t,
            a,
        })
    }

    fn at(&self, it: usize, ir: usize) -> f64 {
        self.a[it * self.r.len() + ir]
    }
}

/// Pointwise residuals on a grid, row-major by time.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResidualField {
    /// Max `|value|` over grid points at least `skip` points away from the
    /// grid edges in both directions.
    pub fn max_interior(&self, skip: usize) -> f64 {
        let nr = self.r.len();
        let nt = self.t.len();
        let mut m = 0.0f64;
        for it in skip..nt.saturating_sub(skip) {
            for ir in skip..nr.saturating_sub(skip) {
                m = m.max(self.values[it * nr + ir].abs());
            }
        }
        m
    }
}

const R_STENCIL: usize = 5;
const T_STENCIL: usize = 3;

fn need_points(nr: usize, nt: usize) -> Result<()> {
    if nr < R_STENCIL || nt < T_STENCIL {
        return Err(Error::Invalid(format!(
            "residuals need at least {R_STENCIL} radial and {T_STENCIL} time points"
        )));
    }
    Ok(())
}

/// Residuals of `q_t + q q_r = (eps/2)(q_rr + (n-1)/r q_r - (n-1) q / r^2)`
/// and `p_t + (p q)_r = 0`, with fourth-order differences in `r` and
/// second-order differences in `t`.
pub fn viscous_residual(field: &RadialField) -> Result<(ResidualField, ResidualField)> {
    let (nr, nt) = (field.r.len(), field.t.len());
    need_points(nr, nt)?;
    let n1 = (field.dim - 1) as f64;
    let eps = field.epsilon;
    let mut rq = vec![0.0; nr * nt];
    let mut rp = vec![0.0; nr * nt];
    let flux: Vec<f64> = field.p.iter().zip(&field.q).map(|(p, q)| p * q).collect();
    for it in 0..nt {
        for ir in 0..nr {
            let r = field.r[ir];
            let row = |v: &[f64], k: usize| v[it * nr + k];
            let col = |v: &[f64], k: usize| v[k * nr + ir];
            let q = field.q_at(it, ir);
            let q_r = derivative_at(&field.r, |k| row(&field.q, k), ir, 1, R_STENCIL);
            let q_rr = derivative_at(&field.r, |k| row(&field.q, k), ir, 2, R_STENCIL);
            let q_t = derivative_at(&field.t, |k| col(&field.q, k), it, 1, T_STENCIL);
            let p_t = derivative_at(&field.t, |k| col(&field.p, k), it, 1, T_STENCIL);
            let f_r = derivative_at(&field.r, |k| row(&flux, k), ir, 1, R_STENCIL);
            let geom = if n1 > 0.0 {
                n1 / r * q_r - n1 * q / (r * r)
            } else {
                0.0
            };
            rq[it * nr + ir] = q_t + q * q_r - 0.5 * eps * (q_rr + geom);
            rp[it * nr + ir] = p_t + f_r;
        }
    }
    Ok((
        ResidualField {
            r: field.r.clone(),
            t: field.t.clone(),
            values: rq,
        },
        ResidualField {
            r: field.r.clone(),
            t: field.t.clone(),
            values: rp,
        },
    ))
}

/// Residual of `a_t = (eps/2)(a_rr + (n-1)/r a_r)`, relative to `a`.
pub fn heat_residual(state: &HopfColeState) -> Result<ResidualField> {
    let (nr, nt) = (state.r.len(), state.t.len());
    need_points(nr, nt)?;
    let n1 = (state.dim - 1) as f64;
    let mut out = vec![0.0; nr * nt];
    for it in 0..nt {
        for ir in 0..nr {
            let r = state.r[ir];
            let a = state.at(it, ir);
            let a_r = derivative_at(&state.r, |k| state.at(it, k), ir, 1, R_STENCIL);
            let a_rr = derivative_at(&state.r, |k| state.at(it, k), ir, 2, R_STENCIL);
            let a_t = derivative_at(&state.t, |k| state.at(k, ir), it, 1, T_STENCIL);
            let geom = if n1 > 0.0 { n1 / r * a_r } else { 0.0 };
            out[it * nr + ir] = (a_t - 0.5 * state.epsilon * (a_rr + geom)) / a;
        }
    }
    Ok(ResidualField {
        r: state.r.clone(),
        t: state.t.clone(),
        values: out,
    })
}

/// `q = -eps a_r / a` with fourth-order radial differences; `p` is left
/// at zero.
pub fn velocity_from_hopf_cole(state: &HopfColeState) -> Result<RadialField> {
    let nr = state.r.len();
    if nr < R_STENCIL {
        return Err(Error::Invalid("need at least five radial points".into()));
    }
    let mut f = RadialField::new(state.dim, state.epsilon, state.r.clone(), state.t.clone())?;
    for it in 0..state.t.len() {
        for ir in 0..nr {
            let a = state.at(it, ir);
            let a_r = derivative_at(&state.r, |k| state.at(it, k), ir, 1, R_STENCIL);
            let k = f.idx(it, ir);
            f.q[k] = -state.epsilon * a_r / a;
        }
    }
    Ok(f)
}

/// Cartesian residuals of `u_t + (u.grad)u - (eps/2) Lap u` (max over
/// components) and `rho_t + div(rho u)` for the lift of radial profiles
/// `q(r, t)`, `rho(r, t)`, by central differences of step `h`.
pub fn cartesian_residual(
    dim: usize,
    epsilon: f64,
    q: impl Fn(f64, f64) -> f64,
    rho: impl Fn(f64, f64) -> f64,
    x: &[f64],
    t: f64,
    h: f64,
) -> (f64, f64) {
    let norm = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u = |y: &[f64], s: f64, i: usize| {
        let r = norm(y);
        if r == 0.0 {
            0.0
        } else {
            y[i] / r * q(r, s)
        }
    };
    let dens = |y: &[f64], s: f64| rho(norm(y), s);
    let shifted = |j: usize, d: f64| {
        let mut y = x.to_vec();
        y[j] += d;
        y
    };
    let mut mom = 0.0f64;
    for i in 0..dim {
        let ut = (u(x, t + h, i) - u(x, t - h, i)) / (2.0 * h);
        let mut adv = 0.0;
        let mut lap = 0.0;
        for j in 0..dim {
            let up = u(&shifted(j, h), t, i);
            let um = u(&shifted(j, -h), t, i);
            adv += u(x, t, j) * (up - um) / (2.0 * h);
            lap += (up - 2.0 * u(x, t, i) + um) / (h * h);
        }
        mom = mom.max((ut + adv - 0.5 * epsilon * lap).abs());
    }
    let rt = (dens(x, t + h) - dens(x, t - h)) / (2.0 * h);
    let mut div = 0.0;
    for j in 0..dim {
        let yp = shifted(j, h);
        let ym = shifted(j, -h);
        div += (dens(&yp, t) * u(&yp, t, j) - dens(&ym, t) * u(&ym, t, j)) / (2.0 * h);
    }
    (mom, (rt + div).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // q = r / (1 + t), rho = (1 + t)^{-n} rho0(r / (1 + t)) solves the
    // viscous system in every dimension (u linear in x has zero Laplacian).
    fn exact(n: u32) -> impl Fn(f64, f64) -> Result<(f64, f64)> + Sync {
        move |r: f64, t: f64| {
            let s = 1.0 + t;
            let rho = (-(r / s).powi(2)).exp() / s.powi(n as i32);
            Ok((r / s, r.powi(n as i32 - 1) * rho))
        }
    }

    #[test]
    fn residuals_vanish_for_linear_flow() {
        for n in 1..=3 {
            let f = RadialField::from_fn(
                n,
                0.3,
                linspace(0.2, 2.0, 41),
                linspace(0.1, 1.0, 41),
                exact(n),
            )
            .unwrap();
            let (rq, rp) = viscous_residual(&f).unwrap();
            assert!(rq.max_interior(0) < 2e-3, "n={n} {}", rq.max_interior(0));
            assert!(rp.max_interior(0) < 2e-3, "n={n} {}", rp.max_interior(0));
        }
    }

    #[test]
    fn residual_converges_at_second_order_in_time() {
        let mut errs = Vec::new();
        for k in [20usize, 40, 80] {
            let f = RadialField::from_fn(
                3,
                0.3,
                linspace(0.2, 2.0, 4 * k + 1),
                linspace(0.1, 1.0, k + 1),
                exact(3),
            )
            .unwrap();
            errs.push(viscous_residual(&f).unwrap().1.max_interior(1));
        }
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 1.8, "{errs:?}");
    }

    #[test]
    fn hopf_cole_heat_kernel() {
        // a = t^{-n/2} exp(-r^2 / (2 eps t)) solves the radial heat equation
        for n in 1..=3u32 {
            let eps = 0.5;
            let st = HopfColeState::from_fn(
                n,
                eps,
                linspace(0.1, 1.0, 161),
                linspace(1.0, 2.0, 161),
                |r, t| Ok(t.powf(-(n as f64) / 2.0) * (-r * r / (2.0 * eps * t)).exp()),
            )
            .unwrap();
            let res = heat_residual(&st).unwrap().max_interior(0);
            assert!(res < 5e-4, "n={n}: {res}");
            let v = velocity_from_hopf_cole(&st).unwrap();
            // q = r / t
            assert_relative_eq!(v.q_at(80, 80), v.r[80] / v.t[80], max_relative = 1e-7);
        }
    }

    #[test]
    fn lift_and_cartesian_consistency() {
        let f = RadialField::from_fn(
            2,
            0.1,
            linspace(0.0, 3.0, 301),
            linspace(0.0, 1.0, 101),
            exact(2),
        )
        .unwrap();
        let (u, rho) = f.lift_to_vector(&[0.6, 0.8], 0.5).unwrap();
        assert_relative_eq!(u[0], 0.6 / 1.5, max_relative = 1e-6);
        assert_relative_eq!(u[1], 0.8 / 1.5, max_relative = 1e-6);
        assert_relative_eq!(
            rho,
            (-(1.0f64 / 1.5).powi(2)).exp() / 2.25,
            max_relative = 1e-3
        );
        for n in 1..=3usize {
            let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.2 * i as f64).collect();
            let (m, c) = cartesian_residual(
                n,
                0.2,
                |r, t| r / (1.0 + t),
                |r, t| (-(r / (1.0 + t)).powi(2)).exp() / (1.0 + t).powi(n as i32),
                &x,
                0.4,
                1e-4,
            );
            assert!(m < 1e-6 && c < 1e-6, "n={n}: {m} {c}");
        }
        assert!(f.lift_to_vector(&[5.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn csv_layout() {
        let f = RadialField::from_fn(3, 0.25, vec![0.5, 1.0], vec![1.0], exact(3)).unwrap();
        let mut buf = Vec::new();
        f.write_csv_to(
            &mut buf,
            &[("branch", vec!["interior".into(), "boundary".into()])],
        )
        .unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# n=3 epsilon=2.5000000000000000e-1");
        assert_eq!(lines[1], "r,t,q,p,rho,branch");
        assert!(lines[2].starts_with("5.0000000000000000e-1,1.0000000000000000e0,"));
        assert!(lines[3].ends_with(",boundary"));
    }

    #[test]
    fn grid_validation() {
        assert!(RadialField::new(4, 0.1, vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(RadialField::new(2, 0.1, vec![1.0, 0.5], vec![0.0]).is_err());
        assert!(
            HopfColeState::from_fn(2, 0.1, vec![0.5, 1.0], vec![1.0], |_, _| Ok(-1.0)).is_err()
        );
    }
}
