use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::config::{CompareKind, Mode, Scenario};
use super::report::{Check, Report};
use super::ScenarioError;
use crate::bounded::{BoundedProblem, BoundedSolution};
use crate::error::Result;
use crate::freespace::{self, radial_velocity};
use crate::inviscid::{self, solve_panel, weak_boundary_check, InviscidPanel, InviscidProblem};
use crate::oracles::viscous::{fd_viscous_solve, interpolate, BoundaryCondition, ViscousConfig};
use crate::oracles::{brute_force_q, sticky_particle_run, Particle};
use crate::radial::{fmt_f, heat_residual, linspace, RadialField};
use crate::shockfront::{
    detect_fronts, rh_residual_1d, rh_residual_multid, write_front_csv, ShockFront,
};
use crate::specfun::{find_eigenvalues, find_eigenvalues_with_step};

/// Global scaling of every check tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    out: &'a Path,
    scale: f64,
    report: Report,
}

impl Ctx<'_> {
    fn tol(&self, name: &str, default: f64) -> f64 {
        self.scenario
            .tolerances
            .get(name)
            .copied()
            .unwrap_or(default)
            * self.scale
    }

    fn at_most(&mut self, name: &str, value: f64, default: f64) {
        let tol = self.tol(name, default);
        self.report.checks.push(Check::at_most(name, value, tol));
    }

    /// Lower bounds are not scaled.
    fn at_least(&mut self, name: &str, value: f64, default: f64) {
        let tol = self
            .scenario
            .tolerances
            .get(name)
            .copied()
            .unwrap_or(default);
        self.report.checks.push(Check::at_least(name, value, tol));
    }

    fn create(&mut self, file: &str) -> Result<BufWriter<File>> {
        self.report.artifacts.push(file.into());
        Ok(BufWriter::new(File::create(self.out.join(file))?))
    }

    fn write_field(&mut self, field: &RadialField, extra: &[(&str, Vec<String>)]) -> Result<()> {
        field.write_csv_to(self.create("solution.csv")?, extra)?;
        let mut w = self.create("solution.dat")?;
        field.write_dat(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn note(&mut self, s: &str) {
        self.report.notes.push(s.into());
    }
}

/// Validates, runs and writes all artifacts plus `run_report.txt` into
/// `out_dir`. Failed checks are reported, not returned as errors.
pub fn run_scenario(
    scenario: &Scenario,
    out_dir: &Path,
    tolerances: Tolerances,
) -> std::result::Result<Report, ScenarioError> {
    scenario.validate()?;
    if !(tolerances.scale > 0.0) {
        return Err(ScenarioError::Validation(
            "tolerance scale must be positive".into(),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| ScenarioError::Run(e.into()))?;
    let mut cx = Ctx {
        scenario,
        out: out_dir,
        scale: tolerances.scale,
        report: Report {
            name: scenario.name.clone(),
            mode: scenario.mode.name().into(),
            ..Default::default()
        },
    };
    if tolerances.scale != 1.0 {
        cx.report.param("tolerance_scale", tolerances.scale);
    }
    match scenario.mode {
        Mode::Eigen => run_eigen(&mut cx)?,
        Mode::Freespace => run_freespace(&mut cx)?,
        Mode::Ball | Mode::Annulus => run_bounded(&mut cx)?,
        Mode::Inviscid => run_inviscid(&mut cx)?,
        Mode::VerifyRh => run_verify_rh(&mut cx)?,
        Mode::OracleCompare => match scenario.compare()?.kind {
            CompareKind::SeriesFd => run_series_fd(&mut cx)?,
            CompareKind::VanishingViscosity => run_sweep(&mut cx)?,
        },
    }
    cx.report.write(out_dir)?;
    Ok(cx.report)
}

fn run_eigen(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let e = cx.scenario.eigen()?.clone();
    let problem = e.problem()?;
    cx.report
        .param("case", format!("{:?}", e.case).to_lowercase());
    cx.report.param("count", e.count);
    let list = find_eigenvalues(&problem, e.count)?;
    let half = find_eigenvalues_with_step(&problem, e.count, 0.5 * problem.scan_step())?;
    let mut w = csv::Writer::from_writer(cx.create("eigenvalues.csv")?);
    w.write_record(["index", "root", "residual"])
        .map_err(crate::Error::from)?;
    for (k, (v, r)) in list.values.iter().zip(&list.residuals).enumerate() {
        w.write_record([k.to_string(), fmt_f(*v), fmt_f(*r)])
            .map_err(crate::Error::from)?;
    }
    w.flush().map_err(crate::Error::from)?;
    let residual = list.residuals.iter().cloned().fold(0.0, f64::max);
    let drift = list
        .values
        .iter()
        .zip(&half.values)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max);
    let missing = (list.values.len() != half.values.len()) as usize as f64;
    cx.at_most("max_residual", residual, 1e-10);
    cx.at_most("half_step_drift", drift + missing, 1e-9);
    Ok(())
}

fn run_freespace(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let f = cx.scenario.freespace()?.clone();
    let g = *cx.scenario.grid()?;
    let problem = f.problem()?;
    cx.report.param("dim", f.dim);
    cx.report.param("epsilon", f.epsilon);
    let q0 = f.q0.clone();
    let field = RadialField::from_fn(f.dim, f.epsilon, g.r.points(), g.t.points(), |r, t| {
        if t == 0.0 {
            return Ok((q0.eval(r), r.powi(f.dim as i32 - 1) * f.rho0.eval(r)));
        }
        let (q, _) = radial_velocity(f.dim, f.epsilon, &q0, r, t, false)?;
        Ok((q, freespace::radial_p(&problem, r, t)?))
    })?;
    cx.write_field(&field, &[])?;

    if f.bound_samples > 0 {
        let sup = f
            .q0
            .sup_abs_all()
            .ok_or_else(|| ScenarioError::Validation("velocity bound needs bounded q0".into()))?;
        let mut rng = StdRng::seed_from_u64(f.seed);
        let t_lo = g.t.from.max(1e-6);
        let samples: Vec<(Vec<f64>, f64)> = (0..f.bound_samples)
            .map(|_| {
                let x = (0..f.dim)
                    .map(|_| rng.gen_range(-g.r.to..=g.r.to))
                    .collect();
                (x, rng.gen_range(t_lo..=g.t.to))
            })
            .collect();
        let worst = samples
            .par_iter()
            .map(|(x, t)| {
                let u = freespace::velocity(&problem, x, *t)?;
                Ok(u.iter().map(|v| v * v).sum::<f64>().sqrt())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        cx.report.param("bound_samples", f.bound_samples);
        cx.at_most("velocity_bound_excess", worst - sup, 1e-8);
    }

    if !f.mass_times.is_empty() {
        let m0 = freespace::initial_mass(&problem)?;
        let mut drift: f64 = 0.0;
        for &t in &f.mass_times {
            let m = freespace::total_mass(&problem, t)?;
            drift = drift.max((m.mass - m0).abs() / m0.abs().max(1e-300));
        }
        cx.at_most("mass_drift", drift, 1e-5);
    }

    if let Some(d) = f.decay {
        let rs = linspace(0.0, d.r_max, 201);
        let peak = |t: f64| -> Result<f64> {
            let v = rs
                .par_iter()
                .map(|&r| Ok(radial_velocity(f.dim, f.epsilon, &q0, r, t, false)?.0.abs()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(v.into_iter().fold(0.0, f64::max))
        };
        let (a, b) = (peak(d.early)?, peak(d.late)?);
        cx.report.param("decay_early_max", fmt_f(a));
        cx.report.param("decay_late_max", fmt_f(b));
        cx.at_most("decay_ratio", b / a.max(1e-300), d.ratio);
    }

    if f.linear_reference {
        let xs: Vec<f64> = linspace(-g.r.to, g.r.to, 2 * g.r.count + 1)
            .into_iter()
            .filter(|x| x.abs() > 1e-9 * g.r.to)
            .collect();
        let ts: Vec<f64> = g.t.points().into_iter().filter(|t| *t > 0.0).collect();
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
            .collect();
        let err = pts
            .par_iter()
            .map(|&(x, t)| {
                let mut p = vec![0.0; f.dim as usize];
                p[0] = x;
                let u = freespace::velocity(&problem, &p, t)?[0];
                let exact = x / (1.0 + t);
                Ok((u - exact).abs() / exact.abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        cx.at_most("linear_flow_error", err, 1e-6);
    }
    Ok(())
}

fn bounded_solution(cx: &mut Ctx) -> std::result::Result<BoundedSolution, ScenarioError> {
    let b = cx.scenario.bounded()?.clone();
    let problem = b.problem()?;
    cx.report
        .param("case", format!("{:?}", b.case).to_lowercase());
    cx.report.param("r_inner", b.r_inner);
    cx.report.param("r_outer", b.r_outer);
    cx.report.param("epsilon", b.epsilon);
    cx.report.param("q_inner", b.q_inner);
    cx.report.param("q_outer", b.q_outer);
    cx.report.param("terms", b.terms);
    Ok(BoundedSolution::new(problem, b.options())?)
}

/// Observed order of the heat residual under halving of both steps.
fn heat_order(
    sol: &BoundedSolution,
    r: (f64, f64),
    t: (f64, f64),
    n: usize,
) -> Result<(f64, f64, f64)> {
    let level = |k: usize| -> Result<f64> {
        let (nr, nt) = (n * k + 1, n * k + 1);
        let st = sol.hopf_cole_state(linspace(r.0, r.1, nr), linspace(t.0, t.1, nt))?;
        Ok(heat_residual(&st)?.max_interior(2 * k))
    };
    let (e1, e2) = (level(1)?, level(2)?);
    Ok(((e1 / e2).log2(), e1, e2))
}

fn run_bounded(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let sol = bounded_solution(cx)?;
    let b = cx.scenario.bounded()?.clone();
    let g = *cx.scenario.grid()?;
    let field = sol.field(g.r.points(), g.t.points())?;
    cx.write_field(&field, &[])?;
    let l = sol.problem.length();
    let eps = sol.problem.epsilon;
    cx.report.param("series_floor", fmt_f(sol.t_floor()));
    cx.note("convention: times below the series floor use a finite-difference heat solve");

    // Robin condition once the series has settled
    let settled = 0.05 * 2.0 * l * l / eps;
    let robin_times: Vec<f64> = g.t.points().into_iter().filter(|t| *t >= settled).collect();
    if !robin_times.is_empty() {
        let mut worst: f64 = 0.0;
        for t in robin_times {
            worst = worst.max(sol.robin_residual(t)?);
        }
        cx.at_most("robin_residual", worst, 1e-6);
    }

    if b.heat_refinement {
        let t0 = g.t.from.max(sol.t_floor() * 1.01);
        let pad = 0.05 * l;
        let (order, e1, e2) = heat_order(
            &sol,
            (sol.problem.r_inner + pad, sol.problem.r_outer - pad),
            (t0, t0.max(g.t.to)),
            40,
        )?;
        cx.report.param("heat_residual_coarse", fmt_f(e1));
        cx.report.param("heat_residual_fine", fmt_f(e2));
        cx.at_least("heat_residual_order", order, 1.8);
    }

    if !b.flux_times.is_empty() {
        let mut worst: f64 = 0.0;
        let mut w = csv::Writer::from_writer(cx.create("mass_flux.csv")?);
        w.write_record(["t", "mass", "dm_dt", "flux", "residual"])
            .map_err(crate::Error::from)?;
        for &t in &b.flux_times {
            let h = 1e-3 * t.max(1e-2);
            let dm = (sol.mass(t + h)?.mass - sol.mass(t - h)?.mass) / (2.0 * h);
            let flux = sol.boundary_flux(t)?;
            let res = (dm + flux).abs();
            worst = worst.max(res);
            w.write_record([
                fmt_f(t),
                fmt_f(sol.mass(t)?.mass),
                fmt_f(dm),
                fmt_f(flux),
                fmt_f(res),
            ])
            .map_err(crate::Error::from)?;
        }
        w.flush().map_err(crate::Error::from)?;
        cx.at_most("mass_flux_residual", worst, 1e-4);
    }

    if let Some(t) = b.large_time {
        let gap =
            g.r.points()
                .iter()
                .map(|&r| Ok((sol.velocity(r, t)? - sol.large_time_velocity(r)).abs()))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
        cx.report.param("spectral_gap", fmt_f(sol.spectral_gap()));
        cx.at_most("large_time_gap", gap, 1e-6);
    }
    Ok(())
}

fn panel_field(problem: &InviscidProblem, panel: &InviscidPanel) -> Result<RadialField> {
    let mut f = RadialField::new(problem.dim, 0.0, panel.r.clone(), panel.t.clone())?;
    for (k, pt) in panel.points.iter().enumerate() {
        f.q[k] = pt.q;
        f.p[k] = pt.p;
    }
    Ok(f)
}

fn inviscid_panel(
    cx: &mut Ctx,
) -> std::result::Result<(InviscidProblem, InviscidPanel), ScenarioError> {
    let c = cx.scenario.inviscid()?.clone();
    let g = *cx.scenario.grid()?;
    let problem = c.problem()?;
    cx.report.param("dim", c.dim);
    cx.report
        .param("initial_mass", fmt_f(problem.initial_mass()));
    let panel = solve_panel(&problem, g.r.points(), g.t.points())?;
    panel.write_csv_to(cx.create("solution.csv")?)?;
    let mut w = cx.create("solution.dat")?;
    panel_field(&problem, &panel)?.write_dat(&mut w)?;
    w.flush().map_err(crate::Error::from)?;
    cx.note("convention: P(r, t) = -(mass outside radius r) divided by the sphere measure");
    Ok((problem, panel))
}

fn write_fronts(cx: &mut Ctx, fronts: &[ShockFront]) -> Result<()> {
    for (k, f) in fronts.iter().enumerate() {
        if f.len() >= 3 {
            write_front_csv(cx.create(&format!("front_{k}.csv"))?, f)?;
        }
    }
    Ok(())
}

fn run_inviscid(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let (problem, panel) = inviscid_panel(cx)?;
    let c = cx.scenario.inviscid()?.clone();
    let det = detect_fronts(&panel, None);
    cx.report.param("fronts", det.fronts.len());
    write_fronts(cx, &det.fronts)?;

    let times: Vec<f64> = panel.t.clone();
    let rep = weak_boundary_check(&problem, &times)?;
    {
        let mut w = csv::Writer::from_writer(cx.create("boundary.csv")?);
        w.write_record([
            "t",
            "q_origin",
            "q_b",
            "mass",
            "p_b",
            "velocity_ok",
            "mass_ok",
        ])
        .map_err(crate::Error::from)?;
        for row in &rep.rows {
            w.write_record([
                fmt_f(row.t),
                fmt_f(row.q_origin),
                fmt_f(row.q_b),
                fmt_f(row.mass),
                fmt_f(row.p_b),
                row.velocity_ok.to_string(),
                row.mass_ok.to_string(),
            ])
            .map_err(crate::Error::from)?;
        }
        w.flush().map_err(crate::Error::from)?;
    }
    cx.at_most("boundary_violations", rep.violations() as f64, 0.0);

    if let Some(bf) = c.brute_force {
        let rs = bf.r.points();
        let ts = bf.t.points();
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .flat_map(|&t| rs.iter().map(move |&r| (r, t)))
            .collect();
        let rows = pts
            .par_iter()
            .map(|&(r, t)| {
                let m = inviscid::minimize_paths(&problem, r, t)?;
                let b = brute_force_q(&problem, r, t, bf.density)?;
                Ok((r, t, m.value, b.value))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut w = csv::Writer::from_writer(cx.create("comparison.csv")?);
        w.write_record(["r", "t", "value", "brute_force", "difference"])
            .map_err(crate::Error::from)?;
        let mut worst: f64 = 0.0;
        for (r, t, a, b) in rows {
            worst = worst.max((a - b).abs());
            w.write_record([fmt_f(r), fmt_f(t), fmt_f(a), fmt_f(b), fmt_f(a - b)])
                .map_err(crate::Error::from)?;
        }
        w.flush().map_err(crate::Error::from)?;
        cx.report.param("brute_force_density", bf.density);
        cx.at_most("brute_force_gap", worst, 1e-4);
    }
    Ok(())
}

fn run_verify_rh(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let (problem, panel) = inviscid_panel(cx)?;
    let c = cx.scenario.inviscid()?.clone();
    let g = *cx.scenario.grid()?;
    let det = detect_fronts(&panel, None);
    let width = 2.0 * (g.r.to - g.r.from) / (g.r.count - 1) as f64;
    let fronts = det
        .fronts
        .iter()
        .filter(|f| f.len() >= 3)
        .map(|f| f.refine(&problem, width))
        .collect::<Result<Vec<_>>>()?;
    cx.report.param("fronts", fronts.len());
    cx.report.param("merges", det.merges.len());
    cx.note("convention: [f] = f(s+) - f(s-) with s+ on the larger-radius side");
    if fronts.is_empty() {
        cx.at_least("fronts_found", 0.0, 1.0);
        return Ok(());
    }
    write_fronts(cx, &fronts)?;
    let (mut speed, mut mass, mut excess_density, mut excess_speed): (f64, f64, f64, f64) =
        (0.0, 0.0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut entropy_failures = 0.0;
    for f in &fronts {
        let r1 = rh_residual_1d(f)?;
        let rm = rh_residual_multid(f)?;
        for k in 0..f.len() {
            speed = speed.max(r1.speed[k].abs());
            mass = mass.max(r1.mass[k].abs());
            excess_density = excess_density.max(rm.density_p_units[k].abs() - r1.mass[k].abs());
            excess_speed = excess_speed.max(rm.speed[k].abs() - r1.speed[k].abs());
        }
        if !f.entropy_ok(1e-9) {
            entropy_failures += 1.0;
        }
    }
    cx.at_most("rh_speed_residual", speed, 1e-3);
    cx.at_most("rh_mass_residual", mass, 1e-3);
    cx.at_most("multid_density_excess", excess_density, 1e-10);
    cx.at_most("multid_speed_excess", excess_speed, 1e-10);
    cx.at_most("entropy_failures", entropy_failures, 0.0);

    if let Some(st) = c.sticky {
        if problem.q_b.max_on(0.0, g.t.to) > 0.0 {
            cx.note("sticky particles skipped: inflow at the origin is not injected");
            return Ok(());
        }
        // strongest front at the last sample
        let main = fronts
            .iter()
            .max_by(|a, b| a.e[a.len() - 1].abs().total_cmp(&b.e[b.len() - 1].abs()))
            .expect("non-empty");
        let h = st.extent / st.particles as f64;
        let particles: Vec<Particle> = (0..st.particles)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let m = problem.p0.integral(a, b);
                let v = problem.q0.integral(a, b) / h;
                Particle {
                    r: 0.5 * (a + b),
                    m,
                    v,
                }
            })
            .filter(|p| p.m > 0.0)
            .collect();
        let run = sticky_particle_run(particles, &main.times)?;
        run.write_csv_to(cx.create("particles.csv")?)?;
        let gap = (0..main.len())
            .map(|k| (run.heaviest(k).r - main.s[k]).abs())
            .fold(0.0, f64::max);
        cx.report.param("particles", st.particles);
        cx.at_most("sticky_front_gap", gap, 2e-2);
    }
    Ok(())
}

fn run_series_fd(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let sol = bounded_solution(cx)?;
    let c = cx.scenario.compare()?.clone();
    let g = *cx.scenario.grid()?;
    let p: &BoundedProblem = &sol.problem;
    let cells = c.cells.unwrap_or(800);
    let n1 = p.dim() as i32 - 1;
    let scaled =
        |rho: &Option<crate::ScalarProfile>, rb: f64| rho.as_ref().map(|f| f.scaled(rb.powi(n1)));
    let cfg = ViscousConfig {
        r_inner: p.r_inner,
        inner: BoundaryCondition::Velocity(p.q_inner),
        p_inner: scaled(&p.rho_inner, p.r_inner),
        p_outer: scaled(&p.rho_outer, p.r_outer),
        ..ViscousConfig::ball(
            p.dim(),
            p.r_outer,
            p.epsilon,
            cells,
            BoundaryCondition::Velocity(p.q_outer),
        )
    };
    let p0 = p0_profile(p)?;
    let ts = g.t.points();
    let fd = fd_viscous_solve(&cfg, &p.q0, &p0, &ts)?;
    let rs = g.r.points();
    cx.report.param("cells", cells);
    let mut w = csv::Writer::from_writer(cx.create("comparison.csv")?);
    w.write_record(["r", "t", "q_series", "q_fd", "difference"])
        .map_err(crate::Error::from)?;
    let mut worst: f64 = 0.0;
    for (it, &t) in ts.iter().enumerate() {
        let qs = rs
            .par_iter()
            .map(|&r| {
                if t == 0.0 {
                    Ok(p.q0.eval(r))
                } else {
                    sol.velocity(r, t)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        for (k, &r) in rs.iter().enumerate() {
            let (qf, _) = interpolate(&fd, it, r);
            worst = worst.max((qs[k] - qf).abs());
            w.write_record([
                fmt_f(r),
                fmt_f(t),
                fmt_f(qs[k]),
                fmt_f(qf),
                fmt_f(qs[k] - qf),
            ])
            .map_err(crate::Error::from)?;
        }
    }
    w.flush().map_err(crate::Error::from)?;
    cx.at_most("series_fd_linf", worst, 1e-3);
    Ok(())
}

/// `p0 = r^{n-1} rho0` as a profile.
fn p0_profile(p: &BoundedProblem) -> Result<crate::ScalarProfile> {
    let n1 = p.dim() - 1;
    let breaks = p.rho0.breaks().to_vec();
    let mut coeffs = Vec::with_capacity(p.rho0.pieces().len());
    for (i, piece) in p.rho0.pieces().iter().enumerate() {
        // piece is in the local variable u = r - x0; r^{n-1} = (u + x0)^{n-1}
        let x0 = breaks[i];
        let factor: Vec<f64> = match n1 {
            0 => vec![1.0],
            1 => vec![x0, 1.0],
            _ => vec![x0 * x0, 2.0 * x0, 1.0],
        };
        let c = piece.coeffs();
        let mut out = vec![0.0; c.len() + factor.len() - 1];
        for (a, ca) in c.iter().enumerate() {
            for (b, fb) in factor.iter().enumerate() {
                out[a + b] += ca * fb;
            }
        }
        coeffs.push(out);
    }
    crate::ScalarProfile::from_pieces(breaks, coeffs)
}

fn run_sweep(cx: &mut Ctx) -> std::result::Result<(), ScenarioError> {
    let c = cx.scenario.compare()?.clone();
    let inv = cx.scenario.inviscid()?.clone();
    let problem = inv.problem()?;
    let t = c.time.expect("validated");
    cx.report.param("dim", inv.dim);
    cx.report.param("time", t);
    let limit = c
        .points
        .par_iter()
        .map(|&r| Ok(inviscid::solution(&problem, r, t)?.q))
        .collect::<Result<Vec<f64>>>()?;
    let mut w = csv::Writer::from_writer(cx.create("comparison.csv")?);
    w.write_record(["epsilon", "r", "q_viscous", "q_inviscid", "difference"])
        .map_err(crate::Error::from)?;
    let mut errors = Vec::with_capacity(c.epsilons.len());
    for &eps in &c.epsilons {
        let qs = c
            .points
            .par_iter()
            .map(|&r| Ok(radial_velocity(inv.dim, eps, &problem.q0, r, t, false)?.0))
            .collect::<Result<Vec<f64>>>()?;
        let mut worst: f64 = 0.0;
        for (k, &r) in c.points.iter().enumerate() {
            worst = worst.max((qs[k] - limit[k]).abs());
            w.write_record([
                fmt_f(eps),
                fmt_f(r),
                fmt_f(qs[k]),
                fmt_f(limit[k]),
                fmt_f(qs[k] - limit[k]),
            ])
            .map_err(crate::Error::from)?;
        }
        errors.push(worst);
    }
    w.flush().map_err(crate::Error::from)?;
    let mut ratio: f64 = 0.0;
    let mut order = f64::INFINITY;
    for k in 1..errors.len() {
        ratio = ratio.max(errors[k] / errors[k - 1]);
        order =
            order.min((errors[k - 1] / errors[k]).ln() / (c.epsilons[k - 1] / c.epsilons[k]).ln());
    }
    for (e, err) in c.epsilons.iter().zip(&errors) {
        cx.report
            .param(&format!("error_at_epsilon_{e}"), fmt_f(*err));
    }
    cx.at_most("sweep_error_ratio", ratio, 1.0);
    cx.at_least("sweep_order", order, 0.8);
    Ok(())
}
