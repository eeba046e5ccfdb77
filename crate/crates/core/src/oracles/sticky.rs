//! Sticky particles on the half line `r > 0`: free flight, perfectly
//! inelastic collisions, absorption at the origin. Particle masses are
//! `p dr`, so the run is a discrete weak solution of the radial
//! pressureless system in `(q, p)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::radial::fmt_f;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub r: f64,
    pub m: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StickyRun {
    pub times: Vec<f64>,
    /// Particles sorted by position at each requested time.
    pub snapshots: Vec<Vec<Particle>>,
    /// Mass absorbed at the origin up to each requested time.
    pub absorbed: Vec<f64>,
}

impl StickyRun {
    /// Heaviest particle of snapshot `k`.
    pub fn heaviest(&self, k: usize) -> Particle {
        *self.snapshots[k]
            .iter()
            .max_by(|a, b| a.m.total_cmp(&b.m))
            .expect("non-empty snapshot")
    }

    /// Bin averages `(centres, q, p)` on `[a, b]`: momentum over mass and mass
    /// over bin width.
    pub fn averages(
        &self,
        k: usize,
        a: f64,
        b: f64,
        bins: usize,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let h = (b - a) / bins as f64;
        let mut mass = vec![0.0; bins];
        let mut mom = vec![0.0; bins];
        for p in &self.snapshots[k] {
            if p.r < a || p.r >= b {
                continue;
            }
            let i = (((p.r - a) / h) as usize).min(bins - 1);
            mass[i] += p.m;
            mom[i] += p.m * p.v;
        }
        let centres = (0..bins).map(|i| a + (i as f64 + 0.5) * h).collect();
        let q = mass
            .iter()
            .zip(&mom)
            .map(|(m, j)| if *m > 0.0 { j / m } else { f64::NAN })
            .collect();
        let p = mass.iter().map(|m| m / h).collect();
        (centres, q, p)
    }

    /// Columns `t, index, r, m, v`.
    pub fn write_csv_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "index", "r", "m", "v"])?;
        for (t, snap) in self.times.iter().zip(&self.snapshots) {
            for (i, p) in snap.iter().enumerate() {
                wr.write_record([fmt_f(*t), i.to_string(), fmt_f(p.r), fmt_f(p.m), fmt_f(p.v)])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Merges neighbours that touch and approach; mass and momentum are summed.
fn merge_contacts(ps: &mut Vec<Particle>, tol: f64) {
    let mut out: Vec<Particle> = Vec::with_capacity(ps.len());
    for &p in ps.iter() {
        let mut p = p;
        while let Some(last) = out.last() {
            if p.r - last.r <= tol && last.v >= p.v {
                let m = last.m + p.m;
                p = Particle {
                    r: (last.r * last.m + p.r * p.m) / m,
                    m,
                    v: (last.v * last.m + p.v * p.m) / m,
                };
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    *ps = out;
}

/// Event-driven run sampled at `times` (increasing, nonnegative).
pub fn sticky_particle_run(particles: Vec<Particle>, times: &[f64]) -> Result<StickyRun> {
    if particles.windows(2).any(|w| w[1].r < w[0].r) {
        return Err(Error::Invalid(
            "particles must be sorted by position".into(),
        ));
    }
    if particles
        .iter()
        .any(|p| !(p.r > 0.0) || !(p.m >= 0.0) || !p.v.is_finite())
    {
        return Err(Error::Invalid(
            "particles need r > 0, m >= 0 and finite v".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| *t < 0.0) {
        return Err(Error::Invalid(
            "sample times must be nonnegative and increasing".into(),
        ));
    }
    let scale = particles.last().map_or(1.0, |p| p.r.max(1.0));
    let tol = 1e-13 * scale;
    let mut ps = particles;
    merge_contacts(&mut ps, tol);
    let mut now = 0.0;
    let mut absorbed = 0.0;
    let mut out = StickyRun {
        times: times.to_vec(),
        snapshots: Vec::with_capacity(times.len()),
        absorbed: Vec::with_capacity(times.len()),
    };
    let advance = |ps: &mut Vec<Particle>, dt: f64| {
        for p in ps.iter_mut() {
            p.r += p.v * dt;
        }
    };
    for &target in times {
        loop {
            // earliest collision or arrival at the origin
            let mut next = f64::INFINITY;
            if let Some(p) = ps.first() {
                if p.v < 0.0 {
                    next = p.r / -p.v;
                }
            }
            for w in ps.windows(2) {
                if w[0].v > w[1].v {
                    next = next.min((w[1].r - w[0].r) / (w[0].v - w[1].v));
                }
            }
            if now + next > target {
                advance(&mut ps, target - now);
                now = target;
                break;
            }
            advance(&mut ps, next);
            now += next;
            while ps.first().is_some_and(|p| p.r <= tol && p.v < 0.0) {
                absorbed += ps.remove(0).m;
            }
            // snap the colliding pairs together before merging
            for i in 1..ps.len() {
                if ps[i].r - ps[i - 1].r <= tol * 10.0 && ps[i - 1].v > ps[i].v {
                    ps[i].r = ps[i - 1].r.max(ps[i].r);
                }
            }
            merge_contacts(&mut ps, 10.0 * tol);
        }
        out.snapshots.push(ps.clone());
        out.absorbed.push(absorbed);
    }
    Ok(out)
}
