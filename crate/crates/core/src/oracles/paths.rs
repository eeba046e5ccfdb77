//! Exhaustive grid minimisation of the path functional.
//!
//! The tensor grid over `(r0, t1, t2)` is searched completely. Its minimum
//! separates into an `r0` scan per `t1` and a prefix minimum over `t1 <= t2`,
//! so one level costs `O(G^2)` instead of `O(G^3)`. Further levels repeat
//! the same search on boxes a few cells wide around the best coarse points.

use crate::error::{Error, Result};
use crate::inviscid::InviscidProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceMinimum {
    pub value: f64,
    pub r0: f64,
    /// `(t1, t2)` when a path through the origin wins.
    pub boundary: Option<(f64, f64)>,
}

/// Zoom levels after the coarse search.
const LEVELS: usize = 4;
/// Coarse local minima kept per branch.
const SEEDS: usize = 4;

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

fn straight(problem: &InviscidProblem, r: f64, t: f64, r0: f64) -> f64 {
    (r - r0).powi(2) / (2.0 * t) + problem.q0.integral(0.0, r0)
}

/// Local minima of a sampled function, best first.
fn local_minima(v: &[f64]) -> Vec<usize> {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || v[i] <= v[i - 1]) && (i + 1 == n || v[i] <= v[i + 1]))
        .collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx.truncate(SEEDS);
    idx
}

fn interior(problem: &InviscidProblem, r: f64, t: f64, hi: f64, g: usize) -> (f64, f64) {
    let xs = grid(0.0, hi, g);
    let vals: Vec<f64> = xs.iter().map(|&x| straight(problem, r, t, x)).collect();
    let mut best = (f64::INFINITY, 0.0);
    for i in local_minima(&vals) {
        let (mut lo_i, mut hi_i) = (xs[i.saturating_sub(2)], xs[(i + 2).min(g)]);
        let mut here = (vals[i], xs[i]);
        for _ in 0..LEVELS {
            let zs = grid(lo_i, hi_i, g);
            for &z in &zs {
                let v = straight(problem, r, t, z);
                if v < here.0 {
                    here = (v, z);
                }
            }
            let h = (hi_i - lo_i) / g as f64;
            lo_i = (here.1 - 2.0 * h).max(0.0);
            hi_i = here.1 + 2.0 * h;
        }
        if here.0 < best.0 || (here.0 == best.0 && here.1 < best.1) {
            best = here;
        }
    }
    best
}

/// Best boundary path with `r0` in `[r_lo, r_hi]`, `t1` in `[a1, b1]` and
/// `t2` in `[a2, b2]`: `(value, r0, t1, t2)` plus coarse seeds.
#[allow(clippy::too_many_arguments)]
fn boundary_box(
    problem: &InviscidProblem,
    r: f64,
    t: f64,
    (r_lo, r_hi): (f64, f64),
    (a1, b1): (f64, f64),
    (a2, b2): (f64, f64),
    g: usize,
) -> Vec<(f64, f64, f64, f64)> {
    let r0s = grid(r_lo, r_hi, g);
    let t1s = grid(a1, b1, g);
    let t2s: Vec<f64> = grid(a2, b2, g).into_iter().filter(|&s| s < t).collect();
    let credit = |s: f64| 0.5 * problem.q_b.positive_square_integral(0.0, s);
    // best r0 for each t1
    let first: Vec<(f64, f64)> = t1s
        .iter()
        .map(|&s| {
            let mut best = (f64::INFINITY, 0.0);
            for &x in &r0s {
                let v = if x == 0.0 {
                    0.0
                } else if s == 0.0 {
                    f64::INFINITY
                } else {
                    x * x / (2.0 * s)
                } + problem.q0.integral(0.0, x);
                if v < best.0 {
                    best = (v, x);
                }
            }
            (best.0 + credit(s), best.1)
        })
        .collect();
    let mut per_t2 = Vec::with_capacity(t2s.len());
    for &s2 in &t2s {
        let tail = r * r / (2.0 * (t - s2)) - credit(s2);
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for (k, &s1) in t1s.iter().enumerate() {
            if s1 > s2 {
                break;
            }
            if first[k].0 < best.0 {
                best = (first[k].0, first[k].1, s1);
            }
        }
        per_t2.push((best.0 + tail, best.1, best.2, s2));
    }
    let vals: Vec<f64> = per_t2.iter().map(|c| c.0).collect();
    local_minima(&vals).into_iter().map(|i| per_t2[i]).collect()
}

/// Exhaustive minimum of `Q(r, t)` on grids with `grid_density` intervals
/// per axis, refined by zooming.
pub fn brute_force_q(
    problem: &InviscidProblem,
    r: f64,
    t: f64,
    grid_density: usize,
) -> Result<BruteForceMinimum> {
    if grid_density < 50 {
        return Err(Error::Invalid(
            "brute force needs at least 50 grid intervals per axis".into(),
        ));
    }
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::Domain(format!(
            "brute force needs r >= 0 and t > 0, got ({r}, {t})"
        )));
    }
    let g = grid_density;
    let qb_max = problem.q_b.max_on(0.0, t).max(0.0);
    let hi = r + t * (problem.speed_bound() + qb_max);
    let (iv, ir0) = interior(problem, r, t, hi, g);
    let mut out = BruteForceMinimum {
        value: iv,
        r0: ir0,
        boundary: None,
    };
    if problem.q_b.positive_square_integral(0.0, t) == 0.0 {
        return Ok(out);
    }
    let seeds = boundary_box(problem, r, t, (0.0, hi), (0.0, t), (0.0, t), g);
    for seed in seeds {
        let (mut best, mut w) = (seed, [hi / g as f64, t / g as f64, t / g as f64]);
        for _ in 0..LEVELS {
            let (_, x, s1, s2) = best;
            let boxes = (
                ((x - 2.0 * w[0]).max(0.0), x + 2.0 * w[0]),
                ((s1 - 2.0 * w[1]).max(0.0), (s1 + 2.0 * w[1]).min(t)),
                ((s2 - 2.0 * w[2]).max(0.0), (s2 + 2.0 * w[2]).min(t)),
            );
            w = [
                4.0 * w[0] / g as f64,
                4.0 * w[1] / g as f64,
                4.0 * w[2] / g as f64,
            ];
            if let Some(c) = boundary_box(problem, r, t, boxes.0, boxes.1, boxes.2, g).first() {
                if c.0 < best.0 {
                    best = *c;
                }
            }
        }
        if best.0 < out.value - 1e-12 * (1.0 + out.value.abs()) {
            out = BruteForceMinimum {
                value: best.0,
                r0: best.1,
                boundary: Some((best.2, best.3)),
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ScalarProfile;

    fn problem(q0: f64, qb: f64) -> InviscidProblem {
        let p0 = ScalarProfile::piecewise_constant(vec![0.0, 2.0], vec![1.0, 0.0]).unwrap();
        InviscidProblem::new(
            3,
            ScalarProfile::constant(q0),
            p0,
            ScalarProfile::constant(qb),
            ScalarProfile::constant(8.0 * std::f64::consts::PI),
        )
        .unwrap()
    }

    #[test]
    fn rest_state_is_free() {
        let m = brute_force_q(&problem(0.0, 0.0), 0.7, 1.0, 50).unwrap();
        assert!(m.value.abs() < 1e-12);
        assert!((m.r0 - 0.7).abs() < 1e-6);
        assert!(m.boundary.is_none());
    }

    #[test]
    fn inflow_value() {
        // c r - c^2 t / 2 for r < c t
        let m = brute_force_q(&problem(0.0, 1.0), 0.4, 1.0, 50).unwrap();
        assert!((m.value - (0.4 - 0.5)).abs() < 1e-8, "{m:?}");
        let (_, t2) = m.boundary.unwrap();
        assert!((t2 - 0.6).abs() < 1e-4);
    }

    #[test]
    fn refinement_does_not_increase_the_value() {
        let p = problem(-0.3, 0.8);
        let coarse = brute_force_q(&p, 0.9, 1.5, 50).unwrap().value;
        let fine = brute_force_q(&p, 0.9, 1.5, 100).unwrap().value;
        assert!(fine <= coarse + 1e-9);
    }
}
