//! Dormand-Prince 5(4) integrator with step control and a terminal event.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Tolerance on the event function at the located crossing.
    pub event_tol: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_min: 1e-14,
            max_steps: 100_000,
            event_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: f64,
    pub y: Vec<f64>,
    pub event: bool,
    pub steps: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type Rhs<'a> = dyn FnMut(f64, &[f64], &mut [f64]) -> Result<()> + 'a;
type EventFn<'a> = dyn FnMut(f64, &[f64]) -> f64 + 'a;

impl Dopri5 {
    /// One step; returns the new state and the scaled error norm.
    fn step(&self, f: &mut Rhs<'_>, t: f64, y: &[f64], h: f64) -> Result<(Vec<f64>, f64)> {
        let n = y.len();
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        f(t, y, &mut k[0])?;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += h * A[s][j] * k[j][i];
                }
                tmp[i] = acc;
            }
            f(t + C[s] * h, &tmp, &mut k[s])?;
        }
        // stage 7 is evaluated at the 5th-order solution
        let ynew = tmp;
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            e *= h;
            let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if ynew.iter().any(|v| !v.is_finite()) {
            return Ok((ynew, f64::INFINITY));
        }
        Ok((ynew, err))
    }

    /// Integrate from `t0` to `t1` (either direction).
    pub fn solve(
        &self,
        mut f: impl FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
        t0: f64,
        y0: &[f64],
        t1: f64,
    ) -> Result<Trajectory> {
        self.run(&mut f, t0, y0, t1, None)
    }

    /// Integrate until `t1` or until `event(t, y)` first becomes `<= 0`
    /// (it must be positive at the start).
    pub fn solve_with_event(
        &self,
        mut f: impl FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
        t0: f64,
        y0: &[f64],
        t1: f64,
        mut event: impl FnMut(f64, &[f64]) -> f64,
    ) -> Result<Trajectory> {
        self.run(&mut f, t0, y0, t1, Some(&mut event))
    }

    fn run(
        &self,
        f: &mut Rhs<'_>,
        t0: f64,
        y0: &[f64],
        t1: f64,
        mut event: Option<&mut EventFn<'_>>,
    ) -> Result<Trajectory> {
        let mut t = t0;
        let mut y = y0.to_vec();
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(Trajectory {
                t,
                y,
                event: false,
                steps: 0,
            });
        }
        let dir = span.signum();
        let mut h = dir * (span.abs() * 0.01).max(self.h_min * 10.0);
        let mut steps = 0;
        while (t1 - t) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::Integration {
                    at: t,
                    reason: "too many steps".into(),
                });
            }
            if (t + h - t1) * dir > 0.0 {
                h = t1 - t;
            }
            let (ynew, err) = self.step(f, t, &y, h)?;
            if err <= 1.0 {
                let tnew = if (t1 - (t + h)) * dir <= 1e-15 * t1.abs().max(1.0) {
                    t1
                } else {
                    t + h
                };
                if let Some(ev) = event.as_deref_mut() {
                    if ev(tnew, &ynew) <= 0.0 {
                        return self.locate(f, t, &y, h, ev, steps + 1);
                    }
                }
                t = tnew;
                y = ynew;
                steps += 1;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= fac;
            } else {
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h *= fac;
            }
            if h.abs() < self.h_min {
                return Err(Error::Integration {
                    at: t,
                    reason: "step size underflow".into(),
                });
            }
        }
        Ok(Trajectory {
            t,
            y,
            event: false,
            steps,
        })
    }

    /// Bisect on the step fraction with fresh single steps until the event
    /// function is within tolerance.
    fn locate(
        &self,
        f: &mut Rhs<'_>,
        t: f64,
        y: &[f64],
        h: f64,
        ev: &mut dyn FnMut(f64, &[f64]) -> f64,
        steps: usize,
    ) -> Result<Trajectory> {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let (mut yhi, _) = self.step(f, t, y, h)?;
        let mut ghi = ev(t + h, &yhi);
        for _ in 0..200 {
            if ghi.abs() <= self.event_tol || (hi - lo) * h.abs() < 1e-15 * t.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (ym, _) = self.step(f, t, y, mid * h)?;
            let gm = ev(t + mid * h, &ym);
            if gm <= 0.0 {
                hi = mid;
                yhi = ym;
                ghi = gm;
            } else {
                lo = mid;
            }
        }
        Ok(Trajectory {
            t: t + hi * h,
            y: yhi,
            event: true,
            steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay_backward() {
        let tr = Dopri5::default()
            .solve(
                |_, y, d| {
                    d[0] = -y[0];
                    Ok(())
                },
                2.0,
                &[(-2.0f64).exp()],
                0.0,
            )
            .unwrap();
        assert_relative_eq!(tr.y[0], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn event_located_precisely() {
        // y' = 1 from y = 0; stop when y reaches 0.3
        let tr = Dopri5::default()
            .solve_with_event(
                |_, _, d| {
                    d[0] = 1.0;
                    Ok(())
                },
                0.0,
                &[0.0],
                5.0,
                |_, y| 0.3 - y[0],
            )
            .unwrap();
        assert!(tr.event);
        assert!((tr.y[0] - 0.3).abs() <= 1e-10);
        assert!((tr.t - 0.3).abs() <= 1e-10);
    }

    #[test]
    fn harmonic_oscillator() {
        let tr = Dopri5 {
            rtol: 1e-11,
            atol: 1e-13,
            ..Default::default()
        }
        .solve(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0, 0.0],
            10.0,
        )
        .unwrap();
        assert_relative_eq!(tr.y[0], 10f64.cos(), epsilon = 1e-9);
    }
}
