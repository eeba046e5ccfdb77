//! Bessel functions of orders 0 and 1: `J`, `Y`, and exponentially scaled
//! modified functions `I`, `K`.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

/// `J_order(x)` or `Y_order(x)` for order 0 or 1.
pub fn bessel(kind: BesselKind, order: u32, x: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::Domain(format!("bessel order {order} not supported")));
    }
    if !x.is_finite() {
        return Err(Error::Domain("bessel argument must be finite".into()));
    }
    match kind {
        BesselKind::J => Ok(if order == 0 { j0(x) } else { j1(x) }),
        BesselKind::Y => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("Y_{order} undefined at x = {x}")));
            }
            Ok(if order == 0 { y0(x) } else { y1(x) })
        }
    }
}

const SERIES_MAX: f64 = 8.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_MAX {
        j_series(0, x)
    } else if x <= ASYMPTOTIC_MIN {
        miller(x).0
    } else {
        hankel(0.0, x).0
    }
}

pub fn j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x <= SERIES_MAX {
        j_series(1, x)
    } else if x <= ASYMPTOTIC_MIN {
        miller(x).1
    } else {
        hankel(1.0, x).0
    }
}

/// `Y_0(x)` for `x > 0`.
pub fn y0(x: f64) -> f64 {
    if x <= SERIES_MAX {
        let z = 0.25 * x * x;
        let mut term = 1.0;
        let mut h = 0.0;
        let mut sum = 0.0;
        for k in 1..80 {
            let kf = k as f64;
            term *= -z / (kf * kf);
            h += 1.0 / kf;
            let add = -term * h;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) && k > 4 {
                break;
            }
        }
        FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA) * j_series(0, x) + FRAC_2_PI * sum
    } else if x <= ASYMPTOTIC_MIN {
        miller(x).2
    } else {
        hankel(0.0, x).1
    }
}

/// `Y_1(x)` for `x > 0`.
pub fn y1(x: f64) -> f64 {
    if x <= SERIES_MAX {
        let z = 0.25 * x * x;
        // sum_k (psi(k+1) + psi(k+2)) (-z)^k / (k! (k+1)!)
        let mut term = 1.0;
        let mut hk = 0.0; // H_k
        let mut sum = 0.0;
        for k in 0..80 {
            let kf = k as f64;
            if k > 0 {
                term *= -z / (kf * (kf + 1.0));
                hk += 1.0 / kf;
            }
            let psi_sum = -2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (kf + 1.0);
            let add = psi_sum * term;
            sum += add;
            if k > 4 && add.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -FRAC_2_PI / x + FRAC_2_PI * (0.5 * x).ln() * j_series(1, x) - 0.5 * x / PI * sum
    } else if x <= ASYMPTOTIC_MIN {
        miller(x).3
    } else {
        hankel(1.0, x).1
    }
}

fn j_series(order: u32, x: f64) -> f64 {
    let z = 0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let nu = order as f64;
    for k in 1..100 {
        let kf = k as f64;
        term *= -z / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Backward recurrence for `J_k`, normalised by `J_0 + 2 sum J_{2k} = 1`;
/// `Y_0`, `Y_1` from the Neumann series. Returns `(J0, J1, Y0, Y1)`.
fn miller(x: f64) -> (f64, f64, f64, f64) {
    let top = 2 * (((x + 20.0 + 6.0 * x.sqrt()) / 2.0) as usize + 1);
    let mut b = vec![0.0; top + 2];
    b[top] = 1e-30;
    for k in (1..=top).rev() {
        b[k - 1] = 2.0 * k as f64 / x * b[k] - b[k + 1];
        if b[k - 1].abs() > 1e250 {
            for v in b.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = b[0] + 2.0 * b.iter().skip(2).step_by(2).sum::<f64>();
    for v in b.iter_mut() {
        *v /= norm;
    }
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * b[2 * k] / k as f64;
        s1 += sign * (b[2 * k - 1] - b[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * b[0] - 2.0 * FRAC_2_PI * s0;
    let y1 = -FRAC_2_PI * b[0] / x + FRAC_2_PI * lg * b[1] + FRAC_2_PI * s1;
    (b[0], b[1], y0, y1)
}

/// Hankel asymptotic expansion, returns `(J_nu, Y_nu)`.
fn hankel(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// `e^{-x} I_0(x)` for `x >= 0`.
pub fn i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        i_series(0, x) * (-x).exp()
    } else {
        i_asymptotic(0.0, x)
    }
}

/// `e^{-|x|} I_1(x)`.
pub fn i1e(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x <= 30.0 {
        i_series(1, x) * (-x).exp()
    } else {
        i_asymptotic(1.0, x)
    }
}

fn i_series(order: u32, x: f64) -> f64 {
    let z = 0.25 * x * x;
    let nu = order as f64;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..300 {
        let kf = k as f64;
        term *= z / (kf * (kf + nu));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn i_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= -(mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        sum += a;
        if a.abs() < 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `e^{x} K_0(x)` for `x > 0`.
pub fn k0e(x: f64) -> f64 {
    if x <= 2.0 {
        let z = 0.25 * x * x;
        let mut term = 1.0;
        let mut h = 0.0;
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= z / (kf * kf);
            h += 1.0 / kf;
            sum += term * h;
            if term * h < 1e-18 * sum {
                break;
            }
        }
        (-((0.5 * x).ln() + EULER_GAMMA) * i_series(0, x) + sum) * x.exp()
    } else {
        k_integral(0.0, x)
    }
}

/// `e^{x} K_1(x)` for `x > 0`.
pub fn k1e(x: f64) -> f64 {
    if x <= 2.0 {
        let z = 0.25 * x * x;
        let mut term = 1.0;
        let mut hk = 0.0;
        let mut sum = 0.0;
        for k in 0..60 {
            let kf = k as f64;
            if k > 0 {
                term *= z / (kf * (kf + 1.0));
                hk += 1.0 / kf;
            }
            let psi_sum = -2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (kf + 1.0);
            sum += psi_sum * term;
            if k > 2 && (psi_sum * term).abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        (1.0 / x + (0.5 * x).ln() * i_series(1, x) - 0.25 * x * sum) * x.exp()
    } else {
        k_integral(1.0, x)
    }
}

/// Trapezoid rule on `int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt`, which
/// converges geometrically for this analytic integrand once the step
/// resolves the `1/sqrt(x)` peak width.
fn k_integral(nu: f64, x: f64) -> f64 {
    let h = 0.1f64.min(0.5 / x.sqrt());
    let mut sum = 0.5;
    for k in 1..2000 {
        let t = k as f64 * h;
        let term = (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum * h
}
