//! Radial Robin eigenvalue problems for the heat operator
//! `a'' + (n-1)/r a'` on balls and annuli, with `a' + k a = 0` on each
//! boundary sphere.
//!
//! Ball roots are reported in the dimensionless variable `mu` (eigenfunction
//! argument `mu r / R`), annulus roots in the wavenumber `lambda`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::bisect;
use crate::quad::GaussLegendre;

use super::bessel::{i0e, i1e, j0, j1, k0e, k1e, y0, y1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainCase {
    Ball2D,
    Ball3D,
    Annulus2D,
    Annulus3D,
}

impl DomainCase {
    pub fn dim(self) -> u32 {
        match self {
            DomainCase::Ball2D | DomainCase::Annulus2D => 2,
            DomainCase::Ball3D | DomainCase::Annulus3D => 3,
        }
    }

    pub fn is_ball(self) -> bool {
        matches!(self, DomainCase::Ball2D | DomainCase::Ball3D)
    }
}

/// Geometry plus Robin coefficients `k = q / epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenProblem {
    pub case: DomainCase,
    /// Inner radius (zero for balls).
    pub r_inner: f64,
    pub r_outer: f64,
    /// Robin coefficient at the inner sphere (unused for balls).
    pub k_inner: f64,
    pub k_outer: f64,
}

impl EigenProblem {
    pub fn ball(dim: u32, radius: f64, k: f64) -> Result<Self> {
        let case = match dim {
            2 => DomainCase::Ball2D,
            3 => DomainCase::Ball3D,
            _ => {
                return Err(Error::Invalid(format!(
                    "ball dimension must be 2 or 3, got {dim}"
                )))
            }
        };
        if !(radius > 0.0 && radius.is_finite()) || !k.is_finite() {
            return Err(Error::Invalid(
                "ball radius must be positive and k finite".into(),
            ));
        }
        Ok(Self {
            case,
            r_inner: 0.0,
            r_outer: radius,
            k_inner: 0.0,
            k_outer: k,
        })
    }

    pub fn annulus(dim: u32, r1: f64, r2: f64, k1: f64, k2: f64) -> Result<Self> {
        let case = match dim {
            2 => DomainCase::Annulus2D,
            3 => DomainCase::Annulus3D,
            _ => {
                return Err(Error::Invalid(format!(
                    "annulus dimension must be 2 or 3, got {dim}"
                )))
            }
        };
        if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::Invalid(
                "annulus needs 0 < R1 < R2 and finite k".into(),
            ));
        }
        Ok(Self {
            case,
            r_inner: r1,
            r_outer: r2,
            k_inner: k1,
            k_outer: k2,
        })
    }

    pub fn dim(&self) -> u32 {
        self.case.dim()
    }

    /// Radial extent of the domain.
    pub fn length(&self) -> f64 {
        self.r_outer - self.r_inner
    }

    /// Maps a root of the characteristic equation to a wavenumber.
    pub fn wavenumber(&self, root: f64) -> f64 {
        if self.case.is_ball() {
            root / self.r_outer
        } else {
            root
        }
    }

    fn b1(&self) -> f64 {
        1.0 - self.k_inner * self.r_inner
    }

    fn b2(&self) -> f64 {
        self.k_outer * self.r_outer - 1.0
    }

    fn scan_value(&self, v: f64) -> f64 {
        let kr = self.k_outer * self.r_outer;
        match self.case {
            DomainCase::Ball2D => v * j1(v) - kr * j0(v),
            DomainCase::Ball3D => v * v.cos() + (kr - 1.0) * v.sin(),
            DomainCase::Annulus2D => {
                let (r1, r2) = (self.r_inner, self.r_outer);
                let u_j = -self.k_inner * j0(v * r1) + v * j1(v * r1);
                let u_y = -self.k_inner * y0(v * r1) + v * y1(v * r1);
                let v_j = self.k_outer * j0(v * r2) - v * j1(v * r2);
                let v_y = self.k_outer * y0(v * r2) - v * y1(v * r2);
                u_j * v_y - v_j * u_y
            }
            DomainCase::Annulus3D => {
                let (r1, r2) = (self.r_inner, self.r_outer);
                let (b1, b2) = (self.b1(), self.b2());
                let l = self.length();
                (b1 * b2 - r1 * r2 * v * v) * (v * l).sin()
                    + v * (r1 * b2 + r2 * b1) * (v * l).cos()
            }
        }
    }

    /// Characteristic function for decaying modes `sigma = -nu^2`, scaled
    /// to stay finite; the argument is `nu R` for balls and `nu` otherwise.
    fn growth_value(&self, v: f64) -> f64 {
        let kr = self.k_outer * self.r_outer;
        match self.case {
            DomainCase::Ball2D => v * i1e(v) + kr * i0e(v),
            DomainCase::Ball3D => {
                let e = (-2.0 * v).exp();
                0.5 * v * (1.0 + e) + 0.5 * (kr - 1.0) * (1.0 - e)
            }
            DomainCase::Annulus2D => {
                let (a_i, a_k, b_i, b_k) = self.modified_bessel_boundary(v);
                a_k * b_i - (-2.0 * v * self.length()).exp() * a_i * b_k
            }
            DomainCase::Annulus3D => {
                let (r1, r2) = (self.r_inner, self.r_outer);
                let (b1, b2) = (self.b1(), self.b2());
                let l = self.length();
                let e = (-2.0 * v * l).exp();
                let sh = 0.5 * (1.0 - e);
                let ch = 0.5 * (1.0 + e);
                (b1 * b2 + r1 * r2 * v * v) * sh + v * (r1 * b2 + r2 * b1) * ch
            }
        }
    }

    /// Scaled boundary combinations for `I_0`, `K_0` eigenfunctions.
    fn modified_bessel_boundary(&self, v: f64) -> (f64, f64, f64, f64) {
        let (r1, r2) = (self.r_inner, self.r_outer);
        let (k1, k2) = (self.k_inner, self.k_outer);
        let a_i = v * i1e(v * r1) + k1 * i0e(v * r1);
        let a_k = -v * k1e(v * r1) + k1 * k0e(v * r1);
        let b_i = v * i1e(v * r2) + k2 * i0e(v * r2);
        let b_k = -v * k1e(v * r2) + k2 * k0e(v * r2);
        (a_i, a_k, b_i, b_k)
    }

    /// Default spacing of the root scan.
    pub fn scan_step(&self) -> f64 {
        if self.case.is_ball() {
            PI / 16.0
        } else {
            PI / (16.0 * self.length())
        }
    }

    fn scan_origin(&self) -> f64 {
        self.scan_step() * 1e-5
    }
}

/// Value of the characteristic equation, or a pole marker where the
/// cotangent form is singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Characteristic {
    Value(f64),
    Pole,
}

/// Characteristic function in the form used by the closed-form series:
/// `mu J1(mu) - k R J0(mu)`, `mu cot(mu) + k R - 1`, the Bessel determinant
/// for the 2-D annulus and the trigonometric form for the 3-D annulus.
pub fn characteristic_value(problem: &EigenProblem, mu: f64) -> Characteristic {
    match problem.case {
        DomainCase::Ball3D => {
            let s = mu.sin();
            if s.abs() <= 1e-15 * mu.abs().max(1.0) {
                Characteristic::Pole
            } else {
                Characteristic::Value(mu * mu.cos() / s + problem.k_outer * problem.r_outer - 1.0)
            }
        }
        _ => Characteristic::Value(problem.scan_value(mu)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueList {
    /// Positive roots, strictly increasing.
    pub values: Vec<f64>,
    /// `|characteristic_value|` at each root (zero at poles, which never
    /// occur for accepted roots).
    pub residuals: Vec<f64>,
}

/// First `count` positive roots of the characteristic equation.
pub fn find_eigenvalues(problem: &EigenProblem, count: usize) -> Result<EigenvalueList> {
    find_eigenvalues_with_step(problem, count, problem.scan_step())
}

/// As [`find_eigenvalues`] with an explicit scan step.
pub fn find_eigenvalues_with_step(
    problem: &EigenProblem,
    count: usize,
    step: f64,
) -> Result<EigenvalueList> {
    if !(step > 0.0) {
        return Err(Error::Invalid("scan step must be positive".into()));
    }
    let limit = problem.scan_step() * 16.0 * (count as f64 + 20.0) * 4.0;
    let f = |v: f64| problem.scan_value(v);
    let mut values = Vec::with_capacity(count);
    let mut a = problem.scan_origin();
    let mut fa = f(a);
    let mut k = 0usize;
    while values.len() < count {
        k += 1;
        let b = problem.scan_origin() + k as f64 * step;
        if b > limit {
            return Err(Error::InsufficientScanRange {
                found: values.len(),
                requested: count,
                limit,
            });
        }
        let fb = f(b);
        if fa == 0.0 {
            values.push(a);
        } else if fa * fb < 0.0 {
            values.push(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    let residuals = values
        .iter()
        .map(|&v| match characteristic_value(problem, v) {
            Characteristic::Value(x) => x.abs(),
            Characteristic::Pole => 0.0,
        })
        .collect();
    Ok(EigenvalueList { values, residuals })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Constant,
    /// `J0(kappa r)`
    BallBessel {
        kappa: f64,
    },
    /// `sin(kappa r) / r`
    BallSine {
        kappa: f64,
    },
    /// `e^{-nu R} I0(nu r)`
    BallModBessel {
        nu: f64,
        radius: f64,
    },
    /// `e^{-nu R} sinh(nu r) / r`
    BallSinh {
        nu: f64,
        radius: f64,
    },
    /// `cj J0(lambda r) + cy Y0(lambda r)`
    AnnulusBessel {
        lambda: f64,
        cj: f64,
        cy: f64,
    },
    /// `ak e^{nu (r-R1)} I0e(nu r) - ai e^{nu (R1-r)} K0e(nu r)`
    AnnulusModBessel {
        nu: f64,
        r1: f64,
        ai: f64,
        ak: f64,
    },
    /// `(b1 sin(lambda (r-R1)) + R1 lambda cos(lambda (r-R1))) / r`
    AnnulusTrig {
        lambda: f64,
        r1: f64,
        b1: f64,
    },
    /// hyperbolic counterpart, scaled by `e^{-nu L}`
    AnnulusHyp {
        nu: f64,
        r1: f64,
        b1: f64,
        l: f64,
    },
    /// `a + b ln r`
    AnnulusLog {
        a: f64,
        b: f64,
    },
    /// `(R1 + b1 (r - R1)) / r`
    AnnulusLinear {
        r1: f64,
        b1: f64,
    },
}

/// One term of the Green's-function expansion: `a_t = (eps/2) L a` has the
/// solution `phi(r) e^{-eps sigma t / 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenmode {
    /// Eigenvalue of `-L`; negative for modes that grow in time.
    pub sigma: f64,
    /// `1 / int r^{n-1} phi^2 dr`.
    pub coefficient: f64,
    /// Sampled estimate of `sup |phi|` on the domain.
    pub sup: f64,
    dim: u32,
    shape: Shape,
}

impl Eigenmode {
    pub fn value(&self, r: f64) -> f64 {
        self.value_and_derivative(r).0
    }

    pub fn value_and_derivative(&self, r: f64) -> (f64, f64) {
        match self.shape {
            Shape::Constant => (1.0, 0.0),
            Shape::BallBessel { kappa } => (j0(kappa * r), -kappa * j1(kappa * r)),
            Shape::BallSine { kappa } => {
                let x = kappa * r;
                if x < 1e-4 {
                    (kappa * (1.0 - x * x / 6.0), -kappa * kappa * x / 3.0)
                } else {
                    let (s, c) = x.sin_cos();
                    (s / r, (x * c - s) / (r * r))
                }
            }
            Shape::BallModBessel { nu, radius } => {
                let x = nu * r;
                let sc = (nu * (r - radius)).exp();
                (sc * i0e(x), sc * nu * i1e(x))
            }
            Shape::BallSinh { nu, radius } => {
                let x = nu * r;
                if x < 1e-4 {
                    let sc = (-nu * radius).exp();
                    (sc * nu * (1.0 + x * x / 6.0), sc * nu * nu * x / 3.0)
                } else {
                    // e^{-nu R} sinh(x) and cosh(x) without overflow
                    let ep = (x - nu * radius).exp();
                    let em = (-x - nu * radius).exp();
                    let sh = 0.5 * (ep - em);
                    let ch = 0.5 * (ep + em);
                    (sh / r, (x * ch - sh) / (r * r))
                }
            }
            Shape::AnnulusBessel { lambda, cj, cy } => {
                let x = lambda * r;
                (cj * j0(x) + cy * y0(x), -lambda * (cj * j1(x) + cy * y1(x)))
            }
            Shape::AnnulusModBessel { nu, r1, ai, ak } => {
                let x = nu * r;
                let gp = (nu * (r - r1)).exp();
                let gm = (nu * (r1 - r)).exp();
                (
                    ak * gp * i0e(x) - ai * gm * k0e(x),
                    nu * (ak * gp * i1e(x) + ai * gm * k1e(x)),
                )
            }
            Shape::AnnulusTrig { lambda, r1, b1 } => {
                let (s, c) = (lambda * (r - r1)).sin_cos();
                let psi = b1 * s + r1 * lambda * c;
                let dpsi = lambda * (b1 * c - r1 * lambda * s);
                (psi / r, (dpsi * r - psi) / (r * r))
            }
            Shape::AnnulusHyp { nu, r1, b1, l } => {
                let ep = (nu * (r - r1) - nu * l).exp();
                let em = (-nu * (r - r1) - nu * l).exp();
                let sh = 0.5 * (ep - em);
                let ch = 0.5 * (ep + em);
                let psi = b1 * sh + r1 * nu * ch;
                let dpsi = nu * (b1 * ch + r1 * nu * sh);
                (psi / r, (dpsi * r - psi) / (r * r))
            }
            Shape::AnnulusLog { a, b } => (a + b * r.ln(), b / r),
            Shape::AnnulusLinear { r1, b1 } => {
                let psi = r1 + b1 * (r - r1);
                (psi / r, (b1 * r - psi) / (r * r))
            }
        }
    }

    /// Second derivative from the eigenvalue equation.
    pub fn second_derivative(&self, r: f64, value: f64, derivative: f64) -> f64 {
        let n1 = (self.dim - 1) as f64;
        if r <= 0.0 {
            // regular centre: phi'' = -sigma phi / n
            -self.sigma * value / self.dim as f64
        } else {
            -self.sigma * value - n1 / r * derivative
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }
}

fn weighted_norm(problem: &EigenProblem, mode: &Eigenmode) -> f64 {
    let g = GaussLegendre::new(16);
    let n1 = (problem.dim() - 1) as i32;
    g.composite(
        |r| r.powi(n1) * mode.value(r).powi(2),
        problem.r_inner,
        problem.r_outer,
        64,
    )
}

/// `int r^{n-1} phi^2 dr` by composite Gauss-Legendre quadrature.
pub fn norm_by_quadrature(problem: &EigenProblem, mode: &Eigenmode) -> f64 {
    weighted_norm(problem, mode)
}

fn positive_mode(problem: &EigenProblem, root: f64) -> Eigenmode {
    let dim = problem.dim();
    let (r1, r2) = (problem.r_inner, problem.r_outer);
    let kappa = problem.wavenumber(root);
    let (shape, coefficient) = match problem.case {
        DomainCase::Ball2D => {
            let mu = root;
            let kr = problem.k_outer * r2;
            let c = 2.0 * mu * mu / (r2 * r2 * (mu * mu + kr * kr) * j0(mu).powi(2));
            (Shape::BallBessel { kappa }, c)
        }
        DomainCase::Ball3D => {
            let mu = root;
            let kr = problem.k_outer * r2;
            let c = 2.0 / r2 * (mu * mu + (kr - 1.0).powi(2)) / (mu * mu + kr * (kr - 1.0));
            (Shape::BallSine { kappa }, c)
        }
        DomainCase::Annulus2D => {
            let l = root;
            let (k1, k2) = (problem.k_inner, problem.k_outer);
            let u_j = -k1 * j0(l * r1) + l * j1(l * r1);
            let u_y = -k1 * y0(l * r1) + l * y1(l * r1);
            let v_j = k2 * j0(l * r2) - l * j1(l * r2);
            let b = (l * l + k2 * k2) * u_j * u_j - (l * l + k1 * k1) * v_j * v_j;
            let c = 0.5 * PI * PI * l * l * v_j * v_j / b;
            (
                Shape::AnnulusBessel {
                    lambda: l,
                    cj: u_y,
                    cy: -u_j,
                },
                c,
            )
        }
        DomainCase::Annulus3D => {
            let l = root;
            let (b1, b2) = (problem.b1(), problem.b2());
            let len = problem.length();
            let num = b2 * b2 + r2 * r2 * l * l;
            let den = len * (b1 * b1 + r1 * r1 * l * l) * num
                + (b1 * r2 + b2 * r1) * (b1 * b2 + r1 * r2 * l * l);
            (Shape::AnnulusTrig { lambda: l, r1, b1 }, 2.0 * num / den)
        }
    };
    Eigenmode {
        sigma: kappa * kappa,
        coefficient,
        sup: 1.0,
        dim,
        shape,
    }
}

fn with_quadrature_norm(problem: &EigenProblem, sigma: f64, shape: Shape) -> Eigenmode {
    let mut m = Eigenmode {
        sigma,
        coefficient: 1.0,
        sup: 1.0,
        dim: problem.dim(),
        shape,
    };
    m.coefficient = 1.0 / weighted_norm(problem, &m);
    m
}

fn zero_mode(problem: &EigenProblem) -> Option<Eigenmode> {
    let (r1, r2) = (problem.r_inner, problem.r_outer);
    let (k1, k2) = (problem.k_inner, problem.k_outer);
    match problem.case {
        DomainCase::Ball2D | DomainCase::Ball3D => {
            ((k2 * r2).abs() <= 1e-12).then(|| with_quadrature_norm(problem, 0.0, Shape::Constant))
        }
        DomainCase::Annulus2D => {
            let det = k1 / r2 - k2 / r1 + k1 * k2 * (r2 / r1).ln();
            let scale = k1.abs() / r2 + k2.abs() / r1 + (k1 * k2).abs() * (r2 / r1).ln() + 1e-300;
            if det.abs() > 1e-12 * scale && !(k1 == 0.0 && k2 == 0.0) {
                return None;
            }
            let (a, b) = if k1 != 0.0 || k2 == 0.0 {
                (1.0 / r1 + k1 * r1.ln(), -k1)
            } else {
                (1.0 / r2 + k2 * r2.ln(), -k2)
            };
            Some(with_quadrature_norm(
                problem,
                0.0,
                Shape::AnnulusLog { a, b },
            ))
        }
        DomainCase::Annulus3D => {
            let (b1, b2) = (problem.b1(), problem.b2());
            let cond = b1 * b2 * problem.length() + r1 * b2 + r2 * b1;
            let scale = (b1 * b2).abs() * problem.length() + (r1 * b2).abs() + (r2 * b1).abs() + r1;
            (cond.abs() <= 1e-12 * scale)
                .then(|| with_quadrature_norm(problem, 0.0, Shape::AnnulusLinear { r1, b1 }))
        }
    }
}

fn growing_modes(problem: &EigenProblem) -> Vec<Eigenmode> {
    let (r1, r2) = (problem.r_inner, problem.r_outer);
    let kmax = problem.k_inner.abs() + problem.k_outer.abs();
    let (vmax, origin) = if problem.case.is_ball() {
        (2.0 * kmax * r2 + 4.0, 1e-5)
    } else {
        let lmin = r1.min(problem.length());
        (2.0 * kmax + 4.0 / lmin, 1e-5 / problem.length())
    };
    let steps = 4000;
    let g = |v: f64| problem.growth_value(v);
    let mut roots = Vec::new();
    let mut a = origin;
    let mut fa = g(a);
    for k in 1..=steps {
        let b = origin + (vmax - origin) * k as f64 / steps as f64;
        let fb = g(b);
        if fa * fb < 0.0 {
            roots.push(bisect(g, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
        .into_iter()
        .map(|v| {
            let (nu, shape) = match problem.case {
                DomainCase::Ball2D => (
                    v / r2,
                    Shape::BallModBessel {
                        nu: v / r2,
                        radius: r2,
                    },
                ),
                DomainCase::Ball3D => (
                    v / r2,
                    Shape::BallSinh {
                        nu: v / r2,
                        radius: r2,
                    },
                ),
                DomainCase::Annulus2D => {
                    let (ai, ak, _, _) = problem.modified_bessel_boundary(v);
                    (v, Shape::AnnulusModBessel { nu: v, r1, ai, ak })
                }
                DomainCase::Annulus3D => (
                    v,
                    Shape::AnnulusHyp {
                        nu: v,
                        r1,
                        b1: problem.b1(),
                        l: problem.length(),
                    },
                ),
            };
            with_quadrature_norm(problem, -nu * nu, shape)
        })
        .collect()
}

/// Count sign changes of each mode on an interior sample and require the
/// `j`-th mode (by increasing `sigma`) to have exactly `j` zeros; this
/// catches roots skipped by the scan. Also records `sup |phi|`.
fn audit(problem: &EigenProblem, modes: &mut [Eigenmode]) -> Result<()> {
    let (lo, hi) = (problem.r_inner, problem.r_outer);
    for (j, m) in modes.iter_mut().enumerate() {
        let samples = 24 * (j + 2);
        let mut zeros = 0;
        let mut prev = 0.0f64;
        let mut sup = m.value(lo).abs().max(m.value(hi).abs());
        for i in 0..samples {
            let r = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
            let v = m.value(r);
            sup = sup.max(v.abs());
            if v != 0.0 {
                if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                    zeros += 1;
                }
                prev = v;
            }
        }
        m.sup = sup;
        if zeros != j {
            return Err(Error::Audit(format!(
                "mode {j} (sigma = {}) has {zeros} interior zeros",
                m.sigma
            )));
        }
    }
    Ok(())
}

/// All non-positive modes plus the first `positive_count` positive ones,
/// sorted by `sigma`, with normalisation coefficients.
pub fn spectrum(problem: &EigenProblem, positive_count: usize) -> Result<Vec<Eigenmode>> {
    let mut modes = growing_modes(problem);
    modes.extend(zero_mode(problem));
    let roots = find_eigenvalues(problem, positive_count)?;
    modes.extend(roots.values.iter().map(|&v| positive_mode(problem, v)));
    modes.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
    audit(problem, &mut modes)?;
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cases() -> Vec<EigenProblem> {
        vec![
            EigenProblem::ball(2, 1.0, 1.5).unwrap(),
            EigenProblem::ball(3, 1.3, 0.7).unwrap(),
            EigenProblem::annulus(2, 0.5, 1.5, -0.8, 1.2).unwrap(),
            EigenProblem::annulus(3, 0.4, 1.0, 0.6, 2.0).unwrap(),
        ]
    }

    #[test]
    fn roots_are_increasing_with_small_residuals() {
        for p in cases() {
            let list = find_eigenvalues(&p, 40).unwrap();
            assert!(list.values.windows(2).all(|w| w[1] > w[0]));
            for (v, r) in list.values.iter().zip(&list.residuals) {
                assert!(*r <= 1e-10 * v.max(1.0), "{:?} residual {r} at {v}", p.case);
            }
        }
    }

    #[test]
    fn dirichlet_like_limits_match_bessel_zeros() {
        // k R -> large pushes roots of mu J1 - kR J0 toward zeros of J0
        let p = EigenProblem::ball(2, 1.0, 1e9).unwrap();
        let v = find_eigenvalues(&p, 2).unwrap().values;
        assert_relative_eq!(v[0], 2.404_825_557_695_773, epsilon = 1e-8);
        // k = 0: roots are zeros of J1
        let p = EigenProblem::ball(2, 1.0, 0.0).unwrap();
        let v = find_eigenvalues(&p, 1).unwrap().values;
        assert_relative_eq!(v[0], 3.831_705_970_207_512, epsilon = 1e-12);
        // 3-D ball with k R = 0: tan mu = mu
        let p = EigenProblem::ball(3, 1.0, 0.0).unwrap();
        let v = find_eigenvalues(&p, 1).unwrap().values;
        assert_relative_eq!(v[0], 4.493_409_457_909_064, epsilon = 1e-12);
    }

    #[test]
    fn halving_the_scan_step_changes_nothing() {
        for p in cases() {
            let a = find_eigenvalues(&p, 25).unwrap().values;
            let b = find_eigenvalues_with_step(&p, 25, p.scan_step() / 2.0)
                .unwrap()
                .values;
            for (x, y) in a.iter().zip(&b) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_normalisation_matches_quadrature() {
        for p in cases() {
            let modes = spectrum(&p, 12).unwrap();
            for m in &modes {
                let q = norm_by_quadrature(&p, m);
                assert_relative_eq!(m.coefficient * q, 1.0, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn modes_satisfy_robin_conditions() {
        for p in cases() {
            for m in spectrum(&p, 10).unwrap() {
                let (v, d) = m.value_and_derivative(p.r_outer);
                assert!((d + p.k_outer * v).abs() < 1e-9 * (1.0 + d.abs() + v.abs()));
                if !p.case.is_ball() {
                    let (v, d) = m.value_and_derivative(p.r_inner);
                    assert!((d + p.k_inner * v).abs() < 1e-9 * (1.0 + d.abs() + v.abs()));
                }
            }
        }
    }

    #[test]
    fn inflow_produces_growing_modes() {
        let p = EigenProblem::ball(2, 1.0, -2.0).unwrap();
        let modes = spectrum(&p, 5).unwrap();
        assert!(modes[0].sigma < 0.0);
        assert!(modes[1].sigma > 0.0);
        let p = EigenProblem::annulus(3, 0.5, 1.5, 8.0, -8.0).unwrap();
        let modes = spectrum(&p, 5).unwrap();
        assert_eq!(modes.iter().filter(|m| m.sigma < 0.0).count(), 2);
        let p = EigenProblem::annulus(2, 0.5, 1.5, 0.0, 0.0).unwrap();
        let modes = spectrum(&p, 3).unwrap();
        assert_eq!(modes[0].sigma, 0.0);
    }

    #[test]
    fn pole_is_reported_for_ball3d() {
        let p = EigenProblem::ball(3, 1.0, 0.5).unwrap();
        assert_eq!(characteristic_value(&p, PI), Characteristic::Pole);
        assert_eq!(characteristic_value(&p, 0.0), Characteristic::Pole);
        assert_eq!(
            characteristic_value(&p, 1.0),
            Characteristic::Value(1.0f64.cos() / 1.0f64.sin() - 0.5)
        );
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        for p in cases() {
            for m in spectrum(&p, 4).unwrap() {
                let r = 0.5 * (p.r_inner + p.r_outer);
                let h = 1e-4;
                let fd = (m.value(r + h) - 2.0 * m.value(r) + m.value(r - h)) / (h * h);
                let (v, d) = m.value_and_derivative(r);
                assert_relative_eq!(
                    m.second_derivative(r, v, d),
                    fd,
                    epsilon = 1e-5 * (1.0 + fd.abs())
                );
            }
        }
    }
}
