//! Dense real polynomials with ascending coefficients.

use std::ops::{Add, Mul};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Self::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(x + a)` expressed as a polynomial in `x`.
    pub fn shift(&self, a: f64) -> Self {
        // repeated synthetic division (Taylor shift)
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += a * c[j + 1];
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Real roots in the closed interval `[lo, hi]`, ascending, found by
    /// isolating monotone pieces between critical points and bisecting.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut roots = Vec::new();
        if !(hi >= lo) || self.is_zero() {
            return roots;
        }
        match self.degree() {
            0 => return roots,
            1 => {
                let x = -self.coeffs[0] / self.coeffs[1];
                if x >= lo && x <= hi {
                    roots.push(x);
                }
                return roots;
            }
            _ => {}
        }
        let mut pts = vec![lo];
        pts.extend(self.derivative().roots_in(lo, hi));
        pts.push(hi);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fa = self.eval(a);
            let fb = self.eval(b);
            if fa == 0.0 {
                roots.push(a);
            } else if fa * fb < 0.0 {
                roots.push(bisect(|x| self.eval(x), a, b, fa));
            }
        }
        if self.eval(hi) == 0.0 {
            roots.push(hi);
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));
        roots
    }
}

/// Bisection to full floating-point resolution; `fa` is `f(a)` and the
/// caller guarantees a sign change on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    if f(b).abs() < fa.abs() {
        b
    } else {
        a
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}
