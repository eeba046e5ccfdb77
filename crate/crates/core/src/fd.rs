//! Finite-difference weights on arbitrary nodes and a tridiagonal solver.

/// Weights for the `order`-th derivative at `x0` from values at `nodes`
/// (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "need more nodes than the derivative order");
    let m = order;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First index of a `len`-point stencil around `i`, shifted inward at edges.
pub fn stencil_start(i: usize, len: usize, n: usize) -> usize {
    assert!(n >= len);
    i.saturating_sub(len / 2).min(n - len)
}

/// `order`-th derivative at grid index `i` from a `len`-point stencil.
pub fn derivative_at(
    grid: &[f64],
    value: impl Fn(usize) -> f64,
    i: usize,
    order: usize,
    len: usize,
) -> f64 {
    let s = stencil_start(i, len, grid.len());
    let w = fornberg_weights(grid[i], &grid[s..s + len], order);
    w.iter().enumerate().map(|(k, wk)| wk * value(s + k)).sum()
}

/// Tridiagonal operator `(A x)_i = lower_i x_{i-1} + diag_i x_i + upper_i x_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// `identity + scale * self`.
    pub fn shifted(&self, scale: f64) -> Self {
        Self {
            lower: self.lower.iter().map(|v| scale * v).collect(),
            diag: self.diag.iter().map(|v| 1.0 + scale * v).collect(),
            upper: self.upper.iter().map(|v| scale * v).collect(),
        }
    }

    /// Thomas algorithm; the matrix must be diagonally dominant enough not
    /// to need pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.upper[0] / self.diag[0];
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.lower[i] * c[i - 1];
            c[i] = self.upper[i] / m;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tridiagonal_round_trip() {
        let mut t = Tridiagonal::zeros(5);
        for i in 0..5 {
            t.lower[i] = -1.0;
            t.diag[i] = 4.0 + i as f64;
            t.upper[i] = 0.5;
        }
        let x = vec![1.0, -2.0, 3.0, 0.5, -1.5];
        let y = t.apply(&x);
        for (a, b) in t.solve(&y).iter().zip(&x) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn classic_central_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w[0], 1.0);
        assert_relative_eq!(w[1], -2.0);
        assert_relative_eq!(w[2], 1.0);
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn nonuniform_stencil_is_exact_on_quartics() {
        let grid = [0.0, 0.13, 0.4, 0.55, 0.9, 1.3];
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + x.powi(4);
        let d2 = |x: f64| 3.0 * x + 12.0 * x * x;
        for i in 0..grid.len() {
            let v = derivative_at(&grid, |k| f(grid[k]), i, 2, 5);
            assert_relative_eq!(v, d2(grid[i]), epsilon = 1e-9);
        }
    }
}
