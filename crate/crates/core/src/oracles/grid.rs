use crate::error::{Error, Result};
use crate::fd::Tridiagonal;

/// Cell-centred grid on `[r_inner, r_outer]`. For a ball `r_inner = 0` and
/// the first face sits on the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    pub dim: u32,
    pub r_inner: f64,
    pub r_outer: f64,
    pub ball: bool,
    pub dr: f64,
    pub centers: Vec<f64>,
}

impl CellGrid {
    pub fn new(dim: u32, r_inner: f64, r_outer: f64, cells: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Invalid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if !(r_inner >= 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::Invalid("grid needs 0 <= r_inner < r_outer".into()));
        }
        if cells < 8 {
            return Err(Error::Invalid("grid needs at least 8 cells".into()));
        }
        let dr = (r_outer - r_inner) / cells as f64;
        Ok(Self {
            dim,
            r_inner,
            r_outer,
            ball: r_inner == 0.0,
            dr,
            centers: (0..cells)
                .map(|i| r_inner + (i as f64 + 0.5) * dr)
                .collect(),
        })
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    /// Second-order stencil of `f'' + (n-1)/r f' - c (n-1)/r^2 f` before
    /// ghost folding. Row `i` couples cells `i-1, i, i+1`; entries pointing
    /// at ghosts are returned separately as `(inner, outer)`.
    pub fn radial_operator(&self, zeroth: f64) -> (Tridiagonal, f64, f64) {
        let n = self.cells();
        let n1 = (self.dim - 1) as f64;
        let h = self.dr;
        let mut t = Tridiagonal::zeros(n);
        for (i, &r) in self.centers.iter().enumerate() {
            t.lower[i] = 1.0 / (h * h) - n1 / (2.0 * r * h);
            t.diag[i] = -2.0 / (h * h) - zeroth * n1 / (r * r);
            t.upper[i] = 1.0 / (h * h) + n1 / (2.0 * r * h);
        }
        let gi = t.lower[0];
        let go = t.upper[n - 1];
        t.lower[0] = 0.0;
        t.upper[n - 1] = 0.0;
        (t, gi, go)
    }

    /// Index of the cell left of `r` and the linear weight, over the node list
    /// `[r_inner, centers..., r_outer]`.
    pub fn locate(&self, r: f64) -> (usize, f64) {
        let n = self.cells();
        let x = ((r - self.r_inner) / self.dr + 0.5).clamp(0.0, n as f64 + 1.0);
        // node k sits at r_inner + (k - 0.5) dr for 1 <= k <= n; node 0 at r_inner
        if x < 1.0 {
            let w = (r - self.r_inner) / (0.5 * self.dr);
            return (0, w.clamp(0.0, 1.0));
        }
        if x >= n as f64 {
            let w = (r - self.centers[n - 1]) / (0.5 * self.dr);
            return (n, w.clamp(0.0, 1.0));
        }
        let k = x.floor() as usize;
        (k, x - k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_covers_the_boundary_half_cells() {
        let g = CellGrid::new(2, 1.0, 2.0, 10).unwrap();
        assert_eq!(g.locate(1.0), (0, 0.0));
        let (k, w) = g.locate(1.05);
        assert_eq!(k, 1);
        assert!(w.abs() < 1e-12);
        let (k, w) = g.locate(2.0);
        assert_eq!(k, 10);
        assert!((w - 1.0).abs() < 1e-12);
        let (k, w) = g.locate(1.5);
        assert_eq!(k, 5);
        assert!((w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn operator_is_exact_on_quadratics_away_from_edges() {
        let g = CellGrid::new(3, 1.0, 2.0, 16).unwrap();
        let (t, _, _) = g.radial_operator(0.0);
        let f: Vec<f64> = g.centers.iter().map(|r| r * r).collect();
        let lf = t.apply(&f);
        // f'' + 2 f' / r = 2 + 4 = 6
        for v in &lf[1..15] {
            assert!((v - 6.0).abs() < 1e-9);
        }
    }
}
