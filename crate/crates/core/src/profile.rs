//! Piecewise-polynomial scalar profiles: initial velocities, initial
//! densities and boundary traces.
//!
//! Piece `i` lives on `[breaks[i], breaks[i+1])` and is a polynomial in the
//! local variable `x - breaks[i]`. The last piece extends to infinity and
//! points left of `breaks[0]` use the first piece.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileForm", into = "ProfileForm")]
pub struct ScalarProfile {
    breaks: Vec<f64>,
    pieces: Vec<Polynomial>,
    // integral of the profile from breaks[0] to breaks[i]
    prim: Vec<f64>,
    // integral of the squared positive part from breaks[0] to breaks[i]
    pos_sq: Vec<f64>,
}

impl ScalarProfile {
    pub fn from_pieces(breaks: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != coeffs.len() {
            return Err(Error::Invalid(format!(
                "profile needs one coefficient list per break ({} breaks, {} pieces)",
                breaks.len(),
                coeffs.len()
            )));
        }
        if breaks.iter().any(|b| !b.is_finite()) || coeffs.iter().flatten().any(|c| !c.is_finite())
        {
            return Err(Error::Invalid("profile data must be finite".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "profile breaks must be strictly increasing".into(),
            ));
        }
        if coeffs.iter().any(|c| c.is_empty()) {
            return Err(Error::Invalid("empty coefficient list".into()));
        }
        let pieces: Vec<Polynomial> = coeffs.into_iter().map(Polynomial::new).collect();
        let mut prim = vec![0.0];
        let mut pos_sq = vec![0.0];
        for i in 0..pieces.len() - 1 {
            let h = breaks[i + 1] - breaks[i];
            prim.push(prim[i] + pieces[i].antiderivative().eval(h));
            pos_sq.push(pos_sq[i] + positive_square_piece(&pieces[i], 0.0, h));
        }
        Ok(Self {
            breaks,
            pieces,
            prim,
            pos_sq,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_pieces(vec![0.0], vec![vec![c]]).expect("finite constant")
    }

    /// Single polynomial in `x` on the whole line.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::from_pieces(vec![0.0], vec![coeffs])
    }

    pub fn piecewise_constant(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_pieces(breaks, values.into_iter().map(|v| vec![v]).collect())
    }

    /// Linear interpolation through the table, constant beyond the last node.
    pub fn piecewise_linear(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Invalid(
                "table needs matching non-empty x and y".into(),
            ));
        }
        let mut coeffs: Vec<Vec<f64>> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| vec![y[0], (y[1] - y[0]) / (x[1] - x[0])])
            .collect();
        coeffs.push(vec![*ys.last().unwrap()]);
        Self::from_pieces(xs, coeffs)
    }

    /// `height * (1 - ((x - center)/half_width)^2)^power` on its support,
    /// zero elsewhere.
    pub fn bump(center: f64, half_width: f64, height: f64, power: u32) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Invalid("bump half width must be positive".into()));
        }
        let w = half_width;
        let local = Polynomial::new(vec![0.0, 2.0 / w, -1.0 / (w * w)])
            .pow(power)
            .scale(height);
        let lo = center - w;
        if lo > 0.0 {
            Self::from_pieces(
                vec![0.0, lo, center + w],
                vec![vec![0.0], local.coeffs().to_vec(), vec![0.0]],
            )
        } else {
            Self::from_pieces(
                vec![lo, center + w],
                vec![local.coeffs().to_vec(), vec![0.0]],
            )
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    /// Interval `[lo, hi)` covered by piece `i` (the last one is unbounded).
    pub fn piece_interval(&self, i: usize) -> (f64, f64) {
        let hi = self.breaks.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.breaks[i]
        };
        (lo, hi)
    }

    fn locate(&self, x: f64) -> usize {
        match self.breaks.partition_point(|&b| b <= x) {
            0 => 0,
            k => k - 1,
        }
    }

    fn locate_left(&self, x: f64) -> usize {
        match self.breaks.partition_point(|&b| b < x) {
            0 => 0,
            k => k - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locate(x);
        self.pieces[i].eval(x - self.breaks[i])
    }

    /// Left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let i = self.locate_left(x);
        self.pieces[i].eval(x - self.breaks[i])
    }

    /// Derivative from the right.
    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.locate(x);
        self.pieces[i].derivative().eval(x - self.breaks[i])
    }

    fn prim(&self, x: f64) -> f64 {
        let i = self.locate(x);
        self.prim[i] + self.pieces[i].antiderivative().eval(x - self.breaks[i])
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.prim(b) - self.prim(a)
    }

    fn pos_sq_prim(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let u = x - self.breaks[i];
        if u >= 0.0 {
            self.pos_sq[i] + positive_square_piece(&self.pieces[i], 0.0, u)
        } else {
            self.pos_sq[i] - positive_square_piece(&self.pieces[i], u, 0.0)
        }
    }

    /// Exact integral of `max(f, 0)^2` over `[a, b]`.
    pub fn positive_square_integral(&self, a: f64, b: f64) -> f64 {
        self.pos_sq_prim(b) - self.pos_sq_prim(a)
    }

    /// Sign-change points of the profile in `[a, b]` (roots of pieces and
    /// breaks where the one-sided values straddle zero).
    pub fn zero_crossings(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            let lo = lo.max(a);
            let hi = hi.min(b);
            if hi < lo {
                continue;
            }
            let x0 = self.breaks[i];
            out.extend(p.roots_in(lo - x0, hi - x0).into_iter().map(|u| u + x0));
        }
        for &x in &self.breaks {
            if x > a && x < b && self.eval_left(x) * self.eval(x) < 0.0 {
                out.push(x);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Supremum of `|f|` on `[a, b]`.
    pub fn sup_abs(&self, a: f64, b: f64) -> f64 {
        let mut best = self.eval(a).abs().max(self.eval_left(b).abs());
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            let lo = lo.max(a);
            let hi = hi.min(b);
            if hi < lo {
                continue;
            }
            let x0 = self.breaks[i];
            best = best.max(p.eval(lo - x0).abs()).max(p.eval(hi - x0).abs());
            for u in p.derivative().roots_in(lo - x0, hi - x0) {
                best = best.max(p.eval(u).abs());
            }
        }
        best
    }

    /// True when the last piece is constant, so the profile is bounded on
    /// `[0, inf)`.
    pub fn is_bounded(&self) -> bool {
        self.pieces.last().unwrap().degree() == 0
    }

    /// `sup |f|` over `[0, inf)` when bounded.
    pub fn sup_abs_all(&self) -> Option<f64> {
        if !self.is_bounded() {
            return None;
        }
        let end = (*self.breaks.last().unwrap()).max(0.0);
        Some(self.sup_abs(0.0, end).max(self.eval(end).abs()))
    }

    /// Maximum of the profile on `[a, b]` (not absolute).
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        let mut best = self.eval(a).max(self.eval_left(b));
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            let lo = lo.max(a);
            let hi = hi.min(b);
            if hi < lo {
                continue;
            }
            let x0 = self.breaks[i];
            best = best.max(p.eval(lo - x0)).max(p.eval(hi - x0));
            for u in p.derivative().roots_in(lo - x0, hi - x0) {
                best = best.max(p.eval(u));
            }
        }
        best
    }

    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        -self.negated().max_on(a, b)
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// `c f` for finite `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::from_pieces(
            self.breaks.clone(),
            self.pieces
                .iter()
                .map(|p| p.scale(c).coeffs().to_vec())
                .collect(),
        )
        .expect("scaling by a finite constant keeps validity")
    }
}

fn positive_square_piece(p: &Polynomial, u0: f64, u1: f64) -> f64 {
    if u1 <= u0 {
        return 0.0;
    }
    let sq = (p * p).antiderivative();
    let mut pts = vec![u0];
    pts.extend(p.roots_in(u0, u1));
    pts.push(u1);
    pts.windows(2)
        .filter(|w| w[1] > w[0] && p.eval(0.5 * (w[0] + w[1])) > 0.0)
        .map(|w| sq.eval(w[1]) - sq.eval(w[0]))
        .sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableForm {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepForm {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpForm {
    pub center: f64,
    pub half_width: f64,
    pub height: f64,
    #[serde(default = "default_power")]
    pub power: u32,
}

fn default_power() -> u32 {
    3
}

/// Config-file forms of a profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileForm {
    Constant {
        constant: f64,
    },
    Pieces {
        breaks: Vec<f64>,
        coeffs: Vec<Vec<f64>>,
    },
    Table {
        table: TableForm,
    },
    Steps {
        steps: StepForm,
    },
    Bump {
        bump: BumpForm,
    },
}

impl TryFrom<ProfileForm> for ScalarProfile {
    type Error = Error;
    fn try_from(form: ProfileForm) -> Result<Self> {
        match form {
            ProfileForm::Constant { constant } => {
                if !constant.is_finite() {
                    return Err(Error::Invalid("profile data must be finite".into()));
                }
                Ok(Self::constant(constant))
            }
            ProfileForm::Pieces { breaks, coeffs } => Self::from_pieces(breaks, coeffs),
            ProfileForm::Table { table } => Self::piecewise_linear(table.x, table.y),
            ProfileForm::Steps { steps } => Self::piecewise_constant(steps.breaks, steps.values),
            ProfileForm::Bump { bump } => {
                Self::bump(bump.center, bump.half_width, bump.height, bump.power)
            }
        }
    }
}

impl From<ScalarProfile> for ProfileForm {
    fn from(p: ScalarProfile) -> Self {
        ProfileForm::Pieces {
            breaks: p.breaks,
            coeffs: p.pieces.iter().map(|q| q.coeffs().to_vec()).collect(),
        }
    }
}
