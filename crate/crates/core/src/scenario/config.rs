use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::bounded::{BoundedOptions, BoundedProblem};
use crate::freespace::FreespaceProblem;
use crate::inviscid::InviscidProblem;
use crate::profile::ScalarProfile;
use crate::radial::linspace;
use crate::specfun::{DomainCase, EigenProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Freespace,
    Ball,
    Annulus,
    Inviscid,
    VerifyRh,
    OracleCompare,
    Eigen,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Freespace => "freespace",
            Mode::Ball => "ball",
            Mode::Annulus => "annulus",
            Mode::Inviscid => "inviscid",
            Mode::VerifyRh => "verify-rh",
            Mode::OracleCompare => "oracle-compare",
            Mode::Eigen => "eigen",
        }
    }
}

/// `count` equally spaced points on `[from, to]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl GridRange {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.count)
    }

    fn validate(&self, what: &str) -> Result<(), ScenarioError> {
        if !(self.from.is_finite() && self.to.is_finite())
            || self.count < 2
            || !(self.to > self.from)
        {
            return Err(ScenarioError::Validation(format!(
                "{what} grid needs finite from < to and at least two points"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r: GridRange,
    pub t: GridRange,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenConfig {
    pub case: DomainCase,
    #[serde(default)]
    pub r_inner: f64,
    pub r_outer: f64,
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default)]
    pub q_inner: f64,
    #[serde(default)]
    pub q_outer: f64,
    pub count: usize,
}

impl EigenConfig {
    pub fn problem(&self) -> Result<EigenProblem, ScenarioError> {
        if !(self.epsilon > 0.0) {
            return Err(ScenarioError::Validation("epsilon must be positive".into()));
        }
        let (k1, k2) = (self.q_inner / self.epsilon, self.q_outer / self.epsilon);
        Ok(if self.case.is_ball() {
            EigenProblem::ball(self.case.dim(), self.r_outer, k2)?
        } else {
            EigenProblem::annulus(self.case.dim(), self.r_inner, self.r_outer, k1, k2)?
        })
    }
}

/// Compares `max |q|` on `[0, r_max]` at two times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub early: f64,
    pub late: f64,
    pub r_max: f64,
    /// Required `max|q(late)| / max|q(early)|`.
    #[serde(default = "default_decay_ratio")]
    pub ratio: f64,
}

fn default_decay_ratio() -> f64 {
    0.01
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreespaceConfig {
    pub dim: u32,
    pub epsilon: f64,
    pub q0: ScalarProfile,
    pub rho0: ScalarProfile,
    pub support_radius: f64,
    /// Random `(x, t)` samples for the velocity bound; `t` in the grid range.
    #[serde(default = "default_samples")]
    pub bound_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Times at which the total mass is compared with the initial mass.
    #[serde(default)]
    pub mass_times: Vec<f64>,
    #[serde(default)]
    pub decay: Option<DecayConfig>,
    /// Compare with `q = r / (1 + t)`, the flow of `q0 = r`.
    #[serde(default)]
    pub linear_reference: bool,
}

impl FreespaceConfig {
    pub fn problem(&self) -> Result<FreespaceProblem, ScenarioError> {
        Ok(FreespaceProblem::radial(
            self.dim,
            self.epsilon,
            self.q0.clone(),
            self.rho0.clone(),
            self.support_radius,
        )?)
    }
}

fn default_terms() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundedConfig {
    pub case: DomainCase,
    #[serde(default)]
    pub r_inner: f64,
    pub r_outer: f64,
    pub epsilon: f64,
    pub q0: ScalarProfile,
    pub rho0: ScalarProfile,
    #[serde(default)]
    pub q_inner: f64,
    #[serde(default)]
    pub q_outer: f64,
    #[serde(default)]
    pub rho_inner: Option<ScalarProfile>,
    #[serde(default)]
    pub rho_outer: Option<ScalarProfile>,
    #[serde(default = "default_terms")]
    pub terms: usize,
    /// Times for the mass-flux identity.
    #[serde(default)]
    pub flux_times: Vec<f64>,
    /// Refinement study of the heat residual.
    #[serde(default)]
    pub heat_refinement: bool,
    /// Time at which the series is compared with its one-mode limit.
    #[serde(default)]
    pub large_time: Option<f64>,
}

impl BoundedConfig {
    pub fn problem(&self) -> Result<BoundedProblem, ScenarioError> {
        let dim = self.case.dim();
        let p = if self.case.is_ball() {
            BoundedProblem::ball(
                dim,
                self.r_outer,
                self.epsilon,
                self.q0.clone(),
                self.rho0.clone(),
                self.q_outer,
                self.rho_outer.clone(),
            )?
        } else {
            BoundedProblem::annulus(
                dim,
                self.r_inner,
                self.r_outer,
                self.epsilon,
                self.q0.clone(),
                self.rho0.clone(),
                (self.q_inner, self.q_outer),
                (self.rho_inner.clone(), self.rho_outer.clone()),
            )?
        };
        Ok(p)
    }

    pub fn options(&self) -> BoundedOptions {
        BoundedOptions {
            terms: self.terms,
            ..Default::default()
        }
    }
}

fn default_density() -> usize {
    50
}

/// Brute-force comparison panel for the path minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteForceConfig {
    pub r: GridRange,
    pub t: GridRange,
    #[serde(default = "default_density")]
    pub density: usize,
}

/// Sticky-particle run on the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StickyConfig {
    pub particles: usize,
    /// Particles are laid on `[0, extent]`.
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InviscidConfig {
    pub dim: u32,
    pub q0: ScalarProfile,
    pub p0: ScalarProfile,
    pub q_b: ScalarProfile,
    pub p_b: ScalarProfile,
    #[serde(default)]
    pub brute_force: Option<BruteForceConfig>,
    #[serde(default)]
    pub sticky: Option<StickyConfig>,
}

impl InviscidConfig {
    pub fn problem(&self) -> Result<InviscidProblem, ScenarioError> {
        Ok(InviscidProblem::new(
            self.dim,
            self.q0.clone(),
            self.p0.clone(),
            self.q_b.clone(),
            self.p_b.clone(),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareKind {
    /// Series solution against the finite-volume solver (needs `[bounded]`).
    SeriesFd,
    /// Free-space viscous velocities against the inviscid limit (needs
    /// `[inviscid]` with `q_b = 0`).
    VanishingViscosity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub kind: CompareKind,
    #[serde(default)]
    pub cells: Option<usize>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Sample radii for the viscosity sweep.
    #[serde(default)]
    pub points: Vec<f64>,
    #[serde(default)]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub mode: Mode,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub eigen: Option<EigenConfig>,
    #[serde(default)]
    pub freespace: Option<FreespaceConfig>,
    #[serde(default)]
    pub bounded: Option<BoundedConfig>,
    #[serde(default)]
    pub inviscid: Option<InviscidConfig>,
    #[serde(default)]
    pub compare: Option<CompareConfig>,
    /// Per-check tolerance overrides, by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn need<'a, T>(section: &'a Option<T>, name: &str, mode: Mode) -> Result<&'a T, ScenarioError> {
    section.as_ref().ok_or_else(|| {
        ScenarioError::Parse(format!("mode {} needs a [{name}] section", mode.name()))
    })
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        s.check_sections()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn grid(&self) -> Result<&GridConfig, ScenarioError> {
        need(&self.grid, "grid", self.mode)
    }

    pub fn eigen(&self) -> Result<&EigenConfig, ScenarioError> {
        need(&self.eigen, "eigen", self.mode)
    }

    pub fn freespace(&self) -> Result<&FreespaceConfig, ScenarioError> {
        need(&self.freespace, "freespace", self.mode)
    }

    pub fn bounded(&self) -> Result<&BoundedConfig, ScenarioError> {
        need(&self.bounded, "bounded", self.mode)
    }

    pub fn inviscid(&self) -> Result<&InviscidConfig, ScenarioError> {
        need(&self.inviscid, "inviscid", self.mode)
    }

    pub fn compare(&self) -> Result<&CompareConfig, ScenarioError> {
        need(&self.compare, "compare", self.mode)
    }

    /// Required sections are present.
    fn check_sections(&self) -> Result<(), ScenarioError> {
        match self.mode {
            Mode::Eigen => {
                self.eigen()?;
            }
            Mode::Freespace => {
                self.freespace()?;
                self.grid()?;
            }
            Mode::Ball | Mode::Annulus => {
                self.bounded()?;
                self.grid()?;
            }
            Mode::Inviscid | Mode::VerifyRh => {
                self.inviscid()?;
                self.grid()?;
            }
            Mode::OracleCompare => match self.compare()?.kind {
                CompareKind::SeriesFd => {
                    self.bounded()?;
                    self.grid()?;
                }
                CompareKind::VanishingViscosity => {
                    self.inviscid()?;
                }
            },
        }
        Ok(())
    }

    /// Mode-specific validation: builds every problem the run will need.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if let Some(g) = &self.grid {
            g.r.validate("r")?;
            g.t.validate("t")?;
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0) {
                return Err(ScenarioError::Validation(format!(
                    "tolerance {k} must be positive"
                )));
            }
        }
        match self.mode {
            Mode::Eigen => {
                let e = self.eigen()?;
                e.problem()?;
                if e.count == 0 {
                    return Err(ScenarioError::Validation("count must be positive".into()));
                }
            }
            Mode::Freespace => {
                let f = self.freespace()?;
                f.problem()?;
                if self.grid()?.t.from < 0.0 {
                    return Err(ScenarioError::Validation(
                        "times must be nonnegative".into(),
                    ));
                }
            }
            Mode::Ball | Mode::Annulus => {
                let b = self.bounded()?;
                if b.case.is_ball() != (self.mode == Mode::Ball) {
                    return Err(ScenarioError::Validation(format!(
                        "mode {} does not match domain case {:?}",
                        self.mode.name(),
                        b.case
                    )));
                }
                let p = b.problem()?;
                let g = self.grid()?;
                if g.r.from < p.r_inner || g.r.to > p.r_outer || !(g.t.from > 0.0) {
                    return Err(ScenarioError::Validation(
                        "grid must lie inside the domain with t > 0".into(),
                    ));
                }
            }
            Mode::Inviscid | Mode::VerifyRh => {
                self.inviscid()?.problem()?;
                let g = self.grid()?;
                if !(g.r.from > 0.0 && g.t.from > 0.0) {
                    return Err(ScenarioError::Validation(
                        "inviscid grids need r > 0 and t > 0".into(),
                    ));
                }
                if let Some(bf) = &self.inviscid()?.brute_force {
                    bf.r.validate("brute-force r")?;
                    bf.t.validate("brute-force t")?;
                    if bf.density < 50 || !(bf.r.from >= 0.0 && bf.t.from > 0.0) {
                        return Err(ScenarioError::Validation(
                            "brute force needs density >= 50, r >= 0 and t > 0".into(),
                        ));
                    }
                }
            }
            Mode::OracleCompare => {
                let c = self.compare()?;
                match c.kind {
                    CompareKind::SeriesFd => {
                        self.bounded()?.problem()?;
                        if c.cells.is_some_and(|n| n < 8) {
                            return Err(ScenarioError::Validation("at least 8 cells".into()));
                        }
                    }
                    CompareKind::VanishingViscosity => {
                        let p = self.inviscid()?.problem()?;
                        if p.q_b.sup_abs_all() != Some(0.0) {
                            return Err(ScenarioError::Validation(
                                "the viscosity sweep compares with free space and needs q_b = 0"
                                    .into(),
                            ));
                        }
                        if c.epsilons.len() < 2
                            || c.points.is_empty()
                            || !c.time.is_some_and(|t| t > 0.0)
                        {
                            return Err(ScenarioError::Validation(
                                "sweep needs two or more epsilons, sample points and a positive time".into(),
                            ));
                        }
                        if c.epsilons.windows(2).any(|w| !(w[1] < w[0]))
                            || c.epsilons.iter().any(|e| !(*e > 0.0))
                        {
                            return Err(ScenarioError::Validation(
                                "epsilons must be positive and decreasing".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
