//! Bundled example scenarios.

use super::{Scenario, ScenarioError};

const GALLERY: &[(&str, &str)] = &[
    (
        "annulus2d_through",
        include_str!("../../scenarios/annulus2d_through.toml"),
    ),
    (
        "annulus3d_converging",
        include_str!("../../scenarios/annulus3d_converging.toml"),
    ),
    (
        "ball2d_outflow",
        include_str!("../../scenarios/ball2d_outflow.toml"),
    ),
    (
        "ball3d_inflow",
        include_str!("../../scenarios/ball3d_inflow.toml"),
    ),
    (
        "compare_annulus2d",
        include_str!("../../scenarios/compare_annulus2d.toml"),
    ),
    (
        "compare_ball3d",
        include_str!("../../scenarios/compare_ball3d.toml"),
    ),
    (
        "eigen_annulus2d",
        include_str!("../../scenarios/eigen_annulus2d.toml"),
    ),
    (
        "eigen_annulus3d",
        include_str!("../../scenarios/eigen_annulus3d.toml"),
    ),
    (
        "eigen_ball2d",
        include_str!("../../scenarios/eigen_ball2d.toml"),
    ),
    (
        "eigen_ball3d",
        include_str!("../../scenarios/eigen_ball3d.toml"),
    ),
    (
        "freespace_bump3d",
        include_str!("../../scenarios/freespace_bump3d.toml"),
    ),
    (
        "freespace_decay3d",
        include_str!("../../scenarios/freespace_decay3d.toml"),
    ),
    (
        "freespace_linear1d",
        include_str!("../../scenarios/freespace_linear1d.toml"),
    ),
    (
        "freespace_ring2d",
        include_str!("../../scenarios/freespace_ring2d.toml"),
    ),
    (
        "inviscid_inflow3d",
        include_str!("../../scenarios/inviscid_inflow3d.toml"),
    ),
    (
        "inviscid_outflow",
        include_str!("../../scenarios/inviscid_outflow.toml"),
    ),
    (
        "inviscid_switching",
        include_str!("../../scenarios/inviscid_switching.toml"),
    ),
    (
        "riemann_delta2d",
        include_str!("../../scenarios/riemann_delta2d.toml"),
    ),
    (
        "riemann_delta3d",
        include_str!("../../scenarios/riemann_delta3d.toml"),
    ),
    (
        "viscosity_sweep2d",
        include_str!("../../scenarios/viscosity_sweep2d.toml"),
    ),
];

/// Names of the bundled scenarios, sorted.
pub fn names() -> Vec<&'static str> {
    GALLERY.iter().map(|(n, _)| *n).collect()
}

/// TOML source of a bundled scenario.
pub fn source(name: &str) -> Option<&'static str> {
    GALLERY.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<Scenario, ScenarioError> {
    let text = source(name)
        .ok_or_else(|| ScenarioError::Parse(format!("no bundled scenario named {name}")))?;
    Scenario::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_and_validates() {
        for n in names() {
            let s = load(n).unwrap_or_else(|e| panic!("{n}: {e}"));
            assert_eq!(s.name, n);
            s.validate().unwrap_or_else(|e| panic!("{n}: {e}"));
        }
        assert!(load("missing").is_err());
    }
}
