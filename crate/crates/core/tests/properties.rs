use proptest::prelude::*;
use zpgd::bounded::GreenEvaluator;
use zpgd::freespace::{self, FreespaceProblem};
use zpgd::inviscid::{minimize_paths, solve_panel, Branch, InviscidProblem};
use zpgd::oracles::{sticky_particle_run, Particle};
use zpgd::radial::linspace;
use zpgd::specfun::eigen::{
    characteristic_value, find_eigenvalues, find_eigenvalues_with_step, Characteristic,
    EigenProblem,
};
use zpgd::ScalarProfile;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn eigen_problem() -> impl Strategy<Value = EigenProblem> {
    prop_oneof![
        (2u32..=3, 0.5f64..3.0, -2.0f64..2.0)
            .prop_map(|(n, r, k)| EigenProblem::ball(n, r, k).unwrap()),
        (
            2u32..=3,
            0.2f64..1.5,
            0.3f64..2.0,
            -1.5f64..1.5,
            -1.5f64..1.5
        )
            .prop_map(|(n, r1, l, k1, k2)| EigenProblem::annulus(n, r1, r1 + l, k1, k2).unwrap()),
    ]
}

fn value(p: &EigenProblem, mu: f64) -> Option<f64> {
    match characteristic_value(p, mu) {
        Characteristic::Value(v) => Some(v),
        Characteristic::Pole => None,
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn eigenvalues_are_simple_roots_stable_under_refinement(p in eigen_problem()) {
        let list = find_eigenvalues(&p, 12).unwrap();
        prop_assert!(list.values.windows(2).all(|w| w[0] < w[1]));
        for (mu, res) in list.values.iter().zip(&list.residuals) {
            prop_assert!(*res <= 1e-10 * mu.max(1.0), "residual {res} at {mu}");
            let d = 1e-6 * mu.max(1.0);
            if let (Some(a), Some(b)) = (value(&p, mu - d), value(&p, mu + d)) {
                prop_assert!(a * b < 0.0, "no sign change at {mu}");
            }
        }
        let half = find_eigenvalues_with_step(&p, 12, 0.5 * p.scan_step()).unwrap();
        for (a, b) in list.values.iter().zip(&half.values) {
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn green_function_is_symmetric_with_weights(
        n in 2u32..=3,
        k in -1.0f64..1.0,
        r in 0.05f64..0.95,
        xi in 0.05f64..0.95,
        t in 0.05f64..1.0,
    ) {
        let g = GreenEvaluator::new(EigenProblem::ball(n, 1.0, k).unwrap(), 0.5, 120).unwrap();
        let w = |x: f64| x.powi(n as i32 - 1);
        let a = g.green(r, xi, t).unwrap() / w(xi);
        let b = g.green(xi, r, t).unwrap() / w(r);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    }
}

fn bump_problem(dim: u32, eps: f64, c: f64, w: f64, h: f64) -> FreespaceProblem {
    let q0 = ScalarProfile::bump(c, w, h, 2).unwrap();
    let rho0 = ScalarProfile::bump(0.0, 1.0, 1.0, 2).unwrap();
    FreespaceProblem::radial(dim, eps, q0, rho0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn free_space_velocity_is_bounded_by_initial_gradient(
        dim in 1u32..=3,
        eps in 0.05f64..1.0,
        c in 0.0f64..2.0,
        w in 0.3f64..1.5,
        h in -2.0f64..2.0,
        x in prop::collection::vec(-4.0f64..4.0, 3),
        t in 0.01f64..20.0,
    ) {
        let p = bump_problem(dim, eps, c, w, h);
        let sup = ScalarProfile::bump(c, w, h, 2).unwrap().sup_abs_all().unwrap();
        let u = freespace::velocity(&p, &x[..dim as usize], t).unwrap();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(norm <= sup + 1e-8, "|u| = {norm}, sup = {sup}");
    }

    #[test]
    fn backward_flow_has_positive_jacobian(
        dim in 1u32..=3,
        eps in 0.05f64..1.0,
        h in -1.5f64..1.5,
        x in prop::collection::vec(-3.0f64..3.0, 3),
        t in 0.05f64..5.0,
    ) {
        let p = bump_problem(dim, eps, 0.5, 0.8, h);
        let ch = freespace::trace_characteristic(&p, &x[..dim as usize], t).unwrap();
        prop_assert!(ch.jacobian > 0.0 && ch.jacobian.is_finite());
    }

    #[test]
    fn velocity_differences_stay_finite(
        dim in 1u32..=3,
        eps in 0.01f64..1.0,
        h in -1.5f64..1.5,
        r in 0.0f64..3.0,
        t in 0.01f64..5.0,
    ) {
        let p = bump_problem(dim, eps, 0.5, 0.8, h);
        let dx = 1e-4;
        let mut x = vec![0.0; dim as usize];
        x[0] = r + dx;
        let a = freespace::velocity(&p, &x, t).unwrap()[0];
        x[0] = r - dx;
        let b = freespace::velocity(&p, &x, t).unwrap()[0];
        prop_assert!(((a - b) / (2.0 * dx)).is_finite());
    }
}

fn step_profile() -> impl Strategy<Value = ScalarProfile> {
    (
        prop::collection::vec(0.1f64..1.0, 1..4),
        prop::collection::vec(-1.5f64..1.5, 4),
    )
        .prop_map(|(gaps, vals)| {
            let mut breaks = vec![0.0];
            for g in gaps {
                let last = *breaks.last().unwrap();
                breaks.push(last + g);
            }
            let values = vals[..breaks.len()].to_vec();
            ScalarProfile::piecewise_constant(breaks, values).unwrap()
        })
}

fn inviscid_problem() -> impl Strategy<Value = InviscidProblem> {
    (2u32..=3, step_profile(), step_profile(), 0.0f64..2.0).prop_map(|(n, q0, q_b, p_b)| {
        let p0 = ScalarProfile::piecewise_constant(vec![0.0, 3.0], vec![1.0, 0.0]).unwrap();
        // total mass: initial mass plus a nondecreasing injected part
        let omega = if n == 2 { 2.0 } else { 4.0 } * std::f64::consts::PI;
        let p_b = ScalarProfile::polynomial(vec![3.0 * omega, p_b]).unwrap();
        InviscidProblem::new(n, q0, p0, q_b, p_b).unwrap()
    })
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn path_minimum_reevaluates_consistently(
        p in inviscid_problem(),
        r in 0.01f64..3.0,
        t in 0.05f64..2.0,
    ) {
        let m = minimize_paths(&p, r, t).unwrap();
        let again = m.reevaluate(&p, r, t).unwrap();
        prop_assert!((again - m.value).abs() <= 1e-10 * m.value.abs().max(1.0));
        if let Branch::Boundary { t1, t2 } = m.branch {
            prop_assert!(t1 < t2 && t2 < t, "t1 {t1} t2 {t2} t {t}");
        }
    }

    #[test]
    fn potential_is_monotone_and_jumps_are_admissible(p in inviscid_problem(), t in 0.2f64..1.5) {
        let panel = solve_panel(&p, linspace(0.02, 3.0, 60), vec![t]).unwrap();
        let big_p = panel.big_p_row(0);
        prop_assert!(big_p.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{big_p:?}");
        for pt in &panel.points {
            if let Some((minus, plus)) = pt.jump {
                prop_assert!(minus >= plus - 1e-9);
            }
        }
        // boundary-branch points form an interval starting at the origin
        let tags: Vec<bool> = panel.points.iter().map(|pt| pt.path.branch.is_boundary()).collect();
        let switches = tags.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert!(switches == 0 || (switches == 1 && tags[0]), "{tags:?}");
    }

    #[test]
    fn sticky_merges_conserve_mass_and_momentum(
        raw in prop::collection::vec((0.1f64..5.0, 0.01f64..1.0, -2.0f64..2.0), 2..60),
    ) {
        let mut ps: Vec<Particle> = raw.into_iter().map(|(r, m, v)| Particle { r, m, v }).collect();
        ps.sort_by(|a, b| a.r.total_cmp(&b.r));
        ps.dedup_by(|a, b| a.r == b.r);
        let m0: f64 = ps.iter().map(|p| p.m).sum();
        let j0: f64 = ps.iter().map(|p| p.m * p.v).sum();
        let run = sticky_particle_run(ps, &[0.5, 1.0, 3.0]).unwrap();
        for (k, snap) in run.snapshots.iter().enumerate() {
            let m: f64 = snap.iter().map(|p| p.m).sum::<f64>() + run.absorbed[k];
            prop_assert!((m - m0).abs() <= 1e-12 * m0.max(1.0));
            if run.absorbed[k] == 0.0 {
                let j: f64 = snap.iter().map(|p| p.m * p.v).sum();
                prop_assert!((j - j0).abs() <= 1e-12 * m0.max(1.0) * 2.0);
            }
        }
    }

    #[test]
    fn profile_integrals_are_additive(p in step_profile(), a in 0.0f64..1.0, b in 1.0f64..2.0, c in 2.0f64..4.0) {
        let whole = p.integral(a, c);
        let split = p.integral(a, b) + p.integral(b, c);
        prop_assert!((whole - split).abs() <= 1e-12 * (1.0 + whole.abs()));
    }
}
