mod common;

use common::grid_argmax;
use nalgebra::DVector;
use proptest::prelude::*;
use sectorlearn::belief::{clamp_belief, observation, pd_update, pi_update, rule_of_thumb_probability, BeliefState};
use sectorlearn::highdim::{hd_map_update, ElasticityState, FirmPrior};
use sectorlearn::model::{LearningMode, SectorParams};

fn params() -> impl Strategy<Value = SectorParams> {
    (0.05f64..0.95, 0.01f64..0.5, 0.01f64..0.5, 0.0f64..0.95).prop_map(|(zs, s, t, z0)| SectorParams::new(zs, 0.0, s, t, z0))
}

fn history() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -1.0f64..1.0), 1..20)
}

fn run(p: &SectorParams, mode: LearningMode, h: &[(f64, f64)]) -> BeliefState {
    h.iter().fold(BeliefState::new(p, mode), |st, &(z, s)| match mode {
        LearningMode::PD => pd_update(&st, z, s, p).unwrap(),
        LearningMode::PI => pi_update(&st, z, s, p).unwrap(),
    })
}

#[test]
fn observation_logs() {
    let (z, s) = observation(std::f64::consts::E, 1.0, 0.25);
    assert!((z - 1.0).abs() < 1e-15);
    assert_eq!(s, -0.25);
}

#[test]
fn map_matches_grid_on_fixed_history() {
    let p = SectorParams::new(0.4, 0.0, 0.2, 0.3, 0.1);
    let h = [(0.5, 0.3), (1.2, 0.4), (-0.3, -0.2)];
    let st = run(&p, LearningMode::PD, &h);
    let g = grid_argmax(
        |x| -(x - p.zeta0).powi(2) / (2.0 * p.tau * p.tau) - h.iter().map(|(z, s)| (s - x * z).powi(2)).sum::<f64>() / (2.0 * p.sigma * p.sigma),
        0.0,
        3.0,
        1e-5,
    );
    assert!((st.zeta - g).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn estimates_nonnegative(p in params(), h in history()) {
        for mode in [LearningMode::PD, LearningMode::PI] {
            let st = run(&p, mode, &h);
            prop_assert!(st.zeta >= 0.0);
            let c = clamp_belief(st.zeta, &p);
            prop_assert!(c >= p.zeta_lo && c <= p.zeta_hi);
        }
    }

    #[test]
    fn pd_is_order_invariant(p in params(), h in history()) {
        let a = run(&p, LearningMode::PD, &h);
        let mut r = h.clone();
        r.reverse();
        let b = run(&p, LearningMode::PD, &r);
        prop_assert!((a.zeta - b.zeta).abs() <= 1e-12);
    }

    #[test]
    fn pd_matches_batch_formula(p in params(), h in history()) {
        let st = run(&p, LearningMode::PD, &h);
        let g = p.gamma();
        let zs: f64 = h.iter().map(|(z, s)| z * s).sum();
        let zz: f64 = h.iter().map(|(z, _)| z * z).sum();
        prop_assert!((st.zeta - ((p.zeta0 + g * zs) / (1.0 + g * zz)).max(0.0)).abs() <= 1e-12);
        prop_assert!((st.pd_sum_zs - zs).abs() <= 1e-12 && (st.pd_sum_zz - zz).abs() <= 1e-12);
    }

    #[test]
    fn exact_signals_are_fixed_points(p in params(), zs in prop::collection::vec(0.1f64..2.0, 1..10)) {
        for mode in [LearningMode::PD, LearningMode::PI] {
            let mut q = p;
            q.zeta0 = p.zeta_star;
            let h: Vec<(f64, f64)> = zs.iter().map(|z| (*z, q.zeta_star * z)).collect();
            prop_assert!((run(&q, mode, &h).zeta - q.zeta_star).abs() <= 1e-12);
        }
    }

    #[test]
    fn scalar_highdim_matches_scalar_updates(p in params(), h in history()) {
        let prior = FirmPrior {
            beta0: DVector::from_element(1, p.zeta0),
            beta_star: DVector::from_element(1, p.zeta_star),
            sigma: p.sigma,
            tau: p.tau,
        };
        for mode in [LearningMode::PD, LearningMode::PI] {
            let mut st = ElasticityState::new(&prior);
            for &(z, s) in &h {
                st = hd_map_update(&st, &DVector::from_element(1, z), s, &prior, mode).unwrap();
            }
            let scalar = run(&p, mode, &h);
            prop_assert!((st.beta[0] - scalar.zeta).abs() <= 1e-12 * scalar.zeta.max(1.0));
        }
    }

    #[test]
    fn rule_of_thumb_is_probability(p in params(), zs in prop::collection::vec(-2.0f64..2.0, 0..10), lb in 0.0f64..1.0) {
        let v = rule_of_thumb_probability(&p, &zs, lb).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn rule_of_thumb_monotone_in_bound(p in params(), zs in prop::collection::vec(0.2f64..2.0, 1..10), lb in 0.0f64..0.5) {
        let a = rule_of_thumb_probability(&p, &zs, lb).unwrap();
        let b = rule_of_thumb_probability(&p, &zs, lb + 0.1).unwrap();
        prop_assert!(b >= a);
    }
}
