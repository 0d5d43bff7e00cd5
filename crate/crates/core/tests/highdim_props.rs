mod common;

use common::{coordinate_descent, invert, kkt_enumeration, max_abs_diff};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sectorlearn::highdim::{
    hd_map_update, kkt_violation, simulate_elasticity_learning, solve_active_set, solve_enumeration, ElasticityState, FirmPrior,
    HighDimConfig,
};
use sectorlearn::model::LearningMode;
use sectorlearn::scenario::highdim_demo_config;

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Random positive definite H = I/tau^2 + sum z z'/sigma^2 and linear term.
fn problem(n: usize) -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>)> {
    (
        prop::collection::vec(prop::collection::vec(-1.5f64..1.5, n), 1..8),
        prop::collection::vec(-3.0f64..3.0, n),
        0.1f64..1.0,
        0.1f64..1.0,
    )
        .prop_map(move |(zs, b, tau, sigma)| {
            let mut h = DMatrix::identity(n, n) / (tau * tau);
            for z in &zs {
                let v = DVector::from_vec(z.clone());
                h += &v * v.transpose() / (sigma * sigma);
            }
            (h, DVector::from_vec(b) / (tau * tau))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn enumeration_matches_oracles((h, b) in (2usize..=6).prop_flat_map(problem)) {
        let (x, set) = solve_enumeration(&h, &b).unwrap();
        let hv = to_rows(&h);
        let bv: Vec<f64> = b.iter().copied().collect();
        let xs: Vec<f64> = x.iter().copied().collect();
        prop_assert!(max_abs_diff(&xs, &kkt_enumeration(&hv, &bv)) <= 1e-8);
        prop_assert!(max_abs_diff(&xs, &coordinate_descent(&hv, &bv, 20_000)) <= 1e-6);
        prop_assert!(kkt_violation(&h, &b, &x) <= 1e-9 * (1.0 + b.amax()));
        for j in 0..xs.len() {
            prop_assert_eq!(set.contains(&j), xs[j] > 0.0);
        }
    }

    #[test]
    fn active_set_matches_enumeration((h, b) in (2usize..=6).prop_flat_map(problem)) {
        let (x, s) = solve_enumeration(&h, &b).unwrap();
        let (y, t) = solve_active_set(&h, &b, &[]).unwrap();
        prop_assert!((x - y).amax() <= 1e-9 * (1.0 + b.amax()));
        prop_assert_eq!(s, t);
    }
}

#[test]
fn large_dimension_uses_active_set() {
    let n = 14;
    let prior = FirmPrior {
        beta0: DVector::from_fn(n, |i, _| if i % 3 == 0 { 0.0 } else { 0.1 }),
        beta_star: DVector::from_fn(n, |i, _| 0.05 * (i % 4) as f64),
        sigma: 0.2,
        tau: 0.3,
    };
    let mut st = ElasticityState::new(&prior);
    for t in 0..20 {
        let z = DVector::from_fn(n, |i, _| ((i * 7 + t * 3) % 11) as f64 / 5.0 - 1.0);
        let s = z.dot(&prior.beta_star) + 0.05 * ((t % 5) as f64 - 2.0);
        st = hd_map_update(&st, &z, s, &prior, LearningMode::PD).unwrap();
        assert!(st.kkt_violation() < 1e-9);
        assert!(st.beta.iter().all(|v| *v >= 0.0));
    }
    let hv = to_rows(&st.h);
    let cd = coordinate_descent(&hv, &st.b.iter().copied().collect::<Vec<_>>(), 50_000);
    assert!(max_abs_diff(&cd, st.beta.as_slice()) < 1e-6);
}

#[test]
fn maintained_inverse_tracks_direct_inverse_across_refreshes() {
    let cfg = highdim_demo_config(LearningMode::PD, 5);
    let prior = cfg.params.firm(0);
    let mut st = ElasticityState::new(&prior);
    for t in 0..200 {
        let z = DVector::from_fn(3, |i, _| ((i + 2 * t) % 7) as f64 / 4.0 - 0.5);
        st = hd_map_update(&st, &z, 0.1, &prior, LearningMode::PD).unwrap();
        let direct = DMatrix::from_fn(3, 3, |i, j| invert(&to_rows(&st.h))[i][j]);
        assert!((&st.h_inv - direct).amax() < 1e-10, "drift at step {t}");
        let ident = &st.h_inv * &st.h;
        assert!((ident - DMatrix::identity(3, 3)).amax() < 1e-10);
    }
}

#[test]
fn active_inverse_is_inverse_on_active_block() {
    let cfg = highdim_demo_config(LearningMode::PD, 2);
    let prior = cfg.params.firm(1);
    let mut st = ElasticityState::new(&prior);
    for t in 0..10 {
        let z = DVector::from_fn(3, |i, _| (i as f64 + t as f64) / 10.0);
        st = hd_map_update(&st, &z, 0.2, &prior, LearningMode::PI).unwrap();
    }
    let inv = st.active_inverse().unwrap();
    let k = st.active_set.len();
    let hs = DMatrix::from_fn(k, k, |r, c| st.h[(st.active_set[r], st.active_set[c])]);
    assert!((inv * hs - DMatrix::identity(k, k)).amax() < 1e-10);
}

#[test]
fn simulation_is_reproducible_and_feasible() {
    let cfg = highdim_demo_config(LearningMode::PD, 11);
    let a = simulate_elasticity_learning(&cfg).unwrap();
    let b = simulate_elasticity_learning(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.beta.iter().all(|v| *v >= 0.0) && r.kkt < 1e-8));
    let other = simulate_elasticity_learning(&HighDimConfig { seed: 12, ..cfg }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn config_rejects_bad_phi() {
    let mut cfg = highdim_demo_config(LearningMode::PD, 1);
    cfg.params.phi = 1.5;
    assert!(cfg.validate().is_err());
    let text = serde_json::to_string(&highdim_demo_config(LearningMode::PI, 1)).unwrap();
    assert!(HighDimConfig::from_json(&text).is_ok());
    assert!(HighDimConfig::from_json(&text.replace("\"horizon\"", "\"horizn\"")).is_err());
}
