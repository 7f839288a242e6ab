use proptest::prelude::*;

use apme::barrier::{check_chain, choose_profile_params, compute_r0, BarrierSpec};
use apme::params::ExponentSet;
use apme::solver::{run_lockstep, Field, Frame, Grid, Scheme};
use apme::transform::ScalingMap;

fn exponents() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=3).prop_flat_map(|n| prop::collection::vec(0.2f64..2.2, n))
}

fn admissible(m: &[f64]) -> Option<ExponentSet> {
    let e = ExponentSet::new(m).ok()?;
    e.check_admissible().ok()?.is_admissible().then_some(e)
}

fn field_on(g: &Grid, vals: &[f64]) -> Field {
    Field::new(g.clone(), vals.to_vec(), 0.0, Frame::Original).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_constants_identities(m in exponents()) {
        let e = ExponentSet::new(&m).unwrap();
        let n = m.len() as f64;
        let mbar = m.iter().sum::<f64>() / n;
        prop_assert!((e.m_bar() - mbar).abs() < 1e-14);
        prop_assert!((e.beta() - (mbar - (n - 2.0) / n)).abs() < 1e-14);
        let sum: f64 = e.alpha().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        for (i, a) in e.alpha().iter().enumerate() {
            prop_assert!((a - ((mbar - m[i]) / 2.0 + 1.0 / n)).abs() < 1e-14);
            prop_assert!((e.mu()[i] - (1.0 - m[i]) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn admissible_sets_have_positive_rates(m in exponents()) {
        if let Some(e) = admissible(&m) {
            prop_assert!(e.beta() > 0.0);
            prop_assert!(e.alpha().iter().all(|&a| a > 0.0));
        }
    }

    #[test]
    fn profile_parameters_satisfy_chain(m in exponents()) {
        prop_assume!(admissible(&m).is_some());
        let e = admissible(&m).unwrap();
        let p = choose_profile_params(&e).unwrap();
        prop_assert!(check_chain(&e, &p).is_ok());
        prop_assert!(compute_r0(&e, &p).unwrap() > 0.0);
        let spec = BarrierSpec::build(&e, 1.0, 1.0, 1.0).unwrap();
        let (lo, hi) = spec.chain_margins();
        prop_assert!(lo > 0.0 && hi > 0.0);
    }

    #[test]
    fn barrier_is_bounded_by_plateau(
        m in exponents(),
        seed in 0u64..1000,
    ) {
        prop_assume!(admissible(&m).is_some());
        let e = admissible(&m).unwrap();
        let spec = BarrierSpec::build(&e, 2.0, 1.0, 1.0).unwrap();
        let x: Vec<f64> = (0..m.len()).map(|i| ((seed + 7 * i as u64) % 97) as f64 / 9.7 - 5.0).collect();
        let t = (seed % 11) as f64 / 10.0;
        let v = spec.supersolution(&x, t).unwrap();
        prop_assert!(v > 0.0 && v <= 2.0);
    }

    #[test]
    fn point_map_round_trip(
        m in exponents(),
        t in 0.0f64..50.0,
        u in 0.0f64..10.0,
        scale in -20.0f64..20.0,
    ) {
        prop_assume!(admissible(&m).is_some());
        let map = ScalingMap::new(admissible(&m).unwrap()).unwrap();
        let x: Vec<f64> = (0..m.len()).map(|i| scale / (i as f64 + 1.0)).collect();
        let (y, tau, v) = map.forward_point(&x, t, u).unwrap();
        let (x2, t2, u2) = map.backward_point(&y, tau, v).unwrap();
        prop_assert!((t2 - t).abs() <= 1e-12 * t.max(1.0));
        prop_assert!((u2 - u).abs() <= 1e-12 * u.max(1.0));
        for (a, b) in x.iter().zip(&x2) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        prop_assert!((map.t_of_tau(map.tau_of_t(t).unwrap()).unwrap() - t).abs() <= 1e-12 * t.max(1.0));
    }

    #[test]
    fn step_preserves_sign_and_identity(
        vals in prop::collection::vec(0.0f64..3.0, 40),
        m in 0.5f64..2.5,
        frac in 0.1f64..1.0,
    ) {
        let g = Grid::new(&[40], &[2.0]).unwrap();
        let s = Scheme::new(ExponentSet::new(&[m]).unwrap());
        let u = field_on(&g, &vals);
        let dt = frac * s.stable_dt(&u);
        let out = s.step(&u, dt).unwrap();
        prop_assert!(out.field.values().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(out.clipped, 0);
        let defect = (out.field.mass() - u.mass() + out.outflow).abs();
        prop_assert!(defect <= 1e-12 * u.mass().max(1e-300));
        prop_assert!(out.outflow >= 0.0);
    }

    #[test]
    fn ordered_data_stay_ordered(
        base in prop::collection::vec(0.0f64..2.0, 12 * 12),
        extra in prop::collection::vec(0.0f64..1.0, 12 * 12),
        m2 in 1.0f64..1.9,
    ) {
        let g = Grid::new(&[12, 12], &[1.0, 1.0]).unwrap();
        let s = Scheme::new(ExponentSet::new(&[1.0, m2]).unwrap());
        let u = field_on(&g, &base);
        let sum: Vec<f64> = base.iter().zip(&extra).map(|(a, b)| a + b).collect();
        let v = field_on(&g, &sum);
        let recs = run_lockstep(&s, vec![u, v], 0.02, &[0.01, 0.02]).unwrap();
        for (a, b) in recs[0].snapshots.iter().zip(&recs[1].snapshots) {
            prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
        }
    }

    #[test]
    fn rescaled_step_conserves_up_to_outflow(
        vals in prop::collection::vec(0.0f64..1.0, 30),
        m in 0.6f64..1.0,
    ) {
        let g = Grid::new(&[30], &[3.0]).unwrap();
        let s = Scheme::new(ExponentSet::new(&[m]).unwrap());
        let v = Field::new(g, vals, 0.0, Frame::Rescaled).unwrap();
        let out = s.step(&v, 0.5 * s.stable_dt(&v)).unwrap();
        prop_assert!(out.field.values().iter().all(|&x| x >= 0.0));
        let defect = (out.field.mass() - v.mass() + out.outflow).abs();
        prop_assert!(defect <= 1e-12 * v.mass().max(1e-300));
    }
}
