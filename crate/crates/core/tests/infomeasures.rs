use qatm_core::dynamics::{evolve, evolve_from};
use qatm_core::infomeasures::{
    blp_from_trajectories, blp_non_markovianity, coherence_series, concurrence_series, BlpSubsystem,
};
use qatm_core::model::{initial_state, InitialVariant, ScenarioConfig};

fn short(mut cfg: ScenarioConfig, t_max: f64) -> ScenarioConfig {
    cfg.t_max = t_max;
    cfg
}

#[test]
fn identical_pair_has_no_backflow() {
    let cfg = short(ScenarioConfig::cycle_a(), 10.0);
    let rho = initial_state(&cfg, InitialVariant::CoherentS).unwrap();
    let a = evolve_from(&cfg, rho.clone()).unwrap();
    let b = evolve_from(&cfg, rho).unwrap();
    for sub in BlpSubsystem::ALL {
        let r = blp_from_trajectories(&a, &b, sub).unwrap();
        assert_eq!(r.total, 0.0);
        assert!(r.distance.points().all(|(_, d)| d == 0.0));
        assert!(r.increase_intervals.is_empty());
    }
}

#[test]
fn uncoupled_system_distance_is_constant() {
    let mut cfg = short(ScenarioConfig::cycle_b(), 20.0);
    cfg.g = 0.0;
    for sub in [BlpSubsystem::S1, BlpSubsystem::S2] {
        let r = blp_non_markovianity(&cfg, sub).unwrap();
        let d0 = r.distance.value(0).unwrap();
        assert!((d0 - 0.5).abs() < 1e-12);
        assert!(r.distance.points().all(|(_, d)| (d - d0).abs() < 1e-9));
        assert!(r.total < 1e-9);
    }
}

#[test]
fn blp_bookkeeping_is_consistent() {
    let cfg = short(ScenarioConfig::cycle_a(), 20.0);
    let r = blp_non_markovianity(&cfg, BlpSubsystem::S1).unwrap();
    let cumulative = r.cumulative();
    assert!((cumulative.last().unwrap() - r.total).abs() < 1e-12);
    assert!(cumulative.values.windows(2).all(|w| w[1] >= w[0]));
    let covered: f64 = r
        .increase_intervals
        .iter()
        .map(|&(s, e)| {
            let i = r.distance.times.iter().position(|&t| t == s).unwrap();
            let j = r.distance.times.iter().position(|&t| t == e).unwrap();
            r.distance.value(j).unwrap() - r.distance.value(i).unwrap()
        })
        .sum();
    assert!((covered - r.total).abs() < 1e-12);
    assert_eq!(r.rate().unwrap().len(), r.distance.len());
}

#[test]
fn blp_rejects_mismatched_grids() {
    let a = evolve(
        &short(ScenarioConfig::cycle_a(), 1.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    let b = evolve(
        &short(ScenarioConfig::cycle_a(), 2.0),
        InitialVariant::DephasedS,
    )
    .unwrap();
    assert!(blp_from_trajectories(&a, &b, BlpSubsystem::M).is_err());
}

#[test]
fn coherence_identity_holds_along_trajectories() {
    for cfg in [ScenarioConfig::cycle_a(), ScenarioConfig::cycle_b()] {
        let traj = evolve(&short(cfg, 20.0), InitialVariant::CoherentS).unwrap();
        for c in coherence_series(&traj).unwrap() {
            assert!(c.residual <= 1e-10);
        }
    }
}

#[test]
fn incoherent_system_stays_unentangled() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_a(), 20.0),
        InitialVariant::DephasedS,
    )
    .unwrap();
    for c in coherence_series(&traj).unwrap() {
        assert!(c.delta.abs() <= 1e-10);
    }
    assert!(concurrence_series(&traj)
        .unwrap()
        .points()
        .all(|(_, c)| c <= 1e-8));
}
