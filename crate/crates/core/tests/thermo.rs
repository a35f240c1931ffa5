use qatm_core::dynamics::evolve;
use qatm_core::model::{Body, InitialVariant, ScenarioConfig, SigmaTemperatureMode, Site};
use qatm_core::thermo::{
    classify_cycle, effective_temperature_series, entropy_production_rate_series,
    entropy_production_series, heat_series, virtual_heat_series, virtual_populations_series,
    virtual_temperature, virtual_temperature_series, CycleLabel,
};

fn short(mut cfg: ScenarioConfig, t_max: f64) -> ScenarioConfig {
    cfg.t_max = t_max;
    cfg
}

#[test]
fn heats_start_at_zero() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_b(), 5.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    for site in Site::ALL {
        let q = heat_series(&traj, site).unwrap();
        assert_eq!(q.value(0), Some(0.0));
        assert_eq!(q.name, format!("heat_{site}"));
        assert_eq!(q.len(), traj.len());
    }
}

#[test]
fn uncoupled_system_exchanges_no_heat() {
    let mut cfg = short(ScenarioConfig::cycle_b(), 10.0);
    cfg.g = 0.0;
    let traj = evolve(&cfg, InitialVariant::CoherentS).unwrap();
    for site in [Site::S1, Site::S2] {
        let q = heat_series(&traj, site).unwrap();
        assert!(q.points().all(|(_, v)| v.abs() < 1e-12));
    }
}

#[test]
fn effective_temperature_starts_at_bath_temperature() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_a(), 1.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    let t1 = effective_temperature_series(&traj, Site::M1).unwrap();
    let t2 = effective_temperature_series(&traj, Site::M2).unwrap();
    assert!((t1.value(0).unwrap() - 0.1).abs() < 1e-12);
    assert!((t2.value(0).unwrap() - 1.0).abs() < 1e-12);
    assert!(effective_temperature_series(&traj, Site::S1).is_err());
}

#[test]
fn virtual_populations_initial_values() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_a(), 1.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    let (pg, pe) = virtual_populations_series(&traj, Body::M).unwrap();
    let p_m1e = (-50.0f64).exp() / (1.0 + (-50.0f64).exp());
    let p_m2e = (-10.0f64).exp() / (1.0 + (-10.0f64).exp());
    assert!((pe.value(0).unwrap() - (1.0 - p_m1e) * p_m2e).abs() < 1e-15);
    assert!((pg.value(0).unwrap() - p_m1e * (1.0 - p_m2e)).abs() < 1e-30);
    let (sg, se) = virtual_populations_series(&traj, Body::S).unwrap();
    assert!((sg.value(0).unwrap() - 0.25).abs() < 1e-12);
    assert!((se.value(0).unwrap() - 0.25).abs() < 1e-12);
    for s in [&pg, &pe, &sg, &se] {
        assert!(s.points().all(|(_, v)| (0.0..=1.0).contains(&v)));
    }
}

#[test]
fn virtual_heat_average_sign_follows_the_populations() {
    let a = evolve(&ScenarioConfig::cycle_a(), InitialVariant::CoherentS).unwrap();
    let b = evolve(&ScenarioConfig::cycle_b(), InitialVariant::CoherentS).unwrap();
    let qa = virtual_heat_series(&a).unwrap();
    let qb = virtual_heat_series(&b).unwrap();
    assert_eq!(qa.value(0), Some(0.0));
    assert!(qa.mean().unwrap() <= 0.0);
    assert!(qb.mean().unwrap() >= 0.0);
}

#[test]
fn virtual_temperature_series_starts_at_formula_value() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_b(), 1.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    let tm = virtual_temperature_series(&traj).unwrap();
    let expected = virtual_temperature(5.0, 10.0, 0.8, 1.0).unwrap().unwrap();
    assert!((tm.value(0).unwrap() - expected).abs() < 1e-9);
}

#[test]
fn virtual_temperature_sign_matches_cycle_label() {
    for k in 0..20 {
        let t_m1 = 0.1 + 0.9 * k as f64 / 19.0;
        let cfg = ScenarioConfig::with_t_m1(t_m1);
        let tm = virtual_temperature(cfg.e_m1, cfg.e_m2, cfg.t_m1, cfg.t_m2).unwrap();
        match classify_cycle(&cfg) {
            CycleLabel::A => assert!(tm.unwrap() < 0.0),
            CycleLabel::B => assert!(tm.unwrap() > 0.0),
            CycleLabel::Boundary => assert!(tm.is_none()),
        }
    }
}

#[test]
fn entropy_production_starts_at_zero_and_rate_integrates_back() {
    let traj = evolve(
        &short(ScenarioConfig::cycle_a(), 20.0),
        InitialVariant::CoherentS,
    )
    .unwrap();
    for mode in [
        SigmaTemperatureMode::FixedReservoir,
        SigmaTemperatureMode::Instantaneous,
    ] {
        let sigma = entropy_production_series(&traj, mode).unwrap();
        assert_eq!(sigma.value(0), Some(0.0));
        assert_eq!(sigma.units, "bits");
        let rate = entropy_production_rate_series(&sigma).unwrap();
        let back = rate.cumulative_integral();
        for (k, b) in back.iter().enumerate() {
            if let (Some(s), Some(b)) = (sigma.value(k), *b) {
                assert!((s - b).abs() < 1e-4, "mode {mode}: {s} vs {b} at {k}");
            }
        }
    }
}

#[test]
fn natural_log_base_rescales_entropy_production() {
    let cfg = short(ScenarioConfig::cycle_b(), 5.0);
    let mut nat = cfg.clone();
    nat.log_base = "e".parse().unwrap();
    let bits = entropy_production_series(
        &evolve(&cfg, InitialVariant::CoherentS).unwrap(),
        SigmaTemperatureMode::FixedReservoir,
    )
    .unwrap();
    let nats = entropy_production_series(
        &evolve(&nat, InitialVariant::CoherentS).unwrap(),
        SigmaTemperatureMode::FixedReservoir,
    )
    .unwrap();
    assert_eq!(nats.units, "nats");
    for k in 0..bits.len() {
        let (b, n) = (bits.value(k).unwrap(), nats.value(k).unwrap());
        assert!((b * std::f64::consts::LN_2 - n).abs() < 1e-12);
    }
}
