use proptest::prelude::*;

use pvfreq::grid::{ContingencyEvent, GovernorParams, GridParams, TieLine};
use pvfreq::pv_control::{ControllerSet, DroopCtrlParams, FastPfcParams, InertiaCtrlParams, PvPlant};
use pvfreq::scenario_io::Scenario;
use pvfreq::simulate::{run_scenario, SimConfig};

fn trip(delta_p: f64, area: usize) -> ContingencyEvent {
    ContingencyEvent {
        t_event: 0.0,
        delta_p,
        area,
    }
}

#[test]
fn damped_response_matches_closed_form() {
    let grid = GridParams {
        damping: 1.5,
        governor: GovernorParams::disabled(),
        ..GridParams::default()
    };
    let h = grid.h_base_s;
    let d = grid.damping;
    let s = Scenario {
        events: vec![trip(-0.04, 0)],
        sim: SimConfig {
            t_end: 30.0,
            ..SimConfig::default()
        },
        ..Scenario::new("damped", grid)
    };
    let r = run_scenario(&s, &s.sim).unwrap();
    for (t, f) in r.t.iter().zip(&r.f_hz) {
        let df = -0.04 / d * (1.0 - (-d * t / (2.0 * h)).exp());
        assert!((f / 60.0 - 1.0 - df).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn power_balance_and_energy_bookkeeping() {
    let grid = GridParams {
        penetration: 0.3,
        damping: 1.0,
        ..GridParams::default()
    };
    let plant = PvPlant::new("pv", 0.3 * grid.c_system_mva, 0.8, 0.1)
        .with_noise(0.0)
        .with_controllers(ControllerSet {
            inertia: Some(InertiaCtrlParams {
                p_limit: 0.1,
                ..Default::default()
            }),
            droop: Some(DroopCtrlParams::default()),
            ..Default::default()
        });
    let s = Scenario {
        plants: vec![plant.clone()],
        events: vec![ContingencyEvent {
            t_event: 1.0,
            delta_p: -0.04,
            area: 0,
        }],
        ..Scenario::new("balance", grid.clone())
    };
    let r = run_scenario(&s, &s.sim).unwrap();
    let h_eff = r.meta.h_eff_s;
    let c_ratio = plant.c_inv_mva / grid.c_system_mva;
    for k in 0..r.len() {
        let df = r.f_hz[k] / 60.0 - 1.0;
        let p_pv = (r.p_plant[0][k] - plant.p_base) * c_ratio;
        assert!((p_pv - r.p_pv[k]).abs() < 1e-12);
        let net = r.p_gov[k] + r.p_pv[k] + r.p_event[k] - grid.damping * df;
        assert!((2.0 * h_eff * r.dfdt[k] - net).abs() < 1e-12, "k = {k}");
    }
    // kinetic energy change equals the integrated net power
    let dt = r.meta.dt;
    let start = r.t.iter().position(|&t| t >= 1.0).unwrap();
    let mut integral = 0.0;
    for k in start..r.len() - 1 {
        integral += 0.5 * dt * (r.dfdt[k] + r.dfdt[k + 1]);
    }
    let df_change = (r.f_hz[r.len() - 1] - r.f_hz[start]) / 60.0;
    assert!((integral - df_change).abs() < 1e-4 * df_change.abs());
}

fn two_area(events: Vec<ContingencyEvent>) -> Scenario {
    let grid = GridParams {
        damping: 1.0,
        ..GridParams::default()
    };
    Scenario {
        area_b: Some(grid.clone()),
        tie: Some(TieLine {
            t_tie: 0.5,
            scheduled_flow: 0.0,
        }),
        events,
        sim: SimConfig {
            t_end: 120.0,
            ..SimConfig::default()
        },
        ..Scenario::new("two-area", grid)
    }
}

#[test]
fn symmetric_areas_never_exchange_power() {
    let s = two_area(vec![trip(-0.02, 0), trip(-0.02, 1)]);
    let r = run_scenario(&s, &s.sim).unwrap();
    let fb = r.f_hz_b.as_ref().unwrap();
    assert_eq!(&r.f_hz, fb);
    assert!(r.p_tie.as_ref().unwrap().iter().all(|p| *p == 0.0));
}

#[test]
fn identical_areas_share_a_trip_equally() {
    let s = two_area(vec![trip(-0.04, 0)]);
    let r = run_scenario(&s, &s.sim).unwrap();
    let tie = r.p_tie.as_ref().unwrap();
    let fb = r.f_hz_b.as_ref().unwrap();
    let last = r.len() - 1;
    assert!((tie[last] + 0.02).abs() < 5e-4, "tie {}", tie[last]);
    assert!((r.f_hz[last] - fb[last]).abs() < 1e-3);
    assert!(fb.iter().cloned().fold(f64::MAX, f64::min) < 60.0);
}

#[test]
fn single_area_is_unchanged_by_an_idle_second_area() {
    let grid = GridParams::default();
    let single = Scenario {
        events: vec![trip(-0.01, 0)],
        ..Scenario::new("one", grid)
    };
    let mut coupled = two_area(vec![trip(-0.01, 0)]);
    coupled.sim = single.sim.clone();
    coupled.tie.as_mut().unwrap().t_tie = 1e-12;
    let a = run_scenario(&single, &single.sim).unwrap();
    let b = run_scenario(&coupled, &coupled.sim).unwrap();
    let worst = a.f_hz.iter().zip(&b.f_hz).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

fn controllers(kind: u8, headroom: f64) -> ControllerSet {
    match kind {
        0 => ControllerSet::default(),
        1 => ControllerSet {
            inertia: Some(InertiaCtrlParams {
                p_limit: headroom.min(0.05),
                ..Default::default()
            }),
            ..Default::default()
        },
        2 => ControllerSet {
            droop: Some(DroopCtrlParams {
                p_limit: 0.5,
                ..Default::default()
            }),
            ..Default::default()
        },
        _ => ControllerSet {
            inertia: Some(InertiaCtrlParams {
                p_limit: headroom.min(0.05),
                ..Default::default()
            }),
            fast_pfc: Some(FastPfcParams {
                p_limit: 0.5,
                ..Default::default()
            }),
            ..Default::default()
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plant_output_stays_within_headroom(
        p_base in 0.0f64..0.9,
        head_frac in 0.06f64..1.0,
        kind in 0u8..4,
        delta_p in -0.08f64..0.08,
        seed in 0u64..1000,
    ) {
        let headroom = head_frac * (1.0 - p_base);
        let grid = GridParams { penetration: 0.4, ..GridParams::default() };
        let plant = PvPlant::new("pv", 0.4 * grid.c_system_mva, p_base, headroom).with_controllers(controllers(kind, headroom));
        let s = Scenario {
            plants: vec![plant],
            events: vec![ContingencyEvent { t_event: 1.0, delta_p, area: 0 }],
            sim: SimConfig { t_end: 30.0, rng_seed: seed, ..SimConfig::default() },
            ..Scenario::new("headroom", grid)
        };
        let r = run_scenario(&s, &s.sim).unwrap();
        for p in &r.p_plant[0] {
            prop_assert!(*p >= 0.0 && *p <= p_base + headroom + 1e-12, "{p}");
        }
    }
}
