//! Built-in scenarios.
//!
//! The reference grid is a 68.75 GW system at 40% renewable penetration with
//! load damping removed, tripped by 2.75 GW (0.04 pu). PV is one aggregated
//! 27.5 GW farm (or five equal farms) with 10% headroom.

use crate::error::{Error, Result};
use crate::grid::{ContingencyEvent, GridParams, TieLine};
use crate::pv_control::{
    AgcParams, ControllerSet, DroopCtrlParams, FastPfcParams, InertiaCtrlParams, PvPlant,
};
use crate::simulate::SimConfig;

use super::sweep::SweepSpec;
use super::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogEntry {
    Scenario(Box<Scenario>),
    Sweep(Box<SweepSpec>),
    Plant(Box<PvPlant>),
}

impl CatalogEntry {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogEntry::Scenario(_) => "scenario",
            CatalogEntry::Sweep(_) => "sweep",
            CatalogEntry::Plant(_) => "plant",
        }
    }

    pub fn description(&self) -> String {
        match self {
            CatalogEntry::Scenario(s) => s.description.clone(),
            CatalogEntry::Sweep(s) => s.description.clone(),
            CatalogEntry::Plant(_) => "Inertia controller with K_i = 500, T_lpwi = 1 s, T_wowi = 0.1 s, 5% limit".into(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            CatalogEntry::Scenario(s) => s.to_json(),
            CatalogEntry::Sweep(s) => serde_json::to_string_pretty(s).expect("sweep serializes"),
            CatalogEntry::Plant(p) => serde_json::to_string_pretty(p).expect("plant serializes"),
        }
    }
}

pub const IDS: [&str; 13] = [
    "table1-1",
    "table1-2",
    "table1-3",
    "table1-4",
    "fast-pfc",
    "multifarm-db",
    "multifarm-nodb",
    "rcc-sweep",
    "agc",
    "agc-off",
    "two-area",
    "trip-no-governor",
    "inertia-plant",
];

pub const RCC_MW: f64 = 2750.0;
pub const REFERENCE_PENETRATION: f64 = 0.4;

pub fn reference_grid() -> GridParams {
    GridParams {
        penetration: REFERENCE_PENETRATION,
        damping: 0.0,
        ..GridParams::default()
    }
}

fn rcc_event(grid: &GridParams) -> ContingencyEvent {
    ContingencyEvent {
        t_event: 1.0,
        delta_p: -RCC_MW / grid.c_system_mva,
        area: 0,
    }
}

/// Headroom of the reference plants; every controller may use all of it.
pub const REFERENCE_HEADROOM: f64 = 0.1;

pub fn characterization_inertia() -> InertiaCtrlParams {
    InertiaCtrlParams::default()
}

fn reference_inertia() -> InertiaCtrlParams {
    InertiaCtrlParams {
        p_limit: REFERENCE_HEADROOM,
        ..characterization_inertia()
    }
}

pub fn reference_droop() -> DroopCtrlParams {
    DroopCtrlParams {
        p_limit: REFERENCE_HEADROOM,
        ..DroopCtrlParams::default()
    }
}

/// Integral gain of the catalog fast-PFC plants, 1/s.
pub const FAST_PFC_KI: f64 = 10.0;

fn reference_fast_pfc() -> FastPfcParams {
    FastPfcParams {
        droop: reference_droop(),
        ki_fast: FAST_PFC_KI,
        p_limit: REFERENCE_HEADROOM,
        ..FastPfcParams::default()
    }
}

fn reference_plant(id: &str, c_inv_mva: f64, controllers: ControllerSet) -> PvPlant {
    PvPlant::new(id, c_inv_mva, 0.8, REFERENCE_HEADROOM)
        .with_noise(0.0)
        .with_controllers(controllers)
}

fn reference_scenario(id: &str, description: &str, controllers: ControllerSet) -> Scenario {
    let grid = reference_grid();
    let c_inv = grid.penetration * grid.c_system_mva;
    Scenario {
        description: description.into(),
        plants: vec![reference_plant("pv", c_inv, controllers)],
        events: vec![rcc_event(&grid)],
        sim: SimConfig {
            t_end: 60.0,
            ..SimConfig::default()
        },
        ..Scenario::new(id, grid)
    }
}

fn table1(n: u8) -> Scenario {
    let (desc, c) = match n {
        1 => (
            "PV inertia control",
            ControllerSet {
                inertia: Some(reference_inertia()),
                ..Default::default()
            },
        ),
        2 => (
            "PV governor (droop) control",
            ControllerSet {
                droop: Some(reference_droop()),
                ..Default::default()
            },
        ),
        3 => (
            "PV inertia + PV governor control",
            ControllerSet {
                inertia: Some(reference_inertia()),
                droop: Some(reference_droop()),
                ..Default::default()
            },
        ),
        _ => ("Without frequency control of PV", ControllerSet::default()),
    };
    reference_scenario(&format!("table1-{n}"), desc, c)
}

fn fast_pfc() -> Scenario {
    reference_scenario(
        "fast-pfc",
        "Droop with a deadbanded integral path, same headroom as table1-2",
        ControllerSet {
            fast_pfc: Some(reference_fast_pfc()),
            ..Default::default()
        },
    )
}

/// Constant frequency-measurement offsets of the five farms, pu (within ±5 mHz).
pub const MULTIFARM_BIAS_PU: [f64; 5] = [-8e-5, -4e-5, 0.0, 4e-5, 8e-5];
/// Headroom of each multi-farm plant: twice the trip in aggregate, so the
/// integral paths can restore frequency.
pub const MULTIFARM_HEADROOM: f64 = 0.2;
/// Start of the post-settling window used to score farm conflict, s.
pub const MULTIFARM_WINDOW_S: f64 = 60.0;

fn multifarm(with_deadband: bool) -> Scenario {
    let grid = reference_grid();
    let c_each = grid.penetration * grid.c_system_mva / 5.0;
    let params = FastPfcParams {
        droop: DroopCtrlParams {
            p_limit: MULTIFARM_HEADROOM,
            ..reference_droop()
        },
        db_int_pu: if with_deadband { 0.0006 } else { 0.0 },
        p_limit: MULTIFARM_HEADROOM,
        ..reference_fast_pfc()
    };
    let plants = MULTIFARM_BIAS_PU
        .iter()
        .enumerate()
        .map(|(i, &b)| PvPlant {
            meas_bias_pu: b,
            ..PvPlant::new(format!("farm{}", i + 1), c_each, 0.7, MULTIFARM_HEADROOM)
                .with_noise(2e-5)
                .with_controllers(ControllerSet {
                    fast_pfc: Some(params.clone()),
                    ..Default::default()
                })
        })
        .collect();
    let (id, desc) = if with_deadband {
        ("multifarm-db", "Five fast-PFC farms with measurement offsets; integral deadband on")
    } else {
        ("multifarm-nodb", "Five fast-PFC farms with measurement offsets; integral deadband off")
    };
    Scenario {
        description: desc.into(),
        plants,
        events: vec![rcc_event(&grid)],
        sim: SimConfig {
            t_end: 300.0,
            rng_seed: 2024,
            ..SimConfig::default()
        },
        ..Scenario::new(id, grid)
    }
}

fn agc(enabled: bool) -> Scenario {
    let grid = reference_grid();
    let c_inv = grid.penetration * grid.c_system_mva;
    let plant = PvPlant::new("pv", c_inv, 0.7, 0.2)
        .with_noise(0.0)
        .with_controllers(ControllerSet {
            droop: Some(reference_droop()),
            ..Default::default()
        });
    let (id, desc) = if enabled {
        ("agc", "Droop plus AGC on PV headroom, enabled at 20 s")
    } else {
        ("agc-off", "Droop only, same headroom as `agc`")
    };
    Scenario {
        description: desc.into(),
        plants: vec![plant],
        events: vec![rcc_event(&grid)],
        agc: enabled.then(AgcParams::default),
        sim: SimConfig {
            t_end: 300.0,
            ..SimConfig::default()
        },
        ..Scenario::new(id, grid)
    }
}

fn two_area() -> Scenario {
    let mut s = agc(true);
    s.id = "two-area".into();
    s.description = "Two equal areas on a tie line; trip and AGC in area A".into();
    s.area_b = Some(reference_grid());
    s.tie = Some(TieLine {
        t_tie: 0.5,
        scheduled_flow: 0.0,
    });
    let mut b = s.plants[0].clone();
    b.id = "pv_b".into();
    b.area = 1;
    s.plants.push(b);
    s.sim.t_end = 120.0;
    s
}

fn trip_no_governor() -> Scenario {
    let grid = GridParams {
        damping: 0.0,
        governor: crate::grid::GovernorParams::disabled(),
        ..GridParams::default()
    };
    Scenario {
        description: "0.04 pu trip, no damping, no governor, H = 5 s".into(),
        events: vec![rcc_event(&grid)],
        sim: SimConfig {
            t_end: 5.0,
            ..SimConfig::default()
        },
        ..Scenario::new("trip-no-governor", grid)
    }
}

fn rcc_sweep() -> SweepSpec {
    let grid = GridParams {
        damping: 0.0,
        ..GridParams::default()
    };
    let base = Scenario {
        description: "2.75 GW trip without PV support".into(),
        events: vec![rcc_event(&grid)],
        ..Scenario::new("rcc-base", grid)
    };
    SweepSpec {
        id: "rcc-sweep".into(),
        description: "Nadir and RoCoF of the 2.75 GW trip across renewable penetration".into(),
        base: serde_json::to_value(&base).expect("scenario serializes"),
        axis: "grid.penetration".into(),
        values: (0..=7).map(|k| k as f64 * 0.1).collect(),
        outputs: vec!["nadir_hz".into(), "t_nadir_s".into(), "rocof_max_hzps".into(), "settling_hz".into()],
        ..SweepSpec::default()
    }
}

pub fn get(id: &str) -> Result<CatalogEntry> {
    let s = |s: Scenario| Ok(CatalogEntry::Scenario(Box::new(s)));
    match id {
        "table1-1" => s(table1(1)),
        "table1-2" => s(table1(2)),
        "table1-3" => s(table1(3)),
        "table1-4" => s(table1(4)),
        "fast-pfc" => s(fast_pfc()),
        "multifarm-db" => s(multifarm(true)),
        "multifarm-nodb" => s(multifarm(false)),
        "agc" => s(agc(true)),
        "agc-off" => s(agc(false)),
        "two-area" => s(two_area()),
        "trip-no-governor" => s(trip_no_governor()),
        "rcc-sweep" => Ok(CatalogEntry::Sweep(Box::new(rcc_sweep()))),
        "inertia-plant" => Ok(CatalogEntry::Plant(Box::new(
            PvPlant::new("inertia", 100.0, 0.5, 0.05)
                .with_noise(0.0)
                .with_controllers(ControllerSet {
                    inertia: Some(characterization_inertia()),
                    ..Default::default()
                }),
        ))),
        _ => Err(Error::UnknownEntry(id.into())),
    }
}

/// Catalog scenario by id; errors for sweeps and plants.
pub fn scenario(id: &str) -> Result<Scenario> {
    match get(id)? {
        CatalogEntry::Scenario(s) => Ok(*s),
        other => Err(Error::invalid(id, format!("is a {}, not a scenario", other.kind()))),
    }
}
