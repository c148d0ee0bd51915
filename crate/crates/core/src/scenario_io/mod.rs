//! Scenario documents: schema, strict/lenient JSON parsing, the built-in
//! catalog, result writers and parameter sweeps.

use std::collections::HashSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::grid::{ContingencyEvent, GridParams, TieLine};
use crate::pv_control::{AgcParams, PvPlant};
use crate::simulate::SimConfig;

pub mod catalog;
pub mod output;
pub mod sweep;

pub use catalog::CatalogEntry;
pub use output::{
    compare_table_csv, metrics_json_string, read_timeseries_csv, timeseries_csv_string,
    write_metrics_json, write_timeseries_csv,
};
pub use sweep::{run_sweep, SweepSpec, SweepTable};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_penetration_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub grid: GridParams,
    /// Second balancing area; requires `tie`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_b: Option<GridParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie: Option<TieLine>,
    #[serde(default)]
    pub plants: Vec<PvPlant>,
    #[serde(default)]
    pub events: Vec<ContingencyEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agc: Option<AgcParams>,
    #[serde(default)]
    pub sim: SimConfig,
    /// Relative mismatch between area-A inverter capacity and
    /// `penetration · c_system_mva` tolerated before a warning.
    #[serde(default = "default_penetration_tolerance")]
    pub penetration_tolerance: f64,
}

impl Scenario {
    pub fn new(id: impl Into<String>, grid: GridParams) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            id: id.into(),
            description: String::new(),
            grid,
            area_b: None,
            tie: None,
            plants: Vec::new(),
            events: Vec::new(),
            agc: None,
            sim: SimConfig::default(),
            penetration_tolerance: default_penetration_tolerance(),
        }
    }

    pub fn n_areas(&self) -> usize {
        1 + self.area_b.is_some() as usize
    }

    /// Check every invariant; capacity inconsistencies are logged, not rejected.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.id.is_empty() {
            return Err(Error::invalid("id", "must not be empty"));
        }
        self.grid.validate("grid")?;
        match (&self.area_b, &self.tie) {
            (Some(b), Some(t)) => {
                b.validate("area_b")?;
                t.validate("tie")?;
            }
            (Some(_), None) => return Err(Error::invalid("tie", "required when area_b is set")),
            (None, Some(_)) => return Err(Error::invalid("area_b", "required when tie is set")),
            (None, None) => {}
        }
        let n_areas = self.n_areas();
        let mut ids = HashSet::new();
        for (i, p) in self.plants.iter().enumerate() {
            let path = format!("plants[{i}]");
            p.validate(&path)?;
            if !ids.insert(p.id.as_str()) {
                return Err(Error::invalid(format!("{path}.id"), format!("duplicate plant id `{}`", p.id)));
            }
            if p.area >= n_areas {
                return Err(Error::invalid(format!("{path}.area"), format!("no area {}", p.area)));
            }
        }
        for (i, e) in self.events.iter().enumerate() {
            let path = format!("events[{i}]");
            e.validate(&path)?;
            if e.area >= n_areas {
                return Err(Error::invalid(format!("{path}.area"), format!("no area {}", e.area)));
            }
        }
        if let Some(a) = &self.agc {
            a.validate("agc")?;
        }
        self.sim.validate("sim")?;
        check::non_negative("penetration_tolerance", self.penetration_tolerance)?;
        for w in self.warnings() {
            log::warn!("scenario `{}`: {w}", self.id);
        }
        Ok(())
    }

    /// Soft consistency findings.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let pen = self.grid.penetration;
        let c_inv: f64 = self.plants.iter().filter(|p| p.area == 0).map(|p| p.c_inv_mva).sum();
        if pen > 0.0 && c_inv > 0.0 {
            let expected = pen * self.grid.c_system_mva;
            let rel = (c_inv - expected).abs() / expected;
            if rel > self.penetration_tolerance {
                out.push(format!(
                    "area-A inverter capacity {c_inv} MVA differs from penetration × system capacity {expected} MVA by {:.1}%",
                    rel * 100.0
                ));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Decode JSON into `T`, reporting the failing field path. Unknown keys are
/// errors when `strict`, warnings otherwise.
pub fn parse_json<T: DeserializeOwned>(text: &str, strict: bool) -> Result<T> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = {
        let mut record = |p: serde_ignored::Path<'_>| unknown.push(p.to_string());
        let ign = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(ign).map_err(|e| Error::Malformed {
            path: e.path().to_string(),
            reason: e.inner().to_string(),
        })?
    };
    de.end().map_err(|e| Error::Malformed {
        path: ".".into(),
        reason: e.to_string(),
    })?;
    if let Some(first) = unknown.first() {
        if strict {
            return Err(Error::invalid(first.clone(), "unknown key"));
        }
        for k in &unknown {
            log::warn!("ignoring unknown key `{k}`");
        }
    }
    Ok(value)
}

/// Parse and fully validate a scenario document.
pub fn parse_scenario(text: &str, strict: bool) -> Result<Scenario> {
    let s: Scenario = parse_json(text, strict)?;
    s.validate()?;
    Ok(s)
}

pub fn parse_plant(text: &str, strict: bool) -> Result<PvPlant> {
    let p: PvPlant = parse_json(text, strict)?;
    p.validate("plant")?;
    Ok(p)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Resolve a CLI argument: an existing file path, otherwise a catalog id.
pub fn load_scenario(arg: &str, strict: bool) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return parse_scenario(&read_text(path)?, strict);
    }
    match catalog::get(arg)? {
        CatalogEntry::Scenario(s) => Ok(*s),
        CatalogEntry::Sweep(_) => Err(Error::invalid(arg, "is a sweep; use the `sweep` command")),
        CatalogEntry::Plant(_) => Err(Error::invalid(arg, "is a plant; use the `characterize` command")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "id": "mini",
        "plants": [{"id": "pv", "c_inv_mva": 100.0, "p_base": 0.5, "p_headroom": 0.05}],
        "events": [{"t_event": 1.0, "delta_p": -0.01}]
    }"#;

    #[test]
    fn minimal_document_fills_defaults() {
        let s = parse_scenario(MINIMAL, true).unwrap();
        assert_eq!(s.grid, GridParams::default());
        assert_eq!(s.sim, SimConfig::default());
        assert_eq!(s.plants.len(), 1);
        assert_eq!(s.schema_version, SCHEMA_VERSION);
    }

    #[test]
    fn penetration_out_of_range_names_field() {
        let doc = r#"{"id": "x", "grid": {"penetration": 1.2}}"#;
        let e = parse_scenario(doc, true).unwrap_err();
        assert!(e.to_string().contains("grid.penetration"), "{e}");
    }

    #[test]
    fn unknown_keys_strict_and_lenient() {
        let doc = r#"{"id": "x", "grid": {"inertia": 3.0}}"#;
        let e = parse_scenario(doc, true).unwrap_err();
        assert!(e.to_string().contains("grid.inertia"), "{e}");
        assert!(parse_scenario(doc, false).is_ok());
    }

    #[test]
    fn malformed_reports_path() {
        let doc = r#"{"id": "x", "plants": [{"id": "pv", "c_inv_mva": "big", "p_base": 0.5, "p_headroom": 0.1}]}"#;
        match parse_scenario(doc, true).unwrap_err() {
            Error::Malformed { path, .. } => assert!(path.contains("plants[0].c_inv_mva"), "{path}"),
            e => panic!("unexpected {e}"),
        }
        assert!(parse_scenario("{\"id\": \"x\"} trailing", true).is_err());
    }

    #[test]
    fn duplicate_plant_ids_rejected() {
        let mut s = parse_scenario(MINIMAL, true).unwrap();
        s.plants.push(s.plants[0].clone());
        assert!(s.validate().unwrap_err().to_string().contains("plants[1].id"));
    }

    #[test]
    fn tie_requires_second_area() {
        let mut s = parse_scenario(MINIMAL, true).unwrap();
        s.tie = Some(TieLine {
            t_tie: 0.1,
            scheduled_flow: 0.0,
        });
        assert!(s.validate().is_err());
        s.area_b = Some(GridParams::default());
        assert!(s.validate().is_ok());
    }

    #[test]
    fn capacity_mismatch_is_only_a_warning() {
        let mut s = parse_scenario(MINIMAL, true).unwrap();
        s.grid.penetration = 0.4;
        assert!(s.validate().is_ok());
        assert_eq!(s.warnings().len(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let s = parse_scenario(MINIMAL, true).unwrap();
        let back = parse_scenario(&s.to_json(), true).unwrap();
        assert_eq!(s, back);
    }
}
