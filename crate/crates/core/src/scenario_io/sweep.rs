//! One-dimensional parameter sweeps over a base scenario.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analyze::{default_metrics, Metrics};
use crate::error::{Error, Result};
use crate::simulate::run_scenario;

use super::{catalog, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub schema_version: u32,
    pub id: String,
    pub description: String,
    /// A catalog id (string) or an inline scenario (object).
    pub base: Value,
    /// Dot path to a numeric field, e.g. `grid.penetration` or
    /// `plants.0.p_headroom`.
    pub axis: String,
    pub values: Vec<f64>,
    /// Metric names; empty selects all.
    pub outputs: Vec<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            schema_version: super::SCHEMA_VERSION,
            id: String::new(),
            description: String::new(),
            base: Value::Null,
            axis: String::new(),
            values: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: String,
    pub outputs: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
    pub metrics: Vec<Metrics>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = self.axis.clone();
        for o in &self.outputs {
            s.push(',');
            s.push_str(o);
        }
        s.push('\n');
        for (x, ys) in &self.rows {
            s.push_str(&super::output::fmt_num(*x));
            for y in ys {
                s.push(',');
                s.push_str(&super::output::fmt_num(*y));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(x, ys)| {
                let mut m = serde_json::Map::new();
                m.insert(self.axis.clone(), (*x).into());
                for (k, y) in self.outputs.iter().zip(ys) {
                    m.insert(k.clone(), serde_json::Number::from_f64(*y).map_or(Value::Null, Value::Number));
                }
                Value::Object(m)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("table serializes")
    }
}

fn path_segments(axis: &str) -> Vec<&str> {
    axis.split('.')
        .flat_map(|seg| seg.split(['[', ']']))
        .filter(|s| !s.is_empty())
        .collect()
}

fn locate<'a>(root: &'a mut Value, axis: &str) -> Result<&'a mut Value> {
    let mut cur = root;
    for seg in path_segments(axis) {
        cur = match cur {
            Value::Object(m) => m.get_mut(seg),
            Value::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| Error::invalid(format!("axis `{axis}`"), format!("no field `{seg}`")))?;
    }
    Ok(cur)
}

/// Copy of `base` with the field at `axis` set to `value`, re-validated.
pub fn with_axis_value(base: &Scenario, axis: &str, value: f64) -> Result<Scenario> {
    let mut v = serde_json::to_value(base).expect("scenario serializes");
    let slot = locate(&mut v, axis)?;
    match slot {
        Value::Number(n) if n.is_u64() && value.fract() == 0.0 && value >= 0.0 => {
            *slot = Value::from(value as u64)
        }
        Value::Number(_) => {
            *slot = serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| Error::invalid("values", format!("{value} is not finite")))?
        }
        _ => return Err(Error::invalid(format!("axis `{axis}`"), "does not name a numeric field")),
    }
    let s: Scenario = serde_json::from_value(v).map_err(|e| Error::invalid(format!("axis `{axis}`"), e.to_string()))?;
    s.validate()?;
    Ok(s)
}

impl SweepSpec {
    pub fn base_scenario(&self, strict: bool) -> Result<Scenario> {
        match &self.base {
            Value::String(id) => catalog::scenario(id),
            Value::Object(_) => super::parse_scenario(&self.base.to_string(), strict),
            _ => Err(Error::invalid("base", "must be a catalog id or a scenario object")),
        }
    }

    pub fn outputs(&self) -> Result<Vec<String>> {
        if self.outputs.is_empty() {
            return Ok(Metrics::NAMES.iter().map(|s| s.to_string()).collect());
        }
        for (i, o) in self.outputs.iter().enumerate() {
            if !Metrics::NAMES.contains(&o.as_str()) {
                return Err(Error::invalid(format!("outputs[{i}]"), format!("unknown metric `{o}`")));
            }
        }
        Ok(self.outputs.clone())
    }

    /// Every scenario of the sweep, checked before any run starts.
    pub fn expand(&self, strict: bool) -> Result<Vec<Scenario>> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "must not be empty"));
        }
        let base = self.base_scenario(strict)?;
        self.values
            .iter()
            .map(|&x| with_axis_value(&base, &self.axis, x))
            .collect()
    }
}

/// Expand, run in parallel (up to `jobs` threads) and tabulate the metrics.
/// `adjust` is applied to every expanded scenario before it runs.
pub fn run_sweep(
    spec: &SweepSpec,
    strict: bool,
    jobs: Option<usize>,
    adjust: impl Fn(&mut Scenario),
) -> Result<SweepTable> {
    let outputs = spec.outputs()?;
    let mut scenarios = spec.expand(strict)?;
    scenarios.iter_mut().for_each(&adjust);
    let metrics: Vec<Metrics> = crate::parallel::map(&scenarios, jobs, |s| {
        run_scenario(s, &s.sim).and_then(|r| default_metrics(&r))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let rows = spec
        .values
        .iter()
        .zip(&metrics)
        .map(|(&x, m)| (x, outputs.iter().map(|o| m.get(o).expect("checked name")).collect()))
        .collect();
    Ok(SweepTable {
        axis: spec.axis.clone(),
        outputs,
        rows,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_sets_nested_fields() {
        let base = catalog::scenario("table1-2").unwrap();
        let s = with_axis_value(&base, "plants[0].p_headroom", 0.15).unwrap();
        assert_eq!(s.plants[0].p_headroom, 0.15);
        let s = with_axis_value(&base, "plants.0.controllers.droop.k_g", 20.0).unwrap();
        assert_eq!(s.plants[0].controllers.droop.as_ref().unwrap().k_g, 20.0);
    }

    #[test]
    fn axis_errors() {
        let base = catalog::scenario("table1-2").unwrap();
        assert!(with_axis_value(&base, "grid.nope", 1.0).is_err());
        assert!(with_axis_value(&base, "id", 1.0).is_err());
        assert!(with_axis_value(&base, "grid.penetration", 1.5).is_err());
    }

    #[test]
    fn empty_values_rejected() {
        let spec = SweepSpec {
            base: Value::String("table1-4".into()),
            axis: "grid.penetration".into(),
            ..SweepSpec::default()
        };
        assert!(spec.expand(true).is_err());
    }
}
