//! CSV time series and flat JSON reports.
//!
//! Numbers in CSV use nine digits after the decimal point, so values parsed
//! back agree with the run to 1e-9 and files are byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::analyze::Metrics;
use crate::error::{Error, Result};
use crate::simulate::SimResult;

pub(crate) fn fmt_num(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn timeseries_header(result: &SimResult) -> Vec<String> {
    let mut h: Vec<String> = ["t_s", "f_hz", "p_gov_pu", "p_agc_pu"].map(String::from).into();
    h.extend(result.plant_ids.iter().map(|id| format!("p_plant_{id}_pu")));
    if result.f_hz_b.is_some() {
        h.push("f_hz_b".into());
    }
    if result.p_tie.is_some() {
        h.push("p_tie_pu".into());
    }
    h
}

pub fn timeseries_csv_string(result: &SimResult) -> String {
    let mut out = timeseries_header(result).join(",");
    out.push('\n');
    for k in 0..result.t.len() {
        let mut row = vec![result.t[k], result.f_hz[k], result.p_gov[k], result.p_agc[k]];
        row.extend(result.p_plant.iter().map(|p| p[k]));
        if let Some(fb) = &result.f_hz_b {
            row.push(fb[k]);
        }
        if let Some(pt) = &result.p_tie {
            row.push(pt[k]);
        }
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_num(*v));
        }
        out.push('\n');
    }
    out
}

pub fn write_timeseries_csv(result: &SimResult, path: &Path) -> Result<()> {
    write_file(path, &timeseries_csv_string(result))
}

/// Parse a file written by [`write_timeseries_csv`] into header and columns.
pub fn read_timeseries_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::invalid("csv", "missing header"))?
        .split(',')
        .map(String::from)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (r, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::invalid(format!("csv row {}", r + 1), "column count mismatch"));
        }
        for (c, f) in fields.iter().enumerate() {
            let v = f
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("csv row {} column {}", r + 1, header[c]), e.to_string()))?;
            cols[c].push(v);
        }
    }
    Ok((header, cols))
}

pub fn metrics_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

pub fn write_metrics_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_file(path, &(metrics_json_string(value) + "\n"))
}

/// Side-by-side metrics, one row per scenario.
pub fn compare_table_csv(rows: &[(String, Metrics)]) -> String {
    let mut s = String::from("scenario");
    for n in Metrics::NAMES {
        let _ = write!(s, ",{n}");
    }
    s.push('\n');
    for (id, m) in rows {
        s.push_str(id);
        for n in Metrics::NAMES {
            let v = m.get(n).expect("known metric");
            s.push(',');
            if v.is_finite() {
                s.push_str(&fmt_num(v));
            }
        }
        s.push('\n');
    }
    s
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(fmt_num(-0.0), "0.000000000");
        assert_eq!(fmt_num(-1e-12), "0.000000000");
        assert_eq!(fmt_num(-1.5), "-1.500000000");
        assert_eq!(fmt_num(60.0), "60.000000000");
    }

    #[test]
    fn empty_result_is_header_only() {
        let r = SimResult {
            plant_ids: vec!["a".into()],
            p_plant: vec![vec![]],
            ..SimResult::default()
        };
        assert_eq!(timeseries_csv_string(&r), "t_s,f_hz,p_gov_pu,p_agc_pu,p_plant_a_pu\n");
    }

    #[test]
    fn io_error_names_path() {
        let e = write_file(Path::new("/proc/nonexistent/x.csv"), "x").unwrap_err();
        assert!(e.to_string().contains("/proc/nonexistent"), "{e}");
    }
}
