//! Post-processing of simulation results.
//!
//! - frequency metrics (nadir, settling frequency, windowed RoCoF, UFLS flag)
//! - the virtual-inertia characterization harness: a ramp in frequency
//!   (constant RoCoF) drives the inertia path open-loop and the response is
//!   compared with the closed-form steady inertia, rise time and RoCoF limit
//! - step-response compliance for frequency-watt control
//! - a dispersion index for several farms answering the same event

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::pv_control::{ControllerSet, PvPlant};
use crate::simulate::{run_open_loop, SimConfig, SimResult};

/// Default tail window for the settling frequency, s.
pub const SETTLING_WINDOW_S: f64 = 5.0;
/// Default sliding window for RoCoF, s.
pub const ROCOF_WINDOW_S: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub nadir_hz: f64,
    pub t_nadir_s: f64,
    pub settling_hz: f64,
    pub rocof_max_hzps: f64,
    pub ufls_crossed: bool,
    /// Event size in MW per 0.1 Hz of settled deviation; `None` when the
    /// frequency settles exactly at nominal or there was no event.
    pub fr_measure_mw_per_0p1hz: Option<f64>,
}

impl Metrics {
    /// Metric names accepted by sweep specifications, in report order.
    pub const NAMES: [&'static str; 6] = [
        "nadir_hz",
        "t_nadir_s",
        "settling_hz",
        "rocof_max_hzps",
        "ufls_crossed",
        "fr_measure_mw_per_0p1hz",
    ];

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "nadir_hz" => Some(self.nadir_hz),
            "t_nadir_s" => Some(self.t_nadir_s),
            "settling_hz" => Some(self.settling_hz),
            "rocof_max_hzps" => Some(self.rocof_max_hzps),
            "ufls_crossed" => Some(if self.ufls_crossed { 1.0 } else { 0.0 }),
            "fr_measure_mw_per_0p1hz" => Some(self.fr_measure_mw_per_0p1hz.unwrap_or(f64::NAN)),
            _ => None,
        }
    }
}

fn sample_dt(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::invalid("result.t", "need at least two samples"));
    }
    Ok(t[1] - t[0])
}

pub fn compute_metrics(
    result: &SimResult,
    t_event: f64,
    tail_window: f64,
    rocof_window: f64,
) -> Result<Metrics> {
    check::non_negative("tail_window", tail_window)?;
    check::positive("rocof_window", rocof_window)?;
    let t = &result.t;
    let f = &result.f_hz;
    let h = sample_dt(t)?;
    let span = t[t.len() - 1] - t[0];
    if tail_window > span + 1e-9 {
        return Err(Error::invalid(
            "tail_window",
            format!("{tail_window} s exceeds the {span} s series"),
        ));
    }
    if rocof_window > span + 1e-9 {
        return Err(Error::invalid(
            "rocof_window",
            format!("{rocof_window} s exceeds the {span} s series"),
        ));
    }

    let start = t.partition_point(|&x| x < t_event - 1e-9);
    if start >= t.len() {
        return Err(Error::invalid("t_event", "lies after the last sample"));
    }
    let (mut nadir, mut i_nadir) = (f[start], start);
    for (i, &v) in f.iter().enumerate().skip(start) {
        if v < nadir {
            nadir = v;
            i_nadir = i;
        }
    }

    let tail_from = t[t.len() - 1] - tail_window - 1e-9;
    let tail: Vec<f64> = t
        .iter()
        .zip(f)
        .filter(|(&ti, _)| ti >= tail_from)
        .map(|(_, &v)| v)
        .collect();
    let settling = tail.iter().sum::<f64>() / tail.len() as f64;

    let w = ((rocof_window / h).round() as usize).max(1);
    let rocof_max = (0..t.len().saturating_sub(w))
        .map(|i| ((f[i + w] - f[i]) / (t[i + w] - t[i])).abs())
        .fold(0.0, f64::max);

    let f_n = result.meta.f_nominal_hz;
    let dev = (settling - f_n).abs();
    let fr_measure = (result.meta.event_mw != 0.0 && dev > 0.0)
        .then(|| result.meta.event_mw.abs() / (dev / 0.1));

    Ok(Metrics {
        nadir_hz: nadir,
        t_nadir_s: t[i_nadir],
        settling_hz: settling,
        rocof_max_hzps: rocof_max,
        ufls_crossed: result.ufls_crossed
            || (result.meta.ufls_hz > 0.0 && nadir < result.meta.ufls_hz),
        fr_measure_mw_per_0p1hz: fr_measure,
    })
}

/// Metrics with the default windows, measured from the first contingency.
pub fn default_metrics(result: &SimResult) -> Result<Metrics> {
    let t_event = result.meta.first_event_s().unwrap_or(0.0);
    compute_metrics(result, t_event, SETTLING_WINDOW_S, ROCOF_WINDOW_S)
}

/// Prescribed frequency deviation for open-loop tests, in pu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trajectory {
    /// Flat, then a constant decline of `rocof_hzps` for `duration_s`, then flat.
    Ramp {
        rocof_hzps: f64,
        t_start_s: f64,
        duration_s: f64,
        f_n: f64,
    },
    /// A step of `step_pu` at `t_start_s`.
    Step { step_pu: f64, t_start_s: f64 },
}

impl Trajectory {
    #[inline]
    pub fn df_pu(&self, t: f64) -> f64 {
        match *self {
            Trajectory::Ramp {
                rocof_hzps,
                t_start_s,
                duration_s,
                f_n,
            } => {
                let elapsed = (t - t_start_s).clamp(0.0, duration_s);
                -rocof_hzps * elapsed / f_n
            }
            Trajectory::Step { step_pu, t_start_s } => {
                if t >= t_start_s {
                    step_pu
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn step_rocof_input(rocof_hzps: f64, t_start_s: f64, duration_s: f64, f_n: f64) -> Result<Trajectory> {
    check::finite("rocof", rocof_hzps)?;
    check::non_negative("t_start", t_start_s)?;
    check::positive("duration", duration_s)?;
    check::positive("f_n", f_n)?;
    Ok(Trajectory::Ramp {
        rocof_hzps,
        t_start_s,
        duration_s,
        f_n,
    })
}

/// Instantaneous virtual inertia `H(t) = f_N / (2·RoCoF) · p(t)`, with `p`
/// in pu of the inverter capacity.
pub fn h_inv_instant(p_inertia: &[f64], rocof_hzps: f64, f_n: f64) -> Result<Vec<f64>> {
    if rocof_hzps == 0.0 || !rocof_hzps.is_finite() {
        return Err(Error::invalid("rocof", "must be finite and nonzero"));
    }
    let k = f_n / (2.0 * rocof_hzps);
    Ok(p_inertia.iter().map(|p| k * p).collect())
}

/// Steady virtual inertia constant, `K_i·T_wowi / 2`.
pub fn h_ss_closed_form(k_i: f64, t_wowi: f64) -> f64 {
    k_i * t_wowi / 2.0
}

/// 10–90% rise time estimate `ln 9 · sqrt(T_lpwi² + T_wowi²)`.
pub fn rise_time_closed_form(t_lpwi: f64, t_wowi: f64) -> f64 {
    9f64.ln() * t_lpwi.hypot(t_wowi)
}

/// Largest sustained RoCoF the headroom can answer at a given steady inertia.
pub fn rocof_max_from_h(p_headroom: f64, h_ss: f64, f_n: f64) -> Result<f64> {
    check::positive("h_ss", h_ss)?;
    Ok(p_headroom / (2.0 * h_ss) * f_n)
}

/// The same limit written in controller parameters.
pub fn rocof_max_from_gain(p_headroom: f64, k_i: f64, t_wowi: f64, f_n: f64) -> Result<f64> {
    check::positive("k_i·t_wowi", k_i * t_wowi)?;
    Ok(p_headroom / (k_i * t_wowi) * f_n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CharacterizeOptions {
    pub dt: f64,
    pub t_start_s: f64,
    /// Ramp length; `None` picks `max(10, 20·(T_lpwi + T_wowi))`.
    pub duration_s: Option<f64>,
    pub f_n: f64,
}

impl Default for CharacterizeOptions {
    fn default() -> Self {
        Self {
            dt: 0.001,
            t_start_s: 1.0,
            duration_s: None,
            f_n: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InertiaCharacterization {
    pub rocof_input_hzps: f64,
    /// Closed-form steady inertia, s.
    pub h_ss_s: f64,
    /// Closed-form 10–90% rise time, s.
    pub t_rise_s: f64,
    /// Closed-form RoCoF limit from headroom and steady inertia, Hz/s.
    pub rocof_max_hzps: f64,
    /// The same limit from controller gains.
    pub rocof_max_from_gain_hzps: f64,
    pub p_ss_measured_pu: f64,
    pub h_ss_measured_s: f64,
    pub t_rise_measured_s: f64,
    /// `(measured − closed form) / closed form` for the rise time.
    pub t_rise_deviation: f64,
    pub clipped: bool,
    #[serde(skip)]
    pub t: Vec<f64>,
    #[serde(skip)]
    pub h_inv_t: Vec<f64>,
}

/// First time `y` reaches `level` (rising), linearly interpolated.
fn crossing_time(t: &[f64], y: &[f64], level: f64) -> Option<f64> {
    let i = y.iter().position(|&v| v >= level)?;
    if i == 0 {
        return Some(t[0]);
    }
    let (y0, y1) = (y[i - 1], y[i]);
    let frac = if y1 > y0 { (level - y0) / (y1 - y0) } else { 1.0 };
    Some(t[i - 1] + frac * (t[i] - t[i - 1]))
}

/// 10–90% rise of `y` toward `final_value`, measured after `t0`.
pub fn rise_time_10_90(t: &[f64], y: &[f64], final_value: f64) -> Option<f64> {
    if final_value == 0.0 {
        return None;
    }
    let s = final_value.signum();
    let scaled: Vec<f64> = y.iter().map(|v| v * s).collect();
    let target = final_value.abs();
    let t10 = crossing_time(t, &scaled, 0.1 * target)?;
    let t90 = crossing_time(t, &scaled, 0.9 * target)?;
    Some(t90 - t10)
}

fn inertia_only(plant: &PvPlant) -> Result<PvPlant> {
    let inertia = plant.controllers.inertia.clone().ok_or_else(|| {
        Error::invalid("plant.controllers.inertia", "characterization needs an inertia controller")
    })?;
    Ok(PvPlant {
        controllers: ControllerSet {
            inertia: Some(inertia),
            ..ControllerSet::default()
        },
        meas_noise_sigma: 0.0,
        meas_bias_pu: 0.0,
        meas_lag_s: 0.0,
        ..plant.clone()
    })
}

/// Drive the plant's inertia path with a constant-RoCoF ramp and compare the
/// response with the closed forms.
pub fn characterize(plant: &PvPlant, rocof_hzps: f64, opts: &CharacterizeOptions) -> Result<InertiaCharacterization> {
    check::positive("rocof", rocof_hzps)?;
    let plant = inertia_only(plant)?;
    let params = plant.controllers.inertia.as_ref().expect("inertia attached");
    let duration = opts
        .duration_s
        .unwrap_or_else(|| (20.0 * (params.t_lpwi_s + params.t_wowi_s)).max(10.0));
    let ramp = step_rocof_input(rocof_hzps, opts.t_start_s, duration, opts.f_n)?;
    let cfg = SimConfig {
        dt: opts.dt,
        t_end: opts.t_start_s + duration,
        record_every: 1,
        rng_seed: 0,
    };
    let run = run_open_loop(&plant, |t| ramp.df_pu(t), opts.f_n, &cfg)?;
    let p: Vec<f64> = run.p_plant[0].iter().map(|v| v - plant.p_base).collect();
    let h_inv_t = h_inv_instant(&p, rocof_hzps, opts.f_n)?;

    let p_ss = *p.last().expect("non-empty run");
    let limit = params.p_limit.min(plant.p_headroom);
    let clipped = p.iter().any(|v| *v >= limit - 1e-12);
    let t_rel: Vec<f64> = run.t.iter().map(|t| t - opts.t_start_s).collect();
    let t_rise_measured = rise_time_10_90(&t_rel, &p, p_ss).unwrap_or(f64::NAN);

    let h_ss = h_ss_closed_form(params.k_i, params.t_wowi_s);
    let t_rise = rise_time_closed_form(params.t_lpwi_s, params.t_wowi_s);
    let (rocof_max, rocof_max_gain) = if h_ss > 0.0 {
        (
            rocof_max_from_h(limit, h_ss, opts.f_n)?,
            rocof_max_from_gain(limit, params.k_i, params.t_wowi_s, opts.f_n)?,
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(InertiaCharacterization {
        rocof_input_hzps: rocof_hzps,
        h_ss_s: h_ss,
        t_rise_s: t_rise,
        rocof_max_hzps: rocof_max,
        rocof_max_from_gain_hzps: rocof_max_gain,
        p_ss_measured_pu: p_ss,
        h_ss_measured_s: *h_inv_t.last().expect("non-empty run"),
        t_rise_measured_s: t_rise_measured,
        t_rise_deviation: (t_rise_measured - t_rise) / t_rise,
        clipped,
        t: run.t,
        h_inv_t,
    })
}

/// Smallest RoCoF at which the inertia response reaches its limit, located
/// by bisection on simulated runs within `[lo, hi]`.
pub fn clipping_onset_rocof(plant: &PvPlant, lo: f64, hi: f64, tol: f64, opts: &CharacterizeOptions) -> Result<f64> {
    check::positive("lo", lo)?;
    check::positive("tol", tol)?;
    let clips = |r: f64| characterize(plant, r, opts).map(|c| c.clipped);
    if clips(lo)? {
        return Err(Error::invalid("lo", format!("response already clips at {lo} Hz/s")));
    }
    if !clips(hi)? {
        return Err(Error::invalid("hi", format!("response does not clip at {hi} Hz/s")));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if clips(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiseTimePoint {
    /// `T_lpwi / T_wowi`.
    pub ratio: f64,
    pub t_lpwi_s: f64,
    pub t_wowi_s: f64,
    pub measured_s: f64,
    pub closed_form_s: f64,
    pub deviation: f64,
}

/// Measured against closed-form rise time across time-constant ratios.
/// Each point is an independent run; they execute in parallel.
pub fn rise_time_sweep(ratios: &[f64], t_wowi_s: f64, jobs: Option<usize>) -> Result<Vec<RiseTimePoint>> {
    let points = crate::parallel::map(ratios, jobs, |&ratio| {
        let t_lpwi = ratio * t_wowi_s;
        let plant = PvPlant::new("char", 100.0, 0.0, 1.0).with_controllers(ControllerSet {
            inertia: Some(crate::pv_control::InertiaCtrlParams {
                t_lpwi_s: t_lpwi,
                t_wowi_s,
                p_limit: 1.0,
                ..Default::default()
            }),
            ..Default::default()
        });
        let opts = CharacterizeOptions {
            dt: (t_lpwi.min(t_wowi_s) / 100.0).min(0.001),
            ..Default::default()
        };
        characterize(&plant, 0.01, &opts).map(|c| RiseTimePoint {
            ratio,
            t_lpwi_s: t_lpwi,
            t_wowi_s,
            measured_s: c.t_rise_measured_s,
            closed_form_s: c.t_rise_s,
            deviation: c.t_rise_deviation,
        })
    });
    points.into_iter().collect()
}

/// Acceptance bands for the frequency-step response of a frequency-watt
/// controller. All values are inputs; defaults follow the commonly published
/// guideline figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepBands {
    pub reaction_threshold_pct: f64,
    pub reaction_time_max_s: f64,
    pub rise_time_max_s: f64,
    pub settling_time_max_s: f64,
    pub overshoot_max_pct: f64,
    pub settling_band_pct: f64,
}

impl Default for StepBands {
    fn default() -> Self {
        Self {
            reaction_threshold_pct: 2.0,
            reaction_time_max_s: 0.5,
            rise_time_max_s: 4.0,
            settling_time_max_s: 10.0,
            overshoot_max_pct: 5.0,
            settling_band_pct: 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceCheck {
    pub metric: String,
    pub value: Option<f64>,
    pub limit: f64,
    pub pass: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub step_pu: f64,
    pub final_dp_pu: f64,
    pub reaction_time_s: Option<f64>,
    pub rise_time_s: Option<f64>,
    pub settling_time_s: Option<f64>,
    pub overshoot_pct: Option<f64>,
    pub settling_band_pct: f64,
    pub checks: Vec<ComplianceCheck>,
}

impl ComplianceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Evaluate the first plant's response to a frequency step recorded in `result`.
///
/// The step instant is the first sample where frequency leaves nominal by
/// more than half the step.
pub fn nerc_step_compliance(result: &SimResult, step_pu: f64, bands: &StepBands) -> Result<ComplianceReport> {
    check::finite("step_pu", step_pu)?;
    if step_pu == 0.0 {
        return Err(Error::invalid("step_pu", "must be nonzero"));
    }
    let p = result
        .p_plant
        .first()
        .ok_or_else(|| Error::invalid("result.p_plant", "no plant series"))?;
    let t = &result.t;
    sample_dt(t)?;
    let f_n = result.meta.f_nominal_hz;
    let i_step = result
        .f_hz
        .iter()
        .position(|f| (f - f_n).abs() > 0.5 * step_pu.abs() * f_n)
        .ok_or_else(|| Error::invalid("result.f_hz", "no frequency step found"))?;
    let t_step = t[i_step];
    let p0 = p[0];
    let tt: Vec<f64> = t[i_step..].iter().map(|x| x - t_step).collect();
    let dp: Vec<f64> = p[i_step..].iter().map(|x| x - p0).collect();
    let final_dp = *dp.last().expect("non-empty tail");

    let mut checks = Vec::with_capacity(5);
    let band = bands.settling_band_pct / 100.0 * final_dp.abs();

    if final_dp == 0.0 {
        for (m, lim) in [
            ("reaction_time_s", bands.reaction_time_max_s),
            ("rise_time_s", bands.rise_time_max_s),
            ("settling_time_s", bands.settling_time_max_s),
            ("overshoot_pct", bands.overshoot_max_pct),
            ("settling_band_pct", bands.settling_band_pct),
        ] {
            checks.push(ComplianceCheck {
                metric: m.into(),
                value: None,
                limit: lim,
                pass: false,
                reason: Some("no active-power response".into()),
            });
        }
        return Ok(ComplianceReport {
            step_pu,
            final_dp_pu: 0.0,
            reaction_time_s: None,
            rise_time_s: None,
            settling_time_s: None,
            overshoot_pct: None,
            settling_band_pct: bands.settling_band_pct,
            checks,
        });
    }

    let s = final_dp.signum();
    let scaled: Vec<f64> = dp.iter().map(|v| v * s).collect();
    let target = final_dp.abs();
    let reaction = scaled
        .iter()
        .position(|v| *v > bands.reaction_threshold_pct / 100.0 * target)
        .map(|i| tt[i]);
    let rise = rise_time_10_90(&tt, &dp, final_dp);
    let overshoot = (scaled.iter().cloned().fold(f64::MIN, f64::max) - target) / target * 100.0;

    // Settled means the trailing 10% of the record stays inside the band.
    let tail_from = tt.len() - (tt.len() / 10).max(1);
    let tail_ok = dp[tail_from..].iter().all(|v| (v - final_dp).abs() <= band);
    let settling = if tail_ok {
        Some(match dp.iter().rposition(|v| (v - final_dp).abs() > band) {
            Some(i) => tt[(i + 1).min(tt.len() - 1)],
            None => 0.0,
        })
    } else {
        None
    };

    let mut push = |metric: &str, value: Option<f64>, limit: f64, missing: &str| {
        let pass = value.is_some_and(|v| v <= limit + 1e-12);
        checks.push(ComplianceCheck {
            metric: metric.into(),
            value,
            limit,
            pass,
            reason: match value {
                None => Some(missing.into()),
                Some(_) if !pass => Some("outside band".into()),
                _ => None,
            },
        });
    };
    push("reaction_time_s", reaction, bands.reaction_time_max_s, "never reacted");
    push("rise_time_s", rise, bands.rise_time_max_s, "never reached 90%");
    push("settling_time_s", settling, bands.settling_time_max_s, "did not settle within the record");
    push("overshoot_pct", Some(overshoot.max(0.0)), bands.overshoot_max_pct, "");
    let band_residual = dp[tail_from..]
        .iter()
        .map(|v| (v - final_dp).abs() / target * 100.0)
        .fold(0.0, f64::max);
    push(
        "settling_band_pct",
        Some(band_residual),
        bands.settling_band_pct,
        "",
    );

    Ok(ComplianceReport {
        step_pu,
        final_dp_pu: final_dp,
        reaction_time_s: reaction,
        rise_time_s: rise,
        settling_time_s: settling,
        overshoot_pct: Some(overshoot.max(0.0)),
        settling_band_pct: bands.settling_band_pct,
        checks,
    })
}

/// Open-loop frequency-step test: the step is applied at t = 1 s.
pub fn frequency_step_test(plant: &PvPlant, step_pu: f64, f_n: f64, cfg: &SimConfig) -> Result<SimResult> {
    let step = Trajectory::Step {
        step_pu,
        t_start_s: 1.0,
    };
    run_open_loop(plant, |t| step.df_pu(t), f_n, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConflictIndex {
    /// Time average of the cross-farm standard deviation.
    pub mean_std: f64,
    /// Largest spread between any two farms at one instant.
    pub max_pairwise: f64,
}

/// Dispersion of several farms' outputs over samples with `t >= window_start`.
pub fn conflict_index(t: &[f64], farms: &[&[f64]], window_start: f64) -> Result<ConflictIndex> {
    if farms.len() < 2 {
        return Err(Error::invalid("farms", "need at least two farms"));
    }
    if let Some((i, f)) = farms.iter().enumerate().find(|(_, f)| f.len() != t.len()) {
        return Err(Error::invalid(
            format!("farms[{i}]"),
            format!("length {} does not match {} time samples", f.len(), t.len()),
        ));
    }
    let start = t.partition_point(|&x| x < window_start - 1e-9);
    if start >= t.len() {
        return Err(Error::invalid("window_start", "lies after the last sample"));
    }
    let n = farms.len() as f64;
    let (mut sum_std, mut max_pair) = (0.0, 0.0f64);
    for k in start..t.len() {
        let mean = farms.iter().map(|f| f[k]).sum::<f64>() / n;
        let var = farms.iter().map(|f| (f[k] - mean).powi(2)).sum::<f64>() / n;
        sum_std += var.sqrt();
        let hi = farms.iter().map(|f| f[k]).fold(f64::MIN, f64::max);
        let lo = farms.iter().map(|f| f[k]).fold(f64::MAX, f64::min);
        max_pair = max_pair.max(hi - lo);
    }
    Ok(ConflictIndex {
        mean_std: sum_std / (t.len() - start) as f64,
        max_pairwise: max_pair,
    })
}

/// Conflict index over every plant of a run.
pub fn conflict_index_for(result: &SimResult, window_start: f64) -> Result<ConflictIndex> {
    let farms: Vec<&[f64]> = result.p_plant.iter().map(|v| v.as_slice()).collect();
    conflict_index(&result.t, &farms, window_start)
}
