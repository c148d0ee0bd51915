//! PV plant frequency-support controllers.
//!
//! Each controller maps a measured per-unit frequency deviation to a power
//! increment in per unit of the inverter capacity. Paths are composed at the
//! plant level and then clamped so that total output stays within
//! `[0, p_base + p_headroom]`.
//!
//! Signal chains:
//!
//! ```text
//! inertia:  -df -> deadband -> low-pass(T_lpwi) -> washout(T_wowi) -> K_i -> limiter
//! droop:    -df -> deadband -> low-pass(T_lpwg) -> K_g [-> lead-lag] -> limiter
//! fast PFC: droop path + K_fast/s on a separately deadbanded error, shared limiter
//! AGC:      ACE = dp_tie + B·df -> PI(-ACE) -> dispatched by headroom share
//! ```
//!
//! The limiter sits last in every chain.

use serde::{Deserialize, Serialize};

use crate::blocks::{
    deadband_apply, leadlag_output, limiter, lowpass_derivative, pi_update, washout_output,
    Deadband, DeadbandKind, FirstOrderState, Limits, PiGains, PiState,
};
use crate::error::{check, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InertiaCtrlParams {
    pub db_pu: f64,
    pub deadband_kind: DeadbandKind,
    pub t_lpwi_s: f64,
    pub t_wowi_s: f64,
    /// Gain on the per-unit frequency signal, pu power per pu frequency.
    pub k_i: f64,
    pub p_limit: f64,
}

impl Default for InertiaCtrlParams {
    fn default() -> Self {
        Self {
            db_pu: 0.0,
            deadband_kind: DeadbandKind::Offset,
            t_lpwi_s: 1.0,
            t_wowi_s: 0.1,
            k_i: 500.0,
            p_limit: 0.05,
        }
    }
}

impl InertiaCtrlParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::non_negative(&format!("{path}.db_pu"), self.db_pu)?;
        check::positive(&format!("{path}.t_lpwi_s"), self.t_lpwi_s)?;
        check::positive(&format!("{path}.t_wowi_s"), self.t_wowi_s)?;
        check::non_negative(&format!("{path}.k_i"), self.k_i)?;
        check::non_negative(&format!("{path}.p_limit"), self.p_limit)
    }

    pub fn deadband(&self) -> Deadband {
        Deadband {
            half_width: self.db_pu,
            kind: self.deadband_kind,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            lo: -self.p_limit,
            hi: self.p_limit,
        }
    }

    /// Steady virtual inertia constant on the inverter base, `K_i·T_wowi/2`.
    pub fn steady_inertia_s(&self) -> f64 {
        self.k_i * self.t_wowi_s / 2.0
    }
}

/// Unit-DC-gain lead-lag stage `(1 + s·T_wowg1)/(1 + s·T_wowg2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadLagParams {
    pub t_wowg1_s: f64,
    pub t_wowg2_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DroopCtrlParams {
    pub db_pu: f64,
    pub deadband_kind: DeadbandKind,
    pub t_lpwg_s: f64,
    /// Gain on the (P_max − P_min) basis; 20 is a 5% droop line.
    pub k_g: f64,
    pub p_limit: f64,
    pub lead_lag: Option<LeadLagParams>,
}

impl Default for DroopCtrlParams {
    fn default() -> Self {
        Self {
            db_pu: 0.0006,
            deadband_kind: DeadbandKind::Offset,
            t_lpwg_s: 1.0,
            k_g: 15.0,
            p_limit: 0.05,
            lead_lag: None,
        }
    }
}

impl DroopCtrlParams {
    /// Gain that realizes a droop of `r` (e.g. 0.05) on the plant's full range.
    pub fn gain_for_droop(r: f64) -> f64 {
        1.0 / r
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        check::non_negative(&format!("{path}.db_pu"), self.db_pu)?;
        check::positive(&format!("{path}.t_lpwg_s"), self.t_lpwg_s)?;
        check::non_negative(&format!("{path}.k_g"), self.k_g)?;
        check::non_negative(&format!("{path}.p_limit"), self.p_limit)?;
        if let Some(ll) = &self.lead_lag {
            check::non_negative(&format!("{path}.lead_lag.t_wowg1_s"), ll.t_wowg1_s)?;
            check::positive(&format!("{path}.lead_lag.t_wowg2_s"), ll.t_wowg2_s)?;
        }
        Ok(())
    }

    pub fn deadband(&self) -> Deadband {
        Deadband {
            half_width: self.db_pu,
            kind: self.deadband_kind,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            lo: -self.p_limit,
            hi: self.p_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgcParams {
    /// Frequency bias, pu power per pu frequency on the system base.
    pub bias_b: f64,
    pub kp: f64,
    pub ki: f64,
    pub t_enable_s: f64,
    /// Dispatch period; 0 evaluates ACE continuously.
    pub cycle_s: f64,
}

impl Default for AgcParams {
    fn default() -> Self {
        Self {
            bias_b: 20.0,
            kp: 0.05,
            ki: 0.02,
            t_enable_s: 20.0,
            cycle_s: 0.0,
        }
    }
}

impl AgcParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::non_negative(&format!("{path}.bias_b"), self.bias_b)?;
        check::non_negative(&format!("{path}.kp"), self.kp)?;
        check::non_negative(&format!("{path}.ki"), self.ki)?;
        check::non_negative(&format!("{path}.t_enable_s"), self.t_enable_s)?;
        check::non_negative(&format!("{path}.cycle_s"), self.cycle_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FastPfcParams {
    pub droop: DroopCtrlParams,
    pub ki_fast: f64,
    pub db_int_pu: f64,
    pub deadband_kind: DeadbandKind,
    pub p_limit: f64,
    /// When set, the integral decays with this time constant while the error
    /// is inside the band. The default holds it.
    pub bleed_tau_s: Option<f64>,
}

impl Default for FastPfcParams {
    fn default() -> Self {
        Self {
            droop: DroopCtrlParams::default(),
            ki_fast: 1.0,
            db_int_pu: 0.0006,
            deadband_kind: DeadbandKind::Offset,
            p_limit: 0.05,
            bleed_tau_s: None,
        }
    }
}

impl FastPfcParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        self.droop.validate(&format!("{path}.droop"))?;
        check::non_negative(&format!("{path}.ki_fast"), self.ki_fast)?;
        check::non_negative(&format!("{path}.db_int_pu"), self.db_int_pu)?;
        check::non_negative(&format!("{path}.p_limit"), self.p_limit)?;
        if let Some(tau) = self.bleed_tau_s {
            check::positive(&format!("{path}.bleed_tau_s"), tau)?;
        }
        Ok(())
    }

    pub fn integral_deadband(&self) -> Deadband {
        Deadband {
            half_width: self.db_int_pu,
            kind: self.deadband_kind,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            lo: -self.p_limit,
            hi: self.p_limit,
        }
    }
}

/// Controllers attached to one plant. Droop and fast PFC are exclusive since
/// fast PFC carries its own droop path.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerSet {
    pub inertia: Option<InertiaCtrlParams>,
    pub droop: Option<DroopCtrlParams>,
    pub fast_pfc: Option<FastPfcParams>,
}

impl ControllerSet {
    pub fn is_empty(&self) -> bool {
        self.inertia.is_none() && self.droop.is_none() && self.fast_pfc.is_none()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if let Some(p) = &self.inertia {
            p.validate(&format!("{path}.inertia"))?;
        }
        if let Some(p) = &self.droop {
            p.validate(&format!("{path}.droop"))?;
        }
        if let Some(p) = &self.fast_pfc {
            p.validate(&format!("{path}.fast_pfc"))?;
        }
        if self.droop.is_some() && self.fast_pfc.is_some() {
            return Err(Error::invalid(
                format!("{path}.fast_pfc"),
                "cannot be combined with a separate droop controller",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvPlant {
    pub id: String,
    pub c_inv_mva: f64,
    /// Pre-event operating point, pu on `c_inv_mva`.
    pub p_base: f64,
    /// Upward reserve, pu on `c_inv_mva`.
    pub p_headroom: f64,
    #[serde(default)]
    pub controllers: ControllerSet,
    #[serde(default = "default_noise_sigma")]
    pub meas_noise_sigma: f64,
    /// Constant frequency-measurement offset, pu.
    #[serde(default)]
    pub meas_bias_pu: f64,
    /// Optional first-order measurement lag; 0 disables it.
    #[serde(default)]
    pub meas_lag_s: f64,
    #[serde(default)]
    pub area: usize,
}

fn default_noise_sigma() -> f64 {
    2e-5
}

impl PvPlant {
    pub fn new(id: impl Into<String>, c_inv_mva: f64, p_base: f64, p_headroom: f64) -> Self {
        Self {
            id: id.into(),
            c_inv_mva,
            p_base,
            p_headroom,
            controllers: ControllerSet::default(),
            meas_noise_sigma: default_noise_sigma(),
            meas_bias_pu: 0.0,
            meas_lag_s: 0.0,
            area: 0,
        }
    }

    pub fn with_controllers(mut self, controllers: ControllerSet) -> Self {
        self.controllers = controllers;
        self
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.meas_noise_sigma = sigma;
        self
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid(format!("{path}.id"), "must not be empty"));
        }
        check::positive(&format!("{path}.c_inv_mva"), self.c_inv_mva)?;
        check::in_range(&format!("{path}.p_base"), self.p_base, 0.0, 1.0)?;
        check::in_range(
            &format!("{path}.p_headroom"),
            self.p_headroom,
            0.0,
            1.0 - self.p_base,
        )?;
        check::non_negative(&format!("{path}.meas_noise_sigma"), self.meas_noise_sigma)?;
        check::finite(&format!("{path}.meas_bias_pu"), self.meas_bias_pu)?;
        check::non_negative(&format!("{path}.meas_lag_s"), self.meas_lag_s)?;
        self.controllers.validate(&format!("{path}.controllers"))?;
        if let Some(p) = &self.controllers.inertia {
            if p.p_limit > self.p_headroom {
                return Err(Error::invalid(
                    format!("{path}.controllers.inertia.p_limit"),
                    format!("{} exceeds plant headroom {}", p.p_limit, self.p_headroom),
                ));
            }
        }
        Ok(())
    }

    /// Allowed power increment: output floor at zero, ceiling at base + headroom.
    pub fn bounds(&self) -> Limits {
        Limits {
            lo: -self.p_base,
            hi: self.p_headroom,
        }
    }

    pub fn headroom_mw(&self) -> f64 {
        self.p_headroom * self.c_inv_mva
    }
}

/// Clamp a commanded increment so total output stays in `[0, p_base + p_headroom]`.
#[inline]
pub fn apply_headroom(p_cmd: f64, plant: &PvPlant) -> f64 {
    limiter(p_cmd, -plant.p_base, plant.p_headroom)
}

pub fn to_system_base(p_pu_inv: f64, c_inv_mva: f64, c_system_mva: f64) -> Result<f64> {
    check::positive("c_inv", c_inv_mva)?;
    check::positive("c_system", c_system_mva)?;
    Ok(p_pu_inv * c_inv_mva / c_system_mva)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InertiaState {
    pub lowpass: FirstOrderState,
    pub washout: FirstOrderState,
}

impl InertiaState {
    pub fn at_equilibrium(df_meas: f64, params: &InertiaCtrlParams) -> Self {
        let u = deadband_apply(-df_meas, &params.deadband());
        Self {
            lowpass: FirstOrderState::at_equilibrium(u),
            washout: FirstOrderState::at_equilibrium(u),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InertiaDeriv {
    pub lowpass: f64,
    pub washout: f64,
}

pub fn inertia_ctrl_eval(
    state: &InertiaState,
    df_meas: f64,
    params: &InertiaCtrlParams,
    limits: &Limits,
) -> (InertiaDeriv, f64) {
    let u = deadband_apply(-df_meas, &params.deadband());
    let d_lp = lowpass_derivative(&state.lowpass, u, params.t_lpwi_s);
    let (d_wo, y) = washout_output(&state.washout, state.lowpass.x, params.t_wowi_s);
    let p = limits.clamp(params.k_i * y);
    (
        InertiaDeriv {
            lowpass: d_lp,
            washout: d_wo,
        },
        p,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DroopState {
    pub lowpass: FirstOrderState,
    pub lead_lag: FirstOrderState,
}

impl DroopState {
    pub fn at_equilibrium(df_meas: f64, params: &DroopCtrlParams) -> Self {
        let u = deadband_apply(-df_meas, &params.deadband());
        Self {
            lowpass: FirstOrderState::at_equilibrium(u),
            lead_lag: FirstOrderState::at_equilibrium(params.k_g * u),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DroopDeriv {
    pub lowpass: f64,
    pub lead_lag: f64,
}

/// Droop path before its limiter.
fn droop_raw(state: &DroopState, df_meas: f64, params: &DroopCtrlParams) -> (DroopDeriv, f64) {
    let u = deadband_apply(-df_meas, &params.deadband());
    let d_lp = lowpass_derivative(&state.lowpass, u, params.t_lpwg_s);
    let g = params.k_g * state.lowpass.x;
    let (d_ll, y) = match &params.lead_lag {
        Some(ll) => leadlag_output(&state.lead_lag, g, ll.t_wowg1_s, ll.t_wowg2_s),
        None => (0.0, g),
    };
    (
        DroopDeriv {
            lowpass: d_lp,
            lead_lag: d_ll,
        },
        y,
    )
}

pub fn droop_ctrl_eval(
    state: &DroopState,
    df_meas: f64,
    params: &DroopCtrlParams,
    limits: &Limits,
) -> (DroopDeriv, f64) {
    let (d, y) = droop_raw(state, df_meas, params);
    (d, limits.clamp(y))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CombinedState {
    pub inertia: InertiaState,
    pub droop: DroopState,
}

/// Inertia and droop paths side by side, each through its own limiter, then
/// the sum through `limits`.
pub fn combined_ctrl_eval(
    state: &CombinedState,
    df_meas: f64,
    inertia: &InertiaCtrlParams,
    droop: &DroopCtrlParams,
    limits: &Limits,
) -> ((InertiaDeriv, DroopDeriv), f64) {
    let (di, pi) = inertia_ctrl_eval(&state.inertia, df_meas, inertia, &inertia.limits());
    let (dd, pd) = droop_ctrl_eval(&state.droop, df_meas, droop, &droop.limits());
    ((di, dd), limits.clamp(pi + pd))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FastPfcState {
    pub droop: DroopState,
    pub integral: PiState,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FastPfcDeriv {
    pub droop: DroopDeriv,
    pub integral: f64,
}

/// Droop path plus a deadbanded integral link behind a shared limiter.
///
/// The integrator freezes while the shared limiter (or the integral alone)
/// sits on the bound it is being pushed toward, and holds its value while the
/// error is inside the integral deadband.
pub fn fast_pfc_eval(
    state: &FastPfcState,
    df_meas: f64,
    params: &FastPfcParams,
    limits: &Limits,
) -> (FastPfcDeriv, f64) {
    let (dd, droop_y) = droop_raw(&state.droop, df_meas, &params.droop);
    let droop_p = params.droop.limits().clamp(droop_y);
    let integral = state.integral.integral;
    let raw = droop_p + integral;
    let p = limits.clamp(raw);

    let e = deadband_apply(-df_meas, &params.integral_deadband());
    let rate = if e == 0.0 {
        params.bleed_tau_s.map_or(0.0, |tau| -integral / tau)
    } else {
        params.ki_fast * e
    };
    let push_high = rate > 0.0 && (limits.at_high(raw) || limits.at_high(integral));
    let push_low = rate < 0.0 && (limits.at_low(raw) || limits.at_low(integral));
    let d_integral = if push_high || push_low { 0.0 } else { rate };
    (
        FastPfcDeriv {
            droop: dd,
            integral: d_integral,
        },
        p,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AgcState {
    pub pi: PiState,
}

/// Area control error, pu on the system base.
#[inline]
pub fn area_control_error(df: f64, dp_tie: f64, bias_b: f64) -> f64 {
    dp_tie + bias_b * df
}

/// AGC PI on `−ACE`. `ace` is the value the caller wants acted on (the live
/// value, or the sampled-and-held one for a cycled AGC). Returns
/// `(d_integral, p_cmd)`; `limit` is the total dispatchable headroom on the
/// system base.
pub fn agc_ctrl_eval(
    state: &AgcState,
    ace: f64,
    params: &AgcParams,
    limit: f64,
    t: f64,
) -> (f64, f64) {
    if t < params.t_enable_s || limit <= 0.0 {
        return (0.0, 0.0);
    }
    let gains = PiGains {
        kp: params.kp,
        ki: params.ki,
        limit,
    };
    let out = pi_update(&state.pi, -ace, &gains);
    (out.d_integral, out.y)
}

/// Compiled controller layout for one plant, with the number of integrator
/// states it owns.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantController {
    pub inertia: Option<InertiaCtrlParams>,
    pub droop: Option<DroopCtrlParams>,
    pub fast_pfc: Option<FastPfcParams>,
    pub bounds: Limits,
    /// Offsets of each path's states in the plant-local slice.
    inertia_at: usize,
    droop_at: usize,
    fast_at: usize,
    n_states: usize,
}

/// Algebraic outputs of one plant evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlantOutput {
    /// Clamped increment over `p_base`, pu on `c_inv_mva`.
    pub p_cmd: f64,
    pub p_inertia: f64,
    pub p_primary: f64,
}

impl PlantController {
    pub fn new(plant: &PvPlant) -> Self {
        let set = &plant.controllers;
        let mut n = 0;
        let inertia_at = n;
        if set.inertia.is_some() {
            n += 2;
        }
        let droop_at = n;
        if set.droop.is_some() {
            n += 2;
        }
        let fast_at = n;
        if set.fast_pfc.is_some() {
            n += 3;
        }
        Self {
            inertia: set.inertia.clone(),
            droop: set.droop.clone(),
            fast_pfc: set.fast_pfc.clone(),
            bounds: plant.bounds(),
            inertia_at,
            droop_at,
            fast_at,
            n_states: n,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn state_names(&self) -> Vec<&'static str> {
        let mut v = Vec::with_capacity(self.n_states);
        if self.inertia.is_some() {
            v.extend(["inertia.lowpass", "inertia.washout"]);
        }
        if self.droop.is_some() {
            v.extend(["droop.lowpass", "droop.lead_lag"]);
        }
        if self.fast_pfc.is_some() {
            v.extend(["fast_pfc.lowpass", "fast_pfc.lead_lag", "fast_pfc.integral"]);
        }
        v
    }

    /// Write the equilibrium for a constant measured deviation into `y`.
    pub fn init(&self, df_meas: f64, y: &mut [f64]) {
        if let Some(p) = &self.inertia {
            let s = InertiaState::at_equilibrium(df_meas, p);
            y[self.inertia_at] = s.lowpass.x;
            y[self.inertia_at + 1] = s.washout.x;
        }
        if let Some(p) = &self.droop {
            let s = DroopState::at_equilibrium(df_meas, p);
            y[self.droop_at] = s.lowpass.x;
            y[self.droop_at + 1] = s.lead_lag.x;
        }
        if let Some(p) = &self.fast_pfc {
            let s = DroopState::at_equilibrium(df_meas, &p.droop);
            y[self.fast_at] = s.lowpass.x;
            y[self.fast_at + 1] = s.lead_lag.x;
            y[self.fast_at + 2] = 0.0;
        }
    }

    /// Evaluate every attached path, writing derivatives into `dy`.
    /// `extra` is an externally dispatched increment (AGC) added before the
    /// headroom clamp.
    pub fn eval(&self, y: &[f64], dy: &mut [f64], df_meas: f64, extra: f64) -> PlantOutput {
        let mut p_inertia = 0.0;
        let mut p_primary = 0.0;
        if let Some(p) = &self.inertia {
            let s = InertiaState {
                lowpass: FirstOrderState { x: y[self.inertia_at] },
                washout: FirstOrderState { x: y[self.inertia_at + 1] },
            };
            let lim = p.limits().intersect(&self.bounds);
            let (d, out) = inertia_ctrl_eval(&s, df_meas, p, &lim);
            dy[self.inertia_at] = d.lowpass;
            dy[self.inertia_at + 1] = d.washout;
            p_inertia = out;
        }
        if let Some(p) = &self.droop {
            let s = DroopState {
                lowpass: FirstOrderState { x: y[self.droop_at] },
                lead_lag: FirstOrderState { x: y[self.droop_at + 1] },
            };
            let lim = p.limits().intersect(&self.bounds);
            let (d, out) = droop_ctrl_eval(&s, df_meas, p, &lim);
            dy[self.droop_at] = d.lowpass;
            dy[self.droop_at + 1] = d.lead_lag;
            p_primary = out;
        }
        if let Some(p) = &self.fast_pfc {
            let s = FastPfcState {
                droop: DroopState {
                    lowpass: FirstOrderState { x: y[self.fast_at] },
                    lead_lag: FirstOrderState { x: y[self.fast_at + 1] },
                },
                integral: PiState {
                    integral: y[self.fast_at + 2],
                    frozen: false,
                },
            };
            let lim = p.limits().intersect(&self.bounds);
            let (d, out) = fast_pfc_eval(&s, df_meas, p, &lim);
            dy[self.fast_at] = d.droop.lowpass;
            dy[self.fast_at + 1] = d.droop.lead_lag;
            dy[self.fast_at + 2] = d.integral;
            p_primary = out;
        }
        PlantOutput {
            p_cmd: self.bounds.clamp(p_inertia + p_primary + extra),
            p_inertia,
            p_primary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::rk4_step;
    use proptest::prelude::*;

    fn characterization_inertia() -> InertiaCtrlParams {
        InertiaCtrlParams::default()
    }

    /// Drive one plant open-loop with a prescribed df(t) and return p_cmd at t_end.
    fn drive(plant: &PvPlant, df: impl Fn(f64) -> f64, dt: f64, t_end: f64) -> f64 {
        let ctrl = PlantController::new(plant);
        let mut y = vec![0.0; ctrl.n_states()];
        ctrl.init(df(0.0), &mut y);
        let mut scratch = vec![0.0; ctrl.n_states()];
        for k in 0..(t_end / dt).round() as usize {
            rk4_step(&mut y, k as f64 * dt, dt, |t, s, d| {
                ctrl.eval(s, d, df(t), 0.0);
            });
        }
        ctrl.eval(&y, &mut scratch, df(t_end), 0.0).p_cmd
    }

    fn plant_with(set: ControllerSet, headroom: f64) -> PvPlant {
        PvPlant::new("pv", 100.0, 0.5, headroom).with_controllers(set).with_noise(0.0)
    }

    #[test]
    fn inertia_flat_frequency_is_silent() {
        let p = characterization_inertia();
        let s = InertiaState::at_equilibrium(0.0, &p);
        let (d, out) = inertia_ctrl_eval(&s, 0.0, &p, &p.limits());
        assert_eq!((d.lowpass, d.washout, out), (0.0, 0.0, 0.0));
    }

    #[test]
    fn inertia_steady_output_at_reference_params() {
        // 0.06 Hz/s sustained: 500·0.1·(0.06/60) = 0.05 pu
        let plant = plant_with(
            ControllerSet {
                inertia: Some(InertiaCtrlParams {
                    p_limit: 0.1,
                    ..characterization_inertia()
                }),
                ..Default::default()
            },
            0.1,
        );
        let p = drive(&plant, |t| -0.06 / 60.0 * t, 0.01, 25.0);
        assert!((p - 0.05).abs() / 0.05 < 1e-6, "p = {p}");
    }

    #[test]
    fn inertia_output_clipped_by_limit() {
        let plant = plant_with(
            ControllerSet {
                inertia: Some(InertiaCtrlParams {
                    p_limit: 0.03,
                    ..characterization_inertia()
                }),
                ..Default::default()
            },
            0.05,
        );
        let p = drive(&plant, |t| -0.06 / 60.0 * t, 0.01, 25.0);
        assert_eq!(p, 0.03);
    }

    #[test]
    fn droop_steady_values() {
        for (k_g, expect) in [(20.0, 0.04), (15.0, 0.03)] {
            let plant = plant_with(
                ControllerSet {
                    droop: Some(DroopCtrlParams {
                        db_pu: 0.0,
                        k_g,
                        p_limit: 0.1,
                        ..Default::default()
                    }),
                    ..Default::default()
                },
                0.1,
            );
            let p = drive(&plant, |t| if t > 0.0 { -0.002 } else { 0.0 }, 0.01, 30.0);
            assert!((p - expect).abs() < 1e-9, "k_g {k_g}: {p}");
        }
    }

    #[test]
    fn droop_lead_lag_keeps_steady_value() {
        let plant = plant_with(
            ControllerSet {
                droop: Some(DroopCtrlParams {
                    db_pu: 0.0,
                    k_g: 20.0,
                    p_limit: 0.1,
                    lead_lag: Some(LeadLagParams {
                        t_wowg1_s: 0.5,
                        t_wowg2_s: 2.0,
                    }),
                    ..Default::default()
                }),
                ..Default::default()
            },
            0.1,
        );
        let p = drive(&plant, |t| if t > 0.0 { -0.002 } else { 0.0 }, 0.01, 60.0);
        assert!((p - 0.04).abs() < 1e-8, "{p}");
    }

    #[test]
    fn combined_flat_and_settled() {
        let i = characterization_inertia();
        let d = DroopCtrlParams::default();
        let lim = Limits::symmetric(0.05).unwrap();
        let ((_, _), p) = combined_ctrl_eval(&CombinedState::default(), 0.0, &i, &d, &lim);
        assert_eq!(p, 0.0);

        // After a sustained offset the inertia path washes out and only droop remains.
        let plant = plant_with(
            ControllerSet {
                inertia: Some(i),
                droop: Some(DroopCtrlParams {
                    p_limit: 0.1,
                    ..d
                }),
                ..Default::default()
            },
            0.1,
        );
        let p = drive(&plant, |t| if t > 0.0 { -0.002 } else { 0.0 }, 0.01, 40.0);
        assert!((p - 15.0 * (0.002 - 0.0006)).abs() < 1e-8, "{p}");
    }

    #[test]
    fn agc_ace_and_gating() {
        let ace = area_control_error(-0.1 / 60.0, 0.0, 20.0);
        assert!((ace + 0.033_333_333).abs() < 1e-6);
        let params = AgcParams::default();
        assert_eq!(agc_ctrl_eval(&AgcState::default(), 0.0, &params, 0.05, 30.0), (0.0, 0.0));
        // before enable: silent and frozen
        assert_eq!(agc_ctrl_eval(&AgcState::default(), ace, &params, 0.05, 10.0), (0.0, 0.0));
        let (di, p) = agc_ctrl_eval(&AgcState::default(), ace, &params, 0.05, 30.0);
        assert!(di > 0.0 && p > 0.0);
    }

    #[test]
    fn fast_pfc_integral_ramp_rate() {
        let params = FastPfcParams {
            ki_fast: 2.0,
            ..Default::default()
        };
        let (d, _) = fast_pfc_eval(&FastPfcState::default(), -0.003, &params, &params.limits());
        assert!((d.integral - 2.0 * 0.0024).abs() < 1e-15);
    }

    #[test]
    fn fast_pfc_flat_is_silent_and_in_band_holds() {
        let params = FastPfcParams::default();
        let (d, p) = fast_pfc_eval(&FastPfcState::default(), 0.0, &params, &params.limits());
        assert_eq!((d.integral, p), (0.0, 0.0));

        let s = FastPfcState {
            integral: PiState {
                integral: 0.02,
                frozen: false,
            },
            ..Default::default()
        };
        let (d, _) = fast_pfc_eval(&s, -0.0004, &params, &params.limits());
        assert_eq!(d.integral, 0.0);

        let bleed = FastPfcParams {
            bleed_tau_s: Some(10.0),
            ..params
        };
        let (d, _) = fast_pfc_eval(&s, -0.0004, &bleed, &bleed.limits());
        assert!((d.integral + 0.002).abs() < 1e-15);
    }

    #[test]
    fn fast_pfc_freezes_at_limit() {
        let params = FastPfcParams::default();
        let s = FastPfcState {
            integral: PiState {
                integral: 0.05,
                frozen: false,
            },
            ..Default::default()
        };
        let (d, p) = fast_pfc_eval(&s, -0.01, &params, &params.limits());
        assert_eq!(d.integral, 0.0);
        assert_eq!(p, 0.05);
    }

    #[test]
    fn biased_farms_inside_band_do_not_diverge() {
        let params = FastPfcParams::default();
        let s = FastPfcState::default();
        // settled df = -0.0001; one farm reads an extra +0.0004
        let (a, _) = fast_pfc_eval(&s, -0.0001, &params, &params.limits());
        let (b, _) = fast_pfc_eval(&s, -0.0001 + 0.0004, &params, &params.limits());
        assert_eq!((a.integral, b.integral), (0.0, 0.0));
    }

    #[test]
    fn headroom_examples() {
        let mut plant = PvPlant::new("pv", 100.0, 0.1, 0.05);
        assert_eq!(apply_headroom(0.0, &plant), 0.0);
        assert_eq!(apply_headroom(0.08, &plant), 0.05);
        assert!((apply_headroom(-0.2, &plant) + 0.1).abs() < 1e-15);
        plant.p_base = 0.9;
        plant.p_headroom = 0.2;
        assert!(plant.validate("plants[0]").is_err());
    }

    #[test]
    fn system_base_conversion() {
        assert!((to_system_base(0.05, 6875.0, 68_750.0).unwrap() - 0.005).abs() < 1e-15);
        assert_eq!(to_system_base(0.0, 6875.0, 68_750.0).unwrap(), 0.0);
        assert_eq!(to_system_base(0.37, 500.0, 500.0).unwrap(), 0.37);
        assert!(to_system_base(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn inertia_limit_above_headroom_rejected() {
        let plant = plant_with(
            ControllerSet {
                inertia: Some(InertiaCtrlParams {
                    p_limit: 0.2,
                    ..Default::default()
                }),
                ..Default::default()
            },
            0.1,
        );
        let err = plant.validate("plants[0]").unwrap_err().to_string();
        assert!(err.contains("plants[0].controllers.inertia.p_limit"), "{err}");
    }

    #[test]
    fn droop_and_fast_pfc_are_exclusive() {
        let set = ControllerSet {
            droop: Some(Default::default()),
            fast_pfc: Some(Default::default()),
            ..Default::default()
        };
        assert!(set.validate("c").is_err());
    }

    proptest! {
        #[test]
        fn droop_steady_output_is_monotone(a in -0.01f64..0.01, b in -0.01f64..0.01) {
            let p = DroopCtrlParams { p_limit: 1.0, ..Default::default() };
            // steady state of the low-pass equals its input
            let steady = |df: f64| {
                let s = DroopState::at_equilibrium(df, &p);
                droop_ctrl_eval(&s, df, &p, &p.limits()).1
            };
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(steady(lo) >= steady(hi));
        }

        #[test]
        fn zero_input_neutrality(k_i in 0.0f64..1000.0, k_g in 0.0f64..50.0, ki_fast in 0.0f64..5.0) {
            let plant = plant_with(ControllerSet {
                inertia: Some(InertiaCtrlParams { k_i, ..Default::default() }),
                fast_pfc: Some(FastPfcParams { ki_fast, droop: DroopCtrlParams { k_g, ..Default::default() }, ..Default::default() }),
                ..Default::default()
            }, 0.1);
            let p = drive(&plant, |_| 0.0, 0.05, 5.0);
            prop_assert!(p.abs() <= 1e-12);
        }
    }
}
