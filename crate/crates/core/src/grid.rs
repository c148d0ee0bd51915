//! Aggregated system frequency dynamics.
//!
//! All powers are per unit on the system capacity base `c_system_mva` and the
//! frequency state is the per-unit deviation from nominal. The synchronous
//! fleet is one equivalent machine with a governor and a reheat turbine;
//! renewable penetration displaces a proportional share of both its inertia
//! and its governor capacity.

use serde::{Deserialize, Serialize};

use crate::blocks::{deadband_apply, limiter, lowpass_derivative, Deadband, FirstOrderState};
use crate::error::{check, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GovernorParams {
    /// Droop on the fleet's own base, e.g. 0.05 for 5%.
    pub droop_r: f64,
    pub t_gov_s: f64,
    pub t_reheat_s: f64,
    /// High-pressure turbine fraction.
    pub f_hp: f64,
    pub deadband_hz: f64,
    /// Upward (and downward) headroom of the responsive fleet, pu on system base.
    pub p_max: f64,
}

impl Default for GovernorParams {
    fn default() -> Self {
        Self {
            droop_r: 0.05,
            t_gov_s: 0.5,
            t_reheat_s: 7.0,
            f_hp: 0.3,
            deadband_hz: 0.036,
            p_max: 0.10,
        }
    }
}

impl GovernorParams {
    /// A fleet that never moves: no headroom.
    pub fn disabled() -> Self {
        Self {
            p_max: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        check::positive(&format!("{path}.droop_r"), self.droop_r)?;
        check::positive(&format!("{path}.t_gov_s"), self.t_gov_s)?;
        check::positive(&format!("{path}.t_reheat_s"), self.t_reheat_s)?;
        check::in_range(&format!("{path}.f_hp"), self.f_hp, 0.0, 1.0)?;
        check::non_negative(&format!("{path}.deadband_hz"), self.deadband_hz)?;
        check::non_negative(&format!("{path}.p_max"), self.p_max)?;
        Ok(())
    }

    /// Fleet capacity scaled by `factor`: gain `1/R` and headroom both shrink.
    pub fn scaled(&self, factor: f64) -> GovernorParams {
        GovernorParams {
            droop_r: self.droop_r / factor,
            p_max: self.p_max * factor,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridParams {
    pub f_nominal_hz: f64,
    pub c_system_mva: f64,
    /// Inertia constant of the synchronous fleet at 0% renewables, on `c_system_mva`.
    pub h_base_s: f64,
    /// Load damping, pu power per pu frequency.
    pub damping: f64,
    /// Renewable fraction in [0, 1).
    pub penetration: f64,
    pub governor: GovernorParams,
    pub ufls_hz: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            f_nominal_hz: 60.0,
            // 2.75 GW is exactly 0.04 pu on this base.
            c_system_mva: 68_750.0,
            h_base_s: 5.0,
            damping: 1.0,
            penetration: 0.0,
            governor: GovernorParams::default(),
            ufls_hz: 59.3,
        }
    }
}

impl GridParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::positive(&format!("{path}.f_nominal_hz"), self.f_nominal_hz)?;
        check::positive(&format!("{path}.c_system_mva"), self.c_system_mva)?;
        check::positive(&format!("{path}.h_base_s"), self.h_base_s)?;
        check::non_negative(&format!("{path}.damping"), self.damping)?;
        let pen = format!("{path}.penetration");
        check::finite(&pen, self.penetration)?;
        if !(0.0..1.0).contains(&self.penetration) {
            return Err(Error::invalid(
                pen,
                format!("must lie in [0, 1), got {}", self.penetration),
            ));
        }
        check::positive(&format!("{path}.ufls_hz"), self.ufls_hz)?;
        self.governor.validate(&format!("{path}.governor"))
    }

    /// Share of synchronous capacity left after displacement.
    pub fn synchronous_share(&self) -> f64 {
        1.0 - self.penetration
    }

    /// Governor parameters of the displaced fleet, expressed on the system base.
    pub fn effective_governor(&self) -> GovernorParams {
        self.governor.scaled(self.synchronous_share())
    }

    pub fn hz_to_pu(&self, hz: f64) -> f64 {
        hz / self.f_nominal_hz
    }

    pub fn pu_to_hz(&self, pu: f64) -> f64 {
        pu * self.f_nominal_hz
    }
}

/// Optional coupling between area A (index 0) and area B (index 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieLine {
    /// Synchronizing coefficient, pu power per (pu frequency · s).
    pub t_tie: f64,
    #[serde(default)]
    pub scheduled_flow: f64,
}

impl TieLine {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::positive(&format!("{path}.t_tie"), self.t_tie)?;
        check::finite(&format!("{path}.scheduled_flow"), self.scheduled_flow)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyEvent {
    pub t_event: f64,
    /// Power step on the system base; negative is a generation loss.
    pub delta_p: f64,
    #[serde(default)]
    pub area: usize,
}

impl ContingencyEvent {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::non_negative(&format!("{path}.t_event"), self.t_event)?;
        check::finite(&format!("{path}.delta_p"), self.delta_p)
    }
}

/// Initial RoCoF (Hz/s) produced by an imbalance of `p_imbalance_mw`.
pub fn rocof_eq1(p_imbalance_mw: f64, c_system_mva: f64, h_system_s: f64, f_n: f64) -> Result<f64> {
    check::positive("c_system", c_system_mva)?;
    check::positive("h_system", h_system_s)?;
    check::positive("f_n", f_n)?;
    check::finite("p_imbalance", p_imbalance_mw)?;
    Ok(p_imbalance_mw / c_system_mva / (2.0 * h_system_s) * f_n)
}

/// `H_base · (1 − penetration)`.
pub fn effective_inertia(params: &GridParams) -> Result<f64> {
    check::positive("grid.h_base_s", params.h_base_s)?;
    check::finite("grid.penetration", params.penetration)?;
    if !(0.0..1.0).contains(&params.penetration) {
        return Err(Error::invalid(
            "grid.penetration",
            format!("must lie in [0, 1), got {}", params.penetration),
        ));
    }
    Ok(params.h_base_s * params.synchronous_share())
}

/// `d(df)/dt` for a given effective inertia. `net_power` includes every
/// injection (governor, PV, events, tie import).
#[inline]
pub fn swing_rate(df: f64, net_power: f64, damping: f64, h_eff: f64) -> f64 {
    (net_power - damping * df) / (2.0 * h_eff)
}

pub fn swing_derivative(df: f64, p_mech: f64, p_pv: f64, p_event: f64, params: &GridParams) -> f64 {
    let h_eff = params.h_base_s * params.synchronous_share();
    swing_rate(df, p_mech + p_pv + p_event, params.damping, h_eff)
}

/// Valve stage and reheat stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GovernorState {
    pub valve: FirstOrderState,
    pub reheat: FirstOrderState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernorEval {
    pub d_valve: f64,
    pub d_reheat: f64,
    pub p_mech: f64,
}

/// Droop governor feeding a reheat turbine `(1 + F_hp·T_rh·s)/(1 + T_rh·s)`.
///
/// `df` is in pu; the deadband is converted from Hz with `f_n`.
pub fn governor_derivatives(
    state: &GovernorState,
    df: f64,
    params: &GovernorParams,
    f_n: f64,
) -> GovernorEval {
    let db = Deadband {
        half_width: params.deadband_hz / f_n,
        ..Deadband::NONE
    };
    let command = limiter(deadband_apply(-df, &db) / params.droop_r, -params.p_max, params.p_max);
    let d_valve = lowpass_derivative(&state.valve, command, params.t_gov_s);
    let d_reheat = lowpass_derivative(&state.reheat, state.valve.x, params.t_reheat_s);
    let p_mech = params.f_hp * state.valve.x + (1.0 - params.f_hp) * state.reheat.x;
    GovernorEval {
        d_valve,
        d_reheat,
        p_mech,
    }
}

/// Positive `dp_tie` is export from area A to area B.
#[inline]
pub fn tie_line_derivative(_dp_tie: f64, df_a: f64, df_b: f64, tie: &TieLine) -> f64 {
    tie.t_tie * (df_a - df_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::rk4_step;

    #[test]
    fn rocof_eq1_rcc_trip() {
        let r = rocof_eq1(2750.0, 68_750.0, 5.0, 60.0).unwrap();
        assert!((r - 0.24).abs() < 1e-12);
        assert_eq!(rocof_eq1(0.0, 68_750.0, 5.0, 60.0).unwrap(), 0.0);
        let r2 = rocof_eq1(1234.0, 50_000.0, 8.0, 50.0).unwrap();
        let r1 = rocof_eq1(1234.0, 50_000.0, 4.0, 50.0).unwrap();
        assert!((r1 - 2.0 * r2).abs() < 1e-15);
    }

    #[test]
    fn rocof_eq1_rejects_nonpositive_bases() {
        assert!(rocof_eq1(1.0, 0.0, 5.0, 60.0).is_err());
        assert!(rocof_eq1(1.0, 1.0, -5.0, 60.0).is_err());
        assert!(rocof_eq1(1.0, 1.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn effective_inertia_scaling() {
        let mut g = GridParams::default();
        assert_eq!(effective_inertia(&g).unwrap(), 5.0);
        g.penetration = 0.4;
        assert!((effective_inertia(&g).unwrap() - 3.0).abs() < 1e-12);
        g.penetration = 0.999;
        assert!((effective_inertia(&g).unwrap() - 0.005).abs() < 1e-12);
        g.penetration = 1.0;
        assert!(effective_inertia(&g).is_err());
    }

    #[test]
    fn penetration_scales_governor_capacity() {
        let g = GridParams {
            penetration: 0.4,
            ..GridParams::default()
        };
        let eff = g.effective_governor();
        assert!((1.0 / eff.droop_r - 12.0).abs() < 1e-12);
        assert!((eff.p_max - 0.06).abs() < 1e-12);
    }

    #[test]
    fn swing_derivative_matches_initial_rocof() {
        let g = GridParams {
            damping: 0.0,
            ..GridParams::default()
        };
        let d = swing_derivative(0.0, 0.0, 0.0, -0.04, &g);
        assert!((d + 0.004).abs() < 1e-15);
        assert!((g.pu_to_hz(d) + 0.24).abs() < 1e-12);
        assert_eq!(swing_derivative(0.0, 0.0, 0.0, 0.0, &g), 0.0);
    }

    #[test]
    fn damped_equilibrium() {
        let g = GridParams {
            damping: 1.0,
            ..GridParams::default()
        };
        assert!(swing_derivative(-0.04, 0.0, 0.0, -0.04, &g).abs() < 1e-15);
    }

    fn settle_governor(df: f64, params: &GovernorParams, t_end: f64) -> f64 {
        let dt = 0.01;
        let mut y = [0.0, 0.0];
        for k in 0..(t_end / dt) as usize {
            rk4_step(&mut y, k as f64 * dt, dt, |_, s, d| {
                let st = GovernorState {
                    valve: FirstOrderState { x: s[0] },
                    reheat: FirstOrderState { x: s[1] },
                };
                let e = governor_derivatives(&st, df, params, 60.0);
                d[0] = e.d_valve;
                d[1] = e.d_reheat;
            });
        }
        let st = GovernorState {
            valve: FirstOrderState { x: y[0] },
            reheat: FirstOrderState { x: y[1] },
        };
        governor_derivatives(&st, df, params, 60.0).p_mech
    }

    #[test]
    fn governor_at_rest() {
        let e = governor_derivatives(&GovernorState::default(), 0.0, &GovernorParams::default(), 60.0);
        assert_eq!((e.d_valve, e.d_reheat, e.p_mech), (0.0, 0.0, 0.0));
    }

    #[test]
    fn governor_droop_steady_state() {
        let p = GovernorParams {
            deadband_hz: 0.0,
            p_max: 0.2,
            ..GovernorParams::default()
        };
        let horizon = 20.0 * (p.t_gov_s + p.t_reheat_s);
        let pm = settle_governor(-0.005, &p, horizon);
        assert!((pm - 0.10).abs() / 0.10 < 1e-3, "p_mech {pm}");

        // clamps at p_max when smaller than the droop demand
        let p = GovernorParams {
            deadband_hz: 0.0,
            p_max: 0.06,
            ..GovernorParams::default()
        };
        let pm = settle_governor(-0.005, &p, horizon);
        assert!((pm - 0.06).abs() < 1e-6);
    }

    #[test]
    fn governor_deadband_holds_still() {
        let pm = settle_governor(-0.0004, &GovernorParams::default(), 50.0);
        assert_eq!(pm, 0.0);
    }

    #[test]
    fn tie_line_examples() {
        let tie = TieLine {
            t_tie: 2.0,
            scheduled_flow: 0.0,
        };
        assert_eq!(tie_line_derivative(0.0, 0.001, 0.001, &tie), 0.0);
        assert!((tie_line_derivative(0.0, 0.001, 0.0, &tie) - 0.002).abs() < 1e-15);
        // higher-frequency area A increases its export
        assert!(tie_line_derivative(0.0, 0.002, -0.001, &tie) > 0.0);
    }

    #[test]
    fn grid_validation_names_field() {
        let g = GridParams {
            penetration: 1.2,
            ..GridParams::default()
        };
        let err = g.validate("grid").unwrap_err().to_string();
        assert!(err.contains("grid.penetration"), "{err}");
    }
}
