//! Continuous-time signal blocks.
//!
//! Every dynamic block is a pair of explicit state and a pure function that
//! returns the state derivative together with the block output, so any
//! fixed-step integrator can advance a cascade of them. Time constants are
//! validated when the owning parameter struct is validated; the functions
//! here only `debug_assert!` them.
//!
//! Block states initialize to the equilibrium of the pre-event input (see
//! [`FirstOrderState::at_equilibrium`]), which makes the output at t = 0
//! exactly zero for a flat-frequency input.

use serde::{Deserialize, Serialize};

use crate::error::{check, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeadbandKind {
    /// Output is offset by the band edge, so it is continuous in `u`.
    #[default]
    Offset,
    /// Output jumps to `u` at the band edge.
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deadband {
    pub half_width: f64,
    #[serde(default)]
    pub kind: DeadbandKind,
}

impl Deadband {
    pub const NONE: Deadband = Deadband {
        half_width: 0.0,
        kind: DeadbandKind::Offset,
    };

    pub fn new(half_width: f64) -> Result<Self> {
        Self::with_kind(half_width, DeadbandKind::Offset)
    }

    pub fn with_kind(half_width: f64, kind: DeadbandKind) -> Result<Self> {
        check::non_negative("half_width", half_width)?;
        Ok(Self { half_width, kind })
    }

    #[inline]
    pub fn apply(&self, u: f64) -> f64 {
        deadband_apply(u, self)
    }
}

#[inline]
pub fn deadband_apply(u: f64, db: &Deadband) -> f64 {
    debug_assert!(db.half_width >= 0.0);
    if u.abs() <= db.half_width {
        return 0.0;
    }
    match db.kind {
        DeadbandKind::Offset => u - db.half_width.copysign(u),
        DeadbandKind::Step => u,
    }
}

/// Internal state of a first-order low-pass or washout block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FirstOrderState {
    pub x: f64,
}

impl FirstOrderState {
    /// Both realizations sit at equilibrium when the state equals the input.
    pub fn at_equilibrium(u: f64) -> Self {
        Self { x: u }
    }
}

/// `1 / (1 + sT)`. The block output is the state itself.
#[inline]
pub fn lowpass_derivative(state: &FirstOrderState, u: f64, tau: f64) -> f64 {
    debug_assert!(tau > 0.0);
    (u - state.x) / tau
}

/// `sT / (1 + sT)`, returned as `(dx/dt, y)`.
///
/// A ramp input of slope `m` settles to `y = m·T`, which is what turns a
/// filtered frequency signal into a band-limited derivative.
#[inline]
pub fn washout_output(state: &FirstOrderState, u: f64, tau: f64) -> (f64, f64) {
    debug_assert!(tau > 0.0);
    let y = u - state.x;
    (y / tau, y)
}

/// `(1 + s·T_lead) / (1 + s·T_lag)` with unit DC gain, returned as `(dx/dt, y)`.
#[inline]
pub fn leadlag_output(state: &FirstOrderState, u: f64, t_lead: f64, t_lag: f64) -> (f64, f64) {
    debug_assert!(t_lag > 0.0 && t_lead >= 0.0);
    let dx = (u - state.x) / t_lag;
    (dx, state.x + t_lead * dx)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PiState {
    pub integral: f64,
    /// Whether the last evaluation froze the integrator.
    pub frozen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
    pub limit: f64,
}

impl PiGains {
    pub fn new(kp: f64, ki: f64, limit: f64) -> Result<Self> {
        check::non_negative("kp", kp)?;
        check::non_negative("ki", ki)?;
        check::positive("limit", limit)?;
        Ok(Self { kp, ki, limit })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiOutput {
    pub d_integral: f64,
    pub y: f64,
    pub frozen: bool,
}

/// PI with conditional-integration anti-windup.
///
/// The integrator stops whenever the output (or the integral itself) sits on
/// a limit and `ki·e` would push it further past that limit.
pub fn pi_update(state: &PiState, e: f64, gains: &PiGains) -> PiOutput {
    let raw = gains.kp * e + state.integral;
    let y = limiter(raw, -gains.limit, gains.limit);
    let rate = gains.ki * e;
    let high = raw >= gains.limit || state.integral >= gains.limit;
    let low = raw <= -gains.limit || state.integral <= -gains.limit;
    let frozen = (high && rate > 0.0) || (low && rate < 0.0);
    PiOutput {
        d_integral: if frozen { 0.0 } else { rate },
        y,
        frozen,
    }
}

/// Clamp to `[lo, hi]`. Callers validate `lo <= hi` at configuration time.
#[inline]
pub fn limiter(u: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi, "limiter bounds inverted: {lo} > {hi}");
    u.max(lo).min(hi)
}

/// Validated `[lo, hi]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub lo: f64,
    pub hi: f64,
}

impl Limits {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        check::finite("lo", lo)?;
        check::finite("hi", hi)?;
        if lo > hi {
            return Err(crate::Error::invalid(
                "limits",
                format!("lower bound {lo} exceeds upper bound {hi}"),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(limit: f64) -> Result<Self> {
        Self::new(-limit, limit)
    }

    pub fn intersect(&self, other: &Limits) -> Limits {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        // Disjoint intervals collapse to the point nearest zero.
        if lo > hi {
            let p = limiter(0.0, hi, lo);
            Limits { lo: p, hi: p }
        } else {
            Limits { lo, hi }
        }
    }

    #[inline]
    pub fn clamp(&self, u: f64) -> f64 {
        limiter(u, self.lo, self.hi)
    }

    /// True when `u` lies on or beyond the upper bound.
    #[inline]
    pub fn at_high(&self, u: f64) -> bool {
        u >= self.hi
    }

    #[inline]
    pub fn at_low(&self, u: f64) -> bool {
        u <= self.lo
    }
}
