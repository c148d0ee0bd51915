//! Grid frequency-response simulation with PV frequency-support controllers.
//!
//! - [`blocks`]: deadband, filters, PI with anti-windup, limiters
//! - [`grid`]: aggregated swing equation, governor/reheat surrogate, tie line
//! - [`pv_control`]: inertia, droop, fast primary and AGC controllers for PV plants
//! - [`simulate`]: fixed-step RK4 engine composing grid and plants
//! - [`analyze`]: metrics, inertia characterization, step compliance, conflict index
//! - [`scenario_io`]: scenario documents, catalog, CSV/JSON output, sweeps

pub mod analyze;
pub mod blocks;
pub mod cli;
pub mod error;
pub mod grid;
pub mod parallel;
pub mod pv_control;
pub mod scenario_io;
pub mod simulate;

pub use error::{Error, Result};
