//! Hurricane tracks, parametric wind field and the turbine shutdown protocol.

mod hurdat;
mod sim;

pub use hurdat::{emit_hurdat2, find_track, interpolate, parse_hurdat2, StormHeader, Track, TrackRecord};
pub use sim::{
    run_simulation, step, write_delta_log, write_timeline_csv, PhaseSummary, Snapshot, StepOutput, Timeline,
    TurbineState, TurbineStatus, CSV_HEADER,
};

use chrono::{DateTime, Utc};

use crate::geo::GeoPoint;
use crate::rules::RuleError;

pub const KNOT_TO_MS: f64 = 0.514444;
pub const MS_TO_MPH: f64 = 2.23694;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StormError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("storm {id}: header declares {declared} records, found {found}")]
    CountMismatch { id: String, declared: usize, found: usize },
    #[error("line {line}: timestamp {time} does not increase")]
    NonMonotonic { line: usize, time: String },
    #[error("no storm with id {0}")]
    UnknownStorm(String),
    #[error("time {time} outside track span {start} .. {end}")]
    OutOfSpan { time: String, start: String, end: String },
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("turbine {0} has no point geometry")]
    MissingGeometry(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rules(#[from] RuleError),
}

/// Interpolated storm center and intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StormState {
    pub time: DateTime<Utc>,
    pub position: GeoPoint,
    /// Maximum sustained wind, m/s.
    pub vmax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub hub_height: f64,
    pub ref_height: f64,
    pub cutout: f64,
    pub holland_b: f64,
    pub rmax_km: f64,
    pub shear_alpha: f64,
    pub proximity_km: f64,
    pub timestep_min: i64,
    /// Stay parked until hub wind drops below `cutout - 2`.
    pub hysteresis: bool,
    /// Rotate wind direction 90° clockwise from the radial bearing.
    pub cyclonic_offset: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            hub_height: 150.0,
            ref_height: 10.0,
            cutout: 25.0,
            holland_b: 1.5,
            rmax_km: 50.0,
            shear_alpha: 0.11,
            proximity_km: 500.0,
            timestep_min: 30,
            hysteresis: false,
            cyclonic_offset: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), StormError> {
        let positive = [
            ("hub_height", self.hub_height),
            ("ref_height", self.ref_height),
            ("cutout", self.cutout),
            ("holland_b", self.holland_b),
            ("rmax_km", self.rmax_km),
            ("proximity_km", self.proximity_km),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(StormError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.shear_alpha > 0.0 && self.shear_alpha < 1.0) {
            return Err(StormError::Config(format!("shear_alpha must be in (0, 1), got {}", self.shear_alpha)));
        }
        if self.timestep_min <= 0 {
            return Err(StormError::Config(format!("timestep must be positive, got {}", self.timestep_min)));
        }
        Ok(())
    }
}

/// Holland radial profile: surface wind (m/s) at `r_km` from the center.
pub fn holland_speed(vmax: f64, rmax_km: f64, b: f64, r_km: f64) -> Result<f64, StormError> {
    if r_km <= 0.0 || r_km.is_nan() {
        return Err(StormError::NonPositiveRadius(r_km));
    }
    let x = (rmax_km / r_km).powf(b);
    Ok((vmax * vmax * x * (1.0 - x).exp()).sqrt())
}

/// Power-law shear from `h_ref` to `h_hub`.
pub fn hub_adjust(v_ref: f64, h_hub: f64, h_ref: f64, alpha: f64) -> f64 {
    v_ref * (h_hub / h_ref).powf(alpha)
}
