//! Turbine layouts: wake-aware energy yield, constraint penalties, the
//! gradient optimizer and layout comparison.
//!
//! Positions are meters east/north of the layout anchor. Wind directions are
//! meteorological: degrees clockwise from north that the wind blows *from*.

mod grid;
mod io;
mod optimize;
mod stats;
mod wake;

pub use grid::generate_grid_layout;
pub use io::{layout_to_graph, read_layout_csv, write_deviation_csv, write_layout_csv, write_trace_csv, TRACE_HEADER};
pub use optimize::{optimize, penalties, project_feasible, Boundary, OptConfig, OptResult, TraceRow};
pub use stats::{row_deviation_stats, DeviationReport, RowDeviation};
pub use wake::{aep, aep_gradient, aep_sectors, effective_speed, power, wake_deficit, QUADRATURE_POINTS};

use std::collections::HashSet;

use crate::geo::planar::{LocalFrame, Xy};
use crate::geo::{GeoError, GeoPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("{positions} positions but {ids} ids")]
    CountMismatch { positions: usize, ids: usize },
    #[error("duplicate turbine id `{0}`")]
    DuplicateId(String),
    #[error("row assignment has {rows} entries for {turbines} turbines")]
    RowMismatch { rows: usize, turbines: usize },
    #[error("invalid turbine spec: {0}")]
    Spec(String),
    #[error("invalid wind rose: {0}")]
    Rose(String),
    #[error("invalid optimizer config: {0}")]
    Config(String),
    #[error("boundary must be a polygon")]
    NotPolygon,
    #[error("boundary cannot hold {count} turbines in {rows} rows at {spacing} m spacing")]
    BoundaryTooSmall { count: usize, rows: usize, spacing: f64 },
    #[error("layouts differ in size: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("layout csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

/// Thrust coefficient as a function of hub wind speed.
#[derive(Debug, Clone, PartialEq)]
pub enum CtCurve {
    /// `ct` up to rated speed, then `ct * (rated / ws)^3`.
    Default { ct: f64 },
    /// `(ws, ct)` pairs with increasing speed, linearly interpolated and clamped at the ends.
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurbineSpec {
    /// Meters.
    pub rotor_diameter: f64,
    /// Meters.
    pub hub_height: f64,
    /// Watts.
    pub rated_power: f64,
    pub cut_in: f64,
    pub rated_speed: f64,
    pub cut_out: f64,
    pub ct: CtCurve,
    /// Wake growth rate `k*`.
    pub wake_expansion: f64,
}

impl TurbineSpec {
    /// 15 MW offshore reference machine.
    pub fn iea_15mw() -> Self {
        TurbineSpec {
            rotor_diameter: 240.0,
            hub_height: 150.0,
            rated_power: 15.0e6,
            cut_in: 3.0,
            rated_speed: 10.59,
            cut_out: 25.0,
            ct: CtCurve::Default { ct: 0.8 },
            wake_expansion: 0.04,
        }
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        let err = |m: String| Err(LayoutError::Spec(m));
        if !(self.rotor_diameter > 0.0 && self.hub_height > 0.0 && self.rated_power > 0.0) {
            return err("diameter, hub height and rated power must be positive".into());
        }
        if !(0.0 <= self.cut_in && self.cut_in < self.rated_speed && self.rated_speed < self.cut_out) {
            return err(format!(
                "need cut_in < rated_speed < cut_out, got {} / {} / {}",
                self.cut_in, self.rated_speed, self.cut_out
            ));
        }
        if !(self.wake_expansion > 0.0) {
            return err(format!("wake expansion must be positive, got {}", self.wake_expansion));
        }
        let in_range = |c: f64| c > 0.0 && c < 1.0;
        match &self.ct {
            CtCurve::Default { ct } if !in_range(*ct) => err(format!("thrust coefficient {ct} outside (0, 1)")),
            CtCurve::Table(t) if t.is_empty() => err("empty thrust table".into()),
            CtCurve::Table(t) if t.iter().any(|&(_, c)| !in_range(c)) => {
                err("thrust table values must lie in (0, 1)".into())
            }
            CtCurve::Table(t) if t.windows(2).any(|w| w[1].0 <= w[0].0) => {
                err("thrust table speeds must increase".into())
            }
            _ => Ok(()),
        }
    }

    pub fn thrust_coefficient(&self, ws: f64) -> f64 {
        match &self.ct {
            CtCurve::Default { ct } if ws <= self.rated_speed => *ct,
            CtCurve::Default { ct } => ct * (self.rated_speed / ws).powi(3),
            CtCurve::Table(t) => {
                let k = t.partition_point(|&(u, _)| u <= ws);
                if k == 0 {
                    t[0].1
                } else if k == t.len() {
                    t[k - 1].1
                } else {
                    let ((u0, c0), (u1, c1)) = (t[k - 1], t[k]);
                    c0 + (ws - u0) / (u1 - u0) * (c1 - c0)
                }
            }
        }
    }
}

impl Default for TurbineSpec {
    fn default() -> Self {
        Self::iea_15mw()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    /// Center direction, degrees.
    pub direction: f64,
    pub probability: f64,
    pub weibull_k: f64,
    /// Weibull scale, m/s.
    pub weibull_a: f64,
}

impl Sector {
    pub fn weibull_pdf(&self, ws: f64) -> f64 {
        if ws < 0.0 {
            return 0.0;
        }
        let (k, a) = (self.weibull_k, self.weibull_a);
        let z = ws / a;
        k / a * z.powf(k - 1.0) * (-z.powf(k)).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindRose {
    sectors: Vec<Sector>,
}

impl WindRose {
    pub const SECTORS: usize = 24;

    pub fn new(sectors: Vec<Sector>) -> Result<Self, LayoutError> {
        if sectors.len() != Self::SECTORS {
            return Err(LayoutError::Rose(format!("expected {} sectors, got {}", Self::SECTORS, sectors.len())));
        }
        let total: f64 = sectors.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(LayoutError::Rose(format!("probabilities sum to {total}")));
        }
        if sectors.iter().any(|s| !(s.probability >= 0.0 && s.weibull_k > 0.0 && s.weibull_a > 0.0)) {
            return Err(LayoutError::Rose("negative probability or non-positive Weibull parameter".into()));
        }
        Ok(WindRose { sectors })
    }

    /// Equal-probability sectors with shared Weibull parameters.
    pub fn uniform(weibull_k: f64, weibull_a: f64) -> Result<Self, LayoutError> {
        let n = Self::SECTORS;
        Self::new(
            (0..n)
                .map(|i| Sector {
                    direction: i as f64 * 360.0 / n as f64,
                    probability: 1.0 / n as f64,
                    weibull_k,
                    weibull_a,
                })
                .collect(),
        )
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }
}

impl Default for WindRose {
    fn default() -> Self {
        Self::uniform(2.5, 8.0).expect("uniform rose is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub anchor: GeoPoint,
    pub positions: Vec<Xy>,
    pub ids: Vec<String>,
    /// Optional row number per turbine, starting at 1.
    pub rows: Option<Vec<usize>>,
}

impl Layout {
    pub fn new(anchor: GeoPoint, positions: Vec<Xy>, ids: Vec<String>) -> Result<Self, LayoutError> {
        if positions.len() != ids.len() {
            return Err(LayoutError::CountMismatch { positions: positions.len(), ids: ids.len() });
        }
        let mut seen = HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(LayoutError::DuplicateId(id.clone()));
            }
        }
        Ok(Layout { anchor, positions, ids, rows: None })
    }

    pub fn with_rows(mut self, rows: Vec<usize>) -> Result<Self, LayoutError> {
        if rows.len() != self.positions.len() {
            return Err(LayoutError::RowMismatch { rows: rows.len(), turbines: self.positions.len() });
        }
        self.rows = Some(rows);
        Ok(self)
    }

    /// Ids `Turbine1..N` in position order.
    pub fn numbered(anchor: GeoPoint, positions: Vec<Xy>) -> Self {
        let ids = (1..=positions.len()).map(|i| format!("Turbine{i}")).collect();
        Layout { anchor, positions, ids, rows: None }
    }

    pub fn from_geo(anchor: GeoPoint, points: &[GeoPoint], ids: Vec<String>) -> Result<Self, LayoutError> {
        let frame = LocalFrame::new(anchor);
        Self::new(anchor, points.iter().map(|p| frame.to_xy(*p)).collect(), ids)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn frame(&self) -> LocalFrame {
        LocalFrame::new(self.anchor)
    }

    pub fn geo_positions(&self) -> Vec<GeoPoint> {
        let frame = self.frame();
        self.positions.iter().map(|&p| frame.to_geo(p)).collect()
    }

    /// The same turbines expressed relative to another anchor.
    pub fn reanchored(&self, anchor: GeoPoint) -> Layout {
        if anchor == self.anchor {
            return self.clone();
        }
        let to = LocalFrame::new(anchor);
        Layout {
            anchor,
            positions: self.geo_positions().into_iter().map(|p| to.to_xy(p)).collect(),
            ids: self.ids.clone(),
            rows: self.rows.clone(),
        }
    }

    /// Smallest pairwise planar distance, or infinity for fewer than two turbines.
    pub fn min_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                best = best.min(crate::geo::planar::dist(*a, *b));
            }
        }
        best
    }
}
