//! Geometry values, WKT text form, great-circle helpers and planar predicates.
//!
//! Coordinates are always `lon lat` in decimal degrees. Point-to-point distance
//! is great-circle; anything involving segments or rings is computed in a local
//! equirectangular frame centered on the pair being compared.

pub mod planar;
mod predicates;
mod sphere;
mod wkt;

pub use predicates::{contains, intersects, min_distance_m, within_distance};
pub use sphere::{bearing_deg, destination, haversine_km, EARTH_RADIUS_KM};
pub use wkt::{parse_wkt, serialize_wkt};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("WKT syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("coordinate out of range: lon {lon}, lat {lat}")]
    OutOfRange { lon: f64, lat: f64 },
    #[error("unclosed ring")]
    UnclosedRing,
    #[error("{kind} needs at least {min} points, got {got}")]
    TooFewPoints { kind: &'static str, min: usize, got: usize },
    #[error("ring self-intersects between segments {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("repeated consecutive vertex at index {0}")]
    RepeatedVertex(usize),
    #[error("bearing between coincident points is undefined")]
    CoincidentPoints,
}

/// A longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self, GeoError> {
        let ok = lon.is_finite() && lat.is_finite() && (-180.0..=180.0).contains(&lon) && (-90.0..=90.0).contains(&lat);
        if ok {
            Ok(GeoPoint { lon, lat })
        } else {
            Err(GeoError::OutOfRange { lon, lat })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(GeoPoint),
    LineString(Vec<GeoPoint>),
    Polygon { exterior: Vec<GeoPoint>, holes: Vec<Vec<GeoPoint>> },
}

impl Geometry {
    pub fn line_string(points: Vec<GeoPoint>) -> Result<Self, GeoError> {
        if points.len() < 2 {
            return Err(GeoError::TooFewPoints { kind: "LINESTRING", min: 2, got: points.len() });
        }
        Ok(Geometry::LineString(points))
    }

    /// Validated polygon: every ring closed, at least 4 points and simple.
    pub fn polygon(exterior: Vec<GeoPoint>, holes: Vec<Vec<GeoPoint>>) -> Result<Self, GeoError> {
        check_ring(&exterior)?;
        for h in &holes {
            check_ring(h)?;
        }
        Ok(Geometry::Polygon { exterior, holes })
    }

    /// All vertices, rings included in order.
    pub fn vertices(&self) -> Vec<GeoPoint> {
        match self {
            Geometry::Point(p) => vec![*p],
            Geometry::LineString(ps) => ps.clone(),
            Geometry::Polygon { exterior, holes } => {
                exterior.iter().chain(holes.iter().flatten()).copied().collect()
            }
        }
    }

    /// Vertex mean; for closed rings the repeated closing vertex is skipped.
    pub fn centroid(&self) -> GeoPoint {
        let pts: &[GeoPoint] = match self {
            Geometry::Point(p) => std::slice::from_ref(p),
            Geometry::LineString(ps) => ps,
            Geometry::Polygon { exterior, .. } => &exterior[..exterior.len() - 1],
        };
        let n = pts.len() as f64;
        GeoPoint {
            lon: pts.iter().map(|p| p.lon).sum::<f64>() / n,
            lat: pts.iter().map(|p| p.lat).sum::<f64>() / n,
        }
    }
}

fn check_ring(ring: &[GeoPoint]) -> Result<(), GeoError> {
    if ring.len() < 4 {
        if ring.len() >= 2 && ring.first() != ring.last() {
            return Err(GeoError::UnclosedRing);
        }
        return Err(GeoError::TooFewPoints { kind: "POLYGON ring", min: 4, got: ring.len() });
    }
    if ring.first() != ring.last() {
        return Err(GeoError::UnclosedRing);
    }
    for i in 1..ring.len() {
        if ring[i] == ring[i - 1] {
            return Err(GeoError::RepeatedVertex(i));
        }
    }
    let pts: Vec<[f64; 2]> = ring.iter().map(|p| [p.lon, p.lat]).collect();
    let n = pts.len() - 1;
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b, c, d) = (pts[i], pts[i + 1], pts[j], pts[j + 1]);
            let hit = if adjacent {
                // neighbours share one vertex; they may only overlap if they fold back
                planar::collinear_overlap(a, b, c, d)
            } else {
                planar::segments_intersect(a, b, c, d)
            };
            if hit {
                return Err(GeoError::SelfIntersection(i, j));
            }
        }
    }
    Ok(())
}
