//! Planar helpers on `[x, y]` pairs and the local equirectangular frame.

use super::{GeoPoint, EARTH_RADIUS_KM};

pub type Xy = [f64; 2];

const R_M: f64 = EARTH_RADIUS_KM * 1000.0;

/// Meters east/north of an origin, using the origin latitude for the longitude scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub origin: GeoPoint,
    kx: f64,
}

impl LocalFrame {
    pub fn new(origin: GeoPoint) -> Self {
        LocalFrame { origin, kx: R_M * origin.lat.to_radians().cos() * std::f64::consts::PI / 180.0 }
    }

    pub fn to_xy(&self, p: GeoPoint) -> Xy {
        let ky = R_M * std::f64::consts::PI / 180.0;
        [(p.lon - self.origin.lon) * self.kx, (p.lat - self.origin.lat) * ky]
    }

    pub fn to_geo(&self, xy: Xy) -> GeoPoint {
        let ky = R_M * std::f64::consts::PI / 180.0;
        GeoPoint { lon: self.origin.lon + xy[0] / self.kx, lat: self.origin.lat + xy[1] / ky }
    }
}

fn sub(a: Xy, b: Xy) -> Xy {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Xy, b: Xy) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Xy, b: Xy) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn dist(a: Xy, b: Xy) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sign of the turn a→b→c, with near-collinear triples reported as 0.
fn orient(a: Xy, b: Xy, c: Xy) -> i8 {
    let (u, v) = (sub(b, a), sub(c, a));
    let x = cross(u, v);
    let scale = dot(u, u).sqrt() * dot(v, v).sqrt();
    if x.abs() <= 1e-12 * scale {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

fn in_box(a: Xy, b: Xy, p: Xy) -> bool {
    let eps = 1e-12 * (1.0 + a[0].abs().max(a[1].abs()).max(b[0].abs()).max(b[1].abs()));
    p[0] >= a[0].min(b[0]) - eps
        && p[0] <= a[0].max(b[0]) + eps
        && p[1] >= a[1].min(b[1]) - eps
        && p[1] <= a[1].max(b[1]) + eps
}

pub fn on_segment(p: Xy, a: Xy, b: Xy) -> bool {
    if a == b {
        return p == a;
    }
    orient(a, b, p) == 0 && in_box(a, b, p)
}

/// Closed-segment intersection; touching endpoints count.
pub fn segments_intersect(a: Xy, b: Xy, c: Xy, d: Xy) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Interiors cross at a single point that is not an endpoint of either segment.
pub fn segments_cross_properly(a: Xy, b: Xy, c: Xy, d: Xy) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Collinear segments sharing more than a single point.
pub fn collinear_overlap(a: Xy, b: Xy, c: Xy, d: Xy) -> bool {
    if orient(a, b, c) != 0 || orient(a, b, d) != 0 {
        return false;
    }
    let u = sub(b, a);
    let len2 = dot(u, u);
    if len2 == 0.0 {
        return false;
    }
    let (t0, t1) = (dot(sub(c, a), u) / len2, dot(sub(d, a), u) / len2);
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    hi.min(1.0) - lo.max(0.0) > 1e-12
}

pub fn point_segment_distance(p: Xy, a: Xy, b: Xy) -> f64 {
    let u = sub(b, a);
    let len2 = dot(u, u);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), u) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * u[0], a[1] + t * u[1]])
}

pub fn segment_distance(a: Xy, b: Xy, c: Xy, d: Xy) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSide {
    Inside,
    Boundary,
    Outside,
}

/// Ray casting against a closed ring.
pub fn ring_side(p: Xy, ring: &[Xy]) -> RingSide {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if on_segment(p, a, b) {
            return RingSide::Boundary;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    if inside {
        RingSide::Inside
    } else {
        RingSide::Outside
    }
}

/// Polygon with holes; boundary points of the exterior or of a hole count as inside.
pub fn polygon_side(p: Xy, exterior: &[Xy], holes: &[Vec<Xy>]) -> RingSide {
    match ring_side(p, exterior) {
        RingSide::Outside => RingSide::Outside,
        RingSide::Boundary => RingSide::Boundary,
        RingSide::Inside => {
            for h in holes {
                match ring_side(p, h) {
                    RingSide::Inside => return RingSide::Outside,
                    RingSide::Boundary => return RingSide::Boundary,
                    RingSide::Outside => {}
                }
            }
            RingSide::Inside
        }
    }
}

/// Distance from `p` to the nearest edge of a closed ring.
pub fn ring_distance(p: Xy, ring: &[Xy]) -> f64 {
    ring.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// Signed shoelace area (positive for counter-clockwise).
pub fn ring_area(ring: &[Xy]) -> f64 {
    ring.windows(2).map(|w| cross(w[0], w[1])).sum::<f64>() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQ: [Xy; 5] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];

    #[test]
    fn ring_side_cases() {
        assert_eq!(ring_side([0.5, 0.5], &SQ), RingSide::Inside);
        assert_eq!(ring_side([1.0, 0.5], &SQ), RingSide::Boundary);
        assert_eq!(ring_side([0.0, 0.0], &SQ), RingSide::Boundary);
        assert_eq!(ring_side([1.5, 0.5], &SQ), RingSide::Outside);
        assert_eq!(ring_side([-0.5, 0.0], &SQ), RingSide::Outside);
    }

    #[test]
    fn segment_relations() {
        assert!(segments_intersect([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 1.0]));
        assert!(!segments_cross_properly([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 1.0]));
        assert!(segments_cross_properly([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]));
        assert!(collinear_overlap([0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [3.0, 0.0]));
        assert!(!collinear_overlap([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 0.0]));
        assert_eq!(segment_distance([0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [1.0, 3.0]), 2.0);
    }

    #[test]
    fn frame_round_trip() {
        let f = LocalFrame::new(GeoPoint { lon: -74.75, lat: 38.27 });
        let g = GeoPoint { lon: -74.7, lat: 38.3 };
        let back = f.to_geo(f.to_xy(g));
        assert!((back.lon - g.lon).abs() < 1e-12 && (back.lat - g.lat).abs() < 1e-12);
        assert!((ring_area(&SQ) - 1.0).abs() < 1e-15);
    }
}
