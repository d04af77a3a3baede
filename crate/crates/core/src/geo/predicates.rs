use super::planar::{self, LocalFrame, RingSide, Xy};
use super::{haversine_km, GeoPoint, Geometry};

enum Proj {
    Point(Xy),
    Line(Vec<Xy>),
    Poly(Vec<Xy>, Vec<Vec<Xy>>),
}

impl Proj {
    fn new(g: &Geometry, f: &LocalFrame) -> Self {
        let ring = |r: &[GeoPoint]| r.iter().map(|p| f.to_xy(*p)).collect::<Vec<_>>();
        match g {
            Geometry::Point(p) => Proj::Point(f.to_xy(*p)),
            Geometry::LineString(ps) => Proj::Line(ring(ps)),
            Geometry::Polygon { exterior, holes } => Proj::Poly(ring(exterior), holes.iter().map(|h| ring(h)).collect()),
        }
    }

    fn segments(&self) -> Vec<(Xy, Xy)> {
        let pairs = |ps: &[Xy]| ps.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>();
        match self {
            Proj::Point(p) => vec![(*p, *p)],
            Proj::Line(ps) => pairs(ps),
            Proj::Poly(ext, holes) => {
                let mut out = pairs(ext);
                for h in holes {
                    out.extend(pairs(h));
                }
                out
            }
        }
    }

    fn vertices(&self) -> Vec<Xy> {
        match self {
            Proj::Point(p) => vec![*p],
            Proj::Line(ps) => ps.clone(),
            Proj::Poly(ext, holes) => ext.iter().chain(holes.iter().flatten()).copied().collect(),
        }
    }

    fn side(&self, p: Xy) -> RingSide {
        match self {
            Proj::Poly(ext, holes) => planar::polygon_side(p, ext, holes),
            _ => RingSide::Outside,
        }
    }
}

fn pair_frame(a: &Geometry, b: &Geometry) -> LocalFrame {
    let (ca, cb) = (a.centroid(), b.centroid());
    LocalFrame::new(GeoPoint { lon: (ca.lon + cb.lon) / 2.0, lat: (ca.lat + cb.lat) / 2.0 })
}

fn intersects_proj(a: &Proj, b: &Proj) -> bool {
    let (sa, sb) = (a.segments(), b.segments());
    if sa.iter().any(|&(p, q)| sb.iter().any(|&(r, s)| planar::segments_intersect(p, q, r, s))) {
        return true;
    }
    // no boundary contact left, so one geometry is either wholly inside the other or disjoint
    a.vertices().first().is_some_and(|&v| b.side(v) != RingSide::Outside)
        || b.vertices().first().is_some_and(|&v| a.side(v) != RingSide::Outside)
}

/// Shortest distance in meters; 0 when the geometries intersect.
pub fn min_distance_m(a: &Geometry, b: &Geometry) -> f64 {
    if let (Geometry::Point(p), Geometry::Point(q)) = (a, b) {
        return haversine_km(*p, *q) * 1000.0;
    }
    let f = pair_frame(a, b);
    let (pa, pb) = (Proj::new(a, &f), Proj::new(b, &f));
    if intersects_proj(&pa, &pb) {
        return 0.0;
    }
    let sb = pb.segments();
    pa.segments()
        .iter()
        .flat_map(|&(p, q)| sb.iter().map(move |&(r, s)| planar::segment_distance(p, q, r, s)))
        .fold(f64::INFINITY, f64::min)
}

pub fn within_distance(a: &Geometry, b: &Geometry, d: f64) -> bool {
    min_distance_m(a, b) <= d
}

/// Shared boundary points count as an intersection.
pub fn intersects(a: &Geometry, b: &Geometry) -> bool {
    let f = pair_frame(a, b);
    intersects_proj(&Proj::new(a, &f), &Proj::new(b, &f))
}

/// Whether `b` lies inside `a`, boundary included.
///
/// Only polygons contain anything other than an identical point.
pub fn contains(a: &Geometry, b: &Geometry) -> bool {
    let f = pair_frame(a, b);
    let (pa, pb) = (Proj::new(a, &f), Proj::new(b, &f));
    match (&pa, &pb) {
        (Proj::Point(p), Proj::Point(q)) => p == q,
        (Proj::Poly(_, holes), _) => {
            let inside = |v: Xy| pa.side(v) != RingSide::Outside;
            if !pb.vertices().into_iter().all(inside) {
                return false;
            }
            let sa = pa.segments();
            let sb = pb.segments();
            for &(p, q) in &sb {
                if sa.iter().any(|&(r, s)| planar::segments_cross_properly(p, q, r, s)) {
                    return false;
                }
                if !inside([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]) {
                    return false;
                }
            }
            // a hole of `a` swallowed by polygon `b`
            !holes.iter().flatten().any(|&h| pb.side(h) == RingSide::Inside)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{destination, parse_wkt};

    fn wkt(s: &str) -> Geometry {
        parse_wkt(s).unwrap()
    }

    #[test]
    fn unit_square_contains_center() {
        let sq = wkt("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        assert!(contains(&sq, &wkt("POINT (0.5 0.5)")));
        assert!(contains(&sq, &wkt("POINT (1 0.5)")));
        assert!(!contains(&sq, &wkt("POINT (1.5 0.5)")));
        assert!(contains(&sq, &wkt("LINESTRING (0.1 0.1, 0.9 0.9)")));
        assert!(!contains(&sq, &wkt("LINESTRING (0.5 0.5, 1.5 0.5)")));
    }

    #[test]
    fn within_distance_at_known_separation() {
        let p = GeoPoint::new(-74.7, 38.3).unwrap();
        let near = Geometry::Point(destination(p, 40.0, 0.4));
        let far = Geometry::Point(destination(p, 40.0, 0.6));
        let p = Geometry::Point(p);
        assert!(within_distance(&p, &near, 500.0));
        assert!(!within_distance(&p, &far, 500.0));
    }

    #[test]
    fn shared_edge_intersects() {
        let a = wkt("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        let b = wkt("POLYGON ((1 0, 2 0, 2 1, 1 1, 1 0))");
        assert!(intersects(&a, &b));
        assert_eq!(min_distance_m(&a, &b), 0.0);
        let c = wkt("POLYGON ((3 0, 4 0, 4 1, 3 1, 3 0))");
        assert!(!intersects(&a, &c));
        assert!(min_distance_m(&a, &c) > 200_000.0);
    }

    #[test]
    fn nested_and_hole() {
        let outer = wkt("POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0), (4 4, 6 4, 6 6, 4 6, 4 4))");
        assert!(intersects(&outer, &wkt("POLYGON ((1 1, 2 1, 2 2, 1 1))")));
        assert!(!intersects(&outer, &wkt("POINT (5 5)")));
        assert!(intersects(&outer, &wkt("POINT (4 5)")));
        assert!(!contains(&outer, &wkt("POLYGON ((3 3, 7 3, 7 7, 3 7, 3 3))")));
    }

    #[test]
    fn point_to_polygon_distance() {
        let sq = wkt("POLYGON ((0 0, 0.01 0, 0.01 0.01, 0 0.01, 0 0))");
        let d = min_distance_m(&sq, &wkt("POINT (0.005 0.011)"));
        let expected = 0.001f64.to_radians() * 6_371_000.0;
        assert!((d - expected).abs() / expected < 1e-3, "{d} vs {expected}");
    }
}
