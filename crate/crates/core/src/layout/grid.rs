use super::optimize::Boundary;
use super::{Layout, LayoutError};
use crate::geo::planar::{dist, Xy};
use crate::geo::Geometry;

/// Minimum distance kept between generated turbines and the lease edge, meters.
const EDGE_CLEARANCE: f64 = 1.0;

/// Row sizes differing by at most one, with the longer rows in the middle.
fn row_sizes(count: usize, rows: usize) -> Vec<usize> {
    let mut sizes = vec![count / rows; rows];
    let center = (rows as f64 - 1.0) / 2.0;
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| (a as f64 - center).abs().total_cmp(&(b as f64 - center).abs()).then(a.cmp(&b)));
    for &r in order.iter().take(count % rows) {
        sizes[r] += 1;
    }
    sizes
}

/// Orientation of the major principal axis of the ring's vertices, radians.
fn principal_angle(ring: &[Xy]) -> f64 {
    let pts = &ring[..ring.len().saturating_sub(1)];
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    0.5 * (2.0 * cxy).atan2(cxx - cyy)
}

/// Regular rows laid along the boundary's principal axis, spread as widely as
/// the polygon allows. Turbines are numbered `Turbine1..N` row by row.
pub fn generate_grid_layout(boundary: &Geometry, rows: usize, count: usize, spacing_min: f64) -> Result<Layout, LayoutError> {
    if !matches!(boundary, Geometry::Polygon { .. }) {
        return Err(LayoutError::NotPolygon);
    }
    if rows == 0 || count < rows || !(spacing_min > 0.0) {
        return Err(LayoutError::Config(format!("cannot place {count} turbines in {rows} rows")));
    }
    let anchor = boundary.centroid();
    let layout_frame = crate::geo::planar::LocalFrame::new(anchor);
    let poly = Boundary::new(boundary, &layout_frame)?;
    let theta = principal_angle(poly.exterior());
    let u = [theta.cos(), theta.sin()];
    let v = [-theta.sin(), theta.cos()];
    let along = |p: &Xy, axis: Xy| p[0] * axis[0] + p[1] * axis[1];
    let span = |axis: Xy| {
        poly.exterior().iter().map(|p| along(p, axis)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (umin, umax) = span(u);
    let (vmin, vmax) = span(v);
    let sizes = row_sizes(count, rows);
    let longest = *sizes.iter().max().expect("rows > 0");
    let st_max = if longest > 1 { (umax - umin) / (longest - 1) as f64 } else { spacing_min };
    let sr_max = if rows > 1 { (vmax - vmin) / (rows - 1) as f64 } else { spacing_min };

    let place = |st: f64, sr: f64, u0: f64, v0: f64| -> Vec<Xy> {
        let mut pts = Vec::with_capacity(count);
        for (r, &n) in sizes.iter().enumerate() {
            let vv = v0 + (r as f64 - (rows as f64 - 1.0) / 2.0) * sr;
            for k in 0..n {
                let uu = u0 + (k as f64 - (n as f64 - 1.0) / 2.0) * st;
                pts.push([uu * u[0] + vv * v[0], uu * u[1] + vv * v[1]]);
            }
        }
        pts
    };
    let fits = |pts: &[Xy]| {
        pts.iter().all(|&p| poly.outside_distance(p) == 0.0 && dist(p, poly.nearest_edge_point(p)) >= EDGE_CLEARANCE)
    };

    const SCALES: usize = 200;
    const OFFSETS: usize = 9;
    let (uc, vc) = (0.5 * (umin + umax), 0.5 * (vmin + vmax));
    // rounding in the rotation must not bring neighbors under the minimum
    let spacing_min = spacing_min * (1.0 + 1e-9);
    for step in 0..=SCALES {
        let f = 1.0 - step as f64 / SCALES as f64;
        let st = (f * st_max).max(spacing_min);
        let sr = (f * sr_max).max(spacing_min);
        let slack_u = ((umax - umin) - st * (longest - 1) as f64).max(0.0) / 2.0;
        let slack_v = ((vmax - vmin) - sr * (rows - 1) as f64).max(0.0) / 2.0;
        for a in 0..OFFSETS {
            for b in 0..OFFSETS {
                // center first, then outward
                let off = |i: usize, slack: f64| {
                    let k = (i as f64 / 2.0).ceil() * if i % 2 == 1 { 1.0 } else { -1.0 };
                    k / ((OFFSETS / 2) as f64) * slack
                };
                let pts = place(st, sr, uc + off(a, slack_u), vc + off(b, slack_v));
                if fits(&pts) {
                    let row_ids = sizes.iter().enumerate().flat_map(|(r, &n)| std::iter::repeat_n(r + 1, n)).collect();
                    return Layout::numbered(anchor, pts).with_rows(row_ids);
                }
            }
        }
        if st == spacing_min && sr == spacing_min {
            break;
        }
    }
    Err(LayoutError::BoundaryTooSmall { count, rows, spacing: spacing_min / (1.0 + 1e-9) })
}
