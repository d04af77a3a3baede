use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::wake::{aep, aep_gradient};
use super::{Layout, LayoutError, TurbineSpec, WindRose};
use crate::geo::planar::{dist, polygon_side, LocalFrame, RingSide, Xy};
use crate::geo::Geometry;

/// A polygon projected into a layout's local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    exterior: Vec<Xy>,
    holes: Vec<Vec<Xy>>,
}

fn closest_on_segment(p: Xy, a: Xy, b: Xy) -> Xy {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

impl Boundary {
    pub fn new(geometry: &Geometry, frame: &LocalFrame) -> Result<Self, LayoutError> {
        let Geometry::Polygon { exterior, holes } = geometry else {
            return Err(LayoutError::NotPolygon);
        };
        let ring = |r: &Vec<_>| r.iter().map(|p| frame.to_xy(*p)).collect::<Vec<Xy>>();
        Ok(Boundary { exterior: ring(exterior), holes: holes.iter().map(ring).collect() })
    }

    pub fn exterior(&self) -> &[Xy] {
        &self.exterior
    }

    /// Inside or on the boundary.
    pub fn contains(&self, p: Xy) -> bool {
        polygon_side(p, &self.exterior, &self.holes) != RingSide::Outside
    }

    fn rings(&self) -> impl Iterator<Item = &Vec<Xy>> {
        std::iter::once(&self.exterior).chain(&self.holes)
    }

    /// Nearest point on any ring.
    pub fn nearest_edge_point(&self, p: Xy) -> Xy {
        let mut best = (f64::INFINITY, p);
        for ring in self.rings() {
            for w in ring.windows(2) {
                let q = closest_on_segment(p, w[0], w[1]);
                let d = dist(p, q);
                if d < best.0 {
                    best = (d, q);
                }
            }
        }
        best.1
    }

    /// Distance to the polygon for exterior points, zero otherwise.
    pub fn outside_distance(&self, p: Xy) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            dist(p, self.nearest_edge_point(p))
        }
    }

    fn centroid(&self) -> Xy {
        let pts = &self.exterior[..self.exterior.len().saturating_sub(1)];
        let n = pts.len().max(1) as f64;
        [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub iterations: usize,
    /// Step size in meters at the first iteration.
    pub learning_rate: f64,
    /// Step size at the last iteration; the schedule decays geometrically.
    pub learning_rate_final: f64,
    pub spacing_min: f64,
    pub boundary: Geometry,
    /// GWh per square meter of spacing violation.
    pub spacing_weight: f64,
    /// GWh per square meter of boundary violation.
    pub boundary_weight: f64,
    pub seed: u64,
    pub sectors_per_iteration: usize,
    /// Finite-difference step, meters.
    pub fd_step: f64,
    /// Clearance the feasibility projection adds beyond the constraints, meters.
    pub projection_margin: f64,
    /// Try a projected feasible candidate every this many iterations.
    pub eval_every: usize,
}

impl OptConfig {
    pub fn new(boundary: Geometry) -> Self {
        OptConfig {
            iterations: 400,
            learning_rate: 40.0,
            learning_rate_final: 2.0,
            spacing_min: 1200.0,
            boundary,
            spacing_weight: 1.0,
            boundary_weight: 1.0,
            seed: 42,
            sectors_per_iteration: 4,
            fd_step: 1.0,
            projection_margin: 1.0,
            eval_every: 10,
        }
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        let err = |m: &str| Err(LayoutError::Config(m.into()));
        if self.iterations == 0 {
            return err("iterations must be positive");
        }
        if !(self.spacing_min > 0.0) {
            return err("spacing_min must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate_final > 0.0 && self.fd_step > 0.0) {
            return err("step sizes must be positive");
        }
        if !(self.spacing_weight >= 0.0 && self.boundary_weight >= 0.0 && self.projection_margin >= 0.0) {
            return err("weights and margin must be non-negative");
        }
        if self.sectors_per_iteration == 0 || self.eval_every == 0 {
            return err("sectors_per_iteration and eval_every must be positive");
        }
        if !matches!(self.boundary, Geometry::Polygon { .. }) {
            return Err(LayoutError::NotPolygon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub aep_gwh: f64,
    pub spacing_pen_m: f64,
    pub boundary_pen_m: f64,
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub layout: Layout,
    pub trace: Vec<TraceRow>,
    /// True when `layout` meets both constraints exactly.
    pub feasible: bool,
    pub aep_initial: f64,
    pub aep_final: f64,
}

fn spacing_penalty(positions: &[Xy], spacing_min: f64) -> f64 {
    let mut total = 0.0;
    for (i, a) in positions.iter().enumerate() {
        for b in &positions[i + 1..] {
            total += (spacing_min - dist(*a, *b)).max(0.0);
        }
    }
    total
}

fn boundary_penalty(positions: &[Xy], boundary: &Boundary) -> f64 {
    positions.iter().map(|&p| boundary.outside_distance(p)).sum()
}

/// Summed spacing shortfall and summed distance outside the boundary, meters.
pub fn penalties(layout: &Layout, config: &OptConfig) -> Result<(f64, f64), LayoutError> {
    let boundary = Boundary::new(&config.boundary, &layout.frame())?;
    Ok((spacing_penalty(&layout.positions, config.spacing_min), boundary_penalty(&layout.positions, &boundary)))
}

/// Gradient of the quadratic penalty terms.
fn penalty_gradient(positions: &[Xy], boundary: &Boundary, cfg: &OptConfig) -> Vec<Xy> {
    let mut g = vec![[0.0; 2]; positions.len()];
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let (a, b) = (positions[i], positions[j]);
            let d = dist(a, b);
            let v = cfg.spacing_min - d;
            if v > 0.0 && d > 0.0 {
                for k in 0..2 {
                    let c = 2.0 * cfg.spacing_weight * v * (a[k] - b[k]) / d;
                    g[i][k] -= c;
                    g[j][k] += c;
                }
            }
        }
        let p = positions[i];
        if !boundary.contains(p) {
            let q = boundary.nearest_edge_point(p);
            for k in 0..2 {
                g[i][k] += 2.0 * cfg.boundary_weight * (p[k] - q[k]);
            }
        }
    }
    g
}

/// Push overlapping pairs apart and pull exterior points inside until both
/// constraints hold. Returns whether it succeeded.
pub fn project_feasible(positions: &mut [Xy], boundary: &Boundary, spacing_min: f64, margin: f64) -> bool {
    const ROUNDS: usize = 2000;
    let margin = margin.max(1e-6 * spacing_min);
    let target = spacing_min + margin;
    let centroid = boundary.centroid();
    for _ in 0..ROUNDS {
        let mut moved = false;
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let (a, b) = (positions[i], positions[j]);
                let d = dist(a, b);
                if d >= spacing_min + 0.5 * margin {
                    continue;
                }
                let dir = if d > 0.0 {
                    [(b[0] - a[0]) / d, (b[1] - a[1]) / d]
                } else {
                    let t = j as f64 * 2.399_963;
                    [t.cos(), t.sin()]
                };
                let push = 0.5 * (target - d);
                positions[i] = [a[0] - dir[0] * push, a[1] - dir[1] * push];
                positions[j] = [b[0] + dir[0] * push, b[1] + dir[1] * push];
                moved = true;
            }
        }
        for p in positions.iter_mut() {
            if boundary.contains(*p) {
                continue;
            }
            let q = boundary.nearest_edge_point(*p);
            let d = dist(*p, q);
            let inward = if d > 0.0 { [(q[0] - p[0]) / d, (q[1] - p[1]) / d] } else { [0.0, 0.0] };
            let candidate = [q[0] + inward[0] * margin, q[1] + inward[1] * margin];
            *p = if boundary.contains(candidate) {
                candidate
            } else {
                let to_c = [centroid[0] - q[0], centroid[1] - q[1]];
                let l = to_c[0].hypot(to_c[1]).max(f64::MIN_POSITIVE);
                [q[0] + to_c[0] / l * margin, q[1] + to_c[1] / l * margin]
            };
            moved = true;
        }
        if !moved {
            break;
        }
    }
    spacing_penalty(positions, spacing_min) == 0.0 && boundary_penalty(positions, boundary) == 0.0
}

/// Stochastic gradient ascent on AEP minus quadratic constraint penalties,
/// with Adam-style per-coordinate step normalization. Returns the best
/// feasible iterate seen, after projection.
pub fn optimize(layout0: &Layout, rose: &WindRose, spec: &TurbineSpec, cfg: &OptConfig) -> Result<OptResult, LayoutError> {
    cfg.validate()?;
    spec.validate()?;
    let boundary = Boundary::new(&cfg.boundary, &layout0.frame())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_sectors = rose.sectors().len();
    let per_iter = cfg.sectors_per_iteration.min(n_sectors);
    let (b1, b2, eps) = (0.9, 0.999, 1e-12);

    let mut current = layout0.clone();
    let n = current.len();
    let mut m = vec![[0.0; 2]; n];
    let mut v = vec![[0.0; 2]; n];
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let row = |it: usize, l: &Layout| TraceRow {
        iteration: it,
        aep_gwh: aep(l, rose, spec),
        spacing_pen_m: spacing_penalty(&l.positions, cfg.spacing_min),
        boundary_pen_m: boundary_penalty(&l.positions, &boundary),
    };

    let first = row(0, &current);
    let aep_initial = first.aep_gwh;
    let mut best: Option<(f64, Layout)> =
        (first.spacing_pen_m == 0.0 && first.boundary_pen_m == 0.0).then(|| (first.aep_gwh, current.clone()));
    trace.push(first);

    let decay = (cfg.learning_rate_final / cfg.learning_rate).powf(1.0 / (cfg.iterations.max(2) - 1) as f64);
    for it in 1..=cfg.iterations {
        let sectors: Vec<usize> = sample(&mut rng, n_sectors, per_iter).into_vec();
        let ga = aep_gradient(&current, rose, spec, &sectors, cfg.fd_step);
        let gp = penalty_gradient(&current.positions, &boundary, cfg);
        let lr = cfg.learning_rate * decay.powi(it as i32 - 1);
        let t = it as i32;
        for i in 0..n {
            for k in 0..2 {
                let g = ga[i][k] - gp[i][k];
                m[i][k] = b1 * m[i][k] + (1.0 - b1) * g;
                v[i][k] = b2 * v[i][k] + (1.0 - b2) * g * g;
                let mh = m[i][k] / (1.0 - b1.powi(t));
                let vh = v[i][k] / (1.0 - b2.powi(t));
                current.positions[i][k] += lr * mh / (vh.sqrt() + eps);
            }
        }
        trace.push(row(it, &current));

        if it % cfg.eval_every == 0 || it == cfg.iterations {
            let mut candidate = current.clone();
            if project_feasible(&mut candidate.positions, &boundary, cfg.spacing_min, cfg.projection_margin) {
                let value = aep(&candidate, rose, spec);
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, candidate));
                }
            }
        }
    }

    let (layout, feasible) = match best {
        Some((_, l)) => (l, true),
        None => {
            let mut l = current;
            let ok = project_feasible(&mut l.positions, &boundary, cfg.spacing_min, cfg.projection_margin);
            (l, ok)
        }
    };
    let aep_final = aep(&layout, rose, spec);
    Ok(OptResult { layout, trace, feasible, aep_initial, aep_final })
}
