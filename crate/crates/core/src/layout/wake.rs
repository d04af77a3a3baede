use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::{Layout, Sector, TurbineSpec, WindRose};
use crate::geo::planar::Xy;

pub const QUADRATURE_POINTS: usize = 27;
const HOURS_PER_YEAR: f64 = 8760.0;

/// Downwind and crosswind unit vectors for wind blowing from `dir` degrees.
fn flow_axes(dir: f64) -> (Xy, Xy) {
    let (s, c) = dir.to_radians().sin_cos();
    ([-s, -c], [c, -s])
}

fn relative(up: Xy, down: Xy, flow: Xy, cross: Xy) -> (f64, f64) {
    let d = [down[0] - up[0], down[1] - up[1]];
    (d[0] * flow[0] + d[1] * flow[1], d[0] * cross[0] + d[1] * cross[1])
}

/// Gaussian wake deficit at downwind distance `x` and crosswind offset `y`.
/// Inside two diameters the wake is evaluated at `x = 2d`.
pub(crate) fn deficit_xy(x: f64, y: f64, ct: f64, spec: &TurbineSpec) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let d = spec.rotor_diameter;
    let x = x.max(2.0 * d);
    let root = (1.0 - ct).sqrt();
    let beta = (1.0 + root) / (2.0 * root);
    let s = spec.wake_expansion * x / d + 0.2 * beta.sqrt();
    let amplitude = 1.0 - (1.0 - ct / (8.0 * s * s)).max(0.0).sqrt();
    let sigma = s * d;
    amplitude * (-(y * y) / (2.0 * sigma * sigma)).exp()
}

/// Fractional speed deficit at `downstream` caused by `upstream`.
pub fn wake_deficit(upstream: Xy, downstream: Xy, wind_dir: f64, ws: f64, spec: &TurbineSpec) -> f64 {
    if !(ws >= spec.cut_in && ws < spec.cut_out) {
        return 0.0;
    }
    let (flow, cross) = flow_axes(wind_dir);
    let (x, y) = relative(upstream, downstream, flow, cross);
    deficit_xy(x, y, spec.thrust_coefficient(ws), spec)
}

/// Hub wind at turbine `i` with root-sum-square wake superposition.
pub fn effective_speed(layout: &Layout, i: usize, wind_dir: f64, ws: f64, spec: &TurbineSpec) -> f64 {
    let target = layout.positions[i];
    let sumsq: f64 = layout
        .positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &p)| wake_deficit(p, target, wind_dir, ws, spec).powi(2))
        .sum();
    (ws * (1.0 - sumsq.sqrt())).max(0.0)
}

/// Power curve, watts.
pub fn power(ws: f64, spec: &TurbineSpec) -> f64 {
    if ws < spec.cut_in || ws >= spec.cut_out {
        0.0
    } else if ws < spec.rated_speed {
        spec.rated_power * ((ws - spec.cut_in) / (spec.rated_speed - spec.cut_in)).powi(3)
    } else {
        spec.rated_power
    }
}

/// Gauss-Legendre nodes and weights on `[cut_in, cut_out]`.
pub(crate) fn quadrature(spec: &TurbineSpec) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(QUADRATURE_POINTS).expect("non-zero"));
    let (a, b) = (spec.cut_in, spec.cut_out);
    let half = 0.5 * (b - a);
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (half * x + 0.5 * (a + b), half * w)).collect()
}

struct CtGroup {
    ct: f64,
    /// `(speed, quadrature weight times Weibull density)`.
    nodes: Vec<(f64, f64)>,
    /// `deficits[j * n + k]`: deficit of `k` in the wake of `j`.
    deficits: Vec<f64>,
    sumsq: Vec<f64>,
    /// `power[m * n + k]`: power of turbine `k` at node `m`.
    power: Vec<f64>,
}

/// One wind sector with all pair deficits cached, so moving a single
/// turbine costs O(n) per distinct thrust coefficient.
pub(crate) struct SectorField<'a> {
    spec: &'a TurbineSpec,
    flow: Xy,
    cross: Xy,
    n: usize,
    groups: Vec<CtGroup>,
}

impl<'a> SectorField<'a> {
    pub(crate) fn new(positions: &[Xy], sector: &Sector, spec: &'a TurbineSpec, quad: &[(f64, f64)]) -> Self {
        let (flow, cross) = flow_axes(sector.direction);
        let n = positions.len();
        let mut groups: Vec<CtGroup> = Vec::new();
        for &(u, w) in quad {
            let ct = spec.thrust_coefficient(u);
            let weight = w * sector.weibull_pdf(u);
            match groups.iter_mut().find(|g| g.ct == ct) {
                Some(g) => g.nodes.push((u, weight)),
                None => groups.push(CtGroup {
                    ct,
                    nodes: vec![(u, weight)],
                    deficits: Vec::new(),
                    sumsq: Vec::new(),
                    power: Vec::new(),
                }),
            }
        }
        let mut pairs = Vec::new();
        for (j, &a) in positions.iter().enumerate() {
            for (k, &b) in positions.iter().enumerate() {
                if j != k {
                    let (x, y) = relative(a, b, flow, cross);
                    if x > 0.0 {
                        pairs.push((j, k, x, y));
                    }
                }
            }
        }
        for g in &mut groups {
            g.deficits = vec![0.0; n * n];
            g.sumsq = vec![0.0; n];
            for &(j, k, x, y) in &pairs {
                let d = deficit_xy(x, y, g.ct, spec);
                g.deficits[j * n + k] = d;
                g.sumsq[k] += d * d;
            }
            g.power = Vec::with_capacity(g.nodes.len() * n);
            for &(u, _) in &g.nodes {
                g.power.extend(g.sumsq.iter().map(|s| power(u * (1.0 - s.sqrt()).max(0.0), spec)));
            }
        }
        SectorField { spec, flow, cross, n, groups }
    }

    /// Expected farm power in this sector, watts.
    pub(crate) fn mean_power(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                g.nodes
                    .iter()
                    .enumerate()
                    .map(|(m, &(_, w))| w * g.power[m * self.n..(m + 1) * self.n].iter().sum::<f64>())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Change in [`mean_power`](Self::mean_power) when turbine `i` moves to `to`.
    pub(crate) fn delta_if_moved(&self, positions: &[Xy], i: usize, to: Xy) -> f64 {
        let n = self.n;
        let mut changed: Vec<(usize, f64)> = Vec::with_capacity(n);
        let mut delta = 0.0;
        for g in &self.groups {
            changed.clear();
            let mut own = 0.0;
            for (j, &p) in positions.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (x, y) = relative(p, to, self.flow, self.cross);
                own += deficit_xy(x, y, g.ct, self.spec).powi(2);
                let (x, y) = relative(to, p, self.flow, self.cross);
                let new = deficit_xy(x, y, g.ct, self.spec);
                let old = g.deficits[i * n + j];
                if new != old {
                    changed.push((j, (g.sumsq[j] - old * old + new * new).max(0.0)));
                }
            }
            changed.push((i, own));
            for (m, &(u, w)) in g.nodes.iter().enumerate() {
                let row = &g.power[m * n..(m + 1) * n];
                let d: f64 = changed.iter().map(|&(k, s)| power(u * (1.0 - s.sqrt()).max(0.0), self.spec) - row[k]).sum();
                delta += w * d;
            }
        }
        delta
    }
}

fn gwh(mean_power_w: f64) -> f64 {
    mean_power_w * HOURS_PER_YEAR * 1e-9
}

/// Annual energy production, GWh.
pub fn aep(layout: &Layout, rose: &WindRose, spec: &TurbineSpec) -> f64 {
    let all: Vec<usize> = (0..rose.sectors().len()).collect();
    aep_sectors(layout, rose, spec, &all)
}

/// AEP estimated from a subset of sectors, reweighted to the subset's total probability.
pub fn aep_sectors(layout: &Layout, rose: &WindRose, spec: &TurbineSpec, sectors: &[usize]) -> f64 {
    if layout.is_empty() {
        return 0.0;
    }
    let quad = quadrature(spec);
    let mass: f64 = sectors.iter().map(|&s| rose.sectors()[s].probability).sum();
    if mass <= 0.0 {
        return 0.0;
    }
    let total: f64 = sectors
        .iter()
        .map(|&s| {
            let sector = &rose.sectors()[s];
            sector.probability * SectorField::new(&layout.positions, sector, spec, &quad).mean_power()
        })
        .sum();
    gwh(total / mass)
}

/// Central-difference gradient of [`aep_sectors`] with respect to every position, GWh per meter.
pub fn aep_gradient(layout: &Layout, rose: &WindRose, spec: &TurbineSpec, sectors: &[usize], h: f64) -> Vec<Xy> {
    let n = layout.len();
    let mut grad = vec![[0.0; 2]; n];
    let mass: f64 = sectors.iter().map(|&s| rose.sectors()[s].probability).sum();
    if n == 0 || mass <= 0.0 {
        return grad;
    }
    let quad = quadrature(spec);
    for &s in sectors {
        let sector = &rose.sectors()[s];
        let field = SectorField::new(&layout.positions, sector, spec, &quad);
        let scale = gwh(sector.probability / mass) / (2.0 * h);
        for (i, g) in grad.iter_mut().enumerate() {
            let p = layout.positions[i];
            for (axis, slot) in g.iter_mut().enumerate() {
                let (mut plus, mut minus) = (p, p);
                plus[axis] += h;
                minus[axis] -= h;
                let diff = field.delta_if_moved(&layout.positions, i, plus) - field.delta_if_moved(&layout.positions, i, minus);
                *slot += scale * diff;
            }
        }
    }
    grad
}
