use std::collections::BTreeMap;
use std::io;

use chrono::{DateTime, Duration, Utc};

use super::{holland_speed, hub_adjust, interpolate, SimConfig, StormError, StormState, Track};
use crate::geo::{bearing_deg, haversine_km, parse_wkt, GeoPoint, Geometry};
use crate::rules::{reason, RuleSet};
use crate::term_graph::{vocab, write_triple, Graph, Iri, Literal, Term, Triple};

pub const CSV_HEADER: &str =
    "time_utc,storm_lat,storm_lon,storm_vmax_ms,turbine_id,distance_km,wind_hub_ms,wind_dir_deg,status,pitch_deg,yaw_deg";

/// Storm directly over a turbine: evaluate the profile just off-center.
const MIN_RADIUS_KM: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TurbineStatus {
    Operational,
    Parked,
}

impl TurbineStatus {
    pub fn iri(self) -> Iri {
        match self {
            TurbineStatus::Operational => vocab::operational(),
            TurbineStatus::Parked => vocab::parked(),
        }
    }

    /// `:Shutdown` is read as `:Parked`.
    pub fn from_iri(iri: &Iri) -> Option<Self> {
        if *iri == vocab::operational() {
            Some(TurbineStatus::Operational)
        } else if *iri == vocab::parked() || *iri == vocab::shutdown() {
            Some(TurbineStatus::Parked)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TurbineStatus::Operational => "Operational",
            TurbineStatus::Parked => "Parked",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurbineState {
    pub turbine: Iri,
    pub status: TurbineStatus,
    pub pitch: f64,
    pub yaw: f64,
    pub wind_at_hub: f64,
    pub wind_dir: f64,
    pub distance_km: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    /// Asserted facts after state injection.
    pub base: Graph,
    /// `base` closed under the rules.
    pub graph: Graph,
    pub states: Vec<TurbineState>,
}

const STATE_PROPS: [fn() -> Iri; 5] = [
    vocab::has_turbine_status,
    vocab::has_pitch_angle,
    vocab::has_yaw_angle,
    vocab::has_wind_speed,
    vocab::has_distance_to_storm,
];

fn turbines(g: &Graph) -> Vec<Iri> {
    let mut ts = g.subjects(&vocab::rdf_type(), &Term::Iri(vocab::turbine()));
    ts.sort();
    ts.dedup();
    ts
}

fn turbine_position(g: &Graph, t: &Iri) -> Result<GeoPoint, StormError> {
    for o in g.objects(t, &vocab::has_geometry()) {
        if let Some(Ok(Geometry::Point(p))) = o.as_literal().map(|l| parse_wkt(l.lexical())) {
            return Ok(p);
        }
    }
    Err(StormError::MissingGeometry(t.as_str().to_string()))
}

fn prior_status(g: &Graph, t: &Iri) -> Option<TurbineStatus> {
    g.objects(t, &vocab::has_turbine_status()).iter().filter_map(|o| o.as_iri()).find_map(TurbineStatus::from_iri)
}

/// One state-injection step: recompute every turbine's state from the storm,
/// replace its state triples in `base` and re-run the rules.
pub fn step(base: &Graph, storm: &StormState, cfg: &SimConfig, rules: &RuleSet) -> Result<StepOutput, StormError> {
    cfg.validate()?;
    let mut next = base.clone();
    let mut states = Vec::new();
    for t in turbines(base) {
        let pos = turbine_position(base, &t)?;
        let distance_km = haversine_km(storm.position, pos);
        let mut wind_dir = bearing_deg(storm.position, pos).unwrap_or(0.0);
        if cfg.cyclonic_offset {
            wind_dir = (wind_dir + 90.0) % 360.0;
        }
        let surface = holland_speed(storm.vmax, cfg.rmax_km, cfg.holland_b, distance_km.max(MIN_RADIUS_KM))?;
        let wind_at_hub = hub_adjust(surface, cfg.hub_height, cfg.ref_height, cfg.shear_alpha);
        let near = distance_km <= cfg.proximity_km;
        let parked = match prior_status(base, &t) {
            Some(TurbineStatus::Parked) if cfg.hysteresis => near && wind_at_hub >= cfg.cutout - 2.0,
            _ => near && wind_at_hub > cfg.cutout,
        };
        let status = if parked { TurbineStatus::Parked } else { TurbineStatus::Operational };
        let pitch = if parked { 90.0 } else { 0.0 };

        for prop in STATE_PROPS {
            for old in base.find(Some(&t), Some(&prop()), None) {
                next.remove(&old);
            }
        }
        next.insert(Triple::new(t.clone(), vocab::has_turbine_status(), status.iri()));
        next.insert(Triple::new(t.clone(), vocab::has_pitch_angle(), Literal::double(pitch)));
        next.insert(Triple::new(t.clone(), vocab::has_yaw_angle(), Literal::double(wind_dir)));
        next.insert(Triple::new(t.clone(), vocab::has_wind_speed(), Literal::double(wind_at_hub)));
        next.insert(Triple::new(t.clone(), vocab::has_distance_to_storm(), Literal::double(distance_km)));
        states.push(TurbineState { turbine: t, status, pitch, yaw: wind_dir, wind_at_hub, wind_dir, distance_km });
    }
    let graph = reason(&next, rules)?;
    Ok(StepOutput { base: next, graph, states })
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: DateTime<Utc>,
    pub storm: StormState,
    pub states: Vec<TurbineState>,
    /// Changes to the reasoned graph relative to the previous step.
    pub added: Vec<Triple>,
    pub removed: Vec<Triple>,
}

#[derive(Debug, Clone)]
pub struct Timeline {
    pub snapshots: Vec<Snapshot>,
    /// The reasoned graph at the last step.
    pub final_graph: Graph,
}

/// Aggregate view of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSummary {
    pub first_shutdown: Option<DateTime<Utc>>,
    /// First step after the first shutdown where every turbine is operational.
    pub recovery: Option<DateTime<Utc>>,
    pub min_distance_km: f64,
    pub min_distance_time: Option<DateTime<Utc>>,
    pub max_hub_wind: f64,
    /// Per turbine: (shutdowns, recoveries).
    pub transitions: BTreeMap<Iri, (usize, usize)>,
}

impl Timeline {
    pub fn summary(&self) -> PhaseSummary {
        let mut s = PhaseSummary {
            first_shutdown: None,
            recovery: None,
            min_distance_km: f64::INFINITY,
            min_distance_time: None,
            max_hub_wind: 0.0,
            transitions: BTreeMap::new(),
        };
        let mut last: BTreeMap<&Iri, TurbineStatus> = BTreeMap::new();
        for snap in &self.snapshots {
            for st in &snap.states {
                if st.distance_km < s.min_distance_km {
                    s.min_distance_km = st.distance_km;
                    s.min_distance_time = Some(snap.time);
                }
                s.max_hub_wind = s.max_hub_wind.max(st.wind_at_hub);
                let entry = s.transitions.entry(st.turbine.clone()).or_default();
                // turbines start the run operational
                let before = last.insert(&st.turbine, st.status).unwrap_or(TurbineStatus::Operational);
                match (before, st.status) {
                    (TurbineStatus::Operational, TurbineStatus::Parked) => entry.0 += 1,
                    (TurbineStatus::Parked, TurbineStatus::Operational) => entry.1 += 1,
                    _ => {}
                }
                if st.status == TurbineStatus::Parked && s.first_shutdown.is_none() {
                    s.first_shutdown = Some(snap.time);
                }
            }
            let all_up = snap.states.iter().all(|st| st.status == TurbineStatus::Operational);
            if s.first_shutdown.is_some() && s.recovery.is_none() && all_up {
                s.recovery = Some(snap.time);
            }
        }
        s
    }
}

/// Fixed-step replay of `track` over `[start, end]`; `end` is always included.
pub fn run_simulation(
    graph0: &Graph,
    track: &Track,
    cfg: &SimConfig,
    rules: &RuleSet,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<Timeline, StormError> {
    cfg.validate()?;
    if end < start {
        return Err(StormError::Config(format!("simulation end {end} precedes start {start}")));
    }
    let dt = Duration::minutes(cfg.timestep_min);
    let mut times = Vec::new();
    let mut t = start;
    while t < end {
        times.push(t);
        t += dt;
    }
    times.push(end);

    let mut base = graph0.clone();
    let mut prev = reason(graph0, rules)?;
    let mut snapshots = Vec::with_capacity(times.len());
    for t in times {
        let storm = interpolate(track, t)?;
        let out = step(&base, &storm, cfg, rules)?;
        let added = out.graph.iter().filter(|x| !prev.contains(x)).cloned().collect();
        let removed = prev.iter().filter(|x| !out.graph.contains(x)).cloned().collect();
        snapshots.push(Snapshot { time: t, storm, states: out.states, added, removed });
        base = out.base;
        prev = out.graph;
    }
    Ok(Timeline { snapshots, final_graph: prev })
}

fn fmt_time(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// One row per turbine per step, columns as in [`CSV_HEADER`].
pub fn write_timeline_csv<W: io::Write>(timeline: &Timeline, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for snap in &timeline.snapshots {
        let time = fmt_time(snap.time);
        for st in &snap.states {
            w.write_record([
                time.clone(),
                format!("{:.4}", snap.storm.position.lat),
                format!("{:.4}", snap.storm.position.lon),
                format!("{:.3}", snap.storm.vmax),
                st.turbine.local_name().to_string(),
                format!("{:.3}", st.distance_km),
                format!("{:.3}", st.wind_at_hub),
                format!("{:.2}", st.wind_dir),
                st.status.as_str().to_string(),
                format!("{:.1}", st.pitch),
                format!("{:.2}", st.yaw),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-step triple deltas as N-Triples. Removed triples appear as `# - ` comments,
/// so the file parses back to the union of everything ever added.
pub fn write_delta_log<W: io::Write>(timeline: &Timeline, mut out: W) -> io::Result<()> {
    for snap in &timeline.snapshots {
        let mut buf = format!("# step {} (+{} -{})\n", fmt_time(snap.time), snap.added.len(), snap.removed.len());
        for t in &snap.removed {
            buf.push_str("# - ");
            write_triple(&mut buf, t);
        }
        for t in &snap.added {
            write_triple(&mut buf, t);
        }
        out.write_all(buf.as_bytes())?;
    }
    Ok(())
}
