use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, NaiveTime, TimeZone, Utc};

use super::{StormError, StormState, KNOT_TO_MS};
use crate::geo::GeoPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct StormHeader {
    /// Basin, number and year, e.g. `AL182012`.
    pub id: String,
    pub name: String,
    pub count: usize,
}

/// One best-track row. Wind radii and any later columns are kept verbatim in `extra`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub time: DateTime<Utc>,
    pub record_id: Option<char>,
    pub status: String,
    pub position: GeoPoint,
    /// Knots.
    pub vmax_kt: i32,
    /// Millibars; `None` for the `-999` marker.
    pub min_pressure: Option<i32>,
    pub extra: Vec<String>,
}

impl TrackRecord {
    pub fn vmax_ms(&self) -> f64 {
        self.vmax_kt as f64 * KNOT_TO_MS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub header: StormHeader,
    pub records: Vec<TrackRecord>,
}

fn perr(line: usize, message: impl Into<String>) -> StormError {
    StormError::Parse { line, message: message.into() }
}

fn coord(s: &str, line: usize) -> Result<f64, StormError> {
    let (num, hemi) = s.split_at(s.len().saturating_sub(1));
    let v: f64 = num.parse().map_err(|_| perr(line, format!("unparseable coordinate `{s}`")))?;
    match hemi {
        "N" | "E" => Ok(v),
        "S" | "W" => Ok(-v),
        _ => Err(perr(line, format!("unparseable coordinate `{s}`"))),
    }
}

fn fields(line: &str) -> Vec<&str> {
    let mut f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.last() == Some(&"") {
        f.pop();
    }
    f
}

/// Parse HURDAT2 text into tracks. Each header's record count must match.
pub fn parse_hurdat2(text: &str) -> Result<Vec<Track>, StormError> {
    let mut tracks: Vec<Track> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let f = fields(raw);
        let is_header = f.len() == 3 && f[0].len() == 8 && f[0].chars().take(2).all(|c| c.is_ascii_alphabetic());
        if is_header {
            close(tracks.last())?;
            let count = f[2].parse().map_err(|_| perr(line, format!("bad record count `{}`", f[2])))?;
            tracks.push(Track {
                header: StormHeader { id: f[0].to_string(), name: f[1].to_string(), count },
                records: Vec::new(),
            });
            continue;
        }
        let track = tracks.last_mut().ok_or_else(|| perr(line, "data row before any header"))?;
        if f.len() < 8 {
            return Err(perr(line, format!("expected at least 8 fields, got {}", f.len())));
        }
        let date = NaiveDate::parse_from_str(f[0], "%Y%m%d").map_err(|_| perr(line, format!("bad date `{}`", f[0])))?;
        let hm = NaiveTime::parse_from_str(f[1], "%H%M").map_err(|_| perr(line, format!("bad time `{}`", f[1])))?;
        let time = Utc.from_utc_datetime(&NaiveDateTime::new(date, hm));
        let record_id = match f[2] {
            "" => None,
            s if s.chars().count() == 1 => s.chars().next(),
            s => return Err(perr(line, format!("bad record identifier `{s}`"))),
        };
        let lat = coord(f[4], line)?;
        let lon = coord(f[5], line)?;
        let position = GeoPoint::new(lon, lat).map_err(|e| perr(line, e.to_string()))?;
        let vmax_kt: i32 = f[6].parse().map_err(|_| perr(line, format!("bad wind `{}`", f[6])))?;
        if vmax_kt < 0 {
            return Err(perr(line, format!("negative wind `{}`", f[6])));
        }
        let p: i32 = f[7].parse().map_err(|_| perr(line, format!("bad pressure `{}`", f[7])))?;
        if let Some(prev) = track.records.last() {
            if time <= prev.time {
                return Err(StormError::NonMonotonic { line, time: time.to_rfc3339() });
            }
        }
        track.records.push(TrackRecord {
            time,
            record_id,
            status: f[3].to_string(),
            position,
            vmax_kt,
            min_pressure: (p != -999).then_some(p),
            extra: f[8..].iter().map(|s| s.to_string()).collect(),
        });
    }
    close(tracks.last())?;
    Ok(tracks)
}

fn close(t: Option<&Track>) -> Result<(), StormError> {
    match t {
        Some(t) if t.records.len() != t.header.count => Err(StormError::CountMismatch {
            id: t.header.id.clone(),
            declared: t.header.count,
            found: t.records.len(),
        }),
        _ => Ok(()),
    }
}

fn hemi(v: f64, pos: char, neg: char) -> String {
    let c = if v < 0.0 { neg } else { pos };
    format!("{:.1}{c}", v.abs())
}

/// Fixed-width HURDAT2 text in the archive's column layout.
pub fn emit_hurdat2(tracks: &[Track]) -> String {
    let mut out = String::new();
    for t in tracks {
        out.push_str(&format!("{},{:>19},{:>7},\n", t.header.id, t.header.name, t.records.len()));
        for r in &t.records {
            out.push_str(&format!(
                "{},{:>5},{:>2},{:>3},{:>6},{:>7},{:>4},{:>5},",
                r.time.format("%Y%m%d"),
                r.time.format("%H%M"),
                r.record_id.map(String::from).unwrap_or_default(),
                r.status,
                hemi(r.position.lat, 'N', 'S'),
                hemi(r.position.lon, 'E', 'W'),
                r.vmax_kt,
                r.min_pressure.unwrap_or(-999),
            ));
            for e in &r.extra {
                out.push_str(&format!("{e:>5},"));
            }
            out.push('\n');
        }
    }
    out
}

pub fn find_track<'a>(tracks: &'a [Track], id: &str) -> Result<&'a Track, StormError> {
    tracks.iter().find(|t| t.header.id == id).ok_or_else(|| StormError::UnknownStorm(id.to_string()))
}

/// Linear interpolation of position and intensity between bracketing records.
pub fn interpolate(track: &Track, t: DateTime<Utc>) -> Result<StormState, StormError> {
    let recs = &track.records;
    let (Some(first), Some(last)) = (recs.first(), recs.last()) else {
        return Err(StormError::UnknownStorm(track.header.id.clone()));
    };
    if t < first.time || t > last.time {
        return Err(StormError::OutOfSpan { time: t.to_rfc3339(), start: first.time.to_rfc3339(), end: last.time.to_rfc3339() });
    }
    let k = recs.partition_point(|r| r.time <= t);
    let a = &recs[k - 1];
    if a.time == t || k == recs.len() {
        return Ok(StormState { time: t, position: a.position, vmax: a.vmax_ms() });
    }
    let b = &recs[k];
    let span: Duration = b.time - a.time;
    let w = (t - a.time).num_seconds() as f64 / span.num_seconds() as f64;
    let lerp = |x: f64, y: f64| x + w * (y - x);
    Ok(StormState {
        time: t,
        position: GeoPoint { lon: lerp(a.position.lon, b.position.lon), lat: lerp(a.position.lat, b.position.lat) },
        vmax: lerp(a.vmax_ms(), b.vmax_ms()),
    })
}
