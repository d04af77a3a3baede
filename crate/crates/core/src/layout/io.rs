use super::{DeviationReport, Layout, LayoutError, RowDeviation, TraceRow};
use crate::geo::{GeoPoint, Geometry};
use crate::term_graph::{vocab, Graph, Iri, Literal, Triple};

pub const TRACE_HEADER: &str = "iteration,aep_gwh,spacing_pen_m,boundary_pen_m";

fn csv_err(e: impl std::fmt::Display) -> LayoutError {
    LayoutError::Csv(e.to_string())
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String, LayoutError> {
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

/// `turbine_id,lon,lat` plus `row` when the layout has rows.
pub fn write_layout_csv(layout: &Layout) -> Result<String, LayoutError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let with_rows = layout.rows.is_some();
    let mut header = vec!["turbine_id", "lon", "lat"];
    if with_rows {
        header.push("row");
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, p) in layout.geo_positions().iter().enumerate() {
        let mut rec = vec![layout.ids[i].clone(), p.lon.to_string(), p.lat.to_string()];
        if let Some(rows) = &layout.rows {
            rec.push(rows[i].to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    into_string(w)
}

/// Parse a layout CSV. Without an explicit anchor, the mean turbine position is used.
pub fn read_layout_csv(text: &str, anchor: Option<GeoPoint>) -> Result<Layout, LayoutError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ci), Some(cx), Some(cy)) = (col("turbine_id"), col("lon"), col("lat")) else {
        return Err(LayoutError::Csv("header must contain turbine_id,lon,lat".into()));
    };
    let crow = col("row");
    let (mut ids, mut pts, mut rows) = (Vec::new(), Vec::new(), Vec::new());
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = n + 2;
        let num = |c: usize| -> Result<f64, LayoutError> {
            let s = rec.get(c).unwrap_or("");
            s.parse().map_err(|_| LayoutError::Csv(format!("line {line}: bad number `{s}`")))
        };
        ids.push(rec.get(ci).unwrap_or("").to_string());
        pts.push(GeoPoint::new(num(cx)?, num(cy)?)?);
        if let Some(c) = crow {
            let s = rec.get(c).unwrap_or("");
            rows.push(s.parse().map_err(|_| LayoutError::Csv(format!("line {line}: bad row `{s}`")))?);
        }
    }
    let anchor = anchor.unwrap_or_else(|| {
        let n = pts.len().max(1) as f64;
        GeoPoint { lon: pts.iter().map(|p| p.lon).sum::<f64>() / n, lat: pts.iter().map(|p| p.lat).sum::<f64>() / n }
    });
    let layout = Layout::from_geo(anchor, &pts, ids)?;
    if crow.is_some() {
        layout.with_rows(rows)
    } else {
        Ok(layout)
    }
}

/// Turbines as `:Turbine` individuals named by id, with WKT point geometry.
pub fn layout_to_graph(layout: &Layout) -> Graph {
    let mut g = Graph::new();
    for (id, p) in layout.ids.iter().zip(layout.geo_positions()) {
        let t = Iri::local(id);
        g.insert(Triple::new(t.clone(), vocab::rdf_type(), vocab::turbine()));
        g.insert(Triple::new(t.clone(), vocab::has_geometry(), Literal::wkt(&Geometry::Point(p))));
        g.insert(Triple::new(t, vocab::has_name(), Literal::string(id)));
    }
    g
}

pub fn write_trace_csv(trace: &[TraceRow]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for t in trace {
        out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", t.iteration, t.aep_gwh, t.spacing_pen_m, t.boundary_pen_m));
    }
    out
}

/// Deviation report with the columns `Row,Mean X,Std Dev X,Mean Y,Std Dev Y`.
pub fn write_deviation_csv(report: &DeviationReport) -> String {
    let line = |d: &RowDeviation| {
        let label = d.row.map_or_else(|| "Overall".to_string(), |r| r.to_string());
        format!("{label},{:.2},{:.2},{:.2},{:.2}\n", d.mean_x, d.std_x, d.mean_y, d.std_y)
    };
    let mut out = String::from("Row,Mean X,Std Dev X,Mean Y,Std Dev Y\n");
    for d in &report.rows {
        out.push_str(&line(d));
    }
    out.push_str(&line(&report.overall));
    out
}
