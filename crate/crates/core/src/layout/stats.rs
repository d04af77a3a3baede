use super::{Layout, LayoutError};
use crate::geo::planar::{dist, Xy};

/// Positional differences for one row, meters. Means are of absolute
/// differences, standard deviations of signed ones (population form).
#[derive(Debug, Clone, PartialEq)]
pub struct RowDeviation {
    /// `None` for the all-turbine summary.
    pub row: Option<usize>,
    pub count: usize,
    pub mean_x: f64,
    pub std_x: f64,
    pub mean_y: f64,
    pub std_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<RowDeviation>,
    pub overall: RowDeviation,
}

fn summarize(row: Option<usize>, deltas: &[Xy]) -> RowDeviation {
    let n = deltas.len().max(1) as f64;
    let stat = |k: usize| {
        let mean_abs = deltas.iter().map(|d| d[k].abs()).sum::<f64>() / n;
        let mean = deltas.iter().map(|d| d[k]).sum::<f64>() / n;
        let var = deltas.iter().map(|d| (d[k] - mean).powi(2)).sum::<f64>() / n;
        (mean_abs, var.sqrt())
    };
    let (mean_x, std_x) = stat(0);
    let (mean_y, std_y) = stat(1);
    RowDeviation { row, count: deltas.len(), mean_x, std_x, mean_y, std_y }
}

/// Compare two layouts row by row. Within each row, turbines are paired by
/// greedy nearest neighbor; differences are `b - a` in `a`'s local frame.
pub fn row_deviation_stats(a: &Layout, b: &Layout, rows: &[usize]) -> Result<DeviationReport, LayoutError> {
    if a.len() != b.len() {
        return Err(LayoutError::SizeMismatch(a.len(), b.len()));
    }
    if rows.len() != a.len() {
        return Err(LayoutError::RowMismatch { rows: rows.len(), turbines: a.len() });
    }
    let b = b.reanchored(a.anchor);
    let mut labels: Vec<usize> = rows.to_vec();
    labels.sort_unstable();
    labels.dedup();

    let mut per_row = Vec::with_capacity(labels.len());
    let mut all = Vec::with_capacity(a.len());
    for r in labels {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i] == r).collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(idx.len() * idx.len());
        for &i in &idx {
            for &j in &idx {
                pairs.push((dist(a.positions[i], b.positions[j]), i, j));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; a.len()]);
        let mut deltas = Vec::with_capacity(idx.len());
        for (_, i, j) in pairs {
            if used_a[i] || used_b[j] {
                continue;
            }
            used_a[i] = true;
            used_b[j] = true;
            deltas.push([b.positions[j][0] - a.positions[i][0], b.positions[j][1] - a.positions[i][1]]);
        }
        all.extend_from_slice(&deltas);
        per_row.push(summarize(Some(r), &deltas));
    }
    Ok(DeviationReport { rows: per_row, overall: summarize(None, &all) })
}
