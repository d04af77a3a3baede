//! Inter-annotator agreement and extraction accuracy.

use std::collections::{BTreeMap, BTreeSet};

use crate::ingest::ConstraintSnippet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("need at least 2 items, got {0}")]
    TooFewItems(usize),
    #[error("coders disagree on item count: {items} items, {coder1} and {coder2} labels")]
    LengthMismatch { items: usize, coder1: usize, coder2: usize },
    #[error("duplicate item `{0}`")]
    DuplicateItem(String),
    #[error("label `{label}` on item `{item}` is outside the declared domain")]
    LabelOutsideDomain { item: String, label: String },
    #[error("alpha is undefined: every annotation carries the same label")]
    UndefinedAlpha,
    #[error("ground truth is empty")]
    EmptyGroundTruth,
    #[error("annotation csv: {0}")]
    Csv(String),
}

/// Nominal labels from two coders over the same items.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub items: Vec<String>,
    pub coder1: Vec<String>,
    pub coder2: Vec<String>,
}

impl AnnotationSet {
    pub fn new(items: Vec<String>, coder1: Vec<String>, coder2: Vec<String>) -> Result<Self, MetricsError> {
        if coder1.len() != items.len() || coder2.len() != items.len() {
            return Err(MetricsError::LengthMismatch { items: items.len(), coder1: coder1.len(), coder2: coder2.len() });
        }
        let mut seen = BTreeSet::new();
        for it in &items {
            if !seen.insert(it) {
                return Err(MetricsError::DuplicateItem(it.clone()));
            }
        }
        Ok(AnnotationSet { items, coder1, coder2 })
    }

    /// Reject labels outside `domain`.
    pub fn check_domain(&self, domain: &BTreeSet<String>) -> Result<(), MetricsError> {
        for (i, item) in self.items.iter().enumerate() {
            for label in [&self.coder1[i], &self.coder2[i]] {
                if !domain.contains(label) {
                    return Err(MetricsError::LabelOutsideDomain { item: item.clone(), label: label.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Read `item_id,coder1,coder2`.
pub fn parse_annotations_csv(text: &str) -> Result<AnnotationSet, MetricsError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| MetricsError::Csv(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["item_id", "coder1", "coder2"] {
        return Err(MetricsError::Csv("header must be item_id,coder1,coder2".into()));
    }
    let (mut items, mut c1, mut c2) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| MetricsError::Csv(e.to_string()))?;
        items.push(rec[0].to_string());
        c1.push(rec[1].to_string());
        c2.push(rec[2].to_string());
    }
    AnnotationSet::new(items, c1, c2)
}

/// Krippendorff's alpha for two coders and nominal labels:
/// `1 - D_o / D_e` with `D_e` from the pooled label frequencies.
pub fn krippendorff_alpha(set: &AnnotationSet) -> Result<f64, MetricsError> {
    let n = set.len();
    if n < 2 {
        return Err(MetricsError::TooFewItems(n));
    }
    let disagreements = set.coder1.iter().zip(&set.coder2).filter(|(a, b)| a != b).count();
    let d_o = disagreements as f64 / n as f64;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in set.coder1.iter().chain(&set.coder2) {
        *counts.entry(label).or_default() += 1;
    }
    let total = (2 * n) as f64;
    // sum over ordered pairs of distinct labels of p(c1) p(c2)
    let d_e = 1.0 - counts.values().map(|&c| (c as f64 / total).powi(2)).sum::<f64>();
    if d_e <= 0.0 {
        return Err(MetricsError::UndefinedAlpha);
    }
    Ok(1.0 - d_o / d_e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherConfig {
    /// Minimum token-set Jaccard similarity on description plus scope.
    pub threshold: f64,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig { threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    /// `(extracted id, ground-truth id)`.
    pub matched: Vec<(String, String)>,
    pub unmatched_extracted: Vec<String>,
    pub unmatched_ground_truth: Vec<String>,
    pub accuracy: f64,
    pub extracted_count: usize,
}

impl MatchReport {
    /// `document,acc,no_of_reg` line, e.g. `17,1.000,8`.
    pub fn table_row(&self, document: &str) -> String {
        format!("{document},{:.3},{}", self.accuracy, self.extracted_count)
    }
}

pub const MATCH_REPORT_HEADER: &str = "document,acc,no_of_reg";

pub fn write_match_report_csv(rows: &[(String, MatchReport)]) -> String {
    let mut out = format!("{MATCH_REPORT_HEADER}\n");
    for (doc, r) in rows {
        out.push_str(&r.table_row(doc));
        out.push('\n');
    }
    out
}

#[derive(Debug, PartialEq)]
enum QuantityKey {
    None,
    Canonical(crate::ingest::CanonicalUnit, f64),
    Raw(f64, String),
}

fn quantity_key(c: &ConstraintSnippet) -> QuantityKey {
    match (c.value, c.unit.as_deref()) {
        (None, _) => QuantityKey::None,
        (Some(v), unit) => match c.quantity() {
            Some(q) => QuantityKey::Canonical(q.unit, q.magnitude),
            None => QuantityKey::Raw(v, unit.unwrap_or("").trim().to_lowercase()),
        },
    }
}

fn tokens(c: &ConstraintSnippet) -> BTreeSet<String> {
    let text = format!("{} {}", c.description.as_deref().unwrap_or(""), c.geographic_scope.as_deref().unwrap_or(""));
    text.to_lowercase()
        .split(|ch: char| !ch.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Greedy one-to-one matching: a pair is eligible when the normalized
/// quantities agree and the text similarity reaches the threshold; pairs
/// are taken in order of decreasing similarity.
pub fn extraction_accuracy(
    extracted: &[ConstraintSnippet],
    ground_truth: &[ConstraintSnippet],
    config: &MatcherConfig,
) -> Result<MatchReport, MetricsError> {
    if ground_truth.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    let ext_tokens: Vec<_> = extracted.iter().map(tokens).collect();
    let gt_tokens: Vec<_> = ground_truth.iter().map(tokens).collect();
    let mut candidates = Vec::new();
    for (i, e) in extracted.iter().enumerate() {
        let key = quantity_key(e);
        for (j, g) in ground_truth.iter().enumerate() {
            if key != quantity_key(g) {
                continue;
            }
            let sim = jaccard(&ext_tokens[i], &gt_tokens[j]);
            if sim >= config.threshold {
                candidates.push((sim, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut used_e, mut used_g) = (vec![false; extracted.len()], vec![false; ground_truth.len()]);
    let mut matched = Vec::new();
    for (_, i, j) in candidates {
        if used_e[i] || used_g[j] {
            continue;
        }
        used_e[i] = true;
        used_g[j] = true;
        matched.push((extracted[i].constraint_id.clone(), ground_truth[j].constraint_id.clone()));
    }
    let leftover = |cs: &[ConstraintSnippet], used: &[bool]| {
        cs.iter().zip(used).filter(|(_, u)| !**u).map(|(c, _)| c.constraint_id.clone()).collect()
    };
    Ok(MatchReport {
        accuracy: matched.len() as f64 / ground_truth.len() as f64,
        unmatched_extracted: leftover(extracted, &used_e),
        unmatched_ground_truth: leftover(ground_truth, &used_g),
        matched,
        extracted_count: extracted.len(),
    })
}
