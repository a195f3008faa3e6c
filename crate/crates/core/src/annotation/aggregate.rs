use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnnotationRecord;

/// Means for the Table-4 style columns; `None` when no record contributes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub colloquialism: Option<f64>,
    pub intelligibility: Option<f64>,
    pub coherence: Option<f64>,
    /// Mean of the 1-5 overall scores.
    pub total: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorSummary {
    pub annotator_id: String,
    pub phase1_count: usize,
    pub phase2_count: usize,
    #[serde(flatten)]
    pub means: MetricMeans,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub record_count: usize,
    pub annotators: Vec<AnnotatorSummary>,
    /// Mean of the annotator means per column.
    pub average: MetricMeans,
}

#[derive(Default)]
struct Sums {
    // integer sums keep the means independent of record order
    sums: [u64; 4],
    counts: [u64; 4],
    phase1: usize,
    phase2: usize,
}

impl Sums {
    fn add(&mut self, slot: usize, value: Option<u8>) {
        if let Some(v) = value {
            self.sums[slot] += u64::from(v);
            self.counts[slot] += 1;
        }
    }

    fn mean(&self, slot: usize) -> Option<f64> {
        (self.counts[slot] > 0).then(|| self.sums[slot] as f64 / self.counts[slot] as f64)
    }
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

/// Per-annotator means plus the mean of those means. Annotators are listed in
/// id order.
pub fn aggregate_scores<'a, I>(records: I) -> ScoreSummary
where
    I: IntoIterator<Item = &'a AnnotationRecord>,
{
    let mut by_annotator: BTreeMap<&str, Sums> = BTreeMap::new();
    let mut record_count = 0;
    for rec in records {
        record_count += 1;
        let sums = by_annotator.entry(rec.annotator_id.as_str()).or_default();
        match rec.phase {
            1 => sums.phase1 += 1,
            _ => sums.phase2 += 1,
        }
        sums.add(0, rec.colloquialism);
        sums.add(1, rec.intelligibility);
        sums.add(2, rec.coherence);
        sums.add(3, rec.overall);
    }
    let annotators: Vec<AnnotatorSummary> = by_annotator
        .into_iter()
        .map(|(id, s)| AnnotatorSummary {
            annotator_id: id.to_string(),
            phase1_count: s.phase1,
            phase2_count: s.phase2,
            means: MetricMeans {
                colloquialism: s.mean(0),
                intelligibility: s.mean(1),
                coherence: s.mean(2),
                total: s.mean(3),
            },
        })
        .collect();
    let average = grand_mean(annotators.iter().map(|a| a.means));
    ScoreSummary {
        record_count,
        annotators,
        average,
    }
}

/// Column-wise mean of per-annotator means, skipping absent cells.
pub fn grand_mean<I: IntoIterator<Item = MetricMeans>>(annotator_means: I) -> MetricMeans {
    let all: Vec<MetricMeans> = annotator_means.into_iter().collect();
    MetricMeans {
        colloquialism: mean_of(all.iter().map(|m| m.colloquialism)),
        intelligibility: mean_of(all.iter().map(|m| m.intelligibility)),
        coherence: mean_of(all.iter().map(|m| m.coherence)),
        total: mean_of(all.iter().map(|m| m.total)),
    }
}
