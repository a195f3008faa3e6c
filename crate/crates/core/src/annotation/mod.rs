//! Two-phase human evaluation: judgment records, score aggregation, Cohen's
//! kappa, and a durable task store.

mod aggregate;
mod kappa;
mod record;
mod store;

pub use aggregate::{aggregate_scores, grand_mean, AnnotatorSummary, MetricMeans, ScoreSummary};
pub use kappa::{cohen_kappa, cohen_kappa_labels, AgreementLabel, KappaError};
pub use record::{AnnotationRecord, RecordError};
pub use store::{
    sample_pool, Accepted, AnnotationStore, ExportRecord, NextTask, QueuePolicy, StoreError, Task,
};
