use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("phase must be 1 or 2, got {0}")]
    Phase(u8),
    #[error("annotator_id must not be empty")]
    EmptyAnnotator,
    #[error("{field} is required in phase {phase}")]
    Missing { field: &'static str, phase: u8 },
    #[error("{field} is not allowed in phase {phase}")]
    NotAllowed { field: &'static str, phase: u8 },
    #[error("{field} = {value} is outside {min}..={max}")]
    Range {
        field: &'static str,
        value: u8,
        min: u8,
        max: u8,
    },
}

impl RecordError {
    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            RecordError::Phase(_) => "phase",
            RecordError::EmptyAnnotator => "annotator_id",
            RecordError::Missing { field, .. }
            | RecordError::NotAllowed { field, .. }
            | RecordError::Range { field, .. } => field,
        }
    }
}

/// One annotator's judgment of one task in one phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub task_id: u64,
    pub annotator_id: String,
    pub phase: u8,
    /// Phase 1 only, 1 to 5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall: Option<u8>,
    /// Phase 2 only, 1 to 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colloquialism: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intelligibility: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<u8>,
    #[serde(default = "Utc::now")]
    pub timestamp: DateTime<Utc>,
}

impl AnnotationRecord {
    pub fn phase_one(task_id: u64, annotator: impl Into<String>, overall: u8) -> Self {
        AnnotationRecord {
            task_id,
            annotator_id: annotator.into(),
            phase: 1,
            overall: Some(overall),
            colloquialism: None,
            intelligibility: None,
            coherence: None,
            timestamp: Utc::now(),
        }
    }

    pub fn phase_two(
        task_id: u64,
        annotator: impl Into<String>,
        (colloquialism, intelligibility, coherence): (u8, u8, u8),
    ) -> Self {
        AnnotationRecord {
            task_id,
            annotator_id: annotator.into(),
            phase: 2,
            overall: None,
            colloquialism: Some(colloquialism),
            intelligibility: Some(intelligibility),
            coherence: Some(coherence),
            timestamp: Utc::now(),
        }
    }

    pub fn key(&self) -> (u64, String, u8) {
        (self.task_id, self.annotator_id.clone(), self.phase)
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.annotator_id.trim().is_empty() {
            return Err(RecordError::EmptyAnnotator);
        }
        let phase = self.phase;
        let triplet = [
            ("colloquialism", self.colloquialism),
            ("intelligibility", self.intelligibility),
            ("coherence", self.coherence),
        ];
        let check = |field, value: Option<u8>, max| match value {
            None => Err(RecordError::Missing { field, phase }),
            Some(v) if !(1..=max).contains(&v) => Err(RecordError::Range {
                field,
                value: v,
                min: 1,
                max,
            }),
            Some(_) => Ok(()),
        };
        match phase {
            1 => {
                if let Some((field, _)) = triplet.iter().find(|(_, v)| v.is_some()) {
                    return Err(RecordError::NotAllowed { field, phase });
                }
                check("overall", self.overall, 5)
            }
            2 => {
                if self.overall.is_some() {
                    return Err(RecordError::NotAllowed {
                        field: "overall",
                        phase,
                    });
                }
                triplet
                    .iter()
                    .try_for_each(|&(field, value)| check(field, value, 3))
            }
            other => Err(RecordError::Phase(other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_contracts() {
        assert!(AnnotationRecord::phase_one(1, "A", 5).validate().is_ok());
        assert!(AnnotationRecord::phase_two(1, "A", (2, 3, 2))
            .validate()
            .is_ok());

        let mut rec = AnnotationRecord::phase_one(1, "A", 3);
        rec.colloquialism = Some(2);
        assert_eq!(rec.validate().unwrap_err().field(), "colloquialism");

        let err = AnnotationRecord::phase_one(1, "A", 6)
            .validate()
            .unwrap_err();
        assert_eq!(err.field(), "overall");
        let err = AnnotationRecord::phase_two(1, "A", (2, 0, 2))
            .validate()
            .unwrap_err();
        assert_eq!(err.field(), "intelligibility");

        let mut rec = AnnotationRecord::phase_two(1, "A", (1, 1, 1));
        rec.coherence = None;
        assert_eq!(rec.validate().unwrap_err().field(), "coherence");
        rec.phase = 3;
        assert_eq!(rec.validate().unwrap_err().field(), "phase");
    }

    #[test]
    fn json_round_trip() {
        let rec = AnnotationRecord::phase_two(7, "B", (2, 3, 2));
        let json = serde_json::to_string(&rec).unwrap();
        assert!(!json.contains("overall"));
        let back: AnnotationRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);

        let minimal: AnnotationRecord =
            serde_json::from_str(r#"{"task_id":1,"annotator_id":"A","phase":1,"overall":4}"#)
                .unwrap();
        assert!(minimal.validate().is_ok());
    }
}
