use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Mutex, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{aggregate_scores, AnnotationRecord, RecordError, ScoreSummary};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("annotator `{0}` is not registered")]
    UnknownAnnotator(String),
    #[error("task {0} is not in the pool")]
    UnknownTask(u64),
    #[error("phase 2 of task {task_id} is locked until phase 1 is recorded")]
    PhaseLocked { task_id: u64 },
    #[error(transparent)]
    Invalid(#[from] RecordError),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {message}")]
    Log {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: u64,
    pub sentence: String,
}

/// Draws `size` sentences uniformly without replacement (all when `None`) and
/// numbers them from 1 in corpus order.
pub fn sample_pool(sentences: &[String], size: Option<usize>, seed: u64) -> Vec<Task> {
    let amount = size.unwrap_or(sentences.len()).min(sentences.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, sentences.len(), amount).into_vec();
    picked.sort_unstable();
    picked
        .into_iter()
        .zip(1..)
        .map(|(i, task_id)| Task {
            task_id,
            sentence: sentences[i].clone(),
        })
        .collect()
}

/// Order in which an annotator's outstanding work is served.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueuePolicy {
    /// Phase 1 over the whole pool, then phase 2.
    #[default]
    PhaseOneFirst,
    /// Both phases of a task before the next task.
    TaskMajor,
}

impl FromStr for QueuePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phase_one_first" | "phase-one-first" => Ok(QueuePolicy::PhaseOneFirst),
            "task_major" | "task-major" => Ok(QueuePolicy::TaskMajor),
            other => Err(format!("unknown queue policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextTask {
    pub task_id: u64,
    pub phase: u8,
    pub sentence: String,
}

/// A current record plus whether it superseded an earlier one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportRecord {
    #[serde(flatten)]
    pub record: AnnotationRecord,
    #[serde(default)]
    pub replaced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accepted {
    pub replaced: bool,
}

type Key = (u64, String, u8);

#[derive(Debug, Default)]
struct State {
    roster: BTreeSet<String>,
    records: BTreeMap<Key, ExportRecord>,
}

impl State {
    fn done(&self, task_id: u64, annotator: &str, phase: u8) -> bool {
        self.records
            .contains_key(&(task_id, annotator.to_string(), phase))
    }

    fn insert(&mut self, record: AnnotationRecord) -> bool {
        self.roster.insert(record.annotator_id.clone());
        let replaced = self.records.contains_key(&record.key());
        let prior = self.records.get(&record.key()).is_some_and(|r| r.replaced);
        self.records.insert(
            record.key(),
            ExportRecord {
                record,
                replaced: replaced || prior,
            },
        );
        replaced
    }
}

/// Task pool, annotator roster and judgments. Appends go through one writer;
/// reads take a shared lock.
#[derive(Debug)]
pub struct AnnotationStore {
    tasks: Vec<Task>,
    policy: QueuePolicy,
    state: RwLock<State>,
    log: Mutex<Option<(PathBuf, File)>>,
}

impl AnnotationStore {
    /// Store without persistence.
    pub fn in_memory(mut tasks: Vec<Task>, policy: QueuePolicy) -> Self {
        tasks.sort_by_key(|t| t.task_id);
        AnnotationStore {
            tasks,
            policy,
            state: RwLock::new(State::default()),
            log: Mutex::new(None),
        }
    }

    /// Store backed by the JSON-lines log at `path`, replaying what is there.
    /// An unterminated final line (an interrupted append) is dropped.
    pub fn open(
        tasks: Vec<Task>,
        policy: QueuePolicy,
        path: impl AsRef<Path>,
    ) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let shown = path.display().to_string();
        let io = |source| StoreError::Io {
            path: shown.clone(),
            source,
        };
        let store = AnnotationStore::in_memory(tasks, policy);
        let mut valid_len = 0u64;
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(io)?;
            let mut state = store.state.write().expect("state lock");
            for (i, line) in text.split_inclusive('\n').enumerate() {
                if !line.ends_with('\n') {
                    break;
                }
                valid_len += line.len() as u64;
                if line.trim().is_empty() {
                    continue;
                }
                let record: AnnotationRecord =
                    serde_json::from_str(line).map_err(|e| StoreError::Log {
                        path: shown.clone(),
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                state.insert(record);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io)?;
        if file.metadata().map_err(io)?.len() != valid_len {
            file.set_len(valid_len).map_err(io)?;
        }
        *store.log.lock().expect("log lock") = Some((path, file));
        Ok(store)
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn policy(&self) -> QueuePolicy {
        self.policy
    }

    pub fn register(&self, annotator: &str) -> Result<(), RecordError> {
        if annotator.trim().is_empty() {
            return Err(RecordError::EmptyAnnotator);
        }
        self.state
            .write()
            .expect("state lock")
            .roster
            .insert(annotator.to_string());
        Ok(())
    }

    pub fn is_registered(&self, annotator: &str) -> bool {
        self.state
            .read()
            .expect("state lock")
            .roster
            .contains(annotator)
    }

    pub fn roster(&self) -> Vec<String> {
        self.state
            .read()
            .expect("state lock")
            .roster
            .iter()
            .cloned()
            .collect()
    }

    /// Lowest-id outstanding (task, phase) under the queue policy.
    pub fn next_task(&self, annotator: &str) -> Result<Option<NextTask>, StoreError> {
        let state = self.state.read().expect("state lock");
        if !state.roster.contains(annotator) {
            return Err(StoreError::UnknownAnnotator(annotator.to_string()));
        }
        let pending = |t: &Task, phase| {
            let open = !state.done(t.task_id, annotator, phase)
                && (phase == 1 || state.done(t.task_id, annotator, 1));
            open.then(|| NextTask {
                task_id: t.task_id,
                phase,
                sentence: t.sentence.clone(),
            })
        };
        let next = match self.policy {
            QueuePolicy::PhaseOneFirst => self
                .tasks
                .iter()
                .find_map(|t| pending(t, 1))
                .or_else(|| self.tasks.iter().find_map(|t| pending(t, 2))),
            QueuePolicy::TaskMajor => self
                .tasks
                .iter()
                .find_map(|t| pending(t, 1).or_else(|| pending(t, 2))),
        };
        Ok(next)
    }

    /// Validates, appends to the log, then applies. A repeated
    /// (task, annotator, phase) replaces the earlier record.
    pub fn record_score(&self, record: AnnotationRecord) -> Result<Accepted, StoreError> {
        record.validate()?;
        let mut log = self.log.lock().expect("log lock");
        {
            let state = self.state.read().expect("state lock");
            if !state.roster.contains(&record.annotator_id) {
                return Err(StoreError::UnknownAnnotator(record.annotator_id));
            }
            if self
                .tasks
                .binary_search_by_key(&record.task_id, |t| t.task_id)
                .is_err()
            {
                return Err(StoreError::UnknownTask(record.task_id));
            }
            if record.phase == 2 && !state.done(record.task_id, &record.annotator_id, 1) {
                return Err(StoreError::PhaseLocked {
                    task_id: record.task_id,
                });
            }
        }
        if let Some((path, file)) = log.as_mut() {
            let mut line = serde_json::to_string(&record).expect("record serializes");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.sync_data())
                .map_err(|source| StoreError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
        }
        let replaced = self.state.write().expect("state lock").insert(record);
        Ok(Accepted { replaced })
    }

    /// Current records ordered by task, annotator, phase.
    pub fn records(&self) -> Vec<AnnotationRecord> {
        self.export().into_iter().map(|r| r.record).collect()
    }

    pub fn export(&self) -> Vec<ExportRecord> {
        self.state
            .read()
            .expect("state lock")
            .records
            .values()
            .cloned()
            .collect()
    }

    pub fn export_jsonl(&self) -> String {
        self.export()
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }

    pub fn stats(&self) -> ScoreSummary {
        let state = self.state.read().expect("state lock");
        aggregate_scores(state.records.values().map(|r| &r.record))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(n: u64) -> Vec<Task> {
        (1..=n)
            .map(|task_id| Task {
                task_id,
                sentence: format!("s{task_id}"),
            })
            .collect()
    }

    fn served(store: &AnnotationStore, who: &str) -> Option<(u64, u8)> {
        store.next_task(who).unwrap().map(|t| (t.task_id, t.phase))
    }

    #[test]
    fn phase_one_first_queue() {
        let store = AnnotationStore::in_memory(pool(3), QueuePolicy::PhaseOneFirst);
        store.register("A").unwrap();
        assert_eq!(served(&store, "A"), Some((1, 1)));
        store
            .record_score(AnnotationRecord::phase_one(1, "A", 4))
            .unwrap();
        assert_eq!(served(&store, "A"), Some((2, 1)));
    }

    #[test]
    fn task_major_queue() {
        let store = AnnotationStore::in_memory(pool(3), QueuePolicy::TaskMajor);
        store.register("A").unwrap();
        store
            .record_score(AnnotationRecord::phase_one(1, "A", 4))
            .unwrap();
        assert_eq!(served(&store, "A"), Some((1, 2)));
    }

    #[test]
    fn exhausted_pool() {
        let store = AnnotationStore::in_memory(pool(2), QueuePolicy::PhaseOneFirst);
        store.register("A").unwrap();
        for t in 1..=2 {
            store
                .record_score(AnnotationRecord::phase_one(t, "A", 3))
                .unwrap();
            store
                .record_score(AnnotationRecord::phase_two(t, "A", (1, 2, 3)))
                .unwrap();
        }
        assert_eq!(served(&store, "A"), None);
    }

    #[test]
    fn registration_and_locks() {
        let store = AnnotationStore::in_memory(pool(2), QueuePolicy::PhaseOneFirst);
        assert!(matches!(
            store.next_task("Z"),
            Err(StoreError::UnknownAnnotator(_))
        ));
        store.register("A").unwrap();
        assert!(matches!(
            store.record_score(AnnotationRecord::phase_two(1, "A", (1, 1, 1))),
            Err(StoreError::PhaseLocked { task_id: 1 })
        ));
        assert!(matches!(
            store.record_score(AnnotationRecord::phase_one(9, "A", 1)),
            Err(StoreError::UnknownTask(9))
        ));
        assert!(matches!(
            store.record_score(AnnotationRecord::phase_one(1, "A", 9)),
            Err(StoreError::Invalid(_))
        ));
    }

    #[test]
    fn duplicates_replace_and_flag() {
        let store = AnnotationStore::in_memory(pool(2), QueuePolicy::PhaseOneFirst);
        store.register("A").unwrap();
        assert!(
            !store
                .record_score(AnnotationRecord::phase_one(1, "A", 2))
                .unwrap()
                .replaced
        );
        assert!(
            store
                .record_score(AnnotationRecord::phase_one(1, "A", 5))
                .unwrap()
                .replaced
        );
        let export = store.export();
        assert_eq!(export.len(), 1);
        assert!(export[0].replaced);
        assert_eq!(export[0].record.overall, Some(5));
        assert!(store.export_jsonl().contains("\"replaced\":true"));
    }

    #[test]
    fn replay_rebuilds_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let before = {
            let store = AnnotationStore::open(pool(3), QueuePolicy::PhaseOneFirst, &path).unwrap();
            store.register("A").unwrap();
            store.register("B").unwrap();
            store
                .record_score(AnnotationRecord::phase_one(1, "A", 2))
                .unwrap();
            store
                .record_score(AnnotationRecord::phase_one(1, "A", 4))
                .unwrap();
            store
                .record_score(AnnotationRecord::phase_one(2, "B", 3))
                .unwrap();
            store
                .record_score(AnnotationRecord::phase_two(2, "B", (3, 2, 1)))
                .unwrap();
            (store.stats(), store.export())
        };
        // simulate a torn append
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"task_id\":3,\"anno").unwrap();
        drop(f);

        let store = AnnotationStore::open(pool(3), QueuePolicy::PhaseOneFirst, &path).unwrap();
        assert_eq!((store.stats(), store.export()), before);
        assert!(store.is_registered("B"));
        store
            .record_score(AnnotationRecord::phase_one(3, "A", 1))
            .unwrap();
        let reopened = AnnotationStore::open(pool(3), QueuePolicy::PhaseOneFirst, &path).unwrap();
        assert_eq!(reopened.records().len(), 4);
    }

    #[test]
    fn corrupt_log_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        std::fs::write(&path, "not json\n").unwrap();
        match AnnotationStore::open(pool(1), QueuePolicy::PhaseOneFirst, &path).unwrap_err() {
            StoreError::Log { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pool_sampling() {
        let sentences: Vec<String> = (0..50).map(|i| format!("s{i}")).collect();
        let a = sample_pool(&sentences, Some(5), 7);
        assert_eq!(a, sample_pool(&sentences, Some(5), 7));
        assert_eq!(
            a.iter().map(|t| t.task_id).collect::<Vec<_>>(),
            [1, 2, 3, 4, 5]
        );
        assert_eq!(sample_pool(&sentences, None, 0).len(), 50);
        assert_eq!(sample_pool(&sentences, Some(500), 0).len(), 50);
    }
}
