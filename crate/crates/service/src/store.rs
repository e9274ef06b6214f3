//! File-backed persistence: one JSON document per entity under a data
//! directory.
//!
//! ```text
//! <data-dir>/scenarios/<id>.json
//! <data-dir>/statements/<id>.json
//! <data-dir>/evaluations/<scenario-id>/<evaluation-id>.json
//! ```
//!
//! Every write goes to a staged temporary file in the target directory and is
//! renamed over the destination, so readers only ever see complete documents.
//! Staged files left behind by a crash are removed when the store is opened.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Utc;
use market_entry_core::FinancialStatements;
use parking_lot::Mutex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::scenario::{evaluate_scenario, EvaluationRecord, Scenario, ScenarioDraft};

const STAGED_PREFIX: &str = ".staged-";

/// A document written to a temporary file but not yet renamed into place.
pub struct StagedWrite {
    file: tempfile::NamedTempFile,
    target: PathBuf,
}

impl StagedWrite {
    pub fn new(target: &Path, bytes: &[u8]) -> std::io::Result<Self> {
        let dir = target.parent().expect("target has a parent directory");
        fs::create_dir_all(dir)?;
        let mut file = tempfile::Builder::new()
            .prefix(STAGED_PREFIX)
            .suffix(".json")
            .tempfile_in(dir)?;
        file.write_all(bytes)?;
        file.as_file().sync_all()?;
        Ok(StagedWrite {
            file,
            target: target.to_path_buf(),
        })
    }

    pub fn staged_path(&self) -> &Path {
        self.file.path()
    }

    pub fn commit(self) -> std::io::Result<()> {
        self.file.persist(&self.target).map_err(|e| e.error)?;
        if let Some(dir) = self.target.parent() {
            // directory fsync makes the rename durable; not supported everywhere
            if let Ok(d) = fs::File::open(dir) {
                let _ = d.sync_all();
            }
        }
        Ok(())
    }

    /// Leaves the staged file on disk without renaming it, as a process
    /// killed at this point would.
    pub fn abandon(self) -> PathBuf {
        let (_, path) = self.file.keep().expect("keep staged file");
        path
    }
}

pub fn atomic_write(target: &Path, bytes: &[u8]) -> std::io::Result<()> {
    StagedWrite::new(target, bytes)?.commit()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatementsSummary {
    pub statements_id: String,
    pub company_id: String,
    pub currency: String,
    pub periods: Vec<chrono::NaiveDate>,
    pub item_count: usize,
}

impl StatementsSummary {
    pub fn new(statements_id: String, st: &FinancialStatements) -> Self {
        StatementsSummary {
            statements_id,
            company_id: st.company_id.clone(),
            currency: st.currency.clone(),
            periods: st.periods.clone(),
            item_count: st.items.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
}

pub struct Store {
    root: PathBuf,
    /// Serializes writers; readers go straight to the files.
    writes: Mutex<()>,
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        for sub in ["scenarios", "statements", "evaluations"] {
            fs::create_dir_all(root.join(sub))?;
        }
        let store = Store {
            root,
            writes: Mutex::new(()),
        };
        store.sweep_staged(&store.root.clone())?;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn sweep_staged(&self, dir: &Path) -> Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let path = entry.path();
            if entry.file_type()?.is_dir() {
                self.sweep_staged(&path)?;
            } else if entry
                .file_name()
                .to_string_lossy()
                .starts_with(STAGED_PREFIX)
            {
                tracing::warn!(path = %path.display(), "removing interrupted write");
                fs::remove_file(&path)?;
            }
        }
        Ok(())
    }

    pub fn scenario_path(&self, id: &str) -> PathBuf {
        self.root.join("scenarios").join(format!("{id}.json"))
    }

    fn statements_path(&self, id: &str) -> PathBuf {
        self.root.join("statements").join(format!("{id}.json"))
    }

    fn evaluations_dir(&self, scenario_id: &str) -> PathBuf {
        self.root.join("evaluations").join(scenario_id)
    }

    fn read<T: DeserializeOwned>(&self, path: &Path, what: &'static str, id: &str) -> Result<T> {
        if !valid_id(id) {
            return Err(ServiceError::NotFound {
                what,
                id: id.to_string(),
            });
        }
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ServiceError::NotFound {
                    what,
                    id: id.to_string(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        serde_json::from_str(&text).map_err(|e| ServiceError::Corrupt {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<()> {
        let bytes = serde_json::to_vec_pretty(value).expect("records serialize");
        atomic_write(path, &bytes)?;
        Ok(())
    }

    pub fn create_scenario(&self, draft: ScenarioDraft) -> Result<Scenario> {
        draft.validate()?;
        if let Some(id) = &draft.statements_id {
            self.get_statements(id)?;
        }
        let now = Utc::now();
        let scenario = Scenario {
            scenario_id: new_id(),
            version: 1,
            created_at: now,
            updated_at: now,
            draft,
        };
        let _guard = self.writes.lock();
        self.write_json(&self.scenario_path(&scenario.scenario_id), &scenario)?;
        Ok(scenario)
    }

    pub fn get_scenario(&self, id: &str) -> Result<Scenario> {
        self.read(&self.scenario_path(id), "scenario", id)
    }

    /// Replaces the scenario if `version` is current; bumps the version.
    pub fn update_scenario(
        &self,
        id: &str,
        version: u64,
        draft: ScenarioDraft,
    ) -> Result<Scenario> {
        draft.validate()?;
        if let Some(sid) = &draft.statements_id {
            self.get_statements(sid)?;
        }
        let _guard = self.writes.lock();
        let current = self.get_scenario(id)?;
        if current.version != version {
            return Err(ServiceError::Conflict {
                given: version,
                current: current.version,
            });
        }
        let updated = Scenario {
            version: current.version + 1,
            updated_at: Utc::now(),
            draft,
            ..current
        };
        self.write_json(&self.scenario_path(id), &updated)?;
        Ok(updated)
    }

    /// Scenarios ordered by creation time, then id.
    pub fn list_scenarios(&self, offset: usize, limit: usize) -> Result<Page<Scenario>> {
        let mut all = Vec::new();
        for entry in fs::read_dir(self.root.join("scenarios"))? {
            let path = entry?.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if stem.starts_with(STAGED_PREFIX) || path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            all.push(self.get_scenario(stem)?);
        }
        all.sort_by(|a, b| (a.created_at, &a.scenario_id).cmp(&(b.created_at, &b.scenario_id)));
        let total = all.len();
        let items = all.into_iter().skip(offset).take(limit).collect();
        Ok(Page {
            items,
            total,
            offset,
            limit,
        })
    }

    pub fn put_statements(&self, statements: &FinancialStatements) -> Result<StatementsSummary> {
        let id = new_id();
        let _guard = self.writes.lock();
        atomic_write(
            &self.statements_path(&id),
            statements.to_json_string().as_bytes(),
        )?;
        Ok(StatementsSummary::new(id, statements))
    }

    pub fn get_statements(&self, id: &str) -> Result<FinancialStatements> {
        self.read(&self.statements_path(id), "statements", id)
    }

    pub fn statements_for(&self, scenario: &Scenario) -> Result<Option<FinancialStatements>> {
        scenario
            .draft
            .statements_id
            .as_deref()
            .map(|id| self.get_statements(id))
            .transpose()
    }

    /// Evaluates the scenario's chosen method and appends the record to its history.
    pub fn evaluate(&self, scenario_id: &str) -> Result<EvaluationRecord> {
        let scenario = self.get_scenario(scenario_id)?;
        let statements = self.statements_for(&scenario)?;
        let record = evaluate_scenario(&scenario, statements.as_ref(), Utc::now())?;
        let path = self
            .evaluations_dir(scenario_id)
            .join(format!("{}.json", record.evaluation_id));
        let _guard = self.writes.lock();
        if path.exists() {
            return Err(ServiceError::Corrupt {
                path: path.display().to_string(),
                reason: "evaluation record already exists".into(),
            });
        }
        self.write_json(&path, &record)?;
        Ok(record)
    }

    /// Evaluation history, oldest first.
    pub fn evaluations(&self, scenario_id: &str) -> Result<Vec<EvaluationRecord>> {
        self.get_scenario(scenario_id)?;
        let dir = self.evaluations_dir(scenario_id);
        let mut records: Vec<EvaluationRecord> = Vec::new();
        let Ok(entries) = fs::read_dir(&dir) else {
            return Ok(records);
        };
        for entry in entries {
            let path = entry?.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if stem.starts_with(STAGED_PREFIX) {
                continue;
            }
            records.push(self.read(&path, "evaluation", stem)?);
        }
        records.sort_by(|a, b| {
            (a.evaluated_at, &a.evaluation_id).cmp(&(b.evaluated_at, &b.evaluation_id))
        });
        Ok(records)
    }
}
