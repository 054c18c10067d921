//! Append-only JSONL file of verified integer solutions, deduplicated by
//! canonical form.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dioph_core::{verify, CanonicalForm, IntegerSolution};

/// Holds an exclusive lock on the file for as long as it lives.
pub struct SolutionStore {
    path: PathBuf,
    file: File,
    keys: HashSet<String>,
}

impl SolutionStore {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .with_context(|| format!("opening store {}", path.display()))?;
        file.lock().with_context(|| format!("locking store {}", path.display()))?;
        let mut keys = HashSet::new();
        let mut reader = BufReader::new(&file);
        reader.seek(SeekFrom::Start(0))?;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: IntegerSolution = serde_json::from_str(&line)
                .with_context(|| format!("{}:{}: malformed record", path.display(), i + 1))?;
            keys.insert(CanonicalForm::of(&rec).key());
        }
        Ok(SolutionStore { path: path.to_path_buf(), file, keys })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Appends `sol` unless an equivalent record is already stored. Returns
    /// whether a record was written.
    pub fn insert(&mut self, sol: &IntegerSolution) -> Result<bool> {
        if !sol.verified || !verify(sol) {
            bail!("refusing to store an unverified solution ({})", sol.provenance);
        }
        let key = CanonicalForm::of(sol).key();
        if self.keys.contains(&key) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(sol)?;
        line.push('\n');
        self.file.write_all(line.as_bytes()).with_context(|| format!("writing store {}", self.path.display()))?;
        self.keys.insert(key);
        Ok(true)
    }
}
