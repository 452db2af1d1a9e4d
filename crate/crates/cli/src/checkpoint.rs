//! Append-only JSON-lines checkpoints for long scans.
//!
//! Every record is a complete snapshot: the last readable line is all that
//! is needed to resume. A torn final line (crash mid-write) is ignored.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rezeta::scan::NegativeWindow;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub schema: u32,
    /// The full scan range `[t_lo, t_hi]`.
    pub range: (f64, f64),
    pub coarse_step: f64,
    pub refine_tol: f64,
    pub chunk_len: u64,
    /// Chunks `0..next_chunk` are done.
    pub next_chunk: u64,
    /// Everything below this height has been scanned.
    pub completed_to: f64,
    pub windows: Vec<NegativeWindow>,
    pub evaluations: u64,
    /// Accumulated wall-clock seconds over all sessions.
    pub wall_time: f64,
}

impl CheckpointRecord {
    /// Whether this record belongs to a scan with the given parameters.
    pub fn matches(&self, range: (f64, f64), coarse_step: f64, refine_tol: f64, chunk_len: u64) -> bool {
        self.schema == SCHEMA
            && self.range == range
            && self.coarse_step == coarse_step
            && self.refine_tol == refine_tol
            && self.chunk_len == chunk_len
    }
}

#[derive(Debug)]
pub enum CheckpointError {
    Io(PathBuf, std::io::Error),
    Mismatch(PathBuf),
    NotMonotone { previous: u64, next: u64 },
}

impl std::fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckpointError::Io(p, e) => write!(f, "checkpoint {}: {e}", p.display()),
            CheckpointError::Mismatch(p) => write!(
                f,
                "checkpoint {} was written by a scan with a different range, step, tolerance or chunk length",
                p.display()
            ),
            CheckpointError::NotMonotone { previous, next } => {
                write!(f, "checkpoint would move backwards from chunk {previous} to {next}")
            }
        }
    }
}

impl std::error::Error for CheckpointError {}

/// Last complete record of the file, or `None` if it is missing or empty.
pub fn load_last(path: &Path) -> Result<Option<CheckpointRecord>, CheckpointError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CheckpointError::Io(path.to_owned(), e)),
    };
    let mut last = None;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
        if let Ok(rec) = serde_json::from_str::<CheckpointRecord>(&line) {
            last = Some(rec);
        }
    }
    Ok(last)
}

/// Appends records, refusing any that would move the completed range back.
pub struct CheckpointWriter {
    path: PathBuf,
    file: File,
    last_chunk: u64,
}

impl CheckpointWriter {
    pub fn open(path: &Path, last_chunk: u64) -> Result<Self, CheckpointError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CheckpointError::Io(dir.to_owned(), e))?;
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
        // Terminate a torn line so the next record starts cleanly.
        let len = file.metadata().map_err(|e| CheckpointError::Io(path.to_owned(), e))?.len();
        if len > 0 && !ends_with_newline(path)? {
            file.write_all(b"\n").map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
        }
        Ok(CheckpointWriter {
            path: path.to_owned(),
            file,
            last_chunk,
        })
    }

    pub fn append(&mut self, rec: &CheckpointRecord) -> Result<(), CheckpointError> {
        if rec.next_chunk < self.last_chunk {
            return Err(CheckpointError::NotMonotone {
                previous: self.last_chunk,
                next: rec.next_chunk,
            });
        }
        let mut line = serde_json::to_string(rec).expect("record serializes");
        line.push('\n');
        let io = |e| CheckpointError::Io(self.path.clone(), e);
        self.file.write_all(line.as_bytes()).map_err(io)?;
        self.file.sync_data().map_err(|e| CheckpointError::Io(self.path.clone(), e))?;
        self.last_chunk = rec.next_chunk;
        Ok(())
    }
}

fn ends_with_newline(path: &Path) -> Result<bool, CheckpointError> {
    use std::io::{Read, Seek, SeekFrom};
    let mut f = File::open(path).map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
    f.seek(SeekFrom::End(-1)).map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
    let mut b = [0u8; 1];
    f.read_exact(&mut b).map_err(|e| CheckpointError::Io(path.to_owned(), e))?;
    Ok(b[0] == b'\n')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(next_chunk: u64) -> CheckpointRecord {
        CheckpointRecord {
            schema: SCHEMA,
            range: (100.0, 101.0),
            coarse_step: 0.01,
            refine_tol: 1e-8,
            chunk_len: 10,
            next_chunk,
            completed_to: 100.0 + next_chunk as f64 * 0.1,
            windows: Vec::new(),
            evaluations: next_chunk * 11,
            wall_time: 0.5,
        }
    }

    #[test]
    fn last_record_wins_and_torn_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.jsonl");
        assert_eq!(load_last(&path).unwrap(), None);
        {
            let mut w = CheckpointWriter::open(&path, 0).unwrap();
            w.append(&record(2)).unwrap();
            w.append(&record(4)).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"schema\":1,\"range\":[100.0,").unwrap();
        drop(f);
        assert_eq!(load_last(&path).unwrap(), Some(record(4)));
        let mut w = CheckpointWriter::open(&path, 4).unwrap();
        w.append(&record(6)).unwrap();
        assert_eq!(load_last(&path).unwrap(), Some(record(6)));
    }

    #[test]
    fn refuses_to_go_backwards() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.jsonl");
        let mut w = CheckpointWriter::open(&path, 0).unwrap();
        w.append(&record(3)).unwrap();
        assert!(matches!(w.append(&record(2)), Err(CheckpointError::NotMonotone { .. })));
    }

    #[test]
    fn parameters_must_match() {
        let r = record(1);
        assert!(r.matches((100.0, 101.0), 0.01, 1e-8, 10));
        assert!(!r.matches((100.0, 101.5), 0.01, 1e-8, 10));
        assert!(!r.matches((100.0, 101.0), 0.005, 1e-8, 10));
    }
}
