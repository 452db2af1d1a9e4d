//! A scan stopped and resumed from its checkpoint must give the same
//! windows as one uninterrupted run.

use std::path::Path;
use std::process::{Command, Output};

use rezeta_cli::checkpoint::CheckpointRecord;
use serde_json::Value;

const RANGE: [&str; 4] = ["--from", "682112.5", "--to", "682113.5"];

fn scan(extra: &[&str], dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rezeta"));
    cmd.arg("scan")
        .args(RANGE)
        .args(["--emit", "json", "--threads", "1", "--chunk-len", "10"])
        .args(extra)
        .env_remove("REZETA_THREADS")
        .env_remove("REZETA_CHECKPOINT_DIR");
    if let Some(d) = dir {
        cmd.env("REZETA_CHECKPOINT_DIR", d);
    }
    cmd.output().unwrap()
}

fn report(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn records(path: &Path) -> Vec<CheckpointRecord> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| serde_json::from_str(l).ok())
        .collect()
}

#[test]
fn interrupted_scan_matches_uninterrupted() {
    let reference = report(&scan(&[], None));
    assert_eq!(reference["windows"].as_array().unwrap().len(), 1);

    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("first.jsonl");
    let ck_arg = ck.to_str().unwrap();

    let first = scan(&["--checkpoint", ck_arg, "--stop-after-chunks", "2"], None);
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stdout.is_empty());
    assert!(String::from_utf8_lossy(&first.stderr).contains("stopped at chunk 2 of 10"));

    // The window straddles chunks 3 and 4; stop right inside it.
    let second = scan(&["--checkpoint", ck_arg, "--stop-after-chunks", "2"], None);
    assert!(String::from_utf8_lossy(&second.stderr).contains("resuming from chunk 2"));
    assert!(second.stdout.is_empty());

    // A crash in the middle of a write leaves a torn line.
    std::fs::OpenOptions::new()
        .append(true)
        .open(&ck)
        .and_then(|mut f| std::io::Write::write_all(&mut f, b"{\"schema\":1,\"ran"))
        .unwrap();

    let resumed = report(&scan(&["--checkpoint", ck_arg], None));
    assert_eq!(resumed["windows"], reference["windows"]);
    assert_eq!(resumed["evaluations"], reference["evaluations"]);

    let recs = records(&ck);
    assert!(recs.len() >= 3);
    for pair in recs.windows(2) {
        assert!(pair[1].next_chunk > pair[0].next_chunk);
        assert!(pair[1].completed_to >= pair[0].completed_to);
        assert!(pair[1].evaluations >= pair[0].evaluations);
        assert!(pair[1].windows.len() >= pair[0].windows.len());
        assert!(pair[1].wall_time >= pair[0].wall_time);
    }
    let last = recs.last().unwrap();
    assert_eq!(last.next_chunk, 10);
    assert_eq!(last.completed_to, 682113.5);

    // Running again after completion only replays the checkpoint.
    let again = report(&scan(&["--checkpoint", ck_arg], None));
    assert_eq!(again["windows"], reference["windows"]);
}

#[test]
fn checkpoint_directory_and_parameter_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let stopped = scan(&["--checkpoint", "rel.jsonl", "--stop-after-chunks", "1"], Some(dir.path()));
    assert_eq!(stopped.status.code(), Some(0));
    assert!(dir.path().join("rel.jsonl").exists());

    // A different step cannot continue this checkpoint.
    let clash = scan(&["--checkpoint", "rel.jsonl", "--coarse-step", "0.005"], Some(dir.path()));
    assert_eq!(clash.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&clash.stderr).contains("different range"));

    // Without --checkpoint the directory still gets a default file.
    let auto = scan(&["--stop-after-chunks", "1"], Some(dir.path()));
    assert_eq!(auto.status.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("scan_682112.5_682113.5")), "{names:?}");
}
