use std::path::Path;
use std::process::{Command, Output};

use polaris::io::{CertificateFile, GraphFile, SubspaceSetFile};

fn polaris(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polaris"))
        .args(args)
        .current_dir(dir)
        .env("POLARIS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_exports_dot_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(dir.path(), &["build", "--kind", "symplectic", "-n", "3", "-p", "2", "-k", "1", "--export", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("315 vertices"));
    let dot = std::fs::read_to_string(dir.path().join("symplectic-n3-p2-k1.dot")).unwrap();
    assert!(dot.contains("graph"));
    assert!(!dot.contains("pos="));

    let o = polaris(dir.path(), &["build", "--kind", "pj", "-n", "4", "-k", "1", "-o", "pj.json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("pj.json")).unwrap();
    let g: GraphFile = serde_json::from_str(&text).unwrap();
    assert_eq!(g.order, 24);
    assert_eq!(g.header.seed, 0);
    assert_eq!(serde_json::to_string_pretty(&g).unwrap().trim(), text.trim());
}

#[test]
fn apartment_lists_twelve_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(dir.path(), &["apartment", "-n", "3", "-k", "1", "-o", "apt.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("12 members of level 1"));
    let text = std::fs::read_to_string(dir.path().join("apt.json")).unwrap();
    let file: SubspaceSetFile = serde_json::from_str(&text).unwrap();
    assert_eq!(file.members.len(), 12);
    assert_eq!(serde_json::to_string_pretty(&file).unwrap().trim(), text.trim());
}

#[test]
fn verify_accepts_and_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(
        dir.path(),
        &["verify", "thm4.3", "--kind", "symplectic", "-n", "5", "-k", "2", "-m", "1", "-l", "4", "--generated", "parabolic"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("ACCEPT thm4.3"));
    assert!(out.contains("N: projective dimension 0"));
    let text = std::fs::read_to_string(dir.path().join("certificate.json")).unwrap();
    let cert: CertificateFile = serde_json::from_str(&text).unwrap();
    assert_eq!(cert.base_dim, 0);
    assert_eq!(serde_json::to_string_pretty(&cert).unwrap().trim(), text.trim());
}

#[test]
fn verify_reads_its_own_apartment_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(dir.path(), &["apartment", "-n", "4", "-k", "1", "-o", "apt.json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = polaris(dir.path(), &["verify", "thm4.4", "--input", "apt.json", "-o", "cert.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("N: projective dimension -1"));
}

#[test]
fn perturbed_input_is_rejected_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(
        dir.path(),
        &["verify", "thm4.4", "-n", "4", "-k", "1", "-m", "1", "-l", "4", "--generated", "apartment", "--perturb", "--seed", "5"],
    );
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("REJECT thm4.4"));
    assert!(out.contains("clause: "));
    assert!(!dir.path().join("certificate.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(dir.path(), &["verify", "thm9.9", "-n", "3", "-k", "1", "--generated", "apartment"]);
    assert_eq!(o.status.code(), Some(2));
    let o = polaris(dir.path(), &["build", "--kind", "parabolic", "-n", "3", "-p", "2", "-k", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = polaris(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_truncation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(
        dir.path(),
        &["search", "-n", "3", "-k", "1", "-l", "4", "-m", "1", "--trials", "3", "--budget", "10"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn identical_runs_write_identical_bytes() {
    let runs: Vec<(tempfile::TempDir, Vec<u8>, Vec<u8>)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let o = polaris(
                dir.path(),
                &["search", "-n", "3", "-k", "0", "-l", "3", "--trials", "20", "--seed", "9", "-o", "search.json"],
            );
            assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
            let file = std::fs::read(dir.path().join("search.json")).unwrap();
            (dir, o.stdout, file)
        })
        .collect();
    assert_eq!(runs[0].1, runs[1].1);
    assert_eq!(runs[0].2, runs[1].2);
    let header: serde_json::Value = serde_json::from_slice(&runs[0].2).unwrap();
    assert_eq!(header["header"]["seed"], 9);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaris(dir.path(), &["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
