//! Acceptance: campaign determinism across worker counts (criterion 14).

use std::path::PathBuf;
use std::process::Command;

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("lpplab_acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criterion_14_worker_count_determinism() {
    let mut files = Vec::new();
    for workers in ["1", "8"] {
        let dir = tmpdir(&format!("workers_{workers}"));
        let out = Command::new(env!("CARGO_BIN_EXE_lpplab"))
            .args([
                "campaign",
                "--experiment",
                "tf_tail",
                "--n-values",
                "150,300",
                "--t-values",
                "0.5,1",
                "--replicas",
                "16",
                "--seed",
                "424242",
                "--k-trunc",
                "4",
                "--workers",
                workers,
                "--out-dir",
                dir.to_str().unwrap(),
            ])
            .output()
            .expect("spawn lpplab");
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        files.push((
            std::fs::read(dir.join("tf_tail_results.csv")).unwrap(),
            std::fs::read(dir.join("tf_tail_summary.json")).unwrap(),
        ));
    }
    let pass = files[0] == files[1];
    println!(
        "ACCEPTANCE 14 worker-count determinism: {} (results and summaries byte-identical across --workers 1 and 8)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "outputs differ between --workers 1 and --workers 8");
}
