//! Acceptance criteria 1–12 at the stated sizes, one line per criterion.

use std::process::Command;
use std::time::Instant;

use orbitope_cli::verify::{criterion, runtime_limit, Suite, NAMES};

fn verify_fast(path: &std::path::Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_orbitope"))
        .args(["verify", "--suite", "fast", "--seed", "0", "--out"])
        .arg(path)
        .stderr(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn main() {
    let mut failed = Vec::new();
    for id in 1..=11 {
        let t = Instant::now();
        let r = criterion(id, Suite::Full, 0);
        let elapsed = t.elapsed();
        let in_time = elapsed <= runtime_limit(id);
        let pass = r.pass && in_time;
        println!(
            "criterion {id:>2} {:<28} {}  {:.1}s/{}s  {}",
            r.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            runtime_limit(id).as_secs(),
            r.detail
        );
        if !pass {
            failed.push(id);
        }
    }

    let t = Instant::now();
    let dir = tempfile::tempdir().expect("temp dir");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let ran = verify_fast(&a) && verify_fast(&b);
    let identical = ran && std::fs::read(&a).ok() == std::fs::read(&b).ok();
    println!(
        "criterion 12 {:<28} {}  {:.1}s  verify --suite fast twice: exit 0 {ran}, byte-identical {identical}",
        NAMES[11],
        if identical { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64()
    );
    if !identical {
        failed.push(12);
    }

    if failed.is_empty() {
        println!("acceptance: 12/12 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
