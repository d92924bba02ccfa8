//! Acceptance criterion 9: scoring a 100,000-record synthetic JSONL via
//! stdin streams with memory independent of record count and preserves
//! input order. Peak RSS comes from wait4's rusage on the child process.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

fn spawn_score(workers: &str) -> std::process::Child {
    Command::new(env!("CARGO_BIN_EXE_rewardlab"))
        .args(["score", "--workers", workers])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn rewardlab")
}

fn record(i: usize) -> String {
    // Every third record carries a reference chain so the semantic path
    // and the embedding cache churn under load.
    let letter = ["A", "B", "C", "D"][i % 4];
    if i % 3 == 0 {
        format!(
            "{{\"id\":\"r{i}\",\"completion\":\"<think>b{i}</think>\\n<answer>{letter}</answer>\",\"ground_truth\":\"{letter}\",\"candidates\":[\"A\",\"B\",\"C\",\"D\"],\"reasoning_reference\":\"bước {i} rồi chọn {letter}\"}}\n"
        )
    } else {
        format!(
            "{{\"id\":\"r{i}\",\"completion\":\"<think>b{i}</think>\\n<answer>{letter}</answer>\",\"ground_truth\":\"{letter}\",\"candidates\":[\"A\",\"B\",\"C\",\"D\"]}}\n"
        )
    }
}

/// Stream `count` records through `score`, verify order, return the
/// child's peak RSS in kilobytes.
fn run_streaming(count: usize) -> i64 {
    let mut child = spawn_score("2");
    let pid = child.id() as i32;

    let mut stdin = child.stdin.take().unwrap();
    let writer = std::thread::spawn(move || {
        for i in 0..count {
            stdin.write_all(record(i).as_bytes()).unwrap();
        }
    });
    let mut stderr = child.stderr.take().unwrap();
    let stderr_drain = std::thread::spawn(move || {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut stderr, &mut buf).unwrap();
        buf
    });

    let stdout = BufReader::new(child.stdout.take().unwrap());
    let mut seen = 0usize;
    for line in stdout.lines() {
        let line = line.unwrap();
        let row: serde_json::Value = serde_json::from_str(&line).unwrap();
        let id = row["id"].as_str().unwrap();
        assert_eq!(id, format!("r{seen}"), "order broken at record {seen}");
        seen += 1;
    }
    assert_eq!(seen, count, "lost records");
    writer.join().unwrap();
    let errors = stderr_drain.join().unwrap();
    assert!(errors.is_empty(), "unexpected diagnostics: {errors}");

    let mut status: libc::c_int = 0;
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let reaped = unsafe { libc::wait4(pid, &mut status, 0, &mut usage) };
    assert_eq!(reaped, pid, "wait4 failed");
    assert!(
        libc::WIFEXITED(status) && libc::WEXITSTATUS(status) == 0,
        "child failed: status {status}"
    );
    // ru_maxrss is in kilobytes on Linux.
    usage.ru_maxrss
}

#[test]
fn criterion_9_streaming_constant_memory_and_order() {
    let start = std::time::Instant::now();
    let rss_small = run_streaming(10_000);
    let rss_large = run_streaming(100_000);

    // Ten times the records must not cost more than a fixed slack over
    // the small run: the pipeline holds only worker-pool buffers plus the
    // bounded embedding cache.
    let slack_kb = 64 * 1024;
    assert!(
        rss_large <= rss_small + slack_kb,
        "peak RSS grew with record count: {rss_small} KB -> {rss_large} KB"
    );
    println!(
        "acceptance 9 (streaming 100k records: order preserved, peak RSS {} KB vs {} KB at 10k): PASS in {:?}",
        rss_large,
        rss_small,
        start.elapsed()
    );
}
