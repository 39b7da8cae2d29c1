//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p psqm-verify --test acceptance`; append `-- 2 10` to
//! run only criteria 2 and 10.

use std::process::ExitCode;
use std::time::Instant;

use psqm_verify::{Verdict, CRITERIA};

fn run(n: usize, title: &str, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let secs = start.elapsed().as_secs_f64();
    println!(
        "criterion {n:>2} {}: {title}: {} [{secs:.2} s]",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail
    );
    v.pass
}

fn main() -> ExitCode {
    // numeric arguments after `--` select criteria; libtest flags are ignored
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let selected: Vec<usize> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, (title, f)) in CRITERIA.into_iter().enumerate() {
        let n = i + 1;
        if (selected.is_empty() || selected.contains(&n)) && !run(n, title, f) {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("all selected criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
