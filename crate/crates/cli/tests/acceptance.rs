//! Acceptance battery: one line per criterion with its measured runtime.
//!
//! Criterion 8's product clause cannot hold (the product tends to 0, not to
//! the ζ ratio). It is run as specified and reported as FAIL; the target only
//! exits nonzero if some other criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};
use ultrametra_cli::check::{run_one, Suite, SuiteReport};

const SEED: u64 = 0;

/// Criteria whose failure is expected and documented.
const UNATTAINABLE: &[&str] = &["Π_{p≤10^5} A_p(2, 2.5) vs ζ ratio"];

struct Line {
    number: u32,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    limit: Duration,
    notes: Vec<String>,
    /// Failing findings, and whether each is a documented unattainable one.
    failures: Vec<(String, bool)>,
}

fn suite_criterion(number: u32, title: &'static str, suite: Suite, limit_s: u64) -> Line {
    let start = Instant::now();
    let report: SuiteReport = run_one(suite, SEED);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for f in &report.findings {
        if !f.passed {
            let known = UNATTAINABLE.contains(&f.name.as_str());
            failures.push((f.name.clone(), known));
            notes.push(format!("FAIL {}: measured {:e}, limit {:?}; {}", f.name, f.measured, f.limit, f.detail));
        } else {
            notes.push(format!("ok   {}: {:e}", f.name, f.measured));
        }
    }
    Line { number, title, passed: report.passed && elapsed <= limit, elapsed, limit, notes, failures }
}

fn determinism() -> Line {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut notes = Vec::new();
    let mut identical = true;
    for seed in ["0", "7"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("report-{seed}-{run}.json"));
            let argv = ["ultrametra", "check", "all", "--seed", seed, "--out", path.to_str().unwrap()];
            let code = ultrametra_cli::run_with(argv, &mut std::io::sink(), &mut std::io::sink());
            outputs.push((code, std::fs::read(&path).unwrap_or_default()));
        }
        let same = outputs[0] == outputs[1] && !outputs[0].1.is_empty();
        notes.push(format!("seed {seed}: {} bytes, identical: {same}", outputs[0].1.len()));
        identical &= same;
    }
    Line {
        number: 10,
        title: "determinism of check reports",
        passed: identical,
        elapsed: start.elapsed(),
        limit: Duration::MAX,
        notes,
        failures: if identical { vec![] } else { vec![("byte-identical reruns".into(), false)] },
    }
}

fn main() -> ExitCode {
    let lines = vec![
        suite_criterion(1, "adelic identities", Suite::Adelic, 5),
        suite_criterion(2, "factorial series", Suite::Series, 2),
        suite_criterion(3, "invariant summation", Suite::Invariant, 5),
        suite_criterion(4, "wavelet orthonormality", Suite::Wavelets, 30),
        suite_criterion(5, "Vladimirov spectra and heat flow", Suite::Vladimirov, 60),
        suite_criterion(6, "tree operators and Gibbs stationarity", Suite::Tree, 30),
        suite_criterion(7, "iid convergence", Suite::Iid, 10),
        suite_criterion(8, "string amplitudes", Suite::Amplitudes, 60),
        suite_criterion(9, "genetic code", Suite::Genetic, 5),
        determinism(),
    ];

    let mut unexpected = 0;
    for l in &lines {
        let time = if l.limit == Duration::MAX {
            format!("{:.2} s", l.elapsed.as_secs_f64())
        } else {
            format!("{:.2} s, limit {} s", l.elapsed.as_secs_f64(), l.limit.as_secs())
        };
        println!("criterion {:>2}: {} {} ({time})", l.number, if l.passed { "PASS" } else { "FAIL" }, l.title);
        for n in &l.notes {
            println!("    {n}");
        }
        let over_time = l.elapsed > l.limit;
        if over_time || l.failures.iter().any(|(_, known)| !known) {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|l| l.passed).count();
    println!("{passed}/{} criteria pass", lines.len());
    if unexpected > 0 {
        println!("{unexpected} criteria failed beyond the documented unattainable clause");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
