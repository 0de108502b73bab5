use serde_json::Value;
use ultrametra_cli::{run_with, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ultrametra(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ultrametra").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", r.stdout))
}

fn vmc_table() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/vmc.tsv").to_string()
}

#[test]
fn series_sum_gives_minus_one() {
    let r = ultrametra(&["series", "sum", "--p", "2", "--K", "10"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["residue"], "1023");
    assert_eq!(v["modulus"], "1024");
    assert_eq!(v["value"]["digits"], serde_json::json!(vec![1; 10]));

    let r = ultrametra(&["series", "sum", "--p", "5", "--K", "8"]);
    let v = json(&r);
    assert_eq!(v["residue"], (5u64.pow(8) - 1).to_string());
}

#[test]
fn genetic_check_reports_all_doublets() {
    let table = vmc_table();
    for args in [vec!["genetic", "check"], vec!["genetic", "check", "--table", &table]] {
        let r = ultrametra(&args);
        assert_eq!(r.code, EXIT_OK);
        assert_eq!(r.stderr.trim(), "32/32 doublets consistent");
        let v = json(&r);
        assert_eq!(v["outputs"], 21);
        let mut ter: Vec<&str> = v["ter"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
        ter.sort_unstable();
        assert_eq!(ter, ["AGA", "AGG", "UAA", "UAG"]);
    }
}

#[test]
fn genetic_check_flags_a_broken_table() {
    let tsv = std::fs::read_to_string(vmc_table()).unwrap();
    // Reassigning one codon of a four-fold box breaks that doublet.
    let mut swapped = false;
    let broken: String = tsv
        .lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split('\t').collect();
            if !swapped && cols.len() == 3 && cols[1] == "GCU" {
                cols[2] = "Trp";
                swapped = true;
            }
            cols.join("\t") + "\n"
        })
        .collect();
    assert!(swapped, "table has no GCU row");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.tsv");
    std::fs::write(&path, broken).unwrap();
    let r = ultrametra(&["genetic", "check", "--table", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VALIDATION, "{}", r.stderr);
    assert!(r.stderr.contains("31/32"), "{}", r.stderr);
}

#[test]
fn wavelet_gram_is_identity_and_tolerance_is_enforced() {
    let r = ultrametra(&["wavelet", "gram", "--p", "3", "--range", "2"]);
    assert_eq!(r.code, EXIT_OK);
    let v = json(&r);
    assert!(v["report"]["max_offdiag"].as_f64().unwrap() <= 1e-10);
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-10);

    let r = ultrametra(&["wavelet", "gram", "--p", "3", "--range", "2", "--tol", "1e-30"]);
    assert_eq!(r.code, EXIT_VALIDATION);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["padic", "bogus"],
        vec!["series", "sum", "--p", "4", "--K", "10"],
        vec!["series", "sum", "--p", "two"],
        vec!["genetic", "check", "--table", "/nonexistent/table.tsv"],
        vec!["wavelet", "gram", "--p", "3", "--range", "-1"],
        vec!["check", "nonsense"],
    ] {
        let r = ultrametra(&args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn help_goes_to_stdout_and_succeeds() {
    let r = ultrametra(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("genetic"));
}

#[test]
fn convergence_curve_as_csv() {
    let r = ultrametra(&["tree", "converge", "--p", "2", "--m", "2", "--weights", "1,0,4,0", "--s", "2", "--n-max", "5", "--format", "csv"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let mut rd = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["n", "distance", "scaled", "bound", "violated"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        let scaled: f64 = row[2].parse().unwrap();
        assert!((scaled - 0.6f64.powi(i as i32 + 1)).abs() < 1e-12);
        assert_eq!(&row[4], "false");
    }
}

#[test]
fn commands_without_csv_reject_the_format() {
    let r = ultrametra(&["genetic", "check", "--format", "csv"]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sum.json");
    let r = ultrametra(&["series", "sum", "--p", "3", "--K", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["residue"], "80");
}

#[test]
fn check_reports_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, seed) in ["3", "3", "4"].iter().enumerate() {
        let path = dir.path().join(format!("r{i}.csv"));
        let r = ultrametra(&["check", "iid", "--seed", seed, "--format", "csv", "--out", path.to_str().unwrap()]);
        assert!(r.code == EXIT_OK || r.code == EXIT_VALIDATION);
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_ne!(files[0], files[2]);
}

#[test]
fn failing_suite_exits_with_one() {
    let r = ultrametra(&["check", "amplitudes"]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.stderr.contains("FAIL amplitudes"));
    let v = json(&r);
    let findings = v[0]["findings"].as_array().unwrap();
    assert!(findings.iter().filter(|f| f["passed"] == false).count() == 1);
}

#[test]
fn passing_suite_exits_with_zero() {
    let r = ultrametra(&["check", "genetic", "--seed", "11"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stderr.trim(), "PASS genetic");
}

#[test]
fn amplitude_rational_mode_is_exact() {
    let r = ultrametra(&["amplitude", "closed", "--p", "2", "--a", "2", "--b", "2", "--exact"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("-5/21"), "{}", r.stdout);
}
