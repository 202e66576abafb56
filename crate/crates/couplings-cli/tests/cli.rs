//! End-to-end tests of the `couplings` binary: spec'd output pins, exit
//! codes, format round-trips, and determinism.

use couplings::polytope::CouplingSpec;
use couplings::{BigRational, Dist, Joint};
use std::io::Write as _;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_couplings"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn json_of(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        stderr_str(&out)
    );
    serde_json::from_str(&stdout_str(&out)).expect("stdout should be valid JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn rational(text: &str) -> BigRational {
    text.parse().expect("test fixture rational")
}

fn dist(text: &str) -> Dist {
    Dist::new(text.split(',').map(rational).collect()).expect("test fixture dist")
}

/// Rebuild a joint from the emitted `{"rows": [[...]]}` document.
fn joint_from_value(doc: &serde_json::Value) -> Joint {
    let rows = doc["rows"].as_array().expect("rows array");
    let matrix: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .expect("row array")
                .iter()
                .map(|cell| rational(cell.as_str().expect("rational string")))
                .collect()
        })
        .collect();
    Joint::new(matrix).expect("emitted joint should validate")
}

#[test]
fn mec_pin_refining_marginals() {
    let doc = json_of(&["mec", "--p", "1/6,1/3,1/2", "--q", "1/2,1/2", "--alpha", "1"]);
    let objective = doc["objective"].as_f64().unwrap();
    assert!(
        (objective - 1.45915).abs() < 1e-4,
        "objective {objective} should be ~1.45915"
    );
    assert_eq!(doc["vertex"], serde_json::json!(true));
    assert_eq!(doc["certificate"], serde_json::json!("exact"));
    assert_eq!(
        doc["coupling"]["rows"],
        serde_json::json!([["0", "1/6"], ["0", "1/3"], ["1/2", "0"]])
    );
}

#[test]
fn emitted_coupling_reparses_and_lies_in_the_polytope() {
    let doc = json_of(&["mec", "--p", "1/6,1/3,1/2", "--q", "1/2,1/2"]);
    let joint = joint_from_value(&doc["coupling"]);
    let spec = CouplingSpec::both_marginals(dist("1/6,1/3,1/2"), dist("1/2,1/2"));
    assert_eq!(spec.contains(&joint), Ok(true));
}

#[test]
fn mec_csv_is_the_exact_matrix_one_row_per_line() {
    let out = run(&[
        "mec", "--p", "1/6,1/3,1/2", "--q", "1/2,1/2", "--format", "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out), "0,1/6\n0,1/3\n1/2,0\n");
}

#[test]
fn tv_reports_the_exact_rational() {
    let doc = json_of(&["tv", "--p", "1/2,1/2", "--q", "1/4,3/4"]);
    assert_eq!(doc, serde_json::json!({ "tv": "1/4" }));
    let out = run(&["tv", "--p", "1/2,1/2", "--q", "1/4,3/4", "--format", "csv"]);
    assert_eq!(stdout_str(&out), "tv,1/4\n");
}

#[test]
fn maximal_mismatch_equals_total_variation() {
    let doc = json_of(&["maximal", "--p", "1/2,1/2", "--q", "1/4,3/4"]);
    assert_eq!(doc["mismatch"], serde_json::json!("1/4"));
    assert!((doc["objective"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    let joint = joint_from_value(&doc["coupling"]);
    let spec = CouplingSpec::both_marginals(dist("1/2,1/2"), dist("1/4,3/4"));
    assert_eq!(spec.contains(&joint), Ok(true));
}

#[test]
fn subset_sum_yes_with_witness() {
    let doc = json_of(&["reduce", "subset-sum", "--weights", "1,2,3", "--target", "3"]);
    assert_eq!(doc["answer"], serde_json::json!(true));
    let subset: Vec<u64> = doc["certificate"]["subset"]
        .as_array()
        .expect("subset array")
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(subset.iter().sum::<u64>(), 3);
}

#[test]
fn subset_sum_no_still_exits_zero() {
    let out = run(&["reduce", "subset-sum", "--weights", "2,4", "--target", "3"]);
    assert_eq!(exit_code(&out), 0, "a NO answer is still a success");
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["answer"], serde_json::json!(false));
    assert_eq!(doc["certificate"], serde_json::Value::Null);
}

#[test]
fn partition_yes_reports_balanced_sides() {
    let doc = json_of(&["reduce", "partition", "--weights", "3,1,2,2"]);
    assert_eq!(doc["answer"], serde_json::json!(true));
    let sides = doc["certificate"]["sides"].as_array().expect("sides");
    let sum = |side: &serde_json::Value| -> u64 {
        side.as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .sum()
    };
    assert_eq!(sum(&sides[0]), 4);
    assert_eq!(sum(&sides[1]), 4);
}

#[test]
fn three_partition_yes_and_no() {
    let yes = json_of(&[
        "reduce",
        "3partition",
        "--weights",
        "5,6,7,5,6,7",
        "--k",
        "18",
    ]);
    assert_eq!(yes["answer"], serde_json::json!(true));
    let groups = yes["certificate"]["groups"].as_array().expect("groups");
    assert_eq!(groups.len(), 2);
    for group in groups {
        let members = group.as_array().unwrap();
        assert_eq!(members.len(), 3, "each group must hold exactly three");
        let total: u64 = members.iter().map(|v| v.as_u64().unwrap()).sum();
        assert_eq!(total, 18);
    }

    let no = json_of(&[
        "reduce",
        "3partition",
        "--weights",
        "4,4,4,4,4,6",
        "--k",
        "13",
    ]);
    assert_eq!(no["answer"], serde_json::json!(false));
    assert_eq!(no["certificate"], serde_json::Value::Null);
}

#[test]
fn three_partition_window_violation_is_a_usage_error() {
    // Weight 1 is not strictly above k/4 = 1.5, so the instance is invalid.
    let out = run(&["reduce", "3partition", "--weights", "1,2,3", "--k", "6"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("--weights"));
}

#[test]
fn non_normalized_inline_dist_is_a_usage_error() {
    let out = run(&["entropy", "--p", "0.5,0.25"]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_str(&out);
    assert!(err.contains("--p"), "error should name the flag: {err}");
    assert!(err.contains("sum"), "error should explain the failure: {err}");
}

#[test]
fn negative_mass_is_a_usage_error() {
    let out = run(&["entropy", "--p", "3/2,-1/2"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("nonnegative"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["entropy", "--p", "1/2,1/2", "--bogus"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn dist_loads_from_json_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", r#"{"masses": ["1/2", "1/2"]}"#).unwrap();
    let doc = json_of(&["entropy", "--p", file.path().to_str().unwrap()]);
    assert!((doc["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn point_mass_file_has_zero_entropy() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", r#"{"masses": ["1"]}"#).unwrap();
    let doc = json_of(&["entropy", "--p", file.path().to_str().unwrap()]);
    assert_eq!(doc["entropy"].as_f64().unwrap(), 0.0);
}

#[test]
fn float_masses_in_files_are_rejected_for_exactness() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{}", r#"{"masses": [0.5, 0.5]}"#).unwrap();
    let out = run(&["entropy", "--p", file.path().to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("not exact"));
}

#[test]
fn decimal_inline_masses_convert_exactly() {
    let doc = json_of(&["entropy", "--p", "0.25,0.75"]);
    let expected = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
    assert!((doc["entropy"].as_f64().unwrap() - expected).abs() < 1e-15);
}

#[test]
fn exhausted_search_budget_exits_three() {
    let out = run(&[
        "mec",
        "--p",
        "1/4,1/4,1/4,1/4",
        "--q",
        "1/4,1/4,1/4,1/4",
        "--vertex-cap",
        "3",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_str(&out).contains("cap"));
}

#[test]
fn exhausted_channel_budget_exits_three() {
    let out = run(&[
        "channel",
        "--p",
        "1/6,1/6,1/6,1/6,1/6,1/6",
        "--m",
        "3",
        "--budget",
        "10",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_str(&out).contains("budget"));
}

#[test]
fn channel_split_of_refinable_input_is_one_bit() {
    let doc = json_of(&["channel", "--p", "1/6,1/3,1/2", "--m", "2"]);
    assert_eq!(doc["objective"].as_f64().unwrap(), 1.0);
    assert_eq!(
        doc["induced"],
        serde_json::json!({ "masses": ["1/2", "1/2"] })
    );
}

#[test]
fn renyi_accepts_inf_and_zero_orders() {
    let min_entropy = json_of(&["renyi", "--p", "1/6,1/3,1/2", "--alpha", "inf"]);
    assert!((min_entropy["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(min_entropy["alpha"], serde_json::json!("inf"));

    let hartley = json_of(&["renyi", "--p", "1/6,1/3,1/2", "--alpha", "0"]);
    assert!((hartley["entropy"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
}

#[test]
fn kl_divergence_off_support_reports_inf_string() {
    let doc = json_of(&["kl", "--p", "1/2,1/2", "--q", "1,0"]);
    assert_eq!(doc["kl"], serde_json::json!("inf"));
}

#[test]
fn delta_with_max_norm_matches_entropy_gap() {
    // P = (1/2,1/2) refines into Q = (1/4,1/4,1/2): the best coupling has
    // entropy H(Q), so the max-norm distance is H(Q) - H(P) = 0.5 bits.
    let doc = json_of(&[
        "delta", "--p", "1/2,1/2", "--q", "1/4,1/4,1/2", "--pnorm", "inf",
    ]);
    assert!((doc["delta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn bounds_chain_holds_on_a_lopsided_pair() {
    let doc = json_of(&["bounds", "--p", "1/2,1/2", "--q", "1/4,3/4"]);
    assert_eq!(doc["all_hold"], serde_json::json!(true));
    let entries = doc["entries"].as_array().expect("entries");
    assert!(!entries.is_empty());
    for entry in entries {
        assert!(
            entry["slack"].as_f64().unwrap() >= -1e-9,
            "bound {} violated",
            entry["name"]
        );
    }
}

#[test]
fn counterexample_csv_has_mandated_header_and_growing_bound() {
    let out = run(&[
        "counterexample",
        "--stages",
        "2,4",
        "--truncation",
        "8",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,H_alpha,lower_bound,H_alpha_P"));
    let rows: Vec<Vec<f64>> = lines
        .map(|line| line.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 2.0);
    assert_eq!(rows[1][0], 4.0);
    assert!(rows[1][1] > rows[0][1], "coupling entropy must grow");
    assert!(rows[1][2] > rows[0][2], "lower bound must grow");
    for row in &rows {
        assert!(row[1] >= row[2] - 1e-9, "entropy must dominate its bound");
        assert_eq!(row[3], rows[0][3], "marginal entropy is stage-independent");
    }
}

#[test]
fn invalid_family_parameters_are_usage_errors() {
    // alpha*beta <= 1 breaks the divergence regime.
    let out = run(&["counterexample", "--alpha", "0.4", "--beta", "2", "--r", "1.5"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let base = run(&["mec", "--p", "2/5,1/5,2/5", "--q", "1/3,1/3,1/3"]);
    let threaded = run(&[
        "--threads",
        "4",
        "mec",
        "--p",
        "2/5,1/5,2/5",
        "--q",
        "1/3,1/3,1/3",
    ]);
    assert!(base.status.success());
    assert!(threaded.status.success());
    assert_eq!(base.stdout, threaded.stdout);

    let repeat = run(&["mec", "--p", "2/5,1/5,2/5", "--q", "1/3,1/3,1/3"]);
    assert_eq!(base.stdout, repeat.stdout);
}

#[test]
fn zero_threads_is_a_usage_error() {
    let out = run(&["--threads", "0", "entropy", "--p", "1/2,1/2"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("--threads"));
}

#[test]
fn closing_the_output_pipe_early_is_a_quiet_success() {
    use std::io::{BufRead, BufReader};
    use std::process::Stdio;

    // A 200x200 maximal coupling prints well past the 64 KiB pipe buffer,
    // so the child is still writing when the reader hangs up.
    let uniform = vec!["1/200"; 200].join(",");
    let mut child = Command::new(env!("CARGO_BIN_EXE_couplings"))
        .args([
            "maximal", "--p", &uniform, "--q", &uniform, "--format", "csv",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary should spawn");
    let stdout = child.stdout.take().expect("stdout handle");
    let mut first_line = String::new();
    BufReader::new(stdout)
        .read_line(&mut first_line)
        .expect("first line should arrive");
    // Dropping the reader above closed the pipe; the child must finish
    // without a panic and without complaining on stderr.
    let out = child.wait_with_output().expect("child should exit");
    assert_eq!(out.status.code(), Some(0));
    assert!(
        out.stderr.is_empty(),
        "stderr should be silent on a broken pipe: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn greedy_mec_is_labeled_heuristic_and_bounds_the_exact_value() {
    let exact = json_of(&["mec", "--p", "2/5,1/5,2/5", "--q", "1/3,1/3,1/3"]);
    let greedy = json_of(&[
        "mec", "--p", "2/5,1/5,2/5", "--q", "1/3,1/3,1/3", "--greedy",
    ]);
    assert_eq!(greedy["certificate"], serde_json::json!("heuristic"));
    assert!(
        greedy["objective"].as_f64().unwrap()
            >= exact["objective"].as_f64().unwrap() - 1e-12
    );
}
