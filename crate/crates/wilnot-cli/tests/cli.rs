//! End-to-end tests against the built binary, covering the exit-code
//! contract and the synth -> deserialize -> verify pipeline.

use std::process::{Command, Output};

use wilnot::circuit::Circuit;
use wilnot::verify;

fn wilnot_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wilnot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn synth_emits_the_expected_circuit_json() {
    let out = wilnot_cmd(&["synth", "-d", "5", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let circuit = Circuit::deserialize(&stdout(&out)).expect("valid circuit document");
    assert_eq!(circuit.d(), 5);
    assert_eq!(circuit.gate_count(), 33);
}

#[test]
fn synth_rejects_composite_dimension_for_prime_variant() {
    let out = wilnot_cmd(&["synth", "-d", "4"]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("prime variant requires prime d"), "{err}");
}

#[test]
fn synth_even_variant_carries_a_coefficient_multiplicities() {
    let out = wilnot_cmd(&["synth", "-d", "4", "--variant", "even", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let circuit = Circuit::deserialize(&stdout(&out)).expect("valid circuit document");
    assert_eq!(circuit.variant(), wilnot::circuit::Variant::Even);
    // stage 3 at d=4 holds two multiplicity-3 gates (a_0 = 3, a_1 = 0)
    let s3_end = circuit.stage_end("stage3").unwrap();
    let s2_end = circuit.stage_end("stage2").unwrap();
    let stage3: Vec<_> = circuit.gates()[s2_end..s3_end].to_vec();
    assert_eq!(stage3.len(), 2);
    assert!(stage3.iter().all(|g| g.multiplicity == 3));
}

#[test]
fn simulate_prints_the_shifted_labels() {
    let out = wilnot_cmd(&["simulate", "-d", "3", "--labels", "0,1,2"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("output: 1,2,0"));

    let out = wilnot_cmd(&["simulate", "-d", "2", "--labels", "1,0"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("output: 0,1"));

    // even variant: the sign change lands on the last wire
    let out = wilnot_cmd(&[
        "simulate",
        "-d",
        "4",
        "--variant",
        "even",
        "--labels",
        "1,0,0,0",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("output: 0,0,0,3"));

    let out = wilnot_cmd(&[
        "simulate",
        "-d",
        "4",
        "--variant",
        "even",
        "--labels",
        "0,1,2,3",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("output: 1,2,3,0"));
}

#[test]
fn simulate_rejects_out_of_range_labels() {
    let out = wilnot_cmd(&["simulate", "-d", "3", "--labels", "0,1,7"]);
    assert_eq!(exit_code(&out), 2);
    let out = wilnot_cmd(&["simulate", "-d", "3", "--labels", "0,1"]);
    assert_eq!(exit_code(&out), 2);
    let out = wilnot_cmd(&["simulate", "-d", "3", "--labels", "0,x,1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_passes_for_prime_and_even_dimensions() {
    let out = wilnot_cmd(&["verify", "-d", "7"]);
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("pass=true"));

    let out = wilnot_cmd(&["verify", "-d", "6", "--variant", "even"]);
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
}

#[test]
fn verify_rejects_unsupported_dimensions() {
    let out = wilnot_cmd(&["verify", "-d", "9"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_json_report_shape() {
    let out = wilnot_cmd(&["verify", "-d", "3", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["check"]["pass"], serde_json::Value::Bool(true));
    assert_eq!(doc["check"]["d"], serde_json::json!(3));
    assert_eq!(doc["trace_pass"], serde_json::Value::Bool(true));
}

#[test]
fn verify_threaded_matches_sequential_output() {
    let seq = wilnot_cmd(&["verify", "-d", "5", "--format", "json"]);
    let par = wilnot_cmd(&["verify", "-d", "5", "--threads", "4", "--format", "json"]);
    assert_eq!(exit_code(&seq), 0);
    assert_eq!(exit_code(&par), 0);
    assert_eq!(stdout(&seq), stdout(&par));
}

#[test]
fn matrix_exports_the_qutrit_permutation() {
    let out = wilnot_cmd(&["matrix", "-d", "3"]);
    assert_eq!(exit_code(&out), 0);
    // |012> (index 5) moves to |120> (index 15)
    assert!(stdout(&out).contains("5 -> 15"));

    let out = wilnot_cmd(&["matrix", "-d", "3", "--prefix", "stage2.step1"]);
    assert_eq!(exit_code(&out), 0);
    // the stage-2 step-1 prefix sends |012> to |010> (index 3)
    assert!(stdout(&out).contains("5 -> 3"));
}

#[test]
fn matrix_dense_csv_is_the_qubit_swap() {
    let out = wilnot_cmd(&["matrix", "-d", "2", "--format", "csv"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines, vec!["1,0,0,0", "0,0,1,0", "0,1,0,0", "0,0,0,1"]);
}

#[test]
fn matrix_rejects_unknown_prefix_and_oversize_spaces() {
    let out = wilnot_cmd(&["matrix", "-d", "3", "--prefix", "stage9"]);
    assert_eq!(exit_code(&out), 2);
    // 11^11 basis states blow the size bound
    let out = wilnot_cmd(&["matrix", "-d", "11"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn trace_prints_three_snapshots_for_the_qubit_network() {
    let out = wilnot_cmd(&["trace", "-d", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("snapshots=3"), "{text}");
    assert_eq!(text.matches("step j=").count(), 3);
}

#[test]
fn trace_rows_match_the_worked_qutrit_states() {
    let out = wilnot_cmd(&["trace", "-d", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    // stage 2 step 2 leaves wire 2 holding 2j + k
    assert!(text.contains("[0 2 1]"), "{text}");
}

#[test]
fn analyze_even_reports_the_obstruction() {
    let out = wilnot_cmd(&["analyze-even", "-d", "4"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("no unit xi achieves unit scalars"), "{text}");

    let out = wilnot_cmd(&["analyze-even", "-d", "6"]);
    assert_eq!(exit_code(&out), 0);

    let out = wilnot_cmd(&["analyze-even", "-d", "5"]);
    assert_eq!(exit_code(&out), 2);
    let out = wilnot_cmd(&["analyze-even", "-d", "2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn help_documents_the_index_convention_and_schema() {
    let out = wilnot_cmd(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("big-endian"));
    assert!(text.contains("\"dimension\""));
    assert!(text.contains("Exit codes"));
}

#[test]
fn synth_deserialize_verify_pipeline_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wilnot5.json");
    let out = wilnot_cmd(&[
        "synth",
        "-d",
        "5",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);

    let text = std::fs::read_to_string(&path).unwrap();
    let round_tripped = Circuit::deserialize(&text).unwrap();
    let fresh = wilnot::synth::wilnot(wilnot::modmath::Dimension::new(5).unwrap()).unwrap();
    assert_eq!(round_tripped, fresh);

    // verifying the round-tripped circuit gives the identical report
    let a = verify::check_cyclic(&round_tripped, 1, verify::DEFAULT_SEED);
    let b = verify::check_cyclic(&fresh, 1, verify::DEFAULT_SEED);
    assert!(a.pass && b.pass);
    assert_eq!(a.detail, b.detail);
    assert_eq!(a.cases, b.cases);
}
