//! Checkers tying synthesized circuits back to their defining claims:
//! exhaustive cyclic-SWAP verification, per-step coefficient traces against
//! their closed forms, the 27x27 qutrit matrix actions, and the
//! even-dimension impossibility scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Variant};
use crate::modmath::{mod_inverse, units, BinomTable, Dimension};
use crate::sim::{self, LinearMapZd};
use crate::synth;

/// Exhaustive label enumeration up to this many cases; larger spaces are
/// sampled instead.
pub const EXHAUSTIVE_LABEL_LIMIT: u64 = 10_000_000;

/// Number of seeded random label vectors used in sampled mode.
pub const SAMPLED_LABEL_COUNT: u64 = 1_000_000;

/// Default seed for sampled verification.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("impossibility scan requires even d > 2, got {0}")]
    ScanDimension(u64),
    #[error("stage trace requires the prime or even variant, got {0}")]
    TraceVariant(Variant),
    #[error("synthesis failed: {0}")]
    Synth(#[from] synth::SynthError),
}

/// First failing label assignment, when a check fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: Vec<u64>,
    pub expected: Vec<u64>,
    pub got: Vec<u64>,
}

/// Machine-readable check outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub d: u64,
    pub variant: Variant,
    pub pass: bool,
    /// Label assignments inspected by the enumeration route.
    pub cases: u64,
    /// True when the whole label space was enumerated, false when sampled.
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub detail: String,
}

/// The shift-by-`l` cyclic permutation matrix on `wires` wires.
pub fn shift_map(d: u64, wires: usize, shift: u64) -> LinearMapZd {
    let shift = shift as usize % wires;
    let rows = (0..wires)
        .map(|k| {
            (0..wires)
                .map(|c| u64::from(c == (k + shift) % wires))
                .collect()
        })
        .collect();
    LinearMapZd::from_rows(d, rows)
}

/// The even-variant target: labels rotate left once and the last wire picks
/// up a d-1 scalar on what was wire 0.
pub fn even_sign_map(d: u64) -> LinearMapZd {
    let n = d as usize;
    let rows = (0..n)
        .map(|k| {
            (0..n)
                .map(|c| {
                    if k + 1 < n {
                        u64::from(c == k + 1)
                    } else if c == 0 {
                        d - 1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    LinearMapZd::from_rows(d, rows)
}

/// `d^n` when it fits a u64, otherwise None (always sampled).
fn label_space(d: u64, n: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

struct LabelCheckOutcome {
    cases: u64,
    exhaustive: bool,
    counterexample: Option<Counterexample>,
}

fn label_check_seq(circuit: &Circuit, expected: &LinearMapZd, seed: u64) -> LabelCheckOutcome {
    let d = circuit.d();
    let n = circuit.wires();
    match label_space(d, n) {
        Some(size) if size <= EXHAUSTIVE_LABEL_LIMIT => {
            let mut labels = vec![0u64; n];
            for index in 0..size {
                let mut rest = index;
                for k in (0..n).rev() {
                    labels[k] = rest % d;
                    rest /= d;
                }
                if let Some(cx) = check_one(circuit, expected, &labels) {
                    return LabelCheckOutcome {
                        cases: size,
                        exhaustive: true,
                        counterexample: Some(cx),
                    };
                }
            }
            LabelCheckOutcome {
                cases: size,
                exhaustive: true,
                counterexample: None,
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut labels = vec![0u64; n];
            for _ in 0..SAMPLED_LABEL_COUNT {
                for slot in labels.iter_mut() {
                    *slot = rng.random_range(0..d);
                }
                if let Some(cx) = check_one(circuit, expected, &labels) {
                    return LabelCheckOutcome {
                        cases: SAMPLED_LABEL_COUNT,
                        exhaustive: false,
                        counterexample: Some(cx),
                    };
                }
            }
            LabelCheckOutcome {
                cases: SAMPLED_LABEL_COUNT,
                exhaustive: false,
                counterexample: None,
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn label_check_par(circuit: &Circuit, expected: &LinearMapZd, seed: u64) -> LabelCheckOutcome {
    use rayon::prelude::*;
    let d = circuit.d();
    let n = circuit.wires();
    match label_space(d, n) {
        Some(size) if size <= EXHAUSTIVE_LABEL_LIMIT => {
            // lowest failing index, so the report matches the sequential one
            let first_bad = (0..size)
                .into_par_iter()
                .filter_map(|index| {
                    let labels = sim::decode_index(index, d, n);
                    check_one(circuit, expected, &labels).map(|cx| (index, cx))
                })
                .min_by_key(|(index, _)| *index);
            LabelCheckOutcome {
                cases: size,
                exhaustive: true,
                counterexample: first_bad.map(|(_, cx)| cx),
            }
        }
        _ => {
            // draw the identical sample stream up front, then scan chunks
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut samples = vec![0u64; (SAMPLED_LABEL_COUNT as usize) * n];
            for slot in samples.iter_mut() {
                *slot = rng.random_range(0..d);
            }
            let first_bad = samples
                .par_chunks(n)
                .enumerate()
                .filter_map(|(index, labels)| {
                    check_one(circuit, expected, labels).map(|cx| (index, cx))
                })
                .min_by_key(|(index, _)| *index);
            LabelCheckOutcome {
                cases: SAMPLED_LABEL_COUNT,
                exhaustive: false,
                counterexample: first_bad.map(|(_, cx)| cx),
            }
        }
    }
}

fn check_one(circuit: &Circuit, expected: &LinearMapZd, labels: &[u64]) -> Option<Counterexample> {
    let mut got = labels.to_vec();
    sim::apply_labels_in_place(circuit, &mut got);
    let want = expected.apply(labels);
    if got != want {
        Some(Counterexample {
            input: labels.to_vec(),
            expected: want,
            got,
        })
    } else {
        None
    }
}

fn report_from(
    check: &str,
    circuit: &Circuit,
    expected: &LinearMapZd,
    outcome: LabelCheckOutcome,
) -> CheckReport {
    let map_ok = &sim::linear_map(circuit) == expected;
    let pass = map_ok && outcome.counterexample.is_none();
    let mode = if outcome.exhaustive {
        "exhaustive"
    } else {
        "sampled"
    };
    let detail = format!(
        "linear map {}; {} labels checked ({}){}",
        if map_ok { "matches" } else { "differs" },
        outcome.cases,
        mode,
        if outcome.counterexample.is_some() {
            "; label counterexample found"
        } else {
            ""
        }
    );
    CheckReport {
        check: check.to_string(),
        d: circuit.d(),
        variant: circuit.variant(),
        pass,
        cases: outcome.cases,
        exhaustive: outcome.exhaustive,
        counterexample: outcome.counterexample,
        detail,
    }
}

/// Check that `circuit` shifts every basis label by `shift`: the linear map
/// must equal the cyclic permutation matrix, and label enumeration
/// (exhaustive up to 10^7 states, seeded sampling beyond) must agree.
pub fn check_cyclic(circuit: &Circuit, shift: u64, seed: u64) -> CheckReport {
    let expected = shift_map(circuit.d(), circuit.wires(), shift);
    let outcome = label_check_seq(circuit, &expected, seed);
    report_from(
        &format!("cyclic-shift-{shift}"),
        circuit,
        &expected,
        outcome,
    )
}

/// [`check_cyclic`] with the label enumeration spread over worker threads;
/// the verdict and counterexample are identical.
#[cfg(feature = "parallel")]
pub fn check_cyclic_parallel(circuit: &Circuit, shift: u64, seed: u64) -> CheckReport {
    let expected = shift_map(circuit.d(), circuit.wires(), shift);
    let outcome = label_check_par(circuit, &expected, seed);
    report_from(
        &format!("cyclic-shift-{shift}"),
        circuit,
        &expected,
        outcome,
    )
}

/// Check the even-variant contract: labels rotate left once and wire d-1
/// carries `(d-1) * x_0`.
pub fn check_even_variant(circuit: &Circuit, seed: u64) -> CheckReport {
    let expected = even_sign_map(circuit.d());
    let outcome = label_check_seq(circuit, &expected, seed);
    report_from("even-sign-swap", circuit, &expected, outcome)
}

#[cfg(feature = "parallel")]
pub fn check_even_variant_parallel(circuit: &Circuit, seed: u64) -> CheckReport {
    let expected = even_sign_map(circuit.d());
    let outcome = label_check_par(circuit, &expected, seed);
    report_from("even-sign-swap", circuit, &expected, outcome)
}

/// One prefix snapshot in a coefficient trace.
#[derive(Debug, Clone, Serialize)]
pub struct StageSnapshot {
    /// Stage mark label ("stage2.step1", "stage3", ...).
    pub label: String,
    /// The step index j in the synthesis schedule: stage 2 step j is j,
    /// stage 3 is d, stage 4 is d+1, stage 5 is d+2.
    pub j: u64,
    /// Gate entries this step appended.
    pub gates_in_step: usize,
    pub map: LinearMapZd,
}

/// Per-step linear-map snapshots of a synthesized circuit; snapshot 0 is the
/// identity and each later one extends its predecessor by one step's gates.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffTrace {
    pub d: u64,
    pub variant: Variant,
    pub steps: Vec<StageSnapshot>,
}

/// A closed-form coefficient the trace expected but did not find.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("step {label} (j={j}): row {row}, column {col}: expected {expected}, got {got}")]
pub struct TraceMismatch {
    pub label: String,
    pub j: u64,
    pub row: usize,
    pub col: usize,
    pub expected: u64,
    pub got: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error(transparent)]
    Mismatch(#[from] TraceMismatch),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

fn sign_mod(exponent: u64, d: u64) -> u64 {
    if exponent % 2 == 0 {
        1 % d
    } else {
        d - 1
    }
}

fn step_j(label: &str, d: u64) -> u64 {
    if label == "stage1" {
        0
    } else if let Some(step) = label.strip_prefix("stage2.step") {
        step.parse().unwrap_or(0)
    } else if label == "stage3" {
        d
    } else if label == "stage4" {
        d + 1
    } else {
        d + 2
    }
}

/// The closed-form row patterns each synthesis step must satisfy: binomial
/// rows during stage 2, alternating rows after stage 3, delta rows plus the
/// alternating last wire after stage 4, and the final permutation after
/// stage 5.
struct ClosedForms<'a> {
    d: u64,
    n: usize,
    table: &'a BinomTable,
    variant: Variant,
}

impl ClosedForms<'_> {
    fn entry(&self, label: &str, j: u64, row: usize, col: usize) -> u64 {
        let (d, n) = (self.d, self.n);
        let (k, m) = (row as u64, col as u64);
        match label {
            "stage1" => u64::from(row == col) % d,
            _ if label.starts_with("stage2.step") => {
                if m <= k {
                    self.table.get(k - m + j - 1, j - 1)
                } else {
                    0
                }
            }
            "stage3" => {
                if m <= k {
                    sign_mod(k - m, d)
                } else {
                    0
                }
            }
            "stage4" => {
                if row + 1 < n {
                    u64::from(m == k + 1)
                } else {
                    sign_mod(d - 1 - m, d)
                }
            }
            _ => {
                // stage5: the finished map
                if self.variant == Variant::Prime {
                    u64::from(col == (row + 1) % n)
                } else if row + 1 < n {
                    u64::from(m == k + 1)
                } else if col == 0 {
                    d - 1
                } else {
                    0
                }
            }
        }
    }
}

/// Synthesize the requested variant and snapshot the induced linear map
/// after every step, asserting each snapshot against its closed form.
pub fn trace_stages(d: Dimension, variant: Variant) -> Result<CoeffTrace, TraceError> {
    let circuit = match variant {
        Variant::Prime => synth::wilnot(d).map_err(VerifyError::Synth)?,
        Variant::Even => synth::wilnot_even(d).map_err(VerifyError::Synth)?,
        Variant::Custom => return Err(VerifyError::TraceVariant(variant).into()),
    };
    let dv = d.value();
    let n = circuit.wires();
    let table = BinomTable::new(dv, (4 * dv) as usize);
    let forms = ClosedForms {
        d: dv,
        n,
        table: &table,
        variant,
    };
    let mut steps = Vec::new();
    for mark in circuit.stage_marks() {
        let j = step_j(&mark.label, dv);
        let map = sim::linear_map(&circuit.prefix(mark.to));
        for row in 0..n {
            for col in 0..n {
                let expected = forms.entry(&mark.label, j, row, col);
                let got = map.row(row)[col];
                if got != expected {
                    return Err(TraceMismatch {
                        label: mark.label.clone(),
                        j,
                        row,
                        col,
                        expected,
                        got,
                    }
                    .into());
                }
            }
        }
        steps.push(StageSnapshot {
            label: mark.label.clone(),
            j,
            gates_in_step: mark.to - mark.from,
            map,
        });
    }
    Ok(CoeffTrace {
        d: dv,
        variant,
        steps,
    })
}

/// Verify the three defining matrix actions of the d = 3 network: the
/// stage-2 step-1 prefix sends |ijk> to |i, i+j, i+j+k>, the whole circuit
/// sends |ijk> to |jki>, and the dense 27x27 matrix is exactly that
/// permutation.
pub fn qutrit_matrix_check() -> CheckReport {
    let d = Dimension::new(3).expect("3 is a valid dimension");
    let circuit = synth::wilnot(d).expect("3 is prime");
    let mut mismatches: Vec<String> = Vec::new();

    let step1 = circuit.prefix(circuit.stage_end("stage2.step1").expect("mark exists"));
    let perm1 = sim::basis_permutation(&step1).expect("27 states in bound");
    for i in 0..3u64 {
        for j in 0..3u64 {
            for k in 0..3u64 {
                let input = sim::encode_labels(&[i, j, k], 3);
                let expected = sim::encode_labels(&[i, (i + j) % 3, (i + j + k) % 3], 3);
                let got = perm1.apply_index(input);
                if got != expected {
                    mismatches.push(format!(
                        "step1 prefix on |{i}{j}{k}>: expected index {expected}, got {got}"
                    ));
                }
            }
        }
    }

    let full = sim::basis_permutation(&circuit).expect("27 states in bound");
    for i in 0..3u64 {
        for j in 0..3u64 {
            for k in 0..3u64 {
                let input = sim::encode_labels(&[i, j, k], 3);
                let expected = sim::encode_labels(&[j, k, i], 3);
                let got = full.apply_index(input);
                if got != expected {
                    mismatches.push(format!(
                        "full circuit on |{i}{j}{k}>: expected index {expected}, got {got}"
                    ));
                }
            }
        }
    }

    // dense matrix cells: exactly one 1 per column, at row encode(j, k, i)
    let dense = full.dense_matrix();
    for i in 0..3u64 {
        for j in 0..3u64 {
            for k in 0..3u64 {
                let col = sim::encode_labels(&[i, j, k], 3) as usize;
                let expected_row = sim::encode_labels(&[j, k, i], 3) as usize;
                for (row, line) in dense.iter().enumerate() {
                    let expected = u8::from(row == expected_row);
                    if line[col] != expected {
                        mismatches.push(format!("matrix cell ({row}, {col}) = {}", line[col]));
                    }
                }
            }
        }
    }

    CheckReport {
        check: "qutrit-matrix".into(),
        d: 3,
        variant: Variant::Prime,
        pass: mismatches.is_empty(),
        cases: 27 + 27 + 729,
        exhaustive: true,
        counterexample: None,
        detail: if mismatches.is_empty() {
            "stage-2 step-1 action, full action, and all 729 matrix cells match".into()
        } else {
            mismatches.join("; ")
        },
    }
}

/// Outcome of driving the two-gate gadget family at one unit scalar.
#[derive(Debug, Clone, Serialize)]
pub struct XiAnalysis {
    pub xi: u64,
    /// Inverse of xi mod d.
    pub p_xi: u64,
    /// Scalar left on the interior pairs: xi^2 mod d.
    pub xi_squared: u64,
    /// Scalar left on the wrap-around pair: -xi^2 mod d.
    pub neg_xi_squared: u64,
    /// True when both scalars are 1, which the scan must never see.
    pub both_unit: bool,
}

/// Scan result over every unit of `Z_d`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub d: u64,
    pub rows: Vec<XiAnalysis>,
    /// True when no unit produces two unit scalars.
    pub pass: bool,
    pub detail: String,
}

/// Apply the gadget on a pair of wires whose values are tracked as
/// coefficient 2-vectors: one CNOT down, `p_xi - 1` gates back up, then
/// `d - xi` gates down again.
fn xi_gadget(
    d: u64,
    mut first: [u64; 2],
    mut second: [u64; 2],
    xi: u64,
    p_xi: u64,
) -> ([u64; 2], [u64; 2]) {
    for idx in 0..2 {
        second[idx] = (second[idx] + first[idx]) % d;
    }
    for idx in 0..2 {
        first[idx] = (first[idx] + (p_xi + d - 1) % d * second[idx]) % d;
    }
    for idx in 0..2 {
        second[idx] = (second[idx] + (d - xi) % d * first[idx]) % d;
    }
    (first, second)
}

/// For every unit xi of even `Z_d` (d > 2), drive the gadget family over the
/// scaled shift state and confirm the outcome pair is `(xi^2, -xi^2)` with
/// the two scalars never simultaneously 1.
pub fn impossibility_scan(d: Dimension) -> Result<ScanReport, VerifyError> {
    let dv = d.value();
    if dv <= 2 || dv % 2 != 0 {
        return Err(VerifyError::ScanDimension(dv));
    }
    let mut rows = Vec::new();
    let mut gadget_consistent = true;
    for xi in units(dv) {
        let p_xi = mod_inverse(xi, dv).expect("xi is a unit");
        // interior pair (xi * i_k, xi * i_{k+1})
        let (int_first, int_second) = xi_gadget(dv, [xi, 0], [0, xi], xi, p_xi);
        // wrap-around pair (xi * i_{d-1}, (d - xi) * i_0)
        let (wrap_first, wrap_second) = xi_gadget(dv, [xi, 0], [0, (dv - xi) % dv], xi, p_xi);
        let xi_squared = xi * xi % dv;
        let neg_xi_squared = (dv - xi_squared) % dv;
        // the gadget must reproduce the closed-form outcome pair
        if int_first != [1, (1 + dv - xi) % dv]
            || int_second != [0, xi_squared]
            || wrap_first != [1, (xi + dv - 1) % dv]
            || wrap_second != [0, neg_xi_squared]
        {
            gadget_consistent = false;
        }
        rows.push(XiAnalysis {
            xi,
            p_xi,
            xi_squared,
            neg_xi_squared,
            both_unit: xi_squared == 1 && neg_xi_squared == 1,
        });
    }
    let none_unit = rows.iter().all(|r| !r.both_unit);
    let pass = none_unit && gadget_consistent;
    let detail = if !gadget_consistent {
        "gadget outcome disagrees with the closed-form pair".to_string()
    } else if none_unit {
        format!(
            "no unit xi achieves unit scalars among {} units",
            rows.len()
        )
    } else {
        "some xi achieves simultaneous unit scalars".to_string()
    };
    Ok(ScanReport {
        d: dv,
        rows,
        pass,
        detail,
    })
}
