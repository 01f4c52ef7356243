//! Gate-level intermediate representation: ordered generalized-CNOT programs
//! over `n` wires of qudit dimension `d`, plus the JSON interchange format.
//!
//! A gate with multiplicity `m` sends `|x>|y>` to `|x>|y + m*x mod d>`; it is
//! equivalent to `m` repetitions of the unit CNOT, and the simulators treat
//! it as a single update.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modmath::Dimension;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("wire index {wire} out of range for {wires} wires")]
    WireOutOfRange { wire: usize, wires: usize },
    #[error("control and target must differ, both are {0}")]
    SelfLoop(usize),
    #[error("gate multiplicity {multiplicity} invalid for dimension {d}")]
    InvalidMultiplicity { multiplicity: u64, d: u64 },
    #[error("circuit mismatch: d={lhs_d}/{lhs_wires} wires vs d={rhs_d}/{rhs_wires} wires")]
    Mismatch {
        lhs_d: u64,
        lhs_wires: usize,
        rhs_d: u64,
        rhs_wires: usize,
    },
    #[error("invalid dimension: {0}")]
    Dimension(#[from] crate::modmath::ModMathError),
    #[error("stage marks do not partition the gate sequence: {0}")]
    BadStageMarks(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// One generalized CNOT: adds `multiplicity * control` onto the target
/// wire, modulo the circuit dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
    pub multiplicity: u64,
}

/// Label for a contiguous gate range `[from, to)`, used to mark synthesis
/// stages and steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageMark {
    pub label: String,
    pub from: usize,
    pub to: usize,
}

/// Which synthesis family produced a circuit, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Prime,
    Even,
    Custom,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Prime => write!(f, "prime"),
            Variant::Even => write!(f, "even"),
            Variant::Custom => write!(f, "custom"),
        }
    }
}

/// An ordered generalized-CNOT program. Immutable once built, apart from the
/// `append*` constructors used during synthesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    dimension: Dimension,
    wires: usize,
    variant: Variant,
    gates: Vec<CnotGate>,
    stage_marks: Vec<StageMark>,
}

impl Circuit {
    pub fn new(dimension: Dimension, wires: usize) -> Self {
        Circuit {
            dimension,
            wires,
            variant: Variant::Custom,
            gates: Vec::new(),
            stage_marks: Vec::new(),
        }
    }

    pub fn with_variant(dimension: Dimension, wires: usize, variant: Variant) -> Self {
        Circuit {
            variant,
            ..Circuit::new(dimension, wires)
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn d(&self) -> u64 {
        self.dimension.value()
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    pub fn stage_marks(&self) -> &[StageMark] {
        &self.stage_marks
    }

    fn check_gate(&self, control: usize, target: usize) -> Result<(), CircuitError> {
        if control == target {
            return Err(CircuitError::SelfLoop(control));
        }
        for wire in [control, target] {
            if wire >= self.wires {
                return Err(CircuitError::WireOutOfRange {
                    wire,
                    wires: self.wires,
                });
            }
        }
        Ok(())
    }

    /// Append a gate, folding its multiplicity mod `d` and dropping it if
    /// the fold reaches zero.
    pub fn append(
        &mut self,
        control: usize,
        target: usize,
        multiplicity: u64,
    ) -> Result<(), CircuitError> {
        self.check_gate(control, target)?;
        let m = multiplicity % self.d();
        if m != 0 {
            self.gates.push(CnotGate {
                control,
                target,
                multiplicity: m,
            });
        }
        Ok(())
    }

    /// Append with adjacent folding: if the trailing gate has the same
    /// control/target pair, merge the multiplicities mod `d` instead of
    /// storing a new entry (dropping the gate entirely on a zero fold).
    pub fn append_merged(
        &mut self,
        control: usize,
        target: usize,
        multiplicity: u64,
    ) -> Result<(), CircuitError> {
        self.check_gate(control, target)?;
        let d = self.d();
        if let Some(last) = self.gates.last_mut() {
            if last.control == control && last.target == target {
                let m = (last.multiplicity + multiplicity) % d;
                if m == 0 {
                    self.gates.pop();
                } else {
                    last.multiplicity = m;
                }
                return Ok(());
            }
        }
        self.append(control, target, multiplicity)
    }

    /// Mark the gate range `[from, current end)` with a stage label.
    pub fn mark_stage(&mut self, label: impl Into<String>, from: usize) {
        self.stage_marks.push(StageMark {
            label: label.into(),
            from,
            to: self.gates.len(),
        });
    }

    /// Gates of `self` followed by gates of `other`. Stage marks survive
    /// only when they still partition the combined sequence.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.dimension != other.dimension || self.wires != other.wires {
            return Err(CircuitError::Mismatch {
                lhs_d: self.d(),
                lhs_wires: self.wires,
                rhs_d: other.d(),
                rhs_wires: other.wires,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        let offset = self.gates.len();
        let lhs_covers = marks_cover(&self.stage_marks, self.gates.len());
        let rhs_covers = marks_cover(&other.stage_marks, other.gates.len());
        let stage_marks = if other.gates.is_empty() && other.stage_marks.is_empty() {
            self.stage_marks.clone()
        } else if self.gates.is_empty() && self.stage_marks.is_empty() {
            other.stage_marks.clone()
        } else if lhs_covers && rhs_covers {
            let mut marks = self.stage_marks.clone();
            marks.extend(other.stage_marks.iter().map(|m| StageMark {
                label: m.label.clone(),
                from: m.from + offset,
                to: m.to + offset,
            }));
            marks
        } else {
            Vec::new()
        };
        let variant = if self.variant == other.variant || other.gates.is_empty() {
            self.variant
        } else if self.gates.is_empty() {
            other.variant
        } else {
            Variant::Custom
        };
        Ok(Circuit {
            dimension: self.dimension,
            wires: self.wires,
            variant,
            gates,
            stage_marks,
        })
    }

    /// Unit-gate count: the sum of multiplicities.
    pub fn gate_count(&self) -> u64 {
        self.gates.iter().map(|g| g.multiplicity).sum()
    }

    /// Unit-gate expansion in order, each multiplicity-`m` entry repeated
    /// `m` times.
    pub fn unit_gates(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.gate_count() as usize);
        for g in &self.gates {
            for _ in 0..g.multiplicity {
                out.push((g.control, g.target));
            }
        }
        out
    }

    /// The first `n_gates` gate entries, with stage marks truncated to the
    /// prefix they still describe.
    pub fn prefix(&self, n_gates: usize) -> Circuit {
        let n_gates = n_gates.min(self.gates.len());
        let stage_marks = if marks_cover(&self.stage_marks, self.gates.len()) {
            self.stage_marks
                .iter()
                .filter(|m| m.from <= n_gates)
                .map(|m| StageMark {
                    label: m.label.clone(),
                    from: m.from,
                    to: m.to.min(n_gates),
                })
                .collect()
        } else {
            Vec::new()
        };
        Circuit {
            dimension: self.dimension,
            wires: self.wires,
            variant: if n_gates == self.gates.len() {
                self.variant
            } else {
                Variant::Custom
            },
            gates: self.gates[..n_gates].to_vec(),
            stage_marks,
        }
    }

    /// End gate index of the stage mark named `label`, or of the last mark
    /// whose label sits under `label.` (so "stage2" covers "stage2.step3").
    pub fn stage_end(&self, label: &str) -> Option<usize> {
        let nested = format!("{label}.");
        self.stage_marks
            .iter()
            .filter(|m| m.label == label || m.label.starts_with(&nested))
            .map(|m| m.to)
            .max()
    }

    /// Serialize to the JSON interchange document (UTF-8, no BOM).
    pub fn serialize(&self) -> String {
        let doc = CircuitDoc {
            dimension: self.d(),
            wires: self.wires,
            variant: self.variant,
            gates: self.gates.clone(),
            stages: self.stage_marks.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail")
    }

    /// Parse and validate a JSON circuit document. Unknown fields and
    /// invariant violations are rejected.
    pub fn deserialize(text: &str) -> Result<Circuit, CircuitError> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| CircuitError::Parse(e.to_string()))?;
        let dimension = Dimension::new(doc.dimension)?;
        let mut circuit = Circuit::with_variant(dimension, doc.wires, doc.variant);
        for gate in &doc.gates {
            circuit.check_gate(gate.control, gate.target)?;
            if gate.multiplicity == 0 || gate.multiplicity >= doc.dimension {
                return Err(CircuitError::InvalidMultiplicity {
                    multiplicity: gate.multiplicity,
                    d: doc.dimension,
                });
            }
        }
        circuit.gates = doc.gates;
        validate_marks(&doc.stages, circuit.gates.len())?;
        circuit.stage_marks = doc.stages;
        Ok(circuit)
    }
}

/// JSON document shape. Field order is free on input; unknown fields are
/// rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    dimension: u64,
    wires: usize,
    variant: Variant,
    gates: Vec<CnotGate>,
    #[serde(default)]
    stages: Vec<StageMark>,
}

fn marks_cover(marks: &[StageMark], n_gates: usize) -> bool {
    !marks.is_empty() && validate_marks(marks, n_gates).is_ok()
}

/// Non-empty mark lists must partition `[0, n_gates)`: ordered, contiguous,
/// no overlap. Empty ranges are fine (gate-free stages).
fn validate_marks(marks: &[StageMark], n_gates: usize) -> Result<(), CircuitError> {
    if marks.is_empty() {
        return Ok(());
    }
    let mut cursor = 0usize;
    for mark in marks {
        if mark.from != cursor {
            return Err(CircuitError::BadStageMarks(format!(
                "mark '{}' starts at {} but previous coverage ends at {}",
                mark.label, mark.from, cursor
            )));
        }
        if mark.to < mark.from {
            return Err(CircuitError::BadStageMarks(format!(
                "mark '{}' has to < from",
                mark.label
            )));
        }
        cursor = mark.to;
    }
    if cursor != n_gates {
        return Err(CircuitError::BadStageMarks(format!(
            "marks cover {cursor} gates but the circuit has {n_gates}"
        )));
    }
    Ok(())
}
