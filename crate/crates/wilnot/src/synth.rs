//! Circuit synthesis: the five-stage cyclic-SWAP construction over prime
//! dimensions, the even-dimension variant that lands one sign change away
//! from a SWAP, and l-fold repetitions.
//!
//! Stage layout (gate emission order is load-bearing):
//!   - Stage 1 labels the inputs and emits no gates.
//!   - Stage 2 runs d-1 identical steps; step j cascades control k-1 ->
//!     target k for k = 1..d-1 ascending, so each control already carries
//!     its updated value.
//!   - Stage 3 (prime) targets k = 2..d-1 ascending from control k-2.
//!   - Stage 3 (even) replaces that with multiplicity a_{k-2-m} gates from
//!     every control m <= k-2, walking k = d-1 down to 2 so the controls
//!     still hold their stage-(d-1) values.
//!   - Stage 4 targets k = 0..d-2 ascending from control k+1; controls are
//!     not yet rewritten when read.
//!   - Stage 5 folds every wire into wire d-1 with the parity-alternating
//!     eta weights.

use thiserror::Error;

use crate::circuit::{Circuit, Variant};
use crate::modmath::{BinomTable, Dimension};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("prime variant requires prime d, got {0}")]
    NonPrimeDimension(u64),
    #[error("even variant requires even d >= 4, got {0}")]
    NotEvenDimension(u64),
    #[error("repetition count must be at least 1")]
    ZeroRepetitions,
}

/// Stage-5 gate multiplicities. Prime variant: 1 on even wires, d-1 on odd
/// wires. Even variant: the complementary parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaWeights {
    d: Dimension,
    weights: Vec<u64>,
}

impl EtaWeights {
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }
}

/// Which eta parity rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaVariant {
    Prime,
    Even,
}

pub fn eta_weights(d: Dimension, variant: EtaVariant) -> EtaWeights {
    let dv = d.value();
    let weights = (0..dv - 1)
        .map(|k| match (variant, k % 2 == 0) {
            (EtaVariant::Prime, true) | (EtaVariant::Even, false) => 1,
            (EtaVariant::Prime, false) | (EtaVariant::Even, true) => dv - 1,
        })
        .collect();
    EtaWeights { d, weights }
}

/// Stage-3 correction coefficients for the even variant, one per offset
/// s = 0..d-3, reduced to `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ACoeffs {
    d: Dimension,
    values: Vec<u64>,
}

impl ACoeffs {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }
}

/// a_s = d - [C(s+d, d-2) + sum_{t<s} a_t C(s-t+d-2, d-2)] + (-1)^s, mod d.
pub fn a_coeffs(d: Dimension) -> Result<ACoeffs, SynthError> {
    let dv = d.value();
    if !d.is_even_composite() {
        return Err(SynthError::NotEvenDimension(dv));
    }
    let table = BinomTable::new(dv, (4 * dv) as usize);
    let mut values: Vec<u64> = Vec::with_capacity((dv - 2) as usize);
    for s in 0..dv - 2 {
        let mut acc = table.get(s + dv, dv - 2);
        for (t, &a_t) in values.iter().enumerate() {
            acc = (acc + a_t * table.get(s - t as u64 + dv - 2, dv - 2)) % dv;
        }
        let sign = if s % 2 == 0 { 1 } else { dv - 1 };
        values.push(((dv - acc) + sign) % dv);
    }
    Ok(ACoeffs { d, values })
}

/// The cyclic-SWAP network for prime `d`: output wire k carries input label
/// k+1 mod d. Unit-gate count is (d-1)^2 + (d-2) + (d-1) + d(d-1)/2.
pub fn wilnot(d: Dimension) -> Result<Circuit, SynthError> {
    if !d.is_prime() {
        return Err(SynthError::NonPrimeDimension(d.value()));
    }
    let dv = d.value() as usize;
    let mut c = Circuit::with_variant(d, dv, Variant::Prime);
    c.mark_stage("stage1", 0);
    for j in 1..dv {
        let from = c.gates().len();
        for k in 1..dv {
            c.append(k - 1, k, 1).expect("synthesized gate is valid");
        }
        c.mark_stage(format!("stage2.step{j}"), from);
    }
    let from = c.gates().len();
    for k in 2..dv {
        c.append(k - 2, k, 1).expect("synthesized gate is valid");
    }
    c.mark_stage("stage3", from);
    let from = c.gates().len();
    for k in 0..dv - 1 {
        c.append(k + 1, k, 1).expect("synthesized gate is valid");
    }
    c.mark_stage("stage4", from);
    let from = c.gates().len();
    let eta = eta_weights(d, EtaVariant::Prime);
    for (k, &weight) in eta.weights().iter().enumerate() {
        c.append(k, dv - 1, weight)
            .expect("synthesized gate is valid");
    }
    c.mark_stage("stage5", from);
    Ok(c)
}

/// The even-dimension variant (d even, d >= 4): output wire k carries input
/// label k+1 for k < d-1 and wire d-1 carries (d-1) times input label 0.
pub fn wilnot_even(d: Dimension) -> Result<Circuit, SynthError> {
    let dv = d.value() as usize;
    if !d.is_even_composite() {
        return Err(SynthError::NotEvenDimension(d.value()));
    }
    let a = a_coeffs(d)?;
    let mut c = Circuit::with_variant(d, dv, Variant::Even);
    c.mark_stage("stage1", 0);
    for j in 1..dv {
        let from = c.gates().len();
        for k in 1..dv {
            c.append(k - 1, k, 1).expect("synthesized gate is valid");
        }
        c.mark_stage(format!("stage2.step{j}"), from);
    }
    let from = c.gates().len();
    for k in (2..dv).rev() {
        for m in 0..=k - 2 {
            let mult = a.values()[k - 2 - m];
            if mult != 0 {
                c.append(m, k, mult).expect("synthesized gate is valid");
            }
        }
    }
    c.mark_stage("stage3", from);
    let from = c.gates().len();
    for k in 0..dv - 1 {
        c.append(k + 1, k, 1).expect("synthesized gate is valid");
    }
    c.mark_stage("stage4", from);
    let from = c.gates().len();
    let eta = eta_weights(d, EtaVariant::Even);
    for (k, &weight) in eta.weights().iter().enumerate() {
        c.append(k, dv - 1, weight)
            .expect("synthesized gate is valid");
    }
    c.mark_stage("stage5", from);
    Ok(c)
}

/// `l` back-to-back copies of the prime network; shifts labels by `l`.
pub fn wilnot_power(d: Dimension, l: u64) -> Result<Circuit, SynthError> {
    if l == 0 {
        return Err(SynthError::ZeroRepetitions);
    }
    let base = wilnot(d)?;
    let mut acc = base.clone();
    for _ in 1..l {
        acc = acc.concat(&base).expect("same dimension by construction");
    }
    Ok(acc)
}
