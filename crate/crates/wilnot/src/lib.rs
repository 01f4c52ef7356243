//! Synthesis and exact verification of cyclic qudit SWAP networks built
//! entirely from generalized CNOT gates.
//!
//! The library is organized around a small pipeline:
//!
//! * [`modmath`] — exact arithmetic over `Z_d`: primality, inverses, and
//!   binomial coefficients modulo arbitrary (including composite) moduli.
//! * [`circuit`] — the gate-level IR: ordered generalized-CNOT programs with
//!   stage annotations and a JSON interchange format.
//! * [`synth`] — the five-stage cyclic-SWAP construction for prime `d`, the
//!   even-`d` sign-change variant, and l-fold repetitions.
//! * [`sim`] — execution at three fidelities: basis labels over `Z_d`, the
//!   induced linear map / basis permutation, and complex state vectors with
//!   a Schmidt separability probe.
//! * [`verify`] — checkers that tie circuits back to their contracts:
//!   exhaustive or seeded-sample label verification, per-step coefficient
//!   traces against closed forms, the 27x27 qutrit matrix actions, and the
//!   even-dimension impossibility scan.
//!
//! Basis indices are big-endian throughout: wire 0 is the most significant
//! digit of `|x_0 x_1 ... x_{n-1}>`.
//!
//! With the `parallel` feature (on by default) the exhaustive enumeration
//! entry points gain `_parallel` twins that split the index space over
//! rayon workers; their results are bit-identical to the sequential ones.

pub mod circuit;
pub mod modmath;
pub mod sim;
pub mod synth;
pub mod verify;

pub use circuit::{Circuit, CnotGate, StageMark, Variant};
pub use modmath::{Dimension, ParityClass};
pub use sim::{BasisPermutation, LabelVector, LinearMapZd, StateVector};
pub use synth::{a_coeffs, eta_weights, wilnot, wilnot_even, wilnot_power};
