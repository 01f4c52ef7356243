//! Circuit execution at three fidelities: exact label arithmetic over `Z_d`,
//! the induced linear map / basis permutation, and complex state vectors
//! with a Schmidt-based separability probe.
//!
//! Basis indices are big-endian: wire 0 is the most significant digit, so
//! `|x_0 x_1 ... x_{n-1}>` sits at index `sum x_k d^(n-1-k)`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::modmath::Dimension;

/// Permutation and state-vector builders refuse more than this many basis
/// states; label and linear-map simulation carry no such bound.
pub const MAX_BASIS_STATES: u64 = 1 << 24;

/// The total probability weight `sum |alpha|^2` must hit 1 within this.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A Schmidt coefficient above this marks genuine entanglement; the
/// permutation circuits move amplitudes without roundoff, the SVD does not.
pub const SCHMIDT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("circuit is over d={circuit_d} with {circuit_wires} wires, input is d={input_d} with {input_wires}")]
    DimensionMismatch {
        circuit_d: u64,
        circuit_wires: usize,
        input_d: u64,
        input_wires: usize,
    },
    #[error("label {label} out of range for dimension {d}")]
    LabelOutOfRange { label: u64, d: u64 },
    #[error("{states} basis states exceed the configured bound of {max}")]
    SizeBound { states: u64, max: u64 },
    #[error("state vector has squared norm {norm_sqr}, not 1 within {tolerance}")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },
    #[error("invalid bipartition: {0}")]
    BadCut(String),
    #[error("amplitude vector has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
}

/// Number of basis states `d^n`, or the size-bound error.
pub fn basis_size(d: u64, wires: usize) -> Result<u64, SimError> {
    let mut size: u64 = 1;
    for _ in 0..wires {
        size = size
            .checked_mul(d)
            .filter(|&s| s <= MAX_BASIS_STATES)
            .ok_or(SimError::SizeBound {
                states: u64::MAX,
                max: MAX_BASIS_STATES,
            })?;
    }
    Ok(size)
}

/// Basis labels `(x_0, ..., x_{n-1})`, each in `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    d: Dimension,
    labels: Vec<u64>,
}

impl LabelVector {
    pub fn new(d: Dimension, labels: Vec<u64>) -> Result<Self, SimError> {
        for &label in &labels {
            if label >= d.value() {
                return Err(SimError::LabelOutOfRange {
                    label,
                    d: d.value(),
                });
            }
        }
        Ok(LabelVector { d, labels })
    }

    pub fn zero(d: Dimension, wires: usize) -> Self {
        LabelVector {
            d,
            labels: vec![0; wires],
        }
    }

    /// Unit label vector with a 1 on `wire`.
    pub fn unit(d: Dimension, wires: usize, wire: usize) -> Self {
        let mut labels = vec![0; wires];
        labels[wire] = 1;
        LabelVector { d, labels }
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    /// Big-endian basis index of this label tuple.
    pub fn basis_index(&self) -> u64 {
        encode_labels(&self.labels, self.d.value())
    }

    pub fn from_basis_index(d: Dimension, wires: usize, index: u64) -> Self {
        LabelVector {
            d,
            labels: decode_index(index, d.value(), wires),
        }
    }
}

pub fn encode_labels(labels: &[u64], d: u64) -> u64 {
    labels.iter().fold(0, |acc, &x| acc * d + x)
}

pub fn decode_index(index: u64, d: u64, wires: usize) -> Vec<u64> {
    let mut labels = vec![0u64; wires];
    let mut rest = index;
    for k in (0..wires).rev() {
        labels[k] = rest % d;
        rest /= d;
    }
    labels
}

/// The n x n matrix over `Z_d` a CNOT circuit induces on label vectors;
/// row r lists output wire r's coefficients over the input labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearMapZd {
    d: u64,
    rows: Vec<Vec<u64>>,
}

impl LinearMapZd {
    pub fn identity(d: u64, n: usize) -> Self {
        let rows = (0..n)
            .map(|r| (0..n).map(|c| u64::from(r == c)).collect())
            .collect();
        LinearMapZd { d, rows }
    }

    /// Build from explicit rows; entries are reduced mod d.
    pub fn from_rows(d: u64, rows: Vec<Vec<u64>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|row| row.into_iter().map(|x| x % d).collect())
            .collect();
        LinearMapZd { d, rows }
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.rows[r]
    }

    pub fn apply(&self, labels: &[u64]) -> Vec<u64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(labels)
                    .fold(0u64, |acc, (&m, &x)| (acc + m * x) % self.d)
            })
            .collect()
    }

    /// Matrix product `self * rhs` over `Z_d`.
    pub fn compose(&self, rhs: &LinearMapZd) -> LinearMapZd {
        let n = self.size();
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        (0..n).fold(0u64, |acc, k| {
                            (acc + self.rows[r][k] * rhs.rows[k][c]) % self.d
                        })
                    })
                    .collect()
            })
            .collect();
        LinearMapZd { d: self.d, rows }
    }

    /// Determinant mod d, computed by Bezout row elimination so it stays
    /// exact over composite moduli. CNOT circuits always give 1.
    pub fn det(&self) -> u64 {
        let d = self.d as i128;
        let n = self.size();
        let mut m: Vec<Vec<i128>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        for col in 0..n {
            for row in col + 1..n {
                // replace rows (col, row) with unimodular combinations until
                // m[row][col] is zero
                while m[row][col] != 0 {
                    let q = m[col][col] / m[row][col];
                    let (top, bottom) = m.split_at_mut(row);
                    let lower = &bottom[0];
                    for (u, &l) in top[col][col..].iter_mut().zip(&lower[col..]) {
                        *u = (*u - q * l).rem_euclid(d);
                    }
                    m.swap(col, row);
                    sign = -sign;
                }
            }
        }
        let det = m
            .iter()
            .enumerate()
            .fold(sign, |acc, (i, row)| (acc * row[i]).rem_euclid(d));
        det.rem_euclid(d) as u64
    }
}

/// The bijection a circuit induces on the `d^n` basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPermutation {
    d: Dimension,
    wires: usize,
    mapping: Vec<u32>,
}

impl BasisPermutation {
    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn apply_index(&self, index: u64) -> u64 {
        self.mapping[index as usize] as u64
    }

    /// Dense 0/1 matrix: entry (mapping\[c\], c) is 1 for every column c.
    pub fn dense_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.mapping.len();
        let mut m = vec![vec![0u8; n]; n];
        for (col, &row) in self.mapping.iter().enumerate() {
            m[row as usize][col] = 1;
        }
        m
    }

    fn assert_bijective(&self) {
        let mut seen = vec![false; self.mapping.len()];
        for &out in &self.mapping {
            assert!(
                !std::mem::replace(&mut seen[out as usize], true),
                "permutation must be a bijection"
            );
        }
    }
}

/// Complex amplitudes over the `d^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: Dimension,
    wires: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(d: Dimension, wires: usize, amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let size = basis_size(d.value(), wires)?;
        if amplitudes.len() as u64 != size {
            return Err(SimError::WrongLength {
                got: amplitudes.len(),
                expected: size as usize,
            });
        }
        let state = StateVector {
            d,
            wires,
            amplitudes,
        };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::NotNormalized {
                norm_sqr,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(state)
    }

    /// The computational basis state with the given labels.
    pub fn basis(labels: &LabelVector) -> Result<Self, SimError> {
        let d = labels.dimension();
        let size = basis_size(d.value(), labels.labels().len())?;
        let mut amplitudes = vec![Complex64::ZERO; size as usize];
        amplitudes[labels.basis_index() as usize] = Complex64::ONE;
        Ok(StateVector {
            d,
            wires: labels.labels().len(),
            amplitudes,
        })
    }

    /// Tensor product of per-wire single-qudit states; factors are
    /// normalized here.
    pub fn product(d: Dimension, factors: &[Vec<Complex64>]) -> Result<Self, SimError> {
        let dv = d.value() as usize;
        for f in factors {
            if f.len() != dv {
                return Err(SimError::WrongLength {
                    got: f.len(),
                    expected: dv,
                });
            }
        }
        let size = basis_size(d.value(), factors.len())? as usize;
        let mut amplitudes = vec![Complex64::ONE; 1];
        for f in factors {
            let norm = f.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(SimError::NotNormalized {
                    norm_sqr: 0.0,
                    tolerance: NORM_TOLERANCE,
                });
            }
            let mut next = Vec::with_capacity(amplitudes.len() * dv);
            for &a in &amplitudes {
                for &b in f {
                    next.push(a * b / norm);
                }
            }
            amplitudes = next;
        }
        debug_assert_eq!(amplitudes.len(), size);
        Ok(StateVector {
            d,
            wires: factors.len(),
            amplitudes,
        })
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(d: Dimension, wires: usize) -> Result<Self, SimError> {
        let size = basis_size(d.value(), wires)? as usize;
        let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
        Ok(StateVector {
            d,
            wires,
            amplitudes: vec![amp; size],
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Total probability weight, `sum |alpha|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn check_compatible(circuit: &Circuit, input_d: u64, input_wires: usize) -> Result<(), SimError> {
    if circuit.d() != input_d || circuit.wires() != input_wires {
        return Err(SimError::DimensionMismatch {
            circuit_d: circuit.d(),
            circuit_wires: circuit.wires(),
            input_d,
            input_wires,
        });
    }
    Ok(())
}

/// Run the circuit on basis labels: each gate adds `multiplicity * control`
/// onto its target, mod d.
pub fn apply_labels(circuit: &Circuit, input: &LabelVector) -> Result<LabelVector, SimError> {
    check_compatible(circuit, input.dimension().value(), input.labels().len())?;
    let mut labels = input.labels().to_vec();
    apply_labels_in_place(circuit, &mut labels);
    Ok(LabelVector {
        d: input.dimension(),
        labels,
    })
}

/// Same update on a borrowed buffer; the enumeration loops live on this.
pub(crate) fn apply_labels_in_place(circuit: &Circuit, labels: &mut [u64]) {
    let d = circuit.d();
    for gate in circuit.gates() {
        labels[gate.target] = (labels[gate.target] + gate.multiplicity * labels[gate.control]) % d;
    }
}

/// The matrix M with `apply_labels(c, x) = M x mod d`, built column by
/// column by running the circuit on each unit label vector.
pub fn linear_map(circuit: &Circuit) -> LinearMapZd {
    let n = circuit.wires();
    let d = circuit.d();
    let mut rows = vec![vec![0u64; n]; n];
    for col in 0..n {
        let mut labels = vec![0u64; n];
        labels[col] = 1;
        apply_labels_in_place(circuit, &mut labels);
        for (r, &value) in labels.iter().enumerate() {
            rows[r][col] = value;
        }
    }
    LinearMapZd { d, rows }
}

fn permutation_entry(circuit: &Circuit, d: u64, wires: usize, index: u64) -> u32 {
    let mut labels = decode_index(index, d, wires);
    apply_labels_in_place(circuit, &mut labels);
    encode_labels(&labels, d) as u32
}

/// Enumerate all `d^n` basis labels through the circuit.
pub fn basis_permutation(circuit: &Circuit) -> Result<BasisPermutation, SimError> {
    let d = circuit.d();
    let wires = circuit.wires();
    let size = basis_size(d, wires)?;
    let mapping: Vec<u32> = (0..size)
        .map(|i| permutation_entry(circuit, d, wires, i))
        .collect();
    let perm = BasisPermutation {
        d: circuit.dimension(),
        wires,
        mapping,
    };
    perm.assert_bijective();
    Ok(perm)
}

/// Parallel enumeration over disjoint index ranges; the result is identical
/// to [`basis_permutation`].
#[cfg(feature = "parallel")]
pub fn basis_permutation_parallel(circuit: &Circuit) -> Result<BasisPermutation, SimError> {
    use rayon::prelude::*;
    let d = circuit.d();
    let wires = circuit.wires();
    let size = basis_size(d, wires)?;
    let mapping: Vec<u32> = (0..size)
        .into_par_iter()
        .map(|i| permutation_entry(circuit, d, wires, i))
        .collect();
    let perm = BasisPermutation {
        d: circuit.dimension(),
        wires,
        mapping,
    };
    perm.assert_bijective();
    Ok(perm)
}

/// Move amplitudes along the circuit's basis permutation: the output
/// amplitude at `mapping[i]` equals the input amplitude at `i`.
pub fn apply_statevector(circuit: &Circuit, psi: &StateVector) -> Result<StateVector, SimError> {
    check_compatible(circuit, psi.dimension().value(), psi.wires())?;
    let norm_sqr = psi.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(SimError::NotNormalized {
            norm_sqr,
            tolerance: NORM_TOLERANCE,
        });
    }
    let perm = basis_permutation(circuit)?;
    let mut amplitudes = vec![Complex64::ZERO; psi.amplitudes().len()];
    for (i, &amp) in psi.amplitudes().iter().enumerate() {
        amplitudes[perm.mapping()[i] as usize] = amp;
    }
    Ok(StateVector {
        d: psi.dimension(),
        wires: psi.wires(),
        amplitudes,
    })
}

/// Separability verdict across one wire bipartition.
#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityReport {
    /// True when exactly one Schmidt coefficient exceeds the tolerance.
    pub product: bool,
    pub largest_coefficient: f64,
    pub second_coefficient: f64,
}

/// Reshape `psi` across the cut (the listed wires against the rest) and
/// test whether exactly one singular value survives the 1e-9 cutoff.
pub fn is_product_across(psi: &StateVector, cut: &[usize]) -> Result<SeparabilityReport, SimError> {
    let n = psi.wires();
    let mut side_a = cut.to_vec();
    side_a.sort_unstable();
    side_a.dedup();
    if side_a.len() != cut.len() {
        return Err(SimError::BadCut("duplicate wires in cut".into()));
    }
    if side_a.is_empty() || side_a.len() >= n {
        return Err(SimError::BadCut(
            "cut must be a nonempty proper subset of the wires".into(),
        ));
    }
    if side_a.iter().any(|&w| w >= n) {
        return Err(SimError::BadCut(format!(
            "wire index out of range for {n} wires"
        )));
    }
    let side_b: Vec<usize> = (0..n).filter(|w| !side_a.contains(w)).collect();
    let d = psi.dimension().value();
    let rows = d.pow(side_a.len() as u32) as usize;
    let cols = d.pow(side_b.len() as u32) as usize;

    let mut matrix = nalgebra::DMatrix::<Complex64>::zeros(rows, cols);
    for (index, &amp) in psi.amplitudes().iter().enumerate() {
        let labels = decode_index(index as u64, d, n);
        let r = encode_labels(&side_a.iter().map(|&w| labels[w]).collect::<Vec<_>>(), d);
        let c = encode_labels(&side_b.iter().map(|&w| labels[w]).collect::<Vec<_>>(), d);
        matrix[(r as usize, c as usize)] = amp;
    }
    let singular = matrix.singular_values();
    let mut values: Vec<f64> = singular.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let largest = values.first().copied().unwrap_or(0.0);
    let second = values.get(1).copied().unwrap_or(0.0);
    Ok(SeparabilityReport {
        product: largest > SCHMIDT_TOLERANCE && second <= SCHMIDT_TOLERANCE,
        largest_coefficient: largest,
        second_coefficient: second,
    })
}
