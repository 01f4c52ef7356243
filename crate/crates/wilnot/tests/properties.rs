//! Property tests over randomly generated CNOT circuits, plus the
//! deterministic structure laws the synthesis stages must satisfy.

use proptest::prelude::*;

use wilnot::circuit::Circuit;
use wilnot::modmath::{binom_mod, Dimension};
use wilnot::sim::{
    apply_labels, apply_statevector, basis_permutation, linear_map, LabelVector, StateVector,
};
use wilnot::synth::{wilnot, wilnot_even};

fn dim(d: u64) -> Dimension {
    Dimension::new(d).unwrap()
}

/// A random valid circuit: d in 2..=5, wires in 2..=4, up to 16 gates.
fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2u64..=5, 2usize..=4)
        .prop_flat_map(|(d, wires)| {
            let gate =
                (0..wires, 0..wires.max(2) - 1, 1..d).prop_map(move |(control, off, mult)| {
                    // derive a target distinct from the control
                    let target = (control + 1 + off) % wires;
                    (control, target, mult)
                });
            (Just(d), Just(wires), proptest::collection::vec(gate, 0..16))
        })
        .prop_map(|(d, wires, gates)| {
            let mut c = Circuit::new(dim(d), wires);
            for (control, target, mult) in gates {
                c.append(control, target, mult).unwrap();
            }
            c
        })
}

proptest! {
    #[test]
    fn json_round_trip_is_identity(c in arb_circuit()) {
        let back = Circuit::deserialize(&c.serialize()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn gate_count_adds_over_concat(a in arb_circuit(), b in arb_circuit()) {
        if a.d() == b.d() && a.wires() == b.wires() {
            let joined = a.concat(&b).unwrap();
            prop_assert_eq!(joined.gate_count(), a.gate_count() + b.gate_count());
        } else {
            prop_assert!(a.concat(&b).is_err());
        }
    }

    #[test]
    fn cnot_maps_are_invertible_shears(c in arb_circuit()) {
        // every gate is an elementary shear, so the determinant is 1
        prop_assert_eq!(linear_map(&c).det(), 1);
    }

    #[test]
    fn label_map_and_permutation_agree(c in arb_circuit()) {
        let m = linear_map(&c);
        let perm = basis_permutation(&c).unwrap();
        let d = c.d();
        let n = c.wires();
        // spot-check a quarter of the space plus the edges
        let size = perm.len() as u64;
        for index in (0..size).step_by(4).chain([size - 1]) {
            let input = LabelVector::from_basis_index(dim(d), n, index);
            let out = apply_labels(&c, &input).unwrap();
            prop_assert_eq!(out.basis_index(), perm.apply_index(index));
            prop_assert_eq!(m.apply(input.labels()), out.labels());
        }
    }

    #[test]
    fn labels_through_circuit_stay_in_range(c in arb_circuit(), seed in 0u64..1000) {
        let d = c.d();
        let n = c.wires();
        let labels: Vec<u64> = (0..n).map(|k| (seed + k as u64) % d).collect();
        let input = LabelVector::new(dim(d), labels).unwrap();
        let out = apply_labels(&c, &input).unwrap();
        prop_assert!(out.labels().iter().all(|&x| x < d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statevector_transport_preserves_norm_and_tracks_labels(
        c in arb_circuit(),
        labels_seed in 0u64..100,
    ) {
        let d = c.d();
        let n = c.wires();
        let labels: Vec<u64> = (0..n).map(|k| (labels_seed + 3 * k as u64) % d).collect();
        let input = LabelVector::new(dim(d), labels).unwrap();
        let psi = StateVector::basis(&input).unwrap();
        let out = apply_statevector(&c, &psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);

        // basis states move exactly where the label simulator says
        let moved = apply_labels(&c, &input).unwrap();
        let expect = StateVector::basis(&moved).unwrap();
        prop_assert_eq!(out, expect);
    }
}

#[test]
fn stage2_prefix_law_for_small_primes() {
    // after stage-2 step j, row k of the induced map is C(k-m+j-1, j-1)
    for d in [2u64, 3, 5, 7] {
        let c = wilnot(dim(d)).unwrap();
        for j in 1..d {
            let end = c.stage_end(&format!("stage2.step{j}")).unwrap();
            let m = linear_map(&c.prefix(end));
            for k in 0..d as usize {
                for col in 0..d as usize {
                    let expected = if col <= k {
                        binom_mod((k - col) as u64 + j - 1, j - 1, d)
                    } else {
                        0
                    };
                    assert_eq!(m.row(k)[col], expected, "d={d} j={j} k={k} m={col}");
                }
            }
        }
    }
}

#[test]
fn stage3_rows_alternate_for_primes_and_evens() {
    let prime = [2u64, 3, 5, 7].map(|d| wilnot(dim(d)).unwrap());
    let even = [4u64, 6, 8].map(|d| wilnot_even(dim(d)).unwrap());
    for c in prime.iter().chain(even.iter()) {
        let d = c.d();
        let m = linear_map(&c.prefix(c.stage_end("stage3").unwrap()));
        for k in 0..c.wires() {
            for col in 0..c.wires() {
                let expected = if col <= k {
                    if (k - col) % 2 == 0 {
                        1
                    } else {
                        d - 1
                    }
                } else {
                    0
                };
                assert_eq!(m.row(k)[col], expected % d, "d={d} k={k} m={col}");
            }
        }
    }
}

#[test]
fn stage4_leaves_deltas_and_the_alternating_last_row() {
    // wires 0..d-2 hold the next input label; wire d-1 holds the
    // alternating combination, for all primes up to 13
    for d in [2u64, 3, 5, 7, 11, 13] {
        let c = wilnot(dim(d)).unwrap();
        let m = linear_map(&c.prefix(c.stage_end("stage4").unwrap()));
        let n = c.wires();
        for k in 0..n - 1 {
            for col in 0..n {
                assert_eq!(m.row(k)[col], u64::from(col == k + 1), "d={d} k={k}");
            }
        }
        for col in 0..n {
            let expected = if (n - 1 - col) % 2 == 0 { 1 } else { d - 1 };
            assert_eq!(m.row(n - 1)[col], expected % d, "d={d} m={col}");
        }
    }
}

#[test]
fn linearity_witness_for_seeded_superpositions() {
    // 20 seeded random states per dimension: running the circuit equals
    // reindexing amplitudes along the closed-form label shift, within 1e-12
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use wilnot::sim::encode_labels;

    for d in [2u64, 3] {
        let circuit = wilnot(dim(d)).unwrap();
        let n = d as usize;
        let size = (d as usize).pow(d as u32);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let mut amps: Vec<Complex64> = (0..size)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            let psi = StateVector::new(dim(d), n, amps.clone()).unwrap();
            let out = apply_statevector(&circuit, &psi).unwrap();

            let mut expected = vec![Complex64::ZERO; size];
            for (index, &amp) in amps.iter().enumerate() {
                let input = LabelVector::from_basis_index(dim(d), n, index as u64);
                let mut shifted = input.labels().to_vec();
                shifted.rotate_left(1);
                expected[encode_labels(&shifted, d) as usize] = amp;
            }
            let worst = out
                .amplitudes()
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-12, "d={d} trial={trial}: error {worst}");
        }
    }
}

#[test]
fn full_circuit_shifts_labels_for_small_primes() {
    for d in [2u64, 3, 5, 7] {
        let c = wilnot(dim(d)).unwrap();
        let m = linear_map(&c);
        for k in 0..c.wires() {
            for col in 0..c.wires() {
                assert_eq!(m.row(k)[col], u64::from(col == (k + 1) % c.wires()));
            }
        }
    }
}
