//! Exact arithmetic over `Z_d`: primality, modular inverses, and binomial
//! coefficients modulo an arbitrary modulus.
//!
//! Binomials are computed with a Pascal triangle reduced modulo `m`, which
//! stays exact for composite moduli where factorial-based formulas would
//! divide by non-units. A Lucas-theorem route is provided separately for
//! prime moduli so the two can be checked against each other.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModMathError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(u64),
    #[error("{x} is not invertible modulo {modulus} (gcd = {gcd})")]
    NotInvertible { x: u64, modulus: u64, gcd: u64 },
    #[error("exact integer overflow computing C({n}, {k})")]
    BinomialOverflow { n: u64, k: u64 },
    #[error("Lucas decomposition requires a prime modulus, got {0}")]
    NonPrimeModulus(u64),
}

/// Classification of a qudit dimension, as the synthesis routines need it.
///
/// `d = 2` counts as prime; `EvenComposite` covers the even dimensions
/// greater than two that only admit the sign-change variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Prime,
    EvenComposite,
    Other,
}

/// A qudit dimension `d >= 2` together with its derived parity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    d: u64,
    parity: ParityClass,
}

impl Dimension {
    pub fn new(d: u64) -> Result<Self, ModMathError> {
        if d < 2 {
            return Err(ModMathError::InvalidDimension(d));
        }
        let parity = if is_prime(d) {
            ParityClass::Prime
        } else if d % 2 == 0 {
            ParityClass::EvenComposite
        } else {
            ParityClass::Other
        };
        Ok(Dimension { d, parity })
    }

    pub fn value(&self) -> u64 {
        self.d
    }

    pub fn parity_class(&self) -> ParityClass {
        self.parity
    }

    pub fn is_prime(&self) -> bool {
        self.parity == ParityClass::Prime
    }

    pub fn is_even_composite(&self) -> bool {
        self.parity == ParityClass::EvenComposite
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// Deterministic primality by trial division. The dimensions this crate
/// handles are tiny, so nothing probabilistic is warranted.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Triangular table of `C(n, k) mod modulus` for `n <= max_n`, built with
/// the Pascal rule so it is exact for any modulus >= 2.
#[derive(Debug, Clone)]
pub struct BinomTable {
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl BinomTable {
    pub fn new(modulus: u64, max_n: usize) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![0u64; n + 1];
            row[0] = 1 % modulus;
            row[n] = 1 % modulus;
            for k in 1..n {
                row[k] = (rows[n - 1][k - 1] + rows[n - 1][k]) % modulus;
            }
            rows.push(row);
        }
        BinomTable { modulus, rows }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k) mod modulus`; `k > n` yields 0.
    pub fn get(&self, n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        self.rows[n as usize][k as usize]
    }
}

/// `C(n, k) mod m`, exact for any `m >= 2`. Builds a Pascal triangle up to
/// `n`; callers with many queries at one modulus should hold a [`BinomTable`].
pub fn binom_mod(n: u64, k: u64, m: u64) -> u64 {
    if k > n {
        return 0;
    }
    BinomTable::new(m, n as usize).get(n, k)
}

/// `C(n, k) mod p` by Lucas' theorem; valid only for prime `p`. Kept as an
/// independent route against the Pascal table.
pub fn binom_mod_lucas(n: u64, k: u64, p: u64) -> Result<u64, ModMathError> {
    if !is_prime(p) {
        return Err(ModMathError::NonPrimeModulus(p));
    }
    let base = BinomTable::new(p, (p - 1) as usize);
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Ok(0);
        }
        acc = acc * base.get(nd, kd) % p;
        n /= p;
        k /= p;
    }
    Ok(acc)
}

/// Exact `C(n, k)` in a u128, erroring on overflow.
pub fn binom_exact(n: u64, k: u64) -> Result<u128, ModMathError> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // multiply-then-divide keeps every intermediate an exact integer
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(ModMathError::BinomialOverflow { n, k })?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

/// Left side of the hockey-stick identity, `sum_{n=0}^{k} C(l+n, n)`,
/// evaluated exactly. Test oracle against `C(l+k+1, k)`.
pub fn hockey_stick_lhs(l: u64, k: u64) -> Result<u128, ModMathError> {
    let mut acc: u128 = 0;
    for n in 0..=k {
        acc = acc
            .checked_add(binom_exact(l + n, n)?)
            .ok_or(ModMathError::BinomialOverflow { n: l + k, k })?;
    }
    Ok(acc)
}

/// Multiplicative inverse of `x` modulo `d` via the extended Euclidean
/// algorithm, normalized to `[0, d)`.
pub fn mod_inverse(x: u64, d: u64) -> Result<u64, ModMathError> {
    assert!(d >= 2, "modulus must be at least 2");
    let x = x % d;
    let (mut r0, mut r1) = (d as i128, x as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(ModMathError::NotInvertible {
            x,
            modulus: d,
            gcd: r0 as u64,
        });
    }
    Ok(s0.rem_euclid(d as i128) as u64)
}

/// Units of `Z_d` in ascending order.
pub fn units(d: u64) -> Vec<u64> {
    (1..d).filter(|&x| gcd(x, d) == 1).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial-division oracle, written independently of `is_prime`.
    fn prime_oracle(n: u64) -> bool {
        n >= 2 && (2..n).all(|f| n % f != 0)
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(9));
        assert!(is_prime(7919));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
    }

    #[test]
    fn primality_matches_oracle_to_1000() {
        for n in 0..1000 {
            assert_eq!(is_prime(n), prime_oracle(n), "n = {n}");
        }
    }

    #[test]
    fn dimension_parity_classes() {
        assert_eq!(
            Dimension::new(2).unwrap().parity_class(),
            ParityClass::Prime
        );
        assert_eq!(
            Dimension::new(7).unwrap().parity_class(),
            ParityClass::Prime
        );
        assert_eq!(
            Dimension::new(4).unwrap().parity_class(),
            ParityClass::EvenComposite
        );
        assert_eq!(
            Dimension::new(9).unwrap().parity_class(),
            ParityClass::Other
        );
        assert_eq!(Dimension::new(1), Err(ModMathError::InvalidDimension(1)));
        assert_eq!(Dimension::new(0), Err(ModMathError::InvalidDimension(0)));
    }

    #[test]
    fn binom_mod_examples() {
        // C(4,2) = 6, reduced mod 5
        assert_eq!(binom_mod(4, 2, 5), 1);
        for n in [0, 1, 5, 17] {
            assert_eq!(binom_mod(n, 0, 7), 1);
        }
        // C(5,2) = 10, reduced mod 4
        assert_eq!(binom_mod(5, 2, 4), 2);
        assert_eq!(binom_mod(3, 5, 7), 0);
    }

    #[test]
    fn binom_table_pascal_rule_holds_entrywise() {
        for m in [2u64, 3, 4, 6, 7, 12] {
            let t = BinomTable::new(m, 40);
            for n in 1..=40u64 {
                assert_eq!(t.get(n, 0), 1 % m);
                assert_eq!(t.get(n, n), 1 % m);
                for k in 1..n {
                    assert_eq!(
                        t.get(n, k),
                        (t.get(n - 1, k - 1) + t.get(n - 1, k)) % m,
                        "m={m} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn binom_table_agrees_with_exact_reduction() {
        for m in [2u64, 3, 4, 5, 6, 9] {
            let t = BinomTable::new(m, 30);
            for n in 0..=30u64 {
                for k in 0..=n {
                    let exact = binom_exact(n, k).unwrap();
                    assert_eq!(t.get(n, k) as u128, exact % m as u128);
                }
            }
        }
    }

    #[test]
    fn lucas_agrees_with_pascal_for_prime_moduli() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let t = BinomTable::new(p, (p * p) as usize);
            for n in 0..p * p {
                for k in 0..=n {
                    assert_eq!(
                        binom_mod_lucas(n, k, p).unwrap(),
                        t.get(n, k),
                        "p={p} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn lucas_rejects_composite_modulus() {
        assert_eq!(
            binom_mod_lucas(5, 2, 4),
            Err(ModMathError::NonPrimeModulus(4))
        );
    }

    #[test]
    fn hockey_stick_examples() {
        assert_eq!(hockey_stick_lhs(0, 3).unwrap(), 4);
        assert_eq!(hockey_stick_lhs(2, 2).unwrap(), 10);
        assert_eq!(hockey_stick_lhs(1, 0).unwrap(), 1);
    }

    #[test]
    fn hockey_stick_identity_to_30() {
        for l in 0..=30u64 {
            for k in 0..=30u64 {
                assert_eq!(
                    hockey_stick_lhs(l, k).unwrap(),
                    binom_exact(l + k + 1, k).unwrap(),
                    "l={l} k={k}"
                );
            }
        }
    }

    #[test]
    fn vanishing_family_for_prime_dimensions() {
        // C(r + d - 2, d - 2) mod d is 1 at r = 0, d - 1 at r = 1, and
        // vanishes for 2 <= r <= d - 1.
        for d in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(binom_mod(d - 2, d - 2, d), 1);
            if d > 2 {
                assert_eq!(binom_mod(d - 1, d - 2, d), d - 1);
            }
            for r in 2..d {
                assert_eq!(binom_mod(r + d - 2, d - 2, d), 0, "d={d} r={r}");
            }
        }
    }

    #[test]
    fn stage4_delta_identity() {
        // C(k - m + d, d - 1) mod d is 1 exactly at m = k + 1 within range.
        for d in [2u64, 3, 5, 7, 11, 13] {
            for k1 in 1..d {
                // k1 = k + 1
                for m in 0..=k1 {
                    let expect = if m == k1 { 1 } else { 0 };
                    assert_eq!(
                        binom_mod(k1 - 1 + d - m, d - 1, d),
                        expect,
                        "d={d} k+1={k1} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 4), Ok(3));
        for d in 2..20u64 {
            assert_eq!(mod_inverse(1, d), Ok(1));
        }
        assert!(matches!(
            mod_inverse(2, 4),
            Err(ModMathError::NotInvertible { gcd: 2, .. })
        ));
    }

    #[test]
    fn mod_inverse_of_every_unit_up_to_50() {
        for d in 2..=50u64 {
            for x in units(d) {
                let inv = mod_inverse(x, d).unwrap();
                assert!(inv < d);
                assert_eq!(inv * x % d, 1, "d={d} x={x}");
            }
            // and every non-unit is rejected
            for x in 0..d {
                if gcd(x, d) != 1 {
                    assert!(mod_inverse(x, d).is_err(), "d={d} x={x}");
                }
            }
        }
    }

    #[test]
    fn binom_exact_overflow_is_reported() {
        assert!(binom_exact(200, 100).is_err());
        assert_eq!(
            binom_exact(61, 30).unwrap() % 7,
            binom_mod(61, 30, 7) as u128
        );
    }
}
