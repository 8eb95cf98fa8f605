//! Prime-field arithmetic and the column-index <-> polynomial bijection.
//!
//! Columns of the measurement matrix are indexed by polynomials of degree
//! less than `r` with coefficients in F_q. The bijection used throughout is
//! little-endian base-q digits: coefficient `i` of column `j` is the `i`-th
//! digit of `j` in base `q`.

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps q^2 rows addressable and products in u64.
pub const MAX_MODULUS: u64 = 1 << 16;

/// Largest degree bound accepted (digit buffers are stack-allocated).
pub const MAX_DEGREE_BOUND: usize = 16;

/// Deterministic primality test by trial division up to sqrt(x).
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The finite field F_q for a prime modulus q.
///
/// Only prime moduli are supported; prime powers would need extension-field
/// arithmetic and every planner output is prime anyway.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::OutOfRange {
                what: "field modulus",
                value: q,
                limit: MAX_MODULUS,
            });
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        a * b % self.q
    }
}

/// A polynomial over F_q of degree < r, stored as `r` coefficients.
///
/// `coeffs[i]` multiplies x^i; trailing zero coefficients are kept so that
/// the length always equals the degree bound of the ambient family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(coeffs: Vec<u64>, field: &PrimeField) -> Result<Self> {
        for &c in &coeffs {
            if c >= field.modulus() {
                return Err(Error::OutOfRange {
                    what: "coefficient",
                    value: c,
                    limit: field.modulus() - 1,
                });
            }
        }
        Ok(Poly { coeffs })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Horner evaluation of the polynomial at `x`.
    pub fn eval(&self, x: u64, field: &PrimeField) -> Result<u64> {
        if x >= field.modulus() {
            return Err(Error::OutOfRange {
                what: "evaluation point",
                value: x,
                limit: field.modulus() - 1,
            });
        }
        Ok(eval_digits(&self.coeffs, x, field.modulus()))
    }
}

/// Horner evaluation over a raw digit slice; `x` must already be reduced.
#[inline]
pub(crate) fn eval_digits(coeffs: &[u64], x: u64, q: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (acc * x + c) % q;
    }
    acc
}

/// Maps a column index to its polynomial: coefficient `i` is the `i`-th
/// base-q digit of `j` (little-endian, so `coeffs[0] = j mod q`).
pub fn index_to_poly(j: u64, field: &PrimeField, r: usize) -> Result<Poly> {
    let q = field.modulus();
    let limit = checked_pow(q, r);
    if u128::from(j) >= limit {
        return Err(Error::OutOfRange {
            what: "column index",
            value: j,
            limit: (limit - 1).min(u64::MAX as u128) as u64,
        });
    }
    let mut coeffs = vec![0u64; r];
    let mut rest = j;
    for c in coeffs.iter_mut() {
        *c = rest % q;
        rest /= q;
    }
    Ok(Poly { coeffs })
}

/// Inverse of [`index_to_poly`].
pub fn poly_to_index(p: &Poly, field: &PrimeField) -> u64 {
    let q = field.modulus();
    let mut j = 0u64;
    for &c in p.coeffs().iter().rev() {
        j = j * q + c;
    }
    j
}

/// q^r without overflow (as u128).
pub(crate) fn checked_pow(q: u64, r: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..r {
        acc = acc.saturating_mul(u128::from(q));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_cases() {
        assert!(is_prime(2));
        assert!(is_prime(29));
        assert!(!is_prime(33));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        let known = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        for x in 2..50u64 {
            assert_eq!(is_prime(x), known.contains(&x), "x = {x}");
        }
    }

    #[test]
    fn rejects_composite_and_oversized_moduli() {
        assert_eq!(PrimeField::new(33), Err(Error::NotPrime(33)));
        assert!(PrimeField::new(MAX_MODULUS + 1).is_err());
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn horner_matches_direct_evaluation_examples() {
        let f3 = PrimeField::new(3).unwrap();
        // a(x) = 1 + 2x + x^2 + x^3 over F_3
        let a = Poly::new(vec![1, 2, 1, 1], &f3).unwrap();
        assert_eq!(a.eval(0, &f3).unwrap(), 1);
        assert_eq!(a.eval(1, &f3).unwrap(), 2);
        assert_eq!(a.eval(2, &f3).unwrap(), 2);

        let zero = Poly::new(vec![0, 0, 0], &f3).unwrap();
        for x in 0..3 {
            assert_eq!(zero.eval(x, &f3).unwrap(), 0);
        }
        assert!(a.eval(3, &f3).is_err());
    }

    #[test]
    fn index_poly_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(index_to_poly(0, &f3, 4).unwrap().coeffs(), &[0, 0, 0, 0]);
        assert_eq!(index_to_poly(8, &f3, 2).unwrap().coeffs(), &[2, 2]);
        // 5 = 2 + 1*3
        assert_eq!(index_to_poly(5, &f3, 2).unwrap().coeffs(), &[2, 1]);
        assert!(index_to_poly(9, &f3, 2).is_err());
    }

    #[test]
    fn index_poly_round_trip_exhaustive() {
        for (q, r) in [(3u64, 4usize), (5, 3), (7, 3), (13, 2), (2, 10)] {
            let field = PrimeField::new(q).unwrap();
            let count = checked_pow(q, r) as u64;
            assert!(count <= 10_000);
            for j in 0..count {
                let p = index_to_poly(j, &field, r).unwrap();
                assert_eq!(p.coeffs().len(), r);
                assert_eq!(poly_to_index(&p, &field), j);
            }
        }
    }

    #[test]
    fn field_laws_exhaustive_small_q() {
        for q in [2u64, 3, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    // Two distinct polynomials of degree <= r-1 agree on at most r-1 points.
    // This is what bounds the column inner products of the matrix.
    #[test]
    fn distinct_polys_agree_on_few_points() {
        for (q, r) in [(3u64, 2usize), (3, 3), (5, 2), (5, 3)] {
            let field = PrimeField::new(q).unwrap();
            let count = checked_pow(q, r) as u64;
            for j in 0..count {
                let pj = index_to_poly(j, &field, r).unwrap();
                for t in (j + 1)..count {
                    let pt = index_to_poly(t, &field, r).unwrap();
                    let agreements = (0..q)
                        .filter(|&x| pj.eval(x, &field).unwrap() == pt.eval(x, &field).unwrap())
                        .count();
                    assert!(
                        agreements <= r - 1,
                        "q={q} r={r} j={j} t={t}: {agreements} agreements"
                    );
                }
            }
        }
    }
}
