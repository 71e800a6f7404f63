//! Exact integer primitives: gcd, valuations, perfect squares, Pythagorean
//! triple algebra and the four-gcd coprime split.
//!
//! Everything here works on [`Int`] (an arbitrary-precision signed integer),
//! so magnitudes produced by search bounds never overflow.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The universal scalar.
pub type Int = BigInt;

/// Largest `p` whose primality `nu_p` verifies itself.
pub const PRIMALITY_CHECK_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("gcd(0, 0) is undefined")]
    DegenerateInput,
    #[error("valuation of zero is undefined")]
    UndefinedValuation,
    #[error("{0} is not prime")]
    NotPrime(Int),
    #[error("invalid triple generators (u, v) = ({u}, {v}): need u > v >= 0 and gcd(u, v) = 1")]
    InvalidGenerators { u: Int, v: Int },
    #[error("({a}, {b}, {c}) is not a Pythagorean triple in canonical orientation")]
    NotATriple { a: Int, b: Int, c: Int },
    #[error("({a}, {b}, {c}) is not primitive")]
    NotPrimitive { a: Int, b: Int, c: Int },
    #[error("({a}, {b}, {c}) has the wrong parity: odd leg must come first")]
    ParityError { a: Int, b: Int, c: Int },
    #[error("coprime split preconditions fail for ({x}, {y}, {xp}, {yp})")]
    SplitPreconditionFailed { x: Int, y: Int, xp: Int, yp: Int },
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
}

/// Nonnegative gcd with `gcd(a, 0) = |a|`.
pub fn gcd(a: &Int, b: &Int) -> Result<Int, ArithError> {
    if a.is_zero() && b.is_zero() {
        return Err(ArithError::DegenerateInput);
    }
    Ok(a.gcd(b))
}

/// `gcd(a, b) == 1`, treating `(0, 0)` as not coprime.
pub fn coprime(a: &Int, b: &Int) -> bool {
    gcd(a, b).map(|g| g.is_one()).unwrap_or(false)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Exponent of the prime `p` in `|a|`.
///
/// Primality of `p` is checked by trial division when `p <= 10^6`; larger
/// values are trusted.
pub fn nu_p(p: &Int, a: &Int) -> Result<u32, ArithError> {
    if a.is_zero() {
        return Err(ArithError::UndefinedValuation);
    }
    if p <= &Int::one() {
        return Err(ArithError::NotPrime(p.clone()));
    }
    if let Some(small) = p.to_u64() {
        if small <= PRIMALITY_CHECK_LIMIT && !is_prime_u64(small) {
            return Err(ArithError::NotPrime(p.clone()));
        }
    }
    let p = p.magnitude();
    let mut n = a.magnitude().clone();
    let mut alpha = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Ok(alpha);
        }
        n = q;
        alpha += 1;
    }
}

/// Prime factorization of `|a|` by deterministic trial division, as
/// `(prime, exponent)` pairs in increasing prime order. `factor(±1)` is empty.
pub fn factor(a: &Int) -> Result<Vec<(Int, u32)>, ArithError> {
    if a.is_zero() {
        return Err(ArithError::UndefinedValuation);
    }
    let n = a.magnitude();
    let factors = match n.to_u64() {
        Some(n) => factor_u64(n)
            .into_iter()
            .map(|(p, e)| (Int::from(p), e))
            .collect(),
        None => factor_big(n.clone()),
    };
    Ok(factors)
}

pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn factor_big(mut n: BigUint) -> Vec<(Int, u32)> {
    let mut out = Vec::new();
    let two = BigUint::from(2u32);
    let mut d = two.clone();
    while &d * &d <= n {
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&d);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((Int::from_biguint(Sign::Plus, d.clone()), e));
        }
        d += if d == two { 1u32 } else { 2u32 };
    }
    if n > BigUint::one() {
        out.push((Int::from_biguint(Sign::Plus, n), 1));
    }
    out
}

/// Number of prime factors of `|a|` counted with multiplicity.
pub fn nu(a: &Int) -> Result<u32, ArithError> {
    Ok(factor(a)?.iter().map(|(_, e)| e).sum())
}

/// `Some(r)` with `r >= 0` and `r * r == a` when `a` is a perfect square.
pub fn isqrt_exact(a: &Int) -> Option<Int> {
    if a.is_negative() {
        return None;
    }
    let r = a.sqrt();
    (&r * &r == *a).then_some(r)
}

/// Exact nonnegative `k`-th root of `a`, if there is one.
pub fn iroot_exact(a: &Int, k: u32) -> Option<Int> {
    if a.is_negative() || k == 0 {
        return None;
    }
    let r = a.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *a).then_some(r)
}

/// Pythagorean triple `a² + b² = c²`, optionally carrying its generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PythTriple {
    pub a: Int,
    pub b: Int,
    pub c: Int,
    pub primitive: bool,
    pub generators: Option<(Int, Int)>,
}

/// `(u² − v², 2uv, u² + v²)` for `u > v >= 0`, `gcd(u, v) = 1`.
pub fn pythagorean_compose(u: &Int, v: &Int) -> Result<PythTriple, ArithError> {
    if !(u > v && !v.is_negative() && coprime(u, v)) {
        return Err(ArithError::InvalidGenerators {
            u: u.clone(),
            v: v.clone(),
        });
    }
    let (uu, vv) = (u * u, v * v);
    Ok(PythTriple {
        a: &uu - &vv,
        b: Int::from(2) * u * v,
        c: uu + vv,
        primitive: u.is_odd() != v.is_odd(),
        generators: Some((u.clone(), v.clone())),
    })
}

/// Recovers the unique generators `(u, v)` of a primitive triple given in
/// canonical orientation: odd leg `a`, even leg `b`, all nonnegative.
pub fn pythagorean_decompose(a: &Int, b: &Int, c: &Int) -> Result<(Int, Int), ArithError> {
    let not_triple = || ArithError::NotATriple {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
    };
    if a.is_negative() || b.is_negative() || !c.is_positive() || a * a + b * b != c * c {
        return Err(not_triple());
    }
    if !coprime(a, b) {
        return Err(ArithError::NotPrimitive {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
        });
    }
    if a.is_even() || b.is_odd() {
        return Err(ArithError::ParityError {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
        });
    }
    let two = Int::from(2);
    let u = isqrt_exact(&((c + a) / &two));
    let v = isqrt_exact(&((c - a) / &two));
    match (u, v) {
        (Some(u), Some(v)) => Ok((u, v)),
        _ => Err(ArithError::InternalInvariantBroken(format!(
            "primitive triple ({a}, {b}, {c}) without square half-sums"
        ))),
    }
}

/// The four gcds `(p, q, r, s)` splitting `X·Y = X'·Y'` with coprime pairs:
/// `X = pq`, `Y = rs`, `X' = pr`, `Y' = qs`.
pub fn coprime_split(x: &Int, y: &Int, xp: &Int, yp: &Int) -> Result<(Int, Int, Int, Int), ArithError> {
    let (x, y, xp, yp) = (x.abs(), y.abs(), xp.abs(), yp.abs());
    let product = &x * &y;
    if product.is_zero() || product != &xp * &yp || !coprime(&x, &y) || !coprime(&xp, &yp) {
        return Err(ArithError::SplitPreconditionFailed { x, y, xp, yp });
    }
    let p = x.gcd(&xp);
    let q = x.gcd(&yp);
    let r = y.gcd(&xp);
    let s = y.gcd(&yp);
    let reconstructs = &p * &q == x && &r * &s == y && &p * &r == xp && &q * &s == yp;
    let parts = [&p, &q, &r, &s];
    let pairwise = (0..4).all(|i| (i + 1..4).all(|j| parts[i].gcd(parts[j]).is_one()));
    if !reconstructs || !pairwise {
        return Err(ArithError::InternalInvariantBroken(format!(
            "split ({p}, {q}, {r}, {s}) does not reconstruct ({x}, {y}, {xp}, {yp})"
        )));
    }
    Ok((p, q, r, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn i(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&i(12), &i(18)).unwrap(), i(6));
        assert_eq!(gcd(&i(1), &i(0)).unwrap(), i(1));
        assert_eq!(gcd(&i(-6), &i(35)).unwrap(), i(1));
        assert_eq!(gcd(&i(0), &i(-7)).unwrap(), i(7));
        assert_eq!(gcd(&i(0), &i(0)), Err(ArithError::DegenerateInput));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(nu_p(&i(2), &i(12)).unwrap(), 2);
        assert_eq!(nu_p(&i(3), &i(1)).unwrap(), 0);
        assert_eq!(nu_p(&i(5), &i(0)), Err(ArithError::UndefinedValuation));
        assert_eq!(nu_p(&i(4), &i(16)), Err(ArithError::NotPrime(i(4))));
        assert_eq!(nu_p(&i(1), &i(16)), Err(ArithError::NotPrime(i(1))));
        assert_eq!(nu_p(&i(3), &i(-54)).unwrap(), 3);
        assert_eq!(nu(&i(12)).unwrap(), 3);
        assert_eq!(nu(&i(1)).unwrap(), 0);
        assert_eq!(nu(&i(-6)).unwrap(), 2);
        assert_eq!(nu(&i(0)), Err(ArithError::UndefinedValuation));
    }

    #[test]
    fn nu_on_values_beyond_u64() {
        // 2^70 * 3^2 * 1000003
        let big = num_traits::pow(i(2), 70) * i(9) * i(1_000_003);
        assert_eq!(nu(&big).unwrap(), 73);
        assert_eq!(nu_p(&i(2), &big).unwrap(), 70);
        let f = factor(&big).unwrap();
        assert_eq!(f, vec![(i(2), 70), (i(3), 2), (i(1_000_003), 1)]);
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt_exact(&i(49)), Some(i(7)));
        assert_eq!(isqrt_exact(&i(8)), None);
        assert_eq!(isqrt_exact(&i(0)), Some(i(0)));
        assert_eq!(isqrt_exact(&i(-4)), None);
        assert_eq!(iroot_exact(&i(81), 4), Some(i(3)));
        assert_eq!(iroot_exact(&i(80), 4), None);
    }

    #[test]
    fn isqrt_sampled_squares() {
        for r in (0..=1_000_000i64).step_by(997).chain([1, 2, 3, 999_999, 1_000_000]) {
            assert_eq!(isqrt_exact(&i(r * r)), Some(i(r)));
            if r >= 1 {
                assert_eq!(isqrt_exact(&i(r * r + 1)), None);
            }
        }
    }

    #[test]
    fn compose_examples() {
        // Direct evaluation: (u²−v², 2uv, u²+v²).
        let t = pythagorean_compose(&i(2), &i(1)).unwrap();
        assert_eq!((t.a, t.b, t.c, t.primitive), (i(3), i(4), i(5), true));
        let t = pythagorean_compose(&i(1), &i(0)).unwrap();
        assert_eq!((t.a, t.b, t.c, t.primitive), (i(1), i(0), i(1), true));
        let t = pythagorean_compose(&i(3), &i(1)).unwrap();
        assert_eq!((t.a, t.b, t.c, t.primitive), (i(8), i(6), i(10), false));
        assert!(matches!(
            pythagorean_compose(&i(1), &i(1)),
            Err(ArithError::InvalidGenerators { .. })
        ));
        assert!(matches!(
            pythagorean_compose(&i(4), &i(2)),
            Err(ArithError::InvalidGenerators { .. })
        ));
        assert!(matches!(
            pythagorean_compose(&i(3), &i(-1)),
            Err(ArithError::InvalidGenerators { .. })
        ));
    }

    #[test]
    fn decompose_matches_enumeration_oracle() {
        // Enumerate every (u, v) with u, v <= 5 and keep those generating (3, 4, 5).
        let hits: Vec<(i64, i64)> = (0..=5i64)
            .flat_map(|u| (0..=5i64).map(move |v| (u, v)))
            .filter(|&(u, v)| u > v && u * u - v * v == 3 && 2 * u * v == 4 && u * u + v * v == 5)
            .collect();
        assert_eq!(hits, vec![(2, 1)]);
        assert_eq!(pythagorean_decompose(&i(3), &i(4), &i(5)).unwrap(), (i(2), i(1)));
        assert_eq!(pythagorean_decompose(&i(1), &i(0), &i(1)).unwrap(), (i(1), i(0)));
    }

    #[test]
    fn decompose_errors() {
        assert!(matches!(
            pythagorean_decompose(&i(9), &i(12), &i(15)),
            Err(ArithError::NotPrimitive { .. })
        ));
        assert!(matches!(
            pythagorean_decompose(&i(4), &i(3), &i(5)),
            Err(ArithError::ParityError { .. })
        ));
        assert!(matches!(
            pythagorean_decompose(&i(3), &i(4), &i(6)),
            Err(ArithError::NotATriple { .. })
        ));
        assert!(matches!(
            pythagorean_decompose(&i(-3), &i(4), &i(5)),
            Err(ArithError::NotATriple { .. })
        ));
    }

    #[test]
    fn split_examples() {
        // gcd oracle: (6,10)=2, (6,21)=3, (35,10)=5, (35,21)=7.
        assert_eq!(
            coprime_split(&i(6), &i(35), &i(10), &i(21)).unwrap(),
            (i(2), i(3), i(5), i(7))
        );
        assert_eq!(
            coprime_split(&i(1), &i(1), &i(1), &i(1)).unwrap(),
            (i(1), i(1), i(1), i(1))
        );
        assert!(matches!(
            coprime_split(&i(4), &i(3), &i(6), &i(2)),
            Err(ArithError::SplitPreconditionFailed { .. })
        ));
        assert!(matches!(
            coprime_split(&i(1), &i(0), &i(1), &i(0)),
            Err(ArithError::SplitPreconditionFailed { .. })
        ));
        assert_eq!(
            coprime_split(&i(-6), &i(35), &i(10), &i(-21)).unwrap(),
            (i(2), i(3), i(5), i(7))
        );
    }

    #[test]
    fn round_trip_all_generators_up_to_200() {
        for u in 1..=200i64 {
            for v in 0..u {
                let (u, v) = (i(u), i(v));
                if !coprime(&u, &v) || u.is_odd() == v.is_odd() {
                    continue;
                }
                let t = pythagorean_compose(&u, &v).unwrap();
                assert!(t.primitive);
                assert_eq!(pythagorean_decompose(&t.a, &t.b, &t.c).unwrap(), (u, v));
            }
        }
    }

    fn trial_division_nu(mut n: u64) -> u32 {
        let mut count = 0;
        let mut d = 2;
        while n > 1 {
            while n.is_multiple_of(d) {
                n /= d;
                count += 1;
            }
            d += 1;
        }
        count
    }

    #[test]
    fn nu_is_sum_of_prime_valuations() {
        let primes: Vec<i64> = (2..=100_000i64).filter(|&p| is_prime_u64(p as u64)).collect();
        for a in 1..=100_000i64 {
            let expected = trial_division_nu(a as u64);
            assert_eq!(nu(&i(a)).unwrap(), expected);
            assert_eq!(nu(&i(-a)).unwrap(), expected);
        }
        for a in (1..=100_000i64).step_by(997).chain([2, 65_536, 99_991, 100_000]) {
            let by_primes: u32 = primes
                .iter()
                .take_while(|&&p| p <= a)
                .map(|&p| nu_p(&i(p), &i(a)).unwrap())
                .sum();
            assert_eq!(by_primes, trial_division_nu(a as u64));
        }
    }

    proptest! {
        #[test]
        fn gcd_laws(a in -100_000i64..100_000, b in -100_000i64..100_000, c in -100_000i64..100_000) {
            prop_assume!(a != 0 || b != 0);
            let g = gcd(&i(a), &i(b)).unwrap();
            prop_assert_eq!(&g, &gcd(&i(b), &i(a)).unwrap());
            prop_assert!((i(a) % &g).is_zero() && (i(b) % &g).is_zero());
            prop_assume!(b != 0 || c != 0);
            let left = gcd(&g, &i(c)).unwrap();
            let right = gcd(&i(a), &gcd(&i(b), &i(c)).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn split_recovers_pairwise_coprime_parts([p, q, r, s] in testing::coprime_quad()) {
            let got = coprime_split(&i(p * q), &i(r * s), &i(p * r), &i(q * s)).unwrap();
            prop_assert_eq!(got, (i(p), i(q), i(r), i(s)));
        }
    }
}
