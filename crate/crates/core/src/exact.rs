//! Exact arithmetic for rational linear combinations of prime logarithms.
//!
//! Every quantity this crate compares — descriptive lengths, entropies,
//! redundancies — has the form `sum over primes p of r_p * ln p` with
//! rational coefficients `r_p`. By unique factorization such a sum is zero
//! iff all coefficients are zero, so ordering two values reduces to an
//! arbitrary-precision integer comparison and never needs floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational. Stored in lowest terms with a positive
/// denominator (guaranteed by `num-rational`).
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("logarithm argument must be positive")]
    NonPositiveLog,
    #[error("prime factor does not fit in 64 bits")]
    FactorTooLarge,
}

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An exact value `sum_p coeff(p) * ln p` over prime keys.
///
/// Zero coefficients are never stored, so two values are equal iff their
/// term maps are identical.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ExactReal {
    terms: BTreeMap<u64, Rational>,
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Builds a single `coeff * ln p` term. `p` must be prime; this is only
    /// checked by debug assertion since callers pass known primes.
    pub fn from_term(p: u64, coeff: Rational) -> Self {
        debug_assert!(is_prime_u64(p), "{p} is not prime");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(p, coeff);
        }
        Self { terms }
    }

    /// `ln x` for a positive rational `x`, decomposed over the prime
    /// factorizations of numerator and denominator.
    pub fn from_ln(x: &Rational) -> Result<Self, ExactError> {
        if !x.is_positive() {
            return Err(ExactError::NonPositiveLog);
        }
        let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
        let num = x.numer().to_biguint().expect("positive numerator");
        let den = x.denom().to_biguint().expect("positive denominator");
        for (p, e) in factor(&num)? {
            *terms.entry(p).or_insert_with(Rational::zero) += Rational::from_integer(e.into());
        }
        for (p, e) in factor(&den)? {
            *terms.entry(p).or_insert_with(Rational::zero) -= Rational::from_integer(e.into());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self { terms })
    }

    /// `ln x` for a positive integer.
    pub fn from_ln_u64(x: u64) -> Self {
        Self::from_ln(&Rational::from_integer(x.into())).expect("positive integer")
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(p, r)| (*p, r * c))
            .collect();
        Self { terms }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (p, c) in &other.terms {
            let entry = self.terms.entry(*p).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(p);
            }
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (p, c) in &other.terms {
            let entry = self.terms.entry(*p).or_insert_with(Rational::zero);
            *entry -= c;
            if entry.is_zero() {
                self.terms.remove(p);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (*p, -c)).collect();
        Self { terms }
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        self.cmp(&Self::zero())
    }

    /// Rational interval `[lo, hi]` containing the value, with width at most
    /// `n_terms * 2^-bits`. Used for decimal rendering and as a fast filter;
    /// never used to decide equality.
    pub fn eval_interval(&self, bits: u32) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (p, c) in &self.terms {
            let (plo, phi) = ln_interval(&Rational::from_integer((*p).into()), bits);
            if c.is_positive() {
                lo += c * &plo;
                hi += c * &phi;
            } else {
                lo += c * &phi;
                hi += c * &plo;
            }
        }
        (lo, hi)
    }

    /// Correctly rounded decimal rendering with `digits` fractional digits
    /// (round half away from zero; ties cannot occur for nonzero values since
    /// a nonzero rational combination of prime logs is irrational).
    pub fn to_decimal(&self, digits: usize) -> String {
        assert!(digits >= 1, "need at least one fractional digit");
        let scale = BigInt::from(10u32).pow(digits as u32);
        if self.is_zero() {
            return render_scaled(&BigInt::zero(), digits);
        }
        let negative = self.sign() == Ordering::Less;
        let value = if negative { self.neg() } else { self.clone() };
        let half = ratio(1, 2);
        let mut bits = 64u32;
        loop {
            let (lo, hi) = value.eval_interval(bits);
            let scaled_lo = &lo * Rational::from_integer(scale.clone()) + &half;
            let scaled_hi = &hi * Rational::from_integer(scale.clone()) + &half;
            let n_lo = scaled_lo.floor().to_integer();
            let n_hi = scaled_hi.floor().to_integer();
            if n_lo == n_hi {
                let body = render_scaled(&n_lo, digits);
                return if negative { format!("-{body}") } else { body };
            }
            bits *= 2;
        }
    }
}

fn render_scaled(n: &BigInt, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let int = n / &scale;
    let frac = n % &scale;
    format!("{}.{:0>width$}", int, frac.to_string(), width = digits)
}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactReal {
    /// Compares exactly: clear denominators of the difference to integer
    /// exponents `n_p`, then compare the integer products of the positive
    /// against the negative side.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut diff: BTreeMap<u64, Rational> = self.terms.clone();
        for (p, c) in &other.terms {
            let entry = diff.entry(*p).or_insert_with(Rational::zero);
            *entry -= c;
            if entry.is_zero() {
                diff.remove(p);
            }
        }
        if diff.is_empty() {
            return Ordering::Equal;
        }
        let mut lcm = BigInt::one();
        for c in diff.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (p, c) in &diff {
            let exp = c.numer() * (&lcm / c.denom());
            let mag = exp
                .magnitude()
                .to_u64()
                .expect("exponent too large for exact comparison");
            let powed = pow_u64(*p, mag);
            if exp.is_positive() {
                pos *= powed;
            } else {
                neg *= powed;
            }
        }
        pos.cmp(&neg)
    }
}

fn pow_u64(base: u64, exp: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut base = BigUint::from(base);
    let mut exp = exp;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    acc
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactReal({self})")
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "ln {p}")?;
            } else if mag.denom().is_one() {
                write!(f, "{}*ln {p}", mag.numer())?;
            } else {
                write!(f, "({}/{})*ln {p}", mag.numer(), mag.denom())?;
            }
        }
        Ok(())
    }
}

/// Compares two exact values; exposed for readability at call sites.
pub fn exact_compare(a: &ExactReal, b: &ExactReal) -> Ordering {
    a.cmp(b)
}

// --- integer factorization -------------------------------------------------

/// Prime factorization of a positive integer as `(prime, exponent)` pairs in
/// ascending prime order. Values must fit in 128 bits after small factors
/// are removed; larger survivors report `FactorTooLarge`.
pub fn factor(x: &BigUint) -> Result<Vec<(u64, u32)>, ExactError> {
    if x.is_zero() {
        panic!("factor(0)");
    }
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    let mut rest = x.clone();
    // Strip small primes first so that big inputs usually reduce to u128.
    for p in 2u64..=4096 {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        while (&rest % &pb).is_zero() {
            *out.entry(p).or_insert(0) += 1;
            rest /= &pb;
        }
    }
    if !rest.is_one() {
        let v = rest.to_u128().ok_or(ExactError::FactorTooLarge)?;
        factor_u128(v, &mut out)?;
    }
    Ok(out.into_iter().collect())
}

fn factor_u128(mut v: u128, out: &mut BTreeMap<u64, u32>) -> Result<(), ExactError> {
    while v > 1 {
        if is_prime_u128(v) {
            let p = u64::try_from(v).map_err(|_| ExactError::FactorTooLarge)?;
            *out.entry(p).or_insert(0) += 1;
            return Ok(());
        }
        let d = pollard_rho(v);
        let (small, large) = if is_prime_u128(d) { (d, v / d) } else { (v / d, d) };
        if is_prime_u128(small) {
            let p = u64::try_from(small).map_err(|_| ExactError::FactorTooLarge)?;
            let mut count = 0;
            while v % small == 0 {
                count += 1;
                v /= small;
            }
            *out.entry(p).or_insert(0) += count;
        } else {
            factor_u128(small, out)?;
            v = large;
        }
    }
    Ok(())
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // Schoolbook double-and-add; inputs stay below 2^127 in practice.
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // Miller-Rabin. The base set is deterministic for all n < 3.3 * 10^24,
    // which covers every value this crate factors in practice.
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_u64(n: u64) -> bool {
    is_prime_u128(n as u128)
}

fn pollard_rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        while d == 1 {
            x = (mul_mod(x, x, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            let diff = if x > y { x - y } else { y - x };
            d = gcd_u128(diff, n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// --- rational logarithm intervals -------------------------------------------

/// Rational interval `[lo, hi]` containing `ln x`, with `hi - lo <= 2^-bits`.
///
/// The argument is reduced to `m * 2^k` with `m` in `[1, 2)`, so the atanh
/// series argument `(m-1)/(m+1)` stays below `1/3` and converges quickly.
pub fn ln_interval(x: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(x.is_positive(), "ln of non-positive value");
    let one = Rational::one();
    let two = ratio(2, 1);
    let mut m = x.clone();
    let mut k: i64 = 0;
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < one {
        m *= &two;
        k -= 1;
    }
    // Budget: half the error to the mantissa series, half to k * ln 2.
    let (mlo, mhi) = atanh_double(&m, bits + 2);
    if k == 0 {
        return (mlo, mhi);
    }
    let kextra = 64 - (k.unsigned_abs().leading_zeros());
    let (l2lo, l2hi) = atanh_double(&two, bits + 2 + kextra);
    let kq = Rational::from_integer(k.into());
    if k > 0 {
        (mlo + &kq * l2lo, mhi + &kq * l2hi)
    } else {
        (mlo + &kq * l2hi, mhi + &kq * l2lo)
    }
}

/// `ln x = 2 atanh((x-1)/(x+1))` as a rational interval with error below
/// `2^-bits`, for `x` in `[1, 2]`.
fn atanh_double(x: &Rational, bits: u32) -> (Rational, Rational) {
    let one = Rational::one();
    if x == &one {
        return (Rational::zero(), Rational::zero());
    }
    let z = (x - &one) / (x + &one);
    let z2 = &z * &z;
    let tolerance = Rational::new(BigInt::one(), BigInt::one() << bits);
    let mut term = z.clone();
    let mut sum = Rational::zero();
    let mut j = 0u32;
    loop {
        sum += &term / Rational::from_integer((2 * j + 1).into());
        term *= &z2;
        j += 1;
        // Tail bound: term / ((2j+1) (1 - z^2)); z <= 1/3 makes 1/(1-z^2) <= 9/8.
        let tail = &term * ratio(9, 8) / Rational::from_integer((2 * j + 1).into());
        if tail * ratio(2, 1) <= tolerance {
            let lo = &sum * ratio(2, 1);
            let hi = (&sum + (&term * ratio(9, 8) / Rational::from_integer((2 * j + 1).into())))
                * ratio(2, 1);
            return (lo, hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ln_of(n: i64, d: i64) -> ExactReal {
        ExactReal::from_ln(&ratio(n, d)).unwrap()
    }

    #[test]
    fn ln_one_is_empty() {
        assert!(ln_of(1, 1).is_zero());
    }

    #[test]
    fn ln_eight_is_three_ln_two() {
        let v = ln_of(8, 1);
        let terms: Vec<_> = v.terms().map(|(p, c)| (p, c.clone())).collect();
        assert_eq!(terms, vec![(2, ratio(3, 1))]);
    }

    #[test]
    fn ln_one_thirtieth_has_three_negative_terms() {
        let v = ln_of(1, 30);
        let terms: Vec<_> = v.terms().map(|(p, c)| (p, c.clone())).collect();
        assert_eq!(
            terms,
            vec![(2, ratio(-1, 1)), (3, ratio(-1, 1)), (5, ratio(-1, 1))]
        );
    }

    #[test]
    fn compare_equal_values() {
        assert_eq!(exact_compare(&ln_of(8, 1), &ln_of(8, 1)), Ordering::Equal);
    }

    #[test]
    fn two_ln_three_exceeds_three_ln_two() {
        // 3^2 = 9 > 8 = 2^3
        let a = ExactReal::from_ln_u64(3).scaled(&ratio(2, 1));
        let b = ExactReal::from_ln_u64(2).scaled(&ratio(3, 1));
        assert_eq!(exact_compare(&a, &b), Ordering::Greater);
    }

    #[test]
    fn nine_quarters_ln_two_below_ln_six() {
        // 2^9 = 512 < 1296 = 6^4
        let a = ExactReal::from_ln_u64(2).scaled(&ratio(9, 4));
        let b = ExactReal::from_ln_u64(6);
        assert_eq!(exact_compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn decimal_rendering_matches_reference_values() {
        let a = ExactReal::from_ln_u64(2).scaled(&ratio(9, 4));
        assert_eq!(a.to_decimal(6), "1.559581");
        assert_eq!(ExactReal::zero().to_decimal(6), "0.000000");
        assert_eq!(ExactReal::from_ln_u64(30).to_decimal(6), "3.401197");
    }

    #[test]
    fn decimal_rendering_handles_negatives() {
        let a = ExactReal::from_ln_u64(2).scaled(&ratio(-1, 1));
        assert_eq!(a.to_decimal(4), "-0.6931");
    }

    #[test]
    fn factor_small_values() {
        assert_eq!(
            factor(&BigUint::from(360u32)).unwrap(),
            vec![(2, 3), (3, 2), (5, 1)]
        );
        assert_eq!(factor(&BigUint::from(1u32)).unwrap(), vec![]);
        // Survivor beyond the small-prime sieve.
        assert_eq!(
            factor(&BigUint::from(4295098369u64)).unwrap(),
            vec![(65537, 2)]
        );
    }

    #[test]
    fn non_positive_log_is_rejected() {
        assert_eq!(
            ExactReal::from_ln(&ratio(0, 1)),
            Err(ExactError::NonPositiveLog)
        );
        assert_eq!(
            ExactReal::from_ln(&ratio(-3, 7)),
            Err(ExactError::NonPositiveLog)
        );
    }

    #[test]
    fn interval_brackets_value() {
        let v = ExactReal::from_ln_u64(30);
        let (lo, hi) = v.eval_interval(80);
        assert!(lo < hi);
        // ln 30 = 3.4011973816621555...
        assert!(lo < ratio(34011974, 10000000));
        assert!(hi > ratio(34011973, 10000000));
        let width = hi - lo;
        assert!(width < Rational::new(BigInt::one(), BigInt::one() << 70));
    }

    fn small_positive_rational() -> impl Strategy<Value = Rational> {
        (1i64..400, 1i64..400).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn from_ln_is_a_homomorphism(x in small_positive_rational(), y in small_positive_rational()) {
            let lx = ExactReal::from_ln(&x).unwrap();
            let ly = ExactReal::from_ln(&y).unwrap();
            let lxy = ExactReal::from_ln(&(&x * &y)).unwrap();
            prop_assert_eq!(lx.add(&ly), lxy);
        }

        #[test]
        fn compare_agrees_with_interval_evaluation(
            a in proptest::collection::vec((prop_oneof![Just(2u64), Just(3), Just(5), Just(7)], -20i64..20, 1i64..9), 0..4),
            b in proptest::collection::vec((prop_oneof![Just(2u64), Just(3), Just(5), Just(7)], -20i64..20, 1i64..9), 0..4),
        ) {
            let build = |spec: &[(u64, i64, i64)]| {
                let mut v = ExactReal::zero();
                for (p, n, d) in spec {
                    v.add_assign(&ExactReal::from_term(*p, ratio(*n, *d)));
                }
                v
            };
            let va = build(&a);
            let vb = build(&b);
            let diff = va.sub(&vb);
            let (lo, hi) = diff.eval_interval(200);
            if lo.is_positive() {
                prop_assert_eq!(exact_compare(&va, &vb), Ordering::Greater);
            } else if hi.is_negative() {
                prop_assert_eq!(exact_compare(&va, &vb), Ordering::Less);
            }
        }

        #[test]
        fn equality_means_identical_term_maps(x in small_positive_rational()) {
            let v = ExactReal::from_ln(&x).unwrap();
            let w = ExactReal::from_ln(&x).unwrap();
            prop_assert_eq!(exact_compare(&v, &w), Ordering::Equal);
            prop_assert_eq!(v, w);
        }
    }
}
