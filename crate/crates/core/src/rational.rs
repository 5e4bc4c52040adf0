//! Exact rational arithmetic confined to the unit interval.
//!
//! Everything the library computes with (degrees of membership, distances,
//! discount factors, tolerances) is a [`UnitRational`]: an arbitrary-precision
//! rational in `[0, 1]`, stored in lowest terms. [`Literal`] keeps a fraction
//! exactly as it was written in a model file (possibly unreduced), which is
//! what the bit-size measure of a model is defined over.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors from constructing or parsing unit-interval rationals.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    /// The text is not of the form `p/q` or `0.d...d`.
    #[error("invalid rational literal `{0}`: expected `p/q` or `0.d...d`")]
    InvalidLiteral(String),
    /// A literal with denominator zero.
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
    /// The value lies outside `[0, 1]`.
    #[error("rational {0} lies outside the unit interval [0, 1]")]
    OutOfUnitRange(String),
}

/// Number of bits needed to write `n` in binary under the encoding
/// convention used for model sizes: `0` and `1` contribute nothing,
/// any larger `n` contributes `ceil(log2 n)`.
fn encoding_bits(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        // ceil(log2 n) == bits(n - 1) for n >= 2
        (n - 1u32).bits()
    }
}

/// An exact rational number in `[0, 1]`, kept in lowest terms.
///
/// Values are immutable and cheap to compare; cloning copies the
/// underlying big integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRational(BigRational);

impl UnitRational {
    /// The constant 0 (= 0/1).
    pub fn zero() -> Self {
        UnitRational(BigRational::zero())
    }

    /// The constant 1 (= 1/1).
    pub fn one() -> Self {
        UnitRational(BigRational::one())
    }

    /// Builds `num/den`, reducing to lowest terms. Fails when `den` is zero
    /// or the value falls outside `[0, 1]`.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator(format!("{num}/{den}")));
        }
        let ratio = BigRational::new(num, den);
        Self::from_ratio(ratio)
    }

    /// Convenience constructor from machine integers.
    pub fn from_u64(num: u64, den: u64) -> Result<Self, RationalError> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    /// Wraps an already-built ratio, checking the unit-interval invariant.
    pub fn from_ratio(ratio: BigRational) -> Result<Self, RationalError> {
        if ratio.is_negative() || ratio > BigRational::one() {
            return Err(RationalError::OutOfUnitRange(ratio.to_string()));
        }
        Ok(UnitRational(ratio))
    }

    /// The underlying reduced ratio, for callers that need signed
    /// intermediate arithmetic (norms, differences).
    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Encoding size in bits of the reduced fraction: the bit counts of
    /// numerator and denominator, where the components 0 and 1 count as 0.
    pub fn bit_size(&self) -> u64 {
        let num = self.0.numer().magnitude();
        let den = self.0.denom().magnitude();
        encoding_bits(num) + encoding_bits(den)
    }

    /// `|self - other|`; stays in `[0, 1]`.
    pub fn abs_diff(&self, other: &UnitRational) -> UnitRational {
        UnitRational((&self.0 - &other.0).abs())
    }

    /// `max(0, self - other)`.
    pub fn saturating_sub(&self, other: &UnitRational) -> UnitRational {
        if self <= other {
            UnitRational::zero()
        } else {
            UnitRational(&self.0 - &other.0)
        }
    }

    /// `min(1, self + other)`.
    pub fn saturating_add(&self, other: &UnitRational) -> UnitRational {
        let sum = &self.0 + &other.0;
        if sum > BigRational::one() {
            UnitRational::one()
        } else {
            UnitRational(sum)
        }
    }
}

impl Mul for &UnitRational {
    type Output = UnitRational;

    fn mul(self, rhs: &UnitRational) -> UnitRational {
        // Product of two unit-interval values is again in [0, 1].
        UnitRational(&self.0 * &rhs.0)
    }
}

impl Mul for UnitRational {
    type Output = UnitRational;

    fn mul(self, rhs: UnitRational) -> UnitRational {
        &self * &rhs
    }
}

impl fmt::Display for UnitRational {
    /// Always renders as `p/q` in lowest terms, including `0/1` and `1/1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for UnitRational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Literal::from_str(s).map(|lit| lit.value())
    }
}

/// A unit-interval fraction exactly as written: `num/den`, not necessarily
/// reduced. Model size measurement is defined over literals, so `8/10`
/// measures as 7 bits even though its value reduces to `4/5`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    num: BigUint,
    den: BigUint,
}

impl Literal {
    /// Builds the literal `num/den`. Fails on zero denominators and on
    /// values outside `[0, 1]`.
    pub fn new(num: BigUint, den: BigUint) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator(format!("{num}/{den}")));
        }
        if num > den {
            return Err(RationalError::OutOfUnitRange(format!("{num}/{den}")));
        }
        Ok(Literal { num, den })
    }

    /// The literal of an already-reduced value, for models built in code
    /// rather than parsed from a file.
    pub fn from_value(value: &UnitRational) -> Self {
        Literal {
            num: value.numer().magnitude().clone(),
            den: value.denom().magnitude().clone(),
        }
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    /// The reduced value of the literal.
    pub fn value(&self) -> UnitRational {
        UnitRational(BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(self.den.clone()),
        ))
    }

    /// Encoding size in bits of the fraction as written.
    pub fn bit_size(&self) -> u64 {
        encoding_bits(&self.num) + encoding_bits(&self.den)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Literal {
    type Err = RationalError;

    /// Accepts `p/q` with decimal integers, or a terminating decimal
    /// `0.d...d` read exactly as `d...d / 10^k`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let invalid = || RationalError::InvalidLiteral(s.to_string());
        if let Some((num_text, den_text)) = s.split_once('/') {
            let num: BigUint = parse_digits(num_text).ok_or_else(invalid)?;
            let den: BigUint = parse_digits(den_text).ok_or_else(invalid)?;
            if den.is_zero() {
                return Err(RationalError::ZeroDenominator(s.to_string()));
            }
            Literal::new(num, den)
        } else if let Some(frac_text) = s.strip_prefix("0.") {
            let num = parse_digits(frac_text).ok_or_else(invalid)?;
            let den = BigUint::from(10u32).pow(frac_text.len() as u32);
            Literal::new(num, den)
        } else {
            Err(invalid())
        }
    }
}

fn parse_digits(text: &str) -> Option<BigUint> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// The unique rational with smallest denominator in the interval
/// `[lo, hi]` (ties on the denominator broken towards the smaller
/// numerator, which only matters for the interval `[0, 1]` itself).
///
/// Works by Stern-Brocot / continued-fraction descent: an integer in the
/// interval is simplest; otherwise strip the integer part, take
/// reciprocals (which swaps the endpoints) and recurse.
///
/// # Panics
///
/// Panics when `lo > hi`.
pub fn smallest_denominator_in(lo: &UnitRational, hi: &UnitRational) -> UnitRational {
    assert!(lo <= hi, "empty interval: {lo} > {hi}");
    UnitRational(simplest_between(lo.as_ratio(), hi.as_ratio()))
}

fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo == hi {
        return lo.clone();
    }
    let lo_ceil = lo.ceil();
    if &lo_ceil <= hi {
        // The smallest integer in the interval beats every proper fraction.
        return lo_ceil;
    }
    // Both endpoints lie strictly between n and n + 1.
    let n = lo.floor();
    let inner = simplest_between(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn ur(num: u64, den: u64) -> UnitRational {
        UnitRational::from_u64(num, den).unwrap()
    }

    #[test]
    fn bit_size_matches_worked_examples() {
        // ceil(log 9) + ceil(log 10) = 4 + 4
        assert_eq!(ur(9, 10).bit_size(), 8);
        // 0 and 1 components contribute nothing
        assert_eq!(UnitRational::zero().bit_size(), 0);
        assert_eq!(UnitRational::one().bit_size(), 0);
        assert_eq!(ur(1, 2).bit_size(), 1);
        // the literal 8/10 as written: ceil(log 8) + ceil(log 10) = 3 + 4
        let lit: Literal = "8/10".parse().unwrap();
        assert_eq!(lit.bit_size(), 7);
        // and its reduced value measures differently
        assert_eq!(lit.value(), ur(4, 5));
        assert_eq!(lit.value().bit_size(), 5);
    }

    #[test]
    fn literal_decimal_form_is_read_exactly() {
        let lit: Literal = "0.9".parse().unwrap();
        assert_eq!(lit.numer(), &BigUint::from(9u32));
        assert_eq!(lit.denom(), &BigUint::from(10u32));
        assert_eq!(lit.value(), ur(9, 10));

        // trailing zeros are kept in the literal
        let lit: Literal = "0.90".parse().unwrap();
        assert_eq!(lit.denom(), &BigUint::from(100u32));
        assert_eq!(lit.bit_size(), 14);
        assert_eq!(lit.value(), ur(9, 10));
    }

    #[test]
    fn literal_rejects_malformed_and_out_of_range_input() {
        for bad in ["", "abc", "1.2", "-1/2", "3/2", "1/0", "2", "0.", "1.0", "1/2/3"] {
            assert!(bad.parse::<Literal>().is_err(), "accepted {bad:?}");
        }
        assert!(matches!(
            "1/0".parse::<Literal>(),
            Err(RationalError::ZeroDenominator(_))
        ));
        assert!(matches!(
            "3/2".parse::<Literal>(),
            Err(RationalError::OutOfUnitRange(_))
        ));
    }

    #[test]
    fn display_round_trips_through_parse() {
        let q = ur(6660, 10000);
        assert_eq!(q.to_string(), "333/500");
        assert_eq!(q.to_string().parse::<UnitRational>().unwrap(), q);
        assert_eq!(UnitRational::zero().to_string(), "0/1");
        assert_eq!(UnitRational::one().to_string(), "1/1");
    }

    #[test]
    fn multiply_is_exact() {
        assert_eq!(&ur(1, 2) * &ur(9, 10), ur(9, 20));
        assert_eq!(ur(1, 1) * ur(7, 9), ur(7, 9));
        assert_eq!(&ur(2, 3) * &UnitRational::zero(), UnitRational::zero());
    }

    #[test]
    fn min_max_follow_the_rational_order() {
        assert_eq!(ur(3, 5).max(ur(4, 5)), ur(4, 5));
        assert_eq!(UnitRational::one().min(ur(7, 9)), ur(7, 9));
        assert_eq!(ur(1, 3).cmp(&ur(2, 6)), Ordering::Equal);
    }

    #[test]
    fn saturating_arithmetic_stays_in_the_unit_interval() {
        assert_eq!(ur(1, 4).saturating_sub(&ur(1, 2)), UnitRational::zero());
        assert_eq!(ur(3, 4).saturating_sub(&ur(1, 4)), ur(1, 2));
        assert_eq!(ur(3, 4).saturating_add(&ur(1, 2)), UnitRational::one());
        assert_eq!(ur(1, 4).saturating_add(&ur(1, 2)), ur(3, 4));
        assert_eq!(ur(1, 4).abs_diff(&ur(3, 4)), ur(1, 2));
    }

    #[test]
    fn smallest_denominator_examples() {
        let zero = UnitRational::zero();
        assert_eq!(smallest_denominator_in(&zero, &zero), zero);
        assert_eq!(smallest_denominator_in(&ur(1, 3), &ur(1, 2)), ur(1, 2));
        assert_eq!(
            smallest_denominator_in(&ur(6660, 10000), &ur(6673, 10000)),
            ur(2, 3)
        );
        // the whole unit interval contains both integers; 0 wins on numerator
        assert_eq!(smallest_denominator_in(&zero, &UnitRational::one()), zero);
        // degenerate non-trivial interval
        assert_eq!(smallest_denominator_in(&ur(5, 7), &ur(5, 7)), ur(5, 7));
    }

    #[test]
    fn smallest_denominator_brute_force_cross_check() {
        // Scan all rationals with denominator <= 10 inside the interval and
        // confirm the claimed minimality on the documented example.
        let lo = ur(6660, 10000);
        let hi = ur(6673, 10000);
        let mut members = std::collections::BTreeSet::new();
        for den in 1u64..=10 {
            for num in 0..=den {
                let q = ur(num, den);
                if q >= lo && q <= hi {
                    members.insert(q);
                }
            }
        }
        assert_eq!(members.into_iter().collect::<Vec<_>>(), vec![ur(2, 3)]);
    }

    proptest! {
        /// An interval of width < 1/(2 D^2) around a rational with
        /// denominator <= D isolates it as the smallest-denominator member.
        #[test]
        fn recovers_isolated_low_denominator_rationals(
            den in 1u64..50,
            num_seed in 0u64..1000,
            width_num in 1u64..1000,
        ) {
            let num = num_seed % (den + 1);
            let target = ur(num, den);
            let width_den = 2 * den * den * (width_num + 1);
            let eps = ur(width_num, width_den);
            prop_assert!(eps.as_ratio() < &(BigRational::new(1.into(), (2 * den * den).into())));
            let lo = target.saturating_sub(&eps);
            let hi = target.saturating_add(&eps);
            prop_assert_eq!(smallest_denominator_in(&lo, &hi), target);
        }

        /// Exact comparison agrees with floating point away from ties.
        #[test]
        fn comparison_agrees_with_f64(
            (an, ad) in (0u64..10_000, 1u64..10_000),
            (bn, bd) in (0u64..10_000, 1u64..10_000),
        ) {
            let a = ur(an.min(ad), ad);
            let b = ur(bn.min(bd), bd);
            let fa = a.as_ratio().to_f64().unwrap();
            let fb = b.as_ratio().to_f64().unwrap();
            if (fa - fb).abs() > 1e-6 {
                prop_assert_eq!(a.cmp(&b), fa.partial_cmp(&fb).unwrap());
            }
        }

        /// Multiplication never leaves the unit interval and is exact.
        #[test]
        fn multiplication_stays_exact(
            (an, ad) in (0u64..1000, 1u64..1000),
            (bn, bd) in (0u64..1000, 1u64..1000),
        ) {
            let a = ur(an.min(ad), ad);
            let b = ur(bn.min(bd), bd);
            let prod = &a * &b;
            prop_assert!(prod <= a.clone().min(b.clone()));
            let expect = BigRational::new(
                BigInt::from(an.min(ad) * bn.min(bd)),
                BigInt::from(ad * bd),
            );
            prop_assert_eq!(prod.as_ratio(), &expect);
        }
    }
}
