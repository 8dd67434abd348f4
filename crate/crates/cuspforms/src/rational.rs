//! Exact rational arithmetic, integer factorization and square classes.
//!
//! Everything downstream (Hilbert symbols, form invariants, the solvers)
//! reduces to arithmetic in `Q` and to knowing rationals up to squares, so
//! this module provides the three base types: [`Rational`], [`Factorization`]
//! and [`SquareClass`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number, always stored reduced with positive denominator.
///
/// Zero is `0/1`. The backing storage is [`num_rational::BigRational`], which
/// maintains both invariants on every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let d = denom.into();
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), d)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    /// Sign as `-1`, `0` or `+1`.
    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn pow(&self, exp: i64) -> Result<Self, Error> {
        if self.is_zero() && exp < 0 {
            return Err(Error::ZeroInput);
        }
        let e = i32::try_from(exp).expect("exponent within i32 range");
        Ok(Rational(self.0.pow(e)))
    }

    /// The `p`-adic valuation of a nonzero rational.
    ///
    /// Because the fraction is reduced, at most one of numerator and
    /// denominator is divisible by `p`, so no factorization is needed.
    pub fn valuation(&self, p: &BigInt) -> Result<i64, Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let vn = int_valuation(self.0.numer(), p);
        if vn > 0 {
            return Ok(vn);
        }
        Ok(-int_valuation(self.0.denom(), p))
    }

    /// The unit part `r / p^v` where `v = valuation(r, p)`.
    pub fn unit_part(&self, p: &BigInt) -> Result<Rational, Error> {
        let v = self.valuation(p)?;
        let pw = Rational::from_int(p.clone()).pow(v)?;
        Ok(self.clone() / pw)
    }

    pub(crate) fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let numer = BigInt::from_str(n).map_err(|_| Error::ParseRational(s.to_owned()))?;
        let denom = BigInt::from_str(d).map_err(|_| Error::ParseRational(s.to_owned()))?;
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// A signed prime factorization: `sign * prod p^e` with all `e` nonzero.
///
/// Keys of `exponents` are primes in increasing order; exponents may be
/// negative (denominator primes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i32,
    pub exponents: BTreeMap<BigInt, i64>,
}

impl Factorization {
    /// Reconstructs the rational: `sign * prod p^e`.
    pub fn value(&self) -> Rational {
        let mut acc = if self.sign < 0 {
            -Rational::one()
        } else {
            Rational::one()
        };
        for (p, &e) in &self.exponents {
            let pw = Rational::from_int(p.clone()).pow(e).expect("nonzero base");
            acc = acc * pw;
        }
        acc
    }

    /// Primes carrying an odd exponent, in increasing order.
    pub fn odd_exponent_primes(&self) -> Vec<BigInt> {
        self.exponents
            .iter()
            .filter(|(_, &e)| e % 2 != 0)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

/// Budget for [`factor`]: trial division bound plus a Pollard rho iteration
/// cap. Exceeding the cap is an error rather than a hang.
#[derive(Debug, Clone, Copy)]
pub struct FactorBudget {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1_000_000,
            rho_iterations: 500_000,
        }
    }
}

/// Exact factorization of a nonzero rational with the default budget.
pub fn factor(r: &Rational) -> Result<Factorization, Error> {
    factor_with_budget(r, &FactorBudget::default())
}

pub fn factor_with_budget(r: &Rational, budget: &FactorBudget) -> Result<Factorization, Error> {
    if r.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut exponents = BTreeMap::new();
    for (p, e) in factor_natural(&r.numer().abs(), budget)? {
        *exponents.entry(p).or_insert(0) += e;
    }
    for (p, e) in factor_natural(r.denom(), budget)? {
        *exponents.entry(p).or_insert(0) -= e;
    }
    exponents.retain(|_, e| *e != 0);
    Ok(Factorization {
        sign: r.signum(),
        exponents,
    })
}

/// Factors a positive integer: trial division through the budget's bound,
/// then Brent's variant of Pollard rho on what remains.
fn factor_natural(n: &BigInt, budget: &FactorBudget) -> Result<BTreeMap<BigInt, i64>, Error> {
    debug_assert!(n.is_positive());
    let mut out = BTreeMap::new();
    let mut m = n.clone();
    if m.is_one() {
        return Ok(out);
    }

    for d in TrialDivisors::new(budget.trial_bound) {
        let bd = BigInt::from(d);
        if (&bd * &bd) > m {
            break;
        }
        let mut e = 0i64;
        loop {
            let (q, r) = m.div_rem(&bd);
            if r.is_zero() {
                m = q;
                e += 1;
            } else {
                break;
            }
        }
        if e > 0 {
            out.insert(bd, e);
        }
        if m.is_one() {
            return Ok(out);
        }
    }

    // Remaining cofactor has no prime factor below the trial bound.
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            *out.entry(c).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(&c, budget.rho_iterations).ok_or(Error::BudgetExceeded(format!(
            "factorization of {c} exceeded the rho iteration budget"
        )))?;
        stack.push(&c / &d);
        stack.push(d);
    }
    Ok(out)
}

/// 2, 3, then the 6k+-1 progression up to the bound. Composite candidates
/// in the progression are harmless: their prime factors appear earlier, so
/// the corresponding division can never succeed.
struct TrialDivisors {
    next: u64,
    step: u64,
    bound: u64,
}

impl TrialDivisors {
    fn new(bound: u64) -> Self {
        TrialDivisors {
            next: 2,
            step: 2,
            bound,
        }
    }
}

impl Iterator for TrialDivisors {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let d = self.next;
        if d > self.bound {
            return None;
        }
        self.next = match d {
            2 => 3,
            3 => 5,
            _ => {
                let n = d + self.step;
                self.step = 6 - self.step;
                n
            }
        };
        Some(d)
    }
}

/// Miller-Rabin with the first twelve prime bases; deterministic for all
/// inputs below 3.3e24, which covers everything a factoring budget can emit.
pub fn is_prime(n: &BigInt) -> bool {
    if n <= &BigInt::from(1) {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        let bp = BigInt::from(p);
        if n == &bp {
            return true;
        }
        if (n % bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = int_valuation(&n_minus_1, &BigInt::from(2));
    let d = &n_minus_1 >> (s as usize);
    'witness: for &a in &SMALL {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x.modpow(&BigInt::from(2), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle-finding variant of Pollard rho. Returns a nontrivial factor
/// of the odd composite `n`, or `None` if the iteration cap is exhausted.
fn pollard_rho(n: &BigInt, max_iterations: u64) -> Option<BigInt> {
    let one = BigInt::one();
    let two = BigInt::from(2);
    if (n % &two).is_zero() {
        return Some(two);
    }
    let mut iterations = 0u64;
    for c in 1u64.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = two.clone();
        let mut y = two.clone();
        let mut d = one.clone();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
            iterations += 1;
            if iterations >= max_iterations {
                return None;
            }
        }
        if &d != n {
            return Some(d);
        }
        // Cycle collapsed to n itself: retry with the next polynomial.
    }
    unreachable!()
}

/// An element of `Q^x / (Q^x)^2`, stored as its unique signed squarefree
/// integer representative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass {
    representative: BigInt,
}

impl SquareClass {
    /// Wraps an integer already known to be squarefree and nonzero.
    pub fn from_squarefree(n: impl Into<BigInt>) -> Result<Self, Error> {
        let n = n.into();
        if n.is_zero() {
            return Err(Error::ZeroInput);
        }
        let class = square_class(&Rational::from_int(n.clone()))?;
        if class.representative != n {
            return Err(Error::NotSquarefree(n.to_string()));
        }
        Ok(class)
    }

    pub fn one() -> Self {
        SquareClass {
            representative: BigInt::one(),
        }
    }

    pub fn minus_one() -> Self {
        SquareClass {
            representative: -BigInt::one(),
        }
    }

    pub fn representative(&self) -> &BigInt {
        &self.representative
    }

    pub fn is_positive(&self) -> bool {
        self.representative.is_positive()
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_int(self.representative.clone())
    }

    /// Class multiplication: the square class of the product.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        square_class(&(self.to_rational() * other.to_rational()))
            .expect("product of nonzero classes is nonzero")
    }

    pub fn neg(&self) -> SquareClass {
        SquareClass {
            representative: -&self.representative,
        }
    }

    pub fn is_one(&self) -> bool {
        self.representative.is_one()
    }

    /// The primes dividing the representative, in increasing order.
    pub fn prime_support(&self) -> Vec<BigInt> {
        factor(&self.to_rational())
            .expect("squarefree representative factors within budget")
            .odd_exponent_primes()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative)
    }
}

impl fmt::Debug for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative)
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.representative.to_string())
    }
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let r: Rational = s.parse().map_err(|e| D::Error::custom(format!("{e}")))?;
        square_class(&r).map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Canonical square class of a nonzero rational: the sign times the product
/// of the primes appearing with odd exponent.
pub fn square_class(r: &Rational) -> Result<SquareClass, Error> {
    let f = factor(r)?;
    let mut rep = BigInt::from(f.sign);
    for p in f.odd_exponent_primes() {
        rep *= p;
    }
    Ok(SquareClass {
        representative: rep,
    })
}

/// Compares `|a|` with the rational height `|numer * denom|` used to order
/// search certificates.
pub(crate) fn height(r: &Rational) -> BigInt {
    r.numer().abs() * r.denom()
}

#[allow(unused)]
pub(crate) fn cmp_by_height(a: &Rational, b: &Rational) -> Ordering {
    height(a).cmp(&height(b)).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn display_omits_unit_denominator() {
        assert_eq!(q("5").to_string(), "5");
        assert_eq!(q("-3/4").to_string(), "-3/4");
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("0").to_string(), "0");
        assert_eq!(q("2/-4").to_string(), "-1/2");
    }

    #[test]
    fn factor_one_is_empty_product() {
        let f = factor(&q("1")).unwrap();
        assert_eq!(f.sign, 1);
        assert!(f.exponents.is_empty());
    }

    #[test]
    fn factor_minus_twelve() {
        let f = factor(&q("-12")).unwrap();
        assert_eq!(f.sign, -1);
        let expected: BTreeMap<BigInt, i64> =
            [(BigInt::from(2), 2), (BigInt::from(3), 1)].into_iter().collect();
        assert_eq!(f.exponents, expected);
    }

    #[test]
    fn factor_ten_ninths() {
        let f = factor(&q("10/9")).unwrap();
        assert_eq!(f.sign, 1);
        let expected: BTreeMap<BigInt, i64> = [
            (BigInt::from(2), 1),
            (BigInt::from(3), -2),
            (BigInt::from(5), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(f.exponents, expected);
    }

    #[test]
    fn factor_rejects_zero() {
        assert!(matches!(factor(&q("0")), Err(Error::ZeroInput)));
    }

    #[test]
    fn factor_budget_exceeded_on_hard_semiprime() {
        // Product of two 18-digit primes; unreachable with a tiny budget.
        let p = BigInt::parse_bytes(b"523347633027360537213687137", 10).unwrap();
        let r = Rational::from_int(&p * &p + 6); // composite, not a square
        let tiny = FactorBudget {
            trial_bound: 100,
            rho_iterations: 10,
        };
        assert!(matches!(
            factor_with_budget(&r, &tiny),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn square_class_examples() {
        assert_eq!(square_class(&q("18")).unwrap().representative(), &BigInt::from(2));
        assert_eq!(square_class(&q("-3/4")).unwrap().representative(), &BigInt::from(-3));
        assert_eq!(square_class(&q("1")).unwrap().representative(), &BigInt::from(1));
    }

    #[test]
    fn square_class_rejects_zero() {
        assert!(matches!(square_class(&q("0")), Err(Error::ZeroInput)));
    }

    #[test]
    fn valuation_and_unit_part() {
        let p2 = BigInt::from(2);
        let p3 = BigInt::from(3);
        assert_eq!(q("-12").valuation(&p2).unwrap(), 2);
        assert_eq!(q("-12").unit_part(&p2).unwrap(), q("-3"));
        assert_eq!(q("5/8").valuation(&p2).unwrap(), -3);
        assert_eq!(q("5/8").unit_part(&p2).unwrap(), q("5"));
        assert_eq!(q("7").valuation(&p3).unwrap(), 0);
        assert_eq!(q("7").unit_part(&p3).unwrap(), q("7"));
    }

    #[test]
    fn valuation_rejects_zero() {
        assert!(q("0").valuation(&BigInt::from(2)).is_err());
    }

    #[test]
    fn squareclass_from_squarefree_validates() {
        assert!(SquareClass::from_squarefree(-15).is_ok());
        assert!(matches!(
            SquareClass::from_squarefree(12),
            Err(Error::NotSquarefree(_))
        ));
        assert!(SquareClass::from_squarefree(0).is_err());
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(&BigInt::from(2)));
        assert!(is_prime(&BigInt::from(104729)));
        assert!(!is_prime(&BigInt::from(1)));
        assert!(!is_prime(&BigInt::from(104729i64 * 104729)));
        assert!(is_prime(&BigInt::parse_bytes(b"2305843009213693951", 10).unwrap()));
    }

    #[test]
    fn rho_factors_past_trial_bound() {
        // 1000003 * 1000033 has no factor below the small trial bound used here.
        let n = Rational::from_int(BigInt::from(1000003u64) * BigInt::from(1000033u64));
        let budget = FactorBudget {
            trial_bound: 1000,
            rho_iterations: 500_000,
        };
        let f = factor_with_budget(&n, &budget).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.exponents.len(), 2);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_nonzero_rational() -> impl Strategy<Value = Rational> {
            (-300i64..300, 1i64..60)
                .prop_filter("nonzero", |(n, _)| *n != 0)
                .prop_map(|(n, d)| Rational::new(n, d).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn square_class_ignores_square_factors(
                r in arb_nonzero_rational(),
                s in arb_nonzero_rational(),
            ) {
                let scaled = r.clone() * (s.clone() * s);
                prop_assert_eq!(square_class(&scaled).unwrap(), square_class(&r).unwrap());
            }

            #[test]
            fn factorization_round_trips(r in arb_nonzero_rational()) {
                prop_assert_eq!(factor(&r).unwrap().value(), r);
            }

            #[test]
            fn valuation_is_additive(
                r in arb_nonzero_rational(),
                s in arb_nonzero_rational(),
                p_idx in 0usize..5,
            ) {
                let p = BigInt::from([2u64, 3, 5, 7, 11][p_idx]);
                let prod = r.clone() * s.clone();
                prop_assert_eq!(
                    prod.valuation(&p).unwrap(),
                    r.valuation(&p).unwrap() + s.valuation(&p).unwrap()
                );
            }
        }
    }
}
