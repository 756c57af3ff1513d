//! Semirings used as weight sets.
//!
//! Every weight set implements [`Semiring`]: the two monoid operations plus
//! the exact division, gcd and complement primitives that the reduction
//! rules need. Four instances are provided: [`Boolean`], [`Natural`],
//! [`Tropical`] (min-plus over the naturals with `+inf`) and [`Rational`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::SemiringError;

/// Names of the supported weight sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringKind {
    Boolean,
    Naturals,
    Tropical,
    Rationals,
}

impl SemiringKind {
    pub const ALL: [SemiringKind; 4] = [
        SemiringKind::Boolean,
        SemiringKind::Naturals,
        SemiringKind::Tropical,
        SemiringKind::Rationals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Boolean => "boolean",
            SemiringKind::Naturals => "naturals",
            SemiringKind::Tropical => "tropical",
            SemiringKind::Rationals => "rationals",
        }
    }

    pub fn is_field(self) -> bool {
        matches!(self, SemiringKind::Rationals)
    }

    pub fn is_commutative(self) -> bool {
        true
    }

    /// `a ⊕ a = a` for every `a`.
    pub fn is_idempotent(self) -> bool {
        matches!(self, SemiringKind::Boolean | SemiringKind::Tropical)
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringKind {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boolean" | "bool" | "b" => Ok(SemiringKind::Boolean),
            "naturals" | "natural" | "nat" | "n" => Ok(SemiringKind::Naturals),
            "tropical" | "min-plus" | "minplus" | "t" => Ok(SemiringKind::Tropical),
            "rationals" | "rational" | "q" => Ok(SemiringKind::Rationals),
            other => Err(SemiringError::UnknownSemiring(other.to_string())),
        }
    }
}

/// Which operand a scalar sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The two semiring operations, for callers that select one at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Mul,
}

/// A zero-divisor free semiring that is factorial or a field.
///
/// `try_divide(Side::Left, a, b)` solves `a = b ⊗ x`, `Side::Right` solves
/// `a = x ⊗ b`; `b` must be nonzero. `gcd_pair` must return a common divisor on the requested
/// side that is maximal for divisibility; folding it over a sequence gives
/// [`Semiring::gcd`].
pub trait Semiring:
    Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const KIND: SemiringKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn try_divide(side: Side, a: &Self, b: &Self) -> Option<Self>;
    fn gcd_pair(side: Side, a: &Self, b: &Self) -> Self;

    /// Smallest `γ` with `γ ⊕ v = u`, if any.
    fn try_complement(u: &Self, v: &Self) -> Option<Self>;

    fn parse(s: &str) -> Result<Self, SemiringError>;

    /// A few small nonzero values, used by the random generators.
    fn sample_scalars() -> Vec<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn gcd(side: Side, values: &[Self]) -> Result<Self, SemiringError> {
        let (first, rest) = values.split_first().ok_or(SemiringError::EmptyGcd)?;
        Ok(rest
            .iter()
            .fold(first.clone(), |acc, v| Self::gcd_pair(side, &acc, v)))
    }

    fn sum<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        values
            .into_iter()
            .fold(Self::zero(), |acc, v| acc.add(v))
    }
}

pub fn combine<K: Semiring>(op: Op, a: &K, b: &K) -> K {
    match op {
        Op::Add => a.add(b),
        Op::Mul => a.mul(b),
    }
}

fn parse_unsigned(s: &str) -> Result<u64, SemiringError> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(SemiringError::Malformed(s.to_string()));
    }
    t.parse::<u64>()
        .map_err(|_| SemiringError::Malformed(s.to_string()))
}

/// The boolean semiring `({0,1}, ∨, ∧)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Boolean(pub bool);

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Semiring for Boolean {
    const KIND: SemiringKind = SemiringKind::Boolean;

    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        Boolean(self.0 || rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Boolean(self.0 && rhs.0)
    }

    fn try_divide(_side: Side, a: &Self, b: &Self) -> Option<Self> {
        debug_assert!(b.0, "division by zero");
        b.0.then_some(*a)
    }

    fn gcd_pair(_side: Side, _a: &Self, _b: &Self) -> Self {
        Boolean(true)
    }

    fn try_complement(u: &Self, v: &Self) -> Option<Self> {
        match (u.0, v.0) {
            (true, false) => Some(Boolean(true)),
            (true, true) | (false, false) => Some(Boolean(false)),
            (false, true) => None,
        }
    }

    fn parse(s: &str) -> Result<Self, SemiringError> {
        match s.trim() {
            "0" => Ok(Boolean(false)),
            "1" => Ok(Boolean(true)),
            _ => Err(SemiringError::Malformed(s.to_string())),
        }
    }

    fn sample_scalars() -> Vec<Self> {
        vec![Boolean(true)]
    }
}

/// The natural numbers `(ℕ, +, ×)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Natural(pub u64);

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Natural {
    const KIND: SemiringKind = SemiringKind::Naturals;

    fn zero() -> Self {
        Natural(0)
    }
    fn one() -> Self {
        Natural(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        Natural(self.0.checked_add(rhs.0).expect("natural overflow"))
    }
    fn mul(&self, rhs: &Self) -> Self {
        Natural(self.0.checked_mul(rhs.0).expect("natural overflow"))
    }

    fn try_divide(_side: Side, a: &Self, b: &Self) -> Option<Self> {
        debug_assert!(b.0 != 0, "division by zero");
        if b.0 != 0 && a.0.is_multiple_of(b.0) {
            Some(Natural(a.0 / b.0))
        } else {
            None
        }
    }

    fn gcd_pair(_side: Side, a: &Self, b: &Self) -> Self {
        Natural(a.0.gcd(&b.0))
    }

    fn try_complement(u: &Self, v: &Self) -> Option<Self> {
        u.0.checked_sub(v.0).map(Natural)
    }

    fn parse(s: &str) -> Result<Self, SemiringError> {
        parse_unsigned(s).map(Natural)
    }

    fn sample_scalars() -> Vec<Self> {
        vec![Natural(1), Natural(2), Natural(3)]
    }
}

/// The tropical semiring `(ℕ ∪ {+∞}, min, +)`. `None` is `+∞`, the zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tropical(pub Option<u64>);

impl Tropical {
    pub const INFINITY: Tropical = Tropical(None);

    pub fn finite(n: u64) -> Self {
        Tropical(Some(n))
    }
}

impl PartialOrd for Tropical {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tropical {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.0, other.0) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("inf"),
        }
    }
}

impl Semiring for Tropical {
    const KIND: SemiringKind = SemiringKind::Tropical;

    fn zero() -> Self {
        Tropical(None)
    }
    fn one() -> Self {
        Tropical(Some(0))
    }
    fn add(&self, rhs: &Self) -> Self {
        std::cmp::min(*self, *rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => Tropical(Some(a.checked_add(b).expect("tropical overflow"))),
            _ => Tropical(None),
        }
    }

    fn try_divide(_side: Side, a: &Self, b: &Self) -> Option<Self> {
        debug_assert!(b.0.is_some(), "division by zero");
        match (a.0, b.0) {
            (None, Some(_)) => Some(Tropical(None)),
            (Some(a), Some(b)) => a.checked_sub(b).map(|d| Tropical(Some(d))),
            (_, None) => None,
        }
    }

    fn gcd_pair(_side: Side, a: &Self, b: &Self) -> Self {
        std::cmp::min(*a, *b)
    }

    fn try_complement(u: &Self, v: &Self) -> Option<Self> {
        match u.cmp(v) {
            std::cmp::Ordering::Less => Some(*u),
            std::cmp::Ordering::Equal => Some(Tropical(None)),
            std::cmp::Ordering::Greater => None,
        }
    }

    fn parse(s: &str) -> Result<Self, SemiringError> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(Tropical(None)),
            t => parse_unsigned(t).map(|n| Tropical(Some(n))),
        }
    }

    fn sample_scalars() -> Vec<Self> {
        (0..=4).map(Tropical::finite).collect()
    }
}

/// Exact rationals `(ℚ, +, ×)`, always in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Semiring for Rational {
    const KIND: SemiringKind = SemiringKind::Rationals;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational::integer(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }

    fn try_divide(_side: Side, a: &Self, b: &Self) -> Option<Self> {
        debug_assert!(!b.0.is_zero(), "division by zero");
        (!b.0.is_zero()).then(|| Rational(&a.0 / &b.0))
    }

    /// In a field every nonzero element divides every other one; the
    /// first operand is kept so that a gcd over a list is its first entry.
    fn gcd_pair(_side: Side, a: &Self, _b: &Self) -> Self {
        a.clone()
    }

    fn try_complement(u: &Self, v: &Self) -> Option<Self> {
        Some(Rational(&u.0 - &v.0))
    }

    fn parse(s: &str) -> Result<Self, SemiringError> {
        let malformed = || SemiringError::Malformed(s.to_string());
        let t = s.trim().replace('\u{2212}', "-");
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(&t)),
        };
        let digits = |p: &str| -> Result<BigInt, SemiringError> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            p.parse::<BigInt>().map_err(|_| malformed())
        };
        let (n, d) = match body.split_once('/') {
            Some((n, d)) => (digits(n)?, digits(d)?),
            None => (digits(body)?, BigInt::from(1)),
        };
        if d.is_zero() {
            return Err(malformed());
        }
        let q = BigRational::new(n, d);
        Ok(Rational(if neg { -q } else { q }))
    }

    fn sample_scalars() -> Vec<Self> {
        vec![
            Rational::integer(1),
            Rational::integer(2),
            Rational::integer(-1),
            Rational::new(1, 2),
            Rational::new(-3, 2),
        ]
    }
}

impl Rational {
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: u64) -> Tropical {
        Tropical::finite(n)
    }

    #[test]
    fn tropical_operations() {
        assert_eq!(combine(Op::Add, &t(4), &t(2)), t(2));
        assert_eq!(combine(Op::Mul, &t(4), &t(2)), t(6));
        assert_eq!(Tropical::zero(), Tropical::INFINITY);
        assert_eq!(Tropical::one(), t(0));
        assert_eq!(t(3).mul(&Tropical::zero()), Tropical::zero());
    }

    #[test]
    fn natural_and_rational_operations() {
        assert_eq!(Natural(2).mul(&Natural(3)), Natural(6));
        assert!(Rational::integer(2).add(&Rational::integer(-2)).is_zero());
    }

    #[test]
    fn division() {
        assert_eq!(Natural::try_divide(Side::Right, &Natural(6), &Natural(2)), Some(Natural(3)));
        assert_eq!(Natural::try_divide(Side::Right, &Natural(3), &Natural(2)), None);
        // exhaustive: the only x with 2 ⊗ x = 4 in min-plus is 2
        let solutions: Vec<u64> = (0..=4).filter(|&x| t(2).mul(&t(x)) == t(4)).collect();
        assert_eq!(solutions, vec![2]);
        assert_eq!(Tropical::try_divide(Side::Right, &t(4), &t(2)), Some(t(2)));
        assert_eq!(Tropical::try_divide(Side::Left, &t(1), &t(2)), None);
        assert_eq!(
            Rational::try_divide(Side::Left, &Rational::integer(3), &Rational::integer(2)),
            Some(Rational::new(3, 2))
        );
    }

    #[test]
    fn gcds() {
        assert_eq!(Tropical::gcd(Side::Left, &[t(4), t(2), t(2)]).unwrap(), t(2));
        assert_eq!(Natural::gcd(Side::Right, &[Natural(4), Natural(6)]).unwrap(), Natural(2));
        assert_eq!(
            Rational::gcd(Side::Left, &[Rational::new(3, 2), Rational::integer(5)]).unwrap(),
            Rational::new(3, 2)
        );
        assert_eq!(Boolean::gcd(Side::Left, &[Boolean(true)]).unwrap(), Boolean(true));
        assert!(matches!(Natural::gcd(Side::Left, &[]), Err(SemiringError::EmptyGcd)));
    }

    #[test]
    fn complements() {
        assert_eq!(Natural::try_complement(&Natural(7), &Natural(3)), Some(Natural(4)));
        assert_eq!(Natural::try_complement(&Natural(3), &Natural(7)), None);
        // exhaustive over γ ∈ {0..9, ∞}: min(γ, 2) = 5 has no solution
        let candidates: Vec<Tropical> =
            (0..10).map(t).chain(std::iter::once(Tropical::INFINITY)).collect();
        assert!(candidates.iter().all(|g| g.add(&t(2)) != t(5)));
        assert_eq!(Tropical::try_complement(&t(5), &t(2)), None);
        let sols: Vec<&Tropical> = candidates.iter().filter(|g| g.add(&t(5)) == t(2)).collect();
        assert_eq!(sols, vec![&t(2)]);
        assert_eq!(Tropical::try_complement(&t(2), &t(5)), Some(t(2)));
        assert_eq!(Tropical::try_complement(&t(2), &t(2)), Some(Tropical::INFINITY));
        assert_eq!(Boolean::try_complement(&Boolean(false), &Boolean(true)), None);
        assert_eq!(Boolean::try_complement(&Boolean(true), &Boolean(false)), Some(Boolean(true)));
        assert_eq!(
            Rational::try_complement(&Rational::integer(1), &Rational::integer(3)),
            Some(Rational::integer(-2))
        );
    }

    #[test]
    fn literals() {
        assert_eq!(Tropical::parse("inf").unwrap(), Tropical::zero());
        assert_eq!(Rational::parse("−2").unwrap(), Rational::integer(-2));
        assert_eq!(Rational::parse("-6/4").unwrap(), Rational::new(-3, 2));
        assert_eq!(Natural::parse("007").unwrap(), Natural(7));
        assert!(Natural::parse("-1").is_err());
        assert!(Natural::parse("inf").is_err());
        assert!(Rational::parse("1/0").is_err());
        assert!(Boolean::parse("2").is_err());
        assert!(Tropical::parse("").is_err());
        assert_eq!(Rational::new(4, -6).to_string(), "-2/3");
    }

    #[test]
    fn kinds() {
        assert_eq!("tropical".parse::<SemiringKind>().unwrap(), SemiringKind::Tropical);
        assert!("reals".parse::<SemiringKind>().is_err());
        for k in SemiringKind::ALL {
            assert_eq!(k.is_field(), k == SemiringKind::Rationals);
            assert_eq!(k.name().parse::<SemiringKind>().unwrap(), k);
        }
    }
}
