//! Exact rational numbers.
//!
//! Values that fit in a pair of `i64` stay inline; anything larger spills to
//! `BigRational`. The representation is canonical, so derived equality and
//! hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    /// Lowest terms, denominator > 0, numerator != i64::MIN.
    Small(i64, i64),
    Big(Box<BigRational>),
}

/// An exact rational number in lowest terms.
#[derive(Clone)]
pub struct Rational(Repr);

fn small_from_i128(n: i128, d: i128) -> Rational {
    debug_assert!(d != 0);
    let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    if n > i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
        Rational(Repr::Small(n as i64, d as i64))
    } else {
        Rational(Repr::Big(Box::new(BigRational::new_raw(
            BigInt::from(n),
            BigInt::from(d),
        ))))
    }
}

fn from_big(r: BigRational) -> Rational {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        if n != i64::MIN {
            return Rational(Repr::Small(n, d));
        }
    }
    Rational(Repr::Big(Box::new(r)))
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        small_from_i128(n as i128, 1)
    }

    /// `n / d`; panics when `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        small_from_i128(n as i128, d as i128)
    }

    pub fn from_bigints(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        from_big(BigRational::new(n, d))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => (**r).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `min(0, self)`.
    pub fn neg_part(&self) -> Self {
        if self.is_negative() {
            self.clone()
        } else {
            Rational::zero()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn add_impl(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    small_from_i128(*a as i128 + *c as i128, 1)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    small_from_i128(a * d + c * b, b * d)
                }
            }
            _ => from_big(self.to_big() + other.to_big()),
        }
    }

    fn sub_impl(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    small_from_i128(*a as i128 - *c as i128, 1)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    small_from_i128(a * d - c * b, b * d)
                }
            }
            _ => from_big(self.to_big() - other.to_big()),
        }
    }

    fn mul_impl(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Rational::zero();
                }
                small_from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => from_big(self.to_big() * other.to_big()),
        }
    }

    fn div_impl(&self, other: &Rational) -> Rational {
        assert!(!other.is_zero(), "division by zero");
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                small_from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => from_big(self.to_big() / other.to_big()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error for malformed rational literals.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q`, with an optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRationalError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let valid_digits = |t: &str, signed: bool| {
            let t = if signed {
                t.strip_prefix(['+', '-']).unwrap_or(t)
            } else {
                t
            };
            !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid_digits(num, true) {
            return Err(bad());
        }
        let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
        let d: BigInt = match den {
            Some(d) if valid_digits(d, false) => d.parse().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_bigints(n, d))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n as i64)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        from_big(r)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.$imp(rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.$imp(rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }
        impl $atr<&Rational> for Rational {
            fn $amethod(&mut self, rhs: &Rational) {
                *self = self.$imp(rhs);
            }
        }
        impl $atr<Rational> for Rational {
            fn $amethod(&mut self, rhs: Rational) {
                *self = self.$imp(&rhs);
            }
        }
    };
}

binop!(Add, add, add_impl, AddAssign, add_assign);
binop!(Sub, sub, sub_impl, SubAssign, sub_assign);
binop!(Mul, mul, mul_impl, MulAssign, mul_assign);
binop!(Div, div, div_impl, DivAssign, div_assign);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(r) => from_big(-(**r).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Shorthand for `Rational::new(n, d)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Shorthand for an integer rational.
pub fn int(n: i64) -> Rational {
    Rational::from_int(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms_and_sign() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert_eq!(rat(-1, 2).to_string(), "-1/2");
        assert_eq!(int(7).to_string(), "7");
        assert_eq!(rat(0, -5), Rational::zero());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<Rational>().unwrap(), int(3));
        assert_eq!("-3/6".parse::<Rational>().unwrap(), rat(-1, 2));
        assert_eq!("+4/2".parse::<Rational>().unwrap(), int(2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
    }

    #[test]
    fn spills_to_big_and_back() {
        let big = int(i64::MAX) * int(i64::MAX);
        assert!(matches!(big.0, Repr::Big(_)));
        let back = &big / int(i64::MAX);
        assert!(matches!(back.0, Repr::Small(_, _)));
        assert_eq!(back, int(i64::MAX));
        assert_eq!(-int(i64::MIN + 1), int(i64::MAX));
        let min = int(i64::MIN);
        assert!(matches!(min.0, Repr::Big(_)));
        assert_eq!((-&min).to_string(), "9223372036854775808");
    }

    #[test]
    fn ordering_mixed_representations() {
        let big = int(i64::MAX) * int(4);
        assert!(big > int(1));
        assert!(-big.clone() < int(-1));
        assert!(rat(1, 3) < rat(1, 2));
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-1_000_000i64..1_000_000, 1i64..1000).prop_map(|(n, d)| rat(n, d))
    }

    fn any_rat() -> impl Strategy<Value = Rational> {
        prop_oneof![
            small(),
            (any::<i64>(), 1i64..i64::MAX)
                .prop_map(|(n, d)| Rational::from_bigints(n.into(), d.into())),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in any_rat(), b in any_rat()) {
            let (x, y) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &x + &y);
            prop_assert_eq!((&a - &b).to_big(), &x - &y);
            prop_assert_eq!((&a * &b).to_big(), &x * &y);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), &x / &y);
            }
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }

        #[test]
        fn display_parse_round_trip(a in any_rat()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
