//! Exact rationals in 2π-normalized units, plus the `2π·a + b` form used for
//! constants that mix normalized and raw real quantities.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational. A stored value `q` stands for the real quantity `2πq`
/// unless the context says it is a radius or a raw real number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Scalar(pub BigRational);

// Values are kept in lowest terms, so the raw parts hash consistently with
// equality and avoid the continued-fraction hash of `Ratio`.
impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.numer().hash(state);
        self.0.denom().hash(state);
    }
}

impl Scalar {
    pub fn new(num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Scalar {
        Scalar(BigRational::from_integer(v))
    }

    pub fn zero() -> Scalar {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Scalar {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Scalar {
        Scalar(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn floor_big(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil_big(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Floor as an `i64`. Panics only for magnitudes beyond `i64`, which the
    /// slope and level ranges handled here never reach.
    pub fn floor_i64(&self) -> i64 {
        self.floor_big().to_i64().expect("floor out of i64 range")
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil_big().to_i64().expect("ceil out of i64 range")
    }

    /// Integer value if this scalar is integral.
    pub fn to_i64_exact(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Lossy conversion, only for drawing.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn recip(&self) -> Scalar {
        Scalar(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Decimal rendering with `digits` significant digits (truncated toward
    /// zero). Display only.
    pub fn to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.0, digits)
    }
}

pub(crate) fn rational_to_decimal(q: &BigRational, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    let ten = BigInt::from(10);
    // Scale so the integer part has exactly `digits` digits.
    let mut exp: i64 = 0;
    let mut scaled = a.clone();
    let lo = BigRational::from_integer(ten.pow(digits as u32 - 1));
    let hi = BigRational::from_integer(ten.pow(digits as u32));
    while scaled < lo {
        scaled = scaled * BigRational::from_integer(ten.clone());
        exp -= 1;
    }
    while scaled >= hi {
        scaled = scaled / BigRational::from_integer(ten.clone());
        exp += 1;
    }
    let mantissa = scaled.to_integer().to_string();
    // value = mantissa * 10^exp
    let point = mantissa.len() as i64 + exp;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(mantissa.trim_end_matches('0'));
    } else if point as usize >= mantissa.len() {
        out.push_str(&mantissa);
        for _ in 0..(point as usize - mantissa.len()) {
            out.push('0');
        }
    } else {
        let (int, frac) = mantissa.split_at(point as usize);
        out.push_str(int);
        let frac = frac.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q` or `p`, with an optional sign.
    fn from_str(s: &str) -> Result<Scalar> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Scalar(BigRational::new(num, den)))
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_int(v)
    }
}

fn small(q: &BigRational) -> Option<(i128, i128)> {
    Some((q.numer().to_i64()? as i128, q.denom().to_i64()? as i128))
}

/// Word-sized shortcut: operands with i64 parts never overflow i128 here.
fn fast(op: char, a: &BigRational, b: &BigRational) -> Option<Scalar> {
    let ((an, ad), (bn, bd)) = (small(a)?, small(b)?);
    let (mut n, mut d) = match op {
        '+' => (an * bd + bn * ad, ad * bd),
        '-' => (an * bd - bn * ad, ad * bd),
        '*' => (an * bn, ad * bd),
        _ if bn == 0 => return None,
        _ => (an * bd, ad * bn),
    };
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    Some(Scalar(BigRational::new_raw(BigInt::from(n / g), BigInt::from(d / g))))
}

macro_rules! binop {
    ($tr:ident, $m:ident, $c:literal) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                fast($c, &self.0, &rhs.0).unwrap_or_else(|| Scalar(self.0.$m(rhs.0)))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                fast($c, &self.0, &rhs.0).unwrap_or_else(|| Scalar(self.0.$m(&rhs.0)))
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                fast($c, &self.0, &rhs.0).unwrap_or_else(|| Scalar((&self.0).$m(rhs.0)))
            }
        }
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'b Scalar) -> Scalar {
                fast($c, &self.0, &rhs.0).unwrap_or_else(|| Scalar((&self.0).$m(&rhs.0)))
            }
        }
    };
}

binop!(Add, add, '+');
binop!(Sub, sub, '-');
binop!(Mul, mul, '*');
binop!(Div, div, '/');

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// A right endpoint: finite, or `+∞`. Variant order gives `Finite < Infinity`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtendedScalar {
    Finite(Scalar),
    Infinity,
}

impl ExtendedScalar {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ExtendedScalar::Finite(s) => Some(s),
            ExtendedScalar::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedScalar::Infinity)
    }
}

impl From<Scalar> for ExtendedScalar {
    fn from(s: Scalar) -> Self {
        ExtendedScalar::Finite(s)
    }
}

impl fmt::Display for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedScalar::Finite(s) => write!(f, "{s}"),
            ExtendedScalar::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtendedScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(ExtendedScalar::Infinity),
            other => Ok(ExtendedScalar::Finite(other.parse()?)),
        }
    }
}

// 60 digits of π; the last digit is truncated so PI_LO < π < PI_LO + 10^-59.
const PI_DIGITS: &str = "314159265358979323846264338327950288419716939937510582097494";

fn pi_bounds() -> (BigRational, BigRational) {
    let num: BigInt = PI_DIGITS.parse().unwrap();
    let den = BigInt::from(10).pow(PI_DIGITS.len() as u32 - 1);
    let lo = BigRational::new(num.clone(), den.clone());
    let hi = BigRational::new(num + 1, den);
    (lo, hi)
}

/// The real number `2π·two_pi + raw`.
///
/// `two_pi` is a 2π-normalized value, `raw` a plain real (an ε, say). Since π
/// is irrational the representation is unique, so structural equality is
/// real equality, and comparisons are decided with rational bounds on π.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Quantity {
    pub two_pi: Scalar,
    pub raw: Scalar,
}

impl Quantity {
    pub fn new(two_pi: Scalar, raw: Scalar) -> Quantity {
        Quantity { two_pi, raw }
    }

    pub fn normalized(two_pi: Scalar) -> Quantity {
        Quantity { two_pi, raw: Scalar::zero() }
    }

    pub fn raw(raw: Scalar) -> Quantity {
        Quantity { two_pi: Scalar::zero(), raw }
    }

    pub fn zero() -> Quantity {
        Quantity::normalized(Scalar::zero())
    }

    /// Exact sign of `2π·a + b`.
    pub fn signum(&self) -> Ordering {
        let a = &self.two_pi.0;
        let b = &self.raw.0;
        if a.is_zero() {
            return b.cmp(&BigRational::zero());
        }
        let (lo, hi) = pi_bounds();
        let two = BigRational::from_integer(BigInt::from(2));
        let x = &two * a * &lo + b;
        let y = &two * a * &hi + b;
        let (min, max) = if x <= y { (x, y) } else { (y, x) };
        if min.is_positive() {
            Ordering::Greater
        } else if max.is_negative() {
            Ordering::Less
        } else {
            // Would need -b/(2a) within 1e-59 of π; not reachable with the
            // rationals this crate builds.
            panic!("π precision exhausted comparing {self}")
        }
    }

    pub fn to_f64(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.two_pi.to_f64() + self.raw.to_f64()
    }

    /// Decimal rendering good to `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let (lo, _) = pi_bounds();
        let v = BigRational::from_integer(BigInt::from(2)) * &self.two_pi.0 * lo + &self.raw.0;
        rational_to_decimal(&v, digits)
    }

    /// `a·self`.
    pub fn scale(&self, a: &Scalar) -> Quantity {
        Quantity::new(a * &self.two_pi, a * &self.raw)
    }

    /// `max(self, 0)`.
    pub fn clamp_nonnegative(self) -> Quantity {
        if self.signum() == Ordering::Less {
            Quantity::zero()
        } else {
            self
        }
    }
}

impl Add for Quantity {
    type Output = Quantity;
    fn add(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.two_pi + rhs.two_pi, self.raw + rhs.raw)
    }
}

impl Sub for Quantity {
    type Output = Quantity;
    fn sub(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.two_pi - rhs.two_pi, self.raw - rhs.raw)
    }
}

impl PartialOrd for Quantity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quantity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.two_pi;
        let b = &self.raw;
        match (a.is_zero(), b.is_zero()) {
            (true, _) => write!(f, "{b}"),
            (false, true) => write!(f, "2π·({a})"),
            (false, false) if b.is_negative() => write!(f, "2π·({a}) - {}", b.abs()),
            _ => write!(f, "2π·({a}) + {b}"),
        }
    }
}

/// Greatest common divisor of two non-negative integers.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn word_shortcut_matches_bigrational() {
        let big = i64::MAX;
        let vals = [
            (0, 1), (3, 7), (-5, 12), (big, 1), (-big, 3), (1, big), (big, big - 1), (-7, big), (i64::MIN + 1, 2),
        ];
        for &(a, b) in &vals {
            for &(c, d) in &vals {
                let (x, y) = (Scalar::new(a, b), Scalar::new(c, d));
                assert_eq!((&x + &y).0, &x.0 + &y.0);
                assert_eq!((&x - &y).0, &x.0 - &y.0);
                assert_eq!((&x * &y).0, &x.0 * &y.0);
                if !y.is_zero() {
                    assert_eq!((&x / &y).0, &x.0 / &y.0);
                }
                let sum = &x + &y;
                assert!(sum.denom().is_positive());
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for t in ["7/10", "-3/4", "5", "0", "-12"] {
            assert_eq!(s(t).to_string(), t);
        }
        assert_eq!(s("6/8").to_string(), "3/4");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn floor_handles_negatives() {
        assert_eq!(s("-1/40").floor_i64(), -1);
        assert_eq!(s("5/2").floor_i64(), 2);
        assert_eq!(s("-5/2").ceil_i64(), -2);
    }

    #[test]
    fn infinity_is_above_everything() {
        let big = ExtendedScalar::Finite(Scalar::from_int(1_000_000));
        assert!(ExtendedScalar::Infinity > big);
        assert_eq!("inf".parse::<ExtendedScalar>().unwrap(), ExtendedScalar::Infinity);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(s("1/8").to_decimal(20), "0.125");
        assert_eq!(s("-1/3").to_decimal(5), "-0.33333");
        assert_eq!(s("1200").to_decimal(3), "1200");
        let q = Quantity::normalized(Scalar::one());
        assert!(q.to_decimal(20).starts_with("6.283185307179586476"));
    }

    #[test]
    fn quantity_sign_uses_pi() {
        // 2π·(1/2) - 3.14 > 0, 2π·(1/2) - 3.15 < 0
        let a = Quantity::new(s("1/2"), s("-314/100"));
        let b = Quantity::new(s("1/2"), s("-315/100"));
        assert_eq!(a.signum(), Ordering::Greater);
        assert_eq!(b.signum(), Ordering::Less);
        // 2πR − (4π+7)ε with R = 9/10, ε = 1/20
        let lb = Quantity::new(s("9/10") - s("1/10"), s("-7/20"));
        assert!(lb > Quantity::zero());
    }
}
