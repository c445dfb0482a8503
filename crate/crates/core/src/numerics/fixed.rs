//! Exact fixed-point reals: `p` fractional bits, unbounded integer part.
//!
//! Every value is a multiple of 2^(-p). Arithmetic results are rounded back
//! to the grid immediately, round-to-nearest with ties to even. Mantissas are
//! kept in an `i64` fast path and promoted to `BigInt` only on overflow, so
//! the unbounded-integer-part semantics hold at any scale.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericsError {
    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(u8, u8),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value")]
    NegativeSqrt,
    #[error("rms_norm of all-zero vector (constructions must guarantee a nonzero norm)")]
    ZeroNorm,
    #[error("value {0:?} is not representable on the 2^-{1} grid")]
    OffGrid(String, u8),
}

/// Run-wide number of fractional bits. Valid range 1..=64, default 8.
pub const DEFAULT_PRECISION: u8 = 8;
pub const MAX_PRECISION: u8 = 64;

/// Arbitrary-precision signed mantissa with an `i64` fast path.
#[derive(Clone, Debug)]
enum Mantissa {
    Small(i64),
    Big(BigInt),
}

impl Mantissa {
    fn from_big(b: BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Mantissa::Small(v),
            None => Mantissa::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Mantissa::Small(v) => BigInt::from(*v),
            Mantissa::Big(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Mantissa::Small(v) => *v == 0,
            Mantissa::Big(b) => b.is_zero(),
        }
    }

    fn add(&self, other: &Mantissa) -> Mantissa {
        if let (Mantissa::Small(a), Mantissa::Small(b)) = (self, other) {
            if let Some(s) = a.checked_add(*b) {
                return Mantissa::Small(s);
            }
        }
        Mantissa::from_big(self.to_big() + other.to_big())
    }

    fn neg(&self) -> Mantissa {
        match self {
            Mantissa::Small(v) if *v != i64::MIN => Mantissa::Small(-v),
            _ => Mantissa::from_big(-self.to_big()),
        }
    }

    fn cmp_val(&self, other: &Mantissa) -> Ordering {
        match (self, other) {
            (Mantissa::Small(a), Mantissa::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialEq for Mantissa {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_val(other) == Ordering::Equal
    }
}
impl Eq for Mantissa {}

impl std::hash::Hash for Mantissa {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Small and Big are kept canonical (Big only outside i64 range),
        // so hashing the discriminant-specific value is consistent with Eq.
        match self {
            Mantissa::Small(v) => v.hash(state),
            Mantissa::Big(b) => b.hash(state),
        }
    }
}

/// Round `num / den` (den > 0) to the nearest integer, ties to even.
fn round_div_even_i128(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    match (2 * r).cmp(&den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q % 2 == 0 {
                q
            } else {
                q + 1
            }
        }
    }
}

fn round_div_even_big(num: &BigInt, den: &BigInt) -> BigInt {
    debug_assert!(den.is_positive());
    let (q, r) = num.div_mod_floor(den);
    let twice: BigInt = r * 2;
    match twice.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

/// Exact real of the form mantissa * 2^(-p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    mantissa: Mantissa,
    precision: u8,
}

impl FixedPoint {
    pub fn zero(p: u8) -> Self {
        FixedPoint { mantissa: Mantissa::Small(0), precision: p }
    }

    pub fn one(p: u8) -> Self {
        FixedPoint::from_int(1, p)
    }

    pub fn from_int(v: i64, p: u8) -> Self {
        assert!(p >= 1 && p <= MAX_PRECISION, "precision out of range");
        match v.checked_shl(p as u32) {
            Some(m) if (m >> p) == v => FixedPoint { mantissa: Mantissa::Small(m), precision: p },
            _ => FixedPoint { mantissa: Mantissa::from_big(BigInt::from(v) << p), precision: p },
        }
    }

    /// Value num/den rounded to the grid (ties to even).
    pub fn from_ratio(num: i64, den: i64, p: u8) -> Self {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-(num as i128), -(den as i128)) } else { (num as i128, den as i128) };
        if let Some(shifted) = num.checked_shl(p as u32) {
            if (shifted >> p) == num {
                let m = round_div_even_i128(shifted, den);
                return FixedPoint::from_mantissa_i128(m, p);
            }
        }
        let m = round_div_even_big(&(BigInt::from(num) << p), &BigInt::from(den));
        FixedPoint { mantissa: Mantissa::from_big(m), precision: p }
    }

    fn from_mantissa_i128(m: i128, p: u8) -> Self {
        match i64::try_from(m) {
            Ok(v) => FixedPoint { mantissa: Mantissa::Small(v), precision: p },
            Err(_) => FixedPoint { mantissa: Mantissa::Big(BigInt::from(m)), precision: p },
        }
    }

    pub fn from_mantissa(m: i64, p: u8) -> Self {
        FixedPoint { mantissa: Mantissa::Small(m), precision: p }
    }

    pub fn from_mantissa_big(m: BigInt, p: u8) -> Self {
        FixedPoint { mantissa: Mantissa::from_big(m), precision: p }
    }

    pub fn precision(&self) -> u8 {
        self.precision
    }

    pub fn mantissa_big(&self) -> BigInt {
        self.mantissa.to_big()
    }

    /// Mantissa if it fits an i64 (the common case).
    pub fn mantissa_i64(&self) -> Option<i64> {
        match &self.mantissa {
            Mantissa::Small(v) => Some(*v),
            Mantissa::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        match &self.mantissa {
            Mantissa::Small(v) => *v < 0,
            Mantissa::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.mantissa {
            Mantissa::Small(v) => *v > 0,
            Mantissa::Big(b) => b.is_positive(),
        }
    }

    fn check_precision(&self, other: &FixedPoint) {
        assert_eq!(
            self.precision, other.precision,
            "fixed-point precision mismatch: {} vs {}",
            self.precision, other.precision
        );
    }

    /// Exact sum; always on-grid, no rounding needed.
    pub fn add(&self, other: &FixedPoint) -> FixedPoint {
        self.check_precision(other);
        FixedPoint { mantissa: self.mantissa.add(&other.mantissa), precision: self.precision }
    }

    pub fn neg(&self) -> FixedPoint {
        FixedPoint { mantissa: self.mantissa.neg(), precision: self.precision }
    }

    pub fn sub(&self, other: &FixedPoint) -> FixedPoint {
        self.add(&other.neg())
    }

    /// Product rounded to the grid, ties to even.
    pub fn mul(&self, other: &FixedPoint) -> FixedPoint {
        self.check_precision(other);
        let p = self.precision;
        if let (Mantissa::Small(a), Mantissa::Small(b)) = (&self.mantissa, &other.mantissa) {
            let prod = (*a as i128) * (*b as i128);
            let m = round_div_even_i128(prod, 1i128 << p);
            return FixedPoint::from_mantissa_i128(m, p);
        }
        let prod = self.mantissa.to_big() * other.mantissa.to_big();
        let m = round_div_even_big(&prod, &(BigInt::from(1) << p));
        FixedPoint { mantissa: Mantissa::from_big(m), precision: p }
    }

    /// Quotient rounded to the grid, ties to even.
    pub fn div(&self, other: &FixedPoint) -> Result<FixedPoint, NumericsError> {
        self.check_precision(other);
        if other.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        let p = self.precision;
        if let (Mantissa::Small(a), Mantissa::Small(b)) = (&self.mantissa, &other.mantissa) {
            let (num, den) = if *b < 0 { (-(*a as i128), -(*b as i128)) } else { (*a as i128, *b as i128) };
            if let Some(shifted) = num.checked_shl(p as u32) {
                if (shifted >> p) == num {
                    let m = round_div_even_i128(shifted, den);
                    return Ok(FixedPoint::from_mantissa_i128(m, p));
                }
            }
        }
        let mut num = self.mantissa.to_big() << p;
        let mut den = other.mantissa.to_big();
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let m = round_div_even_big(&num, &den);
        Ok(FixedPoint { mantissa: Mantissa::from_big(m), precision: p })
    }

    /// Division by a positive integer, rounded to the grid.
    pub fn div_int(&self, den: u32) -> FixedPoint {
        assert!(den > 0);
        let p = self.precision;
        match &self.mantissa {
            Mantissa::Small(a) => {
                let m = round_div_even_i128(*a as i128, den as i128);
                FixedPoint::from_mantissa_i128(m, p)
            }
            Mantissa::Big(b) => {
                let m = round_div_even_big(b, &BigInt::from(den));
                FixedPoint { mantissa: Mantissa::from_big(m), precision: p }
            }
        }
    }

    /// Square root rounded to the nearest grid point.
    ///
    /// Computed as the integer square root of mantissa << p, rounded to the
    /// nearest integer (a tie is impossible: sqrt of an integer is never
    /// exactly half-way between integers).
    pub fn sqrt(&self) -> Result<FixedPoint, NumericsError> {
        if self.is_negative() {
            return Err(NumericsError::NegativeSqrt);
        }
        let p = self.precision;
        match &self.mantissa {
            Mantissa::Small(a) => {
                let n = (*a as u128) << p;
                let s = isqrt_u128(n);
                let m = if n - s * s > s { s + 1 } else { s };
                Ok(FixedPoint::from_mantissa_i128(m as i128, p))
            }
            Mantissa::Big(b) => {
                let n: BigInt = b << p;
                let s = num_integer::Roots::sqrt(&n);
                let m = if &n - &s * &s > s { s + 1 } else { s };
                Ok(FixedPoint { mantissa: Mantissa::from_big(m), precision: p })
            }
        }
    }

    pub fn abs(&self) -> FixedPoint {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact decimal rendering (mantissa * 5^p shifted by p decimal digits).
    pub fn to_decimal_string(&self) -> String {
        let p = self.precision as u32;
        let scaled = self.mantissa.to_big() * BigInt::from(5).pow(p);
        let neg = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let digits = if digits.len() <= p as usize {
            format!("{}{}", "0".repeat(p as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - p as usize);
        let frac_trimmed = frac_part.trim_end_matches('0');
        let body = if frac_trimmed.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_trimmed}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Parse an exact decimal string; errors if the value is off-grid.
    pub fn from_decimal_string(s: &str, p: u8) -> Result<FixedPoint, NumericsError> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(NumericsError::OffGrid(s.to_string(), p));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(NumericsError::OffGrid(s.to_string(), p));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().map_err(|_| NumericsError::OffGrid(s.to_string(), p))?;
        let numer = if neg { -numer } else { numer };
        // value = numer / 10^k; mantissa = numer * 2^p / 10^k must be integral.
        let k = frac_part.len() as u32;
        let scaled: BigInt = numer << p;
        let den = BigInt::from(10).pow(k);
        let (q, r) = scaled.div_mod_floor(&den);
        if !r.is_zero() {
            return Err(NumericsError::OffGrid(s.to_string(), p));
        }
        Ok(FixedPoint { mantissa: Mantissa::from_big(q), precision: p })
    }

    /// Closest f64, for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        match &self.mantissa {
            Mantissa::Small(v) => (*v as f64) / (1u64 << self.precision) as f64,
            Mantissa::Big(b) => b.to_f64().unwrap_or(f64::NAN) / (1u64 << self.precision) as f64,
        }
    }

    /// Snap an f64 to the grid (ties to even); used by sigmoid/swish mixes.
    pub fn from_f64_snapped(v: f64, p: u8) -> FixedPoint {
        let scaled = v * (1u64 << p) as f64;
        FixedPoint::from_mantissa_i128(scaled.round_ties_even() as i128, p)
    }
}

fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    // correct the float estimate
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

impl PartialOrd for FixedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check_precision(other);
        self.mantissa.cmp_val(&other.mantissa)
    }
}

impl fmt::Debug for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

/// Fixed-length vector of fixed-point entries.
pub type FixedVector = Vec<FixedPoint>;

pub fn zero_vector(d: usize, p: u8) -> FixedVector {
    vec![FixedPoint::zero(p); d]
}

/// RMS normalization: v_i / sqrt(mean(v_j^2)), every intermediate rounded.
///
/// Errors on the all-zero vector; compiled layers guarantee a nonzero norm
/// via an always-1 dummy dimension.
pub fn rms_norm(v: &[FixedPoint]) -> Result<FixedVector, NumericsError> {
    assert!(!v.is_empty());
    let p = v[0].precision();
    let mut sum = FixedPoint::zero(p);
    for x in v {
        sum = sum.add(&x.mul(x));
    }
    let mean = sum.div_int(v.len() as u32);
    let rms = mean.sqrt()?;
    if rms.is_zero() {
        return Err(NumericsError::ZeroNorm);
    }
    v.iter().map(|x| x.div(&rms)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(s: &str, p: u8) -> FixedPoint {
        FixedPoint::from_decimal_string(s, p).unwrap()
    }

    #[test]
    fn add_is_exact() {
        let p = 8;
        assert_eq!(fp("0.25", p).add(&fp("0.5", p)), fp("0.75", p));
        let x = fp("1.375", p);
        assert_eq!(x.add(&FixedPoint::zero(p)), x);
        assert_eq!(fp("-1.5", p).add(&fp("1.5", p)), FixedPoint::zero(p));
    }

    #[test]
    fn mul_rounds_to_grid() {
        assert_eq!(fp("0.25", 8).mul(&fp("0.25", 8)), fp("0.0625", 8));
        // at p=2 the grid is multiples of 0.25; 0.0625 rounds to 0 (ties-even on 1/4 -> 0.25? no:
        // mantissas 1*1=1, divide by 4: 0.25 -> rounds to 0)
        assert_eq!(fp("0.25", 2).mul(&fp("0.25", 2)), FixedPoint::zero(2));
        let x = fp("-3.125", 8);
        assert_eq!(x.mul(&FixedPoint::one(8)), x);
    }

    #[test]
    fn mul_ties_to_even() {
        // 0.5 * 0.0078125?? use p=4: grid 1/16. 0.09375 (m=1.5/16): construct via
        // mantissa products: m1=3 (3/16), m2=8 (0.5): product 24 -> /16 = 1.5 -> ties-even -> 2
        let a = FixedPoint::from_mantissa(3, 4);
        let b = FixedPoint::from_mantissa(8, 4);
        assert_eq!(a.mul(&b).mantissa_i64(), Some(2));
        // 5/16 * 0.5 -> 2.5 -> even -> 2
        let c = FixedPoint::from_mantissa(5, 4);
        assert_eq!(c.mul(&b).mantissa_i64(), Some(2));
        // negative side: -3/16 * 1/2 = -1.5/16 -> -2/16
        let d = FixedPoint::from_mantissa(-3, 4);
        assert_eq!(d.mul(&b).mantissa_i64(), Some(-2));
    }

    #[test]
    fn division_and_sqrt() {
        let p = 8;
        assert_eq!(fp("3", p).div(&fp("1.5", p)).unwrap(), fp("2", p));
        assert_eq!(fp("2.25", p).sqrt().unwrap(), fp("1.5", p));
        assert!(fp("-1", p).sqrt().is_err());
        assert!(fp("1", p).div(&FixedPoint::zero(p)).is_err());
    }

    #[test]
    fn rms_norm_examples() {
        let p = 8;
        let ones = vec![FixedPoint::one(p); 4];
        assert_eq!(rms_norm(&ones).unwrap(), ones);
        // [3,0,0,0]: mean 9/4, sqrt 1.5, 3/1.5 = 2
        let v = vec![fp("3", p), FixedPoint::zero(p), FixedPoint::zero(p), FixedPoint::zero(p)];
        let out = rms_norm(&v).unwrap();
        assert_eq!(out[0], fp("2", p));
        assert!(out[1].is_zero());
        // constant positive vector -> all ones
        let c = vec![fp("2.5", p); 7];
        assert_eq!(rms_norm(&c).unwrap(), vec![FixedPoint::one(p); 7]);
        // all-zero input is a compiler bug
        assert_eq!(rms_norm(&zero_vector(3, p)).unwrap_err(), NumericsError::ZeroNorm);
    }

    #[test]
    fn decimal_round_trip() {
        let p = 8;
        for m in [-700i64, -1, 0, 1, 3, 255, 256, 1000003] {
            let x = FixedPoint::from_mantissa(m, p);
            let s = x.to_decimal_string();
            assert_eq!(FixedPoint::from_decimal_string(&s, p).unwrap(), x);
        }
        assert!(FixedPoint::from_decimal_string("0.3", 8).is_err()); // off-grid
        assert_eq!(fp("255.99609375", 8).mantissa_i64(), Some(65535));
    }

    #[test]
    fn big_promotion_round_trip() {
        let p = 8;
        let huge = FixedPoint::from_mantissa_big(BigInt::from(i64::MAX) * 1000, p);
        let s = huge.to_decimal_string();
        assert_eq!(FixedPoint::from_decimal_string(&s, p).unwrap(), huge);
        let sum = huge.add(&huge);
        assert_eq!(sum.mantissa_big(), BigInt::from(i64::MAX) * 2000);
    }
}
