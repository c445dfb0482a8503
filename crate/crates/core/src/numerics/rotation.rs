//! Exact unit-modulus complex gates as rational angles: e^(2*pi*i*a/b).
//!
//! Angles live in [0, 1) as reduced fractions, so modular counting stays
//! exact at any input length; there is no drift to tolerate.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// e^(2*pi*i * num/den) with 0 <= num < den and gcd(num, den) = 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitRotation {
    num: u64,
    den: u64,
}

impl UnitRotation {
    /// Reduce `num/den` modulo 1 into canonical form.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "rotation denominator must be positive");
        let num = num % den;
        let g = num.gcd(&den);
        if num == 0 {
            UnitRotation { num: 0, den: 1 }
        } else {
            UnitRotation { num: num / g, den: den / g }
        }
    }

    pub fn identity() -> Self {
        UnitRotation { num: 0, den: 1 }
    }

    pub fn is_identity(&self) -> bool {
        self.num == 0
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// Angles add modulo 1.
    pub fn mul(&self, other: &UnitRotation) -> UnitRotation {
        let den = (self.den as u128) * (other.den as u128 / self.den.gcd(&other.den) as u128);
        let a = (self.num as u128) * (den / self.den as u128);
        let b = (other.num as u128) * (den / other.den as u128);
        let num = (a + b) % den;
        UnitRotation::new(num as u64, den as u64)
    }

    pub fn pow(&self, mut e: u64) -> UnitRotation {
        let mut acc = UnitRotation::identity();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// "a/b" rendering used by the model serialization format.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.num, self.den)
    }

    pub fn from_fraction_string(s: &str) -> Option<UnitRotation> {
        let (a, b) = s.split_once('/')?;
        let num: u64 = a.trim().parse().ok()?;
        let den: u64 = b.trim().parse().ok()?;
        if den == 0 {
            return None;
        }
        Some(UnitRotation::new(num, den))
    }
}

impl fmt::Debug for UnitRotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for UnitRotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_addition() {
        let half = UnitRotation::new(1, 2);
        assert_eq!(half.mul(&half), UnitRotation::identity()); // (-1)*(-1) = 1
        let third = UnitRotation::new(1, 3);
        assert_eq!(third.mul(&third), UnitRotation::new(2, 3));
        assert_eq!(UnitRotation::new(2, 5).mul(&UnitRotation::new(4, 5)), UnitRotation::new(1, 5));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(UnitRotation::new(6, 4), UnitRotation::new(1, 2));
        assert_eq!(UnitRotation::new(5, 5), UnitRotation::identity());
        let r = UnitRotation::new(3, 9);
        assert_eq!((r.numerator(), r.denominator()), (1, 3));
    }

    #[test]
    fn inverse_power() {
        for b in 2..12u64 {
            let r = UnitRotation::new(1, b);
            assert_eq!(r.pow(b), UnitRotation::identity());
            assert_eq!(r.pow(b - 1).mul(&r), UnitRotation::identity());
        }
    }

    #[test]
    fn fraction_round_trip() {
        let r = UnitRotation::new(3, 7);
        assert_eq!(UnitRotation::from_fraction_string(&r.to_fraction_string()), Some(r));
        assert!(UnitRotation::from_fraction_string("1/0").is_none());
    }
}
