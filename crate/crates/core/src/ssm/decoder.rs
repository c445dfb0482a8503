//! Threshold decoders: ordered (predicate, tag) rules over state vectors.
//! Predicates are conjunctions of per-coordinate tests. Compiled models rely
//! on the rules being exhaustive and mutually exclusive on every vector a
//! layer can actually receive; a gap signals a compilation bug.

use crate::numerics::{FixedPoint, UnitRotation};

use super::value::StateValue;
use super::SsmError;

/// One per-coordinate test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// real coordinate >= threshold
    Ge(usize, FixedPoint),
    /// real coordinate <= threshold
    Le(usize, FixedPoint),
    /// phase coordinate equals the given rotation exactly
    PhaseIs(usize, UnitRotation),
}

impl Atom {
    pub fn coord(&self) -> usize {
        match self {
            Atom::Ge(i, _) | Atom::Le(i, _) | Atom::PhaseIs(i, _) => *i,
        }
    }

    fn holds(&self, v: &[StateValue]) -> Result<bool, SsmError> {
        let i = self.coord();
        if i >= v.len() {
            return Err(SsmError::Dimension(format!(
                "decoder atom coordinate {i} out of range for width {}",
                v.len()
            )));
        }
        match (self, &v[i]) {
            (Atom::Ge(_, c), StateValue::Real(x)) => Ok(x >= c),
            (Atom::Le(_, c), StateValue::Real(x)) => Ok(x <= c),
            (Atom::PhaseIs(_, r), StateValue::Phase(p)) => Ok(p == r),
            _ => Err(SsmError::Dimension(format!("decoder atom at {i} tests the wrong channel kind"))),
        }
    }
}

/// Conjunction of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub atoms: Vec<Atom>,
}

impl Predicate {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Predicate { atoms }
    }

    pub fn holds(&self, v: &[StateValue]) -> Result<bool, SsmError> {
        for a in &self.atoms {
            if !a.holds(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoder {
    pub rules: Vec<(Predicate, usize)>,
}

impl Decoder {
    pub fn new(rules: Vec<(Predicate, usize)>) -> Self {
        Decoder { rules }
    }

    pub fn num_tags(&self) -> usize {
        self.rules.iter().map(|(_, t)| t + 1).max().unwrap_or(0)
    }

    /// First matching rule's tag; a gap is a compilation bug surfaced as an
    /// error.
    pub fn decode(&self, v: &[StateValue]) -> Result<usize, SsmError> {
        for (pred, tag) in &self.rules {
            if pred.holds(v)? {
                return Ok(*tag);
            }
        }
        Err(SsmError::DecoderGap)
    }

    /// Decode while checking that exactly one rule matches (used by tests
    /// and compilation probes to verify mutual exclusivity per tag).
    pub fn decode_strict(&self, v: &[StateValue]) -> Result<usize, SsmError> {
        let mut hit: Option<usize> = None;
        for (pred, tag) in &self.rules {
            if pred.holds(v)? {
                match hit {
                    None => hit = Some(*tag),
                    // several rules may encode the same tag (for example the
                    // no-predecessor variants); different tags must not overlap
                    Some(t) if t == *tag => {}
                    Some(t) => {
                        return Err(SsmError::DecoderOverlap(t, *tag));
                    }
                }
            }
        }
        hit.ok_or(SsmError::DecoderGap)
    }
}

/// Atom helpers shared by the compilation passes.
pub mod atoms {
    use super::*;

    /// x >= one grid step, i.e. strictly positive on the grid.
    pub fn positive(coord: usize, p: u8) -> Atom {
        Atom::Ge(coord, FixedPoint::from_mantissa(1, p))
    }

    /// x <= minus one grid step.
    pub fn negative(coord: usize, p: u8) -> Atom {
        Atom::Le(coord, FixedPoint::from_mantissa(-1, p))
    }

    /// |x| < one grid step, i.e. exactly zero on the grid (two atoms).
    pub fn zero(coord: usize, p: u8) -> Vec<Atom> {
        vec![
            Atom::Le(coord, FixedPoint::zero(p)),
            Atom::Ge(coord, FixedPoint::zero(p)),
        ]
    }

    pub fn ge_ratio(coord: usize, num: i64, den: i64, p: u8) -> Atom {
        Atom::Ge(coord, FixedPoint::from_ratio(num, den, p))
    }

    pub fn le_ratio(coord: usize, num: i64, den: i64, p: u8) -> Atom {
        Atom::Le(coord, FixedPoint::from_ratio(num, den, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::FixedPoint;

    fn real(v: i64, p: u8) -> StateValue {
        StateValue::Real(FixedPoint::from_int(v, p))
    }

    #[test]
    fn first_match_and_gap() {
        let p = 8;
        let d = Decoder::new(vec![
            (Predicate::new(vec![atoms::positive(0, p)]), 1),
            (Predicate::new(vec![atoms::negative(0, p)]), 2),
        ]);
        assert_eq!(d.decode(&[real(3, p)]).unwrap(), 1);
        assert_eq!(d.decode(&[real(-3, p)]).unwrap(), 2);
        assert!(matches!(d.decode(&[real(0, p)]), Err(SsmError::DecoderGap)));
    }

    #[test]
    fn strict_detects_overlap() {
        let p = 8;
        let d = Decoder::new(vec![
            (Predicate::new(vec![atoms::positive(0, p)]), 1),
            (Predicate::new(vec![Atom::Ge(0, FixedPoint::from_int(2, p))]), 2),
        ]);
        assert_eq!(d.decode(&[real(3, p)]).unwrap(), 1);
        assert!(matches!(d.decode_strict(&[real(3, p)]), Err(SsmError::DecoderOverlap(1, 2))));
    }

    #[test]
    fn phase_atoms() {
        let d = Decoder::new(vec![
            (Predicate::new(vec![Atom::PhaseIs(0, UnitRotation::identity())]), 0),
            (Predicate::new(vec![Atom::PhaseIs(0, UnitRotation::new(1, 2))]), 1),
        ]);
        assert_eq!(d.decode(&[StateValue::Phase(UnitRotation::new(2, 4))]).unwrap(), 1);
        assert!(d.decode(&[real(1, 8)]).is_err());
    }
}
