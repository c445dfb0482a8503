//! Per-coordinate state values: real grid points or exact unit rotations.

use crate::numerics::{FixedPoint, UnitRotation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Real,
    Phase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateValue {
    Real(FixedPoint),
    Phase(UnitRotation),
}

impl StateValue {
    pub fn kind(&self) -> ChannelKind {
        match self {
            StateValue::Real(_) => ChannelKind::Real,
            StateValue::Phase(_) => ChannelKind::Phase,
        }
    }

    pub fn as_real(&self) -> Option<&FixedPoint> {
        match self {
            StateValue::Real(x) => Some(x),
            StateValue::Phase(_) => None,
        }
    }

    pub fn as_phase(&self) -> Option<&UnitRotation> {
        match self {
            StateValue::Phase(r) => Some(r),
            StateValue::Real(_) => None,
        }
    }
}

/// Gate entry: multiplies a real channel by a grid value or rotates a phase
/// channel by an exact rational angle. Phase gates are unit-modulus; larger
/// magnitudes are out of scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateEntry {
    Real(FixedPoint),
    Phase(UnitRotation),
}

impl GateEntry {
    pub fn kind(&self) -> ChannelKind {
        match self {
            GateEntry::Real(_) => ChannelKind::Real,
            GateEntry::Phase(_) => ChannelKind::Phase,
        }
    }
}

pub type StateVector = Vec<StateValue>;

pub fn real_vector(v: &[FixedPoint]) -> StateVector {
    v.iter().cloned().map(StateValue::Real).collect()
}
