//! Exact arithmetic kernel: fixed-point reals on the 2^(-p) grid, RMS
//! normalization, and rational-angle unit rotations.

mod fixed;
mod rotation;

pub use fixed::{
    rms_norm, zero_vector, FixedPoint, FixedVector, NumericsError, DEFAULT_PRECISION,
    MAX_PRECISION,
};
pub use rotation::UnitRotation;
