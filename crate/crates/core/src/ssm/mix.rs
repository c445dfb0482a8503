//! Channel-mixing transforms: identity, affine, GLU and SwiGLU.
//!
//! Mixes act on the real channels; phase channels pass through untouched and
//! are only allowed under the identity mix.

use crate::numerics::{FixedPoint, FixedVector};

use super::value::{StateValue, StateVector};
use super::SsmError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    /// weight[i] is row i over the input (dense; zero entries are skipped).
    pub weight: Vec<FixedVector>,
    pub bias: FixedVector,
    /// When set, x_t is concatenated to the input.
    pub use_x: bool,
}

impl AffineMap {
    pub fn out_dim(&self) -> usize {
        self.weight.len()
    }

    fn apply(&self, h: &[FixedPoint], x: &[FixedPoint], p: u8) -> Result<FixedVector, SsmError> {
        let in_dim = h.len() + if self.use_x { x.len() } else { 0 };
        let mut out = Vec::with_capacity(self.weight.len());
        for (row, b) in self.weight.iter().zip(&self.bias) {
            if row.len() != in_dim {
                return Err(SsmError::Dimension(format!(
                    "affine row width {} vs input {in_dim}",
                    row.len()
                )));
            }
            let mut acc = b.clone();
            for (j, w) in row.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let v = if j < h.len() { &h[j] } else { &x[j - h.len()] };
                if v.is_zero() {
                    continue;
                }
                acc = acc.add(&w.mul(v));
            }
            out.push(acc);
        }
        debug_assert_eq!(self.bias.len(), self.weight.len());
        let _ = p;
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MixSpec {
    Identity,
    Affine(AffineMap),
    /// linear(h) ⊙ sigmoid(gate(h))
    Glu { linear: AffineMap, gate: AffineMap },
    /// linear(h) ⊙ swish(gate(h))
    SwiGlu { linear: AffineMap, gate: AffineMap },
}

impl MixSpec {
    pub fn is_identity(&self) -> bool {
        matches!(self, MixSpec::Identity)
    }

    pub fn out_dim(&self, in_dim: usize) -> usize {
        match self {
            MixSpec::Identity => in_dim,
            MixSpec::Affine(a) => a.out_dim(),
            MixSpec::Glu { linear, .. } | MixSpec::SwiGlu { linear, .. } => linear.out_dim(),
        }
    }

    /// Apply to a mixed state vector. Non-identity mixes require all-real
    /// input.
    pub fn apply(&self, input: &StateVector, x: &[FixedPoint], p: u8) -> Result<StateVector, SsmError> {
        if self.is_identity() {
            return Ok(input.clone());
        }
        let mut reals = Vec::with_capacity(input.len());
        for v in input {
            match v {
                StateValue::Real(r) => reals.push(r.clone()),
                StateValue::Phase(_) => {
                    return Err(SsmError::PhaseMix);
                }
            }
        }
        let out = match self {
            MixSpec::Identity => unreachable!(),
            MixSpec::Affine(a) => a.apply(&reals, x, p)?,
            MixSpec::Glu { linear, gate } => {
                let lin = linear.apply(&reals, x, p)?;
                let g = gate.apply(&reals, x, p)?;
                lin.iter().zip(&g).map(|(l, u)| l.mul(&sigmoid(u, p))).collect()
            }
            MixSpec::SwiGlu { linear, gate } => {
                let lin = linear.apply(&reals, x, p)?;
                let g = gate.apply(&reals, x, p)?;
                lin.iter().zip(&g).map(|(l, u)| l.mul(&swish(u, p))).collect()
            }
        };
        Ok(out.into_iter().map(StateValue::Real).collect())
    }
}

/// Sigmoid snapped to the grid. Computed in f64 and rounded ties-to-even;
/// saturates exactly to 0 or 1 far from the origin.
pub fn sigmoid(x: &FixedPoint, p: u8) -> FixedPoint {
    let v = x.to_f64_lossy();
    FixedPoint::from_f64_snapped(1.0 / (1.0 + (-v).exp()), p)
}

/// x * sigmoid(x) snapped to the grid.
pub fn swish(x: &FixedPoint, p: u8) -> FixedPoint {
    let v = x.to_f64_lossy();
    FixedPoint::from_f64_snapped(v / (1.0 + (-v).exp()), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssm::value::real_vector;

    fn fp(s: &str) -> FixedPoint {
        FixedPoint::from_decimal_string(s, 8).unwrap()
    }

    #[test]
    fn affine_with_bias_and_x() {
        let a = AffineMap {
            weight: vec![vec![fp("1"), fp("0"), fp("2")], vec![fp("0"), fp("1"), fp("0")]],
            bias: vec![fp("0.5"), fp("0")],
            use_x: true,
        };
        let mix = MixSpec::Affine(a);
        let h = real_vector(&[fp("1"), fp("3")]);
        let x = vec![fp("0.25")];
        let out = mix.apply(&h, &x, 8).unwrap();
        assert_eq!(out[0].as_real().unwrap(), &fp("2")); // 1 + 0.5 + 2*0.25
        assert_eq!(out[1].as_real().unwrap(), &fp("3"));
    }

    #[test]
    fn sigmoid_saturates_and_is_exact_at_zero() {
        assert_eq!(sigmoid(&fp("0"), 8), fp("0.5"));
        assert_eq!(sigmoid(&FixedPoint::from_int(100, 8), 8), fp("1"));
        assert_eq!(sigmoid(&FixedPoint::from_int(-100, 8), 8), fp("0"));
        assert_eq!(swish(&FixedPoint::from_int(-100, 8), 8), fp("0"));
    }

    #[test]
    fn glu_gates_the_linear_branch() {
        let id2 = AffineMap {
            weight: vec![vec![fp("1"), fp("0")], vec![fp("0"), fp("1")]],
            bias: vec![fp("0"), fp("0")],
            use_x: false,
        };
        let big_gate = AffineMap {
            weight: vec![vec![fp("0"), fp("0")], vec![fp("0"), fp("0")]],
            bias: vec![FixedPoint::from_int(100, 8), FixedPoint::from_int(-100, 8)],
            use_x: false,
        };
        let mix = MixSpec::Glu { linear: id2, gate: big_gate };
        let h = real_vector(&[fp("2"), fp("2")]);
        let out = mix.apply(&h, &[], 8).unwrap();
        assert_eq!(out[0].as_real().unwrap(), &fp("2")); // sigmoid saturated to 1
        assert!(out[1].as_real().unwrap().is_zero()); // saturated to 0
    }
}
