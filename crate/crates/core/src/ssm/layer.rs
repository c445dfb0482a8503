//! A single SSM layer: h_t = A(x_t) ⊙ h_{t-1} + B(x_t), followed by
//! z_t = Mix1(Norm(Mix2(h_t, x_t)), x_t). Gates and increments are tables
//! keyed by the decoder tag of x_t.

use crate::numerics::{rms_norm, FixedPoint, FixedVector};

use super::decoder::Decoder;
use super::mix::MixSpec;
use super::value::{ChannelKind, GateEntry, StateValue, StateVector};
use super::SsmError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsmLayer {
    pub d_in: usize,
    pub d: usize,
    /// decoder over the layer input x
    pub decoder: Decoder,
    /// gate table: tag -> A(x)
    pub gate: Vec<Vec<GateEntry>>,
    /// increment table: tag -> B(x); zero on phase channels
    pub inc: Vec<FixedVector>,
    pub h0: StateVector,
    pub mix2: MixSpec,
    pub normalize: bool,
    pub mix1: MixSpec,
}

impl SsmLayer {
    pub fn out_dim(&self) -> usize {
        self.mix1.out_dim(self.mix2.out_dim(self.d))
    }

    pub fn kinds(&self) -> Vec<ChannelKind> {
        self.h0.iter().map(StateValue::kind).collect()
    }

    pub fn has_phase_channels(&self) -> bool {
        self.h0.iter().any(|v| v.kind() == ChannelKind::Phase)
    }

    pub fn validate(&self, precision: u8) -> Result<(), SsmError> {
        if self.h0.len() != self.d {
            return Err(SsmError::Dimension(format!("h0 width {} vs d {}", self.h0.len(), self.d)));
        }
        let tags = self.decoder.num_tags();
        if self.gate.len() != tags || self.inc.len() != tags {
            return Err(SsmError::Dimension(format!(
                "gate/inc tables have {}/{} entries for {} decoder tags",
                self.gate.len(),
                self.inc.len(),
                tags
            )));
        }
        let kinds = self.kinds();
        for (tag, (g, b)) in self.gate.iter().zip(&self.inc).enumerate() {
            if g.len() != self.d || b.len() != self.d {
                return Err(SsmError::Dimension(format!("table width mismatch at tag {tag}")));
            }
            for i in 0..self.d {
                if g[i].kind() != kinds[i] {
                    return Err(SsmError::Dimension(format!(
                        "gate entry kind mismatch at tag {tag}, coordinate {i}"
                    )));
                }
                if kinds[i] == ChannelKind::Phase && !b[i].is_zero() {
                    return Err(SsmError::PhaseIncrement);
                }
                if let GateEntry::Real(x) = &g[i] {
                    if x.precision() != precision {
                        return Err(SsmError::Dimension(format!(
                            "gate precision {} vs model precision {precision}",
                            x.precision()
                        )));
                    }
                }
            }
        }
        if self.has_phase_channels()
            && (!self.mix2.is_identity() || !self.mix1.is_identity() || self.normalize)
        {
            return Err(SsmError::PhaseMix);
        }
        Ok(())
    }

    /// One recurrence step in place, then compute z.
    pub fn step(&self, h: &mut StateVector, x: &StateVector, tag: usize) -> Result<StateVector, SsmError> {
        if tag >= self.gate.len() {
            return Err(SsmError::Dimension(format!("tag {tag} out of table range")));
        }
        let gate = &self.gate[tag];
        let inc = &self.inc[tag];
        for i in 0..self.d {
            match (&gate[i], &mut h[i]) {
                (GateEntry::Real(g), StateValue::Real(hv)) => {
                    let b = &inc[i];
                    if g.is_zero() {
                        *hv = b.clone();
                    } else {
                        let prod = if g == &FixedPoint::one(g.precision()) {
                            hv.clone()
                        } else {
                            g.mul(hv)
                        };
                        *hv = if b.is_zero() { prod } else { prod.add(b) };
                    }
                }
                (GateEntry::Phase(r), StateValue::Phase(hr)) => {
                    *hr = hr.mul(r);
                }
                _ => {
                    return Err(SsmError::Dimension(format!("channel kind mismatch at {i}")));
                }
            }
        }
        self.transform(h, x)
    }

    /// z = Mix1(Norm(Mix2(h, x)), x)
    pub fn transform(&self, h: &StateVector, x: &StateVector) -> Result<StateVector, SsmError> {
        let x_reals = collect_reals(x);
        let mid = self.mix2.apply(h, x_reals.as_deref().unwrap_or(&[]), precision_of(h))?;
        let normed = if self.normalize {
            let reals: Vec<FixedPoint> = mid
                .iter()
                .map(|v| v.as_real().cloned().ok_or(SsmError::PhaseMix))
                .collect::<Result<_, _>>()?;
            rms_norm(&reals)?.into_iter().map(StateValue::Real).collect()
        } else {
            mid
        };
        self.mix1.apply(&normed, x_reals.as_deref().unwrap_or(&[]), precision_of(h))
    }
}

fn precision_of(v: &StateVector) -> u8 {
    v.iter()
        .find_map(|s| s.as_real().map(FixedPoint::precision))
        .unwrap_or(crate::numerics::DEFAULT_PRECISION)
}

fn collect_reals(x: &StateVector) -> Option<FixedVector> {
    let mut out = Vec::with_capacity(x.len());
    for v in x {
        out.push(v.as_real()?.clone());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssm::decoder::{Decoder, Predicate};
    use crate::ssm::value::real_vector;

    fn one_tag_layer(gate: i64, inc: i64, h0: i64, p: u8) -> SsmLayer {
        SsmLayer {
            d_in: 1,
            d: 1,
            decoder: Decoder::new(vec![(Predicate::new(vec![]), 0)]),
            gate: vec![vec![GateEntry::Real(FixedPoint::from_int(gate, p))]],
            inc: vec![vec![FixedPoint::from_int(inc, p)]],
            h0: real_vector(&[FixedPoint::from_int(h0, p)]),
            mix2: MixSpec::Identity,
            normalize: false,
            mix1: MixSpec::Identity,
        }
    }

    #[test]
    fn pure_accumulation() {
        let p = 8;
        let layer = one_tag_layer(1, 1, 0, p);
        let mut h = layer.h0.clone();
        let x = real_vector(&[FixedPoint::zero(p)]);
        for _ in 0..5 {
            layer.step(&mut h, &x, 0).unwrap();
        }
        assert_eq!(h[0].as_real().unwrap(), &FixedPoint::from_int(5, p));
    }

    #[test]
    fn zero_gate_overwrites() {
        let p = 8;
        let layer = one_tag_layer(0, 7, 3, p);
        let mut h = layer.h0.clone();
        let x = real_vector(&[FixedPoint::zero(p)]);
        layer.step(&mut h, &x, 0).unwrap();
        assert_eq!(h[0].as_real().unwrap(), &FixedPoint::from_int(7, p));
        layer.step(&mut h, &x, 0).unwrap();
        assert_eq!(h[0].as_real().unwrap(), &FixedPoint::from_int(7, p));
    }

    #[test]
    fn geometric_sum_saturates_on_grid() {
        // gate 1/2, inc 1/2: h_t = 1 - 2^-t until the grid saturates at 1
        let p = 8;
        let half = FixedPoint::from_ratio(1, 2, p);
        let layer = SsmLayer {
            d_in: 1,
            d: 1,
            decoder: Decoder::new(vec![(Predicate::new(vec![]), 0)]),
            gate: vec![vec![GateEntry::Real(half.clone())]],
            inc: vec![vec![half]],
            h0: real_vector(&[FixedPoint::zero(p)]),
            mix2: MixSpec::Identity,
            normalize: false,
            mix1: MixSpec::Identity,
        };
        let mut h = layer.h0.clone();
        let x = real_vector(&[FixedPoint::zero(p)]);
        let mut values = Vec::new();
        for _ in 0..20 {
            layer.step(&mut h, &x, 0).unwrap();
            values.push(h[0].as_real().unwrap().clone());
        }
        for t in 1..=8usize {
            let expect = FixedPoint::one(p).sub(&FixedPoint::from_ratio(1, 1 << t, p));
            assert_eq!(values[t - 1], expect, "t={t}");
        }
        // from t=9 on the state sits exactly at 1
        for v in &values[9..] {
            assert_eq!(v, &FixedPoint::one(p));
        }
    }

    #[test]
    fn phase_channels_require_identity_pipeline() {
        use crate::numerics::UnitRotation;
        let p = 8;
        let mut layer = one_tag_layer(1, 0, 0, p);
        layer.h0 = vec![StateValue::Phase(UnitRotation::identity())];
        layer.gate = vec![vec![GateEntry::Phase(UnitRotation::new(1, 3))]];
        layer.inc = vec![vec![FixedPoint::zero(p)]];
        assert!(layer.validate(p).is_ok());
        layer.normalize = true;
        assert!(matches!(layer.validate(p), Err(SsmError::PhaseMix)));
    }
}
