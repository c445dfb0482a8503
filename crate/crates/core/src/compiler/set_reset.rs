//! The set-reset layer: a single-layer simulation of a set-reset automaton
//! at width 1 + ceil(log2 |Q|). Reset symbols zero the gate and write the
//! target's binary code; everything else passes the state through. A dummy
//! always-1 dimension keeps the RMS norm away from zero, and the code stays
//! threshold-decodable at any length.

use crate::languages::SetResetAutomaton;
use crate::numerics::FixedPoint;
use crate::ssm::{atoms, Decoder, MixSpec, Predicate, SsmLayer, StateValue};

use super::support::{code_action, code_atoms, code_width, one_hot_embedding};
use super::CompileError;

/// A compiled set-reset layer together with predicates that decode the
/// automaton state from the layer's normalized output.
#[derive(Clone, Debug)]
pub struct SetResetLayer {
    pub layer: SsmLayer,
    /// state -> predicate over z
    pub state_preds: Vec<Predicate>,
}

/// Compile a set-reset automaton into one layer over one-hot embeddings.
pub fn compile_set_reset(sr: &SetResetAutomaton, p: u8) -> Result<SetResetLayer, CompileError> {
    let n = sr.num_states();
    if n < 2 {
        return Err(CompileError::TooFewStates);
    }
    let alphabet_len = sr.dfa.alphabet.len();
    let m = code_width(n);
    let d = m + 1; // code plus dummy-1
    let decoder = Decoder::new(
        (0..alphabet_len)
            .map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s))
            .collect(),
    );
    let mut gate = Vec::with_capacity(alphabet_len);
    let mut inc = Vec::with_capacity(alphabet_len);
    for s in 0..alphabet_len {
        let target = sr.reset_symbols.iter().position(|r| *r == Some(s));
        let (mut g, mut b) = code_action(target, m, p);
        g.push(crate::ssm::GateEntry::Real(FixedPoint::one(p)));
        b.push(FixedPoint::zero(p));
        gate.push(g);
        inc.push(b);
    }
    let mut h0: Vec<StateValue> = code_action(Some(sr.dfa.start), m, p)
        .1
        .into_iter()
        .map(StateValue::Real)
        .collect();
    h0.push(StateValue::Real(FixedPoint::one(p)));
    let layer = SsmLayer {
        d_in: alphabet_len,
        d,
        decoder,
        gate,
        inc,
        h0,
        mix2: MixSpec::Identity,
        normalize: true,
        mix1: MixSpec::Identity,
    };
    let state_preds =
        (0..n).map(|q| Predicate::new(code_atoms(q, m, 0, p))).collect();
    Ok(SetResetLayer { layer, state_preds })
}

/// Embeddings the compiled layer expects (one-hot over the content alphabet).
pub fn set_reset_embedding(sr: &SetResetAutomaton, p: u8) -> Vec<crate::numerics::FixedVector> {
    one_hot_embedding(sr.dfa.alphabet.len(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::Alphabet;
    use crate::numerics::DEFAULT_PRECISION;
    use crate::ssm::{real_vector, GateEntry};

    fn flip_flop_sr() -> SetResetAutomaton {
        let al = Alphabet::new(["w", "r", "i", "0", "1"]).unwrap();
        SetResetAutomaton::new(al, &[0, 1, 2])
    }

    #[test]
    fn rejects_trivial_automata() {
        let al = Alphabet::new(["a"]).unwrap();
        let sr = SetResetAutomaton::new(al, &[]);
        assert!(matches!(compile_set_reset(&sr, 8), Err(CompileError::TooFewStates)));
    }

    #[test]
    fn gate_is_zero_on_reset_symbols_and_one_elsewhere() {
        let p = DEFAULT_PRECISION;
        let sr = flip_flop_sr();
        let sl = compile_set_reset(&sr, p).unwrap();
        for s in 0..3 {
            for g in &sl.layer.gate[s][..2] {
                assert_eq!(g, &GateEntry::Real(FixedPoint::zero(p)));
            }
        }
        for s in 3..5 {
            for g in &sl.layer.gate[s][..2] {
                assert_eq!(g, &GateEntry::Real(FixedPoint::one(p)));
            }
        }
    }

    #[test]
    fn decodes_the_last_reset_symbol() {
        let p = DEFAULT_PRECISION;
        let sr = flip_flop_sr();
        let sl = compile_set_reset(&sr, p).unwrap();
        let emb = set_reset_embedding(&sr, p);
        // run "w 1 i 0": recorded state should be i
        let word = sr.dfa.alphabet.parse_word("w 1 i 0").unwrap();
        let mut h = sl.layer.h0.clone();
        let mut decoded = Vec::new();
        for &s in &word {
            let x = real_vector(&emb[s]);
            let tag = sl.layer.decoder.decode(&x).unwrap();
            assert_eq!(tag, s);
            let z = sl.layer.step(&mut h, &x, tag).unwrap();
            let state = (0..sr.num_states())
                .find(|&q| sl.state_preds[q].holds(&z).unwrap())
                .expect("state decodable");
            decoded.push(state);
        }
        let expect = sr.dfa.run(&word).unwrap();
        assert_eq!(decoded, expect[1..].to_vec());
        assert_eq!(sr.reset_symbols[*decoded.last().unwrap()], Some(2));
    }

    #[test]
    fn no_reset_symbol_keeps_the_start_state() {
        let p = DEFAULT_PRECISION;
        let sr = flip_flop_sr();
        let sl = compile_set_reset(&sr, p).unwrap();
        let emb = set_reset_embedding(&sr, p);
        let word = sr.dfa.alphabet.parse_word("0 1 1 0").unwrap();
        let mut h = sl.layer.h0.clone();
        for &s in &word {
            let x = real_vector(&emb[s]);
            let z = sl.layer.step(&mut h, &x, s).unwrap();
            assert!(sl.state_preds[sr.dfa.start].holds(&z).unwrap());
        }
    }

    #[test]
    fn post_norm_margin_stays_large() {
        // nonzero entries of the normalized code are bounded away from zero
        let p = DEFAULT_PRECISION;
        let sr = flip_flop_sr();
        let sl = compile_set_reset(&sr, p).unwrap();
        let emb = set_reset_embedding(&sr, p);
        let m = code_width(sr.num_states()) as i64;
        let bound = FixedPoint::one(p)
            .div(&FixedPoint::from_int(1 + m, p).sqrt().unwrap())
            .unwrap()
            .sub(&FixedPoint::from_mantissa(1, p));
        let word = sr.dfa.alphabet.parse_word("w 0 r 0 i 1 w 1 r 1").unwrap();
        let mut h = sl.layer.h0.clone();
        for &s in &word {
            let x = real_vector(&emb[s]);
            let z = sl.layer.step(&mut h, &x, s).unwrap();
            for v in &z {
                let v = v.as_real().unwrap();
                if !v.is_zero() {
                    assert!(v.abs() >= bound.abs() || v >= &bound);
                }
            }
        }
    }
}
