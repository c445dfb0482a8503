//! Mod-k counting with an exact rotation gate: the single phase coordinate
//! starts at angle 0, each counting symbol rotates by 1/k of a turn, and the
//! readout tests the exact rotation index. k = 2 specializes to PARITY since
//! a half turn is -1.

use crate::languages::Alphabet;
use crate::numerics::{FixedPoint, UnitRotation};
use crate::ssm::{
    atoms, Atom, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer,
    SsmModel, StateValue,
};

use super::support::{derive_flags, one_hot_embedding};
use super::CompileError;

/// One-layer rotation counter: accepts iff the number of counting symbols is
/// divisible by k.
pub fn compile_mod_counter(
    k: u64,
    alphabet: &Alphabet,
    count_symbols: &[usize],
    p: u8,
) -> Result<SsmModel, CompileError> {
    if k < 2 {
        return Err(CompileError::BadParameter("modulus must be at least 2".into()));
    }
    let n = alphabet.len();
    let step = UnitRotation::new(1, k);
    let decoder = Decoder::new(
        (0..n).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    let gate = (0..n)
        .map(|s| {
            let r = if count_symbols.contains(&s) { step } else { UnitRotation::identity() };
            vec![GateEntry::Phase(r)]
        })
        .collect();
    let inc = vec![vec![FixedPoint::zero(p)]; n];
    let layer = SsmLayer {
        d_in: n,
        d: 1,
        decoder,
        gate,
        inc,
        h0: vec![StateValue::Phase(UnitRotation::identity())],
        mix2: MixSpec::Identity,
        normalize: false,
        mix1: MixSpec::Identity,
    };
    let rules = (0..k)
        .map(|j| {
            (Predicate::new(vec![Atom::PhaseIs(0, UnitRotation::new(j, k))]), j as usize)
        })
        .collect();
    let accept = (0..k).map(|j| j == 0).collect();
    let layers = vec![layer];
    let flags = derive_flags(&layers);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: alphabet.clone(),
        embedding: one_hot_embedding(n, p),
        layers,
        readout: Readout { decoder: Decoder::new(rules), table: ReadoutTable::Accept(accept) },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssm::recognize;

    fn binary() -> Alphabet {
        Alphabet::new(["0", "1"]).unwrap()
    }

    #[test]
    fn mod3_counts_ones() {
        let model = compile_mod_counter(3, &binary(), &[1], 8).unwrap();
        assert!(recognize(&model, &[1, 1, 1]).unwrap());
        assert!(!recognize(&model, &[1, 1]).unwrap());
        assert!(recognize(&model, &[1, 0, 1, 0, 1, 1, 1, 1]).unwrap()); // six ones
        assert!(recognize(&model, &[]).unwrap());
    }

    #[test]
    fn mod2_specializes_to_parity() {
        let model = compile_mod_counter(2, &binary(), &[1], 8).unwrap();
        for w in 0..64u32 {
            let word: Vec<usize> = (0..6).map(|i| ((w >> i) & 1) as usize).collect();
            assert_eq!(recognize(&model, &word).unwrap(), word.iter().sum::<usize>() % 2 == 0);
        }
    }

    #[test]
    fn mod5_on_a_long_run() {
        let model = compile_mod_counter(5, &binary(), &[1], 8).unwrap();
        let word = vec![1usize; 100_000];
        assert!(recognize(&model, &word).unwrap());
        let word = vec![1usize; 100_001];
        assert!(!recognize(&model, &word).unwrap());
    }

    #[test]
    fn gate_table_is_exact_rotation() {
        let model = compile_mod_counter(3, &binary(), &[1], 8).unwrap();
        assert!(!model.flags.nonnegative);
        match &model.layers[0].gate[1][0] {
            GateEntry::Phase(r) => assert_eq!(*r, UnitRotation::new(1, 3)),
            _ => panic!("expected a rotation gate"),
        }
    }
}
