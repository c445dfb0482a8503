//! The signed-gate PARITY recognizer: one coordinate, h0 = 1, gate -1 on
//! ones and +1 on zeros, no increment. The sign of the state carries the
//! parity exactly at any length; sign readout accepts on positive.

use crate::languages::{Alphabet, Language, LanguageSpec};
use crate::numerics::FixedPoint;
use crate::ssm::{
    atoms, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer, SsmModel,
    StateValue,
};

use super::support::{derive_flags, one_hot_embedding};
use super::CompileError;

pub fn compile_parity_signed(p: u8) -> Result<SsmModel, CompileError> {
    let lang = Language::new(LanguageSpec::Parity);
    compile_sign_flip(&lang.alphabet, &[lang.alphabet.id("1").unwrap()], p)
}

/// Sign-flip recognizer over an arbitrary alphabet: flips on `flip_symbols`,
/// accepts when an even number of flips occurred.
pub fn compile_sign_flip(
    alphabet: &Alphabet,
    flip_symbols: &[usize],
    p: u8,
) -> Result<SsmModel, CompileError> {
    let n = alphabet.len();
    let one = FixedPoint::one(p);
    let decoder = Decoder::new(
        (0..n).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    let gate = (0..n)
        .map(|s| {
            let flip = flip_symbols.contains(&s);
            vec![GateEntry::Real(if flip { one.neg() } else { one.clone() })]
        })
        .collect();
    let inc = vec![vec![FixedPoint::zero(p)]; n];
    let layer = SsmLayer {
        d_in: n,
        d: 1,
        decoder,
        gate,
        inc,
        h0: vec![StateValue::Real(one)],
        mix2: MixSpec::Identity,
        normalize: false,
        mix1: MixSpec::Identity,
    };
    let readout = Readout {
        decoder: Decoder::new(vec![
            (Predicate::new(vec![atoms::positive(0, p)]), 0),
            (Predicate::new(vec![atoms::negative(0, p)]), 1),
        ]),
        table: ReadoutTable::Accept(vec![true, false]),
    };
    let layers = vec![layer];
    let flags = derive_flags(&layers);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: alphabet.clone(),
        embedding: one_hot_embedding(n, p),
        layers,
        readout,
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssm::recognize;

    #[test]
    fn flags_are_neither_nonnegative_nor_time_invariant() {
        let model = compile_parity_signed(8).unwrap();
        assert!(!model.flags.nonnegative);
        assert!(!model.flags.time_invariant);
    }

    #[test]
    fn small_cases() {
        let model = compile_parity_signed(8).unwrap();
        assert!(recognize(&model, &[]).unwrap()); // zero ones is even
        assert!(!recognize(&model, &[1, 0]).unwrap());
        assert!(recognize(&model, &[1, 1]).unwrap());
        assert!(!recognize(&model, &[1, 1, 1]).unwrap());
    }

    #[test]
    fn matches_popcount_on_random_words() {
        use rand::{Rng, SeedableRng};
        let model = compile_parity_signed(8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let bits: u64 = rng.gen();
            let word: Vec<usize> = (0..64).map(|i| ((bits >> i) & 1) as usize).collect();
            let expect = bits.count_ones() % 2 == 0;
            assert_eq!(recognize(&model, &word).unwrap(), expect);
        }
    }
}
