//! The previous-symbol layer: a gate of 1/4 turns the state into a base-4
//! expansion of the symbol history, so the symbol one step back can be read
//! off with a margin of at least 1/8. Four dimensions per symbol: matching
//! and complementary moving averages plus a one-hot of the current symbol.

use crate::languages::Alphabet;
use crate::numerics::{FixedPoint, FixedVector};
use crate::ssm::{atoms, Atom, Decoder, GateEntry, MixSpec, Predicate, SsmLayer, StateValue};

use super::support::one_hot_embedding;
use super::CompileError;

/// Compiled previous-symbol layer with decode predicates.
#[derive(Clone, Debug)]
pub struct ReadoutLastLayer {
    pub layer: SsmLayer,
    /// (current symbol, previous symbol) -> predicate over z; the previous
    /// slot uses index |Σ| for "no predecessor" (position 1)
    pub prev_preds: Vec<Vec<Predicate>>,
}

/// Block layout: 4 dims per symbol [ema_match, ema_other, cur_match, cur_other].
fn block(s: usize) -> usize {
    4 * s
}

pub fn compile_readout_last(alphabet: &Alphabet, p: u8) -> Result<ReadoutLastLayer, CompileError> {
    let n = alphabet.len();
    if n < 2 {
        return Err(CompileError::TooFewSymbols);
    }
    if p < 5 {
        return Err(CompileError::PrecisionTooLow(p, 5));
    }
    let d = 4 * n;
    let quarter = FixedPoint::from_ratio(1, 4, p);
    let one = FixedPoint::one(p);
    let zero = FixedPoint::zero(p);

    let decoder = Decoder::new(
        (0..n).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    let mut gate_row = Vec::with_capacity(d);
    for _ in 0..n {
        gate_row.extend([
            GateEntry::Real(quarter.clone()),
            GateEntry::Real(quarter.clone()),
            GateEntry::Real(zero.clone()),
            GateEntry::Real(zero.clone()),
        ]);
    }
    let gate = vec![gate_row; n];
    let inc: Vec<FixedVector> = (0..n)
        .map(|tau| {
            let mut row = Vec::with_capacity(d);
            for s in 0..n {
                let is = tau == s;
                row.extend([
                    if is { one.clone() } else { zero.clone() },
                    if is { zero.clone() } else { one.clone() },
                    if is { one.clone() } else { zero.clone() },
                    if is { zero.clone() } else { one.clone() },
                ]);
            }
            row
        })
        .collect();
    let h0 = vec![StateValue::Real(zero.clone()); d];
    let layer = SsmLayer {
        d_in: n,
        d,
        decoder,
        gate,
        inc,
        h0,
        mix2: MixSpec::Identity,
        normalize: false,
        mix1: MixSpec::Identity,
    };

    // prev = sigma given cur = tau: the matching moving average carries the
    // 1/4 pulse from one step back; older history contributes at most 1/12
    // plus rounding, so 3/16 separates. When sigma == tau the current pulse
    // shifts both sides up by 1.
    let prev_preds = (0..n)
        .map(|tau| {
            let mut per_prev: Vec<Predicate> = (0..n)
                .map(|sigma| {
                    let threshold = if sigma == tau {
                        atoms::ge_ratio(block(sigma), 19, 16, p)
                    } else {
                        atoms::ge_ratio(block(sigma), 3, 16, p)
                    };
                    Predicate::new(vec![atoms::ge_ratio(block(tau) + 2, 1, 2, p), threshold])
                })
                .collect();
            // no predecessor: every non-current average below the pulse, the
            // current one carrying only its own pulse
            let mut atoms_vec: Vec<Atom> =
                vec![atoms::ge_ratio(block(tau) + 2, 1, 2, p), atoms::le_ratio(block(tau), 9, 8, p)];
            for sigma in 0..n {
                if sigma != tau {
                    atoms_vec.push(atoms::le_ratio(block(sigma), 1, 8, p));
                }
            }
            per_prev.push(Predicate::new(atoms_vec));
            per_prev
        })
        .collect();

    Ok(ReadoutLastLayer { layer, prev_preds })
}

/// Embeddings the layer expects.
pub fn readout_last_embedding(alphabet: &Alphabet, p: u8) -> Vec<FixedVector> {
    one_hot_embedding(alphabet.len(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssm::real_vector;

    fn fp(s: &str) -> FixedPoint {
        FixedPoint::from_decimal_string(s, 8).unwrap()
    }

    fn run(layer: &SsmLayer, word: &[usize], n: usize, p: u8) -> Vec<Vec<StateValue>> {
        let emb = one_hot_embedding(n, p);
        let mut h = layer.h0.clone();
        word.iter()
            .map(|&s| {
                let x = real_vector(&emb[s]);
                let tag = layer.decoder.decode(&x).unwrap();
                layer.step(&mut h, &x, tag).unwrap()
            })
            .collect()
    }

    #[test]
    fn interval_bounds_from_the_binary_construction() {
        let al = Alphabet::new(["0", "1"]).unwrap();
        let rl = compile_readout_last(&al, 8).unwrap();
        // word "10": block of symbol "1": ema carries the 1/4 pulse
        let zs = run(&rl.layer, &[1, 0], 2, 8);
        let z = &zs[1];
        // block "0": [1, ..], block "1": ema = 1/4 exactly
        assert_eq!(z[block(0)].as_real().unwrap(), &fp("1"));
        let second = z[block(1)].as_real().unwrap();
        assert!(second >= &fp("0.25") && second <= &fp("0.5"));
        assert_eq!(z[block(0) + 2].as_real().unwrap(), &fp("1"));
        assert_eq!(z[block(1) + 2].as_real().unwrap(), &fp("0"));
        // word "00": the "1" average stays within [0, 1/8]
        let zs = run(&rl.layer, &[0, 0], 2, 8);
        let second = zs[1][block(1)].as_real().unwrap();
        assert!(second <= &fp("0.125"));
    }

    #[test]
    fn decodes_the_previous_symbol_with_margin() {
        let al = Alphabet::new(["a", "b", "c"]).unwrap();
        let rl = compile_readout_last(&al, 8).unwrap();
        let word = [0usize, 2, 1, 1, 0, 2, 2, 0, 1];
        let zs = run(&rl.layer, &word, 3, 8);
        for t in 1..word.len() {
            let cur = word[t];
            let expect_prev = word[t - 1];
            let hits: Vec<usize> = (0..=3)
                .filter(|&prev| rl.prev_preds[cur][prev].holds(&zs[t]).unwrap())
                .collect();
            assert_eq!(hits, vec![expect_prev], "position {t}");
        }
        // position 1 reports "no predecessor"
        let hits: Vec<usize> =
            (0..=3).filter(|&prev| rl.prev_preds[word[0]][prev].holds(&zs[0]).unwrap()).collect();
        assert_eq!(hits, vec![3]);
    }

    #[test]
    fn long_words_keep_the_margin() {
        let al = Alphabet::new(["0", "1"]).unwrap();
        let rl = compile_readout_last(&al, 8).unwrap();
        let word: Vec<usize> = (0..500).map(|i| (i * 7 + i / 3) % 2).collect();
        let zs = run(&rl.layer, &word, 2, 8);
        for t in 1..word.len() {
            let hits: Vec<usize> = (0..=2)
                .filter(|&prev| rl.prev_preds[word[t]][prev].holds(&zs[t]).unwrap())
                .collect();
            assert_eq!(hits, vec![word[t - 1]], "position {t}");
        }
    }
}
