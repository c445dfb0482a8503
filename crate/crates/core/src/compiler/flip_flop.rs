//! The two-layer Flip-Flop model: layer 1 records the last instruction and
//! forwards the token; layer 2 overwrites a bit register whenever the
//! previous instruction was a write; the readout emits the legal next
//! symbols from (current token, register).

use crate::languages::{Language, LanguageSpec, PredictiveLabel};
use crate::numerics::{FixedPoint, FixedVector};
use crate::ssm::{
    atoms, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer, SsmModel,
    StateValue,
};

use super::support::{code_action, code_atoms, code_width, derive_flags, one_hot_embedding};
use super::CompileError;

// layer-1 register states (2-bit code): 0 none, 1 w, 2 r, 3 i
const INSTRS: [&str; 3] = ["w", "r", "i"];

pub fn compile_flip_flop(p: u8) -> Result<SsmModel, CompileError> {
    let lang = Language::new(LanguageSpec::FlipFlop);
    let al = lang.alphabet.clone();
    let n = al.len(); // w r i 0 1
    let w_id = al.id("w").unwrap();
    let bit_ids = [al.id("0").unwrap(), al.id("1").unwrap()];
    let instr_ids: Vec<usize> = INSTRS.iter().map(|s| al.id(s).unwrap()).collect();

    // ---- layer 1: set-reset over the instruction symbols + token forward
    let m1 = code_width(4);
    let d1 = m1 + 1 + n; // code, dummy, token one-hot
    let zero = FixedPoint::zero(p);
    let one = FixedPoint::one(p);
    let decoder1 = Decoder::new(
        (0..n).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    let mut gate1 = Vec::with_capacity(n);
    let mut inc1 = Vec::with_capacity(n);
    for s in 0..n {
        let reset = instr_ids.iter().position(|&i| i == s).map(|i| i + 1);
        let (mut g, mut b) = code_action(reset, m1, p);
        g.push(GateEntry::Real(one.clone())); // dummy
        b.push(zero.clone());
        for t in 0..n {
            g.push(GateEntry::Real(zero.clone()));
            b.push(if t == s { one.clone() } else { zero.clone() });
        }
        gate1.push(g);
        inc1.push(b);
    }
    let mut h01 = vec![StateValue::Real(zero.clone()); m1];
    h01.push(StateValue::Real(one.clone()));
    h01.extend(vec![StateValue::Real(zero.clone()); n]);
    let layer1 = SsmLayer {
        d_in: n,
        d: d1,
        decoder: decoder1,
        gate: gate1,
        inc: inc1,
        h0: h01,
        mix2: MixSpec::Identity,
        normalize: true,
        mix1: MixSpec::Identity,
    };
    let tok1 = |s: usize| m1 + 1 + s; // token position in z1

    // ---- layer 2: set-reset over (token, last instruction): write resets
    // the register to the bit; register states: 0 none, 1 bit0, 2 bit1
    let m2 = code_width(3);
    let d2 = m2 + 1 + n;
    let mut rules2 = Vec::new();
    let mut gate2 = Vec::new();
    let mut inc2 = Vec::new();
    for s in 0..n {
        for last in 0..4usize {
            let mut atoms_vec = vec![atoms::ge_ratio(tok1(s), 1, 2, p)];
            atoms_vec.extend(code_atoms(last, m1, 0, p));
            let tag = gate2.len();
            rules2.push((Predicate::new(atoms_vec), tag));
            let reset = if last == 1 && bit_ids.contains(&s) {
                // previous instruction was a write: store this bit
                Some(if s == bit_ids[0] { 1 } else { 2 })
            } else {
                None
            };
            let (mut g, mut b) = code_action(reset, m2, p);
            g.push(GateEntry::Real(one.clone()));
            b.push(zero.clone());
            for t in 0..n {
                g.push(GateEntry::Real(zero.clone()));
                b.push(if t == s { one.clone() } else { zero.clone() });
            }
            gate2.push(g);
            inc2.push(b);
        }
    }
    let mut h02 = vec![StateValue::Real(zero.clone()); m2];
    h02.push(StateValue::Real(one.clone()));
    h02.extend(vec![StateValue::Real(zero.clone()); n]);
    let layer2 = SsmLayer {
        d_in: d1,
        d: d2,
        decoder: Decoder::new(rules2),
        gate: gate2,
        inc: inc2,
        h0: h02,
        mix2: MixSpec::Identity,
        normalize: true,
        mix1: MixSpec::Identity,
    };
    let tok2 = |s: usize| m2 + 1 + s;

    // ---- readout over z2: (token, register) -> legal next symbols
    let mut rules = Vec::new();
    let mut labels: Vec<PredictiveLabel> = Vec::new();
    for s in 0..n {
        for reg in 0..3usize {
            let mut atoms_vec = vec![atoms::ge_ratio(tok2(s), 1, 2, p)];
            atoms_vec.extend(code_atoms(reg, m2, 0, p));
            let label = if bit_ids.contains(&s) {
                // a pair just completed: any instruction or the end
                PredictiveLabel::from_symbols(&instr_ids, true)
            } else if s == al.id("r").unwrap() && reg != 0 {
                PredictiveLabel::from_symbols(&[bit_ids[reg - 1]], false)
            } else {
                PredictiveLabel::from_symbols(&bit_ids, false)
            };
            rules.push((Predicate::new(atoms_vec), labels.len()));
            labels.push(label);
        }
    }

    let _ = w_id;
    let layers = vec![layer1, layer2];
    let flags = derive_flags(&layers);
    let embedding: Vec<FixedVector> = one_hot_embedding(n, p);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: al,
        embedding,
        layers,
        readout: Readout { decoder: Decoder::new(rules), table: ReadoutTable::Labels(labels) },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::{generate_samples, FlipFlopMode, SampleOptions};
    use crate::ssm::{run_model_opts, Outputs};

    #[test]
    fn two_layers_and_nonnegative() {
        let model = compile_flip_flop(8).unwrap();
        assert_eq!(model.num_layers(), 2);
        assert!(model.flags.nonnegative);
        assert!(!model.flags.time_invariant);
    }

    #[test]
    fn w0r_reads_back_zero() {
        let model = compile_flip_flop(8).unwrap();
        let word = model.alphabet.parse_word("w 0 r").unwrap();
        match run_model_opts(&model, &word, true).unwrap() {
            Outputs::Labels(labels) => {
                let last = labels.last().unwrap();
                assert!(last.contains(model.alphabet.id("0").unwrap()));
                assert_eq!(last.symbols().count(), 1);
                assert!(!last.eos());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn read_before_any_write_allows_both_bits() {
        let model = compile_flip_flop(8).unwrap();
        let word = model.alphabet.parse_word("i 1 r").unwrap();
        match run_model_opts(&model, &word, true).unwrap() {
            Outputs::Labels(labels) => {
                let last = labels.last().unwrap();
                assert!(last.contains(3) && last.contains(4));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_oracle_on_both_mixes() {
        let model = compile_flip_flop(8).unwrap();
        let lang = Language::new(LanguageSpec::FlipFlop);
        for mode in [FlipFlopMode::InDistribution, FlipFlopMode::Sparse] {
            let opts = SampleOptions::new(2, 120, 120, 17).with_mode(mode);
            for (word, expect) in generate_samples(&lang, &opts).unwrap() {
                match run_model_opts(&model, &word, true).unwrap() {
                    Outputs::Labels(got) => assert_eq!(got, expect),
                    _ => unreachable!(),
                }
            }
        }
    }
}
