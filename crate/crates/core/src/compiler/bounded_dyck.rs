//! Bounded-depth Dyck: a depth counter clipped at h feeds h parallel
//! set-reset registers, one per depth, each recording the last bracket seen
//! at that depth. On a valid prefix the register at the current depth always
//! holds the still-open bracket, so the readout emits its matching closer,
//! plus every opener while below the depth bound, plus EOS at depth zero.

use crate::languages::{Language, LanguageSpec, PredictiveLabel};
use crate::numerics::{FixedPoint, FixedVector};
use crate::ssm::{
    atoms, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer, SsmModel,
    StateValue,
};

use super::counter::compile_counter;
use super::support::{code_action, code_atoms, code_width, derive_flags, one_hot_embedding};
use super::CompileError;

pub fn compile_bounded_dyck(k: u32, h: u32, p: u8) -> Result<SsmModel, CompileError> {
    if k < 1 || h < 1 {
        return Err(CompileError::BadParameter("need K >= 1 bracket types and h >= 1".into()));
    }
    let lang = Language::new(LanguageSpec::BoundedDyck { k, h });
    let al = lang.alphabet.clone();
    let k = k as usize;
    let h = h as usize;
    let n = al.len(); // 2K bracket symbols
    let one = FixedPoint::one(p);
    let zero = FixedPoint::zero(p);

    // ---- layer 1: depth counter clipped at h, plus token forward
    let u: Vec<Vec<i64>> = (0..n).map(|s| vec![if s % 2 == 0 { 1 } else { -1 }]).collect();
    let cl = compile_counter(&u, h as i64, p)?;
    let d1 = cl.out_dim();

    // ---- layer 2: h parallel set-reset registers over (depth, bracket)
    // block for depth l: code of 2K+1 states (0 = nothing yet at this depth)
    let m = code_width(2 * k + 1);
    let block = |l: usize| (l - 1) * m; // depths are 1-based
    let depth_pos = |c: usize| h * m + 1 + c; // one-hot of the clipped depth
    let d2 = h * m + 1 + (h + 1);

    // tags: (token, depth-after-token); opens see depths 1..=h, closes 0..=h-1
    let mut rules2 = Vec::new();
    let mut gate2: Vec<Vec<GateEntry>> = Vec::new();
    let mut inc2: Vec<FixedVector> = Vec::new();
    for s in 0..n {
        let open = s % 2 == 0;
        let depths: Vec<usize> = if open { (1..=h).collect() } else { (0..h).collect() };
        for c in depths {
            let mut atoms_vec = vec![cl.token_atom(s, p)];
            atoms_vec.extend(cl.value_atoms(0, c as i64, p));
            let tag = gate2.len();
            rules2.push((Predicate::new(atoms_vec), tag));
            // the bracket's own depth: where it sits in the tree
            let token_depth = if open { c } else { c + 1 };
            let mut g: Vec<GateEntry> = Vec::with_capacity(d2);
            let mut b: Vec<FixedPoint> = Vec::with_capacity(d2);
            for l in 1..=h {
                let reset = if l == token_depth { Some(s + 1) } else { None };
                let (gl, bl) = code_action(reset, m, p);
                g.extend(gl);
                b.extend(bl);
            }
            g.push(GateEntry::Real(one.clone())); // dummy
            b.push(zero.clone());
            for c2 in 0..=h {
                g.push(GateEntry::Real(zero.clone()));
                b.push(if c2 == c { one.clone() } else { zero.clone() });
            }
            gate2.push(g);
            inc2.push(b);
        }
    }
    let mut h02 = vec![StateValue::Real(zero.clone()); h * m];
    h02.push(StateValue::Real(one.clone()));
    h02.extend(vec![StateValue::Real(zero.clone()); h + 1]);
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

    // ---- readout: depth 0 ends or opens; otherwise the register at the
    // current depth holds an open bracket whose closer is legal
    let all_opens: Vec<usize> = (0..k).map(|i| 2 * i).collect();
    let mut rules = Vec::new();
    let mut labels = Vec::new();
    rules.push((
        Predicate::new(vec![atoms::positive(depth_pos(0), p)]),
        0usize,
    ));
    labels.push(PredictiveLabel::from_symbols(&all_opens, true));
    for c in 1..=h {
        for i in 0..k {
            let opener = 2 * i;
            let mut atoms_vec = vec![atoms::positive(depth_pos(c), p)];
            atoms_vec.extend(code_atoms(opener + 1, m, block(c), p));
            let mut label_syms = vec![opener + 1];
            if c < h {
                label_syms.extend(all_opens.iter().copied());
            }
            rules.push((Predicate::new(atoms_vec), labels.len()));
            labels.push(PredictiveLabel::from_symbols(&label_syms, false));
        }
    }

    let layers = vec![cl.layer, layer2];
    let flags = derive_flags(&layers);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: al,
        embedding: one_hot_embedding(n, p),
        layers,
        readout: Readout { decoder: Decoder::new(rules), table: ReadoutTable::Labels(labels) },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::{generate_samples, SampleOptions};
    use crate::ssm::{run_model_opts, Outputs};

    #[test]
    fn two_layers_nonnegative() {
        let model = compile_bounded_dyck(8, 10, 8).unwrap();
        assert_eq!(model.num_layers(), 2);
        assert!(model.flags.nonnegative);
    }

    #[test]
    fn open_open_close_labels() {
        let model = compile_bounded_dyck(8, 10, 8).unwrap();
        let word = model.alphabet.parse_word("(1 (2 )2").unwrap();
        match run_model_opts(&model, &word, true).unwrap() {
            Outputs::Labels(labels) => {
                let last = labels.last().unwrap();
                assert!(last.contains(model.alphabet.id(")1").unwrap()));
                for i in 1..=8 {
                    assert!(last.contains(model.alphabet.id(&format!("({i}")).unwrap()));
                }
                assert!(!last.eos());
                assert!(!last.contains(model.alphabet.id(")2").unwrap()));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn depth_bound_blocks_opens() {
        let model = compile_bounded_dyck(2, 3, 8).unwrap();
        let word = model.alphabet.parse_word("(1 (2 (1").unwrap();
        match run_model_opts(&model, &word, true).unwrap() {
            Outputs::Labels(labels) => {
                let last = labels.last().unwrap();
                assert_eq!(last.symbols().count(), 1);
                assert!(last.contains(model.alphabet.id(")1").unwrap()));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_oracle_on_random_words() {
        let model = compile_bounded_dyck(4, 5, 8).unwrap();
        let lang = Language::new(LanguageSpec::BoundedDyck { k: 4, h: 5 });
        let samples = generate_samples(&lang, &SampleOptions::new(2, 80, 80, 23)).unwrap();
        for (word, expect) in samples {
            match run_model_opts(&model, &word, true).unwrap() {
                Outputs::Labels(got) => assert_eq!(got, expect),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn width_scales_with_depth_times_log_brackets() {
        // measured widths stay within the stated budget
        for (k, h) in [(2u32, 2u32), (8, 10), (16, 20)] {
            let model = compile_bounded_dyck(k, h, 8).unwrap();
            let h = h as usize;
            let log2k = (64 - (2 * k as usize - 1).leading_zeros()) as usize;
            let budget = 2 * (2 * h + 1) + h * (1 + log2k) + 16;
            assert!(
                model.width() <= budget,
                "width {} exceeds budget {budget} for ({k},{h})",
                model.width()
            );
        }
    }
}
