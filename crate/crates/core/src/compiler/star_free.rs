//! The full star-free pipeline: minimize, check aperiodicity (refusing
//! otherwise), decompose into set-reset components, fold the cascade into a
//! layer stack, and attach a readout that sends each joint state to the
//! next-character set of the automaton state it encodes.

use crate::languages::Dfa;
use crate::numerics::FixedPoint;
use crate::ssm::{
    atoms, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer, SsmModel,
    StateValue,
};

use super::cascade::tracker_for_program;
use super::holonomy::krohn_rhodes_decompose;
use super::support::{derive_flags, one_hot_embedding};
use super::CompileError;

pub fn compile_star_free(dfa: &Dfa, p: u8) -> Result<SsmModel, CompileError> {
    if p < 5 {
        return Err(CompileError::PrecisionTooLow(p, 5));
    }
    let min = dfa.minimize();
    let program = krohn_rhodes_decompose(&min)?;
    let labels = min.state_labels();
    let n = min.alphabet.len();

    if program.components.is_empty() {
        // single-state automaton: a constant label
        let one = FixedPoint::one(p);
        let layer = SsmLayer {
            d_in: n,
            d: 1,
            decoder: Decoder::new(vec![(Predicate::new(vec![]), 0)]),
            gate: vec![vec![GateEntry::Real(one.clone())]],
            inc: vec![vec![FixedPoint::zero(p)]],
            h0: vec![StateValue::Real(one)],
            mix2: MixSpec::Identity,
            normalize: false,
            mix1: MixSpec::Identity,
        };
        let readout = Readout {
            decoder: Decoder::new(vec![(Predicate::new(vec![atoms::positive(0, p)]), 0)]),
            table: ReadoutTable::Labels(vec![labels[min.start]]),
        };
        let layers = vec![layer];
        let flags = derive_flags(&layers);
        let model = SsmModel {
            precision: p,
            flags,
            alphabet: min.alphabet.clone(),
            embedding: one_hot_embedding(n, p),
            layers,
            readout,
        };
        model.validate()?;
        return Ok(model);
    }

    let tracker = tracker_for_program(&program, p)?;
    let mut rules = Vec::with_capacity(tracker.joints.len());
    let mut table = Vec::with_capacity(tracker.joints.len());
    for (j, tuple) in tracker.joints.iter().enumerate() {
        let state = program
            .decode_tuple(tuple)
            .ok_or_else(|| CompileError::Internal("joint without an output entry".into()))?;
        rules.push((tracker.state_preds[j].clone(), j));
        table.push(labels[state]);
    }
    let layers = tracker.layers;
    let flags = derive_flags(&layers);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: min.alphabet.clone(),
        embedding: tracker.embedding,
        layers,
        readout: Readout { decoder: Decoder::new(rules), table: ReadoutTable::Labels(table) },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::CompileError;
    use crate::languages::{generate_samples, Language, LanguageSpec, SampleOptions};
    use crate::ssm::{run_model_opts, Outputs};

    fn check_language(spec: LanguageSpec, exhaustive_len: usize) {
        let lang = Language::new(spec);
        let model = compile_star_free(lang.dfa().unwrap(), 8).unwrap();
        assert!(model.flags.nonnegative, "{spec} gates must be nonnegative");
        // exhaustive prefixes
        for prefix in lang.valid_prefixes(exhaustive_len) {
            let expect = lang.prefix_label(&prefix).unwrap();
            match run_model_opts(&model, &prefix, true).unwrap() {
                Outputs::Labels(got) => assert_eq!(
                    *got.last().unwrap(),
                    expect,
                    "{spec} prefix {:?}",
                    lang.alphabet.render_word(&prefix)
                ),
                _ => unreachable!(),
            }
        }
        // random members
        let samples = generate_samples(&lang, &SampleOptions::new(1, 40, 30, 9)).unwrap();
        for (word, expect) in samples {
            match run_model_opts(&model, &word, true).unwrap() {
                Outputs::Labels(got) => assert_eq!(got, expect, "{spec}"),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn tomita1_compiles_and_matches() {
        check_language(LanguageSpec::Tomita(1), 10);
    }

    #[test]
    fn tomita4_compiles_and_matches() {
        check_language(LanguageSpec::Tomita(4), 10);
    }

    #[test]
    fn d2_compiles_and_matches() {
        check_language(LanguageSpec::Dn(2), 10);
    }

    #[test]
    fn zerotwostar_compiles_and_matches() {
        check_language(LanguageSpec::ZeroTwoStar, 8);
    }

    #[test]
    fn abstard_compiles_and_matches() {
        check_language(LanguageSpec::AbStarD, 7);
    }

    #[test]
    fn parity_is_refused() {
        let lang = Language::new(LanguageSpec::Parity);
        assert!(matches!(
            compile_star_free(lang.dfa().unwrap(), 8),
            Err(CompileError::NonStarFree { .. })
        ));
    }

    #[test]
    fn layer_count_matches_the_cascade() {
        let lang = Language::new(LanguageSpec::Dn(3));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        let model = compile_star_free(lang.dfa().unwrap(), 8).unwrap();
        // one layer per component plus one previous-state layer per join
        assert_eq!(model.num_layers(), 2 * program.components.len() - 1);
    }
}
