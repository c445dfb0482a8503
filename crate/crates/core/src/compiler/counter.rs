//! Counter layers: gate 1 accumulates per-symbol integer increments; an
//! affine mix fans each counter out into 2L+1 shifted copies whose signs
//! survive normalization, so the counter value clipped to [-L, L] can be
//! decoded by threshold tests at any input length.

use crate::languages::{Language, LanguageSpec, PredictiveLabel};
use crate::numerics::{FixedPoint, FixedVector};
use crate::ssm::{
    atoms, Atom, Decoder, GateEntry, MixSpec, Predicate, Readout, ReadoutTable, SsmLayer,
    SsmModel, StateValue, AffineMap,
};

use super::support::{derive_flags, one_hot_embedding};
use super::CompileError;

/// A compiled counter layer plus positional metadata for decoding.
#[derive(Clone, Debug)]
pub struct CounterLayer {
    pub layer: SsmLayer,
    pub num_counters: usize,
    pub clip: i64,
    alphabet_len: usize,
}

impl CounterLayer {
    /// Copy index of counter `c` at the given offset (-clip..=clip).
    fn copy_pos(&self, c: usize, offset: i64) -> usize {
        let idx = if offset == 0 {
            0
        } else if offset > 0 {
            2 * offset as usize - 1
        } else {
            2 * (-offset) as usize
        };
        c * (2 * self.clip as usize + 1) + idx
    }

    pub fn token_pos(&self, symbol: usize) -> usize {
        self.num_counters * (2 * self.clip as usize + 1) + symbol
    }

    pub fn token_atom(&self, symbol: usize, p: u8) -> Atom {
        atoms::positive(self.token_pos(symbol), p)
    }

    /// Atoms asserting that the clipped counter value equals `v`.
    pub fn value_atoms(&self, c: usize, v: i64, p: u8) -> Vec<Atom> {
        assert!(v.abs() <= self.clip);
        if v == self.clip {
            // true count >= clip: the copy shifted by -(clip-1) is positive
            vec![atoms::positive(self.copy_pos(c, -(self.clip - 1)), p)]
        } else if v == -self.clip {
            vec![atoms::negative(self.copy_pos(c, self.clip - 1), p)]
        } else {
            atoms::zero(self.copy_pos(c, -v), p)
        }
    }

    /// Atom asserting the (unclipped) counter is >= 0.
    pub fn nonneg_atom(&self, c: usize, p: u8) -> Atom {
        Atom::Ge(self.copy_pos(c, 0), FixedPoint::zero(p))
    }

    pub fn out_dim(&self) -> usize {
        self.num_counters * (2 * self.clip as usize + 1) + self.alphabet_len + 1
    }
}

/// Compile a counter layer for the per-symbol increment table `u` with clip
/// bound `clip`. The layer also forwards the current symbol one-hot and keeps
/// a dummy-1 dimension for the norm.
pub fn compile_counter(
    u: &[Vec<i64>],
    clip: i64,
    p: u8,
) -> Result<CounterLayer, CompileError> {
    let alphabet_len = u.len();
    if alphabet_len == 0 {
        return Err(CompileError::BadParameter("empty increment table".into()));
    }
    let num_counters = u[0].len();
    if num_counters == 0 || clip < 1 {
        return Err(CompileError::BadParameter("need C >= 1 counters and L >= 1".into()));
    }
    if u.iter().any(|row| row.len() != num_counters) {
        return Err(CompileError::BadParameter("ragged increment table".into()));
    }
    let d = num_counters + alphabet_len + 1;
    let one = FixedPoint::one(p);
    let zero = FixedPoint::zero(p);

    let decoder = Decoder::new(
        (0..alphabet_len).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    // counters: gate 1, increment u; token dims: gate 0, one-hot; dummy: gate 1
    let mut gate_row: Vec<GateEntry> = vec![GateEntry::Real(one.clone()); num_counters];
    gate_row.extend(vec![GateEntry::Real(zero.clone()); alphabet_len]);
    gate_row.push(GateEntry::Real(one.clone()));
    let gate = vec![gate_row; alphabet_len];
    let inc: Vec<FixedVector> = (0..alphabet_len)
        .map(|s| {
            let mut row: Vec<FixedPoint> =
                u[s].iter().map(|&v| FixedPoint::from_int(v, p)).collect();
            for t in 0..alphabet_len {
                row.push(if t == s { one.clone() } else { zero.clone() });
            }
            row.push(zero.clone());
            row
        })
        .collect();
    let mut h0 = vec![StateValue::Real(zero.clone()); num_counters + alphabet_len];
    h0.push(StateValue::Real(one.clone()));

    // mix2 fans each counter into 2L+1 offset copies [0, +1, -1, ..., +L, -L]
    let copies = 2 * clip as usize + 1;
    let out_dim = num_counters * copies + alphabet_len + 1;
    let mut weight = Vec::with_capacity(out_dim);
    let mut bias = Vec::with_capacity(out_dim);
    let offsets: Vec<i64> = std::iter::once(0)
        .chain((1..=clip).flat_map(|k| [k, -k]))
        .collect();
    for c in 0..num_counters {
        for &off in &offsets {
            let mut row = vec![zero.clone(); d];
            row[c] = one.clone();
            weight.push(row);
            bias.push(FixedPoint::from_int(off, p));
        }
    }
    for t in 0..alphabet_len {
        let mut row = vec![zero.clone(); d];
        row[num_counters + t] = one.clone();
        weight.push(row);
        bias.push(zero.clone());
    }
    let mut row = vec![zero.clone(); d];
    row[num_counters + alphabet_len] = one.clone();
    weight.push(row);
    bias.push(zero);

    let layer = SsmLayer {
        d_in: alphabet_len,
        d,
        decoder,
        gate,
        inc,
        h0,
        mix2: MixSpec::Affine(AffineMap { weight, bias, use_x: false }),
        normalize: true,
        mix1: MixSpec::Identity,
    };
    Ok(CounterLayer { layer, num_counters, clip, alphabet_len })
}

/// The increment assignment for each supported counter language.
pub fn counter_assignment(spec: LanguageSpec, alphabet_len: usize) -> Option<Vec<Vec<i64>>> {
    match spec {
        LanguageSpec::Dyck1 => Some(vec![vec![1], vec![-1]]),
        LanguageSpec::ShuffleDyck(k) => {
            let k = k as usize;
            let mut u = Vec::with_capacity(2 * k);
            for i in 0..k {
                let mut open = vec![0i64; k];
                open[i] = 1;
                let mut close = vec![0i64; k];
                close[i] = -1;
                u.push(open);
                u.push(close);
            }
            Some(u)
        }
        LanguageSpec::Boolean(m) => {
            // token 0 is "val" (consumes a pending slot), token n is the
            // n-ary operator (consumes one, opens n): net n-1
            let mut u = vec![vec![-1i64]];
            for n in 1..=m as i64 {
                u.push(vec![n - 1]);
            }
            debug_assert_eq!(u.len(), alphabet_len);
            Some(u)
        }
        LanguageSpec::AnBn => Some(vec![vec![1], vec![-1]]),
        LanguageSpec::AnBnCn => Some(vec![vec![1, 0], vec![-1, 1], vec![0, -1]]),
        LanguageSpec::AnBnCnDn => {
            Some(vec![vec![1, 0, 0], vec![-1, 1, 0], vec![0, -1, 1], vec![0, 0, -1]])
        }
        _ => None,
    }
}

/// Compile one of the counter catalog languages into a single-layer
/// predictive model.
pub fn compile_counter_language(spec: LanguageSpec, p: u8) -> Result<SsmModel, CompileError> {
    let lang = Language::new(spec);
    let n = lang.alphabet.len();
    let u = counter_assignment(spec, n)
        .ok_or_else(|| CompileError::Unsupported(format!("{spec} is not a counter language")))?;
    let cl = compile_counter(&u, 1, p)?;

    let mut rules: Vec<(Predicate, usize)> = Vec::new();
    let mut labels: Vec<PredictiveLabel> = Vec::new();
    let mut add = |atoms: Vec<Atom>, label: PredictiveLabel, rules: &mut Vec<(Predicate, usize)>,
                   labels: &mut Vec<PredictiveLabel>| {
        rules.push((Predicate::new(atoms), labels.len()));
        labels.push(label);
    };

    match spec {
        LanguageSpec::Dyck1 => {
            // counter zero: open or end; positive: open or close
            add(
                cl.value_atoms(0, 0, p),
                PredictiveLabel::from_symbols(&[0], true),
                &mut rules,
                &mut labels,
            );
            add(
                cl.value_atoms(0, 1, p),
                PredictiveLabel::from_symbols(&[0, 1], false),
                &mut rules,
                &mut labels,
            );
        }
        LanguageSpec::ShuffleDyck(k) => {
            let k = k as usize;
            // one rule per zero/positive pattern of the k counters
            for pattern in 0..(1u32 << k) {
                let mut atoms_vec = Vec::new();
                let mut label = PredictiveLabel::empty();
                let mut all_zero = true;
                for i in 0..k {
                    label.insert(2 * i);
                    if pattern & (1 << i) != 0 {
                        atoms_vec.extend(cl.value_atoms(i, 1, p));
                        label.insert(2 * i + 1);
                        all_zero = false;
                    } else {
                        atoms_vec.extend(cl.value_atoms(i, 0, p));
                    }
                }
                label.set_eos(all_zero);
                add(atoms_vec, label, &mut rules, &mut labels);
            }
        }
        LanguageSpec::Boolean(_) => {
            // pending counter at -1: the expression just completed
            let all: Vec<usize> = (0..n).collect();
            add(
                cl.value_atoms(0, -1, p),
                PredictiveLabel::from_symbols(&[], true),
                &mut rules,
                &mut labels,
            );
            add(
                vec![cl.nonneg_atom(0, p)],
                PredictiveLabel::from_symbols(&all, false),
                &mut rules,
                &mut labels,
            );
        }
        LanguageSpec::AnBn | LanguageSpec::AnBnCn | LanguageSpec::AnBnCnDn => {
            let phases = n;
            for phase in 0..phases {
                if phase == 0 {
                    // still inside the a-block
                    add(
                        vec![cl.token_atom(0, p)],
                        PredictiveLabel::from_symbols(&[0, 1], false),
                        &mut rules,
                        &mut labels,
                    );
                    continue;
                }
                // counter phase-1 still positive: stay in this block
                let mut more = vec![cl.token_atom(phase, p)];
                more.extend(cl.value_atoms(phase - 1, 1, p));
                add(
                    more,
                    PredictiveLabel::from_symbols(&[phase], false),
                    &mut rules,
                    &mut labels,
                );
                // counter exhausted: advance (or finish)
                let mut done = vec![cl.token_atom(phase, p)];
                done.extend(cl.value_atoms(phase - 1, 0, p));
                let label = if phase + 1 < phases {
                    PredictiveLabel::from_symbols(&[phase + 1], false)
                } else {
                    PredictiveLabel::from_symbols(&[], true)
                };
                add(done, label, &mut rules, &mut labels);
            }
        }
        _ => unreachable!(),
    }

    let layers = vec![cl.layer];
    let flags = derive_flags(&layers);
    let model = SsmModel {
        precision: p,
        flags,
        alphabet: lang.alphabet.clone(),
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
    use crate::languages::generate_samples;
    use crate::languages::SampleOptions;
    use crate::ssm::{run_model_opts, Outputs};

    #[test]
    fn clip_decoding_on_aab() {
        let p = 8;
        let u = vec![vec![1i64], vec![-1]];
        let cl = compile_counter(&u, 1, p).unwrap();
        let emb = one_hot_embedding(2, p);
        let mut h = cl.layer.h0.clone();
        let mut decoded = Vec::new();
        for &s in &[0usize, 0, 1] {
            let x = crate::ssm::real_vector(&emb[s]);
            let z = cl.layer.step(&mut h, &x, s).unwrap();
            let v = (-1..=1)
                .find(|&v| cl.value_atoms(0, v, p).iter().all(|a| {
                    Predicate::new(vec![a.clone()]).holds(&z).unwrap()
                }))
                .unwrap();
            decoded.push(v);
        }
        // counts 1, 2, 1 clip to 1, 1, 1
        assert_eq!(decoded, vec![1, 1, 1]);
    }

    #[test]
    fn zero_increments_decode_zero_everywhere() {
        let p = 8;
        let u = vec![vec![0i64], vec![0]];
        let cl = compile_counter(&u, 1, p).unwrap();
        let emb = one_hot_embedding(2, p);
        let mut h = cl.layer.h0.clone();
        for &s in &[0usize, 1, 1, 0] {
            let x = crate::ssm::real_vector(&emb[s]);
            let z = cl.layer.step(&mut h, &x, s).unwrap();
            for a in cl.value_atoms(0, 0, p) {
                assert!(Predicate::new(vec![a]).holds(&z).unwrap());
            }
        }
    }

    #[test]
    fn anbncn_uses_the_two_counter_assignment() {
        let u = counter_assignment(LanguageSpec::AnBnCn, 3).unwrap();
        assert_eq!(u, vec![vec![1, 0], vec![-1, 1], vec![0, -1]]);
    }

    #[test]
    fn compiled_counter_models_match_oracles() {
        let p = 8;
        for spec in [
            LanguageSpec::Dyck1,
            LanguageSpec::ShuffleDyck(2),
            LanguageSpec::Boolean(3),
            LanguageSpec::AnBn,
            LanguageSpec::AnBnCn,
            LanguageSpec::AnBnCnDn,
        ] {
            let model = compile_counter_language(spec, p).unwrap();
            let lang = Language::new(spec);
            let samples =
                generate_samples(&lang, &SampleOptions::new(1, 60, 60, 5)).unwrap();
            for (word, expect) in samples {
                match run_model_opts(&model, &word, true).unwrap() {
                    Outputs::Labels(got) => assert_eq!(got, expect, "{spec}"),
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn counter_model_flags_are_nonnegative_and_time_invariant() {
        let model = compile_counter_language(LanguageSpec::Dyck1, 8).unwrap();
        assert!(model.flags.nonnegative);
        assert!(model.flags.time_invariant);
        model.check_flags().unwrap();
    }

    #[test]
    fn aabbccdd_labels_match() {
        let p = 8;
        let model = compile_counter_language(LanguageSpec::AnBnCnDn, p).unwrap();
        let lang = Language::new(LanguageSpec::AnBnCnDn);
        let word = lang.alphabet.parse_word("a a b b c c d d").unwrap();
        let expect = lang.labels_along(&word).unwrap();
        match run_model_opts(&model, &word, true).unwrap() {
            Outputs::Labels(got) => assert_eq!(got, expect),
            _ => unreachable!(),
        }
    }
}
