//! Seeded word generators. Every emitted word is a member of its language;
//! labels come from the oracle. Deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alphabet::{LanguageError, PredictiveLabel, Word};
use super::catalog::{Language, LanguageSpec};
use super::dfa::Dfa;

/// Instruction mix for the Flip-Flop generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipFlopMode {
    /// p_i = 0.8, p_w = 0.1, p_r = 0.1
    InDistribution,
    /// p_i = 0.98, p_w = 0.01, p_r = 0.01
    Sparse,
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub min_len: usize,
    pub max_len: usize,
    pub count: usize,
    pub seed: u64,
    pub flip_flop_mode: FlipFlopMode,
}

impl SampleOptions {
    pub fn new(min_len: usize, max_len: usize, count: usize, seed: u64) -> Self {
        SampleOptions { min_len, max_len, count, seed, flip_flop_mode: FlipFlopMode::InDistribution }
    }

    pub fn with_mode(mut self, mode: FlipFlopMode) -> Self {
        self.flip_flop_mode = mode;
        self
    }
}

/// Words with their per-position oracle labels.
pub fn generate_samples(
    lang: &Language,
    opts: &SampleOptions,
) -> Result<Vec<(Word, Vec<PredictiveLabel>)>, LanguageError> {
    let words = generate_words(lang, opts)?;
    words
        .into_iter()
        .map(|w| {
            let labels = lang.labels_along(&w)?;
            Ok((w, labels))
        })
        .collect()
}

/// Words only (no labels).
pub fn generate_words(lang: &Language, opts: &SampleOptions) -> Result<Vec<Word>, LanguageError> {
    assert!(opts.count >= 1, "sample count must be at least 1");
    assert!(opts.min_len <= opts.max_len);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.count);
    match lang.spec {
        LanguageSpec::FlipFlop => {
            let lens: Vec<usize> =
                (opts.min_len..=opts.max_len).filter(|l| l % 2 == 0 && *l > 0).collect();
            if lens.is_empty() {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let len = lens[rng.gen_range(0..lens.len())];
                out.push(flip_flop_word(lang, len, opts.flip_flop_mode, &mut rng));
            }
        }
        LanguageSpec::Dyck1 | LanguageSpec::ShuffleDyck(_) => {
            let k = lang.alphabet.len() / 2;
            let lens: Vec<usize> =
                (opts.min_len..=opts.max_len).filter(|l| l % 2 == 0 && *l > 0).collect();
            if lens.is_empty() {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let len = lens[rng.gen_range(0..lens.len())];
                out.push(shuffle_word(k, len, &mut rng));
            }
        }
        LanguageSpec::Boolean(m) => {
            if opts.max_len == 0 {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let len = rng.gen_range(opts.min_len.max(1)..=opts.max_len);
                out.push(boolean_word(m as i64, len, &mut rng));
            }
        }
        LanguageSpec::AnBn | LanguageSpec::AnBnCn | LanguageSpec::AnBnCnDn => {
            let blocks = lang.alphabet.len();
            let ns: Vec<usize> = (1..=opts.max_len / blocks)
                .filter(|n| n * blocks >= opts.min_len && n * blocks <= opts.max_len)
                .collect();
            if ns.is_empty() {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let n = ns[rng.gen_range(0..ns.len())];
                let mut w = Word::new();
                for b in 0..blocks {
                    w.extend(std::iter::repeat(b).take(n));
                }
                out.push(w);
            }
        }
        LanguageSpec::BoundedDyck { k, h } => {
            let lens: Vec<usize> =
                (opts.min_len..=opts.max_len).filter(|l| l % 2 == 0 && *l > 0).collect();
            if lens.is_empty() {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let len = lens[rng.gen_range(0..lens.len())];
                out.push(bounded_dyck_word(k as usize, h as usize, len, &mut rng));
            }
        }
        _ => {
            // regular members: random walk on the DFA restricted to states
            // that can still finish within the remaining budget
            let dfa = lang.dfa().expect("regular catalog member");
            let feasible = feasible_lengths(dfa, opts.max_len);
            let lens: Vec<usize> = (opts.min_len..=opts.max_len)
                .filter(|&l| feasible[l][dfa.start])
                .collect();
            if lens.is_empty() {
                return Err(LanguageError::EmptyLengthRange);
            }
            for _ in 0..opts.count {
                let len = lens[rng.gen_range(0..lens.len())];
                out.push(dfa_walk(dfa, &feasible, len, &mut rng));
            }
        }
    }
    Ok(out)
}

/// feasible[len][q]: an accepting state is reachable from q in exactly len steps.
fn feasible_lengths(dfa: &Dfa, max_len: usize) -> Vec<Vec<bool>> {
    let mut table = vec![vec![false; dfa.num_states]; max_len + 1];
    for q in 0..dfa.num_states {
        table[0][q] = dfa.accepting[q];
    }
    for len in 1..=max_len {
        for q in 0..dfa.num_states {
            table[len][q] = dfa.trans[q].iter().any(|&t| table[len - 1][t]);
        }
    }
    table
}

fn dfa_walk(dfa: &Dfa, feasible: &[Vec<bool>], len: usize, rng: &mut ChaCha8Rng) -> Word {
    let mut q = dfa.start;
    let mut word = Word::with_capacity(len);
    for rem in (1..=len).rev() {
        let options: Vec<usize> = (0..dfa.alphabet.len())
            .filter(|&s| feasible[rem - 1][dfa.trans[q][s]])
            .collect();
        let s = options[rng.gen_range(0..options.len())];
        q = dfa.trans[q][s];
        word.push(s);
    }
    word
}

fn flip_flop_word(lang: &Language, len: usize, mode: FlipFlopMode, rng: &mut ChaCha8Rng) -> Word {
    let (p_w, p_r) = match mode {
        FlipFlopMode::InDistribution => (0.1, 0.1),
        FlipFlopMode::Sparse => (0.01, 0.01),
    };
    let w = lang.alphabet.id("w").unwrap();
    let r = lang.alphabet.id("r").unwrap();
    let i = lang.alphabet.id("i").unwrap();
    let zero = lang.alphabet.id("0").unwrap();
    let one = lang.alphabet.id("1").unwrap();
    let mut word = Word::with_capacity(len);
    let mut stored: Option<usize> = None;
    for _ in 0..len / 2 {
        let x: f64 = rng.gen();
        let instr = if x < p_w {
            w
        } else if x < p_w + p_r {
            r
        } else {
            i
        };
        word.push(instr);
        let bit = if instr == r {
            stored.unwrap_or_else(|| if rng.gen::<bool>() { one } else { zero })
        } else if rng.gen::<bool>() {
            one
        } else {
            zero
        };
        if instr == w {
            stored = Some(bit);
        }
        word.push(bit);
    }
    word
}

fn shuffle_word(k: usize, len: usize, rng: &mut ChaCha8Rng) -> Word {
    let mut counts = vec![0usize; k];
    let mut total = 0usize;
    let mut word = Word::with_capacity(len);
    for rem in (1..=len).rev() {
        // open_i is legal when the remaining budget still allows closing
        // everything; close_i when counter i is positive
        let can_open = total + 2 <= rem;
        let mut options: Vec<usize> = Vec::with_capacity(2 * k);
        for t in 0..k {
            if can_open {
                options.push(2 * t);
            }
            if counts[t] > 0 {
                options.push(2 * t + 1);
            }
        }
        let s = options[rng.gen_range(0..options.len())];
        if s % 2 == 0 {
            counts[s / 2] += 1;
            total += 1;
        } else {
            counts[s / 2] -= 1;
            total -= 1;
        }
        word.push(s);
    }
    word
}

fn boolean_word(max_arity: i64, len: usize, rng: &mut ChaCha8Rng) -> Word {
    // token 0 is "val", token n is "opN"
    let mut needed: i64 = 1;
    let mut word = Word::with_capacity(len);
    for rem in (1..=len).rev() {
        let rem = rem as i64 - 1;
        let mut options: Vec<usize> = Vec::new();
        let after_val = needed - 1;
        if (after_val == 0 && rem == 0) || (after_val > 0 && rem >= after_val) {
            options.push(0);
        }
        for n in 1..=max_arity {
            let after = needed + n - 1;
            if rem >= after && after > 0 {
                options.push(n as usize);
            }
        }
        let s = options[rng.gen_range(0..options.len())];
        needed += if s == 0 { -1 } else { s as i64 - 1 };
        word.push(s);
    }
    word
}

fn bounded_dyck_word(k: usize, h: usize, len: usize, rng: &mut ChaCha8Rng) -> Word {
    let mut stack: Vec<usize> = Vec::new();
    let mut word = Word::with_capacity(len);
    for rem in (1..=len).rev() {
        let can_open = stack.len() < h && stack.len() + 2 <= rem;
        let mut options: Vec<usize> = Vec::new();
        if can_open {
            for t in 0..k {
                options.push(2 * t);
            }
        }
        if let Some(&top) = stack.last() {
            options.push(2 * top + 1);
        }
        let s = options[rng.gen_range(0..options.len())];
        if s % 2 == 0 {
            stack.push(s / 2);
        } else {
            stack.pop();
        }
        word.push(s);
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_members_with_oracle_labels() {
        for spec in [
            LanguageSpec::Tomita(4),
            LanguageSpec::Dn(3),
            LanguageSpec::ZeroTwoStar,
            LanguageSpec::FlipFlop,
            LanguageSpec::Dyck1,
            LanguageSpec::ShuffleDyck(2),
            LanguageSpec::Boolean(3),
            LanguageSpec::AnBnCn,
            LanguageSpec::BoundedDyck { k: 2, h: 3 },
        ] {
            let lang = Language::new(spec);
            let opts = SampleOptions::new(1, 30, 50, 7);
            let samples = generate_samples(&lang, &opts).unwrap();
            assert_eq!(samples.len(), 50);
            for (w, labels) in &samples {
                assert!(lang.contains(w), "{spec} emitted non-member");
                assert_eq!(labels.len(), w.len());
                assert!(labels.last().unwrap().eos());
            }
        }
    }

    #[test]
    fn same_seed_same_output() {
        let lang = Language::new(LanguageSpec::Dyck1);
        let opts = SampleOptions::new(1, 40, 20, 99);
        let a = generate_samples(&lang, &opts).unwrap();
        let b = generate_samples(&lang, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn anbn_words_are_forced() {
        let lang = Language::new(LanguageSpec::AnBn);
        let opts = SampleOptions::new(1, 50, 40, 3);
        for (w, _) in generate_samples(&lang, &opts).unwrap() {
            assert_eq!(w.len() % 2, 0);
            let n = w.len() / 2;
            assert!(w[..n].iter().all(|&s| s == 0) && w[n..].iter().all(|&s| s == 1));
        }
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let lang = Language::new(LanguageSpec::EvenA);
        // (aa)* has no words of odd length
        let opts = SampleOptions::new(3, 3, 5, 0);
        assert_eq!(generate_words(&lang, &opts).unwrap_err(), LanguageError::EmptyLengthRange);
    }

    #[test]
    fn sparse_mix_instruction_fraction() {
        let lang = Language::new(LanguageSpec::FlipFlop);
        let opts = SampleOptions::new(512, 512, 1000, 11).with_mode(FlipFlopMode::Sparse);
        let words = generate_words(&lang, &opts).unwrap();
        let w_id = lang.alphabet.id("w").unwrap();
        let mut w_count = 0usize;
        let mut instr_count = 0usize;
        for word in &words {
            for (i, &s) in word.iter().enumerate() {
                if i % 2 == 0 {
                    instr_count += 1;
                    if s == w_id {
                        w_count += 1;
                    }
                }
            }
        }
        let frac = w_count as f64 / instr_count as f64;
        assert!((frac - 0.01).abs() < 0.005, "w fraction {frac}");
    }
}
