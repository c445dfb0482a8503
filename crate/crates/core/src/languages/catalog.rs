//! The language catalog: Tomita grammars, D_n, regular-expression languages,
//! Flip-Flop, counter languages, and bounded-depth Dyck. Each member carries
//! an alphabet, an independent membership checker, a predictive-label oracle,
//! and (for regular members) a DFA.

use std::fmt;
use std::str::FromStr;

use super::alphabet::{Alphabet, LanguageError, PredictiveLabel, Word};
use super::dfa::Dfa;

/// Tagged identifier over the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LanguageSpec {
    Tomita(u8),
    Dn(u8),
    Parity,
    EvenA,
    QuadA,
    AbabStar,
    AStarChain,
    AbStarD,
    ZeroTwoStar,
    FlipFlop,
    Dyck1,
    ShuffleDyck(u8),
    Boolean(u8),
    AnBn,
    AnBnCn,
    AnBnCnDn,
    BoundedDyck { k: u32, h: u32 },
}

impl fmt::Display for LanguageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageSpec::Tomita(n) => write!(f, "tomita{n}"),
            LanguageSpec::Dn(n) => write!(f, "d{n}"),
            LanguageSpec::Parity => write!(f, "parity"),
            LanguageSpec::EvenA => write!(f, "evena"),
            LanguageSpec::QuadA => write!(f, "quada"),
            LanguageSpec::AbabStar => write!(f, "ababstar"),
            LanguageSpec::AStarChain => write!(f, "astarchain"),
            LanguageSpec::AbStarD => write!(f, "abstard"),
            LanguageSpec::ZeroTwoStar => write!(f, "zerotwostar"),
            LanguageSpec::FlipFlop => write!(f, "flipflop"),
            LanguageSpec::Dyck1 => write!(f, "dyck1"),
            LanguageSpec::ShuffleDyck(k) => write!(f, "shuffle{k}"),
            LanguageSpec::Boolean(m) => write!(f, "boolean{m}"),
            LanguageSpec::AnBn => write!(f, "anbn"),
            LanguageSpec::AnBnCn => write!(f, "anbncn"),
            LanguageSpec::AnBnCnDn => write!(f, "anbncndn"),
            LanguageSpec::BoundedDyck { k, h } => write!(f, "bdyck-{k}-{h}"),
        }
    }
}

impl FromStr for LanguageSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        if let Some(n) = s.strip_prefix("tomita") {
            let n: u8 = n.parse().map_err(|_| format!("bad tomita index in {s:?}"))?;
            if (1..=7).contains(&n) {
                return Ok(LanguageSpec::Tomita(n));
            }
            return Err(format!("tomita index out of range in {s:?}"));
        }
        if let Some(n) = s.strip_prefix('d') {
            if let Ok(n) = n.parse::<u8>() {
                if n >= 1 {
                    return Ok(LanguageSpec::Dn(n));
                }
            }
        }
        if let Some(k) = s.strip_prefix("shuffle") {
            let k: u8 = k.parse().map_err(|_| format!("bad shuffle arity in {s:?}"))?;
            return Ok(LanguageSpec::ShuffleDyck(k));
        }
        if let Some(m) = s.strip_prefix("boolean") {
            let m: u8 = m.parse().map_err(|_| format!("bad boolean arity in {s:?}"))?;
            return Ok(LanguageSpec::Boolean(m));
        }
        match s.as_str() {
            "parity" => Ok(LanguageSpec::Parity),
            "evena" => Ok(LanguageSpec::EvenA),
            "quada" => Ok(LanguageSpec::QuadA),
            "ababstar" => Ok(LanguageSpec::AbabStar),
            "astarchain" => Ok(LanguageSpec::AStarChain),
            "abstard" => Ok(LanguageSpec::AbStarD),
            "zerotwostar" => Ok(LanguageSpec::ZeroTwoStar),
            "flipflop" => Ok(LanguageSpec::FlipFlop),
            "dyck1" => Ok(LanguageSpec::Dyck1),
            "anbn" => Ok(LanguageSpec::AnBn),
            "anbncn" => Ok(LanguageSpec::AnBnCn),
            "anbncndn" => Ok(LanguageSpec::AnBnCnDn),
            "bdyck" => Ok(LanguageSpec::BoundedDyck { k: 8, h: 10 }),
            _ => Err(format!("unknown language {s:?}")),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Regular { dfa: Dfa, labels: Vec<PredictiveLabel>, live: Vec<bool> },
    Counter(CounterKind),
    Stack { types: usize, depth: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CounterKind {
    Dyck1,
    Shuffle(usize),
    Boolean(usize),
    AnBn,
    AnBnCn,
    AnBnCnDn,
}

/// A catalog member, ready to answer membership and label queries.
#[derive(Clone, Debug)]
pub struct Language {
    pub spec: LanguageSpec,
    pub alphabet: Alphabet,
    kind: Kind,
}

/// Incremental oracle state; one `step` per symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleState {
    Regular { state: usize, dead: bool },
    FlipFlop { expect_bit: bool, pending: Option<usize>, stored: Option<usize>, dead: bool },
    Counter { counts: Vec<i64>, last: Option<usize>, dead: bool },
    Stack { stack: Vec<usize>, dead: bool },
}

impl Language {
    pub fn new(spec: LanguageSpec) -> Self {
        let (alphabet, kind) = build(spec);
        Language { spec, alphabet, kind }
    }

    pub fn dfa(&self) -> Option<&Dfa> {
        match &self.kind {
            Kind::Regular { dfa, .. } => Some(dfa),
            _ => None,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.dfa().is_some()
    }

    /// Independent membership check, written from the language definition
    /// rather than the DFA (the two are compared in tests).
    pub fn contains(&self, word: &[usize]) -> bool {
        let names: Vec<&str> = word.iter().map(|&s| self.alphabet.name(s)).collect();
        match self.spec {
            LanguageSpec::Tomita(1) => names.iter().all(|&c| c == "1"),
            LanguageSpec::Tomita(2) => {
                names.len() % 2 == 0 && names.chunks(2).all(|p| p == ["1", "0"])
            }
            LanguageSpec::Tomita(3) => !tomita3_violation(&names),
            LanguageSpec::Tomita(4) => !names.windows(3).any(|w| w == ["0", "0", "0"]),
            LanguageSpec::Tomita(5) => {
                names.len() % 2 == 0 && names.iter().filter(|&&c| c == "1").count() % 2 == 0
            }
            LanguageSpec::Tomita(6) => {
                let zeros = names.iter().filter(|&&c| c == "0").count() as i64;
                let ones = names.len() as i64 - zeros;
                (zeros - ones).rem_euclid(3) == 0
            }
            LanguageSpec::Tomita(7) => {
                // 0*1*0*1*: the run pattern embeds into [0,1,0,1]
                let mut runs: Vec<&str> = Vec::new();
                for &c in &names {
                    if runs.last() != Some(&c) {
                        runs.push(c);
                    }
                }
                matches!(
                    runs.as_slice(),
                    [] | ["0"] | ["1"] | ["0", "1"] | ["1", "0"] | ["0", "1", "0"]
                        | ["1", "0", "1"] | ["0", "1", "0", "1"]
                )
            }
            LanguageSpec::Tomita(_) => unreachable!(),
            LanguageSpec::Dn(n) => balanced_with_depth(&names, "a", "b", n as i64),
            LanguageSpec::Parity => names.iter().filter(|&&c| c == "1").count() % 2 == 0,
            LanguageSpec::EvenA => names.len() % 2 == 0,
            LanguageSpec::QuadA => names.len() % 4 == 0,
            LanguageSpec::AbabStar => {
                names.len() % 4 == 0 && names.chunks(4).all(|c| c == ["a", "b", "a", "b"])
            }
            LanguageSpec::AStarChain => {
                let mut runs: Vec<(&str, usize)> = Vec::new();
                for &c in &names {
                    match runs.last_mut() {
                        Some((r, n)) if *r == c => *n += 1,
                        _ => runs.push((c, 1)),
                    }
                }
                runs.len() == 5 && runs.iter().map(|(r, _)| *r).eq(["a", "b", "c", "d", "e"])
            }
            LanguageSpec::AbStarD => {
                match names.iter().position(|&c| c == "d") {
                    None => false,
                    Some(i) => {
                        names[..i].iter().all(|&c| c == "a" || c == "b")
                            && names[i + 1..].iter().all(|&c| c == "b" || c == "c")
                    }
                }
            }
            LanguageSpec::ZeroTwoStar => {
                let trimmed: Vec<&&str> = names.iter().rev().skip_while(|&&c| c == "2").collect();
                trimmed.first().map_or(false, |&&c| c == "0")
            }
            LanguageSpec::FlipFlop => flip_flop_member(&names),
            LanguageSpec::Dyck1 => balanced_with_depth(&names, "(", ")", i64::MAX),
            LanguageSpec::ShuffleDyck(k) => {
                let mut counts = vec![0i64; k as usize];
                for &c in &names {
                    let (open, idx) = bracket_index(c);
                    if open {
                        counts[idx] += 1;
                    } else {
                        counts[idx] -= 1;
                        if counts[idx] < 0 {
                            return false;
                        }
                    }
                }
                counts.iter().all(|&c| c == 0)
            }
            LanguageSpec::Boolean(_) => {
                let mut needed: i64 = 1;
                for &c in &names {
                    if needed == 0 {
                        return false;
                    }
                    needed += token_arity(c) - 1;
                }
                needed == 0
            }
            LanguageSpec::AnBn => block_word(&names, &["a", "b"]),
            LanguageSpec::AnBnCn => block_word(&names, &["a", "b", "c"]),
            LanguageSpec::AnBnCnDn => block_word(&names, &["a", "b", "c", "d"]),
            LanguageSpec::BoundedDyck { h, .. } => {
                let mut stack: Vec<usize> = Vec::new();
                for &c in &names {
                    let (open, idx) = bracket_index(c);
                    if open {
                        stack.push(idx);
                        if stack.len() > h as usize {
                            return false;
                        }
                    } else if stack.pop() != Some(idx) {
                        return false;
                    }
                }
                stack.is_empty()
            }
        }
    }

    pub fn start_state(&self) -> OracleState {
        match (&self.kind, self.spec) {
            (_, LanguageSpec::FlipFlop) => {
                OracleState::FlipFlop { expect_bit: false, pending: None, stored: None, dead: false }
            }
            (Kind::Regular { dfa, .. }, _) => OracleState::Regular { state: dfa.start, dead: false },
            (Kind::Counter(kind), _) => {
                let c = match kind {
                    CounterKind::Dyck1 => 1,
                    CounterKind::Shuffle(k) => *k,
                    CounterKind::Boolean(_) => 1,
                    CounterKind::AnBn => 1,
                    CounterKind::AnBnCn => 2,
                    CounterKind::AnBnCnDn => 3,
                };
                let counts = match kind {
                    // the Boolean counter starts at 1: pending subexpressions
                    CounterKind::Boolean(_) => vec![1],
                    _ => vec![0; c],
                };
                OracleState::Counter { counts, last: None, dead: false }
            }
            (Kind::Stack { .. }, _) => OracleState::Stack { stack: Vec::new(), dead: false },
        }
    }

    /// Exact label by direct simulation. Errors if the tracked prefix has
    /// left the language's prefix set.
    pub fn label(&self, state: &OracleState) -> Result<PredictiveLabel, LanguageError> {
        match (state, &self.kind) {
            (OracleState::Regular { dead: true, .. }, _)
            | (OracleState::FlipFlop { dead: true, .. }, _)
            | (OracleState::Counter { dead: true, .. }, _)
            | (OracleState::Stack { dead: true, .. }, _) => Err(LanguageError::InvalidPrefix),
            (OracleState::Regular { state, .. }, Kind::Regular { labels, live, .. }) => {
                if !live[*state] {
                    return Err(LanguageError::InvalidPrefix);
                }
                Ok(labels[*state])
            }
            (OracleState::FlipFlop { expect_bit, pending, stored, .. }, _) => {
                let mut l = PredictiveLabel::empty();
                if !expect_bit {
                    // any instruction may come next; prefix so far is a member
                    for instr in ["w", "r", "i"] {
                        l.insert(self.alphabet.id(instr).unwrap());
                    }
                    l.set_eos(true);
                } else {
                    let zero = self.alphabet.id("0").unwrap();
                    let one = self.alphabet.id("1").unwrap();
                    match (pending, stored) {
                        (Some(p), Some(b)) if self.alphabet.name(*p) == "r" => l.insert(*b),
                        _ => {
                            l.insert(zero);
                            l.insert(one);
                        }
                    }
                }
                Ok(l)
            }
            (OracleState::Counter { counts, last, .. }, Kind::Counter(kind)) => {
                Ok(self.counter_label(*kind, counts, *last))
            }
            (OracleState::Stack { stack, .. }, Kind::Stack { types, depth }) => {
                let mut l = PredictiveLabel::empty();
                if stack.len() < *depth {
                    for i in 0..*types {
                        l.insert(2 * i);
                    }
                }
                if let Some(&top) = stack.last() {
                    l.insert(2 * top + 1);
                }
                l.set_eos(stack.is_empty());
                Ok(l)
            }
            _ => unreachable!("oracle state does not match language kind"),
        }
    }

    fn counter_label(&self, kind: CounterKind, counts: &[i64], last: Option<usize>) -> PredictiveLabel {
        let mut l = PredictiveLabel::empty();
        let name = |id: usize| self.alphabet.name(id);
        match kind {
            CounterKind::Dyck1 => {
                l.insert(0); // "(" always allowed
                if counts[0] > 0 {
                    l.insert(1);
                }
                l.set_eos(counts[0] == 0);
            }
            CounterKind::Shuffle(k) => {
                for i in 0..k {
                    l.insert(2 * i);
                    if counts[i] > 0 {
                        l.insert(2 * i + 1);
                    }
                }
                l.set_eos(counts.iter().all(|&c| c == 0));
            }
            CounterKind::Boolean(_) => {
                if counts[0] == 0 {
                    l.set_eos(true);
                } else {
                    for s in 0..self.alphabet.len() {
                        l.insert(s);
                    }
                }
            }
            CounterKind::AnBn | CounterKind::AnBnCn | CounterKind::AnBnCnDn => {
                let phases: &[&str] = match kind {
                    CounterKind::AnBn => &["a", "b"],
                    CounterKind::AnBnCn => &["a", "b", "c"],
                    _ => &["a", "b", "c", "d"],
                };
                match last {
                    None => l.insert(self.alphabet.id("a").unwrap()),
                    Some(cur) => {
                        let phase = phases.iter().position(|&p| p == name(cur)).unwrap();
                        if phase == 0 {
                            // still in the a-block
                            l.insert(cur);
                            l.insert(self.alphabet.id(phases[1]).unwrap());
                        } else if counts[phase - 1] > 0 {
                            l.insert(cur);
                        } else if phase + 1 < phases.len() {
                            l.insert(self.alphabet.id(phases[phase + 1]).unwrap());
                        } else {
                            l.set_eos(true);
                        }
                        // final block exhausted its counter: word complete
                        if phase == phases.len() - 1 && counts[phase - 1] == 0 {
                            l.set_eos(true);
                        }
                    }
                }
            }
        }
        l
    }

    /// Advance the oracle; stepping outside the valid-prefix set marks the
    /// state dead and later label queries fail.
    pub fn step(&self, state: &mut OracleState, symbol: usize) -> Result<(), LanguageError> {
        if symbol >= self.alphabet.len() {
            return Err(LanguageError::OutOfAlphabet(format!("#{symbol}")));
        }
        let legal = self.label(state).map(|l| l.contains(symbol)).unwrap_or(false);
        match (state, &self.kind) {
            (OracleState::Regular { state, dead }, Kind::Regular { dfa, live, .. }) => {
                *state = dfa.step(*state, symbol);
                *dead = *dead || !live[*state];
            }
            (OracleState::FlipFlop { expect_bit, pending, stored, dead }, _) => {
                *dead = *dead || !legal;
                if !*expect_bit {
                    *pending = Some(symbol);
                    *expect_bit = true;
                } else {
                    if pending.map(|p| self.alphabet.name(p) == "w").unwrap_or(false) {
                        *stored = Some(symbol);
                    }
                    *pending = None;
                    *expect_bit = false;
                }
            }
            (OracleState::Counter { counts, last, dead }, Kind::Counter(kind)) => {
                *dead = *dead || !legal;
                let name = self.alphabet.name(symbol);
                match kind {
                    CounterKind::Dyck1 => counts[0] += if name == "(" { 1 } else { -1 },
                    CounterKind::Shuffle(_) => {
                        let (open, idx) = bracket_index(name);
                        counts[idx] += if open { 1 } else { -1 };
                    }
                    CounterKind::Boolean(_) => counts[0] += token_arity(name) - 1,
                    CounterKind::AnBn | CounterKind::AnBnCn | CounterKind::AnBnCnDn => {
                        match name {
                            "a" => counts[0] += 1,
                            "b" => {
                                counts[0] -= 1;
                                if counts.len() > 1 {
                                    counts[1] += 1;
                                }
                            }
                            "c" => {
                                counts[1] -= 1;
                                if counts.len() > 2 {
                                    counts[2] += 1;
                                }
                            }
                            "d" => counts[2] -= 1,
                            _ => unreachable!(),
                        }
                    }
                }
                *last = Some(symbol);
            }
            (OracleState::Stack { stack, dead }, Kind::Stack { .. }) => {
                *dead = *dead || !legal;
                if !*dead {
                    let (open, idx) = bracket_index(self.alphabet.name(symbol));
                    if open {
                        stack.push(idx);
                    } else {
                        stack.pop();
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    /// Label of a given prefix, by simulation from the start.
    pub fn prefix_label(&self, prefix: &[usize]) -> Result<PredictiveLabel, LanguageError> {
        let mut st = self.start_state();
        for &s in prefix {
            self.step(&mut st, s)?;
        }
        self.label(&st)
    }

    /// Per-position labels along a word: label(w[..1]), ..., label(w).
    pub fn labels_along(&self, word: &[usize]) -> Result<Vec<PredictiveLabel>, LanguageError> {
        let mut st = self.start_state();
        let mut out = Vec::with_capacity(word.len());
        for &s in word {
            self.step(&mut st, s)?;
            out.push(self.label(&st)?);
        }
        Ok(out)
    }

    /// All valid prefixes up to the given length (DFS over the label tree).
    pub fn valid_prefixes(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack = vec![(self.start_state(), Word::new())];
        while let Some((st, prefix)) = stack.pop() {
            if prefix.len() >= max_len {
                continue;
            }
            let label = match self.label(&st) {
                Ok(l) => l,
                Err(_) => continue,
            };
            for s in label.symbols() {
                if s >= self.alphabet.len() {
                    continue;
                }
                let mut st2 = st.clone();
                self.step(&mut st2, s).unwrap();
                let mut p2 = prefix.clone();
                p2.push(s);
                out.push(p2.clone());
                stack.push((st2, p2));
            }
        }
        out
    }
}

fn tomita3_violation(names: &[&str]) -> bool {
    // some maximal odd run of 1s immediately followed by a maximal odd run of 0s
    let n = names.len();
    for i in 0..n {
        if names[i] != "1" || (i > 0 && names[i - 1] == "1") {
            continue;
        }
        let mut j = i;
        while j < n && names[j] == "1" {
            j += 1;
        }
        if (j - i) % 2 == 0 || j == n || names[j] != "0" {
            continue;
        }
        let mut k = j;
        while k < n && names[k] == "0" {
            k += 1;
        }
        if (k - j) % 2 == 1 {
            return true;
        }
    }
    false
}

fn balanced_with_depth(names: &[&str], open: &str, close: &str, max_depth: i64) -> bool {
    let mut depth = 0i64;
    for &c in names {
        if c == open {
            depth += 1;
            if depth > max_depth {
                return false;
            }
        } else if c == close {
            depth -= 1;
            if depth < 0 {
                return false;
            }
        } else {
            return false;
        }
    }
    depth == 0
}

fn flip_flop_member(names: &[&str]) -> bool {
    if names.len() % 2 != 0 {
        return false;
    }
    let mut stored: Option<&str> = None;
    for pair in names.chunks(2) {
        let (instr, bit) = (pair[0], pair[1]);
        if !["w", "r", "i"].contains(&instr) || !["0", "1"].contains(&bit) {
            return false;
        }
        match instr {
            "w" => stored = Some(bit),
            "r" => {
                if let Some(b) = stored {
                    if b != bit {
                        return false;
                    }
                }
            }
            _ => {}
        }
    }
    true
}

fn block_word(names: &[&str], blocks: &[&str]) -> bool {
    if names.is_empty() {
        return false;
    }
    let n = names.len() / blocks.len();
    if n * blocks.len() != names.len() || n == 0 {
        return false;
    }
    names
        .chunks(n)
        .zip(blocks)
        .all(|(chunk, &b)| chunk.iter().all(|&c| c == b))
}

/// ("(3", true, 2) style decoding of bracket tokens "(i" / ")i" (1-based i).
fn bracket_index(name: &str) -> (bool, usize) {
    if name == "(" {
        return (true, 0);
    }
    if name == ")" {
        return (false, 0);
    }
    let open = name.starts_with('(');
    let idx: usize = name[1..].parse().expect("bracket token");
    (open, idx - 1)
}

/// Arity of a Boolean-expression token: "val" consumes one pending slot,
/// "opN" consumes one and opens N.
fn token_arity(name: &str) -> i64 {
    if name == "val" {
        0
    } else {
        name[2..].parse::<i64>().expect("operator token")
    }
}

fn bracket_alphabet(k: usize) -> Alphabet {
    if k == 1 {
        return Alphabet::new(["(", ")"]).unwrap();
    }
    let mut symbols = Vec::with_capacity(2 * k);
    for i in 1..=k {
        symbols.push(format!("({i}"));
        symbols.push(format!("){i}"));
    }
    Alphabet::new(symbols).unwrap()
}

fn build(spec: LanguageSpec) -> (Alphabet, Kind) {
    match spec {
        LanguageSpec::Tomita(n) => {
            let al = Alphabet::new(["0", "1"]).unwrap();
            let dfa = tomita_dfa(n, al.clone());
            (al, regular(dfa))
        }
        LanguageSpec::Dn(n) => {
            let al = Alphabet::new(["a", "b"]).unwrap();
            let dfa = depth_counter_dfa(al.clone(), n as usize);
            (al, regular(dfa))
        }
        LanguageSpec::Parity => {
            let al = Alphabet::new(["0", "1"]).unwrap();
            let dfa = Dfa::new(al.clone(), 2, 0, vec![vec![0, 1], vec![1, 0]], vec![true, false]);
            (al, regular(dfa))
        }
        LanguageSpec::EvenA => {
            let al = Alphabet::new(["a"]).unwrap();
            let dfa = Dfa::new(al.clone(), 2, 0, vec![vec![1], vec![0]], vec![true, false]);
            (al, regular(dfa))
        }
        LanguageSpec::QuadA => {
            let al = Alphabet::new(["a"]).unwrap();
            let dfa = Dfa::new(
                al.clone(),
                4,
                0,
                vec![vec![1], vec![2], vec![3], vec![0]],
                vec![true, false, false, false],
            );
            (al, regular(dfa))
        }
        LanguageSpec::AbabStar => {
            let al = Alphabet::new(["a", "b"]).unwrap();
            let dfa = Dfa::new(
                al.clone(),
                5,
                0,
                vec![vec![1, 4], vec![4, 2], vec![3, 4], vec![4, 0], vec![4, 4]],
                vec![true, false, false, false, false],
            );
            (al, regular(dfa))
        }
        LanguageSpec::AStarChain => {
            let al = Alphabet::new(["a", "b", "c", "d", "e"]).unwrap();
            let d = 6usize; // dead
            let trans = vec![
                vec![1, d, d, d, d],
                vec![1, 2, d, d, d],
                vec![d, 2, 3, d, d],
                vec![d, d, 3, 4, d],
                vec![d, d, d, 4, 5],
                vec![d, d, d, d, 5],
                vec![d, d, d, d, d],
            ];
            let acc = vec![false, false, false, false, false, true, false];
            let dfa = Dfa::new(al.clone(), 7, 0, trans, acc);
            (al, regular(dfa))
        }
        LanguageSpec::AbStarD => {
            let al = Alphabet::new(["a", "b", "c", "d"]).unwrap();
            let trans = vec![vec![0, 0, 2, 1], vec![2, 1, 1, 2], vec![2, 2, 2, 2]];
            let dfa = Dfa::new(al.clone(), 3, 0, trans, vec![false, true, false]);
            (al, regular(dfa))
        }
        LanguageSpec::ZeroTwoStar => {
            let al = Alphabet::new(["0", "1", "2"]).unwrap();
            let trans = vec![vec![1, 0, 0], vec![1, 0, 1]];
            let dfa = Dfa::new(al.clone(), 2, 0, trans, vec![false, true]);
            (al, regular(dfa))
        }
        LanguageSpec::FlipFlop => {
            let al = Alphabet::new(["w", "r", "i", "0", "1"]).unwrap();
            (al.clone(), regular(flip_flop_dfa(al)))
        }
        LanguageSpec::Dyck1 => (bracket_alphabet(1), Kind::Counter(CounterKind::Dyck1)),
        LanguageSpec::ShuffleDyck(k) => {
            (bracket_alphabet(k as usize), Kind::Counter(CounterKind::Shuffle(k as usize)))
        }
        LanguageSpec::Boolean(m) => {
            let mut symbols = vec!["val".to_string()];
            for n in 1..=m {
                symbols.push(format!("op{n}"));
            }
            (Alphabet::new(symbols).unwrap(), Kind::Counter(CounterKind::Boolean(m as usize)))
        }
        LanguageSpec::AnBn => {
            (Alphabet::new(["a", "b"]).unwrap(), Kind::Counter(CounterKind::AnBn))
        }
        LanguageSpec::AnBnCn => {
            (Alphabet::new(["a", "b", "c"]).unwrap(), Kind::Counter(CounterKind::AnBnCn))
        }
        LanguageSpec::AnBnCnDn => {
            (Alphabet::new(["a", "b", "c", "d"]).unwrap(), Kind::Counter(CounterKind::AnBnCnDn))
        }
        LanguageSpec::BoundedDyck { k, h } => {
            (bracket_alphabet(k as usize), Kind::Stack { types: k as usize, depth: h as usize })
        }
    }
}

fn regular(dfa: Dfa) -> Kind {
    let labels = dfa.state_labels();
    let live = dfa.live_states();
    Kind::Regular { dfa, labels, live }
}

fn tomita_dfa(n: u8, al: Alphabet) -> Dfa {
    match n {
        1 => Dfa::new(al, 2, 0, vec![vec![1, 0], vec![1, 1]], vec![true, false]),
        2 => Dfa::new(al, 3, 0, vec![vec![2, 1], vec![0, 2], vec![2, 2]], vec![true, false, false]),
        3 => {
            // states: S, O1 (odd 1-run), Dodd, Deven (0-run after odd 1-run), trap
            let trans = vec![
                vec![0, 1], // S
                vec![2, 0], // O1
                vec![3, 4], // Dodd
                vec![2, 1], // Deven
                vec![4, 4], // trap
            ];
            Dfa::new(al, 5, 0, trans, vec![true, true, false, true, false])
        }
        4 => {
            let trans = vec![vec![1, 0], vec![2, 0], vec![3, 0], vec![3, 3]];
            Dfa::new(al, 4, 0, trans, vec![true, true, true, false])
        }
        5 => {
            let trans = vec![vec![1, 2], vec![0, 3], vec![3, 0], vec![2, 1]];
            Dfa::new(al, 4, 0, trans, vec![true, false, false, false])
        }
        6 => {
            let trans = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
            Dfa::new(al, 3, 0, trans, vec![true, false, false])
        }
        7 => {
            let trans = vec![vec![0, 1], vec![2, 1], vec![2, 3], vec![4, 3], vec![4, 4]];
            Dfa::new(al, 5, 0, trans, vec![true, true, true, true, false])
        }
        _ => unreachable!(),
    }
}

fn depth_counter_dfa(al: Alphabet, max_depth: usize) -> Dfa {
    // states 0..=max_depth are depths, last state is dead
    let dead = max_depth + 1;
    let n = max_depth + 2;
    let mut trans = vec![vec![dead; 2]; n];
    for d in 0..=max_depth {
        trans[d][0] = if d + 1 <= max_depth { d + 1 } else { dead }; // a
        trans[d][1] = if d >= 1 { d - 1 } else { dead }; // b
    }
    let mut acc = vec![false; n];
    acc[0] = true;
    Dfa::new(al, n, 0, trans, acc)
}

fn flip_flop_dfa(al: Alphabet) -> Dfa {
    // states: 0..=2 complete-pair states (stored none/0/1), 3 expect-bit after w,
    // 4..=6 expect-bit after i (stored none/0/1), 7..=9 expect-bit after r, 10 dead
    let d = 10usize;
    let trans = vec![
        // w  r  i  0  1
        vec![3, 7, 4, d, d],  // I_none
        vec![3, 8, 5, d, d],  // I_0
        vec![3, 9, 6, d, d],  // I_1
        vec![d, d, d, 1, 2],  // W
        vec![d, d, d, 0, 0],  // i_none
        vec![d, d, d, 1, 1],  // i_0
        vec![d, d, d, 2, 2],  // i_1
        vec![d, d, d, 0, 0],  // r_none
        vec![d, d, d, 1, d],  // r_0
        vec![d, d, d, d, 2],  // r_1
        vec![d, d, d, d, d],  // dead
    ];
    let mut acc = vec![false; 11];
    acc[0] = true;
    acc[1] = true;
    acc[2] = true;
    Dfa::new(al, 11, 0, trans, acc)
}

/// The 18 regular members of the catalog (Flip-Flop aside), with their
/// star-free status.
pub fn regular_catalog() -> Vec<(LanguageSpec, bool)> {
    vec![
        (LanguageSpec::Tomita(1), true),
        (LanguageSpec::Tomita(2), true),
        (LanguageSpec::Tomita(3), false),
        (LanguageSpec::Tomita(4), true),
        (LanguageSpec::Tomita(5), false),
        (LanguageSpec::Tomita(6), false),
        (LanguageSpec::Tomita(7), true),
        (LanguageSpec::Dn(2), true),
        (LanguageSpec::Dn(3), true),
        (LanguageSpec::Dn(4), true),
        (LanguageSpec::Dn(12), true),
        (LanguageSpec::Parity, false),
        (LanguageSpec::EvenA, false),
        (LanguageSpec::QuadA, false),
        (LanguageSpec::AbabStar, false),
        (LanguageSpec::AStarChain, true),
        (LanguageSpec::AbStarD, true),
        (LanguageSpec::ZeroTwoStar, true),
    ]
}

/// The 11 star-free members compiled by the cascade pipeline.
pub fn star_free_catalog() -> Vec<LanguageSpec> {
    regular_catalog().into_iter().filter(|(_, sf)| *sf).map(|(s, _)| s).collect()
}

/// Counter-language members of the catalog.
pub fn counter_catalog() -> Vec<LanguageSpec> {
    vec![
        LanguageSpec::Dyck1,
        LanguageSpec::ShuffleDyck(2),
        LanguageSpec::ShuffleDyck(4),
        LanguageSpec::ShuffleDyck(6),
        LanguageSpec::Boolean(3),
        LanguageSpec::Boolean(5),
        LanguageSpec::AnBn,
        LanguageSpec::AnBnCn,
        LanguageSpec::AnBnCnDn,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(spec: LanguageSpec) -> Language {
        Language::new(spec)
    }

    fn words_up_to(alphabet: &Alphabet, len: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Vec::new()];
        let mut frontier: Vec<Word> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..alphabet.len() {
                    let mut w2 = w.clone();
                    w2.push(s);
                    out.push(w2.clone());
                    next.push(w2);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn dfa_agrees_with_membership_checkers() {
        for (spec, _) in regular_catalog() {
            let l = lang(spec);
            let dfa = l.dfa().unwrap();
            let max = match l.alphabet.len() {
                1 => 12,
                2 => 12,
                3 => 9,
                _ => 6,
            };
            for w in words_up_to(&l.alphabet, max) {
                assert_eq!(dfa.accepts(&w), l.contains(&w), "{spec} mismatch on {:?}", l.alphabet.render_word(&w));
            }
        }
    }

    #[test]
    fn flip_flop_dfa_agrees_with_membership() {
        let l = lang(LanguageSpec::FlipFlop);
        let dfa = l.dfa().unwrap();
        for w in words_up_to(&l.alphabet, 6) {
            assert_eq!(dfa.accepts(&w), l.contains(&w));
        }
    }

    #[test]
    fn tomita3_brute_scan_agrees_with_dfa() {
        let l = lang(LanguageSpec::Tomita(3));
        let dfa = l.dfa().unwrap();
        for w in words_up_to(&l.alphabet, 14) {
            let names: Vec<&str> = w.iter().map(|&s| l.alphabet.name(s)).collect();
            assert_eq!(dfa.accepts(&w), !tomita3_violation(&names), "on {names:?}");
        }
    }

    #[test]
    fn tomita4_rejects_triple_zero() {
        let l = lang(LanguageSpec::Tomita(4));
        let dfa = l.dfa().unwrap();
        let w = l.alphabet.parse_word("0 0 0").unwrap();
        let states = dfa.run(&w).unwrap();
        assert!(!dfa.accepting[*states.last().unwrap()]);
    }

    #[test]
    fn flip_flop_oracle_examples() {
        let l = lang(LanguageSpec::FlipFlop);
        // "w 1 i 0 r" -> {1}
        let p = l.alphabet.parse_word("w 1 i 0 r").unwrap();
        let label = l.prefix_label(&p).unwrap();
        assert!(label.contains(l.alphabet.id("1").unwrap()));
        assert_eq!(label.symbols().count(), 1);
        assert!(!label.eos());
        // "w 0 r" -> {0}
        let p = l.alphabet.parse_word("w 0 r").unwrap();
        let label = l.prefix_label(&p).unwrap();
        assert!(label.contains(l.alphabet.id("0").unwrap()));
        assert_eq!(label.symbols().count(), 1);
        // prefix ending in w or i -> both bits
        for pre in ["w 1 i", "w"] {
            let p = l.alphabet.parse_word(pre).unwrap();
            let label = l.prefix_label(&p).unwrap();
            assert!(label.contains(3) && label.contains(4));
        }
        // r before any w -> both bits possible
        let p = l.alphabet.parse_word("r").unwrap();
        let label = l.prefix_label(&p).unwrap();
        assert!(label.contains(3) && label.contains(4));
    }

    #[test]
    fn counter_oracle_examples() {
        let anbn = lang(LanguageSpec::AnBn);
        let p = anbn.alphabet.parse_word("a a b").unwrap();
        let label = anbn.prefix_label(&p).unwrap();
        assert!(label.contains(1) && !label.contains(0) && !label.eos());

        let dyck = lang(LanguageSpec::Dyck1);
        let label = dyck.prefix_label(&[]).unwrap();
        assert!(label.contains(0) && !label.contains(1) && label.eos());

        let abc = lang(LanguageSpec::AnBnCn);
        let w = abc.alphabet.parse_word("a a b b c c").unwrap();
        assert!(abc.contains(&w));
        let labels = abc.labels_along(&w).unwrap();
        assert!(labels.last().unwrap().eos());
    }

    #[test]
    fn boolean_oracle_tracks_pending_subexpressions() {
        let b3 = lang(LanguageSpec::Boolean(3));
        let val = b3.alphabet.id("val").unwrap();
        let op2 = b3.alphabet.id("op2").unwrap();
        assert!(b3.contains(&[op2, val, val]));
        assert!(b3.contains(&[val]));
        assert!(!b3.contains(&[op2, val]));
        assert!(!b3.contains(&[op2, val, val, val]));
        // after a complete expression only EOS remains
        let label = b3.prefix_label(&[op2, val, val]).unwrap();
        assert!(label.eos());
        assert_eq!(label.symbols().count(), 0);
        // nested arity bookkeeping
        let w = vec![op2, op2, val, val, val];
        assert!(b3.contains(&w));
        let labels = b3.labels_along(&w).unwrap();
        assert!(labels.last().unwrap().eos());
        assert!(!labels[3].eos());
    }

    #[test]
    fn bounded_dyck_oracle() {
        let l = lang(LanguageSpec::BoundedDyck { k: 8, h: 10 });
        let p = l.alphabet.parse_word("(1 (2 )2").unwrap();
        let label = l.prefix_label(&p).unwrap();
        // matching close for depth 1 plus all 8 opens
        assert!(label.contains(l.alphabet.id(")1").unwrap()));
        for i in 1..=8 {
            assert!(label.contains(l.alphabet.id(&format!("({i}")).unwrap()));
        }
        assert!(!label.contains(l.alphabet.id(")2").unwrap()));
        assert!(!label.eos());
        // depth-h prefix allows no opens
        let deep: Vec<usize> = std::iter::repeat(l.alphabet.id("(1").unwrap()).take(10).collect();
        let label = l.prefix_label(&deep).unwrap();
        assert!(!label.contains(l.alphabet.id("(1").unwrap()));
        assert!(label.contains(l.alphabet.id(")1").unwrap()));
        // empty prefix: all opens plus EOS
        let label = l.prefix_label(&[]).unwrap();
        assert!(label.eos());
        assert_eq!(label.symbols().count(), 8);
    }

    #[test]
    fn dead_prefix_is_an_error() {
        let t2 = lang(LanguageSpec::Tomita(2));
        let p = t2.alphabet.parse_word("0 0").unwrap();
        assert_eq!(t2.prefix_label(&p).unwrap_err(), LanguageError::InvalidPrefix);
        let anbn = lang(LanguageSpec::AnBn);
        let p = anbn.alphabet.parse_word("a b a").unwrap();
        assert!(anbn.prefix_label(&p).is_err());
    }

    #[test]
    fn labels_match_dfa_brute_force_on_prefix_tree() {
        for (spec, _) in regular_catalog() {
            let l = lang(spec);
            let dfa = l.dfa().unwrap();
            for prefix in l.valid_prefixes(8) {
                let via_oracle = l.prefix_label(&prefix).unwrap();
                let via_brute = dfa.prefix_label_brute(&prefix).unwrap();
                assert_eq!(via_oracle, via_brute, "{spec} prefix {:?}", l.alphabet.render_word(&prefix));
            }
        }
    }

    #[test]
    fn eos_iff_member_and_never_bos() {
        for spec in [
            LanguageSpec::Tomita(4),
            LanguageSpec::Dn(2),
            LanguageSpec::FlipFlop,
            LanguageSpec::Dyck1,
            LanguageSpec::ShuffleDyck(2),
            LanguageSpec::Boolean(3),
            LanguageSpec::AnBnCn,
            LanguageSpec::BoundedDyck { k: 2, h: 3 },
        ] {
            let l = lang(spec);
            for prefix in l.valid_prefixes(7) {
                let label = l.prefix_label(&prefix).unwrap();
                assert_eq!(label.eos(), l.contains(&prefix), "{spec}");
                // labels are subsets of the content alphabet
                assert!(label.symbols().all(|s| s < l.alphabet.len()));
            }
        }
    }
}
