//! Deterministic finite automata with total transitions, minimization,
//! the transition-monoid aperiodicity check, and predictive labels via
//! co-reachability.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::alphabet::{Alphabet, LanguageError, PredictiveLabel, Word};

/// DFA with states 0..num_states, total transition table, start state and
/// accepting set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub num_states: usize,
    pub start: usize,
    /// trans[state][symbol] -> state
    pub trans: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        start: usize,
        trans: Vec<Vec<usize>>,
        accepting: Vec<bool>,
    ) -> Self {
        assert_eq!(trans.len(), num_states);
        assert_eq!(accepting.len(), num_states);
        assert!(start < num_states);
        for row in &trans {
            assert_eq!(row.len(), alphabet.len());
            for &t in row {
                assert!(t < num_states);
            }
        }
        Dfa { alphabet, num_states, start, trans, accepting }
    }

    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.trans[state][symbol]
    }

    /// State sequence q0, u(q0,w1), ..., u(q0,w); length |w|+1.
    pub fn run(&self, word: &[usize]) -> Result<Vec<usize>, LanguageError> {
        let mut states = Vec::with_capacity(word.len() + 1);
        let mut q = self.start;
        states.push(q);
        for &s in word {
            if s >= self.alphabet.len() {
                return Err(LanguageError::OutOfAlphabet(format!("#{s}")));
            }
            q = self.trans[q][s];
            states.push(q);
        }
        Ok(states)
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.start;
        for &s in word {
            q = self.trans[q][s];
        }
        self.accepting[q]
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for q in 0..self.num_states {
            for &t in &self.trans[q] {
                rev[t].push(q);
            }
        }
        let mut live = vec![false; self.num_states];
        let mut queue: VecDeque<usize> =
            (0..self.num_states).filter(|&q| self.accepting[q]).collect();
        for &q in &queue {
            live[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        live
    }

    /// Predictive label of each state: symbols leading to a live state, plus
    /// EOS on accepting states. Dead states get the empty label.
    pub fn state_labels(&self) -> Vec<PredictiveLabel> {
        let live = self.live_states();
        (0..self.num_states)
            .map(|q| {
                let mut l = PredictiveLabel::empty();
                for s in 0..self.alphabet.len() {
                    if live[self.trans[q][s]] {
                        l.insert(s);
                    }
                }
                l.set_eos(self.accepting[q]);
                l
            })
            .collect()
    }

    /// Label of a valid prefix; errors when no completion exists.
    pub fn prefix_label(&self, prefix: &[usize]) -> Result<PredictiveLabel, LanguageError> {
        let live = self.live_states();
        let labels = self.state_labels();
        let mut q = self.start;
        for &s in prefix {
            if s >= self.alphabet.len() {
                return Err(LanguageError::OutOfAlphabet(format!("#{s}")));
            }
            q = self.trans[q][s];
        }
        if !live[q] {
            return Err(LanguageError::InvalidPrefix);
        }
        Ok(labels[q])
    }

    /// Language-equivalent minimal DFA: unreachable states removed, then
    /// Moore partition refinement.
    pub fn minimize(&self) -> Dfa {
        // reachable restriction
        let mut reach = vec![false; self.num_states];
        let mut queue = VecDeque::from([self.start]);
        reach[self.start] = true;
        while let Some(q) = queue.pop_front() {
            for &t in &self.trans[q] {
                if !reach[t] {
                    reach[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let old_ids: Vec<usize> = (0..self.num_states).filter(|&q| reach[q]).collect();
        let remap: HashMap<usize, usize> =
            old_ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let n = old_ids.len();
        let trans: Vec<Vec<usize>> = old_ids
            .iter()
            .map(|&q| self.trans[q].iter().map(|t| remap[t]).collect())
            .collect();
        let accepting: Vec<bool> = old_ids.iter().map(|&q| self.accepting[q]).collect();
        let start = remap[&self.start];

        // Moore refinement
        let mut class: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut signature: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
            for q in 0..n {
                let sig: Vec<usize> = trans[q].iter().map(|&t| class[t]).collect();
                signature.entry((class[q], sig)).or_default().push(q);
            }
            let mut next = vec![0usize; n];
            for (i, (_, members)) in signature.iter().enumerate() {
                for &q in members {
                    next[q] = i;
                }
            }
            if next == class {
                break;
            }
            class = next;
        }
        let num_classes = class.iter().max().map_or(0, |m| m + 1);
        let mut min_trans = vec![vec![usize::MAX; self.alphabet.len()]; num_classes];
        let mut min_acc = vec![false; num_classes];
        for q in 0..n {
            min_acc[class[q]] = accepting[q];
            for s in 0..self.alphabet.len() {
                min_trans[class[q]][s] = class[trans[q][s]];
            }
        }
        Dfa::new(self.alphabet.clone(), num_classes, class[start], min_trans, min_acc)
    }

    /// Maps induced by symbols, as state vectors.
    pub fn symbol_maps(&self) -> Vec<Vec<usize>> {
        (0..self.alphabet.len())
            .map(|s| (0..self.num_states).map(|q| self.trans[q][s]).collect())
            .collect()
    }

    /// Generate the transition monoid by closing the symbol maps under
    /// composition (the identity is included).
    pub fn transition_monoid(&self) -> Vec<Vec<usize>> {
        let gens = self.symbol_maps();
        let identity: Vec<usize> = (0..self.num_states).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut elems = vec![identity.clone()];
        seen.insert(identity);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(idx) = queue.pop_front() {
            let m = elems[idx].clone();
            for g in &gens {
                let composed: Vec<usize> = m.iter().map(|&q| g[q]).collect();
                if seen.insert(composed.clone()) {
                    elems.push(composed);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        elems
    }

    /// Compose transformations: (m * g)(q) = g(m(q)).
    fn compose(m: &[usize], g: &[usize]) -> Vec<usize> {
        m.iter().map(|&q| g[q]).collect()
    }

    /// True iff the transition monoid contains no nontrivial group:
    /// every element m satisfies m^n = m^(n+1) for some n <= |Q|.
    pub fn is_aperiodic(&self) -> bool {
        let monoid = self.transition_monoid();
        for m in &monoid {
            let mut power = m.clone();
            let mut aperiodic = false;
            for _ in 0..=self.num_states {
                let next = Self::compose(&power, m);
                if next == power {
                    aperiodic = true;
                    break;
                }
                power = next;
            }
            if !aperiodic {
                return false;
            }
        }
        true
    }

    /// Size of the transition monoid (reported by the classifier CLI).
    pub fn monoid_size(&self) -> usize {
        self.transition_monoid().len()
    }

    /// Brute-force predictive label: for each symbol, search for any
    /// completion by product reachability from scratch. Test oracle for
    /// `prefix_label`.
    pub fn prefix_label_brute(&self, prefix: &[usize]) -> Result<PredictiveLabel, LanguageError> {
        let mut q = self.start;
        for &s in prefix {
            q = self.trans[q][s];
        }
        let reach_accept = |from: usize| -> bool {
            let mut seen = vec![false; self.num_states];
            let mut queue = VecDeque::from([from]);
            seen[from] = true;
            while let Some(x) = queue.pop_front() {
                if self.accepting[x] {
                    return true;
                }
                for &t in &self.trans[x] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            false
        };
        if !reach_accept(q) {
            return Err(LanguageError::InvalidPrefix);
        }
        let mut l = PredictiveLabel::empty();
        for s in 0..self.alphabet.len() {
            if reach_accept(self.trans[q][s]) {
                l.insert(s);
            }
        }
        l.set_eos(self.accepting[q]);
        Ok(l)
    }

    /// All words of the language up to the given length (test helper).
    pub fn enumerate_language(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut frontier = vec![(self.start, Vec::new())];
        if self.accepting[self.start] {
            out.push(Vec::new());
        }
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (q, w) in frontier {
                for s in 0..self.alphabet.len() {
                    let t = self.trans[q][s];
                    let mut w2: Word = w.clone();
                    w2.push(s);
                    if self.accepting[t] {
                        out.push(w2.clone());
                    }
                    next.push((t, w2));
                }
            }
            frontier = next;
        }
        out
    }

    /// DAG of valid prefixes up to `max_len`, as (prefix, state) pairs in
    /// breadth-first order. Only live states are expanded.
    pub fn enumerate_valid_prefixes(&self, max_len: usize) -> Vec<Word> {
        let live = self.live_states();
        let mut out = Vec::new();
        let mut frontier: Vec<(usize, Word)> = Vec::new();
        if live[self.start] {
            frontier.push((self.start, Vec::new()));
        }
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (q, w) in frontier {
                for s in 0..self.alphabet.len() {
                    let t = self.trans[q][s];
                    if live[t] {
                        let mut w2 = w.clone();
                        w2.push(s);
                        out.push(w2.clone());
                        next.push((t, w2));
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// Automaton that records the last seen symbol from a designated set and
/// ignores everything else. Non-start states are identified with symbols.
#[derive(Clone, Debug)]
pub struct SetResetAutomaton {
    pub dfa: Dfa,
    /// reset_symbol[state] = Some(symbol) for non-start states.
    pub reset_symbols: Vec<Option<usize>>,
}

impl SetResetAutomaton {
    /// Build from an alphabet and a designated reset subset; state 0 is the
    /// start state, state 1+i records reset symbol i.
    pub fn new(alphabet: Alphabet, resets: &[usize]) -> Self {
        let n = resets.len() + 1;
        let mut trans = vec![vec![0usize; alphabet.len()]; n];
        for q in 0..n {
            for s in 0..alphabet.len() {
                trans[q][s] = match resets.iter().position(|&r| r == s) {
                    Some(i) => i + 1,
                    None => q,
                };
            }
        }
        let dfa = Dfa::new(alphabet, n, 0, trans, vec![true; n]);
        let mut reset_symbols = vec![None; n];
        for (i, &r) in resets.iter().enumerate() {
            reset_symbols[i + 1] = Some(r);
        }
        SetResetAutomaton { dfa, reset_symbols }
    }

    /// Check the defining transition law by enumeration.
    pub fn validate(dfa: &Dfa, reset_symbols: &[Option<usize>]) -> bool {
        if reset_symbols.len() != dfa.num_states || reset_symbols[dfa.start].is_some() {
            return false;
        }
        // non-start states must carry distinct symbols
        let mut seen = BTreeSet::new();
        for (q, r) in reset_symbols.iter().enumerate() {
            if q != dfa.start && !r.map_or(false, |s| seen.insert(s)) {
                return false;
            }
        }
        for q in 0..dfa.num_states {
            for s in 0..dfa.alphabet.len() {
                let target = match reset_symbols.iter().position(|r| *r == Some(s)) {
                    Some(state) => state,
                    None => q,
                };
                if dfa.trans[q][s] != target {
                    return false;
                }
            }
        }
        true
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states
    }
}
