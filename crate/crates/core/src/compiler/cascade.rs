//! Cascade-to-stack translation. A `StateTracker` is a model whose top layer
//! exposes, through threshold predicates, both the joint automaton state and
//! the current input token. Composing one more set-reset component costs two
//! layers: a previous-state layer (moving averages with gate 1/4 so the
//! joint state one step back is decodable) and the component's set-reset
//! layer, whose decoder realizes the cascade wiring over the enriched
//! alphabet.

use crate::languages::{Alphabet, SetResetAutomaton};
use crate::numerics::{FixedPoint, FixedVector};
use crate::ssm::{
    atoms, Atom, Decoder, GateEntry, MixSpec, Predicate, SsmLayer, StateValue, StateVector,
};

use super::holonomy::{Action, CascadeProgram};
use super::support::{code_action, code_atoms, code_width, one_hot_embedding};
use super::CompileError;

/// A partially built model that tracks a cascade's joint state sequence.
#[derive(Clone, Debug)]
pub struct StateTracker {
    pub alphabet: Alphabet,
    pub precision: u8,
    pub embedding: Vec<FixedVector>,
    pub layers: Vec<SsmLayer>,
    /// joint id -> component-state tuple
    pub joints: Vec<Vec<usize>>,
    pub start_joint: usize,
    /// [joint][symbol] -> joint
    pub delta: Vec<Vec<usize>>,
    /// joint id -> predicate over the top-layer z
    pub state_preds: Vec<Predicate>,
    /// symbol -> predicate over the top-layer z
    pub token_preds: Vec<Predicate>,
}

impl StateTracker {
    pub fn top_width(&self) -> usize {
        self.layers.last().expect("tracker has layers").out_dim()
    }

    /// Decode the joint state from a top-layer activation (diagnostics).
    pub fn decode_joint(&self, z: &StateVector) -> Option<usize> {
        (0..self.joints.len()).find(|&j| self.state_preds[j].holds(z).unwrap_or(false))
    }
}

/// Build the tracker for the first cascade component (read directly off the
/// one-hot token embedding).
pub(crate) fn base_tracker(
    program: &CascadeProgram,
    p: u8,
) -> Result<StateTracker, CompileError> {
    let alphabet = program.alphabet.clone();
    let n = alphabet.len();
    let comp = &program.components[0];
    let m = code_width(comp.num_states);
    let d = m + 1 + n;
    let one = FixedPoint::one(p);
    let zero = FixedPoint::zero(p);

    let decoder = Decoder::new(
        (0..n).map(|s| (Predicate::new(vec![atoms::ge_ratio(s, 1, 2, p)]), s)).collect(),
    );
    let mut gate = Vec::with_capacity(n);
    let mut inc = Vec::with_capacity(n);
    for s in 0..n {
        let reset = match comp.action(&[], s) {
            Action::Identity => None,
            Action::Reset(t) => Some(t),
        };
        let (mut g, mut b) = code_action(reset, m, p);
        g.push(GateEntry::Real(one.clone()));
        b.push(zero.clone());
        for t in 0..n {
            g.push(GateEntry::Real(zero.clone()));
            b.push(if t == s { one.clone() } else { zero.clone() });
        }
        gate.push(g);
        inc.push(b);
    }
    let mut h0 = vec![StateValue::Real(zero.clone()); m];
    h0.push(StateValue::Real(one.clone()));
    h0.extend(vec![StateValue::Real(zero.clone()); n]);
    let layer = SsmLayer {
        d_in: n,
        d,
        decoder,
        gate,
        inc,
        h0,
        mix2: MixSpec::Identity,
        normalize: true,
        mix1: MixSpec::Identity,
    };

    let (joints, start_joint, delta) = enumerate_prefixes(program, 1);
    let state_preds = joints
        .iter()
        .map(|t| Predicate::new(code_atoms(t[0], m, 0, p)))
        .collect();
    let token_preds =
        (0..n).map(|s| Predicate::new(vec![atoms::ge_ratio(m + 1 + s, 1, 2, p)])).collect();
    Ok(StateTracker {
        alphabet,
        precision: p,
        embedding: one_hot_embedding(n, p),
        layers: vec![layer],
        joints,
        start_joint,
        delta,
        state_preds,
        token_preds,
    })
}

/// Reachable prefix tuples of the first `len` components.
fn enumerate_prefixes(
    program: &CascadeProgram,
    len: usize,
) -> (Vec<Vec<usize>>, usize, Vec<Vec<usize>>) {
    let start: Vec<usize> = program.start_tuple()[..len].to_vec();
    let mut joints = vec![start.clone()];
    let mut ids = std::collections::HashMap::new();
    ids.insert(start, 0usize);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < joints.len() {
        let tuple = joints[i].clone();
        let mut row = Vec::with_capacity(program.alphabet.len());
        for s in 0..program.alphabet.len() {
            let next = program.step_prefix(&tuple, s);
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                joints.push(next);
                joints.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    (joints, 0, delta)
}

/// Extend a tracker with one more set-reset component, given its action for
/// every (lower joint, symbol) pair. Adds two layers.
pub(crate) fn fold_component(
    lower: &StateTracker,
    num_states: usize,
    action: impl Fn(usize, usize) -> Action,
    new_joints: Option<(Vec<Vec<usize>>, usize, Vec<Vec<usize>>)>,
) -> Result<StateTracker, CompileError> {
    let p = lower.precision;
    if p < 5 {
        return Err(CompileError::PrecisionTooLow(p, 5));
    }
    let n = lower.alphabet.len();
    let jn = lower.joints.len();
    let one = FixedPoint::one(p);
    let zero = FixedPoint::zero(p);
    let quarter = FixedPoint::from_ratio(1, 4, p);

    // ---- previous-state layer: 4 moving-average dims per lower joint,
    // then a one-hot of the current joint and of the token
    let ema = |j: usize| 4 * j;
    let cur = |j: usize| 4 * jn + j;
    let tok = |s: usize| 5 * jn + s;
    let d_r = 5 * jn + n;
    let mut rules_r = Vec::with_capacity(jn * n);
    let mut inc_r = Vec::with_capacity(jn * n);
    for j in 0..jn {
        for s in 0..n {
            let mut atoms_vec = lower.state_preds[j].atoms.clone();
            atoms_vec.extend(lower.token_preds[s].atoms.iter().cloned());
            rules_r.push((Predicate::new(atoms_vec), j * n + s));
            let mut b = Vec::with_capacity(d_r);
            for q in 0..jn {
                let hit = q == j;
                b.extend([
                    if hit { one.clone() } else { zero.clone() },
                    if hit { zero.clone() } else { one.clone() },
                    if hit { one.clone() } else { zero.clone() },
                    if hit { zero.clone() } else { one.clone() },
                ]);
            }
            for q in 0..jn {
                b.push(if q == j { one.clone() } else { zero.clone() });
            }
            for t in 0..n {
                b.push(if t == s { one.clone() } else { zero.clone() });
            }
            inc_r.push(b);
        }
    }
    let mut gate_row_r = Vec::with_capacity(d_r);
    for _ in 0..jn {
        gate_row_r.extend([
            GateEntry::Real(quarter.clone()),
            GateEntry::Real(quarter.clone()),
            GateEntry::Real(zero.clone()),
            GateEntry::Real(zero.clone()),
        ]);
    }
    gate_row_r.extend(vec![GateEntry::Real(zero.clone()); jn + n]);
    let layer_r = SsmLayer {
        d_in: lower.top_width(),
        d: d_r,
        decoder: Decoder::new(rules_r),
        gate: vec![gate_row_r; jn * n],
        inc: inc_r,
        h0: vec![StateValue::Real(zero.clone()); d_r],
        mix2: MixSpec::Identity,
        normalize: false,
        mix1: MixSpec::Identity,
    };

    // ---- the component's set-reset layer, decoding (previous joint, token)
    let m = code_width(num_states);
    let d_c = m + 1 + jn + n;
    let cur_c = |j: usize| m + 1 + j;
    let tok_c = |s: usize| m + 1 + jn + s;
    let mut rules_c: Vec<(Predicate, usize)> = Vec::new();
    let mut gate_c = Vec::with_capacity(jn * n);
    let mut inc_c = Vec::with_capacity(jn * n);
    for j in 0..jn {
        for s in 0..n {
            let tag = j * n + s;
            let c = lower.delta[j][s];
            // regular rule: the matching moving average carries the pulse
            // from one step back (shifted up by 1 when j is also current)
            let threshold = if j == c {
                atoms::ge_ratio(ema(j), 19, 16, p)
            } else {
                atoms::ge_ratio(ema(j), 3, 16, p)
            };
            rules_c.push((
                Predicate::new(vec![
                    atoms::ge_ratio(tok(s), 1, 2, p),
                    atoms::ge_ratio(cur(c), 1, 2, p),
                    threshold,
                ]),
                tag,
            ));
            if j == lower.start_joint {
                // position 1: no predecessor recorded yet counts as the
                // start joint
                let mut start_atoms = vec![
                    atoms::ge_ratio(tok(s), 1, 2, p),
                    atoms::ge_ratio(cur(c), 1, 2, p),
                    atoms::le_ratio(ema(c), 9, 8, p),
                ];
                for q in 0..jn {
                    if q != c {
                        start_atoms.push(atoms::le_ratio(ema(q), 1, 8, p));
                    }
                }
                rules_c.push((Predicate::new(start_atoms), tag));
            }
            let reset = match action(j, s) {
                Action::Identity => None,
                Action::Reset(t) => Some(t),
            };
            let (mut g, mut b) = code_action(reset, m, p);
            g.push(GateEntry::Real(one.clone()));
            b.push(zero.clone());
            for q in 0..jn {
                g.push(GateEntry::Real(zero.clone()));
                b.push(if q == c { one.clone() } else { zero.clone() });
            }
            for t in 0..n {
                g.push(GateEntry::Real(zero.clone()));
                b.push(if t == s { one.clone() } else { zero.clone() });
            }
            gate_c.push(g);
            inc_c.push(b);
        }
    }
    let mut h0_c = vec![StateValue::Real(zero.clone()); m];
    h0_c.push(StateValue::Real(one.clone()));
    h0_c.extend(vec![StateValue::Real(zero.clone()); jn + n]);
    let layer_c = SsmLayer {
        d_in: d_r,
        d: d_c,
        decoder: Decoder::new(rules_c),
        gate: gate_c,
        inc: inc_c,
        h0: h0_c,
        mix2: MixSpec::Identity,
        normalize: true,
        mix1: MixSpec::Identity,
    };

    // ---- the extended joint space
    let (joints, start_joint, delta) = match new_joints {
        Some(j) => j,
        None => {
            // generic product reachability from the component actions
            let start = {
                let mut t = lower.joints[lower.start_joint].clone();
                t.push(0);
                t
            };
            let mut joints = vec![start.clone()];
            let mut ids = std::collections::HashMap::new();
            ids.insert(start, 0usize);
            let mut delta: Vec<Vec<usize>> = Vec::new();
            let mut lower_ids = std::collections::HashMap::new();
            for (i, t) in lower.joints.iter().enumerate() {
                lower_ids.insert(t.clone(), i);
            }
            let mut i = 0;
            while i < joints.len() {
                let tuple = joints[i].clone();
                let low_id = lower_ids[&tuple[..tuple.len() - 1].to_vec()];
                let own = tuple[tuple.len() - 1];
                let mut row = Vec::with_capacity(n);
                for s in 0..n {
                    let own_next = match action(low_id, s) {
                        Action::Identity => own,
                        Action::Reset(t) => t,
                    };
                    let mut next = lower.joints[lower.delta[low_id][s]].clone();
                    next.push(own_next);
                    let id = *ids.entry(next.clone()).or_insert_with(|| {
                        joints.push(next);
                        joints.len() - 1
                    });
                    row.push(id);
                }
                delta.push(row);
                i += 1;
            }
            (joints, 0, delta)
        }
    };

    let mut lower_ids = std::collections::HashMap::new();
    for (i, t) in lower.joints.iter().enumerate() {
        lower_ids.insert(t.clone(), i);
    }
    let state_preds = joints
        .iter()
        .map(|t| {
            let low_id = lower_ids[&t[..t.len() - 1].to_vec()];
            let mut atoms_vec: Vec<Atom> = vec![atoms::ge_ratio(cur_c(low_id), 1, 2, p)];
            atoms_vec.extend(code_atoms(t[t.len() - 1], m, 0, p));
            Predicate::new(atoms_vec)
        })
        .collect();
    let token_preds =
        (0..n).map(|s| Predicate::new(vec![atoms::ge_ratio(tok_c(s), 1, 2, p)])).collect();

    let mut layers = lower.layers.clone();
    layers.push(layer_r);
    layers.push(layer_c);
    Ok(StateTracker {
        alphabet: lower.alphabet.clone(),
        precision: p,
        embedding: lower.embedding.clone(),
        layers,
        joints,
        start_joint,
        delta,
        state_preds,
        token_preds,
    })
}

/// Compose a tracker with a set-reset automaton over the enriched alphabet
/// (lower joint states x tokens, in that order). Adds L2 + 1 = 2 layers.
pub fn cascade_compose(
    lower: &StateTracker,
    upper: &SetResetAutomaton,
) -> Result<StateTracker, CompileError> {
    let n = lower.alphabet.len();
    if upper.dfa.alphabet.len() != lower.joints.len() * n {
        return Err(CompileError::BadParameter(format!(
            "upper alphabet has {} symbols; the cascade product needs {} x {}",
            upper.dfa.alphabet.len(),
            lower.joints.len(),
            n
        )));
    }
    let action = |j: usize, s: usize| {
        let enriched = j * n + s;
        match upper.reset_symbols.iter().position(|r| *r == Some(enriched)) {
            Some(state) => Action::Reset(state),
            None => Action::Identity,
        }
    };
    fold_component(lower, upper.num_states(), action, None)
}

/// Build the full tracker for a cascade program.
pub(crate) fn tracker_for_program(
    program: &CascadeProgram,
    p: u8,
) -> Result<StateTracker, CompileError> {
    let mut tracker = base_tracker(program, p)?;
    for (i, comp) in program.components.iter().enumerate().skip(1) {
        let lower_joints = tracker.joints.clone();
        let action =
            |j: usize, s: usize| comp.action(&lower_joints[j], s);
        let new_joints = enumerate_prefixes(program, i + 1);
        tracker = fold_component(&tracker, comp.num_states, action, Some(new_joints))?;
    }
    Ok(tracker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::krohn_rhodes_decompose;
    use crate::languages::{Language, LanguageSpec};
    use crate::ssm::Runner;

    /// Run a tracker on a word and decode the joint at every position.
    fn decode_run(tracker: &StateTracker, word: &[usize]) -> Vec<usize> {
        let model = crate::ssm::SsmModel {
            precision: tracker.precision,
            flags: Default::default(),
            alphabet: tracker.alphabet.clone(),
            embedding: tracker.embedding.clone(),
            layers: tracker.layers.clone(),
            readout: crate::ssm::Readout {
                decoder: Decoder::new(vec![(Predicate::new(vec![]), 0)]),
                table: crate::ssm::ReadoutTable::Accept(vec![true]),
            },
        };
        let runner = Runner::new(&model).unwrap();
        let mut st = runner.start();
        word.iter()
            .map(|&s| {
                let z = runner.step(&mut st, s).unwrap();
                tracker.decode_joint(&z).expect("joint decodable")
            })
            .collect()
    }

    fn words_up_to(n_symbols: usize, len: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..n_symbols {
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
    fn d2_tracker_follows_the_cascade() {
        let lang = Language::new(LanguageSpec::Dn(2));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        let tracker = tracker_for_program(&program, 8).unwrap();
        assert_eq!(tracker.layers.len(), 2 * program.components.len() - 1);
        for word in words_up_to(2, 8) {
            if word.is_empty() {
                continue;
            }
            let joints = decode_run(&tracker, &word);
            let expect = dfa.run(&word).unwrap();
            for (t, &j) in joints.iter().enumerate() {
                let tuple = &tracker.joints[j];
                assert_eq!(
                    program.decode_tuple(tuple),
                    Some(expect[t + 1]),
                    "word {word:?} position {t}"
                );
            }
        }
    }

    #[test]
    fn trivial_upper_component_adds_nothing() {
        let lang = Language::new(LanguageSpec::Tomita(1));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        let lower = base_tracker(&program, 8).unwrap();
        let enriched_n = lower.joints.len() * lower.alphabet.len();
        let names: Vec<String> = (0..enriched_n).map(|i| format!("e{i}")).collect();
        let upper = crate::languages::SetResetAutomaton::new(
            Alphabet::new(names).unwrap(),
            &[],
        );
        let composed = cascade_compose(&lower, &upper).unwrap();
        assert_eq!(composed.layers.len(), lower.layers.len() + 2);
        for word in words_up_to(2, 6) {
            if word.is_empty() {
                continue;
            }
            let lower_run = decode_run(&lower, &word);
            let composed_run = decode_run(&composed, &word);
            for (a, b) in lower_run.iter().zip(&composed_run) {
                // the composed joint projects onto the lower joint
                let tuple = &composed.joints[*b];
                assert_eq!(lower.joints[*a], tuple[..tuple.len() - 1].to_vec());
                assert_eq!(tuple[tuple.len() - 1], 0);
            }
        }
    }
}
