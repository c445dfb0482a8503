//! Krohn-Rhodes decomposition of aperiodic automata into a cascade of
//! set-reset components, via the holonomy construction.
//!
//! States are encoded as chains of nested image sets: X ⊋ T_1 ⊋ ... ⊋ {x},
//! where each link picks a tile (maximal proper sub-image) of the class
//! representative it sits under, and links are translated into representative
//! coordinates by witness transformations. Aperiodicity makes every
//! stabilizer act as the identity pointwise, which is what turns each level
//! into a set-reset automaton: per enriched input a level either keeps its
//! tile or is reset to one computed from the levels above. The builder
//! verifies that property explicitly while assembling the wiring tables and
//! refuses (loudly) if it ever fails.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::languages::{Alphabet, Dfa};

use super::CompileError;

type Map = Vec<usize>;
type Mask = u64;

fn apply_point(map: &Map, q: usize) -> usize {
    map[q]
}

fn apply_mask(mask: Mask, map: &Map) -> Mask {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let q = m.trailing_zeros() as usize;
        out |= 1 << map[q];
        m &= m - 1;
    }
    out
}

fn compose(first: &Map, then: &Map) -> Map {
    first.iter().map(|&q| then[q]).collect()
}

fn mask_size(mask: Mask) -> usize {
    mask.count_ones() as usize
}

fn mask_elem(mask: Mask) -> usize {
    debug_assert_eq!(mask.count_ones(), 1);
    mask.trailing_zeros() as usize
}

/// How an enriched input acts on one cascade level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Action {
    Identity,
    Reset(usize),
}

/// One set-reset component of the cascade. State 0 is the start state; the
/// descriptors record which (representative, tile) pair each state encodes
/// (None is the inactive padding state).
#[derive(Clone, Debug)]
pub struct CascadeComponent {
    pub num_states: usize,
    pub state_descr: Vec<Option<(Mask, Mask)>>,
    /// (joint state of the components above, symbol) -> action
    wiring: HashMap<(Vec<usize>, usize), Action>,
}

impl CascadeComponent {
    pub fn action(&self, prefix: &[usize], symbol: usize) -> Action {
        *self.wiring.get(&(prefix.to_vec(), symbol)).unwrap_or(&Action::Identity)
    }

    pub fn wiring_entries(&self) -> impl Iterator<Item = (&(Vec<usize>, usize), &Action)> {
        self.wiring.iter()
    }
}

/// Ordered cascade of set-reset components with an output map back to the
/// source automaton's states.
#[derive(Clone, Debug)]
pub struct CascadeProgram {
    pub alphabet: Alphabet,
    pub components: Vec<CascadeComponent>,
    pub level_heights: Vec<usize>,
    start_tuple: Vec<usize>,
    output: HashMap<Vec<usize>, usize>,
    dfa_start: usize,
}

impl CascadeProgram {
    pub fn start_tuple(&self) -> &[usize] {
        &self.start_tuple
    }

    /// Cascade semantics: every component reads the previous states of the
    /// components above it together with the input symbol.
    pub fn step_tuple(&self, tuple: &[usize], symbol: usize) -> Vec<usize> {
        let mut next = Vec::with_capacity(tuple.len());
        for (i, comp) in self.components.iter().enumerate() {
            let state = tuple[i];
            let new = match comp.action(&tuple[..i], symbol) {
                Action::Identity => state,
                Action::Reset(target) => target,
            };
            next.push(new);
        }
        next
    }

    /// Original automaton state encoded by a reachable joint tuple.
    pub fn decode_tuple(&self, tuple: &[usize]) -> Option<usize> {
        self.output.get(tuple).copied()
    }

    /// State sequence through the output map; mirrors `Dfa::run`.
    pub fn run(&self, word: &[usize]) -> Vec<usize> {
        let mut tuple = self.start_tuple.clone();
        let mut out = vec![self.dfa_start];
        for &s in word {
            tuple = self.step_tuple(&tuple, s);
            out.push(self.decode_tuple(&tuple).expect("reachable tuple has an output entry"));
        }
        out
    }

    /// Debug serialization: component list plus wiring tables.
    pub fn to_debug_json(&self) -> String {
        #[derive(Serialize)]
        struct ComponentDto {
            states: Vec<String>,
            wiring: Vec<(Vec<usize>, String, Action)>,
        }
        #[derive(Serialize)]
        struct ProgramDto {
            alphabet: Vec<String>,
            level_heights: Vec<usize>,
            start: Vec<usize>,
            components: Vec<ComponentDto>,
        }
        let dto = ProgramDto {
            alphabet: self.alphabet.symbols().to_vec(),
            level_heights: self.level_heights.clone(),
            start: self.start_tuple.clone(),
            components: self
                .components
                .iter()
                .map(|c| {
                    let mut wiring: Vec<(Vec<usize>, String, Action)> = c
                        .wiring
                        .iter()
                        .map(|((prefix, sym), act)| {
                            (prefix.clone(), self.alphabet.name(*sym).to_string(), *act)
                        })
                        .collect();
                    wiring.sort();
                    ComponentDto {
                        states: c
                            .state_descr
                            .iter()
                            .map(|d| match d {
                                None => "-".to_string(),
                                Some((rep, tile)) => format!("rep:{rep:b} tile:{tile:b}"),
                            })
                            .collect(),
                        wiring,
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("cascade debug serialization")
    }
}

/// Skeleton of the transformation monoid acting on subsets of states.
struct Skeleton {
    full: Mask,
    sym_maps: Vec<Map>,
    /// all images of X plus the singletons
    masks: Vec<Mask>,
    index: HashMap<Mask, usize>,
    class_of: Vec<usize>,
    /// class -> representative image index (X is its own representative)
    rep_of_class: Vec<usize>,
    /// class -> height (singleton classes at 0)
    height: Vec<usize>,
    /// image index -> tiles of that image (only filled for representatives)
    tiles: Vec<Vec<Mask>>,
    /// member image -> witness with rep . iota = member
    iota: HashMap<Mask, Map>,
    /// member image -> witness with member . omega = rep
    omega: HashMap<Mask, Map>,
}

/// Chain link: (representative image index, tile of that representative).
type Link = (usize, Mask);

impl Skeleton {
    fn build(dfa: &Dfa) -> Result<Self, CompileError> {
        let n = dfa.num_states;
        assert!(n <= 64, "state space exceeds the subset-mask width");
        let full: Mask = if n == 64 { !0 } else { (1 << n) - 1 };
        let sym_maps = dfa.symbol_maps();

        // image closure from X, then singletons
        let mut masks: Vec<Mask> = Vec::new();
        let mut index: HashMap<Mask, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut push = |m: Mask, masks: &mut Vec<Mask>, index: &mut HashMap<Mask, usize>,
                        queue: &mut VecDeque<Mask>| {
            if !index.contains_key(&m) {
                index.insert(m, masks.len());
                masks.push(m);
                queue.push_back(m);
            }
        };
        push(full, &mut masks, &mut index, &mut queue);
        while let Some(m) = queue.pop_front() {
            for g in &sym_maps {
                push(apply_mask(m, g), &mut masks, &mut index, &mut queue);
            }
        }
        for q in 0..n {
            push(1 << q, &mut masks, &mut index, &mut queue);
            while let Some(m) = queue.pop_front() {
                for g in &sym_maps {
                    push(apply_mask(m, g), &mut masks, &mut index, &mut queue);
                }
            }
        }

        // orbits (within the image set) for the subduction preorder
        let count = masks.len();
        let mut orbit: Vec<Vec<usize>> = Vec::with_capacity(count);
        for i in 0..count {
            let mut seen = vec![false; count];
            let mut q = VecDeque::from([i]);
            seen[i] = true;
            let mut members = vec![i];
            while let Some(j) = q.pop_front() {
                for g in &sym_maps {
                    let k = index[&apply_mask(masks[j], g)];
                    if !seen[k] {
                        seen[k] = true;
                        members.push(k);
                        q.push_back(k);
                    }
                }
            }
            orbit.push(members);
        }
        let below = |i: usize, j: usize, orbit: &Vec<Vec<usize>>, masks: &Vec<Mask>| -> bool {
            orbit[j].iter().any(|&z| masks[i] & masks[z] == masks[i])
        };

        // equivalence classes under mutual subduction
        let mut class_of = vec![usize::MAX; count];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..count {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class_of[i] = c;
            let mut members = vec![i];
            for j in (i + 1)..count {
                if class_of[j] == usize::MAX
                    && mask_size(masks[i]) == mask_size(masks[j])
                    && below(i, j, &orbit, &masks)
                    && below(j, i, &orbit, &masks)
                {
                    class_of[j] = c;
                    members.push(j);
                }
            }
            classes.push(members);
        }

        // representatives: X for its own class, the smallest mask otherwise
        let mut rep_of_class: Vec<usize> = classes
            .iter()
            .map(|members| *members.iter().min_by_key(|&&i| masks[i]).unwrap())
            .collect();
        rep_of_class[class_of[index[&full]]] = index[&full];

        // heights: longest strict subduction chain below; singletons at 0
        let num_classes = classes.len();
        let mut height = vec![usize::MAX; num_classes];
        fn height_of(
            c: usize,
            classes: &[Vec<usize>],
            masks: &[Mask],
            orbit: &Vec<Vec<usize>>,
            class_of: &[usize],
            height: &mut Vec<usize>,
        ) -> usize {
            if height[c] != usize::MAX {
                return height[c];
            }
            let rep = classes[c][0];
            if mask_size(masks[rep]) == 1 {
                height[c] = 0;
                return 0;
            }
            // guard against (impossible) cycles while recursing
            height[c] = 0;
            let mut best = 0;
            for other in 0..classes.len() {
                if other == c {
                    continue;
                }
                let o_rep = classes[other][0];
                let strictly_below = orbit[rep]
                    .iter()
                    .any(|&z| masks[o_rep] & masks[z] == masks[o_rep])
                    && class_of[o_rep] != c;
                if strictly_below {
                    best = best
                        .max(1 + height_of(other, classes, masks, orbit, class_of, height));
                }
            }
            height[c] = best;
            best
        }
        for c in 0..num_classes {
            height_of(c, &classes, &masks, &orbit, &class_of, &mut height);
        }

        // tiles of representatives: maximal proper sub-images
        let mut tiles: Vec<Vec<Mask>> = vec![Vec::new(); count];
        for c in 0..num_classes {
            let r = rep_of_class[c];
            if mask_size(masks[r]) < 2 {
                continue;
            }
            let subs: Vec<Mask> = masks
                .iter()
                .copied()
                .filter(|&m| m & masks[r] == m && m != masks[r])
                .collect();
            let mut maximal: Vec<Mask> = subs
                .iter()
                .copied()
                .filter(|&m| !subs.iter().any(|&o| o != m && m & o == m))
                .collect();
            maximal.sort();
            tiles[r] = maximal;
        }

        // witness transformations between representatives and members
        let mut iota: HashMap<Mask, Map> = HashMap::new();
        let mut omega: HashMap<Mask, Map> = HashMap::new();
        let identity: Map = (0..n).collect();
        for c in 0..num_classes {
            let r = rep_of_class[c];
            if mask_size(masks[r]) < 2 {
                continue;
            }
            for &member in &classes[c] {
                if member == r {
                    iota.insert(masks[r], identity.clone());
                    omega.insert(masks[r], identity.clone());
                    continue;
                }
                iota.insert(
                    masks[member],
                    witness(masks[r], masks[member], &sym_maps, &identity)?,
                );
                omega.insert(
                    masks[member],
                    witness(masks[member], masks[r], &sym_maps, &identity)?,
                );
            }
        }

        Ok(Skeleton {
            full,
            sym_maps,
            masks,
            index,
            class_of,
            rep_of_class,
            height,
            tiles,
            iota,
            omega,
        })
    }

    fn rep_idx_of(&self, mask: Mask) -> usize {
        self.rep_of_class[self.class_of[self.index[&mask]]]
    }

    fn level_of_rep(&self, rep_idx: usize) -> usize {
        self.height[self.class_of[rep_idx]]
    }

    /// Canonical tile of the representative `rep_idx` containing `inner`.
    fn cover(&self, rep_idx: usize, inner: Mask) -> Mask {
        debug_assert!(inner & self.masks[rep_idx] == inner && inner != self.masks[rep_idx]);
        *self.tiles[rep_idx]
            .iter()
            .find(|&&t| inner & t == inner)
            .expect("tiles cover every proper sub-image")
    }

    /// Canonical chain encoding of a single automaton state.
    fn encode(&self, state: usize) -> Vec<Link> {
        let mut links = Vec::new();
        let mut rep = self.index[&self.full];
        let mut point = state;
        loop {
            if mask_size(self.masks[rep]) == 1 {
                break;
            }
            let tile = self.cover(rep, 1 << point);
            links.push((rep, tile));
            if mask_size(tile) == 1 {
                break;
            }
            point = apply_point(&self.omega[&tile], point);
            rep = self.rep_idx_of(tile);
        }
        links
    }

    /// Decode a chain back to the automaton state it encodes.
    fn decode(&self, links: &[Link]) -> usize {
        if links.is_empty() {
            return mask_elem(self.full);
        }
        let mut point = mask_elem(links.last().unwrap().1);
        for &(_, tile) in links.iter().rev().skip(1) {
            point = apply_point(&self.iota[&tile], point);
        }
        point
    }

    /// Top-down chain update under one input symbol.
    fn update(&self, links: &[Link], symbol: usize) -> Vec<Link> {
        let s = &self.sym_maps[symbol];
        if apply_mask(self.full, s) == self.full {
            // bijective on X, hence the identity pointwise (aperiodicity)
            return links.to_vec();
        }
        let mut out: Vec<Link> = Vec::with_capacity(links.len() + 1);
        let mut rep = self.index[&self.full];
        let mut v: Map = s.clone();
        let mut j = 0usize;
        loop {
            if mask_size(self.masks[rep]) == 1 {
                break;
            }
            let (old_rep, old_tile) = links[j];
            let incoming = apply_mask(self.masks[old_rep], &v);
            debug_assert!(incoming & self.masks[rep] == incoming);
            if incoming != self.masks[rep] {
                // the image already drops strictly inside the new representative
                let tile = self.cover(rep, incoming);
                out.push((rep, tile));
                if mask_size(tile) == 1 {
                    break;
                }
                v = compose(&v, &self.omega[&tile]);
                rep = self.rep_idx_of(tile);
            } else if mask_size(old_tile) == 1 {
                // the tracked point is pinned; finish deterministically
                let mut point = apply_point(&v, mask_elem(old_tile));
                loop {
                    if mask_size(self.masks[rep]) == 1 {
                        break;
                    }
                    let tile = self.cover(rep, 1 << point);
                    out.push((rep, tile));
                    if mask_size(tile) == 1 {
                        break;
                    }
                    point = apply_point(&self.omega[&tile], point);
                    rep = self.rep_idx_of(tile);
                }
                return out;
            } else {
                let f = apply_mask(old_tile, &v);
                if f != self.masks[rep] {
                    let tile = self.cover(rep, f);
                    out.push((rep, tile));
                    if mask_size(tile) == 1 {
                        break;
                    }
                    v = compose(&compose(&self.iota[&old_tile], &v), &self.omega[&tile]);
                    rep = self.rep_idx_of(tile);
                    j += 1;
                } else {
                    // no information gained at this link; translate deeper
                    v = compose(&self.iota[&old_tile], &v);
                    j += 1;
                }
            }
        }
        out
    }
}

fn witness(from: Mask, to: Mask, sym_maps: &[Map], identity: &Map) -> Result<Map, CompileError> {
    // BFS over exact images, composing transformations
    let mut seen: HashMap<Mask, Map> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(from, identity.clone());
    queue.push_back(from);
    while let Some(m) = queue.pop_front() {
        let map_so_far = seen[&m].clone();
        if m == to {
            return Ok(map_so_far);
        }
        for g in sym_maps {
            let next = apply_mask(m, g);
            if !seen.contains_key(&next) {
                seen.insert(next, compose(&map_so_far, g));
                queue.push_back(next);
            }
        }
    }
    Err(CompileError::Internal("no witness transformation between equivalent images".into()))
}

/// Decompose an aperiodic DFA into a cascade of set-reset components.
///
/// Refuses non-aperiodic input: nonnegative-gated models cannot track the
/// modular structure such automata require.
pub fn krohn_rhodes_decompose(dfa: &Dfa) -> Result<CascadeProgram, CompileError> {
    if !dfa.is_aperiodic() {
        return Err(CompileError::NonStarFree { monoid_size: dfa.monoid_size() });
    }
    if dfa.num_states == 1 {
        let mut output = HashMap::new();
        output.insert(Vec::new(), dfa.start);
        return Ok(CascadeProgram {
            alphabet: dfa.alphabet.clone(),
            components: Vec::new(),
            level_heights: Vec::new(),
            start_tuple: Vec::new(),
            output,
            dfa_start: dfa.start,
        });
    }
    let sk = Skeleton::build(dfa)?;

    // enumerate reachable chains
    let start_chain = sk.encode(dfa.start);
    let mut chains: Vec<Vec<Link>> = vec![start_chain.clone()];
    let mut chain_ids: HashMap<Vec<Link>, usize> = HashMap::new();
    chain_ids.insert(start_chain, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    while let Some(id) = queue.pop_front() {
        let chain = chains[id].clone();
        let mut row = Vec::with_capacity(dfa.alphabet.len());
        for s in 0..dfa.alphabet.len() {
            let next = sk.update(&chain, s);
            let next_id = match chain_ids.get(&next) {
                Some(&i) => i,
                None => {
                    let i = chains.len();
                    chain_ids.insert(next.clone(), i);
                    chains.push(next);
                    queue.push_back(i);
                    if i > 200_000 {
                        return Err(CompileError::Internal(
                            "cascade state space exploded".into(),
                        ));
                    }
                    i
                }
            };
            row.push(next_id);
        }
        transitions.push(row);
        if transitions.len() < chains.len() {
            // rows are pushed in BFS order; keep indices aligned
            debug_assert_eq!(transitions.len(), id + 1);
        }
    }

    // sanity: chase every chain's decode against the DFA transition
    for (id, chain) in chains.iter().enumerate() {
        let x = sk.decode(chain);
        for s in 0..dfa.alphabet.len() {
            let next = &chains[transitions[id][s]];
            if sk.decode(next) != dfa.trans[x][s] {
                return Err(CompileError::Internal(format!(
                    "chain update diverged from the automaton on symbol {s}"
                )));
            }
        }
    }

    // levels, top down
    let top_level = sk.level_of_rep(sk.rep_idx_of(sk.full));
    let levels: Vec<usize> = (1..=top_level).rev().collect();
    let coords_of = |chain: &[Link]| -> Vec<Option<Link>> {
        let mut coords = vec![None; levels.len()];
        for &link in chain {
            let lvl = sk.level_of_rep(link.0);
            let idx = levels.iter().position(|&l| l == lvl).expect("link level in range");
            debug_assert!(coords[idx].is_none(), "two links on one level");
            coords[idx] = Some(link);
        }
        coords
    };
    let all_coords: Vec<Vec<Option<Link>>> = chains.iter().map(|c| coords_of(c)).collect();

    // per-level state enumeration, start state first
    let mut level_states: Vec<Vec<Option<Link>>> = Vec::new();
    for li in 0..levels.len() {
        let start_val = all_coords[0][li];
        let mut states = vec![start_val];
        for coords in &all_coords {
            if !states.contains(&coords[li]) {
                states.push(coords[li]);
            }
        }
        level_states.push(states);
    }
    let state_id = |li: usize, val: &Option<Link>| -> usize {
        level_states[li].iter().position(|v| v == val).expect("enumerated level state")
    };

    // tuples per chain
    let tuples: Vec<Vec<usize>> = all_coords
        .iter()
        .map(|coords| (0..levels.len()).map(|li| state_id(li, &coords[li])).collect())
        .collect();

    // wiring per level, with the set-reset property checked as we go
    let mut components = Vec::with_capacity(levels.len());
    for li in 0..levels.len() {
        // (prefix, symbol) -> observed own-state map
        let mut observed: HashMap<(Vec<usize>, usize), HashMap<usize, usize>> = HashMap::new();
        for (id, tuple) in tuples.iter().enumerate() {
            for s in 0..dfa.alphabet.len() {
                let next_tuple = &tuples[transitions[id][s]];
                let key = (tuple[..li].to_vec(), s);
                let entry = observed.entry(key).or_default();
                match entry.insert(tuple[li], next_tuple[li]) {
                    Some(prev) if prev != next_tuple[li] => {
                        return Err(CompileError::Internal(format!(
                            "level {li} update is not a function of the levels above"
                        )));
                    }
                    _ => {}
                }
            }
        }
        let mut wiring = HashMap::new();
        for ((prefix, s), own_map) in observed {
            let identity = own_map.iter().all(|(a, b)| a == b);
            if identity {
                wiring.insert((prefix, s), Action::Identity);
                continue;
            }
            let mut targets: Vec<usize> = own_map.values().copied().collect();
            targets.sort_unstable();
            targets.dedup();
            if targets.len() == 1 {
                wiring.insert((prefix, s), Action::Reset(targets[0]));
            } else {
                return Err(CompileError::Internal(format!(
                    "level {li} action is neither an identity nor a reset"
                )));
            }
        }
        components.push(CascadeComponent {
            num_states: level_states[li].len(),
            state_descr: level_states[li]
                .iter()
                .map(|v| v.map(|(rep, tile)| (sk.masks[rep], tile)))
                .collect(),
            wiring,
        });
    }

    let mut output = HashMap::new();
    for (id, tuple) in tuples.iter().enumerate() {
        output.insert(tuple.clone(), sk.decode(&chains[id]));
    }

    Ok(CascadeProgram {
        alphabet: dfa.alphabet.clone(),
        components,
        level_heights: levels,
        start_tuple: tuples[0].clone(),
        output,
        dfa_start: dfa.start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::{regular_catalog, star_free_catalog, Language, LanguageSpec};

    fn check_program(dfa: &Dfa, max_len: usize) {
        let program = krohn_rhodes_decompose(dfa).expect("aperiodic input");
        // exhaustive agreement of the cascade with the automaton
        let mut words = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &words {
                if w.len() + 1 == max_len + 1 {
                    continue;
                }
                for s in 0..dfa.alphabet.len() {
                    let mut w2: Vec<usize> = w.clone();
                    w2.push(s);
                    next.push(w2);
                }
            }
            for w in &next {
                assert_eq!(program.run(w), dfa.run(w).unwrap(), "word {w:?}");
            }
            words = next;
        }
    }

    #[test]
    fn tomita1_needs_a_single_component() {
        let lang = Language::new(LanguageSpec::Tomita(1));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        assert_eq!(program.components.len(), 1);
        assert_eq!(program.components[0].num_states, 2);
        check_program(&dfa, 10);
    }

    #[test]
    fn parity_is_refused() {
        let lang = Language::new(LanguageSpec::Parity);
        let dfa = lang.dfa().unwrap().minimize();
        match krohn_rhodes_decompose(&dfa) {
            Err(CompileError::NonStarFree { monoid_size }) => assert!(monoid_size >= 2),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn d2_cascade_matches_dfa() {
        let lang = Language::new(LanguageSpec::Dn(2));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        assert!(program.components.len() <= dfa.num_states);
        check_program(&dfa, 8);
    }

    #[test]
    fn all_star_free_catalog_members_decompose_exactly() {
        for spec in star_free_catalog() {
            let lang = Language::new(spec);
            let dfa = lang.dfa().unwrap().minimize();
            let max_len = if dfa.alphabet.len() > 2 { 5 } else { 8 };
            check_program(&dfa, max_len);
        }
    }

    #[test]
    fn flip_flop_dfa_decomposes() {
        let lang = Language::new(LanguageSpec::FlipFlop);
        let dfa = lang.dfa().unwrap().minimize();
        check_program(&dfa, 6);
    }

    #[test]
    fn non_star_free_members_are_refused() {
        for (spec, star_free) in regular_catalog() {
            if star_free {
                continue;
            }
            let lang = Language::new(spec);
            let dfa = lang.dfa().unwrap().minimize();
            assert!(
                matches!(krohn_rhodes_decompose(&dfa), Err(CompileError::NonStarFree { .. })),
                "{spec} should be refused"
            );
        }
    }

    #[test]
    fn debug_serialization_is_stable() {
        let lang = Language::new(LanguageSpec::Tomita(4));
        let dfa = lang.dfa().unwrap().minimize();
        let program = krohn_rhodes_decompose(&dfa).unwrap();
        let a = program.to_debug_json();
        let b = krohn_rhodes_decompose(&dfa).unwrap().to_debug_json();
        assert_eq!(a, b);
        assert!(a.contains("wiring"));
    }
}
