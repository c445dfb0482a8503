//! Constructive compilation passes: set-reset layers, previous-symbol
//! readout, cascade composition, Krohn-Rhodes decomposition, the Flip-Flop
//! model, counter layers, bounded-Dyck models, mod-k rotation counters, and
//! the signed-gate PARITY model.

mod bounded_dyck;
mod cascade;
mod counter;
mod flip_flop;
mod holonomy;
mod mod_counter;
mod parity;
mod readout_last;
mod set_reset;
mod star_free;

use thiserror::Error;

pub use bounded_dyck::compile_bounded_dyck;
pub use cascade::{cascade_compose, StateTracker};
pub use counter::{compile_counter, compile_counter_language, CounterLayer};
pub use flip_flop::compile_flip_flop;
pub use holonomy::{krohn_rhodes_decompose, Action, CascadeComponent, CascadeProgram};
pub use mod_counter::compile_mod_counter;
pub use parity::compile_parity_signed;
pub use readout_last::compile_readout_last;
pub use set_reset::{compile_set_reset, SetResetLayer};
pub use star_free::compile_star_free;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(
        "refused: the automaton is not aperiodic (transition monoid of size {monoid_size} \
         contains a nontrivial group), so no nonnegative-gated model tracks it at all lengths; \
         modular structure needs signed or rotation gates"
    )]
    NonStarFree { monoid_size: usize },
    #[error("set-reset automata need at least two states")]
    TooFewStates,
    #[error("alphabet needs at least two symbols")]
    TooFewSymbols,
    #[error("precision {0} is too coarse for the threshold margins of this construction (need >= {1})")]
    PrecisionTooLow(u8, u8),
    #[error("unsupported language for this pass: {0}")]
    Unsupported(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("internal compilation failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Ssm(#[from] crate::ssm::SsmError),
}

pub(crate) mod support {
    use crate::numerics::{FixedPoint, FixedVector};
    use crate::ssm::{atoms, Atom, GateEntry, ModelFlags, SsmLayer};

    /// One-hot token embeddings over the content alphabet.
    pub fn one_hot_embedding(n: usize, p: u8) -> Vec<FixedVector> {
        (0..n)
            .map(|s| {
                (0..n)
                    .map(|i| if i == s { FixedPoint::one(p) } else { FixedPoint::zero(p) })
                    .collect()
            })
            .collect()
    }

    pub fn code_width(num_states: usize) -> usize {
        if num_states <= 1 {
            0
        } else {
            (usize::BITS - (num_states - 1).leading_zeros()) as usize
        }
    }

    pub fn code_bits(state: usize, width: usize) -> Vec<bool> {
        (0..width).map(|b| (state >> b) & 1 == 1).collect()
    }

    /// Predicate atoms recognizing a binary state code at the given offset.
    /// Set bits stay >= 1/2 after normalization, clear bits stay exactly zero.
    pub fn code_atoms(state: usize, width: usize, offset: usize, p: u8) -> Vec<Atom> {
        code_bits(state, width)
            .into_iter()
            .enumerate()
            .map(|(b, set)| {
                if set {
                    atoms::ge_ratio(offset + b, 1, 2, p)
                } else {
                    Atom::Le(offset + b, FixedPoint::zero(p))
                }
            })
            .collect()
    }

    /// Gate and increment rows realizing one set-reset action on code dims.
    pub fn code_action(
        reset_to: Option<usize>,
        width: usize,
        p: u8,
    ) -> (Vec<GateEntry>, FixedVector) {
        match reset_to {
            None => (
                vec![GateEntry::Real(FixedPoint::one(p)); width],
                vec![FixedPoint::zero(p); width],
            ),
            Some(state) => (
                vec![GateEntry::Real(FixedPoint::zero(p)); width],
                code_bits(state, width)
                    .into_iter()
                    .map(|set| if set { FixedPoint::one(p) } else { FixedPoint::zero(p) })
                    .collect(),
            ),
        }
    }

    /// Compute the NONNEGATIVE / TIME-INVARIANT flags from the gate tables.
    pub fn derive_flags(layers: &[SsmLayer]) -> ModelFlags {
        let nonnegative = layers.iter().all(|l| {
            l.gate.iter().all(|row| {
                row.iter().all(|g| match g {
                    GateEntry::Real(x) => !x.is_negative(),
                    GateEntry::Phase(r) => r.is_identity(),
                })
            })
        });
        let time_invariant = layers.iter().all(|l| l.gate.windows(2).all(|w| w[0] == w[1]));
        ModelFlags { nonnegative, time_invariant }
    }
}
