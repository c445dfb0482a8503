//! Representation and bit-exact finite-precision simulation of multi-layer
//! SSMs: the gated recurrence, the mix/normalize stack, and table-driven
//! readout.

mod decoder;
mod layer;
mod mix;
mod model;
mod run;
mod serial;
mod value;

use thiserror::Error;

pub use decoder::{atoms, Atom, Decoder, Predicate};
pub use layer::SsmLayer;
pub use mix::{sigmoid, swish, AffineMap, MixSpec};
pub use model::{ModelFlags, Readout, ReadoutTable, SsmModel};
pub use run::{
    recognize, run_model, run_model_opts, trace, trace_values, ModelState, Output, Outputs,
    Runner, Trace,
};
pub use serial::{load_model, save_model};
pub use value::{real_vector, ChannelKind, GateEntry, StateValue, StateVector};

#[derive(Debug, Error)]
pub enum SsmError {
    #[error("decoder predicate gap: no tag matches (compilation bug)")]
    DecoderGap,
    #[error("decoder rules overlap: tags {0} and {1} both match")]
    DecoderOverlap(usize, usize),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("phase channels require identity mixes and no normalization")]
    PhaseMix,
    #[error("phase channels take no increment")]
    PhaseIncrement,
    #[error("model violates its declared {0} flag")]
    FlagViolation(&'static str),
    #[error("symbol id {0} out of the model alphabet")]
    OutOfAlphabet(usize),
    #[error("numeric failure: {0}")]
    Numerics(#[from] crate::numerics::NumericsError),
    #[error("model lacks the readout needed for this query on the empty word")]
    EmptyWord,
    #[error("serialized model is malformed: {0}")]
    Format(String),
    #[error("language error: {0}")]
    Language(String),
}
