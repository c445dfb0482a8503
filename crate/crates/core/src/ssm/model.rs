//! Full models: embedding, layer stack, readout, and the machine-checkable
//! NONNEGATIVE / TIME-INVARIANT flags.

use crate::languages::{Alphabet, PredictiveLabel};
use crate::numerics::FixedVector;

use super::decoder::Decoder;
use super::value::GateEntry;
use super::layer::SsmLayer;
use super::SsmError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelFlags {
    /// every real gate entry is >= 0 and no gate is a nontrivial rotation
    pub nonnegative: bool,
    /// each layer's gate table maps every tag to the same value
    pub time_invariant: bool,
}

/// Final readout: a decoder over the top-layer z plus a tag-indexed table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Readout {
    pub decoder: Decoder,
    pub table: ReadoutTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReadoutTable {
    /// predictive modeling: tag -> set of legal next symbols
    Labels(Vec<PredictiveLabel>),
    /// recognition: tag -> accept bit
    Accept(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsmModel {
    pub precision: u8,
    pub flags: ModelFlags,
    pub alphabet: Alphabet,
    /// token embeddings, one per content symbol
    pub embedding: Vec<FixedVector>,
    pub layers: Vec<SsmLayer>,
    pub readout: Readout,
}

impl SsmModel {
    /// Structural validation: dimension chain, table totality, flag
    /// soundness.
    pub fn validate(&self) -> Result<(), SsmError> {
        if self.embedding.len() != self.alphabet.len() {
            return Err(SsmError::Dimension("embedding table incomplete".into()));
        }
        if self.layers.is_empty() {
            return Err(SsmError::Dimension("model has no layers".into()));
        }
        let mut width = self.embedding[0].len();
        for e in &self.embedding {
            if e.len() != width {
                return Err(SsmError::Dimension("embedding widths differ".into()));
            }
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.d_in != width {
                return Err(SsmError::Dimension(format!(
                    "layer {i} expects input width {} but receives {width}",
                    layer.d_in
                )));
            }
            layer.validate(self.precision)?;
            width = layer.out_dim();
        }
        match &self.readout.table {
            ReadoutTable::Labels(t) => {
                if t.len() != self.readout.decoder.num_tags() {
                    return Err(SsmError::Dimension("readout table incomplete".into()));
                }
            }
            ReadoutTable::Accept(t) => {
                if t.len() != self.readout.decoder.num_tags() {
                    return Err(SsmError::Dimension("readout table incomplete".into()));
                }
            }
        }
        self.check_flags()
    }

    /// Scan every gate table entry against the declared flags.
    pub fn check_flags(&self) -> Result<(), SsmError> {
        if self.flags.nonnegative {
            for layer in &self.layers {
                for row in &layer.gate {
                    for g in row {
                        match g {
                            GateEntry::Real(x) if !x.is_negative() => {}
                            GateEntry::Phase(r) if r.is_identity() => {}
                            _ => return Err(SsmError::FlagViolation("NONNEGATIVE")),
                        }
                    }
                }
            }
        }
        if self.flags.time_invariant {
            for layer in &self.layers {
                if let Some(first) = layer.gate.first() {
                    if layer.gate.iter().any(|row| row != first) {
                        return Err(SsmError::FlagViolation("TIME_INVARIANT"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_label_model(&self) -> bool {
        matches!(self.readout.table, ReadoutTable::Labels(_))
    }

    /// Widest layer state; the paper's d for single-width constructions.
    pub fn width(&self) -> usize {
        self.layers.iter().map(|l| l.d).max().unwrap_or(0)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }
}
