//! Bit-exact simulation: run, trace, and recognition. A `Runner` caches the
//! per-symbol layer-1 decode; `ModelState` snapshots support incremental
//! prefix evaluation.

use crate::languages::{LanguageError, PredictiveLabel};
use crate::numerics::FixedPoint;

use super::model::{ReadoutTable, SsmModel};
use super::value::{real_vector, StateValue, StateVector};
use super::SsmError;

/// Per-position model outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outputs {
    Labels(Vec<PredictiveLabel>),
    Accepts(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Output {
    Label(PredictiveLabel),
    Accept(bool),
}

/// Full activation record: h and z per layer per position.
#[derive(Clone, Debug)]
pub struct Trace {
    /// h[layer][t][coord], t = 0..|w|-1 (after consuming symbol t+1)
    pub h: Vec<Vec<StateVector>>,
    /// z[layer][t][coord]
    pub z: Vec<Vec<StateVector>>,
}

/// Mutable per-run state: one hidden vector per layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelState {
    pub h: Vec<StateVector>,
}

pub struct Runner<'m> {
    pub model: &'m SsmModel,
    embeddings: Vec<StateVector>,
    layer1_tags: Vec<usize>,
    strict: bool,
}

impl<'m> Runner<'m> {
    pub fn new(model: &'m SsmModel) -> Result<Self, SsmError> {
        Self::with_strictness(model, false)
    }

    /// Strict runners verify that decoder rules are mutually exclusive on
    /// every vector they see (used by tests and verification probes).
    pub fn with_strictness(model: &'m SsmModel, strict: bool) -> Result<Self, SsmError> {
        let embeddings: Vec<StateVector> =
            model.embedding.iter().map(|e| real_vector(e)).collect();
        let first = model.layers.first().ok_or(SsmError::Dimension("no layers".into()))?;
        let mut layer1_tags = Vec::with_capacity(embeddings.len());
        for e in &embeddings {
            let tag = if strict { first.decoder.decode_strict(e)? } else { first.decoder.decode(e)? };
            layer1_tags.push(tag);
        }
        Ok(Runner { model, embeddings, layer1_tags, strict })
    }

    pub fn start(&self) -> ModelState {
        ModelState { h: self.model.layers.iter().map(|l| l.h0.clone()).collect() }
    }

    /// Feed one symbol; returns the top-layer z.
    pub fn step(&self, state: &mut ModelState, symbol: usize) -> Result<StateVector, SsmError> {
        self.step_inner(state, symbol, &mut None)
    }

    fn step_inner(
        &self,
        state: &mut ModelState,
        symbol: usize,
        capture: &mut Option<(&mut Vec<Vec<StateVector>>, &mut Vec<Vec<StateVector>>)>,
    ) -> Result<StateVector, SsmError> {
        if symbol >= self.embeddings.len() {
            return Err(SsmError::OutOfAlphabet(symbol));
        }
        let mut x = self.embeddings[symbol].clone();
        for (i, layer) in self.model.layers.iter().enumerate() {
            let tag = if i == 0 {
                self.layer1_tags[symbol]
            } else if self.strict {
                layer.decoder.decode_strict(&x)?
            } else {
                layer.decoder.decode(&x)?
            };
            let z = layer.step(&mut state.h[i], &x, tag)?;
            if let Some((hs, zs)) = capture {
                hs[i].push(state.h[i].clone());
                zs[i].push(z.clone());
            }
            x = z;
        }
        Ok(x)
    }

    /// Readout of a top-layer activation.
    pub fn read(&self, z: &StateVector) -> Result<Output, SsmError> {
        let tag = if self.strict {
            self.model.readout.decoder.decode_strict(z)?
        } else {
            self.model.readout.decoder.decode(z)?
        };
        Ok(match &self.model.readout.table {
            ReadoutTable::Labels(t) => Output::Label(t[tag]),
            ReadoutTable::Accept(t) => Output::Accept(t[tag]),
        })
    }

    /// Top-layer activation at position 0 (before any symbol): each layer
    /// transforms its h0 with a zero input; used to recognize the empty word.
    pub fn initial_z(&self) -> Result<StateVector, SsmError> {
        let mut x: StateVector =
            real_vector(&vec![FixedPoint::zero(self.model.precision); self.model.embedding[0].len()]);
        let mut state = self.start();
        for (i, layer) in self.model.layers.iter().enumerate() {
            x = layer.transform(&state.h[i], &x)?;
            state.h[i] = layer.h0.clone();
        }
        Ok(x)
    }
}

/// Feed a word through the model and apply the readout at every position.
pub fn run_model(model: &SsmModel, word: &[usize]) -> Result<Outputs, SsmError> {
    run_model_opts(model, word, false)
}

pub fn run_model_opts(model: &SsmModel, word: &[usize], strict: bool) -> Result<Outputs, SsmError> {
    let runner = Runner::with_strictness(model, strict)?;
    let mut state = runner.start();
    match &model.readout.table {
        ReadoutTable::Labels(_) => {
            let mut out = Vec::with_capacity(word.len());
            for &s in word {
                let z = runner.step(&mut state, s)?;
                match runner.read(&z)? {
                    Output::Label(l) => out.push(l),
                    Output::Accept(_) => unreachable!(),
                }
            }
            Ok(Outputs::Labels(out))
        }
        ReadoutTable::Accept(_) => {
            let mut out = Vec::with_capacity(word.len());
            for &s in word {
                let z = runner.step(&mut state, s)?;
                match runner.read(&z)? {
                    Output::Accept(a) => out.push(a),
                    Output::Label(_) => unreachable!(),
                }
            }
            Ok(Outputs::Accepts(out))
        }
    }
}

/// Accept/reject the whole word at its final position.
///
/// Recognizer models read their accept bit; predictive models accept iff
/// EOS is legal after the final position.
pub fn recognize(model: &SsmModel, word: &[usize]) -> Result<bool, SsmError> {
    if word.is_empty() {
        return match &model.readout.table {
            ReadoutTable::Accept(_) => {
                let runner = Runner::new(model)?;
                let z = runner.initial_z()?;
                match runner.read(&z)? {
                    Output::Accept(a) => Ok(a),
                    Output::Label(_) => unreachable!(),
                }
            }
            ReadoutTable::Labels(_) => Err(SsmError::EmptyWord),
        };
    }
    match run_model(model, word)? {
        Outputs::Accepts(bits) => Ok(*bits.last().unwrap()),
        Outputs::Labels(labels) => Ok(labels.last().unwrap().eos()),
    }
}

/// Same computation as `run_model` with all intermediates retained.
pub fn trace(model: &SsmModel, word: &[usize]) -> Result<Trace, SsmError> {
    let runner = Runner::new(model)?;
    let mut state = runner.start();
    let layers = model.layers.len();
    let mut hs: Vec<Vec<StateVector>> = vec![Vec::with_capacity(word.len()); layers];
    let mut zs: Vec<Vec<StateVector>> = vec![Vec::with_capacity(word.len()); layers];
    for &s in word {
        runner.step_inner(&mut state, s, &mut Some((&mut hs, &mut zs)))?;
    }
    Ok(Trace { h: hs, z: zs })
}

/// Every fixed-point value appearing in a trace, for grid-closure checks.
pub fn trace_values(tr: &Trace) -> impl Iterator<Item = &FixedPoint> {
    tr.h.iter()
        .chain(tr.z.iter())
        .flatten()
        .flatten()
        .filter_map(|v| match v {
            StateValue::Real(x) => Some(x),
            StateValue::Phase(_) => None,
        })
}

impl From<LanguageError> for SsmError {
    fn from(e: LanguageError) -> Self {
        SsmError::Language(e.to_string())
    }
}
