//! Model serialization: a single JSON document with exact decimal strings
//! for grid values and {"rot": "a/b"} records for rotation gates. Save/load
//! round-trips are bit-exact.

use serde::{Deserialize, Serialize};

use crate::languages::{Alphabet, PredictiveLabel, EOS};
use crate::numerics::{FixedPoint, FixedVector, UnitRotation};

use super::decoder::{Atom, Decoder, Predicate};
use super::layer::SsmLayer;
use super::mix::{AffineMap, MixSpec};
use super::model::{ModelFlags, Readout, ReadoutTable, SsmModel};
use super::value::{GateEntry, StateValue};
use super::SsmError;

#[derive(Serialize, Deserialize)]
struct ModelDto {
    precision: u8,
    flags: FlagsDto,
    alphabet: Vec<String>,
    embedding: Vec<Vec<String>>,
    layers: Vec<LayerDto>,
    readout: ReadoutDto,
}

#[derive(Serialize, Deserialize)]
struct FlagsDto {
    nonnegative: bool,
    time_invariant: bool,
}

#[derive(Serialize, Deserialize)]
struct LayerDto {
    d_in: usize,
    d: usize,
    decoder: Vec<RuleDto>,
    #[serde(rename = "gateTable")]
    gate_table: Vec<Vec<EntryDto>>,
    #[serde(rename = "incTable")]
    inc_table: Vec<Vec<String>>,
    h0: Vec<EntryDto>,
    mix2: MixDto,
    normalize: bool,
    mix1: MixDto,
}

#[derive(Serialize, Deserialize)]
struct RuleDto {
    when: Vec<AtomDto>,
    tag: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op")]
enum AtomDto {
    #[serde(rename = "ge")]
    Ge { coord: usize, value: String },
    #[serde(rename = "le")]
    Le { coord: usize, value: String },
    #[serde(rename = "phase")]
    Phase { coord: usize, value: String },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryDto {
    Real(String),
    Rot { rot: String },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum MixDto {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "affine")]
    Affine { weight: Vec<Vec<String>>, bias: Vec<String>, use_x: bool },
    #[serde(rename = "glu")]
    Glu { linear: Box<MixDto>, gate: Box<MixDto> },
    #[serde(rename = "swiglu")]
    SwiGlu { linear: Box<MixDto>, gate: Box<MixDto> },
}

#[derive(Serialize, Deserialize)]
struct ReadoutDto {
    decoder: Vec<RuleDto>,
    #[serde(rename = "labels", skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<String>>>,
    #[serde(rename = "accept", skip_serializing_if = "Option::is_none")]
    accept: Option<Vec<bool>>,
}

fn fp_to_dto(x: &FixedPoint) -> String {
    x.to_decimal_string()
}

fn fp_from_dto(s: &str, p: u8) -> Result<FixedPoint, SsmError> {
    FixedPoint::from_decimal_string(s, p).map_err(|e| SsmError::Format(e.to_string()))
}

fn vec_to_dto(v: &FixedVector) -> Vec<String> {
    v.iter().map(fp_to_dto).collect()
}

fn vec_from_dto(v: &[String], p: u8) -> Result<FixedVector, SsmError> {
    v.iter().map(|s| fp_from_dto(s, p)).collect()
}

fn rot_from_dto(s: &str) -> Result<UnitRotation, SsmError> {
    UnitRotation::from_fraction_string(s)
        .ok_or_else(|| SsmError::Format(format!("bad rotation {s:?}")))
}

fn decoder_to_dto(d: &Decoder) -> Vec<RuleDto> {
    d.rules
        .iter()
        .map(|(pred, tag)| RuleDto {
            when: pred
                .atoms
                .iter()
                .map(|a| match a {
                    Atom::Ge(c, v) => AtomDto::Ge { coord: *c, value: fp_to_dto(v) },
                    Atom::Le(c, v) => AtomDto::Le { coord: *c, value: fp_to_dto(v) },
                    Atom::PhaseIs(c, r) => {
                        AtomDto::Phase { coord: *c, value: r.to_fraction_string() }
                    }
                })
                .collect(),
            tag: *tag,
        })
        .collect()
}

fn decoder_from_dto(rules: &[RuleDto], p: u8) -> Result<Decoder, SsmError> {
    let rules = rules
        .iter()
        .map(|r| {
            let atoms = r
                .when
                .iter()
                .map(|a| {
                    Ok(match a {
                        AtomDto::Ge { coord, value } => Atom::Ge(*coord, fp_from_dto(value, p)?),
                        AtomDto::Le { coord, value } => Atom::Le(*coord, fp_from_dto(value, p)?),
                        AtomDto::Phase { coord, value } => {
                            Atom::PhaseIs(*coord, rot_from_dto(value)?)
                        }
                    })
                })
                .collect::<Result<Vec<_>, SsmError>>()?;
            Ok((Predicate::new(atoms), r.tag))
        })
        .collect::<Result<Vec<_>, SsmError>>()?;
    Ok(Decoder::new(rules))
}

fn mix_to_dto(m: &MixSpec) -> MixDto {
    match m {
        MixSpec::Identity => MixDto::Identity,
        MixSpec::Affine(a) => MixDto::Affine {
            weight: a.weight.iter().map(|r| vec_to_dto(r)).collect(),
            bias: vec_to_dto(&a.bias),
            use_x: a.use_x,
        },
        MixSpec::Glu { linear, gate } => MixDto::Glu {
            linear: Box::new(mix_to_dto(&MixSpec::Affine(linear.clone()))),
            gate: Box::new(mix_to_dto(&MixSpec::Affine(gate.clone()))),
        },
        MixSpec::SwiGlu { linear, gate } => MixDto::SwiGlu {
            linear: Box::new(mix_to_dto(&MixSpec::Affine(linear.clone()))),
            gate: Box::new(mix_to_dto(&MixSpec::Affine(gate.clone()))),
        },
    }
}

fn affine_from_dto(m: &MixDto, p: u8) -> Result<AffineMap, SsmError> {
    match m {
        MixDto::Affine { weight, bias, use_x } => Ok(AffineMap {
            weight: weight.iter().map(|r| vec_from_dto(r, p)).collect::<Result<_, _>>()?,
            bias: vec_from_dto(bias, p)?,
            use_x: *use_x,
        }),
        _ => Err(SsmError::Format("expected an affine mix branch".into())),
    }
}

fn mix_from_dto(m: &MixDto, p: u8) -> Result<MixSpec, SsmError> {
    Ok(match m {
        MixDto::Identity => MixSpec::Identity,
        MixDto::Affine { .. } => MixSpec::Affine(affine_from_dto(m, p)?),
        MixDto::Glu { linear, gate } => {
            MixSpec::Glu { linear: affine_from_dto(linear, p)?, gate: affine_from_dto(gate, p)? }
        }
        MixDto::SwiGlu { linear, gate } => {
            MixSpec::SwiGlu { linear: affine_from_dto(linear, p)?, gate: affine_from_dto(gate, p)? }
        }
    })
}

/// Serialize a model to pretty JSON.
pub fn save_model(model: &SsmModel) -> String {
    let p = model.precision;
    let _ = p;
    let dto = ModelDto {
        precision: model.precision,
        flags: FlagsDto {
            nonnegative: model.flags.nonnegative,
            time_invariant: model.flags.time_invariant,
        },
        alphabet: model.alphabet.symbols().to_vec(),
        embedding: model.embedding.iter().map(vec_to_dto).collect(),
        layers: model
            .layers
            .iter()
            .map(|l| LayerDto {
                d_in: l.d_in,
                d: l.d,
                decoder: decoder_to_dto(&l.decoder),
                gate_table: l
                    .gate
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|g| match g {
                                GateEntry::Real(x) => EntryDto::Real(fp_to_dto(x)),
                                GateEntry::Phase(r) => {
                                    EntryDto::Rot { rot: r.to_fraction_string() }
                                }
                            })
                            .collect()
                    })
                    .collect(),
                inc_table: l.inc.iter().map(vec_to_dto).collect(),
                h0: l
                    .h0
                    .iter()
                    .map(|v| match v {
                        StateValue::Real(x) => EntryDto::Real(fp_to_dto(x)),
                        StateValue::Phase(r) => EntryDto::Rot { rot: r.to_fraction_string() },
                    })
                    .collect(),
                mix2: mix_to_dto(&l.mix2),
                normalize: l.normalize,
                mix1: mix_to_dto(&l.mix1),
            })
            .collect(),
        readout: ReadoutDto {
            decoder: decoder_to_dto(&model.readout.decoder),
            labels: match &model.readout.table {
                ReadoutTable::Labels(t) => Some(
                    t.iter()
                        .map(|l| {
                            let mut names: Vec<String> = l
                                .symbols()
                                .filter(|&s| s < model.alphabet.len())
                                .map(|s| model.alphabet.name(s).to_string())
                                .collect();
                            if l.eos() {
                                names.push(EOS.to_string());
                            }
                            names
                        })
                        .collect(),
                ),
                ReadoutTable::Accept(_) => None,
            },
            accept: match &model.readout.table {
                ReadoutTable::Accept(t) => Some(t.clone()),
                ReadoutTable::Labels(_) => None,
            },
        },
    };
    serde_json::to_string_pretty(&dto).expect("model serialization")
}

/// Parse a model from JSON.
pub fn load_model(text: &str) -> Result<SsmModel, SsmError> {
    let dto: ModelDto = serde_json::from_str(text).map_err(|e| SsmError::Format(e.to_string()))?;
    let p = dto.precision;
    let alphabet =
        Alphabet::new(dto.alphabet.clone()).map_err(|e| SsmError::Format(e.to_string()))?;
    let embedding = dto
        .embedding
        .iter()
        .map(|e| vec_from_dto(e, p))
        .collect::<Result<Vec<_>, _>>()?;
    let layers = dto
        .layers
        .iter()
        .map(|l| {
            Ok(SsmLayer {
                d_in: l.d_in,
                d: l.d,
                decoder: decoder_from_dto(&l.decoder, p)?,
                gate: l
                    .gate_table
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|g| {
                                Ok(match g {
                                    EntryDto::Real(s) => GateEntry::Real(fp_from_dto(s, p)?),
                                    EntryDto::Rot { rot } => GateEntry::Phase(rot_from_dto(rot)?),
                                })
                            })
                            .collect::<Result<Vec<_>, SsmError>>()
                    })
                    .collect::<Result<Vec<_>, SsmError>>()?,
                inc: l
                    .inc_table
                    .iter()
                    .map(|row| vec_from_dto(row, p))
                    .collect::<Result<Vec<_>, _>>()?,
                h0: l
                    .h0
                    .iter()
                    .map(|v| {
                        Ok(match v {
                            EntryDto::Real(s) => StateValue::Real(fp_from_dto(s, p)?),
                            EntryDto::Rot { rot } => StateValue::Phase(rot_from_dto(rot)?),
                        })
                    })
                    .collect::<Result<Vec<_>, SsmError>>()?,
                mix2: mix_from_dto(&l.mix2, p)?,
                normalize: l.normalize,
                mix1: mix_from_dto(&l.mix1, p)?,
            })
        })
        .collect::<Result<Vec<_>, SsmError>>()?;
    let table = match (&dto.readout.labels, &dto.readout.accept) {
        (Some(labels), None) => {
            let mut out = Vec::with_capacity(labels.len());
            for names in labels {
                let mut l = PredictiveLabel::empty();
                for n in names {
                    if n == EOS {
                        l.set_eos(true);
                    } else {
                        let id =
                            alphabet.id(n).map_err(|e| SsmError::Format(e.to_string()))?;
                        l.insert(id);
                    }
                }
                out.push(l);
            }
            ReadoutTable::Labels(out)
        }
        (None, Some(bits)) => ReadoutTable::Accept(bits.clone()),
        _ => return Err(SsmError::Format("readout must carry labels xor accept bits".into())),
    };
    let model = SsmModel {
        precision: p,
        flags: ModelFlags {
            nonnegative: dto.flags.nonnegative,
            time_invariant: dto.flags.time_invariant,
        },
        alphabet,
        embedding,
        layers,
        readout: Readout { decoder: decoder_from_dto(&dto.readout.decoder, p)?, table },
    };
    model.validate()?;
    Ok(model)
}
