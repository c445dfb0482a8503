//! Formal-language catalog, automata, generators, and predictive-label
//! oracles.

mod alphabet;
mod catalog;
mod dfa;
mod sample;

pub use alphabet::{Alphabet, LanguageError, PredictiveLabel, Word, BOS, EOS};
pub use catalog::{
    counter_catalog, regular_catalog, star_free_catalog, Language, LanguageSpec, OracleState,
};
pub use dfa::{Dfa, SetResetAutomaton};
pub use sample::{generate_samples, generate_words, FlipFlopMode, SampleOptions};
