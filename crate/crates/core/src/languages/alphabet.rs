//! Alphabets and predictive labels.

use std::fmt;

use thiserror::Error;

/// Reserved begin/end tokens. They are members of every alphabet but never
/// appear inside content words.
pub const BOS: &str = "BOS";
pub const EOS: &str = "EOS";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LanguageError {
    #[error("symbol {0:?} is not in the alphabet")]
    OutOfAlphabet(String),
    #[error("prefix has no completion in the language")]
    InvalidPrefix,
    #[error("no word of the language has a length in the requested range")]
    EmptyLengthRange,
    #[error("alphabet symbols must be distinct and different from BOS/EOS")]
    BadAlphabet,
}

/// Ordered set of content tokens plus the reserved BOS and EOS members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    content: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, LanguageError> {
        let content: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if content.is_empty() {
            return Err(LanguageError::BadAlphabet);
        }
        for (i, s) in content.iter().enumerate() {
            if s == BOS || s == EOS || content[..i].contains(s) {
                return Err(LanguageError::BadAlphabet);
            }
        }
        Ok(Alphabet { content })
    }

    /// Number of content symbols (BOS and EOS not counted).
    pub fn len(&self) -> usize {
        self.content.len()
    }

    pub fn is_empty(&self) -> bool {
        self.content.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.content
    }

    pub fn name(&self, id: usize) -> &str {
        &self.content[id]
    }

    pub fn id(&self, name: &str) -> Result<usize, LanguageError> {
        self.content
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| LanguageError::OutOfAlphabet(name.to_string()))
    }

    /// Parse a space-separated word into symbol ids.
    pub fn parse_word(&self, text: &str) -> Result<Word, LanguageError> {
        text.split_whitespace().map(|t| self.id(t)).collect()
    }

    pub fn render_word(&self, word: &[usize]) -> String {
        word.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(" ")
    }
}

/// Content word as alphabet indices.
pub type Word = Vec<usize>;

/// Set of legal next symbols: a subset of the content alphabet plus EOS.
/// BOS is never a member.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PredictiveLabel {
    mask: u64,
    eos: bool,
}

impl PredictiveLabel {
    pub fn empty() -> Self {
        PredictiveLabel { mask: 0, eos: false }
    }

    pub fn with_eos(mut self, eos: bool) -> Self {
        self.eos = eos;
        self
    }

    pub fn insert(&mut self, symbol: usize) {
        assert!(symbol < 64, "alphabet too large for label mask");
        self.mask |= 1 << symbol;
    }

    pub fn set_eos(&mut self, eos: bool) {
        self.eos = eos;
    }

    pub fn contains(&self, symbol: usize) -> bool {
        self.mask & (1 << symbol) != 0
    }

    pub fn eos(&self) -> bool {
        self.eos
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0 && !self.eos
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn from_symbols(symbols: &[usize], eos: bool) -> Self {
        let mut l = PredictiveLabel::empty().with_eos(eos);
        for &s in symbols {
            l.insert(s);
        }
        l
    }

    /// Bitstring over the declared alphabet order with EOS as the last bit,
    /// as used by the dataset format.
    pub fn to_bitstring(&self, alphabet: &Alphabet) -> String {
        let mut s = String::with_capacity(alphabet.len() + 1);
        for i in 0..alphabet.len() {
            s.push(if self.contains(i) { '1' } else { '0' });
        }
        s.push(if self.eos { '1' } else { '0' });
        s
    }

    pub fn from_bitstring(s: &str, alphabet: &Alphabet) -> Option<Self> {
        let bits: Vec<char> = s.chars().collect();
        if bits.len() != alphabet.len() + 1 || !bits.iter().all(|&c| c == '0' || c == '1') {
            return None;
        }
        let mut l = PredictiveLabel::empty();
        for (i, &c) in bits[..alphabet.len()].iter().enumerate() {
            if c == '1' {
                l.insert(i);
            }
        }
        l.set_eos(bits[alphabet.len()] == '1');
        Some(l)
    }

    pub fn describe(&self, alphabet: &Alphabet) -> String {
        let mut names: Vec<&str> = self.symbols().filter(|&i| i < alphabet.len()).map(|i| alphabet.name(i)).collect();
        if self.eos {
            names.push(EOS);
        }
        format!("{{{}}}", names.join(", "))
    }
}

impl fmt::Debug for PredictiveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label(mask={:b}, eos={})", self.mask, self.eos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_reserved_and_duplicates() {
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
        assert!(Alphabet::new(["a", "BOS"]).is_err());
        assert!(Alphabet::new(["a", "EOS"]).is_err());
        let al = Alphabet::new(["0", "1"]).unwrap();
        assert_eq!(al.id("1").unwrap(), 1);
        assert!(al.id("2").is_err());
    }

    #[test]
    fn label_bitstring_round_trip() {
        let al = Alphabet::new(["a", "b", "c"]).unwrap();
        let l = PredictiveLabel::from_symbols(&[0, 2], true);
        assert_eq!(l.to_bitstring(&al), "1011");
        assert_eq!(PredictiveLabel::from_bitstring("1011", &al), Some(l));
    }

    #[test]
    fn word_parsing() {
        let al = Alphabet::new(["(1", ")1", "(2", ")2"]).unwrap();
        let w = al.parse_word("(1 (2 )2 )1").unwrap();
        assert_eq!(w, vec![0, 2, 3, 1]);
        assert_eq!(al.render_word(&w), "(1 (2 )2 )1");
    }
}
