//! Ordered alphabets and words over them.

use std::fmt;

use crate::error::{Error, Result};

/// Index of a letter inside its [`Alphabet`].
pub type Letter = usize;

/// A word is a sequence of letter indices; the empty word is `ε`.
pub type Word = Vec<Letter>;

/// Finite ordered set of opaque symbol tokens.
///
/// The declaration order is significant: it fixes `a₁ < … < aₙ` whenever the
/// alphabet is used for a bounded language `a₁*⋯aₙ*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<String>,
}

/// Tokens usable as letters: no whitespace and none of the characters the
/// text formats reserve.
pub fn is_letter_token(s: &str) -> bool {
    !s.is_empty()
        && s != "_"
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '$' | '-' | '@'))
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for l in letters {
            let l = l.into();
            if !is_letter_token(&l) {
                return Err(Error::Invalid(format!("`{l}` is not a valid letter")));
            }
            if out.contains(&l) {
                return Err(Error::Invalid(format!("duplicate letter `{l}`")));
            }
            out.push(l);
        }
        Ok(Alphabet { letters: out })
    }

    /// Convenience for tests and examples: `Alphabet::of("a b c")`.
    pub fn of(src: &str) -> Self {
        Alphabet::new(src.split_whitespace()).expect("valid alphabet literal")
    }

    pub fn empty() -> Self {
        Alphabet::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.letters[l]
    }

    pub fn names(&self) -> &[String] {
        &self.letters
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.letters.len()
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Parses a word written as letter tokens, e.g. `["a", "b"]`; `_` alone is ε.
    pub fn word<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Word> {
        if tokens.len() == 1 && tokens[0].as_ref() == "_" {
            return Ok(Vec::new());
        }
        tokens.iter().map(|t| self.letter(t.as_ref())).collect()
    }

    /// Parses a compact word. When every letter is a single character the
    /// string is split into characters (`"aab"`); otherwise letters are
    /// separated by whitespace or commas. `"_"` and `""` denote ε.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "_" {
            return Ok(Vec::new());
        }
        if s.contains(|c: char| c.is_whitespace() || c == ',') || !self.single_char_letters() {
            let toks: Vec<&str> = s
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect();
            return self.word(&toks);
        }
        s.chars().map(|c| self.letter(&c.to_string())).collect()
    }

    fn single_char_letters(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders a word: concatenated when all letters are one character long,
    /// space separated otherwise; ε prints as `_`.
    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "_".to_string();
        }
        let sep = if self.single_char_letters() { "" } else { " " };
        w.iter()
            .map(|&l| self.letters[l].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Word rendering used inside edge declarations: letters joined by `,`.
    pub(crate) fn format_label(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "_".to_string();
        }
        w.iter()
            .map(|&l| self.letters[l].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub(crate) fn parse_label(&self, tok: &str) -> Result<Word> {
        if tok == "_" {
            return Ok(Vec::new());
        }
        tok.split(',').map(|t| self.letter(t)).collect()
    }

    /// `n` letters named `c1 … cn`, renamed with primes until none of them
    /// collides with a letter of `self`.
    pub fn fresh(&self, n: usize) -> Alphabet {
        let mut stem = "c".to_string();
        loop {
            let names: Vec<String> = (1..=n).map(|i| format!("{stem}{i}")).collect();
            if names.iter().all(|x| self.index_of(x).is_none()) {
                return Alphabet { letters: names };
            }
            stem.push('\'');
        }
    }

    /// Sub-alphabet keeping the given letters in the given order.
    pub fn select(&self, letters: &[Letter]) -> Alphabet {
        Alphabet {
            letters: letters.iter().map(|&l| self.letters[l].clone()).collect(),
        }
    }

    /// Same letters as `other` regardless of order.
    pub fn same_set(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.letters.iter().all(|l| other.index_of(l).is_some())
    }

    pub(crate) fn ensure_eq(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters.join(" "))
    }
}

/// `u ⪯ v`: `u` is a scattered subword of `v`.
pub fn is_subword(u: &[Letter], v: &[Letter]) -> bool {
    let mut it = v.iter();
    u.iter().all(|x| it.any(|y| y == x))
}
