//! Letters, finite words, free-group reduction, projections, equivalence.
//!
//! Generators are identified by their enumeration index `n >= 1`; the letter
//! `d_n` and its formal inverse `d_n^-` differ only in sign. A finite word is
//! a sequence of letters; its position set `{0, .., len-1}` carries the
//! natural order.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A generator `d_n` (sign `Plus`) or its formal inverse `d_n^-` (sign `Minus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub index: u32,
    pub sign: Sign,
}

impl Letter {
    pub fn new(index: u32, sign: Sign) -> Letter {
        assert!(index >= 1, "generator indices start at 1");
        Letter { index, sign }
    }

    pub fn positive(index: u32) -> Letter {
        Letter::new(index, Sign::Plus)
    }

    pub fn negative(index: u32) -> Letter {
        Letter::new(index, Sign::Minus)
    }

    pub fn inverse(self) -> Letter {
        Letter { index: self.index, sign: self.sign.flip() }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.index == other.index && self.sign != other.sign
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "d{}", self.index),
            Sign::Minus => write!(f, "d{}^-", self.index),
        }
    }
}

/// A finite word in `W(D)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteWord {
    letters: Vec<Letter>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordParseError {
    #[error("malformed token `{token}` at position {position}")]
    Malformed { token: String, position: usize },
    #[error("generator index must be >= 1 in token `{token}` at position {position}")]
    ZeroIndex { token: String, position: usize },
}

impl FiniteWord {
    pub fn new(letters: Vec<Letter>) -> FiniteWord {
        FiniteWord { letters }
    }

    pub fn empty() -> FiniteWord {
        FiniteWord { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, position: usize) -> Letter {
        self.letters[position]
    }

    /// Parses whitespace-separated tokens `d<k>` / `d<k>^-`; `ε` (alone) and
    /// the empty string denote the empty word.
    pub fn parse(text: &str) -> Result<FiniteWord, WordParseError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() == 1 && (tokens[0] == "ε" || tokens[0] == "e") {
            return Ok(FiniteWord::empty());
        }
        let mut letters = Vec::with_capacity(tokens.len());
        for (position, token) in tokens.iter().enumerate() {
            let malformed = || WordParseError::Malformed {
                token: (*token).to_owned(),
                position,
            };
            let body = token.strip_prefix('d').ok_or_else(malformed)?;
            let (digits, sign) = match body.strip_suffix("^-") {
                Some(digits) => (digits, Sign::Minus),
                None => (body, Sign::Plus),
            };
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(malformed());
            }
            let index: u32 = digits.parse().map_err(|_| malformed())?;
            if index == 0 {
                return Err(WordParseError::ZeroIndex {
                    token: (*token).to_owned(),
                    position,
                });
            }
            letters.push(Letter::new(index, sign));
        }
        Ok(FiniteWord { letters })
    }

    /// The inverse word: reversed sequence, every sign negated.
    pub fn inverse(&self) -> FiniteWord {
        FiniteWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        FiniteWord { letters }
    }

    /// The projection `W_F`: the subsequence of letters indexed in `F`.
    pub fn project(&self, indices: &BTreeSet<u32>) -> FiniteWord {
        FiniteWord {
            letters: self
                .letters
                .iter()
                .copied()
                .filter(|l| indices.contains(&l.index))
                .collect(),
        }
    }

    /// The unique adjacent-cancellation-free word representing the same
    /// free-group element.
    pub fn free_reduce(&self) -> FiniteWord {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &letter in &self.letters {
            if stack.last().is_some_and(|&top| top.is_inverse_of(letter)) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        FiniteWord { letters: stack }
    }

    /// `V ~ W`: equality of the full-support projections in the free group.
    /// For finite words the single projection `F = supp(V) ∪ supp(W)` is the
    /// whole word, so this is free-group equality.
    pub fn equivalent(&self, other: &FiniteWord) -> bool {
        self.free_reduce() == other.free_reduce()
    }

    /// No adjacent mutually-inverse letters. For finite words this is the
    /// definitional condition that no nonempty contiguous subword is trivial.
    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|pair| !pair[0].is_inverse_of(pair[1]))
    }

    /// Set of generator indices occurring in the word, sign-insensitive.
    pub fn supp(&self) -> BTreeSet<u32> {
        self.letters.iter().map(|l| l.index).collect()
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ε");
        }
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    /// Uniform random word of length up to `max_len` over generators `1..=gens`.
    pub fn random_word<R: Rng>(rng: &mut R, max_len: usize, gens: u32) -> FiniteWord {
        let len = rng.gen_range(0..=max_len);
        let letters = (0..len)
            .map(|_| {
                let index = rng.gen_range(1..=gens);
                let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                Letter::new(index, sign)
            })
            .collect();
        FiniteWord::new(letters)
    }

    /// Enumerates all words of exactly length `len` over generators `1..=gens`.
    pub fn all_words(len: usize, gens: u32) -> Vec<FiniteWord> {
        let alphabet: Vec<Letter> = (1..=gens)
            .flat_map(|i| [Letter::positive(i), Letter::negative(i)])
            .collect();
        let mut out = vec![FiniteWord::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    alphabet.iter().map(move |&l| {
                        let mut letters = w.letters().to_vec();
                        letters.push(l);
                        FiniteWord::new(letters)
                    })
                })
                .collect();
        }
        out
    }

    /// Definitional reducedness: no contiguous nonempty subword is trivial.
    pub fn is_reduced_definitional(w: &FiniteWord) -> bool {
        for lo in 0..w.len() {
            for hi in lo + 1..=w.len() {
                let sub = FiniteWord::new(w.letters()[lo..hi].to_vec());
                if sub.free_reduce().is_empty() {
                    return false;
                }
            }
        }
        true
    }
}
