//! Words in a free group on named single-letter generators.
//!
//! Text form: lowercase generator names, uppercase for inverses, optional
//! `^k` powers (`k` may be negative), `1` for the empty word. Whitespace is
//! ignored, so `a b A B`, `abAB` and `a b a^-1 b^-1` all parse alike.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown letter {letter:?} in {text:?}")]
    UnknownLetter { letter: char, text: String },
    #[error("bad exponent in {0:?}")]
    BadExponent(String),
    #[error("generator names must be distinct lowercase ASCII letters, got {0:?}")]
    BadAlphabet(String),
}

/// A generator or its inverse. Codes order letters as `x1, x1⁻¹, x2, x2⁻¹, …`,
/// which is the shortlex order used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Letter {
        Letter(gen as u32 * 2 + u32::from(inverse))
    }

    pub fn gen(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    pub fn new(names: &[char]) -> Result<Alphabet, WordError> {
        let mut seen = Vec::new();
        for &c in names {
            if !c.is_ascii_lowercase() || seen.contains(&c) {
                return Err(WordError::BadAlphabet(names.iter().collect()));
            }
            seen.push(c);
        }
        if seen.is_empty() {
            return Err(WordError::BadAlphabet(String::new()));
        }
        Ok(Alphabet { names: seen })
    }

    /// `a, b, c, …` for `rank` generators.
    pub fn standard(rank: usize) -> Alphabet {
        assert!((1..=26).contains(&rank), "rank must be in 1..=26");
        Alphabet {
            names: (b'a'..).take(rank).map(char::from).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// All letters in shortlex order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.rank() * 2).map(|c| Letter(c as u32))
    }

    fn letter_char(&self, l: Letter) -> char {
        let c = self.names[l.gen()];
        if l.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    /// Parses and freely reduces.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut raw = Vec::new();
        if chars == ['1'] {
            return Ok(Word::empty());
        }
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let gen = self
                .names
                .iter()
                .position(|&n| n == c.to_ascii_lowercase())
                .ok_or_else(|| WordError::UnknownLetter {
                    letter: c,
                    text: text.to_string(),
                })?;
            let letter = Letter::new(gen, c.is_ascii_uppercase());
            i += 1;
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                exp = digits
                    .parse()
                    .map_err(|_| WordError::BadExponent(text.to_string()))?;
                if exp.unsigned_abs() > 1 << 20 {
                    return Err(WordError::BadExponent(text.to_string()));
                }
            }
            let l = if exp < 0 { letter.inverse() } else { letter };
            raw.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(Word::reduced(raw))
    }

    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        let letters = w.letters();
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            out.push(self.letter_char(l));
            if j - i > 1 {
                out.push_str(&format!("^{}", j - i));
            }
            i = j;
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.names.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn reduced(letters: impl IntoIterator<Item = Letter>) -> Word {
        Word {
            letters: free_reduce(letters),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduced(self.letters.iter().chain(&other.letters).copied())
    }

    /// `self · l`, reduced.
    pub fn then(&self, l: Letter) -> Word {
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inverse()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        Word { letters }
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for l in &self.letters {
            sums[l.gen()] += if l.is_inverse() { -1 } else { 1 };
        }
        sums
    }

    /// Shortlex comparison: length first, then letter codes.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

/// Cancels adjacent `x x⁻¹` pairs with a stack; idempotent.
pub fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// All freely reduced words of length exactly `len` in shortlex order.
pub fn reduced_words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let mut level = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(level.len() * 3);
        for w in &level {
            for c in 0..rank * 2 {
                let l = Letter(c as u32);
                if w.letters.last() != Some(&l.inverse()) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word { letters });
                }
            }
        }
        level = next;
    }
    level
}
