//! Freely reduced words over the free group of rank `r`.
//!
//! Generators are numbered from 0 internally and printed as `s1..sr`.
//! The text form accepts `sK`, `sK^M`, `e`, parentheses, commutator
//! brackets `[u,v]` and conjugation `u^v`, which expands to `v^-1 u v`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator s{} out of range for rank {rank}", .index + 1)]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// A single generator or inverse generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn positive(generator: usize) -> Self {
        Self::new(generator, false)
    }

    pub fn negative(generator: usize) -> Self {
        Self::new(generator, true)
    }

    pub fn inverted(self) -> Self {
        Self::new(self.generator, !self.inverse)
    }

    /// +1 or -1.
    pub fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: usize) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(rank: usize, generator: usize) -> Result<Self, WordError> {
        Self::reduce(rank, [Letter::positive(generator)])
    }

    /// Free reduction of an arbitrary letter stream.
    pub fn reduce<I>(rank: usize, tokens: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters: Vec<Letter> = Vec::new();
        for letter in tokens {
            if letter.generator >= rank {
                return Err(WordError::IndexOutOfRange {
                    index: letter.generator,
                    rank,
                });
            }
            match letters.last() {
                Some(&last) if last.cancels(letter) => {
                    letters.pop();
                }
                _ => letters.push(letter),
            }
        }
        Ok(Self { rank, letters })
    }

    pub fn parse(text: &str, rank: usize) -> Result<Self, WordError> {
        let mut parser = Parser {
            text: text.as_bytes(),
            position: 0,
            rank,
        };
        let letters = parser.word()?;
        parser.skip_whitespace();
        if parser.position != parser.text.len() {
            return Err(parser.error("unexpected character"));
        }
        Self::reduce(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    fn check_rank(&self, other: &Self) -> Result<(), WordError> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            })
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, WordError> {
        self.check_rank(other)?;
        Self::reduce(
            self.rank,
            self.letters.iter().chain(&other.letters).copied(),
        )
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(&self, other: &Self) -> Result<Self, WordError> {
        self.check_rank(other)?;
        let stream = self
            .letters
            .iter()
            .chain(&other.letters)
            .copied()
            .chain(self.inverse().letters)
            .chain(other.inverse().letters);
        Self::reduce(self.rank, stream)
    }

    /// `v^-1 u v`.
    pub fn conjugate_by(&self, other: &Self) -> Result<Self, WordError> {
        other.inverse().multiply(self)?.multiply(other)
    }

    pub fn power(&self, exponent: i64) -> Self {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let stream = (0..exponent.unsigned_abs()).flat_map(|_| base.letters.iter().copied());
        Self::reduce(self.rank, stream).expect("letters already in range")
    }

    /// Prefix of the first `len` letters.
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters[..len].to_vec(),
        }
    }

    /// A uniformly random reduced word of exactly `len` letters.
    pub fn random<R: Rng + ?Sized>(rank: usize, len: usize, rng: &mut R) -> Self {
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let letter = Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5));
            if letters.last().is_some_and(|last| last.cancels(letter)) {
                continue;
            }
            letters.push(letter);
        }
        Self { rank, letters }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (position, letter) in self.letters.iter().enumerate() {
            if position > 0 {
                f.write_str(" ")?;
            }
            write!(f, "s{}", letter.generator + 1)?;
            if letter.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a [u8],
    position: usize,
    rank: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::Parse {
            position: self.position,
            message: message.to_string(),
        }
    }

    fn skip_whitespace(&mut self) {
        while self.position < self.text.len() && self.text[self.position].is_ascii_whitespace() {
            self.position += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_whitespace();
        self.text.get(self.position).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), WordError> {
        if self.peek() == Some(byte) {
            self.position += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn word(&mut self) -> Result<Vec<Letter>, WordError> {
        let mut letters = Vec::new();
        while let Some(byte) = self.peek() {
            if matches!(byte, b's' | b'e' | b'1' | b'[' | b'(') {
                letters.extend(self.factor()?);
            } else {
                break;
            }
        }
        Ok(letters)
    }

    fn factor(&mut self) -> Result<Vec<Letter>, WordError> {
        let mut value = self.atom()?;
        while self.peek() == Some(b'^') {
            self.position += 1;
            match self.peek() {
                Some(b'-' | b'0'..=b'9') => {
                    let exponent = self.integer()?;
                    if exponent == 0 {
                        return Err(self.error("exponent must be nonzero"));
                    }
                    value = power_letters(&value, exponent);
                }
                Some(_) => {
                    let conjugator = self.atom()?;
                    let mut conjugated: Vec<Letter> =
                        conjugator.iter().rev().map(|l| l.inverted()).collect();
                    conjugated.extend(value);
                    conjugated.extend(conjugator);
                    value = conjugated;
                }
                None => return Err(self.error("missing exponent")),
            }
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<Vec<Letter>, WordError> {
        match self.peek() {
            Some(b's') => {
                self.position += 1;
                let start = self.position;
                while self.position < self.text.len() && self.text[self.position].is_ascii_digit() {
                    self.position += 1;
                }
                let digits =
                    std::str::from_utf8(&self.text[start..self.position]).expect("ascii digits");
                let index: usize = digits
                    .parse()
                    .map_err(|_| self.error("expected generator number after 's'"))?;
                if index == 0 || index > self.rank {
                    return Err(WordError::IndexOutOfRange {
                        index: index.wrapping_sub(1),
                        rank: self.rank,
                    });
                }
                Ok(vec![Letter::positive(index - 1)])
            }
            Some(b'e' | b'1') => {
                self.position += 1;
                Ok(Vec::new())
            }
            Some(b'(') => {
                self.position += 1;
                let inner = self.word()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'[') => {
                self.position += 1;
                let left = self.word()?;
                self.expect(b',')?;
                let right = self.word()?;
                self.expect(b']')?;
                let mut letters = left.clone();
                letters.extend(right.iter().copied());
                letters.extend(left.iter().rev().map(|l| l.inverted()));
                letters.extend(right.iter().rev().map(|l| l.inverted()));
                Ok(letters)
            }
            _ => Err(self.error("expected a generator, 'e', '(' or '['")),
        }
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        self.skip_whitespace();
        let start = self.position;
        if self.text.get(self.position) == Some(&b'-') {
            self.position += 1;
        }
        while self.position < self.text.len() && self.text[self.position].is_ascii_digit() {
            self.position += 1;
        }
        std::str::from_utf8(&self.text[start..self.position])
            .expect("ascii")
            .parse()
            .map_err(|_| WordError::Parse {
                position: start,
                message: "invalid integer exponent".to_string(),
            })
    }
}

fn power_letters(letters: &[Letter], exponent: i64) -> Vec<Letter> {
    let base: Vec<Letter> = if exponent < 0 {
        letters.iter().rev().map(|l| l.inverted()).collect()
    } else {
        letters.to_vec()
    };
    let mut out = Vec::with_capacity(base.len() * exponent.unsigned_abs() as usize);
    for _ in 0..exponent.unsigned_abs() {
        out.extend(base.iter().copied());
    }
    out
}
