//! Elements of finitely generated free groups.
//!
//! A [`Word`] is always stored freely reduced; every constructor reduces
//! eagerly. The identity is the empty word.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for alphabet of size {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("alphabet mismatch: {left} vs {right} generators")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("operation undefined on the identity word")]
    Identity,
}

/// A signed generator `x_gen^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn pos(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }

    pub const fn neg(gen: usize) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word over an alphabet of `rank` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

/// Free reduction by a single stack pass.
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    match out.last() {
        Some(&last) if last.cancels(l) => {
            out.pop();
        }
        _ => out.push(l),
    }
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word { letters: Vec::new(), rank }
    }

    /// # Panics
    /// If `gen >= rank`.
    pub fn generator(gen: usize, rank: usize) -> Self {
        assert!(gen < rank, "generator {gen} outside alphabet of size {rank}");
        Word { letters: vec![Letter::pos(gen)], rank }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I>(raw: I, rank: usize) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters = Vec::new();
        for l in raw {
            if l.gen >= rank {
                return Err(WordError::IndexOutOfRange { index: l.gen, rank });
            }
            push_reduced(&mut letters, l);
        }
        Ok(Word { letters, rank })
    }

    /// Builds a word from 1-based signed indices: `k > 0` is `x_{k-1}`,
    /// `k < 0` its inverse. Zero entries are ignored.
    pub fn from_signed(raw: &[i64], rank: usize) -> Result<Self, WordError> {
        Self::reduce(
            raw.iter().filter(|&&k| k != 0).map(|&k| {
                let gen = (k.unsigned_abs() - 1) as usize;
                if k > 0 {
                    Letter::pos(gen)
                } else {
                    Letter::neg(gen)
                }
            }),
            rank,
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn try_mul(&self, other: &Word) -> Result<Word, WordError> {
        if self.rank != other.rank {
            return Err(WordError::AlphabetMismatch { left: self.rank, right: other.rank });
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word { letters, rank: self.rank })
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
            rank: self.rank,
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        &(&(&a.inverse() * &b.inverse()) * a) * b
    }

    /// `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        &(c * self) * &c.inverse()
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced.
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j >= i + 2 && l[i].cancels(l[j - 1]) {
            i += 1;
            j -= 1;
        }
        (
            Word { letters: l[..i].to_vec(), rank: self.rank },
            Word { letters: l[i..j].to_vec(), rank: self.rank },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Returns `(root, k)` with `self = root^k` and `k` maximal.
    ///
    /// A cyclically reduced word of length `L` is a `k`-th power iff it has
    /// period `L / k`; the minimal period comes from the KMP failure function.
    pub fn proper_power_decomposition(&self) -> Result<(Word, usize), WordError> {
        if self.is_identity() {
            return Err(WordError::Identity);
        }
        let (conj, core) = self.cyclically_reduce();
        let c = &core.letters;
        let n = c.len();
        let mut fail = vec![0usize; n];
        let mut k = 0;
        for i in 1..n {
            while k > 0 && c[i] != c[k] {
                k = fail[k - 1];
            }
            if c[i] == c[k] {
                k += 1;
            }
            fail[i] = k;
        }
        let period = n - fail[n - 1];
        let (root_len, exponent) = if n % period == 0 { (period, n / period) } else { (n, 1) };
        let root_core = Word { letters: c[..root_len].to_vec(), rank: self.rank };
        Ok((root_core.conjugate_by(&conj), exponent))
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters.iter().filter(|l| l.gen == gen).map(|l| l.exponent()).sum()
    }

    /// Image in `ℤ^rank`.
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for l in &self.letters {
            v[l.gen] += l.exponent();
        }
        v
    }

    pub fn involves(&self, gen: usize) -> bool {
        self.letters.iter().any(|l| l.gen == gen)
    }

    /// Re-indexes generators through `map` into an alphabet of `rank`.
    pub fn map_generators(&self, map: &[usize], rank: usize) -> Result<Word, WordError> {
        Word::reduce(
            self.letters.iter().map(|l| Letter { gen: map[l.gen], inverse: l.inverse }),
            rank,
        )
    }

    /// Applies the homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        let rank = images.first().map_or(0, Word::rank);
        let mut out = Word::identity(rank);
        for l in &self.letters {
            let img = &images[l.gen];
            out = if l.inverse { out.try_mul(&img.inverse())? } else { out.try_mul(img)? };
        }
        Ok(out)
    }

    /// Same letters, viewed in a larger alphabet.
    pub fn widen(&self, rank: usize) -> Word {
        assert!(rank >= self.rank);
        Word { letters: self.letters.clone(), rank }
    }

    /// Renders with generator names, collapsing runs into powers.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;

    /// # Panics
    /// On alphabet mismatch; use [`Word::try_mul`] for a fallible product.
    fn mul(self, rhs: &Word) -> Word {
        self.try_mul(rhs).expect("multiplying words over different alphabets")
    }
}

struct WordDisplay<'a, S> {
    word: &'a Word,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for WordDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.word.letters;
        if l.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        let mut first = true;
        while i < l.len() {
            let mut j = i;
            while j < l.len() && l[j] == l[i] {
                j += 1;
            }
            let e = (j - i) as i64 * l[i].exponent();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = self.names.get(l[i].gen).map(|s| s.as_ref().to_string());
            let name = name.unwrap_or_else(|| format!("x{}", l[i].gen + 1));
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NONE: [&str; 0] = [];
        write!(f, "{}", self.display(&NONE))
    }
}
