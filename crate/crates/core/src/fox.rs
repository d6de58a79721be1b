//! Free group rings, Fox derivatives and boundary data of splittings.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::magnus::{build_quotient_algebra, magnus_embed, MagnusError, QuotAlgebra, TruncSeries};
use crate::presentation::{Presentation, SplittingSpec};
use crate::ring::Ring;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoxError {
    #[error("group ring elements over different rings or alphabets")]
    Mismatch,
    #[error(transparent)]
    Magnus(#[from] MagnusError),
}

/// A finite sum `Σ c_w · w` in `R[F]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElt {
    ring: Ring,
    rank: usize,
    terms: BTreeMap<Word, i128>,
}

impl GroupRingElt {
    pub fn zero(ring: Ring, rank: usize) -> Self {
        GroupRingElt { ring, rank, terms: BTreeMap::new() }
    }

    pub fn one(ring: Ring, rank: usize) -> Self {
        Self::word(Word::identity(rank), ring)
    }

    pub fn word(w: Word, ring: Ring) -> Self {
        let mut e = Self::zero(ring, w.rank());
        e.add_term(w, 1);
        e
    }

    /// `w − 1`.
    pub fn word_minus_one(w: &Word, ring: Ring) -> Self {
        let mut e = Self::word(w.clone(), ring);
        e.add_term(Word::identity(w.rank()), -1);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, i128)>, ring: Ring, rank: usize) -> Self {
        let mut e = Self::zero(ring, rank);
        for (w, c) in terms {
            assert_eq!(w.rank(), rank, "word over a different alphabet");
            e.add_term(w, c);
        }
        e
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i128)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coeff(&self, w: &Word) -> i128 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: i128) {
        let c = self.ring.normalize(c);
        if c == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                let v = self.ring.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), FoxError> {
        if self.ring == other.ring && self.rank == other.rank {
            Ok(())
        } else {
            Err(FoxError::Mismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FoxError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FoxError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Self {
        let mut out = Self::zero(self.ring, self.rank);
        for (w, &c) in &self.terms {
            out.add_term(w.clone(), self.ring.mul(c, k));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FoxError> {
        self.check(other)?;
        let mut out = Self::zero(self.ring, self.rank);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a * b, self.ring.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Coefficient sum.
    pub fn augmentation(&self) -> i128 {
        self.terms.values().fold(0, |acc, &c| self.ring.add(acc, c))
    }

    /// Reduces coefficients into another ring.
    pub fn to_ring(&self, ring: Ring) -> Self {
        let mut out = Self::zero(ring, self.rank);
        for (w, &c) in &self.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    /// Rewrites every word through a generator map into a larger alphabet.
    pub fn map_generators(&self, map: &[usize], rank: usize) -> Self {
        let mut out = Self::zero(self.ring, rank);
        for (w, &c) in &self.terms {
            out.add_term(w.map_generators(map, rank).expect("map within range"), c);
        }
        out
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        EltDisplay { e: self, names }
    }
}

struct EltDisplay<'a, S> {
    e: &'a GroupRingElt,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for EltDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.e.terms().enumerate() {
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if w.is_identity() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", w.display(self.names))?;
            } else {
                write!(f, "{mag} {}", w.display(self.names))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NONE: [&str; 0] = [];
        write!(f, "{}", self.display(&NONE))
    }
}

/// `∂w/∂s` over `ℤ`, by one scan accumulating prefixes.
pub fn fox_derivative(w: &Word, s: usize) -> GroupRingElt {
    let rank = w.rank();
    let mut out = GroupRingElt::zero(Ring::Integers, rank);
    let letters = w.letters();
    for (i, l) in letters.iter().enumerate() {
        if l.gen != s {
            continue;
        }
        // w is reduced, so its prefixes are too
        if l.inverse {
            let prefix = Word::reduce(letters[..=i].iter().copied(), rank).expect("letters in range");
            out.add_term(prefix, -1);
        } else {
            let prefix = Word::reduce(letters[..i].iter().copied(), rank).expect("letters in range");
            out.add_term(prefix, 1);
        }
    }
    out
}

/// `Σ_s ∂w/∂s · (s − 1)`.
pub fn fox_expansion(w: &Word) -> GroupRingElt {
    let rank = w.rank();
    let mut acc = GroupRingElt::zero(Ring::Integers, rank);
    for s in 0..rank {
        let d = fox_derivative(w, s);
        if d.is_zero() {
            continue;
        }
        let gen = GroupRingElt::word_minus_one(&Word::generator(s, rank), Ring::Integers);
        acc = acc.add(&d.mul(&gen).expect("same ring")).expect("same ring");
    }
    acc
}

/// Checks `w − 1 = Σ_s ∂w/∂s · (s − 1)` in `ℤ[F]`.
pub fn fundamental_identity_check(w: &Word) -> bool {
    fox_expansion(w) == GroupRingElt::word_minus_one(w, Ring::Integers)
}

/// Rows indexed by relators, columns by generators.
pub fn jacobian(p: &Presentation) -> Vec<Vec<GroupRingElt>> {
    p.relators().iter().map(|r| (0..p.rank()).map(|s| fox_derivative(r, s)).collect()).collect()
}

/// `Σ c_w M(w)` reduced against the ideal of `qa`.
pub fn evaluate_in_quotient(e: &GroupRingElt, qa: &QuotAlgebra) -> Result<TruncSeries, FoxError> {
    if e.ring != Ring::Prime(qa.prime()) || e.rank != qa.rank() {
        return Err(FoxError::Mismatch);
    }
    let ring = e.ring;
    let mut acc = TruncSeries::zero(ring, e.rank, qa.degree());
    for (w, &c) in &e.terms {
        let m = magnus_embed(w, qa.degree(), ring).scale(c);
        acc = acc.add(&m).map_err(FoxError::Magnus)?;
    }
    Ok(qa.reduce(&acc))
}

/// Boundary data of a splitting over a cyclic edge group, over `ℤ`, checked
/// mod `q` in a truncated quotient algebra of the realized group.
#[derive(Debug, Clone)]
pub struct SwanData {
    pub presentation: Presentation,
    /// For an amalgam `(1 − u, v − 1)`; for an HNN extension
    /// `(v − 1 − t(u − 1), v − 1)`.
    pub pair: (GroupRingElt, GroupRingElt),
    /// `x + y` for an amalgam and `x + y(t − 1)` for an HNN extension.
    pub image: GroupRingElt,
    pub q: u64,
    pub degree: usize,
    /// The image reduces to the zero coset.
    pub vanishes: bool,
}

pub fn swan_boundary_data(spec: &SplittingSpec, q: u64, degree: usize) -> Result<SwanData, FoxError> {
    let real = spec.realize();
    let p = real.presentation;
    let n = p.rank();
    let ring = Ring::Integers;
    let lift = |w: &Word, map: &[usize]| w.map_generators(map, n).expect("realization maps are in range");
    let minus_one = |w: &Word| GroupRingElt::word_minus_one(w, ring);
    let (pair, image) = match spec {
        SplittingSpec::Amalgam { left_word, right_word, .. } => {
            let u = lift(left_word, &real.maps[0]);
            let v = lift(right_word, &real.maps[1]);
            let x = minus_one(&u).scale(-1);
            let y = minus_one(&v);
            let image = x.add(&y)?;
            ((x, y), image)
        }
        SplittingSpec::Hnn { from, to, .. } => {
            let u = lift(from, &real.maps[0]);
            let v = lift(to, &real.maps[0]);
            let t = Word::generator(real.stable.expect("HNN has a stable letter"), n);
            let tt = GroupRingElt::word(t.clone(), ring);
            let x = minus_one(&v).sub(&tt.mul(&minus_one(&u))?)?;
            let y = minus_one(&v);
            let image = x.add(&y.mul(&minus_one(&t))?)?;
            ((x, y), image)
        }
    };
    let qa = build_quotient_algebra(&p, q, degree)?;
    let vanishes = evaluate_in_quotient(&image.to_ring(Ring::Prime(qa.prime())), &qa)?.is_zero();
    Ok(SwanData { presentation: p, pair, image, q, degree, vanishes })
}
