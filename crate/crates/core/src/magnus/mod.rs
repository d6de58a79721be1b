//! Truncated non-commuting power series and the Magnus embedding
//! `xᵢ ↦ 1 + Xᵢ`.

mod quotient;

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use quotient::{
    algebra_dimension, build_quotient_algebra, nilpotent_nontriviality_witness, NilpotentWitness, QuotAlgebra,
    MAX_ALGEBRA_DIMENSION,
};

use crate::modp::NotPrime;
use crate::ring::Ring;
use crate::words::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnusError {
    #[error("constant term {0} is not a unit")]
    NotUnit(i128),
    #[error("the identity word has no lower-central depth")]
    IdentityWord,
    #[error("series over different rings, alphabets or truncations")]
    Mismatch,
    #[error("truncation degree must be at least 1")]
    ZeroDegree,
    #[error("quotient algebra of dimension {dimension} exceeds the limit {limit}")]
    TooLarge { dimension: usize, limit: usize },
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A non-commuting monomial `X_{i₁} ⋯ X_{i_k}`, ordered degree first and then
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        MonomialDisplay { m: self, names }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct MonomialDisplay<'a, S> {
    m: &'a Monomial,
    names: &'a [S],
}

/// Upper-cased generator names, `X1`, `X2`, … when no names are given.
fn variable_name<S: AsRef<str>>(names: &[S], i: usize) -> String {
    match names.get(i) {
        Some(n) => {
            let n = n.as_ref();
            let mut c = n.chars();
            match c.next() {
                Some(h) => h.to_uppercase().chain(c).collect(),
                None => format!("X{}", i + 1),
            }
        }
        None => format!("X{}", i + 1),
    }
}

impl<S: AsRef<str>> fmt::Display for MonomialDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.m.0.iter().map(|&i| variable_name(self.names, i)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An element of `R⟨X₁, …, Xₙ⟩ / (degree > D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    ring: Ring,
    rank: usize,
    degree: usize,
    coeffs: BTreeMap<Monomial, i128>,
}

impl TruncSeries {
    pub fn zero(ring: Ring, rank: usize, degree: usize) -> Self {
        TruncSeries { ring, rank, degree, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: i128, ring: Ring, rank: usize, degree: usize) -> Self {
        let mut s = Self::zero(ring, rank, degree);
        s.add_term(Monomial::one(), c);
        s
    }

    pub fn one(ring: Ring, rank: usize, degree: usize) -> Self {
        Self::constant(1, ring, rank, degree)
    }

    /// The variable `Xᵢ`.
    pub fn variable(i: usize, ring: Ring, rank: usize, degree: usize) -> Self {
        assert!(i < rank, "variable {i} out of range for rank {rank}");
        let mut s = Self::zero(ring, rank, degree);
        s.add_term(Monomial(vec![i]), 1);
        s
    }

    /// Builds a series from terms; degrees above `degree` are dropped.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Monomial, i128)>,
        ring: Ring,
        rank: usize,
        degree: usize,
    ) -> Self {
        let mut s = Self::zero(ring, rank, degree);
        for (m, c) in terms {
            assert!(m.0.iter().all(|&i| i < rank), "monomial index out of range");
            s.add_term(m, c);
        }
        s
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, m: &Monomial) -> i128 {
        self.coeffs.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i128 {
        self.coeff(&Monomial::one())
    }

    /// Non-zero terms in degree-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.coeffs.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.constant_term() == 1
    }

    /// Lowest degree carrying a non-zero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.keys().next().map(Monomial::degree)
    }

    fn add_term(&mut self, m: Monomial, c: i128) {
        if m.degree() > self.degree {
            return;
        }
        let ring = self.ring;
        let c = ring.normalize(c);
        if c == 0 {
            return;
        }
        match self.coeffs.entry(m) {
            Entry::Occupied(mut o) => {
                let v = ring.add(*o.get(), c);
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

    fn check(&self, other: &Self) -> Result<(), MagnusError> {
        if self.ring == other.ring && self.rank == other.rank && self.degree == other.degree {
            Ok(())
        } else {
            Err(MagnusError::Mismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MagnusError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.coeffs {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MagnusError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Self {
        let mut out = Self::zero(self.ring, self.rank, self.degree);
        for (m, &c) in &self.coeffs {
            out.add_term(m.clone(), self.ring.mul(c, k));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MagnusError> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, i128> = BTreeMap::new();
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                if a.degree() + b.degree() > self.degree {
                    // `other` is sorted by degree first
                    break;
                }
                let e = acc.entry(a.concat(b)).or_insert(0);
                *e = self.ring.add(*e, self.ring.mul(ca, cb));
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(TruncSeries { ring: self.ring, rank: self.rank, degree: self.degree, coeffs: acc })
    }

    /// Right multiplication by `Xᵢ^k`.
    fn times_variable_power(&self, i: usize, k: usize) -> Self {
        let mut out = Self::zero(self.ring, self.rank, self.degree);
        for (m, &c) in &self.coeffs {
            if m.degree() + k <= self.degree {
                let mut v = m.0.clone();
                v.extend(std::iter::repeat_n(i, k));
                out.coeffs.insert(Monomial(v), c);
            }
        }
        out
    }

    /// Inverse of a series whose constant term is a unit of the ring.
    pub fn invert_unit(&self) -> Result<Self, MagnusError> {
        let c = self.constant_term();
        let ci = self.ring.inv(c).ok_or(MagnusError::NotUnit(c))?;
        let one = Self::one(self.ring, self.rank, self.degree);
        // s = c (1 + n); s⁻¹ = c⁻¹ Σ (−n)^k
        let neg_n = one.sub(&self.scale(ci))?;
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..self.degree {
            power = power.mul(&neg_n)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(ci))
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let degree = degree.min(self.degree);
        let coeffs = self.coeffs.iter().filter(|(m, _)| m.degree() <= degree).map(|(m, &c)| (m.clone(), c)).collect();
        TruncSeries { ring: self.ring, rank: self.rank, degree, coeffs }
    }

    /// Renders the series as a polynomial, e.g. `1 + A B - B A`.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        SeriesDisplay { s: self, names }
    }
}

struct SeriesDisplay<'a, S> {
    s: &'a TruncSeries,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for SeriesDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.s.terms().enumerate() {
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", m.display(self.names))?;
            } else {
                write!(f, "{mag} {}", m.display(self.names))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NONE: [&str; 0] = [];
        write!(f, "{}", self.display(&NONE))
    }
}

/// `M(w)` truncated at `degree`.
pub fn magnus_embed(w: &Word, degree: usize, ring: Ring) -> TruncSeries {
    let mut s = TruncSeries::one(ring, w.rank(), degree);
    for l in w.letters() {
        if l.inverse {
            // s (1 − X + X² − …)
            let mut acc = s.clone();
            for k in 1..=degree {
                let t = s.times_variable_power(l.gen, k);
                if t.is_zero() {
                    break;
                }
                let t = if k % 2 == 1 { t.scale(-1) } else { t };
                acc = acc.add(&t).expect("same shape");
            }
            s = acc;
        } else {
            s = s.add(&s.times_variable_power(l.gen, 1)).expect("same shape");
        }
    }
    s
}

/// Outcome of [`lcs_depth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Exact(usize),
    /// `M(w) − 1` vanishes through the given degree.
    Beyond(usize),
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact(m) => write!(f, "{m}"),
            Depth::Beyond(d) => write!(f, ">{d}"),
        }
    }
}

/// Lowest degree of `M(w) − 1` over `ℤ`, which for a free group is the
/// largest `m` with `w ∈ γ_m F`.
pub fn lcs_depth(w: &Word, degree: usize) -> Result<Depth, MagnusError> {
    if w.is_identity() {
        return Err(MagnusError::IdentityWord);
    }
    let s = magnus_embed(w, degree, Ring::Integers);
    let one = TruncSeries::one(Ring::Integers, w.rank(), degree);
    Ok(match s.sub(&one)?.order() {
        Some(m) => Depth::Exact(m),
        None => Depth::Beyond(degree),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Word, Word) {
        (Word::generator(0, 2), Word::generator(1, 2))
    }

    fn mono(v: &[usize]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn embed_examples() {
        let (x, y) = xy();
        let names = ["x", "y"];
        assert_eq!(magnus_embed(&x, 3, Ring::Integers).display(&names).to_string(), "1 + X");
        assert_eq!(magnus_embed(&x.inverse(), 2, Ring::Integers).display(&names).to_string(), "1 - X + X X");
        let c = Word::commutator(&x, &y);
        assert_eq!(magnus_embed(&c, 2, Ring::Integers).display(&names).to_string(), "1 + X Y - Y X");
        let c3 = magnus_embed(&c, 2, Ring::Prime(3));
        assert_eq!(c3.coeff(&mono(&[1, 0])), 2);
    }

    #[test]
    fn arithmetic() {
        let z = Ring::Integers;
        let x = TruncSeries::variable(0, z, 2, 2);
        let y = TruncSeries::variable(1, z, 2, 2);
        let one = TruncSeries::one(z, 2, 2);
        let p = one.add(&x).unwrap().mul(&one.add(&y).unwrap()).unwrap();
        assert_eq!(p.to_string(), "1 + X1 + X2 + X1 X2");
        let inv = one.add(&x).unwrap().invert_unit().unwrap();
        assert_eq!(inv.to_string(), "1 - X1 + X1 X1");
        assert_eq!(x.invert_unit(), Err(MagnusError::NotUnit(0)));
        assert_eq!(TruncSeries::constant(2, z, 2, 2).invert_unit(), Err(MagnusError::NotUnit(2)));
        let two = TruncSeries::constant(2, Ring::Prime(5), 2, 2);
        assert_eq!(two.invert_unit().unwrap().constant_term(), 3);
        assert_eq!(x.add(&TruncSeries::one(z, 2, 3)), Err(MagnusError::Mismatch));
    }

    #[test]
    fn depths() {
        let (x, y) = xy();
        assert_eq!(lcs_depth(&x, 4).unwrap(), Depth::Exact(1));
        let c = Word::commutator(&x, &y);
        assert_eq!(lcs_depth(&c, 4).unwrap(), Depth::Exact(2));
        assert_eq!(lcs_depth(&Word::commutator(&c, &y), 4).unwrap(), Depth::Exact(3));
        assert_eq!(lcs_depth(&Word::commutator(&c, &y), 2).unwrap(), Depth::Beyond(2));
        assert_eq!(lcs_depth(&Word::identity(2), 4), Err(MagnusError::IdentityWord));
    }

    #[test]
    fn inverse_words_cancel() {
        let w = Word::from_signed(&[1, 2, -1, -1, 2, 2, -2, 1], 2).unwrap();
        for ring in [Ring::Integers, Ring::Prime(2), Ring::Prime(3)] {
            let a = magnus_embed(&w, 5, ring);
            let b = magnus_embed(&w.inverse(), 5, ring);
            assert!(a.mul(&b).unwrap().is_one());
            assert_eq!(a.invert_unit().unwrap(), b);
        }
    }
}
