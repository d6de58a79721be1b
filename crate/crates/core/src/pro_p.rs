//! Arithmetic in `1 + 𝔪` inside `F_p⟨X⟩ / 𝔪^{D+1}`, a finite p-quotient of a
//! free pro-p group.

use std::fmt;

use thiserror::Error;

use crate::abelian::{p_ab_dimension, AbelianError};
use crate::magnus::{magnus_embed, MagnusError, TruncSeries};
use crate::modp::{check_prime, NotPrime};
use crate::presentation::Presentation;
use crate::ring::Ring;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProPError {
    #[error("elements from different quotients")]
    Mismatch,
    #[error("{n} is not coprime to {p}")]
    NotCoprime { n: i64, p: u64 },
    #[error("exponent sum {sum} of the unknown is divisible by {p}")]
    DivisibleExponent { sum: i64, p: u64 },
    #[error("fixed-point iteration did not stabilize within {cap} steps")]
    NoConvergence { cap: usize },
    #[error("expected one relator, found {0}")]
    RelatorCount(usize),
    #[error("equation in {rank} unknowns needs {expected} constants, got {got}")]
    Arity { rank: usize, expected: usize, got: usize },
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// An element of `1 + 𝔪` in the degree-`D` truncation over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PQuotElt {
    series: TruncSeries,
}

impl PQuotElt {
    /// `1 + Xᵢ`.
    pub fn gen(i: usize, p: u64, rank: usize, degree: usize) -> Result<Self, ProPError> {
        let ring = Ring::prime(p)?;
        let s = TruncSeries::one(ring, rank, degree).add(&TruncSeries::variable(i, ring, rank, degree)).expect("same shape");
        Ok(PQuotElt { series: s })
    }

    pub fn one(p: u64, rank: usize, degree: usize) -> Result<Self, ProPError> {
        Ok(PQuotElt { series: TruncSeries::one(Ring::prime(p)?, rank, degree) })
    }

    /// The Magnus image of a word.
    pub fn from_word(w: &Word, p: u64, degree: usize) -> Result<Self, ProPError> {
        Ok(PQuotElt { series: magnus_embed(w, degree, Ring::prime(p)?) })
    }

    /// Wraps a series with constant term 1.
    pub fn from_series(series: TruncSeries) -> Option<Self> {
        (matches!(series.ring(), Ring::Prime(_)) && series.constant_term() == 1).then_some(PQuotElt { series })
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn prime(&self) -> u64 {
        match self.series.ring() {
            Ring::Prime(p) => p,
            Ring::Integers => unreachable!("always over a prime field"),
        }
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    pub fn rank(&self) -> usize {
        self.series.rank()
    }

    pub fn is_one(&self) -> bool {
        self.series.is_one()
    }

    fn lift(r: Result<TruncSeries, MagnusError>) -> Result<Self, ProPError> {
        r.map(|series| PQuotElt { series }).map_err(|_| ProPError::Mismatch)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ProPError> {
        Self::lift(self.series.mul(&other.series))
    }

    pub fn inv(&self) -> Self {
        Self::lift(self.series.invert_unit()).expect("constant term is 1")
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = PQuotElt { series: TruncSeries::one(self.series.ring(), self.rank(), self.degree()) };
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq).expect("same shape");
            }
        }
        acc
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn comm(&self, other: &Self) -> Result<Self, ProPError> {
        self.inv().mul(&other.inv())?.mul(self)?.mul(other)
    }

    /// Lowest degree at which `self` and `other` differ.
    pub fn agreement(&self, other: &Self) -> Option<usize> {
        self.series.sub(&other.series).ok()?.order()
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        self.series.display(names)
    }
}

impl fmt::Display for PQuotElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

/// Least `e` with `p^e ≥ D + 1`; `1 + 𝔪` has exponent dividing `p^e`.
fn exponent_bound(p: u64, degree: usize) -> u32 {
    let mut e = 0;
    let mut pe: u128 = 1;
    while pe < degree as u128 + 1 {
        pe *= p as u128;
        e += 1;
    }
    e
}

fn inverse_mod(n: i64, modulus: i128) -> Option<i128> {
    let (mut a, mut b) = ((n as i128).rem_euclid(modulus), modulus);
    let (mut x0, mut x1) = (1i128, 0i128);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (x0, x1) = (x1, x0 - q * x1);
    }
    (a == 1).then(|| x0.rem_euclid(modulus))
}

/// The unique `b` with `bⁿ = a`, for `n` prime to `p`.
pub fn nth_root(a: &PQuotElt, n: i64) -> Result<PQuotElt, ProPError> {
    let p = a.prime();
    if n == 0 || n.rem_euclid(p as i64) == 0 {
        return Err(ProPError::NotCoprime { n, p });
    }
    let modulus = (p as i128).pow(exponent_bound(p, a.degree()));
    let m = if modulus == 1 { 0 } else { inverse_mod(n, modulus).ok_or(ProPError::NotCoprime { n, p })? };
    Ok(a.pow(m as i64))
}

/// `ω(x, c₂, …, cₙ)`.
pub fn evaluate(omega: &Word, x: &PQuotElt, cs: &[PQuotElt]) -> Result<PQuotElt, ProPError> {
    if omega.rank() != cs.len() + 1 {
        return Err(ProPError::Arity { rank: omega.rank(), expected: omega.rank().saturating_sub(1), got: cs.len() });
    }
    let mut values = Vec::with_capacity(omega.rank());
    values.push(x.clone());
    values.extend(cs.iter().cloned());
    for v in &values {
        if v.prime() != x.prime() || v.degree() != x.degree() || v.rank() != x.rank() {
            return Err(ProPError::Mismatch);
        }
    }
    let inverses: Vec<PQuotElt> = values.iter().map(PQuotElt::inv).collect();
    let mut acc = PQuotElt { series: TruncSeries::one(x.series.ring(), x.rank(), x.degree()) };
    for l in omega.letters() {
        let f = if l.inverse { &inverses[l.gen] } else { &values[l.gen] };
        acc = acc.mul(f)?;
    }
    Ok(acc)
}

/// Result of [`solve_word_equation_from`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: PQuotElt,
    pub iterations: usize,
    /// Lowest degree at which consecutive iterates differ, per step.
    pub agreement: Vec<usize>,
}

/// Solves `ω(x, c₂, …, cₙ) = 1` in the truncation, starting from `x = 1`.
pub fn solve_word_equation(omega: &Word, cs: &[PQuotElt]) -> Result<PQuotElt, ProPError> {
    let first = cs.first().ok_or(ProPError::Arity { rank: omega.rank(), expected: omega.rank().saturating_sub(1), got: 0 })?;
    let one = PQuotElt { series: TruncSeries::one(first.series.ring(), first.rank(), first.degree()) };
    Ok(solve_word_equation_from(omega, cs, &one)?.x)
}

/// Fixed-point iteration `y ← y · ω(yᵐ, c)` with `p | m ω₁ + 1`, then
/// `x = yᵐ`.
pub fn solve_word_equation_from(omega: &Word, cs: &[PQuotElt], seed: &PQuotElt) -> Result<Solution, ProPError> {
    let p = seed.prime();
    let sum = omega.exponent_sum(0);
    if sum.rem_euclid(p as i64) == 0 {
        return Err(ProPError::DivisibleExponent { sum, p });
    }
    // m ≡ −ω₁⁻¹ (mod p)
    let inv = inverse_mod(sum, p as i128).expect("coprime");
    let m = (p as i128 - inv) as i64;

    let cap = 4 * seed.degree().max(1);
    let mut y = seed.clone();
    let mut agreement = Vec::new();
    for step in 1..=cap {
        let next = y.mul(&evaluate(omega, &y.pow(m), cs)?)?;
        match next.agreement(&y) {
            None => return Ok(Solution { x: y.pow(m), iterations: step, agreement }),
            Some(d) => agreement.push(d),
        }
        y = next;
    }
    Err(ProPError::NoConvergence { cap })
}

/// Some exponent sum of the single relator is prime to `q`.
pub fn one_relator_free_completion(p: &Presentation, q: u64) -> Result<bool, ProPError> {
    let q = check_prime(q)?;
    if p.relators().len() != 1 {
        return Err(ProPError::RelatorCount(p.relators().len()));
    }
    let r = &p.relators()[0];
    Ok((0..p.rank()).any(|k| r.exponent_sum(k).rem_euclid(q as i64) != 0))
}

/// `d(G_q̂) = dim_{F_q} G / G^q[G, G]`.
pub fn frattini_rank(p: &Presentation, q: u64) -> Result<usize, ProPError> {
    Ok(p_ab_dimension(p, q)?)
}
