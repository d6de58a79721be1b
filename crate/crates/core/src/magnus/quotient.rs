//! The relator ideal of `F_q⟨X⟩ / 𝔪^{D+1}` and membership tests against it.

use std::fmt;

use super::{magnus_embed, MagnusError, Monomial, TruncSeries};
use crate::modp::{check_prime, Echelon};
use crate::presentation::Presentation;
use crate::ring::Ring;
use crate::words::{Word, WordError};

/// Dense builds are refused beyond this many monomials (the count for four
/// generators at degree 6).
pub const MAX_ALGEBRA_DIMENSION: usize = 5461;

/// The two-sided ideal generated by `M(r) − 1` for every relator `r`, kept
/// as an echelon basis whose pivots are the deg-lex least monomials.
#[derive(Debug, Clone)]
pub struct QuotAlgebra {
    q: u64,
    rank: usize,
    degree: usize,
    /// `offsets[k]` is the column of the first monomial of degree `k`;
    /// degree-0 is excluded since the ideal lies in `𝔪`.
    offsets: Vec<usize>,
    ideal: Echelon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilpotentWitness {
    /// The word survives in the unit group of `F_q⟨X⟩ / (I + 𝔪^{D+1})`.
    Witness { q: u64, degree: usize },
    /// No witness up to `dmax`; not a proof of triviality.
    Unwitnessed { dmax: usize },
}

impl fmt::Display for NilpotentWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NilpotentWitness::Witness { q, degree } => write!(f, "witnessed mod {q} at degree {degree}"),
            NilpotentWitness::Unwitnessed { dmax } => write!(f, "unwitnessed up to degree {dmax}"),
        }
    }
}

/// `Σ_{k ≤ d} n^k`, saturating.
pub fn algebra_dimension(rank: usize, degree: usize) -> usize {
    let mut total = 0usize;
    let mut pow = 1usize;
    for _ in 0..=degree {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(rank);
    }
    total
}

impl QuotAlgebra {
    pub fn prime(&self) -> u64 {
        self.q
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ideal_dimension(&self) -> usize {
        self.ideal.rank()
    }

    /// `dim F_q⟨X⟩ / (I + 𝔪^{D+1})`, counting the constants.
    pub fn quotient_dimension(&self) -> usize {
        algebra_dimension(self.rank, self.degree) - self.ideal.rank()
    }

    fn column(&self, m: &Monomial) -> usize {
        let k = m.degree();
        debug_assert!(k >= 1 && k <= self.degree);
        self.offsets[k] + m.0.iter().fold(0, |acc, &i| acc * self.rank + i)
    }

    fn monomial(&self, col: usize) -> Monomial {
        let k = (1..=self.degree).rev().find(|&k| self.offsets[k] <= col).expect("column in range");
        let mut idx = col - self.offsets[k];
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = idx % self.rank;
            idx /= self.rank;
        }
        Monomial(v)
    }

    fn ncols(&self) -> usize {
        self.offsets[self.degree + 1]
    }

    /// Dense coordinates of the positive-degree part of `s`.
    pub fn vector(&self, s: &TruncSeries) -> Vec<u32> {
        let mut v = vec![0u32; self.ncols()];
        for (m, c) in s.terms() {
            if m.degree() >= 1 && m.degree() <= self.degree {
                v[self.column(m)] = c.rem_euclid(self.q as i128) as u32;
            }
        }
        v
    }

    pub fn series(&self, v: &[u32]) -> TruncSeries {
        let terms = v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (self.monomial(j), c as i128));
        TruncSeries::from_terms(terms, Ring::Prime(self.q), self.rank, self.degree)
    }

    /// The ideal basis as series.
    pub fn basis(&self) -> Vec<TruncSeries> {
        self.ideal.rows().iter().map(|r| self.series(r)).collect()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.ideal.pivot_columns().map(|c| self.monomial(c)).collect()
    }

    pub fn contains(&self, s: &TruncSeries) -> bool {
        s.constant_term().rem_euclid(self.q as i128) == 0 && self.ideal.contains(&self.vector(s))
    }

    /// Normal form of `s` modulo the ideal: no term sits on a pivot monomial.
    pub fn reduce(&self, s: &TruncSeries) -> TruncSeries {
        let mut v = self.vector(s);
        self.ideal.reduce(&mut v);
        let c = s.constant_term();
        let r = self.series(&v);
        r.add(&TruncSeries::constant(c, r.ring(), self.rank, self.degree)).expect("same shape")
    }

    /// Membership of `s` in the ideal taken modulo `𝔪^{d+1}`, `d ≤ D`.
    pub fn contains_at(&self, s: &TruncSeries, d: usize) -> bool {
        let d = d.min(self.degree);
        s.constant_term().rem_euclid(self.q as i128) == 0
            && self.ideal.contains_truncated(&self.vector(s), self.offsets[d + 1])
    }

    /// The degree-one part of the ideal as vectors in `F_q^n`.
    pub fn degree_one_slice(&self) -> Vec<Vec<u32>> {
        self.ideal.rows().iter().filter(|r| r[..self.rank].iter().any(|&c| c != 0)).map(|r| r[..self.rank].to_vec()).collect()
    }

    fn check_word(&self, w: &Word) -> Result<(), MagnusError> {
        if w.rank() == self.rank {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch { left: w.rank(), right: self.rank }.into())
        }
    }

    /// `M(w) − 1` over `F_q`.
    fn reduced_embedding(&self, w: &Word) -> TruncSeries {
        let ring = Ring::Prime(self.q);
        magnus_embed(w, self.degree, ring).sub(&TruncSeries::one(ring, self.rank, self.degree)).expect("same shape")
    }

    /// Whether `w` maps to 1 in `F_q⟨X⟩ / (I + 𝔪^{D+1})`.
    pub fn reduces_to_identity(&self, w: &Word) -> Result<bool, MagnusError> {
        self.reduces_to_identity_at(w, self.degree)
    }

    /// As [`reduces_to_identity`](Self::reduces_to_identity) for a smaller
    /// truncation `d ≤ D`.
    pub fn reduces_to_identity_at(&self, w: &Word, d: usize) -> Result<bool, MagnusError> {
        self.check_word(w)?;
        Ok(self.contains_at(&self.reduced_embedding(w), d))
    }
}

pub fn build_quotient_algebra(p: &Presentation, q: u64, degree: usize) -> Result<QuotAlgebra, MagnusError> {
    let q = check_prime(q)?;
    if degree == 0 {
        return Err(MagnusError::ZeroDegree);
    }
    let n = p.rank();
    let dimension = algebra_dimension(n, degree);
    if dimension > MAX_ALGEBRA_DIMENSION {
        return Err(MagnusError::TooLarge { dimension, limit: MAX_ALGEBRA_DIMENSION });
    }
    let mut offsets = vec![0usize; degree + 2];
    let mut pow = n;
    for k in 1..=degree {
        offsets[k + 1] = offsets[k] + pow;
        pow *= n;
    }
    let mut qa = QuotAlgebra { q, rank: n, degree, offsets, ideal: Echelon::new(q, 0) };
    let mut ideal = Echelon::new(q, qa.ncols());
    let ring = Ring::Prime(q);

    // I ∩ (deg ≤ D) is spanned by m · g · m' for monomials m, m' and
    // generators g = M(r) − 1.
    for r in p.relators() {
        let g = magnus_embed(r, degree, ring).sub(&TruncSeries::one(ring, n, degree)).expect("same shape");
        let Some(low) = g.order() else { continue };
        let terms: Vec<(Monomial, i128)> = g.terms().map(|(m, c)| (m.clone(), c)).collect();
        for slack in 0..=degree - low {
            for left_deg in 0..=slack {
                let right_deg = slack - left_deg;
                for left in monomials(n, left_deg) {
                    for right in monomials(n, right_deg) {
                        let mut v = vec![0u32; qa.ncols()];
                        for (m, c) in &terms {
                            if m.degree() + slack <= degree {
                                let full = left.concat(m).concat(&right);
                                v[qa.column(&full)] = *c as u32;
                            }
                        }
                        ideal.insert(v);
                    }
                }
            }
        }
    }
    qa.ideal = ideal;
    Ok(qa)
}

/// All monomials of degree `k` in lexicographic order.
fn monomials(n: usize, k: usize) -> impl Iterator<Item = Monomial> {
    let count = n.checked_pow(k as u32).unwrap_or(0);
    (0..count).map(move |mut idx| {
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        Monomial(v)
    })
}

/// Searches for the least `D ≤ dmax` at which `w` survives in the truncated
/// quotient algebra mod `q`.
pub fn nilpotent_nontriviality_witness(
    p: &Presentation,
    w: &Word,
    q: u64,
    dmax: usize,
) -> Result<NilpotentWitness, MagnusError> {
    if w.is_identity() {
        return Err(MagnusError::IdentityWord);
    }
    let qa = build_quotient_algebra(p, q, dmax)?;
    qa.check_word(w)?;
    let m = qa.reduced_embedding(w);
    for d in 1..=dmax {
        if !qa.contains_at(&m, d) {
            return Ok(NilpotentWitness::Witness { q: qa.q, degree: d });
        }
    }
    Ok(NilpotentWitness::Unwitnessed { dmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Family;

    fn pres(names: &[&str], rels: &[&str]) -> Presentation {
        let free = Presentation::free(names.to_vec()).unwrap();
        let rels = rels.iter().map(|r| free.word(r).unwrap()).collect();
        Presentation::new(names.to_vec(), rels, "").unwrap()
    }

    #[test]
    fn free_has_empty_ideal() {
        let f = pres(&["x", "y"], &[]);
        let qa = build_quotient_algebra(&f, 2, 4).unwrap();
        assert_eq!(qa.ideal_dimension(), 0);
        for d in 1..=4 {
            assert!(!qa.reduces_to_identity_at(&f.word("x").unwrap(), d).unwrap());
        }
    }

    #[test]
    fn killing_a_generator() {
        let p = pres(&["x", "y"], &["x"]);
        let qa = build_quotient_algebra(&p, 2, 2).unwrap();
        let leads: Vec<String> = qa.leading_monomials().iter().map(|m| m.display(&["x", "y"]).to_string()).collect();
        assert_eq!(leads, vec!["X", "X X", "X Y", "Y X"]);
        assert!(qa.reduces_to_identity(&p.word("x").unwrap()).unwrap());
        assert!(!qa.reduces_to_identity(&p.word("y").unwrap()).unwrap());
    }

    #[test]
    fn b12_kills_x() {
        let b = Family::BaumslagSolitar(1, 2).build().unwrap().presentation;
        let x = b.word("x").unwrap();
        let qa = build_quotient_algebra(&b, 2, 3).unwrap();
        assert!(qa.reduces_to_identity(&x).unwrap());
        assert!(qa.contains(&TruncSeries::variable(0, Ring::Prime(2), 2, 3)));
        assert_eq!(nilpotent_nontriviality_witness(&b, &x, 2, 5).unwrap(), NilpotentWitness::Unwitnessed { dmax: 5 });
    }

    #[test]
    fn relators_reduce() {
        let n = pres(&["a", "b", "c"], &["a^2 b^2 c^3"]);
        for q in [2, 3, 5] {
            let qa = build_quotient_algebra(&n, q, 4).unwrap();
            assert!(qa.reduces_to_identity(&n.relators()[0]).unwrap());
            assert!(qa.reduces_to_identity(&n.word("c a^2 b^2 c^2").unwrap()).unwrap());
        }
    }

    #[test]
    fn witness_in_hnn() {
        let p = pres(&["a", "b", "t"], &["t a t^-1 b^-1"]);
        let a = p.word("a").unwrap();
        assert_eq!(nilpotent_nontriviality_witness(&p, &a, 2, 3).unwrap(), NilpotentWitness::Witness { q: 2, degree: 1 });
        let c = p.word("[a, t]").unwrap();
        let w = nilpotent_nontriviality_witness(&p, &c, 3, 3).unwrap();
        assert!(matches!(w, NilpotentWitness::Witness { degree: 2, .. }), "{w}");
    }

    #[test]
    fn saturation_is_closed() {
        let p = Family::K(1, 2).build().unwrap().presentation;
        let qa = build_quotient_algebra(&p, 2, 4).unwrap();
        let ring = Ring::Prime(2);
        for b in qa.basis() {
            for i in 0..3 {
                let x = TruncSeries::variable(i, ring, 3, 4);
                assert!(qa.contains(&x.mul(&b).unwrap()));
                assert!(qa.contains(&b.mul(&x).unwrap()));
            }
        }
    }

    #[test]
    fn size_guard() {
        let f = pres(&["a", "b", "c", "d", "e"], &[]);
        assert!(matches!(build_quotient_algebra(&f, 2, 6), Err(MagnusError::TooLarge { .. })));
        assert!(build_quotient_algebra(&f, 4, 2).is_err());
        assert_eq!(build_quotient_algebra(&f, 2, 0).unwrap_err(), MagnusError::ZeroDegree);
    }
}
