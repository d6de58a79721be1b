//! Finite-index subgroups from maps to finite abelian groups,
//! Reidemeister–Schreier rewriting and mod-q Betti number estimates.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use thiserror::Error;

use crate::abelian::{abelianization, p_ab_dimension, AbelianError, AbelianInvariants};
use crate::modp::{check_prime, reduce_i64, Echelon, NotPrime};
use crate::presentation::{Family, Presentation, PresentationError};
use crate::words::{Letter, Word};

/// Default cap on the index of any subgroup built here.
pub const DEFAULT_MAX_INDEX: u64 = 1 << 14;

/// Environment variable overriding [`DEFAULT_MAX_INDEX`].
pub const MAX_INDEX_VAR: &str = "PFK_MAX_INDEX";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("the group has trivial mod-{q} abelianization")]
    PerfectModQ { q: u64 },
    #[error("index {index} exceeds the cap {cap}")]
    CapExceeded { index: String, cap: u64 },
    #[error("at least one level is required")]
    NoLevels,
    #[error("relator {0} does not map to the identity")]
    NotAHomomorphism(usize),
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("no closed form for {0}")]
    UnknownFamily(String),
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// The cap in force: `PFK_MAX_INDEX` if set and valid, else the default.
pub fn index_cap() -> u64 {
    std::env::var(MAX_INDEX_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_INDEX)
}

/// The kernel `H` of a homomorphism from a finitely presented group onto a
/// finite abelian group, with a Schreier transversal.
#[derive(Debug, Clone)]
pub struct SubgroupData {
    host: Presentation,
    moduli: Vec<u64>,
    images: Vec<Vec<u64>>,
    /// Coset representatives; coset 0 is `H` itself, represented by 1.
    transversal: Vec<Word>,
    /// `action[c][i]` is the coset of `T(c) xᵢ`.
    action: Vec<Vec<usize>>,
    inverse_action: Vec<Vec<usize>>,
    /// `schreier[c][i]` numbers the generator `T(c) xᵢ T(c xᵢ)⁻¹`, when
    /// that word is not freely trivial.
    schreier: Vec<Vec<Option<usize>>>,
    schreier_words: Vec<Word>,
}

impl SubgroupData {
    /// Builds the kernel of `xᵢ ↦ images[i] ∈ ⨁ ℤ/moduli[k]`. The index is
    /// the size of the image.
    pub fn from_homomorphism(host: &Presentation, moduli: &[u64], images: &[Vec<i64>]) -> Result<Self, HomologyError> {
        Self::with_cap(host, moduli, images, index_cap())
    }

    pub fn with_cap(host: &Presentation, moduli: &[u64], images: &[Vec<i64>], cap: u64) -> Result<Self, HomologyError> {
        let n = host.rank();
        if images.len() != n {
            return Err(HomologyError::ImageCount { expected: n, got: images.len() });
        }
        let images: Vec<Vec<u64>> = images
            .iter()
            .map(|v| v.iter().zip(moduli).map(|(&x, &m)| x.rem_euclid(m as i64) as u64).collect())
            .collect();
        let step = |c: &[u64], i: usize, sign: bool| -> Vec<u64> {
            c.iter()
                .zip(&images[i])
                .zip(moduli)
                .map(|((&a, &b), &m)| if sign { (a + m - b) % m } else { (a + b) % m })
                .collect()
        };
        for (k, r) in host.relators().iter().enumerate() {
            let mut c = vec![0u64; moduli.len()];
            for l in r.letters() {
                c = step(&c, l.gen, l.inverse);
            }
            if c.iter().any(|&x| x != 0) {
                return Err(HomologyError::NotAHomomorphism(k));
            }
        }

        // breadth-first over x1, x1⁻¹, x2, …
        let mut index_of: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut elements = vec![vec![0u64; moduli.len()]];
        let mut transversal = vec![Word::identity(n)];
        index_of.insert(elements[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for i in 0..n {
                for inverse in [false, true] {
                    let e = step(&elements[c], i, inverse);
                    if index_of.contains_key(&e) {
                        continue;
                    }
                    if elements.len() as u64 >= cap {
                        return Err(HomologyError::CapExceeded { index: format!("more than {cap}"), cap });
                    }
                    let id = elements.len();
                    index_of.insert(e.clone(), id);
                    elements.push(e);
                    let l = Letter { gen: i, inverse };
                    transversal.push(transversal[c].try_mul(&Word::reduce([l], n).expect("in range")).expect("same rank"));
                    queue.push_back(id);
                }
            }
        }

        let action: Vec<Vec<usize>> =
            elements.iter().map(|e| (0..n).map(|i| index_of[&step(e, i, false)]).collect()).collect();
        let mut inverse_action = vec![vec![0; n]; elements.len()];
        for (c, row) in action.iter().enumerate() {
            for (i, &d) in row.iter().enumerate() {
                inverse_action[d][i] = c;
            }
        }
        let mut schreier = vec![vec![None; n]; elements.len()];
        let mut schreier_words = Vec::new();
        for c in 0..elements.len() {
            for i in 0..n {
                let w = transversal[c]
                    .try_mul(&Word::generator(i, n))
                    .and_then(|w| w.try_mul(&transversal[action[c][i]].inverse()))
                    .expect("same rank");
                if !w.is_identity() {
                    schreier[c][i] = Some(schreier_words.len());
                    schreier_words.push(w);
                }
            }
        }
        Ok(SubgroupData {
            host: host.clone(),
            moduli: moduli.to_vec(),
            images,
            transversal,
            action,
            inverse_action,
            schreier,
            schreier_words,
        })
    }

    pub fn host(&self) -> &Presentation {
        &self.host
    }

    pub fn index(&self) -> usize {
        self.transversal.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Image of each host generator.
    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// The Schreier generators as words in the host generators.
    pub fn schreier_words(&self) -> &[Word] {
        &self.schreier_words
    }

    /// Rewrites a word lying in `H`, read from coset `start`, in the Schreier
    /// generators. Returns the word and the final coset.
    pub fn rewrite_from(&self, w: &Word, start: usize) -> (Word, usize) {
        let rank = self.schreier_words.len();
        let mut out = Vec::new();
        let mut c = start;
        for l in w.letters() {
            if l.inverse {
                let d = self.inverse_action[c][l.gen];
                if let Some(s) = self.schreier[d][l.gen] {
                    out.push(Letter::neg(s));
                }
                c = d;
            } else {
                if let Some(s) = self.schreier[c][l.gen] {
                    out.push(Letter::pos(s));
                }
                c = self.action[c][l.gen];
            }
        }
        (Word::reduce(out, rank).expect("in range"), c)
    }

    pub fn rewrite(&self, w: &Word) -> (Word, usize) {
        self.rewrite_from(w, 0)
    }
}

/// The kernel of `G → H₁(G; F_q) ≅ (ℤ/q)^d`.
///
/// Coordinates come from the reduced row echelon form of the relator matrix
/// mod `q`: the non-pivot columns index a basis of the quotient.
pub fn p_ab_kernel(p: &Presentation, q: u64) -> Result<SubgroupData, HomologyError> {
    p_ab_kernel_with_cap(p, q, index_cap())
}

pub fn p_ab_kernel_with_cap(p: &Presentation, q: u64, cap: u64) -> Result<SubgroupData, HomologyError> {
    let q = check_prime(q)?;
    let n = p.rank();
    let mut e = Echelon::new(q, n);
    for r in p.exponent_matrix() {
        e.insert(r.iter().map(|&x| reduce_i64(x, q)).collect());
    }
    let e = e.into_reduced();
    let free: Vec<usize> = (0..n).filter(|&c| !e.is_pivot(c)).collect();
    let d = free.len();
    if d == 0 {
        return Err(HomologyError::PerfectModQ { q });
    }
    check_index(q, d, 1, cap)?;
    // xᵢ ↦ eᵢ minus its pivot-row correction, read on the free columns
    let images: Vec<Vec<i64>> = (0..n)
        .map(|i| match e.row_with_pivot(i) {
            Some(row) => free.iter().map(|&c| -(row[c] as i64)).collect(),
            None => free.iter().map(|&c| i64::from(c == i)).collect(),
        })
        .collect();
    SubgroupData::with_cap(p, &vec![q; d], &images, cap)
}

fn check_index(q: u64, d: usize, base: u64, cap: u64) -> Result<u64, HomologyError> {
    let grow = u32::try_from(d).ok().and_then(|d| q.checked_pow(d)).and_then(|g| g.checked_mul(base));
    match grow {
        Some(i) if i <= cap => Ok(i),
        Some(i) => Err(HomologyError::CapExceeded { index: i.to_string(), cap }),
        None => Err(HomologyError::CapExceeded { index: format!("{base}*{q}^{d}"), cap }),
    }
}

/// Presentation of the subgroup on its non-trivial Schreier generators
/// `y1, y2, …`, with one relator `T(c) r T(c)⁻¹` per coset and relator.
pub fn reidemeister_schreier(sub: &SubgroupData) -> Presentation {
    let rank = sub.schreier_words.len();
    let names: Vec<String> = (1..=rank).map(|k| format!("y{k}")).collect();
    let mut relators = Vec::new();
    for r in sub.host.relators() {
        for c in 0..sub.index() {
            let (w, end) = sub.rewrite_from(r, c);
            debug_assert_eq!(end, c);
            if !w.is_identity() {
                relators.push(w);
            }
        }
    }
    Presentation::new(names, relators, format!("{}[{}]", sub.host.label(), sub.index()))
        .expect("generated names are valid and relators are non-trivial")
}

/// `dim H₁(G; F_q)`.
pub fn h1_fp_dim(p: &Presentation, q: u64) -> Result<usize, HomologyError> {
    Ok(p_ab_dimension(p, q)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLevel {
    pub level: usize,
    /// Index in the original group.
    pub index: u64,
    pub h1_dim: usize,
    pub ratio: Ratio<i64>,
}

/// Levels `1..=L` of the iterated mod-q abelianization chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEstimate {
    pub q: u64,
    pub levels: Vec<ChainLevel>,
}

impl ChainEstimate {
    pub fn deepest(&self) -> &ChainLevel {
        self.levels.last().expect("at least one level")
    }
}

/// `G₀ = G`, `G_{k+1} = ker(G_k → H₁(G_k; F_q))`; records
/// `dim H₁(G_k; F_q) / [G : G_k]` for `k = 1..=levels`.
pub fn betti_chain_estimate(p: &Presentation, q: u64, levels: usize) -> Result<ChainEstimate, HomologyError> {
    chain(p, q, levels, index_cap(), true)
}

/// As [`betti_chain_estimate`], stopping quietly before the first level whose
/// index would exceed the cap. At least one level must fit.
pub fn betti_chain_within_cap(p: &Presentation, q: u64, max_levels: usize) -> Result<ChainEstimate, HomologyError> {
    chain(p, q, max_levels, index_cap(), false)
}

fn chain(p: &Presentation, q: u64, levels: usize, cap: u64, strict: bool) -> Result<ChainEstimate, HomologyError> {
    let q = check_prime(q)?;
    if levels == 0 {
        return Err(HomologyError::NoLevels);
    }
    let mut current = p.clone();
    let mut index = 1u64;
    let mut out = Vec::new();
    for level in 1..=levels {
        let d = p_ab_dimension(&current, q)?;
        if d == 0 {
            return Err(HomologyError::PerfectModQ { q });
        }
        let next_index = match check_index(q, d, index, cap) {
            Ok(i) => i,
            Err(e) if strict || out.is_empty() => return Err(e),
            Err(_) => break,
        };
        let sub = p_ab_kernel_with_cap(&current, q, cap / index)?;
        current = reidemeister_schreier(&sub);
        index = next_index;
        let h1 = p_ab_dimension(&current, q)?;
        out.push(ChainLevel { level, index, h1_dim: h1, ratio: Ratio::new(h1 as i64, index as i64) });
    }
    Ok(ChainEstimate { q, levels: out })
}

/// `b₁⁽²⁾` for free groups and closed surfaces.
///
/// The non-orientable value uses `χ(S_g) = 1 − g` for the surface with
/// `g + 1` cross-caps.
pub fn l2_betti_closed_form(family: &Family) -> Result<Ratio<i64>, HomologyError> {
    let v = match *family {
        Family::Free(0) => 0,
        Family::Free(n) => n as i64 - 1,
        Family::OrientableSurface(g) if g >= 1 => 2 * g as i64 - 2,
        Family::NonOrientableSurface(g) if g >= 1 => g as i64 - 1,
        other => return Err(HomologyError::UnknownFamily(other.label())),
    };
    Ok(Ratio::from_integer(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerCoverReport {
    pub index: usize,
    pub euler: i64,
    pub expected_euler: i64,
    pub cover_abelianization: AbelianInvariants,
    /// Orientable genus or number of cross-caps minus one, whichever fits.
    pub genus: Option<i64>,
    pub orientable: Option<bool>,
    pub consistent: bool,
}

/// Euler characteristic of the presentation complex, `1 − gens + relators`.
pub fn presentation_euler(p: &Presentation) -> i64 {
    1 - p.rank() as i64 + p.relators().len() as i64
}

/// Builds an index-`k` cover of a surface through a map onto `ℤ/k` and
/// checks `χ̂ = k χ` together with the surface shape of `H₁` of the cover.
pub fn euler_cover_check(surface: &Family, k: u64) -> Result<EulerCoverReport, HomologyError> {
    let p = surface.build()?.presentation;
    let n = p.rank();
    let mut images = vec![vec![0i64]; n];
    match *surface {
        Family::OrientableSurface(g) if g >= 1 => images[0] = vec![1],
        Family::NonOrientableSurface(g) if g >= 1 => {
            images[0] = vec![1];
            images[1] = vec![-1];
        }
        other => return Err(HomologyError::UnknownFamily(other.label())),
    }
    let sub = SubgroupData::from_homomorphism(&p, &[k.max(1)], &images)?;
    let cover = reidemeister_schreier(&sub);
    let euler = presentation_euler(&cover);
    let expected_euler = sub.index() as i64 * presentation_euler(&p);
    let ab = abelianization(&cover);
    let two = num_bigint::BigInt::from(2);
    let rank = ab.free_rank as i64;
    let (orientable, genus) = if ab.torsion.is_empty() && rank % 2 == 0 && 2 - rank == euler {
        (Some(true), Some(rank / 2))
    } else if ab.torsion == [two] && 1 - rank == euler {
        (Some(false), Some(rank))
    } else {
        (None, None)
    };
    Ok(EulerCoverReport {
        index: sub.index(),
        euler,
        expected_euler,
        cover_abelianization: ab,
        genus,
        orientable,
        consistent: euler == expected_euler && genus.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGap {
    pub level: usize,
    pub index: u64,
    pub ratio: Ratio<i64>,
    pub gap: Ratio<i64>,
}

/// Chain ratios compared with the target `r_ab − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cor823Report {
    pub target: Ratio<i64>,
    pub levels: Vec<LevelGap>,
    pub non_increasing: bool,
    pub above_floor: bool,
}

/// Compares the chain of `p` against `r_ab − 1`, where `r_ab` is the abelian
/// rank recorded by a parafree certificate.
pub fn cor823_report(p: &Presentation, r_ab: usize, q: u64, levels: usize) -> Result<Cor823Report, HomologyError> {
    let chain = betti_chain_within_cap(p, q, levels)?;
    let target = Ratio::from_integer(r_ab as i64 - 1);
    let gaps: Vec<LevelGap> = chain
        .levels
        .iter()
        .map(|l| LevelGap { level: l.level, index: l.index, ratio: l.ratio, gap: l.ratio - target })
        .collect();
    let non_increasing = gaps.windows(2).all(|w| w[1].ratio <= w[0].ratio);
    let above_floor = gaps.iter().all(|g| g.ratio >= target);
    Ok(Cor823Report { target, levels: gaps, non_increasing, above_floor })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(n: usize) -> Presentation {
        Family::Free(n).build().unwrap().presentation
    }

    #[test]
    fn kernels() {
        let k = p_ab_kernel(&free(2), 2).unwrap();
        assert_eq!(k.index(), 4);
        assert_eq!(k.schreier_words().len(), 5);
        let rs = reidemeister_schreier(&k);
        assert_eq!(rs.rank(), 5);
        assert!(rs.relators().is_empty());

        let n = Family::N(2, 2, 3).build().unwrap().presentation;
        let k = p_ab_kernel(&n, 2).unwrap();
        assert_eq!(k.index(), 4);
        assert_eq!(reidemeister_schreier(&k).relators().len(), 4);

        let z = free(1);
        let k = p_ab_kernel(&z, 3).unwrap();
        assert_eq!(k.index(), 3);
        assert_eq!(k.schreier_words(), &[z.word("x1^3").unwrap()]);
        assert_eq!(reidemeister_schreier(&k).to_string(), "< y1 | >");

        let perfect = Presentation::new(vec!["a"], vec![Word::generator(0, 1)], "").unwrap();
        assert_eq!(p_ab_kernel(&perfect, 2).unwrap_err(), HomologyError::PerfectModQ { q: 2 });
    }

    #[test]
    fn transversal_is_breadth_first() {
        let k = p_ab_kernel(&free(2), 3).unwrap();
        let t: Vec<String> = k.transversal().iter().take(5).map(|w| w.to_string()).collect();
        assert_eq!(t, vec!["1", "x1", "x1^-1", "x2", "x2^-1"]);
        assert_eq!(k.index(), 9);
    }

    #[test]
    fn rewriting_lands_in_the_subgroup() {
        let n = Family::K(1, 2).build().unwrap().presentation;
        let k = p_ab_kernel(&n, 2).unwrap();
        for (i, s) in k.schreier_words().iter().enumerate() {
            let (w, end) = k.rewrite(s);
            assert_eq!(end, 0);
            assert_eq!(w, Word::generator(i, k.schreier_words().len()));
        }
    }

    #[test]
    fn h1_dims() {
        assert_eq!(h1_fp_dim(&free(5), 2).unwrap(), 5);
        let s3 = Family::NonOrientableSurface(3).build().unwrap().presentation;
        assert_eq!(h1_fp_dim(&s3, 2).unwrap(), 4);
        let sigma = Family::OrientableSurface(3).build().unwrap().presentation;
        assert_eq!(h1_fp_dim(&sigma, 5).unwrap(), 6);
    }

    #[test]
    fn free_chain_is_exact() {
        let c = betti_chain_estimate(&free(2), 2, 2).unwrap();
        let got: Vec<(u64, usize)> = c.levels.iter().map(|l| (l.index, l.h1_dim)).collect();
        assert_eq!(got, vec![(4, 5), (128, 129)]);
        assert_eq!(c.levels[0].ratio, Ratio::new(5, 4));
        assert!(matches!(betti_chain_estimate(&free(2), 2, 3), Err(HomologyError::CapExceeded { .. })));
        assert_eq!(betti_chain_within_cap(&free(2), 2, 3).unwrap().levels.len(), 2);
    }

    #[test]
    fn cyclic_chain() {
        let c = betti_chain_estimate(&free(1), 2, 3).unwrap();
        let ratios: Vec<Ratio<i64>> = c.levels.iter().map(|l| l.ratio).collect();
        assert_eq!(ratios, vec![Ratio::new(1, 2), Ratio::new(1, 4), Ratio::new(1, 8)]);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(l2_betti_closed_form(&Family::Free(3)).unwrap(), Ratio::from_integer(2));
        assert_eq!(l2_betti_closed_form(&Family::Free(1)).unwrap(), Ratio::from_integer(0));
        assert_eq!(l2_betti_closed_form(&Family::OrientableSurface(2)).unwrap(), Ratio::from_integer(2));
        assert_eq!(l2_betti_closed_form(&Family::NonOrientableSurface(1)).unwrap(), Ratio::from_integer(0));
        assert!(l2_betti_closed_form(&Family::K(1, 2)).is_err());
    }

    #[test]
    fn surface_covers() {
        let r = euler_cover_check(&Family::OrientableSurface(2), 2).unwrap();
        assert_eq!((r.index, r.euler, r.expected_euler), (2, -4, -4));
        assert_eq!(r.cover_abelianization.to_string(), "Z^6");
        assert_eq!(r.genus, Some(3));
        assert!(r.consistent);

        let r = euler_cover_check(&Family::OrientableSurface(2), 1).unwrap();
        assert_eq!(r.genus, Some(2));
        assert!(r.consistent);

        for k in 1..=5 {
            let r = euler_cover_check(&Family::OrientableSurface(1), k).unwrap();
            assert_eq!(r.euler, 0);
            assert!(r.consistent);
        }
        for (g, k) in [(1, 2), (2, 2), (2, 3), (3, 4)] {
            let r = euler_cover_check(&Family::NonOrientableSurface(g), k).unwrap();
            assert!(r.consistent, "S{g} k={k}: {r:?}");
        }
    }

    #[test]
    fn report_for_n223() {
        let n = Family::N(2, 2, 3).build().unwrap().presentation;
        let r = cor823_report(&n, 2, 2, 2).unwrap();
        assert_eq!(r.levels[0].ratio, Ratio::new(5, 4));
        assert!(r.non_increasing && r.above_floor);
    }
}
