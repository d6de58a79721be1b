//! Abelianizations: invariants, coordinates of words, power tests and
//! mod-q dimensions.

mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use snf::{snf, snf_with_transforms, IntMat, SnfResult, SnfTransforms};

use crate::modp::{self, NotPrime};
use crate::presentation::{GraphOfGroups, Presentation};
use crate::words::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | … | d_k`, all `dᵢ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Coordinates of a class in `ℤ^r ⊕ ⨁ ℤ/dᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbImage {
    pub free: Vec<BigInt>,
    /// Residues in `[0, dᵢ)`, aligned with [`AbelianInvariants::torsion`].
    pub torsion: Vec<BigInt>,
}

impl AbImage {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }

    pub fn free_is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PowerInAb {
    /// Not a proper power.
    No,
    /// A `k`-th power with `k ≥ 2` maximal.
    Yes(BigInt),
    /// Zero free part: the class has finite order, so it is a `k`-th power
    /// for every `k` coprime to the torsion exponent.
    TrivialImage,
}

/// The abelianization of a presentation together with the coordinate change
/// that reads off classes of words.
#[derive(Debug, Clone)]
pub struct Abelianization {
    invariants: AbelianInvariants,
    rank: usize,
    factors: Vec<BigInt>,
    right: IntMat,
}

impl Abelianization {
    pub fn of(p: &Presentation) -> Self {
        let m = IntMat::from_rows(&p.exponent_matrix(), p.rank());
        let r = snf_with_transforms(&m);
        let invariants = AbelianInvariants { free_rank: r.cokernel_free_rank(), torsion: r.torsion() };
        let right = r.transforms.expect("transforms requested").right;
        Abelianization { invariants, rank: r.factors.len(), factors: r.factors, right }
    }

    pub fn invariants(&self) -> &AbelianInvariants {
        &self.invariants
    }

    pub fn image_of_vector(&self, v: &[i64]) -> AbImage {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let y = self.right.left_apply(&v);
        let mut torsion = Vec::new();
        for (i, d) in self.factors.iter().enumerate() {
            if !d.is_one() {
                torsion.push(y[i].mod_floor(d));
            }
        }
        AbImage { free: y[self.rank..].to_vec(), torsion }
    }

    pub fn image(&self, w: &Word) -> Result<AbImage, AbelianError> {
        if w.rank() != self.right.rows() {
            return Err(WordError::AlphabetMismatch { left: w.rank(), right: self.right.rows() }.into());
        }
        Ok(self.image_of_vector(&w.exponent_vector()))
    }

    pub fn power_of_image(&self, img: &AbImage) -> PowerInAb {
        if img.free_is_zero() {
            return PowerInAb::TrivialImage;
        }
        let g = img.free.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if self.invariants.torsion.is_empty() {
            return if g.is_one() { PowerInAb::No } else { PowerInAb::Yes(g) };
        }
        // x is a k-th power iff k | free part and gcd(k, dⱼ) | tⱼ for each
        // torsion coordinate; maximize k prime by prime.
        let mut k = BigInt::one();
        for (prime, e) in factorize(&g) {
            let mut pf = BigInt::one();
            for _ in 0..e {
                let next = &pf * &prime;
                let ok = self
                    .invariants
                    .torsion
                    .iter()
                    .zip(&img.torsion)
                    .all(|(d, t)| t.is_multiple_of(&next.gcd(d)));
                if !ok {
                    break;
                }
                pf = next;
            }
            k *= pf;
        }
        if k.is_one() {
            PowerInAb::No
        } else {
            PowerInAb::Yes(k)
        }
    }

    pub fn is_proper_power(&self, w: &Word) -> Result<PowerInAb, AbelianError> {
        Ok(self.power_of_image(&self.image(w)?))
    }
}

fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while n.is_multiple_of(&d) {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

pub fn abelianization(p: &Presentation) -> AbelianInvariants {
    let m = IntMat::from_rows(&p.exponent_matrix(), p.rank());
    let r = snf(&m);
    AbelianInvariants { free_rank: r.cokernel_free_rank(), torsion: r.torsion() }
}

pub fn image_in_ab(w: &Word, p: &Presentation) -> Result<AbImage, AbelianError> {
    Abelianization::of(p).image(w)
}

pub fn is_proper_power_in_ab(w: &Word, p: &Presentation) -> Result<PowerInAb, AbelianError> {
    Abelianization::of(p).is_proper_power(w)
}

/// `dim_{F_q} G / G^q [G, G]`.
pub fn p_ab_dimension(p: &Presentation, q: u64) -> Result<usize, AbelianError> {
    let q = modp::check_prime(q)?;
    Ok(p.rank() - modp::rank_mod_p(&p.exponent_matrix(), p.rank(), q))
}

/// `Σ_v r_ab(G_v) − |E| − (|V| − |E| − 1)`, with every edge group cyclic.
pub fn rank_formula_expected(g: &GraphOfGroups) -> i64 {
    let vertex_sum: i64 = g.vertices().values().map(|p| abelianization(p).free_rank as i64).sum();
    let v = g.vertices().len() as i64;
    let e = g.edges().len() as i64;
    vertex_sum - e - (v - e - 1)
}
