//! Parafreeness verdicts for groups that split over cyclic subgroups.
//!
//! Every verdict is tri-state. `NotParafree` only ever cites a condition
//! that is necessary for parafreeness; conditions that can only be
//! semi-decided here come back `Unresolved` and the verdict is
//! `Inconclusive`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{rank_formula_expected, AbelianError, Abelianization, PowerInAb};
use crate::homology::{cor823_report, Cor823Report, HomologyError};
use crate::magnus::{algebra_dimension, nilpotent_nontriviality_witness, MagnusError, NilpotentWitness, MAX_ALGEBRA_DIMENSION};
use crate::modp::{check_prime, NotPrime};
use crate::presentation::{free_product, GraphOfGroups, Presentation, PresentationError, SplittingSpec};
use crate::words::{Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParafreeError {
    #[error("splitting word is the identity")]
    IdentityWord,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("abelian rank is {0}, expected 2 with torsion-free abelianization")]
    NotRankTwo(String),
    #[error("no search primes given")]
    NoPrimes,
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Satisfied,
    Failed,
    Unresolved,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::Failed => "failed",
            Status::Unresolved => "unresolved",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub id: String,
    pub status: Status,
    pub evidence: String,
}

impl Condition {
    fn new(id: &str, status: Status, evidence: impl Into<String>) -> Self {
        Condition { id: id.to_string(), status, evidence: evidence.into() }
    }
}

/// Search limits for semi-decidable conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub primes: Vec<u64>,
    pub dmax: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { primes: vec![2, 3], dmax: 6 }
    }
}

impl Bounds {
    pub fn new(primes: Vec<u64>, dmax: usize) -> Result<Self, ParafreeError> {
        if primes.is_empty() {
            return Err(ParafreeError::NoPrimes);
        }
        for &q in &primes {
            check_prime(q)?;
        }
        if dmax == 0 {
            return Err(MagnusError::ZeroDegree.into());
        }
        Ok(Bounds { primes, dmax })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Free,
    FreeProduct,
    Amalgam,
    Hnn,
    BaumslagCleary,
    Graph,
}

/// A node of the construction tree; leaves are free groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub kind: Kind,
    pub label: String,
    pub r_ab: usize,
    pub conditions: Vec<Condition>,
    pub children: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Parafree(Certificate),
    NotParafree { failed: Vec<String>, conditions: Vec<Condition> },
    Inconclusive { unresolved: Vec<String>, bounds: Bounds, conditions: Vec<Condition> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Parafree(_) => "parafree",
            Verdict::NotParafree { .. } => "not-parafree",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Parafree(_) => 0,
            Verdict::NotParafree { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }

    pub fn is_parafree(&self) -> bool {
        matches!(self, Verdict::Parafree(_))
    }

    pub fn r_ab(&self) -> Option<usize> {
        match self {
            Verdict::Parafree(c) => Some(c.r_ab),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Parafree(c) => Some(c),
            _ => None,
        }
    }

    pub fn conditions(&self) -> &[Condition] {
        match self {
            Verdict::Parafree(c) => &c.conditions,
            Verdict::NotParafree { conditions, .. } | Verdict::Inconclusive { conditions, .. } => conditions,
        }
    }

    fn status(&self) -> Status {
        match self {
            Verdict::Parafree(_) => Status::Satisfied,
            Verdict::NotParafree { .. } => Status::Failed,
            Verdict::Inconclusive { .. } => Status::Unresolved,
        }
    }

    fn summary(&self) -> String {
        match self {
            Verdict::Parafree(c) => format!("parafree, r_ab {}", c.r_ab),
            Verdict::NotParafree { failed, .. } => format!("not parafree ({})", failed.join(", ")),
            Verdict::Inconclusive { unresolved, .. } => format!("inconclusive ({})", unresolved.join(", ")),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

struct Node<'a> {
    kind: Kind,
    label: String,
    r_ab: usize,
    conditions: Vec<Condition>,
    children: Vec<&'a Verdict>,
}

fn conclude(node: Node<'_>, bounds: &Bounds) -> Verdict {
    let ids = |s: Status| -> Vec<String> {
        node.conditions.iter().filter(|c| c.status == s).map(|c| c.id.clone()).collect()
    };
    let failed = ids(Status::Failed);
    if !failed.is_empty() {
        return Verdict::NotParafree { failed, conditions: node.conditions };
    }
    let unresolved = ids(Status::Unresolved);
    if !unresolved.is_empty() {
        return Verdict::Inconclusive { unresolved, bounds: bounds.clone(), conditions: node.conditions };
    }
    let children = node
        .children
        .iter()
        .map(|v| v.certificate().expect("all operands certified").clone())
        .collect();
    Verdict::Parafree(Certificate {
        kind: node.kind,
        label: node.label,
        r_ab: node.r_ab,
        conditions: node.conditions,
        children,
    })
}

fn free_verdict(p: &Presentation) -> Verdict {
    Verdict::Parafree(Certificate {
        kind: Kind::Free,
        label: p.name(),
        r_ab: p.rank(),
        conditions: Vec::new(),
        children: Vec::new(),
    })
}

fn operands_condition(operands: &[(&Presentation, &Verdict)]) -> Condition {
    let status = if operands.iter().any(|(_, v)| v.status() == Status::Failed) {
        Status::Failed
    } else if operands.iter().all(|(_, v)| v.status() == Status::Satisfied) {
        Status::Satisfied
    } else {
        Status::Unresolved
    };
    let evidence = operands
        .iter()
        .map(|(p, v)| format!("{}: {}", p.name(), v.summary()))
        .collect::<Vec<_>>()
        .join("; ");
    Condition::new("parafree-factors", status, evidence)
}

fn show_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Condition on `uv⁻¹` in an abelianization: it must not be a proper power.
fn ab_power_condition(ab: &Abelianization, w: &Word, names: &[String]) -> Result<Condition, ParafreeError> {
    let img = ab.image(w)?;
    let shown = format!("{} maps to {}", w.display(names), show_vec(&img.free));
    let c = match ab.power_of_image(&img) {
        PowerInAb::No => {
            let g = img.free.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
            Condition::new("ab-power", Status::Satisfied, format!("{shown}, gcd {g}"))
        }
        PowerInAb::Yes(k) => Condition::new("ab-power", Status::Failed, format!("{shown}, a {k}-th power")),
        PowerInAb::TrivialImage => {
            Condition::new("ab-power", Status::Failed, format!("{shown}, finite order, hence a proper power"))
        }
    };
    Ok(c)
}

enum SidePower {
    NotPower(String),
    Power(String),
    Unknown(String),
}

fn side_power(host: &Presentation, verdict: &Verdict, w: &Word) -> Result<SidePower, ParafreeError> {
    let shown = w.display(host.names()).to_string();
    if host.is_free() {
        let (root, k) = w.proper_power_decomposition()?;
        return Ok(if k >= 2 {
            SidePower::Power(format!("{shown} = ({})^{k} in {}", root.display(host.names()), host.name()))
        } else {
            SidePower::NotPower(format!("{shown} has no proper root in {}", host.name()))
        });
    }
    let ab = Abelianization::of(host);
    if !ab.invariants().is_torsion_free() {
        return Ok(SidePower::Unknown(format!("{} has torsion in its abelianization", host.name())));
    }
    let img = ab.image(w)?;
    if ab.power_of_image(&img) == PowerInAb::No {
        return Ok(SidePower::NotPower(format!("{shown} has primitive image {} in {}_ab", show_vec(&img.free), host.name())));
    }
    // Over a certified parafree host an imprimitive image is not decisive.
    let why = match verdict {
        Verdict::Parafree(_) => "imprimitive image",
        _ => "uncertified host",
    };
    Ok(SidePower::Unknown(format!("{shown} in {}: {why}", host.name())))
}

fn factor_power_condition(sides: [SidePower; 2]) -> Condition {
    let mut not_power = Vec::new();
    let mut powers = Vec::new();
    let mut unknown = Vec::new();
    for s in sides {
        match s {
            SidePower::NotPower(e) => not_power.push(e),
            SidePower::Power(e) => powers.push(e),
            SidePower::Unknown(e) => unknown.push(e),
        }
    }
    if let Some(e) = not_power.first() {
        Condition::new("factor-power", Status::Satisfied, e.clone())
    } else if powers.len() == 2 {
        Condition::new("factor-power", Status::Failed, format!("both proper powers: {}", powers.join("; ")))
    } else {
        let mut all = powers;
        all.extend(unknown);
        Condition::new("factor-power", Status::Unresolved, all.join("; "))
    }
}

/// `U *_{u = v} V`, given verdicts for both factors.
pub fn check_amalgam_with(
    left: (&Presentation, &Verdict),
    right: (&Presentation, &Verdict),
    u: &Word,
    v: &Word,
    bounds: &Bounds,
) -> Result<Verdict, ParafreeError> {
    if u.is_identity() || v.is_identity() {
        return Err(ParafreeError::IdentityWord);
    }
    let spec = SplittingSpec::amalgam(left.0.clone(), right.0.clone(), u.clone(), v.clone())?;
    let real = spec.realize();
    let fp = free_product(&[left.0.clone(), right.0.clone()]);
    let rank = fp.presentation.rank();
    let uu = u.map_generators(&fp.maps[0], rank)?;
    let vv = v.map_generators(&fp.maps[1], rank)?;
    let ab = Abelianization::of(&fp.presentation);
    let conditions = vec![
        operands_condition(&[left, right]),
        ab_power_condition(&ab, &(&uu * &vv.inverse()), fp.presentation.names())?,
        factor_power_condition([side_power(left.0, left.1, u)?, side_power(right.0, right.1, v)?]),
    ];
    let r_ab = match (left.1.r_ab(), right.1.r_ab()) {
        (Some(a), Some(b)) => a + b - 1,
        _ => 0,
    };
    Ok(conclude(
        Node {
            kind: Kind::Amalgam,
            label: real.presentation.name(),
            r_ab,
            conditions,
            children: vec![left.1, right.1],
        },
        bounds,
    ))
}

pub fn check_amalgam(
    left: &Presentation,
    right: &Presentation,
    u: &Word,
    v: &Word,
    bounds: &Bounds,
) -> Result<Verdict, ParafreeError> {
    let lv = certify_presentation(left, bounds)?;
    let rv = certify_presentation(right, bounds)?;
    check_amalgam_with((left, &lv), (right, &rv), u, v, bounds)
}

/// Exponent images of `u`, `v` in `U_ab ≅ ℤ²`, or `None` when the
/// abelianization is not `ℤ²`.
fn rank_two_images(base: &Presentation, u: &Word, v: &Word) -> Result<Option<[Vec<BigInt>; 2]>, ParafreeError> {
    let ab = Abelianization::of(base);
    let inv = ab.invariants();
    if inv.free_rank != 2 || !inv.is_torsion_free() {
        return Ok(None);
    }
    Ok(Some([ab.image(u)?.free, ab.image(v)?.free]))
}

fn rank_two_condition(base: &Presentation, imgs: &[Vec<BigInt>; 2]) -> Condition {
    let [a, b] = imgs;
    let det = &a[0] * &b[1] - &a[1] * &b[0];
    let evidence = format!("images {} and {} in {}_ab, determinant {det}", show_vec(a), show_vec(b), base.name());
    let status = if det.is_zero() { Status::Failed } else { Status::Satisfied };
    Condition::new("rank2-images", status, evidence)
}

/// Largest truncation degree not above `dmax` that fits the size guard.
fn feasible_degree(rank: usize, dmax: usize) -> usize {
    (1..=dmax).rev().find(|&d| algebra_dimension(rank, d) <= MAX_ALGEBRA_DIMENSION).unwrap_or(0)
}

fn witness_condition(g: &Presentation, u: &Word, bounds: &Bounds) -> Result<Condition, ParafreeError> {
    let d = feasible_degree(g.rank(), bounds.dmax);
    let mut tried = Vec::new();
    if d > 0 {
        for &q in &bounds.primes {
            match nilpotent_nontriviality_witness(g, u, q, d)? {
                NilpotentWitness::Witness { q, degree } => {
                    return Ok(Condition::new(
                        "nilpotent-witness",
                        Status::Satisfied,
                        format!("{} survives mod {q} at degree {degree}", u.display(g.names())),
                    ));
                }
                NilpotentWitness::Unwitnessed { .. } => tried.push(q.to_string()),
            }
        }
    }
    Ok(Condition::new(
        "nilpotent-witness",
        Status::Unresolved,
        format!(
            "{} unwitnessed for primes {{{}}} up to degree {d}",
            u.display(g.names()),
            tried.join(", ")
        ),
    ))
}

/// `U *_{t u t⁻¹ = v}`, given a verdict for `U`.
pub fn check_hnn_with(
    base: (&Presentation, &Verdict),
    u: &Word,
    v: &Word,
    stable: &str,
    bounds: &Bounds,
) -> Result<Verdict, ParafreeError> {
    if u.is_identity() || v.is_identity() {
        return Err(ParafreeError::IdentityWord);
    }
    let spec = SplittingSpec::hnn(base.0.clone(), u.clone(), v.clone(), stable)?;
    let real = spec.realize();
    let ab = Abelianization::of(base.0);
    let mut conditions = vec![
        operands_condition(&[base]),
        ab_power_condition(&ab, &(u * &v.inverse()), base.0.names())?,
        factor_power_condition([side_power(base.0, base.1, u)?, side_power(base.0, base.1, v)?]),
    ];
    let earlier_failed = conditions.iter().any(|c| c.status == Status::Failed);
    let fourth = match rank_two_images(base.0, u, v)? {
        Some(imgs) => rank_two_condition(base.0, &imgs),
        None if earlier_failed => {
            Condition::new("nilpotent-witness", Status::Unresolved, "not searched: an earlier condition failed")
        }
        None => {
            let rank = real.presentation.rank();
            witness_condition(&real.presentation, &u.map_generators(&real.maps[0], rank)?, bounds)?
        }
    };
    conditions.push(fourth);
    Ok(conclude(
        Node {
            kind: Kind::Hnn,
            label: real.presentation.name(),
            r_ab: base.1.r_ab().unwrap_or(0),
            conditions,
            children: vec![base.1],
        },
        bounds,
    ))
}

pub fn check_hnn(base: &Presentation, u: &Word, v: &Word, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    let bv = certify_presentation(base, bounds)?;
    check_hnn_with((base, &bv), u, v, "t", bounds)
}

/// The HNN check with the fourth condition replaced by the rank of the
/// images of `u` and `v` in `U_ab ≅ ℤ²`.
pub fn check_hnn_rank2(base: &Presentation, u: &Word, v: &Word, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    if u.is_identity() || v.is_identity() {
        return Err(ParafreeError::IdentityWord);
    }
    if rank_two_images(base, u, v)?.is_none() {
        return Err(ParafreeError::NotRankTwo(Abelianization::of(base).invariants().to_string()));
    }
    check_hnn(base, u, v, bounds)
}

pub fn check_free_product(operands: &[(&Presentation, &Verdict)], bounds: &Bounds) -> Verdict {
    let label = operands.iter().map(|(p, _)| p.name()).collect::<Vec<_>>().join(" * ");
    let r_ab = operands.iter().filter_map(|(_, v)| v.r_ab()).sum();
    conclude(
        Node {
            kind: Kind::FreeProduct,
            label,
            r_ab,
            conditions: vec![operands_condition(operands)],
            children: operands.iter().map(|(_, v)| *v).collect(),
        },
        bounds,
    )
}

/// Replays the decomposition of a graph of groups step by step and checks
/// the abelian rank formula against the realized group.
pub fn check_graph(g: &GraphOfGroups, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    let dec = g.fundamental();
    let root = g.vertices().keys().next().expect("non-empty graph");
    let mut acc_v = certify_presentation(&g.vertices()[root], bounds)?;
    for spec in &dec.steps {
        let next = match spec {
            SplittingSpec::Amalgam { left, right, left_word, right_word } => {
                let rv = certify_presentation(right, bounds)?;
                check_amalgam_with((left, &acc_v), (right, &rv), left_word, right_word, bounds)?
            }
            SplittingSpec::Hnn { base, from, to, stable } => {
                check_hnn_with((base, &acc_v), from, to, stable, bounds)?
            }
        };
        acc_v = next;
    }
    let expected = rank_formula_expected(g);
    let inv = Abelianization::of(&dec.presentation).invariants().clone();
    let rank_ok = inv.is_torsion_free() && inv.free_rank as i64 == expected;
    let steps = Condition::new("steps", acc_v.status(), format!("{} splitting steps: {}", dec.steps.len(), acc_v.summary()));
    let formula = Condition::new(
        "rank-formula",
        if rank_ok { Status::Satisfied } else { Status::Failed },
        format!("expected Z^{expected}, realized {inv}"),
    );
    Ok(conclude(
        Node {
            kind: Kind::Graph,
            label: format!("graph ({} vertices, {} edges)", g.vertices().len(), g.edges().len()),
            r_ab: acc_v.r_ab().unwrap_or(0),
            conditions: vec![steps, formula],
            children: vec![&acc_v],
        },
        bounds,
    ))
}

pub fn certify_splitting(spec: &SplittingSpec, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    match spec {
        SplittingSpec::Amalgam { left, right, left_word, right_word } => {
            check_amalgam(left, right, left_word, right_word, bounds)
        }
        SplittingSpec::Hnn { base, from, to, stable } => {
            let bv = certify_presentation(base, bounds)?;
            check_hnn_with((base, &bv), from, to, stable, bounds)
        }
    }
}

/// Height of each `sᵢ` occurrence in `w` read in the alphabet
/// `s_{i,j} = tʲ sᵢ t⁻ʲ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RedundancyRecord {
    pub generator: usize,
    pub mu: Option<i64>,
    pub nu: Option<i64>,
    pub count_mu: usize,
    pub count_nu: usize,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Redundancy {
    /// The rewritten word as `(generator, height, exponent)` letters.
    pub rewritten: Vec<(usize, i64, i64)>,
    pub records: Vec<RedundancyRecord>,
    pub satisfied: Vec<usize>,
}

/// Rewrites `w` over the letters `s_{i,j}` and reports the extreme heights
/// of every `sᵢ`; `t` is the generator with index `t`.
pub fn redundancy_condition(w: &Word, t: usize) -> Result<Redundancy, ParafreeError> {
    if t >= w.rank() {
        return Err(WordError::IndexOutOfRange { index: t, rank: w.rank() }.into());
    }
    if w.exponent_vector().iter().any(|&e| e != 0) {
        return Err(ParafreeError::Precondition("word is not in the commutator subgroup".into()));
    }
    let mut height = 0i64;
    let mut rewritten = Vec::new();
    for l in w.letters() {
        if l.gen == t {
            height += l.exponent();
        } else {
            rewritten.push((l.gen, height, l.exponent()));
        }
    }
    let mut records = Vec::new();
    for i in (0..w.rank()).filter(|&i| i != t) {
        let hs: Vec<i64> = rewritten.iter().filter(|r| r.0 == i).map(|r| r.1).collect();
        let (mu, nu) = (hs.iter().min().copied(), hs.iter().max().copied());
        let count = |h: Option<i64>| hs.iter().filter(|&&x| Some(x) == h).count();
        let (count_mu, count_nu) = (count(mu), count(nu));
        let satisfied = mu.is_some() && mu != nu && count_mu == 1 && count_nu == 1;
        records.push(RedundancyRecord { generator: i, mu, nu, count_mu, count_nu, satisfied });
    }
    let satisfied = records.iter().filter(|r| r.satisfied).map(|r| r.generator).collect();
    Ok(Redundancy { rewritten, records, satisfied })
}

/// `⟨a₁..a_p, s₁..s_n, t | a₁ = v w⟩` with generators in that order.
pub fn baumslag_cleary_presentation(p: usize, n: usize, w: &Word, v: &Word) -> Result<Presentation, ParafreeError> {
    let rank = p + n + 1;
    let mut names: Vec<String> = (1..=p).map(|i| format!("a{i}")).collect();
    names.extend((1..=n).map(|i| format!("s{i}")));
    names.push("t".into());
    let shift: Vec<usize> = (p..rank).collect();
    let ww = w.map_generators(&shift, rank)?;
    let a1 = Word::generator(0, rank);
    let r = &a1 * &(v * &ww).inverse();
    Ok(Presentation::new(names, vec![r], format!("BC({p},{n})"))?)
}

/// One-relator groups `⟨a₁..a_p, s₁..s_n, t | a₁ = v w⟩` where `w` over
/// `s₁..s_n, t` satisfies the redundancy condition on `s_{i′}` (`i_prime`
/// is 0-based among the `s`).
pub fn check_baumslag_cleary(
    p: usize,
    n: usize,
    w: &Word,
    v: &Word,
    i_prime: usize,
    bounds: &Bounds,
) -> Result<Verdict, ParafreeError> {
    let pre = |m: &str| Err(ParafreeError::Precondition(m.to_string()));
    if p == 0 || n == 0 {
        return pre("need p >= 1 and n >= 1");
    }
    if w.rank() != n + 1 {
        return Err(WordError::AlphabetMismatch { left: n + 1, right: w.rank() }.into());
    }
    if v.rank() != p + n + 1 {
        return Err(WordError::AlphabetMismatch { left: p + n + 1, right: v.rank() }.into());
    }
    if i_prime >= n {
        return pre("distinguished generator out of range");
    }
    if w.is_identity() || !w.is_cyclically_reduced() {
        return pre("w must be a non-trivial cyclically reduced word");
    }
    if w.exponent_vector().iter().any(|&e| e != 0) {
        return pre("w is not in [E, E]");
    }
    if v.exponent_vector().iter().any(|&e| e != 0) {
        return pre("v is not in [F, F]");
    }
    if v.involves(p + i_prime) {
        return pre("v involves the distinguished generator");
    }
    let red = redundancy_condition(w, n)?;
    let rec = &red.records[i_prime];
    let show = |h: Option<i64>| h.map_or("-".to_string(), |h| h.to_string());
    let redundancy = Condition::new(
        "redundancy",
        if rec.satisfied { Status::Satisfied } else { Status::Unresolved },
        format!(
            "s{}: mu {} (x{}), nu {} (x{})",
            i_prime + 1,
            show(rec.mu),
            rec.count_mu,
            show(rec.nu),
            rec.count_nu
        ),
    );
    let g = baumslag_cleary_presentation(p, n, w, v)?;
    let inv = Abelianization::of(&g).invariants().clone();
    let ab = Condition::new(
        "torsion",
        if inv.is_torsion_free() { Status::Satisfied } else { Status::Failed },
        format!("abelianization {inv}"),
    );
    Ok(conclude(
        Node { kind: Kind::BaumslagCleary, label: g.label().to_string(), r_ab: inv.free_rank, conditions: vec![redundancy, ab], children: vec![] },
        bounds,
    ))
}

/// Cheap necessary conditions: a torsion-free abelianization and, for a
/// single relator, that the relator is not a proper power.
pub fn not_parafree_screens(p: &Presentation) -> Option<Verdict> {
    let inv = Abelianization::of(p).invariants().clone();
    if !inv.is_torsion_free() {
        return Some(Verdict::NotParafree {
            failed: vec!["torsion".into()],
            conditions: vec![Condition::new("torsion", Status::Failed, format!("abelianization {inv}"))],
        });
    }
    if let [r] = p.relators() {
        let (root, k) = r.proper_power_decomposition().expect("relators are non-trivial");
        if k >= 2 {
            return Some(Verdict::NotParafree {
                failed: vec!["torsion".into()],
                conditions: vec![Condition::new(
                    "torsion",
                    Status::Failed,
                    format!("relator is ({})^{k}, so the group has torsion", root.display(p.names())),
                )],
            });
        }
    }
    None
}

/// Restriction of `p` to the generators in `gens` (ascending), keeping the
/// relators in `rels`.
fn restrict(p: &Presentation, gens: &[usize], rels: &[&Word]) -> Result<Presentation, ParafreeError> {
    let mut map = vec![0; p.rank()];
    for (new, &old) in gens.iter().enumerate() {
        map[old] = new;
    }
    let names: Vec<String> = gens.iter().map(|&g| p.names()[g].clone()).collect();
    let relators = rels.iter().map(|r| r.map_generators(&map, gens.len())).collect::<Result<Vec<_>, _>>()?;
    let label = if relators.is_empty() && names.len() == 1 {
        "Z".to_string()
    } else if relators.is_empty() {
        format!("F{}", names.len())
    } else {
        format!("<{}>", names.join(","))
    };
    Ok(Presentation::new(names, relators, label)?)
}

fn components(p: &Presentation) -> Vec<Vec<usize>> {
    let n = p.rank();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for r in p.relators() {
        let gens: BTreeSet<usize> = r.letters().iter().map(|l| l.gen).collect();
        let mut it = gens.into_iter();
        if let Some(first) = it.next() {
            for g in it {
                let (a, b) = (find(&mut parent, first), find(&mut parent, g));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for g in 0..n {
        let r = find(&mut parent, g);
        comps.entry(r).or_default().push(g);
    }
    comps.into_values().collect()
}

fn word_of(letters: &[Letter], rank: usize) -> Word {
    Word::reduce(letters.iter().copied(), rank).expect("letters in range")
}

/// Cyclic arc split `r ~ A B` with disjoint generator supports.
fn disjoint_arcs(r: &Word) -> Option<(Word, Word)> {
    let l = r.letters();
    let n = l.len();
    for start in 0..n {
        for len in 1..n {
            let arc: Vec<Letter> = (0..len).map(|k| l[(start + k) % n]).collect();
            let rest: Vec<Letter> = (len..n).map(|k| l[(start + k) % n]).collect();
            let a: BTreeSet<usize> = arc.iter().map(|x| x.gen).collect();
            if rest.iter().all(|x| !a.contains(&x.gen)) {
                return Some((word_of(&arc, r.rank()), word_of(&rest, r.rank())));
            }
        }
    }
    None
}

/// A generator occurring exactly twice with opposite signs: `r ~ t A t⁻¹ B`.
fn stable_letter(r: &Word) -> Option<(usize, Word, Word)> {
    let l = r.letters();
    let n = l.len();
    for t in 0..r.rank() {
        let pos: Vec<usize> = (0..n).filter(|&i| l[i].gen == t).collect();
        let [i, j] = pos[..] else { continue };
        if l[i].inverse == l[j].inverse {
            continue;
        }
        let start = if l[i].inverse { j } else { i };
        let rot: Vec<Letter> = (0..n).map(|k| l[(start + k) % n]).collect();
        let close = rot.iter().position(|x| x.gen == t && x.inverse).expect("inverse occurrence");
        let a = word_of(&rot[1..close], r.rank());
        let b = word_of(&rot[close + 1..], r.rank());
        if !a.is_identity() && !b.is_identity() {
            return Some((t, a, b));
        }
    }
    None
}

fn certify_one_relator(p: &Presentation, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    let (_, r) = p.relators()[0].cyclically_reduce();
    let names = p.names();
    let occurrences = |g: usize| r.letters().iter().filter(|l| l.gen == g).count();
    if let Some(g) = (0..p.rank()).find(|&g| occurrences(g) == 1) {
        let rest: Vec<String> = names.iter().enumerate().filter(|&(i, _)| i != g).map(|(_, n)| n.clone()).collect();
        return Ok(Verdict::Parafree(Certificate {
            kind: Kind::Free,
            label: p.name(),
            r_ab: p.rank() - 1,
            conditions: vec![Condition::new(
                "tietze",
                Status::Satisfied,
                format!("{} occurs once in the relator; free on {}", names[g], rest.join(", ")),
            )],
            children: vec![],
        }));
    }
    if let Some((a, b)) = disjoint_arcs(&r) {
        let support = |w: &Word| -> Vec<usize> {
            w.letters().iter().map(|l| l.gen).collect::<BTreeSet<_>>().into_iter().collect()
        };
        let (ga, gb) = (support(&a), support(&b));
        let left = restrict(p, &ga, &[])?;
        let right = restrict(p, &gb, &[])?;
        let local = |w: &Word, gens: &[usize]| -> Result<Word, ParafreeError> {
            let mut map = vec![0; p.rank()];
            for (k, &g) in gens.iter().enumerate() {
                map[g] = k;
            }
            Ok(w.map_generators(&map, gens.len())?)
        };
        let u = local(&a, &ga)?;
        let v = local(&b.inverse(), &gb)?;
        let lv = free_verdict(&left);
        let rv = free_verdict(&right);
        return check_amalgam_with((&left, &lv), (&right, &rv), &u, &v, bounds);
    }
    if let Some((t, a, b)) = stable_letter(&r) {
        let others: Vec<usize> = (0..p.rank()).filter(|&g| g != t).collect();
        let base = restrict(p, &others, &[])?;
        let mut map = vec![0; p.rank()];
        for (k, &g) in others.iter().enumerate() {
            map[g] = k;
        }
        let u = a.map_generators(&map, others.len())?;
        let v = b.inverse().map_generators(&map, others.len())?;
        let bv = free_verdict(&base);
        return check_hnn_with((&base, &bv), &u, &v, &names[t], bounds);
    }
    Ok(undecomposed(p, "no cyclic splitting found for the relator", bounds))
}

fn undecomposed(p: &Presentation, why: &str, bounds: &Bounds) -> Verdict {
    Verdict::Inconclusive {
        unresolved: vec!["decomposition".into()],
        bounds: bounds.clone(),
        conditions: vec![Condition::new("decomposition", Status::Unresolved, format!("{}: {why}", p.name()))],
    }
}

/// Certifies a bare presentation: screens first, then free factors split
/// off by generator support, then a cyclic splitting of each one-relator
/// factor read off the relator.
pub fn certify_presentation(p: &Presentation, bounds: &Bounds) -> Result<Verdict, ParafreeError> {
    if p.is_free() {
        return Ok(free_verdict(p));
    }
    if let Some(v) = not_parafree_screens(p) {
        return Ok(v);
    }
    let comps = components(p);
    if comps.len() > 1 {
        let mut free_gens = Vec::new();
        let mut parts = Vec::new();
        for c in &comps {
            let rels: Vec<&Word> = p.relators().iter().filter(|r| r.involves(c[0])).collect();
            if rels.is_empty() {
                free_gens.extend(c.iter().copied());
            } else {
                parts.push(restrict(p, c, &rels)?);
            }
        }
        if !free_gens.is_empty() {
            parts.push(restrict(p, &free_gens, &[])?);
        }
        let verdicts = parts.iter().map(|q| certify_presentation(q, bounds)).collect::<Result<Vec<_>, _>>()?;
        let ops: Vec<(&Presentation, &Verdict)> = parts.iter().zip(&verdicts).collect();
        return Ok(check_free_product(&ops, bounds));
    }
    match p.relators() {
        [_] => certify_one_relator(p, bounds),
        _ => Ok(undecomposed(p, "more than one relator on a connected support", bounds)),
    }
}

/// Chain estimate compared against a certified abelian rank.
pub fn certified_cor823(verdict: &Verdict, p: &Presentation, q: u64, levels: usize) -> Result<Option<Cor823Report>, ParafreeError> {
    match verdict.r_ab() {
        Some(r) => Ok(Some(cor823_report(p, r, q, levels)?)),
        None => Ok(None),
    }
}
