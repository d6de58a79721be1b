//! Finitely presented groups and their splittings.
//!
//! Combining presentations never merges generators: name collisions are
//! resolved by suffixing `_k` with the 1-based operand position, and every
//! combinator reports where each operand's generators ended up.

mod families;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::words::{Word, WordError};

pub use families::{Family, FamilyInstance};
pub use parse::{parse, parse_word, ParseError, ParseErrorKind, Parsed};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateName(String),
    #[error("relator {0} is the identity")]
    IdentityRelator(usize),
    #[error("splitting word is the identity")]
    IdentitySplittingWord,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("graph of groups is disconnected")]
    Disconnected,
    #[error("graph of groups has no vertices")]
    EmptyGraph,
    #[error("family constraint violated: {0}")]
    FamilyConstraint(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Generator names must survive a round trip through the text format.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub index: usize,
    pub name: String,
}

/// `⟨X | R⟩` with named generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
    label: String,
}

impl Presentation {
    pub fn new<S: Into<String>>(
        names: Vec<S>,
        relators: Vec<Word>,
        label: impl Into<String>,
    ) -> Result<Self, PresentationError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !is_valid_name(n) {
                return Err(PresentationError::InvalidName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(PresentationError::DuplicateName(n.clone()));
            }
        }
        for (i, r) in relators.iter().enumerate() {
            if r.rank() != names.len() {
                return Err(WordError::AlphabetMismatch { left: names.len(), right: r.rank() }.into());
            }
            if r.is_identity() {
                return Err(PresentationError::IdentityRelator(i));
            }
        }
        Ok(Presentation { names, relators, label: label.into() })
    }

    /// Free group on the given generator names.
    pub fn free<S: Into<String>>(names: Vec<S>) -> Result<Self, PresentationError> {
        Self::new(names, Vec::new(), "free")
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.names.iter().enumerate().map(|(index, name)| Generator { index, name: name.clone() })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The label, or the presentation itself when unlabelled.
    pub fn name(&self) -> String {
        if self.label.is_empty() {
            self.to_string()
        } else {
            self.label.clone()
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn generator(&self, i: usize) -> Word {
        Word::generator(i, self.rank())
    }

    /// Parses a word over this presentation's alphabet.
    pub fn word(&self, text: &str) -> Result<Word, ParseError> {
        parse_word(text, &self.names)
    }

    /// One row per relator: its exponent vector.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators.iter().map(Word::exponent_vector).collect()
    }

    pub fn display_word<'a>(&'a self, w: &'a Word) -> impl fmt::Display + 'a {
        w.display(&self.names)
    }

    /// Adds a relator, skipping it when it reduces to the identity.
    pub(crate) fn push_relator(&mut self, r: Word) {
        debug_assert_eq!(r.rank(), self.rank());
        if !r.is_identity() {
            self.relators.push(r);
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} |", self.names.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}", r.display(&self.names))?;
        }
        f.write_str(" >")
    }
}

/// Result of combining presentations: `maps[k][i]` is the index of operand
/// `k`'s generator `i` in the combined alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combined {
    pub presentation: Presentation,
    pub maps: Vec<Vec<usize>>,
}

fn uniquify(candidate: String, taken: &BTreeSet<String>, suffix: usize) -> String {
    let mut name = candidate;
    while taken.contains(&name) {
        name = format!("{name}_{suffix}");
    }
    name
}

/// Free product with disjoint generator renaming.
pub fn free_product(ps: &[Presentation]) -> Combined {
    if let [only] = ps {
        return Combined { presentation: only.clone(), maps: vec![(0..only.rank()).collect()] };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for p in ps {
        for n in &p.names {
            *counts.entry(n.as_str()).or_default() += 1;
        }
    }
    // Names that never collide are reserved up front so suffixed names avoid them.
    let mut taken: BTreeSet<String> =
        counts.iter().filter(|(_, &c)| c == 1).map(|(n, _)| n.to_string()).collect();
    let mut names = Vec::new();
    let mut maps = Vec::with_capacity(ps.len());
    for (k, p) in ps.iter().enumerate() {
        let mut map = Vec::with_capacity(p.rank());
        for n in &p.names {
            let name = if counts[n.as_str()] > 1 {
                let name = uniquify(format!("{n}_{}", k + 1), &taken, k + 1);
                taken.insert(name.clone());
                name
            } else {
                n.clone()
            };
            map.push(names.len());
            names.push(name);
        }
        maps.push(map);
    }
    let rank = names.len();
    let relators = ps
        .iter()
        .zip(&maps)
        .flat_map(|(p, m)| p.relators.iter().map(move |r| r.map_generators(m, rank).expect("in range")))
        .collect();
    let label = ps.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(" * ");
    Combined {
        presentation: Presentation { names, relators, label },
        maps,
    }
}

/// A one-edge splitting over a cyclic subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplittingSpec {
    /// `left *_{left_word = right_word} right`.
    Amalgam { left: Presentation, right: Presentation, left_word: Word, right_word: Word },
    /// `base *_{t from t⁻¹ = to}`.
    Hnn { base: Presentation, from: Word, to: Word, stable: String },
}

impl SplittingSpec {
    pub fn amalgam(
        left: Presentation,
        right: Presentation,
        left_word: Word,
        right_word: Word,
    ) -> Result<Self, PresentationError> {
        check_host(&left, &left_word)?;
        check_host(&right, &right_word)?;
        Ok(SplittingSpec::Amalgam { left, right, left_word, right_word })
    }

    pub fn hnn(
        base: Presentation,
        from: Word,
        to: Word,
        stable: impl Into<String>,
    ) -> Result<Self, PresentationError> {
        check_host(&base, &from)?;
        check_host(&base, &to)?;
        let stable = stable.into();
        if !is_valid_name(&stable) {
            return Err(PresentationError::InvalidName(stable));
        }
        Ok(SplittingSpec::Hnn { base, from, to, stable })
    }

    /// Builds the presentation of the splitting's fundamental group.
    pub fn realize(&self) -> Realization {
        match self {
            SplittingSpec::Amalgam { left, right, left_word, right_word } => {
                let Combined { mut presentation, maps } = free_product(&[left.clone(), right.clone()]);
                let rank = presentation.rank();
                let u = left_word.map_generators(&maps[0], rank).expect("in range");
                let v = right_word.map_generators(&maps[1], rank).expect("in range");
                presentation.push_relator(&u * &v.inverse());
                presentation.label = format!("{} *_Z {}", left.name(), right.name());
                Realization { presentation, maps, stable: None }
            }
            SplittingSpec::Hnn { base, from, to, stable } => {
                let mut names = base.names.clone();
                let taken: BTreeSet<String> = names.iter().cloned().collect();
                let stable_name = uniquify(stable.clone(), &taken, 2);
                names.push(stable_name);
                let rank = names.len();
                let t = Word::generator(rank - 1, rank);
                let mut relators: Vec<Word> = base.relators.iter().map(|r| r.widen(rank)).collect();
                let r = &(&(&t * &from.widen(rank)) * &t.inverse()) * &to.widen(rank).inverse();
                if !r.is_identity() {
                    relators.push(r);
                }
                let presentation = Presentation { names, relators, label: format!("{}*_Z", base.name()) };
                Realization { presentation, maps: vec![(0..base.rank()).collect()], stable: Some(rank - 1) }
            }
        }
    }
}

fn check_host(p: &Presentation, w: &Word) -> Result<(), PresentationError> {
    if w.rank() != p.rank() {
        return Err(WordError::AlphabetMismatch { left: p.rank(), right: w.rank() }.into());
    }
    if w.is_identity() {
        return Err(PresentationError::IdentitySplittingWord);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub presentation: Presentation,
    /// Generator maps of the operands (one for HNN, two for amalgams).
    pub maps: Vec<Vec<usize>>,
    /// Index of the stable letter for HNN extensions.
    pub stable: Option<usize>,
}

impl fmt::Display for SplittingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplittingSpec::Amalgam { left, right, left_word, right_word } => write!(
                f,
                "amalgam {left} {right} : {} = {}",
                left.display_word(left_word),
                right.display_word(right_word)
            ),
            SplittingSpec::Hnn { base, from, to, stable } => write!(
                f,
                "hnn {base} {stable} : {stable} ({}) {stable}^-1 = {}",
                base.display_word(from),
                base.display_word(to)
            ),
        }
    }
}

/// An edge with cyclic edge group, given by one word on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub source: String,
    pub target: String,
    pub source_word: Word,
    pub target_word: Word,
    /// Stable letter name used when the edge becomes an HNN step.
    pub stable: Option<String>,
}

impl GraphEdge {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A finite connected graph of groups with non-trivial cyclic edge groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertices: BTreeMap<String, Presentation>,
    edges: Vec<GraphEdge>,
}

impl GraphOfGroups {
    pub fn new(
        vertices: BTreeMap<String, Presentation>,
        edges: Vec<GraphEdge>,
    ) -> Result<Self, PresentationError> {
        if vertices.is_empty() {
            return Err(PresentationError::EmptyGraph);
        }
        for e in &edges {
            let src = vertices.get(&e.source).ok_or_else(|| PresentationError::UnknownVertex(e.source.clone()))?;
            let tgt = vertices.get(&e.target).ok_or_else(|| PresentationError::UnknownVertex(e.target.clone()))?;
            check_host(src, &e.source_word)?;
            check_host(tgt, &e.target_word)?;
        }
        let g = GraphOfGroups { vertices, edges };
        if g.spanning_tree().len() + 1 != g.vertices.len() {
            return Err(PresentationError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &BTreeMap<String, Presentation> {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Breadth-first spanning tree from the lowest vertex id; returns
    /// `(edge index, newly reached vertex)` in discovery order.
    fn spanning_tree(&self) -> Vec<(usize, String)> {
        let root = self.vertices.keys().next().expect("non-empty").clone();
        let mut seen = BTreeSet::from([root.clone()]);
        let mut queue = VecDeque::from([root]);
        let mut tree = Vec::new();
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                let other = if e.source == v {
                    &e.target
                } else if e.target == v {
                    &e.source
                } else {
                    continue;
                };
                if seen.insert(other.clone()) {
                    tree.push((i, other.clone()));
                    queue.push_back(other.clone());
                }
            }
        }
        tree
    }

    /// Fundamental group presentation plus the splitting steps that build it:
    /// tree edges as amalgams in discovery order, then the remaining edges as
    /// HNN extensions with their own stable letters.
    pub fn fundamental(&self) -> GraphDecomposition {
        let tree = self.spanning_tree();
        let root = self.vertices.keys().next().expect("non-empty").clone();
        let mut acc = self.vertices[&root].clone();
        let mut vmaps: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        vmaps.insert(root.clone(), (0..acc.rank()).collect());
        let mut steps = Vec::new();
        let mut step_edges = Vec::new();
        let in_tree: BTreeSet<usize> = tree.iter().map(|(i, _)| *i).collect();

        for (ei, reached) in &tree {
            let e = &self.edges[*ei];
            let (known, known_word, new_word) = if &e.target == reached {
                (&e.source, &e.source_word, &e.target_word)
            } else {
                (&e.target, &e.target_word, &e.source_word)
            };
            let rank = acc.rank();
            let left_word = known_word.map_generators(&vmaps[known], rank).expect("in range");
            let spec = SplittingSpec::Amalgam {
                left: acc.clone(),
                right: self.vertices[reached].clone(),
                left_word,
                right_word: new_word.clone(),
            };
            let real = spec.realize();
            for m in vmaps.values_mut() {
                for g in m.iter_mut() {
                    *g = real.maps[0][*g];
                }
            }
            vmaps.insert(reached.clone(), real.maps[1].clone());
            acc = real.presentation;
            steps.push(spec);
            step_edges.push(*ei);
        }
        for (ei, e) in self.edges.iter().enumerate() {
            if in_tree.contains(&ei) {
                continue;
            }
            let rank = acc.rank();
            let from = e.source_word.map_generators(&vmaps[&e.source], rank).expect("in range");
            let to = e.target_word.map_generators(&vmaps[&e.target], rank).expect("in range");
            let stable = e.stable.clone().unwrap_or_else(|| format!("t{}", ei + 1));
            let spec = SplittingSpec::Hnn { base: acc.clone(), from, to, stable };
            acc = spec.realize().presentation;
            steps.push(spec);
            step_edges.push(ei);
        }
        GraphDecomposition { presentation: acc.with_label("graph"), steps, step_edges, vertex_maps: vmaps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDecomposition {
    pub presentation: Presentation,
    /// Each step's left/base operand is the group built by the previous steps.
    pub steps: Vec<SplittingSpec>,
    /// Edge index realized by each step.
    pub step_edges: Vec<usize>,
    /// Vertex generator positions in the final alphabet.
    pub vertex_maps: BTreeMap<String, Vec<usize>>,
}

impl fmt::Display for GraphOfGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {{")?;
        for (id, p) in &self.vertices {
            writeln!(f, "  {id} = {p};")?;
        }
        for e in &self.edges {
            let src = &self.vertices[&e.source];
            let tgt = &self.vertices[&e.target];
            match (&e.stable, e.is_loop()) {
                (Some(t), true) => writeln!(
                    f,
                    "  loop {} {t} : {} = {};",
                    e.source,
                    src.display_word(&e.source_word),
                    tgt.display_word(&e.target_word)
                )?,
                _ => writeln!(
                    f,
                    "  edge {} {} : {} = {};",
                    e.source,
                    e.target,
                    src.display_word(&e.source_word),
                    tgt.display_word(&e.target_word)
                )?,
            }
        }
        f.write_str("}")
    }
}
