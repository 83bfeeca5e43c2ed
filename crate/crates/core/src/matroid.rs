//! Matroid independence oracles, the colorful lifted matroid over `E × [ℓ]`,
//! and basis-exchange bijections.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{ElementSet, GroundSet};

/// Matroid families supported by [`MatroidOracle`].
#[derive(Debug, Clone, PartialEq)]
pub enum MatroidKind {
    /// Every set of at most `rank` elements is independent.
    Uniform { rank: usize },
    /// Blocks partition the ground set; a set is independent if it takes at most
    /// `capacities[b]` elements from block `b`.
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    /// Element `i` is the edge `edges[i]`; independent sets are forests.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Independent sets are the subsets of the listed bases. The list is not
    /// checked for the matroid axioms; see [`MatroidOracle::check_axioms`].
    ExplicitBases { bases: Vec<ElementSet> },
}

impl MatroidKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatroidKind::Uniform { .. } => "uniform",
            MatroidKind::Partition { .. } => "partition",
            MatroidKind::Graphic { .. } => "graphic",
            MatroidKind::ExplicitBases { .. } => "explicit_bases",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatroidOracle {
    ground: GroundSet,
    kind: MatroidKind,
    block_of: Vec<usize>,
}

/// A failed matroid axiom, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    EmptyDependent,
    /// `subset ⊆ set`, `set` independent, `subset` dependent.
    NotHereditary {
        set: ElementSet,
        subset: ElementSet,
    },
    /// `|smaller| < |larger|`, both independent, no element of `larger` extends `smaller`.
    NoExchange {
        smaller: ElementSet,
        larger: ElementSet,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::EmptyDependent => write!(f, "the empty set is dependent"),
            AxiomViolation::NotHereditary { set, subset } => {
                write!(f, "{set} is independent but its subset {subset} is not")
            }
            AxiomViolation::NoExchange { smaller, larger } => write!(
                f,
                "no element of {larger} can be added to the smaller independent set {smaller}"
            ),
        }
    }
}

impl MatroidOracle {
    pub fn new(n: usize, kind: MatroidKind) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        let mut block_of = Vec::new();
        match &kind {
            MatroidKind::Uniform { .. } => {}
            MatroidKind::Partition { blocks, capacities } => {
                if blocks.len() != capacities.len() {
                    return Err(Error::validation(
                        "matroid.capacities",
                        format!(
                            "{} blocks but {} capacities",
                            blocks.len(),
                            capacities.len()
                        ),
                    ));
                }
                block_of = vec![usize::MAX; n];
                for (b, block) in blocks.iter().enumerate() {
                    for &e in block {
                        if e >= n {
                            return Err(Error::validation(
                                format!("matroid.blocks[{b}]"),
                                format!("element {e} is outside the ground set of size {n}"),
                            ));
                        }
                        if block_of[e] != usize::MAX {
                            return Err(Error::validation(
                                format!("matroid.blocks[{b}]"),
                                format!("element {e} already belongs to block {}", block_of[e]),
                            ));
                        }
                        block_of[e] = b;
                    }
                }
                if let Some(e) = block_of.iter().position(|&b| b == usize::MAX) {
                    return Err(Error::validation(
                        "matroid.blocks",
                        format!("element {e} is not in any block"),
                    ));
                }
            }
            MatroidKind::Graphic { vertices, edges } => {
                if edges.len() != n {
                    return Err(Error::validation(
                        "matroid.edges",
                        format!("expected one edge per element ({n}), got {}", edges.len()),
                    ));
                }
                if let Some(i) = edges
                    .iter()
                    .position(|&(a, b)| a >= *vertices || b >= *vertices)
                {
                    return Err(Error::validation(
                        format!("matroid.edges[{i}]"),
                        format!("endpoint outside 0..{vertices}"),
                    ));
                }
            }
            MatroidKind::ExplicitBases { bases } => {
                if bases.is_empty() {
                    return Err(Error::validation(
                        "matroid.bases",
                        "at least one base is required",
                    ));
                }
                if let Some(i) = bases.iter().position(|b| !ground.contains_set(*b)) {
                    return Err(Error::validation(
                        format!("matroid.bases[{i}]"),
                        format!("base has element ids outside the ground set of size {n}"),
                    ));
                }
            }
        }
        Ok(MatroidOracle {
            ground,
            kind,
            block_of,
        })
    }

    pub fn uniform(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, MatroidKind::Uniform { rank })
    }

    pub fn partition(n: usize, blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        Self::new(n, MatroidKind::Partition { blocks, capacities })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(edges.len(), MatroidKind::Graphic { vertices, edges })
    }

    pub fn explicit_bases(n: usize, bases: Vec<ElementSet>) -> Result<Self> {
        Self::new(n, MatroidKind::ExplicitBases { bases })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    /// Independence test without range checks.
    pub fn independent(&self, s: ElementSet) -> bool {
        match &self.kind {
            MatroidKind::Uniform { rank } => s.len() <= *rank,
            MatroidKind::Partition { capacities, .. } => {
                let mut used = vec![0usize; capacities.len()];
                s.iter().all(|e| {
                    let b = self.block_of[e];
                    used[b] += 1;
                    used[b] <= capacities[b]
                })
            }
            MatroidKind::Graphic { vertices, edges } => {
                let mut forest = DisjointSets::new(*vertices);
                s.iter().all(|e| {
                    let (a, b) = edges[e];
                    forest.union(a, b)
                })
            }
            MatroidKind::ExplicitBases { bases } => bases.iter().any(|b| s.is_subset(*b)),
        }
    }

    pub fn is_independent(&self, s: ElementSet) -> Result<bool> {
        self.ground.check(s)?;
        Ok(self.independent(s))
    }

    /// Extends `s` to a maximal independent set by scanning ids in increasing order.
    pub fn complete_to_base(&self, s: ElementSet) -> ElementSet {
        (0..self.ground.len()).fold(s, |acc, e| {
            if !acc.contains(e) && self.independent(acc.with(e)) {
                acc.with(e)
            } else {
                acc
            }
        })
    }

    /// Size of a maximal independent set, by greedy augmentation.
    pub fn rank(&self) -> usize {
        self.complete_to_base(ElementSet::EMPTY).len()
    }

    pub fn is_base(&self, s: ElementSet) -> bool {
        self.ground.contains_set(s) && self.independent(s) && s.len() == self.rank()
    }

    /// All bases, by enumeration of `2^n` subsets.
    pub fn bases(&self) -> Vec<ElementSet> {
        let r = self.rank();
        self.ground
            .subsets()
            .filter(|s| s.len() == r && self.independent(*s))
            .collect()
    }

    /// Exhaustive check of the independence axioms.
    pub fn check_axioms(&self) -> std::result::Result<(), AxiomViolation> {
        check_axioms_with(self.ground.len(), |s| self.independent(s))
    }
}

/// Exhaustively checks `∅ ∈ I`, heredity and the exchange axiom for an
/// independence predicate on `{0, .., n-1}`.
pub fn check_axioms_with(
    n: usize,
    independent: impl Fn(ElementSet) -> bool,
) -> std::result::Result<(), AxiomViolation> {
    if !independent(ElementSet::EMPTY) {
        return Err(AxiomViolation::EmptyDependent);
    }
    let all: Vec<ElementSet> = (0u64..(1u64 << n)).map(ElementSet).collect();
    let indep: Vec<ElementSet> = all.iter().copied().filter(|s| independent(*s)).collect();
    for &s in &indep {
        for e in s.iter() {
            if !independent(s.without(e)) {
                return Err(AxiomViolation::NotHereditary {
                    set: s,
                    subset: s.without(e),
                });
            }
        }
    }
    for &small in &indep {
        for &large in &indep {
            if small.len() >= large.len() {
                continue;
            }
            if !large
                .difference(small)
                .iter()
                .any(|e| independent(small.with(e)))
            {
                return Err(AxiomViolation::NoExchange {
                    smaller: small,
                    larger: large,
                });
            }
        }
    }
    Ok(())
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A copy `(element, color)` of a ground element; colors run from 1 to ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct LiftedElement {
    pub element: usize,
    pub color: usize,
}

impl LiftedElement {
    pub fn new(element: usize, color: usize) -> Self {
        LiftedElement { element, color }
    }
}

impl From<(usize, usize)> for LiftedElement {
    fn from((element, color): (usize, usize)) -> Self {
        LiftedElement { element, color }
    }
}

impl From<LiftedElement> for (usize, usize) {
    fn from(p: LiftedElement) -> Self {
        (p.element, p.color)
    }
}

impl fmt::Display for LiftedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.element, self.color)
    }
}

/// A colorful subset of `E × [ℓ]`: each element appears with at most one color.
///
/// Stored as one element set per color class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedSolution {
    classes: Vec<ElementSet>,
}

impl LiftedSolution {
    pub fn empty(ell: usize) -> Self {
        assert!(ell >= 1, "at least one color is required");
        LiftedSolution {
            classes: vec![ElementSet::EMPTY; ell],
        }
    }

    /// Every element of `s` with the same color.
    pub fn monochrome(ell: usize, s: ElementSet, color: usize) -> Result<Self> {
        Self::from_pairs(ell, s.iter().map(|e| LiftedElement::new(e, color)))
    }

    pub fn from_pairs(ell: usize, pairs: impl IntoIterator<Item = LiftedElement>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Input("ℓ must be at least 1".into()));
        }
        let mut sol = Self::empty(ell);
        for p in pairs {
            check_color(p, ell)?;
            if p.element >= crate::set::MAX_GROUND {
                return Err(Error::Input(format!(
                    "element id {} out of range",
                    p.element
                )));
            }
            if let Some(c) = sol.color_of(p.element) {
                return Err(Error::Input(format!(
                    "element {} appears with colors {c} and {}; lifted solutions must be colorful",
                    p.element, p.color
                )));
            }
            sol.classes[p.color - 1] = sol.classes[p.color - 1].with(p.element);
        }
        Ok(sol)
    }

    pub fn ell(&self) -> usize {
        self.classes.len()
    }

    /// Elements carrying color `color` (1-based).
    pub fn class(&self, color: usize) -> ElementSet {
        self.classes[color - 1]
    }

    pub fn classes(&self) -> &[ElementSet] {
        &self.classes
    }

    pub fn color_of(&self, e: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.contains(e))
            .map(|i| i + 1)
    }

    pub fn contains(&self, p: LiftedElement) -> bool {
        p.color >= 1 && p.color <= self.ell() && self.classes[p.color - 1].contains(p.element)
    }

    pub fn len(&self) -> usize {
        self.classes.iter().map(|c| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.iter().all(|c| c.is_empty())
    }

    /// Pairs sorted by `(element, color)`.
    pub fn pairs(&self) -> Vec<LiftedElement> {
        let mut out: Vec<_> = self
            .classes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |e| LiftedElement::new(e, i + 1)))
            .collect();
        out.sort();
        out
    }

    /// `π_J(S)`; bit `j - 1` of `colors` selects color `j`.
    pub fn project_mask(&self, colors: u32) -> ElementSet {
        self.classes
            .iter()
            .enumerate()
            .filter(|(i, _)| colors & (1 << i) != 0)
            .fold(ElementSet::EMPTY, |acc, (_, c)| acc.union(*c))
    }

    /// `π_J(S)` for an explicit list of 1-based colors.
    pub fn project(&self, colors: &[usize]) -> ElementSet {
        colors
            .iter()
            .filter(|&&c| c >= 1 && c <= self.ell())
            .fold(ElementSet::EMPTY, |acc, &c| acc.union(self.classes[c - 1]))
    }

    /// `π_[ℓ](S)`.
    pub fn projection(&self) -> ElementSet {
        self.classes
            .iter()
            .fold(ElementSet::EMPTY, |acc, c| acc.union(*c))
    }

    pub fn insert(&mut self, p: LiftedElement) -> Result<()> {
        check_color(p, self.ell())?;
        if self.projection().contains(p.element) {
            return Err(Error::Input(format!(
                "element {} is already present; adding {p} breaks colorfulness",
                p.element
            )));
        }
        self.classes[p.color - 1] = self.classes[p.color - 1].with(p.element);
        Ok(())
    }

    /// `S - out + inn`, checked for membership of `out` and colorfulness of the result.
    pub fn swapped(&self, out: LiftedElement, inn: LiftedElement) -> Result<Self> {
        if !self.contains(out) {
            return Err(Error::Input(format!("{out} is not in the solution")));
        }
        check_color(inn, self.ell())?;
        let mut next = self.clone();
        next.classes[out.color - 1] = next.classes[out.color - 1].without(out.element);
        if next.projection().contains(inn.element) {
            return Err(Error::Input(format!(
                "swapping {out} for {inn} breaks colorfulness"
            )));
        }
        next.classes[inn.color - 1] = next.classes[inn.color - 1].with(inn.element);
        Ok(next)
    }
}

impl Serialize for LiftedSolution {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(usize, usize)> = self
            .pairs()
            .into_iter()
            .map(|p| (p.element, p.color))
            .collect();
        pairs.serialize(serializer)
    }
}

fn check_color(p: LiftedElement, ell: usize) -> Result<()> {
    if p.color == 0 || p.color > ell {
        return Err(Error::Input(format!("color of {p} is outside 1..={ell}")));
    }
    Ok(())
}

/// Independence in the lifted matroid: colorful, with an independent projection.
pub fn lifted_is_independent(
    m: &MatroidOracle,
    ell: usize,
    pairs: &[LiftedElement],
) -> Result<bool> {
    let mut projection = ElementSet::EMPTY;
    for &p in pairs {
        check_color(p, ell)?;
        if p.element >= m.ground().len() {
            return Err(Error::Input(format!("{p} is outside the ground set")));
        }
        if projection.contains(p.element) {
            return Ok(false);
        }
        projection = projection.with(p.element);
    }
    Ok(m.independent(projection))
}

/// A bijection `h: A -> B` between bases with `A - u + h(u)` independent for
/// every `u` and `h(u) = u` on `A ∩ B`.
///
/// Among all such bijections the lexicographically smallest assignment is
/// returned: elements of `A \ B` are fixed in increasing order, each to the
/// smallest partner that still admits a perfect matching of the remainder.
pub fn exchange_bijection(
    m: &MatroidOracle,
    a: ElementSet,
    b: ElementSet,
) -> Result<BTreeMap<usize, usize>> {
    for (name, s) in [("A", a), ("B", b)] {
        if !m.is_base(s) {
            return Err(Error::Input(format!("{name} = {s} is not a base")));
        }
    }
    let mut h: BTreeMap<usize, usize> = a.intersection(b).iter().map(|u| (u, u)).collect();
    let left: Vec<usize> = a.difference(b).to_vec();
    let right: Vec<usize> = b.difference(a).to_vec();
    let adj: Vec<Vec<bool>> = left
        .iter()
        .map(|&u| {
            right
                .iter()
                .map(|&v| m.independent(a.without(u).with(v)))
                .collect()
        })
        .collect();

    let mut taken = vec![false; right.len()];
    for (i, &u) in left.iter().enumerate() {
        let choice = (0..right.len()).find(|&j| {
            adj[i][j] && !taken[j] && {
                taken[j] = true;
                let ok = has_perfect_matching(&adj, i + 1, &taken);
                taken[j] = false;
                ok
            }
        });
        match choice {
            Some(j) => {
                taken[j] = true;
                h.insert(u, right[j]);
            }
            None => {
                return Err(Error::Internal(format!(
                    "no exchange bijection between bases {a} and {b}; the independence oracle \
                     is not a matroid"
                )))
            }
        }
    }
    Ok(h)
}

/// Whether rows `from..` can be perfectly matched into the columns not yet `taken`.
fn has_perfect_matching(adj: &[Vec<bool>], from: usize, taken: &[bool]) -> bool {
    let cols = taken.len();
    let mut match_of_col: Vec<Option<usize>> = vec![None; cols];

    fn augment(
        row: usize,
        adj: &[Vec<bool>],
        taken: &[bool],
        seen: &mut [bool],
        match_of_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..taken.len() {
            if taken[col] || seen[col] || !adj[row][col] {
                continue;
            }
            seen[col] = true;
            let free = match match_of_col[col] {
                None => true,
                Some(other) => augment(other, adj, taken, seen, match_of_col),
            };
            if free {
                match_of_col[col] = Some(row);
                return true;
            }
        }
        false
    }

    (from..adj.len()).all(|row| {
        let mut seen = vec![false; cols];
        augment(row, adj, taken, &mut seen, &mut match_of_col)
    })
}

/// Lifts `h: π(S) -> B` to `h_j((u, k)) = (h(u), j)` for every pair of `S`.
pub fn lift_bijection(
    h: &BTreeMap<usize, usize>,
    s: &LiftedSolution,
    j: usize,
) -> Result<BTreeMap<LiftedElement, LiftedElement>> {
    if j == 0 || j > s.ell() {
        return Err(Error::Input(format!(
            "color {j} is outside 1..={}",
            s.ell()
        )));
    }
    let domain: ElementSet = h.keys().copied().collect();
    if domain != s.projection() {
        return Err(Error::Input(format!(
            "bijection domain {domain} differs from the projection {}",
            s.projection()
        )));
    }
    Ok(s.pairs()
        .into_iter()
        .map(|p| (p, LiftedElement::new(h[&p.element], j)))
        .collect())
}
