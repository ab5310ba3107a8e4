//! Concrete matroid families and an exhaustive check of the matroid axioms.
//!
//! Every family answers rank queries directly; none of them counts queries.
//! Counting happens one level up, in [`crate::valuation::Valuation`].

use std::fmt;

use crate::error::{Error, Result};
use crate::subset::Subset;

/// `r(S) = min(|S|, k)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    m: usize,
    k: usize,
}

impl UniformMatroid {
    pub fn new(m: usize, k: usize) -> Self {
        Self { m, k }
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    fn rank(&self, s: &Subset) -> usize {
        s.len().min(self.k)
    }
}

/// `r(S) = sum over blocks b of min(|S ∩ b|, cap_b)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    m: usize,
    blocks: Vec<Subset>,
    caps: Vec<usize>,
}

impl PartitionMatroid {
    /// `blocks` must partition `0..m`.
    pub fn new(m: usize, blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::Validation(format!(
                "partition matroid has {} blocks but {} capacities",
                blocks.len(),
                caps.len()
            )));
        }
        let mut seen = Subset::new();
        let mut sets = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            let mut set = Subset::new();
            for &g in block {
                if g >= m {
                    return Err(Error::Validation(format!(
                        "block {b} names good {g} outside 0..{m}"
                    )));
                }
                if !seen.insert(g) {
                    return Err(Error::Validation(format!(
                        "good {g} appears in more than one block (overlap at block {b})"
                    )));
                }
                set.insert(g);
            }
            sets.push(set);
        }
        if seen.len() != m {
            let missing = Subset::full(m).difference(&seen);
            return Err(Error::Validation(format!(
                "partition blocks do not cover goods {missing}"
            )));
        }
        Ok(Self {
            m,
            blocks: sets,
            caps,
        })
    }

    /// Binary additive valuation: every good in `liked` is worth one, all others zero.
    pub fn binary_additive(m: usize, liked: &Subset) -> Self {
        Self {
            m,
            blocks: (0..m).map(Subset::singleton).collect(),
            caps: (0..m).map(|g| usize::from(liked.contains(g))).collect(),
        }
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    fn rank(&self, s: &Subset) -> usize {
        self.blocks
            .iter()
            .zip(&self.caps)
            .map(|(b, &cap)| b.intersection(s).len().min(cap))
            .sum()
    }
}

/// Cycle matroid of a multigraph. Good `g` is edge `edges[g]`; loops are allowed
/// and are always dependent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((g, &(u, v))) = edges
            .iter()
            .enumerate()
            .find(|(_, &(u, v))| u >= vertices || v >= vertices)
        {
            return Err(Error::Validation(format!(
                "edge {g} = ({u}, {v}) has an endpoint outside 0..{vertices}"
            )));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Size of a spanning forest of the edge subset `s`.
    fn rank(&self, s: &Subset) -> usize {
        let mut forest = DisjointSets::new(self.vertices);
        s.iter()
            .filter(|&g| {
                let (u, v) = self.edges[g];
                forest.union(u, v)
            })
            .count()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already one class.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Each good may be matched to one of its adjacent slots; `r(S)` is the size of
/// a maximum matching of `S` into the slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalMatroid {
    slots: usize,
    adjacency: Vec<Vec<usize>>,
}

impl TransversalMatroid {
    pub fn new(slots: usize, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for (g, adj) in adjacency.iter_mut().enumerate() {
            if let Some(&s) = adj.iter().find(|&&s| s >= slots) {
                return Err(Error::Validation(format!(
                    "good {g} is adjacent to slot {s} outside 0..{slots}"
                )));
            }
            adj.sort_unstable();
            adj.dedup();
        }
        Ok(Self { slots, adjacency })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    fn rank(&self, s: &Subset) -> usize {
        let mut slot_owner = vec![usize::MAX; self.slots];
        let mut matched = 0;
        for g in s {
            let mut visited = vec![false; self.slots];
            if self.try_match(g, &mut visited, &mut slot_owner) {
                matched += 1;
            }
        }
        matched
    }

    fn try_match(&self, g: usize, visited: &mut [bool], slot_owner: &mut [usize]) -> bool {
        for &slot in &self.adjacency[g] {
            if visited[slot] {
                continue;
            }
            visited[slot] = true;
            let owner = slot_owner[slot];
            if owner == usize::MAX || self.try_match(owner, visited, slot_owner) {
                slot_owner[slot] = g;
                return true;
            }
        }
        false
    }
}

/// Binary matroid: good `g` is the column vector `columns[g]` over GF(2), stored
/// as the low `dimension` bits of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMatroidGf2 {
    dimension: usize,
    columns: Vec<u64>,
}

impl LinearMatroidGf2 {
    pub fn new(dimension: usize, columns: Vec<u64>) -> Result<Self> {
        if dimension > 64 {
            return Err(Error::Validation(format!(
                "GF(2) dimension {dimension} exceeds 64"
            )));
        }
        if dimension < 64 {
            if let Some((g, c)) = columns
                .iter()
                .enumerate()
                .find(|(_, &c)| c >> dimension != 0)
            {
                return Err(Error::Validation(format!(
                    "column {g} = {c:#x} does not fit in dimension {dimension}"
                )));
            }
        }
        Ok(Self { dimension, columns })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    fn rank(&self, s: &Subset) -> usize {
        // basis[b] holds a reduced vector whose highest set bit is b
        let mut basis = [0u64; 64];
        let mut rank = 0;
        for g in s {
            let mut x = self.columns[g];
            while x != 0 {
                let top = 63 - x.leading_zeros() as usize;
                if basis[top] == 0 {
                    basis[top] = x;
                    rank += 1;
                    break;
                }
                x ^= basis[top];
            }
        }
        rank
    }
}

/// Matroid given by its independent sets. Only the inclusion-maximal members
/// are kept; `r(S)` is the largest overlap of `S` with one of them.
///
/// Construction does not check the axioms. Call
/// [`Matroid::find_axiom_violation`] when the family comes from outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitMatroid {
    m: usize,
    maximal: Vec<Subset>,
}

impl ExplicitMatroid {
    pub fn new(m: usize, family: Vec<Subset>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Validation(
                "explicit matroid needs at least one independent set".into(),
            ));
        }
        if let Some(bad) = family.iter().find(|s| s.last().is_some_and(|g| g >= m)) {
            return Err(Error::Validation(format!(
                "independent set {bad} names a good outside 0..{m}"
            )));
        }
        let mut maximal: Vec<Subset> = Vec::new();
        let mut sorted = family;
        sorted.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.to_vec().cmp(&b.to_vec()))
        });
        sorted.dedup();
        for s in sorted {
            if !maximal.iter().any(|t| s.is_subset(t)) {
                maximal.push(s);
            }
        }
        maximal.sort_by_key(|s| s.to_vec());
        Ok(Self { m, maximal })
    }

    /// Lists the bases of `matroid` (all maximal independent sets are bases).
    pub fn materialize(matroid: &Matroid) -> Result<Self> {
        let m = matroid.ground_size();
        if m > 16 {
            return Err(Error::capability(
                "materialize",
                format!("ground set of {m} goods exceeds the limit of 16"),
            ));
        }
        let full = matroid.rank(&Subset::full(m));
        let bases = (0u64..1 << m)
            .filter(|mask| mask.count_ones() as usize == full)
            .map(Subset::from_mask)
            .filter(|s| matroid.rank(s) == full)
            .collect();
        Self::new(m, bases)
    }

    pub fn maximal_sets(&self) -> &[Subset] {
        &self.maximal
    }

    fn rank(&self, s: &Subset) -> usize {
        self.maximal
            .iter()
            .map(|b| b.intersection(s).len())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matroid {
    Uniform(UniformMatroid),
    Partition(PartitionMatroid),
    Graphic(GraphicMatroid),
    Transversal(TransversalMatroid),
    LinearGf2(LinearMatroidGf2),
    Explicit(ExplicitMatroid),
}

/// Largest ground set [`Matroid::find_axiom_violation`] will enumerate.
pub const AXIOM_CHECK_LIMIT: usize = 14;

impl Matroid {
    pub fn ground_size(&self) -> usize {
        match self {
            Matroid::Uniform(u) => u.m,
            Matroid::Partition(p) => p.m,
            Matroid::Graphic(g) => g.edges.len(),
            Matroid::Transversal(t) => t.adjacency.len(),
            Matroid::LinearGf2(l) => l.columns.len(),
            Matroid::Explicit(e) => e.m,
        }
    }

    /// Rank of `s`. Members of `s` must lie in the ground set.
    pub fn rank(&self, s: &Subset) -> usize {
        match self {
            Matroid::Uniform(u) => u.rank(s),
            Matroid::Partition(p) => p.rank(s),
            Matroid::Graphic(g) => g.rank(s),
            Matroid::Transversal(t) => t.rank(s),
            Matroid::LinearGf2(l) => l.rank(s),
            Matroid::Explicit(e) => e.rank(s),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Matroid::Uniform(_) => "uniform",
            Matroid::Partition(_) => "partition",
            Matroid::Graphic(_) => "graphic",
            Matroid::Transversal(_) => "transversal",
            Matroid::LinearGf2(_) => "linear-gf2",
            Matroid::Explicit(_) => "explicit",
        }
    }

    pub fn find_axiom_violation(&self) -> Result<Option<AxiomViolation>> {
        let m = self.ground_size();
        check_axiom_limit(m)?;
        Ok(find_axiom_violation(m, |s| self.rank(s) == s.len()))
    }
}

pub(crate) fn check_axiom_limit(m: usize) -> Result<()> {
    if m > AXIOM_CHECK_LIMIT {
        return Err(Error::capability(
            "validate_matroid_axioms",
            format!("ground set of {m} goods exceeds the limit of {AXIOM_CHECK_LIMIT}"),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Nonempty,
    Hereditary,
    Augmentation,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Nonempty => "nonempty",
            Axiom::Hereditary => "hereditary",
            Axiom::Augmentation => "augmentation",
        }
    }
}

/// A failed axiom with a witness pair.
///
/// * `Nonempty`: both sets are empty (the empty set is dependent).
/// * `Hereditary`: `first` is independent, its subset `second` is not.
/// * `Augmentation`: `first` and `second` are independent, `|first| < |second|`,
///   and no good of `second \ first` extends `first`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub first: Subset,
    pub second: Subset,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} axiom fails for {} and {}",
            self.axiom.name(),
            self.first,
            self.second
        )
    }
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Self {
        Error::Axiom {
            axiom: v.axiom.name(),
            first: v.first,
            second: v.second,
        }
    }
}

/// Exhaustive axiom scan over all `2^m` subsets of the family induced by
/// `independent`.
///
/// Augmentation is tested in its span form: for every independent `I`, the set
/// `I` together with all goods that cannot extend it must have no independent
/// subset larger than `I`. Given the hereditary property this is equivalent
/// to the pairwise exchange axiom and costs `O(m 2^m)` instead of `O(4^m)`.
pub fn find_axiom_violation(
    m: usize,
    mut independent: impl FnMut(&Subset) -> bool,
) -> Option<AxiomViolation> {
    assert!(m <= 20, "axiom scan is exhaustive over 2^m subsets");
    let count = 1usize << m;
    let indep: Vec<bool> = (0..count as u64)
        .map(|mask| independent(&Subset::from_mask(mask)))
        .collect();

    if !indep[0] {
        return Some(AxiomViolation {
            axiom: Axiom::Nonempty,
            first: Subset::new(),
            second: Subset::new(),
        });
    }

    for mask in 0..count {
        if !indep[mask] {
            continue;
        }
        for g in 0..m {
            if mask & (1 << g) != 0 && !indep[mask & !(1 << g)] {
                return Some(AxiomViolation {
                    axiom: Axiom::Hereditary,
                    first: Subset::from_mask(mask as u64),
                    second: Subset::from_mask((mask & !(1 << g)) as u64),
                });
            }
        }
    }

    // best[X] is a largest independent subset of X, found by dropping goods.
    let mut best = vec![0usize; count];
    for mask in 0..count {
        if indep[mask] {
            best[mask] = mask;
            continue;
        }
        best[mask] = (0..m)
            .filter(|g| mask & (1 << g) != 0)
            .map(|g| best[mask & !(1 << g)])
            .max_by_key(|b| b.count_ones())
            .unwrap_or(0);
    }

    for mask in 0..count {
        if !indep[mask] {
            continue;
        }
        let span = (0..m)
            .filter(|g| mask & (1 << g) == 0 && !indep[mask | (1 << g)])
            .fold(mask, |acc, g| acc | (1 << g));
        if best[span].count_ones() > mask.count_ones() {
            return Some(AxiomViolation {
                axiom: Axiom::Augmentation,
                first: Subset::from_mask(mask as u64),
                second: Subset::from_mask(best[span] as u64),
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Matroid {
        Matroid::Graphic(GraphicMatroid::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap())
    }

    #[test]
    fn uniform_rank() {
        let u = Matroid::Uniform(UniformMatroid::new(6, 3));
        assert_eq!(u.rank(&Subset::from([0, 1, 2, 3, 4])), 3);
        assert_eq!(u.rank(&Subset::from([5])), 1);
    }

    #[test]
    fn graphic_triangle_and_loops() {
        assert_eq!(triangle().rank(&Subset::full(3)), 2);
        let g = Matroid::Graphic(GraphicMatroid::new(2, vec![(0, 0), (0, 1), (1, 0)]).unwrap());
        assert_eq!(g.rank(&Subset::from([0])), 0);
        assert_eq!(g.rank(&Subset::full(3)), 1);
    }

    #[test]
    fn graphic_rejects_bad_endpoint() {
        assert!(GraphicMatroid::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn transversal_rank_is_matching_size() {
        // goods 0,1 both only like slot 0; good 2 likes slots 0 and 1
        let t = TransversalMatroid::new(2, vec![vec![0], vec![0], vec![0, 1]]).unwrap();
        let t = Matroid::Transversal(t);
        assert_eq!(t.rank(&Subset::from([0, 1])), 1);
        assert_eq!(t.rank(&Subset::from([0, 2])), 2);
        assert_eq!(t.rank(&Subset::full(3)), 2);
        // augmenting path needed: 2 first takes slot 0, then 0 pushes it to slot 1
        assert_eq!(t.rank(&Subset::from([2, 0])), 2);
    }

    #[test]
    fn gf2_rank() {
        let l = Matroid::LinearGf2(
            LinearMatroidGf2::new(3, vec![0b011, 0b101, 0b110, 0b000, 0b111]).unwrap(),
        );
        assert_eq!(l.rank(&Subset::from([0, 1, 2])), 2);
        assert_eq!(l.rank(&Subset::from([3])), 0);
        assert_eq!(l.rank(&Subset::from([0, 1, 4])), 3);
        assert!(LinearMatroidGf2::new(2, vec![0b100]).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionMatroid::new(3, vec![vec![0, 1], vec![1, 2]], vec![1, 1]).is_err());
        assert!(PartitionMatroid::new(3, vec![vec![0, 1]], vec![1]).is_err());
        assert!(PartitionMatroid::new(3, vec![vec![0, 1, 2]], vec![1, 1]).is_err());
        let p = PartitionMatroid::new(3, vec![vec![0, 1], vec![2]], vec![1, 1]).unwrap();
        assert_eq!(Matroid::Partition(p).rank(&Subset::full(3)), 2);
    }

    #[test]
    fn explicit_keeps_maximal_sets() {
        let e = ExplicitMatroid::new(
            4,
            vec![
                Subset::new(),
                Subset::from([0]),
                Subset::from([0, 2]),
                Subset::from([1, 3]),
                Subset::from([0, 2]),
            ],
        )
        .unwrap();
        assert_eq!(
            e.maximal_sets(),
            &[Subset::from([0, 2]), Subset::from([1, 3])]
        );
        assert!(ExplicitMatroid::new(4, vec![]).is_err());
        assert!(ExplicitMatroid::new(2, vec![Subset::from([2])]).is_err());
    }

    #[test]
    fn materialize_matches_rank() {
        let g = triangle();
        let e = Matroid::Explicit(ExplicitMatroid::materialize(&g).unwrap());
        for mask in 0..8u64 {
            let s = Subset::from_mask(mask);
            assert_eq!(g.rank(&s), e.rank(&s));
        }
    }

    #[test]
    fn explicit_non_matroid_fails_augmentation() {
        let e = Matroid::Explicit(
            ExplicitMatroid::new(4, vec![Subset::from([0, 2]), Subset::from([1, 3])]).unwrap(),
        );
        let v = e.find_axiom_violation().unwrap().unwrap();
        assert_eq!(v.axiom, Axiom::Augmentation);
        // witness: no good of second \ first extends first
        assert!(v.first.len() < v.second.len());
        for g in v.second.difference(&v.first).iter() {
            let t = v.first.with(g);
            assert!(e.rank(&t) < t.len());
        }
    }

    #[test]
    fn hereditary_violation_detected() {
        // {0,1} independent but {1} is not
        let v = find_axiom_violation(2, |s| {
            s.is_empty() || s.len() == 2 || s.contains(0) && s.len() == 1
        })
        .unwrap();
        assert_eq!(v.axiom, Axiom::Hereditary);
        assert_eq!(v.first, Subset::from([0, 1]));
        assert_eq!(
            v.second,
            Subset::from([0]).symmetric_difference(&Subset::from([0, 1]))
        );
    }

    #[test]
    fn empty_dependent_violates_nonempty() {
        let v = find_axiom_violation(1, |_| false).unwrap();
        assert_eq!(v.axiom, Axiom::Nonempty);
    }

    #[test]
    fn axiom_scan_capped() {
        let u = Matroid::Uniform(UniformMatroid::new(15, 2));
        assert!(matches!(
            u.find_axiom_violation(),
            Err(Error::Capability { .. })
        ));
        let u = Matroid::Uniform(UniformMatroid::new(14, 2));
        assert_eq!(u.find_axiom_violation().unwrap(), None);
    }
}
