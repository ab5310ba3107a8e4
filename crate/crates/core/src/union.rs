//! Matroid union by shortest-path augmentation in the exchange graph.
//!
//! Everything here works against borrowed oracle views (`&[&Valuation]`), so a
//! k-fold union of one valuation is just the same reference repeated k times.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::valuation::Valuation;

/// Pairwise-disjoint bundles, one per agent. Goods in no bundle are unassigned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAllocation {
    m: usize,
    bundles: Vec<Subset>,
}

impl PartialAllocation {
    pub fn empty(m: usize, n: usize) -> Self {
        Self {
            m,
            bundles: vec![Subset::new(); n],
        }
    }

    pub fn new(m: usize, bundles: Vec<Subset>) -> Result<Self> {
        let mut seen = Subset::new();
        for (i, b) in bundles.iter().enumerate() {
            if let Some(g) = b.last().filter(|&g| g >= m) {
                return Err(Error::Argument(format!(
                    "bundle {i} holds good {g} outside 0..{m}"
                )));
            }
            let overlap = b.intersection(&seen);
            if !overlap.is_empty() {
                return Err(Error::Contract(format!(
                    "bundle {i} overlaps earlier bundles on {overlap}"
                )));
            }
            seen = seen.union(b);
        }
        Ok(Self { m, bundles })
    }

    pub fn ground_size(&self) -> usize {
        self.m
    }

    pub fn agent_count(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[Subset] {
        &self.bundles
    }

    pub fn bundle(&self, i: usize) -> &Subset {
        &self.bundles[i]
    }

    pub fn into_bundles(self) -> Vec<Subset> {
        self.bundles
    }

    pub fn assigned(&self) -> Subset {
        self.bundles
            .iter()
            .fold(Subset::new(), |acc, b| acc.union(b))
    }

    pub fn unassigned(&self) -> Subset {
        Subset::full(self.m).difference(&self.assigned())
    }

    pub fn is_complete(&self) -> bool {
        self.assigned().len() == self.m
    }

    pub fn owner(&self, g: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(g))
    }

    pub fn owners(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.m];
        for (i, b) in self.bundles.iter().enumerate() {
            for g in b {
                owner[g] = Some(i);
            }
        }
        owner
    }

    /// Moves `g` from its current owner (if any) to agent `to`.
    pub(crate) fn transfer(&mut self, g: usize, to: usize) {
        for b in &mut self.bundles {
            b.remove(g);
        }
        self.bundles[to].insert(g);
    }

    /// Gives every unassigned good to agent `to`.
    pub(crate) fn complete_into(&mut self, to: usize) {
        let rest = self.unassigned();
        self.bundles[to] = self.bundles[to].union(&rest);
    }

    /// Errors unless every bundle is independent for its agent.
    pub fn check_independent(&self, agents: &[&Valuation]) -> Result<()> {
        self.check_shape(agents)?;
        for (i, (b, v)) in self.bundles.iter().zip(agents).enumerate() {
            if !v.independent(b) {
                return Err(Error::Contract(format!(
                    "bundle {b} of agent {i} is not independent"
                )));
            }
        }
        Ok(())
    }

    fn check_shape(&self, agents: &[&Valuation]) -> Result<()> {
        if agents.len() != self.bundles.len() {
            return Err(Error::Argument(format!(
                "allocation has {} bundles for {} agents",
                self.bundles.len(),
                agents.len()
            )));
        }
        if let Some(v) = agents.iter().find(|v| v.ground_size() != self.m) {
            return Err(Error::Argument(format!(
                "allocation over {} goods, valuation over {}",
                self.m,
                v.ground_size()
            )));
        }
        Ok(())
    }
}

pub(crate) fn require_rank(agents: &[&Valuation], op: &'static str) -> Result<()> {
    match agents.iter().find(|v| !v.is_rank()) {
        None => Ok(()),
        Some(v) => Err(Error::capability(
            op,
            format!(
                "{} valuation is not a matroid rank function",
                v.class_name()
            ),
        )),
    }
}

/// Anything that can list the out-neighbours of a good among a candidate set.
trait Successors {
    /// Out-neighbours of `g` that lie in `candidates`, ascending.
    fn successors(&self, g: usize, candidates: &Subset) -> Vec<usize>;
}

/// Directed graph on goods: `(g, h)` is an edge iff the owner `i` of `g` has
/// `h ∉ A_i` and `A_i - g + h` independent. Unassigned goods have no out-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeGraph {
    owner: Vec<Option<usize>>,
    adjacency: Vec<Vec<usize>>,
}

impl ExchangeGraph {
    /// Builds the graph on all goods. Costs one rank query per candidate edge.
    pub fn build(agents: &[&Valuation], alloc: &PartialAllocation) -> Result<Self> {
        Self::build_within(agents, alloc, &Subset::full(alloc.ground_size()))
    }

    /// Builds the graph restricted to the vertex set `domain`.
    pub fn build_within(
        agents: &[&Valuation],
        alloc: &PartialAllocation,
        domain: &Subset,
    ) -> Result<Self> {
        require_rank(agents, "build_exchange_graph")?;
        alloc.check_independent(agents)?;
        let owner = alloc.owners();
        let mut adjacency = vec![Vec::new(); alloc.ground_size()];
        for g in domain {
            if let Some(i) = owner[g] {
                let bundle = alloc.bundle(i);
                let base = bundle.without(g);
                adjacency[g] = domain
                    .difference(bundle)
                    .iter()
                    .filter(|&h| agents[i].independent(&base.with(h)))
                    .collect();
            }
        }
        Ok(Self { owner, adjacency })
    }

    pub fn has_edge(&self, g: usize, h: usize) -> bool {
        self.adjacency[g].binary_search(&h).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(g, adj)| adj.iter().map(move |&h| (g, h)))
    }

    pub fn owner(&self, g: usize) -> Option<usize> {
        self.owner[g]
    }
}

impl Successors for ExchangeGraph {
    fn successors(&self, g: usize, candidates: &Subset) -> Vec<usize> {
        self.adjacency[g]
            .iter()
            .copied()
            .filter(|&h| candidates.contains(h))
            .collect()
    }
}

/// Exchange graph whose edges are probed on demand during the search. Only
/// edges into not-yet-visited goods are ever queried, and the search visits
/// exactly the same goods in the same order as on the materialized graph.
struct LazyExchange<'a> {
    agents: &'a [&'a Valuation],
    alloc: &'a PartialAllocation,
    owner: Vec<Option<usize>>,
}

impl<'a> LazyExchange<'a> {
    fn new(agents: &'a [&'a Valuation], alloc: &'a PartialAllocation) -> Self {
        Self {
            agents,
            alloc,
            owner: alloc.owners(),
        }
    }
}

impl Successors for LazyExchange<'_> {
    fn successors(&self, g: usize, candidates: &Subset) -> Vec<usize> {
        let Some(i) = self.owner[g] else {
            return Vec::new();
        };
        let bundle = self.alloc.bundle(i);
        let base = bundle.without(g);
        candidates
            .difference(bundle)
            .iter()
            .filter(|&h| self.agents[i].independent(&base.with(h)))
            .collect()
    }
}

/// Multi-source breadth-first search. Returns the goods of a minimum-edge path
/// from `sources` to `targets` whose only target vertex is its last one, or a
/// single-vertex path if the two sets meet. Ties go to lower good indices.
fn bfs(
    graph: &impl Successors,
    sources: &Subset,
    targets: &Subset,
    domain: &Subset,
) -> Option<Vec<usize>> {
    if let Some(g) = sources.intersection(targets).first() {
        return Some(vec![g]);
    }
    let mut parent = vec![usize::MAX; domain.last().map_or(0, |g| g + 1)];
    let mut unvisited = domain.difference(sources);
    let mut queue: VecDeque<usize> = sources.intersection(domain).iter().collect();
    while let Some(g) = queue.pop_front() {
        for h in graph.successors(g, &unvisited) {
            unvisited.remove(h);
            parent[h] = g;
            if targets.contains(h) {
                let mut path = vec![h];
                let mut cur = h;
                while parent[cur] != usize::MAX {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(h);
        }
    }
    None
}

/// Shortest path in a materialized exchange graph, as a list of goods.
pub fn shortest_path(
    graph: &ExchangeGraph,
    sources: &Subset,
    targets: &Subset,
) -> Option<Vec<usize>> {
    let domain = Subset::full(graph.adjacency.len());
    bfs(graph, sources, targets, &domain)
}

/// Same search as [`shortest_path`], probing edges lazily. Vertices are
/// restricted to `domain`.
pub(crate) fn find_path(
    agents: &[&Valuation],
    alloc: &PartialAllocation,
    sources: &Subset,
    targets: &Subset,
    domain: &Subset,
) -> Option<Vec<usize>> {
    bfs(&LazyExchange::new(agents, alloc), sources, targets, domain)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    /// Ends at an unassigned good.
    Growth,
    /// Ends inside the bundle of `target`.
    Transfer { target: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentingPath {
    pub goods: Vec<usize>,
    pub source: usize,
    pub kind: PathKind,
}

impl AugmentingPath {
    pub fn first(&self) -> usize {
        self.goods[0]
    }

    pub fn last(&self) -> usize {
        self.goods[self.goods.len() - 1]
    }
}

/// Transfer augmentation along a shortest path from `F_i(A_i)` into `A_j`:
/// `A_k <- A_k Δ P` for `k ∉ {i, j}`, `A_i <- (A_i Δ P) + g_1`, `A_j <- A_j - g_t`.
///
/// Agent `i` gains one good, `j` loses one, every other bundle keeps its size,
/// and all bundles stay independent. Independence is re-checked afterwards;
/// a failure there means the path was not shortest.
pub fn augment_transfer(
    agents: &[&Valuation],
    alloc: &PartialAllocation,
    path: &[usize],
    i: usize,
    j: usize,
) -> Result<PartialAllocation> {
    augment(
        agents,
        alloc,
        &AugmentingPath {
            goods: path.to_vec(),
            source: i,
            kind: PathKind::Transfer { target: j },
        },
    )
}

/// Growth augmentation along a shortest path from `F_i(A_i)` to an unassigned
/// good: `A_i <- (A_i Δ P) + g_1`, `A_k <- A_k Δ P` otherwise. One more good ends
/// up assigned.
pub fn augment_growth(
    agents: &[&Valuation],
    alloc: &PartialAllocation,
    path: &[usize],
    i: usize,
) -> Result<PartialAllocation> {
    augment(
        agents,
        alloc,
        &AugmentingPath {
            goods: path.to_vec(),
            source: i,
            kind: PathKind::Growth,
        },
    )
}

pub fn augment(
    agents: &[&Valuation],
    alloc: &PartialAllocation,
    path: &AugmentingPath,
) -> Result<PartialAllocation> {
    require_rank(agents, "augment")?;
    alloc.check_shape(agents)?;
    let m = alloc.ground_size();
    let n = alloc.agent_count();
    let goods = &path.goods;
    let i = path.source;

    if goods.is_empty() {
        return Err(Error::Contract("augmenting path is empty".into()));
    }
    if let Some(&g) = goods.iter().find(|&&g| g >= m) {
        return Err(Error::Argument(format!("path good {g} outside 0..{m}")));
    }
    if goods.iter().copied().collect::<Subset>().len() != goods.len() {
        return Err(Error::Contract(format!("path {goods:?} repeats a good")));
    }
    if i >= n {
        return Err(Error::Argument(format!("source agent {i} outside 0..{n}")));
    }
    let owner = alloc.owners();
    let (first, last) = (path.first(), path.last());
    if alloc.bundle(i).contains(first) || !agents[i].independent(&alloc.bundle(i).with(first)) {
        return Err(Error::Contract(format!(
            "path start {first} is not a free good of agent {i}"
        )));
    }
    match path.kind {
        PathKind::Growth => {
            if owner[last].is_some() {
                return Err(Error::Contract(format!(
                    "growth path ends at assigned good {last}"
                )));
            }
        }
        PathKind::Transfer { target: j } => {
            if j >= n || j == i {
                return Err(Error::Argument(format!(
                    "invalid transfer target {j} for source {i}"
                )));
            }
            if owner[last] != Some(j) {
                return Err(Error::Contract(format!(
                    "transfer path ends at {last}, not in bundle of {j}"
                )));
            }
            if goods[..goods.len() - 1]
                .iter()
                .any(|&g| owner[g] == Some(j))
            {
                return Err(Error::Contract(format!(
                    "transfer path meets bundle of {j} before its last good"
                )));
            }
        }
    }
    for w in goods.windows(2) {
        let (g, h) = (w[0], w[1]);
        let Some(k) = owner[g] else {
            return Err(Error::Contract(format!(
                "edge ({g}, {h}) leaves an unassigned good"
            )));
        };
        let bundle = alloc.bundle(k);
        if bundle.contains(h) || !agents[k].independent(&bundle.without(g).with(h)) {
            return Err(Error::Contract(format!(
                "({g}, {h}) is not an exchange-graph edge"
            )));
        }
    }

    let mut bundles = alloc.bundles().to_vec();
    let mut touched = Subset::singleton(i);
    for w in goods.windows(2) {
        let k = owner[w[0]].expect("checked above");
        bundles[k].remove(w[0]);
        bundles[k].insert(w[1]);
        touched.insert(k);
    }
    bundles[i].insert(first);
    if let PathKind::Transfer { target: j } = path.kind {
        bundles[j].remove(last);
        touched.insert(j);
    }

    for k in &touched {
        if !agents[k].independent(&bundles[k]) {
            return Err(Error::Invariant(format!(
                "augmenting along {goods:?} left bundle {} of agent {k} dependent",
                bundles[k]
            )));
        }
    }
    let next = PartialAllocation::new(m, bundles)
        .map_err(|e| Error::Invariant(format!("augmentation broke disjointness: {e}")))?;
    for k in 0..n {
        let expected = alloc.bundle(k).len() as isize + isize::from(k == i)
            - isize::from(matches!(path.kind, PathKind::Transfer { target } if target == k));
        if next.bundle(k).len() as isize != expected {
            return Err(Error::Invariant(format!(
                "augmentation changed |A_{k}| from {} to {}",
                alloc.bundle(k).len(),
                next.bundle(k).len()
            )));
        }
    }
    Ok(next)
}

/// Maximum-size independent set of the union of `agents` inside `domain`,
/// split into independent bundles.
///
/// Starting from empty bundles, repeatedly augments along a shortest path from
/// the union of all free-good sets to an unassigned good of `domain`. The path
/// is credited to the lowest-index agent for which its first good is free.
/// Each augmentation assigns one more good, so there are at most `|domain|`.
pub fn max_welfare_allocation_within(
    agents: &[&Valuation],
    domain: &Subset,
) -> Result<PartialAllocation> {
    require_rank(agents, "max_welfare_allocation")?;
    let m = agents.first().map_or(0, |v| v.ground_size());
    if let Some(v) = agents.iter().find(|v| v.ground_size() != m) {
        return Err(Error::Argument(format!(
            "agents disagree on ground set size ({m} vs {})",
            v.ground_size()
        )));
    }
    if let Some(g) = domain.last().filter(|&g| g >= m) {
        return Err(Error::Argument(format!("good {g} outside 0..{m}")));
    }
    let mut alloc = PartialAllocation::empty(m, agents.len());
    loop {
        let targets = domain.difference(&alloc.assigned());
        if targets.is_empty() {
            break;
        }
        let free: Vec<Subset> = agents
            .iter()
            .zip(alloc.bundles())
            .map(|(v, b)| v.free_goods_within(b, domain))
            .collect();
        let sources = free.iter().fold(Subset::new(), |acc, f| acc.union(f));
        let Some(path) = find_path(agents, &alloc, &sources, &targets, domain) else {
            break;
        };
        let i = free
            .iter()
            .position(|f| f.contains(path[0]))
            .expect("path starts at a free good");
        alloc = augment_growth(agents, &alloc, &path, i)?;
    }
    Ok(alloc)
}

/// Welfare-maximizing partial allocation of all goods with independent bundles.
pub fn max_welfare_allocation(agents: &[&Valuation]) -> Result<PartialAllocation> {
    let m = agents.first().map_or(0, |v| v.ground_size());
    max_welfare_allocation_within(agents, &Subset::full(m))
}

/// Rank of `s` in the union of the given matroids, i.e. the best welfare
/// obtainable by splitting `s` among these agents.
pub fn union_rank(agents: &[&Valuation], s: &Subset) -> Result<usize> {
    if agents.is_empty() {
        return Err(Error::Argument(
            "union rank needs at least one agent".into(),
        ));
    }
    Ok(max_welfare_allocation_within(agents, s)?.assigned().len())
}

/// Rank of `s` in the k-fold union of `v` with itself, plus the k independent
/// parts of a maximum independent set.
pub fn k_fold_union_rank(v: &Valuation, k: usize, s: &Subset) -> Result<(usize, Vec<Subset>)> {
    if k == 0 {
        return Err(Error::Argument("k-fold union needs k >= 1".into()));
    }
    v.check_subset(s)?;
    let views = vec![v; k];
    let parts = max_welfare_allocation_within(&views, s)?.into_bundles();
    Ok((parts.iter().map(Subset::len).sum(), parts))
}
