//! Value oracles over a shared ground set of goods.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::matroid::{self, AxiomViolation, Matroid};
use crate::subset::Subset;

/// `v(S) = max over X in family of |S ∩ X|`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryXos {
    m: usize,
    family: Vec<Subset>,
}

impl BinaryXos {
    pub fn new(m: usize, family: Vec<Subset>) -> Result<Self> {
        if let Some(bad) = family.iter().find(|s| s.last().is_some_and(|g| g >= m)) {
            return Err(Error::Validation(format!(
                "binary XOS set {bad} names a good outside 0..{m}"
            )));
        }
        Ok(Self { m, family })
    }

    pub fn family(&self) -> &[Subset] {
        &self.family
    }

    fn value(&self, s: &Subset) -> u64 {
        self.family
            .iter()
            .map(|x| x.intersection(s).len() as u64)
            .max()
            .unwrap_or(0)
    }
}

/// `v(S) = max { w(T) : T ⊆ S independent }`, evaluated by the matroid greedy
/// algorithm (heaviest first, ties by ascending index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedRank {
    matroid: Matroid,
    weights: Vec<u64>,
    order: Vec<usize>,
}

impl WeightedRank {
    pub fn new(matroid: Matroid, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != matroid.ground_size() {
            return Err(Error::Validation(format!(
                "weighted rank has {} weights for {} goods",
                weights.len(),
                matroid.ground_size()
            )));
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        Ok(Self {
            matroid,
            weights,
            order,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    fn value(&self, s: &Subset) -> u64 {
        let mut chosen = Subset::new();
        let mut total = 0;
        for &g in self.order.iter().filter(|&&g| s.contains(g)) {
            if self.weights[g] == 0 {
                break;
            }
            let next = chosen.with(g);
            if self.matroid.rank(&next) == next.len() {
                chosen = next;
                total += self.weights[g];
            }
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationKind {
    Rank(Matroid),
    BinaryXos(BinaryXos),
    WeightedRank(WeightedRank),
}

/// An agent's valuation behind a value oracle.
///
/// The valuation itself is immutable. The only mutable state is the query
/// counter, an atomic, so a shared `&Valuation` may be queried from several
/// threads. Cloning yields a fresh counter.
#[derive(Debug)]
pub struct Valuation {
    kind: ValuationKind,
    queries: AtomicU64,
}

impl Clone for Valuation {
    fn clone(&self) -> Self {
        Self::new(self.kind.clone())
    }
}

impl PartialEq for Valuation {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<Matroid> for Valuation {
    fn from(m: Matroid) -> Self {
        Self::new(ValuationKind::Rank(m))
    }
}

impl Valuation {
    pub fn new(kind: ValuationKind) -> Self {
        Self {
            kind,
            queries: AtomicU64::new(0),
        }
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    pub fn matroid(&self) -> Option<&Matroid> {
        match &self.kind {
            ValuationKind::Rank(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_rank(&self) -> bool {
        self.matroid().is_some()
    }

    pub fn class_name(&self) -> &'static str {
        match &self.kind {
            ValuationKind::Rank(m) => m.family_name(),
            ValuationKind::BinaryXos(_) => "binary-xos",
            ValuationKind::WeightedRank(_) => "weighted-rank",
        }
    }

    pub fn ground_size(&self) -> usize {
        match &self.kind {
            ValuationKind::Rank(m) => m.ground_size(),
            ValuationKind::BinaryXos(x) => x.m,
            ValuationKind::WeightedRank(w) => w.matroid.ground_size(),
        }
    }

    /// Raw oracle query; counted. Members of `s` must be below [`Self::ground_size`].
    pub fn value(&self, s: &Subset) -> u64 {
        debug_assert!(s.last().is_none_or(|g| g < self.ground_size()));
        self.queries.fetch_add(1, Ordering::Relaxed);
        match &self.kind {
            ValuationKind::Rank(m) => m.rank(s) as u64,
            ValuationKind::BinaryXos(x) => x.value(s),
            ValuationKind::WeightedRank(w) => w.value(s),
        }
    }

    /// Number of oracle queries since construction or the last reset.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn check_subset(&self, s: &Subset) -> Result<()> {
        match s.last() {
            Some(g) if g >= self.ground_size() => Err(Error::Argument(format!(
                "good {g} outside ground set 0..{}",
                self.ground_size()
            ))),
            _ => Ok(()),
        }
    }

    fn check_good(&self, g: usize) -> Result<()> {
        if g >= self.ground_size() {
            return Err(Error::Argument(format!(
                "good {g} outside ground set 0..{}",
                self.ground_size()
            )));
        }
        Ok(())
    }

    fn require_rank(&self, op: &'static str) -> Result<()> {
        if !self.is_rank() {
            return Err(Error::capability(
                op,
                format!(
                    "{} valuation is not a matroid rank function",
                    self.class_name()
                ),
            ));
        }
        Ok(())
    }

    pub fn rank(&self, s: &Subset) -> Result<usize> {
        self.require_rank("rank")?;
        self.check_subset(s)?;
        Ok(self.value(s) as usize)
    }

    pub fn is_independent(&self, s: &Subset) -> Result<bool> {
        Ok(self.rank(s)? == s.len())
    }

    pub(crate) fn independent(&self, s: &Subset) -> bool {
        self.value(s) as usize == s.len()
    }

    /// `v(S + g) - v(S)`, for any valuation class.
    pub fn marginal(&self, s: &Subset, g: usize) -> Result<u64> {
        self.check_subset(s)?;
        self.check_good(g)?;
        if s.contains(g) {
            return Err(Error::Argument(format!("good {g} already in {s}")));
        }
        Ok(self.value(&s.with(g)) - self.value(s))
    }

    /// Goods outside the independent set `a` that keep it independent.
    pub fn free_goods(&self, a: &Subset) -> Result<Subset> {
        self.require_rank("free_goods")?;
        self.check_subset(a)?;
        if !self.independent(a) {
            return Err(Error::Contract(format!("{a} is not independent")));
        }
        Ok(self.free_goods_within(a, &Subset::full(self.ground_size())))
    }

    /// `{g in domain \ a : a + g independent}`; `a` must be independent.
    pub(crate) fn free_goods_within(&self, a: &Subset, domain: &Subset) -> Subset {
        domain
            .difference(a)
            .iter()
            .filter(|&g| self.independent(&a.with(g)))
            .collect()
    }

    /// Greedy maximum independent subset of `s`, scanning goods in ascending order.
    pub fn max_independent_subset(&self, s: &Subset) -> Result<Subset> {
        self.require_rank("max_independent_subset")?;
        self.check_subset(s)?;
        Ok(self.greedy_basis(s))
    }

    pub(crate) fn greedy_basis(&self, s: &Subset) -> Subset {
        let mut t = Subset::new();
        for g in s {
            let next = t.with(g);
            if self.independent(&next) {
                t = next;
            }
        }
        t
    }

    /// Exhaustive check of the matroid axioms on the family `{S : v(S) = |S|}`.
    pub fn validate_matroid_axioms(&self) -> Result<bool> {
        Ok(self.find_axiom_violation()?.is_none())
    }

    pub fn find_axiom_violation(&self) -> Result<Option<AxiomViolation>> {
        self.require_rank("validate_matroid_axioms")?;
        let m = self.ground_size();
        matroid::check_axiom_limit(m)?;
        Ok(matroid::find_axiom_violation(m, |s| self.independent(s)))
    }
}
