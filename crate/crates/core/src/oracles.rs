//! Brute-force reference computations.
//!
//! Nothing here touches the exchange-graph code: every routine talks to the
//! valuations only through [`Valuation::value`], tabulating each agent once
//! over all subsets of the goods in play and then enumerating. Sizes are
//! capped and exceeding a cap is an error, never a silent approximation.

use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::union::PartialAllocation;
use crate::valuation::Valuation;

/// Environment variable overriding the goods caps of all brute-force routines.
pub const MAX_BRUTE_ENV: &str = "MATROID_FAIRDIV_MAX_BRUTE";

/// Hard ceiling for [`MAX_BRUTE_ENV`]; value tables have `2^cap` entries.
pub const MAX_BRUTE_CEILING: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteCaps {
    /// `|S|` for maximin share enumeration.
    pub mms_goods: usize,
    /// `k` for maximin share enumeration.
    pub mms_parts: usize,
    /// `|S|` for exhaustive welfare.
    pub welfare_goods: usize,
    /// `n` for exhaustive welfare.
    pub welfare_agents: usize,
    /// `|S|` for the convolution formula.
    pub convolution_goods: usize,
    /// `m` for certifying that no MMS allocation exists.
    pub certify_goods: usize,
    /// `n` for certifying that no MMS allocation exists.
    pub certify_agents: usize,
    /// `n^m` for allocation scans.
    pub scan_allocations: u64,
}

impl Default for BruteCaps {
    fn default() -> Self {
        Self {
            mms_goods: 12,
            mms_parts: 4,
            welfare_goods: 10,
            welfare_agents: 4,
            convolution_goods: 16,
            certify_goods: 10,
            certify_agents: 3,
            scan_allocations: 1_000_000,
        }
    }
}

impl BruteCaps {
    /// Defaults, with every goods cap replaced by the value of
    /// [`MAX_BRUTE_ENV`] when it is set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        if let Ok(raw) = std::env::var(MAX_BRUTE_ENV) {
            let goods: usize = raw.trim().parse().map_err(|_| {
                Error::Argument(format!(
                    "{MAX_BRUTE_ENV}={raw:?} is not a non-negative integer"
                ))
            })?;
            if goods > MAX_BRUTE_CEILING {
                return Err(Error::Argument(format!(
                    "{MAX_BRUTE_ENV}={goods} exceeds the ceiling of {MAX_BRUTE_CEILING}"
                )));
            }
            caps.mms_goods = goods;
            caps.welfare_goods = goods;
            caps.convolution_goods = goods;
            caps.certify_goods = goods;
        }
        Ok(caps)
    }

    /// [`Self::from_env`], falling back to the defaults on a malformed variable.
    pub fn current() -> Self {
        Self::from_env().unwrap_or_default()
    }
}

fn cap_error(op: &'static str, what: &str, got: usize, limit: usize) -> Error {
    Error::capability(
        op,
        format!("{what} = {got} exceeds the brute-force cap of {limit}"),
    )
}

/// `table[mask] = v(goods selected by mask)`, one query per subset.
fn value_table(v: &Valuation, goods: &[usize]) -> Vec<u64> {
    (0u64..1 << goods.len())
        .map(|mask| v.value(&lift(goods, mask)))
        .collect()
}

fn lift(goods: &[usize], mask: u64) -> Subset {
    goods
        .iter()
        .enumerate()
        .filter(|(b, _)| mask & (1 << b) != 0)
        .map(|(_, &g)| g)
        .collect()
}

fn check_agents(agents: &[&Valuation], s: &Subset) -> Result<usize> {
    let Some(first) = agents.first() else {
        return Err(Error::Argument("need at least one agent".into()));
    };
    let m = first.ground_size();
    if agents.iter().any(|v| v.ground_size() != m) {
        return Err(Error::Argument("agents disagree on the ground set".into()));
    }
    first.check_subset(s)?;
    Ok(m)
}

/// Best welfare over all complete allocations of `s` to `agents`, with the
/// first optimal allocation in lexicographic labeling order.
pub fn exhaustive_max_welfare(
    agents: &[&Valuation],
    s: &Subset,
) -> Result<(u64, PartialAllocation)> {
    let caps = BruteCaps::current();
    let m = check_agents(agents, s)?;
    let goods = s.to_vec();
    let n = agents.len();
    if goods.len() > caps.welfare_goods {
        return Err(cap_error(
            "exhaustive_max_welfare",
            "|S|",
            goods.len(),
            caps.welfare_goods,
        ));
    }
    if n > caps.welfare_agents {
        return Err(cap_error(
            "exhaustive_max_welfare",
            "n",
            n,
            caps.welfare_agents,
        ));
    }
    let tables: Vec<Vec<u64>> = agents.iter().map(|v| value_table(v, &goods)).collect();

    let mut best: Option<(u64, Vec<usize>)> = None;
    for_each_labeling(goods.len(), n, |labels| {
        let mut masks = vec![0u64; n];
        for (b, &l) in labels.iter().enumerate() {
            masks[l] |= 1 << b;
        }
        let welfare = masks
            .iter()
            .zip(&tables)
            .map(|(&mask, t)| t[mask as usize])
            .sum();
        if best.as_ref().is_none_or(|(w, _)| welfare > *w) {
            best = Some((welfare, labels.to_vec()));
        }
        true
    });
    let (welfare, labels) = best.expect("at least one labeling");
    Ok((welfare, labels_to_allocation(m, n, &goods, &labels)))
}

/// `min over T ⊆ S of |S \ T| + sum_i v_i(T)`, with the first minimizing `T`
/// in mask order.
pub fn convolution_rank(agents: &[&Valuation], s: &Subset) -> Result<(u64, Subset)> {
    let caps = BruteCaps::current();
    check_agents(agents, s)?;
    let goods = s.to_vec();
    if goods.len() > caps.convolution_goods {
        return Err(cap_error(
            "convolution_rank",
            "|S|",
            goods.len(),
            caps.convolution_goods,
        ));
    }
    let tables: Vec<Vec<u64>> = agents.iter().map(|v| value_table(v, &goods)).collect();
    let full = (1u64 << goods.len()) - 1;
    let (value, mask) = (0..=full)
        .map(|t| {
            let outside = u64::from((full & !t).count_ones());
            let inside: u64 = tables.iter().map(|tab| tab[t as usize]).sum();
            (outside + inside, t)
        })
        .min_by_key(|&(value, t)| (value, t))
        .expect("nonempty range");
    Ok((value, lift(&goods, mask)))
}

/// Maximin share by enumeration: the best over all ordered `k`-tuples of
/// disjoint sets covering `s` (empty parts allowed) of the worst part value.
///
/// Parts are interchangeable for a single valuation, so only restricted-growth
/// labelings are visited.
pub fn exhaustive_mms(v: &Valuation, k: usize, s: &Subset) -> Result<(u64, Vec<Subset>)> {
    let caps = BruteCaps::current();
    v.check_subset(s)?;
    if k == 0 {
        return Err(Error::Argument("maximin share needs k >= 1".into()));
    }
    let goods = s.to_vec();
    if goods.len() > caps.mms_goods {
        return Err(cap_error(
            "exhaustive_mms",
            "|S|",
            goods.len(),
            caps.mms_goods,
        ));
    }
    if k > caps.mms_parts {
        return Err(cap_error("exhaustive_mms", "k", k, caps.mms_parts));
    }
    let table = value_table(v, &goods);

    struct Search<'a> {
        table: &'a [u64],
        k: usize,
        t: usize,
        blocks: Vec<u64>,
        best: Option<(u64, Vec<u64>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, b: usize) {
            if b == self.t {
                // parts beyond the used blocks are empty
                let empty = (self.blocks.len() < self.k).then_some(self.table[0]);
                let worst = self
                    .blocks
                    .iter()
                    .map(|&mask| self.table[mask as usize])
                    .chain(empty)
                    .min()
                    .unwrap_or(self.table[0]);
                if self.best.as_ref().is_none_or(|(w, _)| worst > *w) {
                    self.best = Some((worst, self.blocks.clone()));
                }
                return;
            }
            for i in 0..self.blocks.len() {
                self.blocks[i] |= 1 << b;
                self.visit(b + 1);
                self.blocks[i] &= !(1 << b);
            }
            if self.blocks.len() < self.k {
                self.blocks.push(1 << b);
                self.visit(b + 1);
                self.blocks.pop();
            }
        }
    }

    let mut search = Search {
        table: &table,
        k,
        t: goods.len(),
        blocks: Vec::with_capacity(k),
        best: None,
    };
    search.visit(0);
    let (value, blocks) = search.best.expect("at least one labeling");
    let mut parts: Vec<Subset> = blocks.iter().map(|&mask| lift(&goods, mask)).collect();
    parts.resize(k, Subset::new());
    Ok((value, parts))
}

/// First allocation of all `m` goods to the agents, in lexicographic labeling
/// order (good 0 most significant, agent 0 first), that satisfies `predicate`.
pub fn exhaustive_allocation_scan(
    agents: &[&Valuation],
    mut predicate: impl FnMut(&PartialAllocation) -> bool,
) -> Result<Option<PartialAllocation>> {
    let caps = BruteCaps::current();
    let m = check_agents(agents, &Subset::new())?;
    let n = agents.len();
    let total = (n as u64)
        .checked_pow(m as u32)
        .filter(|&t| t <= caps.scan_allocations);
    if total.is_none() {
        return Err(Error::capability(
            "exhaustive_allocation_scan",
            format!(
                "{n}^{m} allocations exceed the cap of {}",
                caps.scan_allocations
            ),
        ));
    }
    let goods: Vec<usize> = (0..m).collect();
    let mut found = None;
    for_each_labeling(m, n, |labels| {
        let alloc = labels_to_allocation(m, n, &goods, labels);
        if predicate(&alloc) {
            found = Some(alloc);
            return false;
        }
        true
    });
    Ok(found)
}

/// Visits all `n^t` labelings in lexicographic order until `f` returns false.
fn for_each_labeling(t: usize, n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut labels = vec![0usize; t];
    loop {
        if !f(&labels) {
            return;
        }
        let mut pos = t;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            labels[pos] += 1;
            if labels[pos] < n {
                break;
            }
            labels[pos] = 0;
        }
    }
}

fn labels_to_allocation(
    m: usize,
    n: usize,
    goods: &[usize],
    labels: &[usize],
) -> PartialAllocation {
    let mut bundles = vec![Subset::new(); n];
    for (&g, &l) in goods.iter().zip(labels) {
        bundles[l].insert(g);
    }
    PartialAllocation::new(m, bundles).expect("labelings are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{Matroid, UniformMatroid};

    fn uniform(m: usize, k: usize) -> Valuation {
        Matroid::Uniform(UniformMatroid::new(m, k)).into()
    }

    #[test]
    fn labelings_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_labeling(2, 3, |l| {
            seen.push(l.to_vec());
            true
        });
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[8], vec![2, 2]);
        let mut count = 0;
        for_each_labeling(0, 3, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn convolution_examples() {
        let v = uniform(2, 1);
        let (r, t) = convolution_rank(&[&v], &Subset::full(2)).unwrap();
        assert_eq!((r, t), (1, Subset::full(2)));
        let u = uniform(4, 1);
        assert_eq!(convolution_rank(&[&u, &u], &Subset::full(4)).unwrap().0, 2);
    }

    #[test]
    fn welfare_single_agent() {
        let v = uniform(5, 3);
        let (w, a) = exhaustive_max_welfare(&[&v], &Subset::full(5)).unwrap();
        assert_eq!(w, 3);
        assert!(a.is_complete());
    }

    #[test]
    fn mms_single_part_is_value() {
        let v = uniform(6, 4);
        assert_eq!(exhaustive_mms(&v, 1, &Subset::full(6)).unwrap().0, 4);
        // more parts than goods: some part is empty
        assert_eq!(exhaustive_mms(&v, 4, &Subset::full(3)).unwrap().0, 0);
        let (mu, parts) = exhaustive_mms(&v, 3, &Subset::full(6)).unwrap();
        assert_eq!(mu, 2);
        assert_eq!(parts.len(), 3);
    }

    #[test]
    fn scan_first_is_all_to_first_agent() {
        let v = uniform(3, 3);
        let a = exhaustive_allocation_scan(&[&v, &v], |_| true)
            .unwrap()
            .unwrap();
        assert_eq!(a.bundle(0), &Subset::full(3));
    }

    #[test]
    fn caps_are_errors() {
        let v = uniform(13, 2);
        assert!(matches!(
            exhaustive_mms(&v, 2, &Subset::full(13)),
            Err(Error::Capability { .. })
        ));
        assert!(matches!(
            exhaustive_mms(&v, 5, &Subset::full(5)),
            Err(Error::Capability { .. })
        ));
        assert!(matches!(
            exhaustive_max_welfare(&[&v], &Subset::full(11)),
            Err(Error::Capability { .. })
        ));
        let w = uniform(20, 2);
        assert!(matches!(
            exhaustive_allocation_scan(&[&w, &w], |_| true),
            Err(Error::Capability { .. })
        ));
    }
}
