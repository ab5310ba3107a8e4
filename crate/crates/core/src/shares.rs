//! Maximin shares `μ_i(k, S)`: the best worst-part value agent `i` can secure
//! by splitting `S` into `k` parts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracles;
use crate::subset::Subset;
use crate::union::k_fold_union_rank;
use crate::valuation::Valuation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShareEntry {
    pub agent: usize,
    pub k: usize,
    pub goods: Subset,
    pub value: u64,
    /// `k` disjoint parts of `goods` whose worst part is worth `value`.
    pub witness: Vec<Subset>,
}

/// Cached shares keyed by `(agent, k, goods)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SharesTable {
    entries: Vec<ShareEntry>,
}

impl SharesTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: ShareEntry) {
        match self
            .entries
            .iter_mut()
            .find(|e| e.agent == entry.agent && e.k == entry.k && e.goods == entry.goods)
        {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn get(&self, agent: usize, k: usize, goods: &Subset) -> Option<&ShareEntry> {
        self.entries
            .iter()
            .find(|e| e.agent == agent && e.k == k && &e.goods == goods)
    }

    pub fn value(&self, agent: usize, k: usize, goods: &Subset) -> Option<u64> {
        self.get(agent, k, goods).map(|e| e.value)
    }

    pub fn entries(&self) -> &[ShareEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Maximin share of a matroid rank valuation in polynomial time.
///
/// Takes a maximum independent set of the k-fold union inside `s`, split into
/// `k` independent parts, then repeatedly moves a good from a largest part to
/// a smallest one while their sizes differ by two or more. The augmentation
/// property always supplies such a good. Once all sizes are within one of each
/// other, the smallest part size is the share. Donor and recipient are the
/// lowest-index largest and smallest parts; the moved good is the lowest
/// index that keeps the recipient independent.
pub fn mms_fast(v: &Valuation, k: usize, s: &Subset) -> Result<(u64, Vec<Subset>)> {
    if !v.is_rank() {
        return Err(Error::capability(
            "mms_fast",
            format!(
                "{} valuation is not a matroid rank function",
                v.class_name()
            ),
        ));
    }
    let (_, mut parts) = k_fold_union_rank(v, k, s)?;
    let total: usize = parts.iter().map(Subset::len).sum();
    let mut moves = 0usize;
    loop {
        let (donor, big) =
            parts
                .iter()
                .map(Subset::len)
                .enumerate()
                .fold(
                    (0, 0),
                    |best, (i, len)| if len > best.1 { (i, len) } else { best },
                );
        let (recipient, small) =
            parts
                .iter()
                .map(Subset::len)
                .enumerate()
                .fold(
                    (0, usize::MAX),
                    |best, (i, len)| if len < best.1 { (i, len) } else { best },
                );
        if big < small + 2 {
            break;
        }
        let g = parts[donor]
            .iter()
            .find(|&g| v.independent(&parts[recipient].with(g)))
            .ok_or_else(|| {
                Error::Invariant(format!(
                    "no good of {} extends {} (augmentation property)",
                    parts[donor], parts[recipient]
                ))
            })?;
        parts[donor].remove(g);
        parts[recipient].insert(g);
        moves += 1;
        // each move lowers the sum of squared part sizes, which is at most total^2
        if moves > total * total {
            return Err(Error::Invariant("balancing did not terminate".into()));
        }
    }
    let share = parts.iter().map(Subset::len).min().unwrap_or(0) as u64;
    Ok((share, parts))
}

/// Maximin share by exhaustive enumeration; works for any valuation class
/// within the brute-force caps.
pub fn mms_brute(v: &Valuation, k: usize, s: &Subset) -> Result<(u64, Vec<Subset>)> {
    oracles::exhaustive_mms(v, k, s)
}

fn table_with(
    inst: &Instance,
    k: usize,
    s: &Subset,
    f: impl Fn(&Valuation, usize, &Subset) -> Result<(u64, Vec<Subset>)>,
) -> Result<SharesTable> {
    let mut table = SharesTable::new();
    for (agent, v) in inst.agents().iter().enumerate() {
        let (value, witness) = f(v, k, s)?;
        table.insert(ShareEntry {
            agent,
            k,
            goods: s.clone(),
            value,
            witness,
        });
    }
    Ok(table)
}

/// `μ_i(k, S)` for every agent via [`mms_fast`].
pub fn shares_for_instance(inst: &Instance, k: usize, s: &Subset) -> Result<SharesTable> {
    inst.require_rank("shares_for_instance")?;
    table_with(inst, k, s, mms_fast)
}

/// `μ_i(k, S)` for every agent via [`mms_brute`].
pub fn brute_shares_for_instance(inst: &Instance, k: usize, s: &Subset) -> Result<SharesTable> {
    table_with(inst, k, s, mms_brute)
}
