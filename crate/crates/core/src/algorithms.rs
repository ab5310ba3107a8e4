//! The two allocation algorithms. Both start from the same deterministic
//! welfare-maximizing allocation with independent bundles and only ever move
//! goods in welfare-preserving ways.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::shares::{mms_fast, shares_for_instance, ShareEntry, SharesTable};
use crate::subset::Subset;
use crate::union::{augment_transfer, find_path, max_welfare_allocation, PartialAllocation};
use crate::valuation::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fairness {
    Mms,
    Pmms,
}

/// One loop iteration: `receiver` gained a good and `donor` lost one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub receiver: usize,
    pub donor: usize,
    /// Exchange path (MMS) or the single transferred good (PMMS).
    pub path: Vec<usize>,
    pub welfare: u64,
    /// Total shortfall below the shares (MMS) or sum of squared values (PMMS),
    /// after the step.
    pub potential: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub fairness: Fairness,
    #[serde(serialize_with = "bundles")]
    pub allocation: PartialAllocation,
    pub unassigned: Subset,
    pub values: Vec<u64>,
    pub welfare: u64,
    /// Shares the algorithm compared against: `μ_i(n, [m])` for MMS, the final
    /// pairwise `μ_i(2, A_i ∪ A_j)` for PMMS.
    pub shares: SharesTable,
    /// Loop iterations: path augmentations (MMS) or good transfers (PMMS).
    pub iterations: usize,
    /// Proven ceiling on `iterations`: `n m` (MMS) or `m^2` (PMMS).
    pub iteration_bound: usize,
    pub initial_potential: u64,
    pub trace: Vec<Step>,
}

fn bundles<S: Serializer>(alloc: &PartialAllocation, s: S) -> std::result::Result<S::Ok, S::Error> {
    alloc.bundles().serialize(s)
}

/// `SW(A) = sum_i v_i(A_i)`
pub fn welfare(inst: &Instance, alloc: &PartialAllocation) -> Result<u64> {
    if alloc.agent_count() != inst.agent_count() || alloc.ground_size() != inst.goods() {
        return Err(Error::Argument(format!(
            "allocation of {} goods to {} agents does not fit an instance with m = {}, n = {}",
            alloc.ground_size(),
            alloc.agent_count(),
            inst.goods(),
            inst.agent_count()
        )));
    }
    Ok(values(inst, alloc).iter().sum())
}

pub(crate) fn values(inst: &Instance, alloc: &PartialAllocation) -> Vec<u64> {
    inst.agents()
        .iter()
        .zip(alloc.bundles())
        .map(|(v, b)| v.value(b))
        .collect()
}

fn shortfall(values: &[u64], shares: &[u64]) -> u64 {
    values
        .iter()
        .zip(shares)
        .map(|(&v, &mu)| mu.saturating_sub(v))
        .sum()
}

/// Welfare-maximizing complete allocation in which every agent gets at least
/// their maximin share `μ_i(n, [m])`.
///
/// While some agent is below their share, the lowest-index such agent `i` gets
/// one more good via a shortest exchange path from `F_i(A_i)` to the bundles
/// of agents strictly above their shares; the agent whose bundle the path
/// ends in loses one. Finally, unassigned goods go to agent 0.
pub fn alg_mms(inst: &Instance) -> Result<SolveReport> {
    inst.require_rank("alg_mms")?;
    let agents = inst.views();
    let (n, m) = (inst.agent_count(), inst.goods());
    let everything = Subset::full(m);

    let mut alloc = max_welfare_allocation(&agents)?;
    let shares = shares_for_instance(inst, n, &everything)?;
    let mu: Vec<u64> = (0..n)
        .map(|i| {
            shares
                .value(i, n, &everything)
                .expect("one entry per agent")
        })
        .collect();
    let mut vals: Vec<u64> = alloc.bundles().iter().map(|b| b.len() as u64).collect();
    let welfare_opt: u64 = vals.iter().sum();
    let initial_potential = shortfall(&vals, &mu);
    let bound = n * m;
    let mut trace = Vec::new();

    while let Some(i) = (0..n).find(|&k| vals[k] < mu[k]) {
        let targets = (0..n)
            .filter(|&k| vals[k] > mu[k])
            .fold(Subset::new(), |acc, k| acc.union(alloc.bundle(k)));
        let sources = agents[i].free_goods_within(alloc.bundle(i), &everything);
        let path =
            find_path(&agents, &alloc, &sources, &targets, &everything).ok_or_else(|| {
                Error::Invariant(format!(
                "agent {i} is below their share but no exchange path reaches an agent above theirs"
            ))
            })?;
        let j = alloc
            .owner(path[path.len() - 1])
            .expect("targets are assigned");
        let before = shortfall(&vals, &mu);
        alloc = augment_transfer(&agents, &alloc, &path, i, j)?;
        vals[i] += 1;
        vals[j] -= 1;
        let potential = shortfall(&vals, &mu);
        if potential + 1 != before {
            return Err(Error::Invariant(format!(
                "shortfall went from {before} to {potential} instead of dropping by one"
            )));
        }
        trace.push(Step {
            receiver: i,
            donor: j,
            path,
            welfare: vals.iter().sum(),
            potential,
        });
        if trace.len() > bound {
            return Err(Error::Invariant(format!(
                "more than n m = {bound} augmentations"
            )));
        }
    }

    alloc.complete_into(0);
    let vals = values(inst, &alloc);
    let total: u64 = vals.iter().sum();
    if total != welfare_opt {
        return Err(Error::Invariant(format!(
            "welfare changed from {welfare_opt} to {total} while completing the allocation"
        )));
    }
    Ok(SolveReport {
        fairness: Fairness::Mms,
        unassigned: alloc.unassigned(),
        allocation: alloc,
        values: vals,
        welfare: total,
        shares,
        iterations: trace.len(),
        iteration_bound: bound,
        initial_potential,
        trace,
    })
}

/// Welfare-maximizing partial allocation satisfying the pairwise maximin
/// share guarantee.
///
/// Scans ordered pairs `(i, j)` lexicographically for `|A_i| < μ_i(2, A_i ∪ A_j)`
/// and moves the lowest-index good of `A_j ∩ F_i(A_i)` to agent `i`, then
/// rescans from the start. Goods left unassigned by the initial allocation
/// stay unassigned.
pub fn alg_pmms(inst: &Instance) -> Result<SolveReport> {
    inst.require_rank("alg_pmms")?;
    let agents = inst.views();
    let (n, m) = (inst.agent_count(), inst.goods());

    let mut alloc = max_welfare_allocation(&agents)?;
    let mut vals: Vec<u64> = alloc.bundles().iter().map(|b| b.len() as u64).collect();
    let welfare_opt: u64 = vals.iter().sum();
    let squares = |vals: &[u64]| vals.iter().map(|v| v * v).sum::<u64>();
    let initial_potential = squares(&vals);
    let bound = m * m;
    let mut memo = PairShares::default();
    let mut trace = Vec::new();

    loop {
        let mut violation = None;
        'scan: for (i, &value) in vals.iter().enumerate() {
            for j in (0..n).filter(|&j| j != i) {
                let union = alloc.bundle(i).union(alloc.bundle(j));
                if value < memo.get(&agents, i, union)?.0 {
                    violation = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((i, j)) = violation else { break };
        let (size_i, size_j) = (alloc.bundle(i).len(), alloc.bundle(j).len());
        if size_i + 2 > size_j {
            return Err(Error::Invariant(format!(
                "agent {i} violates their pairwise share against {j} with |A_i| = {size_i}, |A_j| = {size_j}"
            )));
        }
        let g = alloc
            .bundle(j)
            .iter()
            .find(|&g| agents[i].independent(&alloc.bundle(i).with(g)))
            .ok_or_else(|| Error::Invariant(format!("no good of A_{j} keeps A_{i} independent")))?;
        let before = squares(&vals);
        alloc.transfer(g, i);
        vals[i] += 1;
        vals[j] -= 1;
        let potential = squares(&vals);
        if potential >= before {
            return Err(Error::Invariant(format!(
                "sum of squared values did not drop ({before} -> {potential})"
            )));
        }
        trace.push(Step {
            receiver: i,
            donor: j,
            path: vec![g],
            welfare: vals.iter().sum(),
            potential,
        });
        if trace.len() > bound {
            return Err(Error::Invariant(format!(
                "more than m^2 = {bound} transfers"
            )));
        }
    }

    let vals = values(inst, &alloc);
    let total: u64 = vals.iter().sum();
    if total != welfare_opt {
        return Err(Error::Invariant(format!(
            "welfare changed from {welfare_opt} to {total} during transfers"
        )));
    }
    let mut shares = SharesTable::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let union = alloc.bundle(i).union(alloc.bundle(j));
            let (value, witness) = memo.get(&agents, i, union.clone())?.clone();
            shares.insert(ShareEntry {
                agent: i,
                k: 2,
                goods: union,
                value,
                witness,
            });
        }
    }
    Ok(SolveReport {
        fairness: Fairness::Pmms,
        unassigned: alloc.unassigned(),
        allocation: alloc,
        values: vals,
        welfare: total,
        shares,
        iterations: trace.len(),
        iteration_bound: bound,
        initial_potential,
        trace,
    })
}

/// `μ_i(2, S)` memoized per `(i, S)`.
#[derive(Default)]
struct PairShares(HashMap<(usize, Subset), (u64, Vec<Subset>)>);

impl PairShares {
    fn get(
        &mut self,
        agents: &[&Valuation],
        i: usize,
        union: Subset,
    ) -> Result<&(u64, Vec<Subset>)> {
        let key = (i, union);
        if !self.0.contains_key(&key) {
            let share = mms_fast(agents[i], 2, &key.1)?;
            self.0.insert(key.clone(), share);
        }
        Ok(&self.0[&key])
    }
}

pub fn solve(inst: &Instance, fairness: Fairness) -> Result<SolveReport> {
    match fairness {
        Fairness::Mms => alg_mms(inst),
        Fairness::Pmms => alg_pmms(inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{Matroid, PartitionMatroid, UniformMatroid};
    use crate::valuation::Valuation;

    fn uniform(m: usize, k: usize) -> Valuation {
        Matroid::Uniform(UniformMatroid::new(m, k)).into()
    }

    fn two_pair_instance() -> Instance {
        let m1 = Matroid::Partition(
            PartitionMatroid::new(
                6,
                vec![vec![0, 1], vec![2, 3], vec![4], vec![5]],
                vec![1, 1, 1, 1],
            )
            .unwrap(),
        );
        Instance::new(6, vec![m1.into(), uniform(6, 6)]).unwrap()
    }

    #[test]
    fn single_agent_gets_everything() {
        let inst = Instance::new(5, vec![uniform(5, 3)]).unwrap();
        let r = alg_mms(&inst).unwrap();
        assert_eq!(r.allocation.bundle(0), &Subset::full(5));
        assert_eq!(r.values, vec![3]);
        let r = alg_pmms(&inst).unwrap();
        assert_eq!(r.allocation.bundle(0), &Subset::from([0, 1, 2]));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn two_pair_instance_both_algorithms() {
        let inst = two_pair_instance();
        for r in [alg_mms(&inst).unwrap(), alg_pmms(&inst).unwrap()] {
            assert_eq!(r.welfare, 6);
            assert!(r.values.iter().all(|&v| v >= 3), "{:?}", r.values);
            assert!(r.iterations <= r.iteration_bound);
        }
    }

    #[test]
    fn welfare_examples() {
        let inst = two_pair_instance();
        assert_eq!(welfare(&inst, &PartialAllocation::empty(6, 2)).unwrap(), 0);
        let a = PartialAllocation::new(6, vec![Subset::from([4, 5]), Subset::from([0, 1, 2, 3])])
            .unwrap();
        assert_eq!(welfare(&inst, &a).unwrap(), 6);
        assert!(welfare(&inst, &PartialAllocation::empty(6, 3)).is_err());
    }

    #[test]
    fn report_serializes() {
        let r = alg_mms(&two_pair_instance()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "fairness",
            "allocation",
            "unassigned",
            "values",
            "welfare",
            "shares",
            "iterations",
            "trace",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
