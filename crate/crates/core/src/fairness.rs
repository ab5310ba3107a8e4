//! Fairness predicates for arbitrary monotone valuations, and the named
//! counterexample instances.

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroid::{ExplicitMatroid, Matroid, PartitionMatroid, UniformMatroid};
use crate::oracles::{exhaustive_allocation_scan, BruteCaps};
use crate::shares::{brute_shares_for_instance, mms_brute, mms_fast, SharesTable};
use crate::subset::Subset;
use crate::union::PartialAllocation;
use crate::valuation::{BinaryXos, Valuation, ValuationKind, WeightedRank};

/// Approximation factor, an exact rational in `(0, 1]`.
pub type Alpha = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    EnvyFree,
    Ef1,
    Mms,
    Pmms,
    NoMmsAllocation,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::EnvyFree => "ef",
            Property::Ef1 => "ef1",
            Property::Mms => "mms",
            Property::Pmms => "pmms",
            Property::NoMmsAllocation => "no-mms-allocation",
        }
    }
}

/// Evidence attached to a failed verdict. Every variant can be replayed
/// against the raw valuations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// `v_agent(A_agent) < v_agent(A_other)`.
    Envy {
        agent: usize,
        other: usize,
        own_value: u64,
        other_value: u64,
    },
    /// Removing any single good from `A_other` still leaves
    /// `v_agent(A_other - g) > v_agent(A_agent)`; `best_removal` is the
    /// smallest such value.
    Ef1 {
        agent: usize,
        other: usize,
        own_value: u64,
        best_removal: u64,
    },
    /// `v_agent(A_agent) < alpha * share`, where `share` is `μ_agent(k, goods)`.
    Share {
        agent: usize,
        other: Option<usize>,
        own_value: u64,
        k: usize,
        goods: Subset,
        share: u64,
        #[serde(serialize_with = "ratio_string")]
        alpha: Alpha,
    },
    /// A complete allocation meeting every agent's maximin share.
    Allocation {
        #[serde(serialize_with = "bundles")]
        allocation: PartialAllocation,
    },
}

fn ratio_string<S: Serializer>(r: &Alpha, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn bundles<S: Serializer>(a: &PartialAllocation, s: S) -> std::result::Result<S::Ok, S::Error> {
    a.bundles().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FairnessVerdict {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl FairnessVerdict {
    fn from_witness(property: Property, witness: Option<Witness>) -> Self {
        Self {
            property,
            holds: witness.is_none(),
            witness,
        }
    }
}

/// How pairwise shares are computed by [`is_pmms_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShareMethod {
    /// Polynomial for rank valuations, enumeration for everything else.
    Auto,
    /// Always enumerate.
    Brute,
}

fn check_fit(inst: &Instance, alloc: &PartialAllocation) -> Result<()> {
    if alloc.agent_count() != inst.agent_count() || alloc.ground_size() != inst.goods() {
        return Err(Error::Argument(format!(
            "allocation of {} goods to {} agents does not fit an instance with m = {}, n = {}",
            alloc.ground_size(),
            alloc.agent_count(),
            inst.goods(),
            inst.agent_count()
        )));
    }
    Ok(())
}

/// `alpha * share <= value`, exactly.
pub fn meets(value: u64, alpha: Alpha, share: u64) -> bool {
    value as u128 * *alpha.denom() as u128 >= share as u128 * *alpha.numer() as u128
}

fn check_alpha(alpha: Alpha) -> Result<()> {
    if *alpha.numer() == 0 || alpha > Alpha::from_integer(1) {
        return Err(Error::Argument(format!(
            "alpha = {}/{} is outside (0, 1]",
            alpha.numer(),
            alpha.denom()
        )));
    }
    Ok(())
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

pub fn is_envy_free(inst: &Instance, alloc: &PartialAllocation) -> Result<FairnessVerdict> {
    check_fit(inst, alloc)?;
    let witness = ordered_pairs(inst.agent_count()).find_map(|(i, j)| {
        let v = inst.agent(i);
        let own_value = v.value(alloc.bundle(i));
        let other_value = v.value(alloc.bundle(j));
        (own_value < other_value).then_some(Witness::Envy {
            agent: i,
            other: j,
            own_value,
            other_value,
        })
    });
    Ok(FairnessVerdict::from_witness(Property::EnvyFree, witness))
}

pub fn is_ef1(inst: &Instance, alloc: &PartialAllocation) -> Result<FairnessVerdict> {
    check_fit(inst, alloc)?;
    let witness = ordered_pairs(inst.agent_count()).find_map(|(i, j)| {
        let v = inst.agent(i);
        let other = alloc.bundle(j);
        if other.is_empty() {
            return None;
        }
        let own_value = v.value(alloc.bundle(i));
        let best_removal = other.iter().map(|g| v.value(&other.without(g))).min()?;
        (own_value < best_removal).then_some(Witness::Ef1 {
            agent: i,
            other: j,
            own_value,
            best_removal,
        })
    });
    Ok(FairnessVerdict::from_witness(Property::Ef1, witness))
}

/// `v_i(A_i) >= alpha * μ_i(n, [m])`, with the shares looked up in `shares`.
pub fn is_mms(
    inst: &Instance,
    alloc: &PartialAllocation,
    alpha: Alpha,
    shares: &SharesTable,
) -> Result<FairnessVerdict> {
    check_fit(inst, alloc)?;
    check_alpha(alpha)?;
    let n = inst.agent_count();
    let everything = Subset::full(inst.goods());
    for i in 0..n {
        let share = shares
            .value(i, n, &everything)
            .ok_or_else(|| Error::Argument(format!("no share entry for agent {i} with k = {n}")))?;
        let own_value = inst.agent(i).value(alloc.bundle(i));
        if !meets(own_value, alpha, share) {
            let witness = Witness::Share {
                agent: i,
                other: None,
                own_value,
                k: n,
                goods: everything,
                share,
                alpha,
            };
            return Ok(FairnessVerdict::from_witness(Property::Mms, Some(witness)));
        }
    }
    Ok(FairnessVerdict::from_witness(Property::Mms, None))
}

/// `v_i(A_i) >= alpha * μ_i(2, A_i ∪ A_j)` for all ordered pairs.
/// Unassigned goods play no role.
pub fn is_pmms(
    inst: &Instance,
    alloc: &PartialAllocation,
    alpha: Alpha,
) -> Result<FairnessVerdict> {
    is_pmms_with(inst, alloc, alpha, ShareMethod::Auto)
}

pub fn is_pmms_with(
    inst: &Instance,
    alloc: &PartialAllocation,
    alpha: Alpha,
    method: ShareMethod,
) -> Result<FairnessVerdict> {
    check_fit(inst, alloc)?;
    check_alpha(alpha)?;
    for (i, j) in ordered_pairs(inst.agent_count()) {
        let v = inst.agent(i);
        let union = alloc.bundle(i).union(alloc.bundle(j));
        let (share, _) = match method {
            ShareMethod::Auto if v.is_rank() => mms_fast(v, 2, &union)?,
            _ => mms_brute(v, 2, &union)?,
        };
        let own_value = v.value(alloc.bundle(i));
        if !meets(own_value, alpha, share) {
            let witness = Witness::Share {
                agent: i,
                other: Some(j),
                own_value,
                k: 2,
                goods: union,
                share,
                alpha,
            };
            return Ok(FairnessVerdict::from_witness(Property::Pmms, Some(witness)));
        }
    }
    Ok(FairnessVerdict::from_witness(Property::Pmms, None))
}

/// Decides by enumeration whether some complete allocation gives every agent
/// their maximin share. `holds` means no such allocation exists; otherwise
/// the first one found is the witness.
pub fn certify_no_mms_allocation(inst: &Instance) -> Result<FairnessVerdict> {
    let caps = BruteCaps::current();
    let (n, m) = (inst.agent_count(), inst.goods());
    if n > caps.certify_agents || m > caps.certify_goods {
        return Err(Error::capability(
            "certify_no_mms_allocation",
            format!(
                "n = {n}, m = {m} exceeds the caps n <= {}, m <= {}",
                caps.certify_agents, caps.certify_goods
            ),
        ));
    }
    let everything = Subset::full(m);
    let shares = brute_shares_for_instance(inst, n, &everything)?;
    let mu: Vec<u64> = (0..n)
        .map(|i| {
            shares
                .value(i, n, &everything)
                .expect("one entry per agent")
        })
        .collect();
    let found = exhaustive_allocation_scan(&inst.views(), |alloc| {
        (0..n).all(|i| inst.agent(i).value(alloc.bundle(i)) >= mu[i])
    })?;
    Ok(FairnessVerdict::from_witness(
        Property::NoMmsAllocation,
        found.map(|allocation| Witness::Allocation { allocation }),
    ))
}

/// A named instance with an optional reference allocation.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub instance: Instance,
    pub reference: Option<PartialAllocation>,
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 3] = ["xos-4", "wrank-4", "ef1-not-pmms"];

pub fn fixtures() -> Vec<Fixture> {
    FIXTURE_NAMES
        .iter()
        .map(|name| fixture(name).expect("listed fixture"))
        .collect()
}

/// Goods are 0-based: good `g` here is good `g + 1` in the usual 1-based
/// write-up of these instances.
pub fn fixture(name: &str) -> Option<Fixture> {
    let sets = |family: &[&[usize]]| -> Vec<Subset> {
        family.iter().map(|s| s.iter().copied().collect()).collect()
    };
    let fixture = match name {
        // Two binary XOS agents whose maximizing families cross: every
        // allocation leaves someone below 2.
        "xos-4" => {
            let xos = |family: &[&[usize]]| -> Valuation {
                Valuation::new(ValuationKind::BinaryXos(
                    BinaryXos::new(4, sets(family)).expect("valid family"),
                ))
            };
            Fixture {
                name: "xos-4",
                instance: Instance::new(
                    4,
                    vec![xos(&[&[0, 1], &[2, 3]]), xos(&[&[0, 2], &[1, 3]])],
                )
                .expect("valid instance"),
                reference: None,
            }
        }
        // Weights (2, 2, 1, 1) over matroids whose independent sets are all
        // sets of size at most 2 except two crossing pairs.
        "wrank-4" => {
            let wrank = |excluded: &[&[usize]]| -> Valuation {
                let excluded = sets(excluded);
                let pairs: Vec<Subset> = (0..4)
                    .flat_map(|a| (a + 1..4).map(move |b| Subset::from([a, b])))
                    .filter(|p| !excluded.contains(p))
                    .collect();
                let matroid =
                    Matroid::Explicit(ExplicitMatroid::new(4, pairs).expect("valid family"));
                Valuation::new(ValuationKind::WeightedRank(
                    WeightedRank::new(matroid, vec![2, 2, 1, 1]).expect("valid weights"),
                ))
            };
            Fixture {
                name: "wrank-4",
                instance: Instance::new(
                    4,
                    vec![wrank(&[&[0, 2], &[1, 3]]), wrank(&[&[0, 3], &[1, 2]])],
                )
                .expect("valid instance"),
                reference: None,
            }
        }
        // Agent 0 takes one good from each of {0,1} and {2,3} plus 4 and 5;
        // agent 1 likes everything.
        "ef1-not-pmms" => {
            let m1 = PartitionMatroid::new(
                6,
                vec![vec![0, 1], vec![2, 3], vec![4], vec![5]],
                vec![1, 1, 1, 1],
            )
            .expect("valid partition");
            let m2 = UniformMatroid::new(6, 6);
            Fixture {
                name: "ef1-not-pmms",
                instance: Instance::new(
                    6,
                    vec![Matroid::Partition(m1).into(), Matroid::Uniform(m2).into()],
                )
                .expect("valid instance"),
                reference: Some(
                    PartialAllocation::new(
                        6,
                        vec![Subset::from([4, 5]), Subset::from([0, 1, 2, 3])],
                    )
                    .expect("disjoint bundles"),
                ),
            }
        }
        _ => return None,
    };
    Some(fixture)
}
