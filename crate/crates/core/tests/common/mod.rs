#![allow(dead_code)]

use matroid_fairdiv::{generate, Family, GeneratorConfig, Instance, PartialAllocation, Subset};
use proptest::prelude::*;

pub const RANK_FAMILIES: [Family; 7] = Family::ALL;

pub fn instance(seed: u64, family: usize, n: usize, m: usize) -> Instance {
    generate(&GeneratorConfig::new(
        seed,
        RANK_FAMILIES[family % RANK_FAMILIES.len()],
        n,
        m,
    ))
    .unwrap()
}

/// `(seed, family index, n, m)` with `n <= max_n`, `m <= max_m`.
pub fn instance_params(
    max_n: usize,
    max_m: usize,
) -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 0..RANK_FAMILIES.len(), 1..=max_n, 1..=max_m)
}

/// Complete allocation giving good `g` to agent `labels[g] % n`.
pub fn labeled(m: usize, n: usize, labels: &[usize]) -> PartialAllocation {
    let mut bundles = vec![Subset::new(); n];
    for g in 0..m {
        bundles[labels[g] % n].insert(g);
    }
    PartialAllocation::new(m, bundles).unwrap()
}

pub fn mask(m: usize, bits: u64) -> Subset {
    Subset::from_mask(bits & ((1u64 << m) - 1))
}
