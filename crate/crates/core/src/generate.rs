//! Seeded random instances.
//!
//! All randomness comes from one SplitMix64 stream seeded with the config's
//! seed (state `x = seed`; each draw sets `x += 0x9e3779b97f4a7c15` and
//! returns `z ^ (z >> 31)` after `z = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9`,
//! `z = (z ^ (z >> 27)) * 0x94d049bb133111eb`, all wrapping). A draw below
//! `n` is `(x * n) >> 64` on the 128-bit product. Agents are generated in
//! order, goods in order within an agent, so the same config always gives
//! the same instance.
//!
//! Per family, with `d` the density percent (default 50):
//! * `uniform`: `k = 1 + below(m)`.
//! * `partition`: `b` blocks (default `1 + below(m)`); each good joins block
//!   `below(b)`; empty blocks are dropped; a block of size `s` gets cap
//!   `below(s + 1)`.
//! * `graphic`: `V` is the least `V >= 2` with `V (V - 1) d >= 200 m`; each
//!   edge has endpoints `below(V)`, `below(V)` (loops allowed).
//! * `transversal`: `t` slots (default `1 + below(m)`); good `g` is adjacent
//!   to slot `s` iff `below(100) < d`, slots in order.
//! * `linear-gf2`: dimension `r` (default `1 + below(min(m, 8))`); each
//!   column is the low `r` bits of one draw.
//! * `explicit`: a `graphic` draw, stored as its list of bases (`m <= 16`).
//! * `mixed`: each agent first draws `below(6)` to pick one of the six
//!   families above, in that order.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroid::{
    ExplicitMatroid, GraphicMatroid, LinearMatroidGf2, Matroid, PartitionMatroid,
    TransversalMatroid, UniformMatroid,
};
use crate::valuation::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    Partition,
    Graphic,
    Transversal,
    LinearGf2,
    Explicit,
    Mixed,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Uniform,
        Family::Partition,
        Family::Graphic,
        Family::Transversal,
        Family::LinearGf2,
        Family::Explicit,
        Family::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Partition => "partition",
            Family::Graphic => "graphic",
            Family::Transversal => "transversal",
            Family::LinearGf2 => "linear-gf2",
            Family::Explicit => "explicit",
            Family::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub family: Family,
    pub n: usize,
    pub m: usize,
    /// Partition block count.
    pub blocks: Option<usize>,
    /// Graph density (graphic, explicit) or edge probability (transversal), in percent.
    pub density_percent: Option<u32>,
    /// Transversal slot count.
    pub slots: Option<usize>,
    /// GF(2) dimension.
    pub dimension: Option<usize>,
}

impl GeneratorConfig {
    pub fn new(seed: u64, family: Family, n: usize, m: usize) -> Self {
        Self {
            seed,
            family,
            n,
            m,
            blocks: None,
            density_percent: None,
            slots: None,
            dimension: None,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Argument(msg));
        if self.n == 0 || self.m == 0 {
            return bad(format!(
                "need n, m >= 1, got n = {}, m = {}",
                self.n, self.m
            ));
        }
        let uses =
            |families: &[Family]| self.family == Family::Mixed || families.contains(&self.family);
        if self.blocks.is_some() && !uses(&[Family::Partition]) {
            return bad(format!(
                "--blocks does not apply to the {} family",
                self.family
            ));
        }
        if self.density_percent.is_some()
            && !uses(&[Family::Graphic, Family::Explicit, Family::Transversal])
        {
            return bad(format!(
                "--density does not apply to the {} family",
                self.family
            ));
        }
        if self.slots.is_some() && !uses(&[Family::Transversal]) {
            return bad(format!(
                "--slots does not apply to the {} family",
                self.family
            ));
        }
        if self.dimension.is_some() && !uses(&[Family::LinearGf2]) {
            return bad(format!(
                "--dimension does not apply to the {} family",
                self.family
            ));
        }
        if let Some(b) = self.blocks {
            if b == 0 || b > self.m {
                return bad(format!("block count {b} is outside 1..={}", self.m));
            }
        }
        if let Some(d) = self.density_percent {
            if d == 0 || d > 100 {
                return bad(format!("density {d} is outside 1..=100"));
            }
        }
        if self.slots == Some(0) {
            return bad("slot count must be positive".into());
        }
        if let Some(r) = self.dimension {
            if r == 0 || r > 64 {
                return bad(format!("dimension {r} is outside 1..=64"));
            }
        }
        if uses(&[Family::Explicit]) && self.m > 16 {
            return bad(format!(
                "explicit matroids are limited to m <= 16, got {}",
                self.m
            ));
        }
        Ok(())
    }
}

/// SplitMix64 with the bounded draw described in the module docs.
pub struct Draws(SplitMix64);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish value in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    config.check()?;
    let mut rng = Draws::new(config.seed);
    let agents = (0..config.n)
        .map(|_| {
            let family = match config.family {
                Family::Mixed => Family::ALL[rng.below(6)],
                f => f,
            };
            draw_matroid(&mut rng, family, config).map(Valuation::from)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(config.m, agents)
}

fn draw_matroid(rng: &mut Draws, family: Family, config: &GeneratorConfig) -> Result<Matroid> {
    let m = config.m;
    let density = config.density_percent.unwrap_or(50) as usize;
    Ok(match family {
        Family::Uniform => Matroid::Uniform(UniformMatroid::new(m, 1 + rng.below(m))),
        Family::Partition => {
            let b = config.blocks.unwrap_or_else(|| 1 + rng.below(m));
            let mut blocks = vec![Vec::new(); b];
            for g in 0..m {
                blocks[rng.below(b)].push(g);
            }
            blocks.retain(|block| !block.is_empty());
            let caps = blocks
                .iter()
                .map(|block| rng.below(block.len() + 1))
                .collect();
            Matroid::Partition(PartitionMatroid::new(m, blocks, caps)?)
        }
        Family::Graphic => Matroid::Graphic(draw_graph(rng, m, density)?),
        Family::Transversal => {
            let slots = config.slots.unwrap_or_else(|| 1 + rng.below(m));
            let adjacency = (0..m)
                .map(|_| (0..slots).filter(|_| rng.below(100) < density).collect())
                .collect();
            Matroid::Transversal(TransversalMatroid::new(slots, adjacency)?)
        }
        Family::LinearGf2 => {
            let r = config.dimension.unwrap_or_else(|| 1 + rng.below(m.min(8)));
            let mask = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
            let columns = (0..m).map(|_| rng.next_u64() & mask).collect();
            Matroid::LinearGf2(LinearMatroidGf2::new(r, columns)?)
        }
        Family::Explicit => {
            let graph = Matroid::Graphic(draw_graph(rng, m, density)?);
            Matroid::Explicit(ExplicitMatroid::materialize(&graph)?)
        }
        Family::Mixed => unreachable!("resolved by the caller"),
    })
}

fn draw_graph(rng: &mut Draws, m: usize, density: usize) -> Result<GraphicMatroid> {
    let mut vertices = 2;
    while vertices * (vertices - 1) * density < 200 * m {
        vertices += 1;
    }
    let edges = (0..m)
        .map(|_| (rng.below(vertices), rng.below(vertices)))
        .collect();
    GraphicMatroid::new(vertices, edges)
}
