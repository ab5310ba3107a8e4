//! JSON instance and allocation files.
//!
//! An instance file is
//!
//! ```json
//! {
//!   "version": 1,
//!   "m": 6,
//!   "agents": [
//!     { "kind": "partition", "blocks": [[0, 1], [2, 3], [4], [5]], "caps": [1, 1, 1, 1] },
//!     { "kind": "uniform", "k": 6 }
//!   ]
//! }
//! ```
//!
//! with one record per agent, tagged by `kind`:
//!
//! | kind            | fields                                              |
//! |-----------------|-----------------------------------------------------|
//! | `uniform`       | `k`                                                 |
//! | `partition`     | `blocks` (cover `0..m` exactly), `caps`             |
//! | `graphic`       | `vertices`, `edges` (one `[u, v]` per good)         |
//! | `transversal`   | `slots`, `adjacency` (slot list per good)           |
//! | `linear-gf2`    | `dimension` (at most 64), `columns` (one per good)  |
//! | `explicit`      | `independent` (nonempty list of independent sets)   |
//! | `binary-xos`    | `family` (list of sets)                             |
//! | `weighted-rank` | `matroid` (any of the first six records), `weights` |
//!
//! An allocation file is `{ "bundles": [[4, 5], [0, 1, 2, 3]] }`, one bundle
//! per agent; goods left out are unassigned.
//!
//! [`instance_to_string`] writes the canonical form: two-space indentation,
//! arrays of numbers on one line, fields in the order above, explicit
//! families reduced to their maximal sets, and a trailing newline.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroid::{
    ExplicitMatroid, GraphicMatroid, LinearMatroidGf2, Matroid, PartitionMatroid,
    TransversalMatroid, UniformMatroid, AXIOM_CHECK_LIMIT,
};
use crate::subset::Subset;
use crate::union::PartialAllocation;
use crate::valuation::{BinaryXos, Valuation, ValuationKind, WeightedRank};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub m: usize,
    pub agents: Vec<AgentSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AgentSpec {
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Transversal {
        slots: usize,
        adjacency: Vec<Vec<usize>>,
    },
    LinearGf2 {
        dimension: usize,
        columns: Vec<u64>,
    },
    Explicit {
        independent: Vec<Vec<usize>>,
    },
    BinaryXos {
        family: Vec<Vec<usize>>,
    },
    WeightedRank {
        matroid: Box<AgentSpec>,
        weights: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<usize>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn sets(lists: &[Vec<usize>]) -> Vec<Subset> {
    lists.iter().map(|l| l.iter().copied().collect()).collect()
}

fn lists(sets: &[Subset]) -> Vec<Vec<usize>> {
    sets.iter().map(Subset::to_vec).collect()
}

fn check_len(what: &str, got: usize, m: usize) -> Result<()> {
    if got != m {
        return Err(Error::Validation(format!(
            "{what} lists {got} goods, expected m = {m}"
        )));
    }
    Ok(())
}

impl AgentSpec {
    fn to_matroid(&self, m: usize) -> Result<Matroid> {
        Ok(match self {
            AgentSpec::Uniform { k } => Matroid::Uniform(UniformMatroid::new(m, *k)),
            AgentSpec::Partition { blocks, caps } => {
                Matroid::Partition(PartitionMatroid::new(m, blocks.clone(), caps.clone())?)
            }
            AgentSpec::Graphic { vertices, edges } => {
                check_len("graphic edge list", edges.len(), m)?;
                Matroid::Graphic(GraphicMatroid::new(*vertices, edges.clone())?)
            }
            AgentSpec::Transversal { slots, adjacency } => {
                check_len("transversal adjacency", adjacency.len(), m)?;
                Matroid::Transversal(TransversalMatroid::new(*slots, adjacency.clone())?)
            }
            AgentSpec::LinearGf2 { dimension, columns } => {
                check_len("linear-gf2 column list", columns.len(), m)?;
                Matroid::LinearGf2(LinearMatroidGf2::new(*dimension, columns.clone())?)
            }
            AgentSpec::Explicit { independent } => {
                Matroid::Explicit(ExplicitMatroid::new(m, sets(independent))?)
            }
            AgentSpec::BinaryXos { .. } | AgentSpec::WeightedRank { .. } => {
                return Err(Error::Validation(format!(
                    "weighted-rank needs a matroid record, got {}",
                    self.kind_name()
                )))
            }
        })
    }

    fn to_valuation(&self, m: usize) -> Result<Valuation> {
        Ok(match self {
            AgentSpec::BinaryXos { family } => {
                Valuation::new(ValuationKind::BinaryXos(BinaryXos::new(m, sets(family))?))
            }
            AgentSpec::WeightedRank { matroid, weights } => {
                Valuation::new(ValuationKind::WeightedRank(WeightedRank::new(
                    matroid.to_matroid(m)?,
                    weights.clone(),
                )?))
            }
            rank => rank.to_matroid(m)?.into(),
        })
    }

    fn kind_name(&self) -> &'static str {
        match self {
            AgentSpec::Uniform { .. } => "uniform",
            AgentSpec::Partition { .. } => "partition",
            AgentSpec::Graphic { .. } => "graphic",
            AgentSpec::Transversal { .. } => "transversal",
            AgentSpec::LinearGf2 { .. } => "linear-gf2",
            AgentSpec::Explicit { .. } => "explicit",
            AgentSpec::BinaryXos { .. } => "binary-xos",
            AgentSpec::WeightedRank { .. } => "weighted-rank",
        }
    }

    fn of_matroid(matroid: &Matroid) -> Self {
        match matroid {
            Matroid::Uniform(u) => AgentSpec::Uniform { k: u.capacity() },
            Matroid::Partition(p) => AgentSpec::Partition {
                blocks: lists(p.blocks()),
                caps: p.caps().to_vec(),
            },
            Matroid::Graphic(g) => AgentSpec::Graphic {
                vertices: g.vertices(),
                edges: g.edges().to_vec(),
            },
            Matroid::Transversal(t) => AgentSpec::Transversal {
                slots: t.slots(),
                adjacency: t.adjacency().to_vec(),
            },
            Matroid::LinearGf2(l) => AgentSpec::LinearGf2 {
                dimension: l.dimension(),
                columns: l.columns().to_vec(),
            },
            Matroid::Explicit(e) => AgentSpec::Explicit {
                independent: lists(e.maximal_sets()),
            },
        }
    }

    pub fn of_valuation(v: &Valuation) -> Self {
        match v.kind() {
            ValuationKind::Rank(m) => Self::of_matroid(m),
            ValuationKind::BinaryXos(x) => AgentSpec::BinaryXos {
                family: lists(x.family()),
            },
            ValuationKind::WeightedRank(w) => AgentSpec::WeightedRank {
                matroid: Box::new(Self::of_matroid(w.matroid())),
                weights: w.weights().to_vec(),
            },
        }
    }
}

impl InstanceFile {
    pub fn of_instance(inst: &Instance) -> Self {
        Self {
            version: SCHEMA_VERSION,
            m: inst.goods(),
            agents: inst.agents().iter().map(AgentSpec::of_valuation).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                spec.to_valuation(self.m).map_err(|e| match e {
                    Error::Validation(msg) => Error::Validation(format!("agent {i}: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.m, agents).map_err(|e| Error::Validation(e.to_string()))
    }
}

/// Parses an instance. With `check_axioms`, every explicitly listed matroid
/// (including those under a weighted rank) is checked exhaustively, which
/// needs `m <= 14`.
pub fn parse_instance(text: &str, check_axioms: bool) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(parse_error)?;
    let inst = file.to_instance()?;
    if check_axioms {
        for v in inst.agents() {
            let matroid = match v.kind() {
                ValuationKind::Rank(m) => m,
                ValuationKind::WeightedRank(w) => w.matroid(),
                ValuationKind::BinaryXos(_) => continue,
            };
            if let Matroid::Explicit(_) = matroid {
                if let Some(violation) = matroid.find_axiom_violation()? {
                    return Err(violation.into());
                }
            }
        }
    }
    Ok(inst)
}

/// Checks the matroid axioms of every rank valuation and of the matroid
/// under every weighted rank, whatever its family. `Ok(false)` when
/// `m > 14` and nothing was checked.
pub fn check_all_axioms(inst: &Instance) -> Result<bool> {
    if inst.goods() > AXIOM_CHECK_LIMIT {
        return Ok(false);
    }
    for v in inst.agents() {
        let matroid = match v.kind() {
            ValuationKind::Rank(m) => m,
            ValuationKind::WeightedRank(w) => w.matroid(),
            ValuationKind::BinaryXos(_) => continue,
        };
        if let Some(violation) = matroid.find_axiom_violation()? {
            return Err(violation.into());
        }
    }
    Ok(true)
}

pub fn instance_to_string(inst: &Instance) -> String {
    let value = serde_json::to_value(InstanceFile::of_instance(inst)).expect("plain data");
    canonical(&value)
}

pub fn parse_allocation(text: &str, m: usize) -> Result<PartialAllocation> {
    let file: AllocationFile = serde_json::from_str(text).map_err(parse_error)?;
    PartialAllocation::new(m, sets(&file.bundles)).map_err(|e| Error::Validation(e.to_string()))
}

pub fn allocation_to_string(alloc: &PartialAllocation) -> String {
    let file = AllocationFile {
        bundles: lists(alloc.bundles()),
    };
    canonical(&serde_json::to_value(file).expect("plain data"))
}

/// Pretty JSON with scalar-only arrays kept on one line.
pub fn canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|v| match v {
        Value::Array(inner) => inner.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    })
}

fn write_value(value: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match value {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_flat(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(item, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let inst = parse_instance(
            r#"{"version": 1, "m": 1, "agents": [{"kind": "uniform", "k": 1}]}"#,
            true,
        )
        .unwrap();
        assert_eq!((inst.goods(), inst.agent_count()), (1, 1));
        assert_eq!(inst.agent(0).value(&Subset::full(1)), 1);
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let text = r#"{"version": 1, "m": 3, "agents": [
            {"kind": "partition", "blocks": [[0, 1], [1, 2]], "caps": [1, 1]}]}"#;
        assert!(matches!(
            parse_instance(text, false),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let text = "{\n  \"version\": 1,\n  \"m\": 2,\n  \"agents\": [ {\"kind\": \"uniform\", \"k\": } ]\n}";
        match parse_instance(text, false) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert!(column > 30, "column {column}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_and_fields_are_parse_errors() {
        let bad_kind = r#"{"version": 1, "m": 1, "agents": [{"kind": "additive", "k": 1}]}"#;
        assert!(matches!(
            parse_instance(bad_kind, false),
            Err(Error::Parse { .. })
        ));
        let bad_field =
            r#"{"version": 1, "m": 1, "agents": [{"kind": "uniform", "k": 1, "x": 2}]}"#;
        assert!(matches!(
            parse_instance(bad_field, false),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn wrong_lengths_and_versions() {
        let short = r#"{"version": 1, "m": 3, "agents": [{"kind": "graphic", "vertices": 2, "edges": [[0, 1]]}]}"#;
        assert!(matches!(
            parse_instance(short, false),
            Err(Error::Validation(_))
        ));
        let version = r#"{"version": 2, "m": 1, "agents": [{"kind": "uniform", "k": 1}]}"#;
        assert!(matches!(
            parse_instance(version, false),
            Err(Error::Validation(_))
        ));
        let nested = r#"{"version": 1, "m": 1, "agents": [{"kind": "weighted-rank",
            "matroid": {"kind": "binary-xos", "family": [[0]]}, "weights": [1]}]}"#;
        assert!(matches!(
            parse_instance(nested, false),
            Err(Error::Validation(_))
        ));
        let empty =
            r#"{"version": 1, "m": 2, "agents": [{"kind": "explicit", "independent": []}]}"#;
        assert!(matches!(
            parse_instance(empty, false),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn explicit_axioms_checked_on_request() {
        // {0,1} and {2} are maximal: {2} cannot be extended from {0,1}.
        let text = r#"{"version": 1, "m": 3, "agents": [{"kind": "explicit", "independent": [[0, 1], [2]]}]}"#;
        assert!(parse_instance(text, false).is_ok());
        match parse_instance(text, true) {
            Err(Error::Axiom { axiom, .. }) => assert_eq!(axiom, "augmentation"),
            other => panic!("expected an axiom error, got {other:?}"),
        }
    }

    #[test]
    fn every_kind_round_trips() {
        let text = r#"{
  "version": 1,
  "m": 3,
  "agents": [
    {"kind": "uniform", "k": 2},
    {"kind": "partition", "blocks": [[0, 2], [1]], "caps": [1, 0]},
    {"kind": "graphic", "vertices": 3, "edges": [[0, 1], [1, 2], [0, 0]]},
    {"kind": "transversal", "slots": 2, "adjacency": [[0], [0, 1], []]},
    {"kind": "linear-gf2", "dimension": 2, "columns": [1, 2, 3]},
    {"kind": "explicit", "independent": [[0, 1], [0, 2], [1, 2], [0]]},
    {"kind": "binary-xos", "family": [[0, 1], [2]]},
    {"kind": "weighted-rank", "matroid": {"kind": "uniform", "k": 1}, "weights": [3, 1, 2]}
  ]
}"#;
        let inst = parse_instance(text, true).unwrap();
        let canon = instance_to_string(&inst);
        let again = parse_instance(&canon, true).unwrap();
        assert_eq!(inst.agents(), again.agents());
        assert_eq!(instance_to_string(&again), canon);
        assert!(canon.ends_with("}\n"));
        assert!(
            canon.contains(r#""independent": [[0, 1], [0, 2], [1, 2]]"#),
            "{canon}"
        );
    }

    #[test]
    fn allocations_round_trip() {
        let a = parse_allocation(r#"{"bundles": [[5, 4], [0, 1, 2, 3]]}"#, 6).unwrap();
        assert_eq!(a.bundle(0), &Subset::from([4, 5]));
        assert_eq!(
            allocation_to_string(&a),
            "{\n  \"bundles\": [[4, 5], [0, 1, 2, 3]]\n}\n"
        );
        assert!(parse_allocation(r#"{"bundles": [[0], [0]]}"#, 2).is_err());
        assert!(parse_allocation(r#"{"bundles": [[7]]}"#, 2).is_err());
    }
}
