use crate::error::{Error, Result};
use crate::valuation::Valuation;

/// `n` agents with valuations over the goods `0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    m: usize,
    agents: Vec<Valuation>,
}

impl Instance {
    pub fn new(m: usize, agents: Vec<Valuation>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation(
                "an instance needs at least one good".into(),
            ));
        }
        if agents.is_empty() {
            return Err(Error::Validation(
                "an instance needs at least one agent".into(),
            ));
        }
        if let Some((i, v)) = agents
            .iter()
            .enumerate()
            .find(|(_, v)| v.ground_size() != m)
        {
            return Err(Error::Validation(format!(
                "agent {i} is defined over {} goods, instance has {m}",
                v.ground_size()
            )));
        }
        Ok(Self { m, agents })
    }

    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Valuation] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Valuation {
        &self.agents[i]
    }

    /// Borrowed oracle views of all agents, in order.
    pub fn views(&self) -> Vec<&Valuation> {
        self.agents.iter().collect()
    }

    /// Borrowed oracle views of the listed agents.
    pub fn views_of(&self, ids: &[usize]) -> Result<Vec<&Valuation>> {
        ids.iter()
            .map(|&i| {
                self.agents.get(i).ok_or_else(|| {
                    Error::Argument(format!("agent {i} outside 0..{}", self.agents.len()))
                })
            })
            .collect()
    }

    pub fn all_rank(&self) -> bool {
        self.agents.iter().all(Valuation::is_rank)
    }

    pub(crate) fn require_rank(&self, op: &'static str) -> Result<()> {
        match self.agents.iter().position(|v| !v.is_rank()) {
            None => Ok(()),
            Some(i) => Err(Error::capability(
                op,
                format!(
                    "agent {i} has a {} valuation; only matroid rank valuations are supported",
                    self.agents[i].class_name()
                ),
            )),
        }
    }

    /// Total oracle queries across all agents.
    pub fn query_count(&self) -> u64 {
        self.agents.iter().map(Valuation::query_count).sum()
    }

    pub fn reset_queries(&self) {
        self.agents.iter().for_each(Valuation::reset_queries);
    }
}
