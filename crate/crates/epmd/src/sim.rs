//! Storage-cluster simulator: one block per node, failures injected one at a
//! time and repaired from the n − 1 survivors.

use std::fmt;

use epmd_core::codec::{Block, Codeword, PartialCodeword};
use epmd_core::repair::{execute_repair, plan_repair};
use epmd_core::CodeParams;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Alive,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub block: Option<Block>,
    pub status: NodeStatus,
    /// Symbols this node has sent to repairing nodes.
    pub served: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Failed { node: usize },
    Repaired { node: usize, downloaded: usize },
}

#[derive(Clone, Debug)]
pub struct ClusterState {
    params: CodeParams,
    nodes: Vec<Node>,
    log: Vec<Event>,
}

impl ClusterState {
    pub fn new(params: &CodeParams, codeword: Codeword) -> Self {
        let nodes = codeword
            .into_blocks()
            .into_iter()
            .map(|b| Node {
                block: Some(b),
                status: NodeStatus::Alive,
                served: 0,
            })
            .collect();
        ClusterState {
            params: params.clone(),
            nodes,
            log: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    pub fn alive(&self) -> usize {
        self.nodes.iter().filter(|n| n.status == NodeStatus::Alive).count()
    }

    /// Symbols served by all nodes so far.
    pub fn traffic(&self) -> usize {
        self.nodes.iter().map(|n| n.served).sum()
    }

    /// Stored blocks, if every node is alive.
    pub fn codeword(&self) -> Option<Codeword> {
        let blocks = self.nodes.iter().map(|n| n.block.clone()).collect::<Option<Vec<_>>>()?;
        Codeword::new(self.params.layout(), blocks).ok()
    }

    pub fn fail(&mut self, node: usize) -> Result<()> {
        let n = self.nodes.len();
        let slot = self
            .nodes
            .get_mut(node)
            .ok_or_else(|| Error::ScenarioInfeasible(format!("node {} does not exist (n = {n})", node + 1)))?;
        if slot.status == NodeStatus::Failed {
            return Err(Error::ScenarioInfeasible(format!("node {} is already down", node + 1)));
        }
        slot.status = NodeStatus::Failed;
        slot.block = None;
        self.log.push(Event::Failed { node });
        Ok(())
    }

    /// Rebuilds `node` from every other node, which must all be alive.
    pub fn repair(&mut self, node: usize) -> Result<usize> {
        if self.nodes.get(node).map(|n| n.status) != Some(NodeStatus::Failed) {
            return Err(Error::ScenarioInfeasible(format!("node {} is not down", node + 1)));
        }
        let helpers = self.alive();
        if helpers < self.params.k() || helpers != self.nodes.len() - 1 {
            return Err(Error::ScenarioInfeasible(format!(
                "repair needs all {} other nodes, {helpers} alive",
                self.nodes.len() - 1
            )));
        }
        let layout = self.params.layout();
        let plan = plan_repair(layout, layout.block(node)?)?;
        let survivors = PartialCodeword::new(self.nodes.iter().map(|n| n.block.clone()).collect());
        let block = execute_repair(&self.params, &survivors, &plan)?;
        for (helper, count) in plan.per_helper().into_iter().enumerate() {
            self.nodes[helper].served += count;
        }
        let downloaded = plan.downloaded();
        let slot = &mut self.nodes[node];
        slot.block = Some(block);
        slot.status = NodeStatus::Alive;
        self.log.push(Event::Repaired { node, downloaded });
        Ok(downloaded)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimSummary {
    pub repairs: usize,
    /// Sum of the per-repair download counts.
    pub reported: usize,
    /// Sum of the per-node served counters.
    pub traffic: usize,
    pub served: Vec<usize>,
    pub intact: bool,
}

impl fmt::Display for SimSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "repairs={}", self.repairs)?;
        writeln!(f, "traffic={}", self.traffic)?;
        writeln!(f, "reported={}", self.reported)?;
        let served: Vec<String> = self.served.iter().map(usize::to_string).collect();
        writeln!(f, "served={}", served.join(","))?;
        writeln!(f, "intact={}", self.intact)
    }
}

/// Fails and repairs each scheduled node (0-based) in turn.
pub fn sim_run(params: &CodeParams, codeword: &Codeword, schedule: &[usize]) -> Result<(ClusterState, SimSummary)> {
    let mut cluster = ClusterState::new(params, codeword.clone());
    let mut reported = 0;
    for &node in schedule {
        cluster.fail(node)?;
        reported += cluster.repair(node)?;
    }
    let summary = SimSummary {
        repairs: schedule.len(),
        reported,
        traffic: cluster.traffic(),
        served: cluster.nodes().iter().map(|n| n.served).collect(),
        intact: cluster.codeword().as_ref() == Some(codeword),
    };
    Ok((cluster, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use epmd_core::codec::Codec;
    use epmd_core::mds::{sample_code, CodeTemplate};
    use epmd_core::{Field, FieldElement};

    fn setup(n: usize, k: usize, t: usize) -> (CodeParams, Codeword) {
        let template = CodeTemplate::new(Field::with_bits(16).unwrap(), n, k, t).unwrap();
        let params = sample_code(&template, 3, 10).unwrap().params;
        let msg: Vec<_> = (0..k * params.ell()).map(|i| FieldElement(i as u32 * 977 + 5)).collect();
        let cw = Codec::new(&params).unwrap().encode(&msg).unwrap();
        (params, cw)
    }

    #[test]
    fn empty_scenario_has_no_traffic() {
        let (params, cw) = setup(6, 3, 1);
        let (cluster, summary) = sim_run(&params, &cw, &[]).unwrap();
        assert_eq!(summary.traffic, 0);
        assert!(summary.intact);
        assert!(cluster.log().is_empty());
    }

    #[test]
    fn every_node_once() {
        let (params, cw) = setup(6, 3, 1);
        let schedule: Vec<usize> = (0..6).collect();
        let (cluster, summary) = sim_run(&params, &cw, &schedule).unwrap();
        assert!(summary.intact);
        assert_eq!(summary.traffic, 6 * 7);
        assert_eq!(summary.traffic, summary.reported);
        assert_eq!(cluster.log().len(), 12);
    }

    #[test]
    fn stage1_load_is_even() {
        let (params, cw) = setup(6, 3, 2);
        // t = s: no stage 2, so each helper serves exactly r^(t-1) = 3 symbols
        let (_, summary) = sim_run(&params, &cw, &[0]).unwrap();
        assert_eq!(summary.served, vec![0, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn infeasible_schedules() {
        let (params, cw) = setup(6, 3, 1);
        assert!(matches!(sim_run(&params, &cw, &[6]), Err(Error::ScenarioInfeasible(_))));
        let mut cluster = ClusterState::new(&params, cw);
        cluster.fail(0).unwrap();
        cluster.fail(1).unwrap();
        assert!(matches!(cluster.repair(0), Err(Error::ScenarioInfeasible(_))));
        assert!(matches!(cluster.fail(1), Err(Error::ScenarioInfeasible(_))));
    }
}
