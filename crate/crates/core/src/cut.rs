//! s-t cuts over relay partitions and exact min-cut / multicast capacity.
//!
//! For a terminal `t`, the flow network gives the source outgoing arcs only,
//! `t` incoming arcs only, and each relay-relay link two antiparallel unit
//! arcs. Links to other terminals are dropped: terminals absorb and never
//! forward. Every s-t arc set is then a relay partition `V_k` and its cut
//! value is
//!
//! ```text
//! C_k = sum_{i in R \ V_k} C_si + sum_{j in V_k, i in R \ V_k} C_ji + sum_{j in V_k} C_jt
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{ConnectivityGraph, NodeId, Role};
use crate::scalar::Real;

/// Largest relay count accepted by [`brute_force_min_cut`].
pub const MAX_BRUTE_FORCE_RELAYS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutResult {
    pub terminal: NodeId,
    /// Relays on the source side, ascending.
    pub partition_vk: Vec<NodeId>,
    pub k: usize,
    pub capacity: u64,
    pub is_minimum: bool,
}

/// Max-flow outcome for one terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCertificate {
    pub terminal: NodeId,
    pub value: u64,
    /// Relays reachable from the source in the final residual network.
    pub partition_vk: Vec<NodeId>,
    /// `value` link-disjoint paths `s, relay, ..., t`; their union is acyclic.
    pub paths: Vec<Vec<NodeId>>,
}

fn check_terminal<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId) -> Result<()> {
    if graph.is_terminal(terminal) {
        Ok(())
    } else {
        Err(Error::UnknownTerminal(terminal))
    }
}

fn flow_network<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId) -> FlowNetwork {
    let mut net = FlowNetwork::new(graph.node_count());
    for (a, b) in graph.edges() {
        match (graph.role(a), graph.role(b)) {
            (Role::Source, Role::Relay) => net.add_arc(a, b, 1),
            (Role::Relay, Role::Source) => net.add_arc(b, a, 1),
            (Role::Relay, Role::Relay) => {
                net.add_arc(a, b, 1);
                net.add_arc(b, a, 1);
            }
            (Role::Relay, Role::Terminal) if b == terminal => net.add_arc(a, b, 1),
            (Role::Terminal, Role::Relay) if a == terminal => net.add_arc(b, a, 1),
            _ => {}
        }
    }
    net
}

/// Exact s-t max flow with its min-cut certificate and path decomposition.
pub fn max_flow<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId) -> Result<FlowCertificate> {
    check_terminal(graph, terminal)?;
    let s = graph.source();
    let mut net = flow_network(graph, terminal);
    let value = net.max_flow(s, terminal);
    let reach = net.residual_reachable(s);
    let partition_vk = graph.relays().iter().copied().filter(|&v| reach[v]).collect();
    let paths = net.paths(s, terminal);
    debug_assert_eq!(paths.len() as u64, value);
    Ok(FlowCertificate { terminal, value, partition_vk, paths })
}

/// Cut value of the relay partition `partition_vk` for `terminal`.
pub fn cut_capacity<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId, partition_vk: &[NodeId]) -> Result<u64> {
    check_terminal(graph, terminal)?;
    let mut source_side = vec![false; graph.node_count()];
    for &v in partition_vk {
        if v >= graph.node_count() || graph.role(v) != Role::Relay {
            return Err(Error::InvalidPartition(format!("{v} is not a relay")));
        }
        if source_side[v] {
            return Err(Error::InvalidPartition(format!("relay {v} listed twice")));
        }
        source_side[v] = true;
    }
    Ok(cut_value(graph, terminal, &source_side))
}

fn cut_value<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId, source_side: &[bool]) -> u64 {
    let s = graph.source();
    let mut total = 0u64;
    for &i in graph.neighbors(s) {
        if graph.role(i) == Role::Relay && !source_side[i] {
            total += 1;
        }
    }
    for &j in graph.relays() {
        if !source_side[j] {
            continue;
        }
        for &i in graph.neighbors(j) {
            let crosses = match graph.role(i) {
                Role::Relay => !source_side[i],
                Role::Terminal => i == terminal,
                Role::Source => false,
            };
            total += u64::from(crosses);
        }
    }
    total
}

/// Minimum s-t cut via max flow; the certificate is the source-minimal cut.
/// A terminal unreachable from the source yields capacity 0.
pub fn min_cut<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId) -> Result<CutResult> {
    let cert = max_flow(graph, terminal)?;
    debug_assert_eq!(cut_capacity(graph, terminal, &cert.partition_vk).ok(), Some(cert.value));
    Ok(CutResult {
        terminal,
        k: cert.partition_vk.len(),
        partition_vk: cert.partition_vk,
        capacity: cert.value,
        is_minimum: true,
    })
}

/// Exhaustive minimum over all `2^n` relay partitions; ties go to the
/// lexicographically smallest ascending `V_k`.
pub fn brute_force_min_cut<T: Real>(graph: &ConnectivityGraph<T>, terminal: NodeId) -> Result<CutResult> {
    check_terminal(graph, terminal)?;
    let relays = graph.relays();
    let n = relays.len();
    if n > MAX_BRUTE_FORCE_RELAYS {
        return Err(Error::SizeGuard { n, max: MAX_BRUTE_FORCE_RELAYS });
    }
    let subset = |mask: u32| -> Vec<NodeId> { (0..n).filter(|b| mask >> b & 1 == 1).map(|b| relays[b]).collect() };
    let mut side = vec![false; graph.node_count()];
    let mut best: Option<(u64, Vec<NodeId>)> = None;
    for mask in 0..(1u32 << n) {
        for (b, &v) in relays.iter().enumerate() {
            side[v] = mask >> b & 1 == 1;
        }
        let value = cut_value(graph, terminal, &side);
        let better = match &best {
            None => true,
            Some((v, _)) if value < *v => true,
            Some((v, vk)) if value == *v => subset(mask) < *vk,
            Some(_) => false,
        };
        if better {
            best = Some((value, subset(mask)));
        }
    }
    let (capacity, partition_vk) = best.expect("at least the empty partition");
    Ok(CutResult { terminal, k: partition_vk.len(), partition_vk, capacity, is_minimum: true })
}

/// Network coding multicast capacity: the smallest terminal min cut.
pub fn multicast_capacity<T: Real>(graph: &ConnectivityGraph<T>) -> Result<u64> {
    let mut best = None;
    for &t in graph.terminals() {
        let c = min_cut(graph, t)?.capacity;
        best = Some(best.map_or(c, |b: u64| b.min(c)));
    }
    best.ok_or_else(|| Error::InvalidGraph("no terminals".into()))
}
