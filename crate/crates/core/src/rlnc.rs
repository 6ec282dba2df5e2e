//! Random linear network coding on flow-induced acyclic orientations.
//!
//! For rate `h`, each terminal contributes `h` link-disjoint paths from its
//! max flow. Every link used by some path is oriented along it; if the
//! union of orientations is acyclic the result is a [`CodingDag`] on which
//! random local coefficients are drawn and terminal decodability is checked
//! by exact rank computation. Cyclic unions are reported, not coded.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cut::{max_flow, multicast_capacity};
use crate::error::{Error, Result};
use crate::field::{rank, solve, FiniteField, Gf256};
use crate::flow::find_cycle;
use crate::graph::{ConnectivityGraph, NodeId};
use crate::rng::Seed;
use crate::scalar::Real;

/// Two-way exchange over the bridge `X - A - B - Y`: `A` combines `b1` and
/// `b2`, the combination reaches both ends through `B`, and each end strips
/// its own bit. Returns `(bit decoded at X, bit decoded at Y)`.
pub fn xor_relay_demo(b1: bool, b2: bool) -> (bool, bool) {
    let at_a = b1 ^ b2;
    let at_b = at_a;
    let decoded_at_x = b1 ^ at_b;
    let decoded_at_y = b2 ^ at_b;
    (decoded_at_x, decoded_at_y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodingArc {
    pub tail: NodeId,
    pub head: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingDag {
    rate: usize,
    source: NodeId,
    terminals: Vec<NodeId>,
    /// Nodes touched by some arc, topologically ordered.
    order: Vec<NodeId>,
    /// Sorted by topological position of the tail, then head.
    arcs: Vec<CodingArc>,
    in_arcs: Vec<Vec<usize>>,
    out_arcs: Vec<Vec<usize>>,
}

/// Union of flow orientations contains a directed cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicSkip {
    pub cycle: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DagOutcome {
    Acyclic(CodingDag),
    Cyclic(CyclicSkip),
}

pub fn build_coding_dag<T: Real>(graph: &ConnectivityGraph<T>, rate: usize) -> Result<DagOutcome> {
    let capacity = multicast_capacity(graph)?;
    if rate as u64 > capacity {
        return Err(Error::RateExceedsCapacity { rate, capacity });
    }
    let mut oriented = BTreeSet::new();
    for &t in graph.terminals() {
        let cert = max_flow(graph, t)?;
        for path in cert.paths.iter().take(rate) {
            for w in path.windows(2) {
                oriented.insert((w[0], w[1]));
            }
        }
    }
    if let Some(&(a, b)) = oriented.iter().find(|&&(a, b)| oriented.contains(&(b, a))) {
        return Ok(DagOutcome::Cyclic(CyclicSkip { cycle: vec![a, b] }));
    }
    let n = graph.node_count();
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in &oriented {
        succ[a].push(b);
    }
    if let Some(cycle) = find_cycle(&succ) {
        return Ok(DagOutcome::Cyclic(CyclicSkip { cycle }));
    }

    let mut indegree = vec![0usize; n];
    let mut touched = vec![false; n];
    touched[graph.source()] = true;
    for &(a, b) in &oriented {
        indegree[b] += 1;
        touched[a] = true;
        touched[b] = true;
    }
    let mut ready: BinaryHeap<Reverse<NodeId>> =
        (0..n).filter(|&v| touched[v] && indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::new();
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    let mut position = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut arcs: Vec<CodingArc> = oriented.iter().map(|&(tail, head)| CodingArc { tail, head }).collect();
    arcs.sort_by_key(|a| (position[a.tail], a.head));
    let mut in_arcs = vec![Vec::new(); n];
    let mut out_arcs = vec![Vec::new(); n];
    for (i, arc) in arcs.iter().enumerate() {
        out_arcs[arc.tail].push(i);
        in_arcs[arc.head].push(i);
    }
    Ok(DagOutcome::Acyclic(CodingDag {
        rate,
        source: graph.source(),
        terminals: graph.terminals().to_vec(),
        order,
        arcs,
        in_arcs,
        out_arcs,
    }))
}

/// Local mixing coefficients for every arc of a [`CodingDag`]: one weight
/// per input of the arc's tail. The source's inputs are the `h` message
/// symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode<F> {
    pub local_coefficients: Vec<Vec<F>>,
}

impl CodingDag {
    pub fn rate(&self) -> usize {
        self.rate
    }

    pub fn arcs(&self) -> &[CodingArc] {
        &self.arcs
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = CodingArc> + '_ {
        self.in_arcs[v].iter().map(|&i| self.arcs[i])
    }

    fn inputs(&self, v: NodeId) -> usize {
        if v == self.source {
            self.rate
        } else {
            self.in_arcs[v].len()
        }
    }

    /// Draws local coefficients. Tails with a single input draw nonzero
    /// weights, others draw uniformly over the field. When the source has
    /// exactly `h` outgoing arcs they carry the `h` message symbols directly.
    pub fn random_code<F: FiniteField, R: Rng + ?Sized>(&self, rng: &mut R) -> LinearCode<F> {
        let source_out = &self.out_arcs[self.source];
        let unit_source = source_out.len() == self.rate;
        let local_coefficients = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, arc)| {
                let inputs = self.inputs(arc.tail);
                if arc.tail == self.source && unit_source {
                    let slot = source_out.iter().position(|&a| a == i).expect("source arc");
                    (0..inputs).map(|j| if j == slot { F::ONE } else { F::ZERO }).collect()
                } else if inputs == 1 {
                    vec![F::from_index(rng.gen_range(1..F::ORDER))]
                } else {
                    (0..inputs).map(|_| F::from_index(rng.gen_range(0..F::ORDER))).collect()
                }
            })
            .collect();
        LinearCode { local_coefficients }
    }

    /// Propagates per-arc values in topological order. `source_inputs` are
    /// the values entering the source; each arc combines its tail's inputs
    /// with its local coefficients.
    fn propagate<F: FiniteField, V: Clone>(
        &self,
        code: &LinearCode<F>,
        source_inputs: &[V],
        zero: V,
        axpy: impl Fn(&mut V, F, &V),
    ) -> Vec<V> {
        let mut values: Vec<V> = Vec::with_capacity(self.arcs.len());
        for (i, arc) in self.arcs.iter().enumerate() {
            let mut acc = zero.clone();
            let coefficients = &code.local_coefficients[i];
            if arc.tail == self.source {
                for (c, input) in coefficients.iter().zip(source_inputs) {
                    axpy(&mut acc, *c, input);
                }
            } else {
                for (c, &a) in coefficients.iter().zip(&self.in_arcs[arc.tail]) {
                    axpy(&mut acc, *c, &values[a]);
                }
            }
            values.push(acc);
        }
        values
    }

    /// Global coding vector of every arc, in arc order.
    pub fn global_vectors<F: FiniteField>(&self, code: &LinearCode<F>) -> Vec<Vec<F>> {
        let h = self.rate;
        let units: Vec<Vec<F>> =
            (0..h).map(|i| (0..h).map(|j| if i == j { F::ONE } else { F::ZERO }).collect()).collect();
        self.propagate(code, &units, vec![F::ZERO; h], |acc, c, v| {
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = *a + c * x;
            }
        })
    }

    /// Rank of each terminal's received coding vectors.
    pub fn terminal_ranks<F: FiniteField>(&self, code: &LinearCode<F>) -> Vec<usize> {
        let global = self.global_vectors(code);
        self.terminals
            .iter()
            .map(|&t| {
                let mut rows: Vec<Vec<F>> = self.in_arcs[t].iter().map(|&a| global[a].clone()).collect();
                rank(&mut rows)
            })
            .collect()
    }

    /// Sends `message` through the network and decodes it at every
    /// terminal from the received symbols; `None` where decoding fails.
    pub fn transmit<F: FiniteField>(&self, code: &LinearCode<F>, message: &[F]) -> Vec<Option<Vec<F>>> {
        let symbols = self.propagate(code, message, F::ZERO, |acc, c, v| *acc = *acc + c * *v);
        let global = self.global_vectors(code);
        self.terminals
            .iter()
            .map(|&t| {
                let arcs = &self.in_arcs[t];
                let matrix: Vec<Vec<F>> = arcs.iter().map(|&a| global[a].clone()).collect();
                let received: Vec<F> = arcs.iter().map(|&a| symbols[a]).collect();
                if matrix.len() != self.rate {
                    return None;
                }
                solve(&matrix, &received)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityReport {
    pub h: u64,
    pub trials: usize,
    /// `None` when the coding graph was cyclic and no trial ran.
    pub success_fraction: Option<f64>,
    pub cyclic_skipped: bool,
    pub field_poly: String,
    /// Successful trials whose decoded message differed from the sent one.
    #[serde(skip)]
    pub decode_mismatches: usize,
    #[serde(skip)]
    pub cycle: Option<Vec<NodeId>>,
}

/// Checks random linear coding at rate `h` equal to the multicast capacity
/// over GF(2^8).
pub fn verify_achievability<T: Real>(
    graph: &ConnectivityGraph<T>,
    trials: usize,
    seed: Seed,
) -> Result<AchievabilityReport> {
    verify_achievability_in::<T, Gf256>(graph, trials, seed)
}

pub fn verify_achievability_in<T: Real, F: FiniteField>(
    graph: &ConnectivityGraph<T>,
    trials: usize,
    seed: Seed,
) -> Result<AchievabilityReport> {
    if trials == 0 {
        return Err(Error::param("at least one trial is required"));
    }
    let h = multicast_capacity(graph)?;
    let mut report = AchievabilityReport {
        h,
        trials,
        success_fraction: Some(1.0),
        cyclic_skipped: false,
        field_poly: F::POLY_LABEL.to_string(),
        decode_mismatches: 0,
        cycle: None,
    };
    if h == 0 {
        return Ok(report);
    }
    let dag = match build_coding_dag(graph, h as usize)? {
        DagOutcome::Acyclic(dag) => dag,
        DagOutcome::Cyclic(skip) => {
            report.success_fraction = None;
            report.cyclic_skipped = true;
            report.cycle = Some(skip.cycle);
            return Ok(report);
        }
    };
    let mut successes = 0usize;
    for trial in 0..trials {
        let mut rng = seed.child("rlnc-trial", trial as u64).rng();
        let (ok, mismatch) = code_trial::<F, _>(&dag, &mut rng);
        successes += usize::from(ok);
        report.decode_mismatches += usize::from(mismatch);
    }
    report.success_fraction = Some(successes as f64 / trials as f64);
    Ok(report)
}

/// One random code on `dag`: returns (every terminal reached full rank,
/// decoding then disagreed with the message).
pub(crate) fn code_trial<F: FiniteField, R: Rng + ?Sized>(dag: &CodingDag, rng: &mut R) -> (bool, bool) {
    let code: LinearCode<F> = dag.random_code(rng);
    let ok = dag.terminal_ranks(&code).iter().all(|&r| r == dag.rate);
    if !ok {
        return (false, false);
    }
    let message: Vec<F> = (0..dag.rate).map(|_| F::from_index(rng.gen_range(0..F::ORDER))).collect();
    let mismatch = dag.transmit(&code, &message).iter().any(|d| d.as_deref() != Some(&message[..]));
    (true, mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gf2;
    use crate::fixtures;

    #[test]
    fn xor_demo_all_inputs() {
        for b1 in [false, true] {
            for b2 in [false, true] {
                assert_eq!(xor_relay_demo(b1, b2), (b2, b1));
            }
        }
        assert_eq!(xor_relay_demo(true, false), (false, true));
    }

    fn dag(outcome: DagOutcome) -> CodingDag {
        match outcome {
            DagOutcome::Acyclic(d) => d,
            DagOutcome::Cyclic(c) => panic!("unexpected cycle {:?}", c.cycle),
        }
    }

    #[test]
    fn butterfly_orientation() {
        let d = dag(build_coding_dag(&fixtures::butterfly(), 2).unwrap());
        let arcs: Vec<(usize, usize)> = d.arcs().iter().map(|a| (a.tail, a.head)).collect();
        // c=3 -> d=4 is the shared link; both side links flow into c.
        assert!(arcs.contains(&(3, 4)));
        assert!(arcs.contains(&(1, 3)) && arcs.contains(&(2, 3)));
        assert!(!arcs.contains(&(4, 3)));
        assert_eq!(arcs.len(), 9);
        assert_eq!(d.order()[0], 0);
    }

    #[test]
    fn single_path_chain() {
        let d = dag(build_coding_dag(&fixtures::single_relay(), 1).unwrap());
        let arcs: Vec<(usize, usize)> = d.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(arcs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn opposing_flows_are_cyclic() {
        match build_coding_dag(&fixtures::opposing_flows(), 2).unwrap() {
            DagOutcome::Cyclic(skip) => {
                let mut cycle = skip.cycle.clone();
                cycle.sort();
                assert_eq!(cycle, vec![1, 2]);
            }
            DagOutcome::Acyclic(_) => panic!("expected a cycle"),
        }
        assert!(build_coding_dag(&fixtures::opposing_flows(), 3).is_err());
    }

    #[test]
    fn rate_above_capacity_rejected() {
        assert!(matches!(
            build_coding_dag(&fixtures::butterfly(), 3),
            Err(Error::RateExceedsCapacity { rate: 3, capacity: 2 })
        ));
    }

    #[test]
    fn butterfly_success_rates() {
        let g = fixtures::butterfly();
        let report = verify_achievability(&g, 1000, Seed(9)).unwrap();
        assert_eq!(report.h, 2);
        assert!(!report.cyclic_skipped);
        assert!(report.success_fraction.unwrap() >= 0.97);
        assert_eq!(report.decode_mismatches, 0);
        assert_eq!(report.field_poly, "0x11B");

        let binary = verify_achievability_in::<f64, Gf2>(&g, 1000, Seed(9)).unwrap();
        assert!(binary.success_fraction.unwrap() < report.success_fraction.unwrap());
        assert_eq!(binary.decode_mismatches, 0);
    }

    #[test]
    fn butterfly_exact_success_probability() {
        // Node c mixes its two inputs with (alpha, beta); terminal 5 needs
        // beta != 0 and terminal 6 needs alpha != 0.
        let d = dag(build_coding_dag(&fixtures::butterfly(), 2).unwrap());
        let c_out = d.arcs().iter().position(|a| (a.tail, a.head) == (3, 4)).unwrap();
        let mut good = 0;
        for alpha in 0..=255u8 {
            for beta in 0..=255u8 {
                let mut code: LinearCode<Gf256> = d.random_code(&mut Seed(0).rng());
                code.local_coefficients[c_out] = vec![Gf256(alpha), Gf256(beta)];
                if d.terminal_ranks(&code).iter().all(|&r| r == 2) {
                    good += 1;
                }
            }
        }
        assert_eq!(good, 255 * 255);
    }

    #[test]
    fn path_and_disconnected() {
        let report = verify_achievability(&fixtures::single_relay(), 50, Seed(1)).unwrap();
        assert_eq!((report.h, report.success_fraction), (1, Some(1.0)));

        let mut file = fixtures::single_relay().to_file();
        file.edges = vec![[0, 1]];
        let cut_off = ConnectivityGraph::from_file(file).unwrap();
        let report = verify_achievability(&cut_off, 5, Seed(1)).unwrap();
        assert_eq!((report.h, report.success_fraction), (0, Some(1.0)));
    }

    #[test]
    fn cyclic_reported_in_band() {
        let report = verify_achievability(&fixtures::opposing_flows(), 10, Seed(1)).unwrap();
        assert!(report.cyclic_skipped);
        assert_eq!(report.success_fraction, None);
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(json, r#"{"h":2,"trials":10,"success_fraction":null,"cyclic_skipped":true,"field_poly":"0x11B"}"#);
    }

    #[test]
    fn wheatstone_rate_one() {
        let report = verify_achievability(&fixtures::wheatstone(), 20, Seed(2)).unwrap();
        assert_eq!(report.h, 1);
        assert_eq!(report.success_fraction, Some(1.0));
    }
}
