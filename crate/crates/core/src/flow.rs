//! Integer max-flow (Dinic) with residual reachability and decomposition of
//! the flow into simple, acyclic s-t paths.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    residual: u64,
    capacity: u64,
}

/// Arcs are stored in pairs: `2k` is the forward arc, `2k + 1` its residual
/// twin.
#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, capacity: u64) {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, residual: capacity, capacity });
        self.arcs.push(Arc { to: from, residual: 0, capacity: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
    }

    fn levels(&self, s: usize) -> Vec<Option<u32>> {
        let mut level = vec![None; self.out.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let next = level[u].map(|l| l + 1);
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.residual > 0 && level[arc.to].is_none() {
                    level[arc.to] = next;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, limit: u64, level: &[Option<u32>], cursor: &mut [usize]) -> u64 {
        if u == t {
            return limit;
        }
        while cursor[u] < self.out[u].len() {
            let a = self.out[u][cursor[u]];
            let (to, residual) = (self.arcs[a].to, self.arcs[a].residual);
            if residual > 0 && level[to].is_some() && level[to] == level[u].map(|l| l + 1) {
                let pushed = self.augment(to, t, limit.min(residual), level, cursor);
                if pushed > 0 {
                    self.arcs[a].residual -= pushed;
                    self.arcs[a ^ 1].residual += pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        if s == t {
            return 0;
        }
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut cursor = vec![0; self.out.len()];
            loop {
                let pushed = self.augment(s, t, u64::MAX, &level, &mut cursor);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network: the source side of
    /// the source-minimal minimum cut.
    pub(crate) fn residual_reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).iter().map(Option::is_some).collect()
    }

    /// Net flow per node pair after cancelling antiparallel flow, as a list
    /// of unit arcs `(from, to)` repeated by multiplicity.
    fn net_flow_arcs(&self) -> Vec<(usize, usize)> {
        let mut net: std::collections::BTreeMap<(usize, usize), i64> = Default::default();
        for (id, arc) in self.arcs.iter().enumerate().step_by(2) {
            let flow = arc.capacity - arc.residual;
            if flow == 0 {
                continue;
            }
            let from = self.arcs[id + 1].to;
            let to = arc.to;
            let (key, sign) = if from < to { ((from, to), 1) } else { ((to, from), -1) };
            *net.entry(key).or_default() += sign * flow as i64;
        }
        let mut arcs = Vec::new();
        for ((a, b), f) in net {
            let (from, to) = if f > 0 { (a, b) } else { (b, a) };
            arcs.extend(std::iter::repeat_n((from, to), f.unsigned_abs() as usize));
        }
        arcs
    }

    /// Decomposes the current flow into `value` s-t paths after cancelling
    /// antiparallel flow and every flow cycle, so the union of the returned
    /// paths is acyclic.
    pub(crate) fn paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let n = self.out.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (from, to) in self.net_flow_arcs() {
            succ[from].push(to);
        }
        for list in &mut succ {
            list.sort_unstable();
        }
        while let Some(cycle) = find_cycle(&succ) {
            for w in 0..cycle.len() {
                let (a, b) = (cycle[w], cycle[(w + 1) % cycle.len()]);
                let pos = succ[a].iter().position(|&x| x == b).expect("cycle arc present");
                succ[a].remove(pos);
            }
        }
        let mut paths = Vec::new();
        while !succ[s].is_empty() {
            let mut path = vec![s];
            let mut u = s;
            while u != t {
                let v = succ[u].remove(0);
                path.push(v);
                u = v;
            }
            paths.push(path);
        }
        paths
    }
}

/// Some directed cycle in the multigraph, as its node sequence.
pub(crate) fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = succ.len();
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Active;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if let Some(&v) = succ[u].get(*next) {
                *next += 1;
                match mark[v] {
                    Mark::New => {
                        mark[v] = Mark::Active;
                        stack.push((v, 0));
                    }
                    Mark::Active => {
                        let start = stack.iter().position(|&(x, _)| x == v).expect("active node on stack");
                        return Some(stack[start..].iter().map(|&(x, _)| x).collect());
                    }
                    Mark::Done => {}
                }
            } else {
                mark[u] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}
