//! Connectivity graphs: one send-only source, relays, and receive-only
//! terminals placed in the unit square, with unit-capacity undirected links.
//!
//! Node ids are dense: the source is always `0`; the remaining ids are
//! relays or terminals. Generated graphs place relays at `1..=n` and
//! terminals after them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{connect_decision, kernel_probability, sample_points, ConnectionModel, Point};
use crate::rng::Seed;
use crate::scalar::Real;

pub type NodeId = usize;

pub const SOURCE: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Source,
    Relay,
    Terminal,
}

/// Which pairs may ever carry a link: the source never talks to a terminal
/// and terminals never talk to each other.
pub fn link_allowed(a: Role, b: Role) -> bool {
    !matches!(
        (a, b),
        (Role::Source, Role::Terminal)
            | (Role::Terminal, Role::Source)
            | (Role::Terminal, Role::Terminal)
            | (Role::Source, Role::Source)
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityGraph<T> {
    positions: Vec<Point<T>>,
    roles: Vec<Role>,
    relays: Vec<NodeId>,
    terminals: Vec<NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    model: ConnectionModel<T>,
    seed: Seed,
}

/// On-disk form of a [`ConnectivityGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct GraphFile<T> {
    pub n_relays: usize,
    pub terminals: Vec<NodeId>,
    pub positions: Vec<Point<T>>,
    pub edges: Vec<[NodeId; 2]>,
    pub model: ConnectionModel<T>,
    pub seed: u64,
}

impl<T: Real> ConnectivityGraph<T> {
    /// Samples `1 + n_relays + n_terminals` positions from the seed's
    /// `geometry` child and realises links from its `connect` child, visiting
    /// pairs in canonical `(i < j)` order.
    pub fn build(n_relays: usize, n_terminals: usize, model: &ConnectionModel<T>, seed: Seed) -> Result<Self> {
        if n_terminals == 0 {
            return Err(Error::param("at least one terminal is required"));
        }
        let total = 1 + n_relays + n_terminals;
        let positions: Vec<Point<T>> = sample_points(total, &mut seed.child("geometry", 0).rng());
        let roles = generated_roles(n_relays, n_terminals);

        let mut rng = seed.child("connect", 0).rng();
        let grid = CellGrid::new(&positions, model.r_prime());
        let mut adjacency = vec![Vec::new(); total];
        let mut candidates = Vec::new();
        for i in 0..total {
            grid.candidates_after(i, &positions, model.r_prime(), &mut candidates);
            for &j in &candidates {
                if !link_allowed(roles[i], roles[j]) {
                    continue;
                }
                if connect_decision(&positions[i], &positions[j], model, &mut rng) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self::assemble(positions, roles, adjacency, *model, seed))
    }

    /// Validating constructor for hand-made or loaded graphs.
    pub fn from_file(file: GraphFile<T>) -> Result<Self> {
        let total = file.positions.len();
        if total != 1 + file.n_relays + file.terminals.len() {
            return Err(Error::InvalidGraph(format!(
                "{} positions but 1 source + {} relays + {} terminals",
                total,
                file.n_relays,
                file.terminals.len()
            )));
        }
        if file.terminals.is_empty() {
            return Err(Error::InvalidGraph("no terminals".into()));
        }
        let mut roles = vec![Role::Relay; total];
        roles[SOURCE] = Role::Source;
        for &t in &file.terminals {
            if t == SOURCE || t >= total {
                return Err(Error::InvalidGraph(format!("terminal id {t} out of range")));
            }
            if roles[t] == Role::Terminal {
                return Err(Error::InvalidGraph(format!("terminal {t} listed twice")));
            }
            roles[t] = Role::Terminal;
        }
        if let Some(p) = file.positions.iter().find(|p| !p.in_unit_square()) {
            return Err(Error::InvalidGraph(format!("position {:?} outside the unit square", p)));
        }
        let mut adjacency = vec![Vec::new(); total];
        for &[a, b] in &file.edges {
            if a >= total || b >= total || a == b {
                return Err(Error::InvalidGraph(format!("bad edge [{a}, {b}]")));
            }
            if !link_allowed(roles[a], roles[b]) {
                return Err(Error::InvalidGraph(format!("edge [{a}, {b}] joins {:?} and {:?}", roles[a], roles[b])));
            }
            let d = file.positions[a].distance(&file.positions[b]);
            if kernel_probability(d, &file.model) <= T::zero() {
                return Err(Error::InvalidGraph(format!(
                    "edge [{a}, {b}] has zero connection probability at distance {d}"
                )));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::InvalidGraph("duplicate edge".into()));
            }
        }
        Ok(Self::assemble(file.positions, roles, adjacency, file.model, Seed(file.seed)))
    }

    pub fn to_file(&self) -> GraphFile<T> {
        GraphFile {
            n_relays: self.relays.len(),
            terminals: self.terminals.clone(),
            positions: self.positions.clone(),
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
            model: self.model,
            seed: self.seed.value(),
        }
    }

    /// Copy of the graph with one more link; the link must satisfy the same
    /// role and distance rules as generated ones.
    pub fn with_edge(&self, a: NodeId, b: NodeId) -> Result<Self> {
        let mut file = self.to_file();
        file.edges.push([a.min(b), a.max(b)]);
        Self::from_file(file)
    }

    fn assemble(
        positions: Vec<Point<T>>,
        roles: Vec<Role>,
        adjacency: Vec<Vec<NodeId>>,
        model: ConnectionModel<T>,
        seed: Seed,
    ) -> Self {
        let relays = (0..roles.len()).filter(|&v| roles[v] == Role::Relay).collect();
        let terminals = (0..roles.len()).filter(|&v| roles[v] == Role::Terminal).collect();
        ConnectivityGraph { positions, roles, relays, terminals, adjacency, model, seed }
    }

    pub fn source(&self) -> NodeId {
        SOURCE
    }

    pub fn relays(&self) -> &[NodeId] {
        &self.relays
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn n_relays(&self) -> usize {
        self.relays.len()
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn role(&self, v: NodeId) -> Role {
        self.roles[v]
    }

    pub fn position(&self, v: NodeId) -> Point<T> {
        self.positions[v]
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub fn model(&self) -> &ConnectionModel<T> {
        &self.model
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// Link capacity `C_ij`: 1 when linked, 0 otherwise (including `i == j`).
    pub fn capacity(&self, i: NodeId, j: NodeId) -> u64 {
        u64::from(self.adjacency[i].binary_search(&j).is_ok())
    }

    /// Undirected links as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.roles.get(v) == Some(&Role::Terminal)
    }

    #[cfg(test)]
    pub(crate) fn with_raw_edge(&self, a: NodeId, b: NodeId) -> Self {
        let mut g = self.clone();
        g.adjacency[a].push(b);
        g.adjacency[b].push(a);
        g.adjacency[a].sort_unstable();
        g.adjacency[b].sort_unstable();
        g
    }
}

fn generated_roles(n_relays: usize, n_terminals: usize) -> Vec<Role> {
    std::iter::once(Role::Source)
        .chain(std::iter::repeat_n(Role::Relay, n_relays))
        .chain(std::iter::repeat_n(Role::Terminal, n_terminals))
        .collect()
}

/// Uniform bucketing of the unit square with cells at least `radius` wide,
/// so every pair within `radius` lies in the same or adjacent cells.
struct CellGrid {
    side: usize,
    cells: Vec<Vec<NodeId>>,
    cell_of: Vec<(usize, usize)>,
}

impl CellGrid {
    const MAX_SIDE: usize = 1024;

    fn new<T: Real>(positions: &[Point<T>], radius: T) -> Self {
        let side = if radius > T::zero() {
            (1.0 / radius.as_f64()).floor().clamp(1.0, Self::MAX_SIDE as f64) as usize
        } else {
            Self::MAX_SIDE
        };
        let index = |c: T| ((c.as_f64() * side as f64) as usize).min(side - 1);
        let cell_of: Vec<(usize, usize)> = positions.iter().map(|p| (index(p.x), index(p.y))).collect();
        let mut cells = vec![Vec::new(); side * side];
        for (v, &(cx, cy)) in cell_of.iter().enumerate() {
            cells[cy * side + cx].push(v);
        }
        CellGrid { side, cells, cell_of }
    }

    /// Nodes `j > i` within `radius` of `i`, ascending.
    fn candidates_after<T: Real>(&self, i: NodeId, positions: &[Point<T>], radius: T, out: &mut Vec<NodeId>) {
        out.clear();
        let (cx, cy) = self.cell_of[i];
        for y in cy.saturating_sub(1)..=(cy + 1).min(self.side - 1) {
            for x in cx.saturating_sub(1)..=(cx + 1).min(self.side - 1) {
                out.extend(
                    self.cells[y * self.side + x]
                        .iter()
                        .copied()
                        .filter(|&j| j > i && positions[i].distance(&positions[j]) <= radius),
                );
            }
        }
        out.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConnectionModel, Kernel};

    /// Reference construction scanning every pair.
    fn build_full_scan(n: usize, tau: usize, model: &ConnectionModel<f64>, seed: Seed) -> Vec<(NodeId, NodeId)> {
        let total = 1 + n + tau;
        let positions: Vec<Point<f64>> = sample_points(total, &mut seed.child("geometry", 0).rng());
        let roles = generated_roles(n, tau);
        let mut rng = seed.child("connect", 0).rng();
        let mut edges = Vec::new();
        for i in 0..total {
            for j in i + 1..total {
                if link_allowed(roles[i], roles[j]) && connect_decision(&positions[i], &positions[j], model, &mut rng) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    #[test]
    fn grid_build_matches_full_scan() {
        for (seed, model) in [
            (1, ConnectionModel::fixed(0.1, 0.2, 0.5).unwrap()),
            (2, ConnectionModel::linear_decay(0.05, 0.3, 0.9).unwrap()),
            (3, ConnectionModel::fixed(0.0, 0.0, 1.0).unwrap()),
            (4, ConnectionModel::fixed(0.6, 1.0, 0.5).unwrap()),
        ] {
            let g = ConnectivityGraph::build(150, 3, &model, Seed(seed)).unwrap();
            let got: Vec<_> = g.edges().collect();
            assert_eq!(got, build_full_scan(150, 3, &model, Seed(seed)));
        }
    }

    #[test]
    fn build_respects_roles_and_symmetry() {
        let model = ConnectionModel::fixed(1.0, 1.0, 1.0).unwrap();
        let g = ConnectivityGraph::build(1, 1, &model, Seed(0)).unwrap();
        assert_eq!(g.capacity(0, 2), 0);
        assert_eq!(g.capacity(2, 0), 0);

        let model = ConnectionModel::fixed(0.3, 0.5, 0.5).unwrap();
        let g = ConnectivityGraph::build(40, 4, &model, Seed(9)).unwrap();
        for i in 0..g.node_count() {
            assert_eq!(g.capacity(i, i), 0);
            for j in 0..g.node_count() {
                assert_eq!(g.capacity(i, j), g.capacity(j, i));
                if g.capacity(i, j) == 1 {
                    assert!(link_allowed(g.role(i), g.role(j)));
                    let d = g.position(i).distance(&g.position(j));
                    assert!(kernel_probability(d, g.model()) > 0.0);
                }
            }
        }
    }

    #[test]
    fn build_requires_a_terminal() {
        let model = ConnectionModel::fixed(0.1, 0.2, 0.5).unwrap();
        assert!(ConnectivityGraph::build(3, 0, &model, Seed(0)).is_err());
        assert!(ConnectivityGraph::build(1, 0, &model, Seed(0)).is_err());
    }

    #[test]
    fn mean_relay_degree_near_expectation() {
        let model = ConnectionModel::fixed(0.1, 0.2, 0.5).unwrap();
        let g = ConnectivityGraph::build(200, 5, &model, Seed(7)).unwrap();
        let relay_set: Vec<bool> = (0..g.node_count()).map(|v| g.role(v) == Role::Relay).collect();
        let total: usize = g.relays().iter().map(|&v| g.neighbors(v).iter().filter(|&&u| relay_set[u]).count()).sum();
        let mean = total as f64 / 200.0;
        assert!((mean - 13.3).abs() <= 2.0, "mean relay degree {mean}");
    }

    #[test]
    fn file_round_trip_and_validation() {
        let model = ConnectionModel::fixed(0.2, 0.3, 0.5).unwrap();
        let g = ConnectivityGraph::build(30, 2, &model, Seed(4)).unwrap();
        let file = g.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: GraphFile<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(ConnectivityGraph::from_file(back).unwrap(), g);
        assert!(file.edges.windows(2).all(|w| w[0] < w[1]));

        let mut bad = file.clone();
        bad.edges.push([0, 31]);
        assert!(ConnectivityGraph::from_file(bad).is_err());
        let mut bad = file.clone();
        bad.edges.push([31, 32]);
        assert!(ConnectivityGraph::from_file(bad).is_err());
        let mut bad = file.clone();
        bad.terminals = vec![0];
        assert!(ConnectivityGraph::from_file(bad).is_err());
        let mut far = file;
        far.positions[1] = Point::new(0.0, 0.0);
        far.positions[2] = Point::new(1.0, 1.0);
        far.edges = vec![[1, 2]];
        assert!(ConnectivityGraph::from_file(far).is_err());
        assert!(matches!(model.kernel(), Kernel::Fixed { .. }));
    }
}
