//! Small hand-built connectivity graphs.
//!
//! All use an `r = r' = 1` fixed model with nodes inside `[0.2, 0.8]^2`, so
//! every listed link is geometrically admissible.

use crate::graph::{ConnectivityGraph, GraphFile, NodeId};
use crate::model::{ConnectionModel, Point};

fn fixture(
    n_relays: usize,
    terminals: &[NodeId],
    layout: &[(f64, f64)],
    edges: &[[NodeId; 2]],
) -> ConnectivityGraph<f64> {
    ConnectivityGraph::from_file(GraphFile {
        n_relays,
        terminals: terminals.to_vec(),
        positions: layout.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        edges: edges.to_vec(),
        model: ConnectionModel::fixed(1.0, 1.0, 1.0).expect("valid fixture model"),
        seed: 0,
    })
    .expect("valid fixture")
}

/// Bridge `X - A - B - Y` with `X` as source and `Y` as the terminal.
pub fn wheatstone() -> ConnectivityGraph<f64> {
    fixture(2, &[3], &[(0.2, 0.5), (0.4, 0.7), (0.6, 0.7), (0.8, 0.5)], &[[0, 1], [1, 2], [2, 3]])
}

/// Classic two-terminal butterfly: relays `a=1, b=2, c=3, d=4`, terminals
/// `5` and `6`; the shared link is `c - d`.
pub fn butterfly() -> ConnectivityGraph<f64> {
    fixture(
        4,
        &[5, 6],
        &[(0.5, 0.8), (0.3, 0.65), (0.7, 0.65), (0.5, 0.5), (0.5, 0.35), (0.3, 0.2), (0.7, 0.2)],
        &[[0, 1], [0, 2], [1, 3], [1, 5], [2, 3], [2, 6], [3, 4], [4, 5], [4, 6]],
    )
}

/// `s - r1 - r2 - r3 - t` with a chord `r1 - r3`.
pub fn path_with_chord() -> ConnectivityGraph<f64> {
    fixture(
        3,
        &[4],
        &[(0.2, 0.5), (0.35, 0.5), (0.5, 0.6), (0.65, 0.5), (0.8, 0.5)],
        &[[0, 1], [1, 2], [2, 3], [1, 3], [3, 4]],
    )
}

/// Source linked to two relays that are linked to each other and to the
/// terminal.
pub fn diamond() -> ConnectivityGraph<f64> {
    fixture(2, &[3], &[(0.2, 0.5), (0.5, 0.7), (0.5, 0.3), (0.8, 0.5)], &[[0, 1], [0, 2], [1, 2], [1, 3], [2, 3]])
}

/// `s - r - t`.
pub fn single_relay() -> ConnectivityGraph<f64> {
    fixture(1, &[2], &[(0.2, 0.5), (0.5, 0.5), (0.8, 0.5)], &[[0, 1], [1, 2]])
}

/// Four relays `x=1, y=2, u=3, v=4` and terminals `5, 6`. Every maximum flow
/// to terminal 5 must cross `x - y` as `x -> y`, and every maximum flow to
/// terminal 6 must cross it as `y -> x`.
pub fn opposing_flows() -> ConnectivityGraph<f64> {
    fixture(
        4,
        &[5, 6],
        &[(0.5, 0.8), (0.35, 0.55), (0.65, 0.55), (0.75, 0.35), (0.25, 0.35), (0.65, 0.2), (0.35, 0.2)],
        &[[0, 1], [0, 2], [1, 2], [2, 5], [2, 3], [3, 5], [1, 6], [1, 4], [4, 6]],
    )
}

/// Every fixture with its name.
pub fn all() -> Vec<(&'static str, ConnectivityGraph<f64>)> {
    vec![
        ("wheatstone", wheatstone()),
        ("butterfly", butterfly()),
        ("path-with-chord", path_with_chord()),
        ("diamond", diamond()),
        ("single-relay", single_relay()),
        ("opposing-flows", opposing_flows()),
    ]
}

pub fn by_name(name: &str) -> Option<ConnectivityGraph<f64>> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}
