//! Small hand-built reference networks used by tests, docs and the CLI demo.
//!
//! Node ids are 1-based; link ids are 0-based (link `l1` is id 0).

use crate::netgraph::{IntegerMatrix, Network, Path, RoutingMatrix};

/// Four boundary nodes (1, 2, 5, 6), two interior nodes (3, 4), five links.
pub fn five_link_network() -> Network {
    Network::new(
        [(2, 3, 0), (1, 3, 1), (3, 4, 2), (4, 6, 3), (4, 5, 4)],
        [1, 2, 5, 6],
    )
    .expect("valid fixture")
}

/// Four probe paths on [`five_link_network`] that certify as an expander.
pub fn five_link_probe_paths() -> Vec<Path> {
    vec![
        Path::new((2, 6), vec![0, 2, 3]),
        Path::new((1, 5), vec![1, 2, 4]),
        Path::new((1, 2), vec![1, 0]),
        Path::new((5, 6), vec![4, 3]),
    ]
}

/// All six boundary-to-boundary paths of [`five_link_network`].
pub fn five_link_candidate_paths() -> Vec<Path> {
    vec![
        Path::new((2, 6), vec![0, 2, 3]),
        Path::new((2, 5), vec![0, 2, 4]),
        Path::new((1, 6), vec![1, 2, 3]),
        Path::new((1, 5), vec![1, 2, 4]),
        Path::new((1, 2), vec![1, 0]),
        Path::new((5, 6), vec![4, 3]),
    ]
}

pub fn five_link_routing() -> RoutingMatrix {
    RoutingMatrix::from_dense(&[
        [1u8, 0, 1, 1, 0],
        [0, 1, 1, 0, 1],
        [1, 1, 0, 0, 0],
        [0, 0, 0, 1, 1],
    ])
    .expect("valid fixture")
}

pub fn five_link_candidate_routing() -> RoutingMatrix {
    RoutingMatrix::from_dense(&[
        [1u8, 0, 1, 1, 0],
        [1, 0, 1, 0, 1],
        [0, 1, 1, 1, 0],
        [0, 1, 1, 0, 1],
        [1, 1, 0, 0, 0],
        [0, 0, 0, 1, 1],
    ])
    .expect("valid fixture")
}

/// Six boundary nodes (1, 3, 4, 6, 7, 9), three interior nodes (2, 5, 8),
/// eight links.
pub fn eight_link_network() -> Network {
    Network::new(
        [
            (1, 2, 0),
            (2, 3, 1),
            (2, 5, 2),
            (5, 4, 3),
            (5, 6, 4),
            (5, 8, 5),
            (8, 7, 6),
            (8, 9, 7),
        ],
        [1, 3, 4, 6, 7, 9],
    )
    .expect("valid fixture")
}

pub fn eight_link_paths() -> Vec<Path> {
    vec![
        Path::new((1, 3), vec![0, 1]),
        Path::new((1, 4), vec![0, 2, 3]),
        Path::new((3, 6), vec![1, 2, 4]),
        Path::new((4, 7), vec![3, 5, 6]),
        Path::new((6, 9), vec![4, 5, 7]),
        Path::new((7, 9), vec![6, 7]),
    ]
}

pub fn eight_link_routing() -> RoutingMatrix {
    RoutingMatrix::from_dense(&[
        [1u8, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 1, 1, 0, 0, 0, 0],
        [0, 1, 1, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 1, 0],
        [0, 0, 0, 0, 1, 1, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 1],
    ])
    .expect("valid fixture")
}

/// Three boundary nodes (1, 2, 3) around an interior triangle (4, 5, 6).
/// Its routing matrix mixes link degrees 1 and 2.
pub fn six_link_triangle_network() -> Network {
    Network::new(
        [
            (1, 4, 0),
            (4, 5, 1),
            (4, 6, 2),
            (5, 6, 3),
            (5, 2, 4),
            (6, 3, 5),
        ],
        [1, 2, 3],
    )
    .expect("valid fixture")
}

pub fn six_link_triangle_paths() -> Vec<Path> {
    vec![
        Path::new((1, 2), vec![0, 1, 4]),
        Path::new((1, 3), vec![0, 2, 5]),
        Path::new((2, 3), vec![4, 3, 5]),
    ]
}

pub fn six_link_triangle_routing() -> RoutingMatrix {
    RoutingMatrix::from_dense(&[[1u8, 1, 0, 0, 1, 0], [1, 0, 1, 0, 0, 1], [0, 0, 0, 1, 1, 1]])
        .expect("valid fixture")
}

/// Adjacency matrix of a 4-node graph with edges 1-2, 1-3, 2-3, 2-4.
pub fn four_node_walk_graph() -> IntegerMatrix {
    IntegerMatrix::from_rows(&[
        vec![0, 1, 1, 0],
        vec![1, 0, 1, 1],
        vec![1, 1, 0, 0],
        vec![0, 1, 0, 0],
    ])
    .expect("valid fixture")
    .with_labels((1..=4).map(|i| format!("n{i}")).collect())
}
