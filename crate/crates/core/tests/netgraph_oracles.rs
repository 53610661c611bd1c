use nettomo::fixtures;
use nettomo::netgraph::{
    adjacency_from_biadjacency, build_routing_matrix, common_neighbor_matrix, count_walks,
    to_bipartite, BinaryMatrix, IntegerMatrix, Network, Path, RoutingMatrix,
};
use proptest::prelude::*;

/// Walks of length `k` from `i` to `j`, by depth-first enumeration.
fn dfs_walks(adj: &[Vec<u64>], i: usize, j: usize, k: u32) -> u64 {
    if k == 0 {
        return u64::from(i == j);
    }
    (0..adj.len())
        .filter(|&v| adj[i][v] == 1)
        .map(|v| dfs_walks(adj, v, j, k - 1))
        .sum()
}

/// Paths containing both links, by intersecting link lists.
fn shared(paths: &[Vec<usize>], i: usize, j: usize) -> u64 {
    paths
        .iter()
        .filter(|p| p.contains(&i) && p.contains(&j))
        .count() as u64
}

#[test]
fn probe_paths_build_fixture_matrices() {
    let r = build_routing_matrix(
        &fixtures::five_link_network(),
        &fixtures::five_link_probe_paths(),
    )
    .unwrap();
    assert_eq!(r.entries(), fixtures::five_link_routing().entries());
    let r = build_routing_matrix(
        &fixtures::eight_link_network(),
        &fixtures::eight_link_paths(),
    )
    .unwrap();
    assert_eq!(r.entries(), fixtures::eight_link_routing().entries());
}

#[test]
fn line_network_single_path_is_all_ones() {
    let net = Network::new([(1, 2, 0), (2, 3, 1), (3, 4, 2)], [1, 4]).unwrap();
    let r = build_routing_matrix(&net, &[Path::new((1, 4), vec![0, 1, 2])]).unwrap();
    assert_eq!(r.entries().to_rows(), vec![vec![1, 1, 1]]);
}

#[test]
fn bad_paths_rejected() {
    let net = fixtures::five_link_network();
    assert!(build_routing_matrix(&net, &[Path::new((2, 6), vec![0, 9])]).is_err());
    // links 0 and 3 do not meet
    assert!(build_routing_matrix(&net, &[Path::new((2, 6), vec![0, 3])]).is_err());
    assert!(build_routing_matrix(&net, &[]).is_err());
}

#[test]
fn bipartite_views() {
    let bg = to_bipartite(&fixtures::five_link_routing());
    assert_eq!(
        (bg.left().len(), bg.right().len(), bg.edge_count()),
        (5, 4, 10)
    );
    let id = RoutingMatrix::from_dense(&[[1u8, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
    assert_eq!(to_bipartite(&id).edge_count(), 3);
    let mut degrees = to_bipartite(&fixtures::six_link_triangle_routing()).left_degrees();
    degrees.sort_unstable();
    degrees.dedup();
    assert_eq!(degrees, vec![1, 2]);
}

#[test]
fn adjacency_blocks_match_edge_list() {
    let one =
        adjacency_from_biadjacency(&to_bipartite(&RoutingMatrix::from_dense(&[[1u8]]).unwrap()));
    assert_eq!(one.to_rows(), vec![vec![0, 1], vec![1, 0]]);

    let bg = to_bipartite(&fixtures::five_link_routing());
    let t = adjacency_from_biadjacency(&bg);
    assert_eq!(t.dim(), 9);
    assert!(t.is_symmetric());
    let mut expected = vec![vec![0u64; 9]; 9];
    for (path, link) in (0..4).flat_map(|p| (0..5).map(move |l| (p, l))) {
        if bg.biadjacency().get(path, link) {
            expected[link][5 + path] = 1;
            expected[5 + path][link] = 1;
        }
    }
    assert_eq!(t.to_rows(), expected);

    let zero = adjacency_from_biadjacency(&nettomo::netgraph::BipartiteGraph::from_biadjacency(
        BinaryMatrix::zeros(2, 3),
    ));
    assert!(zero.to_rows().iter().flatten().all(|&v| v == 0));
}

#[test]
fn walk_graph_powers() {
    let t = fixtures::four_node_walk_graph();
    let t3 = count_walks(&t, 3).unwrap();
    let expected = vec![
        vec![2, 4, 3, 1],
        vec![4, 2, 4, 3],
        vec![3, 4, 2, 1],
        vec![1, 3, 1, 0],
    ];
    assert_eq!(t3.to_rows(), expected);
    assert_eq!(t3.get(0, 3), 1);
    assert_eq!(count_walks(&t, 1).unwrap().to_rows(), t.to_rows());
    let rows = t.to_rows();
    let t2 = count_walks(&t, 2).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(t2.get(i, j), dfs_walks(&rows, i, j, 2));
        }
    }
    assert_eq!(
        count_walks(&t, 0).unwrap().to_rows(),
        (0..4)
            .map(|i| (0..4).map(|j| u64::from(i == j)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    );
}

#[test]
fn common_neighbors_of_fixtures() {
    let expected = vec![
        vec![2, 1, 1, 1, 0],
        vec![1, 2, 1, 0, 1],
        vec![1, 1, 2, 1, 1],
        vec![1, 0, 1, 2, 1],
        vec![0, 1, 1, 1, 2],
    ];
    assert_eq!(
        common_neighbor_matrix(&fixtures::five_link_routing()).to_rows(),
        expected
    );
    let id = RoutingMatrix::from_dense(&[[1u8, 0], [0, 1]]).unwrap();
    assert_eq!(
        common_neighbor_matrix(&id).to_rows(),
        vec![vec![1, 0], vec![0, 1]]
    );
    let r = fixtures::eight_link_routing();
    let c = common_neighbor_matrix(&r);
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(c.get(i, j), shared(r.paths(), i, j));
        }
    }
}

fn adjacency(max: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(0u64..=1, n * (n - 1) / 2).prop_map(move |upper| {
            let mut a = vec![vec![0u64; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    a[i][j] = v;
                    a[j][i] = v;
                }
            }
            a
        })
    })
}

fn routing(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, n)| prop::collection::vec(prop::collection::vec(0u8..=1, n), r))
        .prop_filter("nonempty rows", |rows| rows.iter().all(|r| r.contains(&1)))
}

proptest! {
    #[test]
    fn walk_counts_match_enumeration(a in adjacency(6), k in 1u32..=4) {
        let t = IntegerMatrix::from_rows(&a).unwrap();
        let tk = count_walks(&t, k).unwrap();
        for i in 0..a.len() {
            for j in 0..a.len() {
                prop_assert_eq!(tk.get(i, j), dfs_walks(&a, i, j, k));
            }
        }
        prop_assert!(tk.is_symmetric());
    }

    #[test]
    fn common_neighbor_invariants(rows in routing(8, 7)) {
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let c = common_neighbor_matrix(&r);
        prop_assert!(c.is_symmetric());
        let sums = r.entries().col_sums();
        for i in 0..r.link_count() {
            prop_assert_eq!(c.get(i, i), sums[i] as u64);
            for j in 0..r.link_count() {
                prop_assert_eq!(c.get(i, j), shared(r.paths(), i, j));
                prop_assert!(c.get(i, j) <= c.get(i, i).min(c.get(j, j)));
            }
        }
    }

    #[test]
    fn bipartite_round_trip(rows in routing(8, 7)) {
        let r = RoutingMatrix::from_dense(&rows).unwrap();
        let bg = to_bipartite(&r);
        prop_assert_eq!(bg.biadjacency(), r.entries());
        prop_assert_eq!(bg.edge_count(), r.entries().ones());
    }
}
