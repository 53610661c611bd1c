//! Networks, probe paths, routing matrices and their bipartite views.
//!
//! Orientation is fixed throughout the crate: routing matrices have one row
//! per probe path and one column per link, and the bi-adjacency matrix of the
//! derived bipartite graph uses the same layout (rows = paths on the right
//! side, columns = links on the left side).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub mod io;
mod matrix;

pub use matrix::{BinaryMatrix, IntegerMatrix};

pub type NodeId = u32;
pub type LinkId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("link ids must be contiguous 0..{expected}, found {found}")]
    NonContiguousLinks { expected: usize, found: LinkId },
    #[error("duplicate link id {0}")]
    DuplicateLink(LinkId),
    #[error("link {link} is a self-loop on node {node}")]
    SelfLoop { link: LinkId, node: NodeId },
    #[error("boundary node {0} is not incident to any link")]
    IsolatedBoundary(NodeId),
    #[error("unknown link id {0}")]
    UnknownLink(LinkId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("path {path}: {reason}")]
    InvalidPath { path: usize, reason: String },
    #[error("no paths given")]
    NoPaths,
    #[error("path {0} contains no links")]
    EmptyPath(usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry ({row},{col}) = {value} is not 0/1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },
    #[error("matrix is not square: {rows} rows but row {row} has {cols} columns")]
    NotSquare {
        rows: usize,
        cols: usize,
        row: usize,
    },
    #[error("adjacency matrix must be symmetric and 0/1")]
    NotAdjacency,
    #[error("integer overflow while counting walks")]
    Overflow,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] IoErrorWrapper),
}

/// `std::io::Error` is not `PartialEq`; this keeps `NetError` comparable in tests.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct IoErrorWrapper(pub std::io::Error);

impl PartialEq for IoErrorWrapper {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind() == other.0.kind()
    }
}

impl Eq for IoErrorWrapper {}

impl From<std::io::Error> for NetError {
    fn from(e: std::io::Error) -> Self {
        NetError::Io(IoErrorWrapper(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub id: LinkId,
    pub a: NodeId,
    pub b: NodeId,
}

impl Link {
    pub fn touches(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }

    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.a == node {
            Some(self.b)
        } else if self.b == node {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Undirected multigraph with designated boundary nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    boundary: BTreeSet<NodeId>,
    incidence: BTreeMap<NodeId, Vec<LinkId>>,
}

impl Network {
    /// Builds a network from `(u, v, link_id)` triples. Link ids must form
    /// `0..n` in any order.
    pub fn new(
        edges: impl IntoIterator<Item = (NodeId, NodeId, LinkId)>,
        boundary: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, NetError> {
        let mut links: Vec<Link> = edges
            .into_iter()
            .map(|(a, b, id)| Link { id, a, b })
            .collect();
        links.sort_by_key(|l| l.id);
        for (expected, link) in links.iter().enumerate() {
            if link.id < expected {
                return Err(NetError::DuplicateLink(link.id));
            }
            if link.id != expected {
                return Err(NetError::NonContiguousLinks {
                    expected: links.len(),
                    found: link.id,
                });
            }
            if link.a == link.b {
                return Err(NetError::SelfLoop {
                    link: link.id,
                    node: link.a,
                });
            }
        }
        let mut incidence: BTreeMap<NodeId, Vec<LinkId>> = BTreeMap::new();
        for link in &links {
            incidence.entry(link.a).or_default().push(link.id);
            incidence.entry(link.b).or_default().push(link.id);
        }
        let boundary: BTreeSet<NodeId> = boundary.into_iter().collect();
        for &b in &boundary {
            if !incidence.contains_key(&b) {
                return Err(NetError::IsolatedBoundary(b));
            }
        }
        let nodes = incidence.keys().copied().collect();
        Ok(Network {
            nodes,
            links,
            boundary,
            incidence,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(id)
    }

    pub fn boundary(&self) -> &BTreeSet<NodeId> {
        &self.boundary
    }

    pub fn is_boundary(&self, node: NodeId) -> bool {
        self.boundary.contains(&node)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.incidence.contains_key(&node)
    }

    pub fn incident_links(&self, node: NodeId) -> &[LinkId] {
        self.incidence.get(&node).map_or(&[], |v| v.as_slice())
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.incident_links(node).len()
    }

    /// Neighbors of `node` with the connecting link, sorted by (neighbor, link).
    pub fn neighbors(&self, node: NodeId) -> Vec<(NodeId, LinkId)> {
        let mut out: Vec<(NodeId, LinkId)> = self
            .incident_links(node)
            .iter()
            .map(|&l| (self.links[l].other(node).expect("incident link"), l))
            .collect();
        out.sort_unstable();
        out
    }

    /// Lowest-id link joining `u` and `v`.
    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<LinkId> {
        self.incident_links(u)
            .iter()
            .copied()
            .filter(|&l| self.links[l].other(u) == Some(v))
            .min()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.first() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// Checks that `path` is a simple walk between two boundary nodes.
    /// The link list may be given in either traversal direction.
    pub fn validate_path(&self, path: &Path) -> Result<(), String> {
        let (s, t) = path.endpoints;
        for node in [s, t] {
            if !self.contains_node(node) {
                return Err(format!("endpoint {node} is not in the network"));
            }
            if !self.is_boundary(node) {
                return Err(format!("endpoint {node} is not a boundary node"));
            }
        }
        if path.links.is_empty() {
            return Err("path has no links".into());
        }
        let mut seen = BTreeSet::new();
        for &l in &path.links {
            if l >= self.link_count() {
                return Err(format!("unknown link id {l}"));
            }
            if !seen.insert(l) {
                return Err(format!("link {l} repeated"));
            }
        }
        let walk = |from: NodeId, to: NodeId| -> Result<(), String> {
            let mut cur = from;
            for (k, &l) in path.links.iter().enumerate() {
                cur = self.links[l].other(cur).ok_or_else(|| {
                    format!("link {l} at position {k} does not continue from node {cur}")
                })?;
            }
            if cur == to {
                Ok(())
            } else {
                Err(format!("walk ends at node {cur}, expected {to}"))
            }
        };
        walk(s, t).or_else(|first| walk(t, s).map_err(|_| first))
    }
}

/// A probe path: two boundary endpoints and the ordered links between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub endpoints: (NodeId, NodeId),
    pub links: Vec<LinkId>,
}

impl Path {
    pub fn new(endpoints: (NodeId, NodeId), links: Vec<LinkId>) -> Self {
        Path { endpoints, links }
    }

    /// Path along a node sequence, using the lowest-id link between each
    /// consecutive pair.
    pub fn from_nodes(network: &Network, nodes: &[NodeId]) -> Result<Self, NetError> {
        if nodes.len() < 2 {
            return Err(NetError::InvalidPath {
                path: 0,
                reason: "a path needs at least two nodes".into(),
            });
        }
        let links = nodes
            .windows(2)
            .map(|w| {
                network
                    .link_between(w[0], w[1])
                    .ok_or_else(|| NetError::InvalidPath {
                        path: 0,
                        reason: format!("nodes {} and {} are not adjacent", w[0], w[1]),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Path {
            endpoints: (nodes[0], nodes[nodes.len() - 1]),
            links,
        })
    }
}

/// Binary r×n routing matrix together with the link lists it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingMatrix {
    entries: BinaryMatrix,
    paths: Vec<Vec<LinkId>>,
    endpoints: Option<Vec<(NodeId, NodeId)>>,
}

impl RoutingMatrix {
    /// Routing matrix over `n` links from raw link lists (no topology check).
    pub fn from_link_lists(n: usize, paths: Vec<Vec<LinkId>>) -> Result<Self, NetError> {
        if paths.is_empty() {
            return Err(NetError::NoPaths);
        }
        let mut entries = BinaryMatrix::zeros(paths.len(), n);
        for (i, p) in paths.iter().enumerate() {
            if p.is_empty() {
                return Err(NetError::EmptyPath(i));
            }
            for &l in p {
                if l >= n {
                    return Err(NetError::UnknownLink(l));
                }
                if entries.get(i, l) {
                    return Err(NetError::InvalidPath {
                        path: i,
                        reason: format!("link {l} repeated"),
                    });
                }
                entries.set(i, l, true);
            }
        }
        Ok(RoutingMatrix {
            entries,
            paths,
            endpoints: None,
        })
    }

    /// Routing matrix from dense 0/1 rows; link lists are the ascending
    /// column indices of each row.
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, NetError> {
        if rows.is_empty() {
            return Err(NetError::NoPaths);
        }
        let entries = BinaryMatrix::from_rows(rows)?;
        let paths: Vec<Vec<LinkId>> = (0..entries.rows())
            .map(|i| (0..entries.cols()).filter(|&j| entries.get(i, j)).collect())
            .collect();
        if let Some(i) = paths.iter().position(|p| p.is_empty()) {
            return Err(NetError::EmptyPath(i));
        }
        Ok(RoutingMatrix {
            entries,
            paths,
            endpoints: None,
        })
    }

    pub fn entries(&self) -> &BinaryMatrix {
        &self.entries
    }

    pub fn paths(&self) -> &[Vec<LinkId>] {
        &self.paths
    }

    pub fn endpoints(&self) -> Option<&[(NodeId, NodeId)]> {
        self.endpoints.as_deref()
    }

    /// Number of paths (rows).
    pub fn path_count(&self) -> usize {
        self.entries.rows()
    }

    /// Number of links (columns).
    pub fn link_count(&self) -> usize {
        self.entries.cols()
    }

    #[inline]
    pub fn get(&self, path: usize, link: LinkId) -> bool {
        self.entries.get(path, link)
    }

    /// Number of paths through each link.
    pub fn link_degrees(&self) -> Vec<usize> {
        self.entries.col_sums()
    }

    /// Links not traversed by any path.
    pub fn uncovered_links(&self) -> Vec<LinkId> {
        self.link_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(j, _)| j)
            .collect()
    }

    /// Number of paths through both `i` and `j`.
    pub fn shared_paths(&self, i: LinkId, j: LinkId) -> usize {
        (0..self.path_count())
            .filter(|&p| self.get(p, i) && self.get(p, j))
            .count()
    }

    /// Sub-matrix keeping the given rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> Result<RoutingMatrix, NetError> {
        if rows.is_empty() {
            return Err(NetError::NoPaths);
        }
        Ok(RoutingMatrix {
            entries: self.entries.select_rows(rows),
            paths: rows.iter().map(|&i| self.paths[i].clone()).collect(),
            endpoints: self
                .endpoints
                .as_ref()
                .map(|e| rows.iter().map(|&i| e[i]).collect()),
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.entries.mul_vec(x)
    }
}

/// Two-sided graph: left = links, right = paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<String>,
    right: Vec<String>,
    biadjacency: BinaryMatrix,
}

impl BipartiteGraph {
    /// `biadjacency` has one row per right node and one column per left node.
    pub fn new(left: Vec<String>, right: Vec<String>, biadjacency: BinaryMatrix) -> Self {
        assert_eq!(biadjacency.cols(), left.len(), "one column per left node");
        assert_eq!(biadjacency.rows(), right.len(), "one row per right node");
        BipartiteGraph {
            left,
            right,
            biadjacency,
        }
    }

    pub fn from_biadjacency(biadjacency: BinaryMatrix) -> Self {
        let left = (1..=biadjacency.cols()).map(|j| format!("l{j}")).collect();
        let right = (1..=biadjacency.rows()).map(|i| format!("P{i}")).collect();
        Self::new(left, right, biadjacency)
    }

    pub fn left(&self) -> &[String] {
        &self.left
    }

    pub fn right(&self) -> &[String] {
        &self.right
    }

    pub fn biadjacency(&self) -> &BinaryMatrix {
        &self.biadjacency
    }

    pub fn edge_count(&self) -> usize {
        self.biadjacency.ones()
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        self.biadjacency.col_sums()
    }

    /// Common left degree, or `None` if the left side is irregular or empty.
    pub fn left_regular_degree(&self) -> Option<usize> {
        let degs = self.left_degrees();
        let first = *degs.first()?;
        degs.iter().all(|&d| d == first).then_some(first)
    }

    /// Right-side neighbors of left node `j`.
    pub fn neighbors_of_left(&self, j: usize) -> Vec<usize> {
        (0..self.biadjacency.rows())
            .filter(|&i| self.biadjacency.get(i, j))
            .collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for j in 0..self.left.len() {
            for i in self.neighbors_of_left(j) {
                out.push((j, i));
            }
        }
        out
    }
}

/// Routing matrix of `paths` on `network`, after validating every path.
pub fn build_routing_matrix(network: &Network, paths: &[Path]) -> Result<RoutingMatrix, NetError> {
    if paths.is_empty() {
        return Err(NetError::NoPaths);
    }
    for (i, p) in paths.iter().enumerate() {
        if let Some(&l) = p.links.iter().find(|&&l| l >= network.link_count()) {
            return Err(NetError::UnknownLink(l));
        }
        network
            .validate_path(p)
            .map_err(|reason| NetError::InvalidPath { path: i, reason })?;
    }
    let mut routing = RoutingMatrix::from_link_lists(
        network.link_count(),
        paths.iter().map(|p| p.links.clone()).collect(),
    )?;
    routing.endpoints = Some(paths.iter().map(|p| p.endpoints).collect());
    Ok(routing)
}

pub fn to_bipartite(routing: &RoutingMatrix) -> BipartiteGraph {
    BipartiteGraph::from_biadjacency(routing.entries().clone())
}

/// Adjacency matrix of a bipartite graph, left nodes first:
/// `[[0, Bᵗ], [B, 0]]` where `B` is the (paths × links) bi-adjacency.
pub fn adjacency_from_biadjacency(bg: &BipartiteGraph) -> IntegerMatrix {
    let nl = bg.left().len();
    let nr = bg.right().len();
    let labels = bg.left().iter().chain(bg.right()).cloned().collect();
    let mut t = IntegerMatrix::zeros(nl + nr, labels);
    for (j, i) in bg.edges() {
        t.set(j, nl + i, 1);
        t.set(nl + i, j, 1);
    }
    t
}

/// `adjacencyᵏ`: entry (i, j) is the number of walks of length `k` from i
/// to j. `k = 0` yields the identity.
pub fn count_walks(adjacency: &IntegerMatrix, k: u32) -> Result<IntegerMatrix, NetError> {
    if !adjacency.is_symmetric() || !adjacency.is_zero_one() {
        return Err(NetError::NotAdjacency);
    }
    let labels = adjacency.labels().to_vec();
    let mut result = IntegerMatrix::identity(adjacency.dim(), labels);
    let mut base = adjacency.clone();
    let mut e = k;
    // square-and-multiply
    while e > 0 {
        if e & 1 == 1 {
            result = result.checked_mul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.checked_mul(&base)?;
        }
    }
    Ok(result)
}

/// `RᵗR`: off-diagonal (i, j) counts paths through both links, the diagonal
/// holds each link's path count.
pub fn common_neighbor_matrix(routing: &RoutingMatrix) -> IntegerMatrix {
    let n = routing.link_count();
    let labels = (1..=n).map(|j| format!("l{j}")).collect();
    let mut m = IntegerMatrix::zeros(n, labels);
    for (i, row) in routing.entries().gram().into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}
