//! Random Internet-like topologies, shortest-path probe routing and pruning.
//!
//! Generation is linear preferential attachment with an additive
//! attractiveness offset (the Dorogovtsev-Mendes-Samukhin variant): the core
//! starts as a triangle and every new core node links to [`LINKS_PER_NODE`]
//! distinct existing nodes, choosing node `i` with probability proportional
//! to `deg(i) + a`. With `m` links per node the degree tail follows
//! `P(k) ~ k^-(3 + a/m)`, so `a = m(γ - 3)` targets exponent `γ`. Boundary
//! nodes are then attached as degree-1 stubs. All randomness comes from
//! `ChaCha8Rng` seeded with the config seed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{
    build_routing_matrix, LinkId, NetError, Network, NodeId, Path, RoutingMatrix,
};

/// Links added by each new core node.
pub const LINKS_PER_NODE: usize = 2;
/// Smallest allowed `deg + a` for a core node of minimum degree. Exponents
/// below `2 + MIN_WEIGHT / LINKS_PER_NODE` are clamped to that value.
pub const MIN_WEIGHT: f64 = 0.05;
pub const MAX_ATTEMPTS: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum TopoError {
    #[error("invalid topology config: {0}")]
    InvalidConfig(String),
    #[error("no connected topology after {0} attempts")]
    Disconnected(u32),
    #[error("boundary nodes {from} and {to} are not connected")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("network needs at least two boundary nodes")]
    TooFewBoundary,
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopoConfig {
    pub nodes: usize,
    pub exponent: f64,
    pub boundary: usize,
    pub seed: u64,
}

impl Default for TopoConfig {
    fn default() -> Self {
        TopoConfig {
            nodes: 200,
            exponent: 2.1,
            boundary: 10,
            seed: 1,
        }
    }
}

impl TopoConfig {
    /// Node count minus boundary count; at least one core node is required.
    pub fn core_nodes(&self) -> usize {
        self.nodes.saturating_sub(self.boundary)
    }

    pub fn validate(&self) -> Result<(), TopoError> {
        if self.boundary < 2 {
            return Err(TopoError::InvalidConfig(format!(
                "boundary count {} is below 2",
                self.boundary
            )));
        }
        if self.nodes <= self.boundary {
            return Err(TopoError::InvalidConfig(format!(
                "node count {} leaves no core nodes for {} boundary nodes",
                self.nodes, self.boundary
            )));
        }
        if !(self.exponent.is_finite() && self.exponent > 1.0) {
            return Err(TopoError::InvalidConfig(format!(
                "exponent {} must exceed 1",
                self.exponent
            )));
        }
        if u32::try_from(self.nodes).is_err() {
            return Err(TopoError::InvalidConfig(format!(
                "node count {} too large",
                self.nodes
            )));
        }
        Ok(())
    }

    /// Attractiveness offset `a` after clamping.
    pub fn attractiveness(&self) -> f64 {
        let m = LINKS_PER_NODE as f64;
        (m * (self.exponent - 3.0)).max(MIN_WEIGHT - m)
    }
}

/// Core nodes are `0..core`, boundary stubs `core..nodes`.
pub fn generate_topology(config: &TopoConfig) -> Result<Network, TopoError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..MAX_ATTEMPTS {
        let net = draw(config, &mut rng)?;
        if net.is_connected() {
            return Ok(net);
        }
    }
    Err(TopoError::Disconnected(MAX_ATTEMPTS))
}

fn draw(config: &TopoConfig, rng: &mut ChaCha8Rng) -> Result<Network, TopoError> {
    let core = config.core_nodes();
    let a = config.attractiveness();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut degree = vec![0usize; core];
    let connect = |u: usize, v: usize, edges: &mut Vec<(NodeId, NodeId)>, degree: &mut [usize]| {
        edges.push((u as NodeId, v as NodeId));
        degree[u] += 1;
        degree[v] += 1;
    };
    let seed_size = core.min(LINKS_PER_NODE + 1);
    for u in 0..seed_size {
        for v in u + 1..seed_size {
            connect(u, v, &mut edges, &mut degree);
        }
    }
    for new in seed_size..core {
        let mut chosen: Vec<usize> = Vec::with_capacity(LINKS_PER_NODE);
        for _ in 0..LINKS_PER_NODE {
            let weight = |i: usize| {
                if chosen.contains(&i) {
                    0.0
                } else {
                    (degree[i] as f64 + a).max(0.0)
                }
            };
            let total: f64 = (0..new).map(weight).sum();
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for i in 0..new {
                let w = weight(i);
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            chosen.push(pick.expect("positive weight remains"));
        }
        for &t in &chosen {
            connect(new, t, &mut edges, &mut degree);
        }
    }
    // partial Fisher-Yates over the core; wraps around when stubs outnumber it
    let mut pool: Vec<usize> = (0..core).collect();
    let mut boundary = Vec::with_capacity(config.boundary);
    for b in 0..config.boundary {
        let k = b % core;
        if k == 0 && b > 0 {
            pool = (0..core).collect();
        }
        let j = rng.random_range(k..core);
        pool.swap(k, j);
        let stub = (core + b) as NodeId;
        edges.push((pool[k] as NodeId, stub));
        boundary.push(stub);
    }
    let net = Network::new(
        edges.into_iter().enumerate().map(|(id, (u, v))| (u, v, id)),
        boundary,
    )?;
    Ok(net)
}

/// Hop distances to `target`; unreachable nodes are absent.
pub fn bfs_distances(network: &Network, target: NodeId) -> BTreeMap<NodeId, usize> {
    let mut dist = BTreeMap::from([(target, 0usize)]);
    let mut queue = VecDeque::from([target]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for (v, _) in network.neighbors(u) {
            dist.entry(v).or_insert_with(|| {
                queue.push_back(v);
                d + 1
            });
        }
    }
    dist
}

/// One hop-count shortest path per unordered boundary pair `(s, t)`, `s < t`,
/// in ascending pair order. Among shortest paths the lexicographically
/// smallest node sequence from `s` wins; parallel links resolve to the
/// lowest link id.
pub fn shortest_path_routing(network: &Network) -> Result<Vec<Path>, TopoError> {
    let boundary: Vec<NodeId> = network.boundary().iter().copied().collect();
    if boundary.len() < 2 {
        return Err(TopoError::TooFewBoundary);
    }
    let dists: Vec<BTreeMap<NodeId, usize>> = boundary
        .iter()
        .map(|&t| bfs_distances(network, t))
        .collect();
    let mut paths = Vec::new();
    for (i, &s) in boundary.iter().enumerate() {
        for (j, &t) in boundary.iter().enumerate().skip(i + 1) {
            let dist = &dists[j];
            let mut d = *dist
                .get(&s)
                .ok_or(TopoError::Unreachable { from: s, to: t })?;
            let mut nodes = vec![s];
            let mut cur = s;
            while d > 0 {
                cur = network
                    .neighbors(cur)
                    .into_iter()
                    .map(|(v, _)| v)
                    .find(|v| dist.get(v) == Some(&(d - 1)))
                    .expect("bfs predecessor exists");
                nodes.push(cur);
                d -= 1;
            }
            paths.push(Path::from_nodes(network, &nodes)?);
        }
    }
    Ok(paths)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum PruneEvent {
    /// Link on no path.
    RemoveLink { link: LinkId, a: NodeId, b: NodeId },
    /// Node left without links.
    RemoveNode { node: NodeId },
    /// Interior degree-2 node whose two links merge into one.
    Contract {
        node: NodeId,
        links: [LinkId; 2],
        into: LinkId,
    },
    /// Final renumbering `from -> to` of surviving links.
    Relabel { from: LinkId, to: LinkId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub network: Network,
    pub paths: Vec<Path>,
    pub routing: RoutingMatrix,
    pub config: Option<TopoConfig>,
    pub log: Vec<PruneEvent>,
    /// Input link ids merged into each output link, ascending.
    pub link_origin: Vec<Vec<LinkId>>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    config: &'a Option<TopoConfig>,
    links: usize,
    paths: usize,
    link_origin: &'a [Vec<LinkId>],
    log: &'a [PruneEvent],
}

impl GeneratedInstance {
    pub fn provenance_json(&self) -> String {
        let p = Provenance {
            config: &self.config,
            links: self.network.link_count(),
            paths: self.paths.len(),
            link_origin: &self.link_origin,
            log: &self.log,
        };
        let mut s = serde_json::to_string_pretty(&p).expect("serializable");
        s.push('\n');
        s
    }
}

/// Removes links on no path and nodes left isolated, contracts interior
/// degree-2 nodes, and renumbers the surviving links `0..n` in order of
/// their smallest original id. Node ids are kept.
pub fn prune(network: &Network, paths: &[Path]) -> Result<GeneratedInstance, TopoError> {
    build_routing_matrix(network, paths)?;
    let mut log = Vec::new();
    let covered: BTreeSet<LinkId> = paths.iter().flat_map(|p| p.links.iter().copied()).collect();
    // working link table keyed by a representative id
    let mut links: BTreeMap<LinkId, (NodeId, NodeId, Vec<LinkId>)> = BTreeMap::new();
    for l in network.links() {
        if covered.contains(&l.id) {
            links.insert(l.id, (l.a, l.b, vec![l.id]));
        } else {
            log.push(PruneEvent::RemoveLink {
                link: l.id,
                a: l.a,
                b: l.b,
            });
        }
    }
    let mut incidence: BTreeMap<NodeId, BTreeSet<LinkId>> = BTreeMap::new();
    for (&id, &(a, b, _)) in &links {
        incidence.entry(a).or_default().insert(id);
        incidence.entry(b).or_default().insert(id);
    }
    for &node in network.nodes() {
        if !incidence.contains_key(&node) {
            log.push(PruneEvent::RemoveNode { node });
        }
    }
    let mut paths: Vec<Path> = paths.to_vec();
    let candidates: Vec<NodeId> = incidence.keys().copied().collect();
    for v in candidates {
        if network.is_boundary(v) || incidence[&v].len() != 2 {
            continue;
        }
        let pair: Vec<LinkId> = incidence[&v].iter().copied().collect();
        let (l1, l2) = (pair[0], pair[1]);
        let u = other_end(&links[&l1], v);
        let w = other_end(&links[&l2], v);
        if u == w {
            continue;
        }
        let (_, _, o2) = links.remove(&l2).expect("live link");
        let (_, _, mut o1) = links.remove(&l1).expect("live link");
        o1.extend(o2);
        o1.sort_unstable();
        links.insert(l1, (u, w, o1));
        incidence.remove(&v);
        incidence.get_mut(&w).expect("endpoint").remove(&l2);
        incidence.get_mut(&w).expect("endpoint").insert(l1);
        for p in &mut paths {
            if let Some(pos) = p.links.iter().position(|&l| l == l1 || l == l2) {
                p.links.remove(pos + 1);
                p.links[pos] = l1;
            }
        }
        log.push(PruneEvent::Contract {
            node: v,
            links: [l1, l2],
            into: l1,
        });
    }
    let renumber: BTreeMap<LinkId, LinkId> = links
        .keys()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    for (&from, &to) in &renumber {
        if from != to {
            log.push(PruneEvent::Relabel { from, to });
        }
    }
    for p in &mut paths {
        for l in &mut p.links {
            *l = renumber[l];
        }
    }
    let boundary: Vec<NodeId> = network
        .boundary()
        .iter()
        .copied()
        .filter(|b| incidence.contains_key(b))
        .collect();
    let link_origin = links.values().map(|(_, _, o)| o.clone()).collect();
    let reduced = Network::new(
        links.iter().map(|(old, &(a, b, _))| (a, b, renumber[old])),
        boundary,
    )?;
    let routing = build_routing_matrix(&reduced, &paths)?;
    Ok(GeneratedInstance {
        network: reduced,
        paths,
        routing,
        config: None,
        log,
        link_origin,
    })
}

fn other_end(link: &(NodeId, NodeId, Vec<LinkId>), v: NodeId) -> NodeId {
    if link.0 == v {
        link.1
    } else {
        link.0
    }
}

/// Generate, route and prune in one step.
pub fn generate_instance(config: &TopoConfig) -> Result<GeneratedInstance, TopoError> {
    let network = generate_topology(config)?;
    let paths = shortest_path_routing(&network)?;
    let mut instance = prune(&network, &paths)?;
    instance.config = Some(*config);
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cfg(nodes: usize, boundary: usize, seed: u64) -> TopoConfig {
        TopoConfig {
            nodes,
            exponent: 2.1,
            boundary,
            seed,
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let a = generate_topology(&cfg(50, 5, 1)).unwrap();
        assert_eq!(a, generate_topology(&cfg(50, 5, 1)).unwrap());
        assert_ne!(a, generate_topology(&cfg(50, 5, 2)).unwrap());
        assert_eq!(a.nodes().len(), 50);
        assert!(a.is_connected());
        assert!(a.boundary().iter().all(|&b| a.degree(b) == 1));
    }

    #[test]
    fn bad_configs_rejected() {
        for c in [
            cfg(5, 1, 0),
            cfg(4, 4, 0),
            TopoConfig {
                exponent: 1.0,
                ..cfg(10, 2, 0)
            },
        ] {
            assert!(matches!(
                generate_topology(&c),
                Err(TopoError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn smallest_instance_is_a_line() {
        let net = generate_topology(&cfg(3, 2, 9)).unwrap();
        assert_eq!(net.link_count(), 2);
        let paths = shortest_path_routing(&net).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].links.len(), 2);
        let inst = prune(&net, &paths).unwrap();
        assert_eq!(inst.network.link_count(), 1);
        assert_eq!(inst.link_origin, vec![vec![0, 1]]);
    }

    #[test]
    fn line_of_three_links() {
        let net = Network::new([(1, 2, 0), (2, 3, 1), (3, 4, 2)], [1, 4]).unwrap();
        let paths = shortest_path_routing(&net).unwrap();
        assert_eq!(paths, vec![Path::new((1, 4), vec![0, 1, 2])]);
    }

    #[test]
    fn five_link_network_routes_to_candidate_paths() {
        let paths = shortest_path_routing(&fixtures::five_link_network()).unwrap();
        let got: BTreeSet<BTreeSet<LinkId>> = paths
            .iter()
            .map(|p| p.links.iter().copied().collect())
            .collect();
        let want: BTreeSet<BTreeSet<LinkId>> = fixtures::five_link_candidate_paths()
            .iter()
            .map(|p| p.links.iter().copied().collect())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn ties_take_smallest_node_sequence() {
        // square 1-2-4 and 1-3-4
        let net = Network::new([(1, 3, 0), (3, 4, 1), (1, 2, 2), (2, 4, 3)], [1, 4]).unwrap();
        let paths = shortest_path_routing(&net).unwrap();
        assert_eq!(paths[0].links, vec![2, 3]);
    }

    #[test]
    fn spur_removed_and_chain_contracted() {
        // boundary 1 and 4, chain 1-2-3-4, spur 2-5
        let net = Network::new([(1, 2, 0), (2, 3, 1), (3, 4, 2), (2, 5, 3)], [1, 4]).unwrap();
        let paths = shortest_path_routing(&net).unwrap();
        let inst = prune(&net, &paths).unwrap();
        assert_eq!(inst.network.link_count(), 1);
        assert_eq!(inst.link_origin, vec![vec![0, 1, 2]]);
        assert!(inst.log.contains(&PruneEvent::RemoveLink {
            link: 3,
            a: 2,
            b: 5
        }));
        assert!(inst.log.contains(&PruneEvent::RemoveNode { node: 5 }));
        assert_eq!(inst.routing.paths(), &[vec![0]]);
    }

    #[test]
    fn fixture_networks_already_pruned() {
        let net = fixtures::five_link_network();
        let inst = prune(&net, &fixtures::five_link_candidate_paths()).unwrap();
        assert!(inst.log.is_empty());
        assert_eq!(inst.network, net);
    }

    #[test]
    fn provenance_is_json() {
        let inst = generate_instance(&cfg(40, 4, 3)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&inst.provenance_json()).unwrap();
        assert_eq!(v["config"]["seed"], 3);
        assert!(v["log"].is_array());
    }
}
