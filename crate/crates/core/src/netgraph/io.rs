//! Text formats for networks and routing matrices.
//!
//! Graph file: a `boundary: id id ...` header followed by one `u v link_id`
//! line per edge. Blank lines and `#` comments are ignored.
//!
//! Routing file: either JSON `{"n": <links>, "paths": [[link ids]...]}` or a
//! CSV of 0/1 rows (one row per path). The reader picks the format from the
//! first non-blank character.

use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use super::{NetError, Network, NodeId, RoutingMatrix};

pub fn parse_graph(text: &str) -> Result<Network, NetError> {
    let mut boundary: Option<Vec<NodeId>> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| NetError::Parse {
            line: line_no,
            message,
        };
        if let Some(rest) = line.strip_prefix("boundary:") {
            if boundary.is_some() {
                return Err(parse_err("duplicate boundary header".into()));
            }
            let ids = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<NodeId>()
                        .map_err(|e| parse_err(format!("{t:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            boundary = Some(ids);
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected `u v link_id`, got {line:?}")));
        }
        let u = fields[0]
            .parse::<NodeId>()
            .map_err(|e| parse_err(format!("node {:?}: {e}", fields[0])))?;
        let v = fields[1]
            .parse::<NodeId>()
            .map_err(|e| parse_err(format!("node {:?}: {e}", fields[1])))?;
        let id = fields[2]
            .parse::<usize>()
            .map_err(|e| parse_err(format!("link id {:?}: {e}", fields[2])))?;
        edges.push((u, v, id));
    }
    let boundary = boundary.ok_or(NetError::Parse {
        line: 0,
        message: "missing `boundary:` header".into(),
    })?;
    Network::new(edges, boundary)
}

pub fn format_graph(network: &Network) -> String {
    let mut out = String::from("boundary:");
    for b in network.boundary() {
        out.push_str(&format!(" {b}"));
    }
    out.push('\n');
    for link in network.links() {
        out.push_str(&format!("{} {} {}\n", link.a, link.b, link.id));
    }
    out
}

pub fn read_graph(path: impl AsRef<FsPath>) -> Result<Network, NetError> {
    parse_graph(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingFile {
    pub n: usize,
    pub paths: Vec<Vec<usize>>,
}

impl From<&RoutingMatrix> for RoutingFile {
    fn from(r: &RoutingMatrix) -> Self {
        RoutingFile {
            n: r.link_count(),
            paths: r.paths().to_vec(),
        }
    }
}

pub fn parse_routing(text: &str) -> Result<RoutingMatrix, NetError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: RoutingFile = serde_json::from_str(trimmed).map_err(|e| NetError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        RoutingMatrix::from_link_lists(file.n, file.paths)
    } else {
        parse_routing_csv(text)
    }
}

fn parse_routing_csv(text: &str) -> Result<RoutingMatrix, NetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| NetError::Parse {
            line: e.position().map_or(idx + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, f)| match f {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(NetError::Parse {
                    line: idx + 1,
                    message: format!("column {col}: expected 0 or 1, got {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    RoutingMatrix::from_dense(&rows)
}

pub fn read_routing(path: impl AsRef<FsPath>) -> Result<RoutingMatrix, NetError> {
    parse_routing(&fs::read_to_string(path)?)
}

pub fn routing_to_json(routing: &RoutingMatrix) -> String {
    let mut s = serde_json::to_string(&RoutingFile::from(routing)).expect("serializable");
    s.push('\n');
    s
}

pub fn routing_to_csv(routing: &RoutingMatrix) -> String {
    let mut out = String::new();
    for row in routing.entries().to_rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn graph_text_round_trip() {
        let net = fixtures::eight_link_network();
        let text = format_graph(&net);
        assert!(text.starts_with("boundary: 1 3 4 6 7 9\n"));
        assert_eq!(parse_graph(&text).unwrap(), net);
    }

    #[test]
    fn graph_parse_errors() {
        assert!(matches!(
            parse_graph("1 2 0\n"),
            Err(NetError::Parse { .. })
        ));
        assert!(matches!(
            parse_graph("boundary: 1\n1 2\n"),
            Err(NetError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("boundary: 1 x\n1 2 0\n"),
            Err(NetError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn json_and_csv_describe_same_matrix() {
        let r = fixtures::eight_link_routing();
        let from_json = parse_routing(&routing_to_json(&r)).unwrap();
        let from_csv = parse_routing(&routing_to_csv(&r)).unwrap();
        assert_eq!(from_json.entries(), r.entries());
        assert_eq!(from_csv.entries(), r.entries());
    }

    #[test]
    fn routing_json_keeps_link_order() {
        let r = parse_routing(r#"{"n": 5, "paths": [[0,2,3],[4,3]]}"#).unwrap();
        assert_eq!(r.paths()[1], vec![4, 3]);
        assert_eq!(r.link_count(), 5);
    }

    #[test]
    fn csv_with_bad_cell_rejected() {
        assert!(parse_routing("1,0\n0,2\n").is_err());
        assert!(parse_routing("1,0\n0\n").is_err());
    }
}
