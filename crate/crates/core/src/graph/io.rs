//! Text formats for graphs.
//!
//! The edge-list format is line oriented:
//!
//! ```text
//! # comment
//! p wgraph <n> <m>
//! v <id> <pi>        (n lines)
//! e <u> <v> <w>      (m lines)
//! ```
//!
//! Hat trees additionally carry a `# hat-tree h=<h> k=<k> root=<r>` comment so
//! they read back with their level structure. JSON mirrors the same content;
//! DOT is export only.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EdgeKind, HatTree, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Edgelist,
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "wg" => Ok(Format::Edgelist),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(Error::invalid(format!("unknown graph format '{other}'"))),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension; anything unknown is an edge list.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("dot") | Some("gv") => Format::Dot,
            _ => Format::Edgelist,
        }
    }
}

/// A deserialized graph, with hat-tree structure when the input carried it.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphDocument {
    Plain(WeightedGraph),
    Hat(HatTree),
}

impl GraphDocument {
    pub fn graph(&self) -> &WeightedGraph {
        match self {
            GraphDocument::Plain(g) => g,
            GraphDocument::Hat(t) => t.graph(),
        }
    }

    pub fn hat(&self) -> Option<&HatTree> {
        match self {
            GraphDocument::Hat(t) => Some(t),
            GraphDocument::Plain(_) => None,
        }
    }
}

impl From<WeightedGraph> for GraphDocument {
    fn from(g: WeightedGraph) -> Self {
        GraphDocument::Plain(g)
    }
}

impl From<HatTree> for GraphDocument {
    fn from(t: HatTree) -> Self {
        GraphDocument::Hat(t)
    }
}

pub fn serialize(doc: &GraphDocument, format: Format) -> String {
    match format {
        Format::Edgelist => to_edgelist(doc),
        Format::Json => to_json(doc),
        Format::Dot => to_dot(doc),
    }
}

pub fn deserialize(text: &str, format: Format) -> Result<GraphDocument> {
    match format {
        Format::Edgelist => from_edgelist(text),
        Format::Json => from_json(text),
        Format::Dot => Err(Error::invalid("DOT is an export-only format")),
    }
}

pub fn read_file(path: &Path) -> Result<GraphDocument> {
    let text = std::fs::read_to_string(path)?;
    deserialize(&text, Format::from_path(path))
}

pub fn to_edgelist(doc: &GraphDocument) -> String {
    let g = doc.graph();
    let mut out = String::new();
    if let Some(t) = doc.hat() {
        writeln!(out, "# hat-tree h={} k={} root={}", t.h(), t.k(), t.root()).unwrap();
    }
    writeln!(out, "p wgraph {} {}", g.n(), g.m()).unwrap();
    for (x, p) in g.vertex_weights().iter().enumerate() {
        writeln!(out, "v {x} {p}").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.u, e.v, e.w).unwrap();
    }
    out
}

fn parse_field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from '{tok}'"),
    })
}

fn parse_hat_comment(body: &str, line: usize) -> Result<(u32, u32, usize)> {
    let mut h = None;
    let mut k = None;
    let mut root = None;
    for tok in body.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("malformed hat-tree field '{tok}'"),
        })?;
        match key {
            "h" => h = Some(parse_field(Some(val), line, "h")?),
            "k" => k = Some(parse_field(Some(val), line, "k")?),
            "root" => root = Some(parse_field(Some(val), line, "root")?),
            _ => {}
        }
    }
    match (h, k, root) {
        (Some(h), Some(k), Some(r)) => Ok((h, k, r)),
        _ => Err(Error::Parse {
            line,
            message: "hat-tree comment needs h, k and root".into(),
        }),
    }
}

pub fn from_edgelist(text: &str) -> Result<GraphDocument> {
    let mut header: Option<(usize, usize)> = None;
    let mut hat = None;
    let mut weights: Vec<Option<f64>> = Vec::new();
    let mut edges = Vec::new();
    let mut vertex_lines = 0;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(body) = comment.trim().strip_prefix("hat-tree") {
                hat = Some(parse_hat_comment(body, line)?);
            }
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let tag = toks.next().unwrap();
        match (tag, header) {
            ("p", None) => {
                let kind: String = parse_field(toks.next(), line, "format name")?;
                if kind != "wgraph" {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected 'p wgraph', found 'p {kind}'"),
                    });
                }
                let n = parse_field(toks.next(), line, "vertex count")?;
                let m = parse_field(toks.next(), line, "edge count")?;
                weights = vec![None; n];
                header = Some((n, m));
            }
            ("p", Some(_)) => {
                return Err(Error::Parse {
                    line,
                    message: "duplicate header".into(),
                })
            }
            (_, None) => {
                return Err(Error::Parse {
                    line,
                    message: "record before 'p wgraph' header".into(),
                })
            }
            ("v", Some((n, _))) => {
                let id: usize = parse_field(toks.next(), line, "vertex id")?;
                let pi: f64 = parse_field(toks.next(), line, "vertex weight")?;
                if id >= n {
                    return Err(Error::Parse {
                        line,
                        message: format!("vertex id {id} out of range 0..{n}"),
                    });
                }
                if weights[id].replace(pi).is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("vertex {id} listed twice"),
                    });
                }
                vertex_lines += 1;
            }
            ("e", Some((n, m))) => {
                let u: usize = parse_field(toks.next(), line, "edge endpoint")?;
                let v: usize = parse_field(toks.next(), line, "edge endpoint")?;
                let w: f64 = parse_field(toks.next(), line, "edge weight")?;
                if u >= n || v >= n {
                    return Err(Error::Parse {
                        line,
                        message: format!("edge {{{u}, {v}}} references a vertex outside 0..{n}"),
                    });
                }
                if edges.len() == m {
                    return Err(Error::Parse {
                        line,
                        message: format!("more than the {m} declared edges"),
                    });
                }
                edges.push((u, v, w));
            }
            (other, _) => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown record type '{other}'"),
                })
            }
        }
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                message: "trailing tokens".into(),
            });
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: last_line + 1,
        message: "missing 'p wgraph' header".into(),
    })?;
    if vertex_lines < n || edges.len() < m {
        return Err(Error::Parse {
            line: last_line + 1,
            message: format!(
                "unexpected end of input: expected {n} vertex and {m} edge records, found {vertex_lines} and {}",
                edges.len()
            ),
        });
    }
    let weights: Vec<f64> = weights.into_iter().map(|w| w.unwrap()).collect();
    let graph = WeightedGraph::new(weights, edges)?;
    if graph.m() != m {
        return Err(Error::InvalidInput(format!(
            "{m} edge records collapse to {} distinct edges",
            graph.m()
        )));
    }
    match hat {
        Some((h, k, root)) => Ok(GraphDocument::Hat(HatTree::from_graph(graph, h, k, root)?)),
        None => Ok(GraphDocument::Plain(graph)),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGraph {
    n: usize,
    vertices: Vec<JsonVertex>,
    edges: Vec<JsonEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<JsonMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonVertex {
    id: usize,
    pi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    u: usize,
    v: usize,
    w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<EdgeKind>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMeta {
    h: u32,
    k: u32,
    root: usize,
}

pub fn to_json(doc: &GraphDocument) -> String {
    let g = doc.graph();
    let hat = doc.hat();
    let body = JsonGraph {
        n: g.n(),
        vertices: (0..g.n())
            .map(|x| JsonVertex {
                id: x,
                pi: g.pi(x),
                level: hat.map(|t| t.level(x) as u32),
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| JsonEdge {
                u: e.u,
                v: e.v,
                w: e.w,
                kind: hat.map(|t| t.edge_kind(i)),
            })
            .collect(),
        meta: hat.map(|t| JsonMeta {
            h: t.h(),
            k: t.k(),
            root: t.root(),
        }),
    };
    serde_json::to_string_pretty(&body).expect("graph serializes")
}

pub fn from_json(text: &str) -> Result<GraphDocument> {
    let body: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if body.vertices.len() != body.n {
        return Err(Error::InvalidInput(format!(
            "n = {} but {} vertices listed",
            body.n,
            body.vertices.len()
        )));
    }
    let mut weights = vec![None; body.n];
    for v in &body.vertices {
        if v.id >= body.n || weights[v.id].replace(v.pi).is_some() {
            return Err(Error::InvalidInput(format!(
                "bad or repeated vertex id {}",
                v.id
            )));
        }
    }
    let weights: Vec<f64> = weights.into_iter().map(|w| w.unwrap()).collect();
    let graph = WeightedGraph::new(weights, body.edges.iter().map(|e| (e.u, e.v, e.w)))?;
    if graph.m() != body.edges.len() {
        return Err(Error::InvalidInput("parallel edges in JSON input".into()));
    }
    let Some(meta) = body.meta else {
        return Ok(GraphDocument::Plain(graph));
    };
    let tree = HatTree::from_graph(graph, meta.h, meta.k, meta.root)?;
    for v in &body.vertices {
        if let Some(l) = v.level {
            if l as usize != tree.level(v.id) {
                return Err(Error::InvalidInput(format!(
                    "vertex {} declares level {l}, structure says {}",
                    v.id,
                    tree.level(v.id)
                )));
            }
        }
    }
    for (i, e) in body.edges.iter().enumerate() {
        if let Some(kind) = e.kind {
            if kind != tree.edge_kind(i) {
                return Err(Error::InvalidInput(format!(
                    "edge {{{}, {}}} declares kind {kind:?}, structure says {:?}",
                    e.u,
                    e.v,
                    tree.edge_kind(i)
                )));
            }
        }
    }
    Ok(GraphDocument::Hat(tree))
}

pub fn to_dot(doc: &GraphDocument) -> String {
    let g = doc.graph();
    let mut out = String::from("graph G {\n");
    match doc.hat() {
        Some(t) => {
            for l in 0..=t.depth() {
                let members: Vec<String> = t.level_range(l).map(|x| x.to_string()).collect();
                writeln!(out, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
            }
            for (i, e) in g.edges().iter().enumerate() {
                let style = match t.edge_kind(i) {
                    EdgeKind::Tree => "solid",
                    EdgeKind::Path => "dashed",
                };
                writeln!(out, "  {} -- {} [style={style}];", e.u, e.v).unwrap();
            }
        }
        None => {
            for x in 0..g.n() {
                writeln!(out, "  {x} [label=\"{x} ({})\"];", g.pi(x)).unwrap();
            }
            for e in g.edges() {
                writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.w).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hat_tree, path_graph};

    #[test]
    fn k2_edgelist_is_exact() {
        let text = to_edgelist(&path_graph(2).into());
        assert_eq!(text, "p wgraph 2 1\nv 0 1\nv 1 1\ne 0 1 1\n");
    }

    #[test]
    fn hat_tree_round_trips() {
        let doc: GraphDocument = build_hat_tree(2, 2).unwrap().into();
        for format in [Format::Edgelist, Format::Json] {
            let back = deserialize(&serialize(&doc, format), format).unwrap();
            assert_eq!(back, doc);
        }
    }

    #[test]
    fn weighted_values_round_trip() {
        let g =
            WeightedGraph::new(vec![0.1, 1.0 / 3.0, 7e-9], [(0, 1, 2.5), (1, 2, 1e20)]).unwrap();
        let doc = GraphDocument::from(g);
        assert_eq!(from_edgelist(&to_edgelist(&doc)).unwrap(), doc);
        assert_eq!(from_json(&to_json(&doc)).unwrap(), doc);
    }

    #[test]
    fn truncated_file_names_line() {
        let text = "p wgraph 3 2\nv 0 1\nv 1 1\nv 2 1\ne 0 1 1\n";
        match from_edgelist(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_reported() {
        let bad = [
            ("v 0 1\n", 1),
            ("p wgraph 2 1\nv 0 1\nv 1 x\ne 0 1 1\n", 3),
            ("p wgraph 2 1\nv 0 1\nv 0 1\n", 3),
            ("p wgraph 2 1\nv 0 1\nv 1 1\ne 0 2 1\n", 4),
            ("p wgraph 2 1\nv 0 1\nv 1 1\nq 0 1 1\n", 4),
            ("p graph 2 1\n", 1),
        ];
        for (text, expect) in bad {
            match from_edgelist(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expect, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a comment\n\np wgraph 2 1\n# another\nv 0 1\nv 1 2\ne 0 1 3\n";
        let g = from_edgelist(text).unwrap();
        assert_eq!(g.graph().vertex_weights(), &[1.0, 2.0]);
    }

    #[test]
    fn json_parse_error_has_line() {
        let err = from_json("{\n  \"n\": 2,\n  \"vertices\": [,\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn dot_export() {
        let dot = to_dot(&build_hat_tree(1, 1).unwrap().into());
        assert!(dot.starts_with("graph G {"));
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(deserialize(&dot, Format::Dot).is_err());
    }
}
