//! Plain-text graph files.
//!
//! ```text
//! # comment
//! nodes 4 latents 1
//! 0 -> 1
//! L0 -> 2
//! L0 -> 3
//! ```
//!
//! Observed nodes are `0..n`, latents `L0..L{l-1}`. An edge token is two
//! characters, the mark at the left node then the mark at the right node:
//! `-` tail, `<`/`>` arrowhead, `o` circle.

use std::fmt::Write as _;

use cocausal_core::{Dag, DagNode, Edge, EdgeMark, LatentId, Mag, NodeId, Pag};

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// One parsed edge line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeLine {
    pub line: usize,
    pub left: DagNode,
    pub mark_left: EdgeMark,
    pub mark_right: EdgeMark,
    pub right: DagNode,
}

/// A graph file before it is interpreted as a DAG, MAG or PAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphText {
    pub nodes: usize,
    pub latents: usize,
    pub edges: Vec<EdgeLine>,
}

fn parse_node(tok: &str, t: &GraphText, line: usize) -> Result<DagNode, FormatError> {
    if let Some(rest) = tok.strip_prefix('L') {
        let l: usize = rest.parse().map_err(|_| err(line, format!("bad latent `{tok}`")))?;
        if l >= t.latents {
            return Err(err(line, format!("latent {tok} not declared")));
        }
        return Ok(DagNode::Latent(LatentId(l as u32)));
    }
    let v: usize = tok.parse().map_err(|_| err(line, format!("bad node `{tok}`")))?;
    if v >= t.nodes {
        return Err(err(line, format!("node {v} out of range (nodes {})", t.nodes)));
    }
    Ok(DagNode::Observed(NodeId(v as u32)))
}

pub fn parse_text(src: &str) -> Result<GraphText, FormatError> {
    let mut graph: Option<GraphText> = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let Some(g) = graph.as_mut() else {
            match toks.as_slice() {
                ["nodes", n, "latents", l] => {
                    let nodes = n.parse().map_err(|_| err(line, "bad node count"))?;
                    let latents = l.parse().map_err(|_| err(line, "bad latent count"))?;
                    graph = Some(GraphText {
                        nodes,
                        latents,
                        edges: Vec::new(),
                    });
                    continue;
                }
                _ => return Err(err(line, "expected header `nodes <n> latents <l>`")),
            }
        };
        let [a, token, b] = toks.as_slice() else {
            return Err(err(line, "expected `<u> <marks> <v>`"));
        };
        let mut chars = token.chars();
        let (Some(l), Some(r), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(err(line, format!("bad edge token `{token}`")));
        };
        let mark_left = EdgeMark::from_left_char(l).ok_or_else(|| err(line, format!("bad mark `{l}`")))?;
        let mark_right = EdgeMark::from_right_char(r).ok_or_else(|| err(line, format!("bad mark `{r}`")))?;
        let left = parse_node(a, g, line)?;
        let right = parse_node(b, g, line)?;
        g.edges.push(EdgeLine {
            line,
            left,
            mark_left,
            mark_right,
            right,
        });
    }
    graph.ok_or_else(|| err(0, "missing header"))
}

fn observed(n: DagNode, line: usize) -> Result<NodeId, FormatError> {
    match n {
        DagNode::Observed(v) => Ok(v),
        DagNode::Latent(_) => Err(err(line, "latent nodes are only allowed in DAG files")),
    }
}

pub fn parse_dag(src: &str) -> Result<Dag, FormatError> {
    let t = parse_text(src)?;
    let mut d = Dag::new(t.nodes, 0).map_err(|e| err(0, e.to_string()))?;
    for _ in 0..t.latents {
        d.add_latent().map_err(|e| err(0, e.to_string()))?;
    }
    for e in &t.edges {
        let (from, to) = match (e.mark_left, e.mark_right) {
            (EdgeMark::Tail, EdgeMark::Arrow) => (e.left, e.right),
            (EdgeMark::Arrow, EdgeMark::Tail) => (e.right, e.left),
            _ => return Err(err(e.line, "DAG edges must be `->` or `<-`")),
        };
        d.add_edge(from, to).map_err(|x| err(e.line, x.to_string()))?;
    }
    Ok(d)
}

fn mixed_edges(t: &GraphText) -> Result<Vec<(usize, Edge)>, FormatError> {
    if t.latents != 0 {
        return Err(err(0, "mixed graphs cannot declare latents"));
    }
    t.edges
        .iter()
        .map(|e| {
            let (a, b) = (observed(e.left, e.line)?, observed(e.right, e.line)?);
            Ok((e.line, Edge::new(a, b, e.mark_left, e.mark_right)))
        })
        .collect()
}

pub fn parse_mag(src: &str) -> Result<Mag, FormatError> {
    let t = parse_text(src)?;
    let mut g = Mag::empty(t.nodes).map_err(|e| err(0, e.to_string()))?;
    for (line, e) in mixed_edges(&t)? {
        g.add_edge(e).map_err(|x| err(line, x.to_string()))?;
    }
    Ok(g)
}

pub fn parse_pag(src: &str) -> Result<Pag, FormatError> {
    let t = parse_text(src)?;
    let edges: Vec<Edge> = mixed_edges(&t)?.into_iter().map(|(_, e)| e).collect();
    Pag::from_edges(t.nodes, &edges).map_err(|e| err(0, e.to_string()))
}

fn node_name(n: DagNode) -> String {
    match n {
        DagNode::Observed(v) => v.to_string(),
        DagNode::Latent(l) => format!("L{}", l.0),
    }
}

pub fn write_dag(d: &Dag) -> String {
    let mut s = format!("nodes {} latents {}\n", d.n_observed(), d.n_latent());
    for (a, b) in d.edges() {
        let _ = writeln!(s, "{} -> {}", node_name(a), node_name(b));
    }
    s
}

fn write_edges(n: usize, edges: impl Iterator<Item = Edge>) -> String {
    let mut s = format!("nodes {n} latents 0\n");
    for e in edges {
        let _ = writeln!(s, "{e}");
    }
    s
}

pub fn write_mag(g: &Mag) -> String {
    write_edges(g.node_count(), g.edges())
}

pub fn write_pag(p: &Pag) -> String {
    write_edges(p.node_count(), p.edges())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dag_round_trip() {
        let src = "# demo\nnodes 4 latents 1\n0 -> 1\n2 <- 1\nL0 -> 2\nL0 -> 3\n";
        let d = parse_dag(src).unwrap();
        assert_eq!(d.n_latent(), 1);
        assert!(d.has_edge(NodeId(1), NodeId(2)));
        assert_eq!(parse_dag(&write_dag(&d)).unwrap(), d);
    }

    #[test]
    fn mixed_marks() {
        let g = parse_mag("nodes 5 latents 0\n0 -> 1\n2 <> 3\n").unwrap();
        assert_eq!(parse_mag(&write_mag(&g)).unwrap(), g);
        let p = parse_pag("nodes 5 latents 0\n1 o> 4\n0 o-o 1\n");
        assert!(p.is_err());
        let p = parse_pag("nodes 5 latents 0\n1 o> 4\n0 oo 1\n").unwrap();
        assert_eq!(p.mark(NodeId(1), NodeId(4)), Some(EdgeMark::Circle));
        assert_eq!(p.mark(NodeId(4), NodeId(1)), Some(EdgeMark::Arrow));
        assert!(parse_mag("nodes 2 latents 0\n0 o> 1\n").is_err());
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_dag("nodes 3 latents 0\n0 -> 1\n1 => 2\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_dag("nodes 3 latents 0\n0 -> 7\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_dag("0 -> 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_dag("nodes 2 latents 0\n0 -> 1\n1 -> 0\n").unwrap_err();
        assert_eq!(e.line, 3);
    }
}
