//! Plain-text file formats.
//!
//! * Edge list: a header line `n m`, then `m` lines `u v` (0-based; `u u` is
//!   a self-loop).
//! * Orientation: one `tail head` line per edge, in edge order.
//! * Arc list: like the edge list, with each line read as `from to`.
//! * Tree: one `vertex parent_arc` line per vertex; the root's parent arc is
//!   written as `-`.
//!
//! Readers skip blank lines and anything after `#`.

use std::fmt::Write as _;

use crate::cycle::{Digraph, DirectedSpanningTree};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, Orientation};

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn two_numbers(line: usize, s: &str) -> Result<(usize, usize)> {
    let mut it = s.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::parse(line, "expected two integers"))?;
        tok.parse()
            .map_err(|_| Error::parse(line, format!("`{tok}` is not a non-negative integer")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::parse(line, "expected exactly two integers"));
    }
    Ok(pair)
}

/// Header plus `m` pairs; errors carry the offending line number.
fn read_pairs(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
    let (n, m) = two_numbers(hline, header)?;
    let mut pairs = Vec::with_capacity(m);
    let mut last = hline;
    for (line, s) in lines {
        if pairs.len() == m {
            return Err(Error::parse(line, format!("more than the declared {m} edges")));
        }
        let (u, v) = two_numbers(line, s)?;
        for x in [u, v] {
            if x >= n {
                return Err(Error::parse(line, format!("vertex {x} out of range for n = {n}")));
            }
        }
        pairs.push((u, v));
        last = line;
    }
    if pairs.len() < m {
        return Err(Error::parse(
            last,
            format!("declared {m} edges but found {}", pairs.len()),
        ));
    }
    Ok((n, pairs))
}

pub fn parse_edge_list(text: &str) -> Result<Multigraph> {
    let (n, pairs) = read_pairs(text)?;
    Multigraph::new(n, pairs).map_err(|e| match e {
        Error::DuplicateSelfLoop { vertex } => {
            Error::parse(0, format!("second self-loop at vertex {vertex}"))
        }
        other => other,
    })
}

pub fn write_edge_list(g: &Multigraph) -> String {
    let mut s = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(s, "{} {}", e.a, e.b);
    }
    s
}

pub fn parse_orientation(g: &Multigraph, text: &str) -> Result<Orientation> {
    let mut bits = Vec::with_capacity(g.edge_count());
    let mut last = 0;
    for (line, s) in content_lines(text) {
        let e = bits.len();
        if e == g.edge_count() {
            return Err(Error::parse(line, format!("more than {} edges", g.edge_count())));
        }
        let (tail, head) = two_numbers(line, s)?;
        let edge = g.edge(e);
        let bit = if (tail, head) == (edge.b, edge.a) {
            0
        } else if (tail, head) == (edge.a, edge.b) {
            1
        } else {
            return Err(Error::parse(
                line,
                format!("`{tail} {head}` does not orient edge {e} = {{{}, {}}}", edge.a, edge.b),
            ));
        };
        bits.push(bit);
        last = line;
    }
    if bits.len() < g.edge_count() {
        return Err(Error::parse(
            last,
            format!("expected {} edges, found {}", g.edge_count(), bits.len()),
        ));
    }
    Orientation::from_bits(g, bits)
}

pub fn write_orientation(g: &Multigraph, o: &Orientation) -> String {
    let mut s = String::new();
    for e in 0..g.edge_count() {
        let _ = writeln!(s, "{} {}", o.tail(g, e), o.head(g, e));
    }
    s
}

pub fn parse_arc_list(text: &str) -> Result<Digraph> {
    let (n, pairs) = read_pairs(text)?;
    Digraph::new(n, pairs)
}

pub fn write_arc_list(h: &Digraph) -> String {
    let mut s = format!("{} {}\n", h.vertex_count(), h.arc_count());
    for &(from, to) in h.arcs() {
        let _ = writeln!(s, "{from} {to}");
    }
    s
}

pub fn write_tree(t: &DirectedSpanningTree) -> String {
    let mut s = String::new();
    for (v, arc) in t.parent_arc.iter().enumerate() {
        match arc {
            Some(a) => {
                let _ = writeln!(s, "{v} {a}");
            }
            None => {
                let _ = writeln!(s, "{v} -");
            }
        }
    }
    s
}

pub fn parse_tree(h: &Digraph, text: &str) -> Result<DirectedSpanningTree> {
    let n = h.vertex_count();
    let mut parent_arc = vec![None; n];
    let mut seen = vec![false; n];
    let mut root = None;
    for (line, s) in content_lines(text) {
        let mut it = s.split_whitespace();
        let (Some(v), Some(a), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(line, "expected `vertex parent_arc`"));
        };
        let v: usize = v
            .parse()
            .map_err(|_| Error::parse(line, format!("`{v}` is not a vertex")))?;
        if v >= n || seen[v] {
            return Err(Error::parse(line, format!("vertex {v} out of range or repeated")));
        }
        seen[v] = true;
        if a == "-" {
            if root.replace(v).is_some() {
                return Err(Error::parse(line, "more than one root"));
            }
        } else {
            let a: usize = a
                .parse()
                .map_err(|_| Error::parse(line, format!("`{a}` is not an arc id")))?;
            parent_arc[v] = Some(a);
        }
    }
    let root = root.ok_or_else(|| Error::parse(0, "no root line (`vertex -`)"))?;
    let t = DirectedSpanningTree { root, parent_arc };
    if seen.iter().all(|&s| s) && t.is_valid_for(h) {
        Ok(t)
    } else {
        Err(Error::parse(0, "not a directed spanning tree of the arc list"))
    }
}
