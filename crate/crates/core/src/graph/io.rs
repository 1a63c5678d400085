//! Edge-list and graph6 text formats.
//!
//! Edge list: a header line `n m`, then `m` lines `u v` with 0-based vertices,
//! LF line endings. graph6 follows the standard 6-bit encoding for `n <= 62`.

use super::{edge, Graph};
use crate::error::{Error, Result};

/// Parses either format; a single-token first line is read as graph6.
pub fn read_graph(text: &str) -> Result<Graph> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let body = first
        .trim()
        .strip_prefix(">>graph6<<")
        .unwrap_or(first.trim());
    if body.split_whitespace().count() == 1 && body.parse::<usize>().is_err() {
        read_graph6(body)
    } else {
        read_edge_list(text)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("expected a nonnegative integer for {what}, got {tok:?}"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if let Some(extra) = it.next() {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("unexpected trailing field {extra:?}"),
        });
    }
    Ok((a, b))
}

fn read_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let (n, m) = parse_pair(header, hline)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::BTreeSet::new();
    for (lineno, line) in lines {
        let (u, v) = parse_pair(line, lineno)?;
        for w in [u, v] {
            if w >= n {
                return Err(Error::VertexOutOfRange {
                    line: lineno,
                    vertex: w,
                    n,
                });
            }
        }
        if u == v {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("self-loop at vertex {u}"),
            });
        }
        if !seen.insert(edge(u, v)) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("duplicate edge ({u}, {v})"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header declares {m} edges but {} were given", edges.len()),
        });
    }
    Graph::new(n, edges)
}

/// Canonical edge-list text: header, then edges sorted with `u < v`.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_graph6(text: &str) -> Result<Graph> {
    let bytes = text.trim().as_bytes();
    let bad = |msg: String| Error::Parse { line: 1, msg };
    if bytes.is_empty() {
        return Err(bad("empty graph6 string".into()));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(bad(format!("invalid graph6 byte {b}")));
    }
    let n = (bytes[0] - 63) as usize;
    if n > 62 {
        return Err(bad(
            "graph6 with more than 62 vertices is not supported".into()
        ));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    if bytes.len() - 1 != need {
        return Err(bad(format!(
            "graph6 body has {} bytes, expected {need} for n = {n}",
            bytes.len() - 1
        )));
    }
    let bit = |k: usize| -> bool {
        let byte = bytes[1 + k / 6] - 63;
        (byte >> (5 - k % 6)) & 1 == 1
    };
    let mut edges = Vec::new();
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            if bit(k) {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::new(n, edges)
}

pub fn write_graph6(g: &Graph) -> Result<String> {
    let n = g.n();
    if n > 62 {
        return Err(Error::InvalidParameter(
            "graph6 output supports at most 62 vertices".into(),
        ));
    }
    let mut out = vec![(n as u8) + 63];
    let mut acc = 0u8;
    let mut filled = 0;
    for v in 1..n {
        for u in 0..v {
            acc = (acc << 1) | g.has_edge(u, v) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}
