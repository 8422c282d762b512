//! Weighted graphs, cut values, and the exhaustive MAX K-CUT oracle.
//!
//! Graphs are simple and undirected with real edge weights. Vertices are
//! `0..vertex_count`. The text format accepted by [`Graph::parse`] is one
//! edge per line (`u v [weight]`, weight defaulting to `1`), `#` comments,
//! and an optional `p <vertex_count>` header for declaring isolated
//! trailing vertices.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One undirected weighted edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// A simple undirected weighted graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

/// A class label per vertex, values in `[0, K)` (or `[0, 2^m)` where the
/// register admits unused labels).
pub type Assignment = Vec<u32>;

impl Graph {
    /// Builds a graph after checking simplicity: endpoints in range, no
    /// self-loops, no duplicate edges (in either orientation), weights
    /// finite.
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.u, e.v, vertex_count
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.u)));
            }
            if !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "non-finite weight on edge ({}, {})",
                    e.u, e.v
                )));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Ok(Graph {
            vertex_count,
            edges,
        })
    }

    /// The complete graph on `n` vertices with unit weights.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n.saturating_sub(1) * n / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push(Edge { u, v, weight: 1.0 });
            }
        }
        Graph {
            vertex_count: n,
            edges,
        }
    }

    /// Parses the edge-list text format.
    ///
    /// Errors carry 1-based line numbers. Without a `p` header the vertex
    /// count is `1 + max vertex index` (0 for an empty list). A header
    /// smaller than that is rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_vertex: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "p" {
                if declared.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "repeated p header".into(),
                    });
                }
                if !edges.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "p header must precede edges".into(),
                    });
                }
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `p <vertex_count>`".into(),
                    });
                }
                declared = Some(fields[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad vertex count `{}`", fields[1]),
                })?);
                continue;
            }
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `u v [weight]`, got `{line}`"),
                });
            }
            let u: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad vertex `{}`", fields[0]),
            })?;
            let v: usize = fields[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad vertex `{}`", fields[1]),
            })?;
            let weight: f64 = match fields.get(2) {
                Some(w) => w.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad weight `{w}`"),
                })?,
                None => 1.0,
            };
            if !weight.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite weight on edge ({u}, {v})"),
                });
            }
            max_vertex = Some(max_vertex.map_or(u.max(v), |m| m.max(u).max(v)));
            edges.push(Edge { u, v, weight });
        }
        let implied = max_vertex.map_or(0, |m| m + 1);
        let vertex_count = match declared {
            Some(n) if n < implied => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("p header declares {n} vertices but edges reach {implied}"),
                });
            }
            Some(n) => n,
            None => implied,
        };
        Graph::new(vertex_count, edges).map_err(|e| match e {
            Error::InvalidGraph(msg) => Error::Parse { line: 0, msg },
            other => other,
        })
    }

    /// Renders the edge-list text format parsed by [`Graph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("p {}\n", self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.weight));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Stable 64-bit content hash (FNV-1a over vertex count and edge data).
    /// Used to tie derived artifacts back to their input graph.
    pub fn content_hash(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&(self.vertex_count as u64).to_le_bytes());
        for e in &self.edges {
            eat(&(e.u as u64).to_le_bytes());
            eat(&(e.v as u64).to_le_bytes());
            eat(&e.weight.to_bits().to_le_bytes());
        }
        h
    }
}

/// Total weight of edges whose endpoints get different labels.
///
/// Labels may be any `u32` values; only equality matters.
pub fn cut_value(g: &Graph, assignment: &[u32]) -> Result<f64> {
    if assignment.len() != g.vertex_count {
        return Err(Error::InvalidAssignment(format!(
            "assignment length {} for {} vertices",
            assignment.len(),
            g.vertex_count
        )));
    }
    let mut total = 0.0;
    for e in &g.edges {
        if assignment[e.u] != assignment[e.v] {
            total += e.weight;
        }
    }
    Ok(total)
}

/// Result of exhaustive MAX K-CUT search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Maximum cut weight over all `K^|V|` assignments.
    pub optimum: f64,
    /// Every assignment attaining the optimum, in lexicographic order
    /// (vertex 0 least significant).
    pub maximizers: Vec<Assignment>,
}

/// Default limit on `|V| * log2(K)` for [`brute_force_max_kcut`].
pub const BRUTE_FORCE_DEFAULT_BITS: f64 = 24.0;

/// Exhaustive MAX K-CUT over all `K^|V|` label assignments.
///
/// Guarded by `max_bits` bits of search space (`|V| * log2 K <= max_bits`);
/// pass [`BRUTE_FORCE_DEFAULT_BITS`] unless a caller wants a different
/// budget. Enumeration is chunked across threads; the result is independent
/// of the chunking. Ties are compared with exact float equality, which is
/// reliable for the integer-valued cut weights typical of unit-weight
/// graphs; with arbitrary float weights the maximizer set is best-effort.
pub fn brute_force_max_kcut(g: &Graph, k: u32, max_bits: f64) -> Result<BruteForceResult> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K must be >= 2, got {k}")));
    }
    let n = g.vertex_count;
    let bits = n as f64 * (k as f64).log2();
    if bits > max_bits + 1e-9 {
        return Err(Error::SizeGuard {
            what: format!("brute force over {n} vertices with K={k} needs {bits:.1} bits"),
            limit: max_bits as u64,
        });
    }
    let total: u64 = (k as u64)
        .checked_pow(n as u32)
        .expect("guard keeps K^n within u64");

    use rayon::prelude::*;
    let chunk = 1u64 << 16;
    let starts: Vec<u64> = (0..total.max(1)).step_by(chunk as usize).collect();
    let partials: Vec<(f64, Vec<Assignment>)> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(total.max(1));
            let mut best = f64::NEG_INFINITY;
            let mut arg: Vec<Assignment> = Vec::new();
            let mut labels = decode_mixed_radix(start, k, n);
            for idx in start..end {
                if idx != start {
                    increment_mixed_radix(&mut labels, k);
                }
                let value = cut_value(g, &labels).expect("labels match vertex count");
                if value > best {
                    best = value;
                    arg.clear();
                    arg.push(labels.clone());
                } else if value == best {
                    arg.push(labels.clone());
                }
            }
            (best, arg)
        })
        .collect();

    let mut best = f64::NEG_INFINITY;
    for (b, _) in &partials {
        if *b > best {
            best = *b;
        }
    }
    let mut maximizers = Vec::new();
    for (b, arg) in partials {
        if b == best {
            maximizers.extend(arg);
        }
    }
    Ok(BruteForceResult {
        optimum: best,
        maximizers,
    })
}

fn decode_mixed_radix(mut idx: u64, k: u32, n: usize) -> Assignment {
    let mut labels = vec![0u32; n];
    for slot in labels.iter_mut() {
        *slot = (idx % k as u64) as u32;
        idx /= k as u64;
    }
    labels
}

fn increment_mixed_radix(labels: &mut [u32], k: u32) {
    for slot in labels.iter_mut() {
        *slot += 1;
        if *slot < k {
            return;
        }
        *slot = 0;
    }
}
