//! Undirected simple graphs, graph6 and edge-list ingestion, vertex permutations.

use std::fmt;

use thiserror::Error;

/// Vertex index. Labels are exactly `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph6 byte {offset}: {fault}")]
    Graph6 { offset: usize, fault: Graph6Fault },
    #[error("edge list line {line}: {fault}")]
    EdgeList { line: usize, fault: EdgeListFault },
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("permutation has length {found}, graph has {expected} vertices")]
    PermutationLength { expected: usize, found: usize },
    #[error("mapping is not a bijection on 0..{0}")]
    NotBijection(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Fault {
    #[error("empty input")]
    Empty,
    #[error("malformed length header")]
    MalformedHeader,
    #[error("character {0:#04x} outside 63..=126")]
    InvalidByte(u8),
    #[error("adjacency data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("padding bits set in final byte")]
    TrailingBits,
    #[error("unexpected data after the adjacency block")]
    TrailingData,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EdgeListFault {
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("expected `n <count>`, found {0:?}")]
    BadHeader(String),
    #[error("expected two vertex indices, found {0:?}")]
    BadEdge(String),
    #[error("vertex {vertex} is not below n = {n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

/// Undirected graph without loops or multi-edges, adjacency kept as sorted neighbour lists.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimpleGraph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl SimpleGraph {
    /// Builds a graph from an edge iterator; repeated and reversed pairs collapse.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v as Vertex);
            adjacency[v].push(u as Vertex);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Self {
            adjacency,
            edge_count: twice / 2,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    /// Vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> Self {
        let shift = self.n();
        let edges = self.edges().map(|(u, v)| (u as usize, v as usize)).chain(
            other
                .edges()
                .map(|(u, v)| (u as usize + shift, v as usize + shift)),
        );
        Self::new(shift + other.n(), edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as Vertex;
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Sorted degree multiset.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        degrees.sort_unstable();
        degrees
    }

    /// Returns `(n, k, lambda, mu)` if the graph is strongly regular.
    ///
    /// Complete and edgeless graphs are rejected: one of `lambda`, `mu` is undefined for them.
    pub fn srg_parameters(&self) -> Option<SrgParameters> {
        let n = self.n();
        if n < 2 {
            return None;
        }
        let k = self.degree(0);
        if k == 0 || k == n - 1 || self.adjacency.iter().any(|l| l.len() != k) {
            return None;
        }
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for (u, v) in self.edges() {
            let (u, v) = (u as usize, v as usize);
            rows[u * words + v / 64] |= 1 << (v % 64);
            rows[v * words + u / 64] |= 1 << (u % 64);
        }
        let common = |u: usize, v: usize| -> usize {
            let a = &rows[u * words..(u + 1) * words];
            let b = &rows[v * words..(v + 1) * words];
            a.iter()
                .zip(b)
                .map(|(x, y)| (x & y).count_ones() as usize)
                .sum()
        };
        let (mut lambda, mut mu) = (None, None);
        for u in 0..n {
            for v in u + 1..n {
                let slot = if rows[u * words + v / 64] >> (v % 64) & 1 == 1 {
                    &mut lambda
                } else {
                    &mut mu
                };
                let c = common(u, v);
                match *slot {
                    None => *slot = Some(c),
                    Some(prev) if prev != c => return None,
                    Some(_) => {}
                }
            }
        }
        Some(SrgParameters {
            n,
            k,
            lambda: lambda?,
            mu: mu?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SrgParameters {
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl fmt::Display for SrgParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SR({},{},{},{})", self.n, self.k, self.lambda, self.mu)
    }
}

/// A bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPermutation {
    mapping: Vec<Vertex>,
}

impl VertexPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, GraphError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(GraphError::NotBijection(n));
            }
        }
        Ok(Self {
            mapping: mapping.into_iter().map(|m| m as Vertex).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n as Vertex).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        self.mapping[v as usize]
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m as usize] = i as Vertex;
        }
        Self { mapping: inv }
    }
}

/// Relabels every vertex `v` as `p(v)`.
pub fn apply_permutation(
    g: &SimpleGraph,
    p: &VertexPermutation,
) -> Result<SimpleGraph, GraphError> {
    if p.len() != g.n() {
        return Err(GraphError::PermutationLength {
            expected: g.n(),
            found: p.len(),
        });
    }
    SimpleGraph::new(
        g.n(),
        g.edges()
            .map(|(u, v)| (p.apply(u) as usize, p.apply(v) as usize)),
    )
}

fn g6_byte(bytes: &[u8], offset: usize) -> Result<u32, GraphError> {
    match bytes.get(offset) {
        Some(&b) if (63..=126).contains(&b) => Ok(u32::from(b - 63)),
        Some(&b) => Err(GraphError::Graph6 {
            offset,
            fault: Graph6Fault::InvalidByte(b),
        }),
        None => Err(GraphError::Graph6 {
            offset,
            fault: Graph6Fault::MalformedHeader,
        }),
    }
}

/// Decodes one graph6 line. Surrounding whitespace is ignored.
pub fn parse_graph6(line: &str) -> Result<SimpleGraph, GraphError> {
    let bytes = line.trim().as_bytes();
    if bytes.is_empty() {
        return Err(GraphError::Graph6 {
            offset: 0,
            fault: Graph6Fault::Empty,
        });
    }
    let (n, header_len) = if bytes[0] != 126 {
        (g6_byte(bytes, 0)? as usize, 1)
    } else if bytes.get(1) != Some(&126) {
        let mut n = 0usize;
        for i in 1..4 {
            n = (n << 6) | g6_byte(bytes, i)? as usize;
        }
        if n < 63 {
            return Err(GraphError::Graph6 {
                offset: 0,
                fault: Graph6Fault::MalformedHeader,
            });
        }
        (n, 4)
    } else {
        let mut n = 0usize;
        for i in 2..8 {
            n = (n << 6) | g6_byte(bytes, i)? as usize;
        }
        if n < 258_048 {
            return Err(GraphError::Graph6 {
                offset: 0,
                fault: Graph6Fault::MalformedHeader,
            });
        }
        (n, 8)
    };

    let bit_count = n * n.saturating_sub(1) / 2;
    let data_len = bit_count.div_ceil(6);
    let data = &bytes[header_len..];
    if data.len() < data_len {
        return Err(GraphError::Graph6 {
            offset: bytes.len(),
            fault: Graph6Fault::Truncated {
                expected: data_len,
                found: data.len(),
            },
        });
    }
    if data.len() > data_len {
        return Err(GraphError::Graph6 {
            offset: header_len + data_len,
            fault: Graph6Fault::TrailingData,
        });
    }
    let mut words = Vec::with_capacity(data_len);
    for i in 0..data_len {
        words.push(g6_byte(bytes, header_len + i)?);
    }
    if let Some(&last) = words.last() {
        let pad = data_len * 6 - bit_count;
        if last & ((1 << pad) - 1) != 0 {
            return Err(GraphError::Graph6 {
                offset: header_len + data_len - 1,
                fault: Graph6Fault::TrailingBits,
            });
        }
    }

    let mut edges = Vec::new();
    let mut k = 0usize;
    for j in 1..n {
        for i in 0..j {
            if words[k / 6] >> (5 - k % 6) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    SimpleGraph::new(n, edges)
}

/// Encodes a graph in graph6 (no `>>graph6<<` header, no newline).
pub fn encode_graph6(g: &SimpleGraph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n < 63 {
        out.push(n as u8 + 63);
    } else if n < 258_048 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n as Vertex {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
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
    String::from_utf8(out).expect("graph6 output is ASCII")
}

/// Decodes every non-blank line of a graph6 file.
pub fn parse_graph6_file(text: &str) -> Result<Vec<SimpleGraph>, (usize, GraphError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_graph6(l).map_err(|e| (i + 1, e)))
        .collect()
}

/// Parses `n <count>` followed by `u v` lines; `#` starts a comment line.
pub fn parse_edge_list(text: &str) -> Result<SimpleGraph, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |fault| GraphError::EdgeList {
            line: line_no,
            fault,
        };
        let mut fields = line.split_whitespace();
        match n {
            None => {
                let count = match (fields.next(), fields.next(), fields.next()) {
                    (Some("n"), Some(c), None) => c.parse::<usize>().ok(),
                    _ => None,
                };
                n = Some(count.ok_or_else(|| fail(EdgeListFault::BadHeader(line.into())))?);
            }
            Some(n) => {
                let pair = match (fields.next(), fields.next(), fields.next()) {
                    (Some(a), Some(b), None) => a.parse::<usize>().ok().zip(b.parse().ok()),
                    _ => None,
                };
                let (u, v) = pair.ok_or_else(|| fail(EdgeListFault::BadEdge(line.into())))?;
                for vertex in [u, v] {
                    if vertex >= n {
                        return Err(fail(EdgeListFault::OutOfRange { vertex, n }));
                    }
                }
                if u == v {
                    return Err(fail(EdgeListFault::SelfLoop(u)));
                }
                edges.push((u, v));
            }
        }
    }
    let n = n.ok_or(GraphError::EdgeList {
        line: text.lines().count().max(1),
        fault: EdgeListFault::MissingHeader,
    })?;
    SimpleGraph::new(n, edges)
}
