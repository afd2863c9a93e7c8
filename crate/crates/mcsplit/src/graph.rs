//! Simple undirected unlabelled graphs with O(1) adjacency tests.
//!
//! Vertices are identified by their 0-based position in the input file; no
//! relabelling or preprocessing happens here. Two text formats are
//! supported: LAD (vertex count, then one neighbor record per vertex) and
//! DIMACS `p edge` (1-based edge list). Graphs are immutable once built and
//! can be shared freely between concurrent solver runs.

use std::fmt;
use std::fmt::Write as _;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::rng::SplitMix64;

/// Index of a vertex, local to one [`Graph`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered sequence of matched vertex pairs `(pattern, target)`.
///
/// A valid assignment is injective on both sides and maps an induced
/// subgraph of the pattern onto an isomorphic induced subgraph of the
/// target; [`crate::solver::check_solution`] verifies both conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pairs: Vec<(VertexId, VertexId)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn from_pairs(pairs: Vec<(VertexId, VertexId)>) -> Self {
        Self { pairs }
    }

    pub fn push(&mut self, pattern: VertexId, target: VertexId) {
        self.pairs.push((pattern, target));
    }

    pub fn pop(&mut self) -> Option<(VertexId, VertexId)> {
        self.pairs.pop()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }
}

/// A simple undirected graph: no self-loops, no parallel edges.
///
/// Adjacency is stored twice: as bit rows for O(1) tests (the splitting
/// inner loop lives on these) and as sorted neighbor lists for iteration
/// and serialization.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    blocks: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<VertexId>>,
    m: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges collapse.
    ///
    /// Panics on out-of-range endpoints or self-loops; parsers validate
    /// input before calling this.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let blocks = n.div_ceil(64);
        let mut g = Graph {
            n,
            blocks,
            bits: vec![0u64; n * blocks],
            neighbors: vec![Vec::new(); n],
            m: 0,
        };
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} vertices");
            assert!(u != v, "self-loop on vertex {u}");
            if !g.test_bit(u, v) {
                g.set_bit(u, v);
                g.set_bit(v, u);
                g.neighbors[u].push(VertexId(v as u32));
                g.neighbors[v].push(VertexId(u as u32));
                g.m += 1;
            }
        }
        for list in &mut g.neighbors {
            list.sort_unstable();
        }
        g
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.bits[u * self.blocks + v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    fn test_bit(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.blocks + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n as u32).map(VertexId)
    }

    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.test_bit(u.index(), v.index())
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors[v.index()].len()
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v.index()]
    }

    /// Neighbors of `v` whose degree is exactly 1, ascending.
    pub fn leaf_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.neighbors[v.index()]
            .iter()
            .copied()
            .filter(|&u| self.degree(u) == 1)
    }

    /// Serializes to LAD: records in vertex order, neighbors ascending.
    pub fn to_lad(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n);
        for v in self.vertices() {
            let _ = write!(out, "{}", self.degree(v));
            for u in self.neighbors(v) {
                let _ = write!(out, " {u}");
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m)
    }
}

/// Seeded Erdős–Rényi graph: each pair `(i, j)`, `i < j`, becomes an edge
/// with probability `edge_prob`.
pub fn erdos_renyi(n: usize, edge_prob: f64, rng: &mut SplitMix64) -> Graph {
    assert!(
        (0.0..=1.0).contains(&edge_prob),
        "edge probability must lie in [0, 1]"
    );
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.next_f64() < edge_prob {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected {expected}, found `{found}`")]
    Malformed {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: unexpected end of input, expected {expected}")]
    UnexpectedEnd { line: usize, expected: &'static str },
    #[error("line {line}: vertex {index} out of range for {n} vertices")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: vertex {vertex} lists itself as a neighbor")]
    SelfLoop { line: usize, vertex: usize },
    #[error(
        "line {line}: vertex {from} lists neighbor {to}, but {to} does not list {from} \
         (directed input; re-parse with symmetrization to accept it)"
    )]
    Asymmetric { line: usize, from: usize, to: usize },
    #[error("missing `p edge <n> <m>` header")]
    MissingHeader,
    #[error("line {line}: duplicate `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: trailing content after graph data")]
    TrailingContent { line: usize },
}

/// Whitespace token stream with 1-based line tracking.
struct Tokens<'a> {
    tokens: std::vec::IntoIter<(&'a str, usize)>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let tokens: Vec<(&str, usize)> = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (t, i + 1)))
            .collect();
        Self {
            tokens: tokens.into_iter(),
            last_line: 1,
        }
    }

    fn next(&mut self, expected: &'static str) -> Result<(&'a str, usize), ParseError> {
        match self.tokens.next() {
            Some((tok, line)) => {
                self.last_line = line;
                Ok((tok, line))
            }
            None => Err(ParseError::UnexpectedEnd {
                line: self.last_line,
                expected,
            }),
        }
    }

    fn next_usize(&mut self, expected: &'static str) -> Result<(usize, usize), ParseError> {
        let (tok, line) = self.next(expected)?;
        tok.parse::<usize>()
            .map(|v| (v, line))
            .map_err(|_| ParseError::Malformed {
                line,
                expected,
                found: tok.to_string(),
            })
    }

    /// Line of the next token, if any input remains.
    fn trailing_token_line(&mut self) -> Option<usize> {
        self.tokens.next().map(|(_, line)| line)
    }
}

/// Parses the LAD format: vertex count `n`, then `n` records, each a degree
/// followed by that many 0-based neighbor indices. Tokens may span lines.
///
/// Every listed edge must be reciprocated; a one-sided listing is treated
/// as a directed input and rejected. Use [`parse_lad_symmetrize`] to accept
/// directed listings by taking their union.
pub fn parse_lad(text: &str) -> Result<Graph, ParseError> {
    parse_lad_impl(text, false)
}

/// Like [`parse_lad`], but one-sided neighbor listings are unioned into
/// undirected edges instead of being rejected.
pub fn parse_lad_symmetrize(text: &str) -> Result<Graph, ParseError> {
    parse_lad_impl(text, true)
}

fn parse_lad_impl(text: &str, symmetrize: bool) -> Result<Graph, ParseError> {
    let mut tokens = Tokens::new(text);
    let (n, _) = tokens.next_usize("vertex count")?;

    // (from, to, line) for every listing; per-vertex sets for duplicate
    // collapsing and the reciprocity check.
    let mut listings: Vec<(usize, usize, usize)> = Vec::new();
    let mut listed: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); n];
    for (v, listed_v) in listed.iter_mut().enumerate() {
        let (degree, _) = tokens.next_usize("record degree")?;
        for _ in 0..degree {
            let (u, line) = tokens.next_usize("neighbor index")?;
            if u >= n {
                return Err(ParseError::IndexOutOfRange { line, index: u, n });
            }
            if u == v {
                return Err(ParseError::SelfLoop { line, vertex: v });
            }
            if listed_v.insert(u as u32) {
                listings.push((v, u, line));
            }
        }
    }
    if let Some(line) = tokens.trailing_token_line() {
        return Err(ParseError::TrailingContent { line });
    }

    if !symmetrize {
        for &(v, u, line) in &listings {
            if !listed[u].contains(&(v as u32)) {
                return Err(ParseError::Asymmetric {
                    line,
                    from: v,
                    to: u,
                });
            }
        }
    }
    Ok(Graph::from_edges(n, listings.into_iter().map(|(v, u, _)| (v, u))))
}

/// Parses the DIMACS `p edge` format: a `p edge <n> <m>` header, then
/// `e <u> <v>` lines with 1-based endpoints. `c` comment lines are skipped.
pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut fields = raw.split_whitespace();
        let Some(head) = fields.next() else { continue };
        match head {
            "c" => continue,
            "p" => {
                if n.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                let kind = fields.next().unwrap_or("");
                let nv = fields.next().and_then(|t| t.parse::<usize>().ok());
                let ne = fields.next().and_then(|t| t.parse::<usize>().ok());
                match (kind, nv, ne) {
                    ("edge", Some(nv), Some(_)) => n = Some(nv),
                    _ => {
                        return Err(ParseError::Malformed {
                            line,
                            expected: "`p edge <n> <m>` header",
                            found: raw.trim().to_string(),
                        })
                    }
                }
            }
            "e" => {
                let Some(n) = n else {
                    return Err(ParseError::MissingHeader);
                };
                let mut endpoint = |name| {
                    fields
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or(ParseError::Malformed {
                            line,
                            expected: name,
                            found: raw.trim().to_string(),
                        })
                };
                let u = endpoint("edge endpoint")?;
                let v = endpoint("edge endpoint")?;
                for x in [u, v] {
                    if x < 1 || x > n {
                        return Err(ParseError::IndexOutOfRange { line, index: x, n });
                    }
                }
                if u == v {
                    return Err(ParseError::SelfLoop { line, vertex: u });
                }
                edges.push((u - 1, v - 1));
            }
            _ => {
                return Err(ParseError::Malformed {
                    line,
                    expected: "`c`, `p` or `e` line",
                    found: raw.trim().to_string(),
                })
            }
        }
    }

    match n {
        Some(n) => Ok(Graph::from_edges(n, edges)),
        None => Err(ParseError::MissingHeader),
    }
}
