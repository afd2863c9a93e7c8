//! Search environments: the partition of unmatched vertices into bidomains.
//!
//! A bidomain pairs a set of pattern vertices with a set of target vertices
//! that share the same adjacency history towards every matched pair, so only
//! within-bidomain matches can extend the current solution. The sum of
//! `min(|left|, |right|)` over all bidomains bounds how many matches can
//! still be added. Labels are never materialized; splitting on each match
//! maintains the same partition incrementally.

use std::fmt::Write as _;

use crate::graph::{Graph, VertexId};

/// One bidomain: mutually matchable pattern (`left`) and target (`right`)
/// vertices. Both sides are always nonempty; empty-sided pairs are dropped
/// at the operation that empties them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bidomain {
    left: Vec<VertexId>,
    right: Vec<VertexId>,
}

impl Bidomain {
    pub fn new(left: Vec<VertexId>, right: Vec<VertexId>) -> Self {
        assert!(
            !left.is_empty() && !right.is_empty(),
            "bidomain sides must be nonempty"
        );
        Self { left, right }
    }

    pub fn left(&self) -> &[VertexId] {
        &self.left
    }

    pub fn right(&self) -> &[VertexId] {
        &self.right
    }

    /// Domain size used for selection: `max(|left|, |right|)`.
    pub fn size(&self) -> usize {
        self.left.len().max(self.right.len())
    }

    /// Matches this domain can still contribute: `min(|left|, |right|)`.
    pub fn capacity(&self) -> usize {
        self.left.len().min(self.right.len())
    }
}

/// Ordered collection of bidomains; the search state next to the current
/// assignment. Left sets are pairwise disjoint across domains, as are right
/// sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    domains: Vec<Bidomain>,
}

impl Environment {
    /// The root environment: every pattern vertex may match every target
    /// vertex. Both graphs must be nonempty (callers short-circuit empty
    /// inputs).
    pub fn initial(gp: &Graph, gt: &Graph) -> Self {
        assert!(
            gp.vertex_count() > 0 && gt.vertex_count() > 0,
            "initial environment requires nonempty graphs"
        );
        Environment {
            domains: vec![Bidomain::new(
                gp.vertices().collect(),
                gt.vertices().collect(),
            )],
        }
    }

    /// Builds an environment from explicit domains (test fixtures, replay).
    pub fn from_domains(domains: Vec<Bidomain>) -> Self {
        debug_assert!(sides_disjoint(&domains), "domain sides must be disjoint");
        Environment { domains }
    }

    pub fn domains(&self) -> &[Bidomain] {
        &self.domains
    }

    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    /// Upper bound on the number of matches this environment can still
    /// provide: the sum of `min(|left|, |right|)` over all domains.
    pub fn bound_sum(&self) -> usize {
        self.domains.iter().map(Bidomain::capacity).sum()
    }

    /// Index of the branching domain: smallest `max(|left|, |right|)`, ties
    /// broken by the largest pattern-vertex degree on the left, then by the
    /// lowest index.
    pub fn select_domain(&self, gp: &Graph) -> usize {
        assert!(!self.domains.is_empty(), "select_domain on empty environment");
        let key = |d: &Bidomain| {
            let max_degree = d.left.iter().map(|&v| gp.degree(v)).max().unwrap_or(0);
            (d.size(), std::cmp::Reverse(max_degree))
        };
        let mut best = 0;
        let mut best_key = key(&self.domains[0]);
        for (i, d) in self.domains.iter().enumerate().skip(1) {
            let k = key(d);
            if k < best_key {
                best = i;
                best_key = k;
            }
        }
        best
    }

    /// The child environment after matching `(v, w)`: `v` and `w` are
    /// consumed, and every domain is partitioned into the part adjacent to
    /// the match and the part not adjacent to it. The adjacent part comes
    /// first; relative vertex order is preserved; empty-sided parts are
    /// dropped.
    ///
    /// Panics unless `v` sits on the left and `w` on the right of the same
    /// domain.
    pub fn split(&self, v: VertexId, w: VertexId, gp: &Graph, gt: &Graph) -> Environment {
        let host_v = self.domains.iter().position(|d| d.left.contains(&v));
        let host_w = self.domains.iter().position(|d| d.right.contains(&w));
        match (host_v, host_w) {
            (Some(a), Some(b)) if a == b => {}
            _ => panic!("split: pair ({v:?}, {w:?}) is not co-resident in one domain"),
        }

        let mut domains = Vec::with_capacity(self.domains.len() * 2);
        for d in &self.domains {
            let mut adj = (Vec::new(), Vec::new());
            let mut non = (Vec::new(), Vec::new());
            for &u in &d.left {
                if u == v {
                    continue;
                }
                if gp.adjacent(u, v) {
                    adj.0.push(u);
                } else {
                    non.0.push(u);
                }
            }
            for &x in &d.right {
                if x == w {
                    continue;
                }
                if gt.adjacent(x, w) {
                    adj.1.push(x);
                } else {
                    non.1.push(x);
                }
            }
            if !adj.0.is_empty() && !adj.1.is_empty() {
                domains.push(Bidomain {
                    left: adj.0,
                    right: adj.1,
                });
            }
            if !non.0.is_empty() && !non.1.is_empty() {
                domains.push(Bidomain {
                    left: non.0,
                    right: non.1,
                });
            }
        }
        Environment { domains }
    }

    /// The environment with `v` deleted from its domain's left side; the
    /// domain is dropped when that empties it. Panics if `v` is absent.
    pub fn remove_left_vertex(&self, v: VertexId) -> Environment {
        let host = self
            .domains
            .iter()
            .position(|d| d.left.contains(&v))
            .unwrap_or_else(|| panic!("remove_left_vertex: {v:?} not present"));
        let mut domains = Vec::with_capacity(self.domains.len());
        for (i, d) in self.domains.iter().enumerate() {
            if i != host {
                domains.push(d.clone());
                continue;
            }
            let left: Vec<VertexId> = d.left.iter().copied().filter(|&u| u != v).collect();
            if !left.is_empty() {
                domains.push(Bidomain {
                    left,
                    right: d.right.clone(),
                });
            }
        }
        Environment { domains }
    }

    /// Golden-test dump: one domain per line, `left | right`, ids ascending.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for d in &self.domains {
            let mut left = d.left.clone();
            let mut right = d.right.clone();
            left.sort_unstable();
            right.sort_unstable();
            let fmt = |ids: &[VertexId]| {
                ids.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "{} | {}", fmt(&left), fmt(&right));
        }
        out
    }
}

fn sides_disjoint(domains: &[Bidomain]) -> bool {
    let mut lefts = std::collections::HashSet::new();
    let mut rights = std::collections::HashSet::new();
    for d in domains {
        for &v in &d.left {
            if !lefts.insert(v) {
                return false;
            }
        }
        for &w in &d.right {
            if !rights.insert(w) {
                return false;
            }
        }
    }
    true
}
