//! Brute-force reference solver for small instances.
//!
//! Deliberately independent of the bidomain machinery: it shares only
//! [`Graph`] with the search, enumerating partial injective mappings in
//! vertex order with an incremental consistency check and no bound. This is
//! the ground truth that the equivalence test suites compare against.

use thiserror::Error;

use crate::graph::{Assignment, Graph, VertexId};
use crate::solver::{solve, SolverConfig};

/// Largest `min(|Vp|, |Vt|)` the oracle accepts.
pub const ORACLE_MAX_MIN_SIDE: usize = 10;
/// Largest `max(|Vp|, |Vt|)` the oracle accepts.
pub const ORACLE_MAX_SIDE: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(
        "instance too large for exhaustive search: sides {np} and {nt} \
         (limits: min side {min_limit}, either side {side_limit})"
    )]
    TooLarge {
        np: usize,
        nt: usize,
        min_limit: usize,
        side_limit: usize,
    },
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Size of a maximum common induced subgraph.
    pub size: usize,
    /// One maximum assignment.
    pub witness: Assignment,
    /// Number of partial mappings visited.
    pub explored: u64,
}

/// Exhaustive maximum common induced subgraph search.
///
/// Refuses instances beyond the size guards instead of running for hours.
pub fn brute_force_mcs(gp: &Graph, gt: &Graph) -> Result<OracleResult, OracleError> {
    let (np, nt) = (gp.vertex_count(), gt.vertex_count());
    if np.min(nt) > ORACLE_MAX_MIN_SIDE || np.max(nt) > ORACLE_MAX_SIDE {
        return Err(OracleError::TooLarge {
            np,
            nt,
            min_limit: ORACLE_MAX_MIN_SIDE,
            side_limit: ORACLE_MAX_SIDE,
        });
    }

    let mut state = Enumeration {
        gp,
        gt,
        used: vec![false; nt],
        current: Vec::new(),
        best: Vec::new(),
        explored: 0,
    };
    state.extend(0);
    Ok(OracleResult {
        size: state.best.len(),
        witness: Assignment::from_pairs(state.best),
        explored: state.explored,
    })
}

struct Enumeration<'a> {
    gp: &'a Graph,
    gt: &'a Graph,
    used: Vec<bool>,
    current: Vec<(VertexId, VertexId)>,
    best: Vec<(VertexId, VertexId)>,
    explored: u64,
}

impl Enumeration<'_> {
    fn extend(&mut self, next: usize) {
        self.explored += 1;
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if next == self.gp.vertex_count() {
            return;
        }
        let v = VertexId(next as u32);
        for t in 0..self.gt.vertex_count() {
            if self.used[t] {
                continue;
            }
            let w = VertexId(t as u32);
            if self.consistent(v, w) {
                self.used[t] = true;
                self.current.push((v, w));
                self.extend(next + 1);
                self.current.pop();
                self.used[t] = false;
            }
        }
        // The branch where `next` stays unmatched.
        self.extend(next + 1);
    }

    fn consistent(&self, v: VertexId, w: VertexId) -> bool {
        self.current
            .iter()
            .all(|&(pv, pw)| self.gp.adjacent(v, pv) == self.gt.adjacent(w, pw))
    }
}

/// True when the branch-and-bound solver and the brute-force oracle agree
/// on the optimum size. Panics if the instance exceeds the oracle guard.
pub fn oracle_agrees(gp: &Graph, gt: &Graph, cfg: &SolverConfig) -> bool {
    let truth = brute_force_mcs(gp, gt).expect("instance within the oracle size guard");
    solve(gp, gt, cfg).size == truth.size
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;
    use crate::rng::SplitMix64;
    use crate::solver::check_solution;
    use proptest::prelude::*;

    fn k2() -> Graph {
        Graph::from_edges(2, [(0, 1)])
    }

    #[test]
    fn complete_pair_matches_fully() {
        let r = brute_force_mcs(&k2(), &k2()).unwrap();
        assert_eq!(r.size, 2);
        assert!(check_solution(&k2(), &k2(), &r.witness));
    }

    #[test]
    fn path_in_triangle_leaves_one_vertex_out() {
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(brute_force_mcs(&p3, &k3).unwrap().size, 2);
    }

    #[test]
    fn isomorphic_cycles_match_completely() {
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(brute_force_mcs(&c5, &c5).unwrap().size, 5);
    }

    #[test]
    fn degenerate_sizes() {
        let empty = Graph::from_edges(0, []);
        let one = Graph::from_edges(1, []);
        assert_eq!(brute_force_mcs(&empty, &one).unwrap().size, 0);
        assert_eq!(brute_force_mcs(&one, &one).unwrap().size, 1);
    }

    #[test]
    fn oracle_agrees_on_small_instances() {
        let cfg = SolverConfig::default();
        let mut rng = SplitMix64::new(31);
        for _ in 0..10 {
            let gp = erdos_renyi(1 + rng.next_below(8) as usize, 0.5, &mut rng);
            let gt = erdos_renyi(1 + rng.next_below(8) as usize, 0.5, &mut rng);
            assert!(oracle_agrees(&gp, &gt, &cfg));
        }
        let empty = Graph::from_edges(0, []);
        let one = Graph::from_edges(1, []);
        assert!(oracle_agrees(&empty, &one, &cfg));
        assert!(oracle_agrees(&one, &one, &cfg));
    }

    #[test]
    fn guard_refuses_oversized_instances() {
        let big = Graph::from_edges(17, []);
        let small = Graph::from_edges(2, [(0, 1)]);
        assert!(matches!(
            brute_force_mcs(&big, &small),
            Err(OracleError::TooLarge { .. })
        ));
        let eleven = Graph::from_edges(11, []);
        assert!(brute_force_mcs(&eleven, &eleven).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn size_is_symmetric(np in 1usize..7, nt in 1usize..7, seed in 0u64..300) {
            let mut rng = SplitMix64::new(seed);
            let gp = erdos_renyi(np, 0.5, &mut rng);
            let gt = erdos_renyi(nt, 0.5, &mut rng);
            prop_assert_eq!(
                brute_force_mcs(&gp, &gt).unwrap().size,
                brute_force_mcs(&gt, &gp).unwrap().size
            );
        }

        #[test]
        fn adding_a_target_vertex_never_shrinks_the_optimum(
            np in 1usize..7, nt in 1usize..6, seed in 0u64..300,
        ) {
            let mut rng = SplitMix64::new(seed);
            let gp = erdos_renyi(np, 0.5, &mut rng);
            let gt = erdos_renyi(nt, 0.5, &mut rng);
            let before = brute_force_mcs(&gp, &gt).unwrap().size;

            // Extend gt by one vertex with arbitrary edges into the old part.
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for v in gt.vertices() {
                for &u in gt.neighbors(v) {
                    if v < u {
                        edges.push((v.index(), u.index()));
                    }
                }
                if rng.next_bool() {
                    edges.push((v.index(), nt));
                }
            }
            let bigger = Graph::from_edges(nt + 1, edges);
            let after = brute_force_mcs(&gp, &bigger).unwrap().size;
            prop_assert!(after >= before);
        }

        #[test]
        fn optimum_sits_between_one_and_the_smaller_side(
            np in 1usize..8, nt in 1usize..8, seed in 0u64..300,
        ) {
            let mut rng = SplitMix64::new(seed);
            let gp = erdos_renyi(np, 0.5, &mut rng);
            let gt = erdos_renyi(nt, 0.5, &mut rng);
            let r = brute_force_mcs(&gp, &gt).unwrap();
            prop_assert!(r.size >= 1);
            prop_assert!(r.size <= np.min(nt));
            prop_assert!(check_solution(&gp, &gt, &r.witness));
        }
    }
}
