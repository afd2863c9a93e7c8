//! The recursive branch-and-bound search.
//!
//! Each call bounds the subtree by `|curSol| + bound_sum(env)` and prunes
//! when that cannot beat the incumbent. Otherwise it picks a bidomain, lets
//! the active policy choose a pattern vertex `v` and an ordering of the
//! domain's target vertices, branches on each `(v, w)` match (splitting the
//! environment and crediting rewards), and finally branches on discarding
//! `v`. Budgets interrupt the search cooperatively at call granularity.

use std::time::{Duration, Instant};

use crate::environment::{Bidomain, Environment};
use crate::graph::{Assignment, Graph, VertexId};
use crate::policy::{
    order_w, select_v, HybridController, HybridMode, RlReward, ScoreTables,
};

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The search tree was exhausted; the result is a proven optimum.
    Optimal,
    /// The wall-clock budget ran out; the result is the best incumbent.
    TimedOut,
    /// The node budget ran out; the result is the best incumbent.
    NodeBudgetExhausted,
}

/// Everything a solver run can be configured with. `Default` gives the
/// standard parameters: alternate hybrid policy, `t_v = 10^5`,
/// `t_vw = 10^9`, and `max_nb_app` resolved per instance to
/// `2 * min(|Vp|, |Vt|)`.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub policy: HybridMode,
    /// Decay threshold for the vertex score tables.
    pub t_v: u64,
    /// Decay threshold for the pair score tables.
    pub t_vw: u64,
    /// Selections between policy swaps in alternate mode; `None` resolves
    /// to `2 * min(|Vp|, |Vt|)` per instance.
    pub max_nb_app: Option<u64>,
    /// Match degree-1 neighbors of a matched pair in bulk.
    pub lum: bool,
    pub time_budget: Option<Duration>,
    pub node_budget: Option<u64>,
    pub seed: u64,
    pub rl_reward: RlReward,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            policy: HybridMode::Alternate,
            t_v: 100_000,
            t_vw: 1_000_000_000,
            max_nb_app: None,
            lum: false,
            time_budget: None,
            node_budget: None,
            seed: 0,
            rl_reward: RlReward::SumDelta,
        }
    }
}

impl SolverConfig {
    /// The swap period actually used for a given instance.
    pub fn max_nb_app_for(&self, gp: &Graph, gt: &Graph) -> u64 {
        self.max_nb_app
            .unwrap_or(2 * gp.vertex_count().min(gt.vertex_count()) as u64)
    }
}

/// Counters describing one search run. All counters are monotone while the
/// run is in flight.
#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    /// Subtrees cut by the upper bound.
    pub prunes: u64,
    /// Policy swaps performed by the alternate controller.
    pub policy_switches: u64,
    /// Times the incumbent grew.
    pub incumbent_updates: u64,
    /// Deepest recursion level reached (root = 0).
    pub max_depth: usize,
    /// `(recursive_calls at the update, new size)` per incumbent update.
    pub incumbent_trace: Vec<(u64, usize)>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Best assignment found; a proven optimum when `status` is `Optimal`.
    pub best: Assignment,
    pub size: usize,
    /// Entries into the recursive search procedure, pruned calls included.
    pub recursive_calls: u64,
    pub elapsed: Duration,
    pub status: Status,
    pub stats: SearchStats,
}

/// True iff `a` is injective on both sides and matched pairs agree on
/// adjacency: for every two pairs, the pattern vertices are adjacent
/// exactly when the target vertices are.
pub fn check_solution(gp: &Graph, gt: &Graph, a: &Assignment) -> bool {
    let pairs = a.pairs();
    for (i, &(v, w)) in pairs.iter().enumerate() {
        for &(v2, w2) in &pairs[i + 1..] {
            if v == v2 || w == w2 {
                return false;
            }
            if gp.adjacent(v, v2) != gt.adjacent(w, w2) {
                return false;
            }
        }
    }
    true
}

/// The degree-1 neighbors of `v` and `w` that are still in the environment,
/// paired smallest-id first. Leaves carry no constraints besides their
/// matched center, so the pairing is exchange-safe.
fn lum_pairs(
    gp: &Graph,
    gt: &Graph,
    v: VertexId,
    w: VertexId,
    env: &Environment,
) -> Vec<(VertexId, VertexId)> {
    let pattern_leaves: Vec<VertexId> = gp.leaf_neighbors(v).collect();
    let target_leaves: Vec<VertexId> = gt.leaf_neighbors(w).collect();
    if pattern_leaves.is_empty() || target_leaves.is_empty() {
        return Vec::new();
    }
    let mut present_p = Vec::new();
    let mut present_t = Vec::new();
    for d in env.domains() {
        present_p.extend(d.left().iter().copied().filter(|u| pattern_leaves.contains(u)));
        present_t.extend(d.right().iter().copied().filter(|x| target_leaves.contains(x)));
    }
    present_p.sort_unstable();
    present_t.sort_unstable();
    let k = present_p.len().min(present_t.len());
    present_p[..k]
        .iter()
        .copied()
        .zip(present_t[..k].iter().copied())
        .collect()
}

/// Deletes already-matched vertices from the environment. A leaf has no
/// unmatched neighbors, so consuming a leaf pair never partitions a domain;
/// it only removes the two vertices, dropping domains an empty side.
fn consume_pairs(env: &Environment, pairs: &[(VertexId, VertexId)]) -> Environment {
    let mut domains = Vec::with_capacity(env.domain_count());
    for d in env.domains() {
        let left: Vec<VertexId> = d
            .left()
            .iter()
            .copied()
            .filter(|&u| !pairs.iter().any(|&(pu, _)| pu == u))
            .collect();
        let right: Vec<VertexId> = d
            .right()
            .iter()
            .copied()
            .filter(|&x| !pairs.iter().any(|&(_, px)| px == x))
            .collect();
        if !left.is_empty() && !right.is_empty() {
            domains.push(Bidomain::new(left, right));
        }
    }
    Environment::from_domains(domains)
}

/// Leaf-union matching: after matching `(v, w)`, pair the still-available
/// degree-1 neighbors of `v` with those of `w` (smallest ids first, as many
/// as both sides allow) and consume them from the environment. Returns the
/// reduced environment and the extended assignment; a no-op when either
/// side has no leaves left.
pub fn lum_extend(
    gp: &Graph,
    gt: &Graph,
    v: VertexId,
    w: VertexId,
    env: &Environment,
    cur: &Assignment,
) -> (Environment, Assignment) {
    let pairs = lum_pairs(gp, gt, v, w, env);
    let mut extended = cur.clone();
    for &(u, x) in &pairs {
        extended.push(u, x);
    }
    if pairs.is_empty() {
        (env.clone(), extended)
    } else {
        (consume_pairs(env, &pairs), extended)
    }
}

/// Solves the maximum common induced subgraph problem for `gp` and `gt`.
///
/// With no budgets the result is a proven optimum. With budgets the search
/// stops at the first call past the limit and reports the incumbent with
/// the corresponding status. Runs with equal inputs, configuration and seed
/// are fully deterministic apart from `elapsed`.
pub fn solve(gp: &Graph, gt: &Graph, cfg: &SolverConfig) -> SolveResult {
    solve_observed(gp, gt, cfg, |_, _, _| {})
}

/// Like [`solve`], invoking `on_prune(env, cur, incumbent_size)` at every
/// bound cutoff. Instrumentation hook for diagnostics and tests; the no-op
/// closure in [`solve`] compiles away.
pub fn solve_observed<F>(gp: &Graph, gt: &Graph, cfg: &SolverConfig, on_prune: F) -> SolveResult
where
    F: FnMut(&Environment, &Assignment, usize),
{
    let start = Instant::now();
    if let Some(b) = cfg.node_budget {
        assert!(b > 0, "node budget must be positive");
    }
    if let Some(t) = cfg.time_budget {
        assert!(t > Duration::ZERO, "time budget must be positive");
    }

    let np = gp.vertex_count();
    let nt = gt.vertex_count();
    if np == 0 || nt == 0 {
        return SolveResult {
            best: Assignment::new(),
            size: 0,
            recursive_calls: 0,
            elapsed: start.elapsed(),
            status: Status::Optimal,
            stats: SearchStats::default(),
        };
    }

    let max_dep = np.min(nt);
    let mut search = Search {
        gp,
        gt,
        lum: cfg.lum,
        rl_reward: cfg.rl_reward,
        node_budget: cfg.node_budget,
        deadline: cfg.time_budget.map(|t| start + t),
        tables: ScoreTables::new(np, nt, cfg.t_v, cfg.t_vw),
        controller: HybridController::new(
            cfg.policy,
            cfg.max_nb_app_for(gp, gt),
            max_dep,
            cfg.seed,
        ),
        best: Assignment::new(),
        calls: 0,
        stats: SearchStats::default(),
        interrupted: None,
        on_prune,
    };

    let env = Environment::initial(gp, gt);
    let mut cur = Assignment::new();
    search.mcs(&env, &mut cur, 0);

    let size = search.best.len();
    SolveResult {
        best: search.best,
        size,
        recursive_calls: search.calls,
        elapsed: start.elapsed(),
        status: search.interrupted.unwrap_or(Status::Optimal),
        stats: search.stats,
    }
}

struct Search<'a, F> {
    gp: &'a Graph,
    gt: &'a Graph,
    lum: bool,
    rl_reward: RlReward,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    tables: ScoreTables,
    controller: HybridController,
    best: Assignment,
    calls: u64,
    stats: SearchStats,
    interrupted: Option<Status>,
    on_prune: F,
}

impl<F: FnMut(&Environment, &Assignment, usize)> Search<'_, F> {
    fn mcs(&mut self, env: &Environment, cur: &mut Assignment, depth: usize) {
        if self.interrupted.is_some() {
            return;
        }
        if let Some(budget) = self.node_budget {
            if self.calls >= budget {
                self.interrupted = Some(Status::NodeBudgetExhausted);
                return;
            }
        }
        self.calls += 1;
        if depth > self.stats.max_depth {
            self.stats.max_depth = depth;
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.interrupted = Some(Status::TimedOut);
                return;
            }
        }

        let parent_bound = env.bound_sum();
        if cur.len() + parent_bound <= self.best.len() {
            self.stats.prunes += 1;
            (self.on_prune)(env, cur, self.best.len());
            return;
        }
        // The bound check guarantees a nonempty environment here: an empty
        // one bounds to |cur| <= |best|.
        let domain_idx = env.select_domain(self.gp);

        let kind_v = self.controller.policy_for_node(cur.len() + 1);
        let v = select_v(&env.domains()[domain_idx], &self.tables, kind_v, self.gp);
        self.note_selection();

        let kind_w = self.controller.current();
        let targets = order_w(&env.domains()[domain_idx], v, &self.tables, kind_w, self.gt);

        for w in targets {
            if self.interrupted.is_some() {
                return;
            }
            self.note_selection();

            cur.push(v, w);
            self.maybe_improve(cur);

            let child = env.split(v, w, self.gp, self.gt);
            let sum_delta = (parent_bound - child.bound_sum()) as u64;
            let r_dal = sum_delta + child.domain_count() as u64;
            let r_rl = match self.rl_reward {
                RlReward::SumDelta => sum_delta,
                RlReward::UbDelta => sum_delta - 1,
            };
            self.tables.update(v, w, r_rl, r_dal);

            // Leaf-union matching extends the solution but earns no policy
            // rewards: only branching decisions are credited.
            let mut lum_added = 0;
            let child = if self.lum {
                let pairs = lum_pairs(self.gp, self.gt, v, w, &child);
                if pairs.is_empty() {
                    child
                } else {
                    for &(u, x) in &pairs {
                        cur.push(u, x);
                    }
                    lum_added = pairs.len();
                    let consumed = consume_pairs(&child, &pairs);
                    self.maybe_improve(cur);
                    consumed
                }
            } else {
                child
            };

            self.mcs(&child, cur, depth + 1);

            for _ in 0..lum_added {
                cur.pop();
            }
            cur.pop();
        }

        if self.interrupted.is_some() {
            return;
        }
        let reduced = env.remove_left_vertex(v);
        self.mcs(&reduced, cur, depth + 1);
    }

    fn note_selection(&mut self) {
        if self.controller.on_selection() {
            self.stats.policy_switches += 1;
        }
    }

    fn maybe_improve(&mut self, cur: &Assignment) {
        if cur.len() > self.best.len() {
            debug_assert!(
                check_solution(self.gp, self.gt, cur),
                "incumbent must be a valid common induced subgraph"
            );
            self.best = cur.clone();
            self.stats.incumbent_updates += 1;
            self.stats.incumbent_trace.push((self.calls, cur.len()));
            self.controller.on_improvement();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;
    use crate::oracle::brute_force_mcs;
    use crate::policy::PolicyKind;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn cfg(policy: HybridMode) -> SolverConfig {
        SolverConfig {
            policy,
            ..SolverConfig::default()
        }
    }

    fn all_modes() -> Vec<HybridMode> {
        vec![
            HybridMode::Single(PolicyKind::Degree),
            HybridMode::Single(PolicyKind::Rl),
            HybridMode::Single(PolicyKind::Dal),
            HybridMode::Single(PolicyKind::Ll),
            HybridMode::Alternate,
            HybridMode::Random,
            HybridMode::Depth,
        ]
    }

    #[test]
    fn matches_equal_edges() {
        let k2 = Graph::from_edges(2, [(0, 1)]);
        let r = solve(&k2, &k2, &SolverConfig::default());
        assert_eq!(r.size, 2);
        assert_eq!(r.status, Status::Optimal);
        assert!(check_solution(&k2, &k2, &r.best));
    }

    #[test]
    fn path_against_triangle_matches_an_edge() {
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(solve(&p3, &k3, &SolverConfig::default()).size, 2);
    }

    #[test]
    fn empty_inputs_short_circuit() {
        let empty = Graph::from_edges(0, []);
        let k2 = Graph::from_edges(2, [(0, 1)]);
        for (a, b) in [(&empty, &k2), (&k2, &empty), (&empty, &empty)] {
            let r = solve(a, b, &SolverConfig::default());
            assert_eq!((r.size, r.recursive_calls), (0, 0));
            assert_eq!(r.status, Status::Optimal);
        }
    }

    #[test]
    fn root_bound_is_the_smaller_vertex_count() {
        let mut rng = SplitMix64::new(3);
        let gp = erdos_renyi(5, 0.5, &mut rng);
        let gt = erdos_renyi(8, 0.5, &mut rng);
        assert_eq!(Environment::initial(&gp, &gt).bound_sum(), 5);
    }

    #[test]
    fn check_solution_examples() {
        let k2 = Graph::from_edges(2, [(0, 1)]);
        let ok = Assignment::from_pairs(vec![(VertexId(0), VertexId(0)), (VertexId(1), VertexId(1))]);
        assert!(check_solution(&k2, &k2, &ok));

        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let bad = Assignment::from_pairs(vec![
            (VertexId(0), VertexId(0)),
            (VertexId(1), VertexId(1)),
            (VertexId(2), VertexId(2)),
        ]);
        assert!(!check_solution(&p3, &k3, &bad));

        assert!(check_solution(&k2, &k2, &Assignment::new()));
    }

    #[test]
    fn check_solution_rejects_non_injective_sides() {
        let k2 = Graph::from_edges(2, [(0, 1)]);
        let dup = Assignment::from_pairs(vec![(VertexId(0), VertexId(0)), (VertexId(0), VertexId(1))]);
        assert!(!check_solution(&k2, &k2, &dup));
    }

    #[test]
    fn lum_extend_pairs_min_of_both_leaf_sets() {
        // v = 0 has leaves {3, 4}; w = 0 has leaf {2} only.
        let gp = Graph::from_edges(5, [(0, 3), (0, 4), (0, 1), (1, 2)]);
        let gt = Graph::from_edges(4, [(0, 2), (0, 1), (1, 3)]);
        let env = Environment::initial(&gp, &gt)
            .split(VertexId(0), VertexId(0), &gp, &gt);
        let cur = Assignment::from_pairs(vec![(VertexId(0), VertexId(0))]);
        let (out_env, out_cur) = lum_extend(&gp, &gt, VertexId(0), VertexId(0), &env, &cur);
        assert_eq!(out_cur.pairs().last(), Some(&(VertexId(3), VertexId(2))));
        assert_eq!(out_cur.len(), 2);
        assert!(out_env.bound_sum() < env.bound_sum());
    }

    #[test]
    fn lum_extend_without_leaves_is_a_no_op() {
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let env = Environment::initial(&k3, &k3).split(VertexId(0), VertexId(0), &k3, &k3);
        let cur = Assignment::from_pairs(vec![(VertexId(0), VertexId(0))]);
        let (out_env, out_cur) = lum_extend(&k3, &k3, VertexId(0), VertexId(0), &env, &cur);
        assert_eq!(out_env, env);
        assert_eq!(out_cur, cur);
    }

    #[test]
    fn lum_matches_stars_completely() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let env = Environment::initial(&star, &star).split(VertexId(0), VertexId(0), &star, &star);
        let cur = Assignment::from_pairs(vec![(VertexId(0), VertexId(0))]);
        let (out_env, out_cur) = lum_extend(&star, &star, VertexId(0), VertexId(0), &env, &cur);
        assert_eq!(out_cur.len(), 4);
        assert!(out_env.is_empty());
        assert!(check_solution(&star, &star, &out_cur));

        let with_lum = SolverConfig {
            lum: true,
            ..SolverConfig::default()
        };
        assert_eq!(solve(&star, &star, &with_lum).size, 4);
    }

    #[test]
    fn node_budget_interrupts_with_status() {
        let mut rng = SplitMix64::new(11);
        let gp = erdos_renyi(8, 0.5, &mut rng);
        let gt = erdos_renyi(8, 0.5, &mut rng);
        let c = SolverConfig {
            node_budget: Some(5),
            ..SolverConfig::default()
        };
        let r = solve(&gp, &gt, &c);
        assert_eq!(r.status, Status::NodeBudgetExhausted);
        assert!(r.recursive_calls <= 5);
        assert!(check_solution(&gp, &gt, &r.best));
    }

    #[test]
    fn identical_runs_are_identical() {
        let mut rng = SplitMix64::new(21);
        let gp = erdos_renyi(7, 0.5, &mut rng);
        let gt = erdos_renyi(7, 0.5, &mut rng);
        for mode in [HybridMode::Alternate, HybridMode::Random, HybridMode::Depth] {
            let mut c = cfg(mode);
            c.seed = 1234;
            let a = solve(&gp, &gt, &c);
            let b = solve(&gp, &gt, &c);
            assert_eq!(a.recursive_calls, b.recursive_calls);
            assert_eq!(a.size, b.size);
            assert_eq!(a.stats.incumbent_trace, b.stats.incumbent_trace);
            assert_eq!(a.best, b.best);
            // The incumbent only ever grows.
            let sizes: Vec<usize> = a.stats.incumbent_trace.iter().map(|&(_, s)| s).collect();
            assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn every_mode_finds_the_same_optimum() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..8 {
            let gp = erdos_renyi(1 + rng.next_below(7) as usize, 0.5, &mut rng);
            let gt = erdos_renyi(1 + rng.next_below(7) as usize, 0.5, &mut rng);
            let expected = brute_force_mcs(&gp, &gt).unwrap().size;
            for mode in all_modes() {
                for lum in [false, true] {
                    let mut c = cfg(mode);
                    c.lum = lum;
                    let r = solve(&gp, &gt, &c);
                    assert_eq!(r.size, expected, "mode {mode:?} lum {lum}");
                    assert!(check_solution(&gp, &gt, &r.best));
                }
            }
        }
    }

    /// Every pruned subtree really contains nothing better than the
    /// incumbent: replay pruned nodes and exhaust their subproblems with an
    /// enumerator that only uses graph adjacency plus domain co-residency.
    #[test]
    fn pruned_subtrees_cannot_beat_the_incumbent() {
        fn max_extension(
            gp: &Graph,
            gt: &Graph,
            domains: &[(Vec<VertexId>, Vec<VertexId>)],
            chosen: &mut Vec<(VertexId, VertexId)>,
        ) -> usize {
            let mut best = chosen.len();
            for (left, right) in domains {
                for &l in left {
                    if chosen.iter().any(|&(a, _)| a == l) {
                        continue;
                    }
                    for &r in right {
                        if chosen.iter().any(|&(_, b)| b == r) {
                            continue;
                        }
                        if chosen
                            .iter()
                            .all(|&(a, b)| gp.adjacent(l, a) == gt.adjacent(r, b))
                        {
                            chosen.push((l, r));
                            best = best.max(max_extension(gp, gt, domains, chosen));
                            chosen.pop();
                        }
                    }
                }
            }
            best
        }

        let mut rng = SplitMix64::new(77);
        for _ in 0..6 {
            let gp = erdos_renyi(5, 0.5, &mut rng);
            let gt = erdos_renyi(5, 0.5, &mut rng);
            let mut pruned: Vec<(Environment, usize, usize)> = Vec::new();
            solve_observed(&gp, &gt, &SolverConfig::default(), |env, cur, incumbent| {
                if pruned.len() < 40 {
                    pruned.push((env.clone(), cur.len(), incumbent));
                }
            });
            for (env, cur_len, incumbent) in pruned {
                let domains: Vec<_> = env
                    .domains()
                    .iter()
                    .map(|d| (d.left().to_vec(), d.right().to_vec()))
                    .collect();
                let extension = max_extension(&gp, &gt, &domains, &mut Vec::new());
                assert!(cur_len + extension <= incumbent);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn solver_agrees_with_the_oracle(
            np in 1usize..8, nt in 1usize..8, seed in 0u64..1000,
            p in prop::sample::select(vec![0.2, 0.5, 0.8]),
        ) {
            let mut rng = SplitMix64::new(seed);
            let gp = erdos_renyi(np, p, &mut rng);
            let gt = erdos_renyi(nt, p, &mut rng);
            let truth = brute_force_mcs(&gp, &gt).unwrap().size;
            let mut c = cfg(HybridMode::Alternate);
            c.seed = seed;
            c.lum = seed % 2 == 0;
            let r = solve(&gp, &gt, &c);
            prop_assert_eq!(r.size, truth);
            prop_assert!(check_solution(&gp, &gt, &r.best));
        }
    }
}
