//! Branching policies: match rewards, decayed score tables, vertex and
//! target selection, and the hybrid policy controller.
//!
//! Every match `(v, w)` earns two rewards. The RL reward is the drop in the
//! environment's bound sum caused by the split. The DAL reward adds the
//! child environment's domain count on top, crediting matches that break
//! the environment into many small domains and not just matches that shrink
//! the bound. Rewards accumulate per pattern vertex, per target vertex and
//! per pair; each table is halved whenever one of its entries reaches its
//! decay threshold, so stale scores fade instead of locking the search onto
//! a few vertices.

use rustc_hash::FxHashMap;

use crate::environment::{Bidomain, Environment};
use crate::graph::{Graph, VertexId};
use crate::rng::SplitMix64;

/// Which score drives vertex and target selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Static degrees, no learning.
    Degree,
    /// Accumulated bound-reduction rewards per vertex.
    Rl,
    /// Accumulated domain-action rewards per vertex and per pair.
    Dal,
    /// RL vertex scores combined with pair memory for target ordering.
    Ll,
}

/// How the active policy evolves during the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HybridMode {
    /// One fixed policy for the whole run.
    Single(PolicyKind),
    /// Swap between RL and DAL every `max_nb_app` selections.
    Alternate,
    /// Sample RL or DAL uniformly at every branch node.
    Random,
    /// RL in the first and third quarter of the match depth range, DAL
    /// elsewhere.
    Depth,
}

/// Which reward feeds the RL-side tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RlReward {
    /// Drop of the bound sum across the split (always at least 1).
    #[default]
    SumDelta,
    /// Drop of the full upper bound, i.e. the sum delta minus the match
    /// itself (can be 0).
    UbDelta,
}

/// RL reward of a split: how much the bound sum dropped.
///
/// `child` must have been produced from `env` by [`Environment::split`].
pub fn reward_rl(env: &Environment, child: &Environment) -> u64 {
    env.bound_sum()
        .checked_sub(child.bound_sum())
        .expect("child environment must come from a split of env") as u64
}

/// DAL reward of a split: bound-sum drop plus the child's domain count.
pub fn reward_dal(env: &Environment, child: &Environment) -> u64 {
    reward_rl(env, child) + child.domain_count() as u64
}

/// Accumulative reward store, sparse or dense depending on instance size.
#[derive(Clone, Debug)]
enum PairTable {
    Dense { nt: usize, values: Vec<u64> },
    Sparse(FxHashMap<(u32, u32), u64>),
}

const DENSE_PAIR_LIMIT: usize = 1 << 20;

impl PairTable {
    fn new(np: usize, nt: usize) -> Self {
        if np.saturating_mul(nt) <= DENSE_PAIR_LIMIT {
            PairTable::Dense {
                nt,
                values: vec![0; np * nt],
            }
        } else {
            PairTable::Sparse(FxHashMap::default())
        }
    }

    fn get(&self, v: VertexId, w: VertexId) -> u64 {
        match self {
            PairTable::Dense { nt, values } => values[v.index() * nt + w.index()],
            PairTable::Sparse(map) => map.get(&(v.0, w.0)).copied().unwrap_or(0),
        }
    }

    fn add(&mut self, v: VertexId, w: VertexId, reward: u64) {
        match self {
            PairTable::Dense { nt, values } => values[v.index() * *nt + w.index()] += reward,
            PairTable::Sparse(map) => *map.entry((v.0, w.0)).or_insert(0) += reward,
        }
    }

    fn halve_all(&mut self) {
        match self {
            PairTable::Dense { values, .. } => {
                for x in values.iter_mut() {
                    *x /= 2;
                }
            }
            PairTable::Sparse(map) => {
                map.values_mut().for_each(|x| *x /= 2);
                map.retain(|_, x| *x > 0);
            }
        }
    }

    fn max_entry(&self) -> u64 {
        match self {
            PairTable::Dense { values, .. } => values.iter().copied().max().unwrap_or(0),
            PairTable::Sparse(map) => map.values().copied().max().unwrap_or(0),
        }
    }
}

/// All reward accumulators for one solver run.
///
/// Vertex tables decay against `t_v`, pair tables against `t_vw`; a decay
/// halves every entry of the table whose updated entry crossed the
/// threshold, with integer floor.
#[derive(Clone, Debug)]
pub struct ScoreTables {
    t_v: u64,
    t_vw: u64,
    rl_vertex: Vec<u64>,
    rl_target: Vec<u64>,
    dal_vertex: Vec<u64>,
    dal_pair: PairTable,
    ll_pair: PairTable,
}

impl ScoreTables {
    pub fn new(np: usize, nt: usize, t_v: u64, t_vw: u64) -> Self {
        assert!(t_v > 0 && t_vw > 0, "decay thresholds must be positive");
        Self {
            t_v,
            t_vw,
            rl_vertex: vec![0; np],
            rl_target: vec![0; nt],
            dal_vertex: vec![0; np],
            dal_pair: PairTable::new(np, nt),
            ll_pair: PairTable::new(np, nt),
        }
    }

    pub fn t_v(&self) -> u64 {
        self.t_v
    }

    pub fn t_vw(&self) -> u64 {
        self.t_vw
    }

    pub fn rl_vertex(&self, v: VertexId) -> u64 {
        self.rl_vertex[v.index()]
    }

    pub fn rl_target(&self, w: VertexId) -> u64 {
        self.rl_target[w.index()]
    }

    pub fn dal_vertex(&self, v: VertexId) -> u64 {
        self.dal_vertex[v.index()]
    }

    pub fn dal_pair(&self, v: VertexId, w: VertexId) -> u64 {
        self.dal_pair.get(v, w)
    }

    pub fn ll_pair(&self, v: VertexId, w: VertexId) -> u64 {
        self.ll_pair.get(v, w)
    }

    /// Credits the rewards of matching `(v, w)`: the RL reward goes to both
    /// endpoints and the pair memory, the DAL reward to the vertex and pair
    /// DAL scores. Both policy families keep learning regardless of which
    /// one is currently active, so either is warm when the controller
    /// switches.
    pub fn update(&mut self, v: VertexId, w: VertexId, r_rl: u64, r_dal: u64) {
        self.rl_vertex[v.index()] += r_rl;
        self.rl_target[w.index()] += r_rl;
        self.dal_vertex[v.index()] += r_dal;
        self.dal_pair.add(v, w, r_dal);
        self.ll_pair.add(v, w, r_rl);

        if self.rl_vertex[v.index()] >= self.t_v {
            halve_all(&mut self.rl_vertex);
        }
        if self.rl_target[w.index()] >= self.t_v {
            halve_all(&mut self.rl_target);
        }
        if self.dal_vertex[v.index()] >= self.t_v {
            halve_all(&mut self.dal_vertex);
        }
        if self.dal_pair.get(v, w) >= self.t_vw {
            self.dal_pair.halve_all();
        }
        if self.ll_pair.get(v, w) >= self.t_vw {
            self.ll_pair.halve_all();
        }
    }

    /// Largest entry across the three vertex tables (invariant checks).
    pub fn max_vertex_score(&self) -> u64 {
        [&self.rl_vertex, &self.rl_target, &self.dal_vertex]
            .into_iter()
            .flat_map(|t| t.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Largest entry across the two pair tables (invariant checks).
    pub fn max_pair_score(&self) -> u64 {
        self.dal_pair.max_entry().max(self.ll_pair.max_entry())
    }
}

fn halve_all(table: &mut [u64]) {
    for x in table.iter_mut() {
        *x /= 2;
    }
}

fn vertex_score(tables: &ScoreTables, kind: PolicyKind, gp: &Graph, v: VertexId) -> u64 {
    match kind {
        PolicyKind::Degree => gp.degree(v) as u64,
        PolicyKind::Rl | PolicyKind::Ll => tables.rl_vertex(v),
        PolicyKind::Dal => tables.dal_vertex(v),
    }
}

fn target_score(tables: &ScoreTables, kind: PolicyKind, gt: &Graph, v: VertexId, w: VertexId) -> u64 {
    match kind {
        PolicyKind::Degree => gt.degree(w) as u64,
        PolicyKind::Rl => tables.rl_target(w),
        PolicyKind::Dal => tables.dal_pair(v, w),
        PolicyKind::Ll => tables.ll_pair(v, w),
    }
}

/// Picks the branching pattern vertex from the domain's left side: highest
/// policy score, ties broken by larger degree, then by smaller id.
pub fn select_v(domain: &Bidomain, tables: &ScoreTables, kind: PolicyKind, gp: &Graph) -> VertexId {
    domain
        .left()
        .iter()
        .copied()
        .max_by_key(|&v| {
            (
                vertex_score(tables, kind, gp, v),
                gp.degree(v),
                std::cmp::Reverse(v),
            )
        })
        .expect("bidomain left side is never empty")
}

/// Orders the domain's right side for matching against `v`: decreasing
/// policy score, ties broken by larger degree, then by smaller id. The
/// result is a permutation of the right side.
pub fn order_w(
    domain: &Bidomain,
    v: VertexId,
    tables: &ScoreTables,
    kind: PolicyKind,
    gt: &Graph,
) -> Vec<VertexId> {
    let mut ws = domain.right().to_vec();
    ws.sort_by_key(|&w| {
        std::cmp::Reverse((
            target_score(tables, kind, gt, v, w),
            gt.degree(w),
            std::cmp::Reverse(w),
        ))
    });
    ws
}

/// Tracks the active policy for one solver run.
///
/// In `Alternate` mode a selection counter flips the policy between RL and
/// DAL every `max_nb_app` selections; finding a better incumbent resets the
/// counter and keeps the current policy. `Random` resamples the policy at
/// every branch node; `Depth` derives it from the match depth; both ignore
/// the counter.
#[derive(Clone, Debug)]
pub struct HybridController {
    mode: HybridMode,
    current: PolicyKind,
    nb_app: u64,
    max_nb_app: u64,
    max_dep: usize,
    rng: SplitMix64,
}

impl HybridController {
    pub fn new(mode: HybridMode, max_nb_app: u64, max_dep: usize, seed: u64) -> Self {
        assert!(max_nb_app > 0, "max_nb_app must be positive");
        assert!(max_dep > 0, "max_dep must be positive");
        let current = match mode {
            HybridMode::Single(kind) => kind,
            _ => PolicyKind::Rl,
        };
        Self {
            mode,
            current,
            nb_app: 0,
            max_nb_app,
            max_dep,
            rng: SplitMix64::new(seed),
        }
    }

    pub fn mode(&self) -> HybridMode {
        self.mode
    }

    pub fn current(&self) -> PolicyKind {
        self.current
    }

    pub fn nb_app(&self) -> u64 {
        self.nb_app
    }

    /// Policy for the branch node about to select its pair. `pair_depth` is
    /// the 1-based index of the match being chosen, i.e. `|curSol| + 1`.
    pub fn policy_for_node(&mut self, pair_depth: usize) -> PolicyKind {
        match self.mode {
            HybridMode::Single(kind) => kind,
            HybridMode::Alternate => self.current,
            HybridMode::Random => {
                self.current = if self.rng.next_bool() {
                    PolicyKind::Rl
                } else {
                    PolicyKind::Dal
                };
                self.current
            }
            HybridMode::Depth => {
                self.current = self.policy_at_depth(pair_depth);
                self.current
            }
        }
    }

    /// Depth rule: RL on `[1, max_dep/4]` and `[ceil(max_dep/2), 3*max_dep/4]`,
    /// DAL everywhere else.
    pub fn policy_at_depth(&self, depth: usize) -> PolicyKind {
        let first_quarter = self.max_dep / 4;
        let half = self.max_dep.div_ceil(2);
        let third_quarter = 3 * self.max_dep / 4;
        if (1..=first_quarter).contains(&depth) || (half..=third_quarter).contains(&depth) {
            PolicyKind::Rl
        } else {
            PolicyKind::Dal
        }
    }

    /// Records one v- or w-selection. In `Alternate` mode this advances the
    /// counter and flips the policy at the threshold; returns whether a
    /// flip happened.
    pub fn on_selection(&mut self) -> bool {
        match self.mode {
            HybridMode::Alternate => {
                self.nb_app += 1;
                if self.nb_app >= self.max_nb_app {
                    self.nb_app = 0;
                    self.current = match self.current {
                        PolicyKind::Rl => PolicyKind::Dal,
                        PolicyKind::Dal => PolicyKind::Rl,
                        other => other,
                    };
                    true
                } else {
                    false
                }
            }
            _ => false,
        }
    }

    /// Records an incumbent improvement: the counter restarts and the
    /// current policy stays in charge.
    pub fn on_improvement(&mut self) {
        self.nb_app = 0;
    }
}
