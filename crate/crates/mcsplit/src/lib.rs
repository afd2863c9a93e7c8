//! Exact maximum common induced subgraph (MCS) search.
//!
//! Given a pattern graph and a target graph, the solver finds a largest set
//! of vertex pairs whose two sides induce isomorphic subgraphs. The search
//! is branch and bound over *bidomains*: classes of pattern and target
//! vertices with identical adjacency towards everything matched so far,
//! which both enforce the isomorphism constraint and yield a cheap upper
//! bound. Branching order is pluggable: static degrees, accumulated
//! bound-reduction rewards (RL), domain-action rewards (DAL), pair-memory
//! scores (LL), or a hybrid controller that alternates RL and DAL.
//!
//! ```
//! use mcsplit::{parse_lad, solve, SolverConfig};
//!
//! let pattern = parse_lad("3\n1 1\n2 0 2\n1 1").unwrap(); // path 0-1-2
//! let target = parse_lad("3\n2 1 2\n2 0 2\n2 0 1").unwrap(); // triangle
//! let result = solve(&pattern, &target, &SolverConfig::default());
//! assert_eq!(result.size, 2); // a path never induces a triangle
//! ```
//!
//! [`oracle::brute_force_mcs`] provides an independent exhaustive solver
//! for small instances, used as ground truth by the test suites.

#![forbid(unsafe_code)]

pub mod environment;
pub mod graph;
pub mod oracle;
pub mod policy;
pub mod rng;
pub mod solver;

pub use environment::{Bidomain, Environment};
pub use graph::{
    erdos_renyi, parse_dimacs, parse_lad, parse_lad_symmetrize, Assignment, Graph, ParseError,
    VertexId,
};
pub use oracle::{brute_force_mcs, oracle_agrees, OracleError, OracleResult};
pub use policy::{
    order_w, reward_dal, reward_rl, select_v, HybridController, HybridMode, PolicyKind, RlReward,
    ScoreTables,
};
pub use rng::SplitMix64;
pub use solver::{
    check_solution, lum_extend, solve, solve_observed, SearchStats, SolveResult, SolverConfig,
    Status,
};
