//! Manifest batch runner: one CSV row per instance per policy.
//!
//! Instances may be solved concurrently (`--jobs`); rows are still written
//! in manifest order, policies in flag order within each instance, so the
//! output is deterministic apart from `elapsed_ms`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use mcsplit::{solve, Graph, Status};

use crate::{load_graph, BenchArgs, PolicyArg, EXIT_OK, EXIT_PARSE, EXIT_USAGE};

pub(crate) const CSV_HEADER: &str =
    "pattern,target,policy,size,status,elapsed_ms,recursive_calls,policy_switches";

pub(crate) fn status_token(status: Status) -> &'static str {
    match status {
        Status::Optimal => "optimal",
        Status::TimedOut => "timed-out",
        Status::NodeBudgetExhausted => "node-budget-exhausted",
    }
}

struct Record {
    pattern: String,
    target: String,
    policy: &'static str,
    size: usize,
    status: &'static str,
    elapsed_ms: u128,
    recursive_calls: u64,
    policy_switches: u64,
}

impl Record {
    fn error(pattern: String, target: String, policy: &'static str) -> Self {
        Record {
            pattern,
            target,
            policy,
            size: 0,
            status: "error",
            elapsed_ms: 0,
            recursive_calls: 0,
            policy_switches: 0,
        }
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.pattern,
            self.target,
            self.policy,
            self.size,
            self.status,
            self.elapsed_ms,
            self.recursive_calls,
            self.policy_switches
        )
    }
}

/// One manifest line: either a usable instance or a malformed line kept
/// around so the batch can emit error rows for it and continue.
enum Instance {
    Ready {
        pattern: String,
        target: String,
        graphs: Box<(Graph, Graph)>,
    },
    Failed {
        pattern: String,
        target: String,
        message: String,
    },
}

pub(crate) fn cmd_bench(args: BenchArgs) -> i32 {
    if let Err(msg) = args.knobs.validate() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    if args.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let policies: Vec<PolicyArg> = if args.policies.is_empty() {
        vec![PolicyArg::Hybrid]
    } else {
        args.policies.clone()
    };

    let manifest = match std::fs::read_to_string(&args.manifest) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.manifest.display());
            return EXIT_PARSE;
        }
    };

    let instances: Vec<Instance> = manifest
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|line| {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [pattern, target] = fields.as_slice() else {
                return Instance::Failed {
                    pattern: line.trim().to_string(),
                    target: String::new(),
                    message: "manifest line must be `pattern_path target_path`".into(),
                };
            };
            let loaded = load_graph(pattern.as_ref(), &args.input)
                .and_then(|gp| load_graph(target.as_ref(), &args.input).map(|gt| (gp, gt)));
            match loaded {
                Ok(graphs) => Instance::Ready {
                    pattern: pattern.to_string(),
                    target: target.to_string(),
                    graphs: Box::new(graphs),
                },
                Err(message) => Instance::Failed {
                    pattern: pattern.to_string(),
                    target: target.to_string(),
                    message,
                },
            }
        })
        .collect();

    // Task (i, p) = instance i under policy p; row index i * |policies| + p.
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..policies.len()).map(move |p| (i, p)))
        .collect();
    let mut rows: Vec<Option<Record>> = Vec::with_capacity(tasks.len());
    rows.resize_with(tasks.len(), || None);

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Record)>();
    let workers = args.jobs.min(tasks.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let tasks = &tasks;
            let instances = &instances;
            let policies = &policies;
            let knobs = &args.knobs;
            scope.spawn(move || loop {
                let slot = next.fetch_add(1, Ordering::Relaxed);
                if slot >= tasks.len() {
                    break;
                }
                let (i, p) = tasks[slot];
                let policy = policies[p];
                let record = match &instances[i] {
                    Instance::Failed {
                        pattern,
                        target,
                        message,
                    } => {
                        eprintln!("warning: {pattern} {target}: {message}");
                        Record::error(pattern.clone(), target.clone(), policy.label())
                    }
                    Instance::Ready {
                        pattern,
                        target,
                        graphs,
                    } => {
                        let (gp, gt) = graphs.as_ref();
                        let result = solve(gp, gt, &knobs.config(policy.mode()));
                        Record {
                            pattern: pattern.clone(),
                            target: target.clone(),
                            policy: policy.label(),
                            size: result.size,
                            status: status_token(result.status),
                            elapsed_ms: result.elapsed.as_millis(),
                            recursive_calls: result.recursive_calls,
                            policy_switches: result.stats.policy_switches,
                        }
                    }
                };
                let _ = tx.send((slot, record));
            });
        }
        drop(tx);
        for (slot, record) in rx {
            rows[slot] = Some(record);
        }
    });

    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.expect("every task reports exactly one record").csv_row());
        out.push('\n');
    }

    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_PARSE;
            }
        }
        None => print!("{out}"),
    }
    EXIT_OK
}
