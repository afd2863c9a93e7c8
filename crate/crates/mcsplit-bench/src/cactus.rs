//! Cactus series: solved instances per policy, sorted by cost ascending,
//! emitted as `rank,cost` lines under a `# <policy>` header per series.

use std::path::Path;

use crate::{bench::CSV_HEADER, MetricArg, EXIT_OK, EXIT_PARSE};

pub(crate) fn cmd_cactus(csv_path: &Path, metric: MetricArg) -> i32 {
    let text = match std::fs::read_to_string(csv_path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", csv_path.display());
            return EXIT_PARSE;
        }
    };

    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        _ => {
            eprintln!(
                "error: {}: malformed CSV, expected header `{CSV_HEADER}`",
                csv_path.display()
            );
            return EXIT_PARSE;
        }
    }

    // Policies in first-appearance order, each with its solved-run costs.
    let mut series: Vec<(String, Vec<u128>)> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            eprintln!(
                "error: {}: malformed CSV row on line {}",
                csv_path.display(),
                i + 2
            );
            return EXIT_PARSE;
        }
        let policy = fields[2];
        let entry = match series.iter_mut().find(|(label, _)| label == policy) {
            Some(entry) => entry,
            None => {
                series.push((policy.to_string(), Vec::new()));
                series.last_mut().expect("just pushed")
            }
        };
        // Only proven-optimal runs count as solved.
        if fields[4] != "optimal" {
            continue;
        }
        let cost = match metric {
            MetricArg::Time => fields[5].parse::<u128>(),
            MetricArg::Calls => fields[6].parse::<u128>(),
        };
        match cost {
            Ok(cost) => entry.1.push(cost),
            Err(_) => {
                eprintln!(
                    "error: {}: malformed metric value on line {}",
                    csv_path.display(),
                    i + 2
                );
                return EXIT_PARSE;
            }
        }
    }

    for (label, mut costs) in series {
        costs.sort_unstable();
        println!("# {label}");
        for (rank, cost) in costs.iter().enumerate() {
            println!("{},{cost}", rank + 1);
        }
    }
    EXIT_OK
}
