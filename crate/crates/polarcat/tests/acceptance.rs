//! Acceptance criteria: one PASS/FAIL line per criterion with its runtime
//! against the time budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use polarcat::suites::{run_criterion, SuiteConfig};

const CRITERIA: [(u8, &str, u64); 12] = [
    (1, "Brauer core", 5),
    (2, "four-term relations", 5),
    (3, "polar relation battery", 120),
    (4, "normal-form soundness", 300),
    (5, "PTL ranks", 60),
    (6, "osp functor", 60),
    (7, "sp2 characteristic identity", 5),
    (8, "so3 characteristic identity", 30),
    (9, "centre", 60),
    (10, "G2 suite", 120),
    (11, "sp2 / type B", 30),
    (12, "enhanced coupon m=3", 5),
];

fn main() -> ExitCode {
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cfg = SuiteConfig::default();
    let mut failed = 0;
    for (n, title, budget) in CRITERIA {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = run_criterion(n, &cfg);
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        match result {
            Ok(checks) => {
                let bad: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
                let pass = bad.is_empty() && in_time;
                println!(
                    "{} criterion {n:>2} {title}: {} checks in {:.2}s (budget {budget}s)",
                    if pass { "PASS" } else { "FAIL" },
                    checks.len(),
                    elapsed.as_secs_f64()
                );
                for c in bad {
                    println!("    failed: {} [{}] {}", c.name, c.anchor, c.detail);
                }
                if !in_time {
                    println!("    over time budget");
                }
                if !pass {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {n:>2} {title}: error {e} after {:.2}s", elapsed.as_secs_f64());
                failed += 1;
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
