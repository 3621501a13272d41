//! One pass/fail line per acceptance criterion.
//!
//! `ACCEPTANCE_ONLY=AC-3,AC-12` restricts the run to the listed criteria. With
//! `ACCEPTANCE_STRICT=1` the process exits non-zero when any criterion fails; by
//! default it only reports, so that a workspace test run still reaches the
//! targets after this one.

use std::process::ExitCode;

use frac_ops::PlanCache;
use mc_harness::verify;

fn main() -> ExitCode {
    let only: Option<Vec<String>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').map(|s| s.trim().to_string()).collect());
    let cache = PlanCache::from_env();
    let mut failed = 0;
    for id in verify::ALL {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == id)) {
            continue;
        }
        let outcome = verify::run(id, cache.as_ref());
        if !outcome.pass {
            failed += 1;
        }
        println!("{}", outcome.line());
    }
    println!("acceptance: {failed} criteria failed");
    if failed == 0 || std::env::var_os("ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
