//! Runs the ten acceptance criteria, one line each. `BV_MAX_SIZE` lowers
//! or raises the enumeration bound (default 6).

use bv_core::suite::{run_criterion, SuiteConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cfg = SuiteConfig::from_env();
    let mut failed = vec![];
    for id in 1..=10 {
        let r = run_criterion(id, &cfg);
        println!("{r} [{:.1?}]", r.elapsed);
        for f in &r.failures {
            println!("    {f}");
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
