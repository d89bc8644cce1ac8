//! Prints one line per acceptance criterion and exits nonzero if any fails.
//! `ACCEPTANCE_N=<n>` restricts every criterion to one chain size.

use std::process::ExitCode;

use orcp_core::verify::{run_suite, Status, SuiteOptions};

fn main() -> ExitCode {
    let n = std::env::var("ACCEPTANCE_N").ok().and_then(|v| v.parse().ok());
    let opts = SuiteOptions {
        n,
        ..SuiteOptions::default()
    };
    let report = run_suite(&opts);
    for c in &report.claims {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!("{tag} {}: {} ({} ms)", c.id, c.locus, c.runtime_ms);
        println!("    parameters: {}", c.parameters);
        println!("    expected:   {}", c.expected);
        println!("    observed:   {}", c.observed);
    }
    let failed = report.failures();
    if failed.is_empty() {
        println!("acceptance: {} criteria passed", report.claims.len());
        ExitCode::SUCCESS
    } else {
        let ids: Vec<&str> = failed.iter().map(|c| c.id).collect();
        println!("acceptance: failed {}", ids.join(", "));
        ExitCode::FAILURE
    }
}
