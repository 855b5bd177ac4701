//! Runs the acceptance suites and prints a pass/fail matrix.
//!
//! cargo run --release --example suites -- f2-bias equidistribution

use strengthlab::kernel::ExecConfig;
use strengthlab::suite::{run_suite, SUITES};

fn main() -> strengthlab::Result<()> {
    let picked: Vec<String> = std::env::args().skip(1).collect();
    let cfg = ExecConfig::default();
    for (name, criterion) in SUITES {
        if name == "determinism" || (!picked.is_empty() && !picked.iter().any(|p| p == name)) {
            continue;
        }
        let r = run_suite(name, &cfg)?;
        println!("{criterion:>2} {name:<20} {} {}", if r.pass { "pass" } else { "FAIL" }, r.measurements);
    }
    Ok(())
}
