//! Numerical checks of the structural facts behind freezing: invariance of
//! distances under the symmetry operations, the shape of the closest
//! incoherent state, its optimal parameter, and the rephasing channel.
//!
//! ```text
//! cargo run --release --example lemma_verification [selector] [samples]
//! ```

use cohlab::verify::{run_suite, Suite, DEFAULT_SEED};

fn main() -> cohlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().as_deref().unwrap_or("A3").parse()?;
    let samples = args.next().map_or(Ok(20), |s| s.parse()).unwrap_or(20);
    let report = run_suite(suite, DEFAULT_SEED, samples)?;
    print!("{}", report.table());
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    Ok(())
}
