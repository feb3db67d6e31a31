//! The noise strength q* where |c3(q)| drops to |c1|, and the distance
//! based measures on both sides of it.
//!
//! ```text
//! cargo run --release --example threshold_coincidence
//! ```

use cohlab::dynamics::{measure_coincidence_report, GridSpec};
use cohlab::m3::{freezing_triple, threshold_q_star};
use cohlab::optim::MinimizerOptions;

fn main() -> cohlab::Result<()> {
    let t = freezing_triple(0.3, 0.9, 2)?;
    println!("q* = {:.12} (1 - sqrt(1/3) = {:.12})", threshold_q_star(&t), 1.0 - (1.0f64 / 3.0).sqrt());
    let report = measure_coincidence_report(&t, &GridSpec::Count(11), &MinimizerOptions::default())?;
    println!("{:>5} {:>16} {:>8} {:>8} {:>10} {:>10} {:>10}", "q", "regime", "c1", "c3", "trace", "bures", "rel.ent.");
    for r in &report.rows {
        println!(
            "{:>5.2} {:>16} {:>8.4} {:>8.4} {:>10.6} {:>10.6} {:>10.6}",
            r.q,
            format!("{:?}", r.regime),
            r.c1,
            r.c3,
            r.trace,
            r.bures,
            r.relative_entropy
        );
    }
    Ok(())
}
