//! Two-qubit M3 (Bell-diagonal) states under local bit flips. With
//! `c2 = -c1 c3` every measure stays constant, including the optimized
//! trace and Bures distances, and the state stays separable throughout.
//!
//! ```text
//! cargo run --release --example two_qubit_freezing
//! ```

use cohlab::channels::{ChannelKind, ChannelSpec};
use cohlab::coherence::{DistanceKind, Measure};
use cohlab::dynamics::{run_sweep, C2Value, GridSpec, M3Descriptor, StateDescriptor, SweepSpec};
use cohlab::m3::{evolve_triple, is_ppt_separable, l1_freezing_predicate, m3_state, M3Triple, StandardFormState};

fn sweep(c2: C2Value) -> cohlab::Result<()> {
    let spec = SweepSpec {
        grid: GridSpec::Count(21),
        ..SweepSpec::new(
            StateDescriptor::M3(M3Descriptor { c1: 0.25, c2, c3: 0.25, n: 2 }),
            ChannelSpec::new(ChannelKind::BitFlip),
            vec![Measure::L1, Measure::Re, Measure::Tr, Measure::D(DistanceKind::Bures)],
        )
    };
    let out = run_sweep(&spec)?;
    for s in &out.series {
        println!(
            "  {:<8} {:?}, first {:.6}, last {:.6}, max deviation {:.1e}",
            s.measure.to_string(),
            s.verdict.status,
            s.values[0],
            s.values[s.values.len() - 1],
            s.verdict.max_deviation
        );
    }
    Ok(())
}

fn main() -> cohlab::Result<()> {
    println!("c = (1/4, freeze, 1/4), i.e. c2 = -1/16");
    sweep(C2Value::Keyword("freeze".into()))?;
    println!("c = (1/4, 0.1, 1/4)");
    sweep(C2Value::Value(0.1))?;

    let t = M3Triple::new(0.25, -0.0625, 0.25, 2)?;
    let separable = (0..=20)
        .map(|i| is_ppt_separable(&m3_state(&evolve_triple(&t, 1, i as f64 / 20.0)?)?))
        .collect::<cohlab::Result<Vec<bool>>>()?;
    println!("\nPPT along the frozen evolution: {:?}", separable.iter().all(|&s| s));

    // Beyond M3: the l1 freezing condition on a state in standard form.
    let sf = StandardFormState { x: [0.1, 0.0, 0.2], y: [0.0, 0.0, -0.1], t: [0.3, -0.2, 0.1] };
    println!("standard form {:?}: l1 freezing predicate = {}", sf, l1_freezing_predicate(&sf, 1e-12));
    Ok(())
}
