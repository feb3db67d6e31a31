//! Coherence measures side by side, and a seeded search for a two-qubit
//! state whose trace-distance coherence is not half its l1 coherence.
//!
//! ```text
//! cargo run --release --example distance_measures
//! ```

use cohlab::coherence::{c_d, c_l1, c_re, c_tr_m3, DistanceKind, Measure};
use cohlab::densmat::{bloch_to_density, random_density, BlochVector, DensityMatrix};
use cohlab::m3::{m3_state, M3Triple};
use cohlab::optim::MinimizerOptions;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table(name: &str, rho: &DensityMatrix, m3: Option<&M3Triple>) -> cohlab::Result<()> {
    let opts = MinimizerOptions::default();
    print!("{name:<28}");
    for m in Measure::ALL {
        let r = m.evaluate(rho, m3, &opts)?;
        print!(" {}={:.6}", m, r.value);
    }
    println!();
    Ok(())
}

fn main() -> cohlab::Result<()> {
    let plus = bloch_to_density(&BlochVector::new(1.0, 0.0, 0.0)?)?;
    table("|+><+|", &plus, None)?;
    let qubit = bloch_to_density(&BlochVector::new(0.3, -0.4, 0.5)?)?;
    table("n = (0.3, -0.4, 0.5)", &qubit, None)?;
    let t = M3Triple::new(0.25, -0.0625, 0.25, 2)?;
    table("M3 (1/4, -1/16, 1/4)", &m3_state(&t)?, Some(&t))?;
    println!("closed-form trace coherence of the M3 state: {}", c_tr_m3(&t)?);

    // On M3 states the trace-distance coherence is exactly half the l1
    // coherence; for general two-qubit states it is not.
    let opts = MinimizerOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..200 {
        let rho = random_density(&mut rng, 4)?;
        let tr = c_d(&rho, DistanceKind::Trace, &opts)?.value;
        let gap = tr - c_l1(&rho) / 2.0;
        if gap.abs() > 1e-3 {
            println!("\ntrial {trial}: C_tr = {tr:.9}, C_l1/2 = {:.9}, gap = {gap:.3e}", c_l1(&rho) / 2.0);
            println!("C_re = {:.6}", c_re(&rho));
            let m = rho.matrix();
            let re: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m.get(i, j).re).collect()).collect();
            let im: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m.get(i, j).im).collect()).collect();
            println!("{}", serde_json::json!({ "re": re, "im": im, "trace_coherence": tr, "half_l1": c_l1(&rho) / 2.0 }));
            return Ok(());
        }
    }
    println!("no state with a gap above 1e-3 in 200 trials");
    Ok(())
}
