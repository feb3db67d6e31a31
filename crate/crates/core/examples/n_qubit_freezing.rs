//! M3 states on more qubits. For even N the freezing family is
//! `c2 = (-1)^{N/2} c1 c3`; the distance measures are evaluated with the
//! restricted minimizer over incoherent M3 states. For N = 3 the same
//! recipe no longer freezes anything.
//!
//! ```text
//! cargo run --release --example n_qubit_freezing
//! ```

use cohlab::coherence::{c_d_m3_restricted, c_l1, c_re, DistanceKind};
use cohlab::m3::{evolve_triple, freezing_syntax_triple, freezing_triple, m3_eigensystem, m3_state};

fn main() -> cohlab::Result<()> {
    for n in [4, 6] {
        let t = freezing_triple(0.4, 0.5, n)?;
        println!("N = {n}, triple ({}, {}, {})", t.c1, t.c2, t.c3);
        println!("  {} eigenpairs from the closed form", m3_eigensystem(&t)?.len());
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let e = evolve_triple(&t, 1, q)?;
            let rho = m3_state(&e)?;
            let tr = c_d_m3_restricted(&e, DistanceKind::Trace)?;
            let bu = c_d_m3_restricted(&e, DistanceKind::Bures)?;
            println!(
                "  q = {q:.2}: l1 {:.9}, re {:.9}, trace {:.9} (s* = {:.4}), bures {:.9}",
                c_l1(&rho),
                c_re(&rho),
                tr.value,
                tr.m3_argmin.map_or(f64::NAN, |a| a.s),
                bu.value
            );
        }
    }

    let t = freezing_syntax_triple(0.4, 0.5, 3)?;
    println!("N = 3, triple ({}, {}, {})", t.c1, t.c2, t.c3);
    for q in [0.0, 0.5, 1.0] {
        let rho = m3_state(&evolve_triple(&t, 1, q)?)?;
        println!("  q = {q:.2}: l1 {:.9}, re {:.9}", c_l1(&rho), c_re(&rho));
    }
    Ok(())
}
