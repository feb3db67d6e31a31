//! One qubit under bit flip noise: the l1 coherence freezes exactly when
//! the Bloch vector has no y component, while the relative entropy of
//! coherence still decays. Other channels only freeze incoherent states.
//!
//! ```text
//! cargo run --release --example single_qubit_freezing
//! ```

use cohlab::channels::ChannelKind;
use cohlab::densmat::BlochVector;
use cohlab::dynamics::{common_freezing_scan, no_common_freezing_scan, GridSpec};

fn main() -> cohlab::Result<()> {
    let grid = GridSpec::Count(101);
    for n in [[0.5, 0.0, 0.2], [0.5, 0.3, 0.2], [0.0, 0.0, 0.7]] {
        let b = BlochVector::new(n[0], n[1], n[2])?;
        let r = no_common_freezing_scan(&b, ChannelKind::BitFlip, &grid)?;
        println!(
            "n = {:?}: l1 {:?} (dev {:.1e}), re {:?} (dev {:.1e}), {:?}",
            n, r.l1.status, r.l1.max_deviation, r.re.status, r.re.max_deviation, r.triviality
        );
    }

    println!("\nrandom scans, 200 Bloch vectors each");
    for kind in [
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
    ] {
        let s = common_freezing_scan(kind, 200, 11)?;
        println!(
            "{:<18} l1 frozen {:>3}, re frozen {:>3}, both (trivially) {:>3}, both (nontrivially) {}",
            kind.name(),
            s.l1_frozen,
            s.re_frozen,
            s.trivial_common,
            s.nontrivial_common
        );
    }
    Ok(())
}
