//! Every channel in the catalog: Kraus count, completeness error, whether it
//! is incoherent, and its action on |+><+|.
//!
//! ```text
//! cargo run --release --example channel_catalog
//! ```

use cohlab::channels::{hadamard, is_incoherent_channel, rephasing_channel, ChannelKind, KrausChannel};
use cohlab::coherence::c_l1;
use cohlab::densmat::{bloch_to_density, density_to_bloch, BlochVector};

fn main() -> cohlab::Result<()> {
    let plus = bloch_to_density(&BlochVector::new(1.0, 0.0, 0.0)?)?;
    println!("{:<20} {:>5} {:>12} {:>10}  image of |+> at q = 0.3", "channel", "kraus", "completeness", "incoherent");
    for kind in ChannelKind::ALL {
        if kind == ChannelKind::Rephasing {
            continue;
        }
        let ch = kind.build(0.3, 1)?;
        let n = density_to_bloch(&ch.apply(&plus)?)?;
        println!(
            "{:<20} {:>5} {:>12.1e} {:>10}  n = ({:.4}, {:.4}, {:.4}), C_l1 = {:.4}",
            kind.name(),
            ch.num_kraus(),
            ch.completeness_error(),
            is_incoherent_channel(&ch, 1e-12),
            n.n1,
            n.n2,
            n.n3,
            c_l1(&ch.apply(&plus)?)
        );
    }

    // Global rephasing acts on an even number of qubits and creates coherence.
    let r = rephasing_channel(0.5, 2)?;
    println!(
        "\nrephasing r = 0.5 on 2 qubits: {} Kraus operators, completeness {:.1e}, incoherent = {}",
        r.num_kraus(),
        r.completeness_error(),
        is_incoherent_channel(&r, 1e-12)
    );

    let h = KrausChannel::unitary(hadamard())?;
    println!("hadamard: incoherent = {}", is_incoherent_channel(&h, 1e-12));
    Ok(())
}
