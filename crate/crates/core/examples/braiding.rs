//! Full braid of two parafermions from different pairs: each fusion channel
//! ends up with probability 1/3, while the control keeps it at 1.

use std::time::Instant;

use parafermion_sim::lattice::{BoundaryMode, Lattice};
use parafermion_sim::protocols::{braiding_experiment, run_experiment, BackendKind, BraidLayout, GateBook};

fn main() -> parafermion_sim::Result<()> {
    let book = GateBook::build()?;
    for (size, braid) in [(4, true), (4, false), (12, true)] {
        let t = Instant::now();
        let lattice = Lattice::new(size, size, 3, BoundaryMode::FullPlaquettesOnly)?;
        let layout = BraidLayout::for_lattice(size, size)?;
        let protocol = braiding_experiment(&book, lattice, &layout, braid)?;
        let (_, res) = run_experiment(&protocol, &book, BackendKind::Tableau, 10_000, 2024, 1_000_000)?;
        println!("{} on {size}x{size} ({} qutrits, {:.2?})", res.protocol, res.qudits, t.elapsed());
        for o in &res.observables {
            let z = if o.standard_error > 0.0 { (o.sampled_mean - o.analytic) / o.standard_error } else { 0.0 };
            println!("  ⟨Π^0⟩ {:<10} analytic {:.6}  sampled {:.4} ({z:+.2}σ)", o.label, o.analytic, o.sampled_mean);
        }
    }
    Ok(())
}
