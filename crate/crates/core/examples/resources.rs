//! Gate counts and hardware feasibility of the preparation, fusion and
//! braiding scripts under the bundled transmon cost model.

use parafermion_sim::lattice::{BoundaryMode, Lattice};
use parafermion_sim::protocols::{
    braiding_experiment, fusion_experiment, prep_experiment, BraidLayout, FusionVariant, GateBook, PrepMethod,
};
use parafermion_sim::resources::{assess, count_resources, fidelity_threshold, GateCostModel};

fn main() -> parafermion_sim::Result<()> {
    let book = GateBook::build()?;
    let model = GateCostModel::default();
    let lattice = |n, m| Lattice::new(n, m, 3, BoundaryMode::FullPlaquettesOnly);
    let protocols = [
        prep_experiment(&book, lattice(3, 4)?, PrepMethod::Circuit)?,
        prep_experiment(&book, lattice(6, 6)?, PrepMethod::Circuit)?,
        fusion_experiment(&book, FusionVariant::Standard)?,
        braiding_experiment(&book, lattice(4, 4)?, &BraidLayout::compact(), true)?,
    ];
    for p in &protocols {
        let a = assess(&count_resources(p), &model, 0.90)?;
        let r = &a.report;
        println!("{} on {}x{}: {:?}", p.name, p.lattice.rows, p.lattice.cols, r.tally.counts);
        println!("  depth {}, {} two-qutrit gates over {} dark plaquettes", r.depth, r.tally.two_qudit, r.dark_plaquettes);
        for f in &a.fidelity {
            println!(
                "  {:?}: fidelity {:.4}, two-qutrit gates {:.2}, needs per-gate {:.5}",
                f.scope,
                f.fidelity,
                f.two_qudit_gates,
                f.required_two_qudit_fidelity.unwrap_or(f64::NAN)
            );
        }
        println!(
            "  duration {:.0}-{:.0} ns = {:.3}-{:.3} of min coherence {} µs",
            a.duration_ns[0], a.duration_ns[1], a.coherence_margin[0], a.coherence_margin[1], a.min_coherence_us
        );
    }
    println!("\nthreshold for 0.90 over 3 gates: {:.4}", fidelity_threshold(0.90, 3)?);
    println!("threshold for 0.90 over 75 gates: {:.5}", fidelity_threshold(0.90, 75)?);
    Ok(())
}
