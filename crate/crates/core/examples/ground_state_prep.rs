//! Prepare the plaquette-model ground state by circuit and by measurement
//! and read every plaquette on both backends.

use parafermion_sim::lattice::{BoundaryMode, Lattice};
use parafermion_sim::protocols::{prep_experiment, run_experiment, BackendKind, GateBook, PrepMethod};

fn main() -> parafermion_sim::Result<()> {
    let book = GateBook::build()?;
    for method in [PrepMethod::Circuit, PrepMethod::Measurement] {
        let lattice = Lattice::new(3, 4, 3, BoundaryMode::FullPlaquettesOnly)?;
        let protocol = prep_experiment(&book, lattice, method)?;
        for backend in [BackendKind::Tableau, BackendKind::Statevector] {
            let (_, res) = run_experiment(&protocol, &book, backend, 1000, 1, 10_000_000)?;
            println!(
                "{} on {}: post-selection {:?} (joint {:.3e}, {} attempts)",
                res.protocol,
                res.backend,
                res.postselection.step_probabilities.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>(),
                res.postselection.joint_probability,
                res.postselection.attempts
            );
            for o in &res.observables {
                println!("  ⟨Π^0⟩ {:<8} = {:.12}  (sampled {:.3})", o.label, o.analytic, o.sampled_mean);
            }
        }
    }
    Ok(())
}
