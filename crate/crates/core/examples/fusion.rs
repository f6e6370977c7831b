//! Fuse a dyon into a merged dislocation on 3×4 and read the plaquette
//! charges before and after, for both string orientations and the control.

use parafermion_sim::protocols::{fusion_experiment, run_experiment, BackendKind, FusionVariant, GateBook};

fn main() -> parafermion_sim::Result<()> {
    let book = GateBook::build()?;
    for variant in [FusionVariant::Standard, FusionVariant::Mirror, FusionVariant::Control] {
        let protocol = fusion_experiment(&book, variant)?;
        let (_, res) = run_experiment(&protocol, &book, BackendKind::Tableau, 10_000, 3, 1_000_000)?;
        println!("{}", res.protocol);
        for o in &res.observables {
            println!(
                "  ⟨Π^{}⟩ {:<12} analytic {:.3}  sampled {:.4} ± {:.4}",
                o.lambda, o.label, o.analytic, o.sampled_mean, o.standard_error
            );
        }
    }
    Ok(())
}
