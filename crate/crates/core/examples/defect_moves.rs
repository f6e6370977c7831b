//! Create a parafermion pair by measurement, glide one end around a corner
//! with code-preserving moves, and retrace it.

use parafermion_sim::deform::{defect_sites, register_measured_pair, retrace, walk_defect, MoveSet};
use parafermion_sim::gates::QutritLibrary;
use parafermion_sim::lattice::{BoundaryMode, Lattice};

fn main() -> parafermion_sim::Result<()> {
    let moves = MoveSet::new(&QutritLibrary::build()?)?;
    let mut l = Lattice::new(8, 8, 3, BoundaryMode::FullPlaquettesOnly)?;
    let pair = register_measured_pair(&mut l, (2, 3), (2, 4), "A")?;
    let show = |l: &Lattice, what: &str| {
        let sites: Vec<_> = defect_sites(&l.live_ops()).into_iter().map(|q| l.coords(q)).collect();
        let rec = &l.dislocations()[pair.dislocation];
        println!("{what}: defects at {sites:?}, branch cut {:?}", rec.branch_cut);
    };
    show(&l, "created");
    let origin = l.dislocations()[pair.dislocation].parafermion_positions[1];
    let steps = walk_defect(&mut l, &moves, pair.dislocation, 1, &[(3, 5), (4, 5)])?;
    for s in &steps {
        println!("  {} on {:?}", s.gate, s.targets.map(|q| l.coords(q)));
    }
    show(&l, "moved");
    retrace(&mut l, &moves, pair.dislocation, 1, &steps, origin)?;
    show(&l, "retraced");
    Ok(())
}
