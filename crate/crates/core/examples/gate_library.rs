//! Build the qutrit gate set, show its consistency figures and the Pauli
//! conjugation table of the vertical move gate.

use parafermion_sim::gates::{phase_aligned_distance, uv_algebraic, uv_published, QutritLibrary};
use parafermion_sim::tableau::derive_clifford_action;

fn main() -> parafermion_sim::Result<()> {
    let lib = QutritLibrary::build()?;
    println!("G_v angles: θ1 = {:.6}π, θ2 = {:.9}π", lib.theta1 / std::f64::consts::PI, lib.theta2 / std::f64::consts::PI);
    println!("Uv published vs algebraic form: {:.2e}", phase_aligned_distance(&uv_published(), &uv_algebraic()));
    for name in ["H", "CZ", "CX", "Uv", "Uh", "SWAP"] {
        let g = lib.get(name).expect("library gate");
        match derive_clifford_action(&g) {
            Ok(a) => print!("\n{name}\n{}", a.to_text()),
            Err(e) => println!("\n{name}: {e}"),
        }
    }
    // the refined G_v lands on a Clifford element; a non-Clifford angle is rejected
    let gv = lib.get("Gv").expect("library gate");
    match derive_clifford_action(&gv) {
        Ok(a) => print!("\nGv\n{}", a.to_text()),
        Err(e) => println!("\nGv: {e}"),
    }
    Ok(())
}
