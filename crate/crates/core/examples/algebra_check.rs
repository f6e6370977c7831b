//! Run the parafermion braid-algebra suite and print the double-exchange matrix.

use parafermion_sim::theory::algebra_check;

fn main() -> parafermion_sim::Result<()> {
    let report = algebra_check()?;
    for c in &report.checks {
        println!("{} {:<55} {:.2e}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value);
    }
    println!("\nU_2² =");
    for row in &report.full_braid {
        let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
        println!("  {}", cells.join("  "));
    }
    println!("channel probabilities after the braid: {:?}", report.braided_channels);
    Ok(())
}
