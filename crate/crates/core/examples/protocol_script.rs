//! Print the fusion script in its text form and check that it parses back.

use parafermion_sim::protocols::{fusion_experiment, FusionVariant, GateBook, Protocol};

fn main() -> parafermion_sim::Result<()> {
    let book = GateBook::build()?;
    let p = fusion_experiment(&book, FusionVariant::Standard)?;
    let text = p.to_text();
    print!("{text}");
    assert_eq!(Protocol::parse(&text)?, p);
    Ok(())
}
