#![allow(dead_code)]

use std::sync::OnceLock;

use parafermion_sim::lattice::{BoundaryMode, Lattice};
use parafermion_sim::protocols::{
    braiding_experiment, fusion_experiment, prep_experiment, BraidLayout, FusionVariant, GateBook, PrepMethod,
    Protocol,
};

pub fn book() -> &'static GateBook {
    static BOOK: OnceLock<GateBook> = OnceLock::new();
    BOOK.get_or_init(|| GateBook::build().expect("gate book"))
}

pub fn lattice(rows: usize, cols: usize) -> Lattice {
    Lattice::new(rows, cols, 3, BoundaryMode::FullPlaquettesOnly).expect("lattice")
}

pub fn prep(rows: usize, cols: usize, method: PrepMethod) -> Protocol {
    prep_experiment(book(), lattice(rows, cols), method).expect("prep protocol")
}

pub fn fusion(variant: FusionVariant) -> Protocol {
    fusion_experiment(book(), variant).expect("fusion protocol")
}

pub fn braid(size: usize, braid: bool) -> Protocol {
    let layout = BraidLayout::for_lattice(size, size).expect("layout");
    braiding_experiment(book(), lattice(size, size), &layout, braid).expect("braid protocol")
}

/// Every scripted protocol small enough for the dense backend.
pub fn small_protocols() -> Vec<Protocol> {
    vec![
        prep(3, 4, PrepMethod::Circuit),
        prep(3, 4, PrepMethod::Measurement),
        fusion(FusionVariant::Standard),
        fusion(FusionVariant::Mirror),
        fusion(FusionVariant::Control),
    ]
}
