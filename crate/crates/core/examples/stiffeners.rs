//! Assign blade stiffeners to the two panels of the reference mesh and
//! group them into chains.

use panelize::fixtures::{reference_mesh, reference_stiffeners};
use panelize::stiffener::{associate_stiffeners, chains_by_panel};
use panelize::{build_adjacency, decompose, DividingCurve};

fn main() {
    let index = build_adjacency(&reference_mesh()).expect("reference mesh is valid");
    let curve = DividingCurve::from_ids(6..=10).expect("two or more nodes");
    let panels = decompose(&index, &[curve]).expect("curve spans the mesh");
    let quads = reference_stiffeners();

    let association = associate_stiffeners(&panels, &quads).expect("all quads");
    for (panel, chains) in chains_by_panel(&association, &quads).expect("no junctions") {
        for c in chains {
            let ids: Vec<String> = c.elements.iter().map(|e| e.to_string()).collect();
            println!("panel {panel}: chain [{}]", ids.join(", "));
        }
    }
    for a in &association.ambiguous {
        println!(
            "quad {} tied between {:?}, went to panel {}",
            a.element, a.candidates, a.chosen
        );
    }
    for e in &association.unassigned {
        println!("quad {e} unassigned");
    }
    for w in &association.warnings {
        println!("warning: {w}");
    }
}
