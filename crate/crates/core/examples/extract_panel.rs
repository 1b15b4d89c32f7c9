//! Pull one panel out of the reference mesh from its boundary loop alone.

use panelize::fixtures::{reference_lower_loop, reference_mesh};
use panelize::{build_adjacency, extract_panel, PanelBoundary};

fn main() {
    let index = build_adjacency(&reference_mesh()).expect("reference mesh is valid");
    let boundary = PanelBoundary::new(reference_lower_loop()).expect("closed loop");
    let panel = extract_panel(&index, &boundary).expect("loop lies on mesh edges");
    let ids: Vec<String> = panel.elements.iter().map(|e| e.to_string()).collect();
    println!(
        "panel {}: {} elements [{}]",
        panel.id,
        panel.elements.len(),
        ids.join(", ")
    );
    println!("{} nodes", panel.nodes.len());
}
