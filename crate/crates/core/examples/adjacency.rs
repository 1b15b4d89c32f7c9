//! Build the adjacency index of the reference mesh and list its free edges.

use panelize::fixtures::reference_mesh;
use panelize::{build_adjacency, NodeId};

fn main() {
    let mesh = reference_mesh();
    let index = build_adjacency(&mesh).expect("reference mesh is valid");
    println!(
        "{} nodes, {} elements, {} edges",
        mesh.node_count(),
        index.element_count(),
        index.edge_to_elements().len()
    );
    let free: Vec<String> = index
        .free_edges()
        .map(|e| {
            let (a, b) = e.nodes();
            format!("{a}-{b}")
        })
        .collect();
    println!("free edges ({}): {}", free.len(), free.join(" "));
    let around: Vec<String> = index
        .elements_at_node(NodeId(8))
        .expect("node 8 is in the mesh")
        .iter()
        .map(|e| e.to_string())
        .collect();
    println!("elements at node 8: {}", around.join(" "));
}
