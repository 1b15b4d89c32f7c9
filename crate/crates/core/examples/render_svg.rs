//! Draw the two-panel split of the reference mesh as SVG.
//!
//! Writes to the path given as the first argument, or to stdout.

use panelize::fixtures::reference_mesh;
use panelize::manifest::Manifest;
use panelize::render::{render_svg, RenderOptions};
use panelize::{build_adjacency, decompose, DividingCurve};

fn main() {
    let mesh = reference_mesh();
    let index = build_adjacency(&mesh).expect("reference mesh is valid");
    let curves = vec![DividingCurve::from_ids(6..=10).expect("two or more nodes")];
    let panels = decompose(&index, &curves).expect("curve spans the mesh");
    let manifest = Manifest {
        curves,
        ..Manifest::from_panels(&panels)
    };
    let svg =
        render_svg(&mesh, &manifest, &RenderOptions::default()).expect("mesh has coordinates");
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, svg).expect("writable output path"),
        None => print!("{svg}"),
    }
}
