//! Cut a randomized structured mesh with a node path and check the pieces
//! cover the skin.
//!
//! `cargo run --example decompose -- 30 20 7` uses a 30 x 20 cell grid and
//! seed 7.

use std::collections::BTreeSet;

use panelize::fixtures::{GridCut, StructuredGrid};
use panelize::{build_adjacency, decompose, DividingCurve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let nx = args.first().copied().unwrap_or(12);
    let ny = args.get(1).copied().unwrap_or(8);
    let seed = args.get(2).copied().unwrap_or(1) as u64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = StructuredGrid::random(nx, ny, &mut rng);
    let mesh = grid.mesh();
    let cut = GridCut::random(&grid, &mut rng).expect("grid is at least two cells wide");
    let index = build_adjacency(&mesh).expect("grid mesh is valid");
    let curve = DividingCurve::new(cut.nodes.clone()).expect("cut has two or more nodes");
    let panels = decompose(&index, &[curve]).expect("cut runs boundary to boundary");

    let mut covered = BTreeSet::new();
    for p in &panels {
        println!(
            "panel {}: {} elements, boundary of {} nodes",
            p.id,
            p.elements.len(),
            p.boundary.outer().len()
        );
        covered.extend(p.elements.iter().copied());
    }
    println!(
        "{} of {} elements covered, cut has {} nodes",
        covered.len(),
        mesh.element_count(),
        cut.nodes.len()
    );
}
