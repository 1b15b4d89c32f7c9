//! Structured triangle meshes used by tests, examples and the CLI demos.
//!
//! Node `(i, j)` of an `nx` x `ny` cell grid has ID `j * (nx + 1) + i + 1`
//! and sits at `(i, j, 0)`. Cell `(i, j)` with corners `a = (i, j)`,
//! `b = (i + 1, j)`, `c = (i, j + 1)`, `d = (i + 1, j + 1)` yields elements
//! `2 * (j * nx + i) + 1` and `+ 2`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::mesh::{Element, ElementId, Mesh, NodeId};

/// Which diagonal splits a grid cell into two triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// `a-d`: triangles `(a, b, d)` and `(a, d, c)`.
    Rising,
    /// `b-c`: triangles `(a, b, c)` and `(b, d, c)`.
    Falling,
}

#[derive(Debug, Clone)]
pub struct StructuredGrid {
    pub nx: usize,
    pub ny: usize,
    diagonals: Vec<Diagonal>,
}

impl StructuredGrid {
    pub fn uniform(nx: usize, ny: usize, diagonal: Diagonal) -> Self {
        assert!(nx >= 1 && ny >= 1);
        StructuredGrid {
            nx,
            ny,
            diagonals: vec![diagonal; nx * ny],
        }
    }

    pub fn random<R: Rng>(nx: usize, ny: usize, rng: &mut R) -> Self {
        assert!(nx >= 1 && ny >= 1);
        let diagonals = (0..nx * ny)
            .map(|_| {
                if rng.gen() {
                    Diagonal::Rising
                } else {
                    Diagonal::Falling
                }
            })
            .collect();
        StructuredGrid { nx, ny, diagonals }
    }

    pub fn node(&self, i: usize, j: usize) -> NodeId {
        debug_assert!(i <= self.nx && j <= self.ny);
        NodeId((j * (self.nx + 1) + i + 1) as u64)
    }

    pub fn diagonal(&self, i: usize, j: usize) -> Diagonal {
        self.diagonals[j * self.nx + i]
    }

    /// The two triangles of cell `(i, j)`.
    pub fn cell_elements(&self, i: usize, j: usize) -> [ElementId; 2] {
        let base = 2 * (j * self.nx + i) as u64;
        [ElementId(base + 1), ElementId(base + 2)]
    }

    pub fn mesh(&self) -> Mesh {
        let mut mesh = Mesh::new();
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                mesh.add_node(self.node(i, j), Some([i as f64, j as f64, 0.0]))
                    .expect("grid node IDs are unique");
            }
        }
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (a, b, c, d) = (
                    self.node(i, j).0,
                    self.node(i + 1, j).0,
                    self.node(i, j + 1).0,
                    self.node(i + 1, j + 1).0,
                );
                let [e1, e2] = self.cell_elements(i, j);
                let (t1, t2) = match self.diagonal(i, j) {
                    Diagonal::Rising => ([a, b, d], [a, d, c]),
                    Diagonal::Falling => ([a, b, c], [b, d, c]),
                };
                for (id, tri) in [(e1, t1), (e2, t2)] {
                    mesh.add_element(Element::tri(id.0, tri).expect("grid triangles are valid"))
                        .expect("grid element IDs are unique");
                }
            }
        }
        mesh
    }

    /// Counter-clockwise outer boundary starting at node `(0, 0)`.
    pub fn outer_loop(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(2 * (self.nx + self.ny));
        out.extend((0..self.nx).map(|i| self.node(i, 0)));
        out.extend((0..self.ny).map(|j| self.node(self.nx, j)));
        out.extend((1..=self.nx).rev().map(|i| self.node(i, self.ny)));
        out.extend((1..=self.ny).rev().map(|j| self.node(0, j)));
        out
    }
}

/// The 3 x 5 node, 16 triangle hand-checkable mesh.
pub fn reference_mesh() -> Mesh {
    reference_grid().mesh()
}

pub fn reference_grid() -> StructuredGrid {
    StructuredGrid::uniform(4, 2, Diagonal::Rising)
}

/// Lower half of the reference mesh, counter-clockwise from node 1.
pub fn reference_lower_loop() -> Vec<NodeId> {
    [1, 2, 3, 4, 5, 10, 9, 8, 7, 6].map(NodeId).to_vec()
}

pub fn reference_upper_loop() -> Vec<NodeId> {
    [6, 7, 8, 9, 10, 15, 14, 13, 12, 11].map(NodeId).to_vec()
}

/// Blade stiffeners on the reference mesh split along its middle row.
///
/// Chain A runs 1-2-3 (quads 101, 102) in the lower panel and chain B runs
/// 11-12-13 (quads 111, 112) in the upper one. Chain C turns the corner
/// 8-9-14: quad 121 lies on the dividing row and ties between the panels,
/// quad 122 climbs into the upper panel. Quad 131 touches the skin at node
/// 5 only. Blade tops sit at `z = 0.1`.
pub fn reference_stiffeners() -> Mesh {
    let skin = reference_mesh();
    let mut mesh = Mesh::new();
    let mut blade = |first: u64, path: &[u64], offset: u64| {
        for &n in path {
            let p = skin
                .coordinate(NodeId(n))
                .expect("reference mesh has coordinates");
            let _ = mesh.add_node(NodeId(n), Some(p));
            let _ = mesh.add_node(NodeId(n + offset), Some([p[0], p[1], 0.1]));
        }
        for (k, w) in path.windows(2).enumerate() {
            let q = Element::quad(first + k as u64, [w[0], w[1], w[1] + offset, w[0] + offset])
                .expect("quad");
            mesh.add_element(q).expect("fresh element id");
        }
    };
    blade(101, &[1, 2, 3], 100);
    blade(111, &[11, 12, 13], 100);
    blade(121, &[8, 9, 14], 200);
    for (n, p) in [
        (5, [4.0, 0.0, 0.0]),
        (301, [4.0, -0.2, 0.0]),
        (302, [4.2, -0.2, 0.0]),
        (303, [4.2, 0.0, 0.0]),
    ] {
        let _ = mesh.add_node(NodeId(n), Some(p));
    }
    mesh.add_element(Element::quad(131, [5, 301, 302, 303]).expect("quad"))
        .expect("fresh element id");
    mesh
}

/// A simple node path crossing a grid from the bottom edge to the top edge.
///
/// Interior nodes stay off the outer boundary; steps are horizontal,
/// vertical, or along a cell diagonal when the mesh has one there.
#[derive(Debug, Clone)]
pub struct GridCut {
    /// `(i, j)` grid positions, bottom to top.
    pub cells: Vec<(usize, usize)>,
    pub nodes: Vec<NodeId>,
}

impl GridCut {
    pub fn random<R: Rng>(grid: &StructuredGrid, rng: &mut R) -> Option<GridCut> {
        if grid.nx < 2 || grid.ny < 1 {
            return None;
        }
        let (nx, ny) = (grid.nx, grid.ny);
        let mut i = rng.gen_range(1..nx);
        let mut j = 0;
        let mut cells = vec![(i, j)];
        // first step is always vertical so the start is the only bottom node
        j += 1;
        cells.push((i, j));
        while j < ny {
            let mut moves: Vec<(usize, usize)> = vec![(i, j + 1)];
            if j < ny {
                if i < nx - 1 && grid.diagonal(i, j) == Diagonal::Rising {
                    moves.push((i + 1, j + 1));
                }
                if i >= 2 && grid.diagonal(i - 1, j) == Diagonal::Falling {
                    moves.push((i - 1, j + 1));
                }
            }
            // optional horizontal run in one direction
            if j < ny && rng.gen_bool(0.4) {
                let left = rng.gen_bool(0.5);
                let run = rng.gen_range(1..=3usize);
                for _ in 0..run {
                    let ni = if left {
                        if i <= 1 {
                            break;
                        }
                        i - 1
                    } else {
                        if i + 1 >= nx {
                            break;
                        }
                        i + 1
                    };
                    i = ni;
                    cells.push((i, j));
                }
                moves = vec![(i, j + 1)];
                if i < nx - 1 && grid.diagonal(i, j) == Diagonal::Rising {
                    moves.push((i + 1, j + 1));
                }
                if i >= 2 && grid.diagonal(i - 1, j) == Diagonal::Falling {
                    moves.push((i - 1, j + 1));
                }
            }
            let &(ni, nj) = moves.choose(rng).expect("vertical move always exists");
            i = ni;
            j = nj;
            cells.push((i, j));
        }
        let nodes = cells.iter().map(|&(i, j)| grid.node(i, j)).collect();
        Some(GridCut { cells, nodes })
    }

    /// Region left of the cut, as a closed loop.
    pub fn left_loop(&self, grid: &StructuredGrid) -> Vec<NodeId> {
        let (i0, _) = self.cells[0];
        let (it, _) = *self.cells.last().unwrap();
        let mut out = self.nodes.clone();
        out.extend((0..it).rev().map(|i| grid.node(i, grid.ny)));
        out.extend((1..grid.ny).rev().map(|j| grid.node(0, j)));
        out.extend((0..i0).map(|i| grid.node(i, 0)));
        out
    }

    /// Region right of the cut, as a closed loop.
    pub fn right_loop(&self, grid: &StructuredGrid) -> Vec<NodeId> {
        let (i0, _) = self.cells[0];
        let (it, _) = *self.cells.last().unwrap();
        let mut out: Vec<NodeId> = (i0..=grid.nx).map(|i| grid.node(i, 0)).collect();
        out.extend((1..=grid.ny).map(|j| grid.node(grid.nx, j)));
        out.extend((it + 1..grid.nx).rev().map(|i| grid.node(i, grid.ny)));
        out.extend(self.nodes.iter().rev().take(self.nodes.len() - 1));
        out
    }
}

/// Axis-aligned rectangle of grid lines `i0..=i1` x `j0..=j1`, as a loop.
pub fn rectangle_loop(
    grid: &StructuredGrid,
    (i0, j0): (usize, usize),
    (i1, j1): (usize, usize),
) -> Vec<NodeId> {
    assert!(i0 < i1 && j0 < j1 && i1 <= grid.nx && j1 <= grid.ny);
    let mut out = Vec::new();
    out.extend((i0..i1).map(|i| grid.node(i, j0)));
    out.extend((j0..j1).map(|j| grid.node(i1, j)));
    out.extend((i0 + 1..=i1).rev().map(|i| grid.node(i, j1)));
    out.extend((j0 + 1..=j1).rev().map(|j| grid.node(i0, j)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_mesh_layout() {
        let m = reference_mesh();
        assert_eq!(m.node_count(), 15);
        assert_eq!(m.element_count(), 16);
        let e1 = m.element(ElementId(1)).unwrap();
        assert_eq!(e1.nodes(), &[NodeId(1), NodeId(2), NodeId(7)]);
        let e2 = m.element(ElementId(2)).unwrap();
        assert_eq!(e2.nodes(), &[NodeId(1), NodeId(7), NodeId(6)]);
        let e16 = m.element(ElementId(16)).unwrap();
        assert_eq!(e16.nodes(), &[NodeId(9), NodeId(15), NodeId(14)]);
    }

    #[test]
    fn random_cuts_are_simple_edge_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let nx = rng.gen_range(2..12);
            let ny = rng.gen_range(1..12);
            let grid = StructuredGrid::random(nx, ny, &mut rng);
            let idx = crate::mesh::build_adjacency(&grid.mesh()).unwrap();
            let cut = GridCut::random(&grid, &mut rng).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for w in cut.nodes.windows(2) {
                assert!(idx.is_edge(crate::mesh::Edge::new(w[0], w[1])));
            }
            for n in &cut.nodes {
                assert!(seen.insert(*n), "cut revisits node {n}");
            }
            for lp in [cut.left_loop(&grid), cut.right_loop(&grid)] {
                let set: std::collections::BTreeSet<_> = lp.iter().collect();
                assert_eq!(set.len(), lp.len());
                for k in 0..lp.len() {
                    let e = crate::mesh::Edge::new(lp[k], lp[(k + 1) % lp.len()]);
                    assert!(idx.is_edge(e), "loop edge {e} missing");
                }
            }
        }
    }
}
