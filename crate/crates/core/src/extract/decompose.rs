use std::collections::BTreeMap;

use crate::mesh::{AdjacencyIndex, Edge, ElementSet, NodeId, NodeSet};

use super::{
    canonical_loop, extract_panel, mea_first_element, mid_element_walk, periphery_walk,
    DividingCurve, ExtractError, Panel, PanelBoundary, PanelId, Result,
};

/// Chains the free edges of `index` into closed loops, each in canonical
/// rotation, sorted by first node.
pub fn free_boundary_loops(index: &AdjacencyIndex) -> Result<Vec<Vec<NodeId>>> {
    let mut adjacent: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for edge in index.free_edges() {
        let (a, b) = edge.nodes();
        adjacent.entry(a).or_default().push(b);
        adjacent.entry(b).or_default().push(a);
    }
    if let Some((&n, _)) = adjacent.iter().find(|(_, v)| v.len() != 2) {
        return Err(ExtractError::NotAPartition(format!(
            "free boundary is not a set of simple loops at node {n}"
        )));
    }
    let mut visited = NodeSet::new();
    let mut loops = Vec::new();
    for &start in adjacent.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut ring = vec![start];
        visited.insert(start);
        let mut prev = start;
        let mut cur = adjacent[&start][0].min(adjacent[&start][1]);
        while cur != start {
            ring.push(cur);
            visited.insert(cur);
            let nb = &adjacent[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        loops.push(canonical_loop(ring));
    }
    loops.sort();
    Ok(loops)
}

struct Split {
    panels: Vec<Panel>,
}

impl Split {
    fn loop_nodes(&self) -> NodeSet {
        self.panels
            .iter()
            .flat_map(|p| p.boundary.node_set())
            .collect()
    }

    fn apply(&mut self, index: &AdjacencyIndex, piece: &[NodeId]) -> Result<()> {
        let first_edge = Edge::new(piece[0], piece[1]);
        let owners = index
            .elements_on_edge(first_edge)
            .ok_or(ExtractError::CurveNotEdgePath(piece[0], piece[1]))?;
        let pi = self
            .panels
            .iter()
            .position(|p| owners.iter().any(|o| p.elements.contains(o)))
            .ok_or_else(|| {
                ExtractError::NotAPartition(format!("segment {first_edge} lies in no panel"))
            })?;
        let parent = &self.panels[pi];
        let walls = parent.boundary.wall_edges();
        if let Some(e) = piece
            .windows(2)
            .map(|w| Edge::new(w[0], w[1]))
            .find(|e| walls.contains(e))
        {
            return Err(ExtractError::CurveOverlapsBoundary(e));
        }
        let outer = parent.boundary.outer();
        let pos = |n: NodeId| {
            outer
                .iter()
                .position(|&m| m == n)
                .ok_or(ExtractError::DanglingCurve(n))
        };
        let (i, j) = (pos(piece[0])?, pos(*piece.last().unwrap())?);
        let k = outer.len();
        let arc = |from: usize, to: usize| -> Vec<NodeId> {
            // exclusive of both ends, walking forward
            let mut out = Vec::new();
            let mut p = (from + 1) % k;
            while p != to {
                out.push(outer[p]);
                p = (p + 1) % k;
            }
            out
        };
        let mut ring_a: Vec<NodeId> = piece.to_vec();
        ring_a.extend(arc(j, i));
        let mut ring_b: Vec<NodeId> = piece.iter().rev().copied().collect();
        ring_b.extend(arc(i, j));

        let holes = parent.boundary.holes().to_vec();
        let make = |ring: Vec<NodeId>| -> Result<PanelBoundary> {
            holes
                .iter()
                .try_fold(PanelBoundary::new(ring)?, |b, h| b.with_hole(h.clone()))
        };
        let (bound_a, bound_b) = (make(ring_a)?, make(ring_b)?);
        let a = extract_panel(index, &bound_a)?;
        let b = extract_panel(index, &bound_b)?;

        if !a.elements.is_disjoint(&b.elements)
            || a.elements.len() + b.elements.len() != parent.elements.len()
        {
            return Err(ExtractError::NotAPartition(format!(
                "splitting panel {} along {:?} does not partition it",
                parent.id,
                piece.iter().map(|n| n.0).collect::<Vec<_>>()
            )));
        }

        // the curve-side walk on each child must agree with its fill
        let curve = DividingCurve::new(piece.to_vec())?;
        let mut sides = Vec::with_capacity(2);
        for (bound, child) in [(&bound_a, &a), (&bound_b, &b)] {
            let periphery = periphery_walk(index, bound, curve.first())?;
            let first = mea_first_element(index, &curve, &periphery)?;
            let side = mid_element_walk(index, &curve, first)?.element_set();
            if !side.is_subset(&child.elements) {
                return Err(ExtractError::InconsistentSides(parent.id));
            }
            sides.push(side);
        }
        if !sides[0].is_disjoint(&sides[1]) {
            return Err(ExtractError::InconsistentSides(parent.id));
        }

        let a = keep_own_holes(index, a)?;
        let b = keep_own_holes(index, b)?;
        self.panels[pi] = a;
        self.panels.push(b);
        Ok(())
    }
}

fn keep_own_holes(index: &AdjacencyIndex, panel: Panel) -> Result<Panel> {
    if panel.boundary.holes().is_empty() {
        return Ok(panel);
    }
    let mut boundary = PanelBoundary::new(panel.boundary.outer().to_vec())?;
    for hole in panel.boundary.holes() {
        let k = hole.len();
        let owned = (0..k)
            .map(|i| Edge::new(hole[i], hole[(i + 1) % k]))
            .filter_map(|e| index.elements_on_edge(e))
            .flatten()
            .any(|e| panel.elements.contains(e));
        if owned {
            boundary = boundary.with_hole(hole.clone())?;
        }
    }
    Ok(Panel { boundary, ..panel })
}

/// Splits the skin held by `index` into panels along `curves`.
///
/// Curves may end on the free boundary or on another curve, and may cross
/// each other; every crossing node becomes a panel corner. Panel IDs are
/// assigned from node IDs alone, so relabelling elements does not reorder
/// panels.
pub fn decompose(index: &AdjacencyIndex, curves: &[DividingCurve]) -> Result<Vec<Panel>> {
    let loops = free_boundary_loops(index)?;
    let outer_pos = loops
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .ok_or_else(|| ExtractError::NotAPartition("mesh has no free boundary".into()))?;
    let mut boundary = PanelBoundary::new(loops[outer_pos].clone())?;
    for (i, hole) in loops.iter().enumerate() {
        if i != outer_pos {
            boundary = boundary.with_hole(hole.clone())?;
        }
    }

    let boundary_nodes: NodeSet = loops.iter().flatten().copied().collect();
    for (ci, c) in curves.iter().enumerate() {
        c.check_against(index)?;
        for end in [c.first(), c.last()] {
            let on_other = curves
                .iter()
                .enumerate()
                .any(|(cj, other)| cj != ci && other.nodes().contains(&end));
            if !boundary_nodes.contains(&end) && !on_other {
                return Err(ExtractError::DanglingCurve(end));
            }
        }
    }

    let whole = extract_panel(index, &boundary)?;
    if whole.elements.len() != index.element_count() {
        return Err(ExtractError::NotAPartition(format!(
            "outer boundary encloses {} of {} elements; the skin is not connected",
            whole.elements.len(),
            index.element_count()
        )));
    }
    let mut split = Split {
        panels: vec![whole],
    };

    let mut remaining: Vec<Vec<NodeId>> = curves.iter().map(|c| c.nodes().to_vec()).collect();
    while !remaining.is_empty() {
        let mut progress = false;
        let mut deferred = Vec::new();
        for curve in remaining {
            let anchored = split.loop_nodes();
            let stops: Vec<usize> = (0..curve.len())
                .filter(|&i| anchored.contains(&curve[i]))
                .collect();
            if stops.len() < 2 {
                deferred.push(curve);
                continue;
            }
            for w in stops.windows(2) {
                split.apply(index, &curve[w[0]..=w[1]])?;
                progress = true;
            }
            let (head, tail) = (stops[0], *stops.last().unwrap());
            if head > 0 {
                deferred.push(curve[..=head].to_vec());
            }
            if tail + 1 < curve.len() {
                deferred.push(curve[tail..].to_vec());
            }
        }
        if !progress && !deferred.is_empty() {
            let anchored = split.loop_nodes();
            let c = &deferred[0];
            let end = if anchored.contains(&c[0]) {
                *c.last().unwrap()
            } else {
                c[0]
            };
            return Err(ExtractError::DanglingCurve(end));
        }
        remaining = deferred;
    }

    let mut panels = split.panels;
    panels.sort_by_cached_key(|p| {
        let nodes: Vec<NodeId> = p.nodes.iter().copied().collect();
        (nodes[0], nodes)
    });
    let mut covered = ElementSet::new();
    for (i, p) in panels.iter_mut().enumerate() {
        p.id = PanelId(i as u32 + 1);
        p.boundary = p.boundary.canonical();
        if !covered.is_disjoint(&p.elements) {
            return Err(ExtractError::NotAPartition(format!(
                "panel {} overlaps another panel",
                p.id
            )));
        }
        covered.extend(p.elements.iter().copied());
    }
    if covered.len() != index.element_count() {
        return Err(ExtractError::NotAPartition(
            "panels do not cover the skin".into(),
        ));
    }
    Ok(panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{reference_grid, reference_mesh};
    use crate::mesh::{build_adjacency, element_set};

    fn idx() -> AdjacencyIndex {
        build_adjacency(&reference_mesh()).unwrap()
    }

    #[test]
    fn free_loop_of_reference_mesh() {
        let loops = free_boundary_loops(&idx()).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0], reference_grid().outer_loop());
    }

    #[test]
    fn no_curves_gives_one_panel() {
        let panels = decompose(&idx(), &[]).unwrap();
        assert_eq!(panels.len(), 1);
        assert_eq!(panels[0].elements, element_set(1..=16));
        assert_eq!(panels[0].id, PanelId(1));
    }

    #[test]
    fn mid_row_split() {
        let curve = DividingCurve::from_ids(6..=10).unwrap();
        let panels = decompose(&idx(), &[curve]).unwrap();
        assert_eq!(panels.len(), 2);
        assert_eq!(panels[0].elements, element_set(1..=8));
        assert_eq!(panels[1].elements, element_set(9..=16));
        assert_eq!(
            panels[0].boundary.outer(),
            [1, 2, 3, 4, 5, 10, 9, 8, 7, 6].map(NodeId).as_slice()
        );
        assert_eq!(
            panels[1].boundary.outer(),
            [6, 7, 8, 9, 10, 15, 14, 13, 12, 11].map(NodeId).as_slice()
        );
    }

    #[test]
    fn crossing_curves_give_four_panels() {
        let row = DividingCurve::from_ids(6..=10).unwrap();
        let col = DividingCurve::from_ids([3, 8, 13]).unwrap();
        for curves in [vec![row.clone(), col.clone()], vec![col, row]] {
            let panels = decompose(&idx(), &curves).unwrap();
            let sets: Vec<_> = panels.iter().map(|p| p.elements.clone()).collect();
            assert_eq!(
                sets,
                vec![
                    element_set([1, 2, 3, 4]),
                    element_set([5, 6, 7, 8]),
                    element_set([9, 10, 11, 12]),
                    element_set([13, 14, 15, 16]),
                ]
            );
        }
    }

    #[test]
    fn t_junction_curves() {
        // the column only reaches the mid-row curve
        let row = DividingCurve::from_ids(6..=10).unwrap();
        let stub = DividingCurve::from_ids([3, 8]).unwrap();
        let panels = decompose(&idx(), &[stub, row]).unwrap();
        assert_eq!(panels.len(), 3);
        assert_eq!(panels.iter().map(|p| p.elements.len()).sum::<usize>(), 16);
    }

    #[test]
    fn dangling_curve_is_rejected() {
        let curve = DividingCurve::from_ids([6, 7, 8]).unwrap();
        assert_eq!(
            decompose(&idx(), &[curve]).unwrap_err(),
            ExtractError::DanglingCurve(NodeId(8))
        );
    }

    #[test]
    fn curve_along_boundary_is_rejected() {
        let curve = DividingCurve::from_ids([1, 2]).unwrap();
        assert!(matches!(
            decompose(&idx(), &[curve]),
            Err(ExtractError::CurveOverlapsBoundary(_))
        ));
    }
}
