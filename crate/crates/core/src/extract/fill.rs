use std::collections::{BTreeSet, VecDeque};

use crate::mesh::{AdjacencyIndex, Edge, ElementId, ElementSet};

use super::{ExtractError, Panel, PanelBoundary, PanelId, Result};

/// Closure of `start` under edge adjacency, never crossing `walls`.
/// A free edge that is not a wall means the region leaks.
fn fill_within(
    index: &AdjacencyIndex,
    start: &ElementSet,
    walls: &BTreeSet<Edge>,
) -> Result<ElementSet, Leak> {
    let mut seen: ElementSet = start.clone();
    let mut queue: VecDeque<ElementId> = start.iter().copied().collect();
    while let Some(e) = queue.pop_front() {
        let element = index.try_element(e).map_err(|err| Leak::Hard(err.into()))?;
        for edge in element.edges() {
            if walls.contains(&edge) {
                continue;
            }
            match index.across(e, edge) {
                Err(nm) => return Err(Leak::Hard(ExtractError::NonManifoldEdge(nm.0))),
                Ok(None) => return Err(Leak::Free(edge)),
                Ok(Some(o)) => {
                    if seen.insert(o) {
                        queue.push_back(o);
                    }
                }
            }
        }
    }
    Ok(seen)
}

enum Leak {
    Free(Edge),
    Hard(ExtractError),
}

/// True when the wall-bounded closure of `elements` reaches no free edge
/// outside `walls`.
pub(crate) fn closure_is_enclosed(
    index: &AdjacencyIndex,
    elements: &ElementSet,
    walls: &BTreeSet<Edge>,
) -> Result<bool> {
    match fill_within(index, elements, walls) {
        Ok(_) => Ok(true),
        Err(Leak::Free(_)) => Ok(false),
        Err(Leak::Hard(e)) => Err(e),
    }
}

/// Grows the panel from `seed` and the known boundary elements across
/// shared edges; edges of `boundary` are walls.
pub fn flood_fill_panel(
    index: &AdjacencyIndex,
    boundary_elements: &ElementSet,
    seed: ElementId,
    boundary: &PanelBoundary,
) -> Result<Panel> {
    let walls = boundary.wall_edges();
    let seed_element = index.try_element(seed)?;
    let reachable = boundary_elements.contains(&seed)
        || seed_element
            .edges()
            .filter(|e| !walls.contains(e))
            .filter_map(|e| index.elements_on_edge(e))
            .flatten()
            .any(|o| boundary_elements.contains(o));
    if !reachable {
        return Err(ExtractError::SeedUnreachable(seed));
    }
    let mut start = boundary_elements.clone();
    start.insert(seed);
    let elements = match fill_within(index, &start, &walls) {
        Ok(set) => set,
        Err(Leak::Free(edge)) => return Err(ExtractError::FillEscaped(edge)),
        Err(Leak::Hard(e)) => return Err(e),
    };
    Panel::from_elements(index, PanelId(1), elements, boundary.clone())
}

/// Plain breadth-first closure from `seed` that never crosses a wall edge.
///
/// Independent of the walk machinery: it looks only at which elements own
/// each edge.
pub fn oracle_side_fill(
    index: &AdjacencyIndex,
    wall_edges: &BTreeSet<Edge>,
    seed: ElementId,
) -> ElementSet {
    let mut out = ElementSet::new();
    if index.element(seed).is_none() {
        return out;
    }
    out.insert(seed);
    let mut stack = vec![seed];
    while let Some(e) = stack.pop() {
        let nodes = index
            .element(e)
            .map(|el| el.nodes().to_vec())
            .unwrap_or_default();
        for i in 0..nodes.len() {
            let edge = Edge::new(nodes[i], nodes[(i + 1) % nodes.len()]);
            if wall_edges.contains(&edge) {
                continue;
            }
            if let Some(owners) = index.elements_on_edge(edge) {
                for &o in owners {
                    if out.insert(o) {
                        stack.push(o);
                    }
                }
            }
        }
    }
    out
}
