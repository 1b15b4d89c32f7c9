use std::collections::BTreeSet;

use crate::mesh::{AdjacencyIndex, Edge, ElementId, ElementSet, NodeId, NodeSet};

use super::fill::closure_is_enclosed;
use super::{DividingCurve, ExtractError, PanelBoundary, Result};

/// Progress of a boundary or curve walk.
///
/// `element_list` holds `(element, connectivity)` pairs in the order the
/// walk accepted them; `node_list` the boundary or curve nodes in traversal
/// order. `restarts` counts wrong-path re-initializations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkState {
    pub checkpoint_node: NodeId,
    pub checkpoint_element: ElementId,
    pub element_list: Vec<(ElementId, Vec<NodeId>)>,
    pub node_list: Vec<NodeId>,
    pub restarts: usize,
}

impl WalkState {
    fn start(index: &AdjacencyIndex, node: NodeId, element: ElementId) -> Result<Self> {
        let mut s = WalkState {
            checkpoint_node: node,
            checkpoint_element: element,
            element_list: Vec::new(),
            node_list: vec![node],
            restarts: 0,
        };
        s.accept(index, element)?;
        Ok(s)
    }

    fn accept(&mut self, index: &AdjacencyIndex, e: ElementId) -> Result<()> {
        self.checkpoint_element = e;
        if !self.element_list.iter().any(|(id, _)| *id == e) {
            let nodes = index.try_element(e)?.nodes().to_vec();
            self.element_list.push((e, nodes));
        }
        Ok(())
    }

    pub fn element_set(&self) -> ElementSet {
        self.element_list.iter().map(|(e, _)| *e).collect()
    }

    pub fn elements_in_order(&self) -> Vec<ElementId> {
        self.element_list.iter().map(|(e, _)| *e).collect()
    }

    /// Nodes of all accepted elements.
    pub fn accepted_nodes(&self) -> NodeSet {
        self.element_list
            .iter()
            .flat_map(|(_, ns)| ns.iter().copied())
            .collect()
    }
}

enum Turn {
    /// Reached the target edge inside this element.
    Arrived(ElementId),
    /// Ran into an edge that stops the rotation but is not the target.
    Blocked { edge: Edge, free: bool },
}

/// Rotates around `pivot` starting in `from`, which was entered through
/// `incoming`, crossing element edges until one holding `target` is found.
/// Edges in `walls` and free edges stop the rotation.
fn turn_around(
    index: &AdjacencyIndex,
    pivot: NodeId,
    from: ElementId,
    incoming: Edge,
    target: Edge,
    walls: &BTreeSet<Edge>,
) -> Result<Turn> {
    let fan = index.elements_at_node(pivot).map_or(0, |s| s.len());
    let mut current = from;
    let mut entered = incoming;
    for _ in 0..=fan {
        let element = index.try_element(current)?;
        let [a, b] = element
            .edges_at(pivot)
            .expect("rotation only visits elements around the pivot");
        let out = if a == entered { b } else { a };
        if out == target {
            return Ok(Turn::Arrived(current));
        }
        if walls.contains(&out) {
            return Ok(Turn::Blocked {
                edge: out,
                free: false,
            });
        }
        match index.across(current, out) {
            Err(nm) => return Err(ExtractError::NonManifoldEdge(nm.0)),
            Ok(None) => {
                return Ok(Turn::Blocked {
                    edge: out,
                    free: true,
                })
            }
            Ok(Some(next)) => {
                current = next;
                entered = out;
            }
        }
    }
    // a full turn without meeting the target: the pivot's fan is not a disc
    Err(ExtractError::NonManifoldEdge(target))
}

enum Attempt {
    Done(WalkState),
    WrongPath,
}

fn walk_loop(
    index: &AdjacencyIndex,
    ring: &[NodeId],
    first: ElementId,
    walls: &BTreeSet<Edge>,
) -> Result<Attempt> {
    let k = ring.len();
    let mut state = WalkState::start(index, ring[0], first)?;
    let mut current = first;
    for i in 1..k {
        let (prev, pivot, next) = (ring[i - 1], ring[i], ring[(i + 1) % k]);
        state.checkpoint_node = pivot;
        state.node_list.push(pivot);
        let incoming = Edge::new(prev, pivot);
        match turn_around(
            index,
            pivot,
            current,
            incoming,
            Edge::new(pivot, next),
            walls,
        )? {
            Turn::Arrived(e) => {
                current = e;
                state.accept(index, e)?;
            }
            Turn::Blocked { edge, .. } => {
                // the node the walk would move to next is off the loop (or
                // the loop is crossed by a wall): this side is not the panel
                state.checkpoint_node = edge.other(pivot).expect("blocking edge touches the pivot");
                log::debug!(
                    "periphery walk from element {first} blocked at {edge}; checkpoint {} is off the path",
                    state.checkpoint_node
                );
                return Ok(Attempt::WrongPath);
            }
        }
    }
    state.checkpoint_node = ring[0];
    Ok(Attempt::Done(state))
}

/// Collects, in walk order, the elements on the panel side that own an edge
/// of `boundary`'s outer loop, starting at `start`.
pub fn periphery_walk(
    index: &AdjacencyIndex,
    boundary: &PanelBoundary,
    start: NodeId,
) -> Result<WalkState> {
    walk_candidates(index, boundary, start, None)
}

/// As [`periphery_walk`], but tries `first` before the other candidate at
/// the start edge.
pub fn periphery_walk_preferring(
    index: &AdjacencyIndex,
    boundary: &PanelBoundary,
    start: NodeId,
    first: ElementId,
) -> Result<WalkState> {
    walk_candidates(index, boundary, start, Some(first))
}

fn walk_candidates(
    index: &AdjacencyIndex,
    boundary: &PanelBoundary,
    start: NodeId,
    preferred: Option<ElementId>,
) -> Result<WalkState> {
    let ring = boundary.outer_from(start)?;
    let start_edge = Edge::new(ring[0], ring[1]);
    let on_edge = index
        .elements_on_edge(start_edge)
        .ok_or(ExtractError::BoundaryNotClosed(start_edge))?;
    if on_edge.len() > 2 {
        return Err(ExtractError::NonManifoldEdge(start_edge));
    }
    let mut candidates: Vec<ElementId> = on_edge.iter().copied().collect();
    if let Some(p) = preferred {
        if let Some(pos) = candidates.iter().position(|&c| c == p) {
            candidates[..=pos].rotate_right(1);
        }
    }
    let walls = boundary.wall_edges();
    for (restarts, &first) in candidates.iter().enumerate() {
        match walk_loop(index, &ring, first, &walls)? {
            Attempt::Done(mut state) => {
                // with two candidates a walk can complete on the outside of
                // an interior loop; only the enclosed side is the panel
                if candidates.len() == 1
                    || closure_is_enclosed(index, &state.element_set(), &walls)?
                {
                    state.restarts = restarts;
                    return Ok(state);
                }
                log::debug!("periphery walk from element {first} closed on an unenclosed side");
            }
            Attempt::WrongPath => {}
        }
    }
    Err(ExtractError::NoEnclosedSide(start))
}

/// Elements with at least `k` nodes on the curve: both sides at once.
pub fn curve_side_elements(
    index: &AdjacencyIndex,
    curve: &DividingCurve,
    k: usize,
) -> Result<ElementSet> {
    if curve.nodes().len() < 2 {
        return Err(ExtractError::CurveTooShort);
    }
    Ok(index.elements_sharing_at_least(&curve.node_set(), k))
}

/// Picks the element on the curve's first segment that lies on the panel
/// side, using the elements already accepted by `periphery`.
pub fn mea_first_element(
    index: &AdjacencyIndex,
    curve: &DividingCurve,
    periphery: &WalkState,
) -> Result<ElementId> {
    if !periphery.node_list.contains(&curve.first()) {
        return Err(ExtractError::CurveStartNotOnPeriphery(curve.first()));
    }
    let segment = Edge::new(curve.nodes()[0], curve.nodes()[1]);
    let on_segment = index
        .elements_on_edge(segment)
        .ok_or(ExtractError::CurveNotEdgePath(
            curve.nodes()[0],
            curve.nodes()[1],
        ))?;
    if on_segment.len() > 2 {
        return Err(ExtractError::NonManifoldEdge(segment));
    }
    let accepted = periphery.element_set();
    let accepted_nodes = periphery.accepted_nodes();
    let curve_edges: BTreeSet<Edge> = curve.edges().collect();

    let mut best: Option<(usize, ElementId)> = None;
    for &c in on_segment {
        let element = index.try_element(c)?;
        let touches = accepted.contains(&c)
            || element
                .edges()
                .filter(|e| !curve_edges.contains(e))
                .filter_map(|e| index.elements_on_edge(e))
                .flatten()
                .any(|o| *o != c && accepted.contains(o));
        if !touches {
            continue;
        }
        let score = element.shared_node_count(&accepted_nodes);
        // more shared nodes wins, then the lower ID
        if best.is_none_or(|(s, id)| score > s || (score == s && c < id)) {
            best = Some((score, c));
        }
    }
    best.map(|(_, e)| e)
        .ok_or(ExtractError::NoFirstElement(segment))
}

/// Walks along `curve` on the side of `first`, accepting the element that
/// owns each curve segment on that side.
pub fn mid_element_walk(
    index: &AdjacencyIndex,
    curve: &DividingCurve,
    first: ElementId,
) -> Result<WalkState> {
    let nodes = curve.nodes();
    let segment = Edge::new(nodes[0], nodes[1]);
    if !index.try_element(first)?.has_edge(segment) {
        return Err(ExtractError::FirstElementOffCurve {
            element: first,
            segment,
        });
    }
    let curve_edges: BTreeSet<Edge> = curve.edges().collect();
    let curve_nodes = curve.node_set();
    let mut state = WalkState::start(index, nodes[0], first)?;
    let mut current = first;
    for i in 1..nodes.len() {
        let pivot = nodes[i];
        state.checkpoint_node = pivot;
        state.node_list.push(pivot);
        if i + 1 == nodes.len() {
            break;
        }
        let incoming = Edge::new(nodes[i - 1], pivot);
        let target = Edge::new(pivot, nodes[i + 1]);
        match turn_around(index, pivot, current, incoming, target, &curve_edges)? {
            Turn::Arrived(e) => {
                let element = index.try_element(e)?;
                if element.shared_node_count(&curve_nodes) < 2 {
                    return Err(ExtractError::WalkCrossed {
                        at: pivot,
                        edge: target,
                    });
                }
                current = e;
                state.accept(index, e)?;
            }
            Turn::Blocked { edge, free: false } => {
                return Err(ExtractError::WalkCrossed { at: pivot, edge });
            }
            Turn::Blocked { free: true, .. } => {
                return Err(ExtractError::CurveDiscontinuity(pivot));
            }
        }
    }
    Ok(state)
}
