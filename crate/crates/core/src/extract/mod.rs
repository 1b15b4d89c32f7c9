//! Panel extraction from a triangulated skin using connectivity only.
//!
//! The pipeline for one panel is:
//!
//! 1. [`periphery_walk`] follows the closed boundary loop and collects the
//!    elements on the panel side that own a boundary edge. If the walk
//!    starts on the wrong side of the loop it notices (it runs into a wall
//!    that is not the next loop edge, or the side it walked is not enclosed)
//!    and restarts from the other candidate element.
//! 2. [`flood_fill_panel`] grows the element set across shared edges,
//!    treating boundary edges as walls.
//!
//! [`mid_element_walk`] and [`mea_first_element`] pick out the elements on
//! one side of an interior dividing curve; [`decompose`] splits a whole skin
//! by a family of curves. [`oracle_side_fill`] is a deliberately naive
//! breadth-first fill kept for cross-checking everything above.
//!
//! Nodal coordinates are never read by anything in this module.

mod decompose;
mod fill;
mod walk;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{AdjacencyIndex, Edge, ElementId, ElementSet, MeshError, NodeId, NodeSet};

pub use decompose::{decompose, free_boundary_loops};
pub use fill::{flood_fill_panel, oracle_side_fill};
pub use walk::{
    curve_side_elements, mea_first_element, mid_element_walk, periphery_walk,
    periphery_walk_preferring, WalkState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PanelId(pub u32);

impl fmt::Display for PanelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("a dividing curve needs at least two nodes")]
    CurveTooShort,
    #[error("curve nodes {0} and {1} are not joined by a mesh edge")]
    CurveNotEdgePath(NodeId, NodeId),
    #[error("curve visits node {0} twice")]
    CurveRepeatsNode(NodeId),
    #[error("a panel boundary needs at least three nodes")]
    BoundaryTooShort,
    #[error("boundary visits node {0} twice")]
    BoundaryRepeatsNode(NodeId),
    #[error("boundary is not a closed edge loop: {0} is not a mesh edge")]
    BoundaryNotClosed(Edge),
    #[error("start node {0} is not on the boundary")]
    StartNotOnBoundary(NodeId),
    #[error("non-manifold edge {0}")]
    NonManifoldEdge(Edge),
    #[error("neither side of the boundary starting at node {0} encloses a panel")]
    NoEnclosedSide(NodeId),
    #[error("curve start {0} is not on the periphery walk")]
    CurveStartNotOnPeriphery(NodeId),
    #[error("no element on segment {0} is adjacent to the accepted periphery")]
    NoFirstElement(Edge),
    #[error("element {element} does not own the first curve segment {segment}")]
    FirstElementOffCurve { element: ElementId, segment: Edge },
    #[error("walk around node {at} would cross the curve at {edge}")]
    WalkCrossed { at: NodeId, edge: Edge },
    #[error("curve side is discontinuous at node {0}")]
    CurveDiscontinuity(NodeId),
    #[error("seed element {0} is not reachable from the boundary elements")]
    SeedUnreachable(ElementId),
    #[error("fill escaped the panel through free edge {0}; the boundary is open")]
    FillEscaped(Edge),
    #[error("curve endpoint not on boundary: node {0}")]
    DanglingCurve(NodeId),
    #[error("curve segment {0} runs along an existing panel boundary")]
    CurveOverlapsBoundary(Edge),
    #[error("panels do not partition the skin: {0}")]
    NotAPartition(String),
    #[error("curve-side walk disagrees with panel {0}")]
    InconsistentSides(PanelId),
}

pub type Result<T, E = ExtractError> = std::result::Result<T, E>;

/// An ordered node path along mesh edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DividingCurve {
    nodes: Vec<NodeId>,
}

impl DividingCurve {
    /// Checks the structural invariants that need no mesh.
    pub fn new(nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(ExtractError::CurveTooShort);
        }
        let mut seen = NodeSet::new();
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(ExtractError::CurveRepeatsNode(n));
            }
        }
        Ok(DividingCurve { nodes })
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::new(ids.into_iter().map(NodeId).collect())
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("curves have at least two nodes")
    }

    pub fn reversed(&self) -> DividingCurve {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        DividingCurve { nodes }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn node_set(&self) -> NodeSet {
        self.nodes.iter().copied().collect()
    }

    /// Every consecutive pair must be an edge of `index`.
    pub fn check_against(&self, index: &AdjacencyIndex) -> Result<()> {
        for w in self.nodes.windows(2) {
            if !index.is_edge(Edge::new(w[0], w[1])) {
                return Err(ExtractError::CurveNotEdgePath(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// A closed node loop enclosing a panel, plus optional inner loops (holes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelBoundary {
    outer: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    holes: Vec<Vec<NodeId>>,
}

fn check_loop(nodes: &[NodeId]) -> Result<()> {
    if nodes.len() < 3 {
        return Err(ExtractError::BoundaryTooShort);
    }
    let mut seen = NodeSet::new();
    for &n in nodes {
        if !seen.insert(n) {
            return Err(ExtractError::BoundaryRepeatsNode(n));
        }
    }
    Ok(())
}

fn loop_edges(nodes: &[NodeId]) -> impl Iterator<Item = Edge> + '_ {
    let k = nodes.len();
    (0..k).map(move |i| Edge::new(nodes[i], nodes[(i + 1) % k]))
}

/// Rotates a loop to start at its smallest node and orients it towards the
/// smaller of that node's two neighbours.
pub(crate) fn canonical_loop(mut nodes: Vec<NodeId>) -> Vec<NodeId> {
    let Some(pos) = nodes
        .iter()
        .enumerate()
        .min_by_key(|&(_, n)| *n)
        .map(|(i, _)| i)
    else {
        return nodes;
    };
    nodes.rotate_left(pos);
    if nodes.len() > 2 && nodes[nodes.len() - 1] < nodes[1] {
        nodes[1..].reverse();
    }
    nodes
}

impl PanelBoundary {
    pub fn new(outer: Vec<NodeId>) -> Result<Self> {
        check_loop(&outer)?;
        Ok(PanelBoundary {
            outer,
            holes: Vec::new(),
        })
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::new(ids.into_iter().map(NodeId).collect())
    }

    pub fn with_hole(mut self, hole: Vec<NodeId>) -> Result<Self> {
        check_loop(&hole)?;
        self.holes.push(hole);
        Ok(self)
    }

    pub fn outer(&self) -> &[NodeId] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<NodeId>] {
        &self.holes
    }

    pub fn outer_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        loop_edges(&self.outer)
    }

    /// Outer and hole edges: the edges a fill may not cross.
    pub fn wall_edges(&self) -> BTreeSet<Edge> {
        let mut walls: BTreeSet<Edge> = self.outer_edges().collect();
        for h in &self.holes {
            walls.extend(loop_edges(h));
        }
        walls
    }

    pub fn node_set(&self) -> NodeSet {
        self.outer
            .iter()
            .chain(self.holes.iter().flatten())
            .copied()
            .collect()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.outer.contains(&n)
    }

    /// Every outer loop edge must exist in `index`; hole edges may be
    /// missing (their elements may have been removed).
    pub fn check_against(&self, index: &AdjacencyIndex) -> Result<()> {
        for edge in self.outer_edges() {
            match index.elements_on_edge(edge) {
                None => return Err(ExtractError::BoundaryNotClosed(edge)),
                Some(s) if s.len() > 2 => return Err(ExtractError::NonManifoldEdge(edge)),
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Same loops, rotated and oriented by node ID only.
    pub fn canonical(&self) -> PanelBoundary {
        let mut holes: Vec<Vec<NodeId>> = self.holes.iter().cloned().map(canonical_loop).collect();
        holes.sort();
        PanelBoundary {
            outer: canonical_loop(self.outer.clone()),
            holes,
        }
    }

    /// Loop rotated so that `start` comes first.
    pub(crate) fn outer_from(&self, start: NodeId) -> Result<Vec<NodeId>> {
        let pos = self
            .outer
            .iter()
            .position(|&n| n == start)
            .ok_or(ExtractError::StartNotOnBoundary(start))?;
        let mut l = self.outer.clone();
        l.rotate_left(pos);
        Ok(l)
    }
}

/// A connected set of skin elements together with its retained boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Panel {
    pub id: PanelId,
    pub elements: ElementSet,
    pub nodes: NodeSet,
    pub boundary: PanelBoundary,
}

impl Panel {
    pub(crate) fn from_elements(
        index: &AdjacencyIndex,
        id: PanelId,
        elements: ElementSet,
        boundary: PanelBoundary,
    ) -> Result<Panel> {
        let mut nodes = NodeSet::new();
        for &e in &elements {
            nodes.extend(index.try_element(e)?.nodes().iter().copied());
        }
        Ok(Panel {
            id,
            elements,
            nodes,
            boundary,
        })
    }
}

/// Extracts the panel enclosed by `boundary`.
///
/// The returned panel carries ID 1; [`decompose`] renumbers.
pub fn extract_panel(index: &AdjacencyIndex, boundary: &PanelBoundary) -> Result<Panel> {
    boundary.check_against(index)?;
    let start = boundary.outer()[0];
    let walk = periphery_walk(index, boundary, start)?;
    let seed = walk.element_list[0].0;
    flood_fill_panel(index, &walk.element_set(), seed, boundary)
}
