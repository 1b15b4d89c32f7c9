//! Mesh container and connectivity indices.
//!
//! Everything the panel extraction needs is expressed as set operations on
//! [`AdjacencyIndex`]. Nodal coordinates are carried along for I/O and
//! rendering but are never consulted here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl $name {
            pub fn get(self) -> u64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<u64> for $name {
            fn from(v: u64) -> Self {
                $name(v)
            }
        }
    };
}

id_newtype!(
    /// Grid point reference number.
    NodeId
);
id_newtype!(
    /// Element reference number.
    ElementId
);

pub type NodeSet = BTreeSet<NodeId>;
pub type ElementSet = BTreeSet<ElementId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Tri,
    Quad,
}

impl ElementKind {
    pub fn arity(self) -> usize {
        match self {
            ElementKind::Tri => 3,
            ElementKind::Quad => 4,
        }
    }
}

/// Unordered node pair. The smaller ID is always stored first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(NodeId, NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn nodes(self) -> (NodeId, NodeId) {
        (self.0, self.1)
    }

    pub fn contains(self, n: NodeId) -> bool {
        self.0 == n || self.1 == n
    }

    /// The node at the other end, if `n` is one of the endpoints.
    pub fn other(self, n: NodeId) -> Option<NodeId> {
        if self.0 == n {
            Some(self.1)
        } else if self.1 == n {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: ElementId,
    pub kind: ElementKind,
    nodes: Vec<NodeId>,
}

impl Element {
    pub fn new(id: ElementId, kind: ElementKind, nodes: Vec<NodeId>) -> Result<Self, MeshError> {
        if id.0 == 0 {
            return Err(MeshError::ZeroId);
        }
        if nodes.len() != kind.arity() {
            return Err(MeshError::WrongArity {
                element: id,
                expected: kind.arity(),
                found: nodes.len(),
            });
        }
        if nodes.iter().any(|n| n.0 == 0) {
            return Err(MeshError::ZeroId);
        }
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(MeshError::DegenerateElement {
                    element: id,
                    node: *n,
                });
            }
        }
        Ok(Element { id, kind, nodes })
    }

    pub fn tri(id: u64, nodes: [u64; 3]) -> Result<Self, MeshError> {
        Element::new(ElementId(id), ElementKind::Tri, nodes.map(NodeId).to_vec())
    }

    pub fn quad(id: u64, nodes: [u64; 4]) -> Result<Self, MeshError> {
        Element::new(ElementId(id), ElementKind::Quad, nodes.map(NodeId).to_vec())
    }

    /// Connectivity in the order it was given.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    /// Edges in cyclic order: (n0,n1), (n1,n2), ..., (nk,n0).
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let k = self.nodes.len();
        (0..k).map(move |i| Edge::new(self.nodes[i], self.nodes[(i + 1) % k]))
    }

    pub fn has_edge(&self, edge: Edge) -> bool {
        self.edges().any(|e| e == edge)
    }

    /// The two element edges incident to `n`, or `None` if `n` is not a node
    /// of this element.
    pub fn edges_at(&self, n: NodeId) -> Option<[Edge; 2]> {
        let k = self.nodes.len();
        let i = self.nodes.iter().position(|&m| m == n)?;
        let prev = self.nodes[(i + k - 1) % k];
        let next = self.nodes[(i + 1) % k];
        Some([Edge::new(n, prev), Edge::new(n, next)])
    }

    pub fn shared_node_count(&self, nodes: &NodeSet) -> usize {
        self.nodes.iter().filter(|n| nodes.contains(n)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("identifiers must be strictly positive")]
    ZeroId,
    #[error("duplicate node ID {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate element ID {0}")]
    DuplicateElement(ElementId),
    #[error("element {element} references missing node {node}")]
    MissingNode { element: ElementId, node: NodeId },
    #[error("element {element} repeats node {node}")]
    DegenerateElement { element: ElementId, node: NodeId },
    #[error("element {element} expects {expected} nodes, found {found}")]
    WrongArity {
        element: ElementId,
        expected: usize,
        found: usize,
    },
    #[error("unknown element ID {0}")]
    UnknownElement(ElementId),
    #[error("unknown node ID {0}")]
    UnknownNode(NodeId),
    #[error("tag {tag:?} references unknown element {element}")]
    UnknownTagged { tag: String, element: ElementId },
}

pub type Point3 = [f64; 3];

/// Nodes, elements and named element groups.
///
/// Storage is ordered by ID so that every derived structure is independent
/// of the order in which entities were inserted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    nodes: BTreeMap<NodeId, Option<Point3>>,
    elements: BTreeMap<ElementId, Element>,
    tags: BTreeMap<String, ElementSet>,
}

impl Mesh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: NodeId, xyz: Option<Point3>) -> Result<(), MeshError> {
        if id.0 == 0 {
            return Err(MeshError::ZeroId);
        }
        if self.nodes.contains_key(&id) {
            return Err(MeshError::DuplicateNode(id));
        }
        self.nodes.insert(id, xyz);
        Ok(())
    }

    /// Adds an element. Node existence is checked by [`Mesh::validate`] so
    /// that decks may list elements before their grid points.
    pub fn add_element(&mut self, element: Element) -> Result<(), MeshError> {
        if self.elements.contains_key(&element.id) {
            return Err(MeshError::DuplicateElement(element.id));
        }
        self.elements.insert(element.id, element);
        Ok(())
    }

    pub fn tag(&mut self, name: &str, elements: impl IntoIterator<Item = ElementId>) {
        self.tags
            .entry(name.to_string())
            .or_default()
            .extend(elements);
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        for e in self.elements.values() {
            for &n in e.nodes() {
                if !self.nodes.contains_key(&n) {
                    return Err(MeshError::MissingNode {
                        element: e.id,
                        node: n,
                    });
                }
            }
        }
        for (tag, set) in &self.tags {
            if let Some(&missing) = set.iter().find(|e| !self.elements.contains_key(e)) {
                return Err(MeshError::UnknownTagged {
                    tag: tag.clone(),
                    element: missing,
                });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, Option<Point3>)> + '_ {
        self.nodes.iter().map(|(&id, &xyz)| (id, xyz))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn coordinate(&self, id: NodeId) -> Option<Point3> {
        self.nodes.get(&id).copied().flatten()
    }

    /// True when every node carries a coordinate triple.
    pub fn has_coordinates(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.values().all(Option::is_some)
    }

    pub fn set_coordinate(&mut self, id: NodeId, xyz: Option<Point3>) -> Result<(), MeshError> {
        match self.nodes.get_mut(&id) {
            Some(slot) => {
                *slot = xyz;
                Ok(())
            }
            None => Err(MeshError::UnknownNode(id)),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values()
    }

    pub fn element(&self, id: ElementId) -> Option<&Element> {
        self.elements.get(&id)
    }

    pub fn element_ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn tags(&self) -> &BTreeMap<String, ElementSet> {
        &self.tags
    }

    pub fn tagged(&self, name: &str) -> Option<&ElementSet> {
        self.tags.get(name)
    }

    /// Sub-mesh holding the selected elements and the nodes they use.
    pub fn subset(&self, keep: impl Fn(&Element) -> bool) -> Mesh {
        let mut out = Mesh::new();
        for e in self.elements.values().filter(|e| keep(e)) {
            for &n in e.nodes() {
                if let Some(xyz) = self.nodes.get(&n) {
                    out.nodes.insert(n, *xyz);
                }
            }
            out.elements.insert(e.id, e.clone());
        }
        for (tag, set) in &self.tags {
            let kept: ElementSet = set
                .iter()
                .copied()
                .filter(|id| out.elements.contains_key(id))
                .collect();
            if !kept.is_empty() {
                out.tags.insert(tag.clone(), kept);
            }
        }
        out
    }

    /// Elements of the given kind.
    pub fn of_kind(&self, kind: ElementKind) -> Mesh {
        self.subset(|e| e.kind == kind)
    }

    /// Returns a copy with element IDs mapped through `relabel`. Tags follow.
    pub fn relabel_elements(
        &self,
        relabel: impl Fn(ElementId) -> ElementId,
    ) -> Result<Mesh, MeshError> {
        let mut out = Mesh {
            nodes: self.nodes.clone(),
            ..Mesh::default()
        };
        for e in self.elements.values() {
            out.add_element(Element::new(relabel(e.id), e.kind, e.nodes.clone())?)?;
        }
        for (tag, set) in &self.tags {
            out.tag(tag, set.iter().map(|&id| relabel(id)));
        }
        Ok(out)
    }
}

/// Node-to-element and edge-to-element incidence of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyIndex {
    elements: BTreeMap<ElementId, Element>,
    node_to_elements: BTreeMap<NodeId, ElementSet>,
    edge_to_elements: BTreeMap<Edge, ElementSet>,
}

/// Materializes the connectivity matrix of `mesh`.
pub fn build_adjacency(mesh: &Mesh) -> Result<AdjacencyIndex, MeshError> {
    mesh.validate()?;
    let mut node_to_elements: BTreeMap<NodeId, ElementSet> = BTreeMap::new();
    let mut edge_to_elements: BTreeMap<Edge, ElementSet> = BTreeMap::new();
    for e in mesh.elements() {
        for &n in e.nodes() {
            node_to_elements.entry(n).or_default().insert(e.id);
        }
        for edge in e.edges() {
            edge_to_elements.entry(edge).or_default().insert(e.id);
        }
    }
    Ok(AdjacencyIndex {
        elements: mesh.elements.clone(),
        node_to_elements,
        edge_to_elements,
    })
}

impl AdjacencyIndex {
    pub fn element(&self, id: ElementId) -> Option<&Element> {
        self.elements.get(&id)
    }

    pub fn try_element(&self, id: ElementId) -> Result<&Element, MeshError> {
        self.elements.get(&id).ok_or(MeshError::UnknownElement(id))
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values()
    }

    pub fn element_ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements.keys().copied()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn node_to_elements(&self) -> &BTreeMap<NodeId, ElementSet> {
        &self.node_to_elements
    }

    pub fn edge_to_elements(&self) -> &BTreeMap<Edge, ElementSet> {
        &self.edge_to_elements
    }

    pub fn elements_at_node(&self, n: NodeId) -> Option<&ElementSet> {
        self.node_to_elements.get(&n)
    }

    pub fn elements_on_edge(&self, edge: Edge) -> Option<&ElementSet> {
        self.edge_to_elements.get(&edge)
    }

    pub fn is_edge(&self, edge: Edge) -> bool {
        self.edge_to_elements.contains_key(&edge)
    }

    /// Edges used by exactly one element.
    pub fn free_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edge_to_elements
            .iter()
            .filter(|(_, s)| s.len() == 1)
            .map(|(&e, _)| e)
    }

    /// Edges used by more than two elements.
    pub fn non_manifold_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edge_to_elements
            .iter()
            .filter(|(_, s)| s.len() > 2)
            .map(|(&e, _)| e)
    }

    /// Elements having at least `k` of their nodes in `nodes`.
    pub fn elements_sharing_at_least(&self, nodes: &NodeSet, k: usize) -> ElementSet {
        let k = k.max(1);
        let mut counts: BTreeMap<ElementId, usize> = BTreeMap::new();
        for n in nodes {
            if let Some(es) = self.node_to_elements.get(n) {
                for &e in es {
                    *counts.entry(e).or_default() += 1;
                }
            }
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c >= k)
            .map(|(e, _)| e)
            .collect()
    }

    /// Elements other than `e` that share a full edge with it.
    pub fn edge_neighbors(&self, e: ElementId) -> Result<ElementSet, MeshError> {
        let element = self.try_element(e)?;
        Ok(element
            .edges()
            .filter_map(|edge| self.edge_to_elements.get(&edge))
            .flatten()
            .copied()
            .filter(|&other| other != e)
            .collect())
    }

    /// The element across `edge` from `e`. `Ok(None)` on a free edge.
    pub(crate) fn across(
        &self,
        e: ElementId,
        edge: Edge,
    ) -> Result<Option<ElementId>, NonManifold> {
        match self.edge_to_elements.get(&edge) {
            None => Ok(None),
            Some(set) if set.len() > 2 => Err(NonManifold(edge)),
            Some(set) => Ok(set.iter().copied().find(|&o| o != e)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NonManifold(pub Edge);

pub fn node_set(ids: impl IntoIterator<Item = u64>) -> NodeSet {
    ids.into_iter().map(NodeId).collect()
}

pub fn element_set(ids: impl IntoIterator<Item = u64>) -> ElementSet {
    ids.into_iter().map(ElementId).collect()
}
