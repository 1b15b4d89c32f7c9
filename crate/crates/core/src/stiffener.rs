//! Assignment of quad stiffener elements to panels, and their grouping into
//! ordered chains.
//!
//! A blade stiffener is a run of quads, each sharing two nodes with the
//! skin. A quad belongs to a panel when it shares at least two nodes with
//! it. Quads on a panel border share two nodes with both neighbours; they
//! go to the panel with more shared nodes, then to the lower panel ID, and
//! are listed as ambiguous. Chains are built per panel, so a stiffener that
//! crosses a border becomes one chain on each side.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{Panel, PanelId};
use crate::mesh::{Element, ElementId, ElementKind, ElementSet, Mesh, NodeId, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StiffenerError {
    #[error("stiffener element {0} is not a quad")]
    NotQuad(ElementId),
    #[error("stiffener element {0} is not in the stiffener mesh")]
    UnknownElement(ElementId),
    #[error("malformed stiffener: element {element} touches {neighbors} other quads")]
    Branching {
        element: ElementId,
        neighbors: usize,
    },
}

/// A quad that qualified for more than one panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousQuad {
    pub element: ElementId,
    /// Every qualifying panel with its shared-node count.
    pub candidates: Vec<(PanelId, usize)>,
    pub chosen: PanelId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    pub assignments: BTreeMap<PanelId, ElementSet>,
    pub ambiguous: Vec<AmbiguousQuad>,
    pub unassigned: ElementSet,
    pub warnings: Vec<String>,
}

impl Association {
    pub fn panel_of(&self, e: ElementId) -> Option<PanelId> {
        self.assignments
            .iter()
            .find(|(_, set)| set.contains(&e))
            .map(|(&p, _)| p)
    }
}

/// Assigns every quad of `stiffeners` to at most one panel.
pub fn associate_stiffeners(
    panels: &[Panel],
    stiffeners: &Mesh,
) -> Result<Association, StiffenerError> {
    let skin: NodeSet = panels
        .iter()
        .flat_map(|p| p.nodes.iter().copied())
        .collect();
    let mut out = Association::default();
    for q in stiffeners.elements() {
        if q.kind != ElementKind::Quad {
            return Err(StiffenerError::NotQuad(q.id));
        }
        let on_skin = q.shared_node_count(&skin);
        if on_skin != 2 {
            let message = format!(
                "stiffener element {} shares {} nodes with the skin, expected 2",
                q.id, on_skin
            );
            log::warn!("{message}");
            out.warnings.push(message);
        }
        let mut candidates: Vec<(PanelId, usize)> = panels
            .iter()
            .map(|p| (p.id, q.shared_node_count(&p.nodes)))
            .filter(|&(_, k)| k >= 2)
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let Some(&(chosen, _)) = candidates.first() else {
            out.unassigned.insert(q.id);
            continue;
        };
        out.assignments.entry(chosen).or_default().insert(q.id);
        if candidates.len() > 1 {
            out.ambiguous.push(AmbiguousQuad {
                element: q.id,
                candidates,
                chosen,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StiffenerChain {
    pub elements: Vec<ElementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attached_panel: Option<PanelId>,
}

fn sorted_nodes(e: &Element) -> Vec<NodeId> {
    let mut v = e.nodes().to_vec();
    v.sort();
    v
}

/// Splits `assigned` into maximal runs of quads that share nodes, each
/// ordered end to end.
///
/// A chain starts at the end quad whose sorted node list is
/// lexicographically smaller. A closed ring starts at its lowest element
/// and heads to the lower of its two neighbours.
pub fn build_chains(
    assigned: &ElementSet,
    stiffeners: &Mesh,
) -> Result<Vec<StiffenerChain>, StiffenerError> {
    let mut quads: BTreeMap<ElementId, &Element> = BTreeMap::new();
    for &e in assigned {
        let q = stiffeners
            .element(e)
            .ok_or(StiffenerError::UnknownElement(e))?;
        if q.kind != ElementKind::Quad {
            return Err(StiffenerError::NotQuad(e));
        }
        quads.insert(e, q);
    }
    let mut at_node: BTreeMap<NodeId, ElementSet> = BTreeMap::new();
    for (&e, q) in &quads {
        for &n in q.nodes() {
            at_node.entry(n).or_default().insert(e);
        }
    }
    // three blades meeting at one node is a junction even when no single
    // quad touches three others
    if let Some(set) = at_node.values().find(|s| s.len() > 2) {
        return Err(StiffenerError::Branching {
            element: *set.iter().next().expect("non-empty"),
            neighbors: set.len() - 1,
        });
    }
    let mut neighbors: BTreeMap<ElementId, ElementSet> = BTreeMap::new();
    for (&e, q) in &quads {
        let set: ElementSet = q
            .nodes()
            .iter()
            .flat_map(|n| at_node[n].iter().copied())
            .filter(|&o| o != e)
            .collect();
        if set.len() > 2 {
            return Err(StiffenerError::Branching {
                element: e,
                neighbors: set.len(),
            });
        }
        neighbors.insert(e, set);
    }

    let mut visited = ElementSet::new();
    let mut chains = Vec::new();
    for &e in quads.keys() {
        if visited.contains(&e) {
            continue;
        }
        // collect the component, then pick its starting quad
        let mut component = vec![e];
        let mut stack = vec![e];
        let mut seen = ElementSet::from([e]);
        while let Some(x) = stack.pop() {
            for &y in &neighbors[&x] {
                if seen.insert(y) {
                    component.push(y);
                    stack.push(y);
                }
            }
        }
        let start = component
            .iter()
            .copied()
            .filter(|x| neighbors[x].len() < 2)
            .min_by_key(|x| sorted_nodes(quads[x]))
            .unwrap_or_else(|| *seen.iter().next().expect("component is non-empty"));
        let mut order = vec![start];
        visited.insert(start);
        let mut current = start;
        while let Some(&next) = neighbors[&current].iter().find(|y| !visited.contains(y)) {
            visited.insert(next);
            order.push(next);
            current = next;
        }
        chains.push(StiffenerChain {
            elements: order,
            attached_panel: None,
        });
    }
    chains.sort_by_key(|c| c.elements.iter().copied().min());
    Ok(chains)
}

/// Chains of every panel, tagged with the panel they are attached to.
pub fn chains_by_panel(
    association: &Association,
    stiffeners: &Mesh,
) -> Result<BTreeMap<PanelId, Vec<StiffenerChain>>, StiffenerError> {
    association
        .assignments
        .iter()
        .map(|(&p, set)| {
            let mut chains = build_chains(set, stiffeners)?;
            for c in &mut chains {
                c.attached_panel = Some(p);
            }
            Ok((p, chains))
        })
        .collect()
}
