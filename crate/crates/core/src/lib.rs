//! Connectivity-only decomposition of shell meshes into local panels, and
//! global/local sizing of the resulting stiffened panels.
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: the mesh container and its node/edge incidence index.
//! - [`bdf`]: a small NASTRAN bulk-data reader and writer.
//! - [`extract`]: panel extraction by boundary walks and flood fill.
//! - [`stiffener`]: assignment of quad stiffener chains to panels.
//! - [`sizing`]: per-panel analysis surrogate and constrained optimizer.
//! - [`global`]: the iterate-until-weight-converges loop.
//! - [`manifest`], [`config`], [`render`]: file formats and figures.

pub mod bdf;
pub mod config;
pub mod extract;
pub mod fixtures;
pub mod global;
pub mod manifest;
pub mod mesh;
pub mod render;
pub mod sizing;
pub mod stiffener;

pub use extract::{decompose, extract_panel, DividingCurve, Panel, PanelBoundary, PanelId};
pub use mesh::{
    build_adjacency, AdjacencyIndex, Edge, Element, ElementId, ElementKind, Mesh, NodeId,
};
