//! The decomposition manifest: a versioned JSON record of panels, stiffener
//! assignments and sizing results.
//!
//! ```json
//! {"format_version":1,"panels":[]}
//! ```
//!
//! is the smallest valid document. Optional sections (`mesh`, `curves`,
//! `stiffeners`, `designs`, `history`, `status`) are omitted when empty.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{DividingCurve, Panel, PanelBoundary, PanelId};
use crate::global::{IterationRecord, LoopOutcome, LoopStatus, PanelOutcome};
use crate::mesh::{ElementId, NodeId};
use crate::stiffener::{AmbiguousQuad, Association, StiffenerChain};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("unknown manifest format_version {0}, expected {FORMAT_VERSION}")]
    UnknownVersion(u64),
    #[error("manifest schema violation: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<DividingCurve>,
    pub panels: Vec<PanelRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stiffeners: Option<StiffenerRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub designs: Vec<PanelOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<IterationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<LoopStatus>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            mesh: None,
            curves: Vec::new(),
            panels: Vec::new(),
            stiffeners: None,
            designs: Vec::new(),
            history: Vec::new(),
            status: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelRecord {
    pub id: PanelId,
    pub elements: Vec<ElementId>,
    pub nodes: Vec<NodeId>,
    /// Ordered outer boundary loop.
    pub boundary: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<NodeId>>,
}

impl From<&Panel> for PanelRecord {
    fn from(p: &Panel) -> Self {
        PanelRecord {
            id: p.id,
            elements: p.elements.iter().copied().collect(),
            nodes: p.nodes.iter().copied().collect(),
            boundary: p.boundary.outer().to_vec(),
            holes: p.boundary.holes().to_vec(),
        }
    }
}

impl PanelRecord {
    pub fn to_panel(&self) -> Result<Panel, ManifestError> {
        let schema = |e: crate::extract::ExtractError| {
            ManifestError::Schema(format!("panel {}: {e}", self.id))
        };
        let mut boundary = PanelBoundary::new(self.boundary.clone()).map_err(schema)?;
        for h in &self.holes {
            boundary = boundary.with_hole(h.clone()).map_err(schema)?;
        }
        Ok(Panel {
            id: self.id,
            elements: self.elements.iter().copied().collect(),
            nodes: self.nodes.iter().copied().collect(),
            boundary,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelStiffeners {
    pub panel: PanelId,
    pub elements: Vec<ElementId>,
    pub chains: Vec<Vec<ElementId>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffenerRecord {
    pub assignments: Vec<PanelStiffeners>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ambiguous: Vec<AmbiguousQuad>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unassigned: Vec<ElementId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl StiffenerRecord {
    pub fn new(
        association: &Association,
        chains: &std::collections::BTreeMap<PanelId, Vec<StiffenerChain>>,
    ) -> Self {
        StiffenerRecord {
            assignments: association
                .assignments
                .iter()
                .map(|(&panel, set)| PanelStiffeners {
                    panel,
                    elements: set.iter().copied().collect(),
                    chains: chains
                        .get(&panel)
                        .map(|cs| cs.iter().map(|c| c.elements.clone()).collect())
                        .unwrap_or_default(),
                })
                .collect(),
            ambiguous: association.ambiguous.clone(),
            unassigned: association.unassigned.iter().copied().collect(),
            warnings: association.warnings.clone(),
        }
    }

    /// Number of chains attached to each panel.
    pub fn chain_count(&self, panel: PanelId) -> u32 {
        self.assignments
            .iter()
            .find(|a| a.panel == panel)
            .map_or(0, |a| a.chains.len() as u32)
    }
}

impl Manifest {
    pub fn from_panels(panels: &[Panel]) -> Self {
        Manifest {
            panels: panels.iter().map(PanelRecord::from).collect(),
            ..Default::default()
        }
    }

    pub fn panels(&self) -> Result<Vec<Panel>, ManifestError> {
        self.panels.iter().map(PanelRecord::to_panel).collect()
    }

    /// Records a finished sizing run.
    pub fn set_outcome(&mut self, outcome: &LoopOutcome) {
        self.history = outcome.history.clone();
        self.designs = outcome
            .history
            .last()
            .map(|r| r.panels.clone())
            .unwrap_or_default();
        self.status = Some(outcome.status);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ManifestError::Schema(e.to_string()))?;
        let version = value
            .get("format_version")
            .ok_or_else(|| ManifestError::Schema("missing format_version".into()))?;
        match version.as_u64() {
            Some(FORMAT_VERSION) => {}
            Some(v) => return Err(ManifestError::UnknownVersion(v)),
            None => {
                return Err(ManifestError::Schema(
                    "format_version must be an integer".into(),
                ))
            }
        }
        let m: Manifest =
            serde_json::from_value(value).map_err(|e| ManifestError::Schema(e.to_string()))?;
        // boundary loops are validated on load
        m.panels()?;
        Ok(m)
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Manifest::from_json(&text)
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), ManifestError> {
    fs::write(path, manifest.to_json_pretty() + "\n").map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })
}
