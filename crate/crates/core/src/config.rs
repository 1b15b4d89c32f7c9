//! Sizing configuration, read from TOML.
//!
//! ```toml
//! [material]
//! E = 71e9
//! nu = 0.33
//! rho = 2800.0
//! sigma_y = 345e6
//!
//! [bounds]
//! t = [0.001, 0.01]
//! t_stiff = [0.001, 0.006]
//! h_stiff = [0.005, 0.04]
//!
//! [loads]
//! provider = "redistribution"   # or "constant" with nx, ny, nxy
//! force_x = -1.2e5
//!
//! [loop]
//! convergence_threshold_pct = 0.5
//! max_iterations = 10
//!
//! [geometry]                    # used when the mesh has no coordinates
//! a = 0.5
//! b = 0.5
//!
//! [[panel]]                     # per-panel overrides
//! id = 2
//! b = 0.3
//! n_stiff = 1
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{Panel, PanelId};
use crate::global::{
    ConstantLoads, GlobalProvider, LoopConfig, PanelSpec, StiffnessRedistribution,
};
use crate::mesh::Mesh;
use crate::sizing::{
    DesignBounds, Material, OptimizerSettings, PanelGeometry, PanelLoads, SizingError,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("config: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Invalid(String),
    #[error("no geometry for panel {0}: give [geometry] or a [[panel]] entry, or a mesh with coordinates")]
    MissingGeometry(PanelId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub material: Material,
    pub bounds: DesignBounds,
    pub loads: LoadsConfig,
    #[serde(default, rename = "loop")]
    pub loop_config: LoopConfig,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default)]
    pub geometry: Option<GeometryDefaults>,
    #[serde(default, rename = "panel")]
    pub panels: Vec<PanelOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadsConfig {
    Constant {
        #[serde(default)]
        nx: f64,
        #[serde(default)]
        ny: f64,
        #[serde(default)]
        nxy: f64,
    },
    Redistribution {
        force_x: f64,
        #[serde(default)]
        ny: f64,
        #[serde(default)]
        nxy: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDefaults {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub n_stiff: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelOverride {
    pub id: PanelId,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n_stiff: Option<u32>,
    /// Per-panel loads for the constant provider.
    pub nx: Option<f64>,
    pub ny: Option<f64>,
    pub nxy: Option<f64>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text =
            fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: SizingError| ConfigError::Invalid(e.to_string());
        self.material.validate().map_err(invalid)?;
        self.bounds.validate().map_err(invalid)?;
        self.loop_config
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    fn override_for(&self, id: PanelId) -> Option<&PanelOverride> {
        self.panels.iter().find(|p| p.id == id)
    }

    /// Geometry of every panel.
    ///
    /// Width and length come from a `[[panel]]` entry, else from the mesh
    /// coordinates, else from `[geometry]`. The stiffener count comes from
    /// the panel entry, else `chains`, else `[geometry]`, else zero.
    pub fn panel_specs(
        &self,
        panels: &[Panel],
        mesh: Option<&Mesh>,
        chains: &BTreeMap<PanelId, u32>,
    ) -> Result<Vec<PanelSpec>, ConfigError> {
        panels
            .iter()
            .map(|p| {
                let o = self.override_for(p.id);
                let n_stiff = o
                    .and_then(|o| o.n_stiff)
                    .or_else(|| chains.get(&p.id).copied())
                    .or_else(|| self.geometry.and_then(|g| g.n_stiff))
                    .unwrap_or(0);
                let measured = mesh.and_then(|m| PanelGeometry::from_panel(m, p, n_stiff).ok());
                let a = o
                    .and_then(|o| o.a)
                    .or(measured.map(|g| g.a))
                    .or(self.geometry.map(|g| g.a));
                let b = o
                    .and_then(|o| o.b)
                    .or(measured.map(|g| g.b))
                    .or(self.geometry.map(|g| g.b));
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(ConfigError::MissingGeometry(p.id));
                };
                let geometry = match measured {
                    Some(g) if g.a == a && g.b == b => g,
                    _ => PanelGeometry::rectangular(a, b, n_stiff),
                };
                geometry
                    .check()
                    .map_err(|e| ConfigError::Invalid(format!("panel {}: {e}", p.id)))?;
                Ok(PanelSpec { id: p.id, geometry })
            })
            .collect()
    }

    pub fn provider(&self) -> Box<dyn GlobalProvider> {
        match self.loads {
            LoadsConfig::Constant { nx, ny, nxy } => {
                let default = PanelLoads::new(nx, ny, nxy);
                let per_panel = self
                    .panels
                    .iter()
                    .filter(|o| o.nx.is_some() || o.ny.is_some() || o.nxy.is_some())
                    .map(|o| {
                        (
                            o.id,
                            PanelLoads::new(
                                o.nx.unwrap_or(nx),
                                o.ny.unwrap_or(ny),
                                o.nxy.unwrap_or(nxy),
                            ),
                        )
                    })
                    .collect();
                Box::new(ConstantLoads { default, per_panel })
            }
            LoadsConfig::Redistribution { force_x, ny, nxy } => {
                Box::new(StiffnessRedistribution { force_x, ny, nxy })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
[material]
E = 71e9
nu = 0.33
rho = 2800.0
sigma_y = 345e6

[bounds]
t = [0.001, 0.01]
t_stiff = [0.001, 0.006]
h_stiff = [0.005, 0.04]

[loads]
provider = "constant"
nx = -1e5

[loop]
max_iterations = 4

[geometry]
a = 0.5
b = 0.5

[[panel]]
id = 2
b = 0.3
n_stiff = 1
nx = -2e5
"#;

    #[test]
    fn parses_and_resolves() {
        let c = Config::from_toml(TEXT).unwrap();
        assert_eq!(c.material, Material::aluminum());
        assert_eq!(c.loop_config.max_iterations, 4);
        assert_eq!(c.loop_config.convergence_threshold_pct, 0.5);
        let idx = crate::build_adjacency(&crate::fixtures::reference_mesh()).unwrap();
        let panels =
            crate::decompose(&idx, &[crate::DividingCurve::from_ids(6..=10).unwrap()]).unwrap();
        let chains = BTreeMap::from([(PanelId(1), 3)]);
        let specs = c.panel_specs(&panels, None, &chains).unwrap();
        assert_eq!(specs[0].geometry, PanelGeometry::rectangular(0.5, 0.5, 3));
        assert_eq!(specs[1].geometry, PanelGeometry::rectangular(0.5, 0.3, 1));
        // coordinates win over [geometry]
        let mesh = crate::fixtures::reference_mesh();
        let specs = c.panel_specs(&panels, Some(&mesh), &chains).unwrap();
        assert_eq!((specs[0].geometry.a, specs[0].geometry.b), (4.0, 1.0));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(
            Config::from_toml("[material]\nE = 1"),
            Err(ConfigError::Parse(_))
        ));
        let bad = TEXT.replace("nu = 0.33", "nu = 0.7");
        assert!(matches!(
            Config::from_toml(&bad),
            Err(ConfigError::Invalid(_))
        ));
        let unknown = TEXT.replace("provider = \"constant\"", "provider = \"aeroelastic\"");
        assert!(matches!(
            Config::from_toml(&unknown),
            Err(ConfigError::Parse(_))
        ));
    }
}
