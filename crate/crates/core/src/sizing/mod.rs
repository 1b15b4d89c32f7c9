//! Stiffened-panel sizing: analysis providers and the per-panel optimizer.
//!
//! A design is `(t, t_stiff, h_stiff)`. The problem solved for each panel is
//!
//! ```text
//! minimize   weight(t, t_stiff, h_stiff)
//! subject to lambda_p >= 1.05
//!            sigma_vm_max <= sigma_y
//!            each variable within its bounds
//! ```

mod gradient;
mod optimize;
mod surrogate;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::extract::Panel;
use crate::mesh::{Mesh, NodeId};

pub use gradient::{gradient_check, GradientEntry, GradientReport, Quantity};
pub use optimize::{optimize_panel, OptimizerSettings, Optimum};
pub use surrogate::SmearedPlate;

/// Minimum admissible buckling load factor.
pub const LAMBDA_MIN: f64 = 1.05;

/// Number of design variables for a skin divided by `n_spars` spars and
/// `n_ribs` ribs: three per panel.
pub fn count_design_variables(n_spars: u32, n_ribs: u32) -> u64 {
    3 * (u64::from(n_spars) + 1) * (u64::from(n_ribs) + 1)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SizingError {
    #[error("invalid material: {0}")]
    InvalidMaterial(&'static str),
    #[error("invalid bounds for {0}: need 0 < min <= max")]
    InvalidBounds(Variable),
    #[error("design variable {0} must be positive")]
    NonPositiveDesign(Variable),
    #[error("panel geometry has zero area or width")]
    ZeroArea,
    #[error("panel geometry needs nodal coordinates (node {0} has none)")]
    NoCoordinates(NodeId),
    #[error("loads must be finite")]
    NonFiniteLoads,
    #[error("analyzer failed: {0}")]
    Analyzer(String),
    #[error("analyzer provides no sensitivities")]
    NoSensitivities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    T,
    TStiff,
    HStiff,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::T, Variable::TStiff, Variable::HStiff];
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::T => "t",
            Variable::TStiff => "t_stiff",
            Variable::HStiff => "h_stiff",
        })
    }
}

/// Isotropic material. SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    pub rho: f64,
    pub sigma_y: f64,
}

impl Material {
    /// 7000-series aluminium as used by the fixtures.
    pub fn aluminum() -> Self {
        Material {
            e: 71e9,
            nu: 0.33,
            rho: 2800.0,
            sigma_y: 345e6,
        }
    }

    pub fn validate(&self) -> Result<(), SizingError> {
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(SizingError::InvalidMaterial("E must be positive"));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return Err(SizingError::InvalidMaterial("nu must lie in [0, 0.5)"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(SizingError::InvalidMaterial("rho must be positive"));
        }
        if !(self.sigma_y > 0.0 && self.sigma_y.is_finite()) {
            return Err(SizingError::InvalidMaterial("sigma_y must be positive"));
        }
        Ok(())
    }

    /// Plate bending stiffness `E t^3 / 12(1 - nu^2)`.
    pub fn plate_stiffness(&self, t: f64) -> f64 {
        self.e * t.powi(3) / (12.0 * (1.0 - self.nu * self.nu))
    }
}

/// Skin thickness, blade stiffener thickness and blade height, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelDesign {
    pub t: f64,
    pub t_stiff: f64,
    pub h_stiff: f64,
}

impl PanelDesign {
    pub fn new(t: f64, t_stiff: f64, h_stiff: f64) -> Self {
        PanelDesign {
            t,
            t_stiff,
            h_stiff,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t, self.t_stiff, self.h_stiff]
    }

    pub fn from_array([t, t_stiff, h_stiff]: [f64; 3]) -> Self {
        PanelDesign {
            t,
            t_stiff,
            h_stiff,
        }
    }

    pub fn get(&self, v: Variable) -> f64 {
        self.to_array()[v as usize]
    }

    pub fn check_positive(&self) -> Result<(), SizingError> {
        for v in Variable::ALL {
            if !(self.get(v) > 0.0 && self.get(v).is_finite()) {
                return Err(SizingError::NonPositiveDesign(v));
            }
        }
        Ok(())
    }
}

/// `[min, max]` for each design variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignBounds {
    pub t: [f64; 2],
    pub t_stiff: [f64; 2],
    pub h_stiff: [f64; 2],
}

impl DesignBounds {
    pub fn ranges(&self) -> [[f64; 2]; 3] {
        [self.t, self.t_stiff, self.h_stiff]
    }

    pub fn validate(&self) -> Result<(), SizingError> {
        for (v, [lo, hi]) in Variable::ALL.into_iter().zip(self.ranges()) {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(SizingError::InvalidBounds(v));
            }
        }
        Ok(())
    }

    pub fn lower(&self) -> PanelDesign {
        PanelDesign::new(self.t[0], self.t_stiff[0], self.h_stiff[0])
    }

    pub fn upper(&self) -> PanelDesign {
        PanelDesign::new(self.t[1], self.t_stiff[1], self.h_stiff[1])
    }

    pub fn contains(&self, d: &PanelDesign) -> bool {
        self.ranges()
            .iter()
            .zip(d.to_array())
            .all(|([lo, hi], x)| (*lo..=*hi).contains(&x))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Support {
    #[default]
    SimplySupported,
}

/// In-plane running loads in N/m. Compression is negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PanelLoads {
    pub nx: f64,
    pub ny: f64,
    pub nxy: f64,
    #[serde(default)]
    pub support: Support,
}

impl PanelLoads {
    pub fn new(nx: f64, ny: f64, nxy: f64) -> Self {
        PanelLoads {
            nx,
            ny,
            nxy,
            support: Support::SimplySupported,
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        PanelLoads::new(self.nx * k, self.ny * k, self.nxy * k)
    }

    pub fn is_zero(&self) -> bool {
        self.nx == 0.0 && self.ny == 0.0 && self.nxy == 0.0
    }

    pub fn check(&self) -> Result<(), SizingError> {
        if [self.nx, self.ny, self.nxy].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(SizingError::NonFiniteLoads)
        }
    }
}

/// Planform of a panel: length `a` along the stiffeners, width `b`, skin
/// area, stiffener count and the run length of each stiffener.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelGeometry {
    pub a: f64,
    pub b: f64,
    pub area: f64,
    pub n_stiff: u32,
    pub stiffener_length: f64,
}

impl PanelGeometry {
    pub fn rectangular(a: f64, b: f64, n_stiff: u32) -> Self {
        PanelGeometry {
            a,
            b,
            area: a * b,
            n_stiff,
            stiffener_length: a,
        }
    }

    /// Measures a panel from the mesh coordinates: summed triangle area and
    /// the x/y extents of its nodes. Stiffeners are taken to run along x.
    pub fn from_panel(mesh: &Mesh, panel: &Panel, n_stiff: u32) -> Result<Self, SizingError> {
        let point = |n: NodeId| mesh.coordinate(n).ok_or(SizingError::NoCoordinates(n));
        let mut area = 0.0;
        for &e in &panel.elements {
            let Some(element) = mesh.element(e) else {
                continue;
            };
            let p: Vec<[f64; 3]> = element
                .nodes()
                .iter()
                .map(|&n| point(n))
                .collect::<Result<_, _>>()?;
            // fan triangulation covers both tris and quads
            for k in 1..p.len() - 1 {
                let u = sub(p[k], p[0]);
                let v = sub(p[k + 1], p[0]);
                area += 0.5 * norm(cross(u, v));
            }
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &n in &panel.nodes {
            let p = point(n)?;
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let (a, b) = (hi[0] - lo[0], hi[1] - lo[1]);
        if !(area > 0.0 && a > 0.0 && b > 0.0) {
            return Err(SizingError::ZeroArea);
        }
        Ok(PanelGeometry {
            a,
            b,
            area,
            n_stiff,
            stiffener_length: a,
        })
    }

    pub fn check(&self) -> Result<(), SizingError> {
        if self.a > 0.0 && self.b > 0.0 && self.area > 0.0 && self.stiffener_length >= 0.0 {
            Ok(())
        } else {
            Err(SizingError::ZeroArea)
        }
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// First buckling load factor. Panels with no compressive or shear load
/// never buckle and report [`Buckling::NonCritical`].
///
/// Serialized as a number or the string `"NON_CRITICAL"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Buckling {
    Critical(f64),
    NonCritical,
}

impl Buckling {
    pub fn value(self) -> Option<f64> {
        match self {
            Buckling::Critical(v) => Some(v),
            Buckling::NonCritical => None,
        }
    }

    pub fn satisfies(self, min: f64) -> bool {
        self.value().is_none_or(|v| v >= min)
    }
}

impl Serialize for Buckling {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Buckling::Critical(v) => s.serialize_f64(*v),
            Buckling::NonCritical => s.serialize_str("NON_CRITICAL"),
        }
    }
}

impl<'de> Deserialize<'de> for Buckling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Value(f64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Value(v) => Ok(Buckling::Critical(v)),
            Repr::Tag(t) if t == "NON_CRITICAL" => Ok(Buckling::NonCritical),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "unexpected lambda_p {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub sigma_vm_max: f64,
    pub lambda_p: Buckling,
    pub weight: f64,
}

impl AnalysisResult {
    /// Largest relative constraint violation; zero when feasible.
    pub fn violation(&self, material: &Material) -> f64 {
        let buckling = self
            .lambda_p
            .value()
            .map_or(0.0, |l| (LAMBDA_MIN - l) / LAMBDA_MIN);
        let stress = (self.sigma_vm_max - material.sigma_y) / material.sigma_y;
        buckling.max(stress).max(0.0)
    }

    pub fn is_feasible(&self, material: &Material) -> bool {
        self.lambda_p.satisfies(LAMBDA_MIN) && self.sigma_vm_max <= material.sigma_y
    }
}

/// Derivatives with respect to `(t, t_stiff, h_stiff)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivities {
    pub weight: [f64; 3],
    pub sigma_vm_max: [f64; 3],
    /// `None` when the panel is not buckling-critical.
    pub lambda_p: Option<[f64; 3]>,
}

/// Anything that can evaluate a panel design.
pub trait PanelAnalyzer: Send + Sync {
    fn analyze(
        &self,
        design: &PanelDesign,
        material: &Material,
        loads: &PanelLoads,
        geom: &PanelGeometry,
    ) -> Result<AnalysisResult, SizingError>;

    fn sensitivities(
        &self,
        _design: &PanelDesign,
        _material: &Material,
        _loads: &PanelLoads,
        _geom: &PanelGeometry,
    ) -> Result<Option<Sensitivities>, SizingError> {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_count() {
        assert_eq!(count_design_variables(0, 0), 3);
        assert_eq!(count_design_variables(1, 37), 228);
        assert_eq!(count_design_variables(8, 7), 216);
    }

    #[test]
    fn buckling_serde() {
        assert_eq!(
            serde_json::to_string(&Buckling::NonCritical).unwrap(),
            "\"NON_CRITICAL\""
        );
        assert_eq!(
            serde_json::to_string(&Buckling::Critical(1.5)).unwrap(),
            "1.5"
        );
        let b: Buckling = serde_json::from_str("2.25").unwrap();
        assert_eq!(b, Buckling::Critical(2.25));
        assert!(serde_json::from_str::<Buckling>("\"INFINITE\"").is_err());
    }

    #[test]
    fn bounds_validation() {
        let mut b = DesignBounds {
            t: [1e-3, 1e-2],
            t_stiff: [1e-3, 5e-3],
            h_stiff: [5e-3, 4e-2],
        };
        assert!(b.validate().is_ok());
        b.h_stiff = [0.05, 0.04];
        assert_eq!(
            b.validate(),
            Err(SizingError::InvalidBounds(Variable::HStiff))
        );
    }

    #[test]
    fn material_validation() {
        assert!(Material::aluminum().validate().is_ok());
        let bad = Material {
            nu: 0.5,
            ..Material::aluminum()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn geometry_from_reference_panel() {
        let grid = crate::fixtures::reference_grid();
        let idx = crate::build_adjacency(&grid.mesh()).unwrap();
        let b = crate::PanelBoundary::new(crate::fixtures::reference_lower_loop()).unwrap();
        let p = crate::extract_panel(&idx, &b).unwrap();
        let g = PanelGeometry::from_panel(&grid.mesh(), &p, 1).unwrap();
        assert_eq!((g.a, g.b, g.area), (4.0, 1.0, 4.0));
        let stripped = grid.mesh().subset(|_| true);
        let mut stripped = stripped;
        stripped.set_coordinate(NodeId(1), None).unwrap();
        assert_eq!(
            PanelGeometry::from_panel(&stripped, &p, 1),
            Err(SizingError::NoCoordinates(NodeId(1)))
        );
    }
}
