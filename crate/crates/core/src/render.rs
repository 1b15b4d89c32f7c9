//! Static SVG figures of a decomposition.
//!
//! Elements are drawn in the x-y plane, one `<polygon>` each, filled by
//! panel (or by stiffener chain). Dividing curves are stroked on top as
//! `<polyline>`s. Output depends only on the inputs, byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::extract::PanelId;
use crate::manifest::Manifest;
use crate::mesh::{ElementId, ElementKind, Mesh, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("node {0} has no coordinates; rendering needs them")]
    NoCoordinates(NodeId),
    #[error("nothing to draw")]
    Empty,
    #[error("unknown color mode {0:?}, expected panel, chain or none")]
    UnknownColorMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorBy {
    #[default]
    Panel,
    Chain,
    None,
}

impl FromStr for ColorBy {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "panel" => Ok(ColorBy::Panel),
            "chain" => Ok(ColorBy::Chain),
            "none" => Ok(ColorBy::None),
            other => Err(RenderError::UnknownColorMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub color_by: ColorBy,
    pub stroke_width: f64,
    /// Canvas size in pixels.
    pub width: u32,
    pub height: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            color_by: ColorBy::Panel,
            stroke_width: 1.0,
            width: 800,
            height: 600,
        }
    }
}

/// Hex color for the `k`-th entity: hues spaced by the golden angle.
pub fn palette(k: u32) -> String {
    let hue = (f64::from(k) * 137.507_764) % 360.0;
    let (s, l) = (0.55, 0.62);
    let c = (1.0 - (2.0 * l - 1.0_f64).abs()) * s;
    let h = hue / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

const BARE: &str = "#e6e6e6";
const MARGIN: f64 = 10.0;

pub fn render_svg(
    mesh: &Mesh,
    manifest: &Manifest,
    options: &RenderOptions,
) -> Result<String, RenderError> {
    if mesh.element_count() == 0 {
        return Err(RenderError::Empty);
    }
    let mut points: BTreeMap<NodeId, [f64; 2]> = BTreeMap::new();
    for e in mesh.elements() {
        for &n in e.nodes() {
            let p = mesh.coordinate(n).ok_or(RenderError::NoCoordinates(n))?;
            points.insert(n, [p[0], p[1]]);
        }
    }
    // curves are drawn only over meshes that contain them
    let curves: Vec<_> = manifest
        .curves
        .iter()
        .filter(|c| c.nodes().iter().all(|&n| mesh.has_node(n)))
        .collect();
    for c in &curves {
        for &n in c.nodes() {
            let p = mesh.coordinate(n).ok_or(RenderError::NoCoordinates(n))?;
            points.insert(n, [p[0], p[1]]);
        }
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points.values() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let (w, h) = (f64::from(options.width), f64::from(options.height));
    let span = [
        (hi[0] - lo[0]).max(f64::MIN_POSITIVE),
        (hi[1] - lo[1]).max(f64::MIN_POSITIVE),
    ];
    let scale = ((w - 2.0 * MARGIN) / span[0]).min((h - 2.0 * MARGIN) / span[1]);
    let project = |n: &NodeId| {
        let p = points[n];
        (
            MARGIN + (p[0] - lo[0]) * scale,
            h - MARGIN - (p[1] - lo[1]) * scale,
        )
    };

    let mut panel_of: BTreeMap<ElementId, PanelId> = BTreeMap::new();
    for p in &manifest.panels {
        for &e in &p.elements {
            panel_of.insert(e, p.id);
        }
    }
    let mut chain_of: BTreeMap<ElementId, u32> = BTreeMap::new();
    if let Some(s) = &manifest.stiffeners {
        let chains = s.assignments.iter().flat_map(|a| a.chains.iter());
        for (k, chain) in chains.enumerate() {
            for &e in chain {
                chain_of.insert(e, k as u32 + 1);
            }
        }
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        options.width, options.height, options.width, options.height
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    for e in mesh.elements() {
        let fill = match (options.color_by, e.kind) {
            (ColorBy::Panel, ElementKind::Tri) => panel_of
                .get(&e.id)
                .map_or(BARE.to_string(), |p| palette(p.0)),
            (ColorBy::Chain, ElementKind::Quad) => chain_of
                .get(&e.id)
                .map_or("none".to_string(), |&k| palette(k)),
            (_, ElementKind::Tri) => BARE.to_string(),
            (_, ElementKind::Quad) => "none".to_string(),
        };
        let pts: Vec<String> = e
            .nodes()
            .iter()
            .map(|n| {
                let (x, y) = project(n);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let title = match panel_of.get(&e.id) {
            Some(p) => format!("element {} panel {}", e.id, p),
            None => format!("element {}", e.id),
        };
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="{}" stroke="#404040" stroke-width="{:.3}"><title>{}</title></polygon>"##,
            pts.join(" "),
            fill,
            options.stroke_width,
            title
        );
    }
    for c in &curves {
        let pts: Vec<String> = c
            .nodes()
            .iter()
            .map(|n| {
                let (x, y) = project(n);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="{:.3}"/>"##,
            pts.join(" "),
            3.0 * options.stroke_width
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_mesh;
    use crate::{build_adjacency, decompose, DividingCurve};

    fn split() -> Manifest {
        let idx = build_adjacency(&reference_mesh()).unwrap();
        let curves = vec![DividingCurve::from_ids(6..=10).unwrap()];
        Manifest {
            curves: curves.clone(),
            ..Manifest::from_panels(&decompose(&idx, &curves).unwrap())
        }
    }

    #[test]
    fn two_colored_regions() {
        let svg = render_svg(&reference_mesh(), &split(), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 16);
        assert_eq!(svg.matches(&format!("fill=\"{}\"", palette(1))).count(), 8);
        assert_eq!(svg.matches(&format!("fill=\"{}\"", palette(2))).count(), 8);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(
            svg,
            render_svg(&reference_mesh(), &split(), &RenderOptions::default()).unwrap()
        );
    }

    #[test]
    fn bare_mesh() {
        let svg = render_svg(
            &reference_mesh(),
            &Manifest::default(),
            &RenderOptions::default(),
        )
        .unwrap();
        assert_eq!(svg.matches(BARE).count(), 16);
    }

    #[test]
    fn needs_coordinates() {
        let mut m = reference_mesh();
        m.set_coordinate(NodeId(4), None).unwrap();
        assert_eq!(
            render_svg(&m, &Manifest::default(), &RenderOptions::default()),
            Err(RenderError::NoCoordinates(NodeId(4)))
        );
    }

    #[test]
    fn palette_is_distinct() {
        let colors: std::collections::BTreeSet<String> = (1..=20).map(palette).collect();
        assert_eq!(colors.len(), 20);
    }
}
