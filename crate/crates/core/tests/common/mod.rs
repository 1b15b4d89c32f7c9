#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde_json::Value;

use panelize::bdf::BdfErrorKind;
use panelize::global::{LoopInputs, PanelSpec};
use panelize::sizing::{
    DesignBounds, Material, OptimizerSettings, PanelAnalyzer, PanelDesign, PanelGeometry,
    PanelLoads, SmearedPlate,
};
use panelize::{ElementId, Mesh, NodeId, PanelId};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn bounds() -> DesignBounds {
    DesignBounds {
        t: [0.001, 0.01],
        t_stiff: [0.001, 0.006],
        h_stiff: [0.005, 0.04],
    }
}

/// The reference aluminum panel: 0.5 m square, two blades, and a
/// compression the lower bounds cannot carry.
pub fn reference_problem() -> (PanelGeometry, Material, PanelLoads) {
    (
        PanelGeometry::rectangular(0.5, 0.5, 2),
        Material::aluminum(),
        PanelLoads::new(-1.5e5, 0.0, 0.0),
    )
}

/// Lightest feasible point of a uniform `n`-per-side grid over the bounds.
pub fn grid_oracle(
    n: usize,
    geom: &PanelGeometry,
    material: &Material,
    loads: &PanelLoads,
    bounds: &DesignBounds,
) -> Option<(PanelDesign, f64)> {
    let analyzer = SmearedPlate::default();
    let axis = |r: [f64; 2]| -> Vec<f64> {
        (0..n)
            .map(|k| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64)
            .collect()
    };
    let mut best: Option<(PanelDesign, f64)> = None;
    for &t in &axis(bounds.t) {
        for &ts in &axis(bounds.t_stiff) {
            for &h in &axis(bounds.h_stiff) {
                let d = PanelDesign::new(t, ts, h);
                let r = analyzer.analyze(&d, material, loads, geom).unwrap();
                let feasible = r.lambda_p.satisfies(1.05) && r.sigma_vm_max <= material.sigma_y;
                if feasible && best.is_none_or(|(_, w)| r.weight < w) {
                    best = Some((d, r.weight));
                }
            }
        }
    }
    best
}

/// Two-panel wing box used by the loop fixtures.
pub fn toy_panels() -> Vec<PanelSpec> {
    vec![
        PanelSpec {
            id: PanelId(1),
            geometry: PanelGeometry::rectangular(0.5, 0.5, 1),
        },
        PanelSpec {
            id: PanelId(2),
            geometry: PanelGeometry::rectangular(0.5, 0.3, 3),
        },
    ]
}

pub const TOY_FORCE: f64 = -2.0e5;

pub fn toy_inputs<'a>(panels: &'a [PanelSpec], analyzer: &'a SmearedPlate) -> LoopInputs<'a> {
    LoopInputs {
        panels,
        material: Material::aluminum(),
        bounds: bounds(),
        analyzer,
        optimizer: OptimizerSettings::default(),
    }
}

/// Region reachable from `seed` without crossing a wall, built from the raw
/// element list.
pub fn side_fill(
    mesh: &Mesh,
    walls: &BTreeSet<(NodeId, NodeId)>,
    seed: ElementId,
) -> BTreeSet<ElementId> {
    let key = |a: NodeId, b: NodeId| if a < b { (a, b) } else { (b, a) };
    let mut owners: BTreeMap<(NodeId, NodeId), Vec<ElementId>> = BTreeMap::new();
    for e in mesh.elements() {
        let n = e.nodes();
        for i in 0..n.len() {
            owners
                .entry(key(n[i], n[(i + 1) % n.len()]))
                .or_default()
                .push(e.id);
        }
    }
    let mut out = BTreeSet::from([seed]);
    let mut stack = vec![seed];
    while let Some(e) = stack.pop() {
        let n = mesh.element(e).unwrap().nodes();
        for i in 0..n.len() {
            let k = key(n[i], n[(i + 1) % n.len()]);
            if walls.contains(&k) {
                continue;
            }
            for &o in &owners[&k] {
                if out.insert(o) {
                    stack.push(o);
                }
            }
        }
    }
    out
}

pub fn loop_walls(lp: &[NodeId]) -> BTreeSet<(NodeId, NodeId)> {
    (0..lp.len())
        .map(|i| {
            let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

pub struct Malformed {
    pub name: &'static str,
    pub text: &'static str,
    pub line: usize,
    pub expected: fn(&BdfErrorKind) -> bool,
}

/// Ten broken decks, each with the line the error must point at.
pub fn malformed_corpus() -> Vec<Malformed> {
    vec![
        Malformed {
            name: "non-numeric GRID id",
            text: "$ header\nGRID    1x              0.0     0.0     0.0\n",
            line: 2,
            expected: |k| matches!(k, BdfErrorKind::BadInteger { field: 2, .. }),
        },
        Malformed {
            name: "zero element id",
            text: "GRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nGRID,3,,0.,1.,0.\nCTRIA3,0,1,1,2,3\n",
            line: 4,
            expected: |k| matches!(k, BdfErrorKind::BadInteger { field: 2, .. }),
        },
        Malformed {
            name: "garbage coordinate",
            text: "GRID           1             0.0     abc     0.0\n",
            line: 1,
            expected: |k| matches!(k, BdfErrorKind::BadReal { field: 5, .. }),
        },
        Malformed {
            name: "short exponent",
            text: "$\n$\nGRID           1           1.0+3     0.0     0.0\n",
            line: 3,
            expected: |k| matches!(k, BdfErrorKind::ShortExponent { field: 4, .. }),
        },
        Malformed {
            name: "D exponent",
            text: "GRID,1,,0.,0.,0.\nGRID,2,,1.5D2,0.,0.\n",
            line: 2,
            expected: |k| matches!(k, BdfErrorKind::BadReal { field: 4, .. }),
        },
        Malformed {
            name: "missing connectivity",
            text: "GRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nCTRIA3,5,1,1,2\n",
            line: 3,
            expected: |k| matches!(k, BdfErrorKind::MissingField { field: 6 }),
        },
        Malformed {
            name: "tab in fixed field",
            text: "GRID           1             0.0     0.0     0.0\nGRID\t2\n",
            line: 2,
            expected: |k| matches!(k, BdfErrorKind::Tab),
        },
        Malformed {
            name: "duplicate GRID",
            text: "GRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nGRID,1,,2.,0.,0.\n",
            line: 3,
            expected: |k| matches!(k, BdfErrorKind::DuplicateGrid(NodeId(1))),
        },
        Malformed {
            name: "duplicate element",
            text: "GRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nGRID,3,,0.,1.,0.\nGRID,4,,1.,1.,0.\n\
                   CTRIA3,7,1,1,2,3\nCTRIA3,7,1,2,4,3\n",
            line: 6,
            expected: |k| matches!(k, BdfErrorKind::DuplicateElement(ElementId(7))),
        },
        Malformed {
            name: "undefined GRID",
            text: "GRID,1,,0.,0.,0.\nCQUAD4,3,1,1,2,9,4\nGRID,2,,1.,0.,0.\nGRID,4,,0.,1.,0.\n",
            line: 2,
            expected: |k| {
                matches!(
                    k,
                    BdfErrorKind::UndefinedGrid {
                        element: ElementId(3),
                        node: NodeId(9)
                    }
                )
            },
        },
    ]
}

/// Structural equality with a relative tolerance on numbers, so the golden
/// file survives last-bit differences in libm.
pub fn close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300) {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => x
            .iter()
            .zip(y)
            .enumerate()
            .try_for_each(|(i, (p, q))| close(p, q, &format!("{path}[{i}]"))),
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => {
            x.iter().try_for_each(|(k, v)| {
                y.get(k)
                    .ok_or_else(|| format!("{path}.{k} missing"))
                    .and_then(|w| close(v, w, &format!("{path}.{k}")))
            })
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} vs {b}")),
    }
}
