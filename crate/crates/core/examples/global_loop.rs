//! Two-panel wing box sized under a stiffness-proportional load split.
//!
//! Pass a worker count as the first argument to check that the history
//! does not depend on it.

use panelize::global::{
    run_global_local, LoopConfig, LoopInputs, PanelSpec, StiffnessRedistribution,
};
use panelize::sizing::{DesignBounds, Material, OptimizerSettings, PanelGeometry, SmearedPlate};
use panelize::PanelId;

fn main() {
    let workers = std::env::args()
        .nth(1)
        .map_or(2, |a| a.parse().expect("worker count"));
    let panels = [
        PanelSpec {
            id: PanelId(1),
            geometry: PanelGeometry::rectangular(0.5, 0.5, 1),
        },
        PanelSpec {
            id: PanelId(2),
            geometry: PanelGeometry::rectangular(0.5, 0.3, 3),
        },
    ];
    let analyzer = SmearedPlate::default();
    let inputs = LoopInputs {
        panels: &panels,
        material: Material::aluminum(),
        bounds: DesignBounds {
            t: [0.001, 0.01],
            t_stiff: [0.001, 0.006],
            h_stiff: [0.005, 0.04],
        },
        analyzer: &analyzer,
        optimizer: OptimizerSettings::default(),
    };
    let mut provider = StiffnessRedistribution {
        force_x: -2.0e5,
        ny: 0.0,
        nxy: 0.0,
    };
    let config = LoopConfig {
        worker_count: workers,
        ..LoopConfig::default()
    };
    let outcome = run_global_local(&inputs, &mut provider, &config).expect("loop runs");
    for r in &outcome.history {
        let loads: Vec<String> = r
            .panels
            .iter()
            .map(|p| format!("{:.0}", p.loads.nx))
            .collect();
        println!(
            "iteration {}: {:.6} kg, change {}, nx [{}]",
            r.iteration,
            r.total_weight,
            r.delta_pct.map_or("-".into(), |d| format!("{d:.4} %")),
            loads.join(", ")
        );
    }
    println!("{:?}", outcome.status);
}
