//! Size one stiffened aluminum panel under axial compression and shear.

use panelize::sizing::{
    optimize_panel, DesignBounds, Material, OptimizerSettings, PanelAnalyzer, PanelGeometry,
    PanelLoads, SmearedPlate,
};

fn main() {
    let material = Material::aluminum();
    let geometry = PanelGeometry::rectangular(0.5, 0.5, 2);
    let bounds = DesignBounds {
        t: [0.001, 0.01],
        t_stiff: [0.001, 0.006],
        h_stiff: [0.005, 0.04],
    };
    let analyzer = SmearedPlate::default();

    for loads in [
        PanelLoads::new(-1.5e5, 0.0, 0.0),
        PanelLoads::new(-1.0e5, 0.0, 4.0e4),
    ] {
        let lower = analyzer
            .analyze(&bounds.lower(), &material, &loads, &geometry)
            .expect("valid inputs");
        println!(
            "nx {:.0} nxy {:.0}: lower bounds give lambda {:?}",
            loads.nx, loads.nxy, lower.lambda_p
        );
        let best = optimize_panel(
            &geometry,
            &material,
            &loads,
            &bounds,
            &analyzer,
            &OptimizerSettings::default(),
        )
        .expect("valid inputs");
        let d = best.design;
        println!(
            "  t {:.3} mm, t_stiff {:.3} mm, h_stiff {:.2} mm: {:.4} kg, lambda {:?}, stress {:.1} MPa, {} evaluations",
            d.t * 1e3,
            d.t_stiff * 1e3,
            d.h_stiff * 1e3,
            best.result.weight,
            best.result.lambda_p,
            best.result.sigma_vm_max / 1e6,
            best.evaluations
        );
    }
}
