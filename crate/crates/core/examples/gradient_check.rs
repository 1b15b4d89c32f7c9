//! Compare the surrogate's analytic sensitivities with central differences.

use panelize::sizing::{
    gradient_check, Material, PanelDesign, PanelGeometry, PanelLoads, SmearedPlate,
};

fn main() {
    let report = gradient_check(
        &SmearedPlate::default(),
        &PanelDesign::new(0.004, 0.003, 0.02),
        &Material::aluminum(),
        &PanelLoads::new(-1.5e5, -2.0e4, 3.0e4),
        &PanelGeometry::rectangular(0.5, 0.5, 2),
    )
    .expect("surrogate supplies sensitivities");
    for e in &report.entries {
        println!(
            "{:<22} analytic {:>14.6e}  fd {:>14.6e}  rel {:.2e} {}",
            format!("d{:?}/d{}", e.quantity, e.variable),
            e.analytic,
            e.finite_difference,
            e.relative_error,
            if e.passed { "ok" } else { "FAIL" }
        );
    }
    println!("passed: {}", report.passed());
}
