use serde::{Deserialize, Serialize};

use super::{
    Material, PanelAnalyzer, PanelDesign, PanelGeometry, PanelLoads, SizingError, Variable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Weight,
    SigmaVmMax,
    LambdaP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientEntry {
    pub quantity: Quantity,
    pub variable: Variable,
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub tolerance: f64,
    pub entries: Vec<GradientEntry>,
}

impl GradientReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GradientEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn entry(&self, quantity: Quantity, variable: Variable) -> Option<&GradientEntry> {
        self.entries
            .iter()
            .find(|e| e.quantity == quantity && e.variable == variable)
    }
}

/// Relative step of the central differences.
pub const FD_STEP: f64 = 1e-6;
pub const GRADIENT_TOLERANCE: f64 = 1e-4;

fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares the analyzer's sensitivities with central finite differences.
///
/// Buckling entries are present only when the panel is buckling-critical.
pub fn gradient_check(
    analyzer: &dyn PanelAnalyzer,
    design: &PanelDesign,
    material: &Material,
    loads: &PanelLoads,
    geom: &PanelGeometry,
) -> Result<GradientReport, SizingError> {
    let sens = analyzer
        .sensitivities(design, material, loads, geom)?
        .ok_or(SizingError::NoSensitivities)?;
    let mut entries = Vec::new();
    for v in Variable::ALL {
        let k = v as usize;
        let h = FD_STEP * design.get(v);
        let mut plus = design.to_array();
        let mut minus = design.to_array();
        plus[k] += h;
        minus[k] -= h;
        let rp = analyzer.analyze(&PanelDesign::from_array(plus), material, loads, geom)?;
        let rm = analyzer.analyze(&PanelDesign::from_array(minus), material, loads, geom)?;
        let step = plus[k] - minus[k];
        let mut push = |quantity, analytic: f64, fd: f64| {
            let relative_error = relative_error(analytic, fd);
            entries.push(GradientEntry {
                quantity,
                variable: v,
                analytic,
                finite_difference: fd,
                relative_error,
                passed: relative_error <= GRADIENT_TOLERANCE,
            });
        };
        push(
            Quantity::Weight,
            sens.weight[k],
            (rp.weight - rm.weight) / step,
        );
        push(
            Quantity::SigmaVmMax,
            sens.sigma_vm_max[k],
            (rp.sigma_vm_max - rm.sigma_vm_max) / step,
        );
        if let (Some(dl), Some(lp), Some(lm)) =
            (sens.lambda_p, rp.lambda_p.value(), rm.lambda_p.value())
        {
            push(Quantity::LambdaP, dl[k], (lp - lm) / step);
        }
    }
    Ok(GradientReport {
        tolerance: GRADIENT_TOLERANCE,
        entries,
    })
}
