//! The global/local sizing loop.
//!
//! Each iteration optimizes every panel on a worker pool under loads that
//! stay frozen for the whole iteration, sums the panel weights, and asks a
//! global provider for the loads of the next iteration. The loop stops
//! when the weight changes by less than the threshold percentage between
//! two iterations, or after `max_iterations`.
//!
//! Locally feasible panels do not make the assembled structure feasible.
//! Providers may report global constraint flags; these are recorded as
//! they are and never turned into a feasibility claim.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::PanelId;
use crate::sizing::{
    optimize_panel, AnalysisResult, DesignBounds, Material, OptimizerSettings, PanelAnalyzer,
    PanelDesign, PanelGeometry, PanelLoads, SizingError, LAMBDA_MIN,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlobalError {
    #[error("no design for panel {0}")]
    MissingDesign(PanelId),
    #[error("no loads for panel {0}")]
    MissingLoads(PanelId),
    #[error("panel {panel}: {source}")]
    Sizing { panel: PanelId, source: SizingError },
    #[error("invalid loop configuration: {0}")]
    Config(&'static str),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("global provider failed: {0}")]
pub struct ProviderError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopConfig {
    pub convergence_threshold_pct: f64,
    pub max_iterations: usize,
    pub worker_count: usize,
    pub seed: u64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            convergence_threshold_pct: 0.5,
            max_iterations: 10,
            worker_count: 1,
            seed: 0,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self) -> Result<(), GlobalError> {
        if self.convergence_threshold_pct.is_nan() || self.convergence_threshold_pct <= 0.0 {
            return Err(GlobalError::Config(
                "convergence threshold must be positive",
            ));
        }
        if self.max_iterations < 1 {
            return Err(GlobalError::Config("max_iterations must be at least 1"));
        }
        if self.worker_count < 1 {
            return Err(GlobalError::Config("worker_count must be at least 1"));
        }
        Ok(())
    }
}

/// What the loop needs to know about one panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelSpec {
    pub id: PanelId,
    pub geometry: PanelGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelOutcome {
    pub panel: PanelId,
    pub loads: PanelLoads,
    pub design: PanelDesign,
    pub result: AnalysisResult,
    pub feasible: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSummary {
    /// Panels for which the optimizer found no feasible design.
    pub infeasible_panels: Vec<PanelId>,
    pub min_lambda_p: Option<f64>,
    pub max_stress_ratio: f64,
    /// Flags raised by the global provider for the assembled design.
    pub global_flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub total_weight: f64,
    /// Percentage change from the previous iteration; absent for the first.
    pub delta_pct: Option<f64>,
    pub panels: Vec<PanelOutcome>,
    pub constraints: ConstraintSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LoopStatus {
    Converged,
    MaxIterations,
    NotConvergedFeasibility,
    ProviderFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopOutcome {
    pub status: LoopStatus,
    pub history: Vec<IterationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Response of the global model to an assembled design.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlobalResponse {
    pub loads: BTreeMap<PanelId, PanelLoads>,
    pub flags: Vec<String>,
}

/// Stand-in for the global analysis of the assembled structure.
pub trait GlobalProvider {
    fn initial_loads(
        &mut self,
        panels: &[PanelSpec],
    ) -> Result<BTreeMap<PanelId, PanelLoads>, ProviderError>;

    fn update(
        &mut self,
        panels: &[PanelSpec],
        outcomes: &[PanelOutcome],
        material: &Material,
        analyzer: &dyn PanelAnalyzer,
    ) -> Result<GlobalResponse, ProviderError>;
}

/// Re-analyzes each design under `loads` and flags violated constraints.
pub fn global_flags(
    panels: &[PanelSpec],
    outcomes: &[PanelOutcome],
    loads: &BTreeMap<PanelId, PanelLoads>,
    material: &Material,
    analyzer: &dyn PanelAnalyzer,
) -> Result<Vec<String>, ProviderError> {
    let mut flags = Vec::new();
    for (spec, o) in panels.iter().zip(outcomes) {
        let l = loads.get(&spec.id).copied().unwrap_or_default();
        let r = analyzer
            .analyze(&o.design, material, &l, &spec.geometry)
            .map_err(|e| ProviderError(e.to_string()))?;
        if let Some(lambda) = r.lambda_p.value().filter(|&v| v < LAMBDA_MIN) {
            flags.push(format!(
                "panel {}: lambda_p {lambda:.4} below {LAMBDA_MIN}",
                spec.id
            ));
        }
        if r.sigma_vm_max > material.sigma_y {
            flags.push(format!(
                "panel {}: sigma_vm_max {:.4e} above sigma_y {:.4e}",
                spec.id, r.sigma_vm_max, material.sigma_y
            ));
        }
    }
    Ok(flags)
}

/// The same loads every iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstantLoads {
    pub default: PanelLoads,
    pub per_panel: BTreeMap<PanelId, PanelLoads>,
}

impl ConstantLoads {
    pub fn uniform(loads: PanelLoads) -> Self {
        ConstantLoads {
            default: loads,
            per_panel: BTreeMap::new(),
        }
    }

    fn loads(&self, panels: &[PanelSpec]) -> BTreeMap<PanelId, PanelLoads> {
        panels
            .iter()
            .map(|p| {
                (
                    p.id,
                    self.per_panel.get(&p.id).copied().unwrap_or(self.default),
                )
            })
            .collect()
    }
}

impl GlobalProvider for ConstantLoads {
    fn initial_loads(
        &mut self,
        panels: &[PanelSpec],
    ) -> Result<BTreeMap<PanelId, PanelLoads>, ProviderError> {
        Ok(self.loads(panels))
    }

    fn update(
        &mut self,
        panels: &[PanelSpec],
        outcomes: &[PanelOutcome],
        material: &Material,
        analyzer: &dyn PanelAnalyzer,
    ) -> Result<GlobalResponse, ProviderError> {
        let loads = self.loads(panels);
        let flags = global_flags(panels, outcomes, &loads, material, analyzer)?;
        Ok(GlobalResponse { loads, flags })
    }
}

/// Panels side by side across a section share a total axial force in
/// proportion to their extensional stiffness: all see the same strain, so
/// `nx_i = F E t_eff_i / sum_j (E t_eff_j b_j)`. `ny` and `nxy` are applied
/// to every panel unchanged. The first iteration assumes equal stiffness.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessRedistribution {
    /// Total axial force across the section, N. Compression is negative.
    pub force_x: f64,
    pub ny: f64,
    pub nxy: f64,
}

impl StiffnessRedistribution {
    fn distribute(&self, panels: &[PanelSpec], stiffness: &[f64]) -> BTreeMap<PanelId, PanelLoads> {
        let total: f64 = panels
            .iter()
            .zip(stiffness)
            .map(|(p, k)| k * p.geometry.b)
            .sum();
        panels
            .iter()
            .zip(stiffness)
            .map(|(p, k)| {
                (
                    p.id,
                    PanelLoads::new(self.force_x * k / total, self.ny, self.nxy),
                )
            })
            .collect()
    }
}

impl GlobalProvider for StiffnessRedistribution {
    fn initial_loads(
        &mut self,
        panels: &[PanelSpec],
    ) -> Result<BTreeMap<PanelId, PanelLoads>, ProviderError> {
        if panels.is_empty() {
            return Ok(BTreeMap::new());
        }
        Ok(self.distribute(panels, &vec![1.0; panels.len()]))
    }

    fn update(
        &mut self,
        panels: &[PanelSpec],
        outcomes: &[PanelOutcome],
        material: &Material,
        analyzer: &dyn PanelAnalyzer,
    ) -> Result<GlobalResponse, ProviderError> {
        let stiffness: Vec<f64> = panels
            .iter()
            .zip(outcomes)
            .map(|(p, o)| {
                let g = &p.geometry;
                let t_eff =
                    o.design.t + f64::from(g.n_stiff) * o.design.t_stiff * o.design.h_stiff / g.b;
                material.e * t_eff
            })
            .collect();
        let loads = self.distribute(panels, &stiffness);
        let flags = global_flags(panels, outcomes, &loads, material, analyzer)?;
        Ok(GlobalResponse { loads, flags })
    }
}

/// Total weight of a set of designs, summed in panel-ID order.
pub fn assemble_weight(
    designs: &BTreeMap<PanelId, PanelDesign>,
    panels: &[PanelSpec],
    material: &Material,
    analyzer: &dyn PanelAnalyzer,
) -> Result<f64, GlobalError> {
    let mut sorted: Vec<&PanelSpec> = panels.iter().collect();
    sorted.sort_by_key(|p| p.id);
    let mut total = 0.0;
    for p in sorted {
        let d = designs.get(&p.id).ok_or(GlobalError::MissingDesign(p.id))?;
        let r = analyzer
            .analyze(d, material, &PanelLoads::default(), &p.geometry)
            .map_err(|source| GlobalError::Sizing {
                panel: p.id,
                source,
            })?;
        total += r.weight;
    }
    Ok(total)
}

/// Seed of one panel's optimizer, derived from the run seed.
pub fn panel_seed(seed: u64, panel: PanelId) -> u64 {
    seed ^ u64::from(panel.0).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Everything fixed for the duration of a run.
pub struct LoopInputs<'a> {
    pub panels: &'a [PanelSpec],
    pub material: Material,
    pub bounds: DesignBounds,
    pub analyzer: &'a dyn PanelAnalyzer,
    pub optimizer: OptimizerSettings,
}

/// Runs the global/local iteration.
///
/// Results are merged by panel ID, so the history is the same for any
/// worker count. A provider failure ends the run with the records of the
/// iterations completed so far.
pub fn run_global_local(
    inputs: &LoopInputs<'_>,
    provider: &mut dyn GlobalProvider,
    config: &LoopConfig,
) -> Result<LoopOutcome, GlobalError> {
    config.validate()?;
    let mut panels: Vec<PanelSpec> = inputs.panels.to_vec();
    panels.sort_by_key(|p| p.id);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| GlobalError::Pool(e.to_string()))?;

    let failed = |history: Vec<IterationRecord>, e: ProviderError| LoopOutcome {
        status: LoopStatus::ProviderFailed,
        history,
        message: Some(e.to_string()),
    };
    let mut loads = match provider.initial_loads(&panels) {
        Ok(l) => l,
        Err(e) => return Ok(failed(Vec::new(), e)),
    };
    let mut history: Vec<IterationRecord> = Vec::new();
    for iteration in 1..=config.max_iterations {
        let frozen = &loads;
        let results: Vec<Result<PanelOutcome, GlobalError>> = pool.install(|| {
            panels
                .par_iter()
                .map(|p| {
                    let l = *frozen.get(&p.id).ok_or(GlobalError::MissingLoads(p.id))?;
                    let settings = OptimizerSettings {
                        seed: panel_seed(config.seed, p.id),
                        ..inputs.optimizer
                    };
                    let o = optimize_panel(
                        &p.geometry,
                        &inputs.material,
                        &l,
                        &inputs.bounds,
                        inputs.analyzer,
                        &settings,
                    )
                    .map_err(|source| GlobalError::Sizing {
                        panel: p.id,
                        source,
                    })?;
                    Ok(PanelOutcome {
                        panel: p.id,
                        loads: l,
                        design: o.design,
                        result: o.result,
                        feasible: o.feasible,
                    })
                })
                .collect()
        });
        let outcomes = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        let designs: BTreeMap<PanelId, PanelDesign> =
            outcomes.iter().map(|o| (o.panel, o.design)).collect();
        let total_weight = assemble_weight(&designs, &panels, &inputs.material, inputs.analyzer)?;
        let delta_pct = history
            .last()
            .map(|prev| 100.0 * (total_weight - prev.total_weight).abs() / prev.total_weight);

        let response = match provider.update(&panels, &outcomes, &inputs.material, inputs.analyzer)
        {
            Ok(r) => r,
            Err(e) => return Ok(failed(history, e)),
        };
        let constraints = ConstraintSummary {
            infeasible_panels: outcomes
                .iter()
                .filter(|o| !o.feasible)
                .map(|o| o.panel)
                .collect(),
            min_lambda_p: outcomes
                .iter()
                .filter_map(|o| o.result.lambda_p.value())
                .min_by(f64::total_cmp),
            max_stress_ratio: outcomes
                .iter()
                .map(|o| o.result.sigma_vm_max / inputs.material.sigma_y)
                .fold(0.0, f64::max),
            global_flags: response.flags,
        };
        let any_infeasible = !constraints.infeasible_panels.is_empty();
        log::info!(
            "iteration {iteration}: weight {total_weight:.6} kg, delta {:?} %",
            delta_pct
        );
        history.push(IterationRecord {
            iteration,
            total_weight,
            delta_pct,
            panels: outcomes,
            constraints,
        });
        let converged = delta_pct.is_some_and(|d| d < config.convergence_threshold_pct);
        if converged || iteration == config.max_iterations {
            let status = if any_infeasible {
                LoopStatus::NotConvergedFeasibility
            } else if converged {
                LoopStatus::Converged
            } else {
                LoopStatus::MaxIterations
            };
            return Ok(LoopOutcome {
                status,
                history,
                message: None,
            });
        }
        loads = response.loads;
    }
    unreachable!("the loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sizing::SmearedPlate;

    fn bounds() -> DesignBounds {
        DesignBounds {
            t: [0.001, 0.01],
            t_stiff: [0.001, 0.006],
            h_stiff: [0.005, 0.04],
        }
    }

    fn specs() -> Vec<PanelSpec> {
        vec![
            PanelSpec {
                id: PanelId(1),
                geometry: PanelGeometry::rectangular(0.5, 0.5, 2),
            },
            PanelSpec {
                id: PanelId(2),
                geometry: PanelGeometry::rectangular(0.5, 0.3, 1),
            },
        ]
    }

    fn inputs<'a>(panels: &'a [PanelSpec], analyzer: &'a SmearedPlate) -> LoopInputs<'a> {
        LoopInputs {
            panels,
            material: Material::aluminum(),
            bounds: bounds(),
            analyzer,
            optimizer: OptimizerSettings::default(),
        }
    }

    #[test]
    fn constant_loads_converge_in_two() {
        let a = SmearedPlate::default();
        let p = specs();
        let mut provider = ConstantLoads::uniform(PanelLoads::new(-1e5, 0.0, 1e4));
        let out = run_global_local(&inputs(&p, &a), &mut provider, &LoopConfig::default()).unwrap();
        assert_eq!(out.status, LoopStatus::Converged);
        assert_eq!(out.history.len(), 2);
        assert_eq!(out.history[1].delta_pct, Some(0.0));
        assert!(out.history[0].delta_pct.is_none());
    }

    #[test]
    fn single_iteration() {
        let a = SmearedPlate::default();
        let p = specs();
        let mut provider = ConstantLoads::uniform(PanelLoads::new(-1e5, 0.0, 0.0));
        let config = LoopConfig {
            max_iterations: 1,
            ..Default::default()
        };
        let out = run_global_local(&inputs(&p, &a), &mut provider, &config).unwrap();
        assert_eq!(out.status, LoopStatus::MaxIterations);
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn infeasible_panel_sets_status() {
        let a = SmearedPlate::default();
        let p = specs();
        let mut provider = ConstantLoads::uniform(PanelLoads::new(-5e7, 0.0, 0.0));
        let out = run_global_local(&inputs(&p, &a), &mut provider, &LoopConfig::default()).unwrap();
        assert_eq!(out.status, LoopStatus::NotConvergedFeasibility);
        assert_eq!(
            out.history.last().unwrap().constraints.infeasible_panels,
            vec![PanelId(1), PanelId(2)]
        );
        assert!(!out
            .history
            .last()
            .unwrap()
            .constraints
            .global_flags
            .is_empty());
    }

    struct Failing(usize);

    impl GlobalProvider for Failing {
        fn initial_loads(
            &mut self,
            panels: &[PanelSpec],
        ) -> Result<BTreeMap<PanelId, PanelLoads>, ProviderError> {
            Ok(panels
                .iter()
                .map(|p| (p.id, PanelLoads::new(-1e5, 0.0, 0.0)))
                .collect())
        }

        fn update(
            &mut self,
            panels: &[PanelSpec],
            _: &[PanelOutcome],
            _: &Material,
            _: &dyn PanelAnalyzer,
        ) -> Result<GlobalResponse, ProviderError> {
            self.0 += 1;
            if self.0 == 2 {
                return Err(ProviderError("solver diverged".into()));
            }
            Ok(GlobalResponse {
                loads: panels
                    .iter()
                    .map(|p| (p.id, PanelLoads::new(-2e5, 0.0, 0.0)))
                    .collect(),
                flags: vec![],
            })
        }
    }

    #[test]
    fn provider_failure_keeps_partial_history() {
        let a = SmearedPlate::default();
        let p = specs();
        let out =
            run_global_local(&inputs(&p, &a), &mut Failing(0), &LoopConfig::default()).unwrap();
        assert_eq!(out.status, LoopStatus::ProviderFailed);
        assert_eq!(out.history.len(), 1);
        assert!(out.message.unwrap().contains("solver diverged"));
    }

    #[test]
    fn assembled_weight_is_order_free() {
        let a = SmearedPlate::default();
        let m = Material::aluminum();
        let p = specs();
        let designs: BTreeMap<PanelId, PanelDesign> = [
            (PanelId(1), PanelDesign::new(0.002, 0.002, 0.02)),
            (PanelId(2), PanelDesign::new(0.003, 0.001, 0.01)),
        ]
        .into();
        let w = assemble_weight(&designs, &p, &m, &a).unwrap();
        let reversed: Vec<PanelSpec> = p.iter().rev().copied().collect();
        assert_eq!(w, assemble_weight(&designs, &reversed, &m, &a).unwrap());
        let hand = 2800.0 * (0.002 * 0.25 + 2.0 * 0.002 * 0.02 * 0.5)
            + 2800.0 * (0.003 * 0.15 + 0.001 * 0.01 * 0.5);
        assert!((w - hand).abs() < 1e-12);
        let mut missing = designs.clone();
        missing.remove(&PanelId(2));
        assert_eq!(
            assemble_weight(&missing, &p, &m, &a),
            Err(GlobalError::MissingDesign(PanelId(2)))
        );
    }
}
