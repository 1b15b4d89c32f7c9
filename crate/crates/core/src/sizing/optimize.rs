//! Bounded direct search for the lightest feasible design.
//!
//! Skin thickness is solved for by bisection: for a fixed blade, a thicker
//! skin is both stiffer and less stressed, so the smallest feasible `t` is
//! the lightest. The blade dimensions are then searched by a pattern search
//! (axis and diagonal moves, shrinking step) from several starts: the
//! stiffest blade, the best cells of a coarse scan of the blade plane, and
//! seeded random points. The winner is polished by a plain three-variable
//! pattern search (which also covers analyzers for which the monotonicity
//! in `t` does not hold).
//!
//! Points are ranked feasibility-first: any feasible point beats any
//! infeasible one, feasible points by weight, infeasible ones by their
//! largest relative violation.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    AnalysisResult, DesignBounds, Material, PanelAnalyzer, PanelDesign, PanelGeometry, PanelLoads,
    SizingError,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub starts: usize,
    /// Points per side of the coarse blade scan; 0 or 1 disables it.
    pub scan: usize,
    pub seed: u64,
    /// Initial pattern step, as a fraction of each variable's range.
    pub initial_step: f64,
    pub min_step: f64,
    /// Bisection stops when the bracket is below this fraction of `t_max`.
    pub thickness_tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            starts: 8,
            scan: 9,
            seed: 0,
            initial_step: 0.25,
            min_step: 1e-7,
            thickness_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub design: PanelDesign,
    pub result: AnalysisResult,
    pub feasible: bool,
    /// Largest relative constraint violation of the returned point.
    pub violation: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    design: PanelDesign,
    /// Normalized coordinates in [0, 1]^3.
    u: [f64; 3],
    result: AnalysisResult,
    violation: f64,
}

impl Point {
    fn feasible(&self) -> bool {
        self.violation == 0.0
    }

    /// Strict preference. Exact ties fall back to the smaller normalized
    /// coordinates so that flat directions drift to the lower bounds.
    fn better_than(&self, other: &Point) -> bool {
        let rank = |p: &Point| {
            (
                !p.feasible(),
                if p.feasible() {
                    p.result.weight
                } else {
                    p.violation
                },
            )
        };
        let (a, b) = (rank(self), rank(other));
        match a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                let s = |p: &Point| p.u.iter().sum::<f64>();
                s(self) < s(other)
            }
        }
    }
}

const BLADE_MOVES: [[f64; 2]; 8] = [
    [-1.0, 0.0],
    [1.0, 0.0],
    [0.0, -1.0],
    [0.0, 1.0],
    [-1.0, -1.0],
    [-1.0, 1.0],
    [1.0, -1.0],
    [1.0, 1.0],
];

struct Problem<'a> {
    material: &'a Material,
    loads: &'a PanelLoads,
    geom: &'a PanelGeometry,
    bounds: [[f64; 2]; 3],
    analyzer: &'a dyn PanelAnalyzer,
    evaluations: usize,
}

impl Problem<'_> {
    fn value(&self, k: usize, u: f64) -> f64 {
        let [lo, hi] = self.bounds[k];
        if u <= 0.0 {
            lo
        } else if u >= 1.0 {
            hi
        } else {
            lo + u * (hi - lo)
        }
    }

    fn evaluate(&mut self, u: [f64; 3]) -> Result<Point, SizingError> {
        let u = u.map(|x| x.clamp(0.0, 1.0));
        let design = PanelDesign::from_array([0, 1, 2].map(|k| self.value(k, u[k])));
        self.evaluations += 1;
        let result = self
            .analyzer
            .analyze(&design, self.material, self.loads, self.geom)?;
        let violation = if result.is_feasible(self.material) {
            0.0
        } else {
            result.violation(self.material).max(f64::MIN_POSITIVE)
        };
        Ok(Point {
            design,
            u,
            result,
            violation,
        })
    }

    /// Smallest feasible skin thickness for the given blade.
    fn thinnest_skin(&mut self, blade: [f64; 2], tol: f64) -> Result<Point, SizingError> {
        let low = self.evaluate([0.0, blade[0], blade[1]])?;
        if low.feasible() {
            return Ok(low);
        }
        let high = self.evaluate([1.0, blade[0], blade[1]])?;
        if !high.feasible() {
            return Ok(high);
        }
        let (mut lo, mut hi, mut best) = (0.0, 1.0, high);
        let [t_lo, t_hi] = self.bounds[0];
        while (hi - lo) * (t_hi - t_lo) > tol * t_hi {
            let mid = 0.5 * (lo + hi);
            let p = self.evaluate([mid, blade[0], blade[1]])?;
            if p.feasible() {
                hi = mid;
                best = p;
            } else {
                lo = mid;
            }
        }
        Ok(best)
    }

    fn blade_search(
        &mut self,
        start: [f64; 2],
        settings: &OptimizerSettings,
    ) -> Result<Point, SizingError> {
        let tol = settings.thickness_tolerance;
        let mut best = self.thinnest_skin(start, tol)?;
        let mut step = settings.initial_step;
        while step >= settings.min_step {
            let here = [best.u[1], best.u[2]];
            let mut moved = false;
            for dir in BLADE_MOVES {
                let trial = [0, 1].map(|k| (here[k] + dir[k] * step).clamp(0.0, 1.0));
                if trial == here {
                    continue;
                }
                let p = self.thinnest_skin(trial, tol)?;
                if p.better_than(&best) {
                    best = p;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        Ok(best)
    }

    fn polish(
        &mut self,
        mut best: Point,
        settings: &OptimizerSettings,
    ) -> Result<Point, SizingError> {
        let mut step = settings.initial_step / 64.0;
        while step >= settings.min_step {
            let mut moved = false;
            for k in 0..3 {
                for sign in [-1.0, 1.0] {
                    let mut u = best.u;
                    u[k] = (u[k] + sign * step).clamp(0.0, 1.0);
                    if u == best.u {
                        continue;
                    }
                    let p = self.evaluate(u)?;
                    if p.better_than(&best) {
                        best = p;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        Ok(best)
    }
}

/// Minimizes panel weight subject to the buckling and stress constraints.
///
/// When no point in the bounds is feasible the most nearly feasible point
/// found is returned with `feasible == false`. Deterministic for a given
/// `settings.seed`.
pub fn optimize_panel(
    geom: &PanelGeometry,
    material: &Material,
    loads: &PanelLoads,
    bounds: &DesignBounds,
    analyzer: &dyn PanelAnalyzer,
    settings: &OptimizerSettings,
) -> Result<Optimum, SizingError> {
    bounds.validate()?;
    material.validate()?;
    loads.check()?;
    geom.check()?;
    let mut problem = Problem {
        material,
        loads,
        geom,
        bounds: bounds.ranges(),
        analyzer,
        evaluations: 0,
    };
    let starts = settings.starts.max(1);
    // the stiffest blade is feasible whenever anything is
    let mut seeds = vec![[1.0, 1.0]];
    if settings.scan > 1 {
        let n = settings.scan;
        let mut cells = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let u = [i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64];
                cells.push(problem.thinnest_skin(u, settings.thickness_tolerance)?);
            }
        }
        cells.sort_by(|a, b| match (a.better_than(b), b.better_than(a)) {
            (true, _) => Ordering::Less,
            (_, true) => Ordering::Greater,
            _ => Ordering::Equal,
        });
        seeds.extend(cells.iter().take(starts / 2).map(|p| [p.u[1], p.u[2]]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    while seeds.len() < starts {
        seeds.push([rng.gen::<f64>(), rng.gen::<f64>()]);
    }
    let mut best: Option<Point> = None;
    for start in seeds {
        let p = problem.blade_search(start, settings)?;
        if best.as_ref().is_none_or(|b| p.better_than(b)) {
            best = Some(p);
        }
    }
    let best = problem.polish(best.expect("at least one start"), settings)?;
    Ok(Optimum {
        design: best.design,
        result: best.result,
        feasible: best.feasible(),
        violation: best.violation,
        evaluations: problem.evaluations,
    })
}
