//! Smeared-stiffener Kirchhoff plate, simply supported on four edges.
//!
//! Blade stiffeners run along x and are smeared into the x bending
//! stiffness. Each blade's inertia is taken about the skin mid-plane.
//! Buckling under biaxial compression uses the double sine series; shear
//! uses the long-plate coefficient `5.35 + 4 (short/long)^2`; the two are
//! combined by `lambda/lambda_c + (lambda/lambda_s)^2 = 1`. Stresses are
//! membrane resultants over the effective thickness.

use std::f64::consts::PI;

use super::{
    AnalysisResult, Buckling, Material, PanelAnalyzer, PanelDesign, PanelGeometry, PanelLoads,
    Sensitivities, SizingError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearedPlate {
    /// Half-wave numbers tried in each direction.
    pub max_half_waves: u32,
}

impl Default for SmearedPlate {
    fn default() -> Self {
        SmearedPlate { max_half_waves: 20 }
    }
}

/// Bending stiffnesses and their derivatives w.r.t. (t, t_stiff, h_stiff).
struct Stiffness {
    d11: f64,
    d22: f64,
    h: f64,
    dd11: [f64; 3],
    dd22: [f64; 3],
    dh: [f64; 3],
}

fn stiffness(d: &PanelDesign, m: &Material, g: &PanelGeometry) -> Stiffness {
    let (t, ts, hs) = (d.t, d.t_stiff, d.h_stiff);
    let plate = m.plate_stiffness(t);
    let dplate = [3.0 * plate / t, 0.0, 0.0];
    let inertia = ts * hs.powi(3) / 12.0 + ts * hs * (hs + t).powi(2) / 4.0;
    let dinertia = [
        ts * hs * (hs + t) / 2.0,
        hs.powi(3) / 12.0 + hs * (hs + t).powi(2) / 4.0,
        ts * hs * hs / 4.0 + ts * (hs + t).powi(2) / 4.0 + ts * hs * (hs + t) / 2.0,
    ];
    let smear = m.e * f64::from(g.n_stiff) / g.b;
    Stiffness {
        d11: plate + smear * inertia,
        d22: plate,
        h: plate,
        dd11: [0, 1, 2].map(|k| dplate[k] + smear * dinertia[k]),
        dd22: dplate,
        dh: dplate,
    }
}

struct Compression {
    lambda: f64,
    /// Squared wave numbers of the critical mode.
    alpha2: f64,
    beta2: f64,
    denominator: f64,
}

impl SmearedPlate {
    fn compression(&self, s: &Stiffness, l: &PanelLoads, g: &PanelGeometry) -> Option<Compression> {
        let mut best: Option<Compression> = None;
        for m in 1..=self.max_half_waves {
            let alpha2 = (f64::from(m) * PI / g.a).powi(2);
            for n in 1..=self.max_half_waves {
                let beta2 = (f64::from(n) * PI / g.b).powi(2);
                let denominator = -l.nx * alpha2 - l.ny * beta2;
                if denominator <= 0.0 {
                    continue;
                }
                let numerator =
                    s.d11 * alpha2 * alpha2 + 2.0 * s.h * alpha2 * beta2 + s.d22 * beta2 * beta2;
                let lambda = numerator / denominator;
                if best.as_ref().is_none_or(|b| lambda < b.lambda) {
                    best = Some(Compression {
                        lambda,
                        alpha2,
                        beta2,
                        denominator,
                    });
                }
            }
        }
        best
    }

    fn shear(&self, s: &Stiffness, l: &PanelLoads, g: &PanelGeometry) -> Option<(f64, [f64; 3])> {
        if l.nxy == 0.0 {
            return None;
        }
        let short = g.a.min(g.b);
        let long = g.a.max(g.b);
        let k = 5.35 + 4.0 * (short / long).powi(2);
        let n_cr = k * PI * PI * (s.d11 * s.d22.powi(3)).powf(0.25) / (short * short);
        let lambda = n_cr / l.nxy.abs();
        let dlambda =
            [0, 1, 2].map(|i| lambda / 4.0 * (s.dd11[i] / s.d11 + 3.0 * s.dd22[i] / s.d22));
        Some((lambda, dlambda))
    }

    /// Buckling factor and, when critical, its gradient.
    fn buckling(
        &self,
        d: &PanelDesign,
        m: &Material,
        l: &PanelLoads,
        g: &PanelGeometry,
    ) -> (Buckling, Option<[f64; 3]>) {
        let s = stiffness(d, m, g);
        let comp = self.compression(&s, l, g).map(|c| {
            let dl = [0, 1, 2].map(|i| {
                (s.dd11[i] * c.alpha2 * c.alpha2
                    + 2.0 * s.dh[i] * c.alpha2 * c.beta2
                    + s.dd22[i] * c.beta2 * c.beta2)
                    / c.denominator
            });
            (c.lambda, dl)
        });
        let shear = self.shear(&s, l, g);
        match (comp, shear) {
            (None, None) => (Buckling::NonCritical, None),
            (Some((lc, dlc)), None) => (Buckling::Critical(lc), Some(dlc)),
            (None, Some((ls, dls))) => (Buckling::Critical(ls), Some(dls)),
            (Some((lc, dlc)), Some((ls, dls))) => {
                // root of lambda/lc + lambda^2/ls^2 - 1 = 0
                let a = 1.0 / (ls * ls);
                let b = 1.0 / lc;
                let lambda = 2.0 / (b + (b * b + 4.0 * a).sqrt());
                let f_lambda = 1.0 / lc + 2.0 * lambda / (ls * ls);
                let f_lc = -lambda / (lc * lc);
                let f_ls = -2.0 * lambda * lambda / ls.powi(3);
                let dl = [0, 1, 2].map(|i| -(f_lc * dlc[i] + f_ls * dls[i]) / f_lambda);
                (Buckling::Critical(lambda), Some(dl))
            }
        }
    }

    fn validate(
        d: &PanelDesign,
        m: &Material,
        l: &PanelLoads,
        g: &PanelGeometry,
    ) -> Result<(), SizingError> {
        d.check_positive()?;
        m.validate()?;
        l.check()?;
        g.check()
    }
}

fn effective_thickness(d: &PanelDesign, g: &PanelGeometry) -> (f64, [f64; 3]) {
    let n = f64::from(g.n_stiff);
    (
        d.t + n * d.t_stiff * d.h_stiff / g.b,
        [1.0, n * d.h_stiff / g.b, n * d.t_stiff / g.b],
    )
}

fn resultant_intensity(l: &PanelLoads) -> f64 {
    (l.nx * l.nx - l.nx * l.ny + l.ny * l.ny + 3.0 * l.nxy * l.nxy).sqrt()
}

impl PanelAnalyzer for SmearedPlate {
    fn analyze(
        &self,
        d: &PanelDesign,
        m: &Material,
        l: &PanelLoads,
        g: &PanelGeometry,
    ) -> Result<AnalysisResult, SizingError> {
        Self::validate(d, m, l, g)?;
        let n = f64::from(g.n_stiff);
        let (t_eff, _) = effective_thickness(d, g);
        Ok(AnalysisResult {
            sigma_vm_max: resultant_intensity(l) / t_eff,
            lambda_p: self.buckling(d, m, l, g).0,
            weight: m.rho * (d.t * g.area + n * d.t_stiff * d.h_stiff * g.stiffener_length),
        })
    }

    fn sensitivities(
        &self,
        d: &PanelDesign,
        m: &Material,
        l: &PanelLoads,
        g: &PanelGeometry,
    ) -> Result<Option<Sensitivities>, SizingError> {
        Self::validate(d, m, l, g)?;
        let n = f64::from(g.n_stiff);
        let (t_eff, dt_eff) = effective_thickness(d, g);
        let s = resultant_intensity(l);
        let length = g.stiffener_length;
        Ok(Some(Sensitivities {
            weight: [
                m.rho * g.area,
                m.rho * n * d.h_stiff * length,
                m.rho * n * d.t_stiff * length,
            ],
            sigma_vm_max: dt_eff.map(|dt| -s / (t_eff * t_eff) * dt),
            lambda_p: self.buckling(d, m, l, g).1,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PanelGeometry {
        PanelGeometry::rectangular(0.5, 0.5, 0)
    }

    #[test]
    fn unloaded_panel() {
        let m = Material::aluminum();
        let d = PanelDesign::new(0.002, 0.002, 0.02);
        let g = PanelGeometry::rectangular(0.5, 0.5, 2);
        let r = SmearedPlate::default()
            .analyze(&d, &m, &PanelLoads::default(), &g)
            .unwrap();
        assert_eq!(r.sigma_vm_max, 0.0);
        assert_eq!(r.lambda_p, Buckling::NonCritical);
        assert_eq!(r.weight, 2800.0 * (0.002 * 0.25 + 2.0 * 0.002 * 0.02 * 0.5));
    }

    #[test]
    fn tension_only_is_not_critical() {
        let m = Material::aluminum();
        let d = PanelDesign::new(0.002, 0.002, 0.02);
        let r = SmearedPlate::default()
            .analyze(&d, &m, &PanelLoads::new(1e5, 2e4, 0.0), &square())
            .unwrap();
        assert_eq!(r.lambda_p, Buckling::NonCritical);
    }

    #[test]
    fn pure_shear_stress() {
        let m = Material::aluminum();
        let d = PanelDesign::new(0.004, 0.002, 0.02);
        let g = PanelGeometry::rectangular(0.5, 0.5, 1);
        let r = SmearedPlate::default()
            .analyze(&d, &m, &PanelLoads::new(0.0, 0.0, 1.2e5), &g)
            .unwrap();
        let t_eff = 0.004 + 0.002 * 0.02 / 0.5;
        let expected = 3f64.sqrt() * 1.2e5 / t_eff;
        assert!((r.sigma_vm_max - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = Material::aluminum();
        let a = SmearedPlate::default();
        let l = PanelLoads::new(-1.0, 0.0, 0.0);
        assert!(a
            .analyze(&PanelDesign::new(0.0, 1.0, 1.0), &m, &l, &square())
            .is_err());
        assert_eq!(
            a.analyze(
                &PanelDesign::new(1.0, 1.0, 1.0),
                &m,
                &l,
                &PanelGeometry::rectangular(0.0, 1.0, 0)
            ),
            Err(SizingError::ZeroArea)
        );
    }

    #[test]
    fn load_scaling_halves_lambda() {
        let m = Material::aluminum();
        let d = PanelDesign::new(0.003, 0.002, 0.02);
        let g = PanelGeometry::rectangular(0.6, 0.4, 2);
        let l = PanelLoads::new(-8e4, -1e4, 3e4);
        let a = SmearedPlate::default();
        let one = a.analyze(&d, &m, &l, &g).unwrap().lambda_p.value().unwrap();
        let two = a
            .analyze(&d, &m, &l.scaled(2.0), &g)
            .unwrap()
            .lambda_p
            .value()
            .unwrap();
        assert!((one / two - 2.0).abs() < 1e-12);
    }
}
