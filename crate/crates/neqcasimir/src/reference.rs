//! Closed-form equilibrium force curves for use where tabulated equilibrium
//! data are unavailable. They are pairwise-summation and perfect-conductor
//! estimates, not full scattering calculations.

use crate::engine::{EngineError, EquilibriumTable};
use crate::materials::{low_frequency_fit, thermal_wavelength, DielectricModel, MaterialError};
use crate::units::{C_LIGHT, HBAR, K_B};
use std::f64::consts::PI;

/// Orientation-averaged contrast of a thin cylinder: one axial direction with
/// `eps - 1` and two transverse directions with `2 (eps - 1) / (eps + 1)`.
pub fn cylinder_contrast(eps: f64) -> f64 {
    ((eps - 1.0) + 4.0 * (eps - 1.0) / (eps + 1.0)) / 3.0
}

/// Retarded zero-temperature force per unit length between thin dielectric
/// cylinders from line-summed Casimir-Polder pairs (N/m, negative = attraction).
pub fn retarded_pairwise(r1: f64, r2: f64, contrast1: f64, contrast2: f64, d: f64) -> f64 {
    -23.0 / (10.0 * PI) * HBAR * C_LIGHT * contrast1 * contrast2 * (r1 * r1 * r2 * r2) / d.powi(7)
}

/// Classical (zero-frequency) thermal force per unit length between thin
/// dielectric cylinders from line-summed pairs.
pub fn classical_pairwise(r1: f64, r2: f64, contrast1: f64, contrast2: f64, temperature: f64, d: f64) -> f64 {
    -45.0 * PI / 128.0 * K_B * temperature * contrast1 * contrast2 * (r1 * r1 * r2 * r2) / d.powi(6)
}

/// Equilibrium estimate for two thin polar-dielectric cylinders: the retarded
/// term with the optical permittivity plus the classical term with the static one.
pub fn dielectric_equilibrium(
    r1: f64,
    r2: f64,
    model: &DielectricModel,
    temperature: f64,
    d: f64,
) -> Result<f64, MaterialError> {
    let (eps_static, _) = low_frequency_fit(model)?;
    let eps_optical = match model {
        DielectricModel::Lorentz { eps_inf, .. } => *eps_inf,
        _ => eps_static,
    };
    let opt = cylinder_contrast(eps_optical);
    let stat = cylinder_contrast(eps_static);
    Ok(retarded_pairwise(r1, r2, opt, opt, d) + classical_pairwise(r1, r2, stat, stat, temperature, d))
}

/// Classical TM (zero-frequency, `n = 0`) force per unit length between two
/// thin perfectly conducting wires of radius `r`.
pub fn conductor_classical(r: f64, temperature: f64, d: f64) -> f64 {
    let l = (d / r).ln();
    -K_B * temperature * PI / (8.0 * d * d * l * l) * (1.0 + 2.0 / l)
}

/// Thin-metal-wire equilibrium estimate `-C / (d^4 ln(d / r))`, with `C`
/// fixed so that it equals [`conductor_classical`] at `d = lambda_T / 2`.
pub fn conductor_equilibrium(r: f64, temperature: f64, d: f64) -> Result<f64, MaterialError> {
    let d_fit = 0.5 * thermal_wavelength(temperature)?;
    if d_fit <= r || d <= r {
        return Err(MaterialError::Parameters(format!(
            "separation must exceed the radius (d = {d:e} m, fit point {d_fit:e} m, R = {r:e} m)"
        )));
    }
    let c = -conductor_classical(r, temperature, d_fit) * d_fit.powi(4) * (d_fit / r).ln();
    Ok(-c / (d.powi(4) * (d / r).ln()))
}

/// `points` logarithmically spaced values from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => stop,
            i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

/// Tabulates `force` over `grid`.
pub fn tabulate<F>(grid: &[f64], force: F) -> Result<EquilibriumTable, EngineError>
where
    F: Fn(f64) -> Result<f64, MaterialError>,
{
    let values = grid.iter().map(|&d| force(d)).collect::<Result<Vec<_>, _>>()?;
    EquilibriumTable::new(grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn contrast_vanishes_for_vacuum_and_grows_with_eps() {
        assert_eq!(cylinder_contrast(1.0), 0.0);
        assert!(cylinder_contrast(10.0) > cylinder_contrast(6.7));
        assert_relative_eq!(cylinder_contrast(1.0 + 1e-6), 1e-6, max_relative = 1e-5);
    }

    #[test]
    fn dielectric_estimate_is_attractive_with_expected_powers() {
        let m = DielectricModel::sic();
        let (r, d) = (1e-7, 1e-6);
        let f0 = dielectric_equilibrium(r, r, &m, 0.0, d).unwrap();
        let f0_2 = dielectric_equilibrium(r, r, &m, 0.0, 2.0 * d).unwrap();
        assert!(f0 < 0.0);
        assert_relative_eq!(f0 / f0_2, 128.0, max_relative = 1e-12);
        let thermal = dielectric_equilibrium(r, r, &m, 300.0, d).unwrap() - f0;
        let thermal_2 = dielectric_equilibrium(r, r, &m, 300.0, 2.0 * d).unwrap() - f0_2;
        assert!(thermal < 0.0);
        assert_relative_eq!(thermal / thermal_2, 64.0, max_relative = 1e-9);
    }

    #[test]
    fn conductor_estimate_matches_classical_at_fit_point() {
        let (r, t) = (2e-8, 2400.0);
        let d = 0.5 * thermal_wavelength(t).unwrap();
        assert_relative_eq!(conductor_equilibrium(r, t, d).unwrap(), conductor_classical(r, t, d), max_relative = 1e-12);
        assert!(conductor_equilibrium(r, t, 4e-6).unwrap() < 0.0);
        assert!(conductor_equilibrium(r, t, r).is_err());
    }

    #[test]
    fn log_grid_hits_endpoints_and_is_increasing() {
        let g = log_grid(1e-7, 1e-5, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 1e-7);
        assert_eq!(g[20], 1e-5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(g[10], 1e-6, max_relative = 1e-12);
    }
}
