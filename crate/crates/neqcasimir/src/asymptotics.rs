//! Closed-form thin-cylinder limits of the interaction force and their auxiliary functions.

use crate::engine::{frequency_breaks, QuadratureControls};
use crate::kernels::bose_reduced;
use crate::materials::{self, epsilon, DielectricModel, MaterialError};
use crate::quadrature::{integrate, QuadError, Tolerance};
use crate::units::{C_LIGHT, HBAR, K_B};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Ratio below which a length counts as much smaller than another in regime checks.
pub const REGIME_RATIO: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("surface-mode pole: permittivity equals -1")]
    Singular,
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("frequency integral did not converge: {0}")]
    NonConvergence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticRegime {
    /// `R << d << lambda_T`.
    NearField,
    /// `R << lambda_T << d`.
    FarField,
    /// Near field with `lambda_T` also much larger than the material scales.
    NearFieldLowT,
    /// Far field with `lambda_T` also much larger than the material scales.
    FarFieldLowT,
}

impl AsymptoticRegime {
    pub fn is_near(self) -> bool {
        matches!(self, AsymptoticRegime::NearField | AsymptoticRegime::NearFieldLowT)
    }

    /// Preconditions of the regime that are violated by the given geometry.
    ///
    /// `material_lengths` are the skin depths (or, for the low-temperature
    /// forms, the inelastic lengths) of both cylinders.
    pub fn violations(self, r1: f64, r2: f64, d: f64, lambda_t: f64, material_lengths: [f64; 2]) -> Vec<String> {
        let mut out = Vec::new();
        let r = r1.max(r2);
        if r > REGIME_RATIO * d {
            out.push(format!("radius {r:e} m is not small compared to d = {d:e} m"));
        }
        if r > REGIME_RATIO * lambda_t {
            out.push(format!("radius {r:e} m is not small compared to lambda_T = {lambda_t:e} m"));
        }
        if self.is_near() && d > REGIME_RATIO * lambda_t {
            out.push(format!("d = {d:e} m is not small compared to lambda_T = {lambda_t:e} m"));
        }
        if !self.is_near() && d * REGIME_RATIO < lambda_t {
            out.push(format!("d = {d:e} m is not large compared to lambda_T = {lambda_t:e} m"));
        }
        match self {
            AsymptoticRegime::NearField | AsymptoticRegime::FarField => {
                for (j, delta) in material_lengths.iter().enumerate() {
                    if [r1, r2][j] > REGIME_RATIO * delta {
                        out.push(format!("radius of cylinder {} exceeds a fifth of its skin depth {delta:e} m", j + 1));
                    }
                }
            }
            AsymptoticRegime::NearFieldLowT | AsymptoticRegime::FarFieldLowT => {
                for (j, l) in material_lengths.iter().enumerate() {
                    if *l > REGIME_RATIO * lambda_t {
                        out.push(format!(
                            "material length {l:e} m of cylinder {} is not small compared to lambda_T",
                            j + 1
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Force per unit length (N/m) with the regime it was evaluated in and any
/// violated preconditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticForce {
    pub value: f64,
    pub regime: AsymptoticRegime,
    pub warnings: Vec<String>,
}

impl AsymptoticForce {
    fn new(value: f64, regime: AsymptoticRegime, warnings: Vec<String>) -> Self {
        for w in &warnings {
            log::warn!("{regime:?} closed form outside its regime: {w}");
        }
        AsymptoticForce { value, regime, warnings }
    }

    pub fn in_regime(&self) -> bool {
        self.warnings.is_empty()
    }
}

fn pole(eps: Complex64) -> Result<Complex64, AsymptoticError> {
    let z = eps + 1.0;
    if z.norm() <= 1e-14 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(AsymptoticError::Singular);
    }
    Ok(z)
}

fn static_pole(eps0: f64) -> Result<f64, AsymptoticError> {
    if !(eps0 > 0.0) || !eps0.is_finite() {
        return Err(AsymptoticError::Domain(format!("static permittivity must be positive, got {eps0}")));
    }
    Ok(eps0 + 1.0)
}

/// Coefficient of `R1^2 R2^2 / d^6` in the near-field integrand.
pub fn g6(eps1: Complex64, eps2: Complex64) -> Result<f64, AsymptoticError> {
    let p1 = pole(eps1)?;
    let p2 = pole(eps2)?;
    let re1 = eps1.re;
    let a2 = p2.norm_sqr();
    let bracket = (eps1.norm_sqr() - 1.0) * (4.0 * (33.0 + 5.0 * re1) + (7.0 + 3.0 * re1) * a2)
        + (re1 * re1 - 1.0) * (40.0 + 6.0 * a2);
    Ok(45.0 / 2048.0 * p2.inv().im / p1.norm_sqr() * bracket)
}

/// Coefficient of `R1^2 R2^2 omega^2 / (c^2 d^4)` in the near-field integrand.
pub fn g4(eps1: Complex64, eps2: Complex64) -> Result<f64, AsymptoticError> {
    let p1 = pole(eps1)?;
    let p2 = pole(eps2)?;
    let re1 = eps1.re;
    let a2 = p2.norm_sqr();
    let im1 = eps1.im;
    let bracket = im1 * im1 * (a2 * (7.0 - re1) + 12.0 * re1 + 76.0) + (re1 * re1 - 1.0) * (a2 * (5.0 - re1) + 12.0 * re1 + 100.0);
    Ok(3.0 / 256.0 * p2.inv().im / p1.norm_sqr() * bracket)
}

/// Coefficient of `R1^2 R2^2 omega^5 / (c^5 d)` in the far-field integrand.
pub fn g1(eps1: Complex64, eps2: Complex64) -> Result<f64, AsymptoticError> {
    let p1 = pole(eps1)?;
    let p2 = pole(eps2)?;
    let a1 = p1.norm_sqr();
    let a2 = p2.norm_sqr();
    Ok(2.0 / (15.0 * PI) * p1.inv().im * p2.inv().im * (a1 * a2 + a1 + a2 + 36.0))
}

pub fn f6(eps01: f64, eps02: f64) -> Result<f64, AsymptoticError> {
    let p1 = static_pole(eps01)?;
    let p2 = static_pole(eps02)?;
    Ok(15.0 * PI * PI / 4096.0 * (eps01 - 1.0) * (172.0 + (13.0 + 3.0 * eps01) * p2 * p2 + 20.0 * eps01) / (p1 * p2 * p2))
}

pub fn f4(eps01: f64, eps02: f64) -> Result<f64, AsymptoticError> {
    let p1 = static_pole(eps01)?;
    let p2 = static_pole(eps02)?;
    Ok(PI.powi(4) * (eps01 - 1.0) / (1280.0 * p1) * ((12.0 * eps01 + 100.0) / (p2 * p2) - eps01 + 5.0))
}

pub fn f1(eps01: f64, eps02: f64) -> Result<f64, AsymptoticError> {
    let p1 = static_pole(eps01)?;
    let p2 = static_pole(eps02)?;
    let (s1, s2) = (p1 * p1, p2 * p2);
    Ok(16.0 * PI.powi(7) / 225.0 * (s1 + s2 + s1 * s2 + 36.0) / (s1 * s2))
}

/// Near-field integrand per unit `R1^2 R2^2` at angular frequency `omega`, without the occupation factor.
pub fn near_integrand(eps1: Complex64, eps2: Complex64, omega: f64, d: f64) -> Result<f64, AsymptoticError> {
    let k = omega / C_LIGHT;
    Ok(g6(eps1, eps2)? / d.powi(6) + k * k * g4(eps1, eps2)? / d.powi(4))
}

/// Far-field integrand per unit `R1^2 R2^2` at angular frequency `omega`, without the occupation factor.
pub fn far_integrand(eps1: Complex64, eps2: Complex64, omega: f64, d: f64) -> Result<f64, AsymptoticError> {
    let k = omega / C_LIGHT;
    Ok(k.powi(5) * g1(eps1, eps2)? / d)
}

fn check_lengths(r1: f64, r2: f64, d: f64) -> Result<(), AsymptoticError> {
    for (name, v) in [("R1", r1), ("R2", r2), ("d", d)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(AsymptoticError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

fn check_temperature(t: f64) -> Result<(), AsymptoticError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(AsymptoticError::Domain(format!("temperature must be non-negative, got {t}")));
    }
    Ok(())
}

/// `hbar int_0^inf domega n(T, omega) integrand(omega)` with the engine quadrature controls.
pub fn thermal_integral<F>(
    materials: &[&DielectricModel],
    temperature: f64,
    controls: &QuadratureControls,
    mut integrand: F,
) -> Result<f64, AsymptoticError>
where
    F: FnMut(f64) -> Result<f64, AsymptoticError>,
{
    check_temperature(temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let omega_t = K_B * temperature / HBAR;
    let omega_max = controls.x_max * omega_t;
    let breaks = frequency_breaks(materials, &[temperature], omega_max);
    let tol = Tolerance::relative(controls.rel_tol).with_max_panels(controls.max_panels);
    let est = integrate(
        |omega: f64| -> Result<[f64; 1], AsymptoticError> {
            let n = bose_reduced(omega / omega_t);
            if n == 0.0 {
                return Ok([0.0]);
            }
            Ok([HBAR * n * integrand(omega)?])
        },
        &breaks,
        tol,
    )
    .map_err(|e| match e {
        QuadError::Integrand(e) => e,
        other => AsymptoticError::NonConvergence(other.to_string()),
    })?;
    Ok(est.value[0])
}

fn skin_depths(eps1: &DielectricModel, eps2: &DielectricModel, temperature: f64) -> Result<[f64; 2], AsymptoticError> {
    if temperature == 0.0 {
        return Ok([f64::INFINITY; 2]);
    }
    let omega = 3.0 * K_B * temperature / HBAR;
    Ok([materials::skin_depth(eps1, omega)?, materials::skin_depth(eps2, omega)?])
}

fn thermal_wavelength_or_inf(t: f64) -> Result<f64, AsymptoticError> {
    if t == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(materials::thermal_wavelength(t)?)
    }
}

/// Interaction force per unit length on cylinder 1 from sources in cylinder 2
/// at `t2`, thin cylinders at separations small compared to the thermal wavelength.
pub fn interaction_near(
    r1: f64,
    r2: f64,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    d: f64,
    controls: &QuadratureControls,
) -> Result<AsymptoticForce, AsymptoticError> {
    interaction_closed_form(AsymptoticRegime::NearField, r1, r2, eps1, eps2, t2, d, controls)
}

/// As [`interaction_near`] for separations large compared to the thermal wavelength.
pub fn interaction_far(
    r1: f64,
    r2: f64,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    d: f64,
    controls: &QuadratureControls,
) -> Result<AsymptoticForce, AsymptoticError> {
    interaction_closed_form(AsymptoticRegime::FarField, r1, r2, eps1, eps2, t2, d, controls)
}

#[allow(clippy::too_many_arguments)]
fn interaction_closed_form(
    regime: AsymptoticRegime,
    r1: f64,
    r2: f64,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    d: f64,
    controls: &QuadratureControls,
) -> Result<AsymptoticForce, AsymptoticError> {
    check_lengths(r1, r2, d)?;
    check_temperature(t2)?;
    let lambda_t = thermal_wavelength_or_inf(t2)?;
    let warnings = regime.violations(r1, r2, d, lambda_t, skin_depths(eps1, eps2, t2)?);
    let near = regime.is_near();
    let integral = thermal_integral(&[eps1, eps2], t2, controls, |omega| {
        let e1 = epsilon(eps1, omega)?;
        let e2 = epsilon(eps2, omega)?;
        if near {
            near_integrand(e1, e2, omega, d)
        } else {
            far_integrand(e1, e2, omega, d)
        }
    })?;
    Ok(AsymptoticForce::new(r1 * r1 * r2 * r2 * integral, regime, warnings))
}

/// Parameters of the low-frequency expansion `eps0 + i lambda_in omega / c` of one cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowFrequencyMedium {
    pub eps0: f64,
    /// Inelastic collision length in m.
    pub lambda_in: f64,
}

impl LowFrequencyMedium {
    pub fn new(eps0: f64, lambda_in: f64) -> Result<Self, AsymptoticError> {
        if !(eps0 > 0.0) || !eps0.is_finite() || !(lambda_in >= 0.0) || !lambda_in.is_finite() {
            return Err(AsymptoticError::Domain(format!(
                "low-frequency medium needs eps0 > 0 and lambda_in >= 0, got ({eps0}, {lambda_in})"
            )));
        }
        Ok(LowFrequencyMedium { eps0, lambda_in })
    }

    /// Expansion of a dielectric model about zero frequency.
    pub fn from_model(model: &DielectricModel) -> Result<Self, AsymptoticError> {
        let (eps0, lambda_in) = materials::low_frequency_fit(model)?;
        Self::new(eps0, lambda_in)
    }

    pub fn model(&self) -> DielectricModel {
        DielectricModel::LowFreqExpansion { eps0: self.eps0, lambda_in: self.lambda_in }
    }
}

fn low_t_setup(
    regime: AsymptoticRegime,
    r1: f64,
    r2: f64,
    m1: &LowFrequencyMedium,
    m2: &LowFrequencyMedium,
    t2: f64,
    d: f64,
) -> Result<(f64, Vec<String>), AsymptoticError> {
    check_lengths(r1, r2, d)?;
    check_temperature(t2)?;
    let lambda_t = thermal_wavelength_or_inf(t2)?;
    let warnings = regime.violations(r1, r2, d, lambda_t, [m1.lambda_in, m2.lambda_in]);
    Ok((lambda_t, warnings))
}

/// Near-field interaction force for media described by their low-frequency expansion.
pub fn interaction_near_low_t(
    r1: f64,
    r2: f64,
    m1: &LowFrequencyMedium,
    m2: &LowFrequencyMedium,
    t2: f64,
    d: f64,
) -> Result<AsymptoticForce, AsymptoticError> {
    let regime = AsymptoticRegime::NearFieldLowT;
    let (lt, warnings) = low_t_setup(regime, r1, r2, m1, m2, t2, d)?;
    if t2 == 0.0 {
        return Ok(AsymptoticForce::new(0.0, regime, warnings));
    }
    let pref = HBAR * C_LIGHT * m2.lambda_in * r1 * r1 * r2 * r2;
    let value = -pref * f6(m1.eps0, m2.eps0)? / (lt * lt * d.powi(6)) - pref * f4(m1.eps0, m2.eps0)? / (lt.powi(4) * d.powi(4));
    Ok(AsymptoticForce::new(value, regime, warnings))
}

/// Far-field interaction force for media described by their low-frequency expansion.
pub fn interaction_far_low_t(
    r1: f64,
    r2: f64,
    m1: &LowFrequencyMedium,
    m2: &LowFrequencyMedium,
    t2: f64,
    d: f64,
) -> Result<AsymptoticForce, AsymptoticError> {
    let regime = AsymptoticRegime::FarFieldLowT;
    let (lt, warnings) = low_t_setup(regime, r1, r2, m1, m2, t2, d)?;
    if t2 == 0.0 {
        return Ok(AsymptoticForce::new(0.0, regime, warnings));
    }
    let value = HBAR * C_LIGHT * m1.lambda_in * m2.lambda_in * r1 * r1 * r2 * r2 * f1(m1.eps0, m2.eps0)? / (lt.powi(8) * d);
    Ok(AsymptoticForce::new(value, regime, warnings))
}
