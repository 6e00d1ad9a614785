//! Dielectric response models, material files and cylinder descriptions.

use crate::units::{self, C_LIGHT, EPSILON_0, HBAR, K_B};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("temperature must be positive and finite, got {0}")]
    Temperature(f64),
    #[error("invalid model parameters: {0}")]
    Parameters(String),
    #[error("material file {path}: {message}")]
    File { path: String, message: String },
    #[error("model has no low-frequency expansion of the form eps0 + i lambda_in omega / c: {0}")]
    NotExpandable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductivityTerm {
    /// Conductivity in 1/(ohm m).
    pub sigma: f64,
    /// Relaxation wavelength in m.
    pub lambda_r: f64,
}

/// Complex permittivity model. Frequencies are in rad/s, lengths in m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DielectricModel {
    Vacuum,
    Constant { eps: Complex64 },
    Lorentz { eps_inf: f64, omega_lo: f64, omega_to: f64, gamma: f64 },
    ConductivitySum { terms: Vec<ConductivityTerm> },
    LowFreqExpansion { eps0: f64, lambda_in: f64 },
}

impl DielectricModel {
    /// SiC phonon-polariton parameters.
    pub fn sic() -> Self {
        DielectricModel::Lorentz {
            eps_inf: 6.7,
            omega_lo: units::ev_to_rad_per_s(0.12),
            omega_to: units::ev_to_rad_per_s(0.098),
            gamma: units::ev_to_rad_per_s(5.88e-4),
        }
    }

    /// Two-term conductivity fit for tungsten at 2400 K.
    pub fn tungsten_2400k() -> Self {
        DielectricModel::ConductivitySum {
            terms: vec![
                ConductivityTerm { sigma: 1.19e6, lambda_r: 3.66e-6 },
                ConductivityTerm { sigma: 0.25e6, lambda_r: 0.36e-6 },
            ],
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let bad = |m: &str| Err(MaterialError::Parameters(m.to_string()));
        match self {
            DielectricModel::Vacuum => Ok(()),
            DielectricModel::Constant { eps } => {
                if !(eps.re.is_finite() && eps.im.is_finite()) || eps.im < 0.0 {
                    return bad("constant eps must be finite with Im eps >= 0");
                }
                Ok(())
            }
            DielectricModel::Lorentz { eps_inf, omega_lo, omega_to, gamma } => {
                if !(*omega_lo > *omega_to && *omega_to > 0.0) {
                    return bad("Lorentz requires omega_lo > omega_to > 0");
                }
                if !(*gamma > 0.0) || !(*eps_inf > 0.0) {
                    return bad("Lorentz requires gamma > 0 and eps_inf > 0");
                }
                Ok(())
            }
            DielectricModel::ConductivitySum { terms } => {
                if terms.is_empty() {
                    return bad("conductivity sum needs at least one term");
                }
                if terms.iter().any(|t| !(t.sigma > 0.0) || !(t.lambda_r > 0.0)) {
                    return bad("conductivity terms require sigma > 0 and lambda_r > 0");
                }
                Ok(())
            }
            DielectricModel::LowFreqExpansion { eps0, lambda_in } => {
                if !(*eps0 >= 1.0) || !(*lambda_in >= 0.0) {
                    return bad("low-frequency expansion requires eps0 >= 1 and lambda_in >= 0");
                }
                Ok(())
            }
        }
    }

    /// Frequencies (rad/s) where the response varies sharply, used as quadrature breakpoints.
    pub fn features(&self) -> Vec<(f64, f64)> {
        match self {
            DielectricModel::Lorentz { eps_inf, omega_lo, omega_to, gamma } => {
                let surface = ((eps_inf * omega_lo * omega_lo + omega_to * omega_to) / (eps_inf + 1.0)).sqrt();
                vec![(*omega_to, *gamma), (surface, *gamma), (*omega_lo, *gamma)]
            }
            _ => Vec::new(),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        match self {
            DielectricModel::Vacuum => true,
            DielectricModel::Constant { eps } => *eps == Complex64::new(1.0, 0.0),
            DielectricModel::LowFreqExpansion { eps0, lambda_in } => *eps0 == 1.0 && *lambda_in == 0.0,
            _ => false,
        }
    }
}

/// Complex permittivity at angular frequency `omega` (rad/s).
pub fn epsilon(model: &DielectricModel, omega: f64) -> Result<Complex64, MaterialError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(MaterialError::Frequency(omega));
    }
    Ok(match model {
        DielectricModel::Vacuum => Complex64::new(1.0, 0.0),
        DielectricModel::Constant { eps } => *eps,
        DielectricModel::Lorentz { eps_inf, omega_lo, omega_to, gamma } => {
            let w2 = omega * omega;
            let num = Complex64::new(w2 - omega_lo * omega_lo, omega * gamma);
            let den = Complex64::new(w2 - omega_to * omega_to, omega * gamma);
            *eps_inf * num / den
        }
        DielectricModel::ConductivitySum { terms } => {
            let lambda = units::rad_per_s_to_wavelength(omega);
            let pref = lambda * lambda / (2.0 * PI * C_LIGHT * EPSILON_0);
            let sum: Complex64 = terms
                .iter()
                .map(|t| t.sigma / Complex64::new(t.lambda_r, lambda))
                .sum();
            Complex64::new(1.0, 0.0) - pref * sum
        }
        DielectricModel::LowFreqExpansion { eps0, lambda_in } => Complex64::new(*eps0, lambda_in * omega / C_LIGHT),
    })
}

/// `hbar c / (k_B T)`.
pub fn thermal_wavelength(temperature: f64) -> Result<f64, MaterialError> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(MaterialError::Temperature(temperature));
    }
    Ok(HBAR * C_LIGHT / (K_B * temperature))
}

/// `c / (Im sqrt(eps) omega)`; infinite for lossless media.
pub fn skin_depth(model: &DielectricModel, omega: f64) -> Result<f64, MaterialError> {
    let eps = epsilon(model, omega)?;
    let im = eps.sqrt().im.abs();
    if im == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(C_LIGHT / (im * omega))
}

/// Static permittivity and inelastic length of the expansion `eps0 + i lambda_in omega / c`.
pub fn low_frequency_fit(model: &DielectricModel) -> Result<(f64, f64), MaterialError> {
    match model {
        DielectricModel::Vacuum => Ok((1.0, 0.0)),
        DielectricModel::Constant { eps } if eps.im == 0.0 => Ok((eps.re, 0.0)),
        DielectricModel::LowFreqExpansion { eps0, lambda_in } => Ok((*eps0, *lambda_in)),
        DielectricModel::Lorentz { eps_inf, omega_lo, omega_to, gamma } => {
            let l = omega_lo * omega_lo;
            let t = omega_to * omega_to;
            let eps0 = eps_inf * l / t;
            let c1 = eps_inf * gamma * (l - t) / (t * t);
            Ok((eps0, c1 * C_LIGHT))
        }
        other => Err(MaterialError::NotExpandable(format!("{other:?}"))),
    }
}

/// One cylinder: radius (m), dielectric model, temperature (K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub radius: f64,
    pub material: DielectricModel,
    pub temperature: f64,
}

impl CylinderSpec {
    pub fn new(radius: f64, material: DielectricModel, temperature: f64) -> Result<Self, MaterialError> {
        let spec = CylinderSpec { radius, material, temperature };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(MaterialError::Parameters(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(MaterialError::Parameters(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        self.material.validate()
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        CylinderSpec { temperature, ..self.clone() }
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        CylinderSpec { radius, ..self.clone() }
    }
}

/// On-disk material description `{name, model, parameters, units}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialFile {
    pub name: String,
    pub model: String,
    #[serde(default)]
    pub parameters: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub units: BTreeMap<String, String>,
}

impl MaterialFile {
    pub fn load(path: &Path) -> Result<Self, MaterialError> {
        let text = std::fs::read_to_string(path).map_err(|e| MaterialError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| MaterialError::File {
            path: path.display().to_string(),
            message: format!("line {}, column {}: {}", e.line(), e.column(), e),
        })
    }

    fn number(&self, key: &str) -> Result<f64, MaterialError> {
        self.parameters
            .get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| MaterialError::Parameters(format!("{}: missing numeric parameter `{key}`", self.name)))
    }

    fn unit(&self, key: &str) -> Result<&str, MaterialError> {
        self.units
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| MaterialError::Parameters(format!("{}: parameter `{key}` needs a unit", self.name)))
    }

    fn frequency(&self, key: &str) -> Result<f64, MaterialError> {
        let unit = self.unit(key)?;
        units::frequency_to_rad_per_s(self.number(key)?, unit)
            .ok_or_else(|| MaterialError::Parameters(format!("{}: unknown frequency unit `{unit}` for `{key}`", self.name)))
    }

    fn length(&self, key: &str, value: f64) -> Result<f64, MaterialError> {
        let unit = self.unit(key)?;
        units::length_factor(unit)
            .map(|f| f * value)
            .ok_or_else(|| MaterialError::Parameters(format!("{}: unknown length unit `{unit}` for `{key}`", self.name)))
    }

    pub fn to_model(&self) -> Result<DielectricModel, MaterialError> {
        let model = match self.model.as_str() {
            "vacuum" => DielectricModel::Vacuum,
            "constant" => DielectricModel::Constant {
                eps: Complex64::new(self.number("eps_re")?, self.number("eps_im").unwrap_or(0.0)),
            },
            "lorentz" => DielectricModel::Lorentz {
                eps_inf: self.number("eps_inf")?,
                omega_lo: self.frequency("omega_lo")?,
                omega_to: self.frequency("omega_to")?,
                gamma: self.frequency("gamma")?,
            },
            "conductivity_sum" => {
                let raw = self
                    .parameters
                    .get("terms")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| MaterialError::Parameters(format!("{}: missing array `terms`", self.name)))?;
                let sigma_unit = self.unit("sigma")?;
                let sigma_factor = units::conductivity_factor(sigma_unit).ok_or_else(|| {
                    MaterialError::Parameters(format!("{}: unknown conductivity unit `{sigma_unit}`", self.name))
                })?;
                let mut terms = Vec::with_capacity(raw.len());
                for (i, t) in raw.iter().enumerate() {
                    let field = |k: &str| {
                        t.get(k).and_then(|v| v.as_f64()).ok_or_else(|| {
                            MaterialError::Parameters(format!("{}: terms[{i}] missing `{k}`", self.name))
                        })
                    };
                    terms.push(ConductivityTerm {
                        sigma: field("sigma")? * sigma_factor,
                        lambda_r: self.length("lambda_r", field("lambda_r")?)?,
                    });
                }
                DielectricModel::ConductivitySum { terms }
            }
            "low_freq_expansion" => DielectricModel::LowFreqExpansion {
                eps0: self.number("eps0")?,
                lambda_in: self.length("lambda_in", self.number("lambda_in")?)?,
            },
            other => {
                return Err(MaterialError::Parameters(format!("{}: unknown model `{other}`", self.name)));
            }
        };
        model.validate()?;
        Ok(model)
    }
}
