//! Optically dilute limit: forces between volume elements and their
//! pairwise summation over two parallel cylinders.

use crate::asymptotics::{thermal_integral, AsymptoticError, AsymptoticRegime};
use crate::engine::QuadratureControls;
use crate::materials::{epsilon, DielectricModel};
use crate::quadrature::{integrate, QuadError, Tolerance};
use crate::units::{C_LIGHT, HBAR, K_B};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `|eps - 1|` over the thermal band still treated as dilute.
pub const DILUTE_LIMIT: f64 = 0.1;

/// Two volume elements (m^3) at centre separation `separation` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeElementPair {
    pub v1: f64,
    pub v2: f64,
    pub separation: f64,
}

impl VolumeElementPair {
    pub fn new(v1: f64, v2: f64, separation: f64) -> Result<Self, AsymptoticError> {
        for (name, v) in [("V1", v1), ("V2", v2), ("separation", separation)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(AsymptoticError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(VolumeElementPair { v1, v2, separation })
    }
}

/// Force split by the power of the sphere-pair term it originates from:
/// `p2` is the radiative `Im eps1 Im eps2` term, `p3`, `p5`, `p7` the
/// `Re(eps1 - 1) Im eps2` terms decaying as `d^-3`, `d^-5`, `d^-7` between
/// volume elements. Summed over two cylinders each decays one power slower.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DiluteTerms {
    pub p2: f64,
    pub p3: f64,
    pub p5: f64,
    pub p7: f64,
}

impl DiluteTerms {
    pub fn total(&self) -> f64 {
        self.p2 + self.p3 + self.p5 + self.p7
    }

    /// Total without the `p3` contribution, which the closed forms do not contain.
    pub fn without_p3(&self) -> f64 {
        self.p2 + self.p5 + self.p7
    }

    fn scaled(&self, s: [f64; 4]) -> DiluteTerms {
        DiluteTerms { p2: self.p2 * s[0], p3: self.p3 * s[1], p5: self.p5 * s[2], p7: self.p7 * s[3] }
    }
}

/// Dilute-limit result with any violated preconditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiluteForce {
    pub terms: DiluteTerms,
    pub warnings: Vec<String>,
}

impl DiluteForce {
    pub fn total(&self) -> f64 {
        self.terms.total()
    }
}

fn dilute_warnings(eps1: &DielectricModel, eps2: &DielectricModel, t2: f64) -> Result<Vec<String>, AsymptoticError> {
    let mut out = Vec::new();
    if t2 == 0.0 {
        return Ok(out);
    }
    'scan: for u in [0.5, 1.0, 3.0, 10.0] {
        let omega = u * K_B * t2 / HBAR;
        for (j, m) in [eps1, eps2].iter().enumerate() {
            let dev = (epsilon(m, omega)? - 1.0).norm();
            if dev > DILUTE_LIMIT {
                out.push(format!(
                    "|eps{} - 1| = {dev:.3} at omega = {omega:e} rad/s exceeds the dilute limit {DILUTE_LIMIT}",
                    j + 1
                ));
                break 'scan;
            }
        }
    }
    for w in &out {
        log::warn!("{w}");
    }
    Ok(out)
}

/// Frequency moments `M_p` such that the force between volume elements is
/// `V1 V2 sum_p M_p / d^p`.
fn sphere_moments(
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    controls: &QuadratureControls,
) -> Result<DiluteTerms, AsymptoticError> {
    let pref = 1.0 / (4.0 * PI.powi(3));
    let moment = |p: i32| {
        thermal_integral(&[eps1, eps2], t2, controls, |omega| {
            let e1 = epsilon(eps1, omega)?;
            let e2 = epsilon(eps2, omega)?;
            let k = omega / C_LIGHT;
            let material = if p == 2 { e1.im * e2.im } else { -(e1.re - 1.0) * e2.im };
            Ok(pref * k.powi(7 - p) * material)
        })
    };
    Ok(DiluteTerms { p2: moment(2)?, p3: moment(3)?, p5: 2.0 * moment(5)?, p7: 9.0 * moment(7)? })
}

/// Force (N) on volume element 1 from thermal sources in element 2 at `t2`,
/// positive for repulsion.
pub fn sphere_pair_force(
    pair: &VolumeElementPair,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    controls: &QuadratureControls,
) -> Result<DiluteForce, AsymptoticError> {
    let warnings = dilute_warnings(eps1, eps2, t2)?;
    let m = sphere_moments(eps1, eps2, t2, controls)?;
    let d = pair.separation;
    let v = pair.v1 * pair.v2;
    let terms = m.scaled([v / d.powi(2), v / d.powi(3), v / d.powi(5), v / d.powi(7)]);
    Ok(DiluteForce { terms, warnings })
}

/// `int dl d rho^-(p+1)` over the whole line, `rho = sqrt(d^2 + l^2)`,
/// evaluated with `l = d sinh t` and truncated once the tail falls below `rel_tol`.
fn line_sum(p: i32, d: f64, rel_tol: f64) -> Result<f64, AsymptoticError> {
    let f = |t: f64| -> Result<[f64; 1], AsymptoticError> { Ok([t.cosh().powi(-p)]) };
    let tol = Tolerance::relative(0.1 * rel_tol).with_max_panels(400);
    let mut upper = 4.0;
    let mut total = 0.0;
    let mut lower = 0.0;
    loop {
        let est = integrate(f, &[lower, upper], tol).map_err(|e| match e {
            QuadError::Integrand(e) => e,
            other => AsymptoticError::NonConvergence(other.to_string()),
        })?;
        total += est.value[0];
        if est.value[0].abs() <= rel_tol * total.abs() {
            break;
        }
        lower = upper;
        upper *= 2.0;
        if upper > 700.0 {
            return Err(AsymptoticError::NonConvergence("line sum tail does not decay".into()));
        }
    }
    Ok(2.0 * total * d.powi(1 - p))
}

/// Force per unit length (N/m) on cylinder 1 obtained by summing the
/// volume-element force over both cylinder cross-sections and along the axis.
pub fn cylinder_force_by_summation(
    r1: f64,
    r2: f64,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    d: f64,
    controls: &QuadratureControls,
) -> Result<DiluteForce, AsymptoticError> {
    for (name, v) in [("R1", r1), ("R2", r2), ("d", d)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(AsymptoticError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let warnings = dilute_warnings(eps1, eps2, t2)?;
    let m = sphere_moments(eps1, eps2, t2, controls)?;
    let area = PI * PI * r1 * r1 * r2 * r2;
    let tol = controls.rel_tol;
    let s = [line_sum(2, d, tol)?, line_sum(3, d, tol)?, line_sum(5, d, tol)?, line_sum(7, d, tol)?];
    let terms = m.scaled(s.map(|x| area * x));
    Ok(DiluteForce { terms, warnings })
}

/// Closed-form dilute interaction force per unit length. The near-field
/// regime fills `p5` and `p7`; the far-field regime fills `p2`.
pub fn dilute_closed_forms(
    r1: f64,
    r2: f64,
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    t2: f64,
    d: f64,
    regime: AsymptoticRegime,
    controls: &QuadratureControls,
) -> Result<DiluteForce, AsymptoticError> {
    let warnings = dilute_warnings(eps1, eps2, t2)?;
    let r4 = r1 * r1 * r2 * r2;
    let mut terms = DiluteTerms::default();
    let integral = |f: &dyn Fn(Complex64, Complex64, f64) -> f64| {
        thermal_integral(&[eps1, eps2], t2, controls, |omega| {
            Ok(f(epsilon(eps1, omega)?, epsilon(eps2, omega)?, omega / C_LIGHT))
        })
    };
    if regime.is_near() {
        terms.p7 = -r4 * 45.0 / (64.0 * d.powi(6)) * integral(&|e1, e2, _| (e1.re - 1.0) * e2.im)?;
        terms.p5 = -r4 * 3.0 / (16.0 * d.powi(4)) * integral(&|e1, e2, k| (e1.re - 1.0) * e2.im * k * k)?;
    } else {
        terms.p2 = r4 / (2.0 * PI * d) * integral(&|e1, e2, k| k.powi(5) * e1.im * e2.im)?;
    }
    Ok(DiluteForce { terms, warnings })
}

/// `int dl e^{2 i k rho} rho^-p d / rho` over the whole line, `rho = sqrt(d^2 + l^2)`:
/// the line sum of an oscillating kernel `e^{2 i k rho} / rho^p`.
///
/// The integral is evaluated on the contour `cosh t = 1 + i w^2` where the
/// oscillation becomes exponential decay.
pub fn line_summed_phase_kernel(k: f64, d: f64, p: f64) -> Result<Complex64, AsymptoticError> {
    if !(k > 0.0) || !(d > 0.0) || !(p > 0.0) {
        return Err(AsymptoticError::Domain(format!("need k, d, p > 0, got ({k}, {d}, {p})")));
    }
    let kd = k * d;
    let i = Complex64::i();
    let sqrt_i = Complex64::new(0.0, 1.0).sqrt();
    let f = |w: f64| -> Result<[f64; 2], AsymptoticError> {
        let u = i * w * w;
        let v = 2.0 * i * (-2.0 * kd * w * w).exp() * (1.0 + u).powf(-p) / (sqrt_i * (2.0 + u).sqrt());
        Ok([v.re, v.im])
    };
    let w_max = (40.0 / kd).sqrt();
    let est = integrate(f, &[0.0, w_max], Tolerance::relative(1e-10).with_max_panels(400)).map_err(|e| match e {
        QuadError::Integrand(e) => e,
        other => AsymptoticError::NonConvergence(other.to_string()),
    })?;
    let phase = Complex64::from_polar(1.0, 2.0 * kd);
    Ok(2.0 * d.powf(1.0 - p) * phase * Complex64::new(est.value[0], est.value[1]))
}
