//! Frequency and wavevector quadrature, multipole sums and force assembly.

use crate::kernels::{self, a_factor, bose_reduced, Block2, Branch, KernelError};
use crate::materials::{CylinderSpec, DielectricModel, MaterialError};
use crate::quadrature::{integrate_best_effort, Tolerance};
use crate::specfun::{self, signed};
use crate::tmatrix::{mirror, ProviderKind, TMatrixBlock, TMatrixProvider, THIN_WARNING_X};
use crate::units::{C_LIGHT, HBAR, K_B};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Read;
use std::path::Path;
use thiserror::Error;

/// Evanescent tail cutoff in units of `|q| d`.
const EVANESCENT_Y_MAX: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("quadrature did not converge at d = {d:e} m ({stage}): {detail}")]
    NonConvergence { d: f64, stage: String, detail: String },
    #[error("equilibrium data: {0}")]
    Equilibrium(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

impl From<crate::tmatrix::TMatrixError> for EngineError {
    fn from(e: crate::tmatrix::TMatrixError) -> Self {
        EngineError::Kernel(KernelError::TMatrix(e))
    }
}

impl From<specfun::SpecFunError> for EngineError {
    fn from(e: specfun::SpecFunError) -> Self {
        EngineError::Kernel(KernelError::SpecFun(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureControls {
    pub rel_tol: f64,
    /// Frequency cutoff in units of `hbar omega / k_B T`.
    pub x_max: f64,
    /// Multipole cap; `None` selects 1 for the thin provider and 8 for the full one.
    pub n_max: Option<usize>,
    pub series_tol: f64,
    /// Keep the terms quadratic in T in the propagating kernels.
    pub quadratic: bool,
    /// Integrate only `k_z > 0` and double (the summed integrands are even in `k_z`).
    pub kz_symmetry: bool,
    pub max_panels: usize,
    pub inner_max_panels: usize,
}

impl Default for QuadratureControls {
    fn default() -> Self {
        QuadratureControls {
            rel_tol: 1e-4,
            x_max: 40.0,
            n_max: None,
            series_tol: 1e-6,
            quadratic: false,
            kz_symmetry: false,
            max_panels: 4000,
            inner_max_panels: 600,
        }
    }
}

impl QuadratureControls {
    pub fn validate(&self) -> Result<(), EngineError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rel_tol) || !positive(self.x_max) || !positive(self.series_tol) {
            return Err(EngineError::Input("rel_tol, x_max and series_tol must be positive".into()));
        }
        if self.n_max == Some(0) {
            return Err(EngineError::Input("n_max must be at least 1".into()));
        }
        if self.max_panels < 4 || self.inner_max_panels < 4 {
            return Err(EngineError::Input("panel budgets must be at least 4".into()));
        }
        Ok(())
    }

    pub fn effective_n_max(&self, kind: ProviderKind) -> usize {
        match kind {
            ProviderKind::Thin => 1,
            ProviderKind::Full => self.n_max.unwrap_or(8).min(specfun::MAX_ORDER / 2 - 2),
        }
    }
}

/// Two cylinders in an environment at `t_env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct System {
    pub cylinder1: CylinderSpec,
    pub cylinder2: CylinderSpec,
    pub t_env: f64,
    pub provider: ProviderKind,
}

impl System {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.cylinder1.validate()?;
        self.cylinder2.validate()?;
        if !(self.t_env >= 0.0) || !self.t_env.is_finite() {
            return Err(EngineError::Input(format!("environment temperature {} K", self.t_env)));
        }
        Ok(())
    }

    /// Same system with cylinders 1 and 2 exchanged.
    pub fn swapped(&self) -> System {
        System {
            cylinder1: self.cylinder2.clone(),
            cylinder2: self.cylinder1.clone(),
            ..self.clone()
        }
    }
}

/// Force per unit length split into wave channels (N/m).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Channels {
    pub propagating: f64,
    pub evanescent: f64,
}

impl Channels {
    pub fn total(&self) -> f64 {
        self.propagating + self.evanescent
    }

    fn add(self, other: Channels) -> Channels {
        Channels {
            propagating: self.propagating + other.propagating,
            evanescent: self.evanescent + other.evanescent,
        }
    }

    fn neg(self) -> Channels {
        Channels { propagating: -self.propagating, evanescent: -self.evanescent }
    }
}

/// All force contributions at one separation. Cylinder-1 quantities are
/// positive when they push cylinder 1 away from cylinder 2; cylinder-2
/// quantities (`*_2`, `int_12`) are positive when they push cylinder 2 away
/// from cylinder 1, except `total_2`, which is reported along the same axis
/// as `total_1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ForceBreakdown {
    pub d: f64,
    /// Force on 1 from sources in 2 at `T2`.
    pub int_21: Channels,
    /// Force on 2 from sources in 1 at `T1`.
    pub int_12: Channels,
    pub pair_source_1: f64,
    pub pair_source_2: f64,
    pub self_1: Channels,
    pub self_2: Channels,
    /// Subtracted environment-temperature contributions.
    pub env_1: Channels,
    pub env_2: Channels,
    pub eq: f64,
    pub total_1: f64,
    pub total_2: f64,
    /// Estimated absolute quadrature error of the assembled totals.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Request {
    p12: bool,
    p21: bool,
    s1: bool,
    s2: bool,
}

/// Integrated channel layout: quantity `q` in
/// `[P12_ev, P12_pr, P21_ev, P21_pr, S1, S2]` at source temperature
/// (`2q`) and at the environment temperature (`2q + 1`). `P12` is the force
/// on 1 from sources in 2.
const N_QUANT: usize = 6;
const N_CHAN: usize = 2 * N_QUANT;

struct Outcome {
    values: [f64; N_CHAN],
    error: f64,
}

/// Blocks of one cylinder at fixed `(k_z, omega)` for orders `-len+1..len-1`.
struct OrderTable<'a> {
    provider: &'a TMatrixProvider,
    kz_tilde: f64,
    omega: f64,
    branch: Branch,
    quadratic: bool,
    t: Vec<Block2>,
    t_neg: Vec<Block2>,
    a: Vec<Block2>,
    a_neg: Vec<Block2>,
}

impl<'a> OrderTable<'a> {
    fn new(provider: &'a TMatrixProvider, kz_tilde: f64, omega: f64, branch: Branch, quadratic: bool) -> Self {
        OrderTable {
            provider,
            kz_tilde,
            omega,
            branch,
            quadratic,
            t: Vec::new(),
            t_neg: Vec::new(),
            a: Vec::new(),
            a_neg: Vec::new(),
        }
    }

    fn ensure(&mut self, order: usize) -> Result<(), EngineError> {
        while self.t.len() <= order {
            let n = self.t.len() as i32;
            let block = self.provider.block(n, self.kz_tilde, self.omega)?;
            let neg: TMatrixBlock = mirror(&block);
            self.a.push(a_factor(&block, self.branch, self.quadratic));
            self.a_neg.push(a_factor(&neg, self.branch, self.quadratic));
            self.t.push(block.entries);
            self.t_neg.push(neg.entries);
        }
        Ok(())
    }

    fn t(&self, n: i32) -> &Block2 {
        if n >= 0 {
            &self.t[n as usize]
        } else {
            &self.t_neg[(-n) as usize]
        }
    }

    fn a(&self, n: i32) -> &Block2 {
        if n >= 0 {
            &self.a[n as usize]
        } else {
            &self.a_neg[(-n) as usize]
        }
    }
}

/// `(n, m)` pairs added when the truncation grows from `N - 1` to `N`, with
/// `n` in `[-N, N]` and `m` in `[-N - 1, N]`.
fn shell(order: usize) -> Vec<(i32, i32)> {
    let big = order as i32;
    let mut out = Vec::new();
    for n in -big..=big {
        for m in (-big - 1)..=big {
            let inner = order > 0 && n.abs() < big && m > -big - 1 && m < big;
            if !inner {
                out.push((n, m));
            }
        }
    }
    out
}

struct Evaluator<'a> {
    prov: [&'a TMatrixProvider; 2],
    d: f64,
    controls: &'a QuadratureControls,
    n_cap: usize,
    want: Request,
}

fn abs_sum(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

impl<'a> Evaluator<'a> {
    /// Mode sums on the propagating branch: `[sum f_12, sum f_21, sum s_1, sum s_2]`.
    fn propagating_point(&self, omega: f64, kz_tilde: f64, q: f64) -> Result<[f64; 4], EngineError> {
        let x = q * self.d;
        let hmax = 2 * self.n_cap + 1;
        let h = specfun::hankel1_seq(hmax, x)?;
        let need_pair = self.want.s1 || self.want.s2;
        let j = if need_pair { specfun::bessel_j_seq(hmax, x)? } else { Vec::new() };
        let quad = self.controls.quadratic;
        let mut t1 = OrderTable::new(self.prov[0], kz_tilde, omega, Branch::Propagating, quad);
        let mut t2 = OrderTable::new(self.prov[1], kz_tilde, omega, Branch::Propagating, quad);
        let mut total = [0.0; 4];
        for order in 0..=self.n_cap {
            t1.ensure(order + 1)?;
            t2.ensure(order + 1)?;
            let mut part = [0.0; 4];
            for (n, m) in shell(order) {
                let nu = n - m;
                let h0 = signed(&h, nu);
                let h1 = signed(&h, nu - 1).conj();
                let hh = h0 * h1;
                if self.want.p12 {
                    part[0] += kernels::f_from_product(hh, t1.t(m), t1.t(m + 1), t2.a(n), quad);
                }
                if self.want.p21 {
                    part[1] += kernels::f_from_product(hh, t2.t(m), t2.t(m + 1), t1.a(n), quad);
                }
                if need_pair {
                    let hj = h0 * signed(&j, nu - 1);
                    let jh = signed(&j, nu) * h1;
                    if self.want.s1 {
                        part[2] += kernels::s_from_products(hj, jh, t1.a(n), t2.t(m), t2.t(m + 1));
                    }
                    if self.want.s2 {
                        part[3] += kernels::s_from_products(hj, jh, t2.a(n), t1.t(m), t1.t(m + 1));
                    }
                }
            }
            for i in 0..4 {
                total[i] += part[i];
            }
            if order >= 2 && abs_sum(&part) <= self.controls.series_tol * abs_sum(&total) {
                break;
            }
        }
        Ok(total)
    }

    /// Signed mode sums on the evanescent branch: `[sum (-1)^{n+m} f~_12, ... f~_21]`.
    fn evanescent_point(&self, omega: f64, kz_tilde: f64, q: f64) -> Result<[f64; 2], EngineError> {
        let y = q * self.d;
        let hmax = 2 * self.n_cap + 1;
        let ks = specfun::bessel_k_scaled_seq(hmax, y)?;
        let scale = -4.0 / (PI * PI) * (-2.0 * y).exp();
        let mut t1 = OrderTable::new(self.prov[0], kz_tilde, omega, Branch::Evanescent, false);
        let mut t2 = OrderTable::new(self.prov[1], kz_tilde, omega, Branch::Evanescent, false);
        let mut total = [0.0; 2];
        for order in 0..=self.n_cap {
            t1.ensure(order + 1)?;
            t2.ensure(order + 1)?;
            let mut part = [0.0; 2];
            for (n, m) in shell(order) {
                let nu = n - m;
                let kk = ks[nu.unsigned_abs() as usize] * ks[(nu - 1).unsigned_abs() as usize];
                let hh = Complex64::new(0.0, kk);
                let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                if self.want.p12 {
                    part[0] += sign * kernels::f_tilde_from_product(hh, t1.t(m), t1.t(m + 1), t2.t(n));
                }
                if self.want.p21 {
                    part[1] += sign * kernels::f_tilde_from_product(hh, t2.t(m), t2.t(m + 1), t1.t(n));
                }
            }
            for i in 0..2 {
                total[i] += part[i];
            }
            if order >= 2 && abs_sum(&part) <= self.controls.series_tol * abs_sum(&total) {
                break;
            }
        }
        Ok([total[0] * scale, total[1] * scale])
    }

    /// Smallest `|q| / k` at which the mode sums are evaluated. Near the light
    /// line the individual `(n, m)` terms grow like `(q d)^{1 - 2|n - m|}` and
    /// cancel between polarizations; below this value the integrand is held
    /// at its boundary value.
    fn light_line_clamp(&self, kd: f64) -> f64 {
        1e-3 * kd.recip().min(1.0)
    }

    /// k_z-integrated quantities at fixed `omega`, divided by `2 pi^2`, in the
    /// quantity order `[P12_ev, P12_pr, P21_ev, P21_pr, S1, S2]` (propagating
    /// interaction entries already carry their minus sign).
    fn at_frequency(&self, omega: f64) -> Result<([f64; N_QUANT], f64), EngineError> {
        let k = omega / C_LIGHT;
        let kd = k * self.d;
        let want_ev = self.want.p12 || self.want.p21;
        let qc = self.light_line_clamp(kd);
        let (theta_c, t_c) = (qc.asin(), qc.asinh());
        let t_max = if want_ev { (EVANESCENT_Y_MAX / kd).asinh().max(2.0 * t_c) } else { 0.0 };
        let fold = if self.controls.kz_symmetry { 2.0 } else { 1.0 };
        let mut breaks = vec![0.0];
        if want_ev {
            breaks.push(t_c);
            for y in [0.5, 3.0] {
                let t = (y / kd).asinh();
                if t > t_c && t < t_max {
                    breaks.push(t);
                }
            }
            breaks.push(t_max);
        }
        breaks.push(t_max + theta_c);
        breaks.push(t_max + FRAC_PI_2);
        if !self.controls.kz_symmetry {
            breaks.push(t_max + PI - theta_c);
            breaks.push(t_max + PI);
        }
        let integrand = |s: f64| -> Result<[f64; N_QUANT], EngineError> {
            let mut out = [0.0; N_QUANT];
            if s < t_max {
                let t = s.max(t_c);
                let (sh, ch) = (t.sinh(), t.cosh());
                let q = k * sh;
                let weight = k * k * sh * sh;
                let plus = self.evanescent_point(omega, ch, q)?;
                let minus = if self.controls.kz_symmetry { plus } else { self.evanescent_point(omega, -ch, q)? };
                out[0] = weight * (plus[0] + minus[0]);
                out[2] = weight * (plus[1] + minus[1]);
            } else {
                let theta = (s - t_max).clamp(theta_c, PI - theta_c);
                let (sn, cs) = theta.sin_cos();
                let q = k * sn;
                let weight = fold * k * k * sn * sn;
                let v = self.propagating_point(omega, cs, q)?;
                out[1] = -weight * v[0];
                out[3] = -weight * v[1];
                out[4] = weight * v[2];
                out[5] = weight * v[3];
            }
            Ok(out)
        };
        let tol = Tolerance::relative(0.1 * self.controls.rel_tol).with_max_panels(self.controls.inner_max_panels);
        let (est, shortfall) = integrate_best_effort(integrand, &breaks, tol)?;
        let norm = 1.0 / (2.0 * PI * PI);
        let mut values = est.value;
        for v in values.iter_mut() {
            *v *= norm;
        }
        let error = est.error * norm;
        if let Some(s) = shortfall {
            if error > self.controls.rel_tol * abs_sum(&values) {
                return Err(EngineError::NonConvergence {
                    d: self.d,
                    stage: format!("k_z integral at omega = {omega:e} rad/s"),
                    detail: format!(
                        "error {:e} after {} panels, worst sub-interval [{:e}, {:e}]",
                        error, est.panels, s.worst_a, s.worst_b
                    ),
                });
            }
        }
        Ok((values, error))
    }
}

/// Source temperature attached to each quantity `[P12_ev, P12_pr, P21_ev, P21_pr, S1, S2]`.
fn source_temperatures(t1: f64, t2: f64) -> [f64; N_QUANT] {
    [t2, t2, t1, t1, t1, t2]
}

/// Frequency breakpoints at material resonances and thermal scales within `[0, omega_max]`.
pub(crate) fn frequency_breaks(materials: &[&DielectricModel], temps: &[f64], omega_max: f64) -> Vec<f64> {
    let mut pts = vec![0.0, omega_max];
    for m in materials {
        for (w, g) in m.features() {
            for off in [-50.0, -5.0, 0.0, 5.0, 50.0] {
                pts.push(w + off * g);
            }
        }
    }
    for &t in temps {
        if t > 0.0 {
            for u in [0.25, 1.0, 3.0, 8.0, 16.0] {
                pts.push(u * K_B * t / HBAR);
            }
        }
    }
    pts.retain(|w| *w >= 0.0 && *w <= omega_max);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    pts
}

fn check_geometry(r1: f64, r2: f64, d: f64) -> Result<(), EngineError> {
    if !(d > r1 + r2) || !d.is_finite() {
        return Err(EngineError::Input(format!(
            "separation d = {d:e} m must exceed the sum of radii {:e} m",
            r1 + r2
        )));
    }
    if d < 5.0 * (r1 + r2) {
        log::warn!(
            "d = {d:e} m is below 5 (R1 + R2); the one-reflection approximation may be inaccurate"
        );
    }
    Ok(())
}

/// Core integration. `prov[0]` is cylinder 1, `prov[1]` cylinder 2.
fn integrate_forces(
    prov: [&TMatrixProvider; 2],
    t_source: [f64; 2],
    t_env: f64,
    d: f64,
    want: Request,
    controls: &QuadratureControls,
    kind: ProviderKind,
) -> Result<Outcome, EngineError> {
    controls.validate()?;
    for t in t_source.iter().chain(std::iter::once(&t_env)) {
        if !(*t >= 0.0) || !t.is_finite() {
            return Err(EngineError::Input(format!("temperature {t} K")));
        }
    }
    check_geometry(prov[0].radius, prov[1].radius, d)?;
    let src = source_temperatures(t_source[0], t_source[1]);
    let mut active = [false; N_QUANT];
    let wanted = [want.p12, want.p12, want.p21, want.p21, want.s1, want.s2];
    let mut t_max = 0.0f64;
    for q in 0..N_QUANT {
        if wanted[q] && (src[q] > 0.0 || t_env > 0.0) {
            active[q] = true;
            t_max = t_max.max(src[q]).max(t_env);
        }
    }
    if t_max == 0.0 || prov.iter().any(|p| p.material.is_vacuum()) {
        return Ok(Outcome { values: [0.0; N_CHAN], error: 0.0 });
    }
    let omega_max = controls.x_max * K_B * t_max / HBAR;
    if kind == ProviderKind::Thin {
        let x = omega_max * prov[0].radius.max(prov[1].radius) / C_LIGHT;
        if x > THIN_WARNING_X {
            log::warn!("thin-cylinder expansion used up to size parameter {x:.3} (> {THIN_WARNING_X})");
        }
    }
    let evaluator = Evaluator { prov, d, controls, n_cap: controls.effective_n_max(kind), want };
    let temps: Vec<f64> = src.iter().copied().chain(std::iter::once(t_env)).collect();
    let breaks = frequency_breaks(&[&prov[0].material, &prov[1].material], &temps, omega_max);
    let integrand = |omega: f64| -> Result<[f64; N_CHAN], EngineError> {
        let mut out = [0.0; N_CHAN];
        let weights: Vec<[f64; 2]> = (0..N_QUANT)
            .map(|q| {
                let occ = |t: f64| if t > 0.0 { HBAR * bose_reduced(HBAR * omega / (K_B * t)) } else { 0.0 };
                [occ(src[q]), occ(t_env)]
            })
            .collect();
        if (0..N_QUANT).all(|q| !active[q] || (weights[q][0] == 0.0 && weights[q][1] == 0.0)) {
            return Ok(out);
        }
        let (inner, _) = evaluator.at_frequency(omega)?;
        for q in 0..N_QUANT {
            if active[q] {
                out[2 * q] = weights[q][0] * inner[q];
                out[2 * q + 1] = weights[q][1] * inner[q];
            }
        }
        Ok(out)
    };
    let tol = Tolerance::relative(controls.rel_tol).with_max_panels(controls.max_panels);
    let (est, shortfall) = integrate_best_effort(integrand, &breaks, tol)?;
    if let Some(s) = shortfall {
        return Err(EngineError::NonConvergence {
            d,
            stage: "frequency integral".into(),
            detail: format!(
                "error {:e} after {} panels, worst sub-interval [{:e}, {:e}] rad/s with error {:e}",
                est.error, est.panels, s.worst_a, s.worst_b, s.worst_error
            ),
        });
    }
    Ok(Outcome { values: est.value, error: est.error })
}

fn providers(system: &System) -> [TMatrixProvider; 2] {
    [
        TMatrixProvider::new(system.provider, system.cylinder1.material.clone(), system.cylinder1.radius),
        TMatrixProvider::new(system.provider, system.cylinder2.material.clone(), system.cylinder2.radius),
    ]
}

/// Force per unit length on `target` from thermal sources in `source` at
/// `t_source`; positive values push `target` away from `source`.
pub fn interaction_force(
    source: &CylinderSpec,
    target: &CylinderSpec,
    t_source: f64,
    d: f64,
    provider: ProviderKind,
    controls: &QuadratureControls,
) -> Result<Channels, EngineError> {
    source.validate()?;
    target.validate()?;
    let p_target = TMatrixProvider::new(provider, target.material.clone(), target.radius);
    let p_source = TMatrixProvider::new(provider, source.material.clone(), source.radius);
    let want = Request { p12: true, ..Request::default() };
    let out = integrate_forces([&p_target, &p_source], [0.0, t_source], 0.0, d, want, controls, provider)?;
    Ok(Channels { evanescent: out.values[0], propagating: out.values[2] })
}

/// Total force per unit length on both cylinders from sources in `source`,
/// along the axis on which positive values push `source` away from `other`.
pub fn pair_source_force(
    source: &CylinderSpec,
    other: &CylinderSpec,
    t_source: f64,
    d: f64,
    provider: ProviderKind,
    controls: &QuadratureControls,
) -> Result<f64, EngineError> {
    source.validate()?;
    other.validate()?;
    let p_source = TMatrixProvider::new(provider, source.material.clone(), source.radius);
    let p_other = TMatrixProvider::new(provider, other.material.clone(), other.radius);
    let want = Request { s1: true, ..Request::default() };
    let out = integrate_forces([&p_source, &p_other], [t_source, 0.0], 0.0, d, want, controls, provider)?;
    Ok(out.values[8])
}

/// Force per unit length on cylinder `j` (1 or 2) from its own sources at
/// its temperature, positive when pushing `j` away from the other cylinder.
pub fn self_force(j: usize, system: &System, d: f64, controls: &QuadratureControls) -> Result<Channels, EngineError> {
    system.validate()?;
    let sys = match j {
        1 => system.clone(),
        2 => system.swapped(),
        _ => return Err(EngineError::Input(format!("cylinder index must be 1 or 2, got {j}"))),
    };
    let prov = providers(&sys);
    let want = Request { p21: true, s1: true, ..Request::default() };
    let t1 = sys.cylinder1.temperature;
    let out = integrate_forces([&prov[0], &prov[1]], [t1, 0.0], 0.0, d, want, controls, sys.provider)?;
    Ok(Channels { propagating: out.values[8] + out.values[6], evanescent: out.values[4] })
}

/// Full force assembly at one separation with the ingested equilibrium force `f_eq`.
pub fn total_force(system: &System, d: f64, f_eq: f64, controls: &QuadratureControls) -> Result<ForceBreakdown, EngineError> {
    system.validate()?;
    let prov = providers(system);
    let want = Request { p12: true, p21: true, s1: true, s2: true };
    let t = [system.cylinder1.temperature, system.cylinder2.temperature];
    let out = integrate_forces([&prov[0], &prov[1]], t, system.t_env, d, want, controls, system.provider)?;
    Ok(assemble(d, &out, f_eq))
}

fn assemble(d: f64, out: &Outcome, f_eq: f64) -> ForceBreakdown {
    let v = &out.values;
    let ch = |ev: usize, pr: usize| Channels { evanescent: v[ev], propagating: v[pr] };
    let p12 = ch(0, 2);
    let p12_env = ch(1, 3);
    let p21 = ch(4, 6);
    let p21_env = ch(5, 7);
    let s1 = v[8];
    let s1_env = v[9];
    let s2 = v[10];
    let s2_env = v[11];
    let pure = |s: f64| Channels { propagating: s, evanescent: 0.0 };
    let self_1 = pure(s1).add(p21);
    let self_2 = pure(s2).add(p12);
    let env_1 = p12_env.add(pure(s1_env)).add(p21_env).neg();
    let env_2 = p21_env.add(pure(s2_env)).add(p12_env).neg();
    let dev_1 = (p12.total() - p12_env.total()) + (s1 - s1_env) + (p21.total() - p21_env.total());
    let dev_2 = (p21.total() - p21_env.total()) + (s2 - s2_env) + (p12.total() - p12_env.total());
    let total_1 = f_eq + dev_1;
    let total_2_own = f_eq + dev_2;
    ForceBreakdown {
        d,
        int_21: p12,
        int_12: p21,
        pair_source_1: s1,
        pair_source_2: s2,
        self_1,
        self_2,
        env_1,
        env_2,
        eq: f_eq,
        total_1,
        total_2: -total_2_own,
        error: 2.0 * out.error,
    }
}

/// Tabulated equilibrium force per unit length, interpolated linearly in `ln d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumTable {
    pub d: Vec<f64>,
    pub force: Vec<f64>,
    pub allow_extrapolation: bool,
}

impl EquilibriumTable {
    pub fn new(d: Vec<f64>, force: Vec<f64>) -> Result<Self, EngineError> {
        if d.len() != force.len() || d.len() < 2 {
            return Err(EngineError::Equilibrium("need at least two (d, F) rows".into()));
        }
        if d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || force.iter().any(|v| !v.is_finite()) {
            return Err(EngineError::Equilibrium("separations must be positive and forces finite".into()));
        }
        if d.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EngineError::Equilibrium("separations must be strictly increasing".into()));
        }
        Ok(EquilibriumTable { d, force, allow_extrapolation: false })
    }

    pub fn with_extrapolation(mut self, allow: bool) -> Self {
        self.allow_extrapolation = allow;
        self
    }

    /// Parses CSV with header `d_m,F_eq_N_per_m`.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, EngineError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| EngineError::Equilibrium(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["d_m", "F_eq_N_per_m"] {
            return Err(EngineError::Equilibrium(format!(
                "expected header `d_m,F_eq_N_per_m`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut d = Vec::new();
        let mut force = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| EngineError::Equilibrium(e.to_string()))?;
            let parse = |j: usize| -> Result<f64, EngineError> {
                rec.get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| EngineError::Equilibrium(format!("row {}: column {} is not a number", i + 2, j + 1)))
            };
            d.push(parse(0)?);
            force.push(parse(1)?);
        }
        EquilibriumTable::new(d, force)
    }

    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let file = std::fs::File::open(path)
            .map_err(|e| EngineError::Equilibrium(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    /// Serializes with header `d_m,F_eq_N_per_m`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_m,F_eq_N_per_m\n");
        for (d, f) in self.d.iter().zip(&self.force) {
            out.push_str(&format!("{d:.10e},{f:.10e}\n"));
        }
        out
    }

    pub fn value_at(&self, d: f64) -> Result<f64, EngineError> {
        let n = self.d.len();
        let inside = d >= self.d[0] && d <= self.d[n - 1];
        if !inside && !self.allow_extrapolation {
            return Err(EngineError::Equilibrium(format!(
                "d = {d:e} m outside tabulated range [{:e}, {:e}] m",
                self.d[0],
                self.d[n - 1]
            )));
        }
        let i = match self.d.iter().position(|&x| x >= d) {
            Some(0) => 1,
            Some(i) => i,
            None => n - 1,
        };
        let (x0, x1) = (self.d[i - 1].ln(), self.d[i].ln());
        let w = (d.ln() - x0) / (x1 - x0);
        Ok(self.force[i - 1] + w * (self.force[i] - self.force[i - 1]))
    }
}

/// Evaluates [`total_force`] over a grid in parallel; results follow grid order.
pub fn sweep(
    system: &System,
    d_grid: &[f64],
    equilibrium: Option<&EquilibriumTable>,
    controls: &QuadratureControls,
) -> Result<Vec<ForceBreakdown>, EngineError> {
    system.validate()?;
    controls.validate()?;
    let f_eq: Vec<f64> = d_grid
        .iter()
        .map(|&d| equilibrium.map_or(Ok(0.0), |t| t.value_at(d)))
        .collect::<Result<_, _>>()?;
    d_grid
        .par_iter()
        .zip(f_eq.par_iter())
        .map(|(&d, &f)| total_force(system, d, f, controls))
        .collect()
}
