//! Occupation factors, amplitude factors and the mode-resolved force kernels.

use crate::specfun::{self, SpecFunError};
use crate::tmatrix::{TMatrixBlock, TMatrixError, TMatrixProvider};
use crate::units::{C_LIGHT, HBAR, K_B};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

pub type Block2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid mode point: {0}")]
    Mode(String),
    #[error("temperature must be finite and non-negative, got {0} K")]
    Temperature(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    TMatrix(#[from] TMatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Propagating,
    Evanescent,
}

/// A single `(omega, k_z, n, m)` sample of the mode sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePoint {
    pub omega: f64,
    pub kz: f64,
    pub n: i32,
    pub m: i32,
}

impl ModePoint {
    pub fn new(omega: f64, kz: f64, n: i32, m: i32) -> Result<Self, KernelError> {
        if !(omega > 0.0) || !omega.is_finite() || !kz.is_finite() {
            return Err(KernelError::Mode(format!("omega = {omega}, k_z = {kz}")));
        }
        let point = ModePoint { omega, kz, n, m };
        if point.q_abs() == 0.0 {
            return Err(KernelError::Mode(format!("k_z = {kz} lies on the light line")));
        }
        Ok(point)
    }

    pub fn k(&self) -> f64 {
        self.omega / C_LIGHT
    }

    pub fn kz_tilde(&self) -> f64 {
        self.kz / self.k()
    }

    pub fn branch(&self) -> Branch {
        if self.kz.abs() < self.k() {
            Branch::Propagating
        } else {
            Branch::Evanescent
        }
    }

    /// `|q|` with `q^2 = k^2 - k_z^2`; on the evanescent branch `q = i|q|`.
    pub fn q_abs(&self) -> f64 {
        let k = self.k();
        ((k - self.kz.abs()) * (k + self.kz.abs())).abs().sqrt()
    }
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)`, zero at `T = 0`.
pub fn bose(temperature: f64, omega: f64) -> Result<f64, KernelError> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(KernelError::Temperature(temperature));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(KernelError::Mode(format!("omega = {omega}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(bose_reduced(HBAR * omega / (K_B * temperature)))
}

/// Bose factor as a function of `u = hbar omega / k_B T`.
pub fn bose_reduced(u: f64) -> f64 {
    if u > 700.0 {
        0.0
    } else {
        1.0 / u.exp_m1()
    }
}

/// Source strength `a(T, omega) = (4 pi)^2 hbar omega^2 / c^2 * bose(T, omega)`.
pub fn occupation(temperature: f64, omega: f64) -> Result<f64, KernelError> {
    let n = bose(temperature, omega)?;
    Ok((4.0 * PI).powi(2) * HBAR * omega * omega / (C_LIGHT * C_LIGHT) * n)
}

/// Amplitude factor `A`: `Re T + sum T T^*` when propagating (quadratic part
/// optional), `(-1)^n Re T` when evanescent.
pub fn a_factor(block: &TMatrixBlock, branch: Branch, quadratic: bool) -> Block2 {
    let t = &block.entries;
    let mut a = [[ZERO; 2]; 2];
    match branch {
        Branch::Propagating => {
            for p in 0..2 {
                for pp in 0..2 {
                    a[p][pp] = Complex64::new(t[p][pp].re, 0.0);
                    if quadratic {
                        for r in 0..2 {
                            a[p][pp] += t[p][r] * t[pp][r].conj();
                        }
                    }
                }
            }
        }
        Branch::Evanescent => {
            let sign = if block.n % 2 == 0 { 1.0 } else { -1.0 };
            for p in 0..2 {
                for pp in 0..2 {
                    a[p][pp] = Complex64::new(sign * t[p][pp].re, 0.0);
                }
            }
        }
    }
    a
}

/// Amplitude factor evaluated directly from a provider.
pub fn a_factor_at(
    provider: &TMatrixProvider,
    n: i32,
    kz: f64,
    omega: f64,
    quadratic: bool,
) -> Result<Block2, KernelError> {
    let point = ModePoint::new(omega, kz, n, 0)?;
    let block = provider.block(n, point.kz_tilde(), omega)?;
    Ok(a_factor(&block, point.branch(), quadratic))
}

/// `H_nu(x) conj(H_{nu-1}(x))`.
pub fn propagating_product(nu: i32, x: f64) -> Result<Complex64, KernelError> {
    Ok(specfun::hankel1(nu, x)? * specfun::hankel1(nu - 1, x)?.conj())
}

/// `H_nu(iy) conj(H_{nu-1}(iy)) = -i (4 / pi^2) K_nu(y) K_{nu-1}(y)`.
pub fn evanescent_product(nu: i32, y: f64) -> Result<Complex64, KernelError> {
    let kk = specfun::bessel_k(nu, y)? * specfun::bessel_k(nu - 1, y)?;
    Ok(Complex64::new(0.0, -4.0 / (PI * PI) * kk))
}

/// `(H_nu(x) J_{nu-1}(x), J_nu(x) conj(H_{nu-1}(x)))`.
pub fn pair_products(nu: i32, x: f64) -> Result<(Complex64, Complex64), KernelError> {
    let h0 = specfun::hankel1(nu, x)?;
    let h1 = specfun::hankel1(nu - 1, x)?;
    let j0 = specfun::bessel_j(nu, x)?;
    let j1 = specfun::bessel_j(nu - 1, x)?;
    Ok((h0 * j1, j0 * h1.conj()))
}

/// Propagating interaction kernel summed over polarizations, given the
/// Hankel product `hh = H_nu conj(H_{nu-1})`.
pub fn f_from_product(hh: Complex64, t1_m: &Block2, t1_m1: &Block2, a2: &Block2, quadratic: bool) -> f64 {
    let mut sum = 0.0;
    for p in 0..2 {
        for pp in 0..2 {
            let a = a2[p][pp];
            if a == ZERO {
                continue;
            }
            let mut linear = t1_m[p][pp] + t1_m1[pp][p].conj();
            let mut value = 0.0;
            if quadratic {
                let mut qq = ZERO;
                for r in 0..2 {
                    qq += t1_m[p][r] * t1_m1[r][pp].conj();
                }
                linear += 2.0 * qq;
                value += 2.0 * a.im * (hh * qq).re;
            }
            value += a.re * (hh * linear).im;
            sum += value;
        }
    }
    sum
}

/// Evanescent interaction kernel summed over polarizations (without the
/// `(-1)^{n+m}` prefactor), given `hh = H_nu(iy) conj(H_{nu-1}(iy))`.
pub fn f_tilde_from_product(hh: Complex64, t1_m: &Block2, t1_m1: &Block2, t2: &Block2) -> f64 {
    let mut sum = 0.0;
    for p in 0..2 {
        for pp in 0..2 {
            let re_t2 = t2[p][pp].re;
            if re_t2 == 0.0 {
                continue;
            }
            sum += re_t2 * (hh * (t1_m[p][pp] + t1_m1[p][pp].conj())).re;
        }
    }
    sum
}

/// Pair-source kernel summed over polarizations, given
/// `hj = H_nu J_{nu-1}` and `jh = J_nu conj(H_{nu-1})`.
pub fn s_from_products(hj: Complex64, jh: Complex64, a1: &Block2, t2_m: &Block2, t2_m1: &Block2) -> f64 {
    let mut sum = 0.0;
    for p in 0..2 {
        for pp in 0..2 {
            let a = a1[p][pp].re;
            if a == 0.0 {
                continue;
            }
            sum += 2.0 * a * (hj * t2_m[p][pp] + jh * t2_m1[p][pp].conj()).im;
        }
    }
    sum
}

fn require(point: &ModePoint, branch: Branch, d: f64) -> Result<(), KernelError> {
    if point.branch() != branch {
        return Err(KernelError::Mode(format!(
            "k_z / k = {} is not on the {:?} branch",
            point.kz_tilde(),
            branch
        )));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(KernelError::Mode(format!("separation d = {d}")));
    }
    Ok(())
}

/// Propagating interaction kernel `f` at one mode point.
pub fn f_kernel(
    point: &ModePoint,
    t1_m: &TMatrixBlock,
    t1_m1: &TMatrixBlock,
    a2: &Block2,
    d: f64,
    quadratic: bool,
) -> Result<f64, KernelError> {
    require(point, Branch::Propagating, d)?;
    let hh = propagating_product(point.n - point.m, point.q_abs() * d)?;
    Ok(f_from_product(hh, &t1_m.entries, &t1_m1.entries, a2, quadratic))
}

/// Evanescent interaction kernel `f~` at one mode point.
pub fn f_tilde_kernel(
    point: &ModePoint,
    t1_m: &TMatrixBlock,
    t1_m1: &TMatrixBlock,
    t2: &TMatrixBlock,
    d: f64,
) -> Result<f64, KernelError> {
    require(point, Branch::Evanescent, d)?;
    let hh = evanescent_product(point.n - point.m, point.q_abs() * d)?;
    Ok(f_tilde_from_product(hh, &t1_m.entries, &t1_m1.entries, &t2.entries))
}

/// Pair-source kernel `s` at one mode point.
pub fn s_kernel(
    point: &ModePoint,
    a1: &Block2,
    t2_m: &TMatrixBlock,
    t2_m1: &TMatrixBlock,
    d: f64,
) -> Result<f64, KernelError> {
    require(point, Branch::Propagating, d)?;
    let (hj, jh) = pair_products(point.n - point.m, point.q_abs() * d)?;
    Ok(s_from_products(hj, jh, a1, &t2_m.entries, &t2_m1.entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::DielectricModel;
    use crate::tmatrix::{thin_t, ProviderKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn thin(n: i32, kt: f64, eps: Complex64, x: f64) -> TMatrixBlock {
        if n.abs() > 1 {
            TMatrixBlock::zero(n, kt, x)
        } else {
            thin_t(n, kt, eps, c(1.0, 0.0), x).unwrap()
        }
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(occupation(0.0, 1e14).unwrap(), 0.0);
        let t = 300.0;
        let omega = 2f64.ln() * K_B * t / HBAR;
        assert!((bose(t, omega).unwrap() - 1.0).abs() < 1e-12);
        let omega = 0.01 * K_B * t / HBAR;
        let classical = K_B * t / (HBAR * omega);
        assert!((bose(t, omega).unwrap() / classical - 1.0).abs() < 0.01);
        assert!(bose(-1.0, 1e14).is_err());
        assert!(bose(300.0, 0.0).is_err());
    }

    #[test]
    fn a_factor_vacuum_and_parity() {
        let vac = TMatrixProvider::new(ProviderKind::Thin, DielectricModel::Vacuum, 1e-7);
        let a = a_factor_at(&vac, 0, 1e6, 1e14, true).unwrap();
        assert!(a.iter().flatten().all(|z| *z == ZERO));
        let mut b0 = thin(0, 1.5, c(3.0, 1.0), 0.1);
        let mut b1 = b0;
        b1.n = 1;
        b0.n = 0;
        let a0 = a_factor(&b0, Branch::Evanescent, false);
        let a1 = a_factor(&b1, Branch::Evanescent, false);
        for p in 0..2 {
            for pp in 0..2 {
                assert_eq!(a0[p][pp], -a1[p][pp]);
            }
        }
    }

    #[test]
    fn quadratic_part_is_hermitian() {
        for &(kt, eps) in &[(0.3, c(4.0, 2.0)), (-0.8, c(-3.0, 0.5)), (0.0, c(2.0, 0.1))] {
            for n in -1..=1 {
                let b = thin(n, kt, eps, 0.4);
                let lin = a_factor(&b, Branch::Propagating, false);
                let full = a_factor(&b, Branch::Propagating, true);
                let qp: Vec<Complex64> = (0..4).map(|i| full[i / 2][i % 2] - lin[i / 2][i % 2]).collect();
                let herm = [[qp[0], qp[1]], [qp[2], qp[3]]];
                for p in 0..2 {
                    for pp in 0..2 {
                        assert!((herm[p][pp] - herm[pp][p].conj()).norm() < 1e-15);
                    }
                }
            }
        }
    }

    fn sum_f(kz: f64, omega: f64, d: f64, e1: Complex64, e2: Complex64, r: f64, quadratic: bool) -> f64 {
        let k = omega / C_LIGHT;
        let kt = kz / k;
        let x = k * r;
        let mut s = 0.0;
        for n in -1..=1 {
            let a2 = a_factor(&thin(n, kt, e2, x), Branch::Propagating, quadratic);
            for m in -2..=1 {
                let p = ModePoint::new(omega, kz, n, m).unwrap();
                s += f_kernel(&p, &thin(m, kt, e1, x), &thin(m + 1, kt, e1, x), &a2, d, quadratic).unwrap();
            }
        }
        s
    }

    fn sum_f_tilde(kz: f64, omega: f64, d: f64, e1: Complex64, e2: Complex64, r: f64) -> f64 {
        let k = omega / C_LIGHT;
        let kt = kz / k;
        let x = k * r;
        let mut s = 0.0;
        for n in -1..=1i32 {
            for m in -2..=1i32 {
                let p = ModePoint::new(omega, kz, n, m).unwrap();
                let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                s += sign
                    * f_tilde_kernel(&p, &thin(m, kt, e1, x), &thin(m + 1, kt, e1, x), &thin(n, kt, e2, x), d)
                        .unwrap();
            }
        }
        s
    }

    #[test]
    fn vacuum_kernels_vanish() {
        let omega = 2e14;
        let k = omega / C_LIGHT;
        let kz = 0.3 * k;
        let sic = c(5.0, 1.0);
        let one = c(1.0, 0.0);
        assert_eq!(sum_f(kz, omega, 2e-6, one, sic, 1e-7, true), 0.0);
        assert_eq!(sum_f(kz, omega, 2e-6, sic, one, 1e-7, true), 0.0);
        assert_eq!(sum_f_tilde(2.0 * k, omega, 2e-6, one, sic, 1e-7), 0.0);
        assert_eq!(sum_f_tilde(2.0 * k, omega, 2e-6, sic, one, 1e-7), 0.0);
        let p = ModePoint::new(omega, kz, 0, 0).unwrap();
        let a_vac = a_factor(&thin(0, 0.3, one, k * 1e-7), Branch::Propagating, true);
        let t2 = thin(0, 0.3, sic, k * 1e-7);
        assert_eq!(s_kernel(&p, &a_vac, &t2, &t2, 2e-6).unwrap(), 0.0);
    }

    #[test]
    fn spot_value_matches_independent_evaluation() {
        // (n, m) = (0, 0), k_z / k = 0.3, k d = 2, eps = 7 + 0.6 i on both
        // cylinders, k R = 0.05; reference evaluated at 40 digits.
        let omega = 1e14;
        let k = omega / C_LIGHT;
        let d = 2.0 / k;
        let eps = c(7.0, 0.6);
        let x = 0.05;
        let p = ModePoint::new(omega, 0.3 * k, 0, 0).unwrap();
        let a2 = a_factor(&thin(0, 0.3, eps, x), Branch::Propagating, true);
        let f = f_kernel(&p, &thin(0, 0.3, eps, x), &thin(1, 0.3, eps, x), &a2, d, true).unwrap();
        let reference = 4.824_288_874_535_293_8e-7;
        assert!((f - reference).abs() < 1e-10 * reference.abs(), "{f} vs {reference}");
    }

    #[test]
    fn summed_kernels_even_in_kz() {
        let omega = 1.5e14;
        let k = omega / C_LIGHT;
        let (e1, e2) = (c(4.0, 1.0), c(-2.0, 3.0));
        for &kt in &[0.2, 0.7, 0.95] {
            let a = sum_f(kt * k, omega, 3e-6, e1, e2, 2e-7, true);
            let b = sum_f(-kt * k, omega, 3e-6, e1, e2, 2e-7, true);
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} {b}");
        }
        for &kt in &[1.1, 2.0, 5.0] {
            let a = sum_f_tilde(kt * k, omega, 3e-6, e1, e2, 2e-7);
            let b = sum_f_tilde(-kt * k, omega, 3e-6, e1, e2, 2e-7);
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn mode_mapping_symmetry() {
        // (n, m, k_z) -> (-n, -m - 1, -k_z) leaves each signed kernel term invariant.
        let omega = 1.5e14;
        let k = omega / C_LIGHT;
        let (e1, e2) = (c(4.0, 1.0), c(-2.0, 3.0));
        let x = k * 2e-7;
        let d = 3e-6;
        for &kt in &[0.4, 1.7] {
            for n in -1..=1 {
                for m in -2..=1 {
                    let eval = |n: i32, m: i32, kt: f64| -> f64 {
                        let p = ModePoint::new(omega, kt * k, n, m).unwrap();
                        let t1m = thin(m, kt, e1, x);
                        let t1m1 = thin(m + 1, kt, e1, x);
                        let t2 = thin(n, kt, e2, x);
                        if kt.abs() < 1.0 {
                            let a2 = a_factor(&t2, Branch::Propagating, true);
                            f_kernel(&p, &t1m, &t1m1, &a2, d, true).unwrap()
                        } else {
                            let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * f_tilde_kernel(&p, &t1m, &t1m1, &t2, d).unwrap()
                        }
                    };
                    let a = eval(n, m, kt);
                    let b = eval(-n, -m - 1, -kt);
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "n={n} m={m} kt={kt}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn kernels_scale_as_x4() {
        let omega = 1e14;
        let k = omega / C_LIGHT;
        let (e1, e2) = (c(4.0, 1.0), c(3.0, 2.0));
        let base = sum_f(0.4 * k, omega, 2e-6, e1, e2, 1e-8, false);
        let half = sum_f(0.4 * k, omega, 2e-6, e1, e2, 0.5e-8, false);
        assert!((half / base - 1.0 / 16.0).abs() < 1e-12);
        let base = sum_f_tilde(1.4 * k, omega, 2e-6, e1, e2, 1e-8);
        let half = sum_f_tilde(1.4 * k, omega, 2e-6, e1, e2, 0.5e-8);
        assert!((half / base - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn evanescent_kernel_decays_exponentially() {
        let omega = 1e14;
        let k = omega / C_LIGHT;
        let (e1, e2) = (c(4.0, 1.0), c(3.0, 2.0));
        let kz = 3.0 * k;
        let q = k * 8f64.sqrt();
        let (d1, d2) = (20.0 / q, 25.0 / q);
        let f1 = sum_f_tilde(kz, omega, d1, e1, e2, 1e-8).abs();
        let f2 = sum_f_tilde(kz, omega, d2, e1, e2, 1e-8).abs();
        let bound = (-2.0 * q * (d2 - d1)).exp() * (d1 / d2);
        assert!(f2 / f1 <= bound * 1.5, "{} vs {}", f2 / f1, bound);
    }

    #[test]
    fn pair_kernel_oscillates_with_period_pi_over_q() {
        let omega = 1e14;
        let k = omega / C_LIGHT;
        let kz = 0.6 * k;
        let q = 0.8 * k;
        let eps = c(4.0, 1.0);
        let x = k * 1e-8;
        let eval = |d: f64| -> f64 {
            let mut s = 0.0;
            for n in -1..=1 {
                let a1 = a_factor(&thin(n, 0.6, eps, x), Branch::Propagating, false);
                for m in -2..=1 {
                    let p = ModePoint::new(omega, kz, n, m).unwrap();
                    s += s_kernel(&p, &a1, &thin(m, 0.6, eps, x), &thin(m + 1, 0.6, eps, x), d).unwrap();
                }
            }
            s
        };
        let mut zeros = Vec::new();
        let mut prev = eval(200.0 / q);
        let step = 0.01 / q;
        let mut d = 200.0 / q;
        while d < 230.0 / q {
            let next = eval(d + step);
            if prev * next < 0.0 {
                zeros.push(d + step * prev / (prev - next));
            }
            prev = next;
            d += step;
        }
        assert!(zeros.len() >= 6);
        let period = 2.0 * (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64;
        assert!((period * q / PI - 1.0).abs() < 0.02, "{}", period * q / PI);
    }

    #[test]
    fn rejects_wrong_branch() {
        let omega = 1e14;
        let k = omega / C_LIGHT;
        let t = TMatrixBlock::zero(0, 0.0, 0.1);
        let p = ModePoint::new(omega, 2.0 * k, 0, 0).unwrap();
        assert!(f_kernel(&p, &t, &t, &t.entries, 1e-6, false).is_err());
        let p = ModePoint::new(omega, 0.5 * k, 0, 0).unwrap();
        assert!(f_tilde_kernel(&p, &t, &t, &t, 1e-6).is_err());
        assert!(ModePoint::new(omega, k, 0, 0).is_err());
    }
}
