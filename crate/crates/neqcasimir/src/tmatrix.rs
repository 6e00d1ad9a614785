//! Cylinder scattering amplitudes `T^{PP'}_{n,k_z}` over polarizations {M, N}.

use crate::materials::{epsilon, DielectricModel, MaterialError};
use crate::specfun::{self, SpecFunError};
use crate::units::C_LIGHT;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub const M: usize = 0;
pub const N: usize = 1;

const CONDITION_LIMIT: f64 = 1e10;
const SINGULAR_LIMIT: f64 = 1e15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TMatrixError {
    #[error("thin-cylinder expansion supports |n| <= 1, got n = {0}")]
    UnsupportedOrder(i32),
    #[error("size parameter x = omega R / c must be positive, got {0}")]
    SizeParameter(f64),
    #[error(
        "boundary system singular for n = {n}, k_z/k = {kz_tilde}, x = {x}: pivot {pivot:e}, condition estimate {condition:e}"
    )]
    Conditioning { n: i32, kz_tilde: f64, x: f64, pivot: f64, condition: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

/// 2x2 block indexed by `[P][P']` with `P` in {M, N}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TMatrixBlock {
    pub entries: [[Complex64; 2]; 2],
    pub n: i32,
    pub kz_tilde: f64,
    pub x: f64,
}

impl TMatrixBlock {
    pub fn zero(n: i32, kz_tilde: f64, x: f64) -> Self {
        TMatrixBlock { entries: [[Complex64::new(0.0, 0.0); 2]; 2], n, kz_tilde, x }
    }

    pub fn get(&self, p: usize, pp: usize) -> Complex64 {
        self.entries[p][pp]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |eigenvalue| deviation of `1 + 2T` from the unit circle.
    pub fn unitarity_defect(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let a = one + 2.0 * self.entries[0][0];
        let b = 2.0 * self.entries[0][1];
        let c = 2.0 * self.entries[1][0];
        let d = one + 2.0 * self.entries[1][1];
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let l1 = 0.5 * (tr + disc);
        let l2 = 0.5 * (tr - disc);
        (l1.norm() - 1.0).abs().max((l2.norm() - 1.0).abs())
    }
}

/// Small-radius expansion, exact in the `x^2` order, valid for |n| <= 1.
pub fn thin_t(n: i32, kz_tilde: f64, eps: Complex64, mu: Complex64, x: f64) -> Result<TMatrixBlock, TMatrixError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(TMatrixError::SizeParameter(x));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let x2 = x * x;
    let kt2 = kz_tilde * kz_tilde;
    let mut block = TMatrixBlock::zero(n, kz_tilde, x);
    match n {
        0 => {
            block.entries[N][N] = -i * PI / 4.0 * (eps - one) * (kt2 - 1.0) * x2;
            block.entries[M][M] = -i * PI / 4.0 * (mu - one) * (kt2 - 1.0) * x2;
        }
        1 | -1 => {
            let den = (eps + one) * (mu + one);
            block.entries[N][N] =
                i * PI / 4.0 * (kt2 * (mu + one) * (eps - one) + (mu - one) * (eps + one)) / den * x2;
            block.entries[M][M] =
                i * PI / 4.0 * (kt2 * (mu - one) * (eps + one) + (mu + one) * (eps - one)) / den * x2;
            let off = i * PI / 2.0 * (eps * mu - one) * kz_tilde / den * x2 * n as f64;
            block.entries[M][N] = off;
            block.entries[N][M] = off;
        }
        other => return Err(TMatrixError::UnsupportedOrder(other)),
    }
    Ok(block)
}

fn principal_sqrt_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Outside-medium cylinder data normalised by `H_n`: `H'_n / H_n`, `J_n / H_n`, `J'_n / H_n`.
struct OutsideWave {
    h_log: Complex64,
    j_over_h: Complex64,
    jp_over_h: Complex64,
}

fn outside_wave(n: i32, kz_tilde: f64, x: f64) -> Result<(Complex64, OutsideWave), TMatrixError> {
    let na = n.unsigned_abs() as usize;
    let s2 = 1.0 - kz_tilde * kz_tilde;
    if s2 > 0.0 {
        let big_x = x * s2.sqrt();
        let j = specfun::bessel_j_seq(na + 1, big_x)?;
        let y = specfun::bessel_y_seq(na + 1, big_x)?;
        let jn = specfun::signed(&j, n);
        let yn = specfun::signed(&y, n);
        let jp = 0.5 * (specfun::signed(&j, n - 1) - specfun::signed(&j, n + 1));
        let yp = 0.5 * (specfun::signed(&y, n - 1) - specfun::signed(&y, n + 1));
        let h = Complex64::new(jn, yn);
        let hp = Complex64::new(jp, yp);
        Ok((
            Complex64::new(big_x, 0.0),
            OutsideWave { h_log: hp / h, j_over_h: jn / h, jp_over_h: jp / h },
        ))
    } else {
        let yv = x * (-s2).sqrt();
        let ii = specfun::bessel_i_scaled_seq(na + 1, yv)?;
        let kk = specfun::bessel_k_scaled_seq(na + 1, yv)?;
        let i_n = ii[na];
        let k_n = kk[na];
        let i_p = 0.5 * (ii[(na as i32 - 1).unsigned_abs() as usize] + ii[na + 1]);
        let k_p = -0.5 * (kk[(na as i32 - 1).unsigned_abs() as usize] + kk[na + 1]);
        let minus_i = Complex64::new(0.0, -1.0);
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let ratio = Complex64::new(0.0, PI / 2.0 * parity) * (i_n / k_n) * (2.0 * yv).exp();
        Ok((
            Complex64::new(0.0, yv),
            OutsideWave { h_log: minus_i * k_p / k_n, j_over_h: ratio, jp_over_h: minus_i * i_p / i_n * ratio },
        ))
    }
}

/// Solves `a x = b` for 4x4 complex `a` with partial pivoting; returns the smallest
/// pivot magnitude relative to the largest matrix entry.
fn solve4(mut a: [[Complex64; 4]; 4], mut rhs: [[Complex64; 2]; 4]) -> ([[Complex64; 2]; 4], f64, f64) {
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut min_pivot = f64::INFINITY;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&r1, &r2| a[r1][col].norm().partial_cmp(&a[r2][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        let p = a[col][col];
        min_pivot = min_pivot.min(p.norm() / scale);
        if p.norm() == 0.0 {
            return (rhs, 0.0, f64::INFINITY);
        }
        for r in (col + 1)..4 {
            let factor = a[r][col] / p;
            for c in col..4 {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            for k in 0..2 {
                let v = rhs[col][k];
                rhs[r][k] -= factor * v;
            }
        }
    }
    for col in (0..4).rev() {
        for k in 0..2 {
            let mut s = rhs[col][k];
            for c in (col + 1)..4 {
                s -= a[col][c] * rhs[c][k];
            }
            rhs[col][k] = s / a[col][col];
        }
    }
    let condition = if min_pivot > 0.0 { 1.0 / min_pivot } else { f64::INFINITY };
    (rhs, min_pivot, condition)
}

/// Full boundary-condition solution for a homogeneous isotropic cylinder at oblique incidence.
pub fn full_t(n: i32, kz_tilde: f64, eps: Complex64, mu: Complex64, x: f64) -> Result<TMatrixBlock, TMatrixError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(TMatrixError::SizeParameter(x));
    }
    let one = Complex64::new(1.0, 0.0);
    if eps == one && mu == one {
        return Ok(TMatrixBlock::zero(n, kz_tilde, x));
    }
    let (big_x0, out) = outside_wave(n, kz_tilde, x)?;
    let refr = principal_sqrt_upper(eps * mu);
    let big_x1 = principal_sqrt_upper((eps * mu - kz_tilde * kz_tilde) * x * x);
    let d_in = specfun::bessel_j_logderiv(n, big_x1)?;
    let eta = principal_sqrt_upper(eps / mu);
    let nf = n as f64;
    let a0 = nf * kz_tilde / big_x0;
    let a1 = nf * kz_tilde / (refr * big_x1);
    let r0 = big_x0 / x;
    let r1 = big_x1 / (refr * x);
    let zero = Complex64::new(0.0, 0.0);
    let h = out.h_log;
    let jr = out.j_over_h;
    let jp = out.jp_over_h;
    let a = [
        [-h, -a0, d_in, a1],
        [zero, r0, zero, -r1],
        [-a0, -h, eta * a1, eta * d_in],
        [r0, zero, -eta * r1, zero],
    ];
    let rhs = [
        [jp, a0 * jr],
        [zero, -r0 * jr],
        [a0 * jr, jp],
        [-r0 * jr, zero],
    ];
    let (sol, pivot, condition) = solve4(a, rhs);
    let finite = sol.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite());
    if condition > SINGULAR_LIMIT || !finite {
        return Err(TMatrixError::Conditioning { n, kz_tilde, x, pivot, condition });
    }
    if condition > CONDITION_LIMIT {
        log::debug!("ill-conditioned boundary system (n={n}, kz/k={kz_tilde}, x={x}, cond~{condition:.2e})");
    }
    let mut block = TMatrixBlock::zero(n, kz_tilde, x);
    for p in 0..2 {
        for pp in 0..2 {
            block.entries[p][pp] = sol[p][pp];
        }
    }
    Ok(block)
}

/// Source of T-matrix blocks for one cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Thin,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TMatrixProvider {
    pub kind: ProviderKind,
    pub material: DielectricModel,
    pub radius: f64,
    pub mu: Complex64,
}

/// Size parameter above which the thin expansion is flagged.
pub const THIN_WARNING_X: f64 = 0.3;

impl TMatrixProvider {
    pub fn new(kind: ProviderKind, material: DielectricModel, radius: f64) -> Self {
        TMatrixProvider { kind, material, radius, mu: Complex64::new(1.0, 0.0) }
    }

    pub fn size_parameter(&self, omega: f64) -> f64 {
        omega * self.radius / C_LIGHT
    }

    /// Highest order with non-vanishing amplitudes, if bounded.
    pub fn order_limit(&self) -> Option<usize> {
        match self.kind {
            ProviderKind::Thin => Some(1),
            ProviderKind::Full => None,
        }
    }

    /// Block at `(n, k_z / k, omega)`; the thin provider returns zero beyond |n| = 1.
    pub fn block(&self, n: i32, kz_tilde: f64, omega: f64) -> Result<TMatrixBlock, TMatrixError> {
        let x = self.size_parameter(omega);
        if self.material.is_vacuum() && self.mu == Complex64::new(1.0, 0.0) {
            return Ok(TMatrixBlock::zero(n, kz_tilde, x));
        }
        let eps = epsilon(&self.material, omega)?;
        match self.kind {
            ProviderKind::Thin if n.abs() > 1 => Ok(TMatrixBlock::zero(n, kz_tilde, x)),
            ProviderKind::Thin => thin_t(n, kz_tilde, eps, self.mu, x),
            ProviderKind::Full => full_t(n, kz_tilde, eps, self.mu, x),
        }
    }

    /// Blocks for orders `lo..=hi`.
    pub fn blocks(&self, lo: i32, hi: i32, kz_tilde: f64, omega: f64) -> Result<Vec<TMatrixBlock>, TMatrixError> {
        let x = self.size_parameter(omega);
        if self.material.is_vacuum() && self.mu == Complex64::new(1.0, 0.0) {
            return Ok((lo..=hi).map(|n| TMatrixBlock::zero(n, kz_tilde, x)).collect());
        }
        let eps = epsilon(&self.material, omega)?;
        let mut out = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        for n in lo..=hi {
            let block = match self.kind {
                ProviderKind::Thin if n.abs() > 1 => TMatrixBlock::zero(n, kz_tilde, x),
                ProviderKind::Thin => thin_t(n, kz_tilde, eps, self.mu, x)?,
                ProviderKind::Full => full_t(n, kz_tilde, eps, self.mu, x)?,
            };
            out.push(block);
        }
        Ok(out)
    }
}

/// Block of order `-n` from order `n`: diagonal even, off-diagonal odd.
pub fn mirror(block: &TMatrixBlock) -> TMatrixBlock {
    let mut b = *block;
    b.n = -block.n;
    b.entries[M][N] = -block.entries[M][N];
    b.entries[N][M] = -block.entries[N][M];
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_scatters_nothing() {
        for n in -1..=1 {
            assert!(thin_t(n, 0.4, c(1.0, 0.0), c(1.0, 0.0), 0.1).unwrap().is_zero());
            assert!(full_t(n, 0.4, c(1.0, 0.0), c(1.0, 0.0), 0.1).unwrap().is_zero());
        }
    }

    #[test]
    fn thin_symmetries() {
        let eps = c(3.0, 0.7);
        let one = c(1.0, 0.0);
        let t = thin_t(1, 0.0, eps, one, 0.1).unwrap();
        assert_eq!(t.entries[M][N], c(0.0, 0.0));
        let tp = thin_t(1, 0.6, eps, one, 0.1).unwrap();
        let tm = thin_t(-1, 0.6, eps, one, 0.1).unwrap();
        assert_eq!(tp.entries[M][N], tp.entries[N][M]);
        assert_eq!(tp.entries[M][N], -tm.entries[M][N]);
        assert_eq!(tp.entries[N][N], tm.entries[N][N]);
        assert!(matches!(thin_t(2, 0.1, eps, one, 0.1), Err(TMatrixError::UnsupportedOrder(2))));
    }

    #[test]
    fn thin_scales_as_x_squared() {
        let eps = c(5.0, 1.0);
        let one = c(1.0, 0.0);
        for n in -1..=1 {
            let base = thin_t(n, 0.3, eps, one, 1e-4).unwrap();
            for &x in &[1e-3, 1e-2] {
                let t = thin_t(n, 0.3, eps, one, x).unwrap();
                for p in 0..2 {
                    for pp in 0..2 {
                        let a = t.entries[p][pp] / (x * x);
                        let b = base.entries[p][pp] / 1e-8;
                        assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-300));
                    }
                }
            }
        }
    }

    #[test]
    fn full_reduces_to_thin() {
        let one = c(1.0, 0.0);
        for &kt in &[0.0, 0.5, 0.9, 2.0] {
            for &eps in &[c(2.0, 0.0), c(3.0, 1.0), c(-20.0, 5.0)] {
                for n in -1..=1 {
                    let x = 1e-3;
                    let f = full_t(n, kt, eps, one, x).unwrap();
                    let t = thin_t(n, kt, eps, one, x).unwrap();
                    for p in 0..2 {
                        for pp in 0..2 {
                            let scale = t.max_abs();
                            let diff = (f.entries[p][pp] - t.entries[p][pp]).norm();
                            assert!(diff <= 1e-3 * scale, "n={n} kt={kt} eps={eps} [{p}{pp}] {diff:e} vs {scale:e}");
                        }
                    }
                }
            }
        }
        let f = full_t(0, 0.5, c(2.0, 0.0), one, 0.01).unwrap();
        let t = thin_t(0, 0.5, c(2.0, 0.0), one, 0.01).unwrap();
        assert!((f.entries[N][N] - t.entries[N][N]).norm() < 1e-3 * t.entries[N][N].norm());
    }

    #[test]
    fn full_convergence_order_x4() {
        let one = c(1.0, 0.0);
        let eps = c(4.0, 0.5);
        let diff = |x: f64| {
            let f = full_t(1, 0.4, eps, one, x).unwrap();
            let t = thin_t(1, 0.4, eps, one, x).unwrap();
            (f.entries[N][N] - t.entries[N][N]).norm()
        };
        let ratio = diff(2e-2) / diff(1e-2);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn full_is_unitary_and_symmetric_for_lossless() {
        let one = c(1.0, 0.0);
        for n in -3..=3 {
            for &kt in &[0.0, 0.3, 0.8] {
                for &x in &[0.05, 0.8, 2.5] {
                    let t = full_t(n, kt, c(4.0, 0.0), one, x).unwrap();
                    assert!(t.unitarity_defect() < 1e-8, "n={n} kt={kt} x={x}");
                    assert!((t.entries[M][N] - t.entries[N][M]).norm() < 1e-10 * t.max_abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn full_parity_in_n_and_kz() {
        let one = c(1.0, 0.0);
        let eps = c(-30.0, 40.0);
        for &kt in &[0.4, 1.7] {
            let a = full_t(2, kt, eps, one, 0.3).unwrap();
            let b = full_t(-2, kt, eps, one, 0.3).unwrap();
            let cc = full_t(2, -kt, eps, one, 0.3).unwrap();
            let tol = 1e-10 * a.max_abs();
            assert!((a.entries[N][N] - b.entries[N][N]).norm() < tol);
            assert!((a.entries[M][N] + b.entries[M][N]).norm() < tol);
            assert!((a.entries[M][M] - cc.entries[M][M]).norm() < tol);
            assert!((a.entries[N][M] + cc.entries[N][M]).norm() < tol);
        }
    }

    #[test]
    fn provider_blocks_match_single_calls() {
        let p = TMatrixProvider::new(ProviderKind::Full, DielectricModel::tungsten_2400k(), 2e-8);
        let w = 2e15;
        let blocks = p.blocks(-3, 3, 0.6, w).unwrap();
        for (i, n) in (-3..=3).enumerate() {
            let single = p.block(n, 0.6, w).unwrap();
            for pp in 0..2 {
                for q in 0..2 {
                    let d = (blocks[i].entries[pp][q] - single.entries[pp][q]).norm();
                    assert!(d <= 1e-12 * single.max_abs().max(1e-300));
                }
            }
        }
        let thin = TMatrixProvider::new(ProviderKind::Thin, DielectricModel::sic(), 1e-7);
        assert!(thin.block(2, 0.5, 1e14).unwrap().is_zero());
    }
}
