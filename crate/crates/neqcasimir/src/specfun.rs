//! Integer-order cylinder functions of real argument.
//!
//! `J_n` comes from Miller's backward recurrence, `Y_n` and `K_n` from upward
//! recurrence seeded by series, Steed continued fractions or Hankel asymptotics,
//! and `I_n` from a backward recurrence normalised by `I_0 + 2 sum I_k = e^x`.
//! Derivatives use `f'_n = (f_{n-1} - f_{n+1}) / 2`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};
use thiserror::Error;

/// Largest supported |order|.
pub const MAX_ORDER: usize = 64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ASYMPTOTIC_X: f64 = 25.0;
const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument {x} outside the domain of {function}")]
    Domain { function: &'static str, x: f64 },
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: i64, max: usize },
    #[error("continued fraction for {function} did not converge at x = {x}")]
    NoConvergence { function: &'static str, x: f64 },
}

fn check_order(order: i32) -> Result<usize, SpecFunError> {
    let n = order.unsigned_abs() as usize;
    if n > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { order: order as i64, max: MAX_ORDER });
    }
    Ok(n)
}

fn reflect(order: i32, value: f64) -> f64 {
    if order < 0 && order % 2 != 0 {
        -value
    } else {
        value
    }
}

fn positive(function: &'static str, x: f64) -> Result<(), SpecFunError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecFunError::Domain { function, x });
    }
    Ok(())
}

/// Hankel asymptotic expansion for orders 0 and 1, returning (J, Y).
fn hankel_asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 * p.abs() {
            break;
        }
    }
    let phase = (nu as f64 / 2.0 + 0.25) * PI;
    let (s, c) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = c * cp + s * sp;
    let sin_chi = s * cp - c * sp;
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

/// `J_0(x), ..., J_nmax(x)` for `x >= 0`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecFunError::Domain { function: "bessel_j", x });
    }
    if nmax > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { order: nmax as i64, max: MAX_ORDER });
    }
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if x >= ASYMPTOTIC_X && (nmax as f64) < x {
        let (j0, _) = hankel_asymptotic(0, x);
        out[0] = j0;
        if nmax >= 1 {
            out[1] = hankel_asymptotic(1, x).0;
        }
        for k in 1..nmax {
            out[k + 1] = 2.0 * k as f64 / x * out[k] - out[k - 1];
        }
        return Ok(out);
    }
    let top = (nmax as f64).max(x);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let order = k - 1;
        if order <= nmax {
            out[order] = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE_ABOVE {
            j_cur *= RESCALE_BY;
            j_next *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(order) {
                *v *= RESCALE_BY;
            }
        }
    }
    norm += j_cur;
    let scale = if x >= ASYMPTOTIC_X {
        let (j0, _) = hankel_asymptotic(0, x);
        let (j1, _) = hankel_asymptotic(1, x);
        if j0.abs() >= j1.abs() || nmax == 0 {
            j0 / out[0]
        } else {
            j1 / out[1]
        }
    } else {
        1.0 / norm
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Steed's CF2 for order zero: returns (p, q) with `(J' + iY')/(J + iY) = p + iq`.
fn steed_cf2_jy(x: f64) -> Result<(f64, f64), SpecFunError> {
    const FPMIN: f64 = 1e-300;
    let xi = 1.0 / x;
    let mut a = 0.25;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..100_000 {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < 1e-16 {
            return Ok((p, q));
        }
    }
    Err(SpecFunError::NoConvergence { function: "bessel_y", x })
}

fn y01_series(x: f64, j0: f64, j1: f64) -> (f64, f64) {
    let lg = (0.5 * x).ln();
    let z = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -z / (kf * kf);
        harmonic += 1.0 / kf;
        let t = -term * harmonic;
        s0 += t;
        if t.abs() < 1e-18 * s0.abs() {
            break;
        }
    }
    let y0 = FRAC_2_PI * ((lg + EULER_GAMMA) * j0 + s0);
    let half = 0.5 * x;
    let mut t1 = half;
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = 1.0 - EULER_GAMMA;
    let mut s1 = t1 * (psi_a + psi_b);
    for k in 1..60 {
        let kf = k as f64;
        t1 *= -z / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
        let t = t1 * (psi_a + psi_b);
        s1 += t;
        if t.abs() < 1e-18 * s1.abs() {
            break;
        }
    }
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * lg * j1 - s1 / PI;
    (y0, y1)
}

/// `Y_0(x), ..., Y_nmax(x)` for `x > 0`.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    positive("bessel_y", x)?;
    if nmax > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { order: nmax as i64, max: MAX_ORDER });
    }
    let (y0, y1) = if x >= ASYMPTOTIC_X {
        (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1)
    } else {
        let j = bessel_j_seq(1, x)?;
        if x < 2.0 {
            y01_series(x, j[0], j[1])
        } else {
            let (p, q) = steed_cf2_jy(x)?;
            let y0 = (p * j[0] + j[1]) / q;
            (y0, -(q * j[0] + p * y0))
        }
    };
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(y0);
    if nmax >= 1 {
        out.push(y1);
    }
    for k in 1..nmax {
        let next = 2.0 * k as f64 / x * out[k] - out[k - 1];
        out.push(next);
    }
    Ok(out)
}

/// `e^{-x} I_0(x), ..., e^{-x} I_nmax(x)` for `x >= 0`.
pub fn bessel_i_scaled_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecFunError::Domain { function: "bessel_i", x });
    }
    if nmax > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { order: nmax as i64, max: MAX_ORDER });
    }
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let start = nmax + 30 + (12.0 * x.sqrt()) as usize + (60.0 * nmax as f64).sqrt() as usize;
    let mut i_next = 0.0;
    let mut i_cur = 1e-30;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let i_prev = 2.0 * k as f64 / x * i_cur + i_next;
        i_next = i_cur;
        i_cur = i_prev;
        let order = k - 1;
        if order <= nmax {
            out[order] = i_cur;
        }
        if order > 0 {
            norm += 2.0 * i_cur;
        }
        if i_cur > RESCALE_ABOVE {
            i_cur *= RESCALE_BY;
            i_next *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(order) {
                *v *= RESCALE_BY;
            }
        }
    }
    norm += i_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    Ok(out)
}

fn k01_series(x: f64) -> (f64, f64) {
    let lg = (0.5 * x).ln();
    let z = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut s0 = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= z / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        s0 += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let half = 0.5 * x;
    let mut t1 = half;
    let mut i1 = t1;
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = 1.0 - EULER_GAMMA;
    let mut s1 = t1 * (psi_a + psi_b);
    for k in 1..60 {
        let kf = k as f64;
        t1 *= z / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
        i1 += t1;
        s1 += t1 * (psi_a + psi_b);
        if t1 < 1e-18 * i1 {
            break;
        }
    }
    let k1 = 1.0 / x + lg * i1 - 0.5 * s1;
    (k0, k1)
}

/// Steed's CF2 for the modified function, returning `e^x K_0` and `e^x K_1`.
fn steed_cf2_k_scaled(x: f64) -> Result<(f64, f64), SpecFunError> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            h *= a1;
            let k0 = (PI / (2.0 * x)).sqrt() / s;
            let k1 = k0 * (x + 0.5 - h) / x;
            return Ok((k0, k1));
        }
    }
    Err(SpecFunError::NoConvergence { function: "bessel_k", x })
}

/// `e^x K_0(x), ..., e^x K_nmax(x)` for `x > 0`.
pub fn bessel_k_scaled_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    positive("bessel_k", x)?;
    if nmax > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { order: nmax as i64, max: MAX_ORDER });
    }
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        steed_cf2_k_scaled(x)?
    };
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(k0);
    if nmax >= 1 {
        out.push(k1);
    }
    for k in 1..nmax {
        let next = out[k - 1] + 2.0 * k as f64 / x * out[k];
        out.push(next);
    }
    Ok(out)
}

/// `K_0(x), ..., K_nmax(x)` for `x > 0`.
pub fn bessel_k_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    let e = (-x).exp();
    Ok(bessel_k_scaled_seq(nmax, x)?.into_iter().map(|v| v * e).collect())
}

/// `I_0(x), ..., I_nmax(x)` for `x >= 0`.
pub fn bessel_i_seq(nmax: usize, x: f64) -> Result<Vec<f64>, SpecFunError> {
    let e = x.exp();
    Ok(bessel_i_scaled_seq(nmax, x)?.into_iter().map(|v| v * e).collect())
}

/// `H^(1)_0(x), ..., H^(1)_nmax(x)`.
pub fn hankel1_seq(nmax: usize, x: f64) -> Result<Vec<Complex64>, SpecFunError> {
    let j = bessel_j_seq(nmax, x)?;
    let y = bessel_y_seq(nmax, x)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

pub fn bessel_j(order: i32, x: f64) -> Result<f64, SpecFunError> {
    let n = check_order(order)?;
    Ok(reflect(order, bessel_j_seq(n, x)?[n]))
}

pub fn bessel_y(order: i32, x: f64) -> Result<f64, SpecFunError> {
    let n = check_order(order)?;
    Ok(reflect(order, bessel_y_seq(n, x)?[n]))
}

pub fn hankel1(order: i32, x: f64) -> Result<Complex64, SpecFunError> {
    Ok(Complex64::new(bessel_j(order, x)?, bessel_y(order, x)?))
}

pub fn bessel_i(order: i32, x: f64) -> Result<f64, SpecFunError> {
    let n = check_order(order)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    positive("bessel_i", x)?;
    Ok(bessel_i_seq(n, x)?[n])
}

pub fn bessel_k(order: i32, x: f64) -> Result<f64, SpecFunError> {
    let n = check_order(order)?;
    Ok(bessel_k_seq(n, x)?[n])
}

fn derivative(f: impl Fn(i32) -> Result<f64, SpecFunError>, order: i32) -> Result<f64, SpecFunError> {
    Ok(0.5 * (f(order - 1)? - f(order + 1)?))
}

pub fn bessel_j_prime(order: i32, x: f64) -> Result<f64, SpecFunError> {
    derivative(|n| bessel_j(n, x), order)
}

pub fn bessel_y_prime(order: i32, x: f64) -> Result<f64, SpecFunError> {
    derivative(|n| bessel_y(n, x), order)
}

pub fn hankel1_prime(order: i32, x: f64) -> Result<Complex64, SpecFunError> {
    Ok(Complex64::new(bessel_j_prime(order, x)?, bessel_y_prime(order, x)?))
}

/// `I'_n = (I_{n-1} + I_{n+1}) / 2`.
pub fn bessel_i_prime(order: i32, x: f64) -> Result<f64, SpecFunError> {
    Ok(0.5 * (bessel_i(order - 1, x)? + bessel_i(order + 1, x)?))
}

/// `K'_n = -(K_{n-1} + K_{n+1}) / 2`.
pub fn bessel_k_prime(order: i32, x: f64) -> Result<f64, SpecFunError> {
    Ok(-0.5 * (bessel_k(order - 1, x)? + bessel_k(order + 1, x)?))
}

/// Logarithmic derivative `J'_n(z) / J_n(z)` at complex argument.
pub fn bessel_j_logderiv(order: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    let n = check_order(order)?;
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
        return Err(SpecFunError::Domain { function: "bessel_j_logderiv", x: z.norm() });
    }
    let top = (n as f64).max(z.norm());
    let start = (top + 40.0 + (80.0 * top).sqrt()) as usize;
    let mut ratio = Complex64::new(0.0, 0.0);
    let lowest = n.max(1);
    for k in (lowest..=start).rev() {
        ratio = (2.0 * k as f64 / z - ratio).inv();
    }
    if n == 0 {
        Ok(-ratio)
    } else {
        Ok(ratio.inv() - n as f64 / z)
    }
}

/// Signed-order view over a precomputed sequence, applying `f_{-n} = (-1)^n f_n`.
pub fn signed<T>(seq: &[T], order: i32) -> T
where
    T: Copy + std::ops::Neg<Output = T>,
{
    let v = seq[order.unsigned_abs() as usize];
    if order < 0 && order % 2 != 0 {
        -v
    } else {
        v
    }
}
