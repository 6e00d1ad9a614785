//! Deterministic globally adaptive Gauss-Kronrod (7/15) quadrature over vector integrands.

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0, max_panels: 400 }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError<E> {
    #[error("integrand failed: {0}")]
    Integrand(E),
    #[error(
        "quadrature did not converge after {panels} panels: estimate {estimate:e}, error {error:e}, \
         worst subinterval [{worst_a:e}, {worst_b:e}] with error {worst_error:e}"
    )]
    NonConvergence {
        panels: usize,
        estimate: f64,
        error: f64,
        worst_a: f64,
        worst_b: f64,
        worst_error: f64,
    },
}

#[derive(Debug, Clone)]
struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: f64,
}

/// One 15-point Kronrod evaluation returning the Kronrod estimate and the
/// summed component-wise |Kronrod - Gauss| difference.
pub fn gk15<const K: usize, E, F>(f: &mut F, a: f64, b: f64) -> Result<([f64; K], f64), E>
where
    F: FnMut(f64) -> Result<[f64; K], E>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    for c in 0..K {
        kron[c] = WGK[7] * fc[c];
        gauss[c] = WG[3] * fc[c];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx)?;
        let f2 = f(centre + dx)?;
        for c in 0..K {
            let s = f1[c] + f2[c];
            kron[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0;
    for c in 0..K {
        kron[c] *= half;
        gauss[c] *= half;
        err += (kron[c] - gauss[c]).abs();
    }
    Ok((kron, err))
}

/// Location and size of the worst panel when refinement stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shortfall {
    pub worst_a: f64,
    pub worst_b: f64,
    pub worst_error: f64,
}

/// Globally adaptive integration over the segments delimited by `breaks`
/// (sorted, at least two points). Convergence is declared when the summed
/// error estimate is below `max(tol.abs, tol.rel * sum_k |I_k|)`.
pub fn integrate<const K: usize, E, F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate<K>, QuadError<E>>
where
    F: FnMut(f64) -> Result<[f64; K], E>,
{
    let (est, shortfall) = integrate_best_effort(f, breaks, tol).map_err(QuadError::Integrand)?;
    match shortfall {
        None => Ok(est),
        Some(s) => Err(QuadError::NonConvergence {
            panels: est.panels,
            estimate: est.value.iter().sum(),
            error: est.error,
            worst_a: s.worst_a,
            worst_b: s.worst_b,
            worst_error: s.worst_error,
        }),
    }
}

/// As [`integrate`], but returns the current estimate together with the
/// worst panel instead of failing when the panel budget is exhausted.
pub fn integrate_best_effort<const K: usize, E, F>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(Estimate<K>, Option<Shortfall>), E>
where
    F: FnMut(f64) -> Result<[f64; K], E>,
{
    assert!(breaks.len() >= 2, "need at least one segment");
    let mut panels: Vec<Panel<K>> = Vec::with_capacity(tol.max_panels + breaks.len());
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        panels.push(Panel { a: w[0], b: w[1], value, error });
    }
    loop {
        let (total, err) = summarize(&panels);
        let estimate = Estimate { value: total, error: err, evaluations, panels: panels.len() };
        let scale: f64 = total.iter().map(|v| v.abs()).sum();
        let target = tol.abs.max(tol.rel * scale);
        if err <= target || (scale == 0.0 && err == 0.0) {
            return Ok((estimate, None));
        }
        let worst = panels
            .iter()
            .enumerate()
            .fold(0usize, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let p = panels[worst].clone();
        let mid = 0.5 * (p.a + p.b);
        let too_narrow = (p.b - p.a) <= 1e-13 * (p.a.abs() + p.b.abs()).max(1e-300);
        if panels.len() >= tol.max_panels || too_narrow || mid <= p.a || mid >= p.b {
            let shortfall = Shortfall { worst_a: p.a, worst_b: p.b, worst_error: p.error };
            return Ok((estimate, Some(shortfall)));
        }
        let (lv, le) = gk15(&mut f, p.a, mid)?;
        let (rv, re) = gk15(&mut f, mid, p.b)?;
        evaluations += 30;
        panels[worst] = Panel { a: p.a, b: mid, value: lv, error: le };
        panels.insert(worst + 1, Panel { a: mid, b: p.b, value: rv, error: re });
    }
}

/// Pairwise (tree) summation so results do not depend on accumulation order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn summarize<const K: usize>(panels: &[Panel<K>]) -> ([f64; K], f64) {
    let mut total = [0.0; K];
    let mut column = Vec::with_capacity(panels.len());
    for (c, slot) in total.iter_mut().enumerate() {
        column.clear();
        column.extend(panels.iter().map(|p| p.value[c]));
        *slot = pairwise_sum(&column);
    }
    let errs: Vec<f64> = panels.iter().map(|p| p.error).collect();
    (total, pairwise_sum(&errs))
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<E, F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<(f64, f64), QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let est = integrate(|x| f(x).map(|v| [v]), breaks, tol)?;
    Ok((est.value[0], est.error))
}

/// Fixed composite 15-point Kronrod rule over `panels` equal subintervals.
pub fn fixed_panels<E, F>(mut f: F, a: f64, b: f64, panels: usize) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let width = (b - a) / panels as f64;
    let mut parts = Vec::with_capacity(panels);
    for i in 0..panels {
        let lo = a + width * i as f64;
        let (v, _) = gk15(&mut |x| f(x).map(|v| [v]), lo, lo + width)?;
        parts.push(v[0]);
    }
    Ok(pairwise_sum(&parts))
}
