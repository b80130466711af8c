//! Globally adaptive Gauss–Kronrod (7/15) quadrature and the radial reduction of
//! integrals over balls and annuli.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub epsrel: T,
    pub epsabs: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self { epsrel: T::default_quad_rel(), epsabs: T::zero(), max_intervals: 2000 }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn with_epsrel(mut self, epsrel: T) -> Self {
        self.epsrel = epsrel;
        self
    }

    pub fn with_epsabs(mut self, epsabs: T) -> Self {
        self.epsabs = epsabs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: Fn(T) -> Result<T>>(f: &F, a: T, b: T) -> Result<Panel<T>> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center)?;
    let mut resg = fc * T::lit(WG[3]);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resabs = resk.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + T::lit(WGK[j]) * (f1 + f2);
        resabs = resabs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = resk * half;
    let mut resasc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc = resasc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hl = half_len.abs();
    let value = resk * half_len;
    resabs = resabs * hl;
    resasc = resasc * hl;
    let mut error = ((resk - resg) * half_len).abs();
    if resasc != T::zero() && error != T::zero() {
        error = resasc * T::one().min((T::lit(200.0) * error / resasc).powf(T::lit(1.5)));
    }
    let roundoff = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(roundoff);
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> Result<T>>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, seeding the adaptive partition
/// with the given increasing break points.
pub fn integrate_with_breaks<T: Real, F: Fn(T) -> Result<T>>(
    f: F,
    breaks: &[T],
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidInput("quadrature break points must be increasing".into()));
    }
    let mut panels = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            panels.push(kronrod(&f, w[0], w[1])?);
        }
    }
    let mut evaluations = 15 * panels.len();
    if panels.is_empty() {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), intervals: 0, evaluations });
    }
    loop {
        let value = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
        let error = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
        let target = opts.epsabs.max(opts.epsrel * value.abs());
        if error <= target {
            return Ok(QuadResult { value, error, intervals: panels.len(), evaluations });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let mid = T::lit(0.5) * (p.a + p.b);
                mid > p.a && mid < p.b && (p.b - p.a) > T::lit(100.0) * T::epsilon() * p.a.abs().max(p.b.abs())
            })
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or((usize::MAX, &panels[0]));
        if worst == usize::MAX || panels.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure { estimate: value.to_f64_lossy(), error: error.to_f64_lossy() });
        }
        let p = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (p.a + p.b);
        panels.push(kronrod(&f, p.a, mid)?);
        panels.push(kronrod(&f, mid, p.b)?);
        evaluations += 30;
    }
}

/// Surface area of the unit sphere in R^n.
pub fn sphere_area<T: Real>(n: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    // area(n) = 2 pi / (n - 2) * area(n - 2), area(1) = 2, area(2) = 2 pi
    let (mut k, mut area) = if n % 2 == 1 { (1usize, T::lit(2.0)) } else { (2usize, two_pi) };
    while k < n {
        k += 2;
        area = area * two_pi / T::of_usize(k - 2);
    }
    area
}

/// `int_{r0 < |x| < r1} g(|x|) dx = area(n) int_{r0}^{r1} g(r) r^{n-1} dr`.
pub fn radial_integral<T: Real, F: Fn(T) -> Result<T>>(
    n: usize,
    g: F,
    breaks: &[T],
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    let area = sphere_area::<T>(n);
    let k = (n - 1) as i32;
    let res = integrate_with_breaks(|r| Ok(g(r)? * r.powi(k)), breaks, opts)?;
    Ok(QuadResult { value: res.value * area, error: res.error * area, ..res })
}
