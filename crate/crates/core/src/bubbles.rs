//! The two-parameter family of explicit positive solutions (Aubin–Talenti bubbles)
//!
//! ```text
//! U(x) = ( λ^{1/(p-1)} c / (λ^{p/(p-1)} + |x - x0|^{p/(p-1)}) )^{(n-p)/p},
//! c    = n^{1/p} ((n-p)/(p-1))^{(p-1)/p}.
//! ```
//!
//! `U^{-p/(n-p)}` is affine in `|x - x0|^{p/(p-1)}`, which is the exact structure
//! the affine-fit check exploits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    check_dim, radial_gradient, radial_hessian, radial_offset, Derivatives, FieldEvaluator, RadialField, RadialJet,
};
use crate::linalg::Matrix;
use crate::params::Params;
use crate::scalar::{pow_pos, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Bubble<T> {
    params: Params<T>,
    lambda: T,
    center: Vec<T>,
    c_np: T,
}

/// Closed-form normalization `n^{1/p} ((n-p)/(p-1))^{(p-1)/p}`.
pub fn normalization<T: Real>(params: &Params<T>) -> T {
    let p = params.p();
    let nf = params.nf();
    pow_pos(nf, T::one() / p) * pow_pos(params.decay(), (p - T::one()) / p)
}

impl<T: Real> Bubble<T> {
    pub fn new(params: Params<T>, lambda: T, center: Vec<T>) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive and finite")));
        }
        if center.len() != params.n() {
            return Err(Error::InvalidInput(format!("center has dimension {}, expected {}", center.len(), params.n())));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("center must be finite".into()));
        }
        Ok(Self { c_np: normalization(&params), params, lambda, center })
    }

    /// `λ = 1`, centered at the origin.
    pub fn standard(params: Params<T>) -> Self {
        let n = params.n();
        Self::new(params, T::one(), vec![T::zero(); n]).expect("standard bubble is valid")
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn c_np(&self) -> T {
        self.c_np
    }

    /// `λ^{1/(p-1)} c`, the numerator inside the bracket.
    fn numerator(&self) -> T {
        pow_pos(self.lambda, T::one() / (self.params.p() - T::one())) * self.c_np
    }

    /// `λ^{p/(p-1)} + r^{p/(p-1)}`.
    fn denominator(&self, r: T) -> T {
        let pc = self.params.p_conj();
        pow_pos(self.lambda, pc) + pow_pos(r, pc)
    }

    fn exponent(&self) -> T {
        (self.params.nf() - self.params.p()) / self.params.p()
    }

    pub fn value_at_radius(&self, r: T) -> T {
        pow_pos(self.numerator() / self.denominator(r), self.exponent())
    }

    /// Value at the center, `(c/λ)^{(n-p)/p}`.
    pub fn center_value(&self) -> T {
        self.value_at_radius(T::zero())
    }

    /// `lim_{r→∞} U(r) r^{(n-p)/(p-1)} = (λ^{1/(p-1)} c)^{(n-p)/p}`.
    pub fn decay_constant(&self) -> T {
        pow_pos(self.numerator(), self.exponent())
    }

    /// `lim_{r→∞} |∇U| / U^{(n-1)/(n-p)} = ((n-p)/(p-1)) (λ^{1/(p-1)} c)^{-(p-1)/p}`.
    pub fn gradient_ratio_limit(&self) -> T {
        let p = self.params.p();
        self.params.decay() * pow_pos(self.numerator(), -(p - T::one()) / p)
    }

    /// Bubble with `λ` and center such that `U(0) = u0`.
    pub fn from_center_value(params: Params<T>, u0: T, center: Vec<T>) -> Result<Self> {
        if !(u0 > T::zero()) {
            return Err(Error::InvalidInput(format!("center value {u0} must be positive")));
        }
        let c = normalization(&params);
        let e = (params.nf() - params.p()) / params.p();
        Self::new(params, c * pow_pos(u0, -T::one() / e), center)
    }

    pub fn to_record(&self) -> BubbleRecord {
        BubbleRecord {
            n: self.params.n(),
            p: self.params.p().to_f64_lossy(),
            lambda: self.lambda.to_f64_lossy(),
            center: self.center.iter().map(|c| c.to_f64_lossy()).collect(),
        }
    }

    pub fn from_record(rec: &BubbleRecord) -> Result<Self> {
        let params = Params::new(rec.n, T::lit(rec.p))?;
        Self::new(params, T::lit(rec.lambda), rec.center.iter().map(|&c| T::lit(c)).collect())
    }
}

/// Plain serialized form `{n, p, lambda, center}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleRecord {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub center: Vec<f64>,
}

impl<T: Real> FieldEvaluator<T> for Bubble<T> {
    fn dim(&self) -> usize {
        self.params.n()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x)?;
        let (_, r) = radial_offset(&self.center, x);
        Ok(self.value_at_radius(r))
    }

    fn derivatives(&self) -> Derivatives {
        Derivatives::Hessian
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x)?;
        radial_gradient(self, x)
    }

    fn hessian(&self, x: &[T]) -> Result<Matrix<T>> {
        check_dim(self.dim(), x)?;
        let (_, r) = radial_offset(&self.center, x);
        if r == T::zero() && self.params.p() > T::lit(2.0) {
            return Err(Error::CenterSingularity);
        }
        radial_hessian(self, x)
    }
}

impl<T: Real> RadialField<T> for Bubble<T> {
    fn center(&self) -> &[T] {
        &self.center
    }

    // U' = -d U s/D,  U'' = d U ((d + p') s^2/D^2 - s'/D),
    // with d = (n-p)/(p-1), p' = p/(p-1), s = r^{1/(p-1)}, D = λ^{p'} + r^{p'}
    fn jet(&self, r: T) -> Result<RadialJet<T>> {
        let prm = &self.params;
        let p1 = prm.p() - T::one();
        let d = prm.decay();
        let pc = prm.p_conj();
        let den = self.denominator(r);
        let u = self.value_at_radius(r);
        let s = pow_pos(r, T::one() / p1);
        let ds = pow_pos(r, T::one() / p1 - T::one()) / p1;
        let du = -d * u * s / den;
        let ddu = d * u * ((d + pc) * s * s / (den * den) - ds / den);
        Ok(RadialJet { u, du, ddu })
    }

    fn du_over_r(&self, r: T) -> Result<T> {
        let p1 = self.params.p() - T::one();
        let u = self.value_at_radius(r);
        let s_over_r = pow_pos(r, T::one() / p1 - T::one());
        Ok(-self.params.decay() * u * s_over_r / self.denominator(r))
    }
}

/// `u^{-p/(n-p)}`, the transform that turns a bubble into an affine function of
/// `|x - x0|^{p/(p-1)}`.
pub fn v_transform<T: Real>(params: &Params<T>, u: T) -> T {
    pow_pos(u, -params.p() / (params.nf() - params.p()))
}

pub fn v_profile<T: Real>(b: &Bubble<T>, x: &[T]) -> Result<T> {
    Ok(v_transform(&b.params, b.value(x)?))
}

/// Least-squares line through `(s_i, v_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit<T> {
    pub intercept: T,
    pub slope: T,
    pub r_squared: T,
    /// `max_i |v_i - fit_i| / max_i |v_i|`.
    pub rel_residual: T,
}

pub fn affine_fit<T: Real>(s: &[T], v: &[T]) -> Result<AffineFit<T>> {
    if s.len() != v.len() || s.len() < 3 {
        return Err(Error::DegenerateFit("affine fit needs at least three matched samples".into()));
    }
    let m = T::of_usize(s.len());
    let s_mean = s.iter().fold(T::zero(), |a, &x| a + x) / m;
    let v_mean = v.iter().fold(T::zero(), |a, &x| a + x) / m;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&si, &vi) in s.iter().zip(v) {
        let (ds, dv) = (si - s_mean, vi - v_mean);
        sxx = sxx + ds * ds;
        sxy = sxy + ds * dv;
        syy = syy + dv * dv;
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = v_mean - slope * s_mean;
    let mut ss_res = T::zero();
    let mut max_res = T::zero();
    let mut max_v = T::zero();
    for (&si, &vi) in s.iter().zip(v) {
        let e = vi - (intercept + slope * si);
        ss_res = ss_res + e * e;
        max_res = max_res.max(e.abs());
        max_v = max_v.max(vi.abs());
    }
    let r_squared = if syy == T::zero() { T::one() } else { T::one() - ss_res / syy };
    Ok(AffineFit { intercept, slope, r_squared, rel_residual: max_res / max_v })
}

/// Fits `u^{-p/(n-p)}` against `r^{p/(p-1)}` along the ray `center + r e_1`.
pub fn v_affine_fit<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    center: &[T],
    radii: &[T],
    params: &Params<T>,
) -> Result<AffineFit<T>> {
    let mut s = Vec::with_capacity(radii.len());
    let mut v = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut x = center.to_vec();
        x[0] = x[0] + r;
        s.push(pow_pos(r, params.p_conj()));
        v.push(v_transform(params, field.value(&x)?));
    }
    affine_fit(&s, &v)
}
