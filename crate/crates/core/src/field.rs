//! Scalar fields on R^n with value, gradient and Hessian access.
//!
//! Analytic derivatives are optional: a field that only knows its values gets
//! central-difference gradients and Hessians from the default methods.

use crate::error::{Error, Result};
use crate::linalg::{norm, shifted, Matrix};
use crate::scalar::Real;

/// Which derivatives a field supplies in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Derivatives {
    ValueOnly,
    Gradient,
    Hessian,
}

/// A scalar field evaluated pointwise. Implementations are immutable after construction.
pub trait FieldEvaluator<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> Result<T>;

    fn derivatives(&self) -> Derivatives {
        Derivatives::ValueOnly
    }

    /// Step used by the finite-difference fallbacks at `x`.
    fn fd_step(&self, x: &[T]) -> T {
        default_step(x)
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        fd_gradient(self, x, self.fd_step(x))
    }

    fn hessian(&self, x: &[T]) -> Result<Matrix<T>> {
        if self.derivatives() >= Derivatives::Gradient {
            fd_hessian_from_gradient(self, x, self.fd_step(x))
        } else {
            fd_hessian(self, x, hessian_step(x))
        }
    }
}

/// `cbrt(eps) * max(1, |x|)`.
pub fn default_step<T: Real>(x: &[T]) -> T {
    T::epsilon().cbrt() * T::one().max(norm(x))
}

/// `eps^(1/4) * max(1, |x|)`, the balance point for second differences of values.
pub fn hessian_step<T: Real>(x: &[T]) -> T {
    T::epsilon().sqrt().sqrt() * T::one().max(norm(x))
}

/// Central-difference gradient from values.
pub fn fd_gradient<T: Real, F: FieldEvaluator<T> + ?Sized>(f: &F, x: &[T], h: T) -> Result<Vec<T>> {
    let two_h = h + h;
    (0..x.len()).map(|i| Ok((f.value(&shifted(x, i, h))? - f.value(&shifted(x, i, -h))?) / two_h)).collect()
}

/// Central second differences of values.
pub fn fd_hessian<T: Real, F: FieldEvaluator<T> + ?Sized>(f: &F, x: &[T], h: T) -> Result<Matrix<T>> {
    let n = x.len();
    let f0 = f.value(x)?;
    let mut m = Matrix::zeros(n);
    let h2 = h * h;
    for i in 0..n {
        let fp = f.value(&shifted(x, i, h))?;
        let fm = f.value(&shifted(x, i, -h))?;
        m[(i, i)] = (fp - f0 - f0 + fm) / h2;
        for j in (i + 1)..n {
            let pp = f.value(&shifted(&shifted(x, i, h), j, h))?;
            let pm = f.value(&shifted(&shifted(x, i, h), j, -h))?;
            let mp = f.value(&shifted(&shifted(x, i, -h), j, h))?;
            let mm = f.value(&shifted(&shifted(x, i, -h), j, -h))?;
            let v = (pp - pm - mp + mm) / (T::lit(4.0) * h2);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Central differences of the gradient, symmetrized.
pub fn fd_hessian_from_gradient<T: Real, F: FieldEvaluator<T> + ?Sized>(f: &F, x: &[T], h: T) -> Result<Matrix<T>> {
    let n = x.len();
    let mut m = Matrix::zeros(n);
    let two_h = h + h;
    for j in 0..n {
        let gp = f.gradient(&shifted(x, j, h))?;
        let gm = f.gradient(&shifted(x, j, -h))?;
        for i in 0..n {
            m[(i, j)] = (gp[i] - gm[i]) / two_h;
        }
    }
    Ok(m.symmetrized())
}

/// Radial profile data at one radius: `u`, `u'`, `u''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet<T> {
    pub u: T,
    pub du: T,
    pub ddu: T,
}

/// A field depending only on the distance to a center.
pub trait RadialField<T: Real>: FieldEvaluator<T> {
    fn center(&self) -> &[T];

    fn jet(&self, r: T) -> Result<RadialJet<T>>;

    /// `u'(r) / r`; overridden where a closed form avoids cancellation near the center.
    fn du_over_r(&self, r: T) -> Result<T> {
        let j = self.jet(r)?;
        if r > T::zero() {
            Ok(j.du / r)
        } else {
            Ok(j.ddu)
        }
    }
}

/// Offset from the center and its length.
pub(crate) fn radial_offset<T: Real>(center: &[T], x: &[T]) -> (Vec<T>, T) {
    let d: Vec<T> = x.iter().zip(center).map(|(&a, &b)| a - b).collect();
    let r = norm(&d);
    (d, r)
}

pub(crate) fn check_dim<T: Real>(expected: usize, x: &[T]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::InvalidInput(format!("point has dimension {}, field expects {expected}", x.len())));
    }
    Ok(())
}

/// Gradient `u'(r) e_r` of a radial field.
pub fn radial_gradient<T: Real, F: RadialField<T> + ?Sized>(f: &F, x: &[T]) -> Result<Vec<T>> {
    let (d, r) = radial_offset(f.center(), x);
    if r == T::zero() {
        return Ok(vec![T::zero(); x.len()]);
    }
    let s = f.du_over_r(r)?;
    Ok(d.iter().map(|&di| di * s).collect())
}

/// Hessian `u'' e_r e_r^T + (u'/r)(Id - e_r e_r^T)` of a radial field.
pub fn radial_hessian<T: Real, F: RadialField<T> + ?Sized>(f: &F, x: &[T]) -> Result<Matrix<T>> {
    let n = x.len();
    let (d, r) = radial_offset(f.center(), x);
    let jet = f.jet(r)?;
    if r == T::zero() {
        if !jet.ddu.is_finite() {
            return Err(Error::NonFinite("radial second derivative at the center"));
        }
        return Ok(Matrix::identity(n).scale(jet.ddu));
    }
    let tangential = f.du_over_r(r)?;
    let e: Vec<T> = d.iter().map(|&di| di / r).collect();
    let radial = Matrix::outer(&e, &e);
    let h = radial.scale(jet.ddu).add(&Matrix::identity(n).sub(&radial).scale(tangential));
    Ok(h)
}

/// Value-only field backed by a closure.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Real, F: Fn(&[T]) -> T + Send + Sync> FieldEvaluator<T> for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim, x)?;
        Ok((self.f)(x))
    }
}

/// Radial field given by a closure returning `(u, u', u'')` at each radius.
pub struct RadialProfile<T, F> {
    center: Vec<T>,
    profile: F,
}

impl<T: Real, F: Fn(T) -> RadialJet<T> + Send + Sync> RadialProfile<T, F> {
    pub fn new(center: Vec<T>, profile: F) -> Self {
        Self { center, profile }
    }
}

impl<T: Real, F: Fn(T) -> RadialJet<T> + Send + Sync> FieldEvaluator<T> for RadialProfile<T, F> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x)?;
        let (_, r) = radial_offset(&self.center, x);
        Ok((self.profile)(r).u)
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
        radial_hessian(self, x)
    }
}

impl<T: Real, F: Fn(T) -> RadialJet<T> + Send + Sync> RadialField<T> for RadialProfile<T, F> {
    fn center(&self) -> &[T] {
        &self.center
    }

    fn jet(&self, r: T) -> Result<RadialJet<T>> {
        Ok((self.profile)(r))
    }
}

/// Radial field multiplied by `1 + amplitude * sin(r)`.
pub struct SinePerturbed<F> {
    base: F,
    amplitude: f64,
}

impl<F> SinePerturbed<F> {
    pub fn new(base: F, amplitude: f64) -> Self {
        Self { base, amplitude }
    }
}

impl<T: Real, F: RadialField<T>> FieldEvaluator<T> for SinePerturbed<F> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x)?;
        let (_, r) = radial_offset(self.base.center(), x);
        Ok(self.jet(r)?.u)
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
        radial_hessian(self, x)
    }
}

impl<T: Real, F: RadialField<T>> RadialField<T> for SinePerturbed<F> {
    fn center(&self) -> &[T] {
        self.base.center()
    }

    fn jet(&self, r: T) -> Result<RadialJet<T>> {
        let b = self.base.jet(r)?;
        let a = T::lit(self.amplitude);
        let (s, c) = (r.sin(), r.cos());
        let m = T::one() + a * s;
        Ok(RadialJet { u: b.u * m, du: b.du * m + b.u * a * c, ddu: b.ddu * m + (b.du + b.du) * a * c - b.u * a * s })
    }

    fn du_over_r(&self, r: T) -> Result<T> {
        // sin|x| has a conical point at the center, so the tangential term blows up there
        let b = self.base.jet(r)?;
        let a = T::lit(self.amplitude);
        let m = T::one() + a * r.sin();
        Ok(self.base.du_over_r(r)? * m + b.u * a * r.cos() / r)
    }
}
