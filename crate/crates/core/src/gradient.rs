//! Sharp gradient estimate, exterior lower bound, and the δ-power cutoff
//! `φ(x) = ψ(|x - x0|/R)^{1/δ}` built on a quintic smoothstep.

use crate::error::{Error, Result};
use crate::field::{check_dim, radial_gradient, radial_hessian, Derivatives, FieldEvaluator, RadialField, RadialJet};
use crate::linalg::{norm, Matrix};
use crate::params::Params;
use crate::scalar::{pow_pos, Real};

/// ε, R, x0 and the derived exponents `a = -(p-1)/(n-p) + ε`, `θ = p/(n-p) + pε`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradEstimateParams<T> {
    pub epsilon: T,
    pub radius: T,
    pub center: Vec<T>,
    pub a: T,
    pub theta: T,
}

/// Upper end `(p-1)/(n-p)` of the admissible ε range.
pub fn epsilon_max<T: Real>(params: &Params<T>) -> T {
    (params.p() - T::one()) / (params.nf() - params.p())
}

fn check_epsilon<T: Real>(eps: T, params: &Params<T>) -> Result<()> {
    if !(eps > T::zero() && eps < epsilon_max(params)) {
        return Err(Error::Domain(format!("epsilon = {eps} outside (0, {})", epsilon_max(params))));
    }
    Ok(())
}

impl<T: Real> GradEstimateParams<T> {
    pub fn new(epsilon: T, radius: T, center: Vec<T>, params: &Params<T>) -> Result<Self> {
        check_epsilon(epsilon, params)?;
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::InvalidParams(format!("radius must be positive, got {radius}")));
        }
        let (nf, p) = (params.nf(), params.p());
        let a = -(p - T::one()) / (nf - p) + epsilon;
        let theta = (a - T::one()) * (p - T::one()) + params.q() + a;
        Ok(Self { epsilon, radius, center, a, theta })
    }
}

/// `S(t) = 6t⁵ - 15t⁴ + 10t³` and its first two derivatives.
fn smoothstep<T: Real>(t: T) -> (T, T, T) {
    let t2 = t * t;
    let s = t2 * t * (T::lit(10.0) + t * (T::lit(-15.0) + T::lit(6.0) * t));
    let ds = T::lit(30.0) * t2 * (t - T::one()) * (t - T::one());
    let dds = T::lit(60.0) * t * (t - T::one()) * (t + t - T::one());
    (s, ds, dds)
}

/// `ψ(s) = 1 - S(s-1)` on `[1, 2]`, 1 below, 0 above; with `ψ'` and `ψ''`.
fn psi<T: Real>(s: T) -> (T, T, T) {
    if s <= T::one() {
        (T::one(), T::zero(), T::zero())
    } else if s >= T::lit(2.0) {
        (T::zero(), T::zero(), T::zero())
    } else {
        let (v, d, dd) = smoothstep(s - T::one());
        (T::one() - v, -d, -dd)
    }
}

/// Both bound ratios at `s = |x|/R`, in scale-free form:
/// `R|∇φ|/φ^{1-δ} = |ψ'|/δ` and `R²‖∇²φ‖/φ^{1-2δ}` (operator norm).
fn cutoff_ratios<T: Real>(s: T, delta: T) -> (T, T) {
    let (v, d, dd) = psi(s);
    let k = T::one() / delta;
    let grad = d.abs() * k;
    let radial = (k * (k - T::one()) * d * d + k * v * dd).abs();
    let tangential = (k * v * d / s).abs();
    (grad, radial.max(tangential))
}

/// `φ(x) = ψ(|x - x0|/R)^{1/δ}` with the empirical bound constant `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffField<T> {
    radius: T,
    delta: T,
    center: Vec<T>,
    bound_constant: T,
}

/// Cutoff of plateau radius `R` and power `1/δ`, centered at the origin of any
/// dimension until [`CutoffField::with_center`] fixes one.
pub fn build_cutoff<T: Real>(radius: T, delta: T) -> Result<CutoffField<T>> {
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2)")));
    }
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::InvalidParams(format!("radius must be positive, got {radius}")));
    }
    let bound_constant = cutoff_constant(delta, 20_000);
    Ok(CutoffField { radius, delta, center: Vec::new(), bound_constant })
}

/// Max of both scale-free ratios over `samples` interior points of `(1, 2)`,
/// refined by golden-section search around the best sample.
pub fn cutoff_constant<T: Real>(delta: T, samples: usize) -> T {
    let f = |s: T| {
        let (g, h) = cutoff_ratios(s, delta);
        g.max(h)
    };
    let h = T::one() / T::of_usize(samples + 1);
    let mut best = (T::zero(), T::one());
    for k in 1..=samples {
        let s = T::one() + h * T::of_usize(k);
        let v = f(s);
        if v > best.0 {
            best = (v, s);
        }
    }
    let (mut lo, mut hi) = ((best.1 - h).max(T::one()), (best.1 + h).min(T::lit(2.0)));
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best.0.max(f((lo + hi) / T::lit(2.0)))
}

impl<T: Real> CutoffField<T> {
    pub fn with_center(mut self, center: Vec<T>) -> Self {
        self.center = center;
        self
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Empirical `C` in `|∇φ| ≤ (C/R) φ^{1-δ}` and `|∇²φ| ≤ (C/R²) φ^{1-2δ}`.
    pub fn bound_constant(&self) -> T {
        self.bound_constant
    }

    /// `(R|∇φ|/φ^{1-δ}, R²|∇²φ|/φ^{1-2δ})` at distance `r`; `None` where `φ = 0`
    /// (the ratios are 0/0 there) or on the plateau.
    pub fn bound_ratios(&self, r: T) -> Option<(T, T)> {
        let s = r / self.radius;
        if s <= T::one() || s >= T::lit(2.0) {
            return None;
        }
        Some(cutoff_ratios(s, self.delta))
    }

    fn offset(&self, x: &[T]) -> Result<T> {
        if self.center.is_empty() {
            return Ok(norm(x));
        }
        check_dim(self.center.len(), x)?;
        Ok(x.iter().zip(&self.center).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)).sqrt())
    }

    fn centered(&self, x: &[T]) -> Vec<T> {
        if self.center.is_empty() {
            vec![T::zero(); x.len()]
        } else {
            self.center.clone()
        }
    }
}

impl<T: Real> FieldEvaluator<T> for CutoffField<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        let r = self.offset(x)?;
        Ok(self.jet(r)?.u)
    }

    fn derivatives(&self) -> Derivatives {
        Derivatives::Hessian
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.offset(x)?;
        let c = self.clone().with_center(self.centered(x));
        radial_gradient(&c, x)
    }

    fn hessian(&self, x: &[T]) -> Result<Matrix<T>> {
        self.offset(x)?;
        let c = self.clone().with_center(self.centered(x));
        radial_hessian(&c, x)
    }
}

impl<T: Real> RadialField<T> for CutoffField<T> {
    fn center(&self) -> &[T] {
        &self.center
    }

    fn jet(&self, r: T) -> Result<RadialJet<T>> {
        let s = r / self.radius;
        let (v, d, dd) = psi(s);
        if v == T::zero() {
            return Ok(RadialJet { u: T::zero(), du: T::zero(), ddu: T::zero() });
        }
        let k = T::one() / self.delta;
        let rr = self.radius;
        let u = pow_pos(v, k);
        let du = k * pow_pos(v, k - T::one()) * d / rr;
        let ddu =
            (k * (k - T::one()) * pow_pos(v, k - T::lit(2.0)) * d * d + k * pow_pos(v, k - T::one()) * dd) / (rr * rr);
        Ok(RadialJet { u, du, ddu })
    }
}

/// Outcome of [`grad_estimate_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradEstimate<T> {
    pub lhs: T,
    pub envelope: T,
    pub ratio: T,
}

/// Sample directions `±e_i` and radii in `[0, r_max]`, both geometric toward the
/// center and uniform.
fn ball_sample<T: Real>(center: &[T], r_max: T) -> Vec<Vec<T>> {
    let n = center.len();
    let mut radii = vec![T::zero()];
    for j in 0..48 {
        radii.push(r_max * pow_pos(T::lit(0.5), T::of_usize(j) / T::lit(2.0)));
    }
    for k in 1..64 {
        radii.push(r_max * T::of_usize(k) / T::lit(64.0));
    }
    let mut pts = vec![center.to_vec()];
    for &r in radii.iter().filter(|&&r| r > T::zero()) {
        for i in 0..n {
            for sign in [T::one(), -T::one()] {
                let mut x = center.to_vec();
                x[i] = x[i] + sign * r;
                pts.push(x);
            }
        }
    }
    pts
}

/// Compares `|∇u|` on a sample of `B_R(x0)` with the envelope
/// `(sup_{B_2R} u^{1/(n-p)+ε} + R^{-ε(n-p)/(p-1)}) u^{(n-1)/(n-p)-ε}`.
pub fn grad_estimate_ratio<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    x0: &[T],
    radius: T,
    eps: T,
    params: &Params<T>,
) -> Result<GradEstimate<T>> {
    GradEstimateParams::new(eps, radius, x0.to_vec(), params)?;
    let (nf, p) = (params.nf(), params.p());
    let sup_power = T::one() / (nf - p) + eps;
    let u_power = (nf - T::one()) / (nf - p) - eps;
    let mut sup_u = T::zero();
    for x in ball_sample(x0, radius + radius) {
        sup_u = sup_u.max(field.value(&x)?);
    }
    let prefactor = pow_pos(sup_u, sup_power) + pow_pos(radius, -eps * (nf - p) / (p - T::one()));
    let mut out = GradEstimate { lhs: T::zero(), envelope: T::zero(), ratio: T::zero() };
    for x in ball_sample(x0, radius) {
        let g = norm(&field.gradient(&x)?);
        let env = prefactor * pow_pos(field.value(&x)?, u_power);
        out.lhs = out.lhs.max(g);
        out.envelope = out.envelope.max(env);
        if g > T::zero() {
            out.ratio = out.ratio.max(g / env);
        }
    }
    Ok(out)
}

/// `|∇u(x)| / [(|x|^{(1/(n-p)+ε)α} + |x|^{-ε(n-p)/(p-1)}) u(x)^{(n-1)/(n-p)-ε}]`
/// for `|x| ≥ 4`.
pub fn pointwise_grad_check<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    alpha: T,
    x: &[T],
    eps: T,
    params: &Params<T>,
) -> Result<T> {
    check_epsilon(eps, params)?;
    let r = norm(x);
    if !(r >= T::lit(4.0)) {
        return Err(Error::Domain(format!("|x| = {r} is below 4")));
    }
    let (nf, p) = (params.nf(), params.p());
    let env = pow_pos(r, (T::one() / (nf - p) + eps) * alpha) + pow_pos(r, -eps * (nf - p) / (p - T::one()));
    let u = field.value(x)?;
    let g = norm(&field.gradient(x)?);
    Ok(g / (env * pow_pos(u, (nf - T::one()) / (nf - p) - eps)))
}

/// Result of [`exterior_lower_bound`]: the minimum and the per-radius minima of
/// `u · r^{(n-p)/(p-1)}` over the directions `±e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorBound<T> {
    pub a_est: T,
    pub samples: Vec<(T, T)>,
}

/// Estimates `A` in `u(x) ≥ A |x|^{-(n-p)/(p-1)}` outside `B_ρ`.
pub fn exterior_lower_bound<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    rho: T,
    r_list: &[T],
    params: &Params<T>,
) -> Result<ExteriorBound<T>> {
    if r_list.is_empty() {
        return Err(Error::InvalidInput("empty radius list".into()));
    }
    let n = params.n();
    let mut samples = Vec::with_capacity(r_list.len());
    let mut a_est = T::infinity();
    for &r in r_list {
        if !(r >= rho) {
            return Err(Error::Domain(format!("radius {r} lies inside B_rho, rho = {rho}")));
        }
        let weight = pow_pos(r, params.decay());
        let mut m = T::infinity();
        for i in 0..n {
            for sign in [T::one(), -T::one()] {
                let mut x = vec![T::zero(); n];
                x[i] = sign * r;
                m = m.min(field.value(&x)? * weight);
            }
        }
        a_est = a_est.min(m);
        samples.push((r, m));
    }
    Ok(ExteriorBound { a_est, samples })
}
