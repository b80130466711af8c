//! Rigidity machinery: the vector fields
//!
//! ```text
//! 𝐮 = |∇u|^{p-2} ∇u,    𝐯 = u^{-n(p-1)/(n-p)} |∇u|^{p-2} ∇u,
//! ```
//!
//! the Jacobian `V = ∇𝐯` (set to zero on the critical set), its traceless part
//! `V̊ = V - tr(V)/n Id`, and the two integrals of the key integral estimate
//!
//! ```text
//! ∫ u^{(n-1)p/(n-p)} |V̊|² η^l   ≤   C ∫ u^{((2-p)n-p)/(n-p)} |∇u|^{2(p-1)} |∇η|² η^{l-2}.
//! ```
//!
//! `V̊` vanishes identically exactly on bubbles, where `𝐯 = c (x - x0)`.

use crate::error::{Error, Result};
use crate::field::{Derivatives, FieldEvaluator, RadialField};
use crate::gradient::CutoffField;
use crate::linalg::{dot, norm, shifted, Matrix};
use crate::params::Params;
use crate::quadrature::{radial_integral, QuadOptions};
use crate::scalar::{pow_pos, Real};

fn is_critical<T: Real>(grad_norm: T, u: T, params: &Params<T>) -> bool {
    !(grad_norm > params.grad_floor() * T::one().max(u.abs()))
}

/// Exponent `-n(p-1)/(n-p)` of the `u` prefactor in 𝐯.
fn v_power<T: Real>(params: &Params<T>) -> T {
    -params.nf() * (params.p() - T::one()) / (params.nf() - params.p())
}

/// `|∇u|^{p-2} ∇u`; the zero vector on the critical set.
pub fn vector_u<T: Real, F: FieldEvaluator<T> + ?Sized>(field: &F, x: &[T], params: &Params<T>) -> Result<Vec<T>> {
    let g = field.gradient(x)?;
    let gn = norm(&g);
    if is_critical(gn, field.value(x)?, params) {
        return Ok(vec![T::zero(); x.len()]);
    }
    let c = pow_pos(gn, params.p() - T::lit(2.0));
    Ok(g.into_iter().map(|gi| gi * c).collect())
}

/// `u^{-n(p-1)/(n-p)} |∇u|^{p-2} ∇u`; the zero vector on the critical set.
pub fn vector_v<T: Real, F: FieldEvaluator<T> + ?Sized>(field: &F, x: &[T], params: &Params<T>) -> Result<Vec<T>> {
    let u = field.value(x)?;
    let w = vector_u(field, x, params)?;
    let c = pow_pos(u, v_power(params));
    Ok(w.into_iter().map(|wi| wi * c).collect())
}

/// `V = ∇𝐯` and its traceless part at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSample<T> {
    pub point: Vec<T>,
    pub v: Matrix<T>,
    pub v_traceless: Matrix<T>,
    /// Frobenius norm of `v_traceless`.
    pub ring_norm: T,
}

impl<T: Real> TensorSample<T> {
    fn from_jacobian(point: &[T], v: Matrix<T>) -> Self {
        let v_traceless = v.traceless();
        let ring_norm = v_traceless.frobenius();
        Self { point: point.to_vec(), v, v_traceless, ring_norm }
    }
}

/// Jacobian of 𝐯. Uses the chain rule
/// `∂_j 𝐯_i = u^m |g|^{p-2} (m g_i g_j / u + (p-2) g_i (Hg)_j / |g|² + H_ij)`
/// when the field has an analytic Hessian, central differences of 𝐯 otherwise.
pub fn tensor_v<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    x: &[T],
    params: &Params<T>,
) -> Result<TensorSample<T>> {
    let n = x.len();
    let u = field.value(x)?;
    let g = field.gradient(x)?;
    let gn = norm(&g);
    if is_critical(gn, u, params) {
        return Ok(TensorSample::from_jacobian(x, Matrix::zeros(n)));
    }
    let jac = if field.derivatives() == Derivatives::Hessian {
        let h = field.hessian(x)?;
        let m = v_power(params);
        let p = params.p();
        let g2 = dot(&g, &g);
        let hg = h.mul_vec(&g);
        let pref = pow_pos(u, m) * pow_pos(gn, p - T::lit(2.0));
        Matrix::from_fn(n, |i, j| pref * (m * g[i] * g[j] / u + (p - T::lit(2.0)) * g[i] * hg[j] / g2 + h[(i, j)]))
    } else {
        let step = field.fd_step(x);
        let mut jac = Matrix::zeros(n);
        for j in 0..n {
            let vp = vector_v(field, &shifted(x, j, step), params).map_err(|e| Error::StencilFailure(e.to_string()))?;
            let vm =
                vector_v(field, &shifted(x, j, -step), params).map_err(|e| Error::StencilFailure(e.to_string()))?;
            for i in 0..n {
                jac[(i, j)] = (vp[i] - vm[i]) / (step + step);
            }
        }
        jac
    };
    if !jac.is_finite() {
        return Err(Error::NonFinite("Jacobian of v"));
    }
    Ok(TensorSample::from_jacobian(x, jac))
}

/// Exponent triple `(a, b, q)` that makes the auxiliary terms of the underlying
/// integral identity vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerrinZouExponents<T> {
    pub a: T,
    pub b: T,
    pub q: T,
}

impl<T: Real> SerrinZouExponents<T> {
    pub fn new(params: &Params<T>) -> Self {
        let (nf, p) = (params.nf(), params.p());
        Self { a: v_power(params), b: p * (nf - T::one()) / (nf - p), q: params.q() }
    }

    /// `(a'-1)(p-1) + q + a'` with `a' = a/n`, the gradient-estimate exponent at
    /// `ε = 0`; equals `p/(n-p)`.
    pub fn theta_at_zero(&self, params: &Params<T>) -> T {
        let a = self.a / params.nf();
        (a - T::one()) * (params.p() - T::one()) + self.q + a
    }
}

/// The two sides of the key integral estimate, without the constant `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyEstimateSides<T> {
    pub lhs: T,
    pub rhs_integral: T,
    pub lhs_error: T,
    pub rhs_error: T,
}

fn ray_point<T: Real>(center: &[T], r: T) -> Vec<T> {
    let mut x = center.to_vec();
    x[0] = x[0] + r;
    x
}

/// Both integrals over `r_min < |x - x0| < 2R` with `r_min = 1e-6 R`, where `R`
/// is the cutoff's plateau radius.
pub fn key_estimate_sides<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    eta: &CutoffField<T>,
    l: T,
    params: &Params<T>,
) -> Result<KeyEstimateSides<T>> {
    let r_cut = eta.radius();
    key_estimate_sides_window(field, eta, l, params, T::lit(1e-6) * r_cut, r_cut + r_cut)
}

/// Both integrals restricted to the shell `r_lo < |x - x0| < r_hi`.
pub fn key_estimate_sides_window<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    eta: &CutoffField<T>,
    l: T,
    params: &Params<T>,
    r_lo: T,
    r_hi: T,
) -> Result<KeyEstimateSides<T>> {
    if !(l >= T::lit(2.0)) {
        return Err(Error::Domain(format!("cutoff power l = {l} must be at least 2")));
    }
    if !(r_lo >= T::zero() && r_hi > r_lo) {
        return Err(Error::InvalidInput("integration window must satisfy 0 <= r_lo < r_hi".into()));
    }
    let center = field.center().to_vec();
    if eta.center() != center.as_slice() {
        return Err(Error::InvalidInput("cutoff must share the field's center".into()));
    }
    let (nf, p) = (params.nf(), params.p());
    let lhs_power = (nf - T::one()) * p / (nf - p);
    let rhs_power = ((T::lit(2.0) - p) * nf - p) / (nf - p);
    let two = T::lit(2.0);

    let mut breaks = vec![r_lo];
    for b in [eta.radius(), eta.radius() * two] {
        if b > r_lo && b < r_hi {
            breaks.push(b);
        }
    }
    breaks.push(r_hi);

    let rhs_density = |r: T| -> Result<T> {
        let x = ray_point(&center, r);
        let eta_val = eta.value(&x)?;
        let grad_eta = norm(&eta.gradient(&x)?);
        if grad_eta == T::zero() {
            return Ok(T::zero());
        }
        let u = field.value(&x)?;
        let gu = norm(&field.gradient(&x)?);
        Ok(pow_pos(u, rhs_power) * pow_pos(gu, two * (p - T::one())) * grad_eta * grad_eta * pow_pos(eta_val, l - two))
    };
    let lhs_density = |r: T| -> Result<T> {
        let x = ray_point(&center, r);
        let eta_val = eta.value(&x)?;
        if eta_val == T::zero() {
            return Ok(T::zero());
        }
        let u = field.value(&x)?;
        let ring = tensor_v(field, &x, params)?.ring_norm;
        Ok(pow_pos(u, lhs_power) * ring * ring * pow_pos(eta_val, l))
    };

    let opts = QuadOptions::<T>::default();
    let rhs = radial_integral(params.n(), rhs_density, &breaks, &opts)?;
    // the left side vanishes for bubbles; measure it against the right side
    let lhs_opts = opts.with_epsabs(T::lit(1e-14) * rhs.value.abs().max(T::min_positive_value()));
    let lhs = radial_integral(params.n(), lhs_density, &breaks, &lhs_opts)?;
    Ok(KeyEstimateSides { lhs: lhs.value, rhs_integral: rhs.value, lhs_error: lhs.error, rhs_error: rhs.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubbles::Bubble;
    use crate::field::{FnField, SinePerturbed};
    use crate::gradient::build_cutoff;

    #[test]
    fn vector_u_is_gradient_at_p2() {
        let prm = Params::<f64>::new(3, 2.0).unwrap();
        let b = Bubble::new(prm, 1.4, vec![0.2, 0.0, 0.0]).unwrap();
        let x = [1.0, 0.5, -0.5];
        assert_eq!(vector_u(&b, &x, &prm).unwrap(), b.gradient(&x).unwrap());
        let u = b.value(&x).unwrap();
        let v = vector_v(&b, &x, &prm).unwrap();
        let g = b.gradient(&x).unwrap();
        for i in 0..3 {
            assert!((v[i] - u.powf(-3.0) * g[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn vector_u_magnitude_and_direction() {
        let prm = Params::<f64>::new(3, 1.5).unwrap();
        let b = Bubble::standard(prm);
        let x = [1.0, 0.0, 0.0];
        let w = vector_u(&b, &x, &prm).unwrap();
        let g = norm(&b.gradient(&x).unwrap());
        assert!((norm(&w) - g.sqrt()).abs() < 1e-14);
        assert!(w[0] < 0.0 && w[1] == 0.0 && w[2] == 0.0);
        assert!(vector_u(&b, &[0.0; 3], &prm).unwrap().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bubble_v_is_linear_in_position() {
        for &(n, p) in &[(3usize, 1.5), (4, 2.0), (5, 3.0)] {
            let prm = Params::<f64>::new(n, p).unwrap();
            let x0: Vec<f64> = (0..n).map(|i| 0.1 * i as f64).collect();
            let b = Bubble::new(prm, 0.9, x0.clone()).unwrap();
            let mut cs = Vec::new();
            for k in 1..20 {
                let mut x = x0.clone();
                x[0] += 0.3 * k as f64;
                x[n - 1] -= 0.1 * k as f64;
                let v = vector_v(&b, &x, &prm).unwrap();
                cs.push(v[0] / (x[0] - x0[0]));
                assert!((v[n - 1] / (x[n - 1] - x0[n - 1]) - cs[cs.len() - 1]).abs() < 1e-10);
            }
            let (lo, hi) = cs.iter().fold((f64::MAX, f64::MIN), |(a, b), &c| (a.min(c), b.max(c)));
            assert!((hi - lo) <= 1e-8 * hi.abs(), "n={n} p={p}: {lo} {hi}");
        }
    }

    #[test]
    fn perturbed_bubble_v_is_not_linear() {
        let prm = Params::<f64>::new(4, 2.0).unwrap();
        let pert = SinePerturbed::new(Bubble::standard(prm), 0.01);
        let cs: Vec<f64> = (1..20)
            .map(|k| {
                let x = [0.3 * k as f64, 0.0, 0.0, 0.0];
                vector_v(&pert, &x, &prm).unwrap()[0] / x[0]
            })
            .collect();
        let (lo, hi) = cs.iter().fold((f64::MAX, f64::MIN), |(a, b), &c| (a.min(c), b.max(c)));
        assert!((hi - lo) > 1e-3 * hi.abs());
    }

    #[test]
    fn bubble_tensor_is_multiple_of_identity() {
        let prm = Params::<f64>::new(4, 2.5).unwrap();
        let b = Bubble::standard(prm);
        let s = tensor_v(&b, &[0.4, -1.0, 2.0, 0.1], &prm).unwrap();
        assert!(s.ring_norm <= 1e-12 * s.v.trace().abs());
        assert!(s.v_traceless.trace().abs() < 1e-12);
    }

    #[test]
    fn hand_built_symmetric_jacobian() {
        // u = exp(x1 x2) at p = 2, n = 3 has v = u^{-3} ∇u = exp(-2 x1 x2) (x2, x1, 0);
        // at x1 = x2 = 0 the Jacobian is [[0,1,0],[1,0,0],[0,0,0]]
        let prm = Params::<f64>::new(3, 2.0).unwrap();
        let f = FnField::new(3, |x: &[f64]| (x[0] * x[1]).exp() + 0.0 * x[2]);
        let s = tensor_v(&f, &[0.0, 0.0, 0.7], &prm);
        // the gradient vanishes at the origin; step off it
        assert!(s.unwrap().ring_norm == 0.0);
        let s = tensor_v(&f, &[1e-3, 0.0, 0.7], &prm).unwrap();
        assert!((s.v[(0, 1)] - s.v[(1, 0)]).abs() < 1e-5);
        assert!(s.v.trace().abs() < 1e-4);
        assert!((s.ring_norm - 2f64.sqrt()).abs() < 1e-3, "{}", s.ring_norm);
    }

    #[test]
    fn critical_point_gives_zero_tensor() {
        let prm = Params::<f64>::new(3, 1.5).unwrap();
        let b = Bubble::standard(prm);
        let s = tensor_v(&b, &[0.0; 3], &prm).unwrap();
        assert_eq!(s.ring_norm, 0.0);
        assert_eq!(s.v.frobenius(), 0.0);
    }

    #[test]
    fn serrin_zou_consistency() {
        for &(n, p) in &[(3usize, 1.5), (4, 2.0), (7, 3.3), (10, 9.5)] {
            let prm = Params::<f64>::new(n, p).unwrap();
            let e = SerrinZouExponents::new(&prm);
            let expect = p / (n as f64 - p);
            assert!((e.theta_at_zero(&prm) - expect).abs() <= 1e-14 * expect.max(1.0));
        }
    }

    #[test]
    fn key_estimate_vanishing_lhs_for_bubbles() {
        let prm = Params::<f64>::new(3, 2.5).unwrap();
        let b = Bubble::standard(prm);
        let eta = build_cutoff(1.0, 0.25).unwrap().with_center(vec![0.0; 3]);
        let k = key_estimate_sides(&b, &eta, 2.0, &prm).unwrap();
        assert!(k.rhs_integral > 0.0);
        assert!(k.lhs <= 1e-10 * k.rhs_integral, "{k:?}");
    }

    #[test]
    fn plateau_window_has_no_rhs_contribution() {
        let prm = Params::<f64>::new(4, 1.6).unwrap();
        let pert = SinePerturbed::new(Bubble::standard(prm), 0.01);
        let eta = build_cutoff(2.0, 0.2).unwrap().with_center(vec![0.0; 4]);
        let k = key_estimate_sides_window(&pert, &eta, 2.0, &prm, 0.1, 2.0).unwrap();
        assert_eq!(k.rhs_integral, 0.0);
        assert!(k.lhs > 0.0);
    }

    #[test]
    fn raising_the_cutoff_power_shrinks_both_sides() {
        let prm = Params::<f64>::new(3, 1.7).unwrap();
        let pert = SinePerturbed::new(Bubble::standard(prm), 0.01);
        let eta = build_cutoff(1.5, 0.3).unwrap().with_center(vec![0.0; 3]);
        let k2 = key_estimate_sides(&pert, &eta, 2.0, &prm).unwrap();
        let k4 = key_estimate_sides(&pert, &eta, 4.0, &prm).unwrap();
        assert!(k4.lhs <= k2.lhs && k4.rhs_integral <= k2.rhs_integral);
        assert!(k4.lhs > 0.0 && k4.rhs_integral > 0.0);
        assert!(matches!(key_estimate_sides(&pert, &eta, 1.5, &prm), Err(Error::Domain(_))));
    }
}
