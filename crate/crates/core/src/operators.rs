//! Pointwise degenerate operators: the p-Laplacian, the residual of the critical
//! equation, the linearized operator `P_f` and the p-Bochner gap.

use crate::error::{Error, Result};
use crate::field::{Derivatives, FieldEvaluator};
use crate::linalg::{dot, norm, shifted, Matrix};
use crate::params::Params;
use crate::scalar::{pow_pos, Real};

/// Residual of `Δ_p u + u^{p*-1}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSample<T> {
    pub point: Vec<T>,
    pub value: T,
    pub grad_norm: T,
    pub p_laplacian: T,
    pub residual: T,
}

/// Rejects points where `|∇u| <= floor * max(1, |u|)`.
pub(crate) fn ensure_noncritical<T: Real>(grad_norm: T, value: T, params: &Params<T>) -> Result<()> {
    let floor = params.grad_floor() * T::one().max(value.abs());
    if !(grad_norm > floor) {
        return Err(Error::CriticalPoint { grad_norm: grad_norm.to_f64_lossy(), floor: floor.to_f64_lossy() });
    }
    Ok(())
}

/// `|g|^{p-2} (tr H + (p-2) H(g,g)/|g|^2)` from precomputed derivatives.
pub(crate) fn p_laplacian_from_derivatives<T: Real>(g: &[T], h: &Matrix<T>, p: T) -> T {
    let g2 = dot(g, g);
    let gn = g2.sqrt();
    pow_pos(gn, p - T::lit(2.0)) * (h.trace() + (p - T::lit(2.0)) * h.bilinear(g, g) / g2)
}

/// `Δ_p u(x)` in non-divergence form; requires a noncritical point.
pub fn p_laplacian<T: Real, F: FieldEvaluator<T> + ?Sized>(field: &F, x: &[T], params: &Params<T>) -> Result<T> {
    let u = field.value(x)?;
    let g = field.gradient(x)?;
    ensure_noncritical(norm(&g), u, params)?;
    let h = field.hessian(x)?;
    let out = p_laplacian_from_derivatives(&g, &h, params.p());
    if !out.is_finite() {
        return Err(Error::NonFinite("p-Laplacian"));
    }
    Ok(out)
}

/// Evaluates the critical equation at `x`.
pub fn residual<T: Real, F: FieldEvaluator<T> + ?Sized>(
    field: &F,
    x: &[T],
    params: &Params<T>,
) -> Result<OperatorSample<T>> {
    let u = field.value(x)?;
    let g = field.gradient(x)?;
    let grad_norm = norm(&g);
    ensure_noncritical(grad_norm, u, params)?;
    let h = field.hessian(x)?;
    let lap = p_laplacian_from_derivatives(&g, &h, params.p());
    let res = lap + pow_pos(u, params.q());
    if !res.is_finite() {
        return Err(Error::NonFinite("residual"));
    }
    Ok(OperatorSample { point: x.to_vec(), value: u, grad_norm, p_laplacian: lap, residual: res })
}

/// `P_f(w) = |∇f|^{p-2} Δw + (p-2) |∇f|^{p-4} ∇²w(∇f, ∇f)` from derivatives.
pub(crate) fn linearized_from_derivatives<T: Real>(gf: &[T], hw: &Matrix<T>, p: T) -> T {
    let g2 = dot(gf, gf);
    let gn = g2.sqrt();
    let two = T::lit(2.0);
    pow_pos(gn, p - two) * hw.trace() + (p - two) * pow_pos(gn, p - T::lit(4.0)) * hw.bilinear(gf, gf)
}

/// Second-order part of the linearized p-Laplacian of `f`, applied to `w`.
pub fn linearized_p<T: Real, F, W>(f: &F, w: &W, x: &[T], params: &Params<T>) -> Result<T>
where
    F: FieldEvaluator<T> + ?Sized,
    W: FieldEvaluator<T> + ?Sized,
{
    let gf = f.gradient(x)?;
    ensure_noncritical(norm(&gf), f.value(x)?, params)?;
    let hw = w.hessian(x)?;
    let out = linearized_from_derivatives(&gf, &hw, params.p());
    if !out.is_finite() {
        return Err(Error::NonFinite("linearized operator"));
    }
    Ok(out)
}

/// Both sides of the p-Bochner inequality at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BochnerTerms<T> {
    /// `(1/p) P_f(|∇f|^p)`.
    pub lhs: T,
    /// `(1/n) (Δ_p f)^2`.
    pub square_term: T,
    /// `n/(n-1) ((1/n) Δ_p f - (p-1) |∇f|^{p-4} ∇²f(∇f,∇f))^2`.
    pub sharp_term: T,
    /// `|∇f|^{p-2} [<∇f, ∇Δ_p f> - (p-2) Δ_p f ∇²f(∇f,∇f) / |∇f|^2]`.
    pub transport_term: T,
}

impl<T: Real> BochnerTerms<T> {
    pub fn rhs(&self) -> T {
        self.square_term + self.sharp_term + self.transport_term
    }

    pub fn gap(&self) -> T {
        self.lhs - self.rhs()
    }
}

fn third_order_step<T: Real, F: FieldEvaluator<T> + ?Sized>(f: &F, x: &[T]) -> T {
    let scale = T::one().max(norm(x));
    if f.derivatives() == Derivatives::Hessian {
        T::epsilon().cbrt() * scale
    } else {
        // Hessian itself comes from differences; difference it on a coarser stencil
        T::epsilon().powf(T::lit(1.0 / 6.0)) * scale
    }
}

fn stencil<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::CriticalPoint { .. } | Error::NonFinite(_) | Error::CenterSingularity => {
            Error::StencilFailure(e.to_string())
        }
        other => other,
    })
}

/// Evaluates both sides of the p-Bochner inequality. Third derivatives enter through
/// central differences of `∇|∇f|^p` and of `Δ_p f`.
pub fn bochner_terms<T: Real, F: FieldEvaluator<T> + ?Sized>(
    f: &F,
    x: &[T],
    params: &Params<T>,
) -> Result<BochnerTerms<T>> {
    let p = params.p();
    let nf = params.nf();
    let two = T::lit(2.0);
    let g = f.gradient(x)?;
    let gn = norm(&g);
    ensure_noncritical(gn, f.value(x)?, params)?;
    let h = f.hessian(x)?;
    let lap_p = p_laplacian_from_derivatives(&g, &h, p);
    let hgg = h.bilinear(&g, &g);

    let s = third_order_step(f, x);
    let n = x.len();
    // gradient of W = |∇f|^p is p |∇f|^{p-2} H ∇f
    let grad_w = |y: &[T]| -> Result<Vec<T>> {
        let gy = f.gradient(y)?;
        let hy = f.hessian(y)?;
        let c = p * pow_pos(norm(&gy), p - two);
        Ok(hy.mul_vec(&gy).into_iter().map(|v| v * c).collect())
    };
    let mut hess_w = Matrix::zeros(n);
    let mut grad_lap = vec![T::zero(); n];
    for j in 0..n {
        let xp = shifted(x, j, s);
        let xm = shifted(x, j, -s);
        let wp = stencil(grad_w(&xp))?;
        let wm = stencil(grad_w(&xm))?;
        for i in 0..n {
            hess_w[(i, j)] = (wp[i] - wm[i]) / (s + s);
        }
        let lp = stencil(p_laplacian(f, &xp, params))?;
        let lm = stencil(p_laplacian(f, &xm, params))?;
        grad_lap[j] = (lp - lm) / (s + s);
    }
    let hess_w = hess_w.symmetrized();

    let lhs = linearized_from_derivatives(&g, &hess_w, p) / p;
    let square_term = lap_p * lap_p / nf;
    let inner = lap_p / nf - (p - T::one()) * pow_pos(gn, p - T::lit(4.0)) * hgg;
    let sharp_term = nf / (nf - T::one()) * inner * inner;
    let transport_term = pow_pos(gn, p - two) * (dot(&g, &grad_lap) - (p - two) * lap_p / (gn * gn) * hgg);
    let out = BochnerTerms { lhs, square_term, sharp_term, transport_term };
    if !out.gap().is_finite() {
        return Err(Error::NonFinite("Bochner terms"));
    }
    Ok(out)
}

/// Left side minus right side of the p-Bochner inequality; nonnegative for smooth `f`.
pub fn bochner_gap<T: Real, F: FieldEvaluator<T> + ?Sized>(f: &F, x: &[T], params: &Params<T>) -> Result<T> {
    Ok(bochner_terms(f, x, params)?.gap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FnField, RadialJet, RadialProfile};

    fn r_squared(n: usize) -> RadialProfile<f64, impl Fn(f64) -> RadialJet<f64> + Send + Sync> {
        RadialProfile::new(vec![0.0; n], |r: f64| RadialJet { u: r * r, du: 2.0 * r, ddu: 2.0 })
    }

    #[test]
    fn laplacian_of_r_squared() {
        for n in 2..7 {
            let prm = Params::<f64>::new(n, 2.0_f64.min(n as f64 - 0.5)).unwrap();
            let prm = if prm.p() == 2.0 { prm } else { continue };
            let mut x = vec![0.0; n];
            x[0] = 0.7;
            x[n - 1] = -0.2;
            let v = p_laplacian(&r_squared(n), &x, &prm).unwrap();
            assert!((v - 2.0 * n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_is_critical_everywhere() {
        let prm = Params::<f64>::new(3, 1.7).unwrap();
        let c = FnField::new(3, |_x: &[f64]| 2.5);
        for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.0]] {
            assert!(matches!(p_laplacian(&c, &x, &prm), Err(Error::CriticalPoint { .. })));
            assert!(matches!(residual(&c, &x, &prm), Err(Error::CriticalPoint { .. })));
        }
        let one = FnField::new(3, |_x: &[f64]| 1.0);
        assert!(matches!(residual(&one, &[0.2, 0.1, 0.0], &prm), Err(Error::CriticalPoint { .. })));
    }

    #[test]
    fn linearized_on_coordinate_square() {
        // f = x1, w = x1^2: P_f(w) = 2 + 2(p - 2) = 2(p - 1)
        for &(n, p) in &[(3usize, 1.5), (4, 2.0), (5, 3.5)] {
            let prm = Params::<f64>::new(n, p).unwrap();
            let lin = FnField::new(n, |x: &[f64]| x[0] + 3.0);
            let w = FnField::new(n, |x: &[f64]| x[0] * x[0]);
            let mut x = vec![0.3; n];
            x[1] = -0.4;
            let v = linearized_p(&lin, &w, &x, &prm).unwrap();
            assert!((v - 2.0 * (p - 1.0)).abs() < 1e-5, "n={n} p={p}: {v}");
        }
    }

    #[test]
    fn linearized_reduces_to_laplacian_at_p2() {
        let prm = Params::<f64>::new(4, 2.0).unwrap();
        let f = FnField::new(4, |x: &[f64]| x[0].sin() + x[1] * x[2]);
        let v = linearized_p(&f, &r_squared(4), &[0.1, 0.5, 0.2, -0.3], &prm).unwrap();
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn affine_field_has_zero_bochner_gap() {
        let prm = Params::<f64>::new(3, 2.5).unwrap();
        let f = FnField::new(3, |x: &[f64]| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2]);
        let t = bochner_terms(&f, &[0.2, 0.3, -0.1], &prm).unwrap();
        assert!(t.gap().abs() < 1e-6, "{t:?}");
        assert!(t.lhs.abs() < 1e-6);
    }
}
