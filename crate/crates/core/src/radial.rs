//! Radial solutions of `Δ_p u + u^{p*-1} = 0` from a prescribed center value.
//!
//! The equation is integrated in flux form, with `w = r^{n-1}|u'|^{p-2}u'`:
//!
//! ```text
//! u' = -(|w| / r^{n-1})^{1/(p-1)},     w' = -r^{n-1} u^{p*-1},
//! ```
//!
//! started from a two-term series near the center, where the `u''` form is
//! degenerate.

use serde::Serialize;

use crate::bubbles::normalization;
use crate::error::{Error, Result};
use crate::field::{check_dim, radial_gradient, radial_hessian, Derivatives, FieldEvaluator, RadialField, RadialJet};
use crate::linalg::Matrix;
use crate::ode::{Dopri5, StepControl};
use crate::params::Params;
use crate::scalar::{pow_pos, Real};

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination<T> {
    ReachedRmax,
    /// `u` reached zero at `r`; the trajectory is not a global positive solution.
    UHitZero {
        r: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOptions<T> {
    /// Relative local error tolerance, in `(1e-12, 1e-4)`.
    pub tol: T,
    pub r_max: T,
    pub max_step: Option<T>,
    pub max_steps: usize,
    /// Radii that must appear as grid nodes.
    pub checkpoints: Vec<T>,
}

impl<T: Real> RadialOptions<T> {
    pub fn new(r_max: T, tol: T) -> Self {
        Self { tol, r_max, max_step: None, max_steps: 1_000_000, checkpoints: Vec::new() }
    }

    pub fn with_max_step(mut self, h: T) -> Self {
        self.max_step = Some(h);
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    pub fn with_checkpoints(mut self, radii: Vec<T>) -> Self {
        self.checkpoints = radii;
        self
    }
}

/// Two-term expansion at the center:
/// `u ≈ u0 - A r^{p'} + B r^{2p'}`, `A = ((p-1)/p)(u0^q/n)^{1/(p-1)}`,
/// `B = n q A² / (2 u0 (n+p') (p-1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Series<T> {
    u0: T,
    a: T,
    b: T,
    pc: T,
    n: T,
    q: T,
}

impl<T: Real> Series<T> {
    fn new(params: &Params<T>, u0: T) -> Self {
        let (n, p, q, pc) = (params.nf(), params.p(), params.q(), params.p_conj());
        let a = (p - T::one()) / p * pow_pos(pow_pos(u0, q) / n, T::one() / (p - T::one()));
        let b = n * q * a * a / (T::lit(2.0) * u0 * (n + pc) * (p - T::one()));
        Self { u0, a, b, pc, n, q }
    }

    fn jet(&self, r: T) -> RadialJet<T> {
        let (a, b, pc) = (self.a, self.b, self.pc);
        let two = T::lit(2.0);
        RadialJet {
            u: self.u0 - a * pow_pos(r, pc) + b * pow_pos(r, two * pc),
            du: -a * pc * pow_pos(r, pc - T::one()) + two * b * pc * pow_pos(r, two * pc - T::one()),
            ddu: -a * pc * (pc - T::one()) * pow_pos(r, pc - two)
                + two * b * pc * (two * pc - T::one()) * pow_pos(r, two * pc - two),
        }
    }

    fn du_over_r(&self, r: T) -> T {
        let two = T::lit(2.0);
        -self.a * self.pc * pow_pos(r, self.pc - two) + two * self.b * self.pc * pow_pos(r, two * self.pc - two)
    }

    fn flux(&self, r: T) -> T {
        let (n, q) = (self.n, self.q);
        -pow_pos(self.u0, q) * pow_pos(r, n) / n
            + q * pow_pos(self.u0, q - T::one()) * self.a * pow_pos(r, n + self.pc) / (n + self.pc)
    }
}

/// Grid values of a radial solution; node 0 is the center, node 1 the end of
/// the series start.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution<T> {
    pub params: Params<T>,
    pub u0: T,
    pub tol: T,
    pub grid: Vec<T>,
    pub u: Vec<T>,
    pub du: Vec<T>,
    pub flux: Vec<T>,
    /// `u''` recovered from the equation (the limit value at the center).
    pub ddu: Vec<T>,
    pub termination: Termination<T>,
}

fn signed_pow<T: Real>(x: T, e: T) -> T {
    if x < T::zero() {
        -pow_pos(-x, e)
    } else {
        pow_pos(x, e)
    }
}

/// `u''` from the equation: `-(u^q + (n-1)/r |u'|^{p-2}u') / ((p-1)|u'|^{p-2})`.
fn ddu_from_equation<T: Real>(params: &Params<T>, r: T, u: T, du: T) -> T {
    let p = params.p();
    let g = pow_pos(du.abs(), p - T::lit(2.0));
    -(signed_pow(u, params.q()) + (params.nf() - T::one()) / r * g * du) / ((p - T::one()) * g)
}

/// Natural length scale `u0^{-p/(n-p)}` of the solution with center value `u0`.
pub fn length_scale<T: Real>(params: &Params<T>, u0: T) -> T {
    pow_pos(u0, -params.p() / (params.nf() - params.p()))
}

pub fn solve_radial<T: Real>(params: &Params<T>, u0: T, r_max: T, tol: T) -> Result<RadialSolution<T>> {
    solve_radial_with(params, u0, &RadialOptions::new(r_max, tol))
}

pub fn solve_radial_with<T: Real>(params: &Params<T>, u0: T, opts: &RadialOptions<T>) -> Result<RadialSolution<T>> {
    let tol = opts.tol;
    if !(tol > T::lit(1e-12) && tol < T::lit(1e-4)) {
        return Err(Error::InvalidInput(format!("tolerance {tol} outside (1e-12, 1e-4)")));
    }
    if !(u0 > T::zero() && u0.is_finite()) {
        return Err(Error::InvalidInput(format!("center value must be positive, got {u0}")));
    }
    let r_max = opts.r_max;
    if !(r_max > T::zero() && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!("r_max must be positive, got {r_max}")));
    }
    let (n, p, q) = (params.nf(), params.p(), params.q());
    let series = Series::new(params, u0);
    let r_s = (T::lit(0.1) * tol.sqrt() * length_scale(params, u0)).min(r_max * T::lit(1e-3));

    let p_minus_two = p - T::lit(2.0);
    let center_ddu = if p_minus_two > T::zero() {
        T::neg_infinity()
    } else if p_minus_two < T::zero() {
        T::zero()
    } else {
        -pow_pos(u0, q) / n
    };
    let start = series.jet(r_s);
    let mut sol = RadialSolution {
        params: *params,
        u0,
        tol,
        grid: vec![T::zero(), r_s],
        u: vec![u0, start.u],
        du: vec![T::zero(), start.du],
        flux: vec![T::zero(), series.flux(r_s)],
        ddu: vec![center_ddu, start.ddu],
        termination: Termination::ReachedRmax,
    };

    let inv = T::one() / (p - T::one());
    let rhs = move |r: T, y: &[T]| -> Result<Vec<T>> {
        let rn1 = pow_pos(r, n - T::one());
        let du = -signed_pow(-y[1] / rn1, inv);
        Ok(vec![du, -rn1 * signed_pow(y[0], q)])
    };
    let ctl = StepControl {
        rtol: tol,
        atol: vec![T::zero()],
        max_step: opts.max_step.unwrap_or(r_max),
        min_step: T::lit(16.0) * T::epsilon() * r_s,
    };
    let mut solver = Dopri5::new(rhs, r_s, vec![start.u, sol.flux[1]], r_s, ctl)?;
    let mut stops: Vec<T> = opts.checkpoints.iter().copied().filter(|&c| c > r_s && c < r_max).collect();
    stops.push(r_max);
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut next_stop = 0;
    let mut steps = 0usize;
    while solver.t() < r_max {
        if steps >= opts.max_steps {
            return Err(Error::StepFailure {
                r: solver.t().to_f64_lossy(),
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        steps += 1;
        while stops[next_stop] <= solver.t() {
            next_stop += 1;
        }
        let (r0, u_prev, du_prev) = (solver.t(), solver.y()[0], solver.dy()[0]);
        let acc = solver.step(stops[next_stop])?;
        let (r, u, du) = (acc.t, acc.y[0], acc.dy[0]);
        if !(u > T::zero()) {
            let r_star = hermite_root(r0, u_prev, du_prev, r, u, du);
            sol.termination = Termination::UHitZero { r: r_star };
            return Ok(sol);
        }
        sol.grid.push(r);
        sol.u.push(u);
        sol.du.push(du);
        sol.flux.push(acc.y[1]);
        sol.ddu.push(ddu_from_equation(params, r, u, du));
    }
    Ok(sol)
}

fn hermite<T: Real>(h: T, t: T, y0: T, m0: T, y1: T, m1: T) -> (T, T) {
    let lit = T::lit;
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (lit(2.0) * t3 - lit(3.0) * t2 + T::one()) * y0
        + (t3 - lit(2.0) * t2 + t) * h * m0
        + (lit(3.0) * t2 - lit(2.0) * t3) * y1
        + (t3 - t2) * h * m1;
    let d = ((lit(6.0) * t2 - lit(6.0) * t) * y0
        + (lit(3.0) * t2 - lit(4.0) * t + T::one()) * h * m0
        + (lit(6.0) * t - lit(6.0) * t2) * y1
        + (lit(3.0) * t2 - lit(2.0) * t) * h * m1)
        / h;
    (v, d)
}

/// Quintic Hermite interpolant on `(y, y', y'')` at both ends: value and first
/// two derivatives at `t ∈ [0, 1]` of a step of length `h`.
fn quintic<T: Real>(h: T, t: T, a: [T; 3], b: [T; 3]) -> [T; 3] {
    let l = |x: f64| T::lit(x);
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let basis = [
        [
            T::one() - l(10.0) * t3 + l(15.0) * t4 - l(6.0) * t5,
            l(-30.0) * t2 + l(60.0) * t3 - l(30.0) * t4,
            l(-60.0) * t + l(180.0) * t2 - l(120.0) * t3,
        ],
        [
            t - l(6.0) * t3 + l(8.0) * t4 - l(3.0) * t5,
            T::one() - l(18.0) * t2 + l(32.0) * t3 - l(15.0) * t4,
            l(-36.0) * t + l(96.0) * t2 - l(60.0) * t3,
        ],
        [
            l(0.5) * t2 - l(1.5) * t3 + l(1.5) * t4 - l(0.5) * t5,
            t - l(4.5) * t2 + l(6.0) * t3 - l(2.5) * t4,
            T::one() - l(9.0) * t + l(18.0) * t2 - l(10.0) * t3,
        ],
        [
            l(10.0) * t3 - l(15.0) * t4 + l(6.0) * t5,
            l(30.0) * t2 - l(60.0) * t3 + l(30.0) * t4,
            l(60.0) * t - l(180.0) * t2 + l(120.0) * t3,
        ],
        [
            l(-4.0) * t3 + l(7.0) * t4 - l(3.0) * t5,
            l(-12.0) * t2 + l(28.0) * t3 - l(15.0) * t4,
            l(-24.0) * t + l(84.0) * t2 - l(60.0) * t3,
        ],
        [
            l(0.5) * t3 - t4 + l(0.5) * t5,
            l(1.5) * t2 - l(4.0) * t3 + l(2.5) * t4,
            l(3.0) * t - l(12.0) * t2 + l(10.0) * t3,
        ],
    ];
    let coef = [a[0], h * a[1], h * h * a[2], b[0], h * b[1], h * h * b[2]];
    let mut out = [T::zero(); 3];
    for (c, row) in coef.iter().zip(&basis) {
        for k in 0..3 {
            out[k] = out[k] + *c * row[k];
        }
    }
    [out[0], out[1] / h, out[2] / (h * h)]
}

/// Zero of the cubic Hermite interpolant on `[r0, r1]`, by bisection.
fn hermite_root<T: Real>(r0: T, u0: T, du0: T, r1: T, u1: T, du1: T) -> T {
    let h = r1 - r0;
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..100 {
        let mid = (lo + hi) / T::lit(2.0);
        if hermite(h, mid, u0, du0, u1, du1).0 > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r0 + h * (lo + hi) / T::lit(2.0)
}

/// Limit of `u(r) r^{(n-p)/(p-1)}` for the solution with center value `u0`.
///
/// Reading the limit off `u` directly is ill-conditioned: integration errors
/// excite a constant mode in `u` that swamps the decaying tail. The flux
/// converges instead, `w → W`, and `u ~ |W|^{1/(p-1)} r^{-(n-p)/(p-1)} / ((n-p)/(p-1))`.
/// `W` is extrapolated by Neville's scheme in the variable `r^{-p'}`, in which
/// the bubble's flux is a power series, from eight radii spread over
/// `[s, 8s] λ` with `s = tol^{-1/(8p')}` and `λ = c_np u0^{-p/(n-p)}`. The
/// window balances truncation against the contamination, which grows like
/// `r^{(n-2p)/(p-1)}`; for `p` well below `n/2` no window is accurate.
pub fn decay_constant<T: Real>(params: &Params<T>, u0: T, tol: T) -> Result<T> {
    let start = tol.to_f64_lossy().powf(-1.0 / (8.0 * params.p_conj().to_f64_lossy()));
    decay_constant_from(params, u0, tol, start, 8.0 * start, 8)
}

pub(crate) fn decay_constant_from<T: Real>(
    params: &Params<T>,
    u0: T,
    tol: T,
    start: f64,
    end: f64,
    points: usize,
) -> Result<T> {
    let lam = normalization(params) * length_scale(params, u0);
    let base = T::lit(start) * lam;
    let ratio = pow_pos(T::lit(end / start), T::one() / T::of_usize(points - 1));
    let radii: Vec<T> = (0..points).map(|k| base * pow_pos(ratio, T::of_usize(k))).collect();
    let r_end = radii[points - 1];
    let sol = solve_radial_with(params, u0, &RadialOptions::new(r_end, tol).with_checkpoints(radii.clone()))?;
    if let Termination::UHitZero { r } = sol.termination {
        return Err(Error::NoConvergence { iterations: 0, reason: format!("profile reached zero at r = {r}") });
    }
    let pc = params.p_conj();
    let mut xs = Vec::with_capacity(points);
    let mut ws = Vec::with_capacity(points);
    for &r in &radii {
        let i = sol
            .grid
            .iter()
            .position(|&g| g == r)
            .ok_or_else(|| Error::NoConvergence { iterations: 0, reason: "checkpoint missing from grid".into() })?;
        xs.push(pow_pos(r / base, -pc));
        ws.push(sol.flux[i]);
    }
    // Neville's scheme evaluated at x = 0
    for level in 1..points {
        for i in (level..points).rev() {
            ws[i] = (xs[i - level] * ws[i] - xs[i] * ws[i - 1]) / (xs[i - level] - xs[i]);
        }
    }
    let w_inf = ws[points - 1];
    Ok(pow_pos(w_inf.abs(), T::one() / (params.p() - T::one())) / params.decay())
}

/// Outcome of [`shoot_for_bubble`].
#[derive(Debug, Clone, PartialEq)]
pub struct Shot<T> {
    pub u0: T,
    pub iterations: usize,
    pub solution: RadialSolution<T>,
}

/// Finds the center value whose solution decays like `target · r^{-(n-p)/(p-1)}`.
///
/// The decay constant scales as `u0^{-1/(p-1)}` along the family, so each
/// iteration is a secant step in log-log coordinates with that known slope.
pub fn shoot_for_bubble<T: Real>(params: &Params<T>, target: T) -> Result<Shot<T>> {
    shoot_for_bubble_with(params, target, T::lit(1e-10).max(T::default_quad_rel()), 10.0)
}

/// As [`shoot_for_bubble`], with the integration tolerance and the returned
/// solution's extent in units of the bubble's `λ`.
pub fn shoot_for_bubble_with<T: Real>(params: &Params<T>, target: T, tol: T, extent: f64) -> Result<Shot<T>> {
    if !(target > T::zero() && target.is_finite()) {
        return Err(Error::InvalidInput(format!("target decay constant must be positive, got {target}")));
    }
    let p = params.p();
    let goal = T::lit(1e3) * tol;
    let mut u0 = T::one();
    for it in 1..=12 {
        let a = decay_constant(params, u0, tol)?;
        if !(a > T::zero() && a.is_finite()) {
            return Err(Error::NoConvergence { iterations: it, reason: format!("decay constant {a}") });
        }
        let mismatch = a / target;
        u0 = u0 * pow_pos(mismatch, p - T::one());
        if (mismatch - T::one()).abs() <= goal {
            let lambda = normalization(params) * pow_pos(u0, -p / (params.nf() - p));
            let solution = solve_radial(params, u0, T::lit(extent) * lambda, tol)?;
            return Ok(Shot { u0, iterations: it, solution });
        }
    }
    Err(Error::NoConvergence { iterations: 12, reason: "decay constant did not match the target".into() })
}

/// A radial solution as a field centered at `center`.
#[derive(Debug, Clone)]
pub struct RadialInterpolant<T> {
    sol: RadialSolution<T>,
    series: Series<T>,
    center: Vec<T>,
}

/// Interpolates `u` by quintic Hermite on `(u, u', u'')` between grid nodes, so
/// the Hessian uses derivatives of the interpolant itself; inside the series
/// start the expansion is used.
pub fn as_field<T: Real>(sol: &RadialSolution<T>, center: Vec<T>) -> Result<RadialInterpolant<T>> {
    if sol.termination != Termination::ReachedRmax {
        return Err(Error::InvalidInput("solution did not reach r_max".into()));
    }
    if center.len() != sol.params.n() {
        return Err(Error::InvalidInput("center dimension differs from n".into()));
    }
    Ok(RadialInterpolant { sol: sol.clone(), series: Series::new(&sol.params, sol.u0), center })
}

impl<T: Real> RadialInterpolant<T> {
    pub fn solution(&self) -> &RadialSolution<T> {
        &self.sol
    }

    pub fn r_max(&self) -> T {
        self.sol.grid[self.sol.grid.len() - 1]
    }
}

impl<T: Real> FieldEvaluator<T> for RadialInterpolant<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.center.len(), x)?;
        let r = x.iter().zip(&self.center).fold(T::zero(), |a, (&xi, &ci)| a + (xi - ci) * (xi - ci)).sqrt();
        Ok(self.jet(r)?.u)
    }

    fn derivatives(&self) -> Derivatives {
        Derivatives::Hessian
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.center.len(), x)?;
        radial_gradient(self, x)
    }

    fn hessian(&self, x: &[T]) -> Result<Matrix<T>> {
        check_dim(self.center.len(), x)?;
        let h = radial_hessian(self, x);
        match h {
            Err(Error::NonFinite(_)) => Err(Error::CenterSingularity),
            other => other,
        }
    }
}

impl<T: Real> RadialField<T> for RadialInterpolant<T> {
    fn center(&self) -> &[T] {
        &self.center
    }

    fn jet(&self, r: T) -> Result<RadialJet<T>> {
        let s = &self.sol;
        if r > self.r_max() {
            return Err(Error::InterpolationDomain { r: r.to_f64_lossy(), r_max: self.r_max().to_f64_lossy() });
        }
        if r <= s.grid[1] {
            if r == s.grid[1] {
                return Ok(RadialJet { u: s.u[1], du: s.du[1], ddu: s.ddu[1] });
            }
            return Ok(self.series.jet(r));
        }
        let i = s.grid.partition_point(|&g| g < r) - 1;
        let h = s.grid[i + 1] - s.grid[i];
        let t = (r - s.grid[i]) / h;
        let [u, du, ddu] = quintic(h, t, [s.u[i], s.du[i], s.ddu[i]], [s.u[i + 1], s.du[i + 1], s.ddu[i + 1]]);
        Ok(RadialJet { u, du, ddu })
    }

    fn du_over_r(&self, r: T) -> Result<T> {
        if r < self.sol.grid[1] {
            return Ok(self.series.du_over_r(r));
        }
        Ok(self.jet(r)?.du / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubbles::Bubble;
    use crate::field::RadialField;
    use crate::operators::residual;

    fn bubble_error(n: usize, p: f64, lambda: f64, tol: f64) -> f64 {
        let prm = Params::<f64>::new(n, p).unwrap();
        let b = Bubble::new(prm, lambda, vec![0.0; n]).unwrap();
        let sol = solve_radial(&prm, b.center_value(), 20.0 * lambda, tol).unwrap();
        assert_eq!(sol.termination, Termination::ReachedRmax);
        sol.grid
            .iter()
            .zip(&sol.u)
            .map(|(&r, &u)| ((u - b.value_at_radius(r)) / b.value_at_radius(r)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn recovers_bubbles() {
        assert!(bubble_error(3, 2.0, 1.0, 1e-8) <= 1e-4);
        assert!(bubble_error(4, 1.5, 0.3, 1e-10) <= 1e-4);
        assert!(bubble_error(5, 3.0, 2.0, 1e-8) <= 1e-4);
    }

    #[test]
    fn tighter_tolerance_is_more_accurate() {
        let coarse = bubble_error(3, 2.0, 1.0, 1e-6);
        let fine = bubble_error(3, 2.0, 1.0, 1e-8);
        assert!(fine <= 0.1 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn monotone_and_negative_flux() {
        let prm = Params::<f64>::new(4, 2.5).unwrap();
        let sol = solve_radial(&prm, 1.0, 50.0, 1e-9).unwrap();
        for i in 1..sol.grid.len() {
            assert!(sol.u[i] < sol.u[i - 1]);
            assert!(sol.flux[i] < 0.0 && sol.du[i] < 0.0);
        }
        assert_eq!(sol.u[0], 1.0);
        assert_eq!(sol.du[0], 0.0);
    }

    #[test]
    fn invalid_inputs() {
        let prm = Params::<f64>::new(3, 2.0).unwrap();
        assert!(matches!(solve_radial(&prm, 1.0, 10.0, 1e-3), Err(Error::InvalidInput(_))));
        assert!(matches!(solve_radial(&prm, -1.0, 10.0, 1e-8), Err(Error::InvalidInput(_))));
        assert!(matches!(
            solve_radial_with(&prm, 1.0, &RadialOptions::new(10.0, 1e-8).with_max_steps(3)),
            Err(Error::StepFailure { .. })
        ));
        assert!(shoot_for_bubble(&prm, -1.0).is_err());
    }

    #[test]
    fn hermite_root_locates_crossing() {
        // odd symmetry about the midpoint puts the root there
        let r: f64 = hermite_root(0.0, 1.0, -1.0, 2.0, -1.0, -1.0);
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shooting_recovers_center_value() {
        for &(n, p) in &[(3usize, 2.0), (4, 1.5), (5, 3.0)] {
            let prm = Params::<f64>::new(n, p).unwrap();
            let b = Bubble::standard(prm);
            let shot = shoot_for_bubble(&prm, b.decay_constant()).unwrap();
            assert!((shot.u0 - b.center_value()).abs() <= 1e-6 * b.center_value(), "{n} {p}: {}", shot.u0);
        }
    }

    #[test]
    fn quintic_reproduces_quintic_polynomials() {
        let f = |x: f64| [x.powi(5) - x * x, 5.0 * x.powi(4) - 2.0 * x, 20.0 * x.powi(3) - 2.0];
        let (a, b) = (0.5, 1.25);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let got = quintic(b - a, t, f(a), f(b));
            let want = f(a + t * (b - a));
            for j in 0..3 {
                assert!((got[j] - want[j]).abs() < 1e-12, "{t} {j}");
            }
        }
    }

    #[test]
    fn interpolant_reproduces_nodes_and_guards_domain() {
        let prm = Params::<f64>::new(3, 1.6).unwrap();
        let sol = solve_radial(&prm, 1.0, 10.0, 1e-9).unwrap();
        let f = as_field(&sol, vec![0.0; 3]).unwrap();
        for i in (0..sol.grid.len()).step_by(7) {
            assert_eq!(f.jet(sol.grid[i]).unwrap().u, sol.u[i]);
        }
        assert!(matches!(f.value(&[11.0, 0.0, 0.0]), Err(Error::InterpolationDomain { .. })));
    }

    #[test]
    fn interpolant_residual_is_small() {
        let prm = Params::<f64>::new(4, 2.4).unwrap();
        let b = Bubble::standard(prm);
        let sol = solve_radial(&prm, b.center_value(), 20.0, 1e-10).unwrap();
        let f = as_field(&sol, vec![0.0; 4]).unwrap();
        for k in 1..30 {
            let x = [0.1 * k as f64, 0.05 * k as f64, -0.2, 0.3];
            let s = residual(&f, &x, &prm).unwrap();
            let scale = f.value(&x).unwrap().powf(prm.q());
            assert!(s.residual.abs() <= 1e-5 * scale, "k={k}: {} vs {scale}", s.residual);
        }
    }
}
