//! Dormand–Prince 5(4) embedded Runge–Kutta stepper (FSAL, elementary step
//! size control).

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Debug, Clone, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    /// Absolute tolerance per component; a single entry applies to all.
    pub atol: Vec<T>,
    pub max_step: T,
    pub min_step: T,
}

/// One accepted step: the new state and its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Accepted<T> {
    pub t: T,
    pub y: Vec<T>,
    pub dy: Vec<T>,
}

/// Adaptive integrator for `y' = f(t, y)`.
pub struct Dopri5<T, F> {
    f: F,
    t: T,
    y: Vec<T>,
    dy: Vec<T>,
    h: T,
    ctl: StepControl<T>,
}

impl<T: Real, F: FnMut(T, &[T]) -> Result<Vec<T>>> Dopri5<T, F> {
    pub fn new(mut f: F, t0: T, y0: Vec<T>, h0: T, ctl: StepControl<T>) -> Result<Self> {
        let dy = f(t0, &y0)?;
        Ok(Self { f, t: t0, y: y0, dy, h: h0.min(ctl.max_step), ctl })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn dy(&self) -> &[T] {
        &self.dy
    }

    /// Advances by one accepted step that does not pass `t_stop`.
    pub fn step(&mut self, t_stop: T) -> Result<Accepted<T>> {
        let m = self.y.len();
        let lit = T::lit;
        loop {
            let remaining = t_stop - self.t;
            if !(remaining > T::zero()) {
                return Err(Error::StepFailure { r: self.t.to_f64_lossy(), reason: "already at stop point".into() });
            }
            let mut h = self.h.min(self.ctl.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < self.ctl.min_step && !last {
                return Err(Error::StepFailure {
                    r: self.t.to_f64_lossy(),
                    reason: format!("step size {h} underflow"),
                });
            }
            let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
            k.push(self.dy.clone());
            let mut stage_ok = true;
            for s in 1..7 {
                let ys: Vec<T> = (0..m)
                    .map(|i| {
                        let mut acc = self.y[i];
                        for (j, kj) in k.iter().enumerate() {
                            acc = acc + h * lit(A[s][j]) * kj[i];
                        }
                        acc
                    })
                    .collect();
                match (self.f)(self.t + h * lit(C[s]), &ys) {
                    Ok(v) if v.iter().all(|x| x.is_finite()) => k.push(v),
                    _ => {
                        stage_ok = false;
                        break;
                    }
                }
            }
            if !stage_ok {
                self.h = h * lit(0.25);
                continue;
            }
            // FSAL: the seventh stage is evaluated at the fifth-order solution
            let ynew: Vec<T> = (0..m)
                .map(|i| {
                    let mut acc = self.y[i];
                    for j in 0..6 {
                        acc = acc + h * lit(A[6][j]) * k[j][i];
                    }
                    acc
                })
                .collect();
            let mut err = T::zero();
            for i in 0..m {
                let mut e = T::zero();
                for j in 0..7 {
                    e = e + h * lit(E[j]) * k[j][i];
                }
                let atol = self.ctl.atol.get(i).or(self.ctl.atol.first()).copied().unwrap_or(T::zero());
                let sc = atol + self.ctl.rtol * self.y[i].abs().max(ynew[i].abs());
                let sc = sc.max(T::min_positive_value());
                err = err + (e / sc) * (e / sc);
            }
            let err = (err / T::of_usize(m)).sqrt();
            if !err.is_finite() {
                self.h = h * lit(0.25);
                continue;
            }
            let fac =
                if err == T::zero() { lit(5.0) } else { (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2)) };
            if err <= T::one() {
                self.t = if last { t_stop } else { self.t + h };
                self.y = ynew;
                self.dy = k.pop().unwrap_or_default();
                if !last || fac < T::one() {
                    self.h = h * fac;
                }
                return Ok(Accepted { t: self.t, y: self.y.clone(), dy: self.dy.clone() });
            }
            self.h = h * fac.min(T::one());
        }
    }
}
