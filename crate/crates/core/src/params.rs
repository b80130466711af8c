use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default relative floor under which a gradient is treated as vanishing.
pub const DEFAULT_GRAD_FLOOR: f64 = 1e-10;

/// Problem context: dimension `n`, exponent `p` and the derived critical exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    n: usize,
    p: T,
    p_star: T,
    decay: T,
    grad_floor: T,
}

impl<T: Real> Params<T> {
    /// Requires `n >= 2` and `1 < p < n`.
    pub fn new(n: usize, p: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("dimension n = {n} must be at least 2")));
        }
        let nf = T::of_usize(n);
        if !p.is_finite() || p <= T::one() || p >= nf {
            return Err(Error::InvalidParams(format!("exponent p = {p} must satisfy 1 < p < n = {n}")));
        }
        Ok(Self {
            n,
            p,
            p_star: nf * p / (nf - p),
            decay: (nf - p) / (p - T::one()),
            grad_floor: T::lit(DEFAULT_GRAD_FLOOR),
        })
    }

    /// Replaces the critical-point floor used by the pointwise operators.
    pub fn with_grad_floor(mut self, floor: T) -> Self {
        self.grad_floor = floor;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension as a scalar.
    pub fn nf(&self) -> T {
        T::of_usize(self.n)
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// Critical Sobolev exponent `np/(n-p)`.
    pub fn p_star(&self) -> T {
        self.p_star
    }

    /// Decay rate `(n-p)/(p-1)` of the bubbles at infinity.
    pub fn decay(&self) -> T {
        self.decay
    }

    /// Power of the nonlinearity, `p* - 1`.
    pub fn q(&self) -> T {
        self.p_star - T::one()
    }

    /// Hölder conjugate `p/(p-1)`.
    pub fn p_conj(&self) -> T {
        self.p / (self.p - T::one())
    }

    pub fn grad_floor(&self) -> T {
        self.grad_floor
    }
}
