//! Dense vectors and small square matrices; dimension is runtime data.

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Copy of `x` with `x[i] += h`.
pub fn shifted<T: Real>(x: &[T], i: usize, h: T) -> Vec<T> {
    let mut y = x.to_vec();
    y[i] = y[i] + h;
    y
}

/// Row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// `a * b^T`.
    pub fn outer(a: &[T], b: &[T]) -> Self {
        Self::from_fn(a.len(), |i, j| a[i] * b[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v)).collect()
    }

    /// `a^T M b`.
    pub fn bilinear(&self, a: &[T], b: &[T]) -> T {
        dot(a, &self.mul_vec(b))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| (0..self.n).fold(T::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// `(M + M^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        self.add(&self.transpose()).scale(T::lit(0.5))
    }

    /// `M - tr(M)/n * Id`.
    pub fn traceless(&self) -> Self {
        let shift = self.trace() / T::of_usize(self.n);
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] = m[(i, i)] - shift;
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traceless_has_zero_trace() {
        let m = Matrix::from_fn(3, |i, j| (i * 3 + j) as f64 + 0.5);
        let t = m.traceless();
        assert!(t.trace().abs() < 1e-14);
        assert_eq!(t[(0, 1)], m[(0, 1)]);
    }

    #[test]
    fn bilinear_matches_manual() {
        let m = Matrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        assert_eq!(m.bilinear(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(m.bilinear(&[1.0, 1.0], &[1.0, 1.0]), 6.0);
    }
}
