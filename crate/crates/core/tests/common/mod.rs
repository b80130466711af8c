//! Shared fixtures: random cubic fields with exact derivatives and closed-form
//! references computed without the library.

#![allow(dead_code, clippy::needless_range_loop)]

use plaplace::error::Result;
use plaplace::field::{Derivatives, FieldEvaluator};
use plaplace::linalg::Matrix;
use rand::Rng;

/// `f(x) = c + b·x + x'Ax/2 + T(x,x,x)/6` with symmetric `A` and `T`.
#[derive(Debug, Clone)]
pub struct Cubic {
    pub n: usize,
    pub c: f64,
    pub b: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub t: Vec<Vec<Vec<f64>>>,
}

impl Cubic {
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let mut t = vec![vec![vec![0.0; n]; n]; n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = 0.5 * rng.gen_range(-1.0..1.0);
                    for (x, y, z) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        t[x][y][z] = v;
                    }
                }
            }
        }
        let b = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Self { n, c: rng.gen_range(1.0..3.0), b, a, t }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut g = self.b[i];
                for j in 0..n {
                    g += self.a[i][j] * x[j];
                    for k in 0..n {
                        g += 0.5 * self.t[i][j][k] * x[j] * x[k];
                    }
                }
                g
            })
            .collect()
    }

    pub fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut h = self.a.clone();
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for k in 0..n {
                    *v += self.t[i][j][k] * x[k];
                }
            }
        }
        h
    }

    pub fn val(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut v = self.c;
        for i in 0..n {
            v += self.b[i] * x[i];
            for j in 0..n {
                v += 0.5 * self.a[i][j] * x[i] * x[j];
                for k in 0..n {
                    v += self.t[i][j][k] * x[i] * x[j] * x[k] / 6.0;
                }
            }
        }
        v
    }
}

impl FieldEvaluator<f64> for Cubic {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.val(x))
    }

    fn derivatives(&self) -> Derivatives {
        Derivatives::Hessian
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.grad(x))
    }

    fn hessian(&self, x: &[f64]) -> Result<Matrix<f64>> {
        let h = self.hess(x);
        Ok(Matrix::from_fn(self.n, |i, j| h[i][j]))
    }
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dotv(row, v)).collect()
}

/// Exact `(lhs, rhs)` of the p-Bochner inequality for a cubic, using its
/// constant third derivative.
pub fn bochner_exact(f: &Cubic, x: &[f64], p: f64) -> (f64, f64) {
    let n = f.n;
    let nf = n as f64;
    let g = f.grad(x);
    let h = f.hess(x);
    let g2 = dotv(&g, &g);
    let gn = g2.sqrt();
    let hg = matvec(&h, &g);
    let hhg = matvec(&h, &hg);
    let s = dotv(&g, &hg);
    let tr: f64 = (0..n).map(|i| h[i][i]).sum();
    let lap = gn.powf(p - 2.0) * (tr + (p - 2.0) * s / g2);

    // second derivatives of W = |g|^p
    let mut dw = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let hh: f64 = (0..n).map(|k| h[i][k] * h[k][j]).sum();
            let tg: f64 = (0..n).map(|k| f.t[i][j][k] * g[k]).sum();
            dw[i][j] = p * gn.powf(p - 2.0) * ((p - 2.0) * hg[i] * hg[j] / g2 + hh + tg);
        }
    }
    let dw_tr: f64 = (0..n).map(|i| dw[i][i]).sum();
    let dw_gg = dotv(&g, &matvec(&dw, &g));
    let lhs = (gn.powf(p - 2.0) * dw_tr + (p - 2.0) * gn.powf(p - 4.0) * dw_gg) / p;

    // gradient of the p-Laplacian
    let bracket = tr + (p - 2.0) * s / g2;
    let grad_lap: Vec<f64> = (0..n)
        .map(|k| {
            let ttr: f64 = (0..n).map(|i| f.t[i][i][k]).sum();
            let tgg: f64 =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| f.t[i][j][k] * g[i] * g[j]).sum();
            let ds = tgg + 2.0 * hhg[k];
            (p - 2.0) * gn.powf(p - 4.0) * hg[k] * bracket
                + gn.powf(p - 2.0) * (ttr + (p - 2.0) * (ds / g2 - 2.0 * s * hg[k] / (g2 * g2)))
        })
        .collect();

    let square = lap * lap / nf;
    let inner = lap / nf - (p - 1.0) * gn.powf(p - 4.0) * s;
    let sharp = nf / (nf - 1.0) * inner * inner;
    let transport = gn.powf(p - 2.0) * (dotv(&g, &grad_lap) - (p - 2.0) * lap * s / g2);
    (lhs, square + sharp + transport)
}

/// Bubble profile written out directly from its closed form.
pub fn bubble_profile(n: usize, p: f64, lambda: f64, r: f64) -> f64 {
    let nf = n as f64;
    let c = nf.powf(1.0 / p) * ((nf - p) / (p - 1.0)).powf((p - 1.0) / p);
    let pc = p / (p - 1.0);
    (lambda.powf(1.0 / (p - 1.0)) * c / (lambda.powf(pc) + r.powf(pc))).powf((nf - p) / p)
}

/// `|x|` of a point.
pub fn radius(x: &[f64]) -> f64 {
    dotv(x, x).sqrt()
}
