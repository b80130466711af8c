//! Numerical verification toolkit for the critical p-Laplace equation
//! `Δ_p u + u^{p*-1} = 0` on `R^n`.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`, which is what the command-line tool uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bubbles;
pub mod cli;
pub mod energy;
pub mod error;
pub mod field;
pub mod fields;
pub mod gradient;
pub mod linalg;
pub mod ode;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod regions;
pub mod scalar;

pub use error::{Error, Result};

pub type Params64 = params::Params<f64>;
pub type Bubble64 = bubbles::Bubble<f64>;
pub type CutoffField64 = gradient::CutoffField<f64>;
pub type RadialSolution64 = radial::RadialSolution<f64>;
pub type RadialInterpolant64 = radial::RadialInterpolant<f64>;
pub type TensorSample64 = fields::TensorSample<f64>;
pub type AnnulusEnergy64 = energy::AnnulusEnergy<f64>;
pub type ClassificationOutcome64 = regions::ClassificationOutcome<f64>;
pub type Thresholds64 = regions::Thresholds<f64>;
pub type Matrix64 = linalg::Matrix<f64>;

#[cfg(test)]
mod tests {
    use crate::bubbles::Bubble;
    use crate::operators::residual;
    use crate::params::Params;
    use crate::regions::{classify, ClassificationQuery};

    #[test]
    fn single_precision_bubble_residual() {
        let prm = Params::<f32>::new(3, 2.0).unwrap();
        let b = Bubble::standard(prm);
        let s = residual(&b, &[0.7, -0.2, 0.4], &prm).unwrap();
        assert!(s.residual.abs() <= 1e-4 * s.value.powf(prm.q()), "{}", s.residual);
    }

    #[test]
    fn single_precision_classification() {
        let out = classify(&ClassificationQuery::<f32> { n: 3, p: 1.8, alpha: None, energy_exponent: None }).unwrap();
        assert!(out.covered);
        assert_eq!(out.case_id.tag(), "T1.2-ii");
    }
}
