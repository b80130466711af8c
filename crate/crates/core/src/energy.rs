//! Energies of radial fields on balls and annuli, growth-exponent fits, the
//! weighted energy `∫ u^{(np+t(n-p))/(n-p)} + ∫ u^t |∇u|^p`, and diagnostics
//! for the kinetic/potential ball inequalities.
//!
//! Every integral reduces to `ω_{n-1} ∫ g(r) r^{n-1} dr`.

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::params::Params;
use crate::quadrature::{radial_integral, QuadOptions};
use crate::scalar::{pow_pos, Real};

/// Energies over `A_R = B_{2R} \ B_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusEnergy<T> {
    pub radius: T,
    /// `(1/p) ∫ |∇u|^p`
    pub kinetic: T,
    /// `(1/p*) ∫ u^{p*}`
    pub potential: T,
    pub total: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    Kinetic,
    Potential,
    Total,
}

impl EnergyKind {
    pub fn select<T: Copy>(self, e: &AnnulusEnergy<T>) -> T {
        match self {
            EnergyKind::Kinetic => e.kinetic,
            EnergyKind::Potential => e.potential,
            EnergyKind::Total => e.total,
        }
    }
}

impl std::str::FromStr for EnergyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kinetic" => Ok(EnergyKind::Kinetic),
            "potential" => Ok(EnergyKind::Potential),
            "total" => Ok(EnergyKind::Total),
            other => Err(Error::InvalidInput(format!("unknown energy kind '{other}'"))),
        }
    }
}

fn quad_opts<T: Real>() -> QuadOptions<T> {
    QuadOptions::default()
}

fn kinetic_density<'a, T: Real, F: RadialField<T> + ?Sized>(f: &'a F, p: T) -> impl Fn(T) -> Result<T> + 'a {
    move |r| Ok(pow_pos(f.jet(r)?.du.abs(), p))
}

fn potential_density<'a, T: Real, F: RadialField<T> + ?Sized>(f: &'a F, p_star: T) -> impl Fn(T) -> Result<T> + 'a {
    move |r| Ok(pow_pos(f.jet(r)?.u, p_star))
}

/// Break points for `[0, R]` that resolve structure near the center when `R` is large.
fn ball_breaks<T: Real>(radius: T) -> Vec<T> {
    let mut b = vec![T::zero()];
    for k in (1..=6).rev() {
        b.push(radius * pow_pos(T::lit(10.0), -T::of_usize(k)));
    }
    b.push(radius);
    b
}

fn check_radius<T: Real>(radius: T) -> Result<()> {
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Kinetic and potential energy of a radial field on `A_R`.
pub fn annulus_energy<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    radius: T,
    params: &Params<T>,
) -> Result<AnnulusEnergy<T>> {
    check_radius(radius)?;
    let n = params.n();
    let breaks = [radius, radius + radius];
    let opts = quad_opts();
    let kin = radial_integral(n, kinetic_density(field, params.p()), &breaks, &opts)?.value / params.p();
    let pot = radial_integral(n, potential_density(field, params.p_star()), &breaks, &opts)?.value / params.p_star();
    Ok(AnnulusEnergy { radius, kinetic: kin, potential: pot, total: kin + pot })
}

/// `∫_{B_R} |∇u|^p` (no `1/p` factor).
pub fn ball_kinetic<T: Real, F: RadialField<T> + ?Sized>(field: &F, radius: T, params: &Params<T>) -> Result<T> {
    check_radius(radius)?;
    Ok(radial_integral(params.n(), kinetic_density(field, params.p()), &ball_breaks(radius), &quad_opts())?.value)
}

/// `∫_{B_R} u^{p*}` (no `1/p*` factor).
pub fn ball_potential<T: Real, F: RadialField<T> + ?Sized>(field: &F, radius: T, params: &Params<T>) -> Result<T> {
    check_radius(radius)?;
    Ok(radial_integral(params.n(), potential_density(field, params.p_star()), &ball_breaks(radius), &quad_opts())?
        .value)
}

/// Least-squares slope of `log E` against `log R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit<T> {
    pub exponent: T,
    pub stderr: T,
    pub r_range: (T, T),
}

/// `count` points spread evenly in `log R` over `[lo, hi]`.
pub fn log_spaced<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * T::of_usize(k) / T::of_usize(count - 1)).exp()).collect()
}

/// Default radius grid: 16 radii per decade.
pub fn default_radii<T: Real>(lo: T, hi: T) -> Vec<T> {
    let decades = (hi / lo).log10().to_f64_lossy();
    let count = ((decades * 16.0).round() as usize + 1).max(4);
    log_spaced(lo, hi, count)
}

/// Slope and standard error of the least-squares line through `(x_i, y_i)`.
pub fn fit_slope<T: Real>(x: &[T], y: &[T]) -> Result<(T, T)> {
    let m = x.len();
    if m < 4 || y.len() != m {
        return Err(Error::DegenerateFit(format!("need at least 4 points, got {m}")));
    }
    let mf = T::of_usize(m);
    let xm = x.iter().fold(T::zero(), |a, &v| a + v) / mf;
    let ym = y.iter().fold(T::zero(), |a, &v| a + v) / mf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - xm) * (xi - xm);
        sxy = sxy + (xi - xm) * (yi - ym);
    }
    if !(sxx > T::zero()) {
        return Err(Error::DegenerateFit("abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let sse = x.iter().zip(y).fold(T::zero(), |a, (&xi, &yi)| {
        let e = yi - ym - slope * (xi - xm);
        a + e * e
    });
    let stderr = (sse / (mf - T::lit(2.0)) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Fits the growth exponent of the selected annulus energy over `radii`.
pub fn growth_fit<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    radii: &[T],
    params: &Params<T>,
    which: EnergyKind,
) -> Result<GrowthFit<T>> {
    let energies = radii.iter().map(|&r| annulus_energy(field, r, params)).collect::<Result<Vec<_>>>()?;
    fit_energies(&energies, which)
}

/// Fits the growth exponent of precomputed annulus energies.
pub fn fit_energies<T: Real>(energies: &[AnnulusEnergy<T>], which: EnergyKind) -> Result<GrowthFit<T>> {
    let mut xs = Vec::with_capacity(energies.len());
    let mut ys = Vec::with_capacity(energies.len());
    for e in energies {
        let v = which.select(e);
        if !(v > T::zero()) {
            return Err(Error::DegenerateFit(format!(
                "energy {v} at R = {} is not positive (infinite decay)",
                e.radius
            )));
        }
        xs.push(e.radius.ln());
        ys.push(v.ln());
    }
    let (exponent, stderr) = fit_slope(&xs, &ys)?;
    let lo = energies.iter().map(|e| e.radius).fold(T::infinity(), T::min);
    let hi = energies.iter().map(|e| e.radius).fold(T::neg_infinity(), T::max);
    Ok(GrowthFit { exponent, stderr, r_range: (lo, hi) })
}

/// `t < -1` and the exponent `β` of the weighted energy bound `C R^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEnergyParams<T> {
    pub t: T,
    pub beta: T,
}

impl<T: Real> WeightedEnergyParams<T> {
    pub fn new(t: T, params: &Params<T>) -> Result<Self> {
        if !(t < -T::one()) {
            return Err(Error::Domain(format!("weight exponent t = {t} must be below -1")));
        }
        let (nf, p) = (params.nf(), params.p());
        let beta = if t + p > T::zero() { -t * (nf - p) / p } else { -(t + T::one()) * (nf - p) / (p - T::one()) };
        Ok(Self { t, beta })
    }
}

/// `∫_{B_R} u^{(np+t(n-p))/(n-p)} + ∫_{B_R} u^t |∇u|^p` for `t < -1`.
pub fn weighted_energy<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    t: T,
    radius: T,
    params: &Params<T>,
) -> Result<T> {
    WeightedEnergyParams::new(t, params)?;
    check_radius(radius)?;
    let (nf, p) = (params.nf(), params.p());
    let power = (nf * p + t * (nf - p)) / (nf - p);
    let density = |r: T| -> Result<T> {
        let j = field.jet(r)?;
        if !(j.u > T::zero()) {
            return Err(Error::Domain(format!("field is not positive at r = {r}")));
        }
        Ok(pow_pos(j.u, power) + pow_pos(j.u, t) * pow_pos(j.du.abs(), p))
    };
    let opts = quad_opts();
    let breaks = ball_breaks(radius);
    // the innermost panel decides integrability at the center
    let inner = radial_integral(params.n(), density, &breaks[..2], &opts).map_err(|e| match e {
        Error::QuadratureFailure { .. } | Error::NonFinite(_) => {
            Error::Unbounded(format!("weighted energy near the center: {e}"))
        }
        other => other,
    })?;
    if !inner.value.is_finite() {
        return Err(Error::Unbounded("weighted energy diverges at the center".into()));
    }
    let outer = radial_integral(params.n(), density, &breaks[1..], &opts)?;
    let total = inner.value + outer.value;
    if !total.is_finite() {
        return Err(Error::Unbounded("weighted energy is not finite".into()));
    }
    Ok(total)
}

/// Ball integrals and both ball inequalities between kinetic and potential
/// energy, with the smallest constant making each hold at this radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport<T> {
    pub radius: T,
    /// `∫_{B_R} |∇u|^p`
    pub kin_ball: T,
    /// `∫_{B_2R} u^{p*}`
    pub pot_ball_2r: T,
    /// `∫_{B_R} u^{p*}`
    pub pot_ball: T,
    /// `∫_{B_2R} |∇u|^p`
    pub kin_ball_2r: T,
    /// `C (∫_{B_2R} u^{p*} + (∫_{B_2R} u^{p*})^{(n-p)/n})`
    pub kinetic_bound: T,
    /// `C (∫_{B_2R} |∇u|^p + (∫_{B_2R} |∇u|^p)^{n(p-1)/(n(p-1)+p)})`
    pub potential_bound: T,
    pub kinetic_min_c: T,
    pub potential_min_c: T,
}

pub fn equivalence_check<T: Real, F: RadialField<T> + ?Sized>(
    field: &F,
    radius: T,
    c: T,
    params: &Params<T>,
) -> Result<EquivalenceReport<T>> {
    let (nf, p) = (params.nf(), params.p());
    let two_r = radius + radius;
    let kin_ball = ball_kinetic(field, radius, params)?;
    let kin_ball_2r = ball_kinetic(field, two_r, params)?;
    let pot_ball = ball_potential(field, radius, params)?;
    let pot_ball_2r = ball_potential(field, two_r, params)?;
    let kinetic_shape = pot_ball_2r + pow_pos(pot_ball_2r, (nf - p) / nf);
    let kin_power = nf * (p - T::one()) / (nf * (p - T::one()) + p);
    let potential_shape = kin_ball_2r + pow_pos(kin_ball_2r, kin_power);
    Ok(EquivalenceReport {
        radius,
        kin_ball,
        pot_ball_2r,
        pot_ball,
        kin_ball_2r,
        kinetic_bound: c * kinetic_shape,
        potential_bound: c * potential_shape,
        kinetic_min_c: kin_ball / kinetic_shape,
        potential_min_c: pot_ball / potential_shape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubbles::Bubble;
    use crate::field::{RadialJet, RadialProfile};
    use crate::quadrature::sphere_area;

    fn constant(n: usize, c: f64) -> RadialProfile<f64, impl Fn(f64) -> RadialJet<f64> + Send + Sync> {
        RadialProfile::new(vec![0.0; n], move |_| RadialJet { u: c, du: 0.0, ddu: 0.0 })
    }

    #[test]
    fn constant_field_energy() {
        let prm = Params::<f64>::new(3, 1.5).unwrap();
        let e = annulus_energy(&constant(3, 2.0), 1.5, &prm).unwrap();
        assert_eq!(e.kinetic, 0.0);
        let vol = sphere_area::<f64>(3) / 3.0 * (3f64.powi(3) - 1.5f64.powi(3));
        let expect = 2f64.powf(prm.p_star()) / prm.p_star() * vol;
        assert!((e.potential - expect).abs() < 1e-12 * expect);
        assert_eq!(e.total, e.kinetic + e.potential);
    }

    #[test]
    fn constant_potential_grows_like_volume() {
        let prm = Params::<f64>::new(5, 2.0).unwrap();
        let f = growth_fit(&constant(5, 1.0), &log_spaced(1.0, 100.0, 6), &prm, EnergyKind::Potential).unwrap();
        assert!((f.exponent - 5.0).abs() < 1e-6);
        assert!(matches!(
            growth_fit(&constant(5, 1.0), &log_spaced(1.0, 100.0, 6), &prm, EnergyKind::Kinetic),
            Err(Error::DegenerateFit(_))
        ));
        assert!(growth_fit(&constant(5, 1.0), &[1.0, 2.0, 3.0], &prm, EnergyKind::Total).is_err());
    }

    #[test]
    fn power_tail_potential_exponent() {
        let prm = Params::<f64>::new(3, 1.5).unwrap();
        let alpha = 0.3;
        let f = RadialProfile::new(vec![0.0; 3], move |r: f64| RadialJet {
            u: r.powf(alpha),
            du: alpha * r.powf(alpha - 1.0),
            ddu: alpha * (alpha - 1.0) * r.powf(alpha - 2.0),
        });
        let fit = growth_fit(&f, &log_spaced(1.0, 1e3, 10), &prm, EnergyKind::Potential).unwrap();
        let expect = 3.0 + alpha * prm.p_star();
        assert!((fit.exponent - expect).abs() < 0.02 * expect);
    }

    #[test]
    fn bubble_kinetic_ratio_tends_to_four() {
        let prm = Params::<f64>::new(4, 2.0).unwrap();
        let b = Bubble::standard(prm);
        let r = 1e3;
        let ratio = annulus_energy(&b, r, &prm).unwrap().kinetic / annulus_energy(&b, 2.0 * r, &prm).unwrap().kinetic;
        assert!((ratio - 4.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn bubble_energy_exponents() {
        let prm = Params::<f64>::new(3, 1.5).unwrap();
        let b = Bubble::standard(prm);
        let radii = default_radii(10.0, 1e4);
        let tot = growth_fit(&b, &radii, &prm, EnergyKind::Total).unwrap();
        assert!((tot.exponent + 3.0).abs() < 0.06, "{tot:?}");
        let pot = growth_fit(&b, &radii, &prm, EnergyKind::Potential).unwrap();
        assert!((pot.exponent + 6.0).abs() < 0.12, "{pot:?}");
        assert!(pot.exponent < tot.exponent);
    }

    #[test]
    fn weighted_energy_exponents() {
        let prm = Params::<f64>::new(4, 2.0).unwrap();
        assert!((WeightedEnergyParams::new(-2.0, &prm).unwrap().beta - 2.0).abs() < 1e-15);
        assert!((WeightedEnergyParams::new(-1.5, &prm).unwrap().beta - 1.5).abs() < 1e-15);
        assert!(matches!(WeightedEnergyParams::new(-1.0, &prm), Err(Error::Domain(_))));
        let b = Bubble::standard(prm);
        let vals: Vec<f64> =
            [1.0, 10.0, 100.0, 1e3].iter().map(|&r| weighted_energy(&b, -2.0, r, &prm).unwrap() / (r * r)).collect();
        let (lo, hi) = vals.iter().fold((f64::MAX, 0f64), |(a, c), &v| (a.min(v), c.max(v)));
        assert!(hi / lo <= 10.0, "{vals:?}");
    }

    #[test]
    fn weighted_energy_detects_singular_center() {
        let prm = Params::<f64>::new(3, 2.0).unwrap();
        // u = r^{1/2}: u^t with t = -8 behaves like r^{-4}, not integrable in 3-D
        let f = RadialProfile::new(vec![0.0; 3], |r: f64| RadialJet {
            u: r.sqrt(),
            du: 0.5 / r.sqrt(),
            ddu: -0.25 * r.powf(-1.5),
        });
        let r = weighted_energy(&f, -8.0, 1.0, &prm);
        assert!(matches!(r, Err(Error::Unbounded(_))), "{r:?}");
    }

    #[test]
    fn equivalence_report_for_constant() {
        let prm = Params::<f64>::new(3, 2.0).unwrap();
        let r = equivalence_check(&constant(3, 1.0), 1.0, 1.0, &prm).unwrap();
        assert_eq!(r.kin_ball, 0.0);
        let vol = sphere_area::<f64>(3) / 3.0;
        assert!((r.pot_ball - vol).abs() < 1e-12);
        assert!((r.pot_ball_2r - 8.0 * vol).abs() < 1e-11);
        assert_eq!(r.kinetic_min_c, 0.0);
    }

    #[test]
    fn bubble_minimal_constants_stay_bounded() {
        let prm = Params::<f64>::new(4, 2.0).unwrap();
        let b = Bubble::standard(prm);
        let base = equivalence_check(&b, 1.0, 1.0, &prm).unwrap();
        for r in [10.0, 100.0, 1e3] {
            let e = equivalence_check(&b, r, 1.0, &prm).unwrap();
            assert!(e.kinetic_min_c <= 10.0 * base.kinetic_min_c);
            assert!(e.potential_min_c <= 10.0 * base.potential_min_c);
            assert!(e.kin_ball <= e.kinetic_bound * e.kinetic_min_c.max(1.0));
        }
    }
}
