//! Which `(n, p)` and growth hypotheses force a positive solution to be a bubble.
//!
//! The oracle evaluates the covering cases in a fixed priority order:
//! unconditional ranges, then pointwise growth `u ≤ C|x|^α`, then annulus-energy
//! growth `E_{A_R} = O(R^k)`, then the bounded and decaying corollaries.

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::scalar::Real;

/// Limiting growth exponents; `None` where a formula is undefined for `(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct Thresholds<T> {
    /// `2(n-p)/(p(p-2))`, for `p > 2`
    pub alpha_hat: Option<T>,
    /// `(n-p)²/((p-2)(p-1))`, for `p > 2`
    pub alpha_check: Option<T>,
    /// `(3p-n)(n-p)/(p(n-2p))`, for `n ≠ 2p`
    pub alpha_bar: Option<T>,
    /// `(3p-n)(n-p)/(p(n-3p+2))`, for `n ≠ 3p-2`
    pub alpha_tilde: Option<T>,
    /// `(n-2+√(n²-4n+12))/2`
    pub p_check: T,
}

fn ratio<T: Real>(num: T, den: T) -> Option<T> {
    if den == T::zero() {
        return None;
    }
    let v = num / den;
    v.is_finite().then_some(v)
}

pub fn thresholds<T: Real>(params: &Params<T>) -> Thresholds<T> {
    let (n, p) = (params.nf(), params.p());
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let above_two = p > two;
    Thresholds {
        alpha_hat: if above_two { ratio(two * (n - p), p * (p - two)) } else { None },
        alpha_check: if above_two { ratio((n - p) * (n - p), (p - two) * (p - T::one())) } else { None },
        alpha_bar: ratio((three * p - n) * (n - p), p * (n - two * p)),
        alpha_tilde: ratio((three * p - n) * (n - p), p * (n - three * p + two)),
        p_check: p_check(params.n()),
    }
}

pub fn p_check<T: Real>(n: usize) -> T {
    let n = T::of_usize(n);
    (n - T::lit(2.0) + (n * n - T::lit(4.0) * n + T::lit(12.0)).sqrt()) / T::lit(2.0)
}

/// Which energy-growth range applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyCase {
    /// `1 < p ≤ 2n/(n+1)`
    I,
    /// `2n/(n+1) < p < 2`
    Ii,
    /// `p > 2`, strict bound depending on α
    Iii,
}

#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct EnergyAllowance<T> {
    pub exponent: T,
    pub case: EnergyCase,
}

/// Largest annulus-energy growth exponent that still forces rigidity. For
/// `p > 2` it is a strict bound and needs the growth exponent `α`; negative `α`
/// is treated as `α = 0`.
pub fn energy_growth_allowance<T: Real>(params: &Params<T>, alpha: Option<T>) -> Result<EnergyAllowance<T>> {
    let (n, p) = (params.nf(), params.p());
    let two = T::lit(2.0);
    if p == two {
        return Err(Error::Domain("p = 2 is excluded".into()));
    }
    if p <= two * n / (n + T::one()) {
        return Ok(EnergyAllowance { exponent: n / (n - T::one()), case: EnergyCase::I });
    }
    if p < two {
        let pm = p - T::one();
        return Ok(EnergyAllowance { exponent: (two - p) * (n - p) / (two * pm * pm), case: EnergyCase::Ii });
    }
    let alpha = alpha.ok_or(Error::MissingAlpha)?.max(T::zero());
    let d = two + (n - T::lit(3.0)) * p;
    let exponent = two * (n - p) / d - alpha * p * (n * (p - two) + p) / ((n - p) * d);
    Ok(EnergyAllowance { exponent, case: EnergyCase::Iii })
}

/// A covering case. The wire tags are fixed identifiers used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    EnergyLowP,
    EnergyMidP,
    EnergyHighP,
    UnconditionalPlane,
    UnconditionalSpace,
    GrowthSubquadraticSpace,
    GrowthSubquadraticHigh,
    GrowthSpace,
    GrowthFour,
    GrowthFiveSix,
    GrowthSevenUp,
    Bounded,
    Decaying,
    NotCovered,
}

impl CaseId {
    pub fn tag(self) -> &'static str {
        match self {
            CaseId::EnergyLowP => "T1.1-i",
            CaseId::EnergyMidP => "T1.1-ii",
            CaseId::EnergyHighP => "T1.1-iii",
            CaseId::UnconditionalPlane => "T1.2-i",
            CaseId::UnconditionalSpace => "T1.2-ii",
            CaseId::GrowthSubquadraticSpace => "T1.3-i",
            CaseId::GrowthSubquadraticHigh => "T1.3-ii",
            CaseId::GrowthSpace => "T1.4-i",
            CaseId::GrowthFour => "T1.4-ii",
            CaseId::GrowthFiveSix => "T1.4-iii",
            CaseId::GrowthSevenUp => "T1.4-iv",
            CaseId::Bounded => "C1.5",
            CaseId::Decaying => "C1.6",
            CaseId::NotCovered => "NOT_COVERED",
        }
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationQuery<T> {
    pub n: usize,
    pub p: T,
    /// `u(x) ≤ C|x|^α` at infinity
    pub alpha: Option<T>,
    /// `E_{A_R}(u) = O(R^k)`
    pub energy_exponent: Option<T>,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct ClassificationOutcome<T> {
    pub covered: bool,
    pub case_id: CaseId,
    pub threshold: Option<T>,
    pub margin: Option<T>,
    /// Every covering case, in priority order.
    pub all_cases: Vec<CaseId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy)]
struct Hit<T> {
    case: CaseId,
    threshold: Option<T>,
    margin: Option<T>,
}

/// The growth-exponent branch covering `(n, p)`, with its threshold, if any.
/// `None` means no α-branch exists there; `Some((case, None))` means the branch
/// exists but its threshold is undefined.
pub fn applicable_threshold<T: Real>(params: &Params<T>) -> Option<(CaseId, Option<T>)> {
    let n = params.n();
    let (nf, p) = (params.nf(), params.p());
    let th = thresholds(params);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    if p < two {
        return match n {
            3 if p <= T::lit(1.5) => Some((CaseId::GrowthSubquadraticSpace, th.alpha_bar)),
            n if n >= 4 => Some((CaseId::GrowthSubquadraticHigh, th.alpha_bar)),
            _ => None,
        };
    }
    if p == two {
        return None;
    }
    let upper = (nf + two) / three;
    let pc = th.p_check;
    match n {
        3 => Some((CaseId::GrowthSpace, th.alpha_check)),
        4 => Some((CaseId::GrowthFour, if p < pc { th.alpha_hat } else { th.alpha_check })),
        5 | 6 => {
            let t = if p < upper {
                th.alpha_bar
            } else if p < pc {
                th.alpha_hat
            } else {
                th.alpha_check
            };
            Some((CaseId::GrowthFiveSix, t))
        }
        _ => {
            let t = if p <= nf / three {
                th.alpha_tilde
            } else if p < upper {
                th.alpha_bar
            } else if p < pc {
                th.alpha_hat
            } else {
                th.alpha_check
            };
            Some((CaseId::GrowthSevenUp, t))
        }
    }
}

fn covering_cases<T: Real>(params: &Params<T>, q: &ClassificationQuery<T>) -> Vec<Hit<T>> {
    let n = params.n();
    let (nf, p) = (params.nf(), params.p());
    let two = T::lit(2.0);
    let mut hits = Vec::new();

    if p < two && (n == 2 || (n == 3 && p > T::lit(1.5))) {
        let case = if n == 2 { CaseId::UnconditionalPlane } else { CaseId::UnconditionalSpace };
        hits.push(Hit { case, threshold: None, margin: None });
    }

    if let (Some(alpha), Some((case, Some(t)))) = (q.alpha, applicable_threshold(params)) {
        if alpha < t {
            hits.push(Hit { case, threshold: Some(t), margin: Some(t - alpha) });
        }
    }

    if let Some(k) = q.energy_exponent {
        if let Ok(allow) = energy_growth_allowance(params, q.alpha) {
            let margin = allow.exponent - k;
            let (case, ok) = match allow.case {
                EnergyCase::I => (CaseId::EnergyLowP, margin >= T::zero()),
                EnergyCase::Ii => (CaseId::EnergyMidP, margin >= T::zero()),
                EnergyCase::Iii => (CaseId::EnergyHighP, margin > T::zero()),
            };
            if ok {
                hits.push(Hit { case, threshold: Some(allow.exponent), margin: Some(margin) });
            }
        }
    }

    if let Some(alpha) = q.alpha {
        if alpha <= T::zero() && (n <= 6 || p > nf / T::lit(3.0)) {
            hits.push(Hit { case: CaseId::Bounded, threshold: Some(T::zero()), margin: Some(T::zero() - alpha) });
        }
        let decay = -(nf - p) / p;
        if alpha <= decay {
            hits.push(Hit { case: CaseId::Decaying, threshold: Some(decay), margin: Some(decay - alpha) });
        }
    }
    hits
}

/// Classifies a query; `NOT_COVERED` is an ordinary outcome. Fails only when
/// `p` lies outside `(1, n)`.
pub fn classify<T: Real>(q: &ClassificationQuery<T>) -> Result<ClassificationOutcome<T>> {
    let params = Params::new(q.n, q.p)?;
    if q.p == T::lit(2.0) {
        return Ok(ClassificationOutcome {
            covered: false,
            case_id: CaseId::NotCovered,
            threshold: None,
            margin: None,
            all_cases: Vec::new(),
            note: Some("p=2 excluded".into()),
        });
    }
    let hits = covering_cases(&params, q);
    let all_cases = hits.iter().map(|h| h.case).collect();
    let out = match hits.first() {
        Some(h) => ClassificationOutcome {
            covered: true,
            case_id: h.case,
            threshold: h.threshold,
            margin: h.margin,
            all_cases,
            note: None,
        },
        None => {
            let note = match applicable_threshold(&params) {
                Some((_, None)) => Some("growth threshold undefined at this p".to_string()),
                _ => None,
            };
            ClassificationOutcome {
                covered: false,
                case_id: CaseId::NotCovered,
                threshold: applicable_threshold(&params).and_then(|(_, t)| t),
                margin: None,
                all_cases,
                note,
            }
        }
    };
    Ok(out)
}

/// One row of a classification raster.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct RasterCell<T> {
    pub n: usize,
    pub p: T,
    pub alpha: T,
    pub outcome: ClassificationOutcome<T>,
}

/// Classifies every `(p, α)` pair, `p` varying slowest.
pub fn raster<T: Real>(n: usize, p_grid: &[T], alpha_grid: &[T]) -> Result<Vec<RasterCell<T>>> {
    let mut cells = Vec::with_capacity(p_grid.len() * alpha_grid.len());
    for &p in p_grid {
        for &alpha in alpha_grid {
            let outcome = classify(&ClassificationQuery { n, p, alpha: Some(alpha), energy_exponent: None })?;
            cells.push(RasterCell { n, p, alpha, outcome });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, p: f64, alpha: Option<f64>, k: Option<f64>) -> ClassificationOutcome<f64> {
        classify(&ClassificationQuery { n, p, alpha, energy_exponent: k }).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn threshold_values() {
        assert!((p_check::<f64>(4) - (1.0 + 3f64.sqrt())).abs() < 1e-15);
        let t = thresholds(&Params::<f64>::new(5, 3.0).unwrap());
        assert!((t.alpha_hat.unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((t.alpha_check.unwrap() - 2.0).abs() < 1e-15);
        let t = thresholds(&Params::<f64>::new(3, 2.0).unwrap());
        assert!(t.alpha_hat.is_none() && t.alpha_check.is_none());
        assert!(thresholds(&Params::<f64>::new(3, 1.5).unwrap()).alpha_bar.is_none());
        assert!(thresholds(&Params::<f64>::new(4, 2.0).unwrap()).alpha_tilde.is_none());
    }

    #[test]
    fn boundary_continuity() {
        for n in 4..=12usize {
            let nf = n as f64;
            let pc = p_check::<f64>(n);
            assert!(pc > 2.0 && pc < nf);
            let t = thresholds(&Params::new(n, pc).unwrap());
            assert!(rel(t.alpha_hat.unwrap(), t.alpha_check.unwrap()) <= 1e-12);
            let pu = (nf + 2.0) / 3.0;
            if pu > 2.0 {
                let t = thresholds(&Params::new(n, pu).unwrap());
                assert!(rel(t.alpha_hat.unwrap(), t.alpha_bar.unwrap()) <= 1e-12);
            }
            let pl = nf / 3.0;
            if pl > 2.0 {
                let t = thresholds(&Params::new(n, pl).unwrap());
                assert!(t.alpha_bar.unwrap().abs() <= 1e-12 && t.alpha_tilde.unwrap().abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn energy_allowances() {
        let a = energy_growth_allowance(&Params::<f64>::new(3, 1.4).unwrap(), None).unwrap();
        assert_eq!(a.case, EnergyCase::I);
        assert!((a.exponent - 1.5).abs() < 1e-15);
        let a = energy_growth_allowance(&Params::<f64>::new(3, 1.6).unwrap(), None).unwrap();
        assert_eq!(a.case, EnergyCase::Ii);
        assert!((a.exponent - 0.56 / 0.72).abs() < 1e-14);
        let prm = Params::<f64>::new(5, 3.0).unwrap();
        let a = energy_growth_allowance(&prm, Some(0.0)).unwrap();
        assert_eq!(a.case, EnergyCase::Iii);
        assert!((a.exponent - 0.5).abs() < 1e-15);
        assert_eq!(energy_growth_allowance(&prm, None), Err(Error::MissingAlpha));
        assert!(matches!(energy_growth_allowance(&Params::<f64>::new(5, 2.0).unwrap(), None), Err(Error::Domain(_))));
    }

    #[test]
    fn documented_queries() {
        let o = q(3, 1.8, None, None);
        assert!(o.covered && o.case_id == CaseId::UnconditionalSpace);
        let o = q(7, 2.2, Some(0.01), None);
        assert!(!o.covered && o.case_id == CaseId::NotCovered);
        let o = q(5, 2.5, Some(0.0), None);
        assert!(o.covered && o.all_cases.contains(&CaseId::Bounded));
        let o = q(4, 2.0, Some(-5.0), None);
        assert!(!o.covered && o.note.as_deref() == Some("p=2 excluded"));
    }

    #[test]
    fn energy_cases() {
        assert_eq!(q(5, 1.3, None, Some(1.25)).case_id, CaseId::EnergyLowP);
        assert!(!q(5, 1.3, None, Some(1.26)).covered);
        let o = q(5, 3.0, Some(0.0), Some(0.5));
        assert!(!o.all_cases.contains(&CaseId::EnergyHighP));
        assert!(q(5, 3.0, Some(0.0), Some(0.49)).all_cases.contains(&CaseId::EnergyHighP));
    }

    #[test]
    fn planar_raster_is_unconditional() {
        let ps: Vec<f64> = (1..20).map(|k| 1.0 + k as f64 / 20.0).collect();
        for c in raster(2, &ps, &[0.0, 10.0]).unwrap() {
            assert_eq!(c.outcome.case_id, CaseId::UnconditionalPlane);
        }
    }

    #[test]
    fn four_dimensional_bounded_row_is_covered() {
        let ps: Vec<f64> = (1..40).map(|k| 2.0 + 2.0 * k as f64 / 40.0).collect();
        for c in raster(4, &ps, &[0.0]).unwrap() {
            assert!(c.outcome.covered, "p = {}", c.p);
        }
    }

    #[test]
    fn case_tags_serialize_as_strings() {
        let s = serde_json::to_string(&q(3, 1.8, None, None)).unwrap();
        assert!(s.contains("\"case_id\":\"T1.2-ii\""), "{s}");
    }
}
