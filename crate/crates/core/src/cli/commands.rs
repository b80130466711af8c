use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::report::{human, opt_cell, plain};
use super::{
    ClassifyArgs, EnergyScanArgs, Failure, GradCheckArgs, KeyEstimateArgs, ModelArgs, Produced, RadialSolveArgs,
    RasterArgs, RunReport, Status, TensorCheckArgs, VerifyBubbleArgs, Which,
};
use crate::bubbles::{v_affine_fit, Bubble};
use crate::energy::{annulus_energy, fit_energies, log_spaced, EnergyKind};
use crate::field::{FieldEvaluator, SinePerturbed};
use crate::fields::{key_estimate_sides, tensor_v};
use crate::gradient::{build_cutoff, exterior_lower_bound, grad_estimate_ratio, GradEstimateParams};
use crate::operators::residual;
use crate::params::Params;
use crate::radial::{solve_radial_with, RadialOptions, Termination};
use crate::regions::{classify as classify_query, raster as raster_cells, ClassificationQuery};

type Outcome = Result<Produced, Failure>;

const RESIDUAL_TOL: f64 = 1e-6;
const RING_TOL: f64 = 1e-7;
const AFFINE_TOL: f64 = 1e-10;
const DETECT_LEVEL: f64 = 1e-3;

/// Errors raised while validating arguments are usage errors.
fn usage<T>(r: crate::error::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn require(ok: bool, msg: impl Into<String>) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Usage(msg.into()))
    }
}

fn params(m: &ModelArgs) -> Result<Params<f64>, Failure> {
    usage(Params::new(m.n, m.p))
}

fn bubble(prm: Params<f64>, lambda: f64) -> Result<Bubble<f64>, Failure> {
    let n = prm.n();
    usage(Bubble::new(prm, lambda, vec![0.0; n]))
}

fn check_perturb(a: Option<f64>) -> Result<(), Failure> {
    match a {
        Some(a) => require(a.is_finite() && a.abs() < 1.0, format!("perturbation amplitude {a} must lie in (-1, 1)")),
        None => Ok(()),
    }
}

/// Uniform points in the cube `[-4λ, 4λ]^n`.
fn sample_points(n: usize, lambda: f64, count: u64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 4.0 * lambda;
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-h..h)).collect()).collect()
}

fn report(command: &str, results: Value, status: Status, tolerances: Value) -> RunReport {
    RunReport::new(command, Value::Null, results, status, tolerances)
}

struct RingStats {
    rows: Vec<(f64, f64, f64)>,
    within: usize,
    detected: usize,
    worst: f64,
}

fn ring_stats<F: FieldEvaluator<f64>>(field: &F, pts: &[Vec<f64>], prm: &Params<f64>) -> Result<RingStats, Failure> {
    let n = prm.nf();
    let mut s = RingStats { rows: Vec::with_capacity(pts.len()), within: 0, detected: 0, worst: 0.0 };
    for x in pts {
        let t = tensor_v(field, x, prm)?;
        let trace = t.v.trace();
        let scaled = t.ring_norm / (trace.abs() / n + 1.0);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        s.rows.push((r, t.ring_norm, trace));
        s.worst = s.worst.max(scaled);
        if scaled <= RING_TOL {
            s.within += 1;
        }
        if t.ring_norm > DETECT_LEVEL {
            s.detected += 1;
        }
    }
    Ok(s)
}

fn residual_worst<F: FieldEvaluator<f64>>(field: &F, pts: &[Vec<f64>], prm: &Params<f64>) -> Result<f64, Failure> {
    let mut worst = 0.0f64;
    for x in pts {
        let s = residual(field, x, prm)?;
        worst = worst.max(s.residual.abs() / s.value.powf(prm.q()));
    }
    Ok(worst)
}

pub(super) fn verify_bubble(a: &VerifyBubbleArgs, seed: u64) -> Outcome {
    let prm = params(&a.model)?;
    let b = bubble(prm, a.lambda)?;
    check_perturb(a.perturb)?;
    let pts = sample_points(prm.n(), a.lambda, a.samples, seed);
    let radii = log_spaced(1e-2 * a.lambda, 1e2 * a.lambda, 100);
    let center = vec![0.0; prm.n()];
    let (res, ring, fit) = match a.perturb {
        Some(amp) => {
            let f = SinePerturbed::new(b, amp);
            (residual_worst(&f, &pts, &prm)?, ring_stats(&f, &pts, &prm)?, v_affine_fit(&f, &center, &radii, &prm)?)
        }
        None => {
            (residual_worst(&b, &pts, &prm)?, ring_stats(&b, &pts, &prm)?, v_affine_fit(&b, &center, &radii, &prm)?)
        }
    };
    let res_ok = res <= RESIDUAL_TOL;
    let ring_ok = ring.within == pts.len();
    let fit_ok = fit.rel_residual <= AFFINE_TOL;
    let status = Status::from_pass(res_ok && ring_ok && fit_ok);
    let results = json!({
        "residual": { "max_relative": res, "pass": res_ok },
        "tensor": { "max_scaled_ring_norm": ring.worst, "within": ring.within, "samples": pts.len(), "pass": ring_ok },
        "v_profile": {
            "intercept": fit.intercept,
            "slope": fit.slope,
            "r_squared": fit.r_squared,
            "rel_residual": fit.rel_residual,
            "pass": fit_ok,
        },
    });
    let tolerances =
        json!({ "residual_relative": RESIDUAL_TOL, "ring_scaled": RING_TOL, "affine_relative": AFFINE_TOL });
    let text = format!(
        "residual   max |R|/u^q        = {}  {}\n\
         tensor     max ring/(|tr|/n+1) = {}  {}\n\
         v-profile  relative residual  = {}  {}\n\
         status: {}\n",
        human(res),
        Status::from_pass(res_ok).as_str(),
        human(ring.worst),
        Status::from_pass(ring_ok).as_str(),
        human(fit.rel_residual),
        Status::from_pass(fit_ok).as_str(),
        status.as_str()
    );
    Ok(Produced { report: report("verify-bubble", results, status, tolerances), text, notes: String::new() })
}

pub(super) fn classify(a: &ClassifyArgs) -> Outcome {
    params(&a.model)?;
    let q = ClassificationQuery { n: a.model.n, p: a.model.p, alpha: a.alpha, energy_exponent: a.energy_exponent };
    let outcome = usage(classify_query(&q))?;
    let results = serde_json::to_value(&outcome).unwrap_or(Value::Null);
    let text = String::new();
    Ok(Produced { report: report("classify", results, Status::Info, Value::Null), text, notes: String::new() })
}

pub(super) fn energy_scan(a: &EnergyScanArgs) -> Outcome {
    let prm = params(&a.model)?;
    let b = bubble(prm, a.lambda)?;
    require(a.r_min > 0.0 && a.r_max > a.r_min && a.r_max.is_finite(), "need 0 < r-min < r-max")?;
    require(a.per_decade >= 1, "per-decade must be at least 1")?;
    let decades = (a.r_max / a.r_min).log10();
    let count = ((decades * a.per_decade as f64).round() as usize + 1).max(4);
    let mut energies = Vec::with_capacity(count);
    for r in log_spaced(a.r_min, a.r_max, count) {
        energies.push(annulus_energy(&b, r, &prm)?);
    }
    let kind = match a.which {
        Which::Kinetic => EnergyKind::Kinetic,
        Which::Potential => EnergyKind::Potential,
        Which::Total => EnergyKind::Total,
    };
    let fit = fit_energies(&energies, kind)?;
    let expected = -(prm.nf() - prm.p()) / (prm.p() - 1.0);
    let mut text = String::from("R,kinetic,potential,total\n");
    for e in &energies {
        let _ = writeln!(text, "{},{},{},{}", plain(e.radius), plain(e.kinetic), plain(e.potential), plain(e.total));
    }
    let notes = format!(
        "fitted exponent {} (stderr {}) over R in [{}, {}]; bubble value {}\n",
        human(fit.exponent),
        human(fit.stderr),
        human(fit.r_range.0),
        human(fit.r_range.1),
        human(expected)
    );
    let rows: Vec<Value> = energies
        .iter()
        .map(|e| json!({ "R": e.radius, "kinetic": e.kinetic, "potential": e.potential, "total": e.total }))
        .collect();
    let results = json!({
        "energies": rows,
        "fit": { "which": a.which, "exponent": fit.exponent, "stderr": fit.stderr, "r_range": [fit.r_range.0, fit.r_range.1] },
        "bubble_exponent": expected,
    });
    Ok(Produced { report: report("energy-scan", results, Status::Info, Value::Null), text, notes })
}

pub(super) fn grad_check(a: &GradCheckArgs) -> Outcome {
    let prm = params(&a.model)?;
    let b = bubble(prm, a.lambda)?;
    let eps = a.eps.unwrap_or(0.25 * (prm.p() - 1.0) / (prm.nf() - prm.p()));
    let center = vec![0.0; prm.n()];
    usage(GradEstimateParams::new(eps, a.r_min, center.clone(), &prm))?;
    require(a.r_min > 0.0 && a.r_max >= a.r_min && a.r_max.is_finite(), "need 0 < r-min <= r-max")?;
    require(a.per_decade >= 1, "per-decade must be at least 1")?;
    require(a.exterior_max > 4.0 * a.lambda && a.exterior_max.is_finite(), "exterior-max must exceed 4 lambda")?;

    let decades = (a.r_max / a.r_min).log10();
    let count = ((decades * a.per_decade as f64).round() as usize + 1).max(2);
    let mut rows = Vec::with_capacity(count);
    for r in log_spaced(a.r_min, a.r_max, count) {
        rows.push((r, grad_estimate_ratio(&b, &center, r, eps, &prm)?));
    }
    let first = rows[0].1.ratio;
    let sup = rows.iter().map(|(_, g)| g.ratio).fold(0.0, f64::max);

    let ext_count = ((a.exterior_max / (4.0 * a.lambda)).log10() * 8.0).round() as usize + 1;
    let ext =
        exterior_lower_bound(&b, 4.0 * a.lambda, &log_spaced(4.0 * a.lambda, a.exterior_max, ext_count.max(2)), &prm)?;

    let bounded = sup <= 10.0 * first;
    let status = Status::from_pass(bounded && ext.a_est > 0.0);

    let mut text = String::from("R,lhs,envelope,ratio\n");
    for (r, g) in &rows {
        let _ = writeln!(text, "{},{},{},{}", plain(*r), plain(g.lhs), plain(g.envelope), plain(g.ratio));
    }
    text.push_str("\nr,u_scaled\n");
    for (r, m) in &ext.samples {
        let _ = writeln!(text, "{},{}", plain(*r), plain(*m));
    }
    let notes = format!(
        "sup ratio {} vs R = {} value {}; exterior constant {}; status: {}\n",
        human(sup),
        human(a.r_min),
        human(first),
        human(ext.a_est),
        status.as_str()
    );
    let ratio_rows: Vec<Value> =
        rows.iter().map(|(r, g)| json!({ "R": r, "lhs": g.lhs, "envelope": g.envelope, "ratio": g.ratio })).collect();
    let ext_rows: Vec<Value> = ext.samples.iter().map(|(r, m)| json!({ "r": r, "u_scaled": m })).collect();
    let results = json!({
        "epsilon": eps,
        "ratios": ratio_rows,
        "sup_ratio": sup,
        "first_ratio": first,
        "exterior": { "a_est": ext.a_est, "samples": ext_rows },
        "decay_constant": b.decay_constant(),
        "gradient_ratio_limit": b.gradient_ratio_limit(),
    });
    let tolerances = json!({ "sup_over_first": 10.0 });
    Ok(Produced { report: report("grad-check", results, status, tolerances), text, notes })
}

pub(super) fn tensor_check(a: &TensorCheckArgs, seed: u64) -> Outcome {
    let prm = params(&a.model)?;
    let b = bubble(prm, a.lambda)?;
    check_perturb(a.perturb)?;
    let pts = sample_points(prm.n(), a.lambda, a.samples, seed);
    let stats = match a.perturb {
        Some(amp) => ring_stats(&SinePerturbed::new(b, amp), &pts, &prm)?,
        None => ring_stats(&b, &pts, &prm)?,
    };
    let status = Status::from_pass(stats.within == pts.len());
    let mut text = String::from("r,ring_norm,trace\n");
    for (r, ring, tr) in &stats.rows {
        let _ = writeln!(text, "{},{},{}", plain(*r), plain(*ring), plain(*tr));
    }
    let notes = format!(
        "{} of {} points within tolerance, {} above {}; status: {}\n",
        stats.within,
        pts.len(),
        stats.detected,
        plain(DETECT_LEVEL),
        status.as_str()
    );
    let rows: Vec<Value> =
        stats.rows.iter().map(|(r, ring, tr)| json!({ "r": r, "ring_norm": ring, "trace": tr })).collect();
    let results = json!({
        "samples": rows,
        "within": stats.within,
        "detected": stats.detected,
        "max_scaled_ring_norm": stats.worst,
    });
    let tolerances = json!({ "ring_scaled": RING_TOL, "detection_level": DETECT_LEVEL });
    Ok(Produced { report: report("tensor-check", results, status, tolerances), text, notes })
}

pub(super) fn key_estimate(a: &KeyEstimateArgs) -> Outcome {
    let prm = params(&a.model)?;
    let b = bubble(prm, a.lambda)?;
    check_perturb(a.perturb)?;
    require(a.l >= 2.0 && a.l.is_finite(), format!("cutoff power l = {} must be at least 2", a.l))?;
    let eta = usage(build_cutoff(a.radius, a.delta))?.with_center(vec![0.0; prm.n()]);
    let sides = match a.perturb {
        Some(amp) => key_estimate_sides(&SinePerturbed::new(b, amp), &eta, a.l, &prm)?,
        None => key_estimate_sides(&b, &eta, a.l, &prm)?,
    };
    let ratio = if sides.rhs_integral > 0.0 { Some(sides.lhs / sides.rhs_integral) } else { None };
    let text =
        format!("lhs,rhs_integral,ratio\n{},{},{}\n", plain(sides.lhs), plain(sides.rhs_integral), opt_cell(ratio));
    let results = json!({
        "lhs": sides.lhs,
        "rhs_integral": sides.rhs_integral,
        "lhs_error": sides.lhs_error,
        "rhs_error": sides.rhs_error,
        "ratio": ratio,
        "cutoff_constant": eta.bound_constant(),
    });
    Ok(Produced { report: report("key-estimate", results, Status::Info, Value::Null), text, notes: String::new() })
}

pub(super) fn radial_solve(a: &RadialSolveArgs) -> Outcome {
    let prm = params(&a.model)?;
    let u0 = a.u0.unwrap_or_else(|| Bubble::standard(prm).center_value());
    require(u0 > 0.0 && u0.is_finite(), format!("u0 = {u0} must be positive"))?;
    require(a.r_max > 0.0 && a.r_max.is_finite(), "r-max must be positive")?;
    require(a.tol > 1e-12 && a.tol < 1e-4, format!("tol = {} must lie in (1e-12, 1e-4)", a.tol))?;
    let mut opts = RadialOptions::new(a.r_max, a.tol);
    if let Some(h) = a.max_step {
        require(h > 0.0, "max-step must be positive")?;
        opts = opts.with_max_step(h);
    }
    if let Some(m) = a.max_steps {
        require(m >= 1, "max-steps must be at least 1")?;
        opts = opts.with_max_steps(m);
    }
    let sol = solve_radial_with(&prm, u0, &opts)?;
    let header = json!({ "n": prm.n(), "p": prm.p(), "u0": u0, "tol": a.tol, "termination": sol.termination });
    let mut text = String::from("r,u,du,flux\n");
    for k in 0..sol.grid.len() {
        let _ =
            writeln!(text, "{},{},{},{}", plain(sol.grid[k]), plain(sol.u[k]), plain(sol.du[k]), plain(sol.flux[k]));
    }
    let notes = format!("{header}\n");
    let nodes: Vec<Value> = (0..sol.grid.len())
        .map(|k| json!({ "r": sol.grid[k], "u": sol.u[k], "du": sol.du[k], "flux": sol.flux[k] }))
        .collect();
    let reached = matches!(sol.termination, Termination::ReachedRmax);
    let results = json!({ "header": header, "reached_r_max": reached, "nodes": nodes });
    let tolerances = json!({ "rtol": a.tol });
    Ok(Produced { report: report("radial-solve", results, Status::Info, tolerances), text, notes })
}

pub(super) fn raster(a: &RasterArgs) -> Outcome {
    require(a.n >= 2, "n must be at least 2")?;
    let nf = a.n as f64;
    let lo = a.p_min.unwrap_or(1.0);
    let hi = a.p_max.unwrap_or(nf);
    require(lo >= 1.0 && hi <= nf && lo < hi, format!("need 1 <= p-min < p-max <= {}", a.n))?;
    require(a.p_count >= 1, "p-count must be at least 1")?;
    require(!a.alpha.is_empty() && a.alpha.iter().all(|x| x.is_finite()), "alpha list must be finite")?;
    let p_grid: Vec<f64> = (0..a.p_count).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / a.p_count as f64).collect();
    let cells = usage(raster_cells(a.n, &p_grid, &a.alpha))?;
    let mut text = String::from("n,p,alpha,case_id,threshold,margin\n");
    for c in &cells {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            c.n,
            plain(c.p),
            plain(c.alpha),
            c.outcome.case_id,
            opt_cell(c.outcome.threshold),
            opt_cell(c.outcome.margin)
        );
    }
    let covered = cells.iter().filter(|c| c.outcome.covered).count();
    let notes = format!("{covered} of {} cells covered\n", cells.len());
    let results = json!({ "cells": cells, "covered": covered });
    Ok(Produced { report: report("raster", results, Status::Info, Value::Null), text, notes })
}
