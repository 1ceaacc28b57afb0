//! Monotone radial profiles: the exponentially weighted ball integral of
//! S1 under an integral curvature hypothesis, and the power-weighted total
//! mean curvature of a self-shrinker.

use super::{reach_gate, violation, CheckResult, InequalityReport, Tolerances, Verdict};
use crate::ambient::SpaceFormKind;
use crate::hypersurface::Immersion;
use crate::math::{abs, exp, powf, PI};
use crate::measure::{scan, BallRule, DomainSpec, RadialProfile};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

type Params = BTreeMap<String, f64>;

fn put(params: &mut Params, key: &str, value: f64) {
    params.insert(String::from(key), value);
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter(String::from("need at least two radii")));
    }
    if !(radii[0] > 0.0) {
        return Err(Error::InvalidParameter(String::from("radii must be positive")));
    }
    for k in 1..radii.len() {
        if !(radii[k] > radii[k - 1]) {
            return Err(Error::InvalidParameter(String::from("radii must be ascending")));
        }
    }
    Ok(())
}

/// Verdict on a profile that is claimed non-decreasing: the worst relative
/// drop between consecutive radii, compared against the quadrature noise.
fn monotone_report(
    name: &str,
    values: &[f64],
    refinement: &[f64],
    grid: &[usize],
    params: Params,
    tols: &Tolerances,
) -> InequalityReport {
    let mut scale: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        scale = scale.max(abs(v));
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mut max_ref: f64 = 0.0;
    for &e in refinement {
        max_ref = max_ref.max(e);
    }
    let flat = scale == 0.0 || hi - lo <= 1e-12 * scale;
    let mut worst: f64 = 0.0;
    if scale > 0.0 {
        for k in 1..values.len() {
            worst = worst.max((values[k - 1] - values[k]) / scale);
        }
    }
    let refinement_rel = if scale > 0.0 { 2.0 * max_ref / scale } else { 0.0 };
    let tolerance = tols.monotonic + refinement_rel;
    let verdict = if flat {
        Verdict::EqualityCase
    } else if worst <= tolerance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    InequalityReport {
        name: String::from(name),
        lhs: worst,
        rhs: 0.0,
        slack: -worst,
        rel_slack: -worst,
        tolerance,
        verdict,
        grid: grid.to_vec(),
        params,
        refinement_estimate: refinement_rel,
    }
}

/// Monotonicity of h(r) = exp(Lambda r0^{1-alpha} r^alpha) G(r)^{-(m-1)/2}
/// int_{B_r} S1 under the scale-invariant hypothesis that the curvature
/// integral is controlled by Lambda times the weighted S1 integral. With
/// `lambda` absent the smallest admissible value is fitted from the data.
pub fn monotonicity_h(
    name: &str,
    m: &Immersion,
    x0_coords: &[f64],
    lambda: Option<f64>,
    alpha: f64,
    r0: f64,
    radii: &[f64],
    sizes: &[usize],
    rule: BallRule,
    tols: &Tolerances,
) -> Result<CheckResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(String::from("need alpha in (0, 1]")));
    }
    check_radii(radii)?;
    let top = *radii.last().unwrap();
    if !(r0 > 0.0) || top > r0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(String::from("radii must stay within r0")));
    }
    let space = m.space;
    if space.kind == SpaceFormKind::Sphere {
        if space.kappa * r0 * r0 > PI * PI * (1.0 + 1e-12) {
            return Err(Error::Precondition(String::from(
                "need kappa r0^2 <= pi^2",
            )));
        }
        if top >= PI / crate::math::sqrt(space.kappa) - 1e-9 {
            return Err(Error::Precondition(String::from(
                "largest radius must stay below pi/sqrt(kappa)",
            )));
        }
    }
    let kappa0 = space.kappa;
    let md = m.m as f64;
    let x0 = space.point(x0_coords)?;
    let data = scan(m, &DomainSpec::FullChart, sizes, Some(&x0), 3, &|fr, out| {
        out[0] = fr.s1;
        out[1] = md * (space.kappa - kappa0) / 4.0 + fr.s2;
        out[2] = fr.s2;
        Ok(())
    })?;
    let (min_s1, _) = data.channel_range(0);
    let (min_s2, max_s2) = data.channel_range(2);
    let mut params = Params::new();
    put(&mut params, "alpha", alpha);
    put(&mut params, "r0", r0);
    put(&mut params, "min_s1", min_s1);
    put(&mut params, "min_s2", min_s2);
    if let Some(bad) = super::positivity_gate(min_s1, min_s2, max_s2) {
        return Ok(CheckResult::plain(violation(name, bad, &data.grid, params)));
    }
    reach_gate(m, &data, top)?;

    let mut a = Vec::with_capacity(radii.len());
    let mut b = Vec::with_capacity(radii.len());
    for &r in radii {
        a.push(data.ball_integral(0, r, rule));
        b.push(data.ball_integral(1, r, rule));
    }
    let mut minimal = 0.0_f64;
    for (k, &r) in radii.iter().enumerate() {
        if a[k].value > 0.0 {
            minimal = minimal.max(b[k].value / (alpha * powf(r / r0, alpha - 1.0) * a[k].value));
        }
    }
    let lam = lambda.unwrap_or(minimal);
    put(&mut params, "lambda", lam);
    put(&mut params, "minimal_lambda", minimal);
    if lambda.is_some() {
        // re-check the integral hypothesis at the forced value, allowing
        // for quadrature error on both sides
        let mut worst_excess = 0.0_f64;
        for (k, &r) in radii.iter().enumerate() {
            let bound = alpha * lam * powf(r / r0, alpha - 1.0) * a[k].value;
            let slack = 1e-10 * (abs(b[k].value) + abs(bound))
                + b[k].refinement_estimate
                + alpha * lam * powf(r / r0, alpha - 1.0) * a[k].refinement_estimate;
            worst_excess = worst_excess.max(b[k].value - bound - slack);
        }
        if worst_excess > 0.0 {
            return Ok(CheckResult::plain(violation(name, worst_excess, &data.grid, params)));
        }
    }
    let wexp = (md - 1.0) / 2.0;
    let mut h = Vec::with_capacity(radii.len());
    let mut h_ref = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        let factor = exp(lam * powf(r0, 1.0 - alpha) * powf(r, alpha))
            / powf(super::weight_base(&space, r), wexp);
        h.push(factor * a[k].value);
        h_ref.push(factor * a[k].refinement_estimate);
    }
    let mut worst = 0.0_f64;
    for k in 1..h.len() {
        worst = worst.max(h[k - 1] - h[k]);
    }
    put(&mut params, "worst_drop", worst);
    let report = monotone_report(name, &h, &h_ref, &data.grid, params, tols);
    Ok(CheckResult {
        report,
        profile: Some(RadialProfile {
            center: x0_coords.to_vec(),
            radii: radii.to_vec(),
            values: h,
            refinement: h_ref,
            integrand: String::from("exp-weighted ball integral of S1"),
        }),
    })
}

/// Monotonicity of phi(r) = r^{-(m-1)(1/2 - m Lambda)} int_{M cap B_r} H
/// for self-shrinkers with H > 0 and 0 <= R <= Lambda. The default Lambda
/// is the observed maximum of R; forcing a smaller value trips the
/// hypothesis gate.
pub fn monotonicity_phi_shrinker(
    name: &str,
    m: &Immersion,
    x0_coords: &[f64],
    forced_lambda: Option<f64>,
    radii: &[f64],
    sizes: &[usize],
    rule: BallRule,
    tols: &Tolerances,
) -> Result<CheckResult> {
    if m.space.kind != SpaceFormKind::Euclidean {
        return Err(Error::Precondition(String::from(
            "self-shrinkers live in flat ambient space",
        )));
    }
    check_radii(radii)?;
    let space = m.space;
    let md = m.m as f64;
    let x0 = space.point(x0_coords)?;
    let data = scan(m, &DomainSpec::FullChart, sizes, Some(&x0), 3, &|fr, out| {
        out[0] = fr.h;
        out[1] = fr.r_scalar;
        out[2] = abs(fr.h + space.inner_raw(&fr.point.c, &fr.eta.v) / (2.0 * md));
        Ok(())
    })?;
    let (_, residual_max) = data.channel_range(2);
    if residual_max > tols.shrinker_residual {
        return Err(Error::NotAShrinker(residual_max));
    }
    let (min_h, _) = data.channel_range(0);
    let (min_r, max_r) = data.channel_range(1);
    let mut params = Params::new();
    put(&mut params, "residual_max", residual_max);
    put(&mut params, "min_h", min_h);
    put(&mut params, "min_r", min_r);
    put(&mut params, "max_r", max_r);
    if !(min_h > 0.0) {
        return Ok(CheckResult::plain(violation(name, min_h, &data.grid, params)));
    }
    if min_r < -1e-10 * (1.0 + abs(max_r)) {
        return Ok(CheckResult::plain(violation(name, min_r, &data.grid, params)));
    }
    let lam = match forced_lambda {
        Some(l) => {
            if l < max_r - 1e-10 * (1.0 + abs(max_r)) {
                put(&mut params, "lambda", l);
                return Ok(CheckResult::plain(violation(name, l - max_r, &data.grid, params)));
            }
            l
        }
        None => max_r,
    };
    reach_gate(m, &data, *radii.last().unwrap())?;
    let exponent = (md - 1.0) * (0.5 - md * lam);
    put(&mut params, "lambda", lam);
    put(&mut params, "exponent", exponent);
    put(&mut params, "divergence_regime", if lam < 0.5 / md { 1.0 } else { 0.0 });
    let mut phi = Vec::with_capacity(radii.len());
    let mut phi_ref = Vec::with_capacity(radii.len());
    for &r in radii {
        let q = data.ball_integral(0, r, rule);
        let factor = powf(r, -exponent);
        phi.push(factor * q.value);
        phi_ref.push(factor * q.refinement_estimate);
    }
    let report = monotone_report(name, &phi, &phi_ref, &data.grid, params, tols);
    Ok(CheckResult {
        report,
        profile: Some(RadialProfile {
            center: x0_coords.to_vec(),
            radii: radii.to_vec(),
            values: phi,
            refinement: phi_ref,
            integrand: String::from("power-weighted ball integral of H"),
        }),
    })
}
