//! Mean value inequalities on extrinsic balls: the weighted difference of
//! ball averages of f S1 against the double integral of the radial bracket,
//! plus the L^p variant with a totally curvature bound.

use super::{
    finish, positivity_gate, reach_gate, simpson_rule, violation, weight_base, CheckResult,
    TestFunction, Tolerances,
};
use crate::ambient::{geodesic_distance, grad_distance, ricci, SpaceFormKind};
use crate::hypersurface::Immersion;
use crate::math::{abs, powf, PI};
use crate::measure::{scan, BallRule, DomainSpec, RadialProfile};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

type Params = BTreeMap<String, f64>;

fn put(params: &mut Params, key: &str, value: f64) {
    params.insert(String::from(key), value);
}

/// Exponent family for the mean value inequality. `Convex` is admissible
/// when the shape operator is positive semidefinite and sharpens the P1
/// eigenvalue bound from 2 S1 to S1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanValueMode {
    General,
    Convex,
}

impl MeanValueMode {
    /// (weight exponent, kernel exponent, bracket prefactor)
    fn shape(&self, m: usize) -> (f64, f64, f64) {
        let md = m as f64;
        match self {
            MeanValueMode::General => ((md - 1.0) / 2.0, (md + 1.0) / 2.0, 0.5),
            MeanValueMode::Convex => (md - 1.0, md, 1.0),
        }
    }
}

fn sphere_window_limit(m: &Immersion, t: f64) -> Result<()> {
    if m.space.kind == SpaceFormKind::Sphere {
        let limit = PI / (2.0 * crate::math::sqrt(m.space.kappa));
        if t >= limit * (1.0 - 1e-12) {
            return Err(Error::Precondition(String::from(
                "outer radius must stay below pi/(2 sqrt(kappa))",
            )));
        }
    }
    Ok(())
}

/// Weighted mean value inequality on the window [s, t] around x0:
/// the difference of weighted ball integrals of f S1 dominates the double
/// integral of the weighted radial bracket. The record keeps the double
/// integral as lhs and the weighted difference as rhs.
pub fn verify_mean_value(
    name: &str,
    m: &Immersion,
    x0_coords: &[f64],
    s: f64,
    t: f64,
    f: &TestFunction,
    mode: MeanValueMode,
    sizes: &[usize],
    n_r: usize,
    rule: BallRule,
    tols: &Tolerances,
) -> Result<CheckResult> {
    if !(s > 0.0 && t > s) {
        return Err(Error::InvalidParameter(String::from("need 0 < s < t")));
    }
    sphere_window_limit(m, t)?;
    let space = m.space;
    let x0 = space.point(x0_coords)?;
    let cut = if space.kind == SpaceFormKind::Sphere {
        PI / crate::math::sqrt(space.kappa) - 1e-6
    } else {
        f64::INFINITY
    };
    let data = scan(m, &DomainSpec::FullChart, sizes, Some(&x0), 5, &|fr, out| {
        let (fv, df) = f.eval(&space, fr)?;
        out[0] = fv * fr.s1;
        out[2] = fr.s1;
        out[3] = fr.s2;
        let mut kmin = f64::INFINITY;
        for i in 0..fr.m {
            kmin = kmin.min(fr.k[i]);
        }
        out[4] = kmin;
        let rho = geodesic_distance(&space, &x0, &fr.point)?;
        // the bracket vanishes at the center and is cut off at the far pole
        if rho < 1e-7 || rho >= cut {
            out[1] = 0.0;
            return Ok(());
        }
        let gamma = grad_distance(&space, &x0, &fr.point)?;
        let p1df = fr.newton_apply(&fr.grad_chart(&df));
        let p1df_amb = fr.to_ambient(&p1df);
        let ge = space.inner_raw(&gamma.v, &fr.eta.v);
        let term = space.inner_raw(&gamma.v, &p1df_amb.v)
            + 2.0 * fr.s2 * fv * ge
            + fv * ricci(&space, &gamma, &fr.eta)?;
        out[1] = weight_base(&space, rho) * term;
        Ok(())
    })?;
    let (min_s1, _) = data.channel_range(2);
    let (min_s2, max_s2) = data.channel_range(3);
    let mut params = Params::new();
    put(&mut params, "s", s);
    put(&mut params, "t", t);
    put(&mut params, "min_s1", min_s1);
    put(&mut params, "min_s2", min_s2);
    if let Some(bad) = positivity_gate(min_s1, min_s2, max_s2) {
        return Ok(CheckResult::plain(violation(name, bad, &data.grid, params)));
    }
    if mode == MeanValueMode::Convex {
        let (min_k, max_k) = data.channel_range(4);
        put(&mut params, "min_principal", min_k);
        if min_k < -1e-10 * (1.0 + abs(max_k)) {
            return Ok(CheckResult::plain(violation(name, min_k, &data.grid, params)));
        }
    }
    reach_gate(m, &data, t)?;
    let (w_exp, v_exp, pre) = mode.shape(m.m);
    let weight = |r: f64| powf(weight_base(&space, r), -w_exp);
    let kernel = |r: f64| powf(weight_base(&space, r), -v_exp);

    let (nodes, w, wc) = simpson_rule(s, t, n_r);
    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut inner_ref = 0.0;
    let mut prof_r = Vec::with_capacity(nodes.len());
    let mut prof_v = Vec::with_capacity(nodes.len());
    let mut prof_e = Vec::with_capacity(nodes.len());
    for (j, &r) in nodes.iter().enumerate() {
        let p = data.ball_integral(1, r, rule);
        let v = kernel(r) * p.value;
        fine += w[j] * v;
        coarse += wc[j] * v;
        inner_ref += w[j] * kernel(r) * p.refinement_estimate;
        let q = data.ball_integral(0, r, rule);
        prof_r.push(r);
        prof_v.push(weight(r) * q.value);
        prof_e.push(weight(r) * q.refinement_estimate);
    }
    let q_s = data.ball_integral(0, s, rule);
    let q_t = data.ball_integral(0, t, rule);
    let lhs = pre * fine;
    let rhs = weight(t) * q_t.value - weight(s) * q_s.value;
    let refinement = pre * (abs(fine - coarse) + inner_ref)
        + weight(t) * q_t.refinement_estimate
        + weight(s) * q_s.refinement_estimate;
    put(&mut params, "q_s", q_s.value);
    put(&mut params, "q_t", q_t.value);
    put(&mut params, "weight_s", weight(s));
    put(&mut params, "weight_t", weight(t));
    put(&mut params, "prefactor", pre);
    put(&mut params, "weight_exponent", w_exp);
    put(&mut params, "kernel_exponent", v_exp);
    put(&mut params, "min_rho", data.min_rho());
    let report = finish(name, lhs, rhs, refinement, &data.grid, params, tols);
    Ok(CheckResult {
        report,
        profile: Some(RadialProfile {
            center: x0_coords.to_vec(),
            radii: prof_r,
            values: prof_v,
            refinement: prof_e,
            integrand: String::from("weighted ball integral of f S1"),
        }),
    })
}

/// L^p decay estimate: with S1 bounded below by c and the curvature term
/// bounded in L^p on the ball of radius r0, the weighted ball integral of
/// S1 at the inner radius is controlled by the outer one plus a radial
/// integral. The record uses the proof-stage constant Lambda/(p c^{1-1/p});
/// the looser stated constants ride along as parameters.
pub fn verify_lp(
    name: &str,
    m: &Immersion,
    x0_coords: &[f64],
    s: f64,
    t: f64,
    p: f64,
    c: Option<f64>,
    r0: f64,
    sizes: &[usize],
    n_r: usize,
    rule: BallRule,
    tols: &Tolerances,
) -> Result<CheckResult> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(String::from("need p > 1")));
    }
    if !(s > 0.0 && s <= t && t <= r0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(String::from("need 0 < s <= t <= r0")));
    }
    if m.space.kind == SpaceFormKind::Sphere {
        let limit = PI / (2.0 * crate::math::sqrt(m.space.kappa));
        if r0 > limit * (1.0 + 1e-12) {
            return Err(Error::Precondition(String::from(
                "r0 must stay within pi/(2 sqrt(kappa))",
            )));
        }
    }
    let space = m.space;
    let x0 = space.point(x0_coords)?;
    let md = m.m as f64;
    let data = scan(m, &DomainSpec::FullChart, sizes, Some(&x0), 3, &|fr, out| {
        out[0] = fr.s1;
        out[1] = fr.s2;
        out[2] = powf(fr.s2.max(0.0), p);
        Ok(())
    })?;
    let (min_s1, _) = data.channel_range(0);
    let (min_s2, max_s2) = data.channel_range(1);
    let mut params = Params::new();
    put(&mut params, "p", p);
    put(&mut params, "s", s);
    put(&mut params, "t", t);
    put(&mut params, "r0", r0);
    put(&mut params, "min_s1", min_s1);
    put(&mut params, "min_s2", min_s2);
    if let Some(bad) = positivity_gate(min_s1, min_s2, max_s2) {
        return Ok(CheckResult::plain(violation(name, bad, &data.grid, params)));
    }
    let c_eff = match c {
        Some(cv) => {
            if !(cv > 0.0) {
                return Err(Error::InvalidParameter(String::from("need c > 0")));
            }
            if min_s1 < cv - 1e-9 * (1.0 + cv) {
                put(&mut params, "c", cv);
                return Ok(CheckResult::plain(violation(
                    name,
                    min_s1 - cv,
                    &data.grid,
                    params,
                )));
            }
            cv
        }
        None => min_s1,
    };
    put(&mut params, "c", c_eff);
    reach_gate(m, &data, r0)?;
    let i_lp = data.ball_integral(2, r0, rule);
    let lambda = powf(i_lp.value, 1.0 / p);
    let d_lambda = if i_lp.value > 0.0 {
        powf(i_lp.value, 1.0 / p - 1.0) / p * i_lp.refinement_estimate
    } else {
        0.0
    };
    let w_exp = (md - 1.0) / 2.0;
    let weight = |r: f64| powf(weight_base(&space, r), -w_exp);
    let (nodes, w, wc) = simpson_rule(s, t, n_r);
    let mut j_fine = 0.0;
    let mut j_coarse = 0.0;
    for (j, &r) in nodes.iter().enumerate() {
        let v = powf(weight_base(&space, r), -(md - 1.0) / (2.0 * p));
        j_fine += w[j] * v;
        j_coarse += wc[j] * v;
    }
    let c_pow = powf(c_eff, 1.0 - 1.0 / p);
    let proof_constant = lambda / (p * c_pow);
    let q_s = data.ball_integral(0, s, rule);
    let q_t = data.ball_integral(0, t, rule);
    let root = |x: f64| powf(x.max(0.0), 1.0 / p);
    let droot = |x: f64, dx: f64| {
        if x > 0.0 {
            powf(x, 1.0 / p - 1.0) / p * dx
        } else {
            0.0
        }
    };
    let lhs = root(weight(s) * q_s.value);
    let rhs = root(weight(t) * q_t.value) + proof_constant * j_fine;
    let refinement = droot(weight(s) * q_s.value, weight(s) * q_s.refinement_estimate)
        + droot(weight(t) * q_t.value, weight(t) * q_t.refinement_estimate)
        + proof_constant * abs(j_fine - j_coarse)
        + j_fine * d_lambda / (p * c_pow);
    // the constants in the stated corollary (both curvature signs)
    let denom = c_pow * (md - 1.0 - 2.0 * p);
    let statement_constant = if space.kind == SpaceFormKind::Sphere {
        lambda * (md - 1.0) / denom
    } else {
        2.0 * lambda / denom
    };
    put(&mut params, "lambda", lambda);
    put(&mut params, "j_integral", j_fine);
    put(&mut params, "proof_constant", proof_constant);
    put(&mut params, "statement_constant", statement_constant);
    put(&mut params, "statement_rhs", root(weight(t) * q_t.value) + statement_constant * j_fine);
    put(&mut params, "q_s", q_s.value);
    put(&mut params, "q_t", q_t.value);
    put(&mut params, "weight_s", weight(s));
    put(&mut params, "weight_t", weight(t));
    Ok(CheckResult::plain(finish(name, lhs, rhs, refinement, &data.grid, params, tols)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SpaceForm;
    use crate::fixtures::{make_geodesic_sphere, make_sphere};
    use crate::math::sqrt;
    use crate::verifier::Verdict;

    // unit sphere through the north pole: the extrinsic ball of chord
    // radius r cuts a cap of area pi r^2, with int S1 = 2 pi r^2 and
    // int rho^2 = pi r^4 / 2
    fn unit_sphere_at_pole() -> Immersion {
        make_sphere(2, 1.0, &[0.0; 3], 1e-3).unwrap()
    }

    #[test]
    fn flat_ambient_window_matches_the_closed_forms() {
        let im = unit_sphere_at_pole();
        let (s, t) = (0.5, 1.2);
        let out = verify_mean_value(
            "mv",
            &im,
            &[0.0, 0.0, 1.0],
            s,
            t,
            &TestFunction::Constant,
            MeanValueMode::General,
            &[256, 512],
            64,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        let rhs_exact = 2.0 * PI * (powf(t, 1.5) - powf(s, 1.5));
        let lhs_exact = -(PI / 14.0) * (powf(t, 3.5) - powf(s, 3.5));
        assert!(
            abs(out.report.rhs - rhs_exact) < 1e-4 * rhs_exact,
            "rhs {} vs {}",
            out.report.rhs,
            rhs_exact
        );
        assert!(
            abs(out.report.lhs - lhs_exact) < 2e-4,
            "lhs {} vs {}",
            out.report.lhs,
            lhs_exact
        );
        assert_eq!(out.report.verdict, Verdict::Pass);
        let prof = out.profile.unwrap();
        // the weighted profile 2 pi r^{3/2} is increasing on the window
        for k in 1..prof.values.len() {
            assert!(prof.values[k] >= prof.values[k - 1] - 1e-6);
        }
        assert!(abs(prof.values[0] - 2.0 * PI * powf(s, 1.5)) < 1e-3);
    }

    #[test]
    fn convex_mode_tightens_the_exponents() {
        let im = unit_sphere_at_pole();
        let (s, t) = (0.5, 1.2);
        let out = verify_mean_value(
            "mv",
            &im,
            &[0.0, 0.0, 1.0],
            s,
            t,
            &TestFunction::Constant,
            MeanValueMode::Convex,
            &[256, 512],
            64,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        // weights r^{-1}: difference of 2 pi r, kernel r^{-2} against
        // -pi r^4 / 2 integrates to -(pi/6)(t^3 - s^3)
        let rhs_exact = 2.0 * PI * (t - s);
        let lhs_exact = -(PI / 6.0) * (powf(t, 3.0) - powf(s, 3.0));
        assert!(abs(out.report.rhs - rhs_exact) < 1e-3, "rhs {}", out.report.rhs);
        assert!(abs(out.report.lhs - lhs_exact) < 1e-3, "lhs {}", out.report.lhs);
        assert_eq!(out.report.verdict, Verdict::Pass);
    }

    #[test]
    fn sphere_ambient_window_passes_for_a_geodesic_sphere() {
        let space = SpaceForm::sphere(1.0, 3).unwrap();
        let gs = make_geodesic_sphere(&space, PI / 4.0, 1e-3).unwrap();
        // chart point at t = 0: x0 lies on the surface itself
        let a = PI / 4.0;
        let x0 = [a.cos(), a.sin(), 0.0, 0.0];
        let wrong = verify_mean_value(
            "mv",
            &gs,
            &x0[..3],
            0.3,
            0.7,
            &TestFunction::Constant,
            MeanValueMode::General,
            &[64, 64],
            16,
            BallRule::Coverage,
            &Tolerances::default(),
        );
        assert!(wrong.is_err(), "three coordinates cannot name a point of S^3");
        let out = verify_mean_value(
            "mv",
            &gs,
            &x0,
            0.3,
            0.7,
            &TestFunction::Constant,
            MeanValueMode::General,
            &[256, 512],
            48,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(out.report.verdict, Verdict::Pass, "slack {}", out.report.slack);
    }

    #[test]
    fn window_limit_is_enforced_on_sphere_ambients() {
        let space = SpaceForm::sphere(1.0, 3).unwrap();
        let gs = make_geodesic_sphere(&space, PI / 4.0, 1e-3).unwrap();
        let a = PI / 4.0;
        let x0 = [a.cos(), a.sin(), 0.0, 0.0];
        let err = verify_mean_value(
            "mv",
            &gs,
            &x0,
            0.3,
            PI / 2.0,
            &TestFunction::Constant,
            MeanValueMode::General,
            &[64, 64],
            16,
            BallRule::Sharp,
            &Tolerances::default(),
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn lp_estimate_matches_the_closed_forms_on_the_unit_sphere() {
        let im = unit_sphere_at_pole();
        let (s, t) = (0.3, 0.9);
        let out = verify_lp(
            "lp",
            &im,
            &[0.0, 0.0, 1.0],
            s,
            t,
            2.0,
            Some(2.0),
            2.0,
            &[256, 512],
            64,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        let lambda = sqrt(4.0 * PI);
        assert!(abs(out.report.params["lambda"] - lambda) < 1e-4);
        let j = (4.0 / 3.0) * (powf(t, 0.75) - powf(s, 0.75));
        assert!(abs(out.report.params["j_integral"] - j) < 1e-7);
        let lhs = sqrt(2.0 * PI * powf(s, 1.5));
        assert!(abs(out.report.lhs - lhs) < 1e-4, "lhs {}", out.report.lhs);
        let rhs = sqrt(2.0 * PI * powf(t, 1.5)) + lambda / (2.0 * sqrt(2.0)) * j;
        assert!(abs(out.report.rhs - rhs) < 1e-3, "rhs {}", out.report.rhs);
        assert_eq!(out.report.verdict, Verdict::Pass);
        let stated = 2.0 * lambda / (sqrt(2.0) * (2.0 - 1.0 - 4.0));
        assert!(abs(out.report.params["statement_constant"] - stated) < 1e-4);
    }

    #[test]
    fn lp_coincident_radii_are_an_equality_case() {
        let im = unit_sphere_at_pole();
        let out = verify_lp(
            "lp",
            &im,
            &[0.0, 0.0, 1.0],
            0.6,
            0.6,
            2.0,
            None,
            2.0,
            &[128, 256],
            16,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(out.report.verdict, Verdict::EqualityCase);
        assert!(abs(out.report.params["c"] - 2.0) < 1e-9);
    }

    #[test]
    fn lp_respects_the_claimed_lower_bound() {
        let im = unit_sphere_at_pole();
        let out = verify_lp(
            "lp",
            &im,
            &[0.0, 0.0, 1.0],
            0.3,
            0.9,
            2.0,
            Some(2.5),
            2.0,
            &[96, 192],
            16,
            BallRule::Coverage,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(out.report.verdict, Verdict::HypothesisViolation);
    }
}
