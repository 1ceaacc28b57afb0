//! One checker per inequality: both sides by quadrature, explicit slack,
//! verdict.
//!
//! Three outcomes are kept apart on purpose. `Fail` means the inequality
//! itself broke tolerance. `HypothesisViolation` means the surface never
//! satisfied the result's standing hypotheses (S1 > 0, S2 >= 0, curvature
//! ranges), so nothing is implied about the inequality; runners should treat
//! it like a configuration problem, not a counterexample. Genuine
//! configuration mistakes (bad radii, off-model centers, unsupported
//! ambients) surface as `Err` before any verdict is formed.

mod meanvalue;
mod monotone;
mod single;

pub use meanvalue::{verify_lp, verify_mean_value, MeanValueMode};
pub use monotone::{monotonicity_h, monotonicity_phi_shrinker};
pub use single::{
    verify_diameter_bound, verify_divergence_identity, verify_isoperimetric,
    verify_mean_curvature_total, verify_poincare, verify_self_shrinker_volume,
    verify_volume_estimate,
};

use crate::ambient::{geodesic_distance, grad_distance, AmbientPoint, SpaceForm, SpaceFormKind};
use crate::hypersurface::{CurvatureFrame, Immersion, MAX_M};
use crate::math::{abs, sin, smooth_step, sqrt, tan, PI};
use crate::measure::{
    diameter_bounds, domain_points, DomainSpec, EnclosingBall, RadialProfile, ScanData,
};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::string::ToString;
use alloc::vec::Vec;

/// Slack thresholds shared by all checkers.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Absolute slack floor added to every inequality tolerance.
    pub slack_floor: f64,
    /// Relative band around zero slack that counts as an equality case.
    pub equality_rel: f64,
    /// Allowed relative decrease between consecutive profile radii.
    pub monotonic: f64,
    /// Allowed relative weak-form residual for the divergence identity.
    pub divergence_rel: f64,
    /// Largest |H + <X,eta>/(2m)| accepted as a self-shrinker.
    pub shrinker_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slack_floor: 1e-8,
            equality_rel: 1e-6,
            monotonic: 1e-8,
            divergence_rel: 1e-5,
            shrinker_residual: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    EqualityCase,
    Fail,
    HypothesisViolation,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "Pass",
            Verdict::EqualityCase => "EqualityCase",
            Verdict::Fail => "Fail",
            Verdict::HypothesisViolation => "HypothesisViolation",
        }
    }
}

/// Named check outcome: lhs <= rhs convention, slack = rhs - lhs.
#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub rel_slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub grid: Vec<usize>,
    pub params: BTreeMap<String, f64>,
    pub refinement_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub report: InequalityReport,
    pub profile: Option<RadialProfile>,
}

impl CheckResult {
    pub(crate) fn plain(report: InequalityReport) -> Self {
        CheckResult { report, profile: None }
    }
}

/// Verdict assembly for a plain lhs <= rhs check.
pub(crate) fn finish(
    name: &str,
    lhs: f64,
    rhs: f64,
    refinement: f64,
    grid: &[usize],
    params: BTreeMap<String, f64>,
    tols: &Tolerances,
) -> InequalityReport {
    let slack = rhs - lhs;
    let denom = abs(lhs).max(abs(rhs));
    let rel_slack = if denom > 0.0 { slack / denom } else { 0.0 };
    let tolerance = tols.slack_floor * (1.0 + denom) + refinement;
    let verdict = if abs(rel_slack) <= tols.equality_rel {
        Verdict::EqualityCase
    } else if slack >= -tolerance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    InequalityReport {
        name: name.to_string(),
        lhs,
        rhs,
        slack,
        rel_slack,
        tolerance,
        verdict,
        grid: grid.to_vec(),
        params,
        refinement_estimate: refinement,
    }
}

/// Report for data that never met the standing hypotheses. `lhs` carries the
/// offending quantity so the record stays self-describing.
pub(crate) fn violation(
    name: &str,
    offending: f64,
    grid: &[usize],
    params: BTreeMap<String, f64>,
) -> InequalityReport {
    InequalityReport {
        name: name.to_string(),
        lhs: offending,
        rhs: 0.0,
        slack: -offending,
        rel_slack: 0.0,
        tolerance: 0.0,
        verdict: Verdict::HypothesisViolation,
        grid: grid.to_vec(),
        params,
        refinement_estimate: 0.0,
    }
}

/// min S1 > 0 and min S2 >= 0 (up to eigensolver noise). Returns the
/// offending value when the convexity-type hypotheses fail.
pub(crate) fn positivity_gate(min_s1: f64, min_s2: f64, s2_scale: f64) -> Option<f64> {
    if !(min_s1 > 0.0) {
        return Some(min_s1);
    }
    if min_s2 < -1e-10 * (1.0 + abs(s2_scale)) {
        return Some(min_s2);
    }
    None
}

/// C(Omega) from the domain diameter: diam/(m-1) for kappa <= 0, the tangent
/// form for kappa > 0 (needs diam < pi/sqrt(kappa)).
pub fn poincare_constant(diam: f64, kappa: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParameter(String::from("dimension must be at least 2")));
    }
    if !(diam > 0.0) {
        return Err(Error::InvalidParameter(String::from("diameter must be positive")));
    }
    let md = (m - 1) as f64;
    if kappa <= 0.0 {
        Ok(diam / md)
    } else {
        let sk = sqrt(kappa);
        if diam >= PI / sk - 1e-9 {
            return Err(Error::Precondition(String::from(
                "domain diameter must stay below pi/sqrt(kappa)",
            )));
        }
        Ok(2.0 / (sk * md) * tan(sk * diam / 2.0))
    }
}

/// Extrinsic diameter of the scanned domain: smallest enclosing ball over
/// the node lattice (capped per axis so Welzl input stays moderate).
pub(crate) fn domain_diameter(
    m: &Immersion,
    dom: &DomainSpec,
    sizes: &[usize],
    seed: u64,
) -> Result<(EnclosingBall, f64)> {
    let cap: Vec<usize> = (0..m.m)
        .map(|a| sizes.get(a).copied().unwrap_or_else(|| *sizes.last().unwrap()).min(256))
        .collect();
    let pts = domain_points(m, dom, &cap)?;
    diameter_bounds(&m.space, &pts, seed)
}

/// Weight base of the mean-value displays: r for kappa <= 0, sin(sqrt(k) r)
/// for kappa > 0.
pub(crate) fn weight_base(space: &SpaceForm, r: f64) -> f64 {
    match space.kind {
        SpaceFormKind::Sphere => sin(sqrt(space.kappa) * r),
        _ => r,
    }
}

/// Ball windows must sit inside the chart: no open chart edge may come
/// closer to the scan center than the outermost radius.
pub(crate) fn reach_gate(m: &Immersion, data: &ScanData, t: f64) -> Result<()> {
    if m.closed {
        return Ok(());
    }
    let rho_idx = data.rho_idx.expect("centered scan");
    for a in 0..m.m {
        if m.periodic[a] {
            continue;
        }
        for upper in [false, true] {
            if data.slab_min(rho_idx, a, upper) <= t {
                return Err(Error::Precondition(String::from(
                    "extrinsic ball reaches the chart boundary",
                )));
            }
        }
    }
    Ok(())
}

/// Composite Simpson nodes and weights on [lo, hi] plus the half-resolution
/// weights on the even-index subset (for refinement estimates).
pub(crate) fn simpson_rule(lo: f64, hi: f64, want: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut n = want.max(4);
    if n % 4 != 0 {
        n += 4 - n % 4;
    }
    let h = (hi - lo) / n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let mut wc = Vec::with_capacity(n + 1);
    for j in 0..=n {
        nodes.push(if j == n { hi } else { lo + h * j as f64 });
        w.push(if j == 0 || j == n {
            h / 3.0
        } else if j % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        });
        wc.push(if j % 2 != 0 {
            0.0
        } else if j == 0 || j == n {
            2.0 * h / 3.0
        } else if j % 4 == 2 {
            8.0 * h / 3.0
        } else {
            4.0 * h / 3.0
        });
    }
    (nodes, w, wc)
}

/// One face of a chart-coordinate tent support.
#[derive(Clone, Copy, Debug)]
pub struct TentFace {
    pub axis: usize,
    /// Face sits at the upper end of the axis range.
    pub upper: bool,
    /// Chart coordinate of the face.
    pub at: f64,
}

/// Non-negative test functions with chart-gradient oracles.
#[derive(Clone)]
pub enum TestFunction {
    /// f = 1. Only admissible on closed hypersurfaces with a full-chart
    /// domain, where compact support is vacuous.
    Constant,
    /// f = min(1, dist/eps) with dist the chart-coordinate distance to the
    /// listed domain faces. Lipschitz, not C^1: the kink set has measure
    /// zero and the quadrature treats it one-sidedly.
    TentEps { faces: Vec<TentFace>, eps: f64 },
    /// 1 inside rho <= r_in, 0 outside rho >= r_out, C^2 ramp between
    /// (rho = ambient distance from `center`).
    RadialBump { center: AmbientPoint, r_in: f64, r_out: f64 },
    /// Product of per-axis (1 - s^2)^3 bumps; support is the box
    /// center +- halfwidth in chart coordinates.
    SmoothBump { center: Vec<f64>, halfwidth: Vec<f64> },
}

impl TestFunction {
    /// Value and chart partial derivatives at a frame point.
    pub fn eval(&self, space: &SpaceForm, fr: &CurvatureFrame) -> Result<(f64, [f64; MAX_M])> {
        let mut df = [0.0; MAX_M];
        match self {
            TestFunction::Constant => Ok((1.0, df)),
            TestFunction::TentEps { faces, eps } => {
                if faces.is_empty() {
                    return Ok((1.0, df));
                }
                let mut best = f64::INFINITY;
                let mut slope_axis = 0usize;
                let mut slope = 0.0;
                for f in faces {
                    let d = if f.upper { f.at - fr.u[f.axis] } else { fr.u[f.axis] - f.at };
                    if d < best {
                        best = d;
                        slope_axis = f.axis;
                        slope = if f.upper { -1.0 / eps } else { 1.0 / eps };
                    }
                }
                let v = best / eps;
                if v <= 0.0 {
                    Ok((0.0, df))
                } else if v >= 1.0 {
                    Ok((1.0, df))
                } else {
                    df[slope_axis] = slope;
                    Ok((v, df))
                }
            }
            TestFunction::RadialBump { center, r_in, r_out } => {
                let rho = geodesic_distance(space, center, &fr.point)?;
                if rho <= *r_in {
                    return Ok((1.0, df));
                }
                if rho >= *r_out {
                    return Ok((0.0, df));
                }
                let width = r_out - r_in;
                let (sv, sd) = smooth_step((rho - r_in) / width);
                let dfdrho = -sd / width;
                let gamma = grad_distance(space, center, &fr.point)?;
                for a in 0..fr.m {
                    df[a] = dfdrho * space.inner_raw(&gamma.v, &fr.d1[a]);
                }
                Ok((1.0 - sv, df))
            }
            TestFunction::SmoothBump { center, halfwidth } => {
                let mut val = 1.0;
                let mut factors = [0.0; MAX_M];
                let mut dfactors = [0.0; MAX_M];
                for a in 0..fr.m {
                    let s = (fr.u[a] - center[a]) / halfwidth[a];
                    if abs(s) >= 1.0 {
                        return Ok((0.0, df));
                    }
                    let q = 1.0 - s * s;
                    factors[a] = q * q * q;
                    dfactors[a] = -6.0 * s * q * q / halfwidth[a];
                    val *= factors[a];
                }
                for a in 0..fr.m {
                    let mut d = dfactors[a];
                    for b in 0..fr.m {
                        if b != a {
                            d *= factors[b];
                        }
                    }
                    df[a] = d;
                }
                Ok((val, df))
            }
        }
    }
}
