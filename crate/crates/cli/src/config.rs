//! TOML config schema and the dispatch from check entries to core checkers.
//! Unknown keys are rejected everywhere; missing required parameters come
//! back as `InvalidParameter` so the caller can map them to exit code 2.

use curvlab_core::fixtures::{
    make_cap_domain, make_convex_graph, make_ellipsoid, make_geodesic_sphere, make_radial_graph,
    make_sphere, make_torus,
};
use curvlab_core::verifier::{
    monotonicity_h, monotonicity_phi_shrinker, verify_diameter_bound, verify_divergence_identity,
    verify_isoperimetric, verify_lp, verify_mean_curvature_total, verify_mean_value,
    verify_poincare, verify_self_shrinker_volume, verify_volume_estimate,
};
use curvlab_core::{
    BallRule, CheckResult, DomainSpec, Error, Immersion, MeanValueMode, SpaceForm, TentFace,
    TestFunction, Tolerances,
};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub checks: Vec<CheckConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub fixture: String,
    pub m: Option<usize>,
    pub radius: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub margin: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub kappa: Option<f64>,
    pub geodesic_radius: Option<f64>,
    pub big_radius: Option<f64>,
    pub small_radius: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub n_terms: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub sizes: Option<Vec<usize>>,
    pub boundary: Option<usize>,
    pub radial: Option<usize>,
    pub ball_rule: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub slack_floor: Option<f64>,
    pub equality_rel: Option<f64>,
    pub monotonic: Option<f64>,
    pub divergence_rel: Option<f64>,
    pub shrinker_residual: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub profiles_dir: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub kind: String,
    pub name: Option<String>,
    pub grid: Option<Vec<usize>>,
    pub boundary: Option<usize>,
    pub radial: Option<usize>,
    pub ball_rule: Option<String>,
    // domain restriction (default: full chart)
    pub cap_theta: Option<f64>,
    pub rect: Option<Vec<[f64; 2]>>,
    // test function (default: constant)
    pub test_function: Option<String>,
    pub bump_center: Option<Vec<f64>>,
    pub bump_inner: Option<f64>,
    pub bump_outer: Option<f64>,
    pub bump_center_chart: Option<Vec<f64>>,
    pub bump_halfwidth: Option<Vec<f64>>,
    pub tent_eps: Option<f64>,
    // ball and window parameters
    pub x0: Option<Vec<f64>>,
    pub x0_chart: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub c: Option<f64>,
    pub r0: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub exponent_mode: Option<String>,
}

impl ToleranceConfig {
    pub fn build(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.slack_floor {
            t.slack_floor = v;
        }
        if let Some(v) = self.equality_rel {
            t.equality_rel = v;
        }
        if let Some(v) = self.monotonic {
            t.monotonic = v;
        }
        if let Some(v) = self.divergence_rel {
            t.divergence_rel = v;
        }
        if let Some(v) = self.shrinker_residual {
            t.shrinker_residual = v;
        }
        t
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub fn load(path: &Path) -> Result<ConfigFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg: ConfigFile =
        toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
    if cfg.checks.is_empty() {
        return Err(String::from("config lists no checks"));
    }
    let mut seen = BTreeSet::new();
    for (i, c) in cfg.checks.iter().enumerate() {
        let name = effective_name(c, i);
        if !seen.insert(name.clone()) {
            return Err(format!("duplicate check name {name:?}"));
        }
    }
    Ok(cfg)
}

pub fn effective_name(c: &CheckConfig, index: usize) -> String {
    match &c.name {
        Some(n) => n.clone(),
        None => format!("{}-{}", c.kind, index),
    }
}

pub fn build_surface(s: &SurfaceConfig) -> Result<Immersion, Error> {
    let margin = s.margin.unwrap_or(1e-3);
    match s.fixture.as_str() {
        "sphere" => {
            let m = s.m.unwrap_or(2);
            let r = s.radius.ok_or_else(|| bad("sphere needs radius"))?;
            let center = s.center.clone().unwrap_or_else(|| vec![0.0; m + 1]);
            make_sphere(m, r, &center, margin)
        }
        "ellipsoid" => {
            let a = s.a.ok_or_else(|| bad("ellipsoid needs a"))?;
            let b = s.b.ok_or_else(|| bad("ellipsoid needs b"))?;
            let c = s.c.ok_or_else(|| bad("ellipsoid needs c"))?;
            make_ellipsoid(a, b, c, margin)
        }
        "geodesic_sphere" => {
            let kappa = s.kappa.ok_or_else(|| bad("geodesic_sphere needs kappa"))?;
            let a = s
                .geodesic_radius
                .ok_or_else(|| bad("geodesic_sphere needs geodesic_radius"))?;
            let space = if kappa > 0.0 {
                SpaceForm::sphere(kappa, 3)?
            } else if kappa < 0.0 {
                SpaceForm::hyperbolic(kappa, 3)?
            } else {
                return Err(bad("geodesic_sphere needs kappa != 0; use sphere instead"));
            };
            make_geodesic_sphere(&space, a, margin)
        }
        "torus" => {
            let big = s.big_radius.ok_or_else(|| bad("torus needs big_radius"))?;
            let small = s.small_radius.ok_or_else(|| bad("torus needs small_radius"))?;
            make_torus(big, small)
        }
        "radial_graph" => {
            let coeffs = s.coeffs.as_ref().ok_or_else(|| bad("radial_graph needs coeffs"))?;
            let eps = s.eps.ok_or_else(|| bad("radial_graph needs eps"))?;
            make_radial_graph(coeffs, eps, margin)
        }
        "convex_graph" => {
            let eps = s.eps.ok_or_else(|| bad("convex_graph needs eps"))?;
            let n = s.n_terms.unwrap_or(4);
            make_convex_graph(eps, n, s.seed.unwrap_or(1), margin)
        }
        other => Err(bad(format!("unknown fixture {other:?}"))),
    }
}

pub const FIXTURES: &[(&str, &str)] = &[
    ("sphere", "round m-sphere in Euclidean space (m, radius, center, margin)"),
    ("ellipsoid", "triaxial ellipsoid surface in Euclidean 3-space (a, b, c, margin)"),
    (
        "geodesic_sphere",
        "distance sphere in a curved 3-dimensional space form (kappa, geodesic_radius, margin)",
    ),
    ("torus", "torus of revolution, a non-convex control case (big_radius, small_radius)"),
    ("radial_graph", "radial graph over the unit sphere (coeffs, eps, margin)"),
    ("convex_graph", "random small convex perturbation of the unit sphere (eps, n_terms, seed)"),
];

struct Resolved<'a> {
    name: String,
    sizes: Vec<usize>,
    boundary: usize,
    radial: usize,
    rule: BallRule,
    check: &'a CheckConfig,
    seed: u64,
}

fn parse_rule(s: Option<&str>) -> Result<BallRule, Error> {
    match s.unwrap_or("coverage") {
        "coverage" => Ok(BallRule::Coverage),
        "sharp" => Ok(BallRule::Sharp),
        other => Err(bad(format!("unknown ball_rule {other:?}"))),
    }
}

fn domain(c: &CheckConfig) -> Result<DomainSpec, Error> {
    match (&c.cap_theta, &c.rect) {
        (Some(_), Some(_)) => Err(bad("give cap_theta or rect, not both")),
        (Some(theta), None) => Ok(make_cap_domain(*theta)),
        (None, Some(r)) => Ok(DomainSpec::SubRectangle(r.clone())),
        (None, None) => Ok(DomainSpec::FullChart),
    }
}

fn tent_faces(im: &Immersion, dom: &DomainSpec) -> Vec<TentFace> {
    let mut faces = Vec::new();
    if let DomainSpec::SubRectangle(b) = dom {
        for a in 0..im.m {
            let eps = 1e-12 * im.extent(a);
            if b[a][0] > im.rect[a][0] + eps {
                faces.push(TentFace { axis: a, upper: false, at: b[a][0] });
            }
            if b[a][1] < im.rect[a][1] - eps {
                faces.push(TentFace { axis: a, upper: true, at: b[a][1] });
            }
        }
    }
    faces
}

fn test_function(im: &Immersion, c: &CheckConfig, dom: &DomainSpec) -> Result<TestFunction, Error> {
    match c.test_function.as_deref().unwrap_or("constant") {
        "constant" => Ok(TestFunction::Constant),
        "radial_bump" => {
            let center = c
                .bump_center
                .as_ref()
                .ok_or_else(|| bad("radial_bump needs bump_center (ambient coordinates)"))?;
            let center = im.space.point(center)?;
            let r_in = c.bump_inner.ok_or_else(|| bad("radial_bump needs bump_inner"))?;
            let r_out = c.bump_outer.ok_or_else(|| bad("radial_bump needs bump_outer"))?;
            if !(r_out > r_in && r_in > 0.0) {
                return Err(bad("radial_bump needs 0 < bump_inner < bump_outer"));
            }
            Ok(TestFunction::RadialBump { center, r_in, r_out })
        }
        "smooth_bump" => {
            let center = c
                .bump_center_chart
                .clone()
                .ok_or_else(|| bad("smooth_bump needs bump_center_chart"))?;
            let halfwidth = c
                .bump_halfwidth
                .clone()
                .ok_or_else(|| bad("smooth_bump needs bump_halfwidth"))?;
            if center.len() != im.m || halfwidth.len() != im.m {
                return Err(bad("smooth_bump coordinate counts must match the chart"));
            }
            Ok(TestFunction::SmoothBump { center, halfwidth })
        }
        "tent" => {
            let eps = c.tent_eps.ok_or_else(|| bad("tent needs tent_eps"))?;
            if !(eps > 0.0) {
                return Err(bad("tent_eps must be positive"));
            }
            Ok(TestFunction::TentEps { faces: tent_faces(im, dom), eps })
        }
        other => Err(bad(format!("unknown test_function {other:?}"))),
    }
}

/// Resolve x0 from ambient model coordinates or from chart coordinates.
fn x0_coords(im: &Immersion, c: &CheckConfig) -> Result<Vec<f64>, Error> {
    match (&c.x0, &c.x0_chart) {
        (Some(_), Some(_)) => Err(bad("give x0 or x0_chart, not both")),
        (Some(v), None) => Ok(v.clone()),
        (None, Some(u)) => {
            if u.len() != im.m {
                return Err(bad("x0_chart length must match the chart dimension"));
            }
            let fr = im.curvature_frame(u)?;
            Ok(fr.point.c.a[..fr.point.c.n].to_vec())
        }
        (None, None) => Err(bad("this check needs x0 or x0_chart")),
    }
}

fn require(v: Option<f64>, what: &str) -> Result<f64, Error> {
    v.ok_or_else(|| bad(format!("missing parameter {what}")))
}

pub fn run_check(
    im: &Immersion,
    cfg: &ConfigFile,
    index: usize,
    grid_scale: usize,
) -> Result<CheckResult, Error> {
    let c = &cfg.checks[index];
    let base_sizes =
        c.grid.clone().or_else(|| cfg.grid.sizes.clone()).unwrap_or_else(|| vec![128, 256]);
    if base_sizes.len() != im.m {
        return Err(bad("grid sizes must list one entry per chart axis"));
    }
    let r = Resolved {
        name: effective_name(c, index),
        sizes: base_sizes.iter().map(|&n| n * grid_scale).collect(),
        boundary: c.boundary.or(cfg.grid.boundary).unwrap_or(512) * grid_scale,
        radial: c.radial.or(cfg.grid.radial).unwrap_or(48) * grid_scale,
        rule: parse_rule(c.ball_rule.as_deref().or(cfg.grid.ball_rule.as_deref()))?,
        check: c,
        seed: cfg.seed.unwrap_or(7),
    };
    let tols = cfg.tolerances.build();
    dispatch(im, &r, &tols)
}

fn dispatch(im: &Immersion, r: &Resolved, tols: &Tolerances) -> Result<CheckResult, Error> {
    let c = r.check;
    match c.kind.as_str() {
        "poincare" => {
            let dom = domain(c)?;
            let f = test_function(im, c, &dom)?;
            verify_poincare(&r.name, im, &dom, &f, &r.sizes, r.seed, tols)
        }
        "isoperimetric" => {
            let dom = domain(c)?;
            verify_isoperimetric(&r.name, im, &dom, &r.sizes, r.boundary, r.seed, tols)
        }
        "mean_curvature_total" => verify_mean_curvature_total(&r.name, im, &r.sizes, r.seed, tols),
        "diameter_bound" => verify_diameter_bound(&r.name, im, &r.sizes, r.seed, tols),
        "shrinker_volume" => verify_self_shrinker_volume(&r.name, im, &r.sizes, r.seed, tols),
        "volume_estimate" => verify_volume_estimate(&r.name, im, &r.sizes, r.seed, tols),
        "divergence" => {
            let dom = domain(c)?;
            let f = test_function(im, c, &dom)?;
            let x0 = x0_coords(im, c)?;
            verify_divergence_identity(&r.name, im, &x0, &f, &r.sizes, tols)
        }
        "mean_value" => {
            let dom = domain(c)?;
            let f = test_function(im, c, &dom)?;
            let x0 = x0_coords(im, c)?;
            let mode = match c.exponent_mode.as_deref().unwrap_or("general") {
                "general" => MeanValueMode::General,
                "convex" => MeanValueMode::Convex,
                other => return Err(bad(format!("unknown exponent_mode {other:?}"))),
            };
            let s = require(c.s, "s")?;
            let t = require(c.t, "t")?;
            verify_mean_value(&r.name, im, &x0, s, t, &f, mode, &r.sizes, r.radial, r.rule, tols)
        }
        "lp" => {
            let x0 = x0_coords(im, c)?;
            let s = require(c.s, "s")?;
            let t = require(c.t, "t")?;
            let p = require(c.p, "p")?;
            let r0 = require(c.r0, "r0")?;
            verify_lp(&r.name, im, &x0, s, t, p, c.c, r0, &r.sizes, r.radial, r.rule, tols)
        }
        "monotonicity_h" => {
            let x0 = x0_coords(im, c)?;
            let radii = c.radii.clone().ok_or_else(|| bad("monotonicity_h needs radii"))?;
            let r0 = require(c.r0, "r0")?;
            let alpha = c.alpha.unwrap_or(1.0);
            monotonicity_h(
                &r.name, im, &x0, c.lambda, alpha, r0, &radii, &r.sizes, r.rule, tols,
            )
        }
        "monotonicity_shrinker" => {
            let x0 = match (&c.x0, &c.x0_chart) {
                (None, None) => vec![0.0; im.space.dim_ambient],
                _ => x0_coords(im, c)?,
            };
            let radii = c.radii.clone().ok_or_else(|| bad("monotonicity_shrinker needs radii"))?;
            monotonicity_phi_shrinker(
                &r.name, im, &x0, c.lambda, &radii, &r.sizes, r.rule, tols,
            )
        }
        other => Err(bad(format!("unknown check kind {other:?}"))),
    }
}
