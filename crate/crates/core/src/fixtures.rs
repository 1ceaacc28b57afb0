//! Named example surfaces. Polar charts clip a thin strip at each pole and
//! carry its exact measure so quadrature can add it back.

use crate::ambient::{SpaceForm, SpaceFormKind};
use crate::hypersurface::{ExcludedRegion, Immersion, Jets};
use crate::linalg::{Mn, Vn};
use crate::math::{cos, cosh, sin, sinh, sqrt, XorShift64, PI};
use crate::measure::DomainSpec;
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub struct FixtureInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// True when the surface violates S1 > 0, S2 >= 0 somewhere, making it
    /// a counterexample feed for hypothesis gating.
    pub hypothesis_negative: bool,
}

pub fn catalog() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            name: "sphere",
            summary: "round m-sphere in euclidean space (m = 2 or 3), offset center allowed",
            hypothesis_negative: false,
        },
        FixtureInfo {
            name: "ellipsoid",
            summary: "triaxial ellipsoid surface in euclidean 3-space",
            hypothesis_negative: false,
        },
        FixtureInfo {
            name: "geodesic-sphere",
            summary: "distance sphere inside the curved space forms",
            hypothesis_negative: false,
        },
        FixtureInfo {
            name: "radial-graph",
            summary: "graph r = 1 + eps p(direction) over the unit sphere, explicit coefficients",
            hypothesis_negative: false,
        },
        FixtureInfo {
            name: "convex-graph",
            summary: "randomly drawn radial graph, re-drawn until strictly convex",
            hypothesis_negative: false,
        },
        FixtureInfo {
            name: "torus",
            summary: "torus of revolution; has a region of negative extrinsic curvature",
            hypothesis_negative: true,
        },
    ]
}

/// Polar cap domain [0, theta0] x full turn for the m = 2 polar charts.
pub fn make_cap_domain(theta0: f64) -> DomainSpec {
    DomainSpec::SubRectangle(vec![[0.0, theta0], [0.0, 2.0 * PI]])
}

fn check_margin(margin: f64) -> Result<()> {
    if !(margin > 0.0 && margin < 0.1) {
        return Err(Error::InvalidParameter(String::from(
            "pole margin must lie in (0, 0.1)",
        )));
    }
    Ok(())
}

/// Round sphere of radius `r` about `center`, chart poles on the first axis.
pub fn make_sphere(m: usize, r: f64, center: &[f64], margin: f64) -> Result<Immersion> {
    check_margin(margin)?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(String::from("sphere radius must be positive")));
    }
    if center.len() != m + 1 {
        return Err(Error::InvalidParameter(String::from("center length must be m + 1")));
    }
    let space = SpaceForm::euclidean(m + 1)?;
    let c = Vn::from_slice(center);
    match m {
        2 => {
            let cc = c;
            let chart = move |u: &[f64]| {
                let (t, p) = (u[0], u[1]);
                let mut x = cc;
                x.a[0] += r * cos(t);
                x.a[1] += r * sin(t) * cos(p);
                x.a[2] += r * sin(t) * sin(p);
                x
            };
            let d1 = move |u: &[f64], a: usize| {
                let (t, p) = (u[0], u[1]);
                let mut v = Vn::zeros(3);
                if a == 0 {
                    v.a[0] = -r * sin(t);
                    v.a[1] = r * cos(t) * cos(p);
                    v.a[2] = r * cos(t) * sin(p);
                } else {
                    v.a[1] = -r * sin(t) * sin(p);
                    v.a[2] = r * sin(t) * cos(p);
                }
                v
            };
            let d2 = move |u: &[f64], a: usize, b: usize| {
                let (t, p) = (u[0], u[1]);
                let mut v = Vn::zeros(3);
                match (a, b) {
                    (0, 0) => {
                        v.a[0] = -r * cos(t);
                        v.a[1] = -r * sin(t) * cos(p);
                        v.a[2] = -r * sin(t) * sin(p);
                    }
                    (1, 1) => {
                        v.a[1] = -r * sin(t) * cos(p);
                        v.a[2] = -r * sin(t) * sin(p);
                    }
                    _ => {
                        v.a[1] = -r * cos(t) * sin(p);
                        v.a[2] = r * cos(t) * cos(p);
                    }
                }
                v
            };
            let im = Immersion::new(
                space,
                2,
                vec![[0.0, PI], [0.0, 2.0 * PI]],
                vec![false, true],
                true,
                "sphere",
                Box::new(chart),
                Jets::Analytic { d1: Box::new(d1), d2: Box::new(d2) },
            )?;
            let strip = 2.0 * PI * r * r * (1.0 - cos(margin));
            Ok(im.with_excluded(vec![
                ExcludedRegion { axis: 0, upper_end: false, margin, measure: strip },
                ExcludedRegion { axis: 0, upper_end: true, margin, measure: strip },
            ]))
        }
        3 => {
            // corner nodes see metric eigenvalues ~ margin^4; anything much
            // below 0.02 trips the conditioning gate
            let margin = margin.max(0.02);
            let cc = c;
            // direction vector n and its closed-form derivatives; chart is
            // c + r n, so jets are r times these
            let dir = move |u: &[f64]| {
                let (t1, t2, p) = (u[0], u[1], u[2]);
                Vn::from_slice(&[
                    cos(t1),
                    sin(t1) * cos(t2),
                    sin(t1) * sin(t2) * cos(p),
                    sin(t1) * sin(t2) * sin(p),
                ])
            };
            let chart = move |u: &[f64]| cc.add(&dir(u).scale(r));
            let d1 = move |u: &[f64], a: usize| {
                let (t1, t2, p) = (u[0], u[1], u[2]);
                let v = match a {
                    0 => [
                        -sin(t1),
                        cos(t1) * cos(t2),
                        cos(t1) * sin(t2) * cos(p),
                        cos(t1) * sin(t2) * sin(p),
                    ],
                    1 => [
                        0.0,
                        -sin(t1) * sin(t2),
                        sin(t1) * cos(t2) * cos(p),
                        sin(t1) * cos(t2) * sin(p),
                    ],
                    _ => [0.0, 0.0, -sin(t1) * sin(t2) * sin(p), sin(t1) * sin(t2) * cos(p)],
                };
                Vn::from_slice(&v).scale(r)
            };
            let d2 = move |u: &[f64], a: usize, b: usize| {
                let (t1, t2, p) = (u[0], u[1], u[2]);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let v = match (lo, hi) {
                    (0, 0) => [
                        -cos(t1),
                        -sin(t1) * cos(t2),
                        -sin(t1) * sin(t2) * cos(p),
                        -sin(t1) * sin(t2) * sin(p),
                    ],
                    (0, 1) => [
                        0.0,
                        -cos(t1) * sin(t2),
                        cos(t1) * cos(t2) * cos(p),
                        cos(t1) * cos(t2) * sin(p),
                    ],
                    (0, 2) => {
                        [0.0, 0.0, -cos(t1) * sin(t2) * sin(p), cos(t1) * sin(t2) * cos(p)]
                    }
                    (1, 1) => [
                        0.0,
                        -sin(t1) * cos(t2),
                        -sin(t1) * sin(t2) * cos(p),
                        -sin(t1) * sin(t2) * sin(p),
                    ],
                    (1, 2) => {
                        [0.0, 0.0, -sin(t1) * cos(t2) * sin(p), sin(t1) * cos(t2) * cos(p)]
                    }
                    _ => [0.0, 0.0, -sin(t1) * sin(t2) * cos(p), -sin(t1) * sin(t2) * sin(p)],
                };
                Vn::from_slice(&v).scale(r)
            };
            let im = Immersion::new(
                space,
                3,
                vec![[0.0, PI], [0.0, PI], [0.0, 2.0 * PI]],
                vec![false, false, true],
                true,
                "sphere",
                Box::new(chart),
                Jets::Analytic { d1: Box::new(d1), d2: Box::new(d2) },
            )?;
            // zone of a 3-sphere: integral of sin^2 is (t - sin t cos t)/2
            let sin2 = |t: f64| (t - sin(t) * cos(t)) / 2.0;
            let r3 = r * r * r;
            let t1_strip = 2.0 * PI * r3 * 2.0 * sin2(margin);
            let mid = sin2(PI - margin) - sin2(margin);
            let t2_strip = 2.0 * PI * r3 * mid * (1.0 - cos(margin));
            Ok(im.with_excluded(vec![
                ExcludedRegion { axis: 0, upper_end: false, margin, measure: t1_strip },
                ExcludedRegion { axis: 0, upper_end: true, margin, measure: t1_strip },
                ExcludedRegion { axis: 1, upper_end: false, margin, measure: t2_strip },
                ExcludedRegion { axis: 1, upper_end: true, margin, measure: t2_strip },
            ]))
        }
        _ => Err(Error::InvalidParameter(String::from("sphere fixture supports m = 2 or 3"))),
    }
}

/// Triaxial ellipsoid with semi-axes (a, b, c), poles on the first axis.
pub fn make_ellipsoid(a: f64, b: f64, c: f64, margin: f64) -> Result<Immersion> {
    check_margin(margin)?;
    let lo = a.min(b).min(c);
    let hi = a.max(b).max(c);
    if !(lo > 0.0) || hi / lo > 4.0 {
        return Err(Error::InvalidParameter(String::from(
            "ellipsoid semi-axes must be positive with ratio at most 4",
        )));
    }
    let space = SpaceForm::euclidean(3)?;
    let chart = move |u: &[f64]| {
        let (t, p) = (u[0], u[1]);
        Vn::from_slice(&[a * cos(t), b * sin(t) * cos(p), c * sin(t) * sin(p)])
    };
    let d1 = move |u: &[f64], ax: usize| {
        let (t, p) = (u[0], u[1]);
        if ax == 0 {
            Vn::from_slice(&[-a * sin(t), b * cos(t) * cos(p), c * cos(t) * sin(p)])
        } else {
            Vn::from_slice(&[0.0, -b * sin(t) * sin(p), c * sin(t) * cos(p)])
        }
    };
    let d2 = move |u: &[f64], ax: usize, bx: usize| {
        let (t, p) = (u[0], u[1]);
        match (ax, bx) {
            (0, 0) => Vn::from_slice(&[-a * cos(t), -b * sin(t) * cos(p), -c * sin(t) * sin(p)]),
            (1, 1) => Vn::from_slice(&[0.0, -b * sin(t) * cos(p), -c * sin(t) * sin(p)]),
            _ => Vn::from_slice(&[0.0, -b * cos(t) * sin(p), c * cos(t) * cos(p)]),
        }
    };
    let im = Immersion::new(
        space,
        2,
        vec![[0.0, PI], [0.0, 2.0 * PI]],
        vec![false, true],
        true,
        "ellipsoid",
        Box::new(chart),
        Jets::Analytic { d1: Box::new(d1), d2: Box::new(d2) },
    )?;
    attach_numeric_strips(im, margin)
}

/// Distance sphere of radius `a` in a curved space form (ambient dim 3).
pub fn make_geodesic_sphere(space: &SpaceForm, a: f64, margin: f64) -> Result<Immersion> {
    check_margin(margin)?;
    if space.dim_ambient != 3 {
        return Err(Error::InvalidParameter(String::from(
            "geodesic sphere fixture needs a 3-dimensional ambient space",
        )));
    }
    let s = sqrt(crate::math::abs(space.kappa));
    let (radial, tangential) = match space.kind {
        SpaceFormKind::Sphere => {
            if !(a > 0.0 && a < PI / s - 1e-9) {
                return Err(Error::InvalidParameter(String::from(
                    "geodesic sphere radius must lie in (0, pi / sqrt(kappa))",
                )));
            }
            (cos(s * a) / s, sin(s * a) / s)
        }
        SpaceFormKind::Hyperbolic => {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(String::from(
                    "geodesic sphere radius must be positive",
                )));
            }
            (cosh(s * a) / s, sinh(s * a) / s)
        }
        SpaceFormKind::Euclidean => {
            return Err(Error::InvalidParameter(String::from(
                "use the sphere fixture in euclidean space",
            )));
        }
    };
    let chart = move |u: &[f64]| {
        let (t, p) = (u[0], u[1]);
        Vn::from_slice(&[radial, tangential * cos(t), tangential * sin(t) * cos(p), tangential
            * sin(t)
            * sin(p)])
    };
    let d1 = move |u: &[f64], ax: usize| {
        let (t, p) = (u[0], u[1]);
        if ax == 0 {
            Vn::from_slice(&[0.0, -tangential * sin(t), tangential * cos(t) * cos(p), tangential
                * cos(t)
                * sin(p)])
        } else {
            Vn::from_slice(&[0.0, 0.0, -tangential * sin(t) * sin(p), tangential * sin(t) * cos(p)])
        }
    };
    let d2 = move |u: &[f64], ax: usize, bx: usize| {
        let (t, p) = (u[0], u[1]);
        match (ax, bx) {
            (0, 0) => Vn::from_slice(&[
                0.0,
                -tangential * cos(t),
                -tangential * sin(t) * cos(p),
                -tangential * sin(t) * sin(p),
            ]),
            (1, 1) => Vn::from_slice(&[
                0.0,
                0.0,
                -tangential * sin(t) * cos(p),
                -tangential * sin(t) * sin(p),
            ]),
            _ => Vn::from_slice(&[
                0.0,
                0.0,
                -tangential * cos(t) * sin(p),
                tangential * cos(t) * cos(p),
            ]),
        }
    };
    let im = Immersion::new(
        *space,
        2,
        vec![[0.0, PI], [0.0, 2.0 * PI]],
        vec![false, true],
        true,
        "geodesic-sphere",
        Box::new(chart),
        Jets::Analytic { d1: Box::new(d1), d2: Box::new(d2) },
    )?;
    // intrinsically a round 2-sphere of radius `tangential`
    let strip = 2.0 * PI * tangential * tangential * (1.0 - cos(margin));
    Ok(im.with_excluded(vec![
        ExcludedRegion { axis: 0, upper_end: false, margin, measure: strip },
        ExcludedRegion { axis: 0, upper_end: true, margin, measure: strip },
    ]))
}

const GRAPH_BASIS: usize = 8;

fn graph_basis(n: &[f64; 3]) -> [f64; GRAPH_BASIS] {
    [
        n[0],
        n[1],
        n[2],
        n[0] * n[1],
        n[0] * n[2],
        n[1] * n[2],
        n[0] * n[0] - n[2] * n[2],
        n[0] * n[1] * n[2],
    ]
}

/// Graph r = 1 + eps sum_k coeffs[k] q_k(direction) over the unit sphere.
pub fn make_radial_graph(coeffs: &[f64], eps: f64, margin: f64) -> Result<Immersion> {
    check_margin(margin)?;
    if coeffs.is_empty() || coeffs.len() > GRAPH_BASIS {
        return Err(Error::InvalidParameter(alloc::format!(
            "radial graph takes 1..={GRAPH_BASIS} coefficients"
        )));
    }
    if !(eps >= 0.0 && eps <= 0.2) {
        return Err(Error::InvalidParameter(String::from(
            "radial graph amplitude must lie in [0, 0.2]",
        )));
    }
    let mut cf = [0.0; GRAPH_BASIS];
    cf[..coeffs.len()].copy_from_slice(coeffs);
    let chart = move |u: &[f64]| {
        let (t, p) = (u[0], u[1]);
        let n = [cos(t), sin(t) * cos(p), sin(t) * sin(p)];
        let q = graph_basis(&n);
        let mut r = 1.0;
        for k in 0..GRAPH_BASIS {
            r += eps * cf[k] * q[k];
        }
        Vn::from_slice(&[r * n[0], r * n[1], r * n[2]])
    };
    let im = Immersion::new(
        SpaceForm::euclidean(3)?,
        2,
        vec![[0.0, PI], [0.0, 2.0 * PI]],
        vec![false, true],
        true,
        "radial-graph",
        Box::new(chart),
        Jets::FiniteDifference { rel_step: 1e-5 },
    )?;
    attach_numeric_strips(im, margin)
}

/// Draw radial graphs until one is strictly convex (all S2 > 0, S1 > 0 on a
/// probe lattice). Deterministic in `seed`.
pub fn make_convex_graph(eps: f64, n_terms: usize, seed: u64, margin: f64) -> Result<Immersion> {
    if !(eps > 0.0 && eps <= 0.05) {
        return Err(Error::InvalidParameter(String::from(
            "convex graph amplitude must lie in (0, 0.05]",
        )));
    }
    if n_terms == 0 || n_terms > GRAPH_BASIS {
        return Err(Error::InvalidParameter(alloc::format!(
            "convex graph takes 1..={GRAPH_BASIS} terms"
        )));
    }
    let mut rng = XorShift64::new(seed);
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..n_terms).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let im = make_radial_graph(&coeffs, eps, margin)?;
        let mut convex = true;
        'probe: for i in 0..17 {
            for j in 0..17 {
                let t = margin + (PI - 2.0 * margin) * (i as f64 + 0.5) / 17.0;
                let p = 2.0 * PI * (j as f64 + 0.5) / 17.0;
                let fr = im.curvature_frame(&[t, p])?;
                if !(fr.s2 > 0.0 && fr.s1 > 0.0) {
                    convex = false;
                    break 'probe;
                }
            }
        }
        if convex {
            let mut im = im;
            im.name = String::from("convex-graph");
            return Ok(im);
        }
    }
    Err(Error::Precondition(String::from(
        "no strictly convex graph found in 20 draws; lower the amplitude",
    )))
}

/// Torus of revolution: major radius `big_r`, tube radius `small_r`.
pub fn make_torus(big_r: f64, small_r: f64) -> Result<Immersion> {
    if !(small_r > 0.0 && small_r < big_r) {
        return Err(Error::InvalidParameter(String::from(
            "torus needs 0 < tube radius < major radius",
        )));
    }
    let chart = move |u: &[f64]| {
        let (t, p) = (u[0], u[1]);
        let w = big_r + small_r * cos(t);
        Vn::from_slice(&[w * cos(p), w * sin(p), small_r * sin(t)])
    };
    let d1 = move |u: &[f64], ax: usize| {
        let (t, p) = (u[0], u[1]);
        if ax == 0 {
            Vn::from_slice(&[-small_r * sin(t) * cos(p), -small_r * sin(t) * sin(p), small_r
                * cos(t)])
        } else {
            let w = big_r + small_r * cos(t);
            Vn::from_slice(&[-w * sin(p), w * cos(p), 0.0])
        }
    };
    let d2 = move |u: &[f64], ax: usize, bx: usize| {
        let (t, p) = (u[0], u[1]);
        match (ax, bx) {
            (0, 0) => Vn::from_slice(&[
                -small_r * cos(t) * cos(p),
                -small_r * cos(t) * sin(p),
                -small_r * sin(t),
            ]),
            (1, 1) => {
                let w = big_r + small_r * cos(t);
                Vn::from_slice(&[-w * cos(p), -w * sin(p), 0.0])
            }
            _ => Vn::from_slice(&[small_r * sin(t) * sin(p), -small_r * sin(t) * cos(p), 0.0]),
        }
    };
    Immersion::new(
        SpaceForm::euclidean(3)?,
        2,
        vec![[0.0, 2.0 * PI], [0.0, 2.0 * PI]],
        vec![true, true],
        true,
        "torus",
        Box::new(chart),
        Jets::Analytic { d1: Box::new(d1), d2: Box::new(d2) },
    )
}

/// Pole strip measures by dense one-off quadrature, for charts without a
/// closed form. m = 2 polar charts only.
fn attach_numeric_strips(im: Immersion, margin: f64) -> Result<Immersion> {
    let lower = strip_measure(&im, false, margin)?;
    let upper = strip_measure(&im, true, margin)?;
    Ok(im.with_excluded(vec![
        ExcludedRegion { axis: 0, upper_end: false, margin, measure: lower },
        ExcludedRegion { axis: 0, upper_end: true, margin, measure: upper },
    ]))
}

fn strip_measure(im: &Immersion, upper: bool, margin: f64) -> Result<f64> {
    let [lo, hi] = im.rect[0];
    // skip the degenerate pole line itself; the hole is O(margin^3 * 1e-12)
    let (a, b) = if upper { (hi - margin, hi - margin * 1e-6) } else { (lo + margin * 1e-6, lo + margin) };
    let nt = 256;
    let np = 256;
    let ht = (b - a) / nt as f64;
    let hp = im.extent(1) / np as f64;
    let mut total = 0.0;
    for i in 0..=nt {
        let wt = if i == 0 || i == nt {
            ht / 3.0
        } else if i % 2 == 1 {
            4.0 * ht / 3.0
        } else {
            2.0 * ht / 3.0
        };
        let t = a + ht * i as f64;
        for j in 0..np {
            let p = im.rect[1][0] + hp * j as f64;
            let (_, d1, _) = im.jet(&[t, p])?;
            let mut g = Mn::zeros(2);
            for r in 0..2 {
                for c in 0..2 {
                    g.set(r, c, im.space.inner_raw(&d1[r], &d1[c]));
                }
            }
            total += wt * hp * sqrt(g.det().max(0.0));
        }
    }
    Ok(total)
}
