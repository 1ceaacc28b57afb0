//! Parametric hypersurfaces and the pointwise curvature pipeline.
//!
//! A chart maps a rectangle in R^m to raw model coordinates. From first and
//! second chart derivatives we assemble the first and second fundamental
//! forms, diagonalize the shape operator through the symmetric similarity
//! g^{-1/2} b g^{-1/2}, and read off every curvature scalar the checkers
//! need. The second fundamental form uses b_ij = <eta, d2 X> in the model
//! metric, which is exact for space forms because the model normal component
//! of d2 X is killed by the tangency of eta.

use crate::ambient::{AmbientPoint, AmbientVector, SpaceForm, SpaceFormKind};
use crate::linalg::{cross_general, Mn, Vn};
use crate::math::sqrt;
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub const MAX_M: usize = 4;

pub type ChartFn = dyn Fn(&[f64]) -> Vn + Send + Sync;
pub type Jet1Fn = dyn Fn(&[f64], usize) -> Vn + Send + Sync;
pub type Jet2Fn = dyn Fn(&[f64], usize, usize) -> Vn + Send + Sync;

pub enum Jets {
    Analytic { d1: Box<Jet1Fn>, d2: Box<Jet2Fn> },
    /// Centered stencils with step `rel_step` times the axis extent.
    FiniteDifference { rel_step: f64 },
}

/// Closed strip dropped near a chart edge, with its exact surface measure.
/// Quadrature adds `measure` times a slab average back in.
#[derive(Clone, Copy, Debug)]
pub struct ExcludedRegion {
    pub axis: usize,
    pub upper_end: bool,
    /// Width of the clipped strip in chart coordinates.
    pub margin: f64,
    /// Exact surface measure of the clipped strip.
    pub measure: f64,
}

pub struct Immersion {
    pub space: SpaceForm,
    pub m: usize,
    /// Parameter rectangle, one [lo, hi] per chart axis.
    pub rect: Vec<[f64; 2]>,
    pub periodic: Vec<bool>,
    /// True when the chart covers a closed hypersurface.
    pub closed: bool,
    pub name: String,
    pub normal_sign: f64,
    pub excluded: Vec<ExcludedRegion>,
    chart: Box<ChartFn>,
    jets: Jets,
}

#[derive(Clone, Copy, Debug)]
pub struct CurvatureFrame {
    pub m: usize,
    pub u: [f64; MAX_M],
    pub point: AmbientPoint,
    /// Chart partials, tangent to the model at `point`.
    pub d1: [Vn; MAX_M],
    pub eta: AmbientVector,
    pub g: Mn,
    pub g_inv: Mn,
    pub g_inv_sqrt: Mn,
    pub b: Mn,
    /// Shape operator in the chart basis, g^{-1} b.
    pub shape: Mn,
    /// Principal curvatures, ascending.
    pub k: [f64; MAX_M],
    /// theta_i = S1 - k_i, the eigenvalues of the first Newton transform.
    pub theta: [f64; MAX_M],
    pub s1: f64,
    pub s2: f64,
    pub norm_a_sq: f64,
    pub h: f64,
    /// Normalized scalar curvature: kappa + 2 S2 / (m (m-1)).
    pub r_scalar: f64,
    pub area_density: f64,
}

const COND_LIMIT: f64 = 1e8;

impl Immersion {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        space: SpaceForm,
        m: usize,
        rect: Vec<[f64; 2]>,
        periodic: Vec<bool>,
        closed: bool,
        name: &str,
        chart: Box<ChartFn>,
        jets: Jets,
    ) -> Result<Self> {
        if m < 2 || m > MAX_M || m + 1 != space.dim_ambient {
            return Err(Error::InvalidParameter(alloc::format!(
                "chart dimension {m} incompatible with ambient dimension {}",
                space.dim_ambient
            )));
        }
        if rect.len() != m || periodic.len() != m {
            return Err(Error::InvalidParameter(String::from(
                "rect/periodic length must equal chart dimension",
            )));
        }
        for r in &rect {
            if !(r[1] > r[0]) {
                return Err(Error::InvalidParameter(String::from("empty chart axis")));
            }
        }
        let mut im = Self {
            space,
            m,
            rect,
            periodic,
            closed,
            name: String::from(name),
            normal_sign: 1.0,
            excluded: Vec::new(),
            chart,
            jets,
        };
        im.orient()?;
        Ok(im)
    }

    pub fn with_excluded(mut self, excluded: Vec<ExcludedRegion>) -> Self {
        self.excluded = excluded;
        self
    }

    /// Flip the normal so the mean of S1 over a coarse probe grid is >= 0.
    fn orient(&mut self) -> Result<()> {
        const FRACS: [f64; 5] = [0.13, 0.31, 0.5, 0.69, 0.87];
        let mut u = [0.0; MAX_M];
        let mut idx = [0usize; MAX_M];
        let mut total = 0.0;
        loop {
            for a in 0..self.m {
                let [lo, hi] = self.rect[a];
                u[a] = lo + (hi - lo) * FRACS[idx[a]];
            }
            total += self.curvature_frame(&u[..self.m])?.s1;
            // odometer over the probe lattice
            let mut a = 0;
            loop {
                if a == self.m {
                    if total < 0.0 {
                        self.normal_sign = -1.0;
                    }
                    return Ok(());
                }
                idx[a] += 1;
                if idx[a] < FRACS.len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    pub fn chart_point(&self, u: &[f64]) -> Result<AmbientPoint> {
        let raw = (self.chart)(u);
        if !raw.is_finite() {
            return Err(Error::Evaluation(alloc::format!("chart not finite at {u:?}")));
        }
        Ok(AmbientPoint { c: self.space.project_point_raw(&raw)? })
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.rect[axis][1] - self.rect[axis][0]
    }

    pub(crate) fn jet(&self, u: &[f64]) -> Result<(Vn, [Vn; MAX_M], [[Vn; MAX_M]; MAX_M])> {
        let p = (self.chart)(u);
        let zero = Vn::zeros(self.space.model_dim());
        let mut d1 = [zero; MAX_M];
        let mut d2 = [[zero; MAX_M]; MAX_M];
        match &self.jets {
            Jets::Analytic { d1: j1, d2: j2 } => {
                for a in 0..self.m {
                    d1[a] = j1(u, a);
                    for b in a..self.m {
                        let v = j2(u, a, b);
                        d2[a][b] = v;
                        d2[b][a] = v;
                    }
                }
            }
            Jets::FiniteDifference { rel_step } => {
                let proj = |q: &[f64]| -> Result<Vn> {
                    self.space.project_point_raw(&(self.chart)(q))
                };
                let mut uu = [0.0; MAX_M];
                uu[..self.m].copy_from_slice(u);
                let h: [f64; MAX_M] =
                    core::array::from_fn(|a| if a < self.m { rel_step * self.extent(a) } else { 0.0 });
                let base = proj(u)?;
                for a in 0..self.m {
                    let mut up = uu;
                    up[a] += h[a];
                    let mut dn = uu;
                    dn[a] -= h[a];
                    let xp = proj(&up[..self.m])?;
                    let xm = proj(&dn[..self.m])?;
                    d1[a] = xp.sub(&xm).scale(0.5 / h[a]);
                    d2[a][a] = xp.add(&xm).sub(&base.scale(2.0)).scale(1.0 / (h[a] * h[a]));
                }
                for a in 0..self.m {
                    for b in a + 1..self.m {
                        let mut pp = uu;
                        pp[a] += h[a];
                        pp[b] += h[b];
                        let mut pm = uu;
                        pm[a] += h[a];
                        pm[b] -= h[b];
                        let mut mp = uu;
                        mp[a] -= h[a];
                        mp[b] += h[b];
                        let mut mm = uu;
                        mm[a] -= h[a];
                        mm[b] -= h[b];
                        let v = proj(&pp[..self.m])?
                            .sub(&proj(&pm[..self.m])?)
                            .sub(&proj(&mp[..self.m])?)
                            .add(&proj(&mm[..self.m])?)
                            .scale(0.25 / (h[a] * h[b]));
                        d2[a][b] = v;
                        d2[b][a] = v;
                    }
                }
            }
        }
        if !p.is_finite() {
            return Err(Error::Evaluation(alloc::format!("chart not finite at {u:?}")));
        }
        Ok((p, d1, d2))
    }

    pub fn curvature_frame(&self, u: &[f64]) -> Result<CurvatureFrame> {
        if u.len() != self.m {
            return Err(Error::InvalidParameter(String::from("wrong chart coordinate count")));
        }
        let space = &self.space;
        let (p_raw, mut d1, d2) = self.jet(u)?;
        let p = AmbientPoint { c: space.project_point_raw(&p_raw)? };
        // keep chart partials exactly model-tangent
        for a in 0..self.m {
            if !d1[a].is_finite() {
                return Err(Error::Evaluation(alloc::format!("jet not finite at {u:?}")));
            }
            d1[a] = space.project_tangent_raw(&p.c, &d1[a]);
        }

        let m = self.m;
        let mut g = Mn::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = space.inner_raw(&d1[i], &d1[j]);
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        let (gev, gq) = g.sym_eigen();
        let lmin = gev.a[0];
        let lmax = gev.a[m - 1];
        if !(lmin > 0.0) || !lmax.is_finite() {
            return Err(Error::DegenerateImmersion { cond: f64::INFINITY });
        }
        let cond = lmax / lmin;
        if cond > COND_LIMIT {
            return Err(Error::DegenerateImmersion { cond });
        }
        let mut area_density = 1.0;
        for i in 0..m {
            area_density *= gev.a[i];
        }
        area_density = sqrt(area_density);
        let from_eigen = |f: &dyn Fn(f64) -> f64| {
            let mut d = Mn::zeros(m);
            for i in 0..m {
                d.set(i, i, f(gev.a[i]));
            }
            gq.matmul(&d).matmul(&gq.transpose())
        };
        let g_inv = from_eigen(&|l| 1.0 / l);
        let g_inv_sqrt = from_eigen(&|l| 1.0 / sqrt(l));

        // normal: orthogonal to the tangent plane in the model metric
        let md = space.model_dim();
        let mut rows: Vec<Vn> = Vec::with_capacity(md - 1);
        let flip = |v: &Vn| -> Vn {
            let mut w = *v;
            if space.kind == SpaceFormKind::Hyperbolic {
                w.a[0] = -w.a[0];
            }
            w
        };
        if space.kind != SpaceFormKind::Euclidean {
            rows.push(flip(&p.c));
        }
        for a in 0..m {
            rows.push(flip(&d1[a]));
        }
        let raw_eta = cross_general(&rows);
        let eta_q = space.inner_raw(&raw_eta, &raw_eta);
        if !(eta_q > 1e-300) {
            return Err(Error::DegenerateImmersion { cond });
        }
        let eta_v = raw_eta.scale(self.normal_sign / sqrt(eta_q));
        let eta = AmbientVector { base: p.c, v: eta_v };

        let mut b = Mn::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = space.inner_raw(&eta_v, &d2[i][j]);
                b.set(i, j, v);
                b.set(j, i, v);
            }
        }
        let shape = g_inv.matmul(&b);
        // similar symmetric matrix shares the shape operator spectrum
        let c = g_inv_sqrt.matmul(&b).matmul(&g_inv_sqrt);
        let (kev, _) = c.sym_eigen();
        let mut k = [0.0; MAX_M];
        let mut s1 = 0.0;
        let mut norm_a_sq = 0.0;
        for i in 0..m {
            k[i] = kev.a[i];
            s1 += k[i];
            norm_a_sq += k[i] * k[i];
        }
        let s2 = 0.5 * (s1 * s1 - norm_a_sq);
        let mut theta = [0.0; MAX_M];
        for i in 0..m {
            theta[i] = s1 - k[i];
        }
        let mf = m as f64;
        let h = s1 / mf;
        let r_scalar = space.kappa + 2.0 * s2 / (mf * (mf - 1.0));

        let mut uu = [0.0; MAX_M];
        uu[..m].copy_from_slice(u);
        Ok(CurvatureFrame {
            m,
            u: uu,
            point: p,
            d1,
            eta,
            g,
            g_inv,
            g_inv_sqrt,
            b,
            shape,
            k,
            theta,
            s1,
            s2,
            norm_a_sq,
            h,
            r_scalar,
            area_density,
        })
    }
}

impl CurvatureFrame {
    /// First Newton transform applied to chart components: (S1 I - A) v.
    pub fn newton_apply(&self, v: &[f64]) -> [f64; MAX_M] {
        let mut out = [0.0; MAX_M];
        for i in 0..self.m {
            let mut av = 0.0;
            for j in 0..self.m {
                av += self.shape.get(i, j) * v[j];
            }
            out[i] = self.s1 * v[i] - av;
        }
        out
    }

    /// Chart gradient g^{-1} df from partial derivatives of a function.
    pub fn grad_chart(&self, df: &[f64]) -> [f64; MAX_M] {
        let mut out = [0.0; MAX_M];
        for i in 0..self.m {
            let mut s = 0.0;
            for j in 0..self.m {
                s += self.g_inv.get(i, j) * df[j];
            }
            out[i] = s;
        }
        out
    }

    /// |grad f|_g from chart partials.
    pub fn grad_norm(&self, df: &[f64]) -> f64 {
        let gr = self.grad_chart(df);
        let mut s = 0.0;
        for i in 0..self.m {
            s += gr[i] * df[i];
        }
        sqrt(s.max(0.0))
    }

    /// Push chart components to an ambient tangent vector.
    pub fn to_ambient(&self, v: &[f64]) -> AmbientVector {
        let mut w = Vn::zeros(self.point.c.n);
        for i in 0..self.m {
            w = w.add(&self.d1[i].scale(v[i]));
        }
        AmbientVector { base: self.point.c, v: w }
    }

    /// Chart components of the tangential part of a raw ambient vector.
    pub fn tangential_coords(&self, space: &SpaceForm, w: &Vn) -> Result<[f64; MAX_M]> {
        let mut rhs = Vn::zeros(self.m);
        for i in 0..self.m {
            rhs.a[i] = space.inner_raw(w, &self.d1[i]);
        }
        let c = self.g.solve(&rhs)?;
        let mut out = [0.0; MAX_M];
        out[..self.m].copy_from_slice(&c.a[..self.m]);
        Ok(out)
    }

    /// <u, v>_g on chart components.
    pub fn metric_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                s += u[i] * self.g.get(i, j) * v[j];
            }
        }
        s
    }
}

/// Trace of E -> P1((D_E X)^T) over an orthonormal tangent frame, where X is
/// the comparison radial field centered at x0 and D its ambient derivative.
pub fn p1_trace_term(
    m: &Immersion,
    frame: &CurvatureFrame,
    x0: &AmbientPoint,
) -> Result<f64> {
    p1_trace_term_with(&m.space, frame, &|e| {
        crate::ambient::radial_field_derivative(&m.space, x0, &frame.point, e)
    })
}

/// Same trace for an arbitrary field derivative E -> D_E X.
pub fn p1_trace_term_with(
    space: &SpaceForm,
    frame: &CurvatureFrame,
    dfield: &dyn Fn(&AmbientVector) -> Result<AmbientVector>,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..frame.m {
        let mut e_chart = [0.0; MAX_M];
        for j in 0..frame.m {
            e_chart[j] = frame.g_inv_sqrt.get(j, i);
        }
        let e_amb = frame.to_ambient(&e_chart);
        let d = dfield(&e_amb)?;
        let dt = frame.tangential_coords(space, &d.v)?;
        let p1 = frame.newton_apply(&dt);
        total += frame.metric_inner(&p1, &e_chart);
    }
    Ok(total)
}
