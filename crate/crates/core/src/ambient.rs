//! The three simply connected space forms and their distance calculus.
//!
//! Models: flat R^{m+1}; the round sphere <x,x> = 1/kappa in R^{m+2}; the
//! upper hyperboloid sheet <x,x>_L = 1/kappa (x_0 > 0) in Minkowski space
//! with signature (-,+,...,+). All formulas below act on raw model
//! coordinates through the model metric, which keeps tangency and normal
//! computations exact instead of chart-dependent.

use crate::linalg::Vn;
use crate::math::{abs, acos, acosh, cos, cosh, sin, sinh, sqrt, tan, PI};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceFormKind {
    Euclidean,
    Sphere,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceForm {
    pub kind: SpaceFormKind,
    /// Sectional curvature; 0 for Euclidean, > 0 sphere, < 0 hyperbolic.
    pub kappa: f64,
    /// Dimension m+1 of the space form itself.
    pub dim_ambient: usize,
}

/// Point on the model, raw coordinates validated at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientPoint {
    pub c: Vn,
}

/// Tangent vector to the model at `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientVector {
    pub base: Vn,
    pub v: Vn,
}

const ON_MODEL_TOL: f64 = 1e-9;

impl SpaceForm {
    pub fn euclidean(dim_ambient: usize) -> Result<Self> {
        Self::check_dim(dim_ambient, dim_ambient)?;
        Ok(Self { kind: SpaceFormKind::Euclidean, kappa: 0.0, dim_ambient })
    }

    pub fn sphere(kappa: f64, dim_ambient: usize) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "sphere curvature must be positive, got {kappa}"
            )));
        }
        Self::check_dim(dim_ambient, dim_ambient + 1)?;
        Ok(Self { kind: SpaceFormKind::Sphere, kappa, dim_ambient })
    }

    pub fn hyperbolic(kappa: f64, dim_ambient: usize) -> Result<Self> {
        if !(kappa < 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "hyperbolic curvature must be negative, got {kappa}"
            )));
        }
        Self::check_dim(dim_ambient, dim_ambient + 1)?;
        Ok(Self { kind: SpaceFormKind::Hyperbolic, kappa, dim_ambient })
    }

    fn check_dim(dim_ambient: usize, model: usize) -> Result<()> {
        if dim_ambient < 3 || model > crate::linalg::MAX_N {
            return Err(Error::InvalidParameter(alloc::format!(
                "ambient dimension {dim_ambient} out of range"
            )));
        }
        Ok(())
    }

    /// Number of raw model coordinates.
    pub fn model_dim(&self) -> usize {
        match self.kind {
            SpaceFormKind::Euclidean => self.dim_ambient,
            _ => self.dim_ambient + 1,
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match self.kind {
            SpaceFormKind::Sphere => PI / sqrt(self.kappa),
            _ => f64::INFINITY,
        }
    }

    /// Model metric on raw coordinate vectors.
    #[inline]
    pub fn inner_raw(&self, a: &Vn, b: &Vn) -> f64 {
        let mut s = a.dot(b);
        if self.kind == SpaceFormKind::Hyperbolic {
            s -= 2.0 * a.a[0] * b.a[0];
        }
        s
    }

    pub fn inner(&self, a: &AmbientVector, b: &AmbientVector) -> Result<f64> {
        self.same_base(a, b)?;
        Ok(self.inner_raw(&a.v, &b.v))
    }

    fn same_base(&self, a: &AmbientVector, b: &AmbientVector) -> Result<()> {
        let scale = 1.0 + a.base.norm().max(b.base.norm());
        if a.base.sub(&b.base).norm() > 1e-9 * scale {
            return Err(Error::MismatchedBase);
        }
        Ok(())
    }

    /// Pull raw coordinates back onto the model (radial projection).
    pub fn project_point_raw(&self, x: &Vn) -> Result<Vn> {
        if !x.is_finite() {
            return Err(Error::OffModel(f64::NAN));
        }
        match self.kind {
            SpaceFormKind::Euclidean => Ok(*x),
            SpaceFormKind::Sphere => {
                let r2 = x.dot(x);
                if r2 < 1e-12 {
                    return Err(Error::OffModel(1.0));
                }
                Ok(x.scale(1.0 / (sqrt(r2) * sqrt(self.kappa))))
            }
            SpaceFormKind::Hyperbolic => {
                let q = self.inner_raw(x, x);
                if !(q < 0.0) || x.a[0] <= 0.0 {
                    return Err(Error::OffModel(q));
                }
                // scale so <x,x>_L = 1/kappa on the upper sheet
                Ok(x.scale(1.0 / sqrt(q * self.kappa)))
            }
        }
    }

    fn model_deviation(&self, x: &Vn) -> f64 {
        match self.kind {
            SpaceFormKind::Euclidean => 0.0,
            _ => abs(self.inner_raw(x, x) * self.kappa - 1.0),
        }
    }

    /// Validated point from raw coordinates; small drift is reprojected.
    pub fn point(&self, coords: &[f64]) -> Result<AmbientPoint> {
        if coords.len() != self.model_dim() {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {} coordinates, got {}",
                self.model_dim(),
                coords.len()
            )));
        }
        let x = Vn::from_slice(coords);
        let dev = self.model_deviation(&x);
        if dev > ON_MODEL_TOL {
            return Err(Error::OffModel(dev));
        }
        Ok(AmbientPoint { c: self.project_point_raw(&x)? })
    }

    /// Remove the model-normal component of `v` at `x`.
    #[inline]
    pub fn project_tangent_raw(&self, x: &Vn, v: &Vn) -> Vn {
        match self.kind {
            SpaceFormKind::Euclidean => *v,
            // position is model-normal with <x,x> = 1/kappa in both cases
            _ => v.sub(&x.scale(self.kappa * self.inner_raw(v, x))),
        }
    }

    pub fn tangent_at(&self, p: &AmbientPoint, v: &[f64]) -> Result<AmbientVector> {
        if v.len() != self.model_dim() {
            return Err(Error::InvalidParameter(alloc::string::String::from(
                "tangent coordinate count mismatch",
            )));
        }
        let raw = Vn::from_slice(v);
        if !raw.is_finite() {
            return Err(Error::Evaluation(alloc::string::String::from("non-finite tangent")));
        }
        let t = self.project_tangent_raw(&p.c, &raw);
        let drift = t.sub(&raw).norm();
        if drift > ON_MODEL_TOL * (1.0 + raw.norm()) {
            return Err(Error::OffModel(drift));
        }
        Ok(AmbientVector { base: p.c, v: t })
    }

    /// Unit-normalize a raw tangent vector in the model metric.
    pub fn normalize_raw(&self, v: &Vn) -> Result<Vn> {
        let q = self.inner_raw(v, v);
        if !(q > 1e-300) {
            return Err(Error::Evaluation(alloc::string::String::from(
                "cannot normalize null vector",
            )));
        }
        Ok(v.scale(1.0 / sqrt(q)))
    }
}

pub fn geodesic_distance(space: &SpaceForm, a: &AmbientPoint, b: &AmbientPoint) -> Result<f64> {
    match space.kind {
        SpaceFormKind::Euclidean => Ok(a.c.sub(&b.c).norm()),
        SpaceFormKind::Sphere => {
            let c = (space.kappa * a.c.dot(&b.c)).clamp(-1.0, 1.0);
            Ok(acos(c) / sqrt(space.kappa))
        }
        SpaceFormKind::Hyperbolic => {
            let c = space.kappa * space.inner_raw(&a.c, &b.c);
            Ok(acosh(c.max(1.0)) / sqrt(-space.kappa))
        }
    }
}

/// Unit gradient of rho(x) = d(x0, x) at `x`, as a model tangent vector.
pub fn grad_distance(
    space: &SpaceForm,
    x0: &AmbientPoint,
    x: &AmbientPoint,
) -> Result<AmbientVector> {
    let rho = geodesic_distance(space, x0, x)?;
    if rho < 1e-14 {
        return Err(Error::SingularGradient(rho));
    }
    if space.kind == SpaceFormKind::Sphere && rho > PI / sqrt(space.kappa) - 1e-8 {
        return Err(Error::SingularGradient(rho));
    }
    let dir = match space.kind {
        SpaceFormKind::Euclidean => x.c.sub(&x0.c).scale(1.0 / rho),
        // component of -x0 tangent at x points away from x0
        _ => {
            let t = space.project_tangent_raw(&x.c, &x0.c.scale(-1.0));
            space.normalize_raw(&t)?
        }
    };
    Ok(AmbientVector { base: x.c, v: dir })
}

/// Comparison pair (G, G') used by the radial vector field:
/// G = rho, sin(sqrt(k) rho)/sqrt(k), sinh(sqrt(-k) rho)/sqrt(-k).
pub fn comparison_g(space: &SpaceForm, rho: f64) -> (f64, f64) {
    match space.kind {
        SpaceFormKind::Euclidean => (rho, 1.0),
        SpaceFormKind::Sphere => {
            let sk = sqrt(space.kappa);
            (sin(sk * rho) / sk, cos(sk * rho))
        }
        SpaceFormKind::Hyperbolic => {
            let sk = sqrt(-space.kappa);
            (sinh(sk * rho) / sk, cosh(sk * rho))
        }
    }
}

/// Ratio h(rho) with Hess rho = h (g - d rho x d rho): 1/rho, sqrt(k) cot,
/// sqrt(-k) coth. Exact for space forms, not a comparison bound.
pub fn hessian_ratio(space: &SpaceForm, rho: f64) -> f64 {
    match space.kind {
        SpaceFormKind::Euclidean => 1.0 / rho,
        SpaceFormKind::Sphere => {
            let sk = sqrt(space.kappa);
            sk / tan(sk * rho)
        }
        SpaceFormKind::Hyperbolic => {
            let sk = sqrt(-space.kappa);
            sk * cosh(sk * rho) / sinh(sk * rho)
        }
    }
}

/// X = G(rho) grad rho at `x`, the radial position field centered at x0.
pub fn radial_field(
    space: &SpaceForm,
    x0: &AmbientPoint,
    x: &AmbientPoint,
) -> Result<AmbientVector> {
    let rho = geodesic_distance(space, x0, x)?;
    if rho < 1e-14 {
        return Ok(AmbientVector { base: x.c, v: Vn::zeros(space.model_dim()) });
    }
    let g = grad_distance(space, x0, x)?;
    let (big_g, _) = comparison_g(space, rho);
    Ok(AmbientVector { base: x.c, v: g.v.scale(big_g) })
}

/// Covariant derivative of the radial field along `u`:
/// G' <u, dr> dr + G h (u - <u, dr> dr). Returns `u` in the rho -> 0 limit.
pub fn radial_field_derivative(
    space: &SpaceForm,
    x0: &AmbientPoint,
    x: &AmbientPoint,
    u: &AmbientVector,
) -> Result<AmbientVector> {
    let scale = 1.0 + x.c.norm();
    if u.base.sub(&x.c).norm() > 1e-9 * scale {
        return Err(Error::MismatchedBase);
    }
    let rho = geodesic_distance(space, x0, x)?;
    // acos/acosh roundoff puts coincident points at rho ~ 1.5e-8
    if rho < 1e-7 {
        return Ok(*u);
    }
    let gr = grad_distance(space, x0, x)?;
    let (big_g, gp) = comparison_g(space, rho);
    let h = hessian_ratio(space, rho);
    let c = space.inner_raw(&u.v, &gr.v);
    let radial = gr.v.scale(gp * c);
    let ortho = u.v.sub(&gr.v.scale(c)).scale(big_g * h);
    Ok(AmbientVector { base: x.c, v: radial.add(&ortho) })
}

/// Hess rho (y, y) at `x` for the distance from x0, exact in space forms.
pub fn hessian_distance_quadform(
    space: &SpaceForm,
    x0: &AmbientPoint,
    x: &AmbientPoint,
    y: &AmbientVector,
) -> Result<f64> {
    let rho = geodesic_distance(space, x0, x)?;
    if rho < 1e-14 {
        return Err(Error::SingularGradient(rho));
    }
    let gr = grad_distance(space, x0, x)?;
    space.same_base(&gr, y)?;
    let h = hessian_ratio(space, rho);
    let c = space.inner_raw(&y.v, &gr.v);
    Ok(h * (space.inner_raw(&y.v, &y.v) - c * c))
}

/// Ambient Ricci tensor: ric(V, W) = m kappa <V, W> with m = dim - 1.
pub fn ricci(space: &SpaceForm, v: &AmbientVector, w: &AmbientVector) -> Result<f64> {
    let m = (space.dim_ambient - 1) as f64;
    Ok(m * space.kappa * space.inner(v, w)?)
}

pub fn exp_map(space: &SpaceForm, x: &AmbientPoint, v: &AmbientVector) -> Result<AmbientPoint> {
    let scale = 1.0 + x.c.norm();
    if v.base.sub(&x.c).norm() > 1e-9 * scale {
        return Err(Error::MismatchedBase);
    }
    let len2 = space.inner_raw(&v.v, &v.v);
    if len2 < 0.0 {
        return Err(Error::Evaluation(alloc::string::String::from("timelike step")));
    }
    let len = sqrt(len2);
    match space.kind {
        SpaceFormKind::Euclidean => Ok(AmbientPoint { c: x.c.add(&v.v) }),
        SpaceFormKind::Sphere => {
            if len < 1e-300 {
                return Ok(*x);
            }
            let sk = sqrt(space.kappa);
            let c = x.c.scale(cos(sk * len)).add(&v.v.scale(sin(sk * len) / (sk * len)));
            Ok(AmbientPoint { c: space.project_point_raw(&c)? })
        }
        SpaceFormKind::Hyperbolic => {
            if len < 1e-300 {
                return Ok(*x);
            }
            let sk = sqrt(-space.kappa);
            let c = x.c.scale(cosh(sk * len)).add(&v.v.scale(sinh(sk * len) / (sk * len)));
            Ok(AmbientPoint { c: space.project_point_raw(&c)? })
        }
    }
}

pub fn log_map(space: &SpaceForm, x: &AmbientPoint, y: &AmbientPoint) -> Result<AmbientVector> {
    let rho = geodesic_distance(space, x, y)?;
    if rho < 1e-14 {
        return Ok(AmbientVector { base: x.c, v: Vn::zeros(space.model_dim()) });
    }
    // unit vector at x toward y is minus the gradient of d(y, .)
    let g = grad_distance(space, y, x)?;
    Ok(AmbientVector { base: x.c, v: g.v.scale(-rho) })
}
