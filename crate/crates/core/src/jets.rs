//! Pointwise pseudohermitian invariants of graph surfaces t = u(x, y) in
//! the Heisenberg group: the quantities D, theta, alpha, H, the vanishing-E1
//! residual in its two algebraic forms, the hyperbolicity witness and the
//! dilation-invariant patch integral of the E1 density.

use crate::error::{E1Error, Result};

/// Singularity threshold: jets with D below this are rejected.
pub const D_MIN: f64 = 1e-12;

/// Global sign convention: alpha = -1/D, taken with respect to the
/// horizontal normal built from the defining function psi = t - u.
/// With this choice alpha is negative at every nonsingular point.
pub const ALPHA_SIGN: f64 = -1.0;

/// Overflow guard for the patch-integral density.
const DENSITY_GUARD: f64 = 1e12;

/// Second-order jet of a graph t = u(x, y) at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl SurfaceJet {
    /// D = sqrt((u_x - y)^2 + (u_y + x)^2).
    pub fn d(&self) -> f64 {
        (self.ux - self.y).hypot(self.uy + self.x)
    }

    pub fn is_singular(&self) -> bool {
        self.d() < D_MIN
    }

    fn require_nonsingular(&self) -> Result<f64> {
        let d = self.d();
        if d < D_MIN {
            Err(E1Error::SingularPoint { d, d_min: D_MIN })
        } else {
            Ok(d)
        }
    }
}

/// Pointwise invariants at a nonsingular jet.
#[derive(Debug, Clone, Copy)]
pub struct Invariants {
    pub d: f64,
    /// alpha = -1/D.
    pub alpha: f64,
    /// Angle with cos(theta) = (u_x - y)/D, sin(theta) = (u_y + x)/D,
    /// normalized to [0, 2*pi).
    pub theta: f64,
    /// p-mean curvature.
    pub h: f64,
    /// Projection of e_1 onto the xy-plane: (-sin theta, cos theta).
    pub e1_planar: [f64; 2],
    /// Projection of -(e_2 + alpha^{-1} T): (cos theta, sin theta).
    pub n: [f64; 2],
    /// Projection of -e_1: (sin theta, -cos theta).
    pub n_perp: [f64; 2],
}

/// Wrap an angle into [0, 2*pi).
pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t < 0.0 {
        t += two_pi;
    }
    // The remainder can land exactly on 2*pi after the correction.
    if t >= two_pi {
        t -= two_pi;
    }
    t
}

/// Circular distance between two angles.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = normalize_angle(a - b);
    d.min(two_pi - d)
}

pub fn invariants_from_jet(j: &SurfaceJet) -> Result<Invariants> {
    let d = j.require_nonsingular()?;
    let p = j.ux - j.y; // D cos(theta)
    let q = j.uy + j.x; // D sin(theta)
    let cos_t = p / d;
    let sin_t = q / d;
    let theta = normalize_angle(sin_t.atan2(cos_t));
    // H D^3 = (u_y+x)^2 u_xx - 2 (u_y+x)(u_x-y) u_xy + (u_x-y)^2 u_yy
    let h = (q * q * j.uxx - 2.0 * q * p * j.uxy + p * p * j.uyy) / (d * d * d);
    Ok(Invariants {
        d,
        alpha: ALPHA_SIGN / d,
        theta,
        h,
        e1_planar: [-sin_t, cos_t],
        n: [cos_t, sin_t],
        n_perp: [sin_t, -cos_t],
    })
}

/// First partials of D by the chain rule.
fn d_gradient(j: &SurfaceJet, cos_t: f64, sin_t: f64) -> (f64, f64) {
    let dx = cos_t * j.uxx + sin_t * (j.uxy + 1.0);
    let dy = cos_t * (j.uxy - 1.0) + sin_t * j.uyy;
    (dx, dy)
}

/// Residual of the vanishing-E1 graph equation, evaluated directly from
/// the jet: F = sin(theta) D_x - cos(theta) D_y - (1/6) A^2 - 1/2 with
/// A = Laplacian(u) - cos(theta) D_x - sin(theta) D_y.
pub fn e1_residual_direct(j: &SurfaceJet) -> Result<f64> {
    let d = j.require_nonsingular()?;
    let cos_t = (j.ux - j.y) / d;
    let sin_t = (j.uy + j.x) / d;
    let (dx, dy) = d_gradient(j, cos_t, sin_t);
    let a = j.uxx + j.uyy - cos_t * dx - sin_t * dy;
    Ok(sin_t * dx - cos_t * dy - a * a / 6.0 - 0.5)
}

/// The same residual through the invariants: the A-term is replaced by
/// D^2 H^2 computed from the p-mean curvature.
pub fn e1_residual_theta_form(j: &SurfaceJet) -> Result<f64> {
    let inv = invariants_from_jet(j)?;
    let (cos_t, sin_t) = (inv.theta.cos(), inv.theta.sin());
    let (dx, dy) = d_gradient(j, cos_t, sin_t);
    Ok(sin_t * dx - cos_t * dy - inv.d * inv.d * inv.h * inv.h / 6.0 - 0.5)
}

/// E1 residual; in debug builds both algebraic routes are evaluated and
/// must agree to 1e-12 relative.
pub fn e1_residual(j: &SurfaceJet) -> Result<f64> {
    let direct = e1_residual_direct(j)?;
    #[cfg(debug_assertions)]
    {
        let via_theta = e1_residual_theta_form(j)?;
        let scale = 1.0f64.max(direct.abs()).max(via_theta.abs());
        debug_assert!(
            (direct - via_theta).abs() <= 1e-12 * scale,
            "residual forms disagree: {direct} vs {via_theta}"
        );
    }
    Ok(direct)
}

/// E1 density |e_1(alpha) + alpha^2/2 + H^2/6| at the jet. The residual F
/// equals -D^2 times that combination, so the density is |F|/D^2.
pub fn e1_density(j: &SurfaceJet) -> Result<f64> {
    let d = j.require_nonsingular()?;
    Ok(e1_residual_direct(j)?.abs() / (d * d))
}

/// Partial derivatives of F with respect to the second-order jet entries
/// together with the discriminant F_uxx F_uyy - (1/4) F_uxy^2.
pub fn hyperbolicity_witness(j: &SurfaceJet) -> Result<(f64, f64, f64, f64)> {
    let inv = invariants_from_jet(j)?;
    let (cos_t, sin_t) = (inv.theta.cos(), inv.theta.sin());
    let a = inv.d * inv.h;
    let f_uxx = sin_t * cos_t - a * sin_t * sin_t / 3.0;
    let f_uyy = -cos_t * sin_t - a * cos_t * cos_t / 3.0;
    let f_uxy = sin_t * sin_t - cos_t * cos_t + 2.0 / 3.0 * a * sin_t * cos_t;
    let disc = f_uxx * f_uyy - 0.25 * f_uxy * f_uxy;
    Ok((f_uxx, f_uxy, f_uyy, disc))
}

/// Pullback of Theta ^ e^1 to graph coordinates, evaluated from frame
/// duality: the contact form and the coframe leg e^1 are applied to the
/// two coordinate tangent vectors of the graph and assembled as a 2x2
/// determinant.
pub fn area_element(j: &SurfaceJet) -> Result<f64> {
    let inv = invariants_from_jet(j)?;
    let (cos_t, sin_t) = (inv.theta.cos(), inv.theta.sin());
    // Tangents of the graph: T_x = dx + u_x dt, T_y = dy + u_y dt.
    // Theta = dt + x dy - y dx, e^1 = -sin(theta) dx + cos(theta) dy.
    let theta_tx = j.ux - j.y;
    let theta_ty = j.uy + j.x;
    let e1_tx = -sin_t;
    let e1_ty = cos_t;
    Ok(theta_tx * e1_ty - theta_ty * e1_tx)
}

/// Midpoint-rule quadrature of the E1 patch energy over the parameter
/// rectangle [x0, x1] x [y0, y1]. The sampler returns the surface jet at
/// the given parameter point; partial sums run in fixed index order.
pub fn integrate_e1_patch<F>(sampler: F, rect: [f64; 4], n1: usize, n2: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<SurfaceJet>,
{
    let [x0, x1, y0, y1] = rect;
    if n1 == 0 || n2 == 0 || x1 <= x0 || y1 <= y0 {
        return Err(E1Error::InvalidInput("empty quadrature rectangle".into()));
    }
    let hx = (x1 - x0) / n1 as f64;
    let hy = (y1 - y0) / n2 as f64;
    let mut total = 0.0;
    for i in 0..n1 {
        let x = x0 + (i as f64 + 0.5) * hx;
        for k in 0..n2 {
            let y = y0 + (k as f64 + 0.5) * hy;
            let jet = sampler(x, y)?;
            let density = e1_density(&jet)?;
            if !density.is_finite() || density > DENSITY_GUARD {
                return Err(E1Error::QuadratureUnstable {
                    value: density,
                    guard: DENSITY_GUARD,
                });
            }
            total += density.powf(1.5) * area_element(&jet)?;
        }
    }
    Ok(total * hx * hy)
}

/// Jet of the dilated graph under (x, y, t) -> (lambda x, lambda y,
/// lambda^2 t), evaluated at the dilated base point. Chain-rule exact.
pub fn dilate_jet(j: &SurfaceJet, lambda: f64) -> Result<SurfaceJet> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(E1Error::InvalidInput(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    Ok(SurfaceJet {
        x: lambda * j.x,
        y: lambda * j.y,
        u: lambda * lambda * j.u,
        ux: lambda * j.ux,
        uy: lambda * j.uy,
        uxx: j.uxx,
        uxy: j.uxy,
        uyy: j.uyy,
    })
}
