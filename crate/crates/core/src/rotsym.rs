//! The rotationally symmetric reduction of the vanishing-E1 equation:
//! the second-order radial ODE and its two branches, the separable
//! first-order equation for w = u_r / r, the closed-form solution
//! families, RK4 marching with blow-up detection, reconstruction of u,
//! the four-class classification and the C^2 gluing obstruction.

use crate::error::{E1Error, Result};
use crate::surfaces::{type1_radius, type2_radius, SurfaceFamily, SQRT3};

/// Blow-up threshold for |w| during integration.
pub const BLOW_UP_LIMIT: f64 = 1e8;

/// Family tag carried by a radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    ParabolaPlus,
    ParabolaMinus,
    TypeI(f64),
    TypeII(f64),
    Numeric,
}

impl ProfileFamily {
    pub fn label(&self) -> String {
        match self {
            ProfileFamily::ParabolaPlus => "parabola+".into(),
            ProfileFamily::ParabolaMinus => "parabola-".into(),
            ProfileFamily::TypeI(rho0) => format!("type1(rho0={rho0})"),
            ProfileFamily::TypeII(rho0) => format!("type2(rho0={rho0})"),
            ProfileFamily::Numeric => "numeric".into(),
        }
    }

    pub fn rho0(&self) -> Option<f64> {
        match self {
            ProfileFamily::TypeI(rho0) | ProfileFamily::TypeII(rho0) => Some(*rho0),
            _ => None,
        }
    }
}

/// Sampled (r, w, u) curve of a rotationally symmetric solution.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub family: ProfileFamily,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    /// Reconstructed height; populated by [`u_from_w`].
    pub u: Option<Vec<f64>>,
    /// Integration constant u(0), when defined.
    pub u0: Option<f64>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Termination status of a w-integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileStatus {
    Completed,
    /// |w| crossed the blow-up limit; the profile is truncated there.
    BlowUp { r: f64 },
}

/// Residual of the second-order radial ODE
/// (1/3) r^4 u_rr^2 - ((4/3) r u_r^3 + 2 r^3 u_r) u_rr
///   + (1/3) u_r^6 / r^2 + u_r^4 - r^4.
pub fn ode_residual(r: f64, ur: f64, urr: f64) -> f64 {
    r.powi(4) / 3.0 * urr * urr - (4.0 / 3.0 * r * ur.powi(3) + 2.0 * r.powi(3) * ur) * urr
        + ur.powi(6) / (3.0 * r * r)
        + ur.powi(4)
        - r.powi(4)
}

/// The two roots of the ODE, viewed as a quadratic in u_rr.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// u_rr on the chosen branch:
/// (2 u_r^3 + 3 r^2 u_r ± sqrt(3) (u_r^2 + r^2)^{3/2}) / r^3.
pub fn branch_rhs(r: f64, ur: f64, branch: Branch) -> f64 {
    let root = SQRT3 * (ur * ur + r * r).powf(1.5);
    let base = 2.0 * ur.powi(3) + 3.0 * r * r * ur;
    match branch {
        Branch::Plus => (base + root) / r.powi(3),
        Branch::Minus => (base - root) / r.powi(3),
    }
}

/// Right-hand side of the separable equation for w = u_r / r:
/// w_r = (2 w^3 + 2 w - sqrt(3) (1 + w^2)^{3/2}) / r.
pub fn w_rhs(r: f64, w: f64) -> f64 {
    (2.0 * w.powi(3) + 2.0 * w - SQRT3 * (1.0 + w * w).powf(1.5)) / r
}

/// Closed-form w of the sphere families. Type I stays above sqrt(3),
/// type II below.
pub fn closed_form_w(family: &ProfileFamily, r: f64) -> Result<f64> {
    match family {
        ProfileFamily::TypeI(rho0) => {
            let limit = type1_radius(*rho0);
            if !(r > 0.0 && r < limit) {
                return Err(E1Error::DomainExceeded {
                    r,
                    limit,
                    family: family.label(),
                });
            }
            let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
            Ok(p / (rho0.powi(4) - p * p).sqrt())
        }
        ProfileFamily::TypeII(rho0) => {
            let limit = type2_radius(*rho0);
            if !(r > 0.0 && r < limit) {
                return Err(E1Error::DomainExceeded {
                    r,
                    limit,
                    family: family.label(),
                });
            }
            let p = r * r - SQRT3 / 2.0 * rho0 * rho0;
            Ok(-p / (rho0.powi(4) - p * p).sqrt())
        }
        ProfileFamily::ParabolaPlus => Ok(SQRT3),
        ProfileFamily::ParabolaMinus => Ok(-SQRT3),
        ProfileFamily::Numeric => Err(E1Error::InvalidInput(
            "numeric profiles have no closed form".into(),
        )),
    }
}

fn rk4_step(r: f64, w: f64, h: f64) -> f64 {
    let k1 = w_rhs(r, w);
    let k2 = w_rhs(r + 0.5 * h, w + 0.5 * h * k1);
    let k3 = w_rhs(r + 0.5 * h, w + 0.5 * h * k2);
    let k4 = w_rhs(r + h, w + h * k3);
    w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Classical RK4 march of w_r = w_rhs from (r_start, w_start) to r_end.
/// A Richardson half-step monitor guards the local error; near blow-up
/// the step is halved until |delta w| per step stays below 0.1 |w|.
pub fn integrate_w(
    r_start: f64,
    w_start: f64,
    r_end: f64,
    h: f64,
) -> Result<(RadialProfile, ProfileStatus)> {
    if !(r_start > 0.0 && r_end > r_start && h > 0.0) {
        return Err(E1Error::InvalidInput(format!(
            "bad integration span: r_start={r_start} r_end={r_end} h={h}"
        )));
    }
    let mut rs = vec![r_start];
    let mut ws = vec![w_start];
    let mut r = r_start;
    let mut w = w_start;
    let error_guard = 1e-3;
    while r < r_end {
        let mut step = h.min(r_end - r);
        let mut next;
        let mut diverging = false;
        loop {
            next = rk4_step(r, w, step);
            // Richardson monitor: two half steps vs one full step.
            let half = rk4_step(r + 0.5 * step, rk4_step(r, w, 0.5 * step), 0.5 * step);
            let local_err = (next - half).abs();
            let unstable = !next.is_finite()
                || (next - w).abs() > 0.1 * w.abs().max(1.0)
                || local_err > error_guard * (1.0 + w.abs());
            if unstable {
                if step > h * 1e-6 {
                    step *= 0.5;
                    continue;
                }
                // Uncontrollable even at the step floor. Away from r = 0
                // the right-hand side is smooth, so this only happens
                // when the solution runs off to a vertical asymptote:
                // |w| grows like 1/sqrt(r_b - r) there and no step in
                // f64 can resolve it further. Treat large |w| as
                // blow-up; anything else is a genuine step failure.
                if !next.is_finite() || w.abs() > 3.0 {
                    diverging = true;
                    break;
                }
                return Err(E1Error::StepTooLarge { err: local_err, r });
            }
            next = half; // keep the more accurate value
            break;
        }
        r += step;
        w = next;
        rs.push(r);
        ws.push(w);
        if diverging || !w.is_finite() || w.abs() > BLOW_UP_LIMIT {
            return Ok((
                RadialProfile {
                    family: ProfileFamily::Numeric,
                    r: rs,
                    w: ws,
                    u: None,
                    u0: None,
                },
                ProfileStatus::BlowUp { r },
            ));
        }
    }
    Ok((
        RadialProfile {
            family: ProfileFamily::Numeric,
            r: rs,
            w: ws,
            u: None,
            u0: None,
        },
        ProfileStatus::Completed,
    ))
}

/// Reconstruct u(r) = u0 + integral_0^r s w(s) ds over the stored samples.
/// Simpson on uniform interior runs, trapezoid on nonuniform tails; the
/// head segment [0, r_1] uses the exact limit s w(s) -> 0.
pub fn u_from_w(profile: &mut RadialProfile, u0: f64) {
    let n = profile.len();
    let g: Vec<f64> = profile
        .r
        .iter()
        .zip(profile.w.iter())
        .map(|(r, w)| r * w)
        .collect();
    let mut u = vec![0.0; n];
    if n == 0 {
        profile.u = Some(u);
        profile.u0 = Some(u0);
        return;
    }
    // Head: integrand vanishes linearly at r = 0.
    u[0] = u0 + 0.5 * profile.r[0] * g[0];
    let mut i = 0;
    while i + 1 < n {
        let h1 = profile.r[i + 1] - profile.r[i];
        if i + 2 < n {
            let h2 = profile.r[i + 2] - profile.r[i + 1];
            if (h1 - h2).abs() < 1e-12 * h1.max(h2) {
                // Uniform pair: Simpson over [r_i, r_{i+2}] and a
                // quadratic interpolant for the midpoint value.
                let whole = h1 / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
                let first_half = h1 / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
                u[i + 1] = u[i] + first_half;
                u[i + 2] = u[i] + whole;
                i += 2;
                continue;
            }
        }
        u[i + 1] = u[i] + 0.5 * h1 * (g[i] + g[i + 1]);
        i += 1;
    }
    profile.u = Some(u);
    profile.u0 = Some(u0);
}

/// Result of a successful classification.
#[derive(Debug, Clone)]
pub struct Classification {
    pub family: ProfileFamily,
    pub max_deviation: f64,
}

fn max_deviation(profile: &RadialProfile, family: &ProfileFamily) -> f64 {
    let mut worst: f64 = 0.0;
    for (&r, &w) in profile.r.iter().zip(profile.w.iter()) {
        match closed_form_w(family, r) {
            Ok(model) => worst = worst.max((model - w).abs()),
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

/// Golden-section minimization of f over [lo, hi].
fn golden_minimize<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn fit_sphere_family(profile: &RadialProfile, type1: bool) -> (ProfileFamily, f64) {
    let r_max = profile.r.iter().cloned().fold(0.0f64, f64::max);
    let factor = if type1 {
        ((2.0 - SQRT3) / 2.0f64).sqrt()
    } else {
        ((2.0 + SQRT3) / 2.0f64).sqrt()
    };
    // rho0 must keep every sample strictly inside the family domain.
    let lo = r_max / factor * (1.0 + 1e-9);
    let hi = lo * 1e4;
    let objective = |rho0: f64| {
        let family = if type1 {
            ProfileFamily::TypeI(rho0)
        } else {
            ProfileFamily::TypeII(rho0)
        };
        max_deviation(profile, &family)
    };
    // Coarse log-spaced scan, then golden-section refinement.
    let mut best = lo;
    let mut best_val = objective(lo);
    let steps = 200;
    for k in 1..=steps {
        let rho0 = lo * (hi / lo).powf(k as f64 / steps as f64);
        let v = objective(rho0);
        if v < best_val {
            best_val = v;
            best = rho0;
        }
    }
    let bracket_lo = (best / 1.1).max(lo);
    let bracket_hi = best * 1.1;
    let rho0 = golden_minimize(objective, bracket_lo, bracket_hi, 120);
    let family = if type1 {
        ProfileFamily::TypeI(rho0)
    } else {
        ProfileFamily::TypeII(rho0)
    };
    let dev = max_deviation(profile, &family);
    (family, dev)
}

/// Fit each closed-form family over the (r, w) samples and return the one
/// whose max deviation stays below `tol`; `AmbiguousFit` lists every
/// family that passes when there is more than one.
pub fn classify(profile: &RadialProfile, tol: f64) -> Result<Classification> {
    if profile.len() < 10 {
        return Err(E1Error::InvalidInput(format!(
            "classification needs at least 10 samples, got {}",
            profile.len()
        )));
    }
    let mut passing: Vec<Classification> = Vec::new();
    for family in [ProfileFamily::ParabolaPlus, ProfileFamily::ParabolaMinus] {
        let dev = max_deviation(profile, &family);
        if dev < tol {
            passing.push(Classification {
                family,
                max_deviation: dev,
            });
        }
    }
    // The parabolas are the rho0 -> infinity limits of the sphere
    // families, so a profile matching a parabola is also matched by
    // spheres of enormous rho0; only look for sphere fits when no
    // parabola explains the data.
    if passing.is_empty() {
        for type1 in [true, false] {
            let (family, dev) = fit_sphere_family(profile, type1);
            if dev < tol {
                passing.push(Classification {
                    family,
                    max_deviation: dev,
                });
            }
        }
    }
    match passing.len() {
        0 => Ok(Classification {
            family: ProfileFamily::Numeric,
            max_deviation: f64::INFINITY,
        }),
        1 => Ok(passing.pop().unwrap()),
        _ => Err(E1Error::AmbiguousFit {
            candidates: passing.iter().map(|c| c.family.label()).collect(),
        }),
    }
}

/// The C^2 gluing obstruction at u = 0: second derivatives of r(u) on the
/// two sphere families evaluated at the common radius, plus their ratio
/// 7 + 4 sqrt(3).
#[derive(Debug, Clone, Copy)]
pub struct GluingReport {
    pub ruu_type1: f64,
    pub ruu_type2_at_same_radius: f64,
    pub ratio: f64,
}

pub fn gluing_second_derivatives(rho0: f64) -> GluingReport {
    let ruu_type1 = -2.0 * 2.0f64.sqrt() / ((2.0 - SQRT3).sqrt() * rho0.powi(3));
    let ruu_type2 = (2.0 + SQRT3) / (2.0 - SQRT3) * ruu_type1;
    GluingReport {
        ruu_type1,
        ruu_type2_at_same_radius: ruu_type2,
        ratio: ruu_type2 / ruu_type1,
    }
}

/// Radius r(u) on the closed type I curve (r^2 + k)^2 + 4u^2 = rho0^4.
pub fn type1_radius_of_u(rho0: f64, u: f64) -> f64 {
    ((rho0.powi(4) - 4.0 * u * u).sqrt() - SQRT3 / 2.0 * rho0 * rho0).sqrt()
}

/// Radius r(u) on the closed type II curve (r^2 - k)^2 + 4u^2 = rho0^4,
/// outer branch.
pub fn type2_radius_of_u(rho0: f64, u: f64) -> f64 {
    ((rho0.powi(4) - 4.0 * u * u).sqrt() + SQRT3 / 2.0 * rho0 * rho0).sqrt()
}

/// Deviations |w(r_fixed) - sqrt(3)| along a rho0 sweep of one sphere
/// family; they shrink as rho0 grows.
pub fn dilation_limit_check(
    r_fixed: f64,
    type1: bool,
    rho0_sequence: &[f64],
) -> Result<Vec<f64>> {
    rho0_sequence
        .iter()
        .map(|&rho0| {
            let family = if type1 {
                ProfileFamily::TypeI(rho0)
            } else {
                ProfileFamily::TypeII(rho0)
            };
            closed_form_w(&family, r_fixed).map(|w| (w - SQRT3).abs())
        })
        .collect()
}

/// Sample a closed-form family into a profile with uniform spacing.
pub fn sample_family(family: &ProfileFamily, r_start: f64, r_end: f64, n: usize) -> Result<RadialProfile> {
    if n < 2 || !(r_start > 0.0 && r_end > r_start) {
        return Err(E1Error::InvalidInput("bad sampling span".into()));
    }
    let mut rs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for k in 0..n {
        let r = r_start + (r_end - r_start) * k as f64 / (n - 1) as f64;
        rs.push(r);
        ws.push(closed_form_w(family, r)?);
    }
    Ok(RadialProfile {
        family: *family,
        r: rs,
        w: ws,
        u: None,
        u0: None,
    })
}

/// Default integration constant that anchors a family on its standard
/// graph: u(0) = -rho0^2/4 for type I, +rho0^2/4 for type II, 0 otherwise.
pub fn standard_u0(family: &ProfileFamily) -> f64 {
    match family {
        ProfileFamily::TypeI(rho0) => -rho0 * rho0 / 4.0,
        ProfileFamily::TypeII(rho0) => rho0 * rho0 / 4.0,
        _ => 0.0,
    }
}

/// Consistency of a reconstructed profile with the implicit sphere
/// equation (r^2 ± (sqrt(3)/2) rho0^2)^2 + 4 u^2 = rho0^4; returns the
/// max absolute defect.
pub fn implicit_sphere_defect(profile: &RadialProfile) -> Result<f64> {
    let u = profile
        .u
        .as_ref()
        .ok_or_else(|| E1Error::InvalidInput("profile has no u samples".into()))?;
    let (rho0, sign) = match profile.family {
        ProfileFamily::TypeI(rho0) => (rho0, 1.0),
        ProfileFamily::TypeII(rho0) => (rho0, -1.0),
        _ => {
            return Err(E1Error::InvalidInput(
                "implicit check only applies to sphere families".into(),
            ))
        }
    };
    let mut worst: f64 = 0.0;
    for (&r, &u) in profile.r.iter().zip(u.iter()) {
        let lhs = (r * r + sign * SQRT3 / 2.0 * rho0 * rho0).powi(2) + 4.0 * u * u;
        worst = worst.max((lhs - rho0.powi(4)).abs());
    }
    Ok(worst)
}

pub use crate::surfaces::{type1_radius as blow_up_radius_type1, type2_radius as blow_up_radius_type2};

impl From<&SurfaceFamily> for ProfileFamily {
    fn from(f: &SurfaceFamily) -> Self {
        match f {
            SurfaceFamily::ParabolaPlus => ProfileFamily::ParabolaPlus,
            SurfaceFamily::ParabolaMinus => ProfileFamily::ParabolaMinus,
            SurfaceFamily::TypeI { rho0 } => ProfileFamily::TypeI(*rho0),
            SurfaceFamily::TypeII { rho0 } => ProfileFamily::TypeII(*rho0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parabola_zeroes_residual() {
        for r in [0.1, 1.0, 2.5] {
            assert!(ode_residual(r, SQRT3 * r, SQRT3).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_at_zero_slope() {
        // At u_r = 0 the quadratic reduces to urr^2/3 = r^4 / r^4... at
        // r = 1: residual = urr^2/3 - 1, roots ±sqrt(3).
        let res = |urr: f64| ode_residual(1.0, 0.0, urr);
        assert!((res(SQRT3)).abs() < 1e-12);
        assert!((res(-SQRT3)).abs() < 1e-12);
        assert!((res(0.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_rhs_examples() {
        let v = branch_rhs(1.0, SQRT3, Branch::Plus);
        assert!((v - 17.0 * SQRT3).abs() < 1e-12);
        let v = branch_rhs(1.0, SQRT3, Branch::Minus);
        assert!((v - SQRT3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn branch_roots_zero_residual(r in 0.2f64..3.0, ur in -4.0f64..4.0) {
            for branch in [Branch::Plus, Branch::Minus] {
                let urr = branch_rhs(r, ur, branch);
                let res = ode_residual(r, ur, urr);
                prop_assert!(res.abs() < 1e-9 * r.powi(4).max(1.0),
                    "r={r} ur={ur} res={res}");
            }
        }

        #[test]
        fn residual_even_in_sign(r in 0.2f64..3.0, ur in -4.0f64..4.0, urr in -5.0f64..5.0) {
            let a = ode_residual(r, ur, urr);
            let b = ode_residual(r, -ur, -urr);
            prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn branch_antisymmetry(r in 0.2f64..3.0, ur in -4.0f64..4.0) {
            let plus = branch_rhs(r, ur, Branch::Plus);
            let minus_flipped = branch_rhs(r, -ur, Branch::Minus);
            prop_assert!((minus_flipped + plus).abs() < 1e-9 * plus.abs().max(1.0));
        }

        #[test]
        fn w_rhs_sign_matches_w_minus_sqrt3(w in -5.0f64..5.0) {
            let v = w_rhs(1.0, w);
            if (w - SQRT3).abs() > 1e-9 {
                prop_assert!(v.signum() == (w - SQRT3).signum(), "w={w} rhs={v}");
            }
        }
    }

    #[test]
    fn w_rhs_fixed_point_and_origin() {
        for r in [0.3, 1.0, 4.2] {
            assert!(w_rhs(r, SQRT3).abs() < 1e-12);
        }
        assert!((w_rhs(1.0, 0.0) + SQRT3).abs() < 1e-12);
    }

    #[test]
    fn closed_form_limits() {
        let f = ProfileFamily::TypeI(1.0);
        assert!((closed_form_w(&f, 1e-6).unwrap() - SQRT3).abs() < 1e-9);
        let f2 = ProfileFamily::TypeII(1.0);
        let a = (SQRT3 / 2.0f64).sqrt();
        assert!(closed_form_w(&f2, a).unwrap().abs() < 1e-12);
        // Ordering relative to sqrt(3) across the domains.
        for k in 1..20 {
            let r = type1_radius(1.0) * k as f64 / 20.0;
            assert!(closed_form_w(&f, r).unwrap() > SQRT3);
        }
        for k in 1..20 {
            let r = type2_radius(1.0) * k as f64 / 20.0;
            assert!(closed_form_w(&f2, r).unwrap() < SQRT3);
        }
    }

    #[test]
    fn rk4_constant_solution() {
        let (profile, status) = integrate_w(0.1, SQRT3, 2.0, 1e-2).unwrap();
        assert_eq!(status, ProfileStatus::Completed);
        for &w in &profile.w {
            assert!((w - SQRT3).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_matches_closed_form_with_order_4() {
        let fam = ProfileFamily::TypeI(1.0);
        let r0 = 0.05;
        let w0 = closed_form_w(&fam, r0).unwrap();
        let mut errors = Vec::new();
        for &h in &[4e-3, 2e-3, 1e-3] {
            let (profile, status) = integrate_w(r0, w0, 0.3, h).unwrap();
            assert_eq!(status, ProfileStatus::Completed);
            let w_end = *profile.w.last().unwrap();
            let exact = closed_form_w(&fam, *profile.r.last().unwrap()).unwrap();
            errors.push((w_end - exact).abs());
        }
        assert!(errors[2] < 1e-8, "final error {:?}", errors);
        let order1 = (errors[0] / errors[1]).log2();
        let order2 = (errors[1] / errors[2]).log2();
        assert!(
            order1 > 3.7 && order2 > 3.7,
            "observed orders {order1:.2}, {order2:.2}, errors {errors:?}"
        );
    }

    #[test]
    fn type2_integration_blows_up_near_b() {
        let fam = ProfileFamily::TypeII(1.0);
        let r0 = 0.1;
        let w0 = closed_form_w(&fam, r0).unwrap();
        let b = type2_radius(1.0);
        let (profile, status) = integrate_w(r0, w0, b + 0.05, 1e-3).unwrap();
        match status {
            ProfileStatus::BlowUp { r } => {
                assert!((r - b).abs() < 1e-6, "blow-up at {r}, b = {b}");
                // Past the knee of the vertical asymptote.
                assert!(*profile.w.last().unwrap() < -3.0);
            }
            ProfileStatus::Completed => panic!("expected blow-up"),
        }
    }

    #[test]
    fn u_reconstruction_parabola() {
        let mut profile = sample_family(&ProfileFamily::ParabolaPlus, 1e-4, 1.0, 2001).unwrap();
        u_from_w(&mut profile, 0.0);
        let u = profile.u.as_ref().unwrap();
        for (&r, &u) in profile.r.iter().zip(u.iter()) {
            let exact = SQRT3 / 2.0 * r * r;
            assert!((u - exact).abs() < 1e-10, "r={r} u={u} exact={exact}");
        }
    }

    #[test]
    fn u_reconstruction_spheres() {
        for type1 in [true, false] {
            let rho0 = 1.0;
            let family = if type1 {
                ProfileFamily::TypeI(rho0)
            } else {
                ProfileFamily::TypeII(rho0)
            };
            let r_end = 0.98
                * if type1 {
                    type1_radius(rho0)
                } else {
                    type2_radius(rho0)
                };
            let mut profile = sample_family(&family, 1e-4, r_end, 4001).unwrap();
            u_from_w(&mut profile, standard_u0(&family));
            let defect = implicit_sphere_defect(&profile).unwrap();
            assert!(defect < 1e-7, "family {} defect {defect}", family.label());
        }
    }

    #[test]
    fn classify_round_trips() {
        let prof = sample_family(&ProfileFamily::ParabolaPlus, 0.1, 1.0, 50).unwrap();
        let c = classify(&prof, 1e-8).unwrap();
        assert_eq!(c.family, ProfileFamily::ParabolaPlus);

        let fam = ProfileFamily::TypeII(2.0);
        let prof = sample_family(&fam, 0.05, 0.9 * type2_radius(2.0), 200).unwrap();
        let c = classify(&prof, 1e-6).unwrap();
        match c.family {
            ProfileFamily::TypeII(rho0) => {
                assert!((rho0 - 2.0).abs() < 1e-7, "fitted rho0 = {rho0}")
            }
            other => panic!("misclassified as {}", other.label()),
        }
    }

    #[test]
    fn classify_rejects_non_solution() {
        let prof = RadialProfile {
            family: ProfileFamily::Numeric,
            r: (1..=50).map(|k| 0.02 * k as f64).collect(),
            w: vec![0.0; 50],
            u: None,
            u0: None,
        };
        let c = classify(&prof, 1e-6).unwrap();
        assert_eq!(c.family, ProfileFamily::Numeric);
    }

    #[test]
    fn gluing_closed_forms() {
        let report = gluing_second_derivatives(1.0);
        assert!((report.ruu_type1 + 2.0 * 2.0f64.sqrt() / (2.0 - SQRT3).sqrt()).abs() < 1e-12);
        assert!((report.ratio - (7.0 + 4.0 * SQRT3)).abs() < 1e-10);
    }

    #[test]
    fn gluing_matches_finite_differences() {
        let rho0 = 1.0;
        let report = gluing_second_derivatives(rho0);
        let h = 1e-5;
        let fd = |f: &dyn Fn(f64) -> f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let fd1 = fd(&|u| type1_radius_of_u(rho0, u));
        let rel1 = (fd1 - report.ruu_type1).abs() / report.ruu_type1.abs();
        assert!(rel1 < 1e-5, "type I fd {fd1} vs {}", report.ruu_type1);
        // Type II at the same radius b = r0: shrink rho0 so the outer
        // radius coincides with the type I gluing radius.
        let rho0_small = type1_radius(rho0) / type2_radius(1.0);
        let fd2 = fd(&|u| type2_radius_of_u(rho0_small, u));
        let rel2 = (fd2 - report.ruu_type2_at_same_radius).abs()
            / report.ruu_type2_at_same_radius.abs();
        assert!(
            rel2 < 1e-5,
            "type II fd {fd2} vs {}",
            report.ruu_type2_at_same_radius
        );
    }

    #[test]
    fn dilation_limit_monotone() {
        for type1 in [true, false] {
            let devs = dilation_limit_check(0.1, type1, &[1.0, 10.0, 100.0]).unwrap();
            assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
            assert!(devs[2] < 1e-4, "{devs:?}");
        }
        let devs = dilation_limit_check(0.1, true, &[2.0, 2.0, 2.0]).unwrap();
        assert!((devs[0] - devs[1]).abs() < 1e-15 && (devs[1] - devs[2]).abs() < 1e-15);
    }
}
