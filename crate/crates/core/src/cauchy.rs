//! The quasi-linear hyperbolic first-order system for the state
//! U = (theta, alpha, H, m) of a vanishing-E1 graph in polar coordinates,
//! A U_r + B U_phi + C U = 0, together with its closed-form determinant,
//! inverse and eigen-structure, finite-difference verification of the
//! supporting pointwise identities, and a periodic-in-phi Cauchy march
//! (two-step Lax-Wendroff and characteristic upwind).

use crate::error::{E1Error, Result};
use crate::mat4::{self, Mat4, Vec4};
use crate::surfaces::{SurfaceFamily, SQRT3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Halt threshold on |sin(theta - phi)|.
pub const S_MIN: f64 = 1e-8;
/// Halt threshold on |alpha|.
pub const ALPHA_MIN: f64 = 1e-8;
/// Relative halt threshold on |det A|.
pub const DET_MIN: f64 = 1e-10;
/// Regime threshold for the eigen-structure case split.
const EIGEN_TOL: f64 = 1e-10;

/// State of the first-order system at one point: the angle theta, the
/// invariants alpha and H, and m = -N_perp(alpha) = e_1(alpha).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub theta: f64,
    pub alpha: f64,
    pub h: f64,
    pub m: f64,
}

impl StateVector {
    pub fn to_vec4(self) -> Vec4 {
        [self.theta, self.alpha, self.h, self.m]
    }

    pub fn from_vec4(v: Vec4) -> Self {
        StateVector {
            theta: v[0],
            alpha: v[1],
            h: v[2],
            m: v[3],
        }
    }

    /// On exact solutions m + alpha^2/2 + H^2/6 = 0; this is the defect.
    pub fn constraint_residual(&self) -> f64 {
        self.m + 0.5 * self.alpha * self.alpha + self.h * self.h / 6.0
    }
}

/// sin and cos of theta - phi.
fn sc(state: &StateVector, phi: f64) -> (f64, f64) {
    let d = state.theta - phi;
    (d.sin(), d.cos())
}

/// sigma = (1/3) s H + 2 c alpha; eta = (2/3) s H + 2 c alpha. Their
/// product times s^2 is det A.
fn sigma_eta(state: &StateVector, s: f64, c: f64) -> (f64, f64) {
    let sigma = s * state.h / 3.0 + 2.0 * c * state.alpha;
    let eta = 2.0 * s * state.h / 3.0 + 2.0 * c * state.alpha;
    (sigma, eta)
}

/// The rotated companions sigma~ = -(1/3) c H + 2 s alpha and
/// eta~ = -(2/3) c H + 2 s alpha entering the eigenvalues.
fn sigma_eta_tilde(state: &StateVector, s: f64, c: f64) -> (f64, f64) {
    let st = -c * state.h / 3.0 + 2.0 * s * state.alpha;
    let et = -2.0 * c * state.h / 3.0 + 2.0 * s * state.alpha;
    (st, et)
}

/// The three coefficient matrices of A U_r + B U_phi + C U = 0.
#[derive(Debug, Clone, Copy)]
pub struct SystemMatrices {
    pub a: Mat4,
    pub b: Mat4,
    pub c: Mat4,
}

/// Core of A as a function of (s, c); B is the same expression with
/// (s, c) -> (-c, s), scaled by 1/r.
fn principal_part(state: &StateVector, s: f64, c: f64) -> Mat4 {
    let (al, h) = (state.alpha, state.h);
    [
        [s * h / 3.0 + c * al, s, 0.0, 0.0],
        [-c * al, s, 0.0, 0.0],
        [0.0, 6.0 * s * al, -c * al, s],
        [2.0 * c * al * al, 2.0 * s * al, -2.0 * s * h / 3.0 - c * al, -s],
    ]
}

pub fn assemble(state: &StateVector, r: f64, phi: f64) -> SystemMatrices {
    let (s, c) = sc(state, phi);
    let a = principal_part(state, s, c);
    let b = mat4::scale(&principal_part(state, -c, s), 1.0 / r);
    let (al, h) = (state.alpha, state.h);
    let c_mat = [
        [0.0, al, 0.0, 0.0],
        [0.0, -2.0 * al, 0.0, 0.0],
        [0.0, -4.0 * al * al, -al * h, 0.0],
        [0.0, 0.0, -al * h, 0.0],
    ];
    SystemMatrices { a, b, c: c_mat }
}

/// det A = s^2 sigma eta in closed form.
pub fn det_a(state: &StateVector, phi: f64) -> f64 {
    let (s, c) = sc(state, phi);
    let (sigma, eta) = sigma_eta(state, s, c);
    s * s * sigma * eta
}

/// True when the state sits too close to a characteristic of the system
/// for the closed-form inverse to be trusted.
pub fn is_characteristic(state: &StateVector, r: f64, phi: f64) -> bool {
    let (s, _) = sc(state, phi);
    let mats = assemble(state, r, phi);
    let det = det_a(state, phi);
    s.abs() < S_MIN || det.abs() < DET_MIN * (1.0 + mat4::norm_inf(&mats.a))
}

/// Closed-form inverse of A.
pub fn inverse_a(state: &StateVector, phi: f64) -> Result<Mat4> {
    let (s, c) = sc(state, phi);
    let (sigma, eta) = sigma_eta(state, s, c);
    let det = s * s * sigma * eta;
    if s.abs() < S_MIN || det.abs() < 1e-300 {
        return Err(E1Error::NearCharacteristic {
            detail: format!("s = {s:.3e}, det A = {det:.3e}"),
        });
    }
    let al = state.alpha;
    Ok([
        [1.0 / sigma, -1.0 / sigma, 0.0, 0.0],
        [c * al / (s * sigma), (sigma - c * al) / (s * sigma), 0.0, 0.0],
        [
            10.0 * c * al * al / (sigma * eta),
            (8.0 * sigma * al - 10.0 * c * al * al) / (sigma * eta),
            -1.0 / eta,
            -1.0 / eta,
        ],
        [
            (-6.0 * eta * c * al * al + 10.0 * c * c * al.powi(3)) / (s * sigma * eta),
            (8.0 * sigma * c * al * al - 10.0 * c * c * al.powi(3) - 6.0 * sigma * eta * al
                + 6.0 * eta * c * al * al)
                / (s * sigma * eta),
            (eta - c * al) / (s * eta),
            -c * al / (s * eta),
        ],
    ])
}

/// Closed-form a = A^{-1} B, the matrix whose eigenvalues are the
/// characteristic speeds d(phi)/dr. Lower triangular.
pub fn a_matrix(state: &StateVector, r: f64, phi: f64) -> Result<Mat4> {
    let (s, c) = sc(state, phi);
    let (sigma, eta) = sigma_eta(state, s, c);
    let (st, et) = sigma_eta_tilde(state, s, c);
    if s.abs() < S_MIN || (sigma * eta).abs() < 1e-300 {
        return Err(E1Error::NearCharacteristic {
            detail: format!("s = {s:.3e}, sigma eta = {:.3e}", sigma * eta),
        });
    }
    let (al, h) = (state.alpha, state.h);
    Ok([
        [st / (r * sigma), 0.0, 0.0, 0.0],
        [-al * h / (3.0 * s * r * sigma), -c / (s * r), 0.0, 0.0],
        [-10.0 / 3.0 * h * al * al / (r * sigma * eta), 0.0, et / (r * eta), 0.0],
        [
            (4.0 / 3.0 * s * al * al * h * h + 2.0 / 3.0 * c * al.powi(3) * h)
                / (s * r * sigma * eta),
            0.0,
            -2.0 / 3.0 * al * h / (s * r * eta),
            -c / (s * r),
        ],
    ])
}

/// Regime of the eigen-decomposition of a = A^{-1} B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenCase {
    /// alpha != 0 and H != 0: four independent eigenvectors, three
    /// distinct speeds.
    Generic,
    /// H = 0: two double speeds.
    ZeroH,
    /// alpha = 0: a is a multiple of the identity.
    ZeroAlpha,
}

/// Eigen-decomposition a = R diag(lambda) R^{-1}.
#[derive(Debug, Clone, Copy)]
pub struct EigenSystem {
    pub lambdas: Vec4,
    /// Columns are the right eigenvectors.
    pub r_mat: Mat4,
    pub r_inv: Mat4,
    pub case: EigenCase,
}

pub fn eigen_system(state: &StateVector, r: f64, phi: f64) -> Result<EigenSystem> {
    let (s, c) = sc(state, phi);
    let (sigma, eta) = sigma_eta(state, s, c);
    let (st, et) = sigma_eta_tilde(state, s, c);
    if s.abs() < S_MIN || (sigma * eta).abs() < 1e-300 {
        return Err(E1Error::NearCharacteristic {
            detail: format!("s = {s:.3e}, sigma eta = {:.3e}", sigma * eta),
        });
    }
    let (al, h) = (state.alpha, state.h);
    let scale = 1.0 + al.abs() + h.abs();
    let l1 = st / (r * sigma);
    let l2 = -c / (s * r);
    let l3 = et / (r * eta);
    let (case, lambdas, r_mat): (EigenCase, Vec4, Mat4) = if al.abs() <= EIGEN_TOL * scale {
        (EigenCase::ZeroAlpha, [l2; 4], mat4::identity())
    } else if h.abs() <= EIGEN_TOL * scale {
        (
            EigenCase::ZeroH,
            [l1, l2, l1, l2],
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [-5.0 * al, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        )
    } else {
        (
            EigenCase::Generic,
            [l1, l2, l3, l2],
            [
                [1.0, 0.0, 0.0, 0.0],
                [-h / 6.0, 1.0, 0.0, 0.0],
                [-5.0 * al, 0.0, 1.0, 0.0],
                [11.0 * al * h / 6.0, 0.0, -h / 3.0, 1.0],
            ],
        )
    };
    let r_inv = mat4::inverse_gauss(&r_mat).ok_or_else(|| E1Error::NearCharacteristic {
        detail: "eigenvector matrix is singular".into(),
    })?;
    Ok(EigenSystem {
        lambdas,
        r_mat,
        r_inv,
        case,
    })
}

/// Closed-form state of one of the exact rotationally symmetric families
/// at polar point (r, phi). The angle is returned unwrapped:
/// theta = phi + offset with offset in (0, pi).
pub fn exact_state(family: &SurfaceFamily, r: f64, phi: f64) -> Result<StateVector> {
    family.check_radius(r)?;
    let (s, c, alpha, h) = match family {
        SurfaceFamily::ParabolaPlus => {
            (0.5, SQRT3 / 2.0, -1.0 / (2.0 * r), SQRT3 / (2.0 * r))
        }
        SurfaceFamily::ParabolaMinus => {
            (0.5, -SQRT3 / 2.0, -1.0 / (2.0 * r), -SQRT3 / (2.0 * r))
        }
        SurfaceFamily::TypeI { rho0 } => {
            let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
            let q = (rho0.powi(4) - p * p).sqrt();
            let rr = rho0 * rho0;
            (
                q / rr,
                p / rr,
                -q / (r * rr),
                (3.0 * r * r + SQRT3 / 2.0 * rr) / (r * rr),
            )
        }
        SurfaceFamily::TypeII { rho0 } => {
            let p = r * r - SQRT3 / 2.0 * rho0 * rho0;
            let q = (rho0.powi(4) - p * p).sqrt();
            let rr = rho0 * rho0;
            (
                q / rr,
                -p / rr,
                -q / (r * rr),
                -(3.0 * r * r - SQRT3 / 2.0 * rr) / (r * rr),
            )
        }
    };
    let theta = phi + f64::atan2(s, c);
    // m = e_1(alpha) = -(alpha^2/2 + H^2/6) on the exact families.
    let m = -(0.5 * alpha * alpha + h * h / 6.0);
    Ok(StateVector {
        theta,
        alpha,
        h,
        m,
    })
}

// ---------------------------------------------------------------------------
// Finite-difference verification of the pointwise identities.

/// Max absolute residuals of the five pointwise identities relating
/// theta, alpha, H along an exact family, measured by nested central
/// differences of the legs N = c d_r + (s/r) d_phi and
/// N_perp = s d_r - (c/r) d_phi.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// N_perp(theta) + H.
    pub turning: f64,
    /// N_perp(alpha) - alpha N(theta) - 2 alpha^2.
    pub alpha_transport: f64,
    /// alpha N(theta) + (H/3) N_perp(theta) + N_perp(alpha) + alpha^2.
    pub energy_first: f64,
    /// -alpha N(H) - alpha H^2 + 2 alpha^2 N(theta)
    /// + (2H/3) N_perp(N_perp(theta)) + N_perp(N_perp(alpha))
    /// + 2 alpha N_perp(alpha).
    pub energy_second: f64,
    /// -alpha N(H) - (N_perp(N_perp(alpha)) - 6 alpha N_perp(alpha)
    /// + 4 alpha^3 + alpha H^2).
    pub codazzi: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.turning
            .max(self.alpha_transport)
            .max(self.energy_first)
            .max(self.energy_second)
            .max(self.codazzi)
    }
}

/// Evaluate the identities over an (r, phi) sample grid with step `h` in
/// both coordinates for the central differences.
pub fn verify_identities(
    family: &SurfaceFamily,
    r_lo: f64,
    r_hi: f64,
    n_r: usize,
    n_phi: usize,
    h: f64,
) -> Result<IdentityReport> {
    let bad_reals = r_lo.is_nan() || r_hi.is_nan() || h.is_nan();
    if bad_reals || r_lo <= 0.0 || r_hi <= r_lo || n_r == 0 || n_phi == 0 || h <= 0.0 {
        return Err(E1Error::InvalidInput("bad identity-check grid".into()));
    }
    let theta = |r: f64, phi: f64| exact_state(family, r, phi).map(|s| s.theta);
    let alpha = |r: f64, phi: f64| exact_state(family, r, phi).map(|s| s.alpha);
    let hcurv = |r: f64, phi: f64| exact_state(family, r, phi).map(|s| s.h);

    // Directional derivatives by central differences; s and c are
    // re-evaluated at the base point of every application, so nesting
    // N_perp twice picks up the variation of the frame as well.
    fn n_perp<F: Fn(f64, f64) -> Result<f64> + Copy>(
        family: &SurfaceFamily,
        f: F,
        r: f64,
        phi: f64,
        h: f64,
    ) -> Result<f64> {
        let st = exact_state(family, r, phi)?;
        let (s, c) = sc(&st, phi);
        let fr = (f(r + h, phi)? - f(r - h, phi)?) / (2.0 * h);
        let fphi = (f(r, phi + h)? - f(r, phi - h)?) / (2.0 * h);
        Ok(s * fr - c / r * fphi)
    }
    fn n_leg<F: Fn(f64, f64) -> Result<f64> + Copy>(
        family: &SurfaceFamily,
        f: F,
        r: f64,
        phi: f64,
        h: f64,
    ) -> Result<f64> {
        let st = exact_state(family, r, phi)?;
        let (s, c) = sc(&st, phi);
        let fr = (f(r + h, phi)? - f(r - h, phi)?) / (2.0 * h);
        let fphi = (f(r, phi + h)? - f(r, phi - h)?) / (2.0 * h);
        Ok(c * fr + s / r * fphi)
    }

    let mut report = IdentityReport {
        turning: 0.0,
        alpha_transport: 0.0,
        energy_first: 0.0,
        energy_second: 0.0,
        codazzi: 0.0,
    };
    for i in 0..n_r {
        let r = r_lo + (r_hi - r_lo) * (i as f64 + 0.5) / n_r as f64;
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            let st = exact_state(family, r, phi)?;
            let (al, hc) = (st.alpha, st.h);
            let np_theta = n_perp(family, theta, r, phi, h)?;
            let n_theta = n_leg(family, theta, r, phi, h)?;
            let np_alpha = n_perp(family, alpha, r, phi, h)?;
            let n_h = n_leg(family, hcurv, r, phi, h)?;
            let npnp_theta = n_perp(
                family,
                |r, phi| n_perp(family, theta, r, phi, h),
                r,
                phi,
                h,
            )?;
            let npnp_alpha = n_perp(
                family,
                |r, phi| n_perp(family, alpha, r, phi, h),
                r,
                phi,
                h,
            )?;

            report.turning = report.turning.max((np_theta + hc).abs());
            report.alpha_transport = report
                .alpha_transport
                .max((np_alpha - al * n_theta - 2.0 * al * al).abs());
            report.energy_first = report
                .energy_first
                .max((al * n_theta + hc / 3.0 * np_theta + np_alpha + al * al).abs());
            report.energy_second = report.energy_second.max(
                (-al * n_h - al * hc * hc
                    + 2.0 * al * al * n_theta
                    + 2.0 / 3.0 * hc * npnp_theta
                    + npnp_alpha
                    + 2.0 * al * np_alpha)
                    .abs(),
            );
            report.codazzi = report.codazzi.max(
                (-al * n_h
                    - (npnp_alpha - 6.0 * al * np_alpha + 4.0 * al.powi(3) + al * hc * hc))
                    .abs(),
            );
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Cauchy march.

/// Spatial scheme of the march in r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Two-step (Richtmyer) Lax-Wendroff, second order.
    LaxWendroff,
    /// First-order characteristic upwind.
    Upwind,
}

/// Periodic state slice at fixed radius. Theta values are stored
/// unwrapped; across the periodic seam the angle picks up
/// 2 pi * winding.
#[derive(Debug, Clone)]
pub struct CauchyGrid {
    pub r: f64,
    /// Uniform nodes phi_j = 2 pi j / n, j = 0..n-1.
    pub phi: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Winding number of theta - accumulated over one period of phi.
    pub winding: i64,
}

impl CauchyGrid {
    /// Closed-form initial data of one of the exact families.
    pub fn from_family(family: &SurfaceFamily, r: f64, n_phi: usize) -> Result<Self> {
        if n_phi < 8 {
            return Err(E1Error::InvalidInput(format!(
                "need at least 8 angular nodes, got {n_phi}"
            )));
        }
        let mut phi = Vec::with_capacity(n_phi);
        let mut states = Vec::with_capacity(n_phi);
        for j in 0..n_phi {
            let p = 2.0 * PI * j as f64 / n_phi as f64;
            phi.push(p);
            states.push(exact_state(family, r, p)?);
        }
        Ok(CauchyGrid {
            r,
            phi,
            states,
            winding: 1,
        })
    }

    /// Build a grid from raw samples, unwrapping theta and measuring the
    /// winding number around the period.
    pub fn from_samples(r: f64, mut states: Vec<StateVector>) -> Result<Self> {
        let n = states.len();
        if n < 8 {
            return Err(E1Error::InvalidInput(format!(
                "need at least 8 angular nodes, got {n}"
            )));
        }
        let wrap = |d: f64| d - (d / (2.0 * PI)).round() * 2.0 * PI;
        let mut total = 0.0;
        for j in 1..n {
            let jump = wrap(states[j].theta - states[j - 1].theta);
            states[j].theta = states[j - 1].theta + jump;
            total += jump;
        }
        total += wrap(states[0].theta - states[n - 1].theta);
        let winding = (total / (2.0 * PI)).round() as i64;
        let phi = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        Ok(CauchyGrid {
            r,
            phi,
            states,
            winding,
        })
    }

    pub fn n_phi(&self) -> usize {
        self.states.len()
    }

    pub fn d_phi(&self) -> f64 {
        2.0 * PI / self.n_phi() as f64
    }

    /// State at wrapped index j, with theta and phi shifted by full turns
    /// so that theta - phi stays consistent across the seam.
    pub fn at(&self, j: isize) -> (StateVector, f64) {
        let n = self.states.len() as isize;
        let q = j.div_euclid(n);
        let k = j.rem_euclid(n) as usize;
        let mut st = self.states[k];
        st.theta += q as f64 * 2.0 * PI * self.winding as f64;
        let phi = self.phi[k] + q as f64 * 2.0 * PI;
        (st, phi)
    }

    /// Max deviation from another grid at the same resolution (theta
    /// compared modulo nothing: both are unwrapped on the same nodes).
    pub fn max_deviation(&self, other: &CauchyGrid) -> f64 {
        self.states
            .iter()
            .zip(other.states.iter())
            .map(|(a, b)| {
                let da = a.to_vec4();
                let db = b.to_vec4();
                mat4::vec_norm_inf(&[da[0] - db[0], da[1] - db[1], da[2] - db[2], da[3] - db[3]])
            })
            .fold(0.0, f64::max)
    }

    /// Fraction of spectral energy in the top-third modes, maximized over
    /// the four components (theta is first reduced by winding * phi to
    /// make it periodic). Near zero for smooth data.
    pub fn spectral_tail(&self) -> f64 {
        let n = self.n_phi();
        let mut worst: f64 = 0.0;
        for comp in 0..4 {
            let samples: Vec<f64> = (0..n)
                .map(|j| {
                    let v = self.states[j].to_vec4()[comp];
                    if comp == 0 {
                        v - self.winding as f64 * self.phi[j]
                    } else {
                        v
                    }
                })
                .collect();
            let mut energy = vec![0.0f64; n / 2 + 1];
            for (k, e) in energy.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in samples.iter().enumerate() {
                    let ang = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc += Complex64::from_polar(v, ang);
                }
                *e = acc.norm_sqr();
            }
            let total: f64 = energy[1..].iter().sum();
            // Constant components carry only roundoff noise beyond the
            // mean; ignore them.
            if total < 1e-20 * energy[0].max(1.0) {
                continue;
            }
            let tail: f64 = energy[(n / 3).max(1)..].iter().sum();
            worst = worst.max(tail / total);
        }
        worst
    }
}

/// Why a march stopped before reaching its target radius.
#[derive(Debug, Clone, PartialEq)]
pub enum MarchStatus {
    Completed,
    Halted { r: f64, reason: String },
}

#[derive(Debug, Clone)]
pub struct MarchConfig {
    pub scheme: Scheme,
    /// CFL number applied to the fastest characteristic.
    pub cfl: f64,
    pub max_steps: usize,
    /// Record a snapshot every this many steps (0 = final only).
    pub record_every: usize,
    /// Reject initial data whose spectral tail fraction exceeds this.
    pub tail_tol: f64,
}

impl Default for MarchConfig {
    fn default() -> Self {
        MarchConfig {
            scheme: Scheme::LaxWendroff,
            cfl: 0.8,
            max_steps: 2_000_000,
            record_every: 0,
            tail_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarchOutcome {
    pub final_grid: CauchyGrid,
    pub snapshots: Vec<CauchyGrid>,
    pub steps: usize,
    pub status: MarchStatus,
}

/// d/dr of the state at node j: -(a dU/dphi + A^{-1} C U), with the
/// phi-derivative taken by the configured scheme.
fn source_term(state: &StateVector, r: f64, phi: f64) -> Result<Vec4> {
    let mats = assemble(state, r, phi);
    let a_inv = inverse_a(state, phi)?;
    let cu = mat4::matvec(&mats.c, &state.to_vec4());
    Ok(mat4::matvec(&a_inv, &cu))
}

fn halt_reason(grid: &CauchyGrid) -> Option<String> {
    for j in 0..grid.n_phi() {
        let (st, phi) = grid.at(j as isize);
        if !st.to_vec4().iter().all(|v| v.is_finite()) {
            return Some(format!("non-finite state at phi = {phi:.4}"));
        }
        let (s, _) = sc(&st, phi);
        if st.alpha.abs() < ALPHA_MIN {
            return Some(format!("alpha -> 0 at phi = {phi:.4}"));
        }
        if s.abs() < S_MIN {
            return Some(format!("sin(theta - phi) -> 0 at phi = {phi:.4}"));
        }
        let mats = assemble(&st, grid.r, phi);
        let det = det_a(&st, phi);
        if det.abs() < DET_MIN * (1.0 + mat4::norm_inf(&mats.a)) {
            return Some(format!("det A -> 0 at phi = {phi:.4}"));
        }
    }
    None
}

fn max_speed(grid: &CauchyGrid) -> Result<f64> {
    let mut top: f64 = 0.0;
    for j in 0..grid.n_phi() {
        let (st, phi) = grid.at(j as isize);
        let eig = eigen_system(&st, grid.r, phi)?;
        top = top.max(mat4::vec_norm_inf(&eig.lambdas));
    }
    Ok(top)
}

fn add(a: Vec4, b: Vec4, k: f64) -> Vec4 {
    [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2], a[3] + k * b[3]]
}

fn avg_state(a: &StateVector, b: &StateVector) -> StateVector {
    let va = a.to_vec4();
    let vb = b.to_vec4();
    StateVector::from_vec4([
        0.5 * (va[0] + vb[0]),
        0.5 * (va[1] + vb[1]),
        0.5 * (va[2] + vb[2]),
        0.5 * (va[3] + vb[3]),
    ])
}

/// One Richtmyer step from `grid` to r + dr (dr may be negative).
fn step_lax_wendroff(grid: &CauchyGrid, dr: f64) -> Result<Vec<StateVector>> {
    let n = grid.n_phi() as isize;
    let d_phi = grid.d_phi();
    // Half states at phi_{j+1/2}.
    let mut half = Vec::with_capacity(n as usize);
    for j in 0..n {
        let (uj, phij) = grid.at(j);
        let (uj1, _) = grid.at(j + 1);
        let mid = avg_state(&uj, &uj1);
        let phi_mid = phij + 0.5 * d_phi;
        let a_mid = a_matrix(&mid, grid.r, phi_mid)?;
        let g_mid = source_term(&mid, grid.r, phi_mid)?;
        let du = add(uj1.to_vec4(), uj.to_vec4(), -1.0);
        let adv = mat4::matvec(&a_mid, &[du[0] / d_phi, du[1] / d_phi, du[2] / d_phi, du[3] / d_phi]);
        let mut v = mid.to_vec4();
        for i in 0..4 {
            v[i] -= 0.5 * dr * (adv[i] + g_mid[i]);
        }
        half.push(StateVector::from_vec4(v));
    }
    let half_at = |j: isize| -> StateVector {
        let q = j.div_euclid(n);
        let k = j.rem_euclid(n) as usize;
        let mut st = half[k];
        st.theta += q as f64 * 2.0 * PI * grid.winding as f64;
        st
    };
    let r_half = grid.r + 0.5 * dr;
    let mut out = Vec::with_capacity(n as usize);
    for j in 0..n {
        let (uj, phij) = grid.at(j);
        let hp = half_at(j);
        let hm = half_at(j - 1);
        let mid = avg_state(&hp, &hm);
        let a_mid = a_matrix(&mid, r_half, phij)?;
        let g_mid = source_term(&mid, r_half, phij)?;
        let du = add(hp.to_vec4(), hm.to_vec4(), -1.0);
        let adv = mat4::matvec(&a_mid, &[du[0] / d_phi, du[1] / d_phi, du[2] / d_phi, du[3] / d_phi]);
        let mut v = uj.to_vec4();
        for i in 0..4 {
            v[i] -= dr * (adv[i] + g_mid[i]);
        }
        out.push(StateVector::from_vec4(v));
    }
    Ok(out)
}

/// One first-order characteristic upwind step.
fn step_upwind(grid: &CauchyGrid, dr: f64) -> Result<Vec<StateVector>> {
    let n = grid.n_phi() as isize;
    let d_phi = grid.d_phi();
    let mut out = Vec::with_capacity(n as usize);
    for j in 0..n {
        let (uj, phij) = grid.at(j);
        let (um, _) = grid.at(j - 1);
        let (up, _) = grid.at(j + 1);
        let eig = eigen_system(&uj, grid.r, phij)?;
        let g = source_term(&uj, grid.r, phij)?;
        let back = add(uj.to_vec4(), um.to_vec4(), -1.0);
        let fwd = add(up.to_vec4(), uj.to_vec4(), -1.0);
        let wb = mat4::matvec(&eig.r_inv, &back);
        let wf = mat4::matvec(&eig.r_inv, &fwd);
        // Characteristic-wise upwinding of a dU/dphi; dr > 0 marches
        // outward, dr < 0 reverses the roles of the wind directions.
        let mut dw = [0.0; 4];
        for k in 0..4 {
            let lam = eig.lambdas[k];
            let upstream_back = lam * dr > 0.0;
            dw[k] = lam * if upstream_back { wb[k] } else { wf[k] } / d_phi;
        }
        let adv = mat4::matvec(&eig.r_mat, &dw);
        let mut v = uj.to_vec4();
        for i in 0..4 {
            v[i] -= dr * (adv[i] + g[i]);
        }
        out.push(StateVector::from_vec4(v));
    }
    Ok(out)
}

/// March the periodic Cauchy data from its radius to `r_end` (inward or
/// outward). Halts gracefully when the state degenerates.
pub fn march_cauchy(initial: &CauchyGrid, r_end: f64, cfg: &MarchConfig) -> Result<MarchOutcome> {
    if r_end.is_nan() || r_end <= 0.0 || initial.r.is_nan() || initial.r <= 0.0 {
        return Err(E1Error::InvalidInput("radii must be positive".into()));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(E1Error::CflViolation {
            detail: format!("CFL number {} outside (0, 1]", cfg.cfl),
        });
    }
    let tail = initial.spectral_tail();
    if tail > cfg.tail_tol {
        return Err(E1Error::NonsmoothInitialData { tail });
    }
    let direction = if r_end >= initial.r { 1.0 } else { -1.0 };
    let mut grid = initial.clone();
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    let status = loop {
        if (grid.r - r_end) * direction >= 0.0 {
            break MarchStatus::Completed;
        }
        if let Some(reason) = halt_reason(&grid) {
            break MarchStatus::Halted { r: grid.r, reason };
        }
        if steps >= cfg.max_steps {
            return Err(E1Error::CflViolation {
                detail: format!("step budget {} exhausted at r = {}", cfg.max_steps, grid.r),
            });
        }
        let speed = match max_speed(&grid) {
            Ok(s) => s,
            Err(e) => {
                break MarchStatus::Halted {
                    r: grid.r,
                    reason: e.to_string(),
                }
            }
        };
        let mut dr = if speed > 0.0 {
            cfg.cfl * grid.d_phi() / speed
        } else {
            grid.d_phi()
        };
        dr = dr.min((r_end - grid.r) * direction) * direction;
        let stepped = match cfg.scheme {
            Scheme::LaxWendroff => step_lax_wendroff(&grid, dr),
            Scheme::Upwind => step_upwind(&grid, dr),
        };
        let states = match stepped {
            Ok(s) => s,
            Err(e) => {
                break MarchStatus::Halted {
                    r: grid.r,
                    reason: e.to_string(),
                }
            }
        };
        grid = CauchyGrid {
            r: grid.r + dr,
            phi: grid.phi.clone(),
            states,
            winding: grid.winding,
        };
        steps += 1;
        if cfg.record_every > 0 && steps.is_multiple_of(cfg.record_every) {
            snapshots.push(grid.clone());
        }
    };
    Ok(MarchOutcome {
        final_grid: grid,
        snapshots,
        steps,
        status,
    })
}

/// Perturb one exact family by eps * cos(k phi) on the alpha component,
/// march both data sets to r_end, and report how the final deviation
/// scales when eps is halved. A ratio near 2 is the numerical signature
/// of well-posed linear dependence on the data.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub deviation_eps: f64,
    pub deviation_half_eps: f64,
    pub ratio: f64,
}

pub fn uniqueness_experiment(
    family: &SurfaceFamily,
    r_start: f64,
    r_end: f64,
    n_phi: usize,
    eps: f64,
    mode: usize,
    cfg: &MarchConfig,
) -> Result<UniquenessReport> {
    let base = CauchyGrid::from_family(family, r_start, n_phi)?;
    let run = |amplitude: f64| -> Result<CauchyGrid> {
        let mut grid = base.clone();
        for j in 0..n_phi {
            grid.states[j].alpha += amplitude * (mode as f64 * grid.phi[j]).cos();
        }
        let out = march_cauchy(&grid, r_end, cfg)?;
        match out.status {
            MarchStatus::Completed => Ok(out.final_grid),
            MarchStatus::Halted { r, reason } => Err(E1Error::NearCharacteristic {
                detail: format!("march halted at r = {r}: {reason}"),
            }),
        }
    };
    let reference = run(0.0)?;
    let dev_eps = run(eps)?.max_deviation(&reference);
    let dev_half = run(0.5 * eps)?.max_deviation(&reference);
    Ok(UniquenessReport {
        deviation_eps: dev_eps,
        deviation_half_eps: dev_half,
        ratio: dev_eps / dev_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{circular_distance, invariants_from_jet};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn parabola_state(r: f64, phi: f64) -> StateVector {
        exact_state(&SurfaceFamily::ParabolaPlus, r, phi).unwrap()
    }

    #[test]
    fn exact_state_matches_jet_invariants() {
        for fam in [
            SurfaceFamily::ParabolaPlus,
            SurfaceFamily::ParabolaMinus,
            SurfaceFamily::TypeI { rho0: 1.0 },
            SurfaceFamily::TypeII { rho0: 1.0 },
        ] {
            let r = match fam.domain_limit() {
                Some(lim) => 0.5 * lim,
                None => 0.8,
            };
            for phi in [0.0, 1.1, 4.4] {
                let st = exact_state(&fam, r, phi).unwrap();
                let jet = fam.jet(r * phi.cos(), r * phi.sin()).unwrap();
                let inv = invariants_from_jet(&jet).unwrap();
                assert!(
                    circular_distance(st.theta, inv.theta) < 1e-12,
                    "{}: theta {} vs {}",
                    fam.label(),
                    st.theta,
                    inv.theta
                );
                assert!((st.alpha - inv.alpha).abs() < 1e-12);
                assert!((st.h - inv.h).abs() < 1e-12, "{}", fam.label());
                assert!(st.constraint_residual().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn type1_m_matches_height_formula() {
        // Independent closed form: m = (4/rho0^4)(-u^2/r^2 - P/2).
        let rho0: f64 = 1.3;
        let fam = SurfaceFamily::TypeI { rho0 };
        let r = 0.4 * fam.domain_limit().unwrap();
        let st = exact_state(&fam, r, 0.7).unwrap();
        let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
        let u = fam.height(r).unwrap();
        let oracle = 4.0 / rho0.powi(4) * (-u * u / (r * r) - p / 2.0);
        assert!((st.m - oracle).abs() < 1e-12, "{} vs {oracle}", st.m);
    }

    #[test]
    fn exact_states_satisfy_pde() {
        // A U_r + B U_phi + C U = 0 with U_r by central differences and
        // U_phi = e_1 (the profiles depend on phi only through theta).
        for fam in [
            SurfaceFamily::ParabolaPlus,
            SurfaceFamily::ParabolaMinus,
            SurfaceFamily::TypeI { rho0: 1.0 },
            SurfaceFamily::TypeII { rho0: 1.0 },
        ] {
            let r = match fam.domain_limit() {
                Some(lim) => 0.5 * lim,
                None => 1.3,
            };
            let phi = 0.9;
            let st = exact_state(&fam, r, phi).unwrap();
            let h = 1e-6;
            let sp = exact_state(&fam, r + h, phi).unwrap();
            let sm = exact_state(&fam, r - h, phi).unwrap();
            let ur = [
                (sp.theta - sm.theta) / (2.0 * h),
                (sp.alpha - sm.alpha) / (2.0 * h),
                (sp.h - sm.h) / (2.0 * h),
                (sp.m - sm.m) / (2.0 * h),
            ];
            let uphi = [1.0, 0.0, 0.0, 0.0];
            let mats = assemble(&st, r, phi);
            let term = add(
                add(
                    mat4::matvec(&mats.a, &ur),
                    mat4::matvec(&mats.b, &uphi),
                    1.0,
                ),
                mat4::matvec(&mats.c, &st.to_vec4()),
                1.0,
            );
            assert!(
                mat4::vec_norm_inf(&term) < 1e-7,
                "{}: PDE residual {term:?}",
                fam.label()
            );
        }
    }

    #[test]
    fn parabola_sigma_eta_det() {
        let r = 1.7;
        let st = parabola_state(r, 0.3);
        let (s, c) = sc(&st, 0.3);
        let (sigma, eta) = sigma_eta(&st, s, c);
        assert!((sigma + 5.0 * SQRT3 / (12.0 * r)).abs() < 1e-14);
        assert!((eta + SQRT3 / (3.0 * r)).abs() < 1e-14);
        assert!((det_a(&st, 0.3) - 5.0 / (48.0 * r * r)).abs() < 1e-14);
    }

    fn random_state(rng: &mut impl Rng) -> (StateVector, f64, f64) {
        let phi = rng.gen_range(0.0..2.0 * PI);
        // Stay away from the characteristic set.
        let offset = rng.gen_range(0.15..PI - 0.15);
        let st = StateVector {
            theta: phi + offset,
            alpha: -rng.gen_range(0.1..3.0),
            h: rng.gen_range(-3.0..3.0),
            m: rng.gen_range(-2.0..2.0),
        };
        let r = rng.gen_range(0.3..3.0);
        (st, r, phi)
    }

    #[test]
    fn closed_forms_match_lu_on_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..10_000 {
            let (st, r, phi) = random_state(&mut rng);
            let mats = assemble(&st, r, phi);
            let det_closed = det_a(&st, phi);
            let det_num = mat4::det_lu(&mats.a);
            let dscale = 1.0f64.max(det_num.abs());
            assert!(
                (det_closed - det_num).abs() < 1e-10 * dscale,
                "det {det_closed} vs {det_num}"
            );
            if is_characteristic(&st, r, phi) {
                continue;
            }
            let inv_closed = inverse_a(&st, phi).unwrap();
            let inv_num = mat4::inverse_gauss(&mats.a).unwrap();
            let err = mat4::norm_inf(&mat4::sub(&inv_closed, &inv_num));
            let scale = 1.0f64.max(mat4::norm_inf(&inv_num));
            assert!(err < 1e-10 * scale, "inverse err {err}");
            let a_closed = a_matrix(&st, r, phi).unwrap();
            let a_num = mat4::matmul(&inv_num, &mats.b);
            let err = mat4::norm_inf(&mat4::sub(&a_closed, &a_num));
            let scale = 1.0f64.max(mat4::norm_inf(&a_num));
            assert!(err < 1e-10 * scale, "a-matrix err {err}");
            checked += 1;
        }
        assert!(checked > 9000, "only {checked} nondegenerate states");
    }

    #[test]
    fn eigen_residuals_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let (st, r, phi) = random_state(&mut rng);
            if is_characteristic(&st, r, phi) {
                continue;
            }
            let a = a_matrix(&st, r, phi).unwrap();
            let eig = eigen_system(&st, r, phi).unwrap();
            let scale = 1.0f64.max(mat4::norm_inf(&a));
            for k in 0..4 {
                let xi = [
                    eig.r_mat[0][k],
                    eig.r_mat[1][k],
                    eig.r_mat[2][k],
                    eig.r_mat[3][k],
                ];
                let ax = mat4::matvec(&a, &xi);
                let res = add(ax, xi, -eig.lambdas[k]);
                assert!(
                    mat4::vec_norm_inf(&res) < 1e-9 * scale,
                    "eigen residual {res:?} for case {:?}",
                    eig.case
                );
            }
            // Reconstruction a = R diag(lambda) R^{-1}.
            let mut lam = mat4::ZERO;
            for (k, row) in lam.iter_mut().enumerate() {
                row[k] = eig.lambdas[k];
            }
            let rebuilt = mat4::matmul(&eig.r_mat, &mat4::matmul(&lam, &eig.r_inv));
            let err = mat4::norm_inf(&mat4::sub(&rebuilt, &a));
            assert!(err < 1e-9 * scale, "reconstruction err {err}");
        }
    }

    #[test]
    fn eigen_degenerate_cases() {
        let phi = 0.4;
        let zero_h = StateVector {
            theta: phi + 1.0,
            alpha: -0.7,
            h: 0.0,
            m: -0.2,
        };
        let eig = eigen_system(&zero_h, 1.0, phi).unwrap();
        assert_eq!(eig.case, EigenCase::ZeroH);
        assert!((eig.lambdas[0] - eig.lambdas[2]).abs() < 1e-14);

        let zero_alpha = StateVector {
            theta: phi + 1.0,
            alpha: 0.0,
            h: 1.5,
            m: 0.0,
        };
        let eig = eigen_system(&zero_alpha, 1.0, phi).unwrap();
        assert_eq!(eig.case, EigenCase::ZeroAlpha);
        let a = a_matrix(&zero_alpha, 1.0, phi).unwrap();
        let expect = mat4::scale(&mat4::identity(), eig.lambdas[0]);
        assert!(mat4::norm_inf(&mat4::sub(&a, &expect)) < 1e-12);
    }

    proptest! {
        #[test]
        fn det_closed_form_always_matches(
            offset in 0.05f64..3.0,
            alpha in -3.0f64..-0.05,
            h in -3.0f64..3.0,
            phi in 0.0f64..std::f64::consts::TAU,
            r in 0.2f64..3.0,
        ) {
            let st = StateVector { theta: phi + offset, alpha, h, m: 0.0 };
            let mats = assemble(&st, r, phi);
            let closed = det_a(&st, phi);
            let num = mat4::det_lu(&mats.a);
            prop_assert!((closed - num).abs() < 1e-10 * 1.0f64.max(num.abs()));
        }
    }

    #[test]
    fn identities_vanish_and_refine() {
        for fam in [
            SurfaceFamily::ParabolaPlus,
            SurfaceFamily::TypeI { rho0: 2.0 },
            SurfaceFamily::TypeII { rho0: 2.0 },
        ] {
            let (lo, hi) = match fam.domain_limit() {
                Some(lim) => (0.4 * lim, 0.7 * lim),
                None => (0.8, 1.6),
            };
            let coarse = verify_identities(&fam, lo, hi, 4, 8, 1e-3).unwrap();
            let fine = verify_identities(&fam, lo, hi, 4, 8, 5e-4).unwrap();
            assert!(
                fine.max() < 1e-2,
                "{}: residuals {fine:?}",
                fam.label()
            );
            // Second-order stencils: quartering under h -> h/2 (with
            // slack for the residual floor of the nested stencils).
            assert!(
                fine.max() < 0.4 * coarse.max().max(1e-10),
                "{}: coarse {:.3e} fine {:.3e}",
                fam.label(),
                coarse.max(),
                fine.max()
            );
        }
    }

    #[test]
    fn march_preserves_exact_solution() {
        for scheme in [Scheme::LaxWendroff, Scheme::Upwind] {
            let fam = SurfaceFamily::ParabolaPlus;
            let grid = CauchyGrid::from_family(&fam, 1.0, 128).unwrap();
            let cfg = MarchConfig {
                scheme,
                ..MarchConfig::default()
            };
            let out = march_cauchy(&grid, 1.3, &cfg).unwrap();
            assert_eq!(out.status, MarchStatus::Completed);
            let exact = CauchyGrid::from_family(&fam, out.final_grid.r, 128).unwrap();
            let dev = out.final_grid.max_deviation(&exact);
            let bound = match scheme {
                Scheme::LaxWendroff => 1e-3,
                Scheme::Upwind => 5e-2,
            };
            assert!(dev < bound, "{scheme:?}: deviation {dev}");
        }
    }

    fn march_error(scheme: Scheme, n_phi: usize) -> f64 {
        let fam = SurfaceFamily::ParabolaPlus;
        let grid = CauchyGrid::from_family(&fam, 1.0, n_phi).unwrap();
        let cfg = MarchConfig {
            scheme,
            ..MarchConfig::default()
        };
        let out = march_cauchy(&grid, 1.25, &cfg).unwrap();
        assert_eq!(out.status, MarchStatus::Completed);
        let exact = CauchyGrid::from_family(&fam, out.final_grid.r, n_phi).unwrap();
        out.final_grid.max_deviation(&exact)
    }

    #[test]
    fn lax_wendroff_second_order() {
        let e1 = march_error(Scheme::LaxWendroff, 64);
        let e2 = march_error(Scheme::LaxWendroff, 128);
        let e3 = march_error(Scheme::LaxWendroff, 256);
        let o1 = (e1 / e2).log2();
        let o2 = (e2 / e3).log2();
        assert!(
            o1 > 1.8 && o2 > 1.8,
            "orders {o1:.2}, {o2:.2} from errors {e1:.3e}, {e2:.3e}, {e3:.3e}"
        );
    }

    #[test]
    fn upwind_first_order() {
        let e1 = march_error(Scheme::Upwind, 64);
        let e2 = march_error(Scheme::Upwind, 128);
        let e3 = march_error(Scheme::Upwind, 256);
        let o1 = (e1 / e2).log2();
        let o2 = (e2 / e3).log2();
        assert!(
            o1 > 0.9 && o2 > 0.9,
            "orders {o1:.2}, {o2:.2} from errors {e1:.3e}, {e2:.3e}, {e3:.3e}"
        );
    }

    #[test]
    fn march_inward_works() {
        let fam = SurfaceFamily::ParabolaPlus;
        let grid = CauchyGrid::from_family(&fam, 1.5, 128).unwrap();
        let out = march_cauchy(&grid, 1.3, &MarchConfig::default()).unwrap();
        assert_eq!(out.status, MarchStatus::Completed);
        let exact = CauchyGrid::from_family(&fam, out.final_grid.r, 128).unwrap();
        assert!(out.final_grid.max_deviation(&exact) < 1e-3);
    }

    #[test]
    fn nonsmooth_data_rejected() {
        let fam = SurfaceFamily::ParabolaPlus;
        let mut grid = CauchyGrid::from_family(&fam, 1.0, 64).unwrap();
        // Inject a sawtooth into alpha.
        for (j, st) in grid.states.iter_mut().enumerate() {
            st.alpha += 1e-2 * if j % 2 == 0 { 1.0 } else { -1.0 };
        }
        match march_cauchy(&grid, 1.2, &MarchConfig::default()) {
            Err(E1Error::NonsmoothInitialData { tail }) => assert!(tail > 0.5),
            other => panic!("expected nonsmooth rejection, got {other:?}"),
        }
    }

    #[test]
    fn smooth_perturbation_accepted() {
        let fam = SurfaceFamily::ParabolaPlus;
        let mut grid = CauchyGrid::from_family(&fam, 1.0, 64).unwrap();
        for (j, st) in grid.states.iter_mut().enumerate() {
            st.alpha += 1e-3 * (3.0 * grid.phi[j]).cos();
        }
        let out = march_cauchy(&grid, 1.1, &MarchConfig::default()).unwrap();
        assert_eq!(out.status, MarchStatus::Completed);
    }

    #[test]
    fn uniqueness_scales_linearly() {
        let report = uniqueness_experiment(
            &SurfaceFamily::ParabolaPlus,
            1.0,
            1.2,
            128,
            1e-4,
            3,
            &MarchConfig::default(),
        )
        .unwrap();
        assert!(
            report.ratio > 1.0 && report.ratio < 4.0,
            "ratio {}",
            report.ratio
        );
        assert!(report.deviation_eps > 0.0);
    }

    #[test]
    fn winding_measured_from_samples() {
        let fam = SurfaceFamily::TypeII { rho0: 1.0 };
        let n = 64;
        let r = 0.5 * fam.domain_limit().unwrap();
        let states: Vec<StateVector> = (0..n)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n as f64;
                let mut st = exact_state(&fam, r, phi).unwrap();
                st.theta = crate::jets::normalize_angle(st.theta);
                st
            })
            .collect();
        let grid = CauchyGrid::from_samples(r, states).unwrap();
        assert_eq!(grid.winding, 1);
        // Seam-aware access: one full wrap adds 2 pi.
        let (a, _) = grid.at(0);
        let (b, _) = grid.at(n as isize);
        assert!((b.theta - a.theta - 2.0 * PI).abs() < 1e-12);
    }
}
