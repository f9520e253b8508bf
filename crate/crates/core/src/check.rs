//! Self-verification suites. Each suite re-derives a family of
//! closed-form results by an independent numerical route and reports
//! pass/fail against pinned tolerances. The command-line `check`
//! subcommand and the integration tests both run through these.

use crate::cauchy::{
    self, march_cauchy, uniqueness_experiment, CauchyGrid, MarchConfig, Scheme, StateVector,
};
use crate::jets::{self, SurfaceJet};
use crate::mat4;
use crate::rotsym::{self, ProfileFamily};
use crate::secondvar::{self, TorusField};
use crate::surfaces::{SurfaceFamily, SQRT3};
use rand::Rng;
use rand::SeedableRng;
use std::f64::consts::PI;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn bound(name: &str, value: f64, tol: f64) -> CheckResult {
    CheckResult::new(
        name,
        value.is_finite() && value < tol,
        format!("{value:.3e} (tolerance {tol:.1e})"),
    )
}

fn at_least(name: &str, value: f64, floor: f64) -> CheckResult {
    CheckResult::new(
        name,
        value.is_finite() && value > floor,
        format!("{value:.3} (floor {floor})"),
    )
}

pub const SUITE_NAMES: [&str; 9] = [
    "hyperbolicity",
    "linalg",
    "eigen",
    "exact-surfaces",
    "ode",
    "gluing",
    "march",
    "secondvar",
    "dilation",
];

pub fn run_suite(name: &str) -> Option<Vec<CheckResult>> {
    match name {
        "hyperbolicity" => Some(suite_hyperbolicity()),
        "linalg" => Some(suite_linalg()),
        "eigen" => Some(suite_eigen()),
        "exact-surfaces" => Some(suite_exact_surfaces()),
        "ode" => Some(suite_ode()),
        "gluing" => Some(suite_gluing()),
        "march" => Some(suite_march()),
        "secondvar" => Some(suite_secondvar()),
        "dilation" => Some(suite_dilation()),
        _ => None,
    }
}

pub fn run_all() -> Vec<CheckResult> {
    SUITE_NAMES
        .iter()
        .flat_map(|n| run_suite(n).unwrap())
        .collect()
}

fn random_jet(rng: &mut impl Rng) -> SurfaceJet {
    loop {
        let jet = SurfaceJet {
            x: rng.gen_range(-3.0..3.0),
            y: rng.gen_range(-3.0..3.0),
            u: rng.gen_range(-3.0..3.0),
            ux: rng.gen_range(-3.0..3.0),
            uy: rng.gen_range(-3.0..3.0),
            uxx: rng.gen_range(-3.0..3.0),
            uxy: rng.gen_range(-3.0..3.0),
            uyy: rng.gen_range(-3.0..3.0),
        };
        if jet.d() > 1e-3 {
            return jet;
        }
    }
}

/// Suite 1: the linearized graph equation is uniformly hyperbolic; its
/// discriminant equals -1/4 at every nonsingular jet.
pub fn suite_hyperbolicity() -> Vec<CheckResult> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let jet = random_jet(&mut rng);
        let (_, _, _, disc) = jets::hyperbolicity_witness(&jet).unwrap();
        worst = worst.max((disc + 0.25).abs());
    }
    vec![bound(
        "hyperbolicity: |disc + 1/4| over 10^4 random jets",
        worst,
        1e-12,
    )]
}

fn random_state(rng: &mut impl Rng) -> (StateVector, f64, f64) {
    let phi = rng.gen_range(0.0..2.0 * PI);
    let st = StateVector {
        theta: phi + rng.gen_range(0.15..PI - 0.15),
        alpha: -rng.gen_range(0.1..3.0),
        h: rng.gen_range(-3.0..3.0),
        m: rng.gen_range(-2.0..2.0),
    };
    (st, rng.gen_range(0.3..3.0), phi)
}

/// Suite 2: closed-form determinant, inverse and A^{-1}B against LU.
pub fn suite_linalg() -> Vec<CheckResult> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(202);
    let mut worst_det: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for _ in 0..10_000 {
        let (st, r, phi) = random_state(&mut rng);
        let mats = cauchy::assemble(&st, r, phi);
        let det_num = mat4::det_lu(&mats.a);
        worst_det = worst_det
            .max((cauchy::det_a(&st, phi) - det_num).abs() / 1.0f64.max(det_num.abs()));
        if cauchy::is_characteristic(&st, r, phi) {
            continue;
        }
        let inv_num = mat4::inverse_gauss(&mats.a).unwrap();
        let inv_closed = cauchy::inverse_a(&st, phi).unwrap();
        worst_inv = worst_inv.max(
            mat4::norm_inf(&mat4::sub(&inv_closed, &inv_num))
                / 1.0f64.max(mat4::norm_inf(&inv_num)),
        );
        let a_num = mat4::matmul(&inv_num, &mats.b);
        let a_closed = cauchy::a_matrix(&st, r, phi).unwrap();
        worst_a = worst_a.max(
            mat4::norm_inf(&mat4::sub(&a_closed, &a_num)) / 1.0f64.max(mat4::norm_inf(&a_num)),
        );
    }
    vec![
        bound("linalg: closed-form det vs LU over 10^4 states", worst_det, 1e-10),
        bound("linalg: closed-form inverse vs LU", worst_inv, 1e-10),
        bound("linalg: closed-form A^-1 B vs LU", worst_a, 1e-10),
    ]
}

/// Suite 3: eigenvalue/eigenvector residuals of A^{-1}B.
pub fn suite_eigen() -> Vec<CheckResult> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (st, r, phi) = random_state(&mut rng);
        if cauchy::is_characteristic(&st, r, phi) {
            continue;
        }
        let a = cauchy::a_matrix(&st, r, phi).unwrap();
        let eig = cauchy::eigen_system(&st, r, phi).unwrap();
        let scale = 1.0f64.max(mat4::norm_inf(&a));
        for k in 0..4 {
            let xi = [
                eig.r_mat[0][k],
                eig.r_mat[1][k],
                eig.r_mat[2][k],
                eig.r_mat[3][k],
            ];
            let ax = mat4::matvec(&a, &xi);
            let res = [
                ax[0] - eig.lambdas[k] * xi[0],
                ax[1] - eig.lambdas[k] * xi[1],
                ax[2] - eig.lambdas[k] * xi[2],
                ax[3] - eig.lambdas[k] * xi[3],
            ];
            worst = worst.max(mat4::vec_norm_inf(&res) / scale);
        }
    }
    vec![bound(
        "eigen: relative residual |a xi - lambda xi| over 10^4 states",
        worst,
        1e-9,
    )]
}

fn fd_jet(fam: &SurfaceFamily, x: f64, y: f64, h: f64) -> SurfaceJet {
    let u = |x: f64, y: f64| fam.jet(x, y).unwrap().u;
    SurfaceJet {
        x,
        y,
        u: u(x, y),
        ux: (u(x + h, y) - u(x - h, y)) / (2.0 * h),
        uy: (u(x, y + h) - u(x, y - h)) / (2.0 * h),
        uxx: (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h),
        uyy: (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h),
        uxy: (u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h))
            / (4.0 * h * h),
    }
}

/// Suite 4: the four closed-form families satisfy the graph equation at
/// machine precision, and finite-difference jets of their heights
/// converge to zero residual at second order.
pub fn suite_exact_surfaces() -> Vec<CheckResult> {
    let families = [
        SurfaceFamily::ParabolaPlus,
        SurfaceFamily::ParabolaMinus,
        SurfaceFamily::TypeI { rho0: 1.0 },
        SurfaceFamily::TypeII { rho0: 1.0 },
    ];
    let mut worst: f64 = 0.0;
    let mut worst_order = f64::INFINITY;
    for fam in &families {
        let r_ref = match fam.domain_limit() {
            Some(lim) => 0.5 * lim,
            None => 1.0,
        };
        for k in 0..50 {
            let phi = 2.0 * PI * k as f64 / 50.0;
            let r = r_ref * (0.6 + 0.4 * k as f64 / 50.0);
            let jet = fam.jet(r * phi.cos(), r * phi.sin()).unwrap();
            worst = worst.max(jets::e1_residual(&jet).unwrap().abs());
        }
        // FD convergence at one interior point.
        let (x, y) = (r_ref * 0.8, r_ref * 0.3);
        let h0 = r_ref * 1e-2;
        let e1 = jets::e1_residual(&fd_jet(fam, x, y, h0)).unwrap().abs();
        let e2 = jets::e1_residual(&fd_jet(fam, x, y, h0 / 2.0)).unwrap().abs();
        worst_order = worst_order.min((e1 / e2).log2());
    }
    vec![
        bound(
            "exact-surfaces: graph-equation residual on closed forms",
            worst,
            1e-10,
        ),
        at_least(
            "exact-surfaces: FD-jet residual convergence order",
            worst_order,
            1.8,
        ),
    ]
}

/// Suite 5: RK4 on the w-equation reproduces the sphere profiles at
/// fourth order and the reconstructed heights satisfy the implicit
/// sphere equation.
pub fn suite_ode() -> Vec<CheckResult> {
    let fam = ProfileFamily::TypeI(1.0);
    let r0 = 0.05;
    let w0 = rotsym::closed_form_w(&fam, r0).unwrap();
    let mut errors = Vec::new();
    for &h in &[4e-3, 2e-3, 1e-3] {
        let (profile, _) = rotsym::integrate_w(r0, w0, 0.3, h).unwrap();
        let exact = rotsym::closed_form_w(&fam, *profile.r.last().unwrap()).unwrap();
        errors.push((profile.w.last().unwrap() - exact).abs());
    }
    let order = (errors[0] / errors[2]).log2() / 2.0;
    let mut results = vec![
        at_least("ode: RK4 observed order on the sphere profile", order, 3.7),
        bound("ode: RK4 error at h = 1e-3", errors[2], 1e-8),
    ];
    let mut worst_defect: f64 = 0.0;
    for type1 in [true, false] {
        let family = if type1 {
            ProfileFamily::TypeI(1.0)
        } else {
            ProfileFamily::TypeII(1.0)
        };
        let r_end = 0.95
            * if type1 {
                rotsym::blow_up_radius_type1(1.0)
            } else {
                rotsym::blow_up_radius_type2(1.0)
            };
        let mut profile = rotsym::sample_family(&family, 1e-4, r_end, 4001).unwrap();
        rotsym::u_from_w(&mut profile, rotsym::standard_u0(&family));
        worst_defect = worst_defect.max(rotsym::implicit_sphere_defect(&profile).unwrap());
    }
    results.push(bound(
        "ode: implicit sphere-equation defect of reconstructed heights",
        worst_defect,
        1e-7,
    ));
    results
}

/// Suite 6: the C^2 gluing obstruction between the two sphere families.
pub fn suite_gluing() -> Vec<CheckResult> {
    let rho0 = 1.0;
    let report = rotsym::gluing_second_derivatives(rho0);
    let h = 1e-5;
    let fd = |f: &dyn Fn(f64) -> f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    let fd1 = fd(&|u| rotsym::type1_radius_of_u(rho0, u));
    let rel1 = (fd1 - report.ruu_type1).abs() / report.ruu_type1.abs();
    let rho0_small = rotsym::blow_up_radius_type1(rho0) / rotsym::blow_up_radius_type2(1.0);
    let fd2 = fd(&|u| rotsym::type2_radius_of_u(rho0_small, u));
    let rel2 =
        (fd2 - report.ruu_type2_at_same_radius).abs() / report.ruu_type2_at_same_radius.abs();
    vec![
        bound("gluing: type I r''(0) closed form vs FD", rel1, 1e-5),
        bound("gluing: type II r''(0) closed form vs FD", rel2, 1e-5),
        bound(
            "gluing: curvature ratio vs 7 + 4 sqrt(3)",
            (report.ratio - (7.0 + 4.0 * SQRT3)).abs(),
            1e-8,
        ),
    ]
}

fn march_error(scheme: Scheme, n_phi: usize) -> f64 {
    let fam = SurfaceFamily::ParabolaPlus;
    let grid = CauchyGrid::from_family(&fam, 1.0, n_phi).unwrap();
    let cfg = MarchConfig {
        scheme,
        ..MarchConfig::default()
    };
    let out = march_cauchy(&grid, 1.25, &cfg).unwrap();
    let exact = CauchyGrid::from_family(&fam, out.final_grid.r, n_phi).unwrap();
    out.final_grid.max_deviation(&exact)
}

/// Suite 7: convergence orders of the two marching schemes and linear
/// response to small data perturbations.
pub fn suite_march() -> Vec<CheckResult> {
    let lw = {
        let e1 = march_error(Scheme::LaxWendroff, 64);
        let e2 = march_error(Scheme::LaxWendroff, 256);
        (e1 / e2).log2() / 2.0
    };
    let up = {
        let e1 = march_error(Scheme::Upwind, 64);
        let e2 = march_error(Scheme::Upwind, 256);
        (e1 / e2).log2() / 2.0
    };
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
    let linearity_ok = report.ratio > 1.0 && report.ratio < 4.0;
    vec![
        at_least("march: Lax-Wendroff observed order", lw, 1.8),
        at_least("march: upwind observed order", up, 0.9),
        CheckResult::new(
            "march: perturbation response halves with the amplitude",
            linearity_ok,
            format!("deviation ratio {:.3} (expect ~2, factor-2 band)", report.ratio),
        ),
    ]
}

/// Suite 8: the spectral second variation at the Clifford torus.
pub fn suite_secondvar() -> Vec<CheckResult> {
    let mut worst_rel: f64 = 0.0;
    for seed in 0..100u64 {
        let f = TorusField::random(seed, 6).unwrap();
        let a = secondvar::second_variation(&f);
        let b = secondvar::second_variation_operator_form(&f);
        worst_rel = worst_rel.max((a - b).abs() / a.abs().max(1.0));
    }
    let bg = secondvar::TorusBackground::new(1.0 / std::f64::consts::SQRT_2).unwrap();
    let q1 = secondvar::second_variation(&TorusField::cosine_diagonal(1).unwrap());
    let q1_expect = -6.0 * std::f64::consts::SQRT_2 * PI * PI;
    let sweep = secondvar::criticality_sweep(99).unwrap();
    let sign_changes = sweep
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .count();
    let bracket_ok = sweep
        .windows(2)
        .find(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| w[0].0 < 1.0 / std::f64::consts::SQRT_2 && 1.0 / std::f64::consts::SQRT_2 < w[1].0)
        .unwrap_or(false);
    vec![
        bound(
            "secondvar: operator vs integrated-by-parts form on 100 random fields",
            worst_rel,
            1e-10,
        ),
        bound(
            "secondvar: Hcr at the Clifford torus equals 1/2",
            (bg.hcr() - 0.5).abs(),
            1e-14,
        ),
        bound(
            "secondvar: lowest diagonal mode value -6 sqrt(2) pi^2",
            (q1 - q1_expect).abs(),
            1e-10,
        ),
        CheckResult::new(
            "secondvar: 99-point criticality sweep has one zero at 1/sqrt(2)",
            sign_changes == 1 && bracket_ok,
            format!("{sign_changes} sign change(s), bracket correct: {bracket_ok}"),
        ),
    ]
}

/// Suite 9: the patch energy is invariant under Heisenberg dilations.
pub fn suite_dilation() -> Vec<CheckResult> {
    let xy_jet = |x: f64, y: f64| {
        Ok(SurfaceJet {
            x,
            y,
            u: x * y,
            ux: y,
            uy: x,
            uxx: 0.0,
            uxy: 1.0,
            uyy: 0.0,
        })
    };
    let n = 512;
    let base = jets::integrate_e1_patch(xy_jet, [1.0, 2.0, 1.0, 2.0], n, n).unwrap();
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 2.0, 4.0] {
        let rect = [lambda, 2.0 * lambda, lambda, 2.0 * lambda];
        let dilated = jets::integrate_e1_patch(
            |x, y| jets::dilate_jet(&xy_jet(x / lambda, y / lambda)?, lambda),
            rect,
            n,
            n,
        )
        .unwrap();
        worst = worst.max((base - dilated).abs() / base.abs());
    }
    vec![bound(
        "dilation: patch-energy relative drift for lambda in {1/2, 2, 4}",
        worst,
        1e-6,
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_suite_exists() {
        for name in SUITE_NAMES {
            assert!(run_suite(name).is_some(), "{name}");
        }
        assert!(run_suite("no-such-suite").is_none());
    }
}
