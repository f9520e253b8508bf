//! Python bindings for the vanishing-E1 surface laboratory: pointwise
//! invariants, the rotationally symmetric families, the hyperbolic
//! Cauchy march and the Clifford-torus second variation.

// The #[pyfunction] expansion converts PyErr to PyErr.
#![allow(clippy::useless_conversion)]

use e1lab::cauchy::{self, CauchyGrid, MarchConfig, MarchStatus, Scheme};
use e1lab::error::E1Error;
use e1lab::jets;
use e1lab::rotsym::{self, ProfileStatus};
use e1lab::secondvar::{self, TorusField};
use e1lab::surfaces::{PolySurface, SurfaceFamily};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: E1Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_family(name: &str, rho0: f64) -> PyResult<SurfaceFamily> {
    match name {
        "parabola+" => Ok(SurfaceFamily::ParabolaPlus),
        "parabola-" => Ok(SurfaceFamily::ParabolaMinus),
        "type1" => Ok(SurfaceFamily::TypeI { rho0 }),
        "type2" => Ok(SurfaceFamily::TypeII { rho0 }),
        other => Err(PyValueError::new_err(format!(
            "unknown family `{other}` (parabola+, parabola-, type1, type2)"
        ))),
    }
}

fn jet_for(surface: &str, rho0: f64, x: f64, y: f64) -> PyResult<jets::SurfaceJet> {
    if let Some(expr) = surface.strip_prefix("custom:") {
        Ok(PolySurface::parse(expr).map_err(err)?.jet(x, y))
    } else {
        parse_family(surface, rho0)?.jet(x, y).map_err(err)
    }
}

/// Pointwise invariants of a surface at (x, y) as a dict with keys
/// D, theta, alpha, H, residual, density, area_element, discriminant.
#[pyfunction]
#[pyo3(signature = (surface, x, y, rho0 = 1.0))]
fn invariants<'py>(
    py: Python<'py>,
    surface: &str,
    x: f64,
    y: f64,
    rho0: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let jet = jet_for(surface, rho0, x, y)?;
    let inv = jets::invariants_from_jet(&jet).map_err(err)?;
    let (_, _, _, disc) = jets::hyperbolicity_witness(&jet).map_err(err)?;
    let out = PyDict::new_bound(py);
    out.set_item("D", inv.d)?;
    out.set_item("theta", inv.theta)?;
    out.set_item("alpha", inv.alpha)?;
    out.set_item("H", inv.h)?;
    out.set_item("residual", jets::e1_residual(&jet).map_err(err)?)?;
    out.set_item("density", jets::e1_density(&jet).map_err(err)?)?;
    out.set_item("area_element", jets::area_element(&jet).map_err(err)?)?;
    out.set_item("discriminant", disc)?;
    Ok(out)
}

/// Integrate the profile equation w' = w_rhs(r, w) by RK4; returns
/// (r_samples, w_samples, status) with status "completed" or "blow-up".
#[pyfunction]
#[pyo3(signature = (r_start, w0, r_end, step = 1e-3))]
fn integrate_profile(
    r_start: f64,
    w0: f64,
    r_end: f64,
    step: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, String)> {
    let (profile, status) = rotsym::integrate_w(r_start, w0, r_end, step).map_err(err)?;
    let status = match status {
        ProfileStatus::Completed => "completed".to_string(),
        ProfileStatus::BlowUp { r } => format!("blow-up at r = {r}"),
    };
    Ok((profile.r, profile.w, status))
}

/// Classify an integrated profile against the closed-form families;
/// returns (label, max_deviation).
#[pyfunction]
#[pyo3(signature = (r_start, w0, r_end, step = 1e-3, tol = 1e-6))]
fn classify_profile(
    r_start: f64,
    w0: f64,
    r_end: f64,
    step: f64,
    tol: f64,
) -> PyResult<(String, f64)> {
    let (profile, _) = rotsym::integrate_w(r_start, w0, r_end, step).map_err(err)?;
    let c = rotsym::classify(&profile, tol).map_err(err)?;
    Ok((c.family.label(), c.max_deviation))
}

/// The C^2 gluing obstruction: (r''(0) type I, r''(0) type II, ratio).
#[pyfunction]
#[pyo3(signature = (rho0 = 1.0))]
fn gluing(rho0: f64) -> (f64, f64, f64) {
    let report = rotsym::gluing_second_derivatives(rho0);
    (
        report.ruu_type1,
        report.ruu_type2_at_same_radius,
        report.ratio,
    )
}

/// March periodic Cauchy data of a family; returns a dict with the final
/// radius, step count, status string and the worst state-constraint
/// defect m + alpha^2/2 + H^2/6 on the final slice.
#[pyfunction]
#[pyo3(signature = (family, r_start, r_end, n_phi = 128, scheme = "lw", rho0 = 1.0))]
fn march<'py>(
    py: Python<'py>,
    family: &str,
    r_start: f64,
    r_end: f64,
    n_phi: usize,
    scheme: &str,
    rho0: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = parse_family(family, rho0)?;
    let cfg = MarchConfig {
        scheme: match scheme {
            "lw" => Scheme::LaxWendroff,
            "upwind" => Scheme::Upwind,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown scheme `{other}` (lw, upwind)"
                )))
            }
        },
        ..MarchConfig::default()
    };
    let grid = CauchyGrid::from_family(&fam, r_start, n_phi).map_err(err)?;
    let out = cauchy::march_cauchy(&grid, r_end, &cfg).map_err(err)?;
    let worst_constraint = out
        .final_grid
        .states
        .iter()
        .map(|s| s.constraint_residual().abs())
        .fold(0.0f64, f64::max);
    let d = PyDict::new_bound(py);
    d.set_item("r", out.final_grid.r)?;
    d.set_item("steps", out.steps)?;
    d.set_item(
        "status",
        match out.status {
            MarchStatus::Completed => "completed".to_string(),
            MarchStatus::Halted { r, reason } => format!("halted at r = {r}: {reason}"),
        },
    )?;
    d.set_item("max_constraint_residual", worst_constraint)?;
    Ok(d)
}

/// Characteristic structure at an exact state: (case, speeds).
#[pyfunction]
#[pyo3(signature = (family, r, phi = 0.0, rho0 = 1.0))]
fn eigen_speeds(family: &str, r: f64, phi: f64, rho0: f64) -> PyResult<(String, Vec<f64>)> {
    let fam = parse_family(family, rho0)?;
    let st = cauchy::exact_state(&fam, r, phi).map_err(err)?;
    let eig = cauchy::eigen_system(&st, r, phi).map_err(err)?;
    Ok((format!("{:?}", eig.case), eig.lambdas.to_vec()))
}

/// Second-variation values on the diagonal cosine modes l = 0..=l_max.
#[pyfunction]
#[pyo3(signature = (l_max = 8))]
fn mode_spectrum(l_max: i64) -> PyResult<Vec<(i64, f64)>> {
    secondvar::mode_spectrum(l_max).map_err(err)
}

/// Second variation of a random real field in both algebraic forms.
#[pyfunction]
#[pyo3(signature = (seed = 1, max_mode = 6))]
fn second_variation_random(seed: u64, max_mode: i64) -> PyResult<(f64, f64)> {
    let f = TorusField::random(seed, max_mode).map_err(err)?;
    Ok((
        secondvar::second_variation(&f),
        secondvar::second_variation_operator_form(&f),
    ))
}

/// First-variation density of the torus of radius rho1; zero exactly at
/// the Clifford radius 1/sqrt(2).
#[pyfunction]
fn criticality(rho1: f64) -> PyResult<f64> {
    Ok(secondvar::TorusBackground::new(rho1)
        .map_err(err)?
        .first_variation_density())
}

/// Value of the invariant measure on the coordinate bivector (1/2).
#[pyfunction]
fn measure_factor() -> f64 {
    secondvar::measure_factor()
}

/// Run all self-verification suites; returns (name, passed, detail) rows.
#[pyfunction]
fn run_checks() -> Vec<(String, bool, String)> {
    e1lab::check::run_all()
        .into_iter()
        .map(|r| (r.name, r.passed, r.detail))
        .collect()
}

#[pymodule]
fn e1lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_profile, m)?)?;
    m.add_function(wrap_pyfunction!(classify_profile, m)?)?;
    m.add_function(wrap_pyfunction!(gluing, m)?)?;
    m.add_function(wrap_pyfunction!(march, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_speeds, m)?)?;
    m.add_function(wrap_pyfunction!(mode_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(second_variation_random, m)?)?;
    m.add_function(wrap_pyfunction!(criticality, m)?)?;
    m.add_function(wrap_pyfunction!(measure_factor, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
