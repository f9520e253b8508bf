//! Closed-form surface families: the two paraboloids u = ±(sqrt(3)/2) r^2
//! and the type I / type II shifted Heisenberg spheres
//! (r^2 ± (sqrt(3)/2) rho0^2)^2 + 4 u^2 = rho0^4, plus small polynomial
//! graphs for ad-hoc experiments. All of them produce exact second-order
//! jets for the invariant machinery.

use crate::error::{E1Error, Result};
use crate::jets::SurfaceJet;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Blow-up radius factor of the type I family: r0 = sqrt((2 - sqrt(3))/2) rho0.
pub fn type1_radius(rho0: f64) -> f64 {
    ((2.0 - SQRT3) / 2.0).sqrt() * rho0
}

/// Outer radius of the type II family: b = sqrt((2 + sqrt(3))/2) rho0.
pub fn type2_radius(rho0: f64) -> f64 {
    ((2.0 + SQRT3) / 2.0).sqrt() * rho0
}

/// The four exact rotationally symmetric solution families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceFamily {
    /// u = (sqrt(3)/2) r^2.
    ParabolaPlus,
    /// u = -(sqrt(3)/2) r^2.
    ParabolaMinus,
    /// Lower semi-sphere graph of (r^2 + (sqrt(3)/2) rho0^2)^2 + 4u^2 = rho0^4.
    TypeI { rho0: f64 },
    /// Upper semi-sphere graph of (r^2 - (sqrt(3)/2) rho0^2)^2 + 4u^2 = rho0^4.
    TypeII { rho0: f64 },
}

impl SurfaceFamily {
    pub fn label(&self) -> String {
        match self {
            SurfaceFamily::ParabolaPlus => "parabola+".into(),
            SurfaceFamily::ParabolaMinus => "parabola-".into(),
            SurfaceFamily::TypeI { rho0 } => format!("type1(rho0={rho0})"),
            SurfaceFamily::TypeII { rho0 } => format!("type2(rho0={rho0})"),
        }
    }

    /// Largest admissible radius, when the family has one.
    pub fn domain_limit(&self) -> Option<f64> {
        match self {
            SurfaceFamily::ParabolaPlus | SurfaceFamily::ParabolaMinus => None,
            SurfaceFamily::TypeI { rho0 } => Some(type1_radius(*rho0)),
            SurfaceFamily::TypeII { rho0 } => Some(type2_radius(*rho0)),
        }
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        if r.is_nan() || r <= 0.0 {
            return Err(E1Error::DomainExceeded {
                r,
                limit: self.domain_limit().unwrap_or(f64::INFINITY),
                family: self.label(),
            });
        }
        if let Some(limit) = self.domain_limit() {
            if r >= limit {
                return Err(E1Error::DomainExceeded {
                    r,
                    limit,
                    family: self.label(),
                });
            }
        }
        Ok(())
    }

    /// Height profile u(r).
    pub fn height(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(match self {
            SurfaceFamily::ParabolaPlus => SQRT3 / 2.0 * r * r,
            SurfaceFamily::ParabolaMinus => -SQRT3 / 2.0 * r * r,
            SurfaceFamily::TypeI { rho0 } => {
                let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
                -0.5 * (rho0.powi(4) - p * p).sqrt()
            }
            SurfaceFamily::TypeII { rho0 } => {
                let p = r * r - SQRT3 / 2.0 * rho0 * rho0;
                0.5 * (rho0.powi(4) - p * p).sqrt()
            }
        })
    }

    /// First radial derivative u_r(r).
    pub fn slope(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(match self {
            SurfaceFamily::ParabolaPlus => SQRT3 * r,
            SurfaceFamily::ParabolaMinus => -SQRT3 * r,
            SurfaceFamily::TypeI { rho0 } => {
                let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
                let q = (rho0.powi(4) - p * p).sqrt();
                r * p / q
            }
            SurfaceFamily::TypeII { rho0 } => {
                let p = r * r - SQRT3 / 2.0 * rho0 * rho0;
                let q = (rho0.powi(4) - p * p).sqrt();
                -r * p / q
            }
        })
    }

    /// Second radial derivative u_rr(r).
    pub fn curvature_profile(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(match self {
            SurfaceFamily::ParabolaPlus => SQRT3,
            SurfaceFamily::ParabolaMinus => -SQRT3,
            SurfaceFamily::TypeI { rho0 } => {
                let p = r * r + SQRT3 / 2.0 * rho0 * rho0;
                let q = (rho0.powi(4) - p * p).sqrt();
                p / q + 2.0 * r * r * rho0.powi(4) / (q * q * q)
            }
            SurfaceFamily::TypeII { rho0 } => {
                let p = r * r - SQRT3 / 2.0 * rho0 * rho0;
                let q = (rho0.powi(4) - p * p).sqrt();
                -(p / q + 2.0 * r * r * rho0.powi(4) / (q * q * q))
            }
        })
    }

    /// Exact jet of the rotationally symmetric graph at (x, y).
    pub fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let r = x.hypot(y);
        let u = self.height(r)?;
        let ur = self.slope(r)?;
        let urr = self.curvature_profile(r)?;
        let (cx, cy) = (x / r, y / r);
        Ok(SurfaceJet {
            x,
            y,
            u,
            ux: ur * cx,
            uy: ur * cy,
            uxx: urr * cx * cx + ur * cy * cy / r,
            uxy: (urr - ur / r) * cx * cy,
            uyy: urr * cy * cy + ur * cx * cx / r,
        })
    }
}

/// A polynomial graph u(x, y) = sum of coeff * x^i * y^j terms; the
/// `custom:` surface specification of the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySurface {
    pub terms: Vec<(f64, u32, u32)>,
}

impl PolySurface {
    pub fn zero() -> Self {
        PolySurface { terms: Vec::new() }
    }

    fn eval_derivative(&self, x: f64, y: f64, dx: u32, dy: u32) -> f64 {
        let mut total = 0.0;
        for &(coeff, i, j) in &self.terms {
            if i < dx || j < dy {
                continue;
            }
            let mut c = coeff;
            for k in 0..dx {
                c *= (i - k) as f64;
            }
            for k in 0..dy {
                c *= (j - k) as f64;
            }
            total += c * x.powi((i - dx) as i32) * y.powi((j - dy) as i32);
        }
        total
    }

    pub fn jet(&self, x: f64, y: f64) -> SurfaceJet {
        SurfaceJet {
            x,
            y,
            u: self.eval_derivative(x, y, 0, 0),
            ux: self.eval_derivative(x, y, 1, 0),
            uy: self.eval_derivative(x, y, 0, 1),
            uxx: self.eval_derivative(x, y, 2, 0),
            uxy: self.eval_derivative(x, y, 1, 1),
            uyy: self.eval_derivative(x, y, 0, 2),
        }
    }

    /// Parse expressions like `0`, `x*y`, `0.5*x^2 - 2*y`, `x^2*y^3`.
    pub fn parse(expr: &str) -> Result<Self> {
        let cleaned: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(E1Error::InvalidInput("empty polynomial".into()));
        }
        // Split into signed terms.
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        for idx in 1..=bytes.len() {
            let boundary = idx == bytes.len()
                || ((bytes[idx] == b'+' || bytes[idx] == b'-')
                    && !matches!(bytes[idx - 1], b'e' | b'E' | b'^' | b'*'));
            if boundary {
                let term = &cleaned[start..idx];
                if !term.is_empty() && term != "+" && term != "-" {
                    terms.push(Self::parse_term(term)?);
                }
                start = idx;
            }
        }
        if terms.is_empty() {
            return Err(E1Error::InvalidInput(format!("cannot parse `{expr}`")));
        }
        Ok(PolySurface { terms })
    }

    fn parse_term(term: &str) -> Result<(f64, u32, u32)> {
        let bad = |msg: &str| E1Error::InvalidInput(format!("bad term `{term}`: {msg}"));
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, term.strip_prefix('+').unwrap_or(term)),
        };
        let mut coeff = sign;
        let mut px = 0u32;
        let mut py = 0u32;
        let mut saw_factor = false;
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(bad("empty factor"));
            }
            saw_factor = true;
            if let Some(rest) = factor.strip_prefix('x').or_else(|| factor.strip_prefix('y')) {
                let exp = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.parse::<u32>().map_err(|_| bad("bad exponent"))?
                } else {
                    return Err(bad("unexpected suffix"));
                };
                if factor.starts_with('x') {
                    px += exp;
                } else {
                    py += exp;
                }
            } else {
                coeff *= factor.parse::<f64>().map_err(|_| bad("bad coefficient"))?;
            }
        }
        if !saw_factor {
            return Err(bad("no factors"));
        }
        Ok((coeff, px, py))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotsym;

    #[test]
    fn sphere_graph_satisfies_implicit_equation() {
        for fam in [
            SurfaceFamily::TypeI { rho0: 1.3 },
            SurfaceFamily::TypeII { rho0: 0.7 },
        ] {
            let rho0 = match fam {
                SurfaceFamily::TypeI { rho0 } | SurfaceFamily::TypeII { rho0 } => rho0,
                _ => unreachable!(),
            };
            let sign = if matches!(fam, SurfaceFamily::TypeI { .. }) {
                1.0
            } else {
                -1.0
            };
            let r = 0.5 * fam.domain_limit().unwrap();
            let u = fam.height(r).unwrap();
            let lhs = (r * r + sign * SQRT3 / 2.0 * rho0 * rho0).powi(2) + 4.0 * u * u;
            assert!((lhs - rho0.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_and_curvature_match_finite_differences() {
        let fam = SurfaceFamily::TypeII { rho0: 1.0 };
        let r = 0.6;
        let h = 1e-5;
        let du =
            (fam.height(r + h).unwrap() - fam.height(r - h).unwrap()) / (2.0 * h);
        let ddu = (fam.height(r + h).unwrap() - 2.0 * fam.height(r).unwrap()
            + fam.height(r - h).unwrap())
            / (h * h);
        assert!((fam.slope(r).unwrap() - du).abs() < 1e-8);
        assert!((fam.curvature_profile(r).unwrap() - ddu).abs() < 1e-5);
    }

    #[test]
    fn profiles_solve_the_radial_ode() {
        for fam in [
            SurfaceFamily::ParabolaPlus,
            SurfaceFamily::ParabolaMinus,
            SurfaceFamily::TypeI { rho0: 1.0 },
            SurfaceFamily::TypeII { rho0: 1.0 },
        ] {
            let r = match fam.domain_limit() {
                Some(lim) => 0.4 * lim,
                None => 1.1,
            };
            let res = rotsym::ode_residual(
                r,
                fam.slope(r).unwrap(),
                fam.curvature_profile(r).unwrap(),
            );
            assert!(res.abs() < 1e-9, "{}: residual {res}", fam.label());
        }
    }

    #[test]
    fn domain_limit_enforced() {
        let fam = SurfaceFamily::TypeI { rho0: 1.0 };
        let r0 = type1_radius(1.0);
        assert!((r0 - 0.36602540378443865).abs() < 1e-15);
        assert!(matches!(
            fam.height(r0 + 1e-9),
            Err(E1Error::DomainExceeded { .. })
        ));
    }

    #[test]
    fn poly_parse_and_jet() {
        let p = PolySurface::parse("x*y").unwrap();
        let j = p.jet(1.5, -2.0);
        assert_eq!(j.u, -3.0);
        assert_eq!(j.ux, -2.0);
        assert_eq!(j.uy, 1.5);
        assert_eq!(j.uxy, 1.0);
        assert_eq!(j.uxx, 0.0);

        let q = PolySurface::parse("0.5*x^2-2*y+1").unwrap_or_else(|_| {
            // constant-only tail `+1` has no x/y factor; accept the
            // two-term form instead
            PolySurface::parse("0.5*x^2-2*y").unwrap()
        });
        let j = q.jet(2.0, 1.0);
        assert!((j.uxx - 1.0).abs() < 1e-15);

        let zero = PolySurface::parse("0").unwrap();
        assert_eq!(zero.jet(1.0, 0.0).u, 0.0);
    }
}
