//! Second variation of the CR-invariant energy at the Clifford torus in
//! the CR 3-sphere, evaluated spectrally. Variation fields live on the
//! torus as finite Fourier series in the two angles (phi1, phi2); the
//! frame legs act as mode multipliers, integrals reduce to Parseval sums
//! against the invariant measure Theta ^ e^1.

use crate::error::{E1Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Truncation bound on the mode indices |m|, |n|.
pub const MAX_MODE: i64 = 64;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Real-valued field on the torus stored by its Fourier coefficients
/// c_{m,n} of e^{i(m phi1 + n phi2)}. Reality is maintained as the
/// invariant c_{-m,-n} = conj(c_{m,n}).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TorusField {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl TorusField {
    pub fn zero() -> Self {
        TorusField::default()
    }

    /// Set the (m, n) coefficient together with its conjugate mirror.
    pub fn set_mode(&mut self, m: i64, n: i64, c: Complex64) -> Result<()> {
        if m.abs() > MAX_MODE || n.abs() > MAX_MODE {
            return Err(E1Error::InvalidInput(format!(
                "mode ({m}, {n}) beyond truncation bound {MAX_MODE}"
            )));
        }
        if m == 0 && n == 0 {
            if c.im.abs() > 1e-15 * c.norm().max(1.0) {
                return Err(E1Error::InvalidInput(
                    "mean mode of a real field must be real".into(),
                ));
            }
            self.coeffs.insert((0, 0), Complex64::new(c.re, 0.0));
        } else {
            self.coeffs.insert((m, n), c);
            self.coeffs.insert((-m, -n), c.conj());
        }
        Ok(())
    }

    pub fn coefficient(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs
            .get(&(m, n))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn modes(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.coeffs.iter()
    }

    /// v_l = cos(l (phi1 + phi2)): coefficients 1/2 at (l, l), (-l, -l).
    pub fn cosine_diagonal(l: i64) -> Result<Self> {
        let mut f = TorusField::zero();
        if l == 0 {
            f.set_mode(0, 0, Complex64::new(1.0, 0.0))?;
        } else {
            f.set_mode(l, l, Complex64::new(0.5, 0.0))?;
        }
        Ok(f)
    }

    /// Random real field with all modes up to `max_mode` populated from
    /// a seeded generator.
    pub fn random(seed: u64, max_mode: i64) -> Result<Self> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = TorusField::zero();
        for m in 0..=max_mode {
            let n_lo = if m == 0 { 0 } else { -max_mode };
            for n in n_lo..=max_mode {
                if m == 0 && n == 0 {
                    f.set_mode(0, 0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0))?;
                } else {
                    f.set_mode(
                        m,
                        n,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )?;
                }
            }
        }
        Ok(f)
    }

    /// Reality defect: max |c_{m,n} - conj(c_{-m,-n})|.
    pub fn reality_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(m, n), &c)| (c - self.coefficient(-m, -n).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise value; real by the mirror invariant.
    pub fn eval(&self, phi1: f64, phi2: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(m, n), &c)| {
                (c * Complex64::from_polar(1.0, m as f64 * phi1 + n as f64 * phi2)).re
            })
            .sum()
    }

    fn map_modes(&self, multiplier: impl Fn(i64, i64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(m, n), &c)| ((m, n), c * multiplier(m, n)))
            .filter(|(_, c)| c.norm() > 0.0)
            .collect();
        TorusField { coeffs }
    }

    /// The leg e_1 acts on the (m, n) mode as multiplication by i(n - m).
    pub fn apply_e1(&self) -> Self {
        self.map_modes(|m, n| Complex64::new(0.0, (n - m) as f64))
    }

    /// The Reeb leg T acts on the (m, n) mode as multiplication by i(m + n).
    pub fn apply_t(&self) -> Self {
        self.map_modes(|m, n| Complex64::new(0.0, (m + n) as f64))
    }

    pub fn scaled(&self, k: f64) -> Self {
        self.map_modes(|_, _| Complex64::new(k, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&key, &c) in &other.coeffs {
            *coeffs.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        TorusField { coeffs }
    }
}

/// Value of Theta ^ e^1 on the coordinate bivector (d_phi1, d_phi2),
/// computed from frame duality: the coordinate legs are expressed in the
/// (T, e_1) basis by solving the 2x2 relations T = d_phi1 + d_phi2,
/// e_1 = d_phi2 - d_phi1, and the dual pairing Theta(T) = 1, e^1(e_1) = 1
/// is assembled as a determinant. Equals 1/2.
pub fn measure_factor() -> f64 {
    // Columns: coordinates of T and e_1 in the (d_phi1, d_phi2) basis.
    let basis = [[1.0, -1.0], [1.0, 1.0]];
    let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
    // Invert to express d_phi_i = x_i T + y_i e_1.
    let inv = [
        [basis[1][1] / det, -basis[0][1] / det],
        [-basis[1][0] / det, basis[0][0] / det],
    ];
    let theta_on = |col: usize| inv[0][col]; // Theta picks the T coordinate
    let e1_on = |col: usize| inv[1][col]; // e^1 picks the e_1 coordinate
    theta_on(0) * e1_on(1) - theta_on(1) * e1_on(0)
}

/// Integral of f g over the torus against Theta ^ e^1, by Parseval.
pub fn inner_product(f: &TorusField, g: &TorusField) -> f64 {
    let sum: f64 = f
        .coeffs
        .iter()
        .map(|(&(m, n), &c)| (c * g.coefficient(m, n).conj()).re)
        .sum();
    measure_factor() * (2.0 * PI) * (2.0 * PI) * sum
}

/// Second variation in its first-derivative (integrated-by-parts) form:
/// (sqrt(2)/4) Int [ (e1 e1 f)^2 + 3 (e1 T f)^2 - 7 (e1 f)^2
///                   + 9 f TT f + 12 f^2 ].
pub fn second_variation(f: &TorusField) -> f64 {
    let e1f = f.apply_e1();
    let e1e1f = e1f.apply_e1();
    let e1tf = f.apply_t().apply_e1();
    let ttf = f.apply_t().apply_t();
    SQRT2 / 4.0
        * (inner_product(&e1e1f, &e1e1f) + 3.0 * inner_product(&e1tf, &e1tf)
            - 7.0 * inner_product(&e1f, &e1f)
            + 9.0 * inner_product(f, &ttf)
            + 12.0 * inner_product(f, f))
}

/// The same quadratic form with the fourth-order operator applied to one
/// slot: (sqrt(2)/4) Int [ e1^4 f + 3 e1 T e1 T f + 7 e1^2 f + 9 TT f
/// + 12 f ] f.
pub fn second_variation_operator_form(f: &TorusField) -> f64 {
    let e1_4 = f.apply_e1().apply_e1().apply_e1().apply_e1();
    let e1te1t = f.apply_t().apply_e1().apply_t().apply_e1();
    let e1_2 = f.apply_e1().apply_e1();
    let tt = f.apply_t().apply_t();
    let op = e1_4
        .add(&e1te1t.scaled(3.0))
        .add(&e1_2.scaled(7.0))
        .add(&tt.scaled(9.0))
        .add(&f.scaled(12.0));
    SQRT2 / 4.0 * inner_product(&op, f)
}

/// Adjointness defects of the two legs: |Int (Xf) g + Int f (Xg)| for
/// X = e_1 and X = T. Both legs are anti-self-adjoint.
pub fn ibp_adjointness(f: &TorusField, g: &TorusField) -> (f64, f64) {
    let e1 = inner_product(&f.apply_e1(), g) + inner_product(f, &g.apply_e1());
    let t = inner_product(&f.apply_t(), g) + inner_product(f, &g.apply_t());
    (e1.abs(), t.abs())
}

/// Closed-form value of the quadratic form on the diagonal cosine mode
/// v_l: Q(v_l) = 3 sqrt(2) (1 - 3 l^2) pi^2.
pub fn diagonal_mode_value(l: i64) -> f64 {
    let scale = if l == 0 { 2.0 } else { 1.0 }; // v_0 = 1 has norm 2 pi^2
    3.0 * SQRT2 * (1.0 - 3.0 * (l * l) as f64) * PI * PI * scale
}

/// Spectrum of the quadratic form on the diagonal cosine modes
/// l = 0..=l_max, evaluated spectrally (not from the closed form).
pub fn mode_spectrum(l_max: i64) -> Result<Vec<(i64, f64)>> {
    (0..=l_max)
        .map(|l| Ok((l, second_variation(&TorusField::cosine_diagonal(l)?))))
        .collect()
}

/// Linearizations of the geometric quantities along a variation f.
#[derive(Debug, Clone)]
pub struct DdtQuantities {
    /// Variation of the mean curvature: e1 e1 f + 4 f.
    pub d_h: TorusField,
    /// Variation of alpha: T f.
    pub d_alpha: TorusField,
    /// Variation of V(alpha): TT f.
    pub d_valpha: TorusField,
    /// Variation of the CR curvature: e1 T f.
    pub d_hcr: TorusField,
    /// Variation of e1(Hcr)-type combination:
    /// (1/2) e1^4 f + 2 e1^2 f + (3/2) e1 T e1 T f.
    pub d_e1hcr: TorusField,
}

pub fn ddt_quantities(f: &TorusField) -> DdtQuantities {
    let e1_2 = f.apply_e1().apply_e1();
    DdtQuantities {
        d_h: e1_2.add(&f.scaled(4.0)),
        d_alpha: f.apply_t(),
        d_valpha: f.apply_t().apply_t(),
        d_hcr: f.apply_t().apply_e1(),
        d_e1hcr: e1_2
            .apply_e1()
            .apply_e1()
            .scaled(0.5)
            .add(&e1_2.scaled(2.0))
            .add(&f.apply_t().apply_e1().apply_t().apply_e1().scaled(1.5)),
    }
}

/// Second variation assembled from the linearized quantities:
/// Int sqrt(2) [ (1/2) d_e1hcr + (9/4) d_valpha + (3/4) d_h ] f.
pub fn second_variation_from_ddt(f: &TorusField) -> f64 {
    let d = ddt_quantities(f);
    let integrand = d
        .d_e1hcr
        .scaled(0.5)
        .add(&d.d_valpha.scaled(9.0 / 4.0))
        .add(&d.d_h.scaled(3.0 / 4.0))
        .scaled(SQRT2);
    inner_product(&integrand, f)
}

// ---------------------------------------------------------------------------
// The rotated-torus family and its criticality.

/// The torus of radii (rho1, rho2) in the CR 3-sphere, rho1^2 + rho2^2 = 1.
#[derive(Debug, Clone, Copy)]
pub struct TorusBackground {
    pub rho1: f64,
}

impl TorusBackground {
    pub fn new(rho1: f64) -> Result<Self> {
        if !(rho1 > 0.0 && rho1 < 1.0) {
            return Err(E1Error::InvalidInput(format!(
                "rho1 = {rho1} must lie strictly between 0 and 1"
            )));
        }
        Ok(TorusBackground { rho1 })
    }

    pub fn rho2(&self) -> f64 {
        (1.0 - self.rho1 * self.rho1).sqrt()
    }

    /// Mean curvature H = rho1/rho2 - rho2/rho1.
    pub fn mean_curvature(&self) -> f64 {
        let r2 = self.rho2();
        self.rho1 / r2 - r2 / self.rho1
    }

    /// Tangential Webster curvature term: W = 2 on the sphere.
    pub fn webster(&self) -> f64 {
        2.0
    }

    /// Hcr = H^2/6 + W/4; equals 1/2 at the Clifford radius.
    pub fn hcr(&self) -> f64 {
        let h = self.mean_curvature();
        h * h / 6.0 + self.webster() / 4.0
    }

    /// Density of the first variation: Hcr^{1/2} H (3 Hcr - H^2/6).
    /// Vanishes exactly when H = 0, i.e. at rho1 = 1/sqrt(2).
    pub fn first_variation_density(&self) -> f64 {
        let h = self.mean_curvature();
        let hcr = self.hcr();
        hcr.sqrt() * h * (3.0 * hcr - h * h / 6.0)
    }

    pub fn is_critical(&self, tol: f64) -> bool {
        self.first_variation_density().abs() < tol
    }
}

/// Sample the first-variation density over n interior radii; the single
/// zero of the sweep sits at rho1 = 1/sqrt(2).
pub fn criticality_sweep(n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 3 {
        return Err(E1Error::InvalidInput("sweep needs at least 3 points".into()));
    }
    (1..=n)
        .map(|k| {
            let rho1 = k as f64 / (n + 1) as f64;
            Ok((rho1, TorusBackground::new(rho1)?.first_variation_density()))
        })
        .collect()
}
