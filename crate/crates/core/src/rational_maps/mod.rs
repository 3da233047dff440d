//! The catalog of supported maps: evaluation, preimages, orbit certificates
//! and lifting of curves by analytic continuation.

mod lift;
mod orbit;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::complex_geom::GeomError;

pub use lift::{lift_curve, lift_curve_traced, LiftTrace, EPS_CV, MAX_LIFT_STEP, WINDOW_RADIUS};
pub use orbit::{OrbitCertificate, OrbitKind};

/// Residual allowed for a preimage: `|f(z) - w| <= PREIMAGE_TOL * (1 + |w|)`.
pub const PREIMAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("unknown map family `{0}`")]
    UnknownFamily(String),
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("f({0}) is infinite")]
    PoleAtInput(Complex64),
    #[error("preimage residual {residual:e} at w = {w} exceeds tolerance")]
    NumericalFailure { w: Complex64, residual: f64 },
    #[error("branch ambiguity while lifting near {near}")]
    BranchAmbiguity { near: Complex64 },
    #[error("curve passes within {distance:e} of critical value {value}")]
    CriticalValueProximity { value: Complex64, distance: f64 },
    #[error("lift left the working window at {at}")]
    WindowEscape { at: Complex64 },
    #[error("lift start {x0} does not lie over the curve start (gap {gap:e})")]
    StartMismatch { x0: Complex64, gap: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl MapError {
    pub fn name(&self) -> &'static str {
        match self {
            MapError::UnknownFamily(_) => "UnknownFamily",
            MapError::InvalidDegree(_) => "InvalidDegree",
            MapError::PoleAtInput(_) => "PoleAtInput",
            MapError::NumericalFailure { .. } => "NumericalFailure",
            MapError::BranchAmbiguity { .. } => "BranchAmbiguity",
            MapError::CriticalValueProximity { .. } => "CriticalValueProximity",
            MapError::WindowEscape { .. } => "WindowEscape",
            MapError::StartMismatch { .. } => "StartMismatch",
            MapError::Geom(e) => e.name(),
        }
    }
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}", fmt_complex(*z)),
            SpherePoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Short human-readable rendering of a float complex number.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// The supported families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `z^d`.
    Power(u32),
    /// `2 T_d(z/2)`; `z^2 - 2` for `d = 2`.
    Chebyshev(u32),
    /// `-(z-1)^2 / (4z)`.
    Lattes,
    /// `z^2 - 3`.
    QuadCantor,
}

impl Family {
    pub fn degree(&self) -> u32 {
        match *self {
            Family::Power(d) | Family::Chebyshev(d) => d,
            Family::Lattes | Family::QuadCantor => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power(d) => write!(f, "power:{d}"),
            Family::Chebyshev(d) => write!(f, "cheb:{d}"),
            Family::Lattes => f.write_str("lattes"),
            Family::QuadCantor => f.write_str("quadcantor"),
        }
    }
}

impl FromStr for Family {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        let token = s.trim().to_ascii_lowercase();
        let degree = |rest: &str| -> Result<u32, MapError> {
            let d: u32 = rest
                .parse()
                .map_err(|_| MapError::UnknownFamily(s.to_string()))?;
            if d < 2 {
                return Err(MapError::InvalidDegree(d));
            }
            Ok(d)
        };
        match token.as_str() {
            "lattes" => Ok(Family::Lattes),
            "quadcantor" => Ok(Family::QuadCantor),
            _ => {
                if let Some(rest) = token.strip_prefix("power:") {
                    Ok(Family::Power(degree(rest)?))
                } else if let Some(rest) = token.strip_prefix("cheb:") {
                    Ok(Family::Chebyshev(degree(rest)?))
                } else {
                    Err(MapError::UnknownFamily(s.to_string()))
                }
            }
        }
    }
}

/// One catalog map with its critical and postcritical data.
#[derive(Clone, Debug)]
pub struct MapModel {
    family: Family,
    critical: Vec<SpherePoint>,
    postcritical: Vec<SpherePoint>,
    attracting: Vec<SpherePoint>,
    punctures: Vec<Complex64>,
    window_checks: Vec<Complex64>,
    certificates: Vec<OrbitCertificate>,
}

impl MapModel {
    pub fn new(family: Family) -> Result<Self, MapError> {
        use SpherePoint::{Finite, Infinity};
        let c = |re: f64| Finite(Complex64::new(re, 0.0));
        let d = family.degree();
        if d < 2 {
            return Err(MapError::InvalidDegree(d));
        }
        let (critical, postcritical, attracting, punctures, window_checks) = match family {
            Family::Power(_) => (
                vec![c(0.0), Infinity],
                vec![c(0.0), Infinity],
                vec![c(0.0), Infinity],
                vec![Complex64::new(0.0, 0.0)],
                vec![],
            ),
            Family::Chebyshev(d) => {
                let mut crit: Vec<SpherePoint> = (1..d)
                    .map(|k| c(2.0 * (std::f64::consts::PI * k as f64 / d as f64).cos()))
                    .collect();
                crit.push(Infinity);
                let post = vec![c(-2.0), c(2.0), Infinity];
                (
                    crit,
                    post,
                    vec![Infinity],
                    vec![Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0)],
                    vec![],
                )
            }
            Family::Lattes => (
                vec![c(-1.0), c(1.0)],
                vec![c(1.0), c(0.0), Infinity],
                vec![],
                vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                vec![],
            ),
            Family::QuadCantor => (
                vec![c(0.0), Infinity],
                vec![c(-3.0), c(6.0), c(33.0), Infinity],
                vec![Infinity],
                vec![Complex64::new(-3.0, 0.0), Complex64::new(6.0, 0.0)],
                vec![Complex64::new(33.0, 0.0)],
            ),
        };
        let mut model = Self {
            family,
            critical,
            postcritical,
            attracting,
            punctures,
            window_checks,
            certificates: Vec::new(),
        };
        model.certificates = model
            .critical
            .clone()
            .into_iter()
            .map(|p| orbit::certify(&model, p))
            .collect();
        Ok(model)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.family.degree() as usize
    }

    pub fn critical_points(&self) -> &[SpherePoint] {
        &self.critical
    }

    /// Finite part of the postcritical set as listed, truncated to the working
    /// window, plus infinity.
    pub fn postcritical(&self) -> &[SpherePoint] {
        &self.postcritical
    }

    pub fn attracting(&self) -> &[SpherePoint] {
        &self.attracting
    }

    /// Points used as generators of the loop word calculus.
    pub fn punctures(&self) -> &[Complex64] {
        &self.punctures
    }

    /// Postcritical points inside the window that are not word generators.
    pub fn window_checks(&self) -> &[Complex64] {
        &self.window_checks
    }

    pub fn certificates(&self) -> &[OrbitCertificate] {
        &self.certificates
    }

    /// Finite critical values.
    pub fn critical_values(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for p in &self.critical {
            if let SpherePoint::Finite(z) = self.evaluate_sphere(*p) {
                if !out.iter().any(|q| (*q - z).norm() < 1e-12) {
                    out.push(z);
                }
            }
        }
        out
    }

    /// Finite postcritical points.
    pub fn finite_postcritical(&self) -> Vec<Complex64> {
        self.postcritical
            .iter()
            .filter_map(|p| match p {
                SpherePoint::Finite(z) => Some(*z),
                SpherePoint::Infinity => None,
            })
            .collect()
    }

    /// `f(z)` for finite `z`; fails when the value is infinite.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, MapError> {
        match self.evaluate_sphere(SpherePoint::Finite(z)) {
            SpherePoint::Finite(w) => Ok(w),
            SpherePoint::Infinity => Err(MapError::PoleAtInput(z)),
        }
    }

    /// `f` on the Riemann sphere. Every catalog map fixes infinity.
    pub fn evaluate_sphere(&self, p: SpherePoint) -> SpherePoint {
        let SpherePoint::Finite(z) = p else {
            return SpherePoint::Infinity;
        };
        let w = match self.family {
            Family::Power(d) => z.powu(d),
            Family::Chebyshev(d) => dickson(z, d).0,
            Family::Lattes => {
                if z == Complex64::new(0.0, 0.0) {
                    return SpherePoint::Infinity;
                }
                lattes(z)
            }
            Family::QuadCantor => z * z - 3.0,
        };
        if w.re.is_finite() && w.im.is_finite() {
            SpherePoint::Finite(w)
        } else {
            SpherePoint::Infinity
        }
    }

    /// `f'(z)`; infinite values come back non-finite.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self.family {
            Family::Power(d) => z.powu(d - 1) * d as f64,
            Family::Chebyshev(d) => dickson(z, d).1,
            Family::Lattes => -(z * z - 1.0) / (z * z * 4.0),
            Family::QuadCantor => z * 2.0,
        }
    }

    /// The `d` solutions of `f(z) = w`, repeated by multiplicity.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>, MapError> {
        let d = self.degree();
        let raw: Vec<Complex64> = match self.family {
            Family::Power(_) => {
                if w.norm() == 0.0 {
                    vec![w; d]
                } else {
                    let (r, theta) = w.to_polar();
                    let r = r.powf(1.0 / d as f64);
                    (0..d)
                        .map(|k| {
                            Complex64::from_polar(
                                r,
                                (theta + std::f64::consts::TAU * k as f64) / d as f64,
                            )
                        })
                        .collect()
                }
            }
            Family::Chebyshev(_) => {
                // w = 2 cos(theta); the roots are 2 cos((theta + 2 pi k) / d).
                let theta = (w / 2.0).acos();
                (0..d)
                    .map(|k| {
                        ((theta + std::f64::consts::TAU * k as f64) / d as f64).cos() * 2.0
                    })
                    .collect()
            }
            Family::Lattes => {
                // z^2 + (4w - 2) z + 1 = 0.
                let b = w * 4.0 - 2.0;
                let disc = (b * b - 4.0).sqrt();
                // Stable pair: one root by the quadratic formula, the other by Vieta.
                let q = if (b.conj() * disc).re >= 0.0 {
                    -(b + disc) / 2.0
                } else {
                    -(b - disc) / 2.0
                };
                if q.norm() == 0.0 {
                    vec![q, q]
                } else {
                    vec![q, q.inv()]
                }
            }
            Family::QuadCantor => {
                let s = (w + 3.0).sqrt();
                vec![s, -s]
            }
        };
        let tol = PREIMAGE_TOL * (1.0 + w.norm());
        let mut out = Vec::with_capacity(d);
        for z in raw {
            let z = self.polish(z, w);
            let residual = match self.evaluate_sphere(SpherePoint::Finite(z)) {
                SpherePoint::Finite(fz) => (fz - w).norm(),
                SpherePoint::Infinity => f64::INFINITY,
            };
            if !(residual <= tol) {
                return Err(MapError::NumericalFailure { w, residual });
            }
            out.push(z);
        }
        Ok(out)
    }

    /// A few Newton steps on `f(z) = w`, kept only while they reduce the residual.
    fn polish(&self, mut z: Complex64, w: Complex64) -> Complex64 {
        let residual = |z: Complex64| match self.evaluate_sphere(SpherePoint::Finite(z)) {
            SpherePoint::Finite(fz) => (fz - w).norm(),
            SpherePoint::Infinity => f64::INFINITY,
        };
        let mut r = residual(z);
        for _ in 0..4 {
            if r == 0.0 {
                break;
            }
            let dz = self.derivative(z);
            if !(dz.norm() > 1e-8) {
                break;
            }
            let SpherePoint::Finite(fz) = self.evaluate_sphere(SpherePoint::Finite(z)) else {
                break;
            };
            let next = z - (fz - w) / dz;
            let rn = residual(next);
            if rn < r {
                z = next;
                r = rn;
            } else {
                break;
            }
        }
        z
    }

    /// Structured text report of the orbit certificates.
    pub fn orbit_report(&self) -> String {
        let mut s = format!("family = {}\ndegree = {}\n", self.family, self.degree());
        let list = |pts: &[SpherePoint]| {
            pts.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        s += &format!("critical = {{{}}}\n", list(&self.critical));
        s += &format!("postcritical = {{{}}}\n", list(&self.postcritical));
        s += &format!("attracting = {{{}}}\n", list(&self.attracting));
        for (k, c) in self.certificates.iter().enumerate() {
            s += &format!("certificate.{} = {}\n", k + 1, c);
        }
        s
    }
}

/// Dickson polynomial `D_d(z)` (so `D_d(w + 1/w) = w^d + w^-d`) and its derivative.
fn dickson(z: Complex64, d: u32) -> (Complex64, Complex64) {
    let two = Complex64::new(2.0, 0.0);
    let (mut p0, mut p1) = (two, z);
    let (mut q0, mut q1) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    if d == 0 {
        return (p0, q0);
    }
    for _ in 1..d {
        let p2 = z * p1 - p0;
        let q2 = p1 + z * q1 - q0;
        p0 = p1;
        p1 = p2;
        q0 = q1;
        q1 = q2;
    }
    (p1, q1)
}

/// `-(z-1)^2 / (4z)` written as `-(z - 2 + 1/z) / 4`, which stays accurate for large `z`.
fn lattes(z: Complex64) -> Complex64 {
    -(z - 2.0 + z.inv()) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(s: &str) -> MapModel {
        MapModel::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn family_tokens() {
        assert_eq!("power:3".parse::<Family>().unwrap(), Family::Power(3));
        assert_eq!("cheb:2".parse::<Family>().unwrap(), Family::Chebyshev(2));
        assert_eq!("lattes".parse::<Family>().unwrap(), Family::Lattes);
        assert_eq!("quadcantor".parse::<Family>().unwrap(), Family::QuadCantor);
        assert!(matches!("power:1".parse::<Family>(), Err(MapError::InvalidDegree(1))));
        assert!(matches!("cubic".parse::<Family>(), Err(MapError::UnknownFamily(_))));
        for f in ["power:2", "cheb:3", "lattes", "quadcantor"] {
            assert_eq!(f.parse::<Family>().unwrap().to_string(), f);
        }
    }

    #[test]
    fn evaluation_examples() {
        assert!((model("power:2").evaluate(c(0.0, 1.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(model("quadcantor").evaluate(c(0.0, 0.0)).unwrap(), c(-3.0, 0.0));
        assert!((model("lattes").evaluate(c(-1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            model("lattes").evaluate(c(0.0, 0.0)),
            Err(MapError::PoleAtInput(_))
        ));
        // 2 T_3(z/2) = z^3 - 3z.
        let z = c(0.3, -0.7);
        let w = model("cheb:3").evaluate(z).unwrap();
        assert!((w - (z * z * z - z * 3.0)).norm() < 1e-14);
        assert_eq!(model("cheb:2").evaluate(c(0.0, 0.0)).unwrap(), c(-2.0, 0.0));
    }

    #[test]
    fn preimage_examples() {
        let r = model("quadcantor").preimages(c(0.0, 0.0)).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r[0] - c(s3, 0.0)).norm() < 1e-15 && (r[1] + c(s3, 0.0)).norm() < 1e-15);

        let r = model("power:3").preimages(c(1.0, 0.0)).unwrap();
        for k in 0..3 {
            let root = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
            assert!(r.iter().any(|z| (*z - root).norm() < 1e-14));
        }

        // Degree 2: f(z) = -1 is z^2 - 6z + 1 = 0, two simple roots 3 ± 2√2.
        let r = model("lattes").preimages(c(-1.0, 0.0)).unwrap();
        assert_eq!(r.len(), 2);
        let s8 = 8f64.sqrt();
        assert!(r.iter().any(|z| (*z - c(3.0 + s8, 0.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| (*z - c(3.0 - s8, 0.0)).norm() < 1e-12));

        // Critical value: double root.
        let r = model("lattes").preimages(c(0.0, 0.0)).unwrap();
        assert!(r.iter().all(|z| (*z - c(1.0, 0.0)).norm() < 1e-7));
        let r = model("power:2").preimages(c(0.0, 0.0)).unwrap();
        assert_eq!(r, vec![c(0.0, 0.0); 2]);
    }

    #[test]
    fn critical_values() {
        let cv = model("quadcantor").critical_values();
        assert_eq!(cv, vec![c(-3.0, 0.0)]);
        let cv = model("lattes").critical_values();
        assert_eq!(cv.len(), 2);
        let cv = model("cheb:3").critical_values();
        assert_eq!(cv.len(), 2);
        assert!(cv.iter().all(|z| (z.norm() - 2.0).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn preimages_contain_the_input(
            fam in prop::sample::select(vec!["power:2", "power:3", "cheb:2", "cheb:3", "lattes", "quadcantor"]),
            re in -3.0f64..3.0, im in -3.0f64..3.0,
        ) {
            let m = model(fam);
            let z = c(re, im);
            prop_assume!(z.norm() > 1e-3 && m.derivative(z).norm() > 1e-3);
            let w = m.evaluate(z).unwrap();
            let roots = m.preimages(w).unwrap();
            prop_assert_eq!(roots.len(), m.degree());
            let best = roots.iter().map(|r| (*r - z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-9 * (1.0 + z.norm()), "{best}");
        }
    }
}
