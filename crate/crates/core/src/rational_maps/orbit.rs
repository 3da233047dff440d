use std::fmt;

use super::{MapModel, SpherePoint};

const MAX_STEPS: usize = 64;
const MATCH_TOL: f64 = 1e-10;
/// Beyond this modulus a polynomial orbit is in the basin of infinity.
const ESCAPE_RADIUS: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitKind {
    /// `f^(k+p)(x) = f^k(x)`.
    Preperiodic { preperiod: usize, period: usize },
    /// The orbit enters the basin of an attracting point after `steps`.
    Attracted { target: SpherePoint, steps: usize },
    /// No certificate within the step budget.
    Unresolved,
}

/// Why a critical point is harmless: preperiodic or attracted.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCertificate {
    pub point: SpherePoint,
    pub kind: OrbitKind,
}

impl OrbitCertificate {
    pub fn is_valid(&self) -> bool {
        !matches!(self.kind, OrbitKind::Unresolved)
    }
}

impl fmt::Display for OrbitCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OrbitKind::Preperiodic { preperiod, period } => {
                write!(f, "{} preperiod {preperiod} period {period}", self.point)
            }
            OrbitKind::Attracted { target, steps } => {
                write!(f, "{} attracted to {target} after {steps} steps", self.point)
            }
            OrbitKind::Unresolved => write!(f, "{} unresolved", self.point),
        }
    }
}

fn same(a: SpherePoint, b: SpherePoint) -> bool {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => true,
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => (x - y).norm() <= MATCH_TOL,
        _ => false,
    }
}

pub(super) fn certify(model: &MapModel, point: SpherePoint) -> OrbitCertificate {
    let infinity_attracts = model.attracting().contains(&SpherePoint::Infinity);
    let mut orbit = vec![point];
    let mut z = point;
    for step in 1..=MAX_STEPS {
        z = model.evaluate_sphere(z);
        if let Some(k) = orbit.iter().position(|&q| same(q, z)) {
            return OrbitCertificate {
                point,
                kind: OrbitKind::Preperiodic {
                    preperiod: k,
                    period: step - k,
                },
            };
        }
        if let SpherePoint::Finite(w) = z {
            if infinity_attracts && w.norm() > ESCAPE_RADIUS {
                return OrbitCertificate {
                    point,
                    kind: OrbitKind::Attracted {
                        target: SpherePoint::Infinity,
                        steps: step,
                    },
                };
            }
        }
        orbit.push(z);
    }
    OrbitCertificate {
        point,
        kind: OrbitKind::Unresolved,
    }
}
