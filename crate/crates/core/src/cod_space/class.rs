use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::CodError;
use crate::complex_geom::GaussRational;
use crate::rational_maps::Family;

/// Gaussian integer with machine-size coordinates.
pub type GaussInt = Complex<i64>;

pub(crate) const UNITS: [GaussInt; 4] = [
    Complex { re: 1, im: 0 },
    Complex { re: 0, im: 1 },
    Complex { re: -1, im: 0 },
    Complex { re: 0, im: -1 },
];

pub(crate) fn is_unit(u: GaussInt) -> bool {
    UNITS.contains(&u)
}

/// Inverse of a unit, i.e. its conjugate.
pub(crate) fn unit_inv(u: GaussInt) -> GaussInt {
    u.conj()
}

/// `2 - (1-i) α`, the multiplier of the translation part in the Lattès action.
pub(crate) fn lattes_shift(alpha: GaussInt) -> GaussInt {
    Complex::new(2, 0) - Complex::new(1, -1) * alpha
}

/// `a / b` when it is a Gaussian integer.
pub(crate) fn exact_div(a: GaussInt, b: GaussInt) -> Option<GaussInt> {
    let n = b.norm_sqr();
    let p = a * b.conj();
    (p.re % n == 0 && p.im % n == 0).then(|| Complex::new(p.re / n, p.im / n))
}

pub(crate) fn in_two_lattice(z: GaussInt) -> bool {
    (z.re + z.im).rem_euclid(2) == 0
}

/// One entry of a radial class: a lifted endpoint `g_i(x̃)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassEntry {
    /// `n / d`.
    Power { n: i64 },
    /// `(sign/2 + 2n) / d`; for `d = 2` this is `±1/4 + n`.
    Chebyshev { sign: i8, n: i64 },
    /// `α/2 + β` with `α` a unit and `β ∈ (1+i)Γ`.
    Lattes { alpha: GaussInt, beta: GaussInt },
}

/// The discrete datum of a radial: its `d` lifted endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadialClass {
    family: Family,
    entries: Vec<ClassEntry>,
}

fn small_int(r: &BigRational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

impl RadialClass {
    pub fn new(family: Family, entries: Vec<ClassEntry>) -> Result<Self, CodError> {
        let d = family.degree() as usize;
        if entries.len() != d {
            return Err(CodError::InvalidClassEntry {
                index: entries.len(),
                reason: format!("expected {d} entries, got {}", entries.len()),
            });
        }
        for (index, e) in entries.iter().enumerate() {
            let ok = match (family, e) {
                (Family::Power(_), ClassEntry::Power { .. }) => true,
                (Family::Chebyshev(_), ClassEntry::Chebyshev { sign, .. }) => *sign == 1 || *sign == -1,
                (Family::Lattes, ClassEntry::Lattes { alpha, beta }) => {
                    is_unit(*alpha) && in_two_lattice(*beta)
                }
                _ => false,
            };
            if !ok {
                return Err(CodError::InvalidClassEntry {
                    index,
                    reason: format!("{e:?} is not a {family} entry"),
                });
            }
        }
        if family == Family::QuadCantor {
            return Err(CodError::UnsupportedFamily(family));
        }
        Ok(Self { family, entries })
    }

    pub fn power(d: u32, n: &[i64]) -> Result<Self, CodError> {
        Self::new(Family::Power(d), n.iter().map(|&n| ClassEntry::Power { n }).collect())
    }

    pub fn chebyshev(d: u32, e: &[(i8, i64)]) -> Result<Self, CodError> {
        Self::new(
            Family::Chebyshev(d),
            e.iter().map(|&(sign, n)| ClassEntry::Chebyshev { sign, n }).collect(),
        )
    }

    pub fn lattes(e: &[(GaussInt, GaussInt)]) -> Result<Self, CodError> {
        Self::new(
            Family::Lattes,
            e.iter()
                .map(|&(alpha, beta)| ClassEntry::Lattes { alpha, beta })
                .collect(),
        )
    }

    /// Builds a class from the endpoint values, e.g. `[1/2, 3/2]` for `power:2`.
    pub fn from_values(family: Family, values: &[GaussRational]) -> Result<Self, CodError> {
        let d = family.degree() as i64;
        let mut entries = Vec::with_capacity(values.len());
        for (index, v) in values.iter().enumerate() {
            let bad = |reason: &str| CodError::InvalidClassEntry {
                index,
                reason: format!("{v}: {reason}"),
            };
            let entry = match family {
                Family::Power(_) => {
                    if !v.im.is_zero() {
                        return Err(bad("must be real"));
                    }
                    let n = small_int(&(&v.re * BigRational::from_integer(BigInt::from(d))))
                        .ok_or_else(|| bad("not in (1/d)Z"))?;
                    ClassEntry::Power { n }
                }
                Family::Chebyshev(_) => {
                    if !v.im.is_zero() {
                        return Err(bad("must be real"));
                    }
                    // 2 d v = sign + 4 n.
                    let t = small_int(&(&v.re * BigRational::from_integer(BigInt::from(2 * d))))
                        .ok_or_else(|| bad("not of the form (±1/2 + 2n)/d"))?;
                    let sign: i8 = match t.rem_euclid(4) {
                        1 => 1,
                        3 => -1,
                        _ => return Err(bad("not of the form (±1/2 + 2n)/d")),
                    };
                    ClassEntry::Chebyshev {
                        sign,
                        n: (t - sign as i64) / 4,
                    }
                }
                Family::Lattes => {
                    let mut found = None;
                    for alpha in UNITS {
                        let half = GaussRational::from_fraction(alpha.re, alpha.im, 2);
                        if let Some((re, im)) = (v - &half).to_gaussian_i64() {
                            let beta = Complex::new(re, im);
                            if in_two_lattice(beta) {
                                found = Some(ClassEntry::Lattes { alpha, beta });
                            }
                        }
                    }
                    found.ok_or_else(|| bad("not of the form α/2 + β, β ∈ (1+i)Γ"))?
                }
                Family::QuadCantor => return Err(CodError::UnsupportedFamily(family)),
            };
            entries.push(entry);
        }
        Self::new(family, entries)
    }

    /// Parses comma-separated endpoint values.
    pub fn parse(family: Family, text: &str) -> Result<Self, CodError> {
        let values = text
            .split(',')
            .map(|s| s.trim().parse::<GaussRational>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CodError::Parse(e.to_string()))?;
        Self::from_values(family, &values)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn entries(&self) -> &[ClassEntry] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    /// Endpoint value of entry `i` in the cover.
    pub fn value(&self, i: usize) -> GaussRational {
        let d = self.family.degree() as i64;
        match self.entries[i] {
            ClassEntry::Power { n } => GaussRational::from_fraction(n, 0, d),
            ClassEntry::Chebyshev { sign, n } => {
                GaussRational::from_fraction(sign as i64 + 4 * n, 0, 2 * d)
            }
            ClassEntry::Lattes { alpha, beta } => {
                GaussRational::from_fraction(alpha.re + 2 * beta.re, alpha.im + 2 * beta.im, 2)
            }
        }
    }

    pub fn values(&self) -> Vec<GaussRational> {
        (0..self.degree()).map(|i| self.value(i)).collect()
    }

    /// Numerators `n_i` of a power class.
    pub fn power_numerators(&self) -> Option<Vec<i64>> {
        self.entries
            .iter()
            .map(|e| match e {
                ClassEntry::Power { n } => Some(*n),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for RadialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values().iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}
