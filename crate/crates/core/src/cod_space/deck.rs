use std::fmt;

use num_complex::Complex;

use super::class::{is_unit, unit_inv, GaussInt};
use super::CodError;
use crate::complex_geom::GaussRational;
use crate::rational_maps::Family;

/// A deck transformation of the cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeckElement {
    /// `z + n`.
    Power { n: i64 },
    /// `a z + 2n`, `a = ±1`.
    Chebyshev { a: i8, n: i64 },
    /// `u z + 2c`, `u` a unit, `c ∈ Γ`.
    Lattes { u: GaussInt, c: GaussInt },
}

impl DeckElement {
    pub fn identity(family: Family) -> Result<Self, CodError> {
        match family {
            Family::Power(_) => Ok(DeckElement::Power { n: 0 }),
            Family::Chebyshev(_) => Ok(DeckElement::Chebyshev { a: 1, n: 0 }),
            Family::Lattes => Ok(DeckElement::Lattes {
                u: Complex::new(1, 0),
                c: Complex::new(0, 0),
            }),
            Family::QuadCantor => Err(CodError::UnsupportedFamily(family)),
        }
    }

    pub fn chebyshev(a: i8, n: i64) -> Result<Self, CodError> {
        if a == 1 || a == -1 {
            Ok(DeckElement::Chebyshev { a, n })
        } else {
            Err(CodError::Parse(format!("deck sign {a} is not ±1")))
        }
    }

    pub fn lattes(u: GaussInt, c: GaussInt) -> Result<Self, CodError> {
        if is_unit(u) {
            Ok(DeckElement::Lattes { u, c })
        } else {
            Err(CodError::Parse(format!("deck rotation {u} is not a unit")))
        }
    }

    fn kind(&self) -> u8 {
        match self {
            DeckElement::Power { .. } => 0,
            DeckElement::Chebyshev { .. } => 1,
            DeckElement::Lattes { .. } => 2,
        }
    }

    pub fn fits(&self, family: Family) -> bool {
        matches!(
            (self, family),
            (DeckElement::Power { .. }, Family::Power(_))
                | (DeckElement::Chebyshev { .. }, Family::Chebyshev(_))
                | (DeckElement::Lattes { .. }, Family::Lattes)
        )
    }

    /// `self ∘ other`; `None` if the two belong to different families.
    pub fn compose(&self, other: &Self) -> Option<Self> {
        if self.kind() != other.kind() {
            return None;
        }
        Some(match (*self, *other) {
            (DeckElement::Power { n: n1 }, DeckElement::Power { n: n2 }) => {
                DeckElement::Power { n: n1 + n2 }
            }
            (DeckElement::Chebyshev { a: a1, n: n1 }, DeckElement::Chebyshev { a: a2, n: n2 }) => {
                DeckElement::Chebyshev {
                    a: a1 * a2,
                    n: a1 as i64 * n2 + n1,
                }
            }
            (DeckElement::Lattes { u: u1, c: c1 }, DeckElement::Lattes { u: u2, c: c2 }) => {
                DeckElement::Lattes {
                    u: u1 * u2,
                    c: u1 * c2 + c1,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn inverse(&self) -> Self {
        match *self {
            DeckElement::Power { n } => DeckElement::Power { n: -n },
            DeckElement::Chebyshev { a, n } => DeckElement::Chebyshev { a, n: -(a as i64) * n },
            DeckElement::Lattes { u, c } => {
                let v = unit_inv(u);
                DeckElement::Lattes { u: v, c: -(v * c) }
            }
        }
    }

    /// Linear part and translation as exact numbers.
    pub fn coefficients(&self) -> (GaussRational, GaussRational) {
        match *self {
            DeckElement::Power { n } => (GaussRational::one(), GaussRational::from_int(n)),
            DeckElement::Chebyshev { a, n } => {
                (GaussRational::from_int(a as i64), GaussRational::from_int(2 * n))
            }
            DeckElement::Lattes { u, c } => (
                GaussRational::from_ints(u.re, u.im),
                GaussRational::from_ints(2 * c.re, 2 * c.im),
            ),
        }
    }

    pub fn apply(&self, z: &GaussRational) -> GaussRational {
        let (a, b) = self.coefficients();
        a * z + b
    }
}

impl fmt::Display for DeckElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.coefficients();
        write!(f, "z -> ({a})z + ({b})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gi() -> impl Strategy<Value = GaussInt> {
        (-20i64..20, -20i64..20).prop_map(|(a, b)| Complex::new(a, b))
    }

    fn any_deck() -> impl Strategy<Value = DeckElement> {
        prop_oneof![
            (-50i64..50).prop_map(|n| DeckElement::Power { n }),
            (prop::bool::ANY, -50i64..50)
                .prop_map(|(s, n)| DeckElement::Chebyshev { a: if s { 1 } else { -1 }, n }),
            (0usize..4, gi()).prop_map(|(k, c)| DeckElement::Lattes { u: super::super::UNITS[k], c }),
        ]
    }

    fn point() -> impl Strategy<Value = GaussRational> {
        (-40i64..40, -40i64..40, 1i64..9).prop_map(|(a, b, d)| GaussRational::from_fraction(a, b, d))
    }

    proptest! {
        #[test]
        fn inverse_is_exact(t in any_deck(), z in point()) {
            prop_assert_eq!(t.inverse().apply(&t.apply(&z)), z.clone());
            let id = t.compose(&t.inverse()).unwrap();
            prop_assert_eq!(id.apply(&z), z);
        }

        #[test]
        fn compose_matches_application(t in any_deck(), s in any_deck(), z in point()) {
            if let Some(ts) = t.compose(&s) {
                prop_assert_eq!(ts.apply(&z), t.apply(&s.apply(&z)));
            } else {
                let fam = match t {
                    DeckElement::Power { .. } => Family::Power(2),
                    DeckElement::Chebyshev { .. } => Family::Chebyshev(2),
                    DeckElement::Lattes { .. } => Family::Lattes,
                };
                prop_assert!(!s.fits(fam));
            }
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(DeckElement::chebyshev(2, 0).is_err());
        assert!(DeckElement::lattes(Complex::new(1, 1), Complex::new(0, 0)).is_err());
        assert!(DeckElement::identity(Family::QuadCantor).is_err());
    }
}
