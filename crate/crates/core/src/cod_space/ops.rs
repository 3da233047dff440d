use std::cmp::Ordering;

use num_complex::{Complex, Complex64};

use super::class::{exact_div, lattes_shift, ClassEntry, GaussInt, RadialClass, UNITS};
use super::deck::DeckElement;
use super::CodError;
use crate::rational_maps::{Family, SpherePoint};

fn same_family(c1: &RadialClass, c2: &RadialClass) -> Result<(), CodError> {
    if c1.family() != c2.family() {
        return Err(CodError::FamilyMismatch {
            left: c1.family(),
            right: c2.family(),
        });
    }
    Ok(())
}

fn cheb_degree(c: &RadialClass) -> i64 {
    c.family().degree() as i64
}

/// The class of the conjugated contractions `t g_i t⁻¹`.
pub fn deck_act(t: &DeckElement, c: &RadialClass) -> Result<RadialClass, CodError> {
    if !t.fits(c.family()) {
        return Err(CodError::FamilyMismatch {
            left: c.family(),
            right: c.family(),
        });
    }
    let d = c.family().degree() as i64;
    let entries = c
        .entries()
        .iter()
        .map(|e| match (*t, *e) {
            (DeckElement::Power { n }, ClassEntry::Power { n: ni }) => ClassEntry::Power {
                n: ni + (d - 1) * n,
            },
            (DeckElement::Chebyshev { a, n }, ClassEntry::Chebyshev { sign, n: m }) => {
                ClassEntry::Chebyshev {
                    sign,
                    n: a as i64 * m + (d - sign as i64) * n,
                }
            }
            (DeckElement::Lattes { u, c }, ClassEntry::Lattes { alpha, beta }) => {
                ClassEntry::Lattes {
                    alpha,
                    beta: u * beta + lattes_shift(alpha) * c,
                }
            }
            _ => unreachable!("checked by fits"),
        })
        .collect();
    RadialClass::new(c.family(), entries)
}

/// True when every contraction fixes the same point of the cover lying over
/// a postcritical value, so the coding map is constant there.
pub fn is_degenerate(c: &RadialClass) -> bool {
    constant_value(c).is_some()
}

/// The constant value of a degenerate coding map.
pub fn constant_value(c: &RadialClass) -> Option<SpherePoint> {
    let e = c.entries();
    match c.family() {
        Family::Chebyshev(_) => {
            let d = cheb_degree(c);
            // Fixed point of z -> εz/d + 2n/d is 2n/(d-ε).
            let fix = |k: usize| match e[k] {
                ClassEntry::Chebyshev { sign, n } => (2 * n, d - sign as i64),
                _ => unreachable!(),
            };
            let (p0, q0) = fix(0);
            let common = (1..e.len()).all(|k| {
                let (p, q) = fix(k);
                p * q0 == p0 * q
            });
            if common && p0 % q0 == 0 {
                let x = p0 / q0;
                let v = if x.rem_euclid(2) == 0 { 2.0 } else { -2.0 };
                Some(SpherePoint::Finite(Complex64::new(v, 0.0)))
            } else {
                None
            }
        }
        Family::Lattes => {
            // Fixed point of z -> a z + β is 2β/(2-(1-i)α); over ∞ exactly on 2Γ.
            let fix = |k: usize| match e[k] {
                ClassEntry::Lattes { alpha, beta } => (beta, lattes_shift(alpha)),
                _ => unreachable!(),
            };
            let (b0, s0) = fix(0);
            let common = (1..e.len()).all(|k| {
                let (b, s) = fix(k);
                b * s0 == b0 * s
            });
            (common && exact_div(b0, s0).is_some()).then_some(SpherePoint::Infinity)
        }
        _ => None,
    }
}

/// Whether the two classes define the same coding map.
pub fn cod_equal(c1: &RadialClass, c2: &RadialClass) -> Result<bool, CodError> {
    same_family(c1, c2)?;
    match (constant_value(c1), constant_value(c2)) {
        (Some(v1), Some(v2)) => return Ok(v1 == v2),
        (Some(_), None) | (None, Some(_)) => return Ok(false),
        (None, None) => {}
    }
    Ok(solve_deck(c1, c2).is_some())
}

/// A deck element carrying `c1` to `c2`, if any. Degenerate classes have no
/// such witness: their equality is decided by [`constant_value`].
pub fn cod_witness(c1: &RadialClass, c2: &RadialClass) -> Result<Option<DeckElement>, CodError> {
    same_family(c1, c2)?;
    for c in [c1, c2] {
        if is_degenerate(c) {
            return Err(CodError::DegenerateClass(c.to_string()));
        }
    }
    Ok(solve_deck(c1, c2))
}

/// The deck element mapping `c1` to `c2`, found by solving the action
/// equations exactly.
fn solve_deck(c1: &RadialClass, c2: &RadialClass) -> Option<DeckElement> {
    let d = c1.family().degree() as i64;
    let pairs = c1.entries().iter().zip(c2.entries());
    match c1.family() {
        Family::Power(_) => {
            let mut shift = None;
            for (e1, e2) in pairs {
                let (ClassEntry::Power { n: a }, ClassEntry::Power { n: b }) = (e1, e2) else {
                    unreachable!()
                };
                let diff = b - a;
                if diff % (d - 1) != 0 || shift.is_some_and(|s| s != diff / (d - 1)) {
                    return None;
                }
                shift = Some(diff / (d - 1));
            }
            Some(DeckElement::Power { n: shift? })
        }
        Family::Chebyshev(_) => [1i8, -1].into_iter().find_map(|a| {
            let mut shift = None;
            for (e1, e2) in c1.entries().iter().zip(c2.entries()) {
                let (
                    ClassEntry::Chebyshev { sign: s1, n: m1 },
                    ClassEntry::Chebyshev { sign: s2, n: m2 },
                ) = (e1, e2)
                else {
                    unreachable!()
                };
                if s1 != s2 {
                    return None;
                }
                let q = d - *s1 as i64;
                let diff = m2 - a as i64 * m1;
                if diff % q != 0 || shift.is_some_and(|s| s != diff / q) {
                    return None;
                }
                shift = Some(diff / q);
            }
            Some(DeckElement::Chebyshev { a, n: shift? })
        }),
        Family::Lattes => UNITS.into_iter().find_map(|u| {
            let mut shift: Option<GaussInt> = None;
            for (e1, e2) in c1.entries().iter().zip(c2.entries()) {
                let (
                    ClassEntry::Lattes { alpha: a1, beta: b1 },
                    ClassEntry::Lattes { alpha: a2, beta: b2 },
                ) = (e1, e2)
                else {
                    unreachable!()
                };
                if a1 != a2 {
                    return None;
                }
                let c = exact_div(b2 - u * b1, lattes_shift(*a1))?;
                if shift.is_some_and(|s| s != c) {
                    return None;
                }
                shift = Some(c);
            }
            Some(DeckElement::Lattes { u, c: shift? })
        }),
        Family::QuadCantor => None,
    }
}

/// Brute-force search for a deck element with parameters bounded by `bound`
/// mapping `c1` to `c2`.
pub fn deck_search(c1: &RadialClass, c2: &RadialClass, bound: i64) -> Option<DeckElement> {
    let hit = |t: DeckElement| deck_act(&t, c1).ok().filter(|c| c == c2).map(|_| t);
    match c1.family() {
        Family::Power(_) => (-bound..=bound).find_map(|n| hit(DeckElement::Power { n })),
        Family::Chebyshev(_) => [1i8, -1]
            .into_iter()
            .flat_map(|a| (-bound..=bound).map(move |n| DeckElement::Chebyshev { a, n }))
            .find_map(hit),
        Family::Lattes => UNITS
            .into_iter()
            .flat_map(|u| {
                (-bound..=bound).flat_map(move |x| {
                    (-bound..=bound).map(move |y| DeckElement::Lattes {
                        u,
                        c: Complex::new(x, y),
                    })
                })
            })
            .find_map(hit),
        Family::QuadCantor => None,
    }
}

/// Integers ordered `0, 1, 2, …, -1, -2, …`.
fn int_key(m: i64) -> (bool, i64) {
    (m < 0, m.abs())
}

/// Gaussian integers ordered by norm, then by argument in `[0, 2π)`.
fn gauss_cmp(a: GaussInt, b: GaussInt) -> Ordering {
    let half = |z: GaussInt| !(z.im > 0 || (z.im == 0 && z.re >= 0));
    a.norm_sqr()
        .cmp(&b.norm_sqr())
        .then_with(|| half(a).cmp(&half(b)))
        .then_with(|| (b.re * a.im).cmp(&(a.re * b.im)))
}

fn entries_cmp(x: &RadialClass, y: &RadialClass) -> Ordering {
    for (a, b) in x.entries().iter().zip(y.entries()) {
        let o = match (a, b) {
            (ClassEntry::Power { n: p }, ClassEntry::Power { n: q }) => int_key(*p).cmp(&int_key(*q)),
            (ClassEntry::Chebyshev { n: p, .. }, ClassEntry::Chebyshev { n: q, .. }) => {
                int_key(*p).cmp(&int_key(*q))
            }
            (ClassEntry::Lattes { beta: p, .. }, ClassEntry::Lattes { beta: q, .. }) => gauss_cmp(*p, *q),
            _ => Ordering::Equal,
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// The orbit representative whose entries are smallest in order: integers
/// as `0, 1, 2, …, -1, -2, …`, lattice points by norm then argument.
///
/// For power maps this is the representative with `0 ≤ n_1 ≤ d-2`. On the
/// degenerate locus distinct orbits share one coding map; the orbit
/// representative is still returned.
pub fn canonical_form(c: &RadialClass) -> Result<RadialClass, CodError> {
    let d = c.family().degree() as i64;
    let candidates: Vec<DeckElement> = match (c.family(), c.entries()[0]) {
        (Family::Power(_), ClassEntry::Power { n }) => {
            vec![DeckElement::Power { n: -n.div_euclid(d - 1) }]
        }
        (Family::Chebyshev(_), ClassEntry::Chebyshev { sign, n }) => {
            let q = d - sign as i64;
            [1i8, -1]
                .into_iter()
                .map(|a| {
                    let am = a as i64 * n;
                    DeckElement::Chebyshev {
                        a,
                        n: (am.rem_euclid(q) - am) / q,
                    }
                })
                .collect()
        }
        (Family::Lattes, ClassEntry::Lattes { alpha, beta }) => {
            let s = lattes_shift(alpha);
            let mut out = Vec::new();
            for u in UNITS {
                // Nearest lattice points to -uβ/s.
                let target = -Complex64::new((u * beta).re as f64, (u * beta).im as f64)
                    / Complex64::new(s.re as f64, s.im as f64);
                let (x0, y0) = (target.re.round() as i64, target.im.round() as i64);
                let mut best: Option<GaussInt> = None;
                for x in x0 - 2..=x0 + 2 {
                    for y in y0 - 2..=y0 + 2 {
                        let cc = Complex::new(x, y);
                        let b = u * beta + s * cc;
                        if best.is_none_or(|bb| gauss_cmp(b, u * beta + s * bb) == Ordering::Less) {
                            best = Some(cc);
                        }
                    }
                }
                out.push(DeckElement::Lattes { u, c: best.expect("nonempty search box") });
            }
            out
        }
        _ => return Err(CodError::UnsupportedFamily(c.family())),
    };
    let mut best: Option<RadialClass> = None;
    for t in candidates {
        let image = deck_act(&t, c)?;
        if best.as_ref().is_none_or(|b| entries_cmp(&image, b) == Ordering::Less) {
            best = Some(image);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// `(m, k) · [n_1, …, n_d] = [k n_1 + m, …, k n_d + m]` on power classes.
pub fn power_monoid_act(m: i64, k: i64, c: &RadialClass) -> Result<RadialClass, CodError> {
    let Family::Power(d) = c.family() else {
        return Err(CodError::UnsupportedFamily(c.family()));
    };
    if k < 1 || m < 0 || m > d as i64 - 1 {
        return Err(CodError::InvalidMonoidElement { m, k });
    }
    let n = c.power_numerators().expect("power class");
    let scaled: Vec<i64> = n.iter().map(|&x| k * x + m).collect();
    RadialClass::power(d, &scaled)
}
