use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::affine::{Ambient, LiftedIfs};
use super::raster::{attractor_raster, measure_estimate};
use super::LiftError;
use crate::cod_space::{lattes_shift, ClassEntry, RadialClass};
use crate::complex_geom::GaussRational;
use crate::rational_maps::Family;

/// Largest accepted distance between a measure and the nearest integer.
pub const INCONCLUSIVE_GAP: f64 = 0.2;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact measure of the tile, normalized so a deck fundamental domain has
/// measure one.
pub fn closed_form_measure(class: &RadialClass) -> Result<BigRational, LiftError> {
    let e = class.entries();
    match class.family() {
        Family::Power(2) => {
            let n = class.power_numerators().expect("power class");
            Ok(int((n[1] - n[0]).abs()))
        }
        Family::Power(3) => {
            let n = class.power_numerators().expect("power class");
            let (d1, d2) = (n[1] - n[0], n[2] - n[0]);
            let k = d1.gcd(&d2);
            if k == 0 {
                return Ok(int(0));
            }
            let sum = d1 / k + d2 / k;
            Ok(int(if sum.rem_euclid(3) == 0 { k } else { 0 }))
        }
        Family::Chebyshev(2) => {
            let (ClassEntry::Chebyshev { sign: s1, n: n1 }, ClassEntry::Chebyshev { sign: s2, n: n2 }) =
                (e[0], e[1])
            else {
                unreachable!()
            };
            let (lo, hi) = match (s1, s2) {
                (1, 1) => (int(2 * n1), int(2 * n2)),
                (-1, -1) => (
                    BigRational::new(BigInt::from(4 * n1 - 2 * n2), BigInt::from(3)),
                    BigRational::new(BigInt::from(4 * n2 - 2 * n1), BigInt::from(3)),
                ),
                _ => {
                    let (p, m) = if s1 == 1 { (n1, n2) } else { (n2, n1) };
                    (int(2 * p), int(m - p))
                }
            };
            Ok((hi - lo).abs())
        }
        Family::Lattes => {
            let (
                ClassEntry::Lattes { alpha: a1, beta: b1 },
                ClassEntry::Lattes { alpha: a2, beta: b2 },
            ) = (e[0], e[1])
            else {
                unreachable!()
            };
            if a1 == a2 {
                return Ok(int(2 * (b2 - b1).norm_sqr()));
            }
            let quotient = |b: num_complex::Complex<i64>, a| {
                let s = lattes_shift(a);
                GaussRational::from_ints(b.re, b.im)
                    .checked_div(&GaussRational::from_ints(s.re, s.im))
                    .expect("nonzero shift")
            };
            let q = quotient(b2, a2) - quotient(b1, a1);
            let first = |a: num_complex::Complex<i64>| a.re + a.im == 1;
            let weight = match (first(a1), first(a2)) {
                (true, true) => 1,
                (false, false) => 25,
                _ => 10,
            };
            Ok(int(weight) * q.norm_sqr())
        }
        f => Err(LiftError::UnsupportedFamily(f)),
    }
}

/// The attractor as an exact interval `[lo, hi]`, when it is one.
///
/// Candidate endpoints are fixed points of words of length at most two and
/// their images under such words;
/// the interval is accepted only if it is exactly the union of its images.
pub fn interval_hull_exact(ifs: &LiftedIfs) -> Option<(BigRational, BigRational)> {
    if ifs.ambient() != Ambient::Line {
        return None;
    }
    let d = ifs.degree() as u8;
    let mut words: Vec<Vec<u8>> = Vec::new();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..2 {
        level = level
            .iter()
            .flat_map(|w| (0..d).map(move |s| [w.as_slice(), &[s]].concat()))
            .collect();
        words.extend(level.iter().cloned());
    }
    let fixed: Vec<GaussRational> = words.iter().map(|w| ifs.word_map(w).fixed_point()).collect();
    let mut pts: Vec<BigRational> = fixed.iter().map(|p| p.re.clone()).collect();
    for w in &words {
        pts.extend(fixed.iter().map(|p| ifs.apply_word(w, p).re));
    }
    let lo = pts.iter().min()?.clone();
    let hi = pts.iter().max()?.clone();
    let lo_c = GaussRational::new(lo.clone(), BigRational::zero());
    let hi_c = GaussRational::new(hi.clone(), BigRational::zero());
    let mut images: Vec<(BigRational, BigRational)> = ifs
        .maps()
        .iter()
        .map(|g| {
            let (x, y) = (g.apply(&lo_c).re, g.apply(&hi_c).re);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    images.sort();
    if images[0].0 != lo {
        return None;
    }
    let mut reach = images[0].1.clone();
    for (a, b) in &images[1..] {
        if *a > reach {
            return None;
        }
        if *b > reach {
            reach = b.clone();
        }
    }
    (reach == hi).then_some((lo, hi))
}

/// A multiplicity read off the normalized measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multiplicity {
    pub n: i64,
    pub gap: f64,
    pub measure: f64,
}

/// Nearest integer to the measure of the rasterized tile.
pub fn multiplicity_estimate(ifs: &LiftedIfs, res: u32) -> Result<Multiplicity, LiftError> {
    let measure = measure_estimate(&attractor_raster(ifs, res)?);
    let n = measure.round();
    let gap = (measure - n).abs();
    if gap > INCONCLUSIVE_GAP {
        return Err(LiftError::Inconclusive { measure, gap });
    }
    Ok(Multiplicity {
        n: n as i64,
        gap,
        measure,
    })
}

/// Measures at `res` and `2 res` with the first-order extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Richardson {
    pub res: u32,
    pub coarse: f64,
    pub fine: f64,
}

impl Richardson {
    pub fn extrapolated(&self) -> f64 {
        2.0 * self.fine - self.coarse
    }

    /// Size of the last refinement step, used as the error bar.
    pub fn error(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

pub fn richardson(ifs: &LiftedIfs, res: u32) -> Result<Richardson, LiftError> {
    let coarse = measure_estimate(&attractor_raster(ifs, res)?);
    let fine = measure_estimate(&attractor_raster(ifs, 2 * res)?);
    Ok(Richardson { res, coarse, fine })
}
