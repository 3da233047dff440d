use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;

use super::cover::cover_base;
use super::LiftError;
use crate::cod_space::{ClassEntry, RadialClass};
use crate::coding_tree::SymbolSeq;
use crate::complex_geom::GaussRational;
use crate::rational_maps::Family;

/// Where the tile lives: the real line inside `ℂ`, or the whole plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    Line,
    Plane,
}

/// `z ↦ a z + b` with `|a| < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    a: GaussRational,
    b: GaussRational,
}

impl AffineMap {
    pub fn new(a: GaussRational, b: GaussRational) -> Result<Self, LiftError> {
        if a.norm_sqr() >= num_rational::BigRational::one() {
            return Err(LiftError::NotContracting(format!("|{a}| >= 1")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &GaussRational {
        &self.a
    }

    pub fn b(&self) -> &GaussRational {
        &self.b
    }

    pub fn apply(&self, z: &GaussRational) -> GaussRational {
        &self.a * z + &self.b
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            a: &self.a * &other.a,
            b: &self.a * &other.b + &self.b,
        }
    }

    pub fn fixed_point(&self) -> GaussRational {
        self.b
            .checked_div(&(GaussRational::one() - &self.a))
            .expect("contraction has 1 - a != 0")
    }

    /// `1/a` when it is a Gaussian integer.
    pub fn expansion(&self) -> Option<(i64, i64)> {
        GaussRational::one().checked_div(&self.a)?.to_gaussian_i64()
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z -> ({})z + ({})", self.a, self.b)
    }
}

/// The `d` contractions `g_i` with `f ∘ φ ∘ g_i = φ` attached to a radial class.
#[derive(Clone, Debug)]
pub struct LiftedIfs {
    class: RadialClass,
    maps: Vec<AffineMap>,
    coeffs: Vec<(Complex64, Complex64)>,
    ambient: Ambient,
}

/// The affine contractions of a class: `z/d + n/d` for power maps,
/// `±z/d + 2n/d` for Chebyshev maps and `α(1-i)z/2 + β` for the Lattès map.
pub fn lift_radial_class(class: &RadialClass) -> Result<LiftedIfs, LiftError> {
    let family = class.family();
    let d = family.degree() as i64;
    let maps = class
        .entries()
        .iter()
        .map(|e| {
            let (a, b) = match *e {
                ClassEntry::Power { n } => (
                    GaussRational::from_fraction(1, 0, d),
                    GaussRational::from_fraction(n, 0, d),
                ),
                ClassEntry::Chebyshev { sign, n } => (
                    GaussRational::from_fraction(sign as i64, 0, d),
                    GaussRational::from_fraction(2 * n, 0, d),
                ),
                ClassEntry::Lattes { alpha, beta } => (
                    GaussRational::from_fraction(alpha.re + alpha.im, alpha.im - alpha.re, 2),
                    GaussRational::from_ints(beta.re, beta.im),
                ),
            };
            AffineMap::new(a, b)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ambient = match family {
        Family::Power(_) | Family::Chebyshev(_) => Ambient::Line,
        Family::Lattes => Ambient::Plane,
        Family::QuadCantor => return Err(LiftError::UnsupportedFamily(family)),
    };
    let coeffs = maps
        .iter()
        .map(|m| (m.a.to_complex(), m.b.to_complex()))
        .collect();
    Ok(LiftedIfs {
        class: class.clone(),
        maps,
        coeffs,
        ambient,
    })
}

impl LiftedIfs {
    pub fn family(&self) -> Family {
        self.class.family()
    }

    pub fn class(&self) -> &RadialClass {
        &self.class
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn degree(&self) -> usize {
        self.maps.len()
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Float coefficients `(a_i, b_i)`.
    pub fn coefficients(&self) -> &[(Complex64, Complex64)] {
        &self.coeffs
    }

    /// Largest contraction ratio.
    pub fn ratio(&self) -> f64 {
        self.coeffs.iter().map(|(a, _)| a.norm()).fold(0.0, f64::max)
    }

    /// `g_{w_1} ∘ … ∘ g_{w_k}(z)`.
    pub fn apply_word(&self, w: &[u8], z: &GaussRational) -> GaussRational {
        w.iter()
            .rev()
            .fold(z.clone(), |acc, &s| self.maps[s as usize].apply(&acc))
    }

    /// The composite map `g_{w_1} ∘ … ∘ g_{w_k}`.
    pub fn word_map(&self, w: &[u8]) -> AffineMap {
        w.iter().fold(
            AffineMap {
                a: GaussRational::one(),
                b: GaussRational::zero(),
            },
            |acc, &s| acc.compose(&self.maps[s as usize]),
        )
    }

    /// The point of the cover coded by `seq`: `g_w(x̃)` for a finite word,
    /// the limit point for an eventually periodic one.
    pub fn point_exact(&self, seq: &SymbolSeq) -> GaussRational {
        if seq.is_finite() {
            self.apply_word(seq.prefix(), &cover_base(self.family()))
        } else {
            let p = self.word_map(seq.period()).fixed_point();
            self.apply_word(seq.prefix(), &p)
        }
    }

    pub fn point(&self, seq: &SymbolSeq) -> Complex64 {
        self.point_exact(seq).to_complex()
    }

    /// Radius of a disc about the first fixed point containing the attractor.
    pub fn attractor_radius(&self) -> (Complex64, f64) {
        let c = self.maps[0].fixed_point().to_complex();
        let spread = self
            .coeffs
            .iter()
            .map(|(a, b)| (a * c + b - c).norm())
            .fold(0.0, f64::max);
        (c, spread / (1.0 - self.ratio()))
    }
}

/// Distinct counts of `g_w(0)` over words of each length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthReport {
    pub degree: usize,
    pub counts: Vec<usize>,
}

impl GrowthReport {
    /// First level whose count falls short of `d^k`.
    pub fn degenerate_at(&self) -> Option<usize> {
        self.counts
            .iter()
            .enumerate()
            .find(|(k, &c)| Some(c) != self.degree.checked_pow(*k as u32 + 1))
            .map(|(k, _)| k + 1)
    }

    pub fn verdict(&self) -> String {
        match self.degenerate_at() {
            None => "surjective-evidence".into(),
            Some(k) => format!("degenerate at {k}"),
        }
    }
}

/// Exact level-by-level count of `#{g_w(0) : |w| = k}` for `k = 1..=kmax`.
pub fn growth_rate_exact(ifs: &LiftedIfs, kmax: usize) -> GrowthReport {
    let mut level: HashSet<GaussRational> = HashSet::from([GaussRational::zero()]);
    let mut counts = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        level = level
            .par_iter()
            .flat_map_iter(|z| ifs.maps.iter().map(move |g| g.apply(z)))
            .collect();
        counts.push(level.len());
    }
    GrowthReport {
        degree: ifs.degree(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifted_ifs::phi;
    use crate::rational_maps::{MapModel, SpherePoint};

    fn class(fam: Family, s: &str) -> RadialClass {
        RadialClass::parse(fam, s).unwrap()
    }

    #[test]
    fn catalog_tables() {
        let ifs = lift_radial_class(&class(Family::Power(2), "0,3/2")).unwrap();
        assert_eq!(ifs.maps()[1].to_string(), "z -> (1/2)z + (3/2)");
        let ifs = lift_radial_class(&class(Family::Chebyshev(2), "1/4,-1/4+1")).unwrap();
        assert_eq!(ifs.maps()[0].to_string(), "z -> (1/2)z + (0)");
        assert_eq!(ifs.maps()[1].to_string(), "z -> (-1/2)z + (1)");
        let ifs = lift_radial_class(&class(Family::Lattes, "i/2,1/2+1+i")).unwrap();
        assert_eq!(ifs.maps()[0].a(), &GaussRational::from_fraction(1, 1, 2));
        assert_eq!(ifs.maps()[1].a(), &GaussRational::from_fraction(1, -1, 2));
        assert_eq!(ifs.maps()[1].b(), &GaussRational::from_ints(1, 1));
        assert_eq!(ifs.ambient(), Ambient::Plane);
    }

    #[test]
    fn maps_send_base_to_entries_and_satisfy_cover_equation() {
        let cases = [
            (Family::Power(2), "1/2,3/2"),
            (Family::Power(3), "0,1/3,5/3"),
            (Family::Chebyshev(2), "1/4,-1/4+3"),
            (Family::Chebyshev(3), "1/6,-1/6+2/3,1/6+4/3"),
            (Family::Lattes, "-i/2+1+i,-1/2+2"),
            (Family::Lattes, "i/2,1/2+1+i"),
        ];
        for (fam, s) in cases {
            let c = class(fam, s);
            let ifs = lift_radial_class(&c).unwrap();
            let map = MapModel::new(fam).unwrap();
            for (i, g) in ifs.maps().iter().enumerate() {
                assert_eq!(g.apply(&cover_base(fam)), c.value(i), "{fam} {s}");
                for z in [Complex64::new(0.31, 0.17), Complex64::new(-0.4, 0.23)] {
                    let (a, b) = ifs.coefficients()[i];
                    let SpherePoint::Finite(lhs) = phi(fam, a * z + b).unwrap() else { panic!() };
                    let SpherePoint::Finite(rhs) = phi(fam, z).unwrap() else { panic!() };
                    let lhs = map.evaluate(lhs).unwrap();
                    assert!((lhs - rhs).norm() < 1e-8 * (1.0 + rhs.norm()), "{fam} {s} {lhs} {rhs}");
                }
            }
        }
    }

    #[test]
    fn exact_points() {
        let ifs = lift_radial_class(&class(Family::Power(2), "0,1/2")).unwrap();
        let p = ifs.point_exact(&"2^".parse().unwrap());
        assert_eq!(p, GaussRational::one());
        let p = ifs.point_exact(&"1.2^".parse().unwrap());
        assert_eq!(p, GaussRational::from_fraction(1, 0, 2));
        let w: SymbolSeq = "212".parse().unwrap();
        assert_eq!(ifs.point_exact(&w), GaussRational::from_fraction(5, 0, 8));
        assert_eq!(ifs.word_map(&[1, 0, 1]).apply(&GaussRational::zero()), ifs.point_exact(&w));
    }

    #[test]
    fn growth_counts() {
        let ifs = lift_radial_class(&class(Family::Power(2), "0,1/2")).unwrap();
        let g = growth_rate_exact(&ifs, 10);
        assert_eq!(g.counts, (1..=10).map(|k| 1usize << k).collect::<Vec<_>>());
        assert_eq!(g.verdict(), "surjective-evidence");
        let ifs = lift_radial_class(&class(Family::Power(2), "0,0")).unwrap();
        let g = growth_rate_exact(&ifs, 6);
        assert_eq!(g.counts, vec![1; 6]);
        assert_eq!(g.degenerate_at(), Some(1));
        // Digits 0 and 2: brute-force enumeration of Σ digit·2^-j.
        let ifs = lift_radial_class(&class(Family::Power(2), "0,1")).unwrap();
        let g = growth_rate_exact(&ifs, 8);
        for (k, &c) in g.counts.iter().enumerate() {
            let k = k + 1;
            let sums: HashSet<u64> = (0..1u64 << k)
                .map(|bits| (0..k).map(|j| ((bits >> j) & 1) * 2 << (k - 1 - j)).sum())
                .collect();
            assert_eq!(c, sums.len());
        }
    }

    #[test]
    fn rejects_expanding_map() {
        assert!(AffineMap::new(GaussRational::from_ints(1, 0), GaussRational::zero()).is_err());
    }
}
