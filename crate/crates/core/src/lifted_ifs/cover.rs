use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::LiftError;
use crate::cod_space::{ClassEntry, RadialClass};
use crate::coding_tree::Radial;
use crate::complex_geom::{Curve, GaussRational};
use crate::rational_maps::{Family, MapModel, SpherePoint};

/// Cover step between consecutive samples of a leg.
const LEG_SAMPLE: f64 = 0.002;
/// Doubling steps used to evaluate the Lattès cover.
const LATTES_DOUBLINGS: i32 = 30;

/// The base point `x̃` of the cover, lying over the base point of the radial.
pub fn cover_base(family: Family) -> GaussRational {
    match family {
        Family::Chebyshev(_) => GaussRational::from_fraction(1, 0, 2),
        Family::Lattes => GaussRational::from_fraction(1, 1, 2),
        Family::Power(_) | Family::QuadCantor => GaussRational::zero(),
    }
}

/// Exact base point downstairs, `φ(x̃)`.
fn base_value(family: Family) -> Complex64 {
    match family {
        Family::Power(_) => Complex64::new(1.0, 0.0),
        Family::Lattes => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// `16/ϖ⁴` where `ϖ = π/agm(1, √2)` is the lemniscate constant.
fn lattes_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        let (mut a, mut b) = (1.0f64, 2f64.sqrt());
        for _ in 0..40 {
            (a, b) = ((a + b) / 2.0, (a * b).sqrt());
        }
        let varpi = PI / a;
        16.0 / varpi.powi(4)
    })
}

fn lattes_map(w: Complex64) -> Complex64 {
    -(w - 2.0 + w.inv()) / 4.0
}

/// The universal orbifold covering `φ`: `e^{-2πiz}` for power maps,
/// `2cos(πz)` for Chebyshev maps and the order-four elliptic function with
/// periods `2Γ` for the Lattès map.
pub fn phi(family: Family, z: Complex64) -> Result<SpherePoint, LiftError> {
    match family {
        Family::Power(_) => Ok(SpherePoint::Finite((Complex64::new(0.0, -2.0 * PI) * z).exp())),
        Family::Chebyshev(_) => Ok(SpherePoint::Finite(2.0 * (PI * z).cos())),
        Family::Lattes => {
            // Reduce into the cell of 2Γ about 0, then use φ((1+i)z) = f(φ(z))
            // and the pole φ(z) ≈ A/z⁴ at the origin.
            let r = Complex64::new(
                z.re - 2.0 * (z.re / 2.0).round(),
                z.im - 2.0 * (z.im / 2.0).round(),
            );
            let n = r.norm();
            if n < 1e-150 {
                return Ok(SpherePoint::Infinity);
            }
            let k = if n < 1e-4 { 0 } else { LATTES_DOUBLINGS };
            let mut w = lattes_scale() * (-4f64).powi(k) * r.inv().powi(4);
            for _ in 0..k {
                w = lattes_map(w);
            }
            Ok(if w.is_finite() {
                SpherePoint::Finite(w)
            } else {
                SpherePoint::Infinity
            })
        }
        Family::QuadCantor => Err(LiftError::UnsupportedFamily(family)),
    }
}

fn finite_phi(family: Family, z: Complex64) -> Result<Complex64, LiftError> {
    match phi(family, z)? {
        SpherePoint::Finite(w) => Ok(w),
        SpherePoint::Infinity => Err(LiftError::UnsupportedFamily(family)),
    }
}

/// Cover path from `x̃` to the entry point, avoiding `φ⁻¹` of the
/// postcritical set.
fn cover_path(family: Family, entry: ClassEntry, target: Complex64) -> Vec<Complex64> {
    let start = cover_base(family).to_complex();
    let waypoints = match entry {
        ClassEntry::Power { .. } => vec![start, target],
        ClassEntry::Chebyshev { .. } => {
            // Arc through the upper half-plane, away from the integers.
            let len = (target - start).norm();
            let n = ((len + 1.0) / LEG_SAMPLE).ceil() as usize;
            return (0..=n)
                .map(|k| {
                    let t = k as f64 / n as f64;
                    start + (target - start) * t + Complex64::new(0.0, 0.5 * (PI * t).sin())
                })
                .collect();
        }
        ClassEntry::Lattes { alpha, .. } => {
            // Along lines of half-integer coordinates, then half a step onto
            // the edge midpoint; every point stays 1/2 away from Γ.
            let centre = if alpha.re != 0 {
                target + Complex64::new(0.0, 0.5)
            } else {
                target + Complex64::new(0.5, 0.0)
            };
            vec![start, Complex64::new(centre.re, start.im), centre, target]
        }
    };
    let mut pts = vec![waypoints[0]];
    for pair in waypoints.windows(2) {
        let n = ((pair[1] - pair[0]).norm() / LEG_SAMPLE).ceil().max(1.0) as usize;
        pts.extend((1..=n).map(|k| pair[0] + (pair[1] - pair[0]) * (k as f64 / n as f64)));
    }
    pts
}

/// A radial whose class is `class`: leg `i` is `φ` of a cover path from `x̃`
/// to the `i`-th entry.
pub fn radial_from_class(map: &MapModel, class: &RadialClass) -> Result<Radial, LiftError> {
    let family = class.family();
    if map.family() != family {
        return Err(LiftError::UnsupportedFamily(map.family()));
    }
    let base = base_value(family);
    let mut legs = Vec::with_capacity(class.degree());
    for (i, &entry) in class.entries().iter().enumerate() {
        let target = class.value(i).to_complex();
        let path = cover_path(family, entry, target);
        let mut pts = vec![base];
        for &z in &path[1..] {
            pts.push(finite_phi(family, z)?);
        }
        legs.push(Curve::from_points(pts)?);
    }
    Ok(Radial::new(map, base, legs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding_tree::{pi_eval, CodingTree, SymbolSeq};
    use crate::lifted_ifs::lift_radial_class;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fin(p: SpherePoint) -> Complex64 {
        match p {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => panic!("infinite"),
        }
    }

    #[test]
    fn lattes_cover_normalization() {
        let l = Family::Lattes;
        assert!((fin(phi(l, c(1.0, 0.0)).unwrap()) - c(1.0, 0.0)).norm() < 1e-9);
        assert!((fin(phi(l, c(0.5, 0.5)).unwrap()) - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(fin(phi(l, c(1.0, 1.0)).unwrap()).norm() < 1e-9);
        assert_eq!(phi(l, c(2.0, -2.0)).unwrap(), SpherePoint::Infinity);
        let f = MapModel::new(l).unwrap();
        for z in [c(0.37, 0.21), c(-0.8, 0.45), c(1.3, -0.6)] {
            let v = fin(phi(l, z).unwrap());
            assert!((fin(phi(l, c(0.0, 1.0) * z).unwrap()) - v).norm() < 1e-9 * (1.0 + v.norm()));
            assert!((fin(phi(l, z + c(2.0, 2.0)).unwrap()) - v).norm() < 1e-9 * (1.0 + v.norm()));
            let w = fin(phi(l, c(1.0, 1.0) * z).unwrap());
            assert!((f.evaluate(v).unwrap() - w).norm() < 1e-8 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn radial_classes_roundtrip() {
        for (fam, s) in [
            (Family::Power(2), "0,3/2"),
            (Family::Power(3), "0,1/3,5/3"),
            (Family::Chebyshev(2), "1/4,-1/4+1"),
            (Family::Chebyshev(2), "-1/4+2,1/4-1"),
            (Family::Lattes, "i/2,1/2+1+i"),
        ] {
            let map = MapModel::new(fam).unwrap();
            let class = RadialClass::parse(fam, s).unwrap();
            let r = radial_from_class(&map, &class).unwrap();
            for (i, leg) in r.legs().iter().enumerate() {
                let want = fin(phi(fam, class.value(i).to_complex()).unwrap());
                assert!((leg.end() - want).norm() < 1e-12, "{fam} {s}");
            }
        }
    }

    #[test]
    fn coding_map_is_phi_of_ifs_point() {
        for (fam, s) in [
            (Family::Power(2), "0,3/2"),
            (Family::Chebyshev(2), "1/4,-1/4+1"),
            (Family::Chebyshev(2), "1/4+1,1/4-2"),
        ] {
            let map = MapModel::new(fam).unwrap();
            let class = RadialClass::parse(fam, s).unwrap();
            let radial = radial_from_class(&map, &class).unwrap();
            let tree = CodingTree::extend(&map, &radial, 8).unwrap();
            let ifs = lift_radial_class(&class).unwrap();
            let base = cover_base(fam);
            for w in ["1^", "2^", "12^", "2.112^", "21.2^"] {
                let seq: SymbolSeq = w.parse().unwrap();
                for k in [1, 5, 8] {
                    let word = seq.take(k);
                    let v = tree.point(&word).unwrap();
                    let want = fin(phi(fam, ifs.apply_word(&word, &base).to_complex()).unwrap());
                    assert!((v - want).norm() < 1e-9, "{fam} {s} {w} {k}: {v} vs {want}");
                }
            }
        }
        let map = MapModel::new(Family::Power(2)).unwrap();
        let class = RadialClass::parse(Family::Power(2), "0,3/2").unwrap();
        let tree = CodingTree::extend(&map, &radial_from_class(&map, &class).unwrap(), 8).unwrap();
        let ifs = lift_radial_class(&class).unwrap();
        for w in ["1^", "12^", "2.112^"] {
            let seq: SymbolSeq = w.parse().unwrap();
            let v = pi_eval(&tree, &seq, 1e-9).unwrap();
            let want = fin(phi(Family::Power(2), ifs.point(&seq)).unwrap());
            assert!((v.point - want).norm() < 1e-7, "{w}");
        }
    }
}
