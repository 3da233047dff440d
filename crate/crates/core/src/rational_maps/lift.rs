use num_complex::Complex64;

use super::{MapError, MapModel};
use crate::complex_geom::Curve;

/// Minimum distance between a curve to be lifted and any critical value.
pub const EPS_CV: f64 = 1e-4;
/// Longest continuation step, both downstairs and on the lifted curve.
pub const MAX_LIFT_STEP: f64 = 0.05;
/// Lifts leaving this disc abort.
pub const WINDOW_RADIUS: f64 = 100.0;

const START_TOL: f64 = 1e-9;
const MIN_STEP: f64 = 1e-12;
/// The tracked root must be this many times closer than any other root.
const SEPARATION: f64 = 3.0;

/// A lifted polyline together with the downstairs points it lies over.
#[derive(Clone, Debug)]
pub struct LiftTrace {
    pub lift: Curve,
    pub base: Vec<Complex64>,
}

/// `F_{x0}(l)`: the lift of `l` under `f` starting at `x0`.
pub fn lift_curve(map: &MapModel, l: &Curve, x0: Complex64) -> Result<Curve, MapError> {
    Ok(lift_curve_traced(map, l, x0)?.lift)
}

/// Like [`lift_curve`], also returning the point of `l` under every lifted vertex.
pub fn lift_curve_traced(map: &MapModel, l: &Curve, x0: Complex64) -> Result<LiftTrace, MapError> {
    let w0 = l.start();
    let gap = match map.evaluate(x0) {
        Ok(fx) => (fx - w0).norm(),
        Err(_) => f64::INFINITY,
    };
    if !(gap <= START_TOL * (1.0 + w0.norm())) {
        return Err(MapError::StartMismatch { x0, gap });
    }
    for value in map.critical_values() {
        let distance = l.distance_to(value);
        if distance < EPS_CV {
            return Err(MapError::CriticalValueProximity { value, distance });
        }
    }
    let mut pts = vec![x0];
    let mut base = vec![w0];
    let mut z = x0;
    for (a, b) in l.segments() {
        let pieces = ((b - a).norm() / MAX_LIFT_STEP).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let p = a + (b - a) * (k as f64 / pieces as f64);
            let q = if k + 1 == pieces {
                b
            } else {
                a + (b - a) * ((k + 1) as f64 / pieces as f64)
            };
            let mut t = 0.0;
            let mut h = 1.0;
            while t < 1.0 {
                // Snap to the segment end so rounding cannot stall `t` below 1.
                let s = if t + h >= 1.0 - 1e-12 { 1.0 } else { t + h };
                let w = if s >= 1.0 { q } else { p + (q - p) * s };
                let roots = map.preimages(w)?;
                let (near, d1, d2) = nearest_two(&roots, z);
                if d2 >= SEPARATION * d1 && d1 <= MAX_LIFT_STEP {
                    z = near;
                    t = s.min(1.0);
                    if z.norm() > WINDOW_RADIUS {
                        return Err(MapError::WindowEscape { at: z });
                    }
                    if pts.last() != Some(&z) {
                        pts.push(z);
                        base.push(w);
                    }
                    h = (2.0 * h).min(1.0 - t);
                } else {
                    h *= 0.5;
                    if h < MIN_STEP {
                        return Err(MapError::BranchAmbiguity { near: z });
                    }
                }
            }
        }
    }
    let lift = Curve::new(pts, false)?;
    Ok(LiftTrace { lift, base })
}

fn nearest_two(roots: &[Complex64], z: Complex64) -> (Complex64, f64, f64) {
    let mut best = (roots[0], f64::INFINITY);
    let mut second = f64::INFINITY;
    for &r in roots {
        let d = (r - z).norm();
        if d < best.1 {
            second = best.1;
            best = (r, d);
        } else if d < second {
            second = d;
        }
    }
    (best.0, best.1, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_maps::Family;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad() -> MapModel {
        MapModel::new(Family::QuadCantor).unwrap()
    }

    fn circle(center: Complex64, start: Complex64, n: usize) -> Curve {
        let r = start - center;
        let mut pts: Vec<_> = (0..n)
            .map(|k| center + r * Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        pts.push(start);
        Curve::new(pts, true).unwrap()
    }

    #[test]
    fn straight_segment_lift() {
        let l = Curve::segment(c(0.0, 0.0), c(1.0, 0.0));
        let lift = lift_curve(&quad(), &l, c(3f64.sqrt(), 0.0)).unwrap();
        assert!((lift.end() - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn monodromy_around_critical_value() {
        let l = circle(c(-3.0, 0.0), c(-2.5, 0.0), 64);
        let x0 = c(0.5f64.sqrt(), 0.0);
        let lift = lift_curve(&quad(), &l, x0).unwrap();
        assert!((lift.end() + x0).norm() < 1e-9);
        // Oracle: track sqrt(w + 3) along the circle with tiny steps and
        // continuity by nearest choice.
        let mut z = x0;
        for k in 1..=64_000 {
            let w = c(-3.0, 0.0) + c(0.5, 0.0) * Complex64::from_polar(1.0, TAU * k as f64 / 64_000.0);
            let s = (w + 3.0).sqrt();
            z = if (s - z).norm() < (s + z).norm() { s } else { -s };
        }
        assert!((lift.end() - z).norm() < 1e-9);
    }

    #[test]
    fn power_arc_lift() {
        let m = MapModel::new(Family::Power(2)).unwrap();
        let arc = Curve::from_points((0..=200).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 200.0))).unwrap();
        let lift = lift_curve(&m, &arc, c(1.0, 0.0)).unwrap();
        assert!((lift.end() - c(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn errors_are_reported() {
        let q = quad();
        let l = Curve::segment(c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(lift_curve(&q, &l, c(1.0, 0.0)), Err(MapError::StartMismatch { .. })));
        let near = Curve::segment(c(-2.0, 0.0), c(-3.0, 5e-5));
        assert!(matches!(
            lift_curve(&q, &near, c(1.0, 0.0)),
            Err(MapError::CriticalValueProximity { .. })
        ));
        let far = Curve::segment(c(0.0, 0.0), c(20_000.0, 0.0));
        assert!(matches!(
            lift_curve(&q, &far, c(3f64.sqrt(), 0.0)),
            Err(MapError::WindowEscape { .. })
        ));
    }

    #[test]
    fn nullhomotopic_loop_closes() {
        // A loop around 6 only: 6 is not a critical value, so the lift closes.
        let l = circle(c(6.0, 0.0), c(5.0, 0.0), 48);
        let x0 = c(8f64.sqrt(), 0.0);
        let lift = lift_curve(&quad(), &l, x0).unwrap();
        assert!((lift.end() - x0).norm() < 1e-9);
    }

    proptest! {
        #[test]
        fn projection_and_composition(
            fam in prop::sample::select(vec![Family::Power(2), Family::Power(3), Family::Chebyshev(2), Family::Lattes, Family::QuadCantor]),
            pts in prop::collection::vec((-2.5f64..2.5, 0.2f64..2.0), 1..5),
            pick in 0usize..3,
        ) {
            let m = MapModel::new(fam).unwrap();
            let start = c(0.3, 1.1);
            let l = Curve::from_points(std::iter::once(start).chain(pts.iter().map(|&(x, y)| c(x, y)))).unwrap();
            let roots = m.preimages(start).unwrap();
            let x0 = roots[pick % roots.len()];
            let Ok(tr) = lift_curve_traced(&m, &l, x0) else { return Ok(()); };
            for (z, w) in tr.lift.vertices().iter().zip(&tr.base) {
                prop_assert!((m.evaluate(*z).unwrap() - *w).norm() <= 1e-8 * (1.0 + w.norm()));
            }
            prop_assert!((m.evaluate(tr.lift.end()).unwrap() - l.end()).norm() <= 1e-9 * (1.0 + l.end().norm()));
            let fine = lift_curve(&m, &l.subdivide(3), x0).unwrap();
            prop_assert!((fine.end() - tr.lift.end()).norm() <= 1e-9);
        }
    }
}
