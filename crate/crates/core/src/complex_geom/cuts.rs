use num_complex::Complex64;

use super::{segment_distance, Curve, FreeWord, GeomError, Letter, EPS_PUNCT};

/// Radius of the window inside which cut rays must stay disjoint.
const WINDOW: f64 = 100.0;

/// Cut rays, one per puncture, used to read off free-group words of loops.
#[derive(Clone, Debug, PartialEq)]
pub struct CutConfig {
    punctures: Vec<Complex64>,
    directions: Vec<Complex64>,
    names: Vec<String>,
}

impl CutConfig {
    /// Straight-down rays and names `B1, B2, …`.
    pub fn new(punctures: Vec<Complex64>) -> Result<Self, GeomError> {
        let n = punctures.len();
        let names = (1..=n).map(|k| format!("B{k}")).collect();
        Self::with_directions(punctures, vec![Complex64::new(0.0, -1.0); n], names)
    }

    pub fn with_directions(
        punctures: Vec<Complex64>,
        directions: Vec<Complex64>,
        names: Vec<String>,
    ) -> Result<Self, GeomError> {
        if directions.len() != punctures.len() || names.len() != punctures.len() {
            return Err(GeomError::InvalidCuts(
                "punctures, directions and names differ in length".into(),
            ));
        }
        let mut dirs = Vec::with_capacity(directions.len());
        for d in directions {
            let r = d.norm();
            if !(r.is_finite() && r > 0.0) {
                return Err(GeomError::InvalidCuts("zero ray direction".into()));
            }
            dirs.push(d / r);
        }
        for a in 0..punctures.len() {
            for b in a + 1..punctures.len() {
                if rays_meet(punctures[a], dirs[a], punctures[b], dirs[b]) {
                    return Err(GeomError::InvalidCuts(format!(
                        "rays of punctures {} and {} intersect",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(Self {
            punctures,
            directions: dirs,
            names,
        })
    }

    pub fn punctures(&self) -> &[Complex64] {
        &self.punctures
    }

    pub fn directions(&self) -> &[Complex64] {
        &self.directions
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Fails if some ray passes within `EPS_PUNCT` of `base`.
    pub fn check_basepoint(&self, base: Complex64) -> Result<(), GeomError> {
        for (k, (&p, &u)) in self.punctures.iter().zip(&self.directions).enumerate() {
            let far = p + u * WINDOW;
            if segment_distance(p, far, base) < EPS_PUNCT {
                return Err(GeomError::InvalidCuts(format!(
                    "ray {} passes through the basepoint",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

fn rays_meet(p: Complex64, u: Complex64, q: Complex64, v: Complex64) -> bool {
    // Two segments of length WINDOW; parallel rays only meet when collinear.
    let (pe, qe) = (p + u * WINDOW, q + v * WINDOW);
    let cross = |a: Complex64, b: Complex64| a.re * b.im - a.im * b.re;
    let d = cross(u, v);
    if d.abs() < 1e-15 {
        return segment_distance(p, pe, q) < EPS_PUNCT || segment_distance(q, qe, p) < EPS_PUNCT;
    }
    let w = q - p;
    let s = cross(w, v) / d;
    let t = cross(w, u) / d;
    (0.0..=WINDOW).contains(&s) && (0.0..=WINDOW).contains(&t)
}

/// Reads the free-group word of a closed loop from its ordered cut crossings.
///
/// A crossing counts `+1` when the puncture lies to the left of the direction
/// of travel, so a counter-clockwise circle around puncture `k` gives `Bk+`.
pub fn crossing_word(lp: &Curve, cuts: &CutConfig) -> Result<FreeWord, GeomError> {
    if !lp.is_closed() {
        return Err(GeomError::NotClosed {
            gap: (lp.end() - lp.start()).norm(),
        });
    }
    let mut word = FreeWord::empty();
    let mut hits: Vec<(f64, Letter)> = Vec::new();
    for (s, (a, b)) in lp.segments().enumerate() {
        hits.clear();
        for (k, (&p, &u)) in cuts.punctures.iter().zip(&cuts.directions).enumerate() {
            let degenerate = GeomError::DegenerateCrossing {
                segment: s,
                puncture: k,
            };
            if segment_distance(a, b, p) < EPS_PUNCT {
                return Err(degenerate);
            }
            let wa = (a - p) * u.conj();
            let wb = (b - p) * u.conj();
            let tiny = 1e-14 * (1.0 + a.norm().max(b.norm()));
            if (wa.im.abs() <= tiny && wa.re > 0.0) || (wb.im.abs() <= tiny && wb.re > 0.0) {
                return Err(degenerate);
            }
            if (wa.im < 0.0) == (wb.im < 0.0) {
                continue;
            }
            let t = wa.im / (wa.im - wb.im);
            let x = wa.re + t * (wb.re - wa.re);
            if x > 0.0 {
                let sign = if wb.im > wa.im { 1 } else { -1 };
                hits.push((t, Letter::new(k, sign)));
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        for &(_, l) in &hits {
            word.push(l);
        }
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cuts() -> CutConfig {
        CutConfig::new(vec![c(-3.0, 0.0), c(6.0, 0.0)]).unwrap()
    }

    fn circle(center: Complex64, r: f64, n: usize, phase: f64) -> Curve {
        let mut pts: Vec<_> = (0..n)
            .map(|k| center + Complex64::from_polar(r, phase + TAU * k as f64 / n as f64))
            .collect();
        pts.push(pts[0]);
        Curve::new(pts, true).unwrap()
    }

    fn word(s: &[(usize, i8)]) -> FreeWord {
        FreeWord::from_letters(s.iter().map(|&(g, e)| Letter::new(g, e)))
    }

    #[test]
    fn small_circle_is_a_generator() {
        let w = crossing_word(&circle(c(-3.0, 0.0), 0.1, 16, 0.1), &cuts()).unwrap();
        assert_eq!(w, word(&[(0, 1)]));
        assert_eq!(w.to_string(), "B1+");
        let back = crossing_word(&circle(c(-3.0, 0.0), 0.1, 16, 0.1).reverse(), &cuts()).unwrap();
        assert_eq!(back, word(&[(0, -1)]));
    }

    #[test]
    fn empty_rectangle_is_trivial() {
        let r = Curve::new(
            vec![c(0.0, 0.0), c(2.0, 0.0), c(2.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)],
            true,
        )
        .unwrap();
        assert!(crossing_word(&r, &cuts()).unwrap().is_empty());
    }

    /// Loop based at 0: spoke out, polygon around `p`, spoke back.
    fn lasso(p: Complex64) -> Curve {
        let start = p * (1.0 - 0.4 / p.norm());
        let theta0 = (start - p).arg();
        let mut pts = vec![c(0.0, 0.0), start];
        for k in 0..8 {
            pts.push(p + Complex64::from_polar(0.4, theta0 + TAU * (k as f64 + 0.5) / 8.0));
        }
        pts.push(start);
        pts.push(c(0.0, 0.0));
        Curve::from_points(pts).unwrap().close_up().unwrap()
    }

    #[test]
    fn figure_path_reads_both_generators() {
        let a = lasso(c(-3.0, 0.0));
        let b = lasso(c(6.0, 0.0));
        let ab = a.concat(&b).unwrap().close_up().unwrap();
        let w = crossing_word(&ab, &cuts()).unwrap();
        assert_eq!(w, word(&[(0, 1), (1, 1)]));
        // Oracle: one winding around each puncture.
        assert_eq!(winding_number_of(&ab, c(-3.0, 0.0)), 1);
        assert_eq!(winding_number_of(&ab, c(6.0, 0.0)), 1);
        // Concatenation with the inverse cancels.
        let aa = a.concat(&a.reverse()).unwrap().close_up().unwrap();
        assert!(crossing_word(&aa, &cuts()).unwrap().is_empty());
    }

    fn winding_number_of(lp: &Curve, p: Complex64) -> i64 {
        super::super::winding_number(lp, p)
    }

    #[test]
    fn degenerate_geometry_is_reported() {
        // Vertex exactly on the ray below -3.
        let r = Curve::new(
            vec![c(-4.0, 1.0), c(-3.0, -1.0), c(-2.0, 1.0), c(-4.0, 1.0)],
            true,
        )
        .unwrap();
        assert!(matches!(
            crossing_word(&r, &cuts()),
            Err(GeomError::DegenerateCrossing { puncture: 0, .. })
        ));
        // Segment through the puncture itself.
        let r = Curve::new(vec![c(-4.0, 0.0), c(-2.0, 0.0), c(-3.0, 1.0), c(-4.0, 0.0)], true).unwrap();
        assert!(crossing_word(&r, &cuts()).is_err());
    }

    #[test]
    fn intersecting_rays_rejected() {
        let bad = CutConfig::with_directions(
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, -1.0), c(-1.0, -1.0)],
            vec!["a".into(), "b".into()],
        );
        assert!(bad.is_err());
        assert!(cuts().check_basepoint(c(-3.0, -2.0)).is_err());
        assert!(cuts().check_basepoint(c(0.0, 0.0)).is_ok());
    }

    fn arb_loop() -> impl Strategy<Value = Curve> {
        prop::collection::vec((-8.0f64..10.0, -3.0f64..3.0), 3..9).prop_map(|pts| {
            let mut v: Vec<Complex64> = std::iter::once(c(0.0, 0.5))
                .chain(pts.into_iter().map(|(x, y)| c(x, y)))
                .collect();
            v.push(v[0]);
            Curve::from_points(v).unwrap().close_up().unwrap()
        })
    }

    proptest! {
        #[test]
        fn word_invariants(lp in arb_loop(), parts in 2usize..6) {
            let cuts = cuts();
            let Ok(w) = crossing_word(&lp, &cuts) else { return Ok(()); };
            prop_assert_eq!(crossing_word(&lp.subdivide(parts), &cuts).unwrap(), w.clone());
            prop_assert_eq!(crossing_word(&lp.reverse(), &cuts).unwrap(), w.inverse());
            let twice = lp.concat(&lp).unwrap().close_up().unwrap();
            prop_assert_eq!(crossing_word(&twice, &cuts).unwrap(), w.concat(&w));
            // Exponent sums agree with winding numbers.
            for (k, &p) in cuts.punctures().iter().enumerate() {
                let sum: i64 = w.letters().iter().filter(|l| l.generator == k).map(|l| l.sign as i64).sum();
                prop_assert_eq!(sum, winding_number_of(&lp, p));
            }
        }
    }
}
