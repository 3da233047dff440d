use num_complex::Complex64;
use rayon::prelude::*;

use super::{CodingError, SymbolSeq};
use crate::complex_geom::Curve;
use crate::rational_maps::{lift_curve, MapModel};

/// Depth up to which the tree keeps every curve `l_w`.
pub const DEFAULT_STORED_DEPTH: usize = 12;
/// Deepest prefix `pi_eval` will unroll.
pub const MAX_EVAL_DEPTH: usize = 64;

const BASE_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-7;
/// Discount applied to the empirical expansion constant.
const CONTRACTION_DISCOUNT: f64 = 0.9;

/// `d` legs from the base point to the points of `f^{-1}(base)`.
#[derive(Clone, Debug)]
pub struct Radial {
    base: Complex64,
    legs: Vec<Curve>,
}

impl Radial {
    pub fn new(map: &MapModel, base: Complex64, legs: Vec<Curve>) -> Result<Self, CodingError> {
        let bad = |m: String| Err(CodingError::InvalidRadial(m));
        if legs.len() != map.degree() {
            return bad(format!("expected {} legs, got {}", map.degree(), legs.len()));
        }
        let mut avoid = map.finite_postcritical();
        avoid.extend_from_slice(map.window_checks());
        for (i, leg) in legs.iter().enumerate() {
            if (leg.start() - base).norm() > 1e-12 * (1.0 + base.norm()) {
                return bad(format!("leg {} does not start at the base point", i + 1));
            }
            let image = map
                .evaluate(leg.end())
                .map_err(|e| CodingError::InvalidRadial(format!("leg {}: {e}", i + 1)))?;
            if (image - base).norm() > BASE_TOL * (1.0 + base.norm()) {
                return bad(format!("leg {} does not end over the base point", i + 1));
            }
            leg.check_avoids(&avoid)
                .map_err(|e| CodingError::InvalidRadial(format!("leg {}: {e}", i + 1)))?;
        }
        Ok(Self { base, legs })
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn legs(&self) -> &[Curve] {
        &self.legs
    }

    pub fn degree(&self) -> usize {
        self.legs.len()
    }

    /// Leg endpoints pairwise distinct.
    pub fn is_proper(&self) -> bool {
        let ends: Vec<_> = self.legs.iter().map(|l| l.end()).collect();
        ends.iter()
            .enumerate()
            .all(|(i, a)| ends[i + 1..].iter().all(|b| (*a - *b).norm() > BASE_TOL))
    }

    /// Longest leg arc length.
    pub fn max_leg_length(&self) -> f64 {
        self.legs.iter().map(Curve::length).fold(0.0, f64::max)
    }
}

/// The curves `l_w` and points `x_w` for all words up to a stored depth.
#[derive(Clone, Debug)]
pub struct CodingTree {
    map: MapModel,
    radial: Radial,
    /// `levels[k-1][index(w)]` holds `l_w` for `|w| = k`.
    levels: Vec<Vec<Curve>>,
    contraction: Option<f64>,
}

fn word_text(w: &[u8]) -> String {
    w.iter().map(|s| char::from(b'1' + s)).collect()
}

fn index_of(w: &[u8], d: usize) -> usize {
    w.iter().fold(0, |acc, &s| acc * d + s as usize)
}

fn word_of(mut index: usize, len: usize, d: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for k in (0..len).rev() {
        w[k] = (index % d) as u8;
        index /= d;
    }
    w
}

impl CodingTree {
    /// Builds all `l_w`, `|w| <= depth`, by `l_{iw} = l_i · F_{x_i}(l_w)`.
    pub fn extend(map: &MapModel, radial: &Radial, depth: usize) -> Result<Self, CodingError> {
        if depth == 0 {
            return Err(CodingError::InvalidRadial("depth must be at least 1".into()));
        }
        let d = radial.degree();
        let mut levels: Vec<Vec<Curve>> = vec![radial.legs.clone()];
        for k in 1..depth {
            let prev = &levels[k - 1];
            let width = prev.len();
            let next: Result<Vec<Curve>, CodingError> = (0..d * width)
                .into_par_iter()
                .map(|idx| {
                    let (i, w) = (idx / width, idx % width);
                    let leg = &radial.legs[i];
                    let lifted = lift_curve(map, &prev[w], leg.end()).map_err(|source| {
                        let mut word = vec![i as u8];
                        word.extend(word_of(w, k, d));
                        CodingError::Lift {
                            word: word_text(&word),
                            source,
                        }
                    })?;
                    leg.concat(&lifted).map_err(|e| CodingError::Lift {
                        word: word_text(&[i as u8]),
                        source: e.into(),
                    })
                })
                .collect();
            levels.push(next?);
        }
        let mut tree = Self {
            map: map.clone(),
            radial: radial.clone(),
            levels,
            contraction: None,
        };
        tree.contraction = tree.estimate_contraction();
        Ok(tree)
    }

    pub fn map(&self) -> &MapModel {
        &self.map
    }

    pub fn radial(&self) -> &Radial {
        &self.radial
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn degree(&self) -> usize {
        self.radial.degree()
    }

    /// Discounted expansion constant `c`, when the tree is deep enough and proper.
    pub fn contraction(&self) -> Option<f64> {
        self.contraction
    }

    /// Stored curve `l_w` for `1 <= |w| <= depth`.
    pub fn stored_curve(&self, w: &[u8]) -> Option<&Curve> {
        if w.is_empty() || w.len() > self.depth() {
            return None;
        }
        self.levels[w.len() - 1].get(index_of(w, self.degree()))
    }

    /// All points `x_w` for `|w| = k`, in lexicographic word order.
    pub fn level_points(&self, k: usize) -> Vec<Complex64> {
        self.levels[k - 1].iter().map(Curve::end).collect()
    }

    /// `x_w`; the empty word gives the base point.
    pub fn point(&self, w: &[u8]) -> Result<Complex64, CodingError> {
        if w.is_empty() {
            return Ok(self.radial.base);
        }
        if let Some(c) = self.stored_curve(w) {
            return Ok(c.end());
        }
        Ok(self.curve(w)?.end())
    }

    /// `l_w` for any word, re-lifting beyond the stored depth along the one
    /// branch needed.
    pub fn curve(&self, w: &[u8]) -> Result<Curve, CodingError> {
        if w.is_empty() {
            return Ok(Curve::constant(self.radial.base));
        }
        if let Some(c) = self.stored_curve(w) {
            return Ok(c.clone());
        }
        let split = w.len() - self.depth();
        let mut acc = self.stored_curve(&w[split..]).expect("stored suffix").clone();
        for j in (0..split).rev() {
            let leg = &self.radial.legs[w[j] as usize];
            let lift_err = |source| CodingError::Lift {
                word: word_text(&w[j..]),
                source,
            };
            let lifted = lift_curve(&self.map, &acc, leg.end()).map_err(lift_err)?;
            acc = leg.concat(&lifted).map_err(|e| lift_err(e.into()))?;
        }
        Ok(acc)
    }

    /// `F_{x_u}(l)`: the lift of `l` under `f^{|u|}` ending over `l.end`, starting at `x_u`.
    pub fn lift_along(&self, u: &[u8], l: &Curve) -> Result<Curve, CodingError> {
        let mut acc = l.clone();
        for j in (0..u.len()).rev() {
            let start = self.point(&u[j..])?;
            acc = lift_curve(&self.map, &acc, start).map_err(|source| CodingError::Lift {
                word: word_text(&u[j..]),
                source,
            })?;
        }
        Ok(acc)
    }

    fn one_level_diameter(&self, w: &[u8]) -> f64 {
        let d = self.degree();
        let pts: Vec<Complex64> = (0..d as u8)
            .map(|s| {
                let mut wu = w.to_vec();
                wu.push(s);
                self.stored_curve(&wu).expect("stored child").end()
            })
            .collect();
        let mut diam: f64 = 0.0;
        for a in 0..d {
            for b in a + 1..d {
                diam = diam.max((pts[a] - pts[b]).norm());
            }
        }
        diam
    }

    /// Min over the deeper half of the stored nodes of
    /// `diam(children of σw) / diam(children of w)`, discounted by 10%.
    fn estimate_contraction(&self) -> Option<f64> {
        if self.depth() < 2 {
            return None;
        }
        let d = self.degree();
        let mut best = f64::INFINITY;
        for k in (self.depth() / 2).max(1)..self.depth() {
            for idx in 0..d.pow(k as u32) {
                let w = word_of(idx, k, d);
                let dw = self.one_level_diameter(&w);
                let ds = self.one_level_diameter(&w[1..]);
                if dw > 1e-12 && ds > 1e-12 {
                    best = best.min(ds / dw);
                }
            }
        }
        best.is_finite().then_some(CONTRACTION_DISCOUNT * best)
    }

    /// Maximal one-level diameter over the words of length `k`.
    pub fn level_diameter(&self, k: usize) -> f64 {
        let d = self.degree();
        (0..d.pow(k as u32))
            .map(|idx| self.one_level_diameter(&word_of(idx, k, d)))
            .fold(0.0, f64::max)
    }

    /// Tail bound `M c^-k / (1 - 1/c)` for prefixes of length `k`.
    pub fn tail_bound(&self, k: usize) -> Option<f64> {
        let c = self.contraction?;
        if c <= 1.0 {
            return None;
        }
        Some(self.radial.max_leg_length() * c.powi(-(k as i32)) / (1.0 - 1.0 / c))
    }
}

/// Value of the coding map together with its certified error radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiValue {
    pub point: Complex64,
    pub bound: f64,
    pub depth: usize,
}

/// `x_ω` to accuracy `eps`; finite words return `x_w` and the tail bound at `|w|`.
pub fn pi_eval(tree: &CodingTree, seq: &SymbolSeq, eps: f64) -> Result<PiValue, CodingError> {
    seq.check_alphabet(tree.degree())
        .map_err(|e| CodingError::Parse(e.to_string()))?;
    let unreachable = CodingError::AccuracyUnreachable {
        needed: MAX_EVAL_DEPTH + 1,
        max: MAX_EVAL_DEPTH,
    };
    let depth = match seq.len() {
        Some(n) => n,
        None => {
            let m = tree.radial.max_leg_length();
            match tree.contraction() {
                _ if m == 0.0 => 1,
                Some(c) if c > 1.0 => {
                    let need = ((m / ((1.0 - 1.0 / c) * eps)).ln() / c.ln()).ceil();
                    let need = need.max(1.0) as usize;
                    if need > MAX_EVAL_DEPTH {
                        return Err(CodingError::AccuracyUnreachable {
                            needed: need,
                            max: MAX_EVAL_DEPTH,
                        });
                    }
                    need
                }
                _ => return Err(unreachable),
            }
        }
    };
    let word = seq.take(depth);
    let point = tree.point(&word)?;
    let bound = if tree.radial.max_leg_length() == 0.0 {
        0.0
    } else {
        tree.tail_bound(depth).unwrap_or(f64::INFINITY)
    };
    Ok(PiValue {
        point,
        bound,
        depth,
    })
}

/// Number of distinct `x_w` at each level `1..=k`, clustering at `1e-7`.
pub fn image_probe(tree: &CodingTree, k: usize) -> Vec<usize> {
    (1..=k.min(tree.depth()))
        .map(|level| count_distinct(tree.level_points(level), CLUSTER_TOL))
        .collect()
}

/// Number of clusters of points closer than `tol` (single linkage).
pub fn count_distinct(mut pts: Vec<Complex64>, tol: f64) -> usize {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re));
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if pts[b].re - pts[a].re > tol {
                break;
            }
            if (pts[a] - pts[b]).norm() <= tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}
