use num_complex::{Complex, Complex64};
use num_traits::Zero;

use super::affine::{Ambient, LiftedIfs};
use super::measure::closed_form_measure;
use super::raster::{attractor_raster, measure_estimate, TileRaster};
use super::LiftError;
use crate::cod_space::{DeckElement, UNITS};
use crate::rational_maps::Family;

/// A translate is accepted when at most this fraction of it is already covered.
const ACCEPT_OVERLAP: f64 = 0.05;
/// Raster measures at or below this are treated as zero.
const ZERO_MEASURE: f64 = 1e-3;

/// Axis-parallel window `[lo.re, hi.re] × [lo.im, hi.im]`; the imaginary
/// range is ignored on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Window {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Self, LiftError> {
        if !(lo.re < hi.re && lo.im <= hi.im) {
            return Err(LiftError::InvalidWindow(format!("{lo} .. {hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// `[a, b]` on the real line.
    pub fn interval(a: f64, b: f64) -> Result<Self, LiftError> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    /// `[a, b]²`.
    pub fn square(a: f64, b: f64) -> Result<Self, LiftError> {
        Self::new(Complex64::new(a, a), Complex64::new(b, b))
    }
}

/// Outcome of a tiling check.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingReport {
    /// Fraction of window pixels covered by some accepted translate.
    pub coverage: f64,
    /// Fraction of window pixels covered by two or more translates.
    pub overlap: f64,
    pub translations: Vec<DeckElement>,
    pub window_pixels: usize,
}

struct Canvas {
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    counts: Vec<u16>,
}

impl Canvas {
    fn index(&self, p: (i64, i64)) -> Option<usize> {
        let x = p.0 - self.x0;
        let y = p.1 - self.y0;
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height)
            .then(|| y as usize * self.width + x as usize)
    }
}

/// Linear part `u` and translation `s` of a deck element, as integers.
fn deck_parts(t: &DeckElement) -> ((i64, i64), (i64, i64)) {
    match *t {
        DeckElement::Power { n } => ((1, 0), (n, 0)),
        DeckElement::Chebyshev { a, n } => ((a as i64, 0), (2 * n, 0)),
        DeckElement::Lattes { u, c } => ((u.re, u.im), (2 * c.re, 2 * c.im)),
    }
}

/// Pixel of `t(centre(p))`: `(u(2p + e) + 2 r s - e)/2` with `e` the centre
/// offset, exact because deck elements permute pixel centres.
fn deck_pixel(u: (i64, i64), s: (i64, i64), unit: (i64, i64), res: i64, p: (i64, i64)) -> (i64, i64) {
    let v = (2 * p.0 + unit.0, 2 * p.1 + unit.1);
    let uv = (u.0 * v.0 - u.1 * v.1, u.0 * v.1 + u.1 * v.0);
    (
        (uv.0 + 2 * res * s.0 - unit.0) / 2,
        (uv.1 + 2 * res * s.1 - unit.1) / 2,
    )
}

/// Deck elements in lexicographic order of their lattice coordinates with
/// translation part of length at most `radius`.
fn deck_candidates(family: Family, radius: f64) -> Vec<DeckElement> {
    let m = radius.ceil() as i64 + 1;
    match family {
        Family::Power(_) => (-m..=m).map(|n| DeckElement::Power { n }).collect(),
        Family::Chebyshev(_) => (-m..=m)
            .flat_map(|n| [1i8, -1].map(|a| DeckElement::Chebyshev { a, n }))
            .collect(),
        _ => {
            let m = m / 2 + 1;
            (-m..=m)
                .flat_map(|x| (-m..=m).map(move |y| Complex::new(x, y)))
                .flat_map(|c| UNITS.map(|u| DeckElement::Lattes { u, c }))
                .collect()
        }
    }
}

/// Greedily chooses deck translates of the tile meeting the window, adding a
/// translate when it overlaps the union so far in at most 5% of its pixels,
/// and reports how well they cover the window.
pub fn tiling_check(ifs: &LiftedIfs, window: Window, res: u32) -> Result<TilingReport, LiftError> {
    let zero = match closed_form_measure(ifs.class()) {
        Ok(m) => m.is_zero(),
        Err(LiftError::UnsupportedFamily(_)) => false,
        Err(e) => return Err(e),
    };
    let tile: TileRaster = attractor_raster(ifs, res)?;
    if zero || measure_estimate(&tile) <= ZERO_MEASURE {
        return Err(LiftError::ZeroMeasureTile);
    }
    let r = res as i64;
    let rf = res as f64;
    let line = ifs.ambient() == Ambient::Line;
    let unit = if line { (1, 0) } else { (1, 1) };
    // Window pixels are those whose centres lie in the window.
    let wx = ((window.lo.re * rf - 0.5).ceil() as i64, (window.hi.re * rf - 0.5).floor() as i64);
    let wy = if line {
        (0, 0)
    } else {
        ((window.lo.im * rf - 0.5).ceil() as i64, (window.hi.im * rf - 0.5).floor() as i64)
    };
    if wx.0 > wx.1 || wy.0 > wy.1 {
        return Err(LiftError::InvalidWindow("no pixel centre inside".into()));
    }
    let pixels: Vec<(i64, i64)> = tile.set_pixels().collect();
    let (ox, oy) = tile.origin();
    let corners = [
        (ox, oy),
        (ox + tile.width() as i64, oy),
        (ox, oy + tile.height() as i64),
        (ox + tile.width() as i64, oy + tile.height() as i64),
    ];
    let tile_radius = corners
        .iter()
        .map(|&(x, y)| ((x * x + y * y) as f64).sqrt())
        .fold(0.0, f64::max)
        + 2.0;
    let reach = tile_radius.ceil() as i64;
    let mut canvas = Canvas {
        x0: wx.0 - reach,
        y0: if line { 0 } else { wy.0 - reach },
        width: (wx.1 - wx.0 + 1 + 2 * reach) as usize,
        height: if line { 1 } else { (wy.1 - wy.0 + 1 + 2 * reach) as usize },
        counts: Vec::new(),
    };
    canvas.counts = vec![0; canvas.width * canvas.height];
    let in_window = |p: (i64, i64)| p.0 >= wx.0 && p.0 <= wx.1 && p.1 >= wy.0 && p.1 <= wy.1;
    let centre = Complex64::new((wx.0 + wx.1) as f64 / 2.0, (wy.0 + wy.1) as f64 / 2.0);
    let half_diag = Complex64::new((wx.1 - wx.0) as f64, (wy.1 - wy.0) as f64).norm() / 2.0;
    let radius = (centre.norm() + half_diag + tile_radius) / rf;

    let mut translations = Vec::new();
    let mut image = Vec::with_capacity(pixels.len());
    for t in deck_candidates(ifs.family(), radius) {
        let (u, s) = deck_parts(&t);
        let shift = Complex64::new((s.0 * r) as f64, (s.1 * r) as f64);
        if (shift - centre).norm() > half_diag + tile_radius {
            continue;
        }
        image.clear();
        let mut hits_window = false;
        let mut covered = 0usize;
        for &p in &pixels {
            let q = deck_pixel(u, s, unit, r, p);
            if let Some(i) = canvas.index(q) {
                hits_window |= in_window(q);
                covered += (canvas.counts[i] > 0) as usize;
                image.push(i);
            }
        }
        if !hits_window || covered as f64 > ACCEPT_OVERLAP * pixels.len() as f64 {
            continue;
        }
        for &i in &image {
            canvas.counts[i] = canvas.counts[i].saturating_add(1);
        }
        translations.push(t);
    }

    let mut total = 0usize;
    let mut once = 0usize;
    let mut twice = 0usize;
    for y in wy.0..=wy.1 {
        for x in wx.0..=wx.1 {
            let c = canvas.counts[canvas.index((x, y)).expect("window inside canvas")];
            total += 1;
            once += (c >= 1) as usize;
            twice += (c >= 2) as usize;
        }
    }
    Ok(TilingReport {
        coverage: once as f64 / total as f64,
        overlap: twice as f64 / total as f64,
        translations,
        window_pixels: total,
    })
}
