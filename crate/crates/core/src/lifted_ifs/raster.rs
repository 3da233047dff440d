use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::affine::{Ambient, LiftedIfs};
use super::LiftError;
use crate::complex_geom::GaussRational;

pub const MIN_RESOLUTION: u32 = 16;
pub const ITERATION_CAP: usize = 256;
/// Extra pixels kept around the bounding box of the attractor.
const MARGIN: i64 = 2;

type Gi = (i64, i64);

fn mul(a: Gi, b: Gi) -> Gi {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn floor_div(a: Gi, d: i64) -> Gi {
    (a.0.div_euclid(d), a.1.div_euclid(d))
}

/// One contraction in pixel coordinates at resolution `r`.
///
/// Pixel `P` has centre `(2P + u)/(2r)` with `u = 1+i` in the plane and
/// `u = 1` on the line. With `1/a = A` a Gaussian integer and `b = B/D`, the
/// pixel of `g⁻¹(centre(Q))` is `A Q + k` for a constant `k`.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct PixelMap {
    expand: Gi,
    offset: Gi,
    unit: Gi,
    num: Gi,
    den: i64,
    res: i64,
}

impl PixelMap {
    pub(crate) fn new(a: &GaussRational, b: &GaussRational, ambient: Ambient, res: u32) -> Result<Self, LiftError> {
        let expand = GaussRational::one()
            .checked_div(a)
            .and_then(|x| x.to_gaussian_i64())
            .ok_or_else(|| LiftError::NotContracting(format!("1/({a}) is not a Gaussian integer")))?;
        let den = b
            .common_denominator()
            .to_i64()
            .ok_or_else(|| LiftError::NotContracting(format!("translation {b} too large")))?;
        let num = b
            .scale(&num_rational::BigRational::from_integer(den.into()))
            .to_gaussian_i64()
            .expect("scaled by the common denominator");
        let unit = match ambient {
            Ambient::Line => (1, 0),
            Ambient::Plane => (1, 1),
        };
        let res = res as i64;
        let t = (unit.0 * den - 2 * res * num.0, unit.1 * den - 2 * res * num.1);
        let offset = floor_div(mul(expand, t), 2 * den);
        Ok(Self {
            expand,
            offset,
            unit,
            num,
            den,
            res,
        })
    }

    /// Pixel containing `g⁻¹(centre(q))`.
    #[inline]
    pub(crate) fn pull(&self, q: Gi) -> Gi {
        let p = mul(self.expand, q);
        (p.0 + self.offset.0, p.1 + self.offset.1)
    }

    /// Pixel containing `g(centre(p))`.
    #[cfg(test)]
    pub(crate) fn push(&self, p: Gi) -> Gi {
        let conj = (self.expand.0, -self.expand.1);
        let n2 = self.expand.0 * self.expand.0 + self.expand.1 * self.expand.1;
        let v = mul(conj, (2 * p.0 + self.unit.0, 2 * p.1 + self.unit.1));
        let v = (
            v.0 * self.den + 2 * self.res * self.num.0 * n2,
            v.1 * self.den + 2 * self.res * self.num.1 * n2,
        );
        floor_div(v, 2 * self.den * n2)
    }
}

pub(crate) fn pixel_maps(ifs: &LiftedIfs, res: u32) -> Result<Vec<PixelMap>, LiftError> {
    ifs.maps()
        .iter()
        .map(|g| PixelMap::new(g.a(), g.b(), ifs.ambient(), res))
        .collect()
}

/// A converged pixel approximation of an attractor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileRaster {
    ambient: Ambient,
    resolution: u32,
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    bits: Vec<u8>,
    iterations: usize,
    converged: bool,
}

impl TileRaster {
    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Global index of the lower-left pixel.
    pub fn origin(&self) -> (i64, i64) {
        (self.x0, self.y0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Exact corners of the pixel box.
    pub fn bbox(&self) -> (GaussRational, GaussRational) {
        let r = self.resolution as i64;
        (
            GaussRational::from_fraction(self.x0, self.y0, r),
            GaussRational::from_fraction(self.x0 + self.width as i64, self.y0 + self.height as i64, r),
        )
    }

    #[inline]
    fn index(&self, p: Gi) -> Option<usize> {
        let x = p.0 - self.x0;
        let y = p.1 - self.y0;
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height)
            .then(|| y as usize * self.width + x as usize)
    }

    /// Whether global pixel `p` is set.
    #[inline]
    pub fn get(&self, p: (i64, i64)) -> bool {
        self.index(p).is_some_and(|i| self.bits[i] != 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Length or area of one pixel.
    pub fn pixel_measure(&self) -> f64 {
        let r = self.resolution as f64;
        match self.ambient {
            Ambient::Line => 1.0 / r,
            Ambient::Plane => 1.0 / (r * r),
        }
    }

    /// Centre of global pixel `p`.
    pub fn centre(&self, p: (i64, i64)) -> Complex64 {
        let r = 2.0 * self.resolution as f64;
        match self.ambient {
            Ambient::Line => Complex64::new((2 * p.0 + 1) as f64 / r, 0.0),
            Ambient::Plane => Complex64::new((2 * p.0 + 1) as f64 / r, (2 * p.1 + 1) as f64 / r),
        }
    }

    /// Global indices of the set pixels, row by row.
    pub fn set_pixels(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| {
            (
                self.x0 + (i % self.width) as i64,
                self.y0 + (i / self.width) as i64,
            )
        })
    }

    /// Leftmost and rightmost set pixel.
    pub fn extent_x(&self) -> Option<(i64, i64)> {
        let xs = self.set_pixels().map(|p| p.0);
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for x in xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Binary PGM, top row first; set pixels are black.
    pub fn to_pgm(&self, comment: &str) -> Vec<u8> {
        let mut out = format!("P5\n# {}\n{} {}\n255\n", comment.replace('\n', " "), self.width, self.height).into_bytes();
        for row in self.bits.chunks(self.width).rev() {
            out.extend(row.iter().map(|&b| if b != 0 { 0u8 } else { 255 }));
        }
        out
    }
}

/// Points `g_w(c)` retained per level of the bounding box search.
const BBOX_POINTS: usize = 1 << 16;

/// Box containing the attractor: the hull of `g_w(c)` over all words of one
/// length, padded by the image of the disc `(c, R)` under such a word.
fn float_bbox(ifs: &LiftedIfs) -> (Complex64, Complex64) {
    let (c, radius) = ifs.attractor_radius();
    let mut pts = vec![c];
    let mut pad = radius;
    while pts.len() * ifs.degree() <= BBOX_POINTS {
        pts = pts
            .iter()
            .flat_map(|z| ifs.coefficients().iter().map(move |(a, b)| a * z + b))
            .collect();
        pad *= ifs.ratio();
    }
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in pts {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    (lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad))
}

/// Rasterizes the attractor at `res` pixels per unit.
///
/// Starting from the full box, a pixel is kept when the pixel under the
/// centre of its preimage under some `g_i` is kept; this is repeated until
/// nothing changes.
pub fn attractor_raster(ifs: &LiftedIfs, res: u32) -> Result<TileRaster, LiftError> {
    if res < MIN_RESOLUTION {
        return Err(LiftError::InvalidResolution(res));
    }
    let maps = pixel_maps(ifs, res)?;
    let (lo, hi) = float_bbox(ifs);
    let r = res as f64;
    let x0 = (lo.re * r).floor() as i64 - MARGIN;
    let x1 = (hi.re * r).ceil() as i64 + MARGIN;
    let (y0, y1) = match ifs.ambient() {
        Ambient::Line => (0, 1),
        Ambient::Plane => ((lo.im * r).floor() as i64 - MARGIN, (hi.im * r).ceil() as i64 + MARGIN),
    };
    let mut raster = TileRaster {
        ambient: ifs.ambient(),
        resolution: res,
        x0,
        y0,
        width: (x1 - x0) as usize,
        height: (y1 - y0) as usize,
        bits: vec![1; ((x1 - x0) * (y1 - y0)) as usize],
        iterations: 0,
        converged: false,
    };
    let mut next = vec![0u8; raster.bits.len()];
    for it in 1..=ITERATION_CAP {
        let width = raster.width;
        let cur = &raster;
        next.par_chunks_mut(width).enumerate().for_each(|(row, out)| {
            let y = cur.y0 + row as i64;
            for (col, o) in out.iter_mut().enumerate() {
                let q = (cur.x0 + col as i64, y);
                *o = maps.iter().any(|m| cur.get(m.pull(q))) as u8;
            }
        });
        if next == raster.bits {
            raster.iterations = it;
            raster.converged = true;
            return Ok(raster);
        }
        std::mem::swap(&mut raster.bits, &mut next);
    }
    Err(LiftError::NoConvergence {
        iterations: ITERATION_CAP,
    })
}

/// Set-pixel count times pixel measure.
pub fn measure_estimate(raster: &TileRaster) -> f64 {
    raster.count() as f64 * raster.pixel_measure()
}

/// Pixels of the raster whose preimage under `g_i` is set, for each `i`:
/// the raster of `g_i(K)`.
pub fn piece_counts(ifs: &LiftedIfs, raster: &TileRaster) -> Result<Vec<usize>, LiftError> {
    let maps = pixel_maps(ifs, raster.resolution)?;
    Ok(maps
        .iter()
        .map(|m| raster.set_pixels().filter(|&q| raster.get(m.pull(q))).count())
        .collect())
}

/// Disagreement between the raster and the union of its images.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HutchinsonDefect {
    /// Set pixels with no image pixel within one pixel.
    pub missing: usize,
    /// Image pixels with no set pixel within one pixel.
    pub extra: usize,
    pub total: usize,
}

impl HutchinsonDefect {
    pub fn is_clean(&self) -> bool {
        self.missing == 0 && self.extra == 0
    }
}

/// Compares the raster with `⋃ g_i(raster)` up to a one-pixel collar.
///
/// The raster is read as a union of half-open pixel squares and each image is
/// sampled at pixel centres in floating point, so the integer pixel maps are
/// not used here.
pub fn hutchinson_defect(ifs: &LiftedIfs, raster: &TileRaster) -> Result<HutchinsonDefect, LiftError> {
    let r = raster.resolution as f64;
    let inverses: Vec<(Complex64, Complex64)> = ifs
        .coefficients()
        .iter()
        .map(|&(a, b)| (a.inv(), b))
        .collect();
    let line = raster.ambient == Ambient::Line;
    let snap = |x: f64| (x * r + 1e-9).floor() as i64;
    let mut image = TileRaster {
        bits: vec![0; raster.bits.len()],
        ..raster.clone()
    };
    for (i, bit) in image.bits.iter_mut().enumerate() {
        let q = (
            raster.x0 + (i % raster.width) as i64,
            raster.y0 + (i / raster.width) as i64,
        );
        let c = raster.centre(q);
        let hit = inverses.iter().any(|&(ainv, b)| {
            let z = (c - b) * ainv;
            let p = if line { (snap(z.re), 0) } else { (snap(z.re), snap(z.im)) };
            raster.get(p)
        });
        *bit = hit as u8;
    }
    let dy: &[i64] = if line { &[0] } else { &[-1, 0, 1] };
    let near = |set: &TileRaster, p: Gi| {
        dy.iter()
            .any(|&y| (-1..=1).any(|x| set.get((p.0 + x, p.1 + y))))
    };
    let missing = raster.set_pixels().filter(|&p| !near(&image, p)).count();
    let extra = image.set_pixels().filter(|&p| !near(raster, p)).count();
    Ok(HutchinsonDefect {
        missing,
        extra,
        total: raster.count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cod_space::RadialClass;
    use crate::lifted_ifs::lift_radial_class;
    use crate::rational_maps::Family;

    fn ifs(fam: Family, s: &str) -> LiftedIfs {
        lift_radial_class(&RadialClass::parse(fam, s).unwrap()).unwrap()
    }

    #[test]
    fn pixel_maps_agree_with_floats() {
        for (fam, s) in [
            (Family::Power(3), "0,1/3,5/3"),
            (Family::Chebyshev(2), "1/4,-1/4+3"),
            (Family::Lattes, "-i/2+1+i,-1/2+2"),
            (Family::Lattes, "i/2,1/2+1+i"),
        ] {
            let f = ifs(fam, s);
            let res = 64;
            let maps = pixel_maps(&f, res).unwrap();
            let probe = TileRaster {
                ambient: f.ambient(),
                resolution: res,
                x0: 0,
                y0: 0,
                width: 1,
                height: 1,
                bits: vec![],
                iterations: 0,
                converged: true,
            };
            for (m, (a, b)) in maps.iter().zip(f.coefficients()) {
                for p in [(3, 0), (-17, 0), (40, 0)] {
                    let p = if f.ambient() == Ambient::Plane { (p.0, p.0 / 2 - 5) } else { p };
                    let c = probe.centre(p);
                    let fwd = a * c + b;
                    let q = m.push(p);
                    assert_eq!(q.0, (fwd.re * res as f64).floor() as i64);
                    let back = (c - b) / a;
                    let q = m.pull(p);
                    assert_eq!(q.0, (back.re * res as f64).floor() as i64);
                    if f.ambient() == Ambient::Plane {
                        assert_eq!(q.1, (back.im * res as f64).floor() as i64);
                    } else {
                        assert_eq!(q.1, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn interval_raster() {
        let f = ifs(Family::Power(2), "0,3/2");
        let r = attractor_raster(&f, 64).unwrap();
        assert!(r.converged());
        let (lo, hi) = r.extent_x().unwrap();
        assert!(lo >= -1 && lo <= 0, "{lo}");
        assert!(hi >= 3 * 64 - 1 && hi <= 3 * 64, "{hi}");
        assert!((measure_estimate(&r) - 3.0).abs() <= 2.0 / 64.0);
        assert!(hutchinson_defect(&f, &r).unwrap().is_clean());
        let pieces = piece_counts(&f, &r).unwrap();
        for p in pieces {
            assert!((2.0 * p as f64 / r.count() as f64 - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn point_raster_is_tiny() {
        let f = ifs(Family::Power(2), "0,0");
        let r = attractor_raster(&f, 32).unwrap();
        assert!(r.count() <= 1);
    }

    #[test]
    fn pgm_layout() {
        let f = ifs(Family::Power(2), "0,1/2");
        let r = attractor_raster(&f, 16).unwrap();
        let pgm = r.to_pgm("power:2 0,1/2");
        let header = format!("P5\n# power:2 0,1/2\n{} 1\n255\n", r.width());
        assert!(pgm.starts_with(header.as_bytes()));
        assert_eq!(pgm.len(), header.len() + r.width());
    }

    #[test]
    fn resolution_floor() {
        let f = ifs(Family::Power(2), "0,1/2");
        assert_eq!(attractor_raster(&f, 8), Err(LiftError::InvalidResolution(8)));
    }
}
