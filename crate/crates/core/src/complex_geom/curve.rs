use std::fmt::Write as _;

use num_complex::Complex64;

use super::{GeomError, EPS_PUNCT};

/// Endpoint agreement required to join two curves.
pub const JOIN_TOL: f64 = 1e-12;
/// Endpoint agreement required to close a loop before classification.
pub const CLOSE_TOL: f64 = 1e-9;

/// A finite polyline in the plane.
///
/// A single-vertex curve is the constant path at that point; radials whose
/// lifted endpoint is the base point use it as a leg.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    vertices: Vec<Complex64>,
    closed: bool,
}

impl Curve {
    pub fn new(vertices: Vec<Complex64>, closed: bool) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::InvalidCurve("curve has no vertices".into()));
        }
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GeomError::InvalidCurve("non-finite vertex".into()));
        }
        if let Some(k) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(GeomError::InvalidCurve(format!(
                "vertices {k} and {} coincide",
                k + 1
            )));
        }
        if closed && (vertices.len() < 3 || vertices[0] != vertices[vertices.len() - 1]) {
            return Err(GeomError::InvalidCurve(
                "closed curve must end where it starts".into(),
            ));
        }
        Ok(Self { vertices, closed })
    }

    /// Builds an open polyline, silently dropping repeated consecutive points.
    pub fn from_points(points: impl IntoIterator<Item = Complex64>) -> Result<Self, GeomError> {
        let mut vertices: Vec<Complex64> = Vec::new();
        for p in points {
            if vertices.last() != Some(&p) {
                vertices.push(p);
            }
        }
        Self::new(vertices, false)
    }

    pub fn constant(z: Complex64) -> Self {
        Self {
            vertices: vec![z],
            closed: false,
        }
    }

    pub fn segment(a: Complex64, b: Complex64) -> Self {
        if a == b {
            Self::constant(a)
        } else {
            Self {
                vertices: vec![a, b],
                closed: false,
            }
        }
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_constant(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Path product `self · other`; the result is open.
    pub fn concat(&self, other: &Curve) -> Result<Curve, GeomError> {
        let gap = (self.end() - other.start()).norm();
        if gap > JOIN_TOL * (1.0 + self.end().norm()) {
            return Err(GeomError::EndpointMismatch { gap });
        }
        let mut vertices = self.vertices.clone();
        for &z in &other.vertices[1..] {
            if vertices.last() != Some(&z) {
                vertices.push(z);
            }
        }
        Ok(Curve {
            vertices,
            closed: false,
        })
    }

    /// The inverse path, traversed backwards.
    pub fn reverse(&self) -> Curve {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Curve {
            vertices,
            closed: self.closed,
        }
    }

    /// Closes a loop whose endpoints agree within [`CLOSE_TOL`] by snapping the
    /// last vertex onto the base point.
    pub fn close_up(&self) -> Result<Curve, GeomError> {
        if self.closed {
            return Ok(self.clone());
        }
        let gap = (self.end() - self.start()).norm();
        if gap > CLOSE_TOL {
            return Err(GeomError::NotClosed { gap });
        }
        let mut vertices = self.vertices.clone();
        let base = vertices[0];
        if gap > 0.0 {
            vertices.push(base);
        }
        if vertices.len() < 3 {
            return Err(GeomError::InvalidCurve("loop too short to close".into()));
        }
        let n = vertices.len();
        vertices[n - 1] = base;
        if vertices[n - 2] == base {
            vertices.remove(n - 2);
        }
        Curve::new(vertices, true)
    }

    /// Inserts `parts - 1` evenly spaced points inside every segment.
    pub fn subdivide(&self, parts: usize) -> Curve {
        let parts = parts.max(1);
        let mut vertices = vec![self.start()];
        for (a, b) in self.segments() {
            for k in 1..=parts {
                let t = k as f64 / parts as f64;
                let z = if k == parts { b } else { a + (b - a) * t };
                if vertices.last() != Some(&z) {
                    vertices.push(z);
                }
            }
        }
        Curve {
            vertices,
            closed: self.closed,
        }
    }

    /// Minimum distance from the curve to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.is_constant() {
            return (self.start() - p).norm();
        }
        self.segments()
            .map(|(a, b)| segment_distance(a, b, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Fails with `PunctureProximity` if the curve passes within `EPS_PUNCT`
    /// of any point of `punctures`.
    pub fn check_avoids(&self, punctures: &[Complex64]) -> Result<(), GeomError> {
        for (k, &p) in punctures.iter().enumerate() {
            let d = self.distance_to(p);
            if d < EPS_PUNCT {
                return Err(GeomError::PunctureProximity {
                    puncture: k,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    /// Maps every vertex through `f`, dropping repeats.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Curve, GeomError> {
        let c = Curve::from_points(self.vertices.iter().map(|&z| f(z)))?;
        if self.closed {
            c.close_up()
        } else {
            Ok(c)
        }
    }

    /// Plain-text form: header `closed 0|1`, then one `re im` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("closed {}\n", u8::from(self.closed));
        for z in &self.vertices {
            // `{:?}` on f64 is the shortest representation that round-trips.
            let _ = writeln!(s, "{:?} {:?}", z.re, z.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Curve, GeomError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GeomError::Parse("empty curve file".into()))?;
        let closed = match header.trim() {
            "closed 0" => false,
            "closed 1" => true,
            other => return Err(GeomError::Parse(format!("bad curve header `{other}`"))),
        };
        let mut vertices = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64, GeomError> {
                s.ok_or_else(|| GeomError::Parse(format!("short line `{line}`")))?
                    .parse::<f64>()
                    .map_err(|e| GeomError::Parse(format!("`{line}`: {e}")))
            };
            let re = parse(parts.next())?;
            let im = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(GeomError::Parse(format!("trailing data in `{line}`")));
            }
            vertices.push(Complex64::new(re, im));
        }
        Curve::new(vertices, closed)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

/// Winding number of a closed polyline around `p` (sum of turning angles).
pub fn winding_number(curve: &Curve, p: Complex64) -> i64 {
    let total: f64 = curve
        .segments()
        .map(|(a, b)| ((b - p) / (a - p)).arg())
        .sum();
    (total / std::f64::consts::TAU).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn concat_and_reverse() {
        let a = Curve::segment(c(0.0, 0.0), c(1.0, 0.0));
        let b = Curve::segment(c(1.0, 0.0), c(1.0, 1.0));
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.vertices(), &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]);
        let r = Curve::from_points([c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)])
            .unwrap()
            .reverse();
        assert_eq!(r.vertices(), &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            b.concat(&a),
            Err(GeomError::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn invalid_curves_rejected() {
        assert!(Curve::new(vec![c(0.0, 0.0), c(0.0, 0.0)], false).is_err());
        assert!(Curve::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)], true).is_err());
        assert!(Curve::new(vec![], false).is_err());
    }

    #[test]
    fn close_up_requires_agreement() {
        let open = Curve::from_points([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(1e-10, 0.0)]).unwrap();
        let closed = open.close_up().unwrap();
        assert!(closed.is_closed());
        assert_eq!(closed.start(), closed.end());
        let far = Curve::from_points([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert!(matches!(far.close_up(), Err(GeomError::NotClosed { .. })));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let curve = Curve::new(
            vec![
                c(0.1, -0.0),
                c(1.0 / 3.0, 2e-300),
                c(-1.7976931348623157e308, 5.0),
                c(0.1, -0.0),
            ],
            true,
        )
        .unwrap();
        let back = Curve::from_text(&curve.to_text()).unwrap();
        for (a, b) in curve.vertices().iter().zip(back.vertices()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert!(back.is_closed());
        assert!(Curve::from_text("closed 2\n0 0\n").is_err());
    }

    #[test]
    fn puncture_avoidance() {
        let s = Curve::segment(c(-1.0, 0.0), c(1.0, 0.0));
        assert!(s.check_avoids(&[c(0.0, 1e-10)]).is_err());
        assert!(s.check_avoids(&[c(0.0, 1e-3)]).is_ok());
    }
}
