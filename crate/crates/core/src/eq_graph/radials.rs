use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::group::{parse_word, GroupElem, QuotientGroup};
use super::EqError;
use crate::coding_tree::Radial;
use crate::complex_geom::{crossing_word, Curve, CutConfig, FreeWord, Letter};
use crate::rational_maps::{lift_curve, Family, MapModel};

/// Radius of the circuits around the punctures.
pub const LOOP_RADIUS: f64 = 0.4;
/// A lifted loop closes when it ends this close to the target leg endpoint.
const CLOSE_GAP: f64 = 1e-7;

/// Leg prefixes of the reconstructed `r3`, selected by [`calibrate_r3`].
pub const R3_PREFIXES: [&str; 2] = ["e", "B2"];

/// The quadratic map `z² - 3` with base point 0, cut rays below the
/// punctures `-3` and `6`, their circuit generators and the dihedral quotient.
#[derive(Clone, Debug)]
pub struct LoopSetting {
    map: MapModel,
    cuts: CutConfig,
    group: QuotientGroup,
    generators: Vec<Curve>,
}

impl LoopSetting {
    pub fn quad_cantor() -> Result<Self, EqError> {
        let map = MapModel::new(Family::QuadCantor)?;
        let cuts = CutConfig::new(map.punctures().to_vec())?;
        cuts.check_basepoint(Complex64::new(0.0, 0.0))?;
        let group = QuotientGroup::dihedral8();
        let generators = map
            .punctures()
            .iter()
            .map(|&p| generator_loop(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            map,
            cuts,
            group,
            generators,
        })
    }

    pub fn map(&self) -> &MapModel {
        &self.map
    }

    pub fn cuts(&self) -> &CutConfig {
        &self.cuts
    }

    pub fn group(&self) -> &QuotientGroup {
        &self.group
    }

    pub fn base(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    /// The based circuit around puncture `k`, counter-clockwise.
    pub fn generator(&self, k: usize) -> &Curve {
        &self.generators[k]
    }

    /// Concatenated circuits spelling `w`; the empty word is the constant loop.
    pub fn loop_of_word(&self, w: &FreeWord) -> Result<Curve, EqError> {
        let mut acc = Curve::constant(self.base());
        for l in w.letters() {
            let g = self
                .generators
                .get(l.generator)
                .ok_or_else(|| EqError::Parse(format!("no generator B{}", l.generator + 1)))?;
            let piece = if l.sign > 0 { g.clone() } else { g.reverse() };
            acc = if acc.is_constant() { piece } else { acc.concat(&piece)? };
        }
        Ok(if acc.is_constant() { acc } else { acc.close_up()? })
    }

    /// A based loop realizing the group element by its representative word.
    pub fn loop_of(&self, g: GroupElem) -> Result<Curve, EqError> {
        self.loop_of_word(self.group.word(g))
    }

    /// Group element of a closed based loop.
    pub fn classify_loop(&self, lp: &Curve) -> Result<GroupElem, EqError> {
        let w = crossing_word(lp, &self.cuts)?;
        self.group.reduce(&w)
    }

    /// Builds the radial whose leg `i` runs the prefix loop and then straight
    /// to `(-1)^i √3` (legs numbered from zero).
    pub fn radial(&self, spec: &RadialSpec) -> Result<Radial, EqError> {
        if spec.prefixes.len() != self.map.degree() {
            return Err(EqError::InvalidRadial(format!(
                "{} prefixes for degree {}",
                spec.prefixes.len(),
                self.map.degree()
            )));
        }
        let s3 = 3f64.sqrt();
        let mut legs = Vec::with_capacity(spec.prefixes.len());
        for (i, prefix) in spec.prefixes.iter().enumerate() {
            let end = Complex64::new(if i % 2 == 0 { s3 } else { -s3 }, 0.0);
            let tail = Curve::segment(self.base(), end);
            let lp = self.loop_of_word(prefix)?;
            legs.push(if lp.is_constant() { tail } else { lp.concat(&tail)? });
        }
        Ok(Radial::new(&self.map, self.base(), legs)?)
    }

    /// The class of `l_i · F_{x_i}(γ) · (l'_j)⁻¹`, legs numbered from zero.
    ///
    /// Fails with `NonClosedLift` when the lift of `γ` from the end of `l_i`
    /// does not end at the end of `l'_j`.
    pub fn classify_lift(
        &self,
        r: &Radial,
        r2: &Radial,
        gamma: GroupElem,
        i: usize,
        j: usize,
    ) -> Result<GroupElem, EqError> {
        let (li, lj) = match (r.legs().get(i), r2.legs().get(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(EqError::InvalidRadial(format!("no leg pair ({}, {})", i + 1, j + 1))),
        };
        let xi = li.end();
        let target = lj.end();
        let lifted: Vec<Complex64> = if gamma == self.group.identity() {
            vec![xi]
        } else {
            let lp = self.loop_of(gamma)?;
            lift_curve(&self.map, &lp, xi)?.vertices().to_vec()
        };
        let gap = (lifted[lifted.len() - 1] - target).norm();
        if gap > CLOSE_GAP {
            return Err(EqError::NonClosedLift { i: i + 1, j: j + 1, gap });
        }
        let mut pts: Vec<Complex64> = li.vertices().to_vec();
        pts.extend_from_slice(&lifted[1..]);
        pts.pop();
        pts.extend(lj.vertices().iter().rev().copied());
        let path = Curve::from_points(pts)?;
        self.classify_loop(&path.close_up()?)
    }
}

/// Octagon of radius [`LOOP_RADIUS`] around `p`, joined to the origin by a
/// straight spoke; vertices sit at odd multiples of `π/8` so none lies on
/// the cut ray below `p`.
fn generator_loop(p: Complex64) -> Result<Curve, EqError> {
    let start_angle = if p.re < 0.0 { PI / 8.0 } else { 7.0 * PI / 8.0 };
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for k in 0..=8 {
        pts.push(p + Complex64::from_polar(LOOP_RADIUS, start_angle + k as f64 * PI / 4.0));
    }
    pts.push(Complex64::new(0.0, 0.0));
    Ok(Curve::new(pts, true)?)
}

/// Leg prefixes of a radial for `z² - 3`, one free-group word per leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialSpec {
    pub prefixes: Vec<FreeWord>,
}

impl RadialSpec {
    /// Parses one word per leg, e.g. `["e", "B2"]`.
    pub fn parse(setting: &LoopSetting, words: &[&str]) -> Result<Self, EqError> {
        let prefixes = words
            .iter()
            .map(|w| parse_word(setting.group().generators(), w))
            .collect::<Result<_, _>>()?;
        Ok(Self { prefixes })
    }
}

/// Three reference radials for `z² - 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedRadial {
    /// Straight legs to `±√3`.
    R1,
    /// Leg 2 first runs around `-3`.
    R2,
    /// Legs with the prefixes [`R3_PREFIXES`].
    R3,
}

impl NamedRadial {
    pub const ALL: [NamedRadial; 3] = [NamedRadial::R1, NamedRadial::R2, NamedRadial::R3];

    pub fn spec(self, setting: &LoopSetting) -> RadialSpec {
        let words: [&str; 2] = match self {
            NamedRadial::R1 => ["e", "e"],
            NamedRadial::R2 => ["e", "B1"],
            NamedRadial::R3 => R3_PREFIXES,
        };
        RadialSpec::parse(setting, &words).expect("built-in prefixes parse")
    }

    pub fn radial(self, setting: &LoopSetting) -> Result<Radial, EqError> {
        setting.radial(&self.spec(setting))
    }
}

impl fmt::Display for NamedRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NamedRadial::R1 => "r1",
            NamedRadial::R2 => "r2",
            NamedRadial::R3 => "r3",
        })
    }
}

impl FromStr for NamedRadial {
    type Err = EqError;

    fn from_str(s: &str) -> Result<Self, EqError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r1" => Ok(NamedRadial::R1),
            "r2" => Ok(NamedRadial::R2),
            "r3" => Ok(NamedRadial::R3),
            other => Err(EqError::Parse(format!("unknown radial `{other}`; expected r1, r2 or r3"))),
        }
    }
}

/// One expected lifting relation: lifting `lifted` along legs `(i, j)`
/// (numbered from one) gives `class`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftRelation {
    pub lifted: &'static str,
    pub i: usize,
    pub j: usize,
    pub class: &'static str,
}

/// The relation table the third radial must reproduce.
pub const R3_TABLE: [LiftRelation; 12] = [
    LiftRelation { lifted: "e", i: 1, j: 1, class: "e" },
    LiftRelation { lifted: "e", i: 2, j: 2, class: "e" },
    LiftRelation { lifted: "B1", i: 1, j: 2, class: "B2" },
    LiftRelation { lifted: "B1", i: 2, j: 1, class: "B2^-1" },
    LiftRelation { lifted: "B2", i: 1, j: 1, class: "e" },
    LiftRelation { lifted: "B2", i: 2, j: 2, class: "B2^-1B1B2" },
    LiftRelation { lifted: "B1B2", i: 1, j: 2, class: "B1B2" },
    LiftRelation { lifted: "B1B2", i: 2, j: 1, class: "B2^-1" },
    LiftRelation { lifted: "B2B1", i: 1, j: 2, class: "B2" },
    LiftRelation { lifted: "B2B1", i: 2, j: 1, class: "B2^-1B1" },
    LiftRelation { lifted: "B2B1B2", i: 1, j: 2, class: "B1B2" },
    LiftRelation { lifted: "B2B1B2", i: 2, j: 1, class: "B2^-1B1" },
];

/// True when the radial reproduces every relation of `table`.
pub fn matches_table(setting: &LoopSetting, r: &Radial, table: &[LiftRelation]) -> Result<bool, EqError> {
    let g = setting.group();
    for rel in table {
        let lifted = g.parse(rel.lifted)?;
        let want = g.parse(rel.class)?;
        match setting.classify_lift(r, r, lifted, rel.i - 1, rel.j - 1) {
            Ok(got) if got == want => {}
            Ok(_) | Err(EqError::NonClosedLift { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Freely reduced words of length at most `max_len` in shortlex order.
fn short_words(ngen: usize, max_len: usize) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::empty()];
    let mut level = vec![FreeWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for g in 0..ngen {
                for sign in [1i8, -1] {
                    let l = Letter::new(g, sign);
                    if w.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Searches leg prefixes of length at most two for the first assignment
/// (shortlex in leg 1, then leg 2) whose lifting relations reproduce
/// [`R3_TABLE`].
pub fn calibrate_r3(setting: &LoopSetting) -> Result<Option<RadialSpec>, EqError> {
    let words = short_words(setting.group().generators().len(), 2);
    for p1 in &words {
        for p2 in &words {
            let spec = RadialSpec {
                prefixes: vec![p1.clone(), p2.clone()],
            };
            let r = match setting.radial(&spec) {
                Ok(r) => r,
                Err(_) => continue,
            };
            if matches_table(setting, &r, &R3_TABLE)? {
                return Ok(Some(spec));
            }
        }
    }
    Ok(None)
}
