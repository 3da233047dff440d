//! The acceptance checks, runnable from tests and from the command line.
//!
//! Every check returns a [`CriterionResult`] whose `details` list each
//! measured quantity; failing lines start with `FAIL`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cod_space::{
    canonical_form, cod_equal, deck_act, deck_search, is_degenerate, power_monoid_act, CodError,
    DeckElement, GaussInt, RadialClass,
};
use crate::coding_tree::{pi_eval, CodingError, CodingTree, Radial, SymbolSeq};
use crate::complex_geom::{Complex64, Curve, GeomError};
use crate::eq_graph::{
    build_eq_graph, multiplicity_classify, relation_decide, EqError, EqGraph, LoopSetting,
    NamedRadial, Verdict, DEFAULT_SEED,
};
use crate::lifted_ifs::{
    attractor_raster, closed_form_measure, growth_rate_exact, hutchinson_defect,
    interval_hull_exact, lift_radial_class, measure_estimate, multiplicity_estimate, phi,
    radial_from_class, tiling_check, LiftError, TileRaster, Window,
};
use crate::rational_maps::lift_curve_traced;
use crate::rational_maps::{Family, MapError, MapModel, SpherePoint};

/// Default raster resolution.
pub const RESOLUTION: u32 = 512;
/// Samples of the Monte Carlo multiplicity check.
pub const MULTIPLICITY_SAMPLES: usize = 10_000;
/// Sequence length of the Monte Carlo multiplicity check.
pub const MULTIPLICITY_DEPTH: usize = 60;

/// Golden Graphviz renderings of the three coding-relation graphs.
pub const GOLDEN_DOT: [(NamedRadial, &str); 3] = [
    (NamedRadial::R1, include_str!("../golden/r1.dot")),
    (NamedRadial::R2, include_str!("../golden/r2.dot")),
    (NamedRadial::R3, include_str!("../golden/r3.dot")),
];

#[derive(Debug, thiserror::Error)]
pub enum SelftestError {
    #[error("unknown criterion {0}")]
    UnknownCriterion(u8),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Cod(#[from] CodError),
    #[error(transparent)]
    Eq(#[from] EqError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl SelftestError {
    pub fn name(&self) -> &'static str {
        match self {
            SelftestError::UnknownCriterion(_) => "UnknownCriterion",
            SelftestError::Lift(e) => e.name(),
            SelftestError::Cod(e) => e.name(),
            SelftestError::Eq(e) => e.name(),
            SelftestError::Coding(e) => e.name(),
            SelftestError::Map(e) => e.name(),
            SelftestError::Geom(e) => e.name(),
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    pub fn failures(&self) -> impl Iterator<Item = &String> {
        self.details.iter().filter(|l| l.starts_with("FAIL"))
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status} {}", self.id, self.name)
    }
}

/// Names of the criteria by id.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "interval tiles"),
    (2, "digit sets in degree three"),
    (3, "chebyshev intervals"),
    (4, "lattes tiles"),
    (5, "coding relation graphs"),
    (6, "multiplicities from graphs"),
    (7, "graph against numeric coding map"),
    (8, "growth probe"),
    (9, "class arithmetic"),
    (10, "lifting invariants"),
];

#[derive(Default)]
struct Log {
    lines: Vec<String>,
    failed: bool,
}

impl Log {
    fn check(&mut self, ok: bool, msg: String) {
        if ok {
            self.lines.push(msg);
        } else {
            self.failed = true;
            self.lines.push(format!("FAIL {msg}"));
        }
    }
}

/// Runs criterion `id`.
pub fn run(id: u8) -> Result<CriterionResult, SelftestError> {
    let name = CRITERIA
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, n)| *n)
        .ok_or(SelftestError::UnknownCriterion(id))?;
    let mut log = Log::default();
    let outcome = match id {
        1 => interval_tiles(&mut log),
        2 => digit_sets(&mut log),
        3 => chebyshev_intervals(&mut log),
        4 => lattes_tiles(&mut log),
        5 => relation_graphs(&mut log),
        6 => graph_multiplicities(&mut log),
        7 => numeric_cross_check(&mut log),
        8 => growth_probe(&mut log),
        9 => class_arithmetic(&mut log),
        10 => lifting_invariants(&mut log),
        _ => unreachable!(),
    };
    if let Err(e) = outcome {
        log.check(false, format!("error: {e}"));
    }
    Ok(CriterionResult {
        id,
        name,
        pass: !log.failed,
        details: log.lines,
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run(id).expect("known id"))
        .collect()
}

type Step = Result<(), SelftestError>;

fn ratio_ok(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol * target.abs()
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Pixels in the symmetric difference of a line raster and `[lo, hi]`.
fn interval_symdiff(r: &TileRaster, lo: f64, hi: f64) -> usize {
    let res = r.resolution() as f64;
    let (a, b) = ((lo * res).floor() as i64, (hi * res).ceil() as i64 - 1);
    let got: BTreeSet<i64> = r.set_pixels().map(|p| p.0).collect();
    let want: BTreeSet<i64> = (a..=b).collect();
    got.symmetric_difference(&want).count()
}

fn interval_tiles(log: &mut Log) -> Step {
    for n in 1..=3i64 {
        let ifs = lift_radial_class(&RadialClass::power(2, &[0, n])?)?;
        let r = attractor_raster(&ifs, RESOLUTION)?;
        let diff = interval_symdiff(&r, 0.0, n as f64);
        log.check(diff <= 2, format!("(0,{n}) raster differs from [0,{n}] in {diff} px"));
        let m = measure_estimate(&r);
        log.check(ratio_ok(m, n as f64, 0.01), format!("(0,{n}) measure {m:.5}"));
        let mult = multiplicity_estimate(&ifs, RESOLUTION)?;
        log.check(
            mult.n == n && mult.gap <= 0.05,
            format!("(0,{n}) multiplicity {} gap {:.4}", mult.n, mult.gap),
        );
        let t = tiling_check(&ifs, Window::interval(0.0, 4.0 * n as f64)?, RESOLUTION)?;
        log.check(
            t.coverage >= 0.999 && t.overlap <= 0.005,
            format!("(0,{n}) tiling coverage {:.5} overlap {:.5}", t.coverage, t.overlap),
        );
    }
    Ok(())
}

fn digit_sets(log: &mut Log) -> Step {
    let full = lift_radial_class(&RadialClass::power(3, &[0, 1, 2])?)?;
    let cf = closed_form_measure(full.class())?;
    let r = attractor_raster(&full, RESOLUTION)?;
    let m = measure_estimate(&r);
    let diff = interval_symdiff(&r, 0.0, 1.0);
    log.check(
        cf == rational(1) && ratio_ok(m, 1.0, 0.01) && diff == 0,
        format!("(0,1,2) closed form {cf} measure {m:.5} pixel difference {diff}"),
    );
    let tile = lift_radial_class(&RadialClass::power(3, &[0, 1, 5])?)?;
    let cf = closed_form_measure(tile.class())?;
    let m = measure_estimate(&attractor_raster(&tile, RESOLUTION)?);
    log.check(
        cf == rational(1) && ratio_ok(m, 1.0, 0.03),
        format!("(0,1,5) closed form {cf} measure {m:.5}"),
    );
    let null = lift_radial_class(&RadialClass::power(3, &[0, 1, 3])?)?;
    let cf = closed_form_measure(null.class())?;
    let coarse = measure_estimate(&attractor_raster(&null, 512)?);
    let fine = measure_estimate(&attractor_raster(&null, 2048)?);
    log.check(
        cf.is_zero() && fine <= 0.5 * coarse,
        format!("(0,1,3) closed form {cf} measure {coarse:.5} at 512 px, {fine:.5} at 2048 px"),
    );
    Ok(())
}

/// Classes covering the three sign patterns of the endpoints.
pub const CHEBYSHEV_CLASSES: [&str; 10] = [
    "1/4,1/4+2",
    "1/4+1,1/4-1",
    "1/4-1,1/4+2",
    "1/4,-1/4+1",
    "1/4-2,-1/4+1",
    "1/4+2,-1/4",
    "-1/4+2,1/4-1",
    "-1/4+1,-1/4+3",
    "-1/4-1,-1/4+3",
    "-1/4,-1/4+3",
];

fn chebyshev_intervals(log: &mut Log) -> Step {
    let fam = Family::Chebyshev(2);
    let mut patterns = BTreeSet::new();
    for s in CHEBYSHEV_CLASSES {
        let class = RadialClass::parse(fam, s)?;
        let signs: Vec<i8> = class
            .entries()
            .iter()
            .map(|e| match e {
                crate::cod_space::ClassEntry::Chebyshev { sign, .. } => *sign,
                _ => 0,
            })
            .collect();
        patterns.insert((signs[0].min(signs[1]), signs[0].max(signs[1])));
        let ifs = lift_radial_class(&class)?;
        let Some((lo, hi)) = interval_hull_exact(&ifs) else {
            log.check(false, format!("{s}: no exact hull"));
            continue;
        };
        let cf = closed_form_measure(&class)?;
        log.check(cf == &hi - &lo && hi > lo, format!("{s}: hull [{lo}, {hi}] closed form {cf}"));
        let r = attractor_raster(&ifs, RESOLUTION)?;
        let res = RESOLUTION as f64;
        match r.extent_x() {
            Some((a, b)) => {
                let (ea, eb) = ((to_f64(&lo) * res).floor() as i64, (to_f64(&hi) * res).ceil() as i64 - 1);
                log.check(
                    (a - ea).abs() <= 1 && (b - eb).abs() <= 1,
                    format!("{s}: raster pixels {a}..{b}, hull pixels {ea}..{eb}"),
                );
            }
            None => log.check(false, format!("{s}: empty raster")),
        }
    }
    log.check(patterns.len() == 3, format!("sign patterns covered: {}", patterns.len()));
    let canonical = lift_radial_class(&RadialClass::parse(fam, "1/4,-1/4+1")?)?;
    let mult = multiplicity_estimate(&canonical, RESOLUTION)?;
    log.check(mult.n == 1, format!("1/4,-1/4+1 multiplicity {} gap {:.4}", mult.n, mult.gap));
    Ok(())
}

fn triangle_distance(p: Complex64, verts: [Complex64; 3]) -> f64 {
    let cross = |a: Complex64, b: Complex64, q: Complex64| (b - a).re * (q - a).im - (b - a).im * (q - a).re;
    let s: Vec<f64> = (0..3).map(|k| cross(verts[k], verts[(k + 1) % 3], p)).collect();
    if s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|k| crate::complex_geom::segment_distance(verts[k], verts[(k + 1) % 3], p))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance in pixels between the set pixel centres and the
/// triangle, capped at `cap + 1`.
fn hausdorff_to_triangle(r: &TileRaster, verts: [Complex64; 3], cap: i64) -> f64 {
    let res = r.resolution() as f64;
    let outward = r
        .set_pixels()
        .map(|p| triangle_distance(r.centre(p), verts) * res)
        .fold(0.0, f64::max);
    let (x0, x1) = verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.re), b.max(v.re)));
    let (y0, y1) = verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.im), b.max(v.im)));
    let mut inward: f64 = 0.0;
    for px in (x0 * res).floor() as i64..(x1 * res).ceil() as i64 {
        for py in (y0 * res).floor() as i64..(y1 * res).ceil() as i64 {
            if triangle_distance(r.centre((px, py)), verts) > 0.0 {
                continue;
            }
            let mut best = (cap + 1) as f64;
            for dx in -cap..=cap {
                for dy in -cap..=cap {
                    if r.get((px + dx, py + dy)) {
                        best = best.min(((dx * dx + dy * dy) as f64).sqrt());
                    }
                }
            }
            inward = inward.max(best);
        }
    }
    outward.max(inward)
}

/// One class per closed-form case of the Lattès measure, with its value.
pub const LATTES_EXEMPLARS: [(&str, i64); 4] = [
    ("1/2,1/2+1+i", 4),
    ("i/2,1/2+1+i", 1),
    ("1/2,-1/2+1+i", 2),
    ("-i/2+1+i,-1/2+2", 1),
];

fn lattes_tiles(log: &mut Log) -> Step {
    let fam = Family::Lattes;
    let tri = lift_radial_class(&RadialClass::parse(fam, "-i/2+1+i,-1/2+2")?)?;
    let r = attractor_raster(&tri, RESOLUTION)?;
    let verts = [Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)];
    let h = hausdorff_to_triangle(&r, verts, 3);
    let area = measure_estimate(&r);
    log.check(h <= 2.0, format!("triangle Hausdorff distance {h:.3} px"));
    log.check(ratio_ok(area, 1.0, 0.02), format!("triangle area {area:.5}"));

    let levy = lift_radial_class(&RadialClass::parse(fam, "i/2,1/2+1+i")?)?;
    let cf = closed_form_measure(levy.class())?;
    let m = measure_estimate(&attractor_raster(&levy, 1024)?);
    log.check(
        cf == rational(1) && ratio_ok(m, 1.0, 0.05),
        format!("levy closed form {cf} measure {m:.5} at 1024 px"),
    );
    let t = tiling_check(&levy, Window::square(0.0, 4.0)?, RESOLUTION)?;
    log.check(
        t.coverage >= 0.99 && t.overlap <= 0.02,
        format!("levy tiling coverage {:.5} overlap {:.5}", t.coverage, t.overlap),
    );

    for (s, want) in LATTES_EXEMPLARS {
        let ifs = lift_radial_class(&RadialClass::parse(fam, s)?)?;
        let cf = closed_form_measure(ifs.class())?;
        let m = measure_estimate(&attractor_raster(&ifs, RESOLUTION)?);
        log.check(
            cf == rational(want) && ratio_ok(m, want as f64, 0.05),
            format!("{s}: closed form {cf} measure {m:.5}"),
        );
    }
    Ok(())
}

/// Edge lists of the three coding-relation graphs, 1-based labels.
pub const EXPECTED_EDGES: [(NamedRadial, &[(&str, &str, u8, u8)]); 3] = [
    (NamedRadial::R1, &[("e", "e", 1, 1), ("e", "e", 2, 2)]),
    (
        NamedRadial::R2,
        &[("e", "e", 1, 1), ("e", "e", 2, 2), ("B1", "B1", 1, 2), ("B1", "B1", 2, 1)],
    ),
    (
        NamedRadial::R3,
        &[
            ("e", "e", 1, 1),
            ("e", "e", 2, 2),
            ("e", "B2", 1, 1),
            ("B2", "B2B1", 1, 2),
            ("B2", "B1B2", 2, 1),
            ("B2B1", "B2B1", 2, 1),
            ("B1B2", "B1B2", 1, 2),
            ("B2B1", "B2B1B2", 2, 1),
            ("B1B2", "B2B1B2", 1, 2),
            ("B2B1B2", "B2", 2, 2),
        ],
    ),
];

fn graph_of(setting: &LoopSetting, r: NamedRadial) -> Result<(Radial, EqGraph), SelftestError> {
    let radial = r.radial(setting)?;
    let g = build_eq_graph(setting, &radial, &radial)?;
    Ok((radial, g))
}

fn relation_graphs(log: &mut Log) -> Step {
    let setting = LoopSetting::quad_cantor()?;
    for ((r, want), (_, golden)) in EXPECTED_EDGES.iter().zip(GOLDEN_DOT) {
        let (_, g) = graph_of(&setting, *r)?;
        let got: BTreeSet<(String, String, u8, u8)> = g.labelled_edges().into_iter().collect();
        let want: BTreeSet<(String, String, u8, u8)> =
            want.iter().map(|&(a, b, i, j)| (a.to_string(), b.to_string(), i, j)).collect();
        log.check(
            got == want,
            format!("{r}: {} vertices, {} edges", g.vertices().len(), got.len()),
        );
        log.check(g.to_dot(&r.to_string()) == golden, format!("{r}: golden DOT"));
    }
    Ok(())
}

fn graph_multiplicities(log: &mut Log) -> Step {
    let setting = LoopSetting::quad_cantor()?;
    for (r, modal, max_allowed) in [(NamedRadial::R1, 1, 1), (NamedRadial::R2, 2, 2), (NamedRadial::R3, 1, 3)] {
        let (_, g) = graph_of(&setting, r)?;
        let rep = multiplicity_classify(&g, MULTIPLICITY_SAMPLES, MULTIPLICITY_DEPTH, DEFAULT_SEED)?;
        log.check(
            rep.modal == modal && rep.max_observed <= max_allowed,
            format!(
                "{r}: modal {} at frequency {:.4}, max {}, bound {}",
                rep.modal, rep.modal_frequency, rep.max_observed, rep.structural_bound
            ),
        );
        if r == NamedRadial::R1 {
            log.check(rep.max_observed == 1, format!("{r}: max class size {}", rep.max_observed));
        }
        if r == NamedRadial::R3 {
            let certs = rep.certificate_text();
            log.check(
                certs.iter().any(|c| c == "12121"),
                format!("{r}: singleton certificates {}", certs.join(" ")),
            );
        }
    }
    Ok(())
}

/// Lasso through the graph: a random walk stopped at the first repeated vertex.
fn lasso(g: &EqGraph, rng: &mut ChaCha8Rng) -> Result<(SymbolSeq, SymbolSeq), CodingError> {
    let mut out: HashMap<usize, Vec<(usize, u8, u8)>> = HashMap::new();
    for e in g.edges() {
        let (a, b) = (g.position(e.from).expect("vertex"), g.position(e.to).expect("vertex"));
        out.entry(a).or_default().push((b, e.i, e.j));
    }
    let mut v = rng.random_range(0..g.vertices().len());
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut labels: Vec<(u8, u8)> = Vec::new();
    while !seen.contains_key(&v) {
        seen.insert(v, labels.len());
        let choices = &out[&v];
        let (w, i, j) = choices[rng.random_range(0..choices.len())];
        labels.push((i, j));
        v = w;
    }
    let s = seen[&v];
    let split = |pick: fn(&(u8, u8)) -> u8| {
        SymbolSeq::eventually_periodic(
            labels[..s].iter().map(pick).collect(),
            labels[s..].iter().map(pick).collect(),
        )
    };
    Ok((split(|l| l.0)?, split(|l| l.1)?))
}

fn random_periodic(rng: &mut ChaCha8Rng, d: u8) -> Result<SymbolSeq, CodingError> {
    let p = rng.random_range(0..=3usize);
    let q = rng.random_range(1..=4usize);
    let prefix = (0..p).map(|_| rng.random_range(0..d)).collect();
    let period = (0..q).map(|_| rng.random_range(0..d)).collect();
    SymbolSeq::eventually_periodic(prefix, period)
}

/// Pairs per radial in the numeric cross-check.
pub const CROSS_CHECK_PAIRS: usize = 50;

fn numeric_cross_check(log: &mut Log) -> Step {
    let setting = LoopSetting::quad_cantor()?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for r in NamedRadial::ALL {
        let (radial, g) = graph_of(&setting, r)?;
        let tree = CodingTree::extend(setting.map(), &radial, 10)?;
        let (mut related, mut disagree, mut between) = (0, 0, 0);
        let (mut max_related, mut min_distinct) = (0.0f64, f64::INFINITY);
        for k in 0..CROSS_CHECK_PAIRS {
            let (a, b) = if k % 2 == 0 {
                lasso(&g, &mut rng)?
            } else {
                (random_periodic(&mut rng, 2)?, random_periodic(&mut rng, 2)?)
            };
            let verdict = relation_decide(&g, &a, &b);
            let dist = (pi_eval(&tree, &a, 1e-9)?.point - pi_eval(&tree, &b, 1e-9)?.point).norm();
            match verdict {
                Verdict::Related => {
                    related += 1;
                    max_related = max_related.max(dist);
                    if dist > 1e-7 {
                        disagree += 1;
                    }
                }
                Verdict::Unrelated => {
                    min_distinct = min_distinct.min(dist);
                    if dist < 1e-4 {
                        disagree += 1;
                    }
                }
                Verdict::UndecidedBeyond(_) => disagree += 1,
            }
            if dist > 1e-7 && dist < 1e-4 {
                between += 1;
            }
        }
        log.check(
            disagree == 0 && between == 0,
            format!(
                "{r}: {related} related, max related distance {max_related:.2e}, min distinct distance {min_distinct:.2e}, {disagree} disagreements, {between} in between"
            ),
        );
    }
    Ok(())
}

fn growth_probe(log: &mut Log) -> Step {
    const KMAX: usize = 16;
    let powers: Vec<usize> = (1..=KMAX as u32).map(|k| 1usize << k).collect();
    let half = growth_rate_exact(&lift_radial_class(&RadialClass::power(2, &[0, 1])?)?, KMAX);
    log.check(half.counts == powers, format!("(0,1/2) counts {:?}", half.counts));
    let flat = growth_rate_exact(&lift_radial_class(&RadialClass::power(2, &[0, 0])?)?, KMAX);
    log.check(flat.counts.iter().all(|&c| c == 1), format!("(0,0) counts {:?}", flat.counts));
    let double = lift_radial_class(&RadialClass::power(2, &[0, 2])?)?;
    let counts = growth_rate_exact(&double, KMAX).counts;
    let mult = multiplicity_estimate(&double, RESOLUTION)?;
    log.check(
        counts == powers && mult.n == 2,
        format!("(0,1) counts {counts:?}, multiplicity {}", mult.n),
    );
    Ok(())
}

fn random_class(fam: Family, rng: &mut ChaCha8Rng) -> Result<RadialClass, CodError> {
    match fam {
        Family::Power(d) => {
            let n: Vec<i64> = (0..d).map(|_| rng.random_range(-5..=5)).collect();
            RadialClass::power(d, &n)
        }
        Family::Chebyshev(d) => {
            let e: Vec<(i8, i64)> = (0..d)
                .map(|_| (if rng.random_range(0..2) == 0 { 1 } else { -1 }, rng.random_range(-4..=4)))
                .collect();
            RadialClass::chebyshev(d, &e)
        }
        Family::Lattes => {
            let e: Vec<(GaussInt, GaussInt)> = (0..2)
                .map(|_| {
                    let alpha = unit(rng);
                    let c = Complex::new(rng.random_range(-2..=2), rng.random_range(-2..=2));
                    (alpha, Complex::new(1, 1) * c)
                })
                .collect();
            RadialClass::lattes(&e)
        }
        Family::QuadCantor => Err(CodError::UnsupportedFamily(fam)),
    }
}

fn unit(rng: &mut ChaCha8Rng) -> GaussInt {
    [Complex::new(1, 0), Complex::new(0, 1), Complex::new(-1, 0), Complex::new(0, -1)][rng.random_range(0..4usize)]
}

fn random_deck(fam: Family, rng: &mut ChaCha8Rng) -> DeckElement {
    match fam {
        Family::Chebyshev(_) => DeckElement::Chebyshev {
            a: if rng.random_range(0..2) == 0 { 1 } else { -1 },
            n: rng.random_range(-3..=3),
        },
        Family::Lattes => DeckElement::Lattes {
            u: unit(rng),
            c: Complex::new(rng.random_range(-2..=2), rng.random_range(-2..=2)),
        },
        _ => DeckElement::Power { n: rng.random_range(-5..=5) },
    }
}

fn nondegenerate_class(fam: Family, rng: &mut ChaCha8Rng) -> Result<RadialClass, CodError> {
    loop {
        let c = random_class(fam, rng)?;
        if !is_degenerate(&c) {
            return Ok(c);
        }
    }
}

fn sphere_close(a: SpherePoint, b: SpherePoint, tol: f64) -> bool {
    match (a, b) {
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm())),
        (SpherePoint::Infinity, SpherePoint::Infinity) => true,
        _ => false,
    }
}

/// Randomized pairs per family in the class arithmetic check.
pub const CLASS_PAIRS: usize = 200;
/// Random monoid elements in the scaling check.
pub const SCALING_SAMPLES: usize = 100;

fn class_arithmetic(log: &mut Log) -> Step {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let probes: Vec<SymbolSeq> = ["1^", "12^", "2.112^"].iter().map(|s| s.parse().expect("valid")).collect();
    for fam in [Family::Power(2), Family::Power(3), Family::Chebyshev(2), Family::Lattes] {
        let bound = if fam == Family::Lattes { 8 } else { 24 };
        let (mut law_failures, mut canon_failures, mut oracle_failures, mut witness_failures) = (0, 0, 0, 0);
        let mut equal_pairs = 0;
        for k in 0..CLASS_PAIRS {
            let c1 = nondegenerate_class(fam, &mut rng)?;
            let (s, t) = (random_deck(fam, &mut rng), random_deck(fam, &mut rng));
            let id = DeckElement::identity(fam)?;
            let st = deck_act(&s.compose(&t).expect("same family"), &c1)?;
            if deck_act(&id, &c1)? != c1 || st != deck_act(&s, &deck_act(&t, &c1)?)? || deck_act(&s.inverse(), &deck_act(&s, &c1)?)? != c1 {
                law_failures += 1;
            }
            if canonical_form(&st)? != canonical_form(&c1)? {
                canon_failures += 1;
            }
            let c2 = if k % 2 == 0 { st } else { nondegenerate_class(fam, &mut rng)? };
            let equal = cod_equal(&c1, &c2)?;
            if equal != deck_search(&c1, &c2, bound).is_some() {
                oracle_failures += 1;
            }
            if equal {
                equal_pairs += 1;
                let (g1, g2) = (lift_radial_class(&c1)?, lift_radial_class(&c2)?);
                for w in &probes {
                    if !sphere_close(phi(fam, g1.point(w))?, phi(fam, g2.point(w))?, 1e-8) {
                        witness_failures += 1;
                    }
                }
            }
        }
        log.check(
            law_failures == 0 && canon_failures == 0 && oracle_failures == 0 && witness_failures == 0,
            format!(
                "{fam}: {CLASS_PAIRS} pairs, {equal_pairs} equal; action law failures {law_failures}, canonical form failures {canon_failures}, oracle disagreements {oracle_failures}, coding map mismatches {witness_failures}"
            ),
        );
    }
    let mut scaling_failures = 0;
    for _ in 0..SCALING_SAMPLES {
        let c = random_class(Family::Power(2), &mut rng)?;
        let (m, k) = (rng.random_range(0..=1), rng.random_range(1..=6));
        let lhs = closed_form_measure(&power_monoid_act(m, k, &c)?)?;
        let rhs = closed_form_measure(&c)? * rational(k);
        if lhs != rhs {
            scaling_failures += 1;
        }
    }
    log.check(
        scaling_failures == 0,
        format!("power:2 scaling over {SCALING_SAMPLES} samples, {scaling_failures} failures"),
    );
    Ok(())
}

/// Radials of the catalog used by the lifting checks.
fn catalog_radials() -> Result<Vec<(String, MapModel, Radial)>, SelftestError> {
    let mut out = Vec::new();
    for (fam, s) in CATALOG_CLASSES {
        let map = MapModel::new(fam)?;
        let radial = radial_from_class(&map, &RadialClass::parse(fam, s)?)?;
        out.push((format!("{fam} {s}"), map, radial));
    }
    let setting = LoopSetting::quad_cantor()?;
    for r in NamedRadial::ALL {
        out.push((format!("quadcantor {r}"), setting.map().clone(), r.radial(&setting)?));
    }
    Ok(out)
}

/// One class per family of the catalog.
pub const CATALOG_CLASSES: [(Family, &str); 6] = [
    (Family::Power(2), "0,3/2"),
    (Family::Power(3), "0,1/3,5/3"),
    (Family::Chebyshev(2), "1/4,-1/4+1"),
    (Family::Chebyshev(3), "-1/2,1/6,5/6"),
    (Family::Lattes, "i/2,1/2+1+i"),
    (Family::Lattes, "-i/2+1+i,-1/2+2"),
];

fn circle(centre: Complex64, radius: f64, start: Complex64, n: usize) -> Result<Curve, GeomError> {
    let phase = (start - centre).arg();
    let mut pts: Vec<Complex64> = (0..n)
        .map(|k| centre + Complex64::from_polar(radius, phase + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    pts[0] = start;
    pts.push(start);
    Curve::from_points(pts)
}

fn lifting_invariants(log: &mut Log) -> Step {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for (label, map, radial) in catalog_radials()? {
        let base = radial.base();
        let starts = map.preimages(base)?;
        // Projection identity along every lifted leg.
        let mut projection: f64 = 0.0;
        for leg in radial.legs() {
            for &x0 in &starts {
                let trace = lift_curve_traced(&map, leg, x0)?;
                for (z, w) in trace.lift.vertices().iter().zip(&trace.base) {
                    let fz = map.evaluate(*z)?;
                    projection = projection.max((fz - w).norm() / (1.0 + w.norm()));
                }
            }
        }
        log.check(projection <= 1e-8, format!("{label}: projection defect {projection:.2e}"));
        // Nullhomotopic loops lift to closed loops.
        let mut loops = vec![circle(base + 0.05, 0.05, base, 64)?];
        if map.family() == Family::QuadCantor {
            let setting = LoopSetting::quad_cantor()?;
            for rel in setting.group().relators() {
                loops.push(setting.loop_of_word(rel)?);
            }
        }
        let mut gap: f64 = 0.0;
        for lp in &loops {
            for &x0 in &starts {
                let lift = lift_curve_traced(&map, lp, x0)?.lift;
                gap = gap.max((lift.end() - lift.start()).norm());
            }
        }
        log.check(gap <= 1e-9, format!("{label}: {} null loops, closing gap {gap:.2e}", loops.len()));
        // Concatenation of tree curves. Lattès trees reach the pole and cubic
        // Chebyshev trees graze the critical value after a few levels.
        let half = match map.family() {
            Family::Lattes => 1,
            Family::Chebyshev(3) => 2,
            _ => 3,
        };
        let tree = CodingTree::extend(&map, &radial, 2 * half)?;
        let d = radial.degree() as u8;
        let mut concat: f64 = 0.0;
        for _ in 0..12 {
            let u: Vec<u8> = (0..rng.random_range(1..=half)).map(|_| rng.random_range(0..d)).collect();
            let w: Vec<u8> = (0..rng.random_range(1..=half)).map(|_| rng.random_range(0..d)).collect();
            let lifted = tree.lift_along(&u, &tree.curve(&w)?)?;
            let joined = tree.curve(&u)?.concat(&lifted)?;
            let uw = [u.as_slice(), w.as_slice()].concat();
            concat = concat.max((joined.end() - tree.point(&uw)?).norm());
        }
        log.check(concat <= 1e-9, format!("{label}: concatenation defect {concat:.2e}"));
    }
    for (fam, s) in CATALOG_CLASSES {
        let ifs = lift_radial_class(&RadialClass::parse(fam, s)?)?;
        let r = attractor_raster(&ifs, 256)?;
        let defect = hutchinson_defect(&ifs, &r)?;
        log.check(
            defect.is_clean(),
            format!("{fam} {s}: self-similarity missing {} extra {} of {}", defect.missing, defect.extra, defect.total),
        );
    }
    Ok(())
}
