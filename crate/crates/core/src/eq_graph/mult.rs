use std::collections::{BTreeMap, HashMap};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::graph::EqGraph;
use super::group::GroupElem;
use super::EqError;

/// Default seed of the Monte Carlo runs.
pub const DEFAULT_SEED: u64 = 0xC0D1A6;
/// Smallest frequency of the modal class size for a conclusive report.
pub const MODAL_FREQUENCY: f64 = 0.95;
/// Longest label word examined by the certificate search.
pub const CERTIFICATE_MAX_LEN: usize = 6;

/// Class sizes of the coding relation estimated by sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityReport {
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    /// Sample count per observed class size.
    pub histogram: BTreeMap<u64, usize>,
    pub modal: u64,
    pub modal_frequency: f64,
    pub max_observed: u64,
    /// `⌊√(2·#V)⌋`, the class size bound for a map whose coding tree points
    /// are distinct and whose critical points avoid the Julia set.
    pub structural_bound: u64,
    /// Factor-minimal label words that kill every off-diagonal path, in
    /// shortlex order; `None` when the graph has no diagonal vertex.
    pub certificates: Option<Vec<Vec<u8>>>,
}

impl MultiplicityReport {
    pub fn certificate_text(&self) -> Vec<String> {
        self.certificates
            .iter()
            .flatten()
            .map(|w| {
                if w.is_empty() {
                    "(empty)".to_string()
                } else {
                    w.iter().map(|&s| char::from(b'1' + s)).collect()
                }
            })
            .collect()
    }
}

/// Number of distinct `ω'` prefixes of length `depth / 2` that label a path
/// of length `depth` alongside `ω`.
pub fn companion_count(graph: &EqGraph, omega: &[u8]) -> u64 {
    let d = graph.degree();
    let succ = graph.successor_table();
    let n = graph.vertices().len();
    let depth = omega.len();
    let half = depth / 2;
    // alive[k]: vertices with a path over positions k..depth.
    let mut alive = vec![0u64; depth + 1];
    alive[depth] = (1u64 << n) - 1;
    for k in (0..depth).rev() {
        let a = omega[k] as usize;
        for v in 0..n {
            let ok = (0..d).any(|j| succ[v][a * d + j].iter().any(|&w| alive[k + 1] >> w & 1 == 1));
            if ok {
                alive[k] |= 1 << v;
            }
        }
    }
    let mut states: HashMap<u64, u64> = HashMap::new();
    if alive[0] != 0 {
        states.insert(alive[0], 1);
    }
    for (k, &a) in omega.iter().enumerate().take(half) {
        let mut next: HashMap<u64, u64> = HashMap::new();
        for (&set, &count) in &states {
            for j in 0..d {
                let mut image = 0u64;
                for v in (0..n).filter(|&v| set >> v & 1 == 1) {
                    for &w in &succ[v][a as usize * d + j] {
                        image |= 1 << w;
                    }
                }
                image &= alive[k + 1];
                if image != 0 {
                    let e = next.entry(image).or_insert(0);
                    *e = e.saturating_add(count);
                }
            }
        }
        states = next;
    }
    states.values().fold(0u64, |acc, &c| acc.saturating_add(c))
}

/// Off-diagonal vertex set: every vertex except the identity, provided the
/// identity carries only diagonal loops and nothing returns to it.
fn off_diagonal(graph: &EqGraph) -> Option<u64> {
    let id = graph.position(GroupElem::IDENTITY)?;
    for e in graph.edges() {
        let (a, b) = (graph.position(e.from)?, graph.position(e.to)?);
        if b == id && (a != id || e.i != e.j) {
            return None;
        }
    }
    let all = (1u64 << graph.vertices().len()) - 1;
    Some(all & !(1 << id))
}

fn image(succ: &[Vec<Vec<usize>>], d: usize, mut set: u64, word: &[u8]) -> u64 {
    for &a in word {
        let mut next = 0u64;
        let mut bits = set;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for j in 0..d {
                for &w in &succ[v][a as usize * d + j] {
                    next |= 1 << w;
                }
            }
        }
        set = next;
        if set == 0 {
            break;
        }
    }
    set
}

/// Label words `u` (in the first coordinate) such that no path through
/// off-diagonal vertices can read `u`, and no proper factor of `u` has this
/// property. A sequence containing such a word infinitely often is related
/// only to itself.
pub fn singleton_certificates(graph: &EqGraph, max_len: usize) -> Option<Vec<Vec<u8>>> {
    let start = off_diagonal(graph)?;
    let d = graph.degree();
    let succ = graph.successor_table();
    let kills = |w: &[u8]| image(&succ, d, start, w) == 0;
    if start == 0 {
        return Some(vec![Vec::new()]);
    }
    let mut found = Vec::new();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|w| (0..d as u8).map(move |s| [w.as_slice(), &[s]].concat()))
            .collect();
        for w in &level {
            if kills(w) && !kills(&w[1..]) && !kills(&w[..w.len() - 1]) {
                found.push(w.clone());
            }
        }
    }
    Some(found)
}

/// Samples Bernoulli sequences of length `depth` and reports the class
/// sizes they see; each sample draws from its own ChaCha8 stream.
pub fn multiplicity_classify(
    graph: &EqGraph,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Result<MultiplicityReport, EqError> {
    if samples == 0 || depth < 2 {
        return Err(EqError::InvalidSampling { samples, depth });
    }
    if graph.vertices().len() > 63 {
        return Err(EqError::InvalidSampling { samples, depth });
    }
    let d = graph.degree() as u8;
    let counts: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let omega: Vec<u8> = (0..depth).map(|_| rng.random_range(0..d)).collect();
            companion_count(graph, &omega)
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0usize) += 1;
    }
    let (&modal, &freq) = histogram
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("at least one sample");
    let modal_frequency = freq as f64 / samples as f64;
    if modal_frequency < MODAL_FREQUENCY {
        return Err(EqError::Inconclusive {
            modal,
            frequency: modal_frequency,
        });
    }
    let max_observed = *histogram.keys().next_back().expect("nonempty");
    Ok(MultiplicityReport {
        samples,
        depth,
        seed,
        histogram,
        modal,
        modal_frequency,
        max_observed,
        structural_bound: ((2 * graph.vertices().len()) as f64).sqrt().floor() as u64,
        certificates: singleton_certificates(graph, CERTIFICATE_MAX_LEN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eq_graph::graph::build_eq_graph;
    use crate::eq_graph::radials::{LoopSetting, NamedRadial};

    fn graph(r: NamedRadial) -> EqGraph {
        let s = LoopSetting::quad_cantor().unwrap();
        let rad = r.radial(&s).unwrap();
        build_eq_graph(&s, &rad, &rad).unwrap()
    }

    #[test]
    fn companion_counts() {
        let g1 = graph(NamedRadial::R1);
        let g2 = graph(NamedRadial::R2);
        for w in [vec![0u8; 10], vec![0, 1, 1, 0, 1, 0, 0, 1]] {
            assert_eq!(companion_count(&g1, &w), 1);
            assert_eq!(companion_count(&g2, &w), 2);
        }
    }

    #[test]
    fn classes_by_radial() {
        let r1 = multiplicity_classify(&graph(NamedRadial::R1), 2000, 60, DEFAULT_SEED).unwrap();
        assert_eq!((r1.modal, r1.max_observed), (1, 1));
        assert_eq!(r1.certificate_text(), ["(empty)"]);
        let r2 = multiplicity_classify(&graph(NamedRadial::R2), 2000, 60, DEFAULT_SEED).unwrap();
        assert_eq!((r2.modal, r2.max_observed), (2, 2));
        assert_eq!(r2.certificates, Some(vec![]));
        let r3 = multiplicity_classify(&graph(NamedRadial::R3), 2000, 60, DEFAULT_SEED).unwrap();
        assert_eq!(r3.modal, 1);
        assert!(r3.max_observed <= 3);
        assert_eq!(r3.structural_bound, 3);
        assert!(r3.certificate_text().contains(&"12121".to_string()), "{:?}", r3.certificate_text());
    }

    #[test]
    fn reports_are_deterministic() {
        let g = graph(NamedRadial::R3);
        let a = multiplicity_classify(&g, 200, 60, 7).unwrap();
        let b = multiplicity_classify(&g, 200, 60, 7).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            multiplicity_classify(&g, 0, 30, 7),
            Err(EqError::InvalidSampling { .. })
        ));
    }
}
