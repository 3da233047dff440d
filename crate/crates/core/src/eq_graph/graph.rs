use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::Integer;
use rayon::prelude::*;

use super::group::GroupElem;
use super::radials::LoopSetting;
use super::EqError;
use crate::coding_tree::{Radial, SymbolSeq};

/// A labelled edge `from → to` with weight `(i, j)`, symbols from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: GroupElem,
    pub to: GroupElem,
    pub i: u8,
    pub j: u8,
}

/// The pruned weighted graph whose infinite labelled paths are exactly the
/// pairs of sequences with equal images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqGraph {
    degree: usize,
    vertices: Vec<GroupElem>,
    names: Vec<String>,
    edges: Vec<Edge>,
}

impl EqGraph {
    /// Builds a graph from raw parts, pruning vertices without outgoing
    /// edges until stable.
    pub fn from_edges(
        degree: usize,
        candidates: &[(GroupElem, String)],
        raw: Vec<Edge>,
    ) -> Result<Self, EqError> {
        let mut alive: BTreeSet<GroupElem> = candidates.iter().map(|c| c.0).collect();
        let mut edges: Vec<Edge> = raw
            .into_iter()
            .filter(|e| alive.contains(&e.from) && alive.contains(&e.to))
            .collect();
        loop {
            let with_out: BTreeSet<GroupElem> = edges.iter().map(|e| e.from).collect();
            let before = alive.len();
            alive.retain(|v| with_out.contains(v));
            edges.retain(|e| alive.contains(&e.from) && alive.contains(&e.to));
            if alive.len() == before {
                break;
            }
        }
        if alive.is_empty() {
            return Err(EqError::EmptyGraph);
        }
        edges.sort();
        edges.dedup();
        let (vertices, names) = candidates
            .iter()
            .filter(|c| alive.contains(&c.0))
            .map(|c| (c.0, c.1.clone()))
            .unzip();
        Ok(Self {
            degree,
            vertices,
            names,
            edges,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> &[GroupElem] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of a vertex in [`Self::vertices`].
    pub fn position(&self, v: GroupElem) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    pub fn name(&self, v: GroupElem) -> Option<&str> {
        self.position(v).map(|k| self.names[k].as_str())
    }

    /// Edges as `(from, to, i, j)` with names and one-based symbols.
    pub fn labelled_edges(&self) -> Vec<(String, String, u8, u8)> {
        self.edges
            .iter()
            .map(|e| {
                (
                    self.name(e.from).unwrap_or("?").to_string(),
                    self.name(e.to).unwrap_or("?").to_string(),
                    e.i + 1,
                    e.j + 1,
                )
            })
            .collect()
    }

    /// Successor lists by vertex position: `succ[v][i * d + j]`.
    pub(crate) fn successor_table(&self) -> Vec<Vec<Vec<usize>>> {
        let d = self.degree;
        let mut succ = vec![vec![Vec::new(); d * d]; self.vertices.len()];
        for e in &self.edges {
            let (a, b) = (self.position(e.from).unwrap(), self.position(e.to).unwrap());
            succ[a][e.i as usize * d + e.j as usize].push(b);
        }
        succ
    }

    /// Graphviz rendering; vertices in element order, edges sorted.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        for (k, n) in self.names.iter().enumerate() {
            let _ = writeln!(out, "  v{k} [label=\"{n}\"];");
        }
        for e in &self.edges {
            let (a, b) = (self.position(e.from).unwrap(), self.position(e.to).unwrap());
            let _ = writeln!(out, "  v{a} -> v{b} [label=\"{}|{}\"];", e.i + 1, e.j + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// Every edge `γ → γ'` with `γ = [l_i F_{x_i}(γ') (l'_j)⁻¹]` over all group
/// elements and leg pairs, then pruned.
pub fn build_eq_graph(setting: &LoopSetting, r: &Radial, r2: &Radial) -> Result<EqGraph, EqError> {
    let group = setting.group();
    let d = r.degree();
    if r2.degree() != d {
        return Err(EqError::InvalidRadial("radials of different degree".into()));
    }
    let triples: Vec<(GroupElem, usize, usize)> = group
        .elements()
        .flat_map(|g| (0..d).flat_map(move |i| (0..d).map(move |j| (g, i, j))))
        .collect();
    let raw: Vec<Option<Edge>> = triples
        .par_iter()
        .map(|&(g, i, j)| match setting.classify_lift(r, r2, g, i, j) {
            Ok(from) => Ok(Some(Edge {
                from,
                to: g,
                i: i as u8,
                j: j as u8,
            })),
            Err(EqError::NonClosedLift { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let candidates: Vec<(GroupElem, String)> = group.elements().map(|g| (g, group.name(g))).collect();
    EqGraph::from_edges(d, &candidates, raw.into_iter().flatten().collect())
}

/// Replays every edge through the lifting and checks it reproduces its
/// source vertex.
pub fn edges_are_sound(setting: &LoopSetting, r: &Radial, r2: &Radial, graph: &EqGraph) -> Result<bool, EqError> {
    for e in graph.edges() {
        if setting.classify_lift(r, r2, e.to, e.i as usize, e.j as usize)? != e.from {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of deciding whether two sequences have the same image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Related,
    Unrelated,
    /// Finite input: some labelled path survives all given symbols.
    UndecidedBeyond(usize),
}

impl Verdict {
    pub fn is_related(self) -> bool {
        self == Verdict::Related
    }
}

/// Decides `π_r(ω) = π_{r'}(ω')` by searching for an infinite labelled path.
///
/// Eventually periodic inputs are decided exactly through the product of the
/// graph with the periodic label sequence; if either input is finite only
/// the common prefix is checked.
pub fn relation_decide(graph: &EqGraph, a: &SymbolSeq, b: &SymbolSeq) -> Verdict {
    let d = graph.degree();
    let succ = graph.successor_table();
    let n = graph.vertices().len();
    let label = |k: usize| -> Option<usize> {
        match (a.at(k), b.at(k)) {
            (Some(x), Some(y)) if (x as usize) < d && (y as usize) < d => Some(x as usize * d + y as usize),
            _ => None,
        }
    };
    if a.is_finite() || b.is_finite() {
        let len = a.len().unwrap_or(usize::MAX).min(b.len().unwrap_or(usize::MAX));
        let mut current = vec![true; n];
        for k in 0..len {
            let Some(l) = label(k) else { return Verdict::Unrelated };
            let mut next = vec![false; n];
            for v in (0..n).filter(|&v| current[v]) {
                for &w in &succ[v][l] {
                    next[w] = true;
                }
            }
            if !next.contains(&true) {
                return Verdict::Unrelated;
            }
            current = next;
        }
        return Verdict::UndecidedBeyond(len);
    }
    let p = a.prefix().len().max(b.prefix().len());
    let q = a.period().len().lcm(&b.period().len());
    let positions = p + q;
    let next_pos = |k: usize| if k + 1 < positions { k + 1 } else { p };
    let labels: Vec<Option<usize>> = (0..positions).map(label).collect();
    // alive[k][v]: an infinite path starts at vertex v at position k.
    let mut alive = vec![vec![true; n]; positions];
    loop {
        let mut changed = false;
        for k in 0..positions {
            let k2 = next_pos(k);
            for v in 0..n {
                if !alive[k][v] {
                    continue;
                }
                let ok = labels[k].is_some_and(|l| succ[v][l].iter().any(|&w| alive[k2][w]));
                if !ok {
                    alive[k][v] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if alive[0].contains(&true) {
        Verdict::Related
    } else {
        Verdict::Unrelated
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eq_graph::radials::NamedRadial;

    fn seq(s: &str) -> SymbolSeq {
        s.parse().unwrap()
    }

    fn graph(r: NamedRadial) -> EqGraph {
        let s = LoopSetting::quad_cantor().unwrap();
        let rad = r.radial(&s).unwrap();
        build_eq_graph(&s, &rad, &rad).unwrap()
    }

    fn edge_set(g: &EqGraph) -> BTreeSet<(String, String, u8, u8)> {
        g.labelled_edges().into_iter().collect()
    }

    fn expected(list: &[(&str, &str, u8, u8)]) -> BTreeSet<(String, String, u8, u8)> {
        list.iter().map(|&(a, b, i, j)| (a.into(), b.into(), i, j)).collect()
    }

    #[test]
    fn first_radial_graph() {
        let g = graph(NamedRadial::R1);
        assert_eq!(g.vertices().len(), 1);
        assert_eq!(edge_set(&g), expected(&[("e", "e", 1, 1), ("e", "e", 2, 2)]));
    }

    #[test]
    fn second_radial_graph() {
        let g = graph(NamedRadial::R2);
        assert_eq!(
            edge_set(&g),
            expected(&[("e", "e", 1, 1), ("e", "e", 2, 2), ("B1", "B1", 1, 2), ("B1", "B1", 2, 1)])
        );
    }

    #[test]
    fn third_radial_graph() {
        let g = graph(NamedRadial::R3);
        let names: Vec<&str> = g.vertices().iter().map(|&v| g.name(v).unwrap()).collect();
        assert_eq!(names, ["e", "B2", "B1B2", "B2B1", "B2B1B2"]);
        assert_eq!(
            edge_set(&g),
            expected(&[
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
            ])
        );
    }

    #[test]
    fn pruning_is_stable_and_edges_sound() {
        let s = LoopSetting::quad_cantor().unwrap();
        for r in NamedRadial::ALL {
            let rad = r.radial(&s).unwrap();
            let g = build_eq_graph(&s, &rad, &rad).unwrap();
            assert!(edges_are_sound(&s, &rad, &rad, &g).unwrap());
            let candidates: Vec<(GroupElem, String)> =
                g.vertices().iter().map(|&v| (v, g.name(v).unwrap().to_string())).collect();
            let again = EqGraph::from_edges(2, &candidates, g.edges().to_vec()).unwrap();
            assert_eq!(again, g);
        }
    }

    #[test]
    fn empty_graph_is_flagged() {
        let c = vec![(GroupElem(0), "e".to_string()), (GroupElem(1), "a".to_string())];
        let raw = vec![Edge { from: GroupElem(0), to: GroupElem(1), i: 0, j: 0 }];
        assert_eq!(EqGraph::from_edges(2, &c, raw), Err(EqError::EmptyGraph));
    }

    #[test]
    fn decisions() {
        let g1 = graph(NamedRadial::R1);
        assert_eq!(relation_decide(&g1, &seq("12^"), &seq("12^")), Verdict::Related);
        assert_eq!(relation_decide(&g1, &seq("1^"), &seq("2^")), Verdict::Unrelated);
        let g2 = graph(NamedRadial::R2);
        assert_eq!(relation_decide(&g2, &seq("1^"), &seq("2^")), Verdict::Related);
        assert_eq!(relation_decide(&g2, &seq("12^"), &seq("21^")), Verdict::Related);
        assert_eq!(relation_decide(&g2, &seq("112^"), &seq("122^")), Verdict::Unrelated);
        assert_eq!(relation_decide(&g2, &seq("1.2^"), &seq("2.1^")), Verdict::Related);
        assert_eq!(relation_decide(&g2, &seq("121"), &seq("212")), Verdict::UndecidedBeyond(3));
        assert_eq!(relation_decide(&g2, &seq("121"), &seq("211")), Verdict::Unrelated);
    }

    #[test]
    fn dot_output() {
        let dot = graph(NamedRadial::R1).to_dot("r1");
        assert_eq!(
            dot,
            "digraph r1 {\n  v0 [label=\"e\"];\n  v0 -> v0 [label=\"1|1\"];\n  v0 -> v0 [label=\"2|2\"];\n}\n"
        );
    }
}
