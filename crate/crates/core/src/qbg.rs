//! Quantum Bruhat graph of `W₀`.
//!
//! Bruhat edges `w → w s_α` raise length by one and carry weight 0; quantum
//! edges drop length by `⟨α^vee, 2ρ⟩ − 1` and carry weight `α^vee`. Distances and
//! weights of all pairs are tabulated by one BFS per source.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{property, Result};
use crate::rootdata::{LatticeVec, RootDatum};
use crate::weyl::{FiniteElement, WeylGroup};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub source: FiniteElement,
    pub target: FiniteElement,
    /// Positive root index of `α`.
    pub root: u16,
    pub quantum: bool,
}

pub type Path = Vec<Edge>;

#[derive(Clone, Debug)]
pub struct QuantumBruhatGraph {
    n: usize,
    dim: usize,
    npos: usize,
    out: Vec<Vec<Edge>>,
    dist: Vec<u16>,
    wt: Vec<LatticeVec>,
    coroots: Vec<LatticeVec>,
    /// `w ↦ w₀ w`.
    w0_left: Vec<u32>,
    incoherent: Vec<(FiniteElement, FiniteElement)>,
}

impl QuantumBruhatGraph {
    pub fn new(rd: &RootDatum, w: &WeylGroup) -> Self {
        let n = w.order();
        let npos = rd.num_positive();
        let two_rho = rd.two_rho();
        let coroots: Vec<LatticeVec> = (0..npos).map(|r| rd.coroot(r)).collect();
        let mut out = vec![Vec::new(); n];
        for u in w.elements() {
            let lu = w.length(u) as i32;
            for r in 0..npos {
                let v = w.multiply(u, w.reflection(r));
                let lv = w.length(v) as i32;
                let h = coroots[r].dot(&two_rho);
                let kind = if lv == lu + 1 {
                    Some(false)
                } else if lv == lu + 1 - h {
                    Some(true)
                } else {
                    None
                };
                if let Some(quantum) = kind {
                    out[u.index()].push(Edge { source: u, target: v, root: r as u16, quantum });
                }
            }
        }
        let w0 = w.longest_element(&(0..w.rank()).collect::<Vec<_>>());
        let w0_left = w.elements().map(|u| w.multiply(w0, u).0).collect();
        let mut g = QuantumBruhatGraph {
            n,
            dim: rd.dim(),
            npos,
            out,
            dist: vec![u16::MAX; n * n],
            wt: vec![LatticeVec::zero(rd.dim()); n * n],
            coroots,
            w0_left,
            incoherent: Vec::new(),
        };
        g.tabulate();
        g
    }

    fn tabulate(&mut self) {
        for s in 0..self.n {
            let base = s * self.n;
            self.dist[base + s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(p) = queue.pop_front() {
                let dp = self.dist[base + p];
                let wp = self.wt[base + p];
                for e in &self.out[p] {
                    let t = e.target.index();
                    let we = wp + self.edge_weight(e);
                    if self.dist[base + t] == u16::MAX {
                        self.dist[base + t] = dp + 1;
                        self.wt[base + t] = we;
                        queue.push_back(t);
                    } else if self.dist[base + t] == dp + 1 && self.wt[base + t] != we {
                        self.incoherent.push((FiniteElement(s as u32), e.target));
                    }
                }
            }
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn edges_from(&self, u: FiniteElement) -> &[Edge] {
        &self.out[u.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.out.iter().flatten()
    }

    pub fn edge(&self, u: FiniteElement, v: FiniteElement) -> Option<&Edge> {
        self.out[u.index()].iter().find(|e| e.target == v)
    }

    pub fn edge_weight(&self, e: &Edge) -> LatticeVec {
        if e.quantum {
            self.coroots[e.root as usize]
        } else {
            LatticeVec::zero(self.dim)
        }
    }

    pub fn path_weight(&self, p: &[Edge]) -> LatticeVec {
        p.iter().fold(LatticeVec::zero(self.dim), |acc, e| acc + self.edge_weight(e))
    }

    pub fn dist(&self, u: FiniteElement, v: FiniteElement) -> usize {
        self.dist[u.index() * self.n + v.index()] as usize
    }

    /// Weight of any shortest path from `u` to `v`.
    pub fn wt(&self, u: FiniteElement, v: FiniteElement) -> LatticeVec {
        self.wt[u.index() * self.n + v.index()]
    }

    pub fn distance_and_weight(&self, u: FiniteElement, v: FiniteElement) -> (usize, LatticeVec) {
        (self.dist(u, v), self.wt(u, v))
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.dist.iter().all(|&d| d != u16::MAX)
    }

    /// Pairs where two shortest paths were found to carry different weights.
    pub fn check_coherence(&self) -> Result<()> {
        match self.incoherent.first() {
            None => Ok(()),
            Some((u, v)) => property(format!("shortest paths {u} -> {v} have different weights")),
        }
    }

    /// Every path of length exactly `d(u,v)`.
    pub fn all_shortest_paths(&self, u: FiniteElement, v: FiniteElement) -> Vec<Path> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.shortest_rec(u, v, &mut cur, &mut out);
        out
    }

    fn shortest_rec(&self, p: FiniteElement, v: FiniteElement, cur: &mut Path, out: &mut Vec<Path>) {
        if p == v {
            out.push(cur.clone());
            return;
        }
        let d = self.dist(p, v);
        for e in &self.out[p.index()] {
            if self.dist(e.target, v) + 1 == d {
                cur.push(*e);
                self.shortest_rec(e.target, v, cur, out);
                cur.pop();
            }
        }
    }

    /// Walks of exactly `len` edges from `u` to `v`, at most `limit` of them.
    /// The flag is true when the limit cut the enumeration short.
    pub fn walks(&self, u: FiniteElement, v: FiniteElement, len: usize, limit: usize) -> (Vec<Path>, bool) {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        let truncated = !self.walks_rec(u, v, len, limit, &mut cur, &mut out);
        (out, truncated)
    }

    fn walks_rec(
        &self,
        p: FiniteElement,
        v: FiniteElement,
        left: usize,
        limit: usize,
        cur: &mut Path,
        out: &mut Vec<Path>,
    ) -> bool {
        if left == 0 {
            if p == v {
                if out.len() >= limit {
                    return false;
                }
                out.push(cur.clone());
            }
            return true;
        }
        for e in &self.out[p.index()] {
            if self.dist(e.target, v) > left - 1 {
                continue;
            }
            cur.push(*e);
            let ok = self.walks_rec(e.target, v, left - 1, limit, cur, out);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    fn parent_path(&self, u: FiniteElement, v: FiniteElement) -> Path {
        let mut path = Vec::with_capacity(self.dist(u, v));
        let mut p = u;
        while p != v {
            let d = self.dist(p, v);
            let e = *self.out[p.index()]
                .iter()
                .find(|e| self.dist(e.target, v) + 1 == d)
                .expect("graph is strongly connected");
            path.push(e);
            p = e.target;
        }
        path
    }

    /// No Bruhat edge is immediately followed by a quantum edge.
    pub fn is_downup(path: &[Edge]) -> bool {
        path.windows(2).all(|w| w[0].quantum || !w[1].quantum)
    }

    /// No quantum edge is immediately followed by a Bruhat edge.
    pub fn is_updown(path: &[Edge]) -> bool {
        path.windows(2).all(|w| !w[0].quantum || w[1].quantum)
    }

    /// A shortest path of down-up shape and the number of rewrites it took.
    pub fn downup_path(&self, u: FiniteElement, v: FiniteElement) -> Result<(Path, usize)> {
        let mut path = self.parent_path(u, v);
        let cap = path.len() * self.npos;
        let mut iterations = 0;
        while let Some(i) = path.windows(2).position(|w| !w[0].quantum && w[1].quantum) {
            if iterations >= cap {
                return property(format!("down-up rewriting {u} -> {v} exceeded {cap} steps"));
            }
            let (a, c) = (path[i].source, path[i + 1].target);
            let replacement = self.out[a.index()]
                .iter()
                .filter(|e1| e1.quantum)
                .filter_map(|e1| self.edge(e1.target, c).map(|e2| (*e1, *e2)))
                .min_by_key(|(e1, e2)| (e1.root, e2.root));
            match replacement {
                Some((e1, e2)) => {
                    path[i] = e1;
                    path[i + 1] = e2;
                }
                None => return property(format!("no down-up rewrite for a segment of {u} -> {v}")),
            }
            iterations += 1;
        }
        Ok((path, iterations))
    }

    /// Up-down shortest path, obtained from the down-up one through `w ↦ w₀w`,
    /// which reverses edges and keeps their kind.
    pub fn updown_path(&self, u: FiniteElement, v: FiniteElement) -> Result<(Path, usize)> {
        let f = |w: FiniteElement| FiniteElement(self.w0_left[w.index()]);
        let (p, it) = self.downup_path(f(v), f(u))?;
        let path = p
            .iter()
            .rev()
            .map(|e| Edge { source: f(e.target), target: f(e.source), root: e.root, quantum: e.quantum })
            .collect();
        Ok((path, it))
    }

    pub fn to_dot(&self, w: &WeylGroup, rd: &RootDatum) -> String {
        let name = |u: FiniteElement| {
            let s = w.word_string(u);
            if s.is_empty() {
                "1".to_string()
            } else {
                s
            }
        };
        let mut s = String::from("digraph qbg {\n");
        for u in w.elements() {
            let _ = writeln!(s, "  v{} [label=\"{}\"];", u.0, name(u));
        }
        for e in self.edges() {
            let style = if e.quantum {
                format!("style=dashed, label=\"{}\"", rd.root_name(e.root as usize).replace('a', "a^v"))
            } else {
                "style=solid".to_string()
            };
            let _ = writeln!(s, "  v{} -> v{} [{}];", e.source.0, e.target.0, style);
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(name: &str) -> (RootDatum, WeylGroup, QuantumBruhatGraph) {
        let rd = RootDatum::preset(name).unwrap();
        let w = WeylGroup::new(&rd).unwrap();
        let g = QuantumBruhatGraph::new(&rd, &w);
        (rd, w, g)
    }

    #[test]
    fn a1_edges() {
        let (rd, w, g) = build("A1");
        let s = w.simple(0);
        let e = g.edge(FiniteElement::IDENTITY, s).unwrap();
        assert!(!e.quantum);
        let e = g.edge(s, FiniteElement::IDENTITY).unwrap();
        assert!(e.quantum);
        assert_eq!(g.edge_weight(e), rd.coroot(0));
    }

    #[test]
    fn a2_quantum_edges_from_w0() {
        let (rd, w, g) = build("A2");
        let w0 = w.parse_word("s1 s2 s1").unwrap();
        let q: Vec<_> = g.edges_from(w0).iter().filter(|e| e.quantum).collect();
        let s12 = w.parse_word("s1 s2").unwrap();
        let s21 = w.parse_word("s2 s1").unwrap();
        let to12 = q.iter().find(|e| e.target == s12).unwrap();
        let to21 = q.iter().find(|e| e.target == s21).unwrap();
        assert_eq!(g.edge_weight(to12), rd.simple_coroot(0));
        assert_eq!(g.edge_weight(to21), rd.simple_coroot(1));
        let to1 = q.iter().find(|e| e.target == FiniteElement::IDENTITY).unwrap();
        assert_eq!(to1.root, 2);
        let theta = rd.simple_coroot(0) + rd.simple_coroot(1);
        assert_eq!(g.distance_and_weight(w0, FiniteElement::IDENTITY), (1, theta));
        // Maximal chains of the Bruhat interval [1, w0], not reduced words.
        assert_eq!(g.all_shortest_paths(FiniteElement::IDENTITY, w0).len(), 4);
        assert!(g.is_strongly_connected());
        g.check_coherence().unwrap();
    }

    #[test]
    fn downup_small() {
        let (_, w, g) = build("A2");
        let (s1, s2) = (w.simple(0), w.simple(1));
        let (p, _) = g.downup_path(s1, s2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(QuantumBruhatGraph::is_downup(&p));
        let (p, _) = g.updown_path(s1, s2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(QuantumBruhatGraph::is_updown(&p));
        assert_eq!(p[0].source, s1);
        assert_eq!(p[1].target, s2);
    }
}
