//! The extended affine Weyl group `W̃ = X_* ⋊ W₀`.
//!
//! An [`AffineElement`] `(λ, z)` stands for `t^λ z`. Lengths come from the
//! closed formula `Σ_{α>0} |⟨λ,α⟩ − δ⁻(z⁻¹α)|`; inversions are enumerated
//! exactly per root from the level bounds, so no search cap is needed.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{input, property, Result};
use crate::qbg::QuantumBruhatGraph;
use crate::rootdata::{AffineRoot, LatticeVec, RootDatum};
use crate::weyl::{FiniteElement, WeylGroup};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AffineElement {
    pub translation: LatticeVec,
    pub finite: FiniteElement,
}

/// `x t^λ y` with the acuteness inequality holding for every positive root.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct AcutePresentation {
    #[serde(skip)]
    pub x: FiniteElement,
    pub lambda: LatticeVec,
    #[serde(skip)]
    pub y: FiniteElement,
}

/// Root datum, finite Weyl group and (lazily) its quantum Bruhat graph.
#[derive(Debug)]
pub struct AffineWeylGroup {
    pub datum: RootDatum,
    pub finite: WeylGroup,
    qbg: OnceLock<QuantumBruhatGraph>,
}

impl AffineWeylGroup {
    pub fn new(datum: RootDatum) -> Result<Self> {
        let finite = WeylGroup::new(&datum)?;
        Ok(AffineWeylGroup { datum, finite, qbg: OnceLock::new() })
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::new(RootDatum::preset(name)?)
    }

    pub fn qbg(&self) -> &QuantumBruhatGraph {
        self.qbg.get_or_init(|| QuantumBruhatGraph::new(&self.datum, &self.finite))
    }

    pub fn dim(&self) -> usize {
        self.datum.dim()
    }

    pub fn identity(&self) -> AffineElement {
        AffineElement { translation: LatticeVec::zero(self.dim()), finite: FiniteElement::IDENTITY }
    }

    pub fn translation(&self, lambda: LatticeVec) -> AffineElement {
        AffineElement { translation: lambda, finite: FiniteElement::IDENTITY }
    }

    pub fn from_finite(&self, z: FiniteElement) -> AffineElement {
        AffineElement { translation: LatticeVec::zero(self.dim()), finite: z }
    }

    /// `(t^λ z)(t^μ y) = t^{λ + z(μ)} zy`.
    pub fn mul(&self, a: &AffineElement, b: &AffineElement) -> AffineElement {
        AffineElement {
            translation: a.translation + self.finite.apply(a.finite, &b.translation),
            finite: self.finite.multiply(a.finite, b.finite),
        }
    }

    pub fn inv(&self, a: &AffineElement) -> AffineElement {
        let zi = self.finite.invert(a.finite);
        AffineElement { translation: -self.finite.apply(zi, &a.translation), finite: zi }
    }

    /// `w(α, k) = (z(α), k − ⟨λ, z(α)⟩)`.
    pub fn act(&self, w: &AffineElement, a: AffineRoot) -> AffineRoot {
        let zr = self.finite.act_root(w.finite, a.root as usize);
        AffineRoot::new(zr, a.level - self.datum.pair_with_root(&w.translation, zr))
    }

    pub fn length(&self, w: &AffineElement) -> u32 {
        let zi = self.finite.invert(w.finite);
        (0..self.datum.num_positive())
            .map(|r| {
                let d = !self.finite.is_positive_root(self.finite.act_root(zi, r)) as i32;
                (self.datum.pair_with_root(&w.translation, r) - d).unsigned_abs()
            })
            .sum()
    }

    /// Positive affine roots sent to negative ones.
    pub fn inversions(&self, w: &AffineElement) -> Vec<AffineRoot> {
        let mut out = Vec::new();
        for r in 0..self.datum.num_roots() {
            let zr = self.finite.act_root(w.finite, r);
            let p = self.datum.pair_with_root(&w.translation, zr);
            let kmin = if self.datum.is_positive_root(r) { 0 } else { 1 };
            let kmax = if self.datum.is_positive_root(zr) { p - 1 } else { p };
            for k in kmin..=kmax {
                out.push(AffineRoot::new(r, k));
            }
        }
        out
    }

    /// `s_(α,k) = s_α t^{kα^vee} = t^{−kα^vee} s_α` for any affine root.
    pub fn reflection(&self, a: AffineRoot) -> AffineElement {
        let r = a.root as usize;
        AffineElement { translation: self.datum.coroot(r).scale(-a.level), finite: self.finite.reflection(r) }
    }

    /// The simple reflection of affine node `i`.
    pub fn simple_reflection(&self, node: usize) -> AffineElement {
        self.reflection(self.datum.simple_affine()[node].root)
    }

    /// Like [`Self::simple_reflection`] but keyed by the root, rejecting non-simple input.
    pub fn simple_reflection_of(&self, a: AffineRoot) -> Result<AffineElement> {
        match self.datum.simple_affine_index(a) {
            Some(i) => Ok(self.simple_reflection(i)),
            None => input(format!("{} is not a simple affine root", self.datum.affine_root_name(a))),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.datum.simple_affine().len()
    }

    fn node_root(&self, i: usize) -> AffineRoot {
        self.datum.simple_affine()[i].root
    }

    /// `w s_i < w`.
    pub fn has_right_descent(&self, w: &AffineElement, node: usize) -> bool {
        !self.datum.is_positive(self.act(w, self.node_root(node)))
    }

    /// `s_i w < w`.
    pub fn has_left_descent(&self, w: &AffineElement, node: usize) -> bool {
        self.has_right_descent(&self.inv(w), node)
    }

    /// All `(w s_ã, ã)` with `ℓ(w s_ã) = ℓ(w) − 1`.
    pub fn covers_down(&self, w: &AffineElement) -> Vec<(AffineElement, AffineRoot)> {
        let l = self.length(w);
        self.inversions(w)
            .into_iter()
            .filter_map(|a| {
                let v = self.mul(w, &self.reflection(a));
                (self.length(&v) + 1 == l).then_some((v, a))
            })
            .collect()
    }

    /// Bruhat order, decided with the lifting property along right descents of `w`.
    pub fn bruhat_leq(&self, u: &AffineElement, w: &AffineElement) -> bool {
        let mut u = *u;
        let mut w = *w;
        let mut lu = self.length(&u);
        let mut lw = self.length(&w);
        loop {
            if lu > lw {
                return false;
            }
            if lw == 0 {
                return u == w;
            }
            let i =
                (0..self.num_nodes()).find(|&i| self.has_right_descent(&w, i)).expect("positive length has a descent");
            let s = self.simple_reflection(i);
            if self.has_right_descent(&u, i) {
                u = self.mul(&u, &s);
                lu -= 1;
            }
            w = self.mul(&w, &s);
            lw -= 1;
        }
    }

    /// Bruhat order by downward search through covers (slow reference).
    pub fn bruhat_leq_by_covers(&self, u: &AffineElement, w: &AffineElement) -> bool {
        let lu = self.length(u);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([*w]);
        while let Some(v) = queue.pop_front() {
            if v == *u {
                return true;
            }
            if self.length(&v) <= lu {
                continue;
            }
            for (c, _) in self.covers_down(&v) {
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        false
    }

    /// `w ∈ W̃^K`: `w(ã) > 0` for all `ã ∈ K` (node indices).
    pub fn is_min_rep_k(&self, w: &AffineElement, k: &[usize]) -> bool {
        k.iter().all(|&i| !self.has_right_descent(w, i))
    }

    /// The length-zero element of `W_aff · w`, by greedy left descent.
    pub fn length_zero_rep(&self, w: &AffineElement) -> AffineElement {
        let mut w = *w;
        while let Some(i) = (0..self.num_nodes()).find(|&i| self.has_left_descent(&w, i)) {
            w = self.mul(&self.simple_reflection(i), &w);
        }
        w
    }

    /// `w = τ s_{i1} ⋯ s_{iℓ}` with the lexicographically least reduced word.
    pub fn decompose(&self, w: &AffineElement) -> (AffineElement, Vec<usize>) {
        let tau = self.length_zero_rep(w);
        let mut v = self.mul(&self.inv(&tau), w);
        let mut word = Vec::new();
        while let Some(i) = (0..self.num_nodes()).find(|&i| self.has_left_descent(&v, i)) {
            word.push(i);
            v = self.mul(&self.simple_reflection(i), &v);
        }
        debug_assert_eq!(v, self.identity());
        (tau, word)
    }

    pub fn letters_string(&self, word: &[usize]) -> String {
        word.iter().map(|&i| format!("s{}", self.datum.simple_affine()[i].name)).collect::<Vec<_>>().join(" ")
    }

    /// Word part of [`Self::decompose`] as "s0 s2".
    pub fn word_string(&self, w: &AffineElement) -> String {
        self.letters_string(&self.decompose(w).1)
    }

    /// "tau s0 s2" when the length-zero part is nontrivial, "1" for the identity.
    pub fn element_name(&self, w: &AffineElement) -> String {
        let (tau, word) = self.decompose(w);
        let mut parts = Vec::new();
        if tau != self.identity() {
            parts.push("tau".to_string());
        }
        if !word.is_empty() {
            parts.push(self.letters_string(&word));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    /// "t^(0,1,0) s1" style rendering.
    pub fn translation_name(&self, w: &AffineElement) -> String {
        let z = self.finite.word_string(w.finite);
        if z.is_empty() {
            format!("t^{}", w.translation)
        } else {
            format!("t^{} {}", w.translation, z)
        }
    }

    /// Permutation `π` of affine nodes with `τ s_i τ⁻¹ = s_{π(i)}`, for `ℓ(τ) = 0`.
    pub fn length_zero_permutation(&self, tau: &AffineElement) -> Result<Vec<usize>> {
        if self.length(tau) != 0 {
            return input("length_zero_permutation needs a length-zero element");
        }
        (0..self.num_nodes())
            .map(|i| {
                let img = self.act(tau, self.node_root(i));
                self.datum
                    .simple_affine_index(img)
                    .map_or_else(|| property("length-zero element does not permute simple roots"), Ok)
            })
            .collect()
    }

    /// Coxeter matrix of the affine Dynkin diagram; 0 encodes `m = ∞`.
    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.num_nodes();
        let roots: Vec<usize> = (0..n).map(|i| self.node_root(i).root as usize).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            return 1;
                        }
                        let p = self.datum.pair_roots(roots[i], roots[j]) * self.datum.pair_roots(roots[j], roots[i]);
                        match p {
                            0 => 2,
                            1 => 3,
                            2 => 4,
                            3 => 6,
                            _ => 0,
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `δ⁻(x(α)) + ⟨λ,α⟩ − δ⁻(y⁻¹(α)) ≥ 0` for every positive root.
    pub fn is_acute(&self, x: FiniteElement, lambda: &LatticeVec, y: FiniteElement) -> bool {
        let yi = self.finite.invert(y);
        (0..self.datum.num_positive()).all(|r| {
            let dx = !self.finite.is_positive_root(self.finite.act_root(x, r)) as i32;
            let dy = !self.finite.is_positive_root(self.finite.act_root(yi, r)) as i32;
            dx + self.datum.pair_with_root(lambda, r) - dy >= 0
        })
    }

    /// `x t^λ y = t^{x(λ)} xy`.
    pub fn element_of(&self, p: &AcutePresentation) -> AffineElement {
        AffineElement { translation: self.finite.apply(p.x, &p.lambda), finite: self.finite.multiply(p.x, p.y) }
    }

    /// All acute presentations, one candidate per `y ∈ W₀`.
    pub fn acute_presentations(&self, w: &AffineElement) -> Vec<AcutePresentation> {
        self.finite
            .elements()
            .filter_map(|y| {
                let x = self.finite.multiply(w.finite, self.finite.invert(y));
                let lambda = self.finite.apply(self.finite.invert(x), &w.translation);
                self.is_acute(x, &lambda, y).then_some(AcutePresentation { x, lambda, y })
            })
            .collect()
    }

    /// An acute presentation with `y(α) < 0` for every `(α,k) ∈ K`.
    pub fn acute_presentation_k(&self, w: &AffineElement, k: &[usize]) -> Result<AcutePresentation> {
        if !self.is_min_rep_k(w, k) {
            return input("acute_presentation_k: element is not a minimal K-representative");
        }
        self.acute_presentations_k(w, k)
            .into_iter()
            .next()
            .map_or_else(|| property("no K-compatible acute presentation exists"), Ok)
    }

    pub fn acute_presentations_k(&self, w: &AffineElement, k: &[usize]) -> Vec<AcutePresentation> {
        self.acute_presentations(w)
            .into_iter()
            .filter(|p| {
                k.iter().all(|&i| {
                    let r = self.node_root(i).root as usize;
                    !self.finite.is_positive_root(self.finite.act_root(p.y, r))
                })
            })
            .collect()
    }

    /// `w ≤ w′` through the quantum Bruhat graph weight criterion, iterating
    /// over every factorization `w′ = x′ t^{λ′} y′`.
    pub fn bruhat_leq_via_wt(&self, p: &AcutePresentation, w2: &AffineElement) -> bool {
        let g = self.qbg();
        let yi = self.finite.invert(p.y);
        self.finite.elements().any(|x2| {
            let x2i = self.finite.invert(x2);
            let lambda2 = self.finite.apply(x2i, &w2.translation);
            let y2 = self.finite.multiply(x2i, w2.finite);
            let lhs = g.wt(p.x, x2) + g.wt(self.finite.invert(y2), yi);
            self.datum.in_coroot_cone(&(lambda2 - p.lambda - lhs))
        })
    }

    /// Elements of the coset `W_aff τ` of length at most `max_len`, by breadth-first search.
    pub fn ball(&self, tau: &AffineElement, max_len: u32) -> Vec<AffineElement> {
        let mut seen = HashSet::from([*tau]);
        let mut out = vec![*tau];
        let mut head = 0;
        while head < out.len() {
            let w = out[head];
            head += 1;
            let l = self.length(&w);
            if l >= max_len {
                continue;
            }
            for i in 0..self.num_nodes() {
                let v = self.mul(&w, &self.simple_reflection(i));
                if self.length(&v) == l + 1 && seen.insert(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// The length-zero subgroup; only finite for semisimple data.
    pub fn length_zero_elements(&self) -> Result<Vec<AffineElement>> {
        if !self.datum.is_semisimple() {
            return input("the length-zero subgroup is infinite for non-semisimple data");
        }
        let gens: Vec<AffineElement> =
            (0..self.dim()).map(|i| self.length_zero_rep(&self.translation(LatticeVec::unit(self.dim(), i)))).collect();
        let mut out = vec![self.identity()];
        let mut head = 0;
        while head < out.len() {
            for g in &gens {
                let v = self.mul(&out[head], g);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            head += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{}·{}", self.translation, self.finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i32]) -> LatticeVec {
        LatticeVec::from_slice(x)
    }

    #[test]
    fn a1_basics() {
        let g = AffineWeylGroup::preset("A1").unwrap();
        let av = g.datum.coroot(0);
        let t = g.translation(av);
        assert_eq!(g.act(&t, AffineRoot::new(0, 0)), AffineRoot::new(0, -2));
        assert_eq!(g.length(&t), 2);
        assert_eq!(g.length(&g.identity()), 0);
        // s0 = t^{α^vee} s_α.
        let s0 = g.simple_reflection(0);
        assert_eq!(s0, AffineElement { translation: av, finite: g.finite.simple(0) });
        assert_eq!(g.length(&s0), 1);
        assert_eq!(g.mul(&s0, &s0), g.identity());
        assert!(g.bruhat_leq(&s0, &t));
        // K = {(α,0)}: s1 is not minimal, s0 is.
        assert!(!g.is_min_rep_k(&g.simple_reflection(1), &[1]));
        assert!(g.is_min_rep_k(&s0, &[1]));
        // covers of t^{-α^vee} = s1 s0.
        let tm = g.translation(-av);
        let covers = g.covers_down(&tm);
        assert_eq!(covers.len(), 2);
        assert!(covers.contains(&(s0, AffineRoot::new(1, 2))));
        assert!(covers.iter().any(|(c, _)| *c == g.simple_reflection(1)));
        let p = g.acute_presentation_k(&s0, &[1]).unwrap();
        assert_eq!(p.y, g.finite.simple(0));
    }

    #[test]
    fn gl3_example() {
        let g = AffineWeylGroup::preset("GL3").unwrap();
        let f = &g.finite;
        let (s1, s2) = (g.from_finite(f.simple(0)), g.from_finite(f.simple(1)));
        let s0 = g.simple_reflection(0);
        assert_eq!(s0, g.mul(&g.translation(v(&[1, 0, -1])), &g.from_finite(f.parse_word("s1 s2 s1").unwrap())));
        let tau = g.mul(&g.mul(&s1, &s2), &g.translation(v(&[0, 0, 1])));
        assert_eq!(g.length(&tau), 0);
        assert_eq!(g.length_zero_rep(&g.translation(v(&[1, 0, 0]))), tau);
        assert!(g.datum.is_positive(g.act(&tau, AffineRoot::new(0, 0))));
        let t010 = g.translation(v(&[0, 1, 0]));
        let t001 = g.translation(v(&[0, 0, 1]));
        assert_eq!(g.length(&t010), 2);
        let tau_s0 = g.mul(&tau, &s0);
        let tau_s2 = g.mul(&tau, &s2);
        assert_eq!(t010, g.mul(&tau_s0, &s2));
        assert_eq!(t001, g.mul(&g.mul(&tau, &s1), &s0));
        assert_eq!(tau_s2, g.mul(&s1, &t010));
        assert_eq!(tau_s0, g.mul(&s2, &t001));
        let mut covers = g.covers_down(&t010);
        covers.sort();
        let a1m = AffineRoot::new(g.datum.neg_root(0), 1);
        let a2 = AffineRoot::new(1, 0);
        let mut expect = vec![(tau_s2, a1m), (tau_s0, a2)];
        expect.sort();
        assert_eq!(covers, expect);
        assert!(g.bruhat_leq(&tau_s2, &t010));
        assert!(!g.bruhat_leq(&tau_s2, &t001));
        assert!(!g.is_min_rep_k(&g.translation(v(&[1, 0, 0])), &[1]));
        assert!(g.is_min_rep_k(&t010, &[1]));
        assert_eq!(g.acute_presentations(&t010).len(), 2);
        let p = g.acute_presentation_k(&tau, &[1]).unwrap();
        assert!(!f.is_positive_root(f.act_root(p.y, 0)));
        let p2 = g.acute_presentations(&tau_s2)[0];
        assert!(g.bruhat_leq_via_wt(&p2, &t010));
        assert!(!g.bruhat_leq_via_wt(&p2, &t001));
        assert_eq!(g.element_name(&t010), "tau s0 s2");
        assert_eq!(g.element_name(&t001), "tau s1 s0");
    }

    #[test]
    fn gl2_length_zero() {
        let g = AffineWeylGroup::preset("GL2").unwrap();
        let tau = g.length_zero_rep(&g.translation(v(&[1, 0])));
        assert_eq!(g.length(&tau), 0);
        assert_ne!(tau, g.identity());
    }

    #[test]
    fn length_formula_matches_inversions() {
        for name in ["A2", "B2", "G2", "A1xA1", "A2-adjoint"] {
            let g = AffineWeylGroup::preset(name).unwrap();
            for tau in g.length_zero_elements().unwrap() {
                for w in g.ball(&tau, 5) {
                    assert_eq!(g.length(&w) as usize, g.inversions(&w).len(), "{name}");
                }
            }
        }
    }
}
