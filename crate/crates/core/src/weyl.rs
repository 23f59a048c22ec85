//! The finite Weyl group `W₀` as a precomputed table.
//!
//! Elements are indices into the table, sorted by length and then by their
//! canonical (lexicographically least reduced) word. The table stores the
//! action on `X_*`, the permutation of roots, lengths, multiplication,
//! inverses and the Bruhat order as down-set bitsets.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{input, property, Error, Result};
use crate::rootdata::{LatticeVec, RootDatum};

/// Handle for an element of `W₀`; index 0 is the identity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FiniteElement(pub u32);

impl FiniteElement {
    pub const IDENTITY: FiniteElement = FiniteElement(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    dim: usize,
    nroots: usize,
    npos: usize,
    rank: usize,
    matrices: Vec<Vec<i32>>,
    perms: Vec<Vec<u16>>,
    lengths: Vec<u32>,
    words: Vec<Vec<u8>>,
    mult: Vec<u32>,
    inv: Vec<u32>,
    /// `reflections[r]` is `s_α` for positive root `r`.
    reflections: Vec<u32>,
    below: Vec<FixedBitSet>,
}

impl WeylGroup {
    pub fn new(rd: &RootDatum) -> Result<WeylGroup> {
        let dim = rd.dim();
        let rank = rd.rank();
        let nroots = rd.num_roots();
        let npos = rd.num_positive();

        // Simple reflections on X_*: v ↦ v − ⟨v, α_i⟩ α_i^vee, as columns.
        let simple_mats: Vec<Vec<i32>> = (0..rank)
            .map(|i| {
                let mut m = vec![0; dim * dim];
                for c in 0..dim {
                    let e = LatticeVec::unit(dim, c);
                    let img = e - rd.simple_coroot(i).scale(e.dot(&rd.simple_root(i)));
                    for r in 0..dim {
                        m[r * dim + c] = img.get(r);
                    }
                }
                m
            })
            .collect();
        let simple_perms: Vec<Vec<u16>> =
            (0..rank).map(|i| (0..nroots).map(|b| rd.reflect_root(i, b) as u16).collect()).collect();

        let matmul = |a: &[i32], b: &[i32]| -> Vec<i32> {
            let mut out = vec![0; dim * dim];
            for r in 0..dim {
                for c in 0..dim {
                    out[r * dim + c] = (0..dim).map(|k| a[r * dim + k] * b[k * dim + c]).sum();
                }
            }
            out
        };

        let mut id = vec![0; dim * dim];
        for r in 0..dim {
            id[r * dim + r] = 1;
        }
        let mut matrices = vec![id];
        let mut perms: Vec<Vec<u16>> = vec![(0..nroots as u16).collect()];
        let mut seen: HashMap<Vec<i32>, usize> = HashMap::new();
        seen.insert(matrices[0].clone(), 0);
        let mut head = 0;
        while head < matrices.len() {
            for i in 0..rank {
                let m = matmul(&matrices[head], &simple_mats[i]);
                if !seen.contains_key(&m) {
                    let p: Vec<u16> = (0..nroots).map(|b| perms[head][simple_perms[i][b] as usize]).collect();
                    seen.insert(m.clone(), matrices.len());
                    matrices.push(m);
                    perms.push(p);
                    if matrices.len() > 100_000 {
                        return input("Weyl group too large");
                    }
                }
            }
            head += 1;
        }
        let n = matrices.len();
        let lengths: Vec<u32> =
            perms.iter().map(|p| (0..npos).filter(|&b| p[b] as usize >= npos).count() as u32).collect();

        // Canonical words by greedy smallest left descent: s_i w < w iff w^{-1}(α_i) < 0,
        // equivalently w maps some positive root to -α_i.
        let by_perm: HashMap<Vec<u16>, usize> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let compose = |a: &[u16], b: &[u16]| -> Vec<u16> { b.iter().map(|&x| a[x as usize]).collect() };
        let mut words: Vec<Vec<u8>> = vec![Vec::new(); n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| lengths[i]);
        for &w in &order {
            if lengths[w] == 0 {
                continue;
            }
            let i = (0..rank)
                .find(|&i| {
                    let p = compose(&simple_perms[i], &perms[w]);
                    lengths[by_perm[&p]] < lengths[w]
                })
                .expect("nontrivial element has a left descent");
            let rest = by_perm[&compose(&simple_perms[i], &perms[w])];
            let mut word = vec![i as u8];
            word.extend_from_slice(&words[rest]);
            words[w] = word;
        }

        // Re-index by (length, word).
        let mut perm_order: Vec<usize> = (0..n).collect();
        perm_order.sort_by(|&a, &b| lengths[a].cmp(&lengths[b]).then_with(|| words[a].cmp(&words[b])));
        let mut new_index = vec![0u32; n];
        for (new, &old) in perm_order.iter().enumerate() {
            new_index[old] = new as u32;
        }
        let matrices: Vec<Vec<i32>> = perm_order.iter().map(|&o| matrices[o].clone()).collect();
        let perms: Vec<Vec<u16>> = perm_order.iter().map(|&o| perms[o].clone()).collect();
        let lengths: Vec<u32> = perm_order.iter().map(|&o| lengths[o]).collect();
        let words: Vec<Vec<u8>> = perm_order.iter().map(|&o| words[o].clone()).collect();
        let by_perm: HashMap<Vec<u16>, u32> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();

        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mult[a * n + b] = by_perm[&compose(&perms[a], &perms[b])];
            }
        }
        let inv: Vec<u32> =
            (0..n).map(|a| (0..n).find(|&b| mult[a * n + b] == 0).expect("inverse exists") as u32).collect();

        let reflections: Vec<u32> = (0..npos)
            .map(|r| {
                let p: Vec<u16> = (0..nroots).map(|b| rd.reflect_root(r, b) as u16).collect();
                by_perm[&p]
            })
            .collect();

        let mut wg = WeylGroup {
            dim,
            nroots,
            npos,
            rank,
            matrices,
            perms,
            lengths,
            words,
            mult,
            inv,
            reflections,
            below: Vec::new(),
        };
        wg.below = wg.compute_below();
        wg.check_words()?;
        Ok(wg)
    }

    fn compute_below(&self) -> Vec<FixedBitSet> {
        let n = self.order();
        let mut below: Vec<FixedBitSet> = Vec::with_capacity(n);
        for v in 0..n {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(v);
            for c in self.covers_down(FiniteElement(v as u32)) {
                set.union_with(&below[c.index()]);
            }
            below.push(set);
        }
        below
    }

    fn check_words(&self) -> Result<()> {
        for w in self.elements() {
            let word = &self.words[w.index()];
            if word.len() != self.length(w) as usize || self.from_word(word) != w {
                return property("canonical word does not multiply to its element");
            }
        }
        Ok(())
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.lengths.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn elements(&self) -> impl Iterator<Item = FiniteElement> + '_ {
        (0..self.order() as u32).map(FiniteElement)
    }

    pub fn identity(&self) -> FiniteElement {
        FiniteElement::IDENTITY
    }

    pub fn multiply(&self, u: FiniteElement, v: FiniteElement) -> FiniteElement {
        FiniteElement(self.mult[u.index() * self.order() + v.index()])
    }

    pub fn invert(&self, u: FiniteElement) -> FiniteElement {
        FiniteElement(self.inv[u.index()])
    }

    pub fn length(&self, u: FiniteElement) -> u32 {
        self.lengths[u.index()]
    }

    pub fn simple(&self, i: usize) -> FiniteElement {
        FiniteElement(self.reflections[i])
    }

    /// `s_α` for a root index (either sign).
    pub fn reflection(&self, r: usize) -> FiniteElement {
        FiniteElement(self.reflections[r % self.npos])
    }

    /// Linear action on `X_*`.
    pub fn apply(&self, u: FiniteElement, v: &LatticeVec) -> LatticeVec {
        let m = &self.matrices[u.index()];
        let d = self.dim;
        let mut out = LatticeVec::zero(d);
        for r in 0..d {
            out.set(r, (0..d).map(|c| m[r * d + c] * v.get(c)).sum());
        }
        out
    }

    /// Contragredient action on `X^*`.
    pub fn apply_weight(&self, u: FiniteElement, v: &LatticeVec) -> LatticeVec {
        let m = &self.matrices[self.invert(u).index()];
        let d = self.dim;
        let mut out = LatticeVec::zero(d);
        for r in 0..d {
            out.set(r, (0..d).map(|c| m[c * d + r] * v.get(c)).sum());
        }
        out
    }

    /// Image of root index `r`.
    pub fn act_root(&self, u: FiniteElement, r: usize) -> usize {
        self.perms[u.index()][r] as usize
    }

    pub fn is_positive_root(&self, r: usize) -> bool {
        r < self.npos
    }

    pub fn num_roots(&self) -> usize {
        self.nroots
    }

    pub fn matrix(&self, u: FiniteElement) -> &[i32] {
        &self.matrices[u.index()]
    }

    pub fn word(&self, u: FiniteElement) -> &[u8] {
        &self.words[u.index()]
    }

    pub fn from_word(&self, word: &[u8]) -> FiniteElement {
        word.iter().fold(self.identity(), |acc, &i| self.multiply(acc, self.simple(i as usize)))
    }

    /// Renders an element as "s1 s2 s1" (empty string for the identity).
    pub fn word_string(&self, u: FiniteElement) -> String {
        self.word(u).iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(" ")
    }

    /// Parses "s1 s2", "1" or "" into an element.
    pub fn parse_word(&self, s: &str) -> Result<FiniteElement> {
        let mut w = self.identity();
        for tok in s.split([' ', ',', '*']).filter(|t| !t.is_empty()) {
            if tok == "1" || tok == "e" || tok == "id" {
                continue;
            }
            let idx: usize = tok
                .strip_prefix('s')
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Input(format!("bad letter {tok:?} in word {s:?}")))?;
            if idx == 0 || idx > self.rank {
                return input(format!("letter {tok} out of range"));
            }
            w = self.multiply(w, self.simple(idx - 1));
        }
        Ok(w)
    }

    /// Right descent: `u s_i < u`.
    pub fn has_right_descent(&self, u: FiniteElement, i: usize) -> bool {
        !self.is_positive_root(self.act_root(u, i))
    }

    /// Elements `u s_β` with `ℓ(u s_β) = ℓ(u) − 1`.
    pub fn covers_down(&self, u: FiniteElement) -> Vec<FiniteElement> {
        let l = self.length(u);
        (0..self.npos).map(|r| self.multiply(u, self.reflection(r))).filter(|&v| self.length(v) + 1 == l).collect()
    }

    pub fn bruhat_leq_finite(&self, u: FiniteElement, v: FiniteElement) -> bool {
        self.below[v.index()].contains(u.index())
    }

    /// Inclusive down-set of `v` in Bruhat order.
    pub fn bruhat_below(&self, v: FiniteElement) -> &FixedBitSet {
        &self.below[v.index()]
    }

    /// Elements of the parabolic subgroup `W_P`.
    pub fn parabolic(&self, subset: &[usize]) -> Vec<FiniteElement> {
        let mut out = vec![self.identity()];
        let mut head = 0;
        while head < out.len() {
            for &i in subset {
                let w = self.multiply(out[head], self.simple(i));
                if !out.contains(&w) {
                    out.push(w);
                }
            }
            head += 1;
        }
        out.sort();
        out
    }

    /// Subgroup generated by arbitrary elements.
    pub fn generated(&self, gens: &[FiniteElement]) -> Vec<FiniteElement> {
        let mut out = vec![self.identity()];
        let mut seen = FixedBitSet::with_capacity(self.order());
        seen.insert(0);
        let mut head = 0;
        while head < out.len() {
            for &g in gens {
                let w = self.multiply(out[head], g);
                if !seen.contains(w.index()) {
                    seen.insert(w.index());
                    out.push(w);
                }
            }
            head += 1;
        }
        out.sort();
        out
    }

    pub fn longest_element(&self, subset: &[usize]) -> FiniteElement {
        self.parabolic(subset).into_iter().max_by_key(|&w| self.length(w)).expect("subgroup is nonempty")
    }

    /// `w` is minimal in `w W_J`.
    pub fn is_min_coset_rep(&self, w: FiniteElement, j: &[usize]) -> bool {
        j.iter().all(|&i| !self.has_right_descent(w, i))
    }

    pub fn min_coset_reps(&self, j: &[usize]) -> Vec<FiniteElement> {
        self.elements().filter(|&w| self.is_min_coset_rep(w, j)).collect()
    }

    /// The minimal representative of `w W_J`.
    pub fn min_rep(&self, mut w: FiniteElement, j: &[usize]) -> FiniteElement {
        while let Some(&i) = j.iter().find(|&&i| self.has_right_descent(w, i)) {
            w = self.multiply(w, self.simple(i));
        }
        w
    }

    /// The unique maximal element of `W_P · base` lying below `bound`.
    pub fn max_deodhar_lift(&self, base: FiniteElement, p: &[usize], bound: FiniteElement) -> Result<FiniteElement> {
        if !self.bruhat_leq_finite(base, bound) {
            return input("max_deodhar_lift: base is not below bound");
        }
        let cands: Vec<FiniteElement> = self
            .parabolic(p)
            .into_iter()
            .map(|u| self.multiply(u, base))
            .filter(|&x| self.bruhat_leq_finite(x, bound))
            .collect();
        let top = *cands.iter().max_by_key(|&&x| self.length(x)).expect("base is a candidate");
        if cands.iter().all(|&x| self.bruhat_leq_finite(x, top)) {
            Ok(top)
        } else {
            property("Deodhar lift has no unique maximum")
        }
    }
}

impl fmt::Display for FiniteElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}
