//! Graded posets with labelled covers: dual EL verification, recursive
//! coatom orderings and Görtz's N-Cohen-Macaulay recursion.
//!
//! Labels are positions in a total order (`u32`); smaller is earlier.
//! Chains are read from the top down.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::AdmissiblePoset;
use crate::error::{input, property, Result};
use crate::weyl::FiniteElement;

/// A violation together with the indices of its interval endpoints.
type Found = (usize, usize, Violation);

/// Chains listed per violation are capped at this many.
pub const CHAIN_LIMIT: usize = 50;

#[derive(Clone, Debug)]
pub struct LabeledPoset {
    names: Vec<String>,
    down: Vec<Vec<(usize, u32)>>,
    up: Vec<Vec<(usize, u32)>>,
    grade: Vec<u32>,
    label_names: Vec<String>,
    top: usize,
    bottom: usize,
    below: Vec<FixedBitSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub w: String,
    pub w_prime: String,
    /// Number of label-increasing maximal chains, saturated at 2.
    pub increasing_chains: u8,
    pub lexmin_is_increasing: bool,
    pub chains: Vec<Vec<String>>,
    pub chains_truncated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualElReport {
    pub status: &'static str,
    pub intervals_checked: usize,
    pub violations: Vec<Violation>,
}

impl DualElReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoatomReport {
    pub ok: bool,
    /// Coatoms of the whole poset in the certified order.
    pub ordering: Vec<usize>,
    pub failure: Option<String>,
}

impl LabeledPoset {
    /// `down[i]` lists `(lower, label)` for the covers below element `i`.
    pub fn new(names: Vec<String>, down: Vec<Vec<(usize, u32)>>, label_names: Vec<String>) -> Result<Self> {
        let n = names.len();
        if down.len() != n || n == 0 {
            return input("poset needs one cover list per element");
        }
        let mut up = vec![Vec::new(); n];
        for (i, cs) in down.iter().enumerate() {
            for &(c, l) in cs {
                if c >= n || c == i {
                    return input(format!("bad cover {i} -> {c}"));
                }
                if l as usize >= label_names.len() {
                    return input(format!("label {l} has no name"));
                }
                up[c].push((i, l));
            }
        }
        let tops: Vec<usize> = (0..n).filter(|&i| up[i].is_empty()).collect();
        let bottoms: Vec<usize> = (0..n).filter(|&i| down[i].is_empty()).collect();
        if tops.len() != 1 || bottoms.len() != 1 {
            return input("poset must have a unique maximum and a unique minimum");
        }
        let (top, bottom) = (tops[0], bottoms[0]);
        // Kahn's algorithm upward from the bottom assigns grades.
        let mut pending: Vec<usize> = down.iter().map(|d| d.len()).collect();
        let mut grade = vec![u32::MAX; n];
        grade[bottom] = 0;
        let mut order = vec![bottom];
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for &(u, _) in &up[c] {
                if grade[u] == u32::MAX {
                    grade[u] = grade[c] + 1;
                } else if grade[u] != grade[c] + 1 {
                    return input("poset is not graded");
                }
                pending[u] -= 1;
                if pending[u] == 0 {
                    order.push(u);
                }
            }
        }
        if order.len() != n {
            return input("cover relation has a cycle");
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &i in &order {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(i);
            for &(c, _) in &down[i] {
                b.union_with(&below[c]);
            }
            below[i] = b;
        }
        Ok(LabeledPoset { names, down, up, grade, label_names, top, bottom, below })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn grade(&self, i: usize) -> u32 {
        self.grade[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn label_name(&self, l: u32) -> &str {
        &self.label_names[l as usize]
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn covers_down(&self, i: usize) -> &[(usize, u32)] {
        &self.down[i]
    }

    pub fn covers_up(&self, i: usize) -> &[(usize, u32)] {
        &self.up[i]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    pub fn label(&self, upper: usize, lower: usize) -> Option<u32> {
        self.down[upper].iter().find(|&&(c, _)| c == lower).map(|&(_, l)| l)
    }

    /// Coatoms sorted by the label of their edge to the top.
    pub fn coatoms(&self) -> Vec<usize> {
        let mut cs = self.down[self.top].clone();
        cs.sort_by_key(|&(c, l)| (l, c));
        cs.into_iter().map(|(c, _)| c).collect()
    }

    /// The poset on `⋃ [0̂, c] ⊔ {1̂}` for the given coatoms, with inherited labels.
    pub fn ideal_restriction(&self, coatoms: &[usize]) -> Result<LabeledPoset> {
        if coatoms.is_empty() {
            return input("ideal restriction needs at least one maximal element");
        }
        let mut keep = FixedBitSet::with_capacity(self.len());
        for &c in coatoms {
            if self.label(self.top, c).is_none() {
                return input(format!("{} is not a coatom", self.names[c]));
            }
            keep.union_with(&self.below[c]);
        }
        keep.insert(self.top);
        let new_index: HashMap<usize, usize> = keep.ones().enumerate().map(|(i, o)| (o, i)).collect();
        let names = keep.ones().map(|o| self.names[o].clone()).collect();
        let down = keep
            .ones()
            .map(|o| {
                self.down[o]
                    .iter()
                    .filter(|(c, _)| o != self.top || coatoms.contains(c))
                    .filter_map(|&(c, l)| new_index.get(&c).map(|&nc| (nc, l)))
                    .collect()
            })
            .collect();
        LabeledPoset::new(names, down, self.label_names.clone())
    }

    fn words(&self, chain: &[usize]) -> Vec<String> {
        chain.windows(2).map(|w| self.label_name(self.label(w[0], w[1]).expect("cover")).to_string()).collect()
    }

    /// Maximal chains of `[lo, hi]` from `hi` down, at most `limit` of them.
    pub fn maximal_chains(&self, lo: usize, hi: usize, limit: usize) -> (Vec<Vec<usize>>, bool) {
        self.chains(lo, hi, limit, false)
    }

    /// Label-increasing maximal chains of `[lo, hi]`, at most `limit` of them.
    pub fn increasing_chains(&self, lo: usize, hi: usize, limit: usize) -> Vec<Vec<usize>> {
        self.chains(lo, hi, limit, true).0
    }

    fn chains(&self, lo: usize, hi: usize, limit: usize, increasing: bool) -> (Vec<Vec<usize>>, bool) {
        let mut out = Vec::new();
        let mut cur = vec![hi];
        let mut truncated = false;
        if self.leq(lo, hi) {
            self.chains_rec(lo, 0, limit, increasing, &mut cur, &mut out, &mut truncated);
        }
        (out, truncated)
    }

    #[allow(clippy::too_many_arguments)]
    fn chains_rec(
        &self,
        lo: usize,
        min_label: u32,
        limit: usize,
        increasing: bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        truncated: &mut bool,
    ) {
        let x = *cur.last().expect("nonempty");
        if x == lo {
            if out.len() >= limit {
                *truncated = true;
            } else {
                out.push(cur.clone());
            }
            return;
        }
        for &(y, l) in &self.down[x] {
            if *truncated || !self.leq(lo, y) || (increasing && l < min_label) {
                continue;
            }
            cur.push(y);
            self.chains_rec(lo, l, limit, increasing, cur, out, truncated);
            cur.pop();
        }
    }

    /// The lexicographically least maximal chain of `[lo, hi]`.
    pub fn lexmin_chain(&self, lo: usize, hi: usize) -> Option<Vec<usize>> {
        if !self.leq(lo, hi) {
            return None;
        }
        let mut memo: HashMap<usize, (Vec<u32>, Vec<usize>)> = HashMap::new();
        Some(self.lexmin_rec(lo, hi, &mut memo).1)
    }

    fn lexmin_rec(
        &self,
        lo: usize,
        x: usize,
        memo: &mut HashMap<usize, (Vec<u32>, Vec<usize>)>,
    ) -> (Vec<u32>, Vec<usize>) {
        if x == lo {
            return (Vec::new(), vec![lo]);
        }
        if let Some(v) = memo.get(&x) {
            return v.clone();
        }
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        for &(y, l) in &self.down[x] {
            if !self.leq(lo, y) {
                continue;
            }
            let (w, c) = self.lexmin_rec(lo, y, memo);
            let mut word = vec![l];
            word.extend(w);
            if best.as_ref().is_none_or(|b| word < b.0) {
                let mut chain = vec![x];
                chain.extend(c);
                best = Some((word, chain));
            }
        }
        let best = best.expect("interval is nonempty");
        memo.insert(x, best.clone());
        best
    }

    /// Checks every interval `[w, w′]` with `w < w′`: exactly one weakly
    /// increasing maximal chain, and it is the lexicographically least.
    /// `jobs = 0` uses the global thread pool.
    pub fn verify_dual_el(&self, jobs: usize) -> DualElReport {
        let run =
            || -> Vec<(usize, Vec<Found>)> { (0..self.len()).into_par_iter().map(|b| self.verify_from(b)).collect() };
        let results = if jobs == 0 {
            run()
        } else {
            match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool.install(run),
                Err(_) => run(),
            }
        };
        let intervals_checked = results.iter().map(|r| r.0).sum();
        let mut found: Vec<Found> = results.into_iter().flat_map(|r| r.1).collect();
        found.sort_by_key(|v| (v.0, v.1));
        let violations: Vec<Violation> = found.into_iter().map(|v| v.2).collect();
        DualElReport { status: if violations.is_empty() { "PASS" } else { "FAIL" }, intervals_checked, violations }
    }

    /// All intervals with bottom `b`, by dynamic programming over the up-set.
    fn verify_from(&self, b: usize) -> (usize, Vec<Found>) {
        let mut ups: Vec<usize> = (0..self.len()).filter(|&x| self.below[x].contains(b)).collect();
        ups.sort_by_key(|&x| self.grade[x]);
        // Increasing chains to `b`, by first label (counts saturate at 2).
        let mut firsts: HashMap<usize, Vec<(u32, u8)>> = HashMap::new();
        let mut lexmin: HashMap<usize, Vec<u32>> = HashMap::new();
        lexmin.insert(b, Vec::new());
        let mut checked = 0;
        let mut violations = Vec::new();
        for &x in ups.iter().filter(|&&x| x != b) {
            let mut fx: Vec<(u32, u8)> = Vec::new();
            let mut best: Option<Vec<u32>> = None;
            for &(y, l) in &self.down[x] {
                if !self.below[y].contains(b) {
                    continue;
                }
                let count = if y == b {
                    1
                } else {
                    firsts[&y].iter().filter(|&&(f, _)| f >= l).fold(0u8, |a, &(_, c)| (a + c).min(2))
                };
                if count > 0 {
                    match fx.iter_mut().find(|(f, _)| *f == l) {
                        Some(e) => e.1 = (e.1 + count).min(2),
                        None => fx.push((l, count)),
                    }
                }
                let mut word = vec![l];
                word.extend_from_slice(&lexmin[&y]);
                if best.as_ref().is_none_or(|w| word < *w) {
                    best = Some(word);
                }
            }
            let best = best.expect("x > b has a cover above b");
            let total = fx.iter().fold(0u8, |a, &(_, c)| (a + c).min(2));
            let increasing = best.windows(2).all(|w| w[0] <= w[1]);
            checked += 1;
            if total != 1 || !increasing {
                let (chains, truncated) = self.maximal_chains(b, x, CHAIN_LIMIT);
                violations.push((
                    b,
                    x,
                    Violation {
                        w: self.names[b].clone(),
                        w_prime: self.names[x].clone(),
                        increasing_chains: total,
                        lexmin_is_increasing: increasing,
                        chains: chains.iter().map(|c| self.words(c)).collect(),
                        chains_truncated: truncated,
                    },
                ));
            }
            firsts.insert(x, fx);
            lexmin.insert(x, best);
        }
        (checked, violations)
    }

    /// The chain `1̂ ⋗ coatom ⋗ ⋯ ⋗ w` built from the unique increasing chain
    /// of `[w, coatom]`, checked against the unique increasing chain of `[w, 1̂]`.
    pub fn distinguished_chain(&self, w: usize, coatom: usize) -> Result<Vec<usize>> {
        if self.label(self.top, coatom).is_none() {
            return input("distinguished_chain: not a coatom");
        }
        if w == self.top {
            return input("distinguished_chain: w must lie below the top");
        }
        let inner = self.increasing_chains(w, coatom, 2);
        if inner.len() != 1 {
            return property(format!(
                "[{}, {}] has {} increasing chains",
                self.names[w],
                self.names[coatom],
                inner.len()
            ));
        }
        let mut chain = vec![self.top];
        chain.extend(&inner[0]);
        let labels: Vec<u32> = chain.windows(2).map(|p| self.label(p[0], p[1]).expect("cover")).collect();
        if labels.windows(2).any(|p| p[0] > p[1]) {
            return property(format!("chain through {} is not increasing", self.names[coatom]));
        }
        let whole = self.increasing_chains(w, self.top, 2);
        if whole != [chain.clone()] || self.lexmin_chain(w, self.top).as_ref() != Some(&chain) {
            return property(format!("distinguished chain at {} is not the unique increasing chain", self.names[w]));
        }
        Ok(chain)
    }

    /// Certifies the coatom ordering induced by the labels, recursively.
    pub fn recursive_coatom_check(&self) -> CoatomReport {
        let mut memo = HashMap::new();
        let ordering = self.coatoms();
        let failure = self.rco(self.top, &FixedBitSet::with_capacity(self.len()), &mut memo).err();
        CoatomReport { ok: failure.is_none(), ordering, failure }
    }

    fn rco(
        &self,
        x: usize,
        first: &FixedBitSet,
        memo: &mut HashMap<(usize, Vec<usize>), std::result::Result<(), String>>,
    ) -> std::result::Result<(), String> {
        if self.grade[x] - self.grade[self.bottom] <= 1 {
            return Ok(());
        }
        let key = (x, first.ones().collect::<Vec<_>>());
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        let mut coatoms = self.down[x].clone();
        coatoms.sort_by_key(|&(c, l)| (!first.contains(c), l, c));
        let n = self.len();
        let mut union = FixedBitSet::with_capacity(n);
        let mut earlier_covers = FixedBitSet::with_capacity(n);
        let mut result = Ok(());
        for (j, &(xj, _)) in coatoms.iter().enumerate() {
            let mut aj = FixedBitSet::with_capacity(n);
            for &(c, _) in &self.down[xj] {
                if earlier_covers.contains(c) {
                    aj.insert(c);
                }
            }
            if j > 0 {
                let mut common = union.clone();
                common.intersect_with(&self.below[xj]);
                let mut reach = FixedBitSet::with_capacity(n);
                for c in aj.ones() {
                    reach.union_with(&self.below[c]);
                }
                if !common.is_subset(&reach) {
                    result = Err(format!("condition (ii) fails below {} at coatom {}", self.names[x], self.names[xj]));
                    break;
                }
            }
            if let Err(e) = self.rco(xj, &aj, memo) {
                result = Err(e);
                break;
            }
            union.union_with(&self.below[xj]);
            for &(c, _) in &self.down[xj] {
                earlier_covers.insert(c);
            }
        }
        memo.insert(key, result.clone());
        result
    }

    /// Whether the poset without its top is `n`-Cohen-Macaulay. The coatoms
    /// are first tried in label order, then by exhaustive search over
    /// orderings when there are at most 16 maximal elements.
    pub fn ncm_check(&self, n: u32) -> Result<bool> {
        let mut set = FixedBitSet::with_capacity(self.len());
        set.insert_range(..);
        set.set(self.top, false);
        let coatoms = self.coatoms();
        if coatoms.iter().any(|&c| self.grade[c] != self.grade[coatoms[0]]) {
            return input("ncm_check needs a pure poset");
        }
        if coatoms.is_empty() {
            return input("ncm_check needs a nonempty poset below the top");
        }
        let mut memo = HashMap::new();
        self.cm(&set, n, Some(coatoms), &mut memo)
    }

    fn cm(
        &self,
        set: &FixedBitSet,
        n: u32,
        hint: Option<Vec<usize>>,
        memo: &mut HashMap<(FixedBitSet, u32), bool>,
    ) -> Result<bool> {
        let key = (set.clone(), n);
        if let Some(&r) = memo.get(&key) {
            return Ok(r);
        }
        let maximal: Vec<usize> = set.ones().filter(|&x| self.up[x].iter().all(|&(u, _)| !set.contains(u))).collect();
        let result = if maximal.len() == 1 {
            self.grade[maximal[0]] == n
        } else if maximal.iter().any(|&x| self.grade[x] != n) || n == 0 {
            false
        } else {
            let order = hint.unwrap_or_else(|| maximal.clone());
            if self.cm_sequence(&order, n, memo)? {
                true
            } else if maximal.len() <= 16 {
                self.cm_search(&maximal, n, memo)?
            } else {
                return property(format!("N-CM search over {} maximal elements is too large", maximal.len()));
            }
        };
        memo.insert(key, result);
        Ok(result)
    }

    fn cm_sequence(&self, order: &[usize], n: u32, memo: &mut HashMap<(FixedBitSet, u32), bool>) -> Result<bool> {
        let mut union = self.below[order[0]].clone();
        for &x in &order[1..] {
            let mut inter = union.clone();
            inter.intersect_with(&self.below[x]);
            if !self.cm(&inter, n - 1, None, memo)? {
                return Ok(false);
            }
            union.union_with(&self.below[x]);
        }
        Ok(true)
    }

    /// Existence of a valid ordering, by dynamic programming over subsets.
    fn cm_search(&self, maximal: &[usize], n: u32, memo: &mut HashMap<(FixedBitSet, u32), bool>) -> Result<bool> {
        let k = maximal.len();
        let full = (1usize << k) - 1;
        let mut good = vec![false; full + 1];
        good[0] = true;
        let mut masks: Vec<usize> = (1..=full).collect();
        masks.sort_by_key(|m| m.count_ones());
        for s in masks {
            for (i, &x) in maximal.iter().enumerate() {
                let rest = s & !(1 << i);
                if s & (1 << i) == 0 || !good[rest] {
                    continue;
                }
                let ok = if rest == 0 {
                    true
                } else {
                    let mut union = FixedBitSet::with_capacity(self.len());
                    for (t, &y) in maximal.iter().enumerate() {
                        if rest & (1 << t) != 0 {
                            union.union_with(&self.below[y]);
                        }
                    }
                    union.intersect_with(&self.below[x]);
                    self.cm(&union, n - 1, None, memo)?
                };
                if ok {
                    good[s] = true;
                    break;
                }
            }
        }
        Ok(good[full])
    }
}

/// Restriction of a labelled admissible poset to the `t^{a(μ)}` with `a ∈ C`;
/// `C` must be an initial segment of the η-order.
pub fn eta_ideal(poset: &AdmissiblePoset, lp: &LabeledPoset, c: &[FiniteElement]) -> Result<LabeledPoset> {
    if c.is_empty() {
        return input("the ideal C is empty");
    }
    let wjk = poset.wjk();
    let prefix = &wjk[..c.len().min(wjk.len())];
    if c.len() > wjk.len() || !c.iter().all(|a| prefix.contains(a)) {
        return input("C is not downward closed in the eta order");
    }
    let coatoms: Vec<usize> =
        prefix.iter().map(|a| poset.maximal()[wjk.iter().position(|b| b == a).expect("in W^{J,K}")]).collect();
    lp.ideal_restriction(&coatoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("l{i}")).collect()
    }

    #[test]
    fn chain_passes() {
        let p = LabeledPoset::new(names(2), vec![vec![], vec![(0, 0)]], labels(1)).unwrap();
        let r = p.verify_dual_el(1);
        assert!(r.passed());
        assert_eq!(r.intervals_checked, 1);
        assert!(p.recursive_coatom_check().ok);
        assert!(p.ncm_check(0).unwrap());
    }

    #[test]
    fn boolean_lattice() {
        // 0 < 1, 2 < 3; labels 0 on edges into 1-from-top side.
        let down = vec![vec![], vec![(0, 1)], vec![(0, 0)], vec![(1, 0), (2, 1)]];
        let p = LabeledPoset::new(names(4), down, labels(2)).unwrap();
        assert!(p.verify_dual_el(0).passed());
        assert!(p.recursive_coatom_check().ok);
        assert!(p.ncm_check(1).unwrap());
        let bad = vec![vec![], vec![(0, 0)], vec![(0, 0)], vec![(1, 0), (2, 0)]];
        let q = LabeledPoset::new(names(4), bad, labels(1)).unwrap();
        let r = q.verify_dual_el(0);
        assert!(!r.passed());
        assert_eq!(r.violations[0].chains.len(), 2);
    }

    #[test]
    fn gl3_augmented_poset() {
        use crate::affine::AffineWeylGroup;
        use crate::labeling::{label_poset, LabelOrder, RootTypes};
        use crate::rootdata::LatticeVec;

        let g = AffineWeylGroup::preset("GL3").unwrap();
        let p = AdmissiblePoset::build(&g, LatticeVec::from_slice(&[1, 0, 0]), &[1]).unwrap();
        let order = LabelOrder::build(&p, &RootTypes::new(&g.datum, &[1])).unwrap();
        let lp = label_poset(&p, &order).unwrap();
        assert_eq!(lp.len(), 6);
        let r = lp.verify_dual_el(2);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.intervals_checked, 12);

        let t010 = p.index_of(&g.translation(LatticeVec::from_slice(&[0, 1, 0]))).unwrap();
        let tau = 0;
        let tau_s2 = 2;
        assert_eq!(lp.distinguished_chain(tau, t010).unwrap(), vec![lp.top(), t010, tau_s2, tau]);
        assert_eq!(lp.distinguished_chain(1, t010).unwrap(), vec![lp.top(), t010, 1]);
        assert_eq!(lp.distinguished_chain(t010, t010).unwrap(), vec![lp.top(), t010]);

        let co = lp.recursive_coatom_check();
        assert!(co.ok);
        assert_eq!(co.ordering[0], t010);
        assert!(lp.ncm_check(2).unwrap());

        let small = eta_ideal(&p, &lp, &p.wjk()[..1]).unwrap();
        assert_eq!(small.len(), 5);
        assert!(small.verify_dual_el(1).passed());
        assert!(eta_ideal(&p, &lp, &p.wjk()[1..]).is_err());
        assert!(eta_ideal(&p, &lp, &[]).is_err());
    }

    #[test]
    fn rejects_ungraded() {
        let down = vec![vec![], vec![(0, 0)], vec![(1, 0)], vec![(2, 0), (0, 0)]];
        assert!(LabeledPoset::new(names(4), down, labels(1)).is_err());
    }

    #[test]
    fn two_disjoint_maxima_not_cm() {
        // 0 < a, b < c, d where a, b and c, d form two separate diamonds' tops.
        let down = vec![vec![], vec![(0, 0)], vec![(0, 0)], vec![(1, 0)], vec![(2, 0)], vec![(3, 0), (4, 0)]];
        let p = LabeledPoset::new(names(6), down, labels(1)).unwrap();
        assert!(!p.ncm_check(2).unwrap());
    }
}
