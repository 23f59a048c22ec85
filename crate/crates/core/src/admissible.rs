//! Admissible sets `Adm(μ)^K` as explicit posets.
//!
//! The poset is enumerated downward from the maximal translations
//! `t^{a(μ)}`, `a ∈ W^{J,K}`, through Bruhat covers that stay inside `W̃^K`.
//! Elements are indexed by (length, reduced word); the formal top `1̂` has
//! index `len()`.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::affine::{AcutePresentation, AffineElement, AffineWeylGroup};
use crate::error::{input, property, Result};
use crate::labeling::{RootType, RootTypes};
use crate::rootdata::{AffineRoot, LatticeVec};
use crate::weyl::FiniteElement;

#[derive(Clone, Debug)]
pub struct AdmissiblePoset<'g> {
    group: &'g AffineWeylGroup,
    mu: LatticeVec,
    k: Vec<usize>,
    j: Vec<usize>,
    wjk: Vec<FiniteElement>,
    elements: Vec<AffineElement>,
    index: HashMap<AffineElement, usize>,
    lengths: Vec<u32>,
    /// `(lower, ã)` with `lower = upper · s_ã`.
    down: Vec<Vec<(usize, AffineRoot)>>,
    up: Vec<Vec<usize>>,
    below: Vec<FixedBitSet>,
    /// `maximal[i]` is the index of `t^{wjk[i](μ)}`.
    maximal: Vec<usize>,
}

/// The data attached to one element `w` by the minimality lemma.
#[derive(Clone, Debug)]
pub struct SigmaData {
    pub w: AffineElement,
    pub presentation: AcutePresentation,
    pub sigma_w: Vec<FiniteElement>,
    pub z_min: FiniteElement,
    pub sigma_w_jk: Vec<FiniteElement>,
    pub a_min_k: FiniteElement,
    pub loop_steps: usize,
}

#[derive(Clone, Debug)]
pub struct TopTwoRecord {
    pub w: usize,
    pub z1: FiniteElement,
    pub z2: FiniteElement,
    pub quantum: bool,
    pub covering: [AffineElement; 2],
    pub a_min: FiniteElement,
    pub label: AffineRoot,
    pub label_type: RootType,
    pub presentations_checked: usize,
}

/// Spherical σ-Coxeter elements of a poset with the induced Hasse diagram.
#[derive(Clone, Debug)]
pub struct CoxSubset {
    pub members: Vec<usize>,
    /// `(upper, lower)` pairs, both poset indices.
    pub covers: Vec<(usize, usize)>,
}

impl<'g> AdmissiblePoset<'g> {
    /// `K` is given as simple affine node indices.
    pub fn build(group: &'g AffineWeylGroup, mu: LatticeVec, k: &[usize]) -> Result<Self> {
        let rd = &group.datum;
        if mu.len() != rd.dim() {
            return input(format!("mu has {} coordinates, expected {}", mu.len(), rd.dim()));
        }
        if !rd.is_dominant(&mu) {
            return input(format!("mu = {mu} is not dominant"));
        }
        let mut k: Vec<usize> = k.to_vec();
        k.sort_unstable();
        k.dedup();
        if let Some(&bad) = k.iter().find(|&&i| i >= group.num_nodes()) {
            return input(format!("K contains out-of-range node {bad}"));
        }
        if !rd.is_spherical(&k) {
            return input("K is not spherical");
        }
        let j: Vec<usize> = (0..rd.rank()).filter(|&i| rd.pair_with_root(&mu, i) == 0).collect();
        let wjk: Vec<FiniteElement> = group
            .finite
            .min_coset_reps(&j)
            .into_iter()
            .filter(|&a| group.is_min_rep_k(&group.translation(group.finite.apply(a, &mu)), &k))
            .collect();

        let mut seen: HashSet<AffineElement> = HashSet::new();
        let mut queue = VecDeque::new();
        for &a in &wjk {
            let t = group.translation(group.finite.apply(a, &mu));
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
        let mut raw_down: HashMap<AffineElement, Vec<(AffineElement, AffineRoot)>> = HashMap::new();
        while let Some(v) = queue.pop_front() {
            let cs: Vec<_> = group.covers_down(&v).into_iter().filter(|(c, _)| group.is_min_rep_k(c, &k)).collect();
            for (c, _) in &cs {
                if seen.insert(*c) {
                    queue.push_back(*c);
                }
            }
            raw_down.insert(v, cs);
        }

        let mut keyed: Vec<(u32, Vec<usize>, AffineElement)> =
            seen.into_iter().map(|w| (group.length(&w), group.decompose(&w).1, w)).collect();
        keyed.sort();
        let elements: Vec<AffineElement> = keyed.iter().map(|x| x.2).collect();
        let lengths: Vec<u32> = keyed.iter().map(|x| x.0).collect();
        let index: HashMap<AffineElement, usize> = elements.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let n = elements.len();
        let mut down = vec![Vec::new(); n];
        let mut up = vec![Vec::new(); n];
        for (i, w) in elements.iter().enumerate() {
            let mut cs: Vec<(usize, AffineRoot)> = raw_down[w].iter().map(|(c, a)| (index[c], *a)).collect();
            cs.sort();
            for &(c, _) in &cs {
                up[c].push(i);
            }
            down[i] = cs;
        }
        for u in &mut up {
            u.sort_unstable();
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(i);
            for &(c, _) in &down[i] {
                b.union_with(&below[c]);
            }
            below[i] = b;
        }
        let maximal = wjk.iter().map(|&a| index[&group.translation(group.finite.apply(a, &mu))]).collect();
        let poset = AdmissiblePoset { group, mu, k, j, wjk, elements, index, lengths, down, up, below, maximal };
        poset.check_structure()?;
        Ok(poset)
    }

    fn check_structure(&self) -> Result<()> {
        let top = self.rank_n();
        if self.lengths[0] != 0 || self.lengths.iter().skip(1).any(|&l| l == 0) {
            return property("admissible set has no unique length-zero element");
        }
        for (i, &l) in self.lengths.iter().enumerate() {
            let is_max = self.up[i].is_empty();
            if is_max != self.maximal.contains(&i) {
                return property("maximal elements differ from the translations t^{a(mu)}");
            }
            if is_max && l != top {
                return property("admissible set is not graded");
            }
            if i > 0 && self.down[i].is_empty() {
                return property("admissible set has several minimal elements");
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &'g AffineWeylGroup {
        self.group
    }

    pub fn mu(&self) -> LatticeVec {
        self.mu
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    /// Finite simple roots fixed by `μ`.
    pub fn j(&self) -> &[usize] {
        &self.j
    }

    /// `W^{J,K}` in η-order (length, then canonical word).
    pub fn wjk(&self) -> &[FiniteElement] {
        &self.wjk
    }

    /// Number of elements, excluding `1̂`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the formal top element.
    pub fn top(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &AffineElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[AffineElement] {
        &self.elements
    }

    pub fn index_of(&self, w: &AffineElement) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn length(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    /// `⟨μ, 2ρ⟩`, the length of the maximal elements.
    pub fn rank_n(&self) -> u32 {
        self.mu.dot(&self.group.datum.two_rho()) as u32
    }

    pub fn covers_below(&self, i: usize) -> &[(usize, AffineRoot)] {
        &self.down[i]
    }

    pub fn covers_above(&self, i: usize) -> &[usize] {
        &self.up[i]
    }

    /// Indices of `t^{a(μ)}`, aligned with [`Self::wjk`].
    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }

    pub fn down_set(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    pub fn translation_of(&self, a: FiniteElement) -> AffineElement {
        self.group.translation(self.group.finite.apply(a, &self.mu))
    }

    /// All root labels occurring on covers.
    pub fn edge_roots(&self) -> Vec<AffineRoot> {
        let mut v: Vec<AffineRoot> = self.down.iter().flatten().map(|&(_, a)| a).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `wt(x, y⁻¹) ≤ μ − λ` for an acute presentation.
    pub fn adm_membership(&self, p: &AcutePresentation) -> Result<bool> {
        adm_membership(self.group, p, &self.mu)
    }

    /// `Σ_w`, `z_min`, `Σ_w^{J,K}` and `a_min^K`, each computed two ways.
    pub fn compute_sigma(&self, i: usize) -> Result<SigmaData> {
        let g = self.group;
        let f = &g.finite;
        let q = g.qbg();
        let rd = &g.datum;
        let w = self.elements[i];
        let p = g.acute_presentation_k(&w, &self.k)?;
        let yi = f.invert(p.y);
        let bound = self.mu - p.lambda;
        let sigma_w: Vec<FiniteElement> =
            f.elements().filter(|&z| rd.in_coroot_cone(&(bound - q.wt(p.x, z) - q.wt(z, yi)))).collect();
        let z_min = unique_min(&sigma_w, |a, b| f.bruhat_leq_finite(a, b))
            .map_or_else(|| property(format!("Sigma_w has no unique minimum at {}", g.element_name(&w))), Ok)?;
        let half: Vec<FiniteElement> = f.elements().filter(|&z| rd.in_coroot_cone(&(bound - q.wt(p.x, z)))).collect();
        if unique_min(&half, |a, b| f.bruhat_leq_finite(a, b)) != Some(z_min) {
            return property("z_min is not the minimum of {z : wt(x,z) <= mu - lambda}");
        }

        let sigma_w_jk: Vec<FiniteElement> =
            self.wjk.iter().zip(&self.maximal).filter(|(_, &m)| self.leq(i, m)).map(|(&a, _)| a).collect();
        let wj = f.parabolic(&self.j);
        let via_wt: Vec<FiniteElement> =
            self.wjk.iter().copied().filter(|&a| wj.iter().any(|&u| sigma_w.contains(&f.multiply(a, u)))).collect();
        if via_wt != sigma_w_jk {
            return property("Sigma_w^{J,K} from the weight criterion disagrees with the poset");
        }

        let mut a = f.min_rep(z_min, &self.j);
        let mut steps = 0;
        loop {
            let t = self.translation_of(a);
            let Some(&node) = self.k.iter().find(|&&n| g.has_right_descent(&t, n)) else { break };
            if steps >= f.order() {
                return property("a_min loop did not terminate");
            }
            let alpha = rd.simple_affine()[node].root.root as usize;
            a = f.min_rep(f.multiply(f.reflection(rd.abs_root(alpha)), a), &self.j);
            steps += 1;
        }
        let brute = unique_min(&sigma_w_jk, |x, y| f.bruhat_leq_finite(x, y))
            .map_or_else(|| property("Sigma_w^{J,K} has no unique minimum"), Ok)?;
        let gens: Vec<FiniteElement> =
            self.k.iter().map(|&n| f.reflection(rd.abs_root(rd.simple_affine()[n].root.root as usize))).collect();
        let pr_wk = f.generated(&gens);
        let mut double: Vec<FiniteElement> = pr_wk
            .iter()
            .flat_map(|&u| wj.iter().map(move |&v| (u, v)))
            .map(|(u, v)| f.multiply(f.multiply(u, z_min), v))
            .filter(|x| self.wjk.contains(x))
            .collect();
        double.sort_unstable();
        double.dedup();
        if a != brute || double != [a] {
            return property(format!(
                "a_min disagreement at {}: loop {}, brute force {}, double coset {:?}",
                g.element_name(&w),
                f.word_string(a),
                f.word_string(brute),
                double.iter().map(|&d| f.word_string(d)).collect::<Vec<_>>()
            ));
        }
        Ok(SigmaData { w, presentation: p, sigma_w, z_min, sigma_w_jk, a_min_k: a, loop_steps: steps })
    }

    /// Checks the description of the layer just below the maximal elements.
    pub fn top_two_report(&self, types: &RootTypes) -> Result<Vec<TopTwoRecord>> {
        let g = self.group;
        let f = &g.finite;
        let q = g.qbg();
        let rd = &g.datum;
        let n = self.rank_n();
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut translations: Vec<(FiniteElement, AffineElement)> = Vec::new();
        for z in f.min_coset_reps(&self.j) {
            translations.push((z, self.translation_of(z)));
        }
        let mut out = Vec::new();
        for i in (0..self.len()).filter(|&i| self.lengths[i] + 1 == n) {
            let w = self.elements[i];
            let name = g.element_name(&w);
            let above: HashSet<AffineElement> =
                translations.iter().filter(|(_, t)| g.bruhat_leq(&w, t)).map(|(_, t)| *t).collect();
            let pres = g.acute_presentations_k(&w, &self.k);
            if pres.is_empty() {
                return property(format!("{name} has no K-compatible acute presentation"));
            }
            let mut first = None;
            for p in &pres {
                let (z1, z2) = (p.x, f.invert(p.y));
                let Some(edge) = q.edge(z1, z2) else {
                    return property(format!("no QBG edge z1 -> z2 for {name}"));
                };
                if p.lambda != self.mu - q.wt(z1, z2) {
                    return property(format!("lambda != mu - wt(z1,z2) for {name}"));
                }
                let alpha = edge.root as usize;
                if rd.coefficients(alpha).iter().enumerate().all(|(s, &c)| c == 0 || self.j.contains(&s)) {
                    return property(format!("wt(z1,z2) lies in Phi_J for {name}"));
                }
                let expect: HashSet<AffineElement> =
                    [g.translation(f.apply(z1, &self.mu)), g.translation(f.apply(z2, &self.mu))].into();
                if above.len() != 2 || above != expect {
                    return property(format!(
                        "{name} is below {} translations, expected t^(z1 mu), t^(z2 mu)",
                        above.len()
                    ));
                }
                first.get_or_insert((z1, z2, edge.quantum, expect));
            }
            let (z1, z2, quantum, _) = first.expect("nonempty");
            let sigma = self.compute_sigma(i)?;
            let top = self.index[&self.translation_of(sigma.a_min_k)];
            let label = self.down[top]
                .iter()
                .find(|&&(c, _)| c == i)
                .map(|&(_, a)| a)
                .map_or_else(|| property(format!("t^(a_min mu) does not cover {name}")), Ok)?;
            let label_type = types.classify(rd, label)?;
            if label_type != RootType::II {
                return property(format!("label of t^(a_min mu) over {name} is not type II"));
            }
            out.push(TopTwoRecord {
                w: i,
                z1,
                z2,
                quantum,
                covering: [g.translation(f.apply(z1, &self.mu)), g.translation(f.apply(z2, &self.mu))],
                a_min: sigma.a_min_k,
                label,
                label_type,
                presentations_checked: pres.len(),
            });
        }
        Ok(out)
    }

    /// Elements whose reduced-word letters lie in pairwise distinct
    /// `σ∘Ad(τ)`-orbits with at least one orbit unused. `sigma` defaults to
    /// the identity permutation of affine nodes.
    pub fn coxeter_subset(&self, sigma: Option<&[usize]>) -> Result<CoxSubset> {
        let g = self.group;
        let nn = g.num_nodes();
        let id: Vec<usize> = (0..nn).collect();
        let sigma = sigma.unwrap_or(&id);
        check_diagram_automorphism(g, sigma)?;
        let mut members = Vec::new();
        for (i, w) in self.elements.iter().enumerate() {
            let (tau, word) = g.decompose(w);
            let ad = g.length_zero_permutation(&tau)?;
            let orbit = orbits(&(0..nn).map(|x| sigma[ad[x]]).collect::<Vec<_>>());
            let used: Vec<usize> = word.iter().map(|&s| orbit[s]).collect();
            let distinct: HashSet<usize> = used.iter().copied().collect();
            let norbits = orbit.iter().copied().max().map_or(0, |m| m + 1);
            if distinct.len() == used.len() && distinct.len() < norbits {
                members.push(i);
            }
        }
        let mut covers = Vec::new();
        for &u in &members {
            for &v in &members {
                if u == v || !self.leq(v, u) {
                    continue;
                }
                let between = members.iter().any(|&x| x != u && x != v && self.leq(v, x) && self.leq(x, u));
                if !between {
                    covers.push((u, v));
                }
            }
        }
        covers.sort_unstable();
        Ok(CoxSubset { members, covers })
    }
}

/// `wt(x, y⁻¹) ≤ μ − λ`; the presentation must be acute.
pub fn adm_membership(g: &AffineWeylGroup, p: &AcutePresentation, mu: &LatticeVec) -> Result<bool> {
    if !g.is_acute(p.x, &p.lambda, p.y) {
        return input("adm_membership needs an acute presentation");
    }
    let wt = g.qbg().wt(p.x, g.finite.invert(p.y));
    Ok(g.datum.in_coroot_cone(&(*mu - p.lambda - wt)))
}

/// The element of `xs` below all others, if there is one.
fn unique_min<T: Copy + PartialEq>(xs: &[T], leq: impl Fn(T, T) -> bool) -> Option<T> {
    xs.iter().copied().find(|&m| xs.iter().all(|&x| leq(m, x)))
}

/// Orbit ids (numbered by first appearance) of a permutation.
fn orbits(perm: &[usize]) -> Vec<usize> {
    let mut id = vec![usize::MAX; perm.len()];
    let mut next = 0;
    for s in 0..perm.len() {
        if id[s] != usize::MAX {
            continue;
        }
        let mut x = s;
        while id[x] == usize::MAX {
            id[x] = next;
            x = perm[x];
        }
        next += 1;
    }
    id
}

fn check_diagram_automorphism(g: &AffineWeylGroup, sigma: &[usize]) -> Result<()> {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    if sigma.len() != n || sigma.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
        return input("sigma is not a permutation of the affine nodes");
    }
    let m = g.coxeter_matrix();
    for i in 0..n {
        for j in 0..n {
            if m[sigma[i]][sigma[j]] != m[i][j] {
                return input("sigma does not preserve the Coxeter matrix");
            }
        }
    }
    Ok(())
}
