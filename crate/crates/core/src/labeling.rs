//! Edge labels for `Adm(μ)^K ⊔ {1̂}`.
//!
//! Covers `w s_ã ⋖ w` carry the positive affine root `ã`; the edges into `1̂`
//! carry symbols `η_a`. The roots are ordered by a reflection order on a
//! finite relevant set: a seed order by lexicographic slopes (convex by the
//! mediant property, separated by construction) followed by repair steps
//! that move `Φ_K⁺` to the front.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_rational::Ratio;

use crate::admissible::AdmissiblePoset;
use crate::error::{input, property, Error, Result};
use crate::rootdata::{AffineRoot, RootDatum};
use crate::shellcheck::LabeledPoset;
use crate::weyl::{FiniteElement, WeylGroup};

type Q = Ratio<i128>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Root(AffineRoot),
    Eta(FiniteElement),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RootType {
    I,
    II,
}

/// `Φ_K⁺` and `J′ = K ∩ Δ₀` for a spherical `K`.
#[derive(Clone, Debug)]
pub struct RootTypes {
    phi_k_pos: BTreeSet<AffineRoot>,
    k_simple: Vec<AffineRoot>,
    jprime: Vec<usize>,
}

impl RootTypes {
    pub fn new(rd: &RootDatum, k: &[usize]) -> Self {
        let k_simple: Vec<AffineRoot> = k.iter().map(|&i| rd.simple_affine()[i].root).collect();
        let mut all: BTreeSet<AffineRoot> = k_simple.iter().copied().collect();
        let mut stack: Vec<AffineRoot> = all.iter().copied().collect();
        while let Some(b) = stack.pop() {
            for &a in &k_simple {
                let c = rd.reflect_affine(a, b);
                if all.insert(c) {
                    stack.push(c);
                }
            }
        }
        let phi_k_pos = all.iter().flat_map(|&a| [a, rd.neg_affine(a)]).filter(|&a| rd.is_positive(a)).collect();
        let jprime = k.iter().filter_map(|&i| rd.simple_affine()[i].finite).collect();
        RootTypes { phi_k_pos, k_simple, jprime }
    }

    pub fn phi_k_pos(&self) -> impl Iterator<Item = AffineRoot> + '_ {
        self.phi_k_pos.iter().copied()
    }

    pub fn in_phi_k(&self, a: AffineRoot) -> bool {
        self.phi_k_pos.contains(&a)
    }

    pub fn k_simple(&self) -> &[AffineRoot] {
        &self.k_simple
    }

    /// Finite simple indices in `K`.
    pub fn jprime(&self) -> &[usize] {
        &self.jprime
    }

    /// The finite root lies in the parabolic subsystem `Φ_{J′}`.
    pub fn in_phi_jprime(&self, rd: &RootDatum, r: usize) -> bool {
        rd.coefficients(r).iter().enumerate().all(|(i, &c)| c == 0 || self.jprime.contains(&i))
    }

    pub fn classify(&self, rd: &RootDatum, a: AffineRoot) -> Result<RootType> {
        if !rd.is_positive(a) {
            return input(format!("{} is not a positive affine root", rd.affine_root_name(a)));
        }
        let r = a.root as usize;
        let type_one = self.in_phi_k(a) || (!rd.is_positive_root(r) && !self.in_phi_jprime(rd, r) && a.level >= 1);
        Ok(if type_one { RootType::I } else { RootType::II })
    }
}

/// Linear functionals, given by their values on simple roots, ordering
/// positive affine roots by the slope vector `(g₁, g₂, g₃) / (⟨v₀,α⟩ + k)`.
#[derive(Clone, Debug)]
struct Seed {
    v0: Vec<Q>,
    g: [Vec<Q>; 3],
}

const PRIMES: [i128; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

impl Seed {
    fn new(rd: &RootDatum, jprime: &[usize]) -> Self {
        let r = rd.rank();
        let h = (0..rd.num_positive()).map(|x| rd.height(x)).max().unwrap_or(0) as i128 + 1;
        let v0 = (0..r).map(|i| Q::new(1000 + i as i128 + 1, 2000 * h)).collect();
        let g1 = (0..r).map(|i| Q::from_integer(!jprime.contains(&i) as i128)).collect();
        let g2 = (0..r)
            .map(|i| {
                if jprime.contains(&i) {
                    -Q::new(1000 + 7 * (i as i128 + 1), 1000)
                } else {
                    Q::new(3 * (i as i128 + 1) + 1, 1000)
                }
            })
            .collect();
        let g3 = (0..r).map(|i| Q::new(1000 * PRIMES[i] + 1, 1000)).collect();
        Seed { v0, g: [g1, g2, g3] }
    }

    fn key(&self, rd: &RootDatum, a: AffineRoot) -> [Q; 3] {
        let c = rd.coefficients(a.root as usize);
        let eval = |f: &[Q]| c.iter().zip(f).map(|(&x, y)| Q::from_integer(x as i128) * y).sum::<Q>();
        let denom = eval(&self.v0) + Q::from_integer(a.level as i128);
        [eval(&self.g[0]) / denom, eval(&self.g[1]) / denom, eval(&self.g[2]) / denom]
    }
}

/// A seed order followed by a sequence of repair steps `≺ ↦ ≺_{s̃}`.
#[derive(Clone, Debug)]
struct ReflectionOrder {
    seed: Seed,
    repairs: Vec<AffineRoot>,
}

impl ReflectionOrder {
    /// Positions of `set` under the order after the first `depth` repairs.
    fn ranks(&self, rd: &RootDatum, set: &[AffineRoot], depth: usize) -> HashMap<AffineRoot, usize> {
        if depth == 0 {
            let mut keyed: Vec<([Q; 3], AffineRoot)> = set.iter().map(|&a| (self.seed.key(rd, a), a)).collect();
            keyed.sort();
            return keyed.into_iter().enumerate().map(|(i, (_, a))| (a, i)).collect();
        }
        let alpha = self.repairs[depth - 1];
        let mut wider: BTreeSet<AffineRoot> = set.iter().copied().collect();
        wider.insert(alpha);
        for &b in set {
            if b != alpha {
                wider.insert(rd.reflect_affine(alpha, b));
            }
        }
        let wider: Vec<AffineRoot> = wider.into_iter().collect();
        let prev = self.ranks(rd, &wider, depth - 1);
        let pa = prev[&alpha];
        let mut before: Vec<(usize, AffineRoot)> = Vec::new();
        let mut after: Vec<(usize, AffineRoot)> = Vec::new();
        for &b in set {
            if b == alpha {
                continue;
            }
            if prev[&b] < pa {
                before.push((prev[&rd.reflect_affine(alpha, b)], b));
            } else {
                after.push((prev[&b], b));
            }
        }
        before.sort();
        after.sort();
        let mut out = HashMap::new();
        if set.contains(&alpha) {
            out.insert(alpha, 0);
        }
        for (_, b) in before.into_iter().chain(after) {
            let n = out.len();
            out.insert(b, n);
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct OrderStats {
    pub level_cap: i32,
    /// Pairs of relevant roots with a positive combination above the cap.
    pub capped_pairs: usize,
    pub relevant: usize,
    /// `♯D` before each repair, and after the last one.
    pub defects: Vec<usize>,
    pub repairs: Vec<AffineRoot>,
}

/// A total order on finitely many labels.
#[derive(Clone, Debug)]
pub struct LabelOrder {
    labels: Vec<Label>,
    rank: HashMap<Label, usize>,
    pub stats: OrderStats,
}

impl LabelOrder {
    /// An order given explicitly in ascending order.
    pub fn from_labels(labels: Vec<Label>) -> Result<Self> {
        let rank: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        if rank.len() != labels.len() {
            return input("label order lists a label twice");
        }
        Ok(LabelOrder { labels, rank, stats: OrderStats::default() })
    }

    /// Builds a separated, `K`-compatible reflection order on the relevant
    /// roots of `poset`, with the `η_a` inserted between the two types.
    pub fn build(poset: &AdmissiblePoset, types: &RootTypes) -> Result<Self> {
        let g = poset.group();
        let rd = &g.datum;
        let edge_roots = poset.edge_roots();
        let max_level = edge_roots.iter().map(|a| a.level).max().unwrap_or(0).max(1);
        let cap = 2 * max_level + 1;
        let (relevant, capped_pairs) = relevant_closure(rd, edge_roots.iter().copied().chain(types.phi_k_pos()), cap);

        let mut order = ReflectionOrder { seed: Seed::new(rd, types.jprime()), repairs: Vec::new() };
        let mut defects = Vec::new();
        let max_repairs = 4 * types.phi_k_pos.len() + 4;
        let sorted = loop {
            let ranks = order.ranks(rd, &relevant, order.repairs.len());
            let mut sorted = relevant.clone();
            sorted.sort_by_key(|a| ranks[a]);
            let first_other = sorted.iter().position(|&a| !types.in_phi_k(a)).unwrap_or(sorted.len());
            let defect: Vec<AffineRoot> =
                sorted[first_other..].iter().copied().filter(|&a| types.in_phi_k(a)).collect();
            defects.push(defect.len());
            if defect.is_empty() {
                break sorted;
            }
            if order.repairs.len() >= max_repairs {
                return property(format!("K-compatibility repair did not finish after {max_repairs} steps"));
            }
            let Some(&alpha) = defect.iter().find(|a| types.k_simple().contains(a)) else {
                return property("defect set contains no simple root of K");
            };
            order.repairs.push(alpha);
        };

        let mut labels = Vec::with_capacity(sorted.len() + poset.wjk().len());
        let split =
            sorted.iter().position(|&a| types.classify(rd, a).ok() == Some(RootType::II)).unwrap_or(sorted.len());
        if sorted[split..].iter().any(|&a| types.classify(rd, a).ok() == Some(RootType::I)) {
            return property("constructed reflection order is not separated");
        }
        labels.extend(sorted[..split].iter().map(|&a| Label::Root(a)));
        labels.extend(poset.wjk().iter().map(|&a| Label::Eta(a)));
        labels.extend(sorted[split..].iter().map(|&a| Label::Root(a)));
        let mut out = Self::from_labels(labels)?;
        out.stats =
            OrderStats { level_cap: cap, capped_pairs, relevant: relevant.len(), defects, repairs: order.repairs };
        out.check_invariants(poset, types)?;
        Ok(out)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn rank(&self, l: &Label) -> Option<usize> {
        self.rank.get(l).copied()
    }

    pub fn cmp(&self, a: &Label, b: &Label) -> Option<Ordering> {
        Some(self.rank(a)?.cmp(&self.rank(b)?))
    }

    /// The roots of the order, ascending.
    pub fn roots(&self) -> Vec<AffineRoot> {
        self.labels
            .iter()
            .filter_map(|l| match l {
                Label::Root(a) => Some(*a),
                Label::Eta(_) => None,
            })
            .collect()
    }

    /// A copy with two labels exchanged.
    pub fn swapped(&self, a: &Label, b: &Label) -> Result<Self> {
        let (Some(i), Some(j)) = (self.rank(a), self.rank(b)) else {
            return input("swapped: label not in the order");
        };
        let mut labels = self.labels.clone();
        labels.swap(i, j);
        Self::from_labels(labels)
    }

    /// Runs the whole invariant suite.
    pub fn check_invariants(&self, poset: &AdmissiblePoset, types: &RootTypes) -> Result<()> {
        let rd = &poset.group().datum;
        self.check_convexity(rd)?;
        self.check_separation(rd, types)?;
        self.check_k_compatibility(types)?;
        self.check_sandwich(rd, types)?;
        self.check_eta_refines_bruhat(&poset.group().finite)
    }

    /// `ã ≺ c̃ ≺ b̃` whenever `c̃` is a positive combination of `ã ≺ b̃`, all listed.
    pub fn check_convexity(&self, rd: &RootDatum) -> Result<()> {
        let roots = self.roots();
        let cap = roots.iter().map(|a| a.level).max().unwrap_or(0);
        let pos: HashMap<AffineRoot, usize> = roots.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        for (i, &x) in roots.iter().enumerate() {
            for &y in &roots[i + 1..] {
                for c in rd.positive_combinations(x, y, cap).0 {
                    if let Some(&pc) = pos.get(&c) {
                        if pc < i || pc > pos[&y] {
                            return property(format!(
                                "convexity fails: {} lies outside {} .. {}",
                                rd.affine_root_name(c),
                                rd.affine_root_name(x),
                                rd.affine_root_name(y)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Every type I root precedes every type II root.
    pub fn check_separation(&self, rd: &RootDatum, types: &RootTypes) -> Result<()> {
        let kinds = self.roots().into_iter().map(|a| types.classify(rd, a)).collect::<Result<Vec<_>>>()?;
        match kinds.windows(2).position(|w| w[0] == RootType::II && w[1] == RootType::I) {
            None => Ok(()),
            Some(_) => property("a type II root precedes a type I root"),
        }
    }

    /// Roots of `Φ_K⁺` precede all other roots.
    pub fn check_k_compatibility(&self, types: &RootTypes) -> Result<()> {
        let roots = self.roots();
        let first_other = roots.iter().position(|&a| !types.in_phi_k(a)).unwrap_or(roots.len());
        if roots[first_other..].iter().any(|&a| types.in_phi_k(a)) {
            return property("a root outside Phi_K precedes a root of Phi_K");
        }
        Ok(())
    }

    /// Type I roots, then every `η`, then type II roots.
    pub fn check_sandwich(&self, rd: &RootDatum, types: &RootTypes) -> Result<()> {
        let mut phase = 0;
        for l in &self.labels {
            let p = match l {
                Label::Root(a) => match types.classify(rd, *a)? {
                    RootType::I => 0,
                    RootType::II => 2,
                },
                Label::Eta(_) => 1,
            };
            if p < phase {
                return property("eta symbols are not sandwiched between type I and type II roots");
            }
            phase = p;
        }
        Ok(())
    }

    /// `a ≤ b` in Bruhat order implies `η_a ⪯ η_b`.
    pub fn check_eta_refines_bruhat(&self, w: &WeylGroup) -> Result<()> {
        let etas: Vec<FiniteElement> = self
            .labels
            .iter()
            .filter_map(|l| match l {
                Label::Eta(a) => Some(*a),
                Label::Root(_) => None,
            })
            .collect();
        for (i, &a) in etas.iter().enumerate() {
            if etas[..i].iter().any(|&b| w.bruhat_leq_finite(a, b)) {
                return property(format!("eta order does not refine Bruhat order at {}", w.word_string(a)));
            }
        }
        Ok(())
    }
}

/// Closes `seed` under positive combinations of level at most `cap`; also
/// counts the pairs that had a combination above the cap.
fn relevant_closure(rd: &RootDatum, seed: impl Iterator<Item = AffineRoot>, cap: i32) -> (Vec<AffineRoot>, usize) {
    let mut set: BTreeSet<AffineRoot> = BTreeSet::new();
    let mut list: Vec<AffineRoot> = Vec::new();
    for a in seed {
        if set.insert(a) {
            list.push(a);
        }
    }
    let mut capped = 0;
    let mut head = 0;
    while head < list.len() {
        let x = list[head];
        for i in 0..head {
            let (combos, c) = rd.positive_combinations(list[i], x, cap);
            capped += c as usize;
            for r in combos {
                if set.insert(r) {
                    list.push(r);
                }
            }
        }
        head += 1;
    }
    (set.into_iter().collect(), capped)
}

pub fn label_name(rd: &RootDatum, w: &WeylGroup, l: &Label) -> String {
    match l {
        Label::Root(a) => rd.affine_root_name(*a),
        Label::Eta(a) => {
            let s = w.word_string(*a);
            format!("eta({})", if s.is_empty() { "1" } else { &s })
        }
    }
}

/// Parses "(-a1-a2,1)" or "eta(s2 s1)".
pub fn parse_label(rd: &RootDatum, w: &WeylGroup, s: &str) -> Result<Label> {
    let t = s.trim();
    if let Some(body) = t.strip_prefix("eta(").and_then(|b| b.strip_suffix(')')) {
        let body = body.trim();
        let a = if body == "1" { w.identity() } else { w.parse_word(body)? };
        return Ok(Label::Eta(a));
    }
    let a = rd.parse_affine_root(t)?;
    if !rd.is_positive(a) {
        return input(format!("label {t} is not a positive affine root"));
    }
    Ok(Label::Root(a))
}

/// Attaches labels to every cover of `poset ⊔ {1̂}`.
pub fn label_poset(poset: &AdmissiblePoset, order: &LabelOrder) -> Result<LabeledPoset> {
    let g = poset.group();
    let n = poset.len();
    let rank_of = |l: Label| {
        order.rank(&l).map(|r| r as u32).ok_or_else(|| {
            Error::Property(format!("label {} missing from the order", label_name(&g.datum, &g.finite, &l)))
        })
    };
    let mut down = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cs = poset
            .covers_below(i)
            .iter()
            .map(|&(c, a)| {
                if !g.datum.is_positive(a) {
                    return property("cover labelled by a non-positive root");
                }
                Ok((c, rank_of(Label::Root(a))?))
            })
            .collect::<Result<Vec<_>>>()?;
        down.push(cs);
    }
    down.push(
        poset
            .wjk()
            .iter()
            .zip(poset.maximal())
            .map(|(&a, &m)| Ok((m, rank_of(Label::Eta(a))?)))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut names: Vec<String> = poset.elements().iter().map(|w| g.element_name(w)).collect();
    names.push("1^".into());
    let label_names = order.labels().iter().map(|l| label_name(&g.datum, &g.finite, l)).collect();
    LabeledPoset::new(names, down, label_names)
}
