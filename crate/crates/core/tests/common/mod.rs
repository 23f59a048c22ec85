//! Fixture enumeration shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use admshell::admissible::AdmissiblePoset;
use admshell::affine::AffineWeylGroup;
use admshell::labeling::{label_poset, LabelOrder, RootTypes};
use admshell::rootdata::{LatticeVec, RootDatum};
use admshell::shellcheck::{eta_ideal, LabeledPoset};
use admshell::weyl::FiniteElement;

/// Data of the verification matrix with their bound on `⟨μ,2ρ⟩`.
pub const MATRIX: &[(&str, i32)] = &[
    ("A1", 8),
    ("A1-adjoint", 8),
    ("A2", 8),
    ("A2-adjoint", 8),
    ("A3", 6),
    ("A3-adjoint", 6),
    ("B2", 8),
    ("B2-adjoint", 8),
    ("C2", 8),
    ("C2-adjoint", 8),
    ("G2", 8),
    ("GL2", 8),
    ("GL3", 8),
    ("A1xA1", 8),
    ("A1-adxA1-ad", 8),
];

/// Largest first coordinate for GL_n coweights (last coordinate is 0).
pub const GL_MAX_ENTRY: i32 = 4;

pub fn two_rho_pairing(rd: &RootDatum, mu: &LatticeVec) -> i32 {
    rd.pairing(mu, &rd.two_rho()).unwrap()
}

fn is_regular(rd: &RootDatum, mu: &LatticeVec) -> bool {
    (0..rd.rank()).all(|i| mu.dot(&rd.simple_root(i)) > 0)
}

/// Dominant coweights with `⟨μ,2ρ⟩ ≤ bound`. Semisimple data are enumerated
/// in fundamental-coweight coordinates; GL_n up to central translation with
/// last coordinate 0. For GL3 regular coweights the bound drops to 6.
pub fn dominant_coweights(rd: &RootDatum, datum: &str, bound: i32) -> Vec<LatticeVec> {
    let mut out = Vec::new();
    if rd.is_semisimple() {
        let r = rd.rank();
        let mut m = vec![0i64; r];
        loop {
            if let Ok(mu) = rd.coweight_from_fundamental(&m) {
                if two_rho_pairing(rd, &mu) <= bound {
                    out.push(mu);
                }
            }
            let mut i = 0;
            while i < r {
                m[i] += 1;
                if m[i] <= bound as i64 {
                    break;
                }
                m[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
    } else {
        let n = rd.dim();
        let mut v = vec![0i32; n];
        gl_rec(rd, &mut v, 0, GL_MAX_ENTRY, bound, &mut out);
    }
    if datum == "GL3" {
        out.retain(|mu| !is_regular(rd, mu) || two_rho_pairing(rd, mu) <= 6);
    }
    out.sort_by_key(|mu| (two_rho_pairing(rd, mu), mu.as_slice().to_vec()));
    out
}

fn gl_rec(rd: &RootDatum, v: &mut Vec<i32>, i: usize, max: i32, bound: i32, out: &mut Vec<LatticeVec>) {
    if i + 1 == v.len() {
        v[i] = 0;
        let mu = LatticeVec::from_slice(v);
        if two_rho_pairing(rd, &mu) <= bound {
            out.push(mu);
        }
        return;
    }
    for a in 0..=max {
        v[i] = a;
        gl_rec(rd, v, i + 1, a, bound, out);
    }
}

/// All spherical subsets of simple affine nodes.
pub fn spherical_subsets(rd: &RootDatum) -> Vec<Vec<usize>> {
    let n = rd.simple_affine().len();
    (0..1usize << n)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|k| rd.is_spherical(k))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub datum: &'static str,
    pub mu: LatticeVec,
    pub k: Vec<usize>,
}

impl std::fmt::Display for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mu={} K={:?}", self.datum, self.mu, self.k)
    }
}

pub fn fixtures(data: &[(&'static str, i32)]) -> Vec<Fixture> {
    let mut out = Vec::new();
    for &(datum, bound) in data {
        let rd = RootDatum::preset(datum).unwrap();
        let ks = spherical_subsets(&rd);
        for mu in dominant_coweights(&rd, datum, bound) {
            for k in &ks {
                out.push(Fixture { datum, mu, k: k.clone() });
            }
        }
    }
    out
}

/// Outcome of the per-poset checks; `None` means the check passed.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub elements: usize,
    pub intervals: usize,
    pub dual_el: Option<String>,
    pub ideals: Option<String>,
    pub ideals_checked: usize,
    pub coatom_and_cm: Option<String>,
    pub a_min: Option<String>,
    pub top_two: Option<String>,
    pub top_two_elements: usize,
    pub distinguished: Option<String>,
}

pub fn labeled<'g>(
    g: &'g AffineWeylGroup,
    mu: LatticeVec,
    k: &[usize],
) -> Result<(AdmissiblePoset<'g>, LabeledPoset), String> {
    let p = AdmissiblePoset::build(g, mu, k).map_err(|e| format!("build: {e}"))?;
    let types = RootTypes::new(&g.datum, k);
    let order = LabelOrder::build(&p, &types).map_err(|e| format!("label order: {e}"))?;
    let lp = label_poset(&p, &order).map_err(|e| format!("labelling: {e}"))?;
    Ok((p, lp))
}

pub fn run_fixture(fx: &Fixture, jobs: usize) -> Outcome {
    let g = AffineWeylGroup::preset(fx.datum).unwrap();
    let mut out = Outcome::default();
    let (p, lp) = match labeled(&g, fx.mu, &fx.k) {
        Ok(x) => x,
        Err(e) => {
            out.dual_el = Some(e.clone());
            out.ideals = Some(e.clone());
            out.coatom_and_cm = Some(e.clone());
            out.a_min = Some(e.clone());
            out.top_two = Some(e.clone());
            out.distinguished = Some(e);
            return out;
        }
    };
    out.elements = lp.len();
    let n = p.rank_n();

    let el = lp.verify_dual_el(jobs);
    out.intervals = el.intervals_checked;
    if !el.passed() {
        let v = &el.violations[0];
        out.dual_el = Some(format!("{} violations, first [{}, {}]", el.violations.len(), v.w, v.w_prime));
    }

    // Every initial segment of the eta-order.
    for c in 1..=p.wjk().len() {
        out.ideals_checked += 1;
        let r = match eta_ideal(&p, &lp, &p.wjk()[..c]) {
            Ok(r) => r,
            Err(e) => {
                out.ideals = Some(format!("C of size {c}: {e}"));
                break;
            }
        };
        if !r.verify_dual_el(jobs).passed() {
            out.ideals = Some(format!("C of size {c}: dual EL fails"));
            break;
        }
        match r.ncm_check(n) {
            Ok(true) => {}
            Ok(false) => {
                out.ideals = Some(format!("C of size {c}: not {n}-Cohen-Macaulay"));
                break;
            }
            Err(e) => {
                out.ideals = Some(format!("C of size {c}: {e}"));
                break;
            }
        }
    }

    if el.passed() {
        let co = lp.recursive_coatom_check();
        if !co.ok {
            out.coatom_and_cm = co.failure.clone();
        } else if co.ordering != p.maximal() {
            out.coatom_and_cm = Some("certified ordering is not the eta-order".into());
        } else {
            match lp.ncm_check(n) {
                Ok(true) => {}
                Ok(false) => out.coatom_and_cm = Some(format!("not {n}-Cohen-Macaulay")),
                Err(e) => out.coatom_and_cm = Some(e.to_string()),
            }
        }
    } else {
        out.coatom_and_cm = Some("fixture does not pass dual EL".into());
    }

    for i in 0..p.len() {
        match p.compute_sigma(i) {
            Ok(s) => {
                let pos = p.wjk().iter().position(|&a| a == s.a_min_k).unwrap();
                let coatom = p.maximal()[pos];
                if out.distinguished.is_none() {
                    match lp.distinguished_chain(i, coatom) {
                        Ok(chain) if chain.len() as u32 == lp.grade(lp.top()) - lp.grade(i) + 1 => {}
                        Ok(_) => out.distinguished = Some("chain is not maximal".into()),
                        Err(e) => out.distinguished = Some(e.to_string()),
                    }
                }
            }
            Err(e) => {
                out.a_min = Some(format!("{}: {e}", g.element_name(p.element(i))));
                break;
            }
        }
    }

    let types = RootTypes::new(&g.datum, &fx.k);
    match p.top_two_report(&types) {
        Ok(r) => {
            let expected = (0..p.len()).filter(|&i| n > 0 && p.length(i) + 1 == n).count();
            out.top_two_elements = r.len();
            if r.len() != expected {
                out.top_two = Some(format!("{} records for {expected} elements", r.len()));
            }
        }
        Err(e) => out.top_two = Some(e.to_string()),
    }
    out
}

/// Weights of all walks of each length from `u`, by dynamic programming:
/// `sets[len][v]` is the set of weights of walks of length `len` ending at `v`.
pub fn walk_weights(g: &AffineWeylGroup, u: FiniteElement, max_len: usize) -> Vec<Vec<BTreeSet<Vec<i32>>>> {
    let q = g.qbg();
    let n = g.finite.order();
    let mut sets = vec![vec![BTreeSet::new(); n]];
    sets[0][u.index()].insert(vec![0; g.dim()]);
    for len in 0..max_len {
        let mut next = vec![BTreeSet::new(); n];
        for v in g.finite.elements() {
            for wt in &sets[len][v.index()] {
                for e in q.edges_from(v) {
                    let mut w = wt.clone();
                    if e.quantum {
                        let c = g.datum.coroot(e.root as usize);
                        for (x, y) in w.iter_mut().zip(c.as_slice()) {
                            *x += y;
                        }
                    }
                    next[e.target.index()].insert(w);
                }
            }
        }
        sets.push(next);
    }
    sets
}

pub fn names(v: &[String]) -> HashSet<String> {
    v.iter().cloned().collect()
}
