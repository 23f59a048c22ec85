//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::HashSet;
use std::time::Instant;

use admshell::admissible::{adm_membership, AdmissiblePoset};
use admshell::affine::{AffineElement, AffineWeylGroup};
use admshell::labeling::{label_poset, parse_label, LabelOrder, RootTypes};
use admshell::qbg::QuantumBruhatGraph;
use admshell::rootdata::{LatticeVec, RootDatum};
use admshell::weyl::FiniteElement;
use rayon::prelude::*;

use common::*;

type Check = Result<String, String>;

fn main() {
    let start = Instant::now();
    let mut lines: Vec<(usize, &str, Check, f64)> = Vec::new();
    let mut timed = |id: usize, name: &'static str, f: &dyn Fn() -> Check| {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {id:>2}: {} {name}: {} ({secs:.1}s)", status(&r), detail(&r));
        lines.push((id, name, r, secs));
    };

    timed(1, "GL3 worked example", &criterion_1);
    let t = Instant::now();
    let matrix = run_matrix();
    println!("verification matrix: {} posets built and checked in {:.1}s", matrix.len(), t.elapsed().as_secs_f64());
    timed(2, "dual EL on the verification matrix", &|| matrix_line(&matrix, |o| &o.dual_el));
    timed(3, "ideal restrictions", &|| matrix_line(&matrix, |o| &o.ideals));
    timed(4, "dual EL implies recursive coatoms and N-CM", &|| matrix_line(&matrix, |o| &o.coatom_and_cm));
    timed(5, "QBG shortest path weights", &criterion_5);
    timed(6, "down-up and up-down paths", &criterion_6);
    timed(7, "Bruhat order via weights and Adm membership", &criterion_7);
    timed(8, "a_min and Sigma_w", &|| matrix_line(&matrix, |o| &o.a_min));
    timed(9, "elements just below the translations", &|| matrix_line(&matrix, |o| &o.top_two));
    timed(10, "A4 Coxeter figure", &criterion_10);
    timed(11, "GL4 minuscule regression", &criterion_11);

    let failed: Vec<usize> = lines.iter().filter(|l| l.2.is_err()).map(|l| l.0).collect();
    println!(
        "acceptance: {}/{} criteria pass in {:.1}s",
        lines.len() - failed.len(),
        lines.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}

fn status(r: &Check) -> &'static str {
    if r.is_ok() {
        "PASS"
    } else {
        "FAIL"
    }
}

fn detail(r: &Check) -> &str {
    match r {
        Ok(s) | Err(s) => s,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let g = AffineWeylGroup::preset("GL3").unwrap();
    let f = &g.finite;
    let v = |x: &[i32]| LatticeVec::from_slice(x);
    let p = AdmissiblePoset::build(&g, v(&[1, 0, 0]), &[1]).map_err(|e| e.to_string())?;
    let word = |s: &str| g.from_finite(f.parse_word(s).unwrap());
    let t = |x: &[i32]| g.translation(v(x));

    // s0 = t^{(1,0,-1)} s1 s2 s1 and tau = s1 s2 t^{(0,0,1)}.
    let s0 = g.simple_reflection(g.datum.parse_node("a0").unwrap());
    ensure(s0 == g.mul(&t(&[1, 0, -1]), &word("s1 s2 s1")), || "s0 convention".into())?;
    let tau = g.mul(&word("s1 s2"), &t(&[0, 0, 1]));
    ensure(g.length(&tau) == 0, || "tau has positive length".into())?;
    let name = |w: &AffineElement| g.element_name(w);
    let identities = [
        (tau, "tau"),
        (t(&[0, 1, 0]), "tau s0 s2"),
        (t(&[0, 0, 1]), "tau s1 s0"),
        (g.mul(&word("s1"), &t(&[0, 1, 0])), "tau s2"),
        (g.mul(&word("s2"), &t(&[0, 0, 1])), "tau s0"),
    ];
    for (w, n) in &identities {
        ensure(name(w) == *n, || format!("{} is named {}, expected {n}", w, name(w)))?;
        ensure(p.index_of(w).is_some(), || format!("{n} missing from Adm(mu)^K"))?;
    }
    ensure(p.len() == 5, || format!("Adm(mu)^K has {} elements", p.len()))?;

    let printed = ["(-a2,1)", "(-a1-a2,1)", "eta(s1)", "eta(s2 s1)", "(-a1,1)", "(a2,0)"];
    let labels = printed.iter().map(|s| parse_label(&g.datum, f, s)).collect::<Result<Vec<_>, _>>();
    let order = LabelOrder::from_labels(labels.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let types = RootTypes::new(&g.datum, &[1]);
    order.check_invariants(&p, &types).map_err(|e| format!("printed order: {e}"))?;
    let lp = label_poset(&p, &order).map_err(|e| e.to_string())?;
    ensure(lp.len() == 6, || "augmented poset size".into())?;

    let mut edges = HashSet::new();
    for u in 0..lp.len() {
        for &(l, lab) in lp.covers_down(u) {
            edges.insert((lp.name(u).to_string(), lp.name(l).to_string(), lp.label_name(lab).to_string()));
        }
    }
    let expect: HashSet<(String, String, String)> = [
        ("1^", "tau s0 s2", "eta(s1)"),
        ("1^", "tau s1 s0", "eta(s2 s1)"),
        ("tau s0 s2", "tau s2", "(-a1,1)"),
        ("tau s0 s2", "tau s0", "(a2,0)"),
        ("tau s1 s0", "tau s0", "(-a2,1)"),
        ("tau s2", "tau", "(a2,0)"),
        ("tau s0", "tau", "(-a1-a2,1)"),
    ]
    .iter()
    .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
    .collect();
    ensure(edges == expect, || format!("edges differ: {edges:?}"))?;
    let labels_used: HashSet<&String> = edges.iter().map(|e| &e.2).collect();
    ensure(labels_used.len() == 6, || "expected 6 distinct labels".into())?;

    let r = lp.verify_dual_el(1);
    ensure(r.passed(), || format!("printed order: {} violations", r.violations.len()))?;
    let built = LabelOrder::build(&p, &types).map_err(|e| e.to_string())?;
    let r2 = label_poset(&p, &built).map_err(|e| e.to_string())?.verify_dual_el(1);
    ensure(r2.passed(), || "constructed order fails".into())?;
    Ok(format!("6 elements, 7 covers, {} intervals", r.intervals_checked))
}

fn run_matrix() -> Vec<(Fixture, Outcome)> {
    let fx = fixtures(MATRIX);
    let mut out: Vec<(Fixture, Outcome)> = fx
        .into_par_iter()
        .map(|f| {
            let o = run_fixture(&f, 1);
            (f, o)
        })
        .collect();
    out.sort_by_key(|(f, _)| (f.datum, f.mu.as_slice().to_vec(), f.k.clone()));
    out
}

fn matrix_line(m: &[(Fixture, Outcome)], pick: impl Fn(&Outcome) -> &Option<String>) -> Check {
    let fails: Vec<String> = m.iter().filter_map(|(f, o)| pick(o).as_ref().map(|e| format!("{f}: {e}"))).collect();
    let intervals: usize = m.iter().map(|(_, o)| o.intervals).sum();
    let elements: usize = m.iter().map(|(_, o)| o.elements).sum();
    if fails.is_empty() {
        Ok(format!("{} posets, {elements} elements, {intervals} intervals", m.len()))
    } else {
        Err(format!("{} of {} posets fail; first {}", fails.len(), m.len(), fails[0]))
    }
}

const QBG_TYPES: &[&str] = &["A1", "A2", "A3", "B2", "B3", "C3", "G2"];

fn criterion_5() -> Check {
    let mut pairs = 0usize;
    let mut triples = 0usize;
    let mut walks = 0usize;
    for ty in QBG_TYPES {
        let g = AffineWeylGroup::preset(ty).unwrap();
        let f = &g.finite;
        let q = g.qbg();
        let rd = &g.datum;
        ensure(q.is_strongly_connected(), || format!("{ty}: not strongly connected"))?;
        let elements: Vec<FiniteElement> = f.elements().collect();
        let max_d = elements
            .iter()
            .flat_map(|&u| elements.iter().map(move |&v| (u, v)))
            .map(|(u, v)| q.dist(u, v))
            .max()
            .unwrap();
        let results: Vec<Result<usize, String>> = elements
            .par_iter()
            .map(|&u| {
                let sets = walk_weights(&g, u, max_d + 2);
                let mut count = 0;
                for &v in &elements {
                    let d = q.dist(u, v);
                    let wt = q.wt(u, v);
                    let shortest = &sets[d][v.index()];
                    let expect: std::collections::BTreeSet<Vec<i32>> = [wt.as_slice().to_vec()].into();
                    if *shortest != expect {
                        return Err(format!("{ty}: shortest paths {u}->{v} have weights {shortest:?}"));
                    }
                    for w in &sets[d + 2][v.index()] {
                        let diff = LatticeVec::from_slice(w) - wt;
                        if diff.is_zero() || !rd.in_coroot_cone(&diff) {
                            return Err(format!("{ty}: walk {u}->{v} of length d+2 has weight {w:?}"));
                        }
                        count += 1;
                    }
                    let below = f.bruhat_leq_finite(u, v);
                    if wt.is_zero() != below {
                        return Err(format!("{ty}: wt({u},{v}) = 0 disagrees with Bruhat order"));
                    }
                }
                Ok(count)
            })
            .collect();
        for r in results {
            walks += r?;
        }
        pairs += elements.len() * elements.len();
        if rd.rank() <= 3 {
            let bad = elements.par_iter().find_any(|&&u| {
                elements
                    .iter()
                    .any(|&v| elements.iter().any(|&w| !rd.coweight_le(&q.wt(u, w), &(q.wt(u, v) + q.wt(v, w)))))
            });
            ensure(bad.is_none(), || format!("{ty}: triangle inequality fails from {:?}", bad))?;
            triples += elements.len().pow(3);
        }
    }
    Ok(format!("{pairs} pairs, {walks} distinct (endpoint, weight) classes of length d+2 walks, {triples} triples"))
}

fn check_path(
    q: &QuantumBruhatGraph,
    u: FiniteElement,
    v: FiniteElement,
    path: &[admshell::qbg::Edge],
) -> Result<(), String> {
    let mut cur = u;
    for e in path {
        ensure(e.source == cur, || "path is not connected".into())?;
        ensure(q.edge(e.source, e.target) == Some(e), || "path uses a non-edge".into())?;
        cur = e.target;
    }
    ensure(cur == v, || "path ends elsewhere".into())?;
    ensure(path.len() == q.dist(u, v), || "path is not shortest".into())
}

fn criterion_6() -> Check {
    let mut pairs = 0;
    let mut max_iter = 0;
    for ty in QBG_TYPES {
        let g = AffineWeylGroup::preset(ty).unwrap();
        let q = g.qbg();
        let elements: Vec<FiniteElement> = g.finite.elements().collect();
        let cap = q.num_positive();
        let results: Vec<Result<usize, String>> = elements
            .par_iter()
            .map(|&u| {
                let mut worst = 0;
                for &v in &elements {
                    let d = q.dist(u, v);
                    let (p, it) = q.downup_path(u, v).map_err(|e| format!("{ty} {u}->{v}: {e}"))?;
                    check_path(q, u, v, &p).map_err(|e| format!("{ty} downup {u}->{v}: {e}"))?;
                    ensure(QuantumBruhatGraph::is_downup(&p), || format!("{ty} {u}->{v}: not down-up"))?;
                    ensure(it <= d * cap, || format!("{ty} {u}->{v}: {it} iterations"))?;
                    let (p2, it2) = q.updown_path(u, v).map_err(|e| format!("{ty} {u}->{v}: {e}"))?;
                    check_path(q, u, v, &p2).map_err(|e| format!("{ty} updown {u}->{v}: {e}"))?;
                    ensure(QuantumBruhatGraph::is_updown(&p2), || format!("{ty} {u}->{v}: not up-down"))?;
                    ensure(it2 <= d * cap, || format!("{ty} {u}->{v}: {it2} iterations"))?;
                    worst = worst.max(it).max(it2);
                }
                Ok(worst)
            })
            .collect();
        for r in results {
            max_iter = max_iter.max(r?);
        }
        pairs += elements.len() * elements.len();
    }
    Ok(format!("{pairs} pairs, at most {max_iter} rewriting steps"))
}

fn criterion_7() -> Check {
    let mut comparisons = 0usize;
    let mut memberships = 0usize;
    for (ty, max_len) in [("A2", 8), ("B2", 8), ("A3", 6)] {
        let g = AffineWeylGroup::preset(ty).unwrap();
        let ball = g.ball(&g.identity(), max_len);
        let pres: Vec<_> = ball.iter().map(|w| g.acute_presentations(w)).collect();
        for (w, p) in ball.iter().zip(&pres) {
            ensure(!p.is_empty(), || format!("{ty}: {w} has no acute presentation"))?;
        }
        let bad = (0..ball.len()).into_par_iter().find_map_any(|i| {
            ball.iter().find_map(|w2| {
                let direct = g.bruhat_leq(&ball[i], w2);
                let all = if g.length(&ball[i]) <= 3 { &pres[i][..] } else { &pres[i][..1] };
                all.iter().any(|p| g.bruhat_leq_via_wt(p, w2) != direct).then(|| format!("{ty}: {} <= {w2}", ball[i]))
            })
        });
        if let Some(b) = bad {
            return Err(b);
        }
        comparisons += ball.len() * ball.len();

        let rd = &g.datum;
        for mu in dominant_coweights(rd, ty, 6) {
            let translations: Vec<AffineElement> =
                g.finite.elements().map(|z| g.translation(g.finite.apply(z, &mu))).collect();
            for (w, ps) in ball.iter().zip(&pres) {
                let brute = translations.iter().any(|t| g.bruhat_leq(w, t));
                for p in ps {
                    let via = adm_membership(&g, p, &mu).map_err(|e| e.to_string())?;
                    ensure(via == brute, || format!("{ty} mu={mu}: membership of {w}"))?;
                }
                memberships += 1;
            }
        }
    }
    Ok(format!("{comparisons} ordered pairs, {memberships} membership tests"))
}

fn reversed(word: &str) -> String {
    let mut v: Vec<&str> = word.split(' ').collect();
    v.reverse();
    v.join(" ")
}

fn criterion_10() -> Check {
    let g = AffineWeylGroup::preset("A4").unwrap();
    let rd: &RootDatum = &g.datum;
    let mu = rd.coweight_from_fundamental(&[1, 0, 0, 1]).map_err(|e| e.to_string())?;
    let k: Vec<usize> = ["a1", "a2", "a3", "a4"].iter().map(|t| rd.parse_node(t).unwrap()).collect();
    let p = AdmissiblePoset::build(&g, mu, &k).map_err(|e| e.to_string())?;
    let cs = p.coxeter_subset(None).map_err(|e| e.to_string())?;
    // The figure writes elements with the opposite multiplication convention,
    // so its words are the reverses of ours.
    let name = |i: usize| {
        let n = g.element_name(p.element(i));
        if n == "1" {
            n
        } else {
            reversed(&n)
        }
    };
    let printed = [
        "1",
        "s0",
        "s0 s4",
        "s0 s1",
        "s0 s4 s3",
        "s0 s4 s1",
        "s0 s1 s2",
        "s0 s4 s3 s2",
        "s0 s4 s3 s1",
        "s0 s4 s1 s2",
        "s0 s1 s2 s3",
    ];
    let got: HashSet<String> = cs.members.iter().map(|&i| name(i)).collect();
    let want: HashSet<String> = printed.iter().map(|s| s.to_string()).collect();
    ensure(got == want, || format!("members differ: {got:?}"))?;
    let printed_edges = [
        ("1", "s0"),
        ("s0", "s0 s4"),
        ("s0", "s0 s1"),
        ("s0 s4", "s0 s4 s3"),
        ("s0 s4", "s0 s4 s1"),
        ("s0 s1", "s0 s4 s1"),
        ("s0 s1", "s0 s1 s2"),
        ("s0 s4 s3", "s0 s4 s3 s2"),
        ("s0 s4 s3", "s0 s4 s3 s1"),
        ("s0 s4 s1", "s0 s4 s3 s1"),
        ("s0 s4 s1", "s0 s4 s1 s2"),
        ("s0 s1 s2", "s0 s4 s1 s2"),
        ("s0 s1 s2", "s0 s1 s2 s3"),
    ];
    let got_edges: HashSet<(String, String)> = cs.covers.iter().map(|&(u, l)| (name(l), name(u))).collect();
    let want_edges: HashSet<(String, String)> =
        printed_edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure(got_edges == want_edges, || format!("Hasse diagram differs: {got_edges:?}"))?;
    Ok(format!("{} elements, {} covers", cs.members.len(), cs.covers.len()))
}

fn criterion_11() -> Check {
    let rd = RootDatum::preset("GL4").unwrap();
    let mut fx = Vec::new();
    for mu in [[1, 0, 0, 0], [1, 1, 0, 0]] {
        for k in spherical_subsets(&rd) {
            fx.push(Fixture { datum: "GL4", mu: LatticeVec::from_slice(&mu), k });
        }
    }
    let results: Vec<Result<(usize, usize), String>> = fx
        .par_iter()
        .map(|f| {
            let g = AffineWeylGroup::preset(f.datum).unwrap();
            let (p, lp) = labeled(&g, f.mu, &f.k).map_err(|e| format!("{f}: {e}"))?;
            let r = lp.verify_dual_el(1);
            ensure(r.passed(), || format!("{f}: {} violations", r.violations.len()))?;
            ensure(lp.ncm_check(p.rank_n()).map_err(|e| e.to_string())?, || format!("{f}: not Cohen-Macaulay"))?;
            Ok((lp.len(), r.intervals_checked))
        })
        .collect();
    let mut elements = 0;
    let mut intervals = 0;
    for r in results {
        let (e, i) = r?;
        elements += e;
        intervals += i;
    }
    Ok(format!("{} posets, {elements} elements, {intervals} intervals", fx.len()))
}
