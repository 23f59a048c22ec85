//! Command-line front end. Exit codes: 0 success, 1 property violation,
//! 2 invalid input.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::admissible::AdmissiblePoset;
use crate::affine::AffineWeylGroup;
use crate::error::{input, Error, Result};
use crate::export::{self, Header, PosetJson};
use crate::labeling::{label_poset, parse_label, LabelOrder, RootTypes};
use crate::qbg::Path;
use crate::rootdata::{LatticeVec, RootDatum};
use crate::shellcheck::{eta_ideal, LabeledPoset};
use crate::weyl::{FiniteElement, WeylGroup};

#[derive(Parser, Debug)]
#[command(name = "admshell", version, about = "Admissible sets, dual EL-labelings and the quantum Bruhat graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and label the augmented poset Adm(mu)^K with a top element.
    Adm(AdmArgs),
    /// Build, label and check dual EL-shellability and Cohen-Macaulayness.
    Verify(VerifyArgs),
    /// Quantum Bruhat graph of the finite Weyl group.
    Qbg(QbgArgs),
    /// Spherical sigma-Coxeter elements of Adm(mu)^K.
    Cox(CoxArgs),
    /// The eta-order on W^{J,K}, which orders the irreducible components.
    ShellOrder(PosetArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MuBasis {
    /// Coordinates in the cocharacter lattice of the datum.
    Ambient,
    /// Fundamental-coweight coordinates (semisimple data).
    Fw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckLevel {
    /// Dual EL on every interval, the recursive coatom ordering and the Cohen-Macaulay test.
    Fast,
    /// Also Sigma_w, distinguished chains and the elements below the translations.
    Full,
}

#[derive(Args, Debug)]
pub struct PosetArgs {
    /// Preset such as GL3, A2, B2-adjoint or A1xA1.
    #[arg(long)]
    pub datum: String,
    /// Dominant coweight, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, value_enum, default_value = "ambient")]
    pub mu_basis: MuBasis,
    /// Simple affine nodes such as "a0,a2"; empty for the Iwahori case.
    #[arg(long = "K", default_value = "")]
    pub k: String,
    #[arg(long, value_enum, default_value = "text")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct AdmArgs {
    #[command(flatten)]
    pub poset: PosetArgs,
    /// File listing the label order, ascending, one label per line.
    #[arg(long)]
    pub order: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Preset such as GL3, A2, B2-adjoint or A1xA1.
    #[arg(long, required_unless_present = "poset")]
    pub datum: Option<String>,
    /// Dominant coweight, comma separated.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "poset")]
    pub mu: Option<String>,
    #[arg(long, value_enum, default_value = "ambient")]
    pub mu_basis: MuBasis,
    /// Simple affine nodes such as "a0,a2"; empty for the Iwahori case.
    #[arg(long = "K", default_value = "")]
    pub k: String,
    /// File listing the label order, ascending, one label per line.
    #[arg(long)]
    pub order: Option<std::path::PathBuf>,
    /// Verify a poset previously exported with `adm --out json`.
    #[arg(long, conflicts_with_all = ["datum", "mu", "order", "ideal"])]
    pub poset: Option<std::path::PathBuf>,
    /// Restrict to an initial segment C of the eta-order, e.g. "s1;s2 s1".
    #[arg(long)]
    pub ideal: Option<String>,
    /// Worker threads for interval verification (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value = "fast")]
    pub check: CheckLevel,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct QbgArgs {
    /// Preset such as A2, B3 or G2.
    #[arg(long)]
    pub datum: String,
    /// Distance and weight of shortest paths between two reduced words.
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_hyphen_values = true)]
    pub wt: Option<Vec<String>>,
    /// A shortest path whose Bruhat edges all follow its quantum edges.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub downup: Option<Vec<String>>,
    /// A shortest path whose quantum edges all follow its Bruhat edges.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub updown: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "dot")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct CoxArgs {
    #[command(flatten)]
    pub poset: PosetArgs,
    /// Diagram automorphism as the images of the nodes in order, e.g. "a0,a2,a1".
    #[arg(long)]
    pub sigma: Option<String>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Input(_) => 2,
                Error::Property(_) => 1,
            }
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    let text = match cmd {
        Command::Adm(a) => cmd_adm(a)?,
        Command::Verify(v) => return cmd_verify(v, out),
        Command::Qbg(q) => cmd_qbg(q)?,
        Command::Cox(c) => cmd_cox(c)?,
        Command::ShellOrder(p) => cmd_shell_order(p)?,
    };
    write_out(out, &text)?;
    Ok(0)
}

fn write_out(out: &mut dyn Write, s: &str) -> Result<()> {
    out.write_all(s.as_bytes()).map_err(|e| Error::Input(format!("writing output: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn parse_mu(rd: &RootDatum, s: &str, basis: MuBasis) -> Result<LatticeVec> {
    let coords: Vec<i64> = s
        .split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Input(format!("bad coordinate {t:?} in mu"))))
        .collect::<Result<_>>()?;
    let mu = match basis {
        MuBasis::Fw => rd.coweight_from_fundamental(&coords)?,
        MuBasis::Ambient => {
            if coords.len() != rd.dim() {
                return input(format!("mu needs {} coordinates", rd.dim()));
            }
            if coords.iter().any(|&c| i32::try_from(c).is_err()) {
                return input("mu coordinate out of range");
            }
            LatticeVec::from_slice(&coords.iter().map(|&c| c as i32).collect::<Vec<_>>())
        }
    };
    if !rd.is_dominant(&mu) {
        return input(format!("mu = {mu} is not dominant"));
    }
    Ok(mu)
}

pub fn parse_k(rd: &RootDatum, s: &str) -> Result<Vec<usize>> {
    let mut k: Vec<usize> =
        s.split([',', ' ']).filter(|t| !t.is_empty()).map(|t| rd.parse_node(t)).collect::<Result<_>>()?;
    k.sort_unstable();
    k.dedup();
    Ok(k)
}

fn k_tokens(rd: &RootDatum, k: &[usize]) -> Vec<String> {
    k.iter().map(|&i| format!("a{}", rd.simple_affine()[i].name)).collect()
}

fn parse_vertex(w: &WeylGroup, s: &str) -> Result<FiniteElement> {
    w.parse_word(s)
}

fn read_order(g: &AffineWeylGroup, path: &std::path::Path) -> Result<LabelOrder> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))?;
    let labels = text
        .split(['\n', '≺', '<'])
        .map(|t| t.trim().replace('−', "-"))
        .filter(|t| !t.is_empty() && !t.starts_with('#'))
        .map(|t| parse_label(&g.datum, &g.finite, &t))
        .collect::<Result<Vec<_>>>()?;
    LabelOrder::from_labels(labels)
}

fn header(p: &AdmissiblePoset) -> Header {
    let g = p.group();
    Header {
        datum: g.datum.name().to_string(),
        mu: p.mu().as_slice().to_vec(),
        k: k_tokens(&g.datum, p.k()),
        wjk: p.wjk().iter().map(|&a| word_or_one(&g.finite, a)).collect(),
    }
}

fn word_or_one(w: &WeylGroup, a: FiniteElement) -> String {
    let s = w.word_string(a);
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn render_poset(lp: &LabeledPoset, h: Header, fmt: OutFormat) -> String {
    match fmt {
        OutFormat::Json => {
            let mut s = PosetJson::new(lp, h).to_json();
            s.push('\n');
            s
        }
        OutFormat::Dot => export::to_dot(lp),
        OutFormat::Text => export::to_text(lp),
    }
}

fn cmd_adm(a: &AdmArgs) -> Result<String> {
    let g = AffineWeylGroup::preset(&a.poset.datum)?;
    let mu = parse_mu(&g.datum, &a.poset.mu, a.poset.mu_basis)?;
    let k = parse_k(&g.datum, &a.poset.k)?;
    let p = AdmissiblePoset::build(&g, mu, &k)?;
    let order = match &a.order {
        Some(f) => read_order(&g, f)?,
        None => LabelOrder::build(&p, &RootTypes::new(&g.datum, &k))?,
    };
    let lp = label_poset(&p, &order).map_err(|e| Error::Input(e.to_string()))?;
    Ok(render_poset(&lp, header(&p), a.poset.out))
}

#[derive(Serialize)]
struct VerifyReport {
    status: &'static str,
    elements: usize,
    intervals_checked: usize,
    violations: Vec<crate::shellcheck::Violation>,
    label_order_invariants: Option<String>,
    coatom_ordering: Vec<String>,
    recursive_coatom_ordering: bool,
    recursive_coatom_failure: Option<String>,
    n: u32,
    n_cohen_macaulay: bool,
    full_checks: Option<Vec<String>>,
}

fn cmd_verify(v: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(path) = &v.poset {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))?;
        let lp = PosetJson::from_json(&text)?.to_labeled_poset()?;
        return finish_verify(&lp, None, None, v, out);
    }
    let datum = v.datum.as_deref().expect("required by clap");
    let g = AffineWeylGroup::preset(datum)?;
    let mu = parse_mu(&g.datum, v.mu.as_deref().expect("required by clap"), v.mu_basis)?;
    let k = parse_k(&g.datum, &v.k)?;
    let p = AdmissiblePoset::build(&g, mu, &k)?;
    let types = RootTypes::new(&g.datum, &k);
    let (order, invariants) = match &v.order {
        Some(f) => {
            let o = read_order(&g, f)?;
            let inv = o.check_invariants(&p, &types).err().map(|e| e.to_string());
            (o, inv)
        }
        None => (LabelOrder::build(&p, &types)?, None),
    };
    let full = label_poset(&p, &order).map_err(|e| Error::Input(e.to_string()))?;
    let full_checks = (v.check == CheckLevel::Full).then(|| full_checks(&p, &full, &types));
    let lp = match &v.ideal {
        Some(c) => {
            let c = c.split(';').map(|w| g.finite.parse_word(w)).collect::<Result<Vec<_>>>()?;
            eta_ideal(&p, &full, &c)?
        }
        None => full,
    };
    finish_verify(&lp, invariants, full_checks, v, out)
}

/// Per-element checks on the full poset: `a_min`, the distinguished chain
/// and the layer below the maximal elements. Returns the failures.
fn full_checks(p: &AdmissiblePoset, lp: &LabeledPoset, types: &RootTypes) -> Vec<String> {
    let g = p.group();
    let mut fails = Vec::new();
    for i in 0..p.len() {
        let name = g.element_name(p.element(i));
        match p.compute_sigma(i) {
            Ok(s) => {
                let pos = p.wjk().iter().position(|&a| a == s.a_min_k).expect("a_min lies in W^{J,K}");
                if let Err(e) = lp.distinguished_chain(i, p.maximal()[pos]) {
                    fails.push(format!("{name}: {e}"));
                }
            }
            Err(e) => fails.push(format!("{name}: {e}")),
        }
    }
    if let Err(e) = p.top_two_report(types) {
        fails.push(e.to_string());
    }
    fails
}

fn finish_verify(
    lp: &LabeledPoset,
    label_order_invariants: Option<String>,
    full_checks: Option<Vec<String>>,
    v: &VerifyArgs,
    out: &mut dyn Write,
) -> Result<i32> {
    let el = lp.verify_dual_el(v.jobs);
    let co = lp.recursive_coatom_check();
    let n = lp.grade(lp.top()) - 1;
    let ncm = lp.ncm_check(n)?;
    let ok = el.passed()
        && co.ok
        && ncm
        && label_order_invariants.is_none()
        && full_checks.as_ref().is_none_or(|f| f.is_empty());
    let report = VerifyReport {
        status: if ok { "PASS" } else { "FAIL" },
        elements: lp.len(),
        intervals_checked: el.intervals_checked,
        violations: el.violations,
        label_order_invariants,
        coatom_ordering: co.ordering.iter().map(|&c| lp.name(c).to_string()).collect(),
        recursive_coatom_ordering: co.ok,
        recursive_coatom_failure: co.failure,
        n,
        n_cohen_macaulay: ncm,
        full_checks,
    };
    let text = match v.out {
        OutFormat::Text => {
            let mut s = format!(
                "{}: {} elements, {} intervals, {} violations, recursive coatom ordering {}, {}-Cohen-Macaulay {}\n",
                report.status,
                report.elements,
                report.intervals_checked,
                report.violations.len(),
                report.recursive_coatom_ordering,
                report.n,
                report.n_cohen_macaulay
            );
            for x in &report.violations {
                s.push_str(&format!("  [{}, {}]: {} increasing chains\n", x.w, x.w_prime, x.increasing_chains));
            }
            if let Some(e) = &report.label_order_invariants {
                s.push_str(&format!("  label order: {e}\n"));
            }
            for f in report.full_checks.iter().flatten() {
                s.push_str(&format!("  {f}\n"));
            }
            s
        }
        _ => to_json(&report),
    };
    write_out(out, &text)?;
    Ok(if ok { 0 } else { 1 })
}

fn coroot_combination(rd: &RootDatum, v: &LatticeVec) -> String {
    let Some(c) = rd.coroot_coords(v) else { return v.to_string() };
    let mut s = String::new();
    for (i, &x) in c.iter().enumerate().filter(|(_, &x)| x != 0) {
        let sign = if x < 0 {
            "-"
        } else if s.is_empty() {
            ""
        } else {
            "+"
        };
        let coeff = if x.abs() == 1 { String::new() } else { x.abs().to_string() };
        s.push_str(&format!("{sign}{coeff}a{}^v", i + 1));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn path_json(g: &AffineWeylGroup, path: &Path, iterations: usize) -> serde_json::Value {
    let f = &g.finite;
    json!({
        "length": path.len(),
        "iterations": iterations,
        "edges": path.iter().map(|e| json!({
            "from": word_or_one(f, e.source),
            "to": word_or_one(f, e.target),
            "root": g.datum.root_name(e.root as usize),
            "quantum": e.quantum,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_qbg(q: &QbgArgs) -> Result<String> {
    let g = AffineWeylGroup::preset(&q.datum)?;
    let f = &g.finite;
    let graph = g.qbg();
    let pair = |v: &Vec<String>| -> Result<(FiniteElement, FiniteElement)> {
        Ok((parse_vertex(f, &v[0])?, parse_vertex(f, &v[1])?))
    };
    if let Some(v) = &q.wt {
        let (u, w) = pair(v)?;
        let (d, wt) = graph.distance_and_weight(u, w);
        return Ok(match q.out {
            OutFormat::Json => to_json(&json!({
                "d": d,
                "wt": wt.as_slice(),
                "wt_coroots": g.datum.coroot_coords(&wt),
            })),
            _ => format!("d={d} wt={}\n", coroot_combination(&g.datum, &wt)),
        });
    }
    for (spec, down_first) in [(&q.downup, true), (&q.updown, false)] {
        if let Some(v) = spec {
            let (u, w) = pair(v)?;
            let (path, it) = if down_first { graph.downup_path(u, w)? } else { graph.updown_path(u, w)? };
            return Ok(match q.out {
                OutFormat::Json => to_json(&path_json(&g, &path, it)),
                _ => {
                    let mut s = word_or_one(f, u);
                    for e in &path {
                        let kind = if e.quantum { "Q" } else { "B" };
                        s.push_str(&format!(
                            " -{kind}:{}-> {}",
                            g.datum.root_name(e.root as usize),
                            word_or_one(f, e.target)
                        ));
                    }
                    s.push('\n');
                    s
                }
            });
        }
    }
    Ok(match q.out {
        OutFormat::Dot => graph.to_dot(f, &g.datum),
        OutFormat::Json => to_json(&json!({
            "vertices": f.elements().map(|u| word_or_one(f, u)).collect::<Vec<_>>(),
            "edges": graph.edges().map(|e| json!({
                "from": word_or_one(f, e.source),
                "to": word_or_one(f, e.target),
                "root": g.datum.root_name(e.root as usize),
                "quantum": e.quantum,
            })).collect::<Vec<_>>(),
        })),
        OutFormat::Text => {
            let mut s = String::new();
            for e in graph.edges() {
                let kind = if e.quantum { "Q" } else { "B" };
                s.push_str(&format!(
                    "{} -> {}  {kind} {}\n",
                    word_or_one(f, e.source),
                    word_or_one(f, e.target),
                    g.datum.root_name(e.root as usize)
                ));
            }
            s
        }
    })
}

fn cmd_cox(c: &CoxArgs) -> Result<String> {
    let g = AffineWeylGroup::preset(&c.poset.datum)?;
    let mu = parse_mu(&g.datum, &c.poset.mu, c.poset.mu_basis)?;
    let k = parse_k(&g.datum, &c.poset.k)?;
    let p = AdmissiblePoset::build(&g, mu, &k)?;
    let sigma = match &c.sigma {
        Some(s) => Some(
            s.split([',', ' ']).filter(|t| !t.is_empty()).map(|t| g.datum.parse_node(t)).collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let cs = p.coxeter_subset(sigma.as_deref())?;
    let name = |i: usize| g.element_name(p.element(i));
    Ok(match c.poset.out {
        OutFormat::Json => to_json(&json!({
            "members": cs.members.iter().map(|&i| name(i)).collect::<Vec<_>>(),
            "covers": cs.covers.iter().map(|&(u, l)| [name(u), name(l)]).collect::<Vec<_>>(),
        })),
        OutFormat::Dot => {
            let mut s = String::from("digraph cox {\n");
            for &i in &cs.members {
                s.push_str(&format!("  n{i} [label=\"{}\"];\n", name(i)));
            }
            for &(u, l) in &cs.covers {
                s.push_str(&format!("  n{u} -> n{l};\n"));
            }
            s.push_str("}\n");
            s
        }
        OutFormat::Text => {
            let mut s = format!("{} elements\n", cs.members.len());
            for &i in &cs.members {
                s.push_str(&format!("{}\n", name(i)));
            }
            for &(u, l) in &cs.covers {
                s.push_str(&format!("{} > {}\n", name(u), name(l)));
            }
            s
        }
    })
}

fn cmd_shell_order(a: &PosetArgs) -> Result<String> {
    let g = AffineWeylGroup::preset(&a.datum)?;
    let mu = parse_mu(&g.datum, &a.mu, a.mu_basis)?;
    let k = parse_k(&g.datum, &a.k)?;
    let p = AdmissiblePoset::build(&g, mu, &k)?;
    let rows: Vec<(String, String)> = p
        .wjk()
        .iter()
        .zip(p.maximal())
        .map(|(&a, &m)| (word_or_one(&g.finite, a), g.translation_name(p.element(m))))
        .collect();
    Ok(match a.out {
        OutFormat::Json => to_json(&json!({
            "order": rows.iter().map(|(a, t)| json!({"a": a, "translation": t})).collect::<Vec<_>>(),
        })),
        _ => rows.iter().map(|(a, t)| format!("{a}  {t}\n")).collect(),
    })
}
