//! Based root data: roots and coroots in ambient lattice coordinates,
//! Cartan pairings, positive roots, highest roots and affine roots.
//!
//! Roots live in `X^*` and coroots in `X_*`, both written in a fixed
//! lattice basis so that `GL_n` and the simply connected / adjoint forms of
//! a semisimple type share one code path. Root indices `0..m` are the
//! positive roots, `m..2m` their negatives in the same order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{input, property, Error, Result};

pub const MAX_RANK: usize = 8;

pub type Q = Ratio<i64>;

/// Integer vector of length at most [`MAX_RANK`], used for weights and coweights.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVec {
    len: u8,
    c: [i32; MAX_RANK],
}

impl LatticeVec {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_RANK, "lattice rank {len} exceeds {MAX_RANK}");
        LatticeVec { len: len as u8, c: [0; MAX_RANK] }
    }

    pub fn from_slice(v: &[i32]) -> Self {
        let mut out = Self::zero(v.len());
        out.c[..v.len()].copy_from_slice(v);
        out
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut out = Self::zero(len);
        out.c[i] = 1;
        out
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.c[..self.len as usize]
    }

    pub fn get(&self, i: usize) -> i32 {
        self.c[i]
    }

    pub fn set(&mut self, i: usize, v: i32) {
        self.c[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&x| x == 0)
    }

    pub fn dot(&self, other: &LatticeVec) -> i32 {
        debug_assert_eq!(self.len, other.len);
        self.as_slice().iter().zip(other.as_slice()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: i32) -> Self {
        let mut out = *self;
        for x in &mut out.c[..self.len as usize] {
            *x *= k;
        }
        out
    }
}

impl Add for LatticeVec {
    type Output = LatticeVec;
    fn add(self, rhs: LatticeVec) -> LatticeVec {
        debug_assert_eq!(self.len, rhs.len);
        let mut out = self;
        for i in 0..self.len as usize {
            out.c[i] += rhs.c[i];
        }
        out
    }
}

impl Sub for LatticeVec {
    type Output = LatticeVec;
    fn sub(self, rhs: LatticeVec) -> LatticeVec {
        self + (-rhs)
    }
}

impl Neg for LatticeVec {
    type Output = LatticeVec;
    fn neg(self) -> LatticeVec {
        self.scale(-1)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for LatticeVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i32>::deserialize(d)?;
        if v.len() > MAX_RANK {
            return Err(serde::de::Error::custom("vector too long"));
        }
        Ok(LatticeVec::from_slice(&v))
    }
}

/// Affine root `(α, k)`; `root` indexes the datum's root list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AffineRoot {
    pub root: u16,
    pub level: i32,
}

impl AffineRoot {
    pub fn new(root: usize, level: i32) -> Self {
        AffineRoot { root: root as u16, level }
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    /// Indices of the simple roots in this component.
    pub simples: Vec<usize>,
    /// Index of the highest root θ of the component.
    pub highest: usize,
}

/// A node of the affine Dynkin diagram.
#[derive(Clone, Debug)]
pub struct SimpleAffine {
    pub root: AffineRoot,
    /// Display name: "0", "0_2" for products, or "1".."r".
    pub name: String,
    pub component: usize,
    /// `Some(i)` when this is the finite simple root α_{i+1}.
    pub finite: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    name: String,
    dim: usize,
    simple_roots: Vec<LatticeVec>,
    simple_coroots: Vec<LatticeVec>,
    cartan: Vec<Vec<i32>>,
    roots: Vec<LatticeVec>,
    coroots: Vec<LatticeVec>,
    coeffs: Vec<Vec<i32>>,
    npos: usize,
    index: HashMap<LatticeVec, usize>,
    components: Vec<Component>,
    comp_of_simple: Vec<usize>,
    two_rho: LatticeVec,
    refl: Vec<u16>,
    pair: Vec<i32>,
    coroot_num: Vec<Vec<i64>>,
    coroot_den: i64,
    simple_affine: Vec<SimpleAffine>,
}

fn cartan_matrix(kind: char, n: usize) -> Result<Vec<Vec<i32>>> {
    let mut c = vec![vec![0; n]; n];
    for i in 0..n {
        c[i][i] = 2;
    }
    let chain = |c: &mut Vec<Vec<i32>>, upto: usize| {
        for i in 0..upto.saturating_sub(1) {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
    };
    match kind {
        'A' if n >= 1 => chain(&mut c, n),
        'B' if n >= 2 => {
            chain(&mut c, n);
            c[n - 1][n - 2] = -2;
        }
        'C' if n >= 2 => {
            chain(&mut c, n);
            c[n - 2][n - 1] = -2;
        }
        'D' if n >= 4 => {
            chain(&mut c, n - 1);
            c[n - 3][n - 1] = -1;
            c[n - 1][n - 3] = -1;
        }
        'G' if n == 2 => {
            c[0][1] = -3;
            c[1][0] = -1;
        }
        _ => return input(format!("unsupported Cartan type {kind}{n}")),
    }
    Ok(c)
}

struct Factor {
    dim: usize,
    roots: Vec<Vec<i32>>,
    coroots: Vec<Vec<i32>>,
}

fn parse_factor(tok: &str) -> Result<Factor> {
    let tok = tok.trim();
    if let Some(n) = tok.strip_prefix("GL") {
        let n: usize = n.parse().map_err(|_| Error::Input(format!("bad preset {tok}")))?;
        if !(2..=MAX_RANK).contains(&n) {
            return input(format!("GL_n needs 2 <= n <= {MAX_RANK}"));
        }
        let mut roots = Vec::new();
        for i in 0..n - 1 {
            let mut v = vec![0; n];
            v[i] = 1;
            v[i + 1] = -1;
            roots.push(v);
        }
        return Ok(Factor { dim: n, coroots: roots.clone(), roots });
    }
    let (body, adjoint) = if let Some(b) = tok.strip_suffix("-adjoint") {
        (b, true)
    } else if let Some(b) = tok.strip_suffix("-ad") {
        (b, true)
    } else if let Some(b) = tok.strip_suffix("-sc") {
        (b, false)
    } else {
        (tok, false)
    };
    let mut chars = body.chars();
    let kind = chars.next().ok_or_else(|| Error::Input("empty preset".into()))?;
    let n: usize = chars.as_str().parse().map_err(|_| Error::Input(format!("bad preset {tok}")))?;
    if n > MAX_RANK {
        return input(format!("rank {n} exceeds {MAX_RANK}"));
    }
    let c = cartan_matrix(kind, n)?;
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        if adjoint {
            let mut e = vec![0; n];
            e[i] = 1;
            roots.push(e);
            coroots.push(c[i].clone());
        } else {
            let mut e = vec![0; n];
            e[i] = 1;
            coroots.push(e);
            roots.push((0..n).map(|r| c[r][i]).collect());
        }
    }
    Ok(Factor { dim: n, roots, coroots })
}

/// Solves `A x = b` over the rationals for square `A`; `None` if singular.
pub(crate) fn solve_rational(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != Q::from_integer(0))?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != Q::from_integer(0) {
                let f = m[r][col];
                for k in col..=n {
                    let v = m[col][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl RootDatum {
    /// Builds a preset such as "A2", "B2-adjoint", "GL3" or "A1xA1".
    pub fn preset(spec: &str) -> Result<RootDatum> {
        let factors: Vec<Factor> = spec.split(['x', '×']).map(parse_factor).collect::<Result<_>>()?;
        let dim: usize = factors.iter().map(|f| f.dim).sum();
        if dim > MAX_RANK {
            return input(format!("total lattice rank {dim} exceeds {MAX_RANK}"));
        }
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        let mut offset = 0;
        for f in &factors {
            for (r, c) in f.roots.iter().zip(&f.coroots) {
                let mut rv = vec![0; dim];
                let mut cv = vec![0; dim];
                rv[offset..offset + f.dim].copy_from_slice(r);
                cv[offset..offset + f.dim].copy_from_slice(c);
                roots.push(rv);
                coroots.push(cv);
            }
            offset += f.dim;
        }
        Self::from_explicit(spec, dim, &roots, &coroots)
    }

    /// Builds a datum from explicit simple roots (in `X^*`) and simple coroots (in `X_*`).
    pub fn from_explicit(
        name: &str,
        dim: usize,
        simple_roots: &[Vec<i32>],
        simple_coroots: &[Vec<i32>],
    ) -> Result<RootDatum> {
        let r = simple_roots.len();
        if r == 0 {
            return input("a root datum needs at least one simple root");
        }
        if dim > MAX_RANK {
            return input(format!("lattice rank {dim} exceeds {MAX_RANK}"));
        }
        if simple_coroots.len() != r {
            return input("number of simple roots and simple coroots differ");
        }
        if simple_roots.iter().chain(simple_coroots).any(|v| v.len() != dim) {
            return input(format!("root data of mismatched rank (expected length {dim})"));
        }
        let sr: Vec<LatticeVec> = simple_roots.iter().map(|v| LatticeVec::from_slice(v)).collect();
        let sc: Vec<LatticeVec> = simple_coroots.iter().map(|v| LatticeVec::from_slice(v)).collect();
        let cartan: Vec<Vec<i32>> = (0..r).map(|i| (0..r).map(|j| sc[i].dot(&sr[j])).collect()).collect();
        for i in 0..r {
            if cartan[i][i] != 2 {
                return input(format!("<a{0}^vee, a{0}> = {1}, expected 2", i + 1, cartan[i][i]));
            }
            for j in 0..r {
                if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                    return input("pairings do not form a Cartan matrix");
                }
            }
        }

        // Close the simple roots and coroots under simple reflections.
        let mut found: HashMap<LatticeVec, (LatticeVec, Vec<i32>)> = HashMap::new();
        let mut queue = Vec::new();
        for i in 0..r {
            let mut c = vec![0; r];
            c[i] = 1;
            queue.push((sr[i], sc[i], c));
        }
        while let Some((root, coroot, c)) = queue.pop() {
            if let Some((_, prev)) = found.get(&root) {
                if *prev != c {
                    return input("simple roots are linearly dependent");
                }
                continue;
            }
            found.insert(root, (coroot, c.clone()));
            if found.len() > 4096 {
                return input("root system is not of finite type");
            }
            for j in 0..r {
                let p = sc[j].dot(&root);
                let q = coroot.dot(&sr[j]);
                let mut c2 = c.clone();
                c2[j] -= p;
                queue.push((root - sr[j].scale(p), coroot - sc[j].scale(q), c2));
            }
        }
        let mut pos: Vec<(LatticeVec, LatticeVec, Vec<i32>)> = Vec::new();
        for (root, (coroot, c)) in &found {
            let nonneg = c.iter().all(|&x| x >= 0);
            let nonpos = c.iter().all(|&x| x <= 0);
            if !nonneg && !nonpos {
                return input("a root is neither positive nor negative");
            }
            if coroot.dot(root) != 2 {
                return property("a root pairs with its coroot to a value other than 2");
            }
            if found.contains_key(&root.scale(2)) {
                return input("root system is not reduced");
            }
            if nonneg {
                pos.push((*root, *coroot, c.clone()));
            }
        }
        pos.sort_by(|a, b| {
            let ha: i32 = a.2.iter().sum();
            let hb: i32 = b.2.iter().sum();
            ha.cmp(&hb).then_with(|| b.2.cmp(&a.2))
        });
        let npos = pos.len();
        let mut roots = Vec::with_capacity(2 * npos);
        let mut coroots = Vec::with_capacity(2 * npos);
        let mut coeffs = Vec::with_capacity(2 * npos);
        for (rt, co, c) in &pos {
            roots.push(*rt);
            coroots.push(*co);
            coeffs.push(c.clone());
        }
        for (rt, co, c) in &pos {
            roots.push(-*rt);
            coroots.push(-*co);
            coeffs.push(c.iter().map(|x| -x).collect());
        }
        let index: HashMap<LatticeVec, usize> = roots.iter().enumerate().map(|(i, v)| (*v, i)).collect();

        // Irreducible components via the Dynkin graph.
        let mut comp_of_simple = vec![usize::MAX; r];
        let mut components = Vec::new();
        for s in 0..r {
            if comp_of_simple[s] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut stack = vec![s];
            let mut simples = Vec::new();
            comp_of_simple[s] = id;
            while let Some(i) = stack.pop() {
                simples.push(i);
                for j in 0..r {
                    if cartan[i][j] != 0 && comp_of_simple[j] == usize::MAX {
                        comp_of_simple[j] = id;
                        stack.push(j);
                    }
                }
            }
            simples.sort();
            components.push(Component { simples, highest: usize::MAX });
        }
        for comp in components.iter_mut() {
            let in_comp = |c: &Vec<i32>| c.iter().enumerate().all(|(i, &x)| x == 0 || comp.simples.contains(&i));
            let best = (0..npos)
                .filter(|&i| in_comp(&coeffs[i]))
                .max_by_key(|&i| (coeffs[i].iter().sum::<i32>(), std::cmp::Reverse(i)))
                .expect("component has roots");
            comp.highest = best;
        }

        let mut two_rho = LatticeVec::zero(dim);
        for rt in &roots[..npos] {
            two_rho = two_rho + *rt;
        }

        let mut refl = vec![0u16; npos * 2 * npos];
        let mut pair = vec![0i32; npos * 2 * npos];
        for a in 0..npos {
            for b in 0..2 * npos {
                let p = coroots[a].dot(&roots[b]);
                pair[a * 2 * npos + b] = p;
                let img = roots[b] - roots[a].scale(p);
                refl[a * 2 * npos + b] = index[&img] as u16;
            }
        }

        // Left inverse of the coroot matrix for coroot coordinates.
        let gram: Vec<Vec<Q>> =
            (0..r).map(|i| (0..r).map(|j| Q::from_integer(sc[i].dot(&sc[j]) as i64)).collect()).collect();
        let mut inv_rows: Vec<Vec<Q>> = vec![Vec::new(); r];
        for j in 0..r {
            let e: Vec<Q> = (0..r).map(|i| Q::from_integer((i == j) as i64)).collect();
            let col = solve_rational(&gram, &e)
                .ok_or_else(|| Error::Input("simple coroots are linearly dependent".into()))?;
            for i in 0..r {
                inv_rows[i].push(col[i]);
            }
        }
        // L = G^{-1} A^T where A has the simple coroots as columns.
        let left: Vec<Vec<Q>> = (0..r)
            .map(|i| {
                (0..dim)
                    .map(|d| {
                        (0..r).fold(Q::from_integer(0), |acc, k| {
                            acc + inv_rows[i][k] * Q::from_integer(sc[k].get(d) as i64)
                        })
                    })
                    .collect()
            })
            .collect();
        let mut den = 1i64;
        for row in &left {
            for x in row {
                den = den / gcd(den, *x.denom()) * *x.denom();
            }
        }
        let coroot_num =
            left.iter().map(|row| row.iter().map(|x| (*x * Q::from_integer(den)).to_integer()).collect()).collect();

        let mut simple_affine = Vec::new();
        let multi = components.len() > 1;
        for (ci, comp) in components.iter().enumerate() {
            simple_affine.push(SimpleAffine {
                root: AffineRoot::new(comp.highest + npos, 1),
                name: if multi { format!("0_{}", ci + 1) } else { "0".into() },
                component: ci,
                finite: None,
            });
        }
        for i in 0..r {
            simple_affine.push(SimpleAffine {
                root: AffineRoot::new(i, 0),
                name: format!("{}", i + 1),
                component: comp_of_simple[i],
                finite: Some(i),
            });
        }

        let rd = RootDatum {
            name: name.to_string(),
            dim,
            simple_roots: sr,
            simple_coroots: sc,
            cartan,
            roots,
            coroots,
            coeffs,
            npos,
            index,
            components,
            comp_of_simple,
            two_rho,
            refl,
            pair,
            coroot_num,
            coroot_den: den,
            simple_affine,
        };
        rd.check_invariants()?;
        Ok(rd)
    }

    fn check_invariants(&self) -> Result<()> {
        for i in 0..self.rank() {
            if self.simple_coroots[i].dot(&self.two_rho) != 2 {
                return property("<a_i^vee, 2rho> != 2");
            }
            if !self.is_positive_root(i) || self.coeffs[i].iter().sum::<i32>() != 1 {
                return property("simple roots are not the first positive roots");
            }
        }
        for comp in &self.components {
            let th = &self.coeffs[comp.highest];
            for a in 0..self.npos {
                let inside = self.coeffs[a].iter().enumerate().all(|(i, &x)| x == 0 || comp.simples.contains(&i));
                if inside && th.iter().zip(&self.coeffs[a]).any(|(t, x)| t < x) {
                    return property("highest root does not dominate its component");
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Dimension of `X^*` and `X_*`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of simple roots.
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn is_semisimple(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn num_roots(&self) -> usize {
        2 * self.npos
    }

    pub fn simple_root(&self, i: usize) -> LatticeVec {
        self.simple_roots[i]
    }

    pub fn simple_coroot(&self, i: usize) -> LatticeVec {
        self.simple_coroots[i]
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn root(&self, r: usize) -> LatticeVec {
        self.roots[r]
    }

    pub fn coroot(&self, r: usize) -> LatticeVec {
        self.coroots[r]
    }

    /// Coefficients of root `r` in the basis of simple roots.
    pub fn coefficients(&self, r: usize) -> &[i32] {
        &self.coeffs[r]
    }

    pub fn height(&self, r: usize) -> i32 {
        self.coeffs[r].iter().sum()
    }

    pub fn root_index(&self, v: &LatticeVec) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn is_positive_root(&self, r: usize) -> bool {
        r < self.npos
    }

    pub fn neg_root(&self, r: usize) -> usize {
        if r < self.npos {
            r + self.npos
        } else {
            r - self.npos
        }
    }

    /// The positive root among ±r.
    pub fn abs_root(&self, r: usize) -> usize {
        r % self.npos
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of_simple(&self, i: usize) -> usize {
        self.comp_of_simple[i]
    }

    pub fn two_rho(&self) -> LatticeVec {
        self.two_rho
    }

    /// `⟨coweight, weight⟩` with a length check.
    pub fn pairing(&self, coweight: &LatticeVec, weight: &LatticeVec) -> Result<i32> {
        if coweight.len() != self.dim || weight.len() != self.dim {
            return input(format!(
                "pairing expects vectors of length {}, got {} and {}",
                self.dim,
                coweight.len(),
                weight.len()
            ));
        }
        Ok(coweight.dot(weight))
    }

    /// `⟨a^vee, b⟩` for root indices.
    pub fn pair_roots(&self, a: usize, b: usize) -> i32 {
        let v = self.pair[self.abs_root(a) * 2 * self.npos + b];
        if a < self.npos {
            v
        } else {
            -v
        }
    }

    /// Index of `s_a(b)`.
    pub fn reflect_root(&self, a: usize, b: usize) -> usize {
        self.refl[self.abs_root(a) * 2 * self.npos + b] as usize
    }

    /// `⟨λ, α_r⟩` for a coweight `λ`.
    pub fn pair_with_root(&self, lambda: &LatticeVec, r: usize) -> i32 {
        lambda.dot(&self.roots[r])
    }

    pub fn is_positive(&self, a: AffineRoot) -> bool {
        if (a.root as usize) < self.npos {
            a.level >= 0
        } else {
            a.level >= 1
        }
    }

    pub fn neg_affine(&self, a: AffineRoot) -> AffineRoot {
        AffineRoot::new(self.neg_root(a.root as usize), -a.level)
    }

    /// `s_a(b) = b − ⟨α^vee, β⟩ a` on affine roots.
    pub fn reflect_affine(&self, a: AffineRoot, b: AffineRoot) -> AffineRoot {
        let p = self.pair_roots(a.root as usize, b.root as usize);
        AffineRoot::new(self.reflect_root(a.root as usize, b.root as usize), b.level - p * a.level)
    }

    pub fn simple_affine(&self) -> &[SimpleAffine] {
        &self.simple_affine
    }

    /// The simple affine roots: the finite simple roots at level 0 and
    /// `(−θ_c, 1)` for each component.
    pub fn simple_affine_roots(&self) -> Vec<AffineRoot> {
        self.simple_affine.iter().map(|s| s.root).collect()
    }

    /// Node index of a simple affine root, if it is one.
    pub fn simple_affine_index(&self, a: AffineRoot) -> Option<usize> {
        self.simple_affine.iter().position(|s| s.root == a)
    }

    /// `a·ã + b·b̃` if it is an affine root, else `None`.
    pub fn affine_root_arith(&self, x: AffineRoot, y: AffineRoot, a: Q, b: Q) -> Option<AffineRoot> {
        let cx = &self.coeffs[x.root as usize];
        let cy = &self.coeffs[y.root as usize];
        let mut target = Vec::with_capacity(cx.len());
        for (p, q) in cx.iter().zip(cy) {
            let v = a * Q::from_integer(*p as i64) + b * Q::from_integer(*q as i64);
            if !v.is_integer() {
                return None;
            }
            target.push(v.to_integer() as i32);
        }
        let level = a * Q::from_integer(x.level as i64) + b * Q::from_integer(y.level as i64);
        if !level.is_integer() {
            return None;
        }
        let r = (0..self.num_roots()).find(|&r| self.coeffs[r] == target)?;
        Some(AffineRoot::new(r, level.to_integer() as i32))
    }

    /// All affine roots `p·x + q·y` with rationals `p, q > 0` and level at
    /// most `cap`. The flag reports whether roots above the cap were skipped.
    pub fn positive_combinations(&self, x: AffineRoot, y: AffineRoot, cap: i32) -> (Vec<AffineRoot>, bool) {
        let (xr, yr) = (x.root as usize, y.root as usize);
        let mut out = Vec::new();
        let mut capped = false;
        if xr == yr {
            let (lo, hi) = (x.level.min(y.level), x.level.max(y.level));
            for n in lo + 1..hi {
                if n <= cap {
                    out.push(AffineRoot::new(xr, n));
                } else {
                    capped = true;
                }
            }
            return (out, capped);
        }
        if xr == self.neg_root(yr) {
            // p − q = ±1 gives every level beyond the endpoint on each side.
            for (r, start) in [(xr, x.level), (yr, y.level)] {
                for n in start + 1..=cap {
                    out.push(AffineRoot::new(r, n));
                }
            }
            return (out, true);
        }
        let cx = &self.coeffs[xr];
        let cy = &self.coeffs[yr];
        let n = cx.len();
        let mut pivot = None;
        'outer: for i in 0..n {
            for j in i + 1..n {
                let det = cx[i] * cy[j] - cx[j] * cy[i];
                if det != 0 {
                    pivot = Some((i, j, det));
                    break 'outer;
                }
            }
        }
        let Some((i, j, det)) = pivot else {
            return (out, false);
        };
        for g in 0..self.num_roots() {
            let cg = &self.coeffs[g];
            let p = Q::new((cg[i] * cy[j] - cg[j] * cy[i]) as i64, det as i64);
            let q = Q::new((cx[i] * cg[j] - cx[j] * cg[i]) as i64, det as i64);
            if p <= Q::from_integer(0) || q <= Q::from_integer(0) {
                continue;
            }
            let consistent = (0..n).all(|k| {
                p * Q::from_integer(cx[k] as i64) + q * Q::from_integer(cy[k] as i64) == Q::from_integer(cg[k] as i64)
            });
            if !consistent {
                continue;
            }
            let lvl = p * Q::from_integer(x.level as i64) + q * Q::from_integer(y.level as i64);
            if lvl.is_integer() {
                let l = lvl.to_integer() as i32;
                if l <= cap {
                    out.push(AffineRoot::new(g, l));
                } else {
                    capped = true;
                }
            }
        }
        (out, capped)
    }

    /// Coordinates of a coweight in the basis of simple coroots, if it lies
    /// in their integral span.
    pub fn coroot_coords(&self, v: &LatticeVec) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(self.rank());
        for row in &self.coroot_num {
            let s: i64 = row.iter().zip(v.as_slice()).map(|(a, b)| a * *b as i64).sum();
            if s % self.coroot_den != 0 {
                return None;
            }
            out.push(s / self.coroot_den);
        }
        let mut back = LatticeVec::zero(self.dim);
        for (i, c) in out.iter().enumerate() {
            back = back + self.simple_coroots[i].scale(*c as i32);
        }
        (back == *v).then_some(out)
    }

    /// `v` lies in the cone `Σ ℤ_{≥0} α_i^vee`.
    pub fn in_coroot_cone(&self, v: &LatticeVec) -> bool {
        self.coroot_coords(v).is_some_and(|c| c.iter().all(|&x| x >= 0))
    }

    /// `a ≤ b` in the coroot-cone order.
    pub fn coweight_le(&self, a: &LatticeVec, b: &LatticeVec) -> bool {
        self.in_coroot_cone(&(*b - *a))
    }

    pub fn is_dominant(&self, mu: &LatticeVec) -> bool {
        self.simple_roots.iter().all(|a| mu.dot(a) >= 0)
    }

    /// The coweight `Σ m_i ω_i^vee` in lattice coordinates (semisimple data only).
    pub fn coweight_from_fundamental(&self, m: &[i64]) -> Result<LatticeVec> {
        if !self.is_semisimple() {
            return input("fundamental-coweight coordinates need a semisimple datum");
        }
        if m.len() != self.rank() {
            return input(format!("expected {} fundamental-coweight coordinates", self.rank()));
        }
        // Solve ⟨v, α_j⟩ = m_j for v in X_* ⊗ Q.
        let a: Vec<Vec<Q>> = (0..self.rank())
            .map(|j| (0..self.dim).map(|d| Q::from_integer(self.simple_roots[j].get(d) as i64)).collect())
            .collect();
        let b: Vec<Q> = m.iter().map(|&x| Q::from_integer(x)).collect();
        let v = solve_rational(&a, &b).ok_or_else(|| Error::Input("singular root matrix".into()))?;
        if v.iter().any(|x| !x.is_integer()) {
            return input("this combination of fundamental coweights is not in the cocharacter lattice");
        }
        Ok(LatticeVec::from_slice(&v.iter().map(|x| x.to_integer() as i32).collect::<Vec<_>>()))
    }

    /// W-invariant form `(x, y) = Σ_{β ∈ Φ} ⟨β^vee, x⟩⟨β^vee, y⟩` on weights.
    pub fn invariant_form(&self, x: &LatticeVec, y: &LatticeVec) -> i64 {
        self.coroots.iter().map(|c| c.dot(x) as i64 * c.dot(y) as i64).sum()
    }

    /// `K` (simple affine node indices) generates a finite group iff the Gram
    /// matrix of the finite parts is positive definite.
    pub fn is_spherical(&self, k: &[usize]) -> bool {
        let vecs: Vec<LatticeVec> = k.iter().map(|&i| self.roots[self.simple_affine[i].root.root as usize]).collect();
        let n = vecs.len();
        let mut m: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| self.invariant_form(&vecs[i], &vecs[j]) as i128).collect()).collect();
        // Bareiss elimination: the pivots are the leading principal minors.
        let mut prev = 1i128;
        for p in 0..n {
            if m[p][p] <= 0 {
                return false;
            }
            for i in p + 1..n {
                for j in p + 1..n {
                    m[i][j] = (m[i][j] * m[p][p] - m[i][p] * m[p][j]) / prev;
                }
            }
            prev = m[p][p];
        }
        true
    }

    /// Renders a root in simple-root coordinates, e.g. "-a1-a2".
    pub fn root_name(&self, r: usize) -> String {
        let mut s = String::new();
        for (i, &c) in self.coeffs[r].iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            if c.abs() != 1 {
                s.push_str(&c.abs().to_string());
            }
            s.push_str(&format!("a{}", i + 1));
        }
        s
    }

    pub fn affine_root_name(&self, a: AffineRoot) -> String {
        format!("({},{})", self.root_name(a.root as usize), a.level)
    }

    /// Parses the output of [`RootDatum::affine_root_name`].
    pub fn parse_affine_root(&self, s: &str) -> Result<AffineRoot> {
        let bad = || Error::Input(format!("cannot parse affine root {s:?}"));
        let body = s.trim().strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (expr, level) = body.rsplit_once(',').ok_or_else(bad)?;
        let level: i32 = level.trim().parse().map_err(|_| bad())?;
        let expr = expr.replace('−', "-").replace(' ', "");
        let mut coeffs = vec![0i32; self.rank()];
        let mut rest = expr.as_str();
        while !rest.is_empty() {
            let (sign, tail) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let apos = tail.find('a').ok_or_else(bad)?;
            let k: i32 = if apos == 0 { 1 } else { tail[..apos].parse().map_err(|_| bad())? };
            let after = &tail[apos + 1..];
            let end = after.find(['+', '-']).unwrap_or(after.len());
            let idx: usize = after[..end].parse().map_err(|_| bad())?;
            if idx == 0 || idx > self.rank() {
                return Err(bad());
            }
            coeffs[idx - 1] += sign * k;
            rest = &after[end..];
        }
        let r = (0..self.num_roots()).find(|&r| self.coeffs[r] == coeffs).ok_or_else(bad)?;
        Ok(AffineRoot::new(r, level))
    }

    /// Parses a CLI token such as "a1", "a0" or "a0_2" into a node index.
    pub fn parse_node(&self, tok: &str) -> Result<usize> {
        let t = tok.trim();
        let name = t.strip_prefix('a').or_else(|| t.strip_prefix('s')).unwrap_or(t);
        let name = if name == "0" && self.components.len() > 1 { "0_1" } else { name };
        self.simple_affine
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::Input(format!("unknown simple affine node {tok:?}")))
    }
}
