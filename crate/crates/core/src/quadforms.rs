//! Quadratic forms over prime fields of odd characteristic, their special
//! orthogonal groups, and orbit experiments under them.
//!
//! Conventions: `q(v) = vᵀGv` and `B(u,v) = q(u+v) − q(u) − q(v) = 2uᵀGv`.
//! Group elements act on column vectors, so `(gh)·v = g·(h·v)`.

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::gclsets::gcl;
use crate::matgroups::{parse_int_rows, GroupTable, Law};
use crate::rings::is_prime;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt;

/// Default cap on the order of an enumerated orthogonal group.
pub const SO_CAP: usize = 200_000;

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime: a^(p-2)
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn det_mod_p(n: usize, a: &[u64], p: u64) -> u64 {
    // Gaussian elimination over F_p
    let mut m = a.to_vec();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r * n + col] % p != 0) else {
            return 0;
        };
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            det = (p - det) % p;
        }
        let d = m[col * n + col] % p;
        det = det * d % p;
        let di = inv_mod(d, p);
        for r in col + 1..n {
            let f = m[r * n + col] % p * di % p;
            if f == 0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] = (m[r * n + k] + p * p - f * m[col * n + k] % p) % p;
            }
        }
    }
    det
}

/// A quadratic form on F_p^n given by its symmetric Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadForm {
    pub p: u64,
    pub n: usize,
    /// Row-major, entries reduced mod p.
    pub gram: Vec<u64>,
}

impl QuadForm {
    pub fn new(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::invalid(format!("quadratic forms need an odd prime field, got {p}")));
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("Gram matrix must be square and non-empty"));
        }
        let gram: Vec<u64> = rows.iter().flatten().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        for i in 0..n {
            for j in 0..i {
                if gram[i * n + j] != gram[j * n + i] {
                    return Err(Error::invalid("Gram matrix is not symmetric"));
                }
            }
        }
        Ok(QuadForm { p, n, gram })
    }

    pub fn diagonal(p: u64, coeffs: &[i64]) -> Result<Self> {
        let n = coeffs.len();
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { coeffs[i] } else { 0 }).collect()).collect();
        Self::new(p, &rows)
    }

    /// Parses `diag:<c1>,...,<cn>` or `gram:[[...],...]`.
    pub fn parse(text: &str, p: u64) -> Result<Self> {
        if let Some(rest) = text.strip_prefix("diag:") {
            let coeffs = rest
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::syntax(0, format!("bad coefficient `{c}` in `{text}`"))))
                .collect::<Result<Vec<_>>>()?;
            Self::diagonal(p, &coeffs)
        } else if let Some(rest) = text.strip_prefix("gram:") {
            Self::new(p, &parse_int_rows(rest)?)
        } else {
            Err(Error::syntax(0, format!("form spec must start with `diag:` or `gram:`, got `{text}`")))
        }
    }

    /// Orthogonal sum with the hyperbolic plane `2xy`.
    pub fn plus_hyperbolic(&self) -> QuadForm {
        let n = self.n + 2;
        let mut gram = vec![0u64; n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                gram[i * n + j] = self.gram[i * self.n + j];
            }
        }
        gram[self.n * n + self.n + 1] = 1;
        gram[(self.n + 1) * n + self.n] = 1;
        QuadForm { p: self.p, n, gram }
    }

    pub fn det(&self) -> u64 {
        det_mod_p(self.n, &self.gram, self.p)
    }

    pub fn is_regular(&self) -> bool {
        self.det() != 0
    }

    fn check_dim(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::invalid(format!("vector of length {} for a form of dimension {}", v.len(), self.n)));
        }
        Ok(())
    }

    /// `uᵀGv` without checks; entries assumed reduced.
    fn gram_pair(&self, u: &[u64], v: &[u64]) -> u64 {
        let (n, p) = (self.n, self.p);
        let mut acc = 0u64;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            let mut row = 0u64;
            for j in 0..n {
                row += self.gram[i * n + j] * v[j] % p;
            }
            acc = (acc + u[i] * (row % p)) % p;
        }
        acc
    }

    pub fn eval(&self, v: &[u64]) -> Result<u64> {
        self.check_dim(v)?;
        Ok(self.q(v))
    }

    pub fn bilinear(&self, u: &[u64], v: &[u64]) -> Result<u64> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        Ok(self.b(u, v))
    }

    fn q(&self, v: &[u64]) -> u64 {
        self.gram_pair(v, v)
    }

    fn b(&self, u: &[u64], v: &[u64]) -> u64 {
        2 * self.gram_pair(u, v) % self.p
    }

    /// Number of vectors in F_p^n.
    pub fn space_size(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    pub fn pack(&self, v: &[u64]) -> u32 {
        v.iter().rev().fold(0u64, |acc, &x| acc * self.p + x % self.p) as u32
    }

    pub fn unpack(&self, mut i: u32) -> Vec<u64> {
        (0..self.n)
            .map(|_| {
                let d = i as u64 % self.p;
                i /= self.p as u32;
                d
            })
            .collect()
    }

    /// Matrix of the reflection `x ↦ x − (B(x,v)/q(v))·v`.
    pub fn reflection(&self, v: &[u64]) -> Result<Vec<u64>> {
        self.check_dim(v)?;
        let (n, p) = (self.n, self.p);
        let qv = self.q(v);
        if qv == 0 {
            return Err(Error::precondition("reflection vector must be non-isotropic"));
        }
        let c = 2 * inv_mod(qv, p) % p;
        let gv: Vec<u64> = (0..n).map(|j| (0..n).map(|k| self.gram[j * n + k] * v[k]).sum::<u64>() % p).collect();
        let mut m = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let id = u64::from(i == j);
                m[i * n + j] = (id + p - c * v[i] % p * gv[j] % p) % p;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let diag = (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.gram[i * self.n + j] == 0));
        if diag {
            let c: Vec<String> = (0..self.n).map(|i| self.gram[i * self.n + i].to_string()).collect();
            write!(f, "diag:{}", c.join(","))
        } else {
            let rows: Vec<String> = self
                .gram
                .chunks(self.n)
                .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            write!(f, "gram:[{}]", rows.join(","))
        }
    }
}

/// The matrix of pairings for `(a1, a2, a3)`. Entries (2,3) and (3,2) hold
/// `B(a1,a3)` rather than `B(a2,a3)`; this asymmetry is intended.
pub fn gram_triple(f: &QuadForm, a1: &[u64], a2: &[u64], a3: &[u64]) -> Result<[[u64; 3]; 3]> {
    let b = |u: &[u64], v: &[u64]| f.bilinear(u, v);
    let b13 = b(a1, a3)?;
    Ok([
        [b(a1, a1)?, b(a1, a2)?, b13],
        [b(a2, a1)?, b(a2, a2)?, b13],
        [b(a3, a1)?, b13, b(a3, a3)?],
    ])
}

/// Every principal minor over a non-empty index set is nonzero mod p.
pub fn general_position(m: &[[u64; 3]; 3], p: u64) -> bool {
    (1u32..8).all(|mask| {
        let idx: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
        let k = idx.len();
        let sub: Vec<u64> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| m[i][j] % p)).collect();
        det_mod_p(k, &sub, p) != 0
    })
}

/// Maximal dimension of a totally isotropic subspace, by exhaustive search.
pub fn witt_index(f: &QuadForm) -> Result<usize> {
    if !f.is_regular() {
        return Err(Error::precondition("witt_index needs a regular form"));
    }
    if f.n > 5 {
        return Err(Error::Unsupported("witt_index searches dimensions up to 5".into()));
    }
    let isotropic: Vec<Vec<u64>> = (1..f.space_size() as u32)
        .map(|i| f.unpack(i))
        .filter(|v| f.q(v) == 0 && v.iter().find(|&&x| x != 0) == Some(&1))
        .collect();
    // depth-first extension of an isotropic basis; vectors normalized to a
    // leading 1 and chosen in increasing order to avoid revisiting
    fn extend(f: &QuadForm, iso: &[Vec<u64>], basis: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(basis.len());
        if *best == f.n / 2 {
            return;
        }
        let start = basis.last().map_or(0, |&i| i + 1);
        for c in start..iso.len() {
            let v = &iso[c];
            if basis.iter().any(|&b| f.b(&iso[b], v) != 0) {
                continue;
            }
            let mut rows: Vec<Vec<u64>> = basis.iter().map(|&b| iso[b].clone()).collect();
            rows.push(v.clone());
            if rank_mod_p(&rows, f.p) < rows.len() {
                continue;
            }
            basis.push(c);
            extend(f, iso, basis, best);
            basis.pop();
            if *best == f.n / 2 {
                return;
            }
        }
    }
    let mut best = 0;
    extend(f, &isotropic, &mut Vec::new(), &mut best);
    Ok(best)
}

pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % p;
                for k in 0..cols {
                    m[r][k] = (m[r][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// SO of a regular form, enumerated, together with its action on vectors.
pub struct OrthogonalGroup {
    pub form: QuadForm,
    pub table: GroupTable,
}

impl fmt::Debug for OrthogonalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrthogonalGroup({} over gf:{}, order {})", self.form, self.form.p, self.table.order())
    }
}

fn to_u32(m: &[u64]) -> Vec<u32> {
    m.iter().map(|&x| x as u32).collect()
}

/// SO_q(F_p), generated by products of pairs of reflections. A fixed
/// reflection τ₀ is paired with each τ_w (τ_aτ_b = (τ₀τ_a)⁻¹(τ₀τ_b)), and a
/// pair is kept only when it enlarges the group generated so far.
pub fn so_group(f: &QuadForm, cap: usize) -> Result<OrthogonalGroup> {
    if !f.is_regular() {
        return Err(Error::precondition("so_group needs a regular form"));
    }
    let n = f.n;
    let law = Law::Matrix { n, modulus: f.p as u32, scalars: vec![1] };
    let label = format!("so:{}:gf:{}", f, f.p);
    let nonisotropic: Vec<Vec<u64>> = (1..f.space_size() as u32)
        .map(|i| f.unpack(i))
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1) && f.q(v) != 0)
        .collect();
    let Some(v0) = nonisotropic.first() else {
        // only possible for the zero form, excluded by regularity
        return Err(Error::Invariant("regular form without non-isotropic vectors".into()));
    };
    let t0 = f.reflection(v0)?;
    let mut gens: Vec<Vec<u32>> = Vec::new();
    let mut table = GroupTable::generate(label.clone(), law.clone(), &[], cap)?;
    for w in &nonisotropic[1..] {
        let tw = f.reflection(w)?;
        let g = to_u32(&mat_mul(n, &t0, &tw, f.p));
        if table.index_of(&g).is_none() {
            gens.push(g);
            table = GroupTable::generate(label.clone(), law.clone(), &gens, cap)?;
        }
    }
    let group = OrthogonalGroup { form: f.clone(), table };
    group.verify()?;
    Ok(group)
}

fn mat_mul(n: usize, a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j] % p).sum::<u64>() % p;
        }
    }
    out
}

impl OrthogonalGroup {
    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// `gᵀGg = G` and `det g = 1` for every element.
    fn verify(&self) -> Result<()> {
        let (n, p) = (self.form.n, self.form.p);
        for i in 0..self.order() as u32 {
            let g: Vec<u64> = self.table.element(i).iter().map(|&x| x as u64).collect();
            let gt: Vec<u64> = (0..n * n).map(|k| g[(k % n) * n + k / n]).collect();
            if mat_mul(n, &mat_mul(n, &gt, &self.form.gram, p), &g, p) != self.form.gram || det_mod_p(n, &g, p) != 1 {
                return Err(Error::Invariant(format!("element {i} is not in SO of the form")));
            }
        }
        Ok(())
    }

    pub fn apply(&self, g: u32, v: &[u64]) -> Vec<u64> {
        let (n, p) = (self.form.n, self.form.p);
        let m = self.table.element(g);
        (0..n).map(|i| (0..n).map(|k| m[i * n + k] as u64 * v[k] % p).sum::<u64>() % p).collect()
    }

    pub fn apply_packed(&self, g: u32, v: u32) -> u32 {
        self.form.pack(&self.apply(g, &self.form.unpack(v)))
    }

    /// The orbit `G·v` as sorted packed vectors.
    pub fn orbit(&self, v: &[u64]) -> Vec<u32> {
        let start = self.form.pack(v);
        let mut seen = vec![false; self.form.space_size()];
        seen[start as usize] = true;
        let mut queue = VecDeque::from([start]);
        let mut out = vec![start];
        while let Some(x) = queue.pop_front() {
            for &g in self.table.generators() {
                let y = self.apply_packed(g, x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn stabilizer(&self, v: &[u64]) -> ElementSet {
        ElementSet::from_indices(self.order(), (0..self.order() as u32).filter(|&g| self.apply(g, v) == v))
    }

    /// Elements mapping `a` to `b`.
    fn transporters(&self, a: &[u64], b: &[u64]) -> Vec<u32> {
        (0..self.order() as u32).filter(|&g| self.apply(g, a) == b).collect()
    }
}

/// Witnesses σ, τ and a₄ with σ(a₁,a₃) = (a₁,a₄) and τ(a₁,a₃) = (a₂,a₄).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodTripleWitness {
    pub a4: Vec<u64>,
    pub sigma: u32,
    pub tau: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum GoodTriple {
    Good(GoodTripleWitness),
    /// Every pair (σ, τ) was examined.
    NotGood { pairs_examined: u64 },
}

/// Exhaustive search in index order: σ over the stabilizer of a₁, τ over
/// elements taking a₁ to a₂. The first witness found is returned.
pub fn good_triple(g: &OrthogonalGroup, a1: &[u64], a2: &[u64], a3: &[u64]) -> Result<GoodTriple> {
    let f = &g.form;
    for v in [a1, a2, a3] {
        f.check_dim(v)?;
    }
    if f.q(a1) == 0 {
        return Err(Error::precondition("a1 must be non-isotropic"));
    }
    let orbit = g.orbit(a1);
    for (name, v) in [("a2", a2), ("a3", a3)] {
        if orbit.binary_search(&f.pack(v)).is_err() {
            return Err(Error::precondition(format!("{name} is not in the orbit of a1")));
        }
    }
    let taus = g.transporters(a1, a2);
    let mut examined = 0u64;
    for sigma in 0..g.order() as u32 {
        if g.apply(sigma, a1) != a1 {
            continue;
        }
        let a4 = g.apply(sigma, a3);
        for &tau in &taus {
            examined += 1;
            if g.apply(tau, a3) == a4 {
                let w = GoodTripleWitness { a4, sigma, tau };
                verify_witness(g, a1, a2, a3, &w)?;
                return Ok(GoodTriple::Good(w));
            }
        }
    }
    Ok(GoodTriple::NotGood { pairs_examined: examined })
}

pub fn verify_witness(g: &OrthogonalGroup, a1: &[u64], a2: &[u64], a3: &[u64], w: &GoodTripleWitness) -> Result<()> {
    let ok = g.apply(w.sigma, a1) == a1 && g.apply(w.sigma, a3) == w.a4 && g.apply(w.tau, a1) == a2 && g.apply(w.tau, a3) == w.a4;
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant("good-triple witness does not re-verify".into()))
    }
}

/// `δ = β⁻¹τγ⁻¹τ⁻¹σγσ⁻¹` from a witness for `(a₁, βa₂, γa₁)`; checks
/// `δ(a₁) = a₂`.
pub fn main_idea_delta(g: &OrthogonalGroup, a1: &[u64], a2: &[u64], beta: u32, gamma: u32, w: &GoodTripleWitness) -> Result<u32> {
    let t = &g.table;
    verify_witness(g, a1, &g.apply(beta, a2), &g.apply(gamma, a1), w)?;
    let word = [t.inv(beta), w.tau, t.inv(gamma), t.inv(w.tau), w.sigma, gamma, t.inv(w.sigma)];
    let delta = word.iter().fold(t.identity(), |acc, &x| t.mul(acc, x));
    if g.apply(delta, a1) != a2 {
        return Err(Error::Invariant("delta does not move a1 to a2".into()));
    }
    Ok(delta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitCover {
    pub orbit_size: usize,
    /// `|gcl(α)^N·a|` for N = 0..=max_n (N = 0 gives `{a}`).
    pub sizes: Vec<usize>,
    pub curve: Vec<f64>,
    /// Least N with `gcl(α)^N·a = G·a`, if reached.
    pub covering_n: Option<usize>,
}

pub fn orbit_cover(g: &OrthogonalGroup, alpha: u32, a: &[u64], max_n: usize) -> Result<OrbitCover> {
    g.form.check_dim(a)?;
    if g.form.q(a) == 0 {
        return Err(Error::precondition("a must be non-isotropic"));
    }
    let orbit_size = g.orbit(a).len();
    let s: Vec<u32> = gcl(&g.table, alpha).to_vec();
    let mut reached = vec![false; g.form.space_size()];
    let mut frontier = vec![g.form.pack(a)];
    reached[frontier[0] as usize] = true;
    let mut current = frontier.clone();
    let mut sizes = vec![1usize];
    let mut covering_n = (orbit_size == 1).then_some(0);
    for n in 1..=max_n {
        // gcl^N·a = gcl·(gcl^{N−1}·a); id ∈ gcl keeps the sets nested
        let mut next = Vec::new();
        for &v in &current {
            for &x in &s {
                let y = g.apply_packed(x, v);
                if !reached[y as usize] {
                    reached[y as usize] = true;
                    next.push(y);
                }
            }
        }
        current.extend_from_slice(&next);
        frontier = next;
        sizes.push(current.len());
        if covering_n.is_none() && current.len() == orbit_size {
            covering_n = Some(n);
        }
        if frontier.is_empty() && covering_n.is_none() {
            // stalled below full coverage; the rest of the curve is flat
            sizes.resize(max_n + 1, current.len());
            break;
        }
    }
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invariant("coverage curve is not monotone".into()));
    }
    let curve = sizes.iter().map(|&k| k as f64 / orbit_size as f64).collect();
    Ok(OrbitCover { orbit_size, sizes, curve, covering_n })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PmCheck {
    pub delta_size: usize,
    pub lambda_size: usize,
    pub centralizer_size: usize,
    pub equal: bool,
}

/// For `C` spanned by pairwise orthogonal non-isotropic vectors:
/// Δ = pointwise stabilizer of C^⊥, Λ = elements acting as ±1 on C;
/// reports whether `Cent(Δ) = Λ`.
pub fn pm_stabilizer_centralizer_check(g: &OrthogonalGroup, basis: &[Vec<u64>]) -> Result<PmCheck> {
    let f = &g.form;
    for (i, c) in basis.iter().enumerate() {
        f.check_dim(c)?;
        if f.q(c) == 0 {
            return Err(Error::precondition("basis vectors must be non-isotropic"));
        }
        if basis[..i].iter().any(|d| f.b(c, d) != 0) {
            return Err(Error::precondition("basis vectors must be pairwise orthogonal"));
        }
    }
    let perp: Vec<Vec<u64>> = (0..f.space_size() as u32)
        .map(|i| f.unpack(i))
        .filter(|w| basis.iter().all(|c| f.b(w, c) == 0))
        .collect();
    let p = f.p;
    let neg = |v: &[u64]| v.iter().map(|&x| (p - x) % p).collect::<Vec<_>>();
    let all = 0..g.order() as u32;
    let delta = ElementSet::from_indices(g.order(), all.clone().filter(|&x| perp.iter().all(|w| g.apply(x, w) == *w)));
    let lambda = ElementSet::from_indices(
        g.order(),
        all.filter(|&x| basis.iter().all(|c| g.apply(x, c) == *c) || basis.iter().all(|c| g.apply(x, c) == neg(c))),
    );
    let cent = g.table.centralizer(&delta);
    if !lambda.is_subset(&cent) {
        return Err(Error::Invariant("an element acting as ±1 on C fails to centralize Δ".into()));
    }
    Ok(PmCheck { delta_size: delta.len(), lambda_size: lambda.len(), centralizer_size: cent.len(), equal: cent == lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64, diag: &[i64]) -> QuadForm {
        QuadForm::diagonal(p, diag).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let q = f(5, &[1, 1, 1]);
        assert_eq!(q.eval(&[1, 2, 0]).unwrap(), 0);
        assert_eq!(q.bilinear(&[1, 2, 3], &[0, 0, 0]).unwrap(), 0);
        assert!(q.eval(&[1, 2]).is_err());
        assert_eq!(QuadForm::parse("diag:1,1,1", 5).unwrap(), q);
        assert_eq!(QuadForm::parse("gram:[[1,0,0],[0,1,0],[0,0,1]]", 5).unwrap(), q);
        assert!(QuadForm::parse("gram:[[1,2],[0,1]]", 5).is_err());
        assert!(QuadForm::parse("diag:1,1", 4).is_err());
        assert!(QuadForm::parse("sym:1", 5).is_err());
        assert_eq!(q.to_string(), "diag:1,1,1");
    }

    #[test]
    fn polarization_identity() {
        for p in [3u64, 5, 7] {
            for form in [f(p, &[1, 2, 3]), QuadForm::new(p, &[vec![1, 1, 0], vec![1, 2, 1], vec![0, 1, 3]]).unwrap()] {
                let vs: Vec<Vec<u64>> = (0..form.space_size() as u32).map(|i| form.unpack(i)).collect();
                for u in &vs {
                    for v in &vs {
                        let s: Vec<u64> = u.iter().zip(v).map(|(a, b)| (a + b) % p).collect();
                        let want = (form.q(&s) + 2 * p - form.q(u) - form.q(v)) % p;
                        assert_eq!(form.b(u, v), want);
                        assert_eq!(form.b(u, v), form.b(v, u));
                    }
                }
            }
        }
    }

    #[test]
    fn gram_triple_examples() {
        let q = f(5, &[1, 2, 3]);
        let a = [1u64, 0, 0];
        let m = gram_triple(&q, &a, &a, &a).unwrap();
        assert!(!general_position(&m, 5));
        let (a1, a2, a3) = ([1u64, 0, 0], [0u64, 1, 0], [0u64, 0, 1]);
        let m = gram_triple(&q, &a1, &a2, &a3).unwrap();
        assert_eq!(m, [[2, 0, 0], [0, 4, 0], [0, 0, 1]]);
        assert!(general_position(&m, 5));
        // the (2,3) entry follows a1, not a2
        let m = gram_triple(&q, &[1, 0, 1], &[0, 1, 0], &[1, 0, 0]).unwrap();
        assert_eq!(m[1][2], q.b(&[1, 0, 1], &[1, 0, 0]));
        assert_ne!(m[1][2], q.b(&[0, 1, 0], &[1, 0, 0]));
    }

    #[test]
    fn general_position_matches_minor_oracle_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = f(7, &[1, 3, 5, 6]);
        for _ in 0..300 {
            let v: Vec<Vec<u64>> = (0..3).map(|_| (0..4).map(|_| rng.gen_range(0..7)).collect()).collect();
            let m = gram_triple(&q, &v[0], &v[1], &v[2]).unwrap();
            // Leibniz-formula oracle for each principal minor
            let minor = |idx: &[usize]| -> i64 {
                let e = |i: usize, j: usize| m[idx[i]][idx[j]] as i64;
                match idx.len() {
                    1 => e(0, 0),
                    2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
                    _ => {
                        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
                    }
                }
            };
            let sets: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
            let want = sets.iter().all(|s| minor(s).rem_euclid(7) != 0);
            assert_eq!(general_position(&m, 7), want);
            // halving every entry (the other pairing convention) keeps the verdict
            let half = inv_mod(2, 7);
            let h = m.map(|r| r.map(|x| x * half % 7));
            assert_eq!(general_position(&h, 7), want);
        }
    }

    #[test]
    fn witt_examples() {
        assert_eq!(witt_index(&QuadForm::new(5, &[vec![0, 1], vec![1, 0]]).unwrap()).unwrap(), 1);
        assert_eq!(witt_index(&f(3, &[1, 1, 1])).unwrap(), 1);
        assert_eq!(witt_index(&f(5, &[1, -2])).unwrap(), 0);
        assert_eq!(witt_index(&f(5, &[1, 1, 1, 1])).unwrap(), 2);
        assert_eq!(witt_index(&f(3, &[1, 1, 1, 1])).unwrap(), 2);
        assert_eq!(witt_index(&f(3, &[1, 1, 1, 2])).unwrap(), 1);
        assert_eq!(witt_index(&f(5, &[1, -2]).plus_hyperbolic()).unwrap(), 1);
        assert!(witt_index(&f(5, &[1, 0])).is_err());
    }

    #[test]
    fn so_orders_match_brute_force() {
        assert_eq!(so_group(&f(5, &[1, -2]), SO_CAP).unwrap().order(), 6);
        for (p, diag) in [(3u64, vec![1i64, 1]), (5, vec![1, 1]), (3, vec![1, 1, 1]), (5, vec![1, 1, 1]), (3, vec![1, 2, 2])] {
            let q = f(p, &diag);
            let n = q.n;
            // count det-1 matrices with gᵀGg = G
            let mut count = 0;
            let total = (p as usize).pow((n * n) as u32);
            for code in 0..total {
                let mut c = code;
                let g: Vec<u64> = (0..n * n)
                    .map(|_| {
                        let d = (c % p as usize) as u64;
                        c /= p as usize;
                        d
                    })
                    .collect();
                let gt: Vec<u64> = (0..n * n).map(|k| g[(k % n) * n + k / n]).collect();
                if det_mod_p(n, &g, p) == 1 && mat_mul(n, &mat_mul(n, &gt, &q.gram, p), &g, p) == q.gram {
                    count += 1;
                }
            }
            assert_eq!(so_group(&q, SO_CAP).unwrap().order(), count, "p={p} {diag:?}");
        }
    }

    #[test]
    fn good_triples_and_delta() {
        let g = so_group(&f(5, &[1, 1, 1]), SO_CAP).unwrap();
        let a1 = vec![1u64, 0, 0];
        match good_triple(&g, &a1, &a1, &a1).unwrap() {
            GoodTriple::Good(w) => {
                assert_eq!((w.sigma, w.tau), (0, 0));
                assert_eq!(w.a4, a1);
            }
            other => panic!("{other:?}"),
        }
        assert!(good_triple(&g, &[1, 2, 0], &[1, 2, 0], &[1, 2, 0]).is_err());
        let orbit = g.orbit(&a1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a2 = g.form.unpack(orbit[rng.gen_range(0..orbit.len())]);
            let beta = rng.gen_range(0..g.order() as u32);
            let gamma = rng.gen_range(0..g.order() as u32);
            let (b2, c1) = (g.apply(beta, &a2), g.apply(gamma, &a1));
            if let GoodTriple::Good(w) = good_triple(&g, &a1, &b2, &c1).unwrap() {
                let d = main_idea_delta(&g, &a1, &a2, beta, gamma, &w).unwrap();
                assert_eq!(g.apply(d, &a1), a2);
            }
        }
        let w = GoodTripleWitness { a4: a1.clone(), sigma: 0, tau: 0 };
        assert_eq!(main_idea_delta(&g, &a1, &a1, 0, 0, &w).unwrap(), 0);
    }

    #[test]
    fn good_triple_agrees_with_full_pair_scan() {
        let g = so_group(&f(3, &[1, 1, 1]), SO_CAP).unwrap();
        let a1 = vec![1u64, 0, 0];
        let orbit = g.orbit(&a1);
        for &x in &orbit {
            for &y in &orbit {
                let (a2, a3) = (g.form.unpack(x), g.form.unpack(y));
                let naive = (0..g.order() as u32).any(|s| {
                    (0..g.order() as u32).any(|t| {
                        g.apply(s, &a1) == a1 && g.apply(t, &a1) == a2 && g.apply(t, &a3) == g.apply(s, &a3)
                    })
                });
                assert_eq!(matches!(good_triple(&g, &a1, &a2, &a3).unwrap(), GoodTriple::Good(_)), naive);
            }
        }
    }

    #[test]
    fn orbit_cover_examples() {
        let g = so_group(&f(3, &[1, 1, 1, 1]), SO_CAP).unwrap();
        let a = [1u64, 0, 0, 0];
        let c = orbit_cover(&g, 0, &a, 3).unwrap();
        assert_eq!(c.sizes, vec![1, 1, 1, 1]);
        let centre = g.table.center();
        let orbit = g.orbit(&a).len();
        let mut covered = 0;
        for alpha in (0..g.order() as u32).filter(|&x| !centre.contains(x)).step_by(7) {
            let c = orbit_cover(&g, alpha, &a, 12).unwrap();
            assert!(c.sizes.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(c.orbit_size, orbit);
            // oracle: the orbit of a under the normal closure of α
            let nc = crate::gclsets::normal_closure(&g.table, &gcl(&g.table, alpha));
            let reach = nc.iter().map(|x| g.form.pack(&g.apply(x, &a))).collect::<std::collections::BTreeSet<_>>().len();
            assert_eq!(c.covering_n.is_some(), reach == orbit, "alpha {alpha}");
            if let Some(n) = c.covering_n {
                assert_eq!(c.sizes[n], orbit);
                assert!(c.sizes[n - 1] < orbit);
                covered += 1;
            }
        }
        assert!(covered > 0);
    }

    #[test]
    fn pm_checks() {
        let g = so_group(&f(5, &[1, 1, 1]), SO_CAP).unwrap();
        let whole = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let r = pm_stabilizer_centralizer_check(&g, &whole).unwrap();
        assert_eq!(r.delta_size, g.order());
        // −1 has determinant −1 in odd dimension, so only the identity
        assert_eq!(r.lambda_size, 1);
        let plane = vec![vec![1, 0, 0], vec![0, 1, 0]];
        let r = pm_stabilizer_centralizer_check(&g, &plane).unwrap();
        assert!(r.lambda_size <= r.centralizer_size);
        assert!(pm_stabilizer_centralizer_check(&g, &[vec![1, 0, 0], vec![1, 1, 0]]).is_err());
    }
}
